"""HTTP + WebSocket steering server.

GET /state returns the latest snapshot. The WebSocket at /ws greets with
{"proto": 1}, then pushes snapshots at 10 Hz and answers each client command
with an ack or an error object. All sessions steer the same engine.
"""

from __future__ import annotations

import asyncio
import contextlib
import json

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from pydantic import ValidationError

from .runtime import ServerRuntime
from .schemas import COMMAND_ADAPTER, PROTO_VERSION, CommandAck, CommandError, Snapshot

SNAPSHOT_PERIOD_S = 0.1


def create_app(runtime: ServerRuntime) -> FastAPI:
    @contextlib.asynccontextmanager
    async def lifespan(_app: FastAPI):
        runtime.start()
        try:
            yield
        finally:
            runtime.stop()

    app = FastAPI(title="dicetwin", lifespan=lifespan)
    app.state.runtime = runtime

    @app.get("/state", response_model=Snapshot)
    def get_state() -> Snapshot:
        return runtime.snapshot()

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket) -> None:
        await ws.accept()
        outgoing: "asyncio.Queue[str]" = asyncio.Queue()
        await outgoing.put(json.dumps({"proto": PROTO_VERSION}))

        async def pusher() -> None:
            while True:
                await outgoing.put(runtime.snapshot().model_dump_json())
                await asyncio.sleep(SNAPSHOT_PERIOD_S)

        async def sender() -> None:
            while True:
                await ws.send_text(await outgoing.get())

        tasks = [asyncio.create_task(pusher()), asyncio.create_task(sender())]
        try:
            while True:
                text = await ws.receive_text()
                reply = _handle_command(runtime, text)
                await outgoing.put(reply.model_dump_json())
        except WebSocketDisconnect:
            pass
        finally:
            for task in tasks:
                task.cancel()
            for task in tasks:
                with contextlib.suppress(asyncio.CancelledError):
                    await task

    return app


def _handle_command(runtime: ServerRuntime, text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return CommandError(error="parse", detail=str(exc))
    try:
        cmd = COMMAND_ADAPTER.validate_python(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        detail = f"{where}: {first['msg']}" if where else first["msg"]
        return CommandError(error="schema", detail=detail)
    error = runtime.submit(cmd)
    if error is not None:
        return CommandError(error="command", detail=error)
    return CommandAck(ack=cmd.cmd)
