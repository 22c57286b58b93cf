/** Browser entry point: connect to the twin and wire the view to the store. */

import { SocketLike, TwinSocket } from "./client.js";
import { Store } from "./store.js";
import { Actions, buildApp } from "./view.js";

function wsUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const host = location.host || "127.0.0.1:8080";
  return `${scheme}://${host}/ws`;
}

/** Adapt a browser WebSocket to the event-free handler shape the client expects. */
function openSocket(url: string): SocketLike {
  const ws = new WebSocket(url);
  const like: SocketLike = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onopen: null,
    onmessage: null,
    onclose: null,
  };
  ws.onopen = () => like.onopen?.();
  ws.onmessage = (ev) => like.onmessage?.({ data: String(ev.data) });
  ws.onclose = () => like.onclose?.();
  return like;
}

export function boot(root: HTMLElement): void {
  const store = new Store();
  const socket = new TwinSocket(wsUrl(), store, openSocket);

  const actions: Actions = {
    rotate: (cube, top) => socket.send({ cmd: "rotate", cube, top: top as never }),
    stimulus: (fields) => socket.send({ cmd: "stimulus", ...fields }),
    applyMapping: (target, program) => socket.send({ cmd: "set_mapping", target, program }),
    selectTarget: (target) => store.selectTarget(target),
    editBuffer: (text) => store.editBuffer(text),
    loadDefaults: () => store.loadDefaultText(),
  };

  const view = buildApp(root, actions);
  store.subscribe((state) => view.update(state));
  view.update(store.state);
  socket.connect();
}

const mount = document.getElementById("app");
if (mount !== null) {
  boot(mount);
}
