from .app import create_app
from .runtime import ServerRuntime
from .schemas import COMMAND_ADAPTER, Snapshot

__all__ = ["COMMAND_ADAPTER", "ServerRuntime", "Snapshot", "create_app"]
