/** WebSocket plumbing: one socket, JSON messages, auto-reconnect. */

import { Command, ServerMessage } from "./protocol.js";
import { Store } from "./store.js";

/** The sliver of the WebSocket API the client uses; tests supply fakes. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

const RECONNECT_DELAY_MS = 1000;

export class TwinSocket {
  private socket: SocketLike | null = null;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly store: Store,
    private readonly factory: SocketFactory,
    private readonly reconnect: boolean = true,
  ) {}

  connect(): void {
    this.socket = this.factory(this.url);
    this.socket.onopen = () => this.store.onOpen();
    this.socket.onmessage = (ev) => {
      let msg: ServerMessage;
      try {
        msg = JSON.parse(ev.data) as ServerMessage;
      } catch {
        return; // not ours to crash on
      }
      this.store.onMessage(msg);
    };
    this.socket.onclose = () => {
      this.store.onClose();
      this.socket = null;
      if (this.reconnect && !this.closed) {
        setTimeout(() => this.connect(), RECONNECT_DELAY_MS);
      }
    };
  }

  /** Send a command; refuses (returns false) unless the session is live. */
  send(cmd: Command): boolean {
    if (this.socket === null || this.store.state.status !== "connected") {
      return false;
    }
    this.socket.send(JSON.stringify(cmd));
    this.store.onSend(cmd);
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
