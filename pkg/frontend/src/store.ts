/** UI state: a thin, replayable reduction of the server's message stream.
 *
 * The store never simulates anything. Every displayed number comes from the
 * latest snapshot, so reconnecting or reloading the page reproduces the same
 * view from the same snapshot.
 */

import {
  Command,
  MappingInfo,
  ServerMessage,
  Snapshot,
  isAck,
  isError,
  isHello,
  isSnapshot,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface EditorState {
  target: string;
  buffer: string;
  /** Last rejection from the server, "line:col: message" inside detail. */
  error: string | null;
  /** True once the buffer has diverged from the snapshot text. */
  dirty: boolean;
}

export interface UiState {
  status: ConnectionStatus;
  snapshot: Snapshot | null;
  /** Commands sent but not yet acknowledged, oldest first. */
  pending: string[];
  /** Total snapshots applied; lets tests count ticks between cause and effect. */
  ticks: number;
  editor: EditorState;
  /** Built-in mapping texts, cached from snapshots where custom=false. */
  defaultTexts: Record<string, string>;
  /** parse/schema rejections (client bugs), shown in the status banner. */
  protocolError: string | null;
}

export type Listener = (state: UiState) => void;

export class Store {
  state: UiState = {
    status: "connecting",
    snapshot: null,
    pending: [],
    ticks: 0,
    editor: { target: "sensor:light", buffer: "", error: null, dirty: false },
    defaultTexts: {},
    protocolError: null,
  };

  private listeners: Listener[] = [];

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  onOpen(): void {
    this.state.status = "connecting"; // connected once the hello arrives
    this.emit();
  }

  onClose(): void {
    this.state.status = "disconnected";
    this.state.pending = [];
    this.emit();
  }

  onSend(cmd: Command): void {
    this.state.pending.push(cmd.cmd);
    if (cmd.cmd === "set_mapping") {
      this.state.editor.error = null; // cleared until the server answers
    }
    this.emit();
  }

  onMessage(msg: ServerMessage): void {
    if (isSnapshot(msg)) {
      this.applySnapshot(msg);
    } else if (isHello(msg)) {
      this.state.status = "connected";
    } else if (isAck(msg)) {
      this.takePending(msg.ack);
      if (msg.ack === "set_mapping") {
        this.state.editor.error = null;
        this.state.editor.dirty = false;
      }
    } else if (isError(msg)) {
      const failed = this.takePending(null);
      if (failed === "set_mapping") {
        this.state.editor.error = msg.detail;
      } else {
        this.state.protocolError = `${msg.error}: ${msg.detail}`;
      }
    }
    this.emit();
  }

  private takePending(expected: string | null): string | undefined {
    const cmd = this.state.pending.shift();
    if (expected !== null && cmd !== expected) {
      // acks arrive in send order; a mismatch means we lost sync, start over
      this.state.pending = [];
    }
    return cmd;
  }

  private applySnapshot(snap: Snapshot): void {
    this.state.snapshot = snap;
    this.state.ticks += 1;
    for (const [target, info] of Object.entries(snap.mappings)) {
      if (!info.custom) this.state.defaultTexts[target] = info.text;
    }
    if (snap.mapping_error && !this.state.editor.error) {
      this.state.editor.error = snap.mapping_error;
    }
    if (!this.state.editor.dirty) {
      const info = this.mappingFor(this.state.editor.target);
      if (info) this.state.editor.buffer = info.text;
    }
  }

  mappingFor(target: string): MappingInfo | null {
    return this.state.snapshot?.mappings[target] ?? null;
  }

  /** Switch the mapping editor to another target, loading its live text. */
  selectTarget(target: string): void {
    this.state.editor = { target, buffer: this.mappingFor(target)?.text ?? "", error: null, dirty: false };
    this.emit();
  }

  editBuffer(text: string): void {
    this.state.editor.buffer = text;
    this.state.editor.dirty = true;
    this.emit();
  }

  /** Restore the built-in text into the buffer (server-provided, cached). */
  loadDefaultText(): void {
    const text = this.state.defaultTexts[this.state.editor.target];
    if (text !== undefined) {
      this.state.editor.buffer = text;
      this.state.editor.dirty = true;
      this.state.editor.error = null;
      this.emit();
    }
  }
}
