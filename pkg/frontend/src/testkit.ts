/** Shared test scaffolding: canned snapshots and a scriptable fake socket. */

import { SocketLike } from "./client.js";
import { Command, Face, Snapshot } from "./protocol.js";

export const DEFAULT_SENSOR_FACES: Record<Face, Snapshot["sensor_cube"]["active_sensor"]> = {
  pos_x: "potentiometer",
  neg_x: "thermometer",
  pos_y: "microphone",
  neg_y: "distance",
  pos_z: "pir",
  neg_z: "light",
};

export const DEFAULT_ACTUATOR_FACES: Record<Face, Snapshot["actuator_cube"]["active_actuator"]> = {
  pos_x: "ring_graph",
  neg_x: "power_led",
  pos_y: "sound",
  neg_y: "peltier",
  pos_z: "vibration",
  neg_z: "fan",
};

const DEFAULT_MAPPING_TEXTS: Record<string, string> = {
  "sensor:potentiometer": "0..1023 => lin(0..1023 -> 0..24)",
  "sensor:thermometer": "0..50 => lin(0..50 -> 0..24)",
  "sensor:microphone": "0..1023 => lin(0..1023 -> 0..24)",
  "sensor:distance": "0..0.5 => const(0); 0.5..72 => clamp(1, 72) |> lin(1..72 -> 1..24)",
  "sensor:pir": "0 => const(0); 1..1 => const(24)",
  "sensor:light": "0..65535 => sqrt |> clamp(0, 256) |> lin(0..256 -> 0..24)",
  "actuator:ring_graph": "0..24 => lin(0..24 -> 0..24)",
  "actuator:power_led": "0..24 => sq |> lin(0..576 -> 0..255)",
  "actuator:sound": "0 => const(0); 1..24 => lin(1..24 -> 51..74)",
  "actuator:peltier": "0..24 => lin(0..24 -> -255..255)",
  "actuator:vibration": "0 => const(0); 1..24 => lin(1..24 -> 64..255)",
  "actuator:fan": "0 => const(0); 1..24 => lin(1..24 -> 160..255)",
};

type DeepPartial<T> = { [K in keyof T]?: T[K] extends object ? DeepPartial<T[K]> : T[K] };

export function makeSnapshot(overrides: DeepPartial<Snapshot> = {}): Snapshot {
  const base: Snapshot = {
    proto: 1,
    t_ms: 0,
    sensor_cube: { active_face: "pos_z", active_sensor: "pir", faces: { ...DEFAULT_SENSOR_FACES } },
    actuator_cube: {
      active_face: "pos_z",
      active_actuator: "vibration",
      faces: { ...DEFAULT_ACTUATOR_FACES },
      peltier_mode: "bipolar",
      current_note: null,
    },
    sensors: {
      potentiometer: { raw: 0, normalized: 0 },
      thermometer: { raw: 20, normalized: 10 },
      microphone: { raw: 0, normalized: 0 },
      distance: { raw: null, normalized: 0 },
      pir: { raw: 0, normalized: 0 },
      light: { raw: 0, normalized: 0 },
    },
    value: 0,
    stale: false,
    command: { type: "vibration", pwm: 0 },
    link: { sent: 0, delivered: 0, dropped: 0, loss: 0, latency_ms: 0, jitter_ms: 0 },
    mappings: Object.fromEntries(
      Object.entries(DEFAULT_MAPPING_TEXTS).map(([k, text]) => [k, { text, custom: false }]),
    ),
    mapping_error: null,
  };
  return deepMerge(base, overrides);
}

function deepMerge<T>(base: T, patch: DeepPartial<T>): T {
  const out: Record<string, unknown> = { ...(base as Record<string, unknown>) };
  for (const [key, value] of Object.entries(patch as Record<string, unknown>)) {
    const current = out[key];
    if (
      value !== null &&
      typeof value === "object" &&
      !Array.isArray(value) &&
      current !== null &&
      typeof current === "object" &&
      !Array.isArray(current)
    ) {
      out[key] = deepMerge(current, value as DeepPartial<unknown>);
    } else {
      out[key] = value;
    }
  }
  return out as T;
}

/** A server-side hand puppet standing in for the real WebSocket. */
export class FakeSocket implements SocketLike {
  sent: Command[] = [];
  closedByClient = false;
  onopen: (() => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;

  send(data: string): void {
    this.sent.push(JSON.parse(data) as Command);
  }

  close(): void {
    this.closedByClient = true;
    this.onclose?.();
  }

  // --- play the server ---

  open(): void {
    this.onopen?.();
    this.push({ proto: 1 });
  }

  push(msg: unknown): void {
    this.onmessage?.({ data: JSON.stringify(msg) });
  }

  ackAll(): void {
    for (const cmd of this.sent.splice(0)) {
      this.push({ ack: cmd.cmd });
    }
  }

  drop(): void {
    this.onclose?.();
  }
}
