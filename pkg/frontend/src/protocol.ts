/** Wire protocol types for the twin's steering service (proto 1).
 *
 * Everything here mirrors the JSON the server sends and accepts; the UI never
 * recomputes any of these values client-side.
 */

export type Face = "pos_x" | "neg_x" | "pos_y" | "neg_y" | "pos_z" | "neg_z";

export type SensorKind =
  | "potentiometer"
  | "thermometer"
  | "microphone"
  | "distance"
  | "pir"
  | "light";

export type ActuatorKind =
  | "ring_graph"
  | "power_led"
  | "sound"
  | "peltier"
  | "vibration"
  | "fan";

export const FACES: readonly Face[] = ["pos_x", "neg_x", "pos_y", "neg_y", "pos_z", "neg_z"];

export const SENSOR_KINDS: readonly SensorKind[] = [
  "potentiometer",
  "thermometer",
  "microphone",
  "distance",
  "pir",
  "light",
];

export const ACTUATOR_KINDS: readonly ActuatorKind[] = [
  "ring_graph",
  "power_led",
  "sound",
  "peltier",
  "vibration",
  "fan",
];

/** PWM values below these are only reachable through custom mappings. */
export const PWM_FLOORS = { vibration: 64, fan: 160 } as const;

// --- snapshots ----------------------------------------------------------------

export interface SensorReading {
  raw: number | null; // physical units; null while the distance echo is lost
  normalized: number; // 0..24
}

export interface MappingInfo {
  text: string;
  custom: boolean;
}

export interface SensorCubeView {
  active_face: Face;
  active_sensor: SensorKind;
  faces: Record<Face, SensorKind>;
}

export interface ActuatorCubeView {
  active_face: Face;
  active_actuator: ActuatorKind;
  faces: Record<Face, ActuatorKind>;
  peltier_mode: "bipolar" | "heat_only";
  current_note: number | null;
}

export interface LinkView {
  sent: number;
  delivered: number;
  dropped: number;
  loss: number;
  latency_ms: number;
  jitter_ms: number;
}

export interface RingGraphJson {
  type: "ring_graph";
  lit_count: number;
  color: [number, number, number];
  per_pixel_brightness: number;
}

export interface PowerLedJson {
  type: "power_led";
  brightness: number;
}

export interface MidiEventJson {
  type: "note_on" | "note_off";
  note: number;
  velocity?: number;
}

export interface SoundJson {
  type: "sound";
  events: MidiEventJson[];
}

export interface PeltierJson {
  type: "peltier";
  pwm: number;
}

export interface VibrationJson {
  type: "vibration";
  pwm: number;
}

export interface FanJson {
  type: "fan";
  pwm: number;
}

export type CommandJson =
  | RingGraphJson
  | PowerLedJson
  | SoundJson
  | PeltierJson
  | VibrationJson
  | FanJson;

export interface Snapshot {
  proto: 1;
  t_ms: number;
  sensor_cube: SensorCubeView;
  actuator_cube: ActuatorCubeView;
  sensors: Record<SensorKind, SensorReading>;
  value: number | null;
  stale: boolean;
  command: CommandJson | null;
  link: LinkView;
  mappings: Record<string, MappingInfo>;
  mapping_error: string | null;
}

// --- client -> server commands --------------------------------------------------

export interface RotateCmd {
  cmd: "rotate";
  cube: "sensor" | "actuator";
  top: Face | SensorKind | ActuatorKind;
}

export interface WaveformSpec {
  type: "constant" | "sine";
  level?: number;
  freq_hz?: number;
  amplitude?: number;
  dc?: number;
}

export interface StimulusCmd {
  cmd: "stimulus";
  sensor: SensorKind;
  value?: number | "no_echo" | null;
  waveform?: WaveformSpec;
}

export interface SetLinkCmd {
  cmd: "set_link";
  loss?: number;
  latency_ms?: number;
  jitter_ms?: number;
}

export interface SetMappingCmd {
  cmd: "set_mapping";
  target: string; // "sensor:<kind>" or "actuator:<kind>"
  program: string;
}

export interface SetPeltierModeCmd {
  cmd: "set_peltier_mode";
  mode: "bipolar" | "heat_only";
}

export type Command = RotateCmd | StimulusCmd | SetLinkCmd | SetMappingCmd | SetPeltierModeCmd;

// --- server -> client messages ---------------------------------------------------

export interface Hello {
  proto: 1;
}

export interface CommandAck {
  ack: string;
}

export interface CommandError {
  error: "parse" | "schema" | "command";
  detail: string;
}

export type ServerMessage = Hello | Snapshot | CommandAck | CommandError;

export function isSnapshot(msg: ServerMessage): msg is Snapshot {
  return "t_ms" in msg;
}

export function isAck(msg: ServerMessage): msg is CommandAck {
  return "ack" in msg;
}

export function isError(msg: ServerMessage): msg is CommandError {
  return "error" in msg;
}

export function isHello(msg: ServerMessage): msg is Hello {
  return "proto" in msg && !("t_ms" in msg);
}

// --- small pure helpers the views share ------------------------------------------

const NOTE_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];

/** MIDI note number to concert name, e.g. 74 -> "D5" (69 = A4). */
export function noteName(note: number): string {
  const octave = Math.floor(note / 12) - 1;
  return `${NOTE_NAMES[note % 12]}${octave}`;
}

export const LUX_MAX = 65535;
const LUX_SLIDER_STEPS = 1000;
const LUX_LN = Math.log(LUX_MAX + 1);

/** Log-scale slider position (0..1000) to illuminance 0..65535 lx. */
export function luxFromSlider(pos: number): number {
  const clamped = Math.min(Math.max(pos, 0), LUX_SLIDER_STEPS);
  return Math.round(Math.exp((clamped / LUX_SLIDER_STEPS) * LUX_LN)) - 1;
}

/** Inverse of luxFromSlider, for seeding the control from a snapshot. */
export function sliderFromLux(lux: number): number {
  const clamped = Math.min(Math.max(lux, 0), LUX_MAX);
  return Math.round((Math.log(clamped + 1) / LUX_LN) * LUX_SLIDER_STEPS);
}

/** All twelve mapping targets in display order. */
export const MAPPING_TARGETS: readonly string[] = [
  ...SENSOR_KINDS.map((k) => `sensor:${k}`),
  ...ACTUATOR_KINDS.map((k) => `actuator:${k}`),
];
