/** DOM construction and updating. The skeleton is built once; update(state)
 * mutates text, classes and styles from the latest snapshot only.
 */

import {
  ActuatorKind,
  FACES,
  Face,
  MAPPING_TARGETS,
  PWM_FLOORS,
  SENSOR_KINDS,
  SensorKind,
  Snapshot,
  StimulusCmd,
  luxFromSlider,
  noteName,
  sliderFromLux,
} from "./protocol.js";
import { UiState } from "./store.js";

export interface Actions {
  rotate(cube: "sensor" | "actuator", top: string): void;
  stimulus(fields: Omit<StimulusCmd, "cmd">): void;
  applyMapping(target: string, program: string): void;
  selectTarget(target: string): void;
  editBuffer(text: string): void;
  loadDefaults(): void;
}

export interface View {
  update(state: UiState): void;
}

const LABELS: Record<string, string> = {
  potentiometer: "knob",
  thermometer: "heat",
  microphone: "sound in",
  distance: "distance",
  pir: "motion",
  light: "light in",
  ring_graph: "ring",
  power_led: "lamp",
  sound: "sound out",
  peltier: "hot/cold",
  vibration: "buzz",
  fan: "fan",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function slider(min: number, max: number, step: number, value: number): HTMLInputElement {
  const input = el("input");
  input.type = "range";
  input.min = String(min);
  input.max = String(max);
  input.step = String(step);
  input.value = String(value);
  return input;
}

function rgb([r, g, b]: [number, number, number]): string {
  return `rgb(${r}, ${g}, ${b})`;
}

// --- cube nets -------------------------------------------------------------------

interface CubeRefs {
  root: HTMLElement;
  faces: Map<Face, HTMLButtonElement>;
}

function buildCube(cube: "sensor" | "actuator", actions: Actions): CubeRefs {
  const root = el("section", `cube cube-${cube}`);
  root.appendChild(el("h2", "", cube === "sensor" ? "sensor cube" : "actuator cube"));
  const net = el("div", "net");
  const faces = new Map<Face, HTMLButtonElement>();
  for (const face of FACES) {
    const button = el("button", `face face-${face}`);
    button.dataset.face = face;
    button.addEventListener("click", () => actions.rotate(cube, face));
    faces.set(face, button);
    net.appendChild(button);
  }
  root.appendChild(net);
  return { root, faces };
}

function updateCube(
  refs: CubeRefs,
  kinds: Record<Face, string>,
  activeFace: Face,
  connected: boolean,
): void {
  refs.root.classList.toggle("disconnected", !connected);
  for (const [face, button] of refs.faces) {
    const kind = kinds[face];
    button.textContent = LABELS[kind] ?? kind;
    button.dataset.kind = kind;
    button.classList.toggle("active", face === activeFace);
    button.disabled = !connected;
  }
}

// --- stimulus controls -------------------------------------------------------------

interface StimulusRefs {
  root: HTMLElement;
  readouts: Map<SensorKind, HTMLElement>;
  raws: Map<SensorKind, HTMLElement>;
  lux: HTMLInputElement;
  noEcho: HTMLInputElement;
  distance: HTMLInputElement;
}

function buildStimuli(actions: Actions): StimulusRefs {
  const root = el("section", "stimuli");
  root.appendChild(el("h2", "", "stimuli"));
  const readouts = new Map<SensorKind, HTMLElement>();
  const raws = new Map<SensorKind, HTMLElement>();

  const row = (sensor: SensorKind, control: HTMLElement): HTMLElement => {
    const line = el("div", `stimulus stimulus-${sensor}`);
    line.appendChild(el("label", "", LABELS[sensor]));
    line.appendChild(control);
    const raw = el("span", "raw");
    raws.set(sensor, raw);
    line.appendChild(raw);
    const out = el("span", "readout");
    out.dataset.sensor = sensor;
    readouts.set(sensor, out);
    line.appendChild(out);
    root.appendChild(line);
    return line;
  };

  const pot = slider(0, 270, 1, 0);
  pot.addEventListener("input", () =>
    actions.stimulus({ sensor: "potentiometer", value: Number(pot.value) }),
  );
  row("potentiometer", pot);

  const thermo = slider(0, 50, 0.1, 0);
  thermo.addEventListener("input", () =>
    actions.stimulus({ sensor: "thermometer", value: Number(thermo.value) }),
  );
  row("thermometer", thermo);

  const micWrap = el("div", "mic");
  const micKind = el("select") as HTMLSelectElement;
  for (const name of ["silence", "sine"]) {
    const opt = el("option", "", name) as HTMLOptionElement;
    opt.value = name;
    micKind.appendChild(opt);
  }
  const micAmp = slider(0, 1023, 1, 300);
  const sendMic = (): void => {
    if (micKind.value === "sine") {
      actions.stimulus({
        sensor: "microphone",
        waveform: { type: "sine", freq_hz: 100, amplitude: Number(micAmp.value), dc: 512 },
      });
    } else {
      actions.stimulus({ sensor: "microphone", waveform: { type: "constant", level: 512 } });
    }
  };
  micKind.addEventListener("input", sendMic);
  micAmp.addEventListener("input", sendMic);
  micWrap.appendChild(micKind);
  micWrap.appendChild(micAmp);
  row("microphone", micWrap);

  const distWrap = el("div", "distance");
  const dist = slider(1, 72, 0.5, 36);
  const noEcho = el("input") as HTMLInputElement;
  noEcho.type = "checkbox";
  noEcho.checked = true;
  const noEchoLabel = el("label", "no-echo", "no echo");
  noEchoLabel.prepend(noEcho);
  const sendDistance = (): void => {
    dist.disabled = noEcho.checked;
    actions.stimulus({
      sensor: "distance",
      value: noEcho.checked ? "no_echo" : Number(dist.value),
    });
  };
  dist.addEventListener("input", sendDistance);
  noEcho.addEventListener("input", sendDistance);
  dist.disabled = true;
  distWrap.appendChild(dist);
  distWrap.appendChild(noEchoLabel);
  row("distance", distWrap);

  const pir = el("input") as HTMLInputElement;
  pir.type = "checkbox";
  pir.addEventListener("input", () =>
    actions.stimulus({ sensor: "pir", value: pir.checked ? 1 : 0 }),
  );
  const pirWrap = el("label", "pir", "motion");
  pirWrap.prepend(pir);
  row("pir", pirWrap);

  const lux = slider(0, 1000, 1, 0);
  lux.addEventListener("input", () =>
    actions.stimulus({ sensor: "light", value: luxFromSlider(Number(lux.value)) }),
  );
  row("light", lux);

  return { root, readouts, raws, lux, noEcho, distance: dist };
}

function formatRaw(sensor: SensorKind, raw: number | null): string {
  if (raw === null) return "no echo";
  switch (sensor) {
    case "potentiometer":
      return `${raw} AD`;
    case "thermometer":
      return `${raw.toFixed(1)} degC`;
    case "microphone":
      return `${raw} amp`;
    case "distance":
      return `${raw.toFixed(1)} cm`;
    case "pir":
      return raw ? "motion" : "still";
    case "light":
      return `${Math.round(raw)} lx`;
  }
}

function updateStimuli(refs: StimulusRefs, snap: Snapshot): void {
  for (const sensor of SENSOR_KINDS) {
    const reading = snap.sensors[sensor];
    refs.readouts.get(sensor)!.textContent = String(reading.normalized);
    refs.raws.get(sensor)!.textContent = formatRaw(sensor, reading.raw);
  }
}

// --- actuator widgets ---------------------------------------------------------------

interface ActuatorRefs {
  root: HTMLElement;
  panels: Map<ActuatorKind, HTMLElement>;
  pixels: HTMLElement[];
  ledSwatch: HTMLElement;
  ledValue: HTMLElement;
  noteValue: HTMLElement;
  peltierBar: HTMLElement;
  peltierValue: HTMLElement;
  bars: Map<"vibration" | "fan", { fill: HTMLElement; value: HTMLElement }>;
  staleBadge: HTMLElement;
  linkLine: HTMLElement;
}

function buildActuators(): ActuatorRefs {
  const root = el("section", "actuators");
  const head = el("h2", "", "actuators");
  const staleBadge = el("span", "stale-badge", "stale: neutral output");
  head.appendChild(staleBadge);
  root.appendChild(head);
  const panels = new Map<ActuatorKind, HTMLElement>();

  const panel = (kind: ActuatorKind): HTMLElement => {
    const box = el("div", `actuator actuator-${kind}`);
    box.appendChild(el("h3", "", LABELS[kind]));
    panels.set(kind, box);
    root.appendChild(box);
    return box;
  };

  const ringBox = panel("ring_graph");
  const ring = el("div", "ring");
  const pixels: HTMLElement[] = [];
  for (let i = 0; i < 24; i += 1) {
    const pixel = el("span", "pixel");
    pixel.style.transform = `rotate(${i * 15}deg) translate(52px)`;
    pixels.push(pixel);
    ring.appendChild(pixel);
  }
  ringBox.appendChild(ring);

  const ledBox = panel("power_led");
  const ledSwatch = el("div", "led-swatch");
  const ledValue = el("span", "value", "0");
  ledBox.appendChild(ledSwatch);
  ledBox.appendChild(ledValue);

  const soundBox = panel("sound");
  const noteValue = el("div", "note", "silent");
  soundBox.appendChild(noteValue);

  const peltierBox = panel("peltier");
  const gauge = el("div", "gauge");
  const peltierBar = el("div", "gauge-fill");
  gauge.appendChild(el("div", "gauge-zero"));
  gauge.appendChild(peltierBar);
  const peltierValue = el("span", "value", "0");
  peltierBox.appendChild(gauge);
  peltierBox.appendChild(peltierValue);

  const bars = new Map<"vibration" | "fan", { fill: HTMLElement; value: HTMLElement }>();
  for (const kind of ["vibration", "fan"] as const) {
    const box = panel(kind);
    const bar = el("div", "bar");
    const fill = el("div", "bar-fill");
    const floor = el("div", "bar-floor");
    floor.style.left = `${(PWM_FLOORS[kind] / 255) * 100}%`;
    floor.title = `built-in floor ${PWM_FLOORS[kind]}`;
    bar.appendChild(fill);
    bar.appendChild(floor);
    const value = el("span", "value", "0");
    box.appendChild(bar);
    box.appendChild(value);
    bars.set(kind, { fill, value });
  }

  const linkLine = el("p", "link-line", "link: idle");
  root.appendChild(linkLine);

  return {
    root,
    panels,
    pixels,
    ledSwatch,
    ledValue,
    noteValue,
    peltierBar,
    peltierValue,
    bars,
    staleBadge,
    linkLine,
  };
}

function updateActuators(refs: ActuatorRefs, snap: Snapshot): void {
  for (const [kind, box] of refs.panels) {
    box.classList.toggle("active", kind === snap.actuator_cube.active_actuator);
  }
  refs.staleBadge.classList.toggle("visible", snap.stale);

  const cmd = snap.command;

  const lit = cmd?.type === "ring_graph" ? cmd.lit_count : 0;
  const color = cmd?.type === "ring_graph" ? rgb(cmd.color) : "";
  const glow = cmd?.type === "ring_graph" ? 0.3 + (0.7 * cmd.per_pixel_brightness) / 255 : 0;
  refs.pixels.forEach((pixel, i) => {
    const on = i < lit;
    pixel.classList.toggle("lit", on);
    pixel.style.backgroundColor = on ? color : "";
    pixel.style.opacity = on ? String(glow) : "";
  });

  const brightness = cmd?.type === "power_led" ? cmd.brightness : 0;
  refs.ledValue.textContent = String(brightness);
  refs.ledSwatch.style.opacity = String(brightness / 255);

  const note = snap.actuator_cube.current_note;
  refs.noteValue.textContent = note === null ? "silent" : `${noteName(note)} (${note})`;

  const pwm = cmd?.type === "peltier" ? cmd.pwm : 0;
  refs.peltierValue.textContent = String(pwm);
  refs.peltierBar.classList.toggle("cool", pwm < 0);
  refs.peltierBar.classList.toggle("heat", pwm > 0);
  const half = Math.abs(pwm) / 255 / 2;
  refs.peltierBar.style.width = `${half * 100}%`;
  refs.peltierBar.style.left = pwm < 0 ? `${(0.5 - half) * 100}%` : "50%";

  for (const kind of ["vibration", "fan"] as const) {
    const bar = refs.bars.get(kind)!;
    const level = cmd?.type === kind ? cmd.pwm : 0;
    bar.fill.style.width = `${(level / 255) * 100}%`;
    bar.value.textContent = String(level);
  }

  const { link } = snap;
  refs.linkLine.textContent =
    `link: ${link.delivered}/${link.sent} delivered, ${link.dropped} dropped | ` +
    `loss ${link.loss}, ${link.latency_ms} ms +/- ${link.jitter_ms} ms`;
}

// --- mapping editor ----------------------------------------------------------------

interface EditorRefs {
  root: HTMLElement;
  target: HTMLSelectElement;
  text: HTMLTextAreaElement;
  error: HTMLElement;
  customBadge: HTMLElement;
}

function buildEditor(actions: Actions): EditorRefs {
  const root = el("section", "mapping-editor");
  const head = el("h2", "", "mapping");
  const customBadge = el("span", "custom-badge", "custom");
  head.appendChild(customBadge);
  root.appendChild(head);

  const target = el("select") as HTMLSelectElement;
  for (const t of MAPPING_TARGETS) {
    const opt = el("option", "", t) as HTMLOptionElement;
    opt.value = t;
    target.appendChild(opt);
  }
  target.addEventListener("input", () => actions.selectTarget(target.value));
  root.appendChild(target);

  const text = el("textarea") as HTMLTextAreaElement;
  text.rows = 3;
  text.spellcheck = false;
  text.addEventListener("input", () => actions.editBuffer(text.value));
  root.appendChild(text);

  const buttons = el("div", "editor-buttons");
  const apply = el("button", "apply", "apply");
  apply.addEventListener("click", () => actions.applyMapping(target.value, text.value));
  const defaults = el("button", "defaults", "defaults");
  defaults.addEventListener("click", () => actions.loadDefaults());
  buttons.appendChild(apply);
  buttons.appendChild(defaults);
  root.appendChild(buttons);

  const error = el("p", "mapping-error");
  root.appendChild(error);

  return { root, target, text, error, customBadge };
}

function updateEditor(refs: EditorRefs, state: UiState): void {
  if (refs.target.value !== state.editor.target) refs.target.value = state.editor.target;
  if (refs.text.value !== state.editor.buffer) refs.text.value = state.editor.buffer;
  refs.error.textContent = state.editor.error ?? "";
  refs.error.classList.toggle("visible", state.editor.error !== null);
  const info = state.snapshot?.mappings[state.editor.target];
  refs.customBadge.classList.toggle("visible", info?.custom ?? false);
}

// --- the whole app -----------------------------------------------------------------

export function buildApp(root: HTMLElement, actions: Actions): View {
  const banner = el("div", "banner", "connecting to the twin...");
  root.appendChild(banner);

  const cubes = el("div", "cubes");
  const sensorCube = buildCube("sensor", actions);
  const actuatorCube = buildCube("actuator", actions);
  cubes.appendChild(sensorCube.root);
  cubes.appendChild(actuatorCube.root);
  root.appendChild(cubes);

  const stimuli = buildStimuli(actions);
  root.appendChild(stimuli.root);

  const actuators = buildActuators();
  root.appendChild(actuators.root);

  const editor = buildEditor(actions);
  root.appendChild(editor.root);

  return {
    update(state: UiState): void {
      const connected = state.status === "connected";
      banner.textContent =
        state.status === "disconnected"
          ? "connection lost, reconnecting..."
          : state.protocolError
            ? `protocol error: ${state.protocolError}`
            : "connecting to the twin...";
      banner.classList.toggle(
        "visible",
        !connected || state.protocolError !== null,
      );
      const snap = state.snapshot;
      if (snap !== null) {
        updateCube(sensorCube, snap.sensor_cube.faces, snap.sensor_cube.active_face, connected);
        updateCube(
          actuatorCube,
          snap.actuator_cube.faces,
          snap.actuator_cube.active_face,
          connected,
        );
        updateStimuli(stimuli, snap);
        updateActuators(actuators, snap);
        const lux = snap.sensors.light.raw;
        if (lux !== null && document.activeElement !== stimuli.lux) {
          stimuli.lux.value = String(sliderFromLux(lux));
        }
      }
      updateEditor(editor, state);
    },
  };
}
