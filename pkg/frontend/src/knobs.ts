import { RequestPipeline } from "./pipeline";
import type { CancellerAck, CancellerCode, KnobName, KnobPatch } from "./types";

export const KNOB_RANGES: Record<KnobName, { min: number; max: number }> = {
  att: { min: 0, max: 127 },
  ps: { min: 0, max: 255 },
  cap1: { min: 0, max: 31 },
  cap2: { min: 0, max: 31 },
  cap3: { min: 0, max: 31 },
};

const LABELS: Record<KnobName, string> = {
  att: "ATT (0.25 dB steps)",
  ps: "PS (360/256 deg steps)",
  cap1: "CAP1",
  cap2: "CAP2",
  cap3: "CAP3",
};

function codeValue(code: CancellerCode, knob: KnobName): number {
  if (knob === "att") return code.att;
  if (knob === "ps") return code.ps;
  return code.caps[Number(knob.slice(3)) - 1];
}

function mergePatch(prev: KnobPatch, next: KnobPatch): KnobPatch {
  return { ...prev, ...next };
}

interface KnobRow {
  slider: HTMLInputElement;
  box: HTMLInputElement;
  error: HTMLElement;
}

// Slider + numeric entry per knob. Display is optimistic while a write
// is in flight and snaps back to the last server-acked code on a NACK;
// values the client can already tell are out of range never leave the
// browser.
export class KnobPanel {
  readonly element: HTMLElement;
  private rows = new Map<KnobName, KnobRow>();
  private acked: CancellerCode;
  private pipeline: RequestPipeline<KnobPatch>;
  private onAckCb: (ack: CancellerAck) => void = () => {};

  constructor(
    initial: CancellerCode,
    sendPatch: (patch: KnobPatch) => Promise<CancellerAck>,
    minIntervalMs = 50,
  ) {
    this.acked = structuredClone(initial);
    this.pipeline = new RequestPipeline<KnobPatch>(
      async (patch) => {
        try {
          const ack = await sendPatch(patch);
          this.acked = { att: ack.att, ps: ack.ps, caps: ack.caps };
          this.showCode(this.acked);
          this.clearErrors();
          this.onAckCb(ack);
        } catch (err) {
          this.showCode(this.acked); // revert optimistic display
          this.showError(patch, err instanceof Error ? err.message : String(err));
        }
      },
      minIntervalMs,
      mergePatch,
    );

    this.element = document.createElement("div");
    this.element.className = "knob-panel";
    for (const knob of Object.keys(KNOB_RANGES) as KnobName[]) {
      this.element.appendChild(this.buildRow(knob));
    }
    this.showCode(this.acked);
  }

  onAck(cb: (ack: CancellerAck) => void): void {
    this.onAckCb = cb;
  }

  /** Last server-acked code; what the panel settles on. */
  get code(): CancellerCode {
    return structuredClone(this.acked);
  }

  /** Adopt a code acked elsewhere (auto-tune) without sending anything. */
  setAcked(code: CancellerCode): void {
    this.acked = structuredClone(code);
    this.showCode(this.acked);
    this.clearErrors();
  }

  displayed(knob: KnobName): number {
    return Number(this.rows.get(knob)!.slider.value);
  }

  errorText(knob: KnobName): string {
    return this.rows.get(knob)!.error.textContent ?? "";
  }

  private buildRow(knob: KnobName): HTMLElement {
    const { min, max } = KNOB_RANGES[knob];
    const row = document.createElement("label");
    row.className = "knob-row";

    const name = document.createElement("span");
    name.className = "knob-name";
    name.textContent = LABELS[knob];

    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = String(min);
    slider.max = String(max);
    slider.step = "1";

    const box = document.createElement("input");
    box.type = "number";
    box.min = String(min);
    box.max = String(max);
    box.step = "1";

    const error = document.createElement("span");
    error.className = "knob-error";

    slider.addEventListener("input", () => this.userSet(knob, Number(slider.value)));
    box.addEventListener("change", () => {
      const value = Number(box.value);
      if (!Number.isInteger(value) || value < min || value > max) {
        // reject locally: restore display, no request
        this.rows.get(knob)!.error.textContent = `${knob.toUpperCase()} must be ${min}..${max}`;
        this.showCode(this.acked);
        return;
      }
      this.userSet(knob, value);
    });

    row.append(name, slider, box, error);
    this.rows.set(knob, { slider, box, error });
    return row;
  }

  private userSet(knob: KnobName, value: number): void {
    const row = this.rows.get(knob)!;
    row.slider.value = String(value);
    row.box.value = String(value);
    row.error.textContent = "";
    this.pipeline.push(this.patchFor(knob, value));
  }

  private patchFor(knob: KnobName, value: number): KnobPatch {
    if (knob === "att") return { att: value };
    if (knob === "ps") return { ps: value };
    const caps: [number, number, number] = [...this.acked.caps];
    for (const [i, cap] of (["cap1", "cap2", "cap3"] as const).entries()) {
      caps[i] = cap === knob ? value : this.displayed(cap);
    }
    return { caps };
  }

  private showCode(code: CancellerCode): void {
    for (const knob of Object.keys(KNOB_RANGES) as KnobName[]) {
      const row = this.rows.get(knob);
      if (!row) continue;
      const value = String(codeValue(code, knob));
      row.slider.value = value;
      row.box.value = value;
    }
  }

  private showError(patch: KnobPatch, message: string): void {
    const knobs: KnobName[] = [];
    if ("att" in patch) knobs.push("att");
    if ("ps" in patch) knobs.push("ps");
    if ("caps" in patch) knobs.push("cap1", "cap2", "cap3");
    for (const knob of knobs) {
      this.rows.get(knob)!.error.textContent = message;
    }
  }

  private clearErrors(): void {
    for (const row of this.rows.values()) row.error.textContent = "";
  }
}
