import { Api, ApiError } from "./api";
import { SpectrumChart } from "./chart";
import { KnobPanel } from "./knobs";
import { SicMeter } from "./meter";
import { FrameStream } from "./stream";
import type { BudgetReport, SessionState } from "./types";

const STALE_AFTER_MS = 2000;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  if (text) node.textContent = text;
  return node;
}

function budgetLines(r: BudgetReport): string {
  const code = r.canceller_code;
  return [
    `TX Signal: ${r.tx_power_dbm.toFixed(2)} dBm`,
    `RX Signal after RF SIC: ${r.post_rf_dbm.toFixed(2)} dBm`,
    `Amount of RF SIC: ${r.rf_sic_db.toFixed(2)} dB`,
    `RX Signal after Digital SIC: ${r.post_digital_dbm.toFixed(2)} dBm`,
    `Amount of Digital SIC: ${r.digital_sic_db.toFixed(2)} dB`,
    `Total SIC: ${r.total_sic_db.toFixed(2)} dB`,
    `Code: ATT=${code.att} PS=${code.ps} CAPS=${code.caps.join(",")}`,
    `Noise floor: ${r.noise_floor_dbm.toFixed(2)} dBm`,
  ].join("\n");
}

export async function startApp(root: HTMLElement, api = new Api()): Promise<void> {
  root.textContent = "";
  const banner = el("div", "banner", "connecting...");
  root.appendChild(banner);

  let session: SessionState;
  try {
    session = await api.createSession({});
  } catch (err) {
    banner.textContent = `cannot reach service: ${err instanceof Error ? err.message : err}`;
    banner.classList.add("banner-stale");
    return;
  }

  const layout = el("div", "layout");
  const left = el("div", "col-chart");
  const right = el("div", "col-controls");
  layout.append(left, right);
  root.appendChild(layout);

  const info = el(
    "div",
    "session-info",
    `session ${session.id} | ${(session.sample_rate_hz / 1e6).toFixed(1)} MS/s @ ` +
      `${(session.carrier_hz / 1e6).toFixed(0)} MHz | TX ${session.tx_power_dbm.toFixed(1)} dBm | ` +
      `floor ${session.noise_floor_dbm.toFixed(1)} dBm`,
  );
  left.appendChild(info);

  const canvas = el("canvas", "psd-chart");
  canvas.width = 760;
  canvas.height = 360;
  left.appendChild(canvas);
  const chart = new SpectrumChart(canvas, [
    { freqHz: 200e3, label: "SI", color: "#d1a553" },
    { freqHz: 400e3, label: "remote", color: "#a07ad1" },
  ]);
  chart.setSpanHz(session.sample_rate_hz);

  const meter = new SicMeter("RF SIC (server)");
  right.appendChild(meter.element);

  const panel = new KnobPanel(session.code, (patch) =>
    api.patchCanceller(session.id, patch),
  );
  panel.onAck((ack) => meter.update(ack.rf_sic_db));
  right.appendChild(panel.element);

  const buttons = el("div", "buttons");
  const tuneBtn = el("button", "btn", "auto-tune");
  const sicBtn = el("button", "btn", "run digital SIC");
  buttons.append(tuneBtn, sicBtn);
  right.appendChild(buttons);

  const tuneNote = el("div", "tune-note");
  right.appendChild(tuneNote);

  const reportBox = el("pre", "report-box");
  right.appendChild(reportBox);

  tuneBtn.addEventListener("click", async () => {
    tuneBtn.disabled = true;
    tuneNote.textContent = "searching 128x256 grid...";
    try {
      const ack = await api.tune(session.id);
      panel.setAcked({ att: ack.att, ps: ack.ps, caps: ack.caps });
      meter.update(ack.rf_sic_db);
      tuneNote.textContent =
        `optimum ATT=${ack.att} PS=${ack.ps} after ${ack.evaluations} evaluations: ` +
        `${ack.rf_sic_db.toFixed(2)} dB`;
    } catch (err) {
      tuneNote.textContent = err instanceof ApiError ? err.message : String(err);
    } finally {
      tuneBtn.disabled = false;
    }
  });

  sicBtn.addEventListener("click", async () => {
    sicBtn.disabled = true;
    reportBox.textContent = "running digital stage...";
    try {
      reportBox.textContent = budgetLines(await api.digitalSic(session.id));
    } catch (err) {
      reportBox.textContent = err instanceof ApiError ? err.message : String(err);
    } finally {
      sicBtn.disabled = false;
    }
  });

  let lastFrameAt = 0;
  const stream = new FrameStream(
    api.streamUrl(session.id),
    (frame) => {
      lastFrameAt = Date.now();
      chart.render(frame);
      meter.update(frame.rf_sic_db);
    },
    {
      onStatus: (status) => {
        banner.textContent = status === "live" ? `live | session ${session.id}` : status;
        banner.classList.toggle("banner-stale", status !== "live");
      },
    },
  );
  stream.start();

  setInterval(() => {
    if (lastFrameAt && Date.now() - lastFrameAt > STALE_AFTER_MS) {
      banner.textContent = "stale: no frames";
      banner.classList.add("banner-stale");
    }
  }, 500);

  window.addEventListener("beforeunload", () => stream.stop());
}
