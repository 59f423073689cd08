import type { Frame } from "./types";

// Canvas PSD line chart: dBm against MHz offset from the carrier.

export interface ChartScale {
  fMinHz: number;
  fMaxHz: number;
  dbmMin: number;
  dbmMax: number;
}

export function xPx(freqHz: number, scale: ChartScale, widthPx: number): number {
  return ((freqHz - scale.fMinHz) / (scale.fMaxHz - scale.fMinHz)) * widthPx;
}

export function yPx(dbm: number, scale: ChartScale, heightPx: number): number {
  const clamped = Math.min(scale.dbmMax, Math.max(scale.dbmMin, dbm));
  return heightPx - ((clamped - scale.dbmMin) / (scale.dbmMax - scale.dbmMin)) * heightPx;
}

export interface Marker {
  freqHz: number;
  label: string;
  color: string;
}

export class SpectrumChart {
  private ctx: CanvasRenderingContext2D;
  private scale: ChartScale = { fMinHz: -2.5e6, fMaxHz: 2.5e6, dbmMin: -140, dbmMax: 10 };

  constructor(
    private canvas: HTMLCanvasElement,
    private markers: Marker[] = [],
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  setSpanHz(sampleRateHz: number): void {
    this.scale.fMinHz = -sampleRateHz / 2;
    this.scale.fMaxHz = sampleRateHz / 2;
  }

  render(frame: Frame): void {
    const { ctx, canvas, scale } = this;
    const w = canvas.width;
    const h = canvas.height;

    ctx.fillStyle = "#10141a";
    ctx.fillRect(0, 0, w, h);

    ctx.strokeStyle = "#242c38";
    ctx.fillStyle = "#5a6878";
    ctx.font = "11px monospace";
    ctx.lineWidth = 1;
    for (let dbm = scale.dbmMin + 20; dbm < scale.dbmMax; dbm += 20) {
      const y = yPx(dbm, scale, h);
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(w, y);
      ctx.stroke();
      ctx.fillText(`${dbm}`, 4, y - 2);
    }
    const stepHz = 1e6;
    for (let f = Math.ceil(scale.fMinHz / stepHz) * stepHz; f <= scale.fMaxHz; f += stepHz) {
      const x = xPx(f, scale, w);
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, h);
      ctx.stroke();
      ctx.fillText(`${f / 1e6}M`, x + 2, h - 4);
    }

    for (const m of this.markers) {
      const x = xPx(m.freqHz, scale, w);
      ctx.strokeStyle = m.color;
      ctx.setLineDash([4, 4]);
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, h);
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.fillStyle = m.color;
      ctx.fillText(m.label, x + 3, 12);
    }

    ctx.strokeStyle = "#53d18a";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    for (let i = 0; i < frame.freqs_hz.length; i++) {
      const x = xPx(frame.freqs_hz[i], scale, w);
      const y = yPx(frame.psd_dbm[i], scale, h);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    }
    ctx.stroke();
  }
}
