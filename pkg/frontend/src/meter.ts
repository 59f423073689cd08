// RF SIC meter: big number, bar, and a short rolling history line.
// Shows exactly what the server reported; nothing is recomputed here.

const HISTORY = 150;

export class SicMeter {
  readonly element: HTMLElement;
  private valueEl: HTMLElement;
  private barEl: HTMLElement;
  private spark: HTMLCanvasElement;
  private history: number[] = [];

  constructor(
    private label = "RF SIC",
    private fullScaleDb = 60,
  ) {
    this.element = document.createElement("div");
    this.element.className = "meter";

    const title = document.createElement("div");
    title.className = "meter-label";
    title.textContent = this.label;

    this.valueEl = document.createElement("div");
    this.valueEl.className = "meter-value";
    this.valueEl.textContent = "--";

    const track = document.createElement("div");
    track.className = "meter-track";
    this.barEl = document.createElement("div");
    this.barEl.className = "meter-bar";
    track.appendChild(this.barEl);

    this.spark = document.createElement("canvas");
    this.spark.className = "meter-spark";
    this.spark.width = 300;
    this.spark.height = 40;

    this.element.append(title, this.valueEl, track, this.spark);
  }

  get value(): number | null {
    return this.history.length ? this.history[this.history.length - 1] : null;
  }

  update(sicDb: number): void {
    this.history.push(sicDb);
    if (this.history.length > HISTORY) this.history.shift();
    this.valueEl.textContent = `${sicDb.toFixed(2)} dB`;
    const frac = Math.min(1, Math.max(0, sicDb / this.fullScaleDb));
    this.barEl.style.width = `${(frac * 100).toFixed(1)}%`;
    this.drawSpark();
  }

  private drawSpark(): void {
    const ctx = this.spark.getContext("2d");
    if (!ctx) return;
    const w = this.spark.width;
    const h = this.spark.height;
    ctx.clearRect(0, 0, w, h);
    ctx.strokeStyle = "#53a8d1";
    ctx.beginPath();
    this.history.forEach((v, i) => {
      const x = (i / (HISTORY - 1)) * w;
      const y = h - Math.min(1, Math.max(0, v / this.fullScaleDb)) * h;
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
}
