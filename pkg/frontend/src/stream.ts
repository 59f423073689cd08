import type { Frame } from "./types";

// WebSocket frame consumer. Guarantees the sink only ever sees
// strictly increasing seq numbers (duplicates and stragglers are
// dropped) and reconnects with exponential backoff after a drop.

export class SeqGate {
  private last = -1;

  accept(seq: number): boolean {
    if (!Number.isFinite(seq) || seq <= this.last) return false;
    this.last = seq;
    return true;
  }

  get current(): number {
    return this.last;
  }
}

export class Backoff {
  private failures = 0;

  constructor(
    private baseMs = 500,
    private capMs = 8000,
  ) {}

  next(): number {
    const delay = Math.min(this.capMs, this.baseMs * 2 ** this.failures);
    this.failures += 1;
    return delay;
  }

  reset(): void {
    this.failures = 0;
  }
}

export type StreamStatus = "connecting" | "live" | "stale";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
}

export interface StreamOptions {
  makeSocket?: (url: string) => SocketLike;
  schedule?: (fn: () => void, ms: number) => void;
  backoff?: Backoff;
  onStatus?: (status: StreamStatus) => void;
}

export class FrameStream {
  private gate = new SeqGate();
  private backoff: Backoff;
  private socket: SocketLike | null = null;
  private stopped = false;
  private makeSocket: (url: string) => SocketLike;
  private schedule: (fn: () => void, ms: number) => void;
  private onStatus: (status: StreamStatus) => void;

  constructor(
    private url: string,
    private onFrame: (frame: Frame) => void,
    opts: StreamOptions = {},
  ) {
    this.makeSocket = opts.makeSocket ?? ((u) => new WebSocket(u) as unknown as SocketLike);
    this.schedule = opts.schedule ?? ((fn, ms) => void setTimeout(fn, ms));
    this.backoff = opts.backoff ?? new Backoff();
    this.onStatus = opts.onStatus ?? (() => {});
  }

  get lastSeq(): number {
    return this.gate.current;
  }

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.socket?.close();
    this.socket = null;
  }

  private connect(): void {
    if (this.stopped) return;
    this.onStatus("connecting");
    const ws = this.makeSocket(this.url);
    this.socket = ws;
    ws.onopen = () => {
      this.backoff.reset();
      this.onStatus("live");
    };
    ws.onmessage = (ev) => {
      let frame: Frame;
      try {
        frame = JSON.parse(ev.data) as Frame;
      } catch {
        return; // not a frame; ignore
      }
      if (this.gate.accept(frame.seq)) this.onFrame(frame);
    };
    ws.onerror = () => ws.close();
    ws.onclose = () => {
      if (this.stopped || this.socket !== ws) return;
      this.socket = null;
      this.onStatus("stale");
      this.schedule(() => this.connect(), this.backoff.next());
    };
  }
}
