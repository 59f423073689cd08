// Serialized, coalescing, rate-limited request pipeline.
//
// Knob drags fire far faster than the service should be hit, so writes
// are queued through here: at most one request in flight, at most one
// send per minIntervalMs, and while waiting the newest value wins (a
// drag across 40 codes lands as a handful of PATCHes, not 40).

export interface Clock {
  now(): number;
  schedule(fn: () => void, ms: number): void;
}

const wallClock: Clock = {
  now: () => Date.now(),
  schedule: (fn, ms) => void setTimeout(fn, ms),
};

export class RequestPipeline<T> {
  private pending: T | undefined;
  private inFlight = false;
  private timerArmed = false;
  private lastSendAt = -Infinity;

  constructor(
    private send: (value: T) => Promise<void>,
    private minIntervalMs = 50,
    private merge: (prev: T, next: T) => T = (_prev, next) => next,
    private clock: Clock = wallClock,
  ) {}

  /** Queue a value; coalesces with anything not yet sent. */
  push(value: T): void {
    this.pending = this.pending === undefined ? value : this.merge(this.pending, value);
    this.pump();
  }

  get idle(): boolean {
    return !this.inFlight && this.pending === undefined;
  }

  private pump(): void {
    if (this.inFlight || this.pending === undefined) return;
    const wait = this.lastSendAt + this.minIntervalMs - this.clock.now();
    if (wait > 0) {
      if (!this.timerArmed) {
        this.timerArmed = true;
        this.clock.schedule(() => {
          this.timerArmed = false;
          this.pump();
        }, wait);
      }
      return;
    }
    const value = this.pending;
    this.pending = undefined;
    this.inFlight = true;
    this.lastSendAt = this.clock.now();
    // errors are the sender's problem (it acks/reverts); keep pumping
    void this.send(value)
      .catch(() => {})
      .finally(() => {
        this.inFlight = false;
        this.pump();
      });
  }
}
