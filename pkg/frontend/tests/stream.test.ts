import { describe, expect, it } from "vitest";

import { Backoff, FrameStream, SeqGate, type SocketLike, type StreamStatus } from "../src/stream";
import type { Frame } from "../src/types";

class FakeSocket implements SocketLike {
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;
  closed = false;

  close(): void {
    if (this.closed) return;
    this.closed = true;
    this.onclose?.();
  }

  emit(frame: Partial<Frame>): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }
}

function harness() {
  const sockets: FakeSocket[] = [];
  const delays: number[] = [];
  const timers: (() => void)[] = [];
  const frames: Frame[] = [];
  const statuses: StreamStatus[] = [];
  const stream = new FrameStream("ws://test/stream", (f) => frames.push(f), {
    makeSocket: () => {
      const s = new FakeSocket();
      sockets.push(s);
      return s;
    },
    schedule: (fn, ms) => {
      delays.push(ms);
      timers.push(fn);
    },
    onStatus: (s) => statuses.push(s),
  });
  return { stream, sockets, delays, timers, frames, statuses };
}

describe("SeqGate", () => {
  it("only lets sequence numbers through once and in order", () => {
    const gate = new SeqGate();
    expect(gate.accept(0)).toBe(true);
    expect(gate.accept(1)).toBe(true);
    expect(gate.accept(1)).toBe(false);
    expect(gate.accept(0)).toBe(false);
    expect(gate.accept(5)).toBe(true); // gaps are fine, going back is not
    expect(gate.accept(4)).toBe(false);
    expect(gate.current).toBe(5);
  });

  it("rejects junk", () => {
    const gate = new SeqGate();
    expect(gate.accept(Number.NaN)).toBe(false);
    expect(gate.accept(Number.POSITIVE_INFINITY)).toBe(false);
  });
});

describe("Backoff", () => {
  it("doubles to a cap and resets", () => {
    const b = new Backoff(500, 8000);
    expect([b.next(), b.next(), b.next(), b.next(), b.next()]).toEqual([
      500, 1000, 2000, 4000, 8000,
    ]);
    expect(b.next()).toBe(8000);
    b.reset();
    expect(b.next()).toBe(500);
  });
});

describe("FrameStream", () => {
  it("drops stale and duplicate frames", () => {
    const h = harness();
    h.stream.start();
    const ws = h.sockets[0];
    ws.onopen?.();
    ws.emit({ seq: 0, rf_sic_db: 44 });
    ws.emit({ seq: 2, rf_sic_db: 44 });
    ws.emit({ seq: 1, rf_sic_db: 44 }); // straggler
    ws.emit({ seq: 2, rf_sic_db: 44 }); // duplicate
    ws.emit({ seq: 3, rf_sic_db: 44 });
    expect(h.frames.map((f) => f.seq)).toEqual([0, 2, 3]);
    expect(h.stream.lastSeq).toBe(3);
  });

  it("ignores unparseable messages", () => {
    const h = harness();
    h.stream.start();
    h.sockets[0].onmessage?.({ data: "not json" });
    expect(h.frames).toEqual([]);
  });

  it("reconnects with growing delays and resets on success", () => {
    const h = harness();
    h.stream.start();
    expect(h.statuses).toEqual(["connecting"]);

    h.sockets[0].close();
    expect(h.statuses.at(-1)).toBe("stale");
    expect(h.delays).toEqual([500]);

    h.timers.shift()!(); // reconnect #1 fails too
    h.sockets[1].close();
    expect(h.delays).toEqual([500, 1000]);

    h.timers.shift()!(); // reconnect #2 succeeds
    const ws = h.sockets[2];
    ws.onopen?.();
    expect(h.statuses.at(-1)).toBe("live");

    ws.close(); // later drop starts from the base delay again
    expect(h.delays).toEqual([500, 1000, 500]);
  });

  it("stays down after stop", () => {
    const h = harness();
    h.stream.start();
    h.sockets[0].onopen?.();
    h.stream.stop();
    expect(h.sockets[0].closed).toBe(true);
    expect(h.delays).toEqual([]); // no reconnect scheduled
  });

  it("an error tears the socket down and triggers the retry path", () => {
    const h = harness();
    h.stream.start();
    h.sockets[0].onerror?.();
    expect(h.sockets[0].closed).toBe(true);
    expect(h.delays).toEqual([500]);
  });
});
