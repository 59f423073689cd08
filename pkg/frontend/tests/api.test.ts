import { describe, expect, it } from "vitest";

import { Api, ApiError } from "../src/api";

interface Recorded {
  url: string;
  method?: string;
  body?: string;
}

function fakeFetch(status: number, body: unknown) {
  const calls: Recorded[] = [];
  const fetchFn = async (url: string, init?: RequestInit) => {
    calls.push({ url, method: init?.method, body: init?.body as string });
    return new Response(status === 204 ? null : JSON.stringify(body), { status });
  };
  return { calls, fetchFn };
}

describe("Api", () => {
  it("creates sessions with the config document", async () => {
    const { calls, fetchFn } = fakeFetch(201, { id: "s1", code: { att: 9 } });
    const api = new Api("", fetchFn);
    const state = await api.createSession({ tx_power_dbm: 5 });
    expect(calls[0]).toEqual({
      url: "/sessions",
      method: "POST",
      body: '{"tx_power_dbm":5}',
    });
    expect(state.id).toBe("s1");
  });

  it("patches knobs with only the changed fields", async () => {
    const { calls, fetchFn } = fakeFetch(200, { att: 31, ps: 110, caps: [16, 6, 6], rf_sic_db: 30 });
    const api = new Api("", fetchFn);
    const ack = await api.patchCanceller("s1", { att: 31 });
    expect(calls[0].method).toBe("PATCH");
    expect(calls[0].url).toBe("/sessions/s1/canceller");
    expect(JSON.parse(calls[0].body!)).toEqual({ att: 31 });
    expect(ack.rf_sic_db).toBe(30);
  });

  it("surfaces the server's detail message on rejection", async () => {
    const { fetchFn } = fakeFetch(422, { detail: "ATT code 300 outside 0..127" });
    const api = new Api("", fetchFn);
    const err = await api.patchCanceller("s1", { att: 300 }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.message).toBe("ATT code 300 outside 0..127");
  });

  it("sends the tune strategy and parses the ack", async () => {
    const { calls, fetchFn } = fakeFetch(200, {
      att: 9,
      ps: 209,
      caps: [16, 6, 6],
      rf_sic_db: 44.02,
      evaluations: 32768,
      sweeps: 0,
    });
    const api = new Api("", fetchFn);
    const ack = await api.tune("s1");
    expect(calls[0].url).toBe("/sessions/s1/tune");
    expect(JSON.parse(calls[0].body!)).toEqual({ strategy: "exhaustive" });
    expect(ack.evaluations).toBe(32768);
  });

  it("handles 204 deletes", async () => {
    const { calls, fetchFn } = fakeFetch(204, null);
    const api = new Api("", fetchFn);
    await expect(api.deleteSession("s1")).resolves.toBeUndefined();
    expect(calls[0].method).toBe("DELETE");
  });

  it("derives the websocket url from the http base", () => {
    const api = new Api("http://box:8000");
    expect(api.streamUrl("s7")).toBe("ws://box:8000/sessions/s7/stream");
  });
});
