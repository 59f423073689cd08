import { describe, expect, it } from "vitest";

import { type ChartScale, xPx, yPx } from "../src/chart";

const scale: ChartScale = { fMinHz: -2.5e6, fMaxHz: 2.5e6, dbmMin: -140, dbmMax: 10 };

describe("chart scales", () => {
  it("maps the frequency span onto the canvas width", () => {
    expect(xPx(-2.5e6, scale, 760)).toBe(0);
    expect(xPx(0, scale, 760)).toBe(380);
    expect(xPx(2.5e6, scale, 760)).toBe(760);
    expect(xPx(200e3, scale, 760)).toBeCloseTo(380 + (0.2 / 5) * 760, 9);
  });

  it("maps dBm onto the canvas height, top is loud", () => {
    expect(yPx(10, scale, 360)).toBe(0);
    expect(yPx(-140, scale, 360)).toBe(360);
    expect(yPx(-65, scale, 360)).toBe(180);
  });

  it("clamps off-scale power instead of drawing outside", () => {
    expect(yPx(-500, scale, 360)).toBe(360);
    expect(yPx(40, scale, 360)).toBe(0);
  });
});
