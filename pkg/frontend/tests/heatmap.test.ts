import { describe, expect, it } from "vitest";

import { colorFor, matrixToRgba, readoutAt } from "../src/heatmap.js";
import type { FeatureMatrixDoc } from "../src/types.js";

const MATRIX: FeatureMatrixDoc = {
  row_axis: "mel",
  row_labels: [10, 20],
  frame_times: [0.0, 0.5, 1.0],
  data: [
    [0, 0, 0],
    [0, 0, 1],
  ],
};

describe("matrixToRgba", () => {
  it("min-max scales and puts row 0 at the bottom", () => {
    const image = matrixToRgba(MATRIX);
    expect(image.width).toBe(3);
    expect(image.height).toBe(2);
    // the hot pixel is row 1, frame 2 -> top-right of the image
    const topRight = image.pixels.slice((0 * 3 + 2) * 4, (0 * 3 + 2) * 4 + 3);
    const hot = colorFor(1);
    expect(Array.from(topRight)).toEqual(hot);
    const bottomLeft = image.pixels.slice((1 * 3 + 0) * 4, (1 * 3 + 0) * 4 + 3);
    expect(Array.from(bottomLeft)).toEqual(colorFor(0));
  });

  it("constant matrices render uniformly", () => {
    const image = matrixToRgba({ ...MATRIX, data: [[5, 5, 5], [5, 5, 5]] });
    const first = Array.from(image.pixels.slice(0, 4));
    for (let p = 0; p < image.pixels.length; p += 4) {
      expect(Array.from(image.pixels.slice(p, p + 4))).toEqual(first);
    }
  });

  it("rejects empty matrices", () => {
    expect(() => matrixToRgba({ ...MATRIX, data: [] })).toThrow();
  });
});

describe("colorFor", () => {
  it("covers the anchor endpoints and clamps", () => {
    expect(colorFor(0)).toEqual([Math.round(0.267 * 255), Math.round(0.005 * 255), Math.round(0.329 * 255)]);
    expect(colorFor(1)).toEqual([Math.round(0.993 * 255), Math.round(0.906 * 255), Math.round(0.144 * 255)]);
    expect(colorFor(-5)).toEqual(colorFor(0));
    expect(colorFor(5)).toEqual(colorFor(1));
  });
});

describe("readoutAt", () => {
  it("maps cursor position to the exact bin, inverted vertically", () => {
    // top of the canvas = last row
    const top = readoutAt(MATRIX, 0.9, 0.05);
    expect(top.row).toBe(1);
    expect(top.frame).toBe(2);
    expect(top.value).toBe(1);
    expect(top.rowLabel).toBe(20);
    expect(top.timeS).toBe(1.0);
    const bottom = readoutAt(MATRIX, 0.0, 0.99);
    expect(bottom.row).toBe(0);
    expect(bottom.frame).toBe(0);
  });
});
