// Client-side heatmap rendering from feature-matrix JSON. Drawing locally
// (instead of fetching server PNGs) lets the cursor report exact bin values
// and axis labels.

import type { FeatureMatrixDoc } from "./types.js";

// viridis anchors, evenly spaced over [0, 1]
const VIRIDIS: [number, number, number][] = [
  [0.267, 0.005, 0.329],
  [0.283, 0.141, 0.458],
  [0.254, 0.265, 0.53],
  [0.207, 0.372, 0.553],
  [0.164, 0.471, 0.558],
  [0.128, 0.567, 0.551],
  [0.135, 0.659, 0.518],
  [0.267, 0.749, 0.441],
  [0.478, 0.821, 0.318],
  [0.741, 0.873, 0.15],
  [0.993, 0.906, 0.144],
];

export function colorFor(unit: number): [number, number, number] {
  const clamped = Math.max(0, Math.min(1, unit));
  const pos = clamped * (VIRIDIS.length - 1);
  const idx = Math.min(Math.floor(pos), VIRIDIS.length - 2);
  const frac = pos - idx;
  const a = VIRIDIS[idx];
  const b = VIRIDIS[idx + 1];
  return [
    Math.round((a[0] * (1 - frac) + b[0] * frac) * 255),
    Math.round((a[1] * (1 - frac) + b[1] * frac) * 255),
    Math.round((a[2] * (1 - frac) + b[2] * frac) * 255),
  ];
}

export interface RgbaImage {
  width: number;
  height: number;
  pixels: Uint8ClampedArray; // RGBA, row 0 at the TOP (canvas order)
}

/** Min-max scale the matrix and map to RGBA; matrix row 0 renders at the
 * image bottom (low frequencies down). Pure function, testable off-DOM. */
export function matrixToRgba(matrix: FeatureMatrixDoc): RgbaImage {
  const rows = matrix.data.length;
  const frames = rows > 0 ? matrix.data[0].length : 0;
  if (rows === 0 || frames === 0) {
    throw new Error("cannot render an empty matrix");
  }
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of matrix.data) {
    for (const v of row) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  const span = hi > lo ? hi - lo : 1;
  const pixels = new Uint8ClampedArray(rows * frames * 4);
  for (let r = 0; r < rows; r++) {
    const y = rows - 1 - r; // row 0 at the bottom
    for (let x = 0; x < frames; x++) {
      const unit = hi > lo ? (matrix.data[r][x] - lo) / span : 0;
      const [red, green, blue] = colorFor(unit);
      const off = (y * frames + x) * 4;
      pixels[off] = red;
      pixels[off + 1] = green;
      pixels[off + 2] = blue;
      pixels[off + 3] = 255;
    }
  }
  return { width: frames, height: rows, pixels };
}

export interface CursorReadout {
  row: number;
  frame: number;
  value: number;
  rowLabel: number;
  timeS: number;
}

/** Map a canvas-relative cursor position to the exact bin under it. */
export function readoutAt(
  matrix: FeatureMatrixDoc,
  xFrac: number,
  yFrac: number,
): CursorReadout {
  const rows = matrix.data.length;
  const frames = matrix.data[0].length;
  const frame = Math.min(frames - 1, Math.max(0, Math.floor(xFrac * frames)));
  // canvas y grows downward; matrix row 0 is at the bottom
  const row = Math.min(rows - 1, Math.max(0, Math.floor((1 - yFrac) * rows)));
  return {
    row,
    frame,
    value: matrix.data[row][frame],
    rowLabel: matrix.row_labels[row],
    timeS: matrix.frame_times[frame],
  };
}

export function axisName(axis: FeatureMatrixDoc["row_axis"]): string {
  switch (axis) {
    case "hz_linear":
      return "Hz";
    case "pitch_log":
      return "MIDI pitch";
    case "mel":
      return "mel";
    case "chroma12":
      return "pitch class";
    case "cepstral":
      return "coefficient";
    default:
      return "";
  }
}

/** Draw into a canvas (browser only). */
export function drawHeatmap(canvas: HTMLCanvasElement, matrix: FeatureMatrixDoc): void {
  const image = matrixToRgba(matrix);
  canvas.width = image.width;
  canvas.height = image.height;
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    throw new Error("2d canvas context unavailable");
  }
  const imageData = ctx.createImageData(image.width, image.height);
  imageData.data.set(image.pixels);
  ctx.putImageData(imageData, 0, 0);
}
