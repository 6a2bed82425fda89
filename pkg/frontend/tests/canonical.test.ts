import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { canonicalJson, eraseVolatile } from "../src/canonical.js";

const FIXTURE = join(__dirname, "fixtures", "separation.dap.json");

describe("canonicalJson", () => {
  it("reproduces the backend's export bytes for the committed fixture", () => {
    const raw = readFileSync(FIXTURE, "utf-8");
    expect(canonicalJson(JSON.parse(raw))).toBe(raw);
  });

  it("sorts keys at every level and ends with a newline", () => {
    const text = canonicalJson({ b: 1, a: { d: [2, { z: 1, y: 0 }], c: 3 } });
    expect(text).toBe(
      '{\n  "a": {\n    "c": 3,\n    "d": [\n      2,\n      {\n        "y": 0,\n        "z": 1\n      }\n    ]\n  },\n  "b": 1\n}\n',
    );
  });

  it("keeps unicode unescaped like the backend", () => {
    expect(canonicalJson({ name: "café" })).toContain("café");
  });
});

describe("eraseVolatile", () => {
  it("strips run ids, timestamps and durations at any depth", () => {
    const doc = {
      run_id: "x",
      created_at: "now",
      results: [{ steps: [{ duration_ms: 5.2, status: "done" }] }],
      pipeline: { created_at: "then", name: "p" },
    };
    expect(eraseVolatile(doc)).toEqual({
      results: [{ steps: [{ status: "done" }] }],
      pipeline: { name: "p" },
    });
  });

  it("does not mutate its input", () => {
    const doc = { run_id: "x", keep: 1 };
    eraseVolatile(doc);
    expect(doc.run_id).toBe("x");
  });
});
