// Canonical pipeline serialization: must produce byte-for-byte the same
// .dap.json the backend writes (sorted keys, two-space indent, trailing
// newline), so exports can be compared and shared across tools.

function sortKeysDeep(value: unknown): unknown {
  if (Array.isArray(value)) {
    return value.map(sortKeysDeep);
  }
  if (value !== null && typeof value === "object") {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as Record<string, unknown>).sort()) {
      out[key] = sortKeysDeep((value as Record<string, unknown>)[key]);
    }
    return out;
  }
  return value;
}

export function canonicalJson(doc: unknown): string {
  return JSON.stringify(sortKeysDeep(doc), null, 2) + "\n";
}

export function canonicalJsonBytes(doc: unknown): Uint8Array {
  return new TextEncoder().encode(canonicalJson(doc));
}

const VOLATILE_KEYS = new Set(["run_id", "created_at", "duration_ms"]);

/** Deep copy with run ids, timestamps and durations removed; two runs of the
 * same pipeline compare equal under this erasure. Mirrors the backend rule. */
export function eraseVolatile<T>(doc: T): T {
  const strip = (node: unknown): unknown => {
    if (Array.isArray(node)) {
      return node.map(strip);
    }
    if (node !== null && typeof node === "object") {
      const out: Record<string, unknown> = {};
      for (const [key, value] of Object.entries(node as Record<string, unknown>)) {
        if (!VOLATILE_KEYS.has(key)) {
          out[key] = strip(value);
        }
      }
      return out;
    }
    return node;
  };
  return strip(doc) as T;
}
