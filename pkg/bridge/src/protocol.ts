/**
 * Wire protocol types for the evaluator bridge.
 *
 * One JSON document per line, UTF-8, over stdin/stdout:
 *  - handshake (first line out): {"hello": {"name": string, "concurrent": boolean}}
 *  - request  (in):  {"id": u64, "alpha": f64, "beta": f64, "r": f64,
 *                     "block": "down0|down1|down2|mid", "cx": f64, "cy": f64,
 *                     "seed": u64, "prompt": string}
 *  - response (out): {"id": u64, "s_text": f64, "s_img": f64}
 *                 or {"id": u64, "error": string}
 */

export const BLOCK_TAGS = ["down0", "down1", "down2", "mid"] as const;
export type BlockTag = (typeof BLOCK_TAGS)[number];

export interface EvalRequest {
  id: number;
  alpha: number;
  beta: number;
  r: number;
  block: BlockTag;
  cx: number;
  cy: number;
  seed: number;
  prompt: string;
}

export interface ScoreResponse {
  id: number;
  s_text: number;
  s_img: number;
}

export interface ErrorResponse {
  id: number;
  error: string;
}

export type Response = ScoreResponse | ErrorResponse;

export interface Handshake {
  hello: { name: string; concurrent: boolean };
}

export function isBlockTag(value: unknown): value is BlockTag {
  return typeof value === "string" && (BLOCK_TAGS as readonly string[]).includes(value);
}

/**
 * Validate an incoming request line. Returns the parsed request or a
 * human-readable problem description; the caller answers problems with
 * an error response carrying whatever id could be salvaged.
 */
export function parseRequest(
  raw: unknown,
): { ok: true; request: EvalRequest } | { ok: false; id: number; problem: string } {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    return { ok: false, id: 0, problem: "request must be a JSON object" };
  }
  const obj = raw as Record<string, unknown>;
  const id = typeof obj.id === "number" && Number.isInteger(obj.id) && obj.id >= 0 ? obj.id : 0;
  if (!(typeof obj.id === "number" && Number.isInteger(obj.id) && obj.id >= 0)) {
    return { ok: false, id, problem: "missing or invalid field: id" };
  }
  for (const field of ["alpha", "beta"]) {
    const v = obj[field];
    if (typeof v !== "number" || !Number.isFinite(v)) {
      return { ok: false, id, problem: `missing or invalid field: ${field}` };
    }
  }
  if (obj.block !== undefined && !isBlockTag(obj.block)) {
    return { ok: false, id, problem: `unknown block: ${String(obj.block)}` };
  }
  return {
    ok: true,
    request: {
      id,
      alpha: obj.alpha as number,
      beta: obj.beta as number,
      r: typeof obj.r === "number" ? obj.r : 15.0,
      block: (obj.block as BlockTag) ?? "down1",
      cx: typeof obj.cx === "number" ? obj.cx : 0,
      cy: typeof obj.cy === "number" ? obj.cy : 0,
      seed: typeof obj.seed === "number" ? obj.seed : 0,
      prompt: typeof obj.prompt === "string" ? obj.prompt : "",
    },
  };
}
