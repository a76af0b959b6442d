/**
 * Line-delimited JSON server loop over stdio.
 *
 * Emits the handshake, then answers every request line with exactly one
 * response line. Malformed lines produce an error response (with the
 * request id when one can be salvaged) and never kill the process.
 */

import { createInterface } from "readline";
import { DEFAULT_MOCK_PARAMS, MockParams, mockScores } from "./mock";
import { Handshake, parseRequest, Response } from "./protocol";

export interface ServeOptions {
  name: string;
  concurrent: boolean;
  params: MockParams;
  input?: NodeJS.ReadableStream;
  output?: NodeJS.WritableStream;
}

function salvageId(line: string): number {
  const match = /"id"\s*:\s*(\d+)/.exec(line);
  return match ? Number(match[1]) : 0;
}

export function answer(line: string, params: MockParams): Response {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    return { id: salvageId(line), error: "invalid JSON" };
  }
  const checked = parseRequest(parsed);
  if (!checked.ok) {
    return { id: checked.id, error: checked.problem };
  }
  const { s_text, s_img } = mockScores(checked.request.alpha, checked.request.beta, params);
  return { id: checked.request.id, s_text, s_img };
}

export function serve(options: Partial<ServeOptions> = {}): Promise<void> {
  const name = options.name ?? "scdiff-bridge-mock";
  const concurrent = options.concurrent ?? true;
  const params = options.params ?? DEFAULT_MOCK_PARAMS;
  const input = options.input ?? process.stdin;
  const output = options.output ?? process.stdout;

  const handshake: Handshake = { hello: { name, concurrent } };
  output.write(JSON.stringify(handshake) + "\n");

  const lines = createInterface({ input, crlfDelay: Infinity });
  return new Promise((resolve) => {
    lines.on("line", (line) => {
      if (line.trim().length === 0) {
        return;
      }
      output.write(JSON.stringify(answer(line, params)) + "\n");
    });
    lines.on("close", resolve);
  });
}
