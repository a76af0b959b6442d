import { spawn, ChildProcessWithoutNullStreams } from "child_process";
import { createInterface, Interface } from "readline";
import { afterEach, describe, expect, it } from "vitest";
import { DEFAULT_MOCK_PARAMS, mockScores } from "../src/mock";
import { answer } from "../src/server";
import { validatePipelineSettings } from "../src/pipeline";

const MAIN = new URL("../dist/main.js", import.meta.url).pathname;

class BridgeHandle {
  proc: ChildProcessWithoutNullStreams;
  lines: Interface;
  queue: string[] = [];
  waiters: ((line: string) => void)[] = [];

  constructor(args: string[] = ["--mode", "mock"]) {
    this.proc = spawn("node", [MAIN, ...args], { stdio: ["pipe", "pipe", "pipe"] });
    this.lines = createInterface({ input: this.proc.stdout });
    this.lines.on("line", (line) => {
      const waiter = this.waiters.shift();
      if (waiter) waiter(line);
      else this.queue.push(line);
    });
  }

  next(timeoutMs = 5000): Promise<string> {
    const queued = this.queue.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("timed out waiting for line")), timeoutMs);
      this.waiters.push((line) => {
        clearTimeout(timer);
        resolve(line);
      });
    });
  }

  send(doc: unknown): void {
    this.proc.stdin.write(JSON.stringify(doc) + "\n");
  }

  sendRaw(text: string): void {
    this.proc.stdin.write(text);
  }

  kill(): void {
    this.proc.kill();
  }
}

let handle: BridgeHandle | undefined;

afterEach(() => {
  handle?.kill();
  handle = undefined;
});

describe("mock scorer", () => {
  it("reproduces the contract probe values", () => {
    const { s_text, s_img } = mockScores(4.2, 8.5);
    expect(Math.abs(s_text - 0.32)).toBeLessThanOrEqual(1e-15);
    expect(Math.abs(s_img - 0.84)).toBeLessThanOrEqual(1e-15);
  });

  it("returns identity similarity at alpha 1", () => {
    expect(mockScores(1.0, 9.0).s_img).toBe(1.0);
  });

  it("is deterministic", () => {
    const a = mockScores(3.3, 7.7);
    const b = mockScores(3.3, 7.7);
    expect(a).toEqual(b);
  });
});

describe("answer()", () => {
  it("scores a well-formed request", () => {
    const res = answer(JSON.stringify({ id: 5, alpha: 4.2, beta: 8.5 }), DEFAULT_MOCK_PARAMS);
    expect(res.id).toBe(5);
    expect("s_text" in res && Math.abs(res.s_text - 0.32) <= 1e-15).toBe(true);
  });

  it("answers missing alpha with a matching-id error", () => {
    const res = answer(JSON.stringify({ id: 9, beta: 8.0 }), DEFAULT_MOCK_PARAMS);
    expect(res.id).toBe(9);
    expect("error" in res && res.error).toMatch(/alpha/);
  });

  it("salvages the id from broken JSON when possible", () => {
    const res = answer('{"id": 42, "alpha": ', DEFAULT_MOCK_PARAMS);
    expect(res.id).toBe(42);
    expect("error" in res).toBe(true);
  });

  it("rejects unknown blocks", () => {
    const res = answer(
      JSON.stringify({ id: 2, alpha: 2, beta: 8, block: "up0" }),
      DEFAULT_MOCK_PARAMS,
    );
    expect("error" in res && res.error).toMatch(/block/);
  });

  it("rejects non-object payloads", () => {
    const res = answer("[1,2,3]", DEFAULT_MOCK_PARAMS);
    expect("error" in res).toBe(true);
  });
});

describe("pipeline mode settings", () => {
  it("rejects upsampling blocks", () => {
    expect(() =>
      validatePipelineSettings({ model: "m", device: "cpu", steps: 1, block: "up0" }),
    ).toThrow(/unknown block/);
  });

  it("accepts encoder and middle blocks", () => {
    for (const block of ["down0", "down1", "down2", "mid"]) {
      expect(() =>
        validatePipelineSettings({ model: "m", device: "cpu", steps: 4, block }),
      ).not.toThrow();
    }
  });

  it("requires a model identifier", () => {
    expect(() =>
      validatePipelineSettings({ model: "", device: "cpu", steps: 1, block: "mid" }),
    ).toThrow(/model/);
  });
});

describe("stdio server", () => {
  it("sends the handshake first, advertising concurrency", async () => {
    handle = new BridgeHandle();
    const hello = JSON.parse(await handle.next());
    expect(hello).toEqual({ hello: { name: "scdiff-bridge-mock", concurrent: true } });
  });

  it("completes a 100-request session with schema-valid responses", async () => {
    handle = new BridgeHandle();
    await handle.next(); // handshake
    for (let i = 1; i <= 100; i += 1) {
      const alpha = 1.5 + (6.5 * i) / 100;
      const beta = 6.0 + (6.0 * i) / 100;
      handle.send({
        id: i,
        alpha,
        beta,
        r: 15.0,
        block: "down1",
        cx: 32.0,
        cy: 32.0,
        seed: 7,
        prompt: "a photo of a creative lamp.",
      });
      const res = JSON.parse(await handle.next());
      expect(res.id).toBe(i);
      expect(typeof res.s_text).toBe("number");
      expect(typeof res.s_img).toBe("number");
      expect(res.s_text).toBeGreaterThanOrEqual(-1);
      expect(res.s_text).toBeLessThanOrEqual(1);
      const ref = mockScores(alpha, beta);
      expect(Math.abs(res.s_text - ref.s_text)).toBeLessThanOrEqual(1e-12);
      expect(Math.abs(res.s_img - ref.s_img)).toBeLessThanOrEqual(1e-12);
    }
  });

  it("matches scrambled ids and batched requests", async () => {
    handle = new BridgeHandle();
    await handle.next();
    const ids = [31, 7, 19, 3, 25];
    for (const id of ids) {
      handle.send({ id, alpha: 2.0 + id / 10, beta: 8.0 });
    }
    for (const id of ids) {
      const res = JSON.parse(await handle.next());
      expect(res.id).toBe(id);
      const ref = mockScores(2.0 + id / 10, 8.0);
      expect(Math.abs(res.s_text - ref.s_text)).toBeLessThanOrEqual(1e-12);
    }
  });

  it("recovers from malformed requests and stays alive", async () => {
    handle = new BridgeHandle();
    await handle.next();
    handle.sendRaw("not json at all\n");
    const err1 = JSON.parse(await handle.next());
    expect(err1.error).toMatch(/JSON/);
    handle.send({ id: 11, beta: 8.0 }); // missing alpha
    const err2 = JSON.parse(await handle.next());
    expect(err2.id).toBe(11);
    expect(err2.error).toMatch(/alpha/);
    handle.send({ id: 12, alpha: 4.2, beta: 8.5 });
    const ok = JSON.parse(await handle.next());
    expect(ok.id).toBe(12);
    expect(Math.abs(ok.s_text - 0.32)).toBeLessThanOrEqual(1e-12);
  });

  it("honors mock-parameter overrides from --config", async () => {
    const { writeFileSync, mkdtempSync } = await import("fs");
    const { join } = await import("path");
    const { tmpdir } = await import("os");
    const dir = mkdtempSync(join(tmpdir(), "bridge-"));
    const configPath = join(dir, "cfg.json");
    writeFileSync(configPath, JSON.stringify({ mock: { textBase: 0.5 } }));
    handle = new BridgeHandle(["--mode", "mock", "--config", configPath]);
    await handle.next();
    handle.send({ id: 1, alpha: 4.2, beta: 8.5 });
    const res = JSON.parse(await handle.next());
    expect(Math.abs(res.s_text - 0.62)).toBeLessThanOrEqual(1e-12);
  });

  it("fails fast in pipeline mode with an invalid block", async () => {
    const { writeFileSync, mkdtempSync } = await import("fs");
    const { join } = await import("path");
    const { tmpdir } = await import("os");
    const dir = mkdtempSync(join(tmpdir(), "bridge-"));
    const configPath = join(dir, "cfg.json");
    writeFileSync(configPath, JSON.stringify({ pipeline: { model: "m", block: "up0" } }));
    const proc = spawn("node", [MAIN, "--mode", "pipeline", "--config", configPath]);
    const stderr: string[] = [];
    proc.stderr.on("data", (chunk) => stderr.push(String(chunk)));
    const code = await new Promise<number | null>((resolve) => proc.on("exit", resolve));
    expect(code).toBe(1);
    expect(stderr.join("")).toMatch(/unknown block/);
  });
});
