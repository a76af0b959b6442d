#!/usr/bin/env node
/**
 * scdiff-bridge --mode mock|pipeline [--config PATH]
 *
 * mock: serve the deterministic closed-form scorer on stdio (no assets).
 * pipeline: validate the configured diffusion+CLIP settings and hand
 * over to the integration (extension point; not part of CI).
 */

import { readFileSync } from "fs";
import { DEFAULT_MOCK_PARAMS, MockParams } from "./mock";
import { DEFAULT_PIPELINE_SETTINGS, PipelineSettings, startPipeline } from "./pipeline";
import { serve } from "./server";

interface BridgeConfig {
  mock?: Partial<MockParams>;
  pipeline?: Partial<PipelineSettings>;
}

function parseArgs(argv: string[]): { mode: string; configPath?: string } {
  let mode = "mock";
  let configPath: string | undefined;
  for (let i = 0; i < argv.length; i += 1) {
    switch (argv[i]) {
      case "--mode":
        mode = argv[++i] ?? "";
        break;
      case "--config":
        configPath = argv[++i];
        break;
      default:
        throw new Error(`unknown argument: ${argv[i]}`);
    }
  }
  if (mode !== "mock" && mode !== "pipeline") {
    throw new Error(`--mode must be mock or pipeline, got "${mode}"`);
  }
  return { mode, configPath };
}

function loadConfig(path?: string): BridgeConfig {
  if (!path) {
    return {};
  }
  const doc = JSON.parse(readFileSync(path, "utf-8"));
  if (typeof doc !== "object" || doc === null) {
    throw new Error("config must be a JSON object");
  }
  return doc as BridgeConfig;
}

async function main(): Promise<void> {
  const { mode, configPath } = parseArgs(process.argv.slice(2));
  const config = loadConfig(configPath);
  if (mode === "mock") {
    const params: MockParams = { ...DEFAULT_MOCK_PARAMS, ...(config.mock ?? {}) };
    await serve({ name: "scdiff-bridge-mock", concurrent: true, params });
    return;
  }
  const settings: PipelineSettings = {
    ...DEFAULT_PIPELINE_SETTINGS,
    ...(config.pipeline ?? {}),
  };
  startPipeline(settings);
}

main().catch((err) => {
  process.stderr.write(`scdiff-bridge: ${err instanceof Error ? err.message : err}\n`);
  process.exit(1);
});
