/**
 * Pipeline-mode scaffolding: the documented extension point for wrapping
 * a real diffusion + CLIP scoring pipeline behind the wire protocol.
 *
 * What a real integration does per request:
 *   1. generate the original image for the prompt (fixed seed);
 *   2. re-run generation with a forward hook on ONE encoder block
 *      (down0 | down1 | down2 | mid - upsampling blocks are rejected
 *      because modulating them injects texture noise) that blends the
 *      block's feature map with its window-amplified copy,
 *      out = x * (1 - w) + alpha * x * w, using the Kaiser-Bessel window
 *      of radius r centered at (cx, cy) with shape beta;
 *   3. score CLIP cosine similarities: prompt vs new image (s_text) and
 *      original vs new image (s_img).
 *
 * Loading model weights is intentionally out of scope here: this module
 * validates configuration up front and fails fast with a clear message,
 * so CI never touches model assets. Pipeline mode advertises
 * concurrent: false (a real pipeline serializes GPU work).
 */

import { BLOCK_TAGS, isBlockTag } from "./protocol";

export interface PipelineSettings {
  model: string; // e.g. an SDXL-class checkpoint identifier
  device: string; // "cuda" | "cpu" | ...
  steps: number; // denoising steps per generation
  block: string; // encoder block to hook
}

export const DEFAULT_PIPELINE_SETTINGS: PipelineSettings = {
  model: "",
  device: "cuda",
  steps: 1,
  block: "down1",
};

/** Validate pipeline settings; throws on unknown blocks or missing model. */
export function validatePipelineSettings(settings: PipelineSettings): void {
  if (!isBlockTag(settings.block)) {
    throw new Error(
      `unknown block "${settings.block}"; feature enhancement is restricted to ` +
        `${BLOCK_TAGS.join(", ")} (upsampling blocks add texture noise)`,
    );
  }
  if (!Number.isInteger(settings.steps) || settings.steps < 1) {
    throw new Error(`steps must be a positive integer, got ${settings.steps}`);
  }
  if (settings.model.length === 0) {
    throw new Error("pipeline mode requires a model identifier");
  }
}

export function startPipeline(settings: PipelineSettings): never {
  validatePipelineSettings(settings);
  throw new Error(
    "pipeline mode is an extension point: supply a scorer implementation " +
      "wired to your diffusion + CLIP stack (see bridge/README.md)",
  );
}
