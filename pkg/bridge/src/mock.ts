/**
 * Deterministic mock scorer.
 *
 * The formulas are the shared cross-implementation test contract (the
 * "peak" fixture): a separable Gaussian bump in (alpha, beta) for the
 * text score, and an image similarity that decays linearly in alpha
 * (alpha = 1 leaves the image untouched, so similarity is 1 there).
 * IEEE-754 double evaluation keeps results within 1e-12 of any other
 * implementation of the same expressions.
 */

export interface MockParams {
  textBase: number;
  textGain: number;
  alphaCenter: number;
  alphaWidth: number; // divisor of (alpha - center)^2 in the exponent
  betaCenter: number;
  betaWidth: number; // divisor of (beta - center)^2 in the exponent
  imgSlope: number;
}

export const DEFAULT_MOCK_PARAMS: MockParams = {
  textBase: 0.2,
  textGain: 0.12,
  alphaCenter: 4.2,
  alphaWidth: 2.0,
  betaCenter: 8.5,
  betaWidth: 4.0,
  imgSlope: 0.05,
};

export function mockScores(
  alpha: number,
  beta: number,
  p: MockParams = DEFAULT_MOCK_PARAMS,
): { s_text: number; s_img: number } {
  const bump =
    Math.exp(-((alpha - p.alphaCenter) ** 2) / p.alphaWidth) *
    Math.exp(-((beta - p.betaCenter) ** 2) / p.betaWidth);
  const s_text = p.textBase + p.textGain * bump;
  const s_img = Math.min(Math.max(1 - p.imgSlope * (alpha - 1), 0), 1);
  return { s_text, s_img };
}
