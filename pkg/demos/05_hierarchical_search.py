# The full two-stage parameter search
#
# Stage 1: Bayesian optimization over the amplification factor at a fixed
# window shape, scoring text alignment plus visual novelty. Stage 2:
# constrained SPSA refines the window shape while keeping image
# similarity above the safety floor. Runs against the in-process "peak"
# evaluator here; swap in an external process via the wire protocol for
# the real thing.

import json
from pathlib import Path

import numpy as np

from scdiff import BayesOptConfig, SearchConfig, SpsaConfig, hierarchical_search
from scdiff.fixtures import get_synthetic_evaluator, grid_search_oracle, peak_scores
from scdiff.plotting import render_search_svg
from scdiff.search import search_result_to_dict, similarity_constraint, vsml_score

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

config = SearchConfig(
    diversity_weight=1.0,
    min_image_similarity=0.7,
    stage1=BayesOptConfig(bounds=(1.5, 8.0), n_init=5, n_iter=10, seed=3),
    stage2=SpsaConfig(beta0=8.0, bounds=(6.0, 12.0), iterations=50, n_runs=5, seed=3),
)

result = hierarchical_search(get_synthetic_evaluator("peak"), config)

print(f"alpha* = {result.alpha_star:.4f}   (posterior argmax before the "
      f"feasibility filter: {result.alpha_star_posterior:.4f})")
print(f"beta*  = {result.beta_star:.4f}")
print(f"score  = {result.score:.4f}   feasible = {result.feasible}")
print(f"evaluator calls: {result.n_evaluator_calls}")

# ## Sanity check against exhaustive search

oracle = grid_search_oracle(
    lambda a, b: vsml_score(*peak_scores(a, b), 1.0),
    lambda a, b: similarity_constraint(peak_scores(a, b)[1], 0.7),
    np.linspace(1.5, 8.0, 200),
    np.linspace(6.0, 12.0, 200),
)
print(f"\n200x200 grid oracle: alpha={oracle.alpha:.4f} beta={oracle.beta:.4f} "
      f"score={oracle.score:.4f}")
print(f"distance: d_alpha={abs(result.alpha_star - oracle.alpha):.3f} "
      f"d_beta={abs(result.beta_star - oracle.beta):.3f}")

# ## Persist the trace and render it

doc = search_result_to_dict(result)
trace_path = OUT / "search_result.json"
trace_path.write_text(json.dumps(doc, indent=2) + "\n")
(OUT / "search_plot.svg").write_text(render_search_svg(doc))
print(f"\nwrote {trace_path} and search_plot.svg")
print("CLI equivalent: scdiff search --config cfg.json --out result.json --seed 3 "
      "&& scdiff plot --trace result.json --out plot.svg")
