"""Spatial-window feature modulation and hierarchical black-box parameter search.

Core pieces:

- compactly supported 2D windows (Kaiser-Bessel, Gaussian, circular binary)
  and the feature-map blending operator built on them;
- spectral analysis of hard frequency cutoffs (Jinc kernels, leakage metrics)
  demonstrating why spatial windows stay local while frequency-domain
  amplification does not;
- a Gaussian-process / Expected-Improvement Bayesian optimizer and a
  constrained SPSA optimizer, composed into a two-stage search that tunes
  the amplification factor and window shape against a pluggable
  visual-semantic evaluator.
"""

from .special import bessel_i0, bessel_j1, std_normal_cdf, std_normal_pdf
from .windows import Window, WindowSpec, build_window, radial_distance, replicate
from .modulation import (
    grid_to_tokens,
    modulate,
    read_feature_map,
    tokens_to_grid,
    write_feature_map,
)
from .spectral import (
    FreqMask,
    SpatialKernel,
    freq_amplify,
    jinc,
    leakage,
    make_freq_mask,
    mask_to_kernel,
)
from .gp import GpHyperparams, GpModel, fit, make_model, matern52, posterior
from .bayesopt import (
    BayesOptConfig,
    BoTrace,
    expected_improvement,
    lhs_sample,
    maximize_acquisition,
    run_bayes_opt,
)
from .spsa import (
    SpsaConfig,
    SpsaTrace,
    bernoulli_perturbation,
    pseudo_gradient,
    run_spsa,
)
from .search import (
    EvalRequest,
    EvalResult,
    SearchConfig,
    SearchResult,
    evaluate,
    hierarchical_search,
    similarity_constraint,
    vsml_score,
)

__version__ = "0.1.0"
