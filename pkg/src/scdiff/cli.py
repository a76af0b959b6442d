"""Command-line interface: window export, spectral analysis, search, plots.

Exit codes are a stable contract: 0 success, 1 runtime/IO failure,
2 usage or config-schema violation, 3 infeasible search result,
4 evaluator transport failure. The environment variable
SCDIFF_EVAL_TIMEOUT_S overrides the external-evaluator timeout.

File formats
------------
- window CSV: H rows of W comma-separated full-precision decimals.
- window PGM: plain (P2) grayscale, weights scaled to 0..255.
- feature maps: the flat binary format of scdiff.modulation.
- search result: JSON, schema "scdiff-search/1".
- plots: standalone SVG.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import fixtures, spectral
from .bayesopt import BayesOptConfig, expected_improvement
from .external import DEFAULT_TIMEOUT_S, ExternalEvaluator
from .modulation import modulate, write_feature_map
from .plotting import render_profiles_svg, render_search_svg
from .search import (
    SearchConfig,
    TransportError,
    hierarchical_search,
    search_result_to_dict,
)
from .spsa import SpsaConfig
from .special import bessel_i0, bessel_j1
from .windows import WindowSpec, build_window

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_TRANSPORT = 4


class SchemaError(ValueError):
    """Config file failed validation."""


# ---------------------------------------------------------------- helpers


def _parse_size(text: str) -> tuple[int, int]:
    try:
        h_str, w_str = text.lower().split("x")
        h, w = int(h_str), int(w_str)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 64x64, got {text!r}")
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError("size components must be positive")
    return h, w


def _parse_center(text: str) -> tuple[float, float]:
    try:
        cx_str, cy_str = text.split(",")
        return float(cx_str), float(cy_str)
    except ValueError:
        raise argparse.ArgumentTypeError(f"center must look like cx,cy, got {text!r}")


def _window_csv(values: np.ndarray) -> str:
    return "\n".join(",".join(repr(float(v)) for v in row) for row in values) + "\n"


def _window_pgm(values: np.ndarray) -> str:
    h, w = values.shape
    grey = np.clip(np.rint(values * 255), 0, 255).astype(int)
    rows = "\n".join(" ".join(str(v) for v in row) for row in grey)
    return f"P2\n{w} {h}\n255\n{rows}\n"


def _profile_edge_value(spec: WindowSpec) -> float:
    if spec.kind == "kaiser_bessel":
        return 1.0 / bessel_i0(spec.beta)
    if spec.kind == "gaussian":
        return math.exp(-1.0 / (2.0 * spec.eta * spec.eta))
    return 1.0


# ---------------------------------------------------------------- window


def cmd_window(args) -> int:
    kind = "kaiser_bessel" if args.kind == "kaiser" else args.kind
    h, w = args.size
    try:
        spec = WindowSpec(
            kind=kind,
            height=h,
            width=w,
            radius=args.radius,
            beta=args.beta,
            eta=args.eta,
            center=args.center,
        )
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    window = build_window(spec)
    text = _window_csv(window.values) if args.format == "csv" else _window_pgm(window.values)
    try:
        Path(args.out).write_text(text)
    except OSError as err:
        print(f"error: cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    support = int(np.count_nonzero(window.values))
    print(
        f"window kind={kind} size={h}x{w} radius={args.radius!r} "
        f"peak={float(window.values.max())!r} edge={_profile_edge_value(spec)!r} "
        f"support_pixels={support}"
    )
    return EXIT_OK


# ---------------------------------------------------------------- spectral


def _radial_profile(values: np.ndarray) -> list[tuple[int, float]]:
    h, w = values.shape
    ii, jj = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    r = np.hypot(ii - h // 2, jj - w // 2)
    bins = np.rint(r).astype(int)
    out = []
    for k in range(min(h, w) // 2 + 1):
        sel = bins == k
        if np.any(sel):
            out.append((k, float(values[sel].mean())))
    return out


def cmd_spectral(args) -> int:
    h, w = args.size
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        print(f"error: cannot create {out_dir}: {err}", file=sys.stderr)
        return EXIT_RUNTIME

    mask = spectral.make_freq_mask(h, w, args.cutoff)
    kernel = spectral.mask_to_kernel(mask)
    profile = _radial_profile(kernel.values)
    wc = args.cutoff / math.sqrt(h * w)
    jinc_r = np.arange(0.0, min(h, w) / 2 + 1e-9, 0.25)
    jinc_v = spectral.jinc(wc, jinc_r)

    x = fixtures.random_feature_map(1, 1, h, w, seed=args.seed)
    spec = WindowSpec(kind="kaiser_bessel", height=h, width=w, radius=args.cutoff, beta=7.0)
    window = build_window(spec)
    spatial_edit = modulate(x, window, args.alpha)
    freq_edit = spectral.freq_amplify(x, args.cutoff, args.alpha)
    leak_spatial = spectral.leakage(x, spatial_edit, args.cutoff)
    leak_freq = spectral.leakage(x, freq_edit, args.cutoff)
    input_max = float(np.max(np.abs(x)))

    try:
        (out_dir / "kernel.csv").write_text(_window_csv(kernel.values))
        (out_dir / "radial_profile.csv").write_text(
            "radius,value\n" + "".join(f"{k},{v!r}\n" for k, v in profile)
        )
        (out_dir / "jinc_profile.csv").write_text(
            "radius,value\n" + "".join(f"{r!r},{v!r}\n" for r, v in zip(jinc_r, jinc_v))
        )
        (out_dir / "leakage_report.csv").write_text(
            "method,leakage,input_max_abs\n"
            f"kaiser_bessel,{leak_spatial!r},{input_max!r}\n"
            f"freq_amplify,{leak_freq!r},{input_max!r}\n"
        )
        write_feature_map(out_dir / "input.fmap", x)
        write_feature_map(out_dir / "spatial_edit.fmap", spatial_edit)
        write_feature_map(out_dir / "freq_edit.fmap", freq_edit)
        if args.svg:
            scale = kernel.peak_value or 1.0
            series = [
                ("kernel (normalized)", [p[0] for p in profile], [p[1] / scale for p in profile]),
                ("jinc (normalized)", list(jinc_r), list(np.asarray(jinc_v) / (math.pi * wc))),
            ]
            (out_dir / "profiles.svg").write_text(render_profiles_svg(series))
    except OSError as err:
        print(f"error: cannot write outputs: {err}", file=sys.stderr)
        return EXIT_RUNTIME

    print(
        f"spectral size={h}x{w} cutoff={args.cutoff!r} alpha={args.alpha!r} "
        f"kb_leakage={leak_spatial!r} freq_leakage={leak_freq!r}"
    )
    return EXIT_OK


# ---------------------------------------------------------------- search


_STAGE1_KEYS = {"bounds", "n_init", "n_iter", "restarts", "seed", "fixed_beta"}
_STAGE2_KEYS = {
    "beta0",
    "bounds",
    "iterations",
    "a",
    "gain_exponent",
    "c",
    "gamma",
    "n_runs",
    "max_backtracks",
    "seed",
}
_SEARCH_KEYS = {
    "diversity_weight",
    "min_image_similarity",
    "feasibility_margin",
    "radius",
    "block",
    "center",
    "prompt",
    "request_seed",
    "stage1",
    "stage2",
}
_WINDOW_KEYS = {"kind", "height", "width", "radius", "beta", "eta", "center"}


def _check_keys(obj: dict, allowed: set[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"{path}: unknown key(s) {sorted(unknown)}")


def _as_pair(value, path: str) -> tuple[float, float]:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise SchemaError(f"{path}: expected a [lo, hi] pair")
    return float(value[0]), float(value[1])


def load_config(path: str | Path) -> dict:
    """Parse and schema-validate a TOML or JSON run config."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as err:
        raise SchemaError(f"cannot read config {path}: {err}")
    if path.suffix.lower() == ".toml":
        try:
            import tomllib  # py >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        try:
            doc = tomllib.loads(raw.decode("utf-8"))
        except Exception as err:
            raise SchemaError(f"invalid TOML in {path}: {err}")
    else:
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as err:
            raise SchemaError(f"invalid JSON in {path}: {err}")
    validate_config(doc)
    return doc


def validate_config(doc: dict) -> None:
    _check_keys(doc, {"evaluator", "search", "window"}, "config")
    if "evaluator" not in doc:
        raise SchemaError("config: missing required key 'evaluator'")
    ev = doc["evaluator"]
    _check_keys(ev, {"synthetic", "external"}, "evaluator")
    if len(ev) != 1:
        raise SchemaError("evaluator: exactly one of 'synthetic' or 'external' required")
    if "synthetic" in ev:
        if ev["synthetic"] not in fixtures.SYNTHETIC_EVALUATORS:
            raise SchemaError(
                f"evaluator.synthetic: unknown name {ev['synthetic']!r}; "
                f"known: {sorted(fixtures.SYNTHETIC_EVALUATORS)}"
            )
    else:
        cmd = ev["external"]
        if not (
            isinstance(cmd, str)
            or (isinstance(cmd, list) and cmd and all(isinstance(p, str) for p in cmd))
        ):
            raise SchemaError("evaluator.external: expected a command string or argv list")
    if "window" in doc:
        _check_keys(doc["window"], _WINDOW_KEYS, "window")
        try:
            _window_spec_from(doc["window"])
        except ValueError as err:
            raise SchemaError(f"window: {err}")
    search = doc.get("search", {})
    _check_keys(search, _SEARCH_KEYS, "search")
    if "stage1" in search:
        _check_keys(search["stage1"], _STAGE1_KEYS, "search.stage1")
    if "stage2" in search:
        _check_keys(search["stage2"], _STAGE2_KEYS, "search.stage2")
    try:
        build_search_config(doc)
    except (ValueError, TypeError) as err:
        raise SchemaError(f"config: {err}")


def _window_spec_from(section: dict) -> WindowSpec:
    center = section.get("center")
    return WindowSpec(
        kind=section.get("kind", "kaiser_bessel"),
        height=int(section.get("height", 64)),
        width=int(section.get("width", 64)),
        radius=float(section.get("radius", 15.0)),
        beta=float(section.get("beta", 7.0)),
        eta=float(section.get("eta", 0.5)),
        center=tuple(float(v) for v in center) if center is not None else None,
    )


def build_search_config(doc: dict, seed_override: int | None = None) -> SearchConfig:
    search = dict(doc.get("search", {}))
    window = _window_spec_from(doc["window"]) if "window" in doc else None

    stage1_doc = dict(search.get("stage1", {}))
    stage2_doc = dict(search.get("stage2", {}))
    if "bounds" in stage1_doc:
        stage1_doc["bounds"] = _as_pair(stage1_doc["bounds"], "search.stage1.bounds")
    if "bounds" in stage2_doc:
        stage2_doc["bounds"] = _as_pair(stage2_doc["bounds"], "search.stage2.bounds")
    if seed_override is not None:
        stage1_doc["seed"] = int(np.random.SeedSequence([seed_override, 1]).generate_state(1)[0])
        stage2_doc["seed"] = int(np.random.SeedSequence([seed_override, 2]).generate_state(1)[0])
    stage1 = BayesOptConfig(**stage1_doc)
    stage2 = SpsaConfig(**stage2_doc)

    radius = search.get("radius", window.radius if window else 15.0)
    if "center" in search:
        center = _as_pair(search["center"], "search.center")
    elif window is not None:
        center = window.resolved_center
    else:
        center = (32.0, 32.0)
    return SearchConfig(
        diversity_weight=float(search.get("diversity_weight", 1.0)),
        min_image_similarity=float(search.get("min_image_similarity", 0.7)),
        feasibility_margin=float(search.get("feasibility_margin", 0.01)),
        radius=float(radius),
        block=search.get("block", "down1"),
        center=center,
        prompt=search.get("prompt", "a photo of a creative object."),
        request_seed=int(search.get("request_seed", 0)),
        stage1=stage1,
        stage2=stage2,
    )


def _make_evaluator(doc: dict):
    ev = doc["evaluator"]
    if "synthetic" in ev:
        return fixtures.get_synthetic_evaluator(ev["synthetic"])
    timeout = float(os.environ.get("SCDIFF_EVAL_TIMEOUT_S", DEFAULT_TIMEOUT_S))
    return ExternalEvaluator(ev["external"], timeout_s=timeout)


def cmd_search(args) -> int:
    try:
        doc = load_config(args.config)
        config = build_search_config(doc, seed_override=args.seed)
    except SchemaError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE

    evaluator = None
    try:
        evaluator = _make_evaluator(doc)
        result = hierarchical_search(evaluator, config)
    except TransportError as err:
        print(f"evaluator transport error: {err}", file=sys.stderr)
        return EXIT_TRANSPORT
    except Exception as err:  # noqa: BLE001
        print(f"search failed: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        if evaluator is not None and hasattr(evaluator, "close"):
            evaluator.close()

    payload = json.dumps(search_result_to_dict(result), indent=2) + "\n"
    try:
        Path(args.out).write_text(payload)
    except OSError as err:
        print(f"error: cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_RUNTIME

    feasible = "true" if result.feasible else "false"
    print(
        f"evaluations={result.n_evaluator_calls} "
        f"stage1_alpha={result.alpha_star_posterior!r} "
        f"restricted={str(result.feasibility_restricted).lower()}"
    )
    print(
        f"RESULT alpha={result.alpha_star!r} beta={result.beta_star!r} "
        f"score={result.score!r} feasible={feasible}"
    )
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


# ---------------------------------------------------------------- plot


def cmd_plot(args) -> int:
    try:
        doc = json.loads(Path(args.trace).read_text())
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: cannot parse trace {args.trace}: {err}", file=sys.stderr)
        return EXIT_USAGE
    if not isinstance(doc, dict) or doc.get("schema") != "scdiff-search/1":
        print("error: trace is not an scdiff-search/1 document", file=sys.stderr)
        return EXIT_USAGE
    try:
        svg = render_search_svg(doc)
    except (KeyError, TypeError, ValueError) as err:
        print(f"error: malformed trace: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        Path(args.out).write_text(svg)
    except OSError as err:
        print(f"error: cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    from scipy.integrate import quad

    reports = []

    x = 7.0
    integral, _ = quad(lambda theta: math.exp(-x * math.cos(theta)), 0.0, math.pi)
    reports.append(
        fixtures.make_report(
            "bessel-i0-integral", {"x": x}, integral / math.pi, bessel_i0(x), 1e-8 * bessel_i0(x)
        )
    )

    mu, sigma, f_best, n = 0.31, 0.42, 0.44, 200_000
    rng = np.random.default_rng(7)
    draws = np.maximum(rng.normal(mu, sigma, n) - f_best, 0.0)
    stderr = float(np.std(draws, ddof=1) / math.sqrt(n))
    reports.append(
        fixtures.make_report(
            "ei-closed-vs-mc",
            {"mu": mu, "sigma": sigma, "f_best": f_best, "n": n},
            float(np.mean(draws)),
            expected_improvement(mu, sigma, f_best),
            3.0 * stderr,
        )
    )

    xmap = fixtures.random_feature_map(1, 1, 16, 16, seed=11)
    kernel = spectral.mask_to_kernel(spectral.make_freq_mask(16, 16, 4.0))
    expected = xmap[0, 0] + 2.0 * fixtures.brute_convolve(xmap[0, 0], kernel.values)
    actual = spectral.freq_amplify(xmap, 4.0, 3.0)[0, 0]
    scale = float(np.max(np.abs(expected)))
    reports.append(
        fixtures.make_report(
            "convolution-theorem",
            {"size": 16, "cutoff": 4.0, "alpha": 3.0, "seed": 11},
            0.0,
            float(np.max(np.abs(actual - expected))),
            1e-6 * scale,
        )
    )

    lo, hi = 3.0, 4.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if bessel_j1(lo) * bessel_j1(mid) <= 0:
            hi = mid
        else:
            lo = mid
    root = 0.5 * (lo + hi)
    wc = 0.05
    reports.append(
        fixtures.make_report(
            "jinc-first-zero", {"cutoff": wc}, 0.0, spectral.jinc(wc, root / (2.0 * math.pi * wc)), 1e-9
        )
    )

    for report in reports:
        print(f"{'PASS' if report.passed else 'FAIL'} {report.oracle}")
    if args.out:
        try:
            Path(args.out).write_text(
                json.dumps([dataclasses.asdict(r) for r in reports], indent=2) + "\n"
            )
        except OSError as err:
            print(f"error: cannot write {args.out}: {err}", file=sys.stderr)
            return EXIT_RUNTIME
    return EXIT_OK if all(r.passed for r in reports) else EXIT_RUNTIME


# ---------------------------------------------------------------- entry


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scdiff",
        description="Spatial-window feature modulation and hierarchical parameter search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("window", help="generate a spatial window and export it")
    p.add_argument("--kind", required=True, choices=["kaiser", "kaiser_bessel", "gaussian", "circular"])
    p.add_argument("--size", required=True, type=_parse_size, metavar="HxW")
    p.add_argument("--radius", required=True, type=float)
    p.add_argument("--beta", type=float, default=7.0)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--center", type=_parse_center, default=None, metavar="CX,CY")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "pgm"], default="csv")
    p.set_defaults(func=cmd_window)

    p = sub.add_parser("spectral", help="kernel, radial profiles, and leakage comparison")
    p.add_argument("--size", type=_parse_size, default=(64, 64), metavar="HxW")
    p.add_argument("--cutoff", type=float, default=8.0)
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--svg", action="store_true", help="also write profiles.svg")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("search", help="run the two-stage parameter search")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override both stage seeds")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("plot", help="render a search-result JSON as SVG")
    p.add_argument("--trace", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("verify", help="run the oracle cross-checks")
    p.add_argument("--out", default=None, help="write OracleReport JSON here")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
