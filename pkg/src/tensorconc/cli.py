"""Command-line interface.

Subcommands: norm, variance, bound, mc, sweep, pca-detect, covering-probe,
checks. Each takes a JSON config file (``-`` for stdin), dotted-path
``--set key=value`` overrides, an optional ``--seed`` override, and writes
CSV to ``--output`` (stdout otherwise) with a JSON summary sibling. With
``--figures`` a matplotlib figure is rendered next to the delimited output.

Exit codes: 0 success, 1 failed property check, 2 invalid input, 3 resource
guard rejection.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bounds import (
    hypergraph_bound,
    indep_entry_bound,
    lambda_threshold,
    master_bound,
    matching_bound,
    nck_holder_bound,
    sharpest_bound,
    trivial_bound,
    type2_bound,
)
from .errors import InvalidInputError, ResourceLimitError
from .experiments import (
    ExperimentConfig,
    bound_ratio_sweep,
    covering_probe,
    geometry_checks,
    identity_checks,
    mc_expected_norm,
    pca_detection,
)
from .models import Hypergraph, MatchingFamily, ModelSpec, delta_vector, matching_series
from .norms import (
    SolverConfig,
    best_available_norm,
    injective_norm,
    l1_injective_exact,
    spectral_exact,
    symmetric_injective_norm,
)
from .tensor import Tensor, TensorSeries
from .variance import VarianceProfile, variance_profile

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def _load_config(path: str) -> dict:
    try:
        if path == "-":
            obj = json.load(sys.stdin)
        else:
            with open(path, "r", encoding="utf-8") as fh:
                obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InvalidInputError("config must be a JSON object")
    return obj


def _parse_override_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_overrides(config: dict, overrides) -> dict:
    for item in overrides or []:
        if "=" not in item:
            raise InvalidInputError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        target = config
        parts = key.split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise InvalidInputError(f"override path {key!r} does not address an object")
        target[parts[-1]] = _parse_override_value(value)
    return config


def _solver_from(config: dict, seed_override) -> SolverConfig:
    solver = SolverConfig.from_json_dict(config.get("solver", {}))
    if seed_override is not None:
        solver = SolverConfig(
            restarts=solver.restarts,
            max_iters=solver.max_iters,
            rel_tol=solver.rel_tol,
            seed=seed_override,
        )
    return solver


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit_result(result, args) -> None:
    csv_text = result.to_csv()
    if args.output:
        _atomic_write(args.output, csv_text)
        base, _ = os.path.splitext(args.output)
        _atomic_write(base + ".json", _json_text(result.to_json_dict()))
        if args.figures:
            from .figures import render_figure

            render_figure(result, base + ".png")
    else:
        sys.stdout.write(csv_text)
        if args.figures:
            raise InvalidInputError("--figures requires --output")


def _emit_json(obj: dict, args) -> None:
    text = _json_text(obj)
    if args.output:
        _atomic_write(args.output, text)
    else:
        sys.stdout.write(text)


def _require(config: dict, key: str):
    if key not in config:
        raise InvalidInputError(f"config is missing required key {key!r}")
    return config[key]


def _cmd_norm(args, config: dict) -> int:
    p = float(config.get("p", 2.0))
    solver = _solver_from(config, args.seed)
    tensor = Tensor.from_json_dict(_require(config, "tensor"))
    method = config.get("method", "auto")
    if method == "auto":
        value, used = best_available_norm(tensor, p, solver)
        witnesses = None
    elif method == "alternating":
        est = injective_norm(tensor, p, solver)
        value, used, witnesses = est.value, est.method, est
    elif method == "symmetric":
        est = symmetric_injective_norm(tensor, p, solver)
        value, used, witnesses = est.value, est.method, est
    elif method == "l1_exact":
        value, used, witnesses = l1_injective_exact(tensor), "l1_exact", None
    elif method == "spectral_exact":
        value, used, witnesses = spectral_exact(tensor), "spectral_exact", None
    else:
        raise InvalidInputError(f"unknown norm method {method!r}")
    print(repr(float(value)))
    if args.output:
        payload = {"p": p, "value": value, "method": used}
        if witnesses is not None:
            payload["estimate"] = witnesses.to_json_dict()
        _emit_json(payload, args)
    return EXIT_OK


def _series_from_config(config: dict) -> TensorSeries:
    if "series" in config:
        return TensorSeries.from_json_list(config["series"])
    if "model" in config:
        model = ModelSpec.from_json_dict(config["model"])
        series = model.series()
        if series is None:
            raise InvalidInputError(f"model kind {model.kind!r} has no explicit series")
        return series
    raise InvalidInputError("config needs either 'series' or 'model'")


def _cmd_variance(args, config: dict) -> int:
    p = float(config.get("p", 2.0))
    solver = _solver_from(config, args.seed)
    series = _series_from_config(config)
    prof = variance_profile(series, p, solver)
    _emit_json(prof.to_json_dict(), args)
    return EXIT_OK


def _cmd_bound(args, config: dict) -> int:
    name = args.name or config.get("name")
    if not name:
        raise InvalidInputError("bound needs --name or a 'name' config key")
    c = float(config.get("C", 1.0))
    solver = _solver_from(config, args.seed)
    p = float(config.get("p", 2.0))

    if name in ("master", "sharpest", "type2", "trivial"):
        if "profile" in config:
            prof = VarianceProfile.from_json_dict(config["profile"])
        else:
            prof = variance_profile(_series_from_config(config), p, solver)
        d = int(config.get("d", 0)) or _series_dim(config, prof)
        r = prof.order
        if name == "master":
            report = master_bound(prof, d, r, p, c)
        elif name == "sharpest":
            report = sharpest_bound(prof, d, r, p, c)
        elif name == "type2":
            report = type2_bound(prof, d, r, p, c)
        else:
            report = trivial_bound(prof, d, c)
    elif name == "indep_entry":
        tensor = Tensor.from_json_dict(_require(config, "variances"))
        report = indep_entry_bound(tensor, p, c, solver)
    elif name == "hypergraph":
        h = Hypergraph.from_json_dict(_require(config, "hypergraph"))
        report = hypergraph_bound(delta_vector(h), h.d, h.r, c)
    elif name == "lambda_threshold":
        h = Hypergraph.from_json_dict(_require(config, "hypergraph"))
        report = lambda_threshold(h, c, solver)
    elif name == "matching":
        if "family" in config:
            family = MatchingFamily.from_json_dict(config["family"])
            _, mu, delta = matching_series(family)
            d = family.d
        else:
            mu, delta, d = _require(config, "mu"), _require(config, "delta"), int(_require(config, "d"))
        report = matching_bound(mu, delta, d, p, c)
    elif name == "nck_holder":
        if "delta" in config:
            report = nck_holder_bound(int(_require(config, "d")), p, c, delta=config["delta"])
        else:
            series = _series_from_config(config)
            report = nck_holder_bound(series.dim, p, c, series=series, cfg=solver)
    else:
        raise InvalidInputError(f"unknown bound name {name!r}")
    print(repr(float(report.value)))
    if args.output:
        _emit_json(report.to_json_dict(), args)
    return EXIT_OK


def _series_dim(config: dict, prof: VarianceProfile) -> int:
    try:
        return _series_from_config(config).dim
    except InvalidInputError:
        raise InvalidInputError("bound needs 'd' when only a profile is given") from None


def _experiment_config(config: dict, args) -> ExperimentConfig:
    model = ModelSpec.from_json_dict(_require(config, "model")) if "model" in config else None
    seed = args.seed if args.seed is not None else int(config.get("master_seed", 0))
    return ExperimentConfig(
        model=model,
        p=float(config.get("p", 2.0)),
        trials=int(config.get("trials", 1)),
        master_seed=seed,
        solver=SolverConfig.from_json_dict(config.get("solver", {})),
        sweep=tuple(config["sweep"]) if "sweep" in config else None,
        epsilon_grid=tuple(config["epsilon_grid"]) if "epsilon_grid" in config else None,
        candidate_budget=int(config.get("candidate_budget", 512)),
    )


def _cmd_mc(args, config: dict) -> int:
    cfg = _experiment_config(config, args)
    _emit_result(mc_expected_norm(cfg, threads=args.threads), args)
    return EXIT_OK


def _cmd_sweep(args, config: dict) -> int:
    cfg = _experiment_config(config, args)
    bounds = tuple(config["bounds"]) if "bounds" in config else None
    result = bound_ratio_sweep(
        cfg, bounds=bounds, ratio_cap=float(config.get("ratio_cap", 100.0)), threads=args.threads
    )
    _emit_result(result, args)
    return EXIT_OK if result.summary["within_cap"] else EXIT_CHECK_FAILED


def _cmd_pca_detect(args, config: dict) -> int:
    cfg = _experiment_config(config, args)
    h = Hypergraph.from_json_dict(_require(config, "hypergraph"))
    v = _require(config, "v")
    grid = _require(config, "lambda_grid")
    _emit_result(pca_detection(h, v, grid, cfg, threads=args.threads), args)
    return EXIT_OK


def _cmd_covering_probe(args, config: dict) -> int:
    cfg = _experiment_config(config, args)
    series = _series_from_config(config)
    if cfg.epsilon_grid is None:
        raise InvalidInputError("covering probe needs an epsilon_grid")
    result = covering_probe(
        series, cfg.p, cfg.epsilon_grid, cfg.candidate_budget, cfg.master_seed
    )
    _emit_result(result, args)
    return EXIT_OK


def _cmd_checks(args, config: dict) -> int:
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    solver = SolverConfig.from_json_dict(config.get("solver", {}))
    geo = config.get("geometry", {})
    ident = config.get("identity", {})
    rows = []
    all_ok = True
    if geo.get("enabled", True):
        result = geometry_checks(
            d_list=tuple(geo.get("d_list", (8,))),
            p_list=tuple(geo.get("p_list", (2.0, 4.0))),
            r=int(geo.get("r", 2)),
            trials=int(geo.get("trials", 20000)),
            seed=seed,
        )
        rows.extend(result.rows)
        all_ok = all_ok and result.summary["all_passed"]
    if ident.get("enabled", True):
        result = identity_checks(
            trials=int(ident.get("trials", 2)),
            seed=seed,
            solver=solver,
            p_list=tuple(ident.get("p_list", (2.0, 3.0, 4.0))),
        )
        rows.extend(result.rows)
        all_ok = all_ok and result.summary["all_passed"]
    from .experiments import ExperimentResult

    combined = ExperimentResult(
        kind="checks",
        columns=("name", "passed", "margin", "detail"),
        rows=tuple(rows),
        summary={
            "all_passed": bool(all_ok),
            "failures": [r[0] for r in rows if not r[1]],
        },
    )
    _emit_result(combined, args)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


_COMMANDS = {
    "norm": _cmd_norm,
    "variance": _cmd_variance,
    "bound": _cmd_bound,
    "mc": _cmd_mc,
    "sweep": _cmd_sweep,
    "pca-detect": _cmd_pca_detect,
    "covering-probe": _cmd_covering_probe,
    "checks": _cmd_checks,
}


def _default_threads() -> int:
    env = os.environ.get("TENSORCONC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorconc",
        description="Injective lp-norm estimators, variance parameters, and "
        "concentration-bound experiments for random tensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path, or - for stdin")
        p.add_argument("--output", help="CSV output path (JSON summary written alongside)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            metavar="KEY=VALUE",
            help="dotted-path config override, e.g. solver.restarts=32",
        )
        p.add_argument(
            "--threads",
            type=int,
            default=_default_threads(),
            help="worker threads (TENSORCONC_THREADS env var as fallback); "
            "output is independent of this",
        )
        p.add_argument(
            "--figures",
            action="store_true",
            help="render a matplotlib figure next to the CSV output",
        )
        if name == "bound":
            p.add_argument("--name", help="bound name (overrides the config key)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _apply_overrides(_load_config(args.config), args.overrides)
        return _COMMANDS[args.command](args, config)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
