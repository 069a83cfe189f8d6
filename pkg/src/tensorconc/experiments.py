"""Monte Carlo harness: expectation estimation, bound-ratio sweeps, PCA
detection, covering probes, and the probabilistic-geometry checks.

Every trial derives its own seed from the master seed via ``mix``, and all
reductions are order-independent, so results are bit-identical at any
worker count. CSV rows (with fixed per-experiment headers) are the data
product; a JSON summary mirrors them.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bounds import (
    hypergraph_bound,
    lambda_threshold,
    master_bound,
    sharpest_bound,
    trivial_bound,
    type2_bound,
)
from .errors import InvalidInputError
from .lp import as_p, convexity_gap, lp_norm, sample_ball_batch
from .models import Hypergraph, ModelSpec, delta_vector, iid_star_sum, iid_symmetric
from .norms import (
    SolverConfig,
    best_available_norm,
    grid_oracle,
    injective_norm,
    spectral_exact,
    symmetric_injective_norm,
)
from .seeds import generator, mix
from .tensor import (
    Tensor,
    TensorSeries,
    apply_form,
    frobenius,
    inner,
    sym_embed,
    symmetrize,
)
from .variance import (
    TAG_EXACT,
    VarianceProfile,
    process_features,
    sigma_frobenius_upper,
    sigma_q_direct,
    sigma_q_sup,
    variance_profile,
)

TAG_UPPER = "exact-upper-bound"


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs shared by the experiment drivers."""

    model: ModelSpec | None = None
    p: float = 2.0
    trials: int = 1
    master_seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: tuple | None = None
    epsilon_grid: tuple | None = None
    candidate_budget: int = 512

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidInputError("trials must be >= 1")
        if self.epsilon_grid is not None and any(e <= 0 for e in self.epsilon_grid):
            raise InvalidInputError("epsilon grid values must be positive")
        if self.candidate_budget < 1:
            raise InvalidInputError("candidate_budget must be >= 1")


@dataclass(frozen=True)
class ExperimentResult:
    """Tabular experiment output: fixed columns, rows, and a summary."""

    kind: str
    columns: tuple
    rows: tuple
    summary: dict

    def to_csv(self) -> str:
        def fmt(x) -> str:
            if isinstance(x, bool):
                return "true" if x else "false"
            if isinstance(x, float):
                return repr(x)
            return str(x)

        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(fmt(x) for x in row))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "summary": self.summary,
        }

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _mean_stderr(values) -> tuple:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean()) if arr.size else 0.0
    if arr.size < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


def _run_indexed(n: int, fn, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _trial_solver(cfg: ExperimentConfig, *indices: int) -> SolverConfig:
    return replace(cfg.solver, seed=mix(cfg.master_seed, *indices, 1))


def mc_expected_norm(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Mean and stderr of the injective norm over independent model draws."""
    if cfg.model is None:
        raise InvalidInputError("mc_expected_norm needs a model")
    pv = as_p(cfg.p)

    def one(t: int):
        seed = mix(cfg.master_seed, t)
        tensor = cfg.model.sample(generator(seed))
        value, _ = best_available_norm(tensor, pv, _trial_solver(cfg, t))
        return (t, seed, value)

    rows = _run_indexed(cfg.trials, one, threads)
    mean, se = _mean_stderr([r[2] for r in rows])
    return ExperimentResult(
        kind="mc_expected_norm",
        columns=("trial", "seed", "value"),
        rows=tuple(rows),
        summary={"mean": mean, "stderr": se, "trials": cfg.trials, "p": pv},
    )


def _iid_profile(d: int, r: int, p: float, solver: SolverConfig) -> VarianceProfile:
    """Variance profile for the i.i.d. symmetric model without building the
    orbit series: the star-sums have the exact closed form d^q * (multiset
    equality pattern), and sigma_0 uses the analytic upper bound
    sqrt(r!) d^{r/2 - r/p}."""
    sigma = [0.0] * (r + 1)
    tags = [TAG_UPPER] * (r + 1)
    sigma[0] = math.sqrt(math.factorial(r)) * d ** (r / 2.0 - r / p)
    sigma[r] = d ** (r / 2.0)
    tags[r] = TAG_EXACT
    for q in range(1, r):
        m = iid_star_sum(d, r, q)
        value, method = best_available_norm(m, p, solver)
        sigma[q] = math.sqrt(max(value, 0.0))
        tags[q] = TAG_EXACT if method in ("l1_exact", "spectral_exact") else "estimated-lower-bound"
    return VarianceProfile(p=p, sigma=tuple(sigma), sigma_type2=float("nan"), method_tags=tuple(tags))


def _profile_for_model(model: ModelSpec, d: int, p: float, solver: SolverConfig):
    """(profile, applicable bound names) for a sweep point."""
    if model.kind == "iid_symmetric":
        return _iid_profile(d, model.r, p, solver), ("trivial", "master")
    series = model.series()
    if series is None:
        raise InvalidInputError(f"bound sweep does not support model kind {model.kind!r}")
    prof = variance_profile(series, p, solver)
    return prof, ("master", "sharpest", "type2", "trivial")


def bound_ratio_sweep(
    cfg: ExperimentConfig,
    bounds: tuple | None = None,
    ratio_cap: float = 100.0,
    threads: int = 1,
) -> ExperimentResult:
    """Measured mean norms against every applicable bound across a d-sweep.

    Reports measured/bound ratios at C = 1 and the log-log slope of the mean
    against d; the summary flags whether all ratios stay below ``ratio_cap``.
    """
    if cfg.model is None or not cfg.sweep:
        raise InvalidInputError("bound_ratio_sweep needs a model and a nonempty sweep")
    pv = as_p(cfg.p)
    rows = []
    means = []
    for d in cfg.sweep:
        model_d = cfg.model.with_dim(d) if d != cfg.model.dim else cfg.model
        r = model_d.order

        def one(t: int, _model=model_d, _d=d):
            seed = mix(cfg.master_seed, _d, t)
            tensor = _model.sample(generator(seed))
            value, _ = best_available_norm(
                tensor, pv, replace(cfg.solver, seed=mix(cfg.master_seed, _d, t, 1))
            )
            return value

        values = _run_indexed(cfg.trials, one, threads)
        mean, se = _mean_stderr(values)
        means.append(mean)
        prof, applicable = _profile_for_model(model_d, d, pv, cfg.solver)
        names = bounds if bounds is not None else applicable
        for name in names:
            if name == "master":
                rep = master_bound(prof, d, r, pv, 1.0)
            elif name == "sharpest":
                rep = sharpest_bound(prof, d, r, pv, 1.0)
            elif name == "type2":
                rep = type2_bound(prof, d, r, pv, 1.0)
            elif name == "trivial":
                rep = trivial_bound(prof, d, 1.0)
            else:
                raise InvalidInputError(f"unknown sweep bound {name!r}")
            ratio = mean / rep.value if rep.value > 0 else math.inf
            rows.append((d, mean, se, name, rep.value, ratio))
    slope = float("nan")
    if len(cfg.sweep) >= 2:
        logs_d = np.log(np.asarray(cfg.sweep, dtype=np.float64))
        logs_m = np.log(np.maximum(np.asarray(means), 1e-300))
        slope = float(np.polyfit(logs_d, logs_m, 1)[0])
    ratios = [row[5] for row in rows]
    return ExperimentResult(
        kind="bound_ratio_sweep",
        columns=("d", "mean", "stderr", "bound_name", "bound_value", "ratio"),
        rows=tuple(rows),
        summary={
            "p": pv,
            "trials": cfg.trials,
            "loglog_slope": slope,
            "max_ratio": max(ratios) if ratios else float("nan"),
            "ratio_cap": ratio_cap,
            "within_cap": bool(ratios and max(ratios) <= ratio_cap),
        },
    )


def pca_detection(
    h: Hypergraph,
    v,
    lam_grid,
    cfg: ExperimentConfig,
    threads: int = 1,
) -> ExperimentResult:
    """Norm distributions of censored observations across a signal grid.

    The grid must include 0 (the null); noise draws share seeds across the
    grid so the lambda = 0 distribution coincides with the null by
    construction. The summary reports the separation margin per lambda, the
    empirical threshold, and the calibrated constant against the analytic
    threshold.
    """
    lams = [float(x) for x in lam_grid]
    if 0.0 not in lams:
        lams = [0.0] + lams
    lams = sorted(set(lams))
    signal = np.asarray(v, dtype=np.float64)
    rows = []
    values: dict = {}

    def one(args):
        lam, t = args
        seed = mix(cfg.master_seed, t)
        y = ModelSpec(
            kind="censored_pca", hypergraph=h, signal=tuple(signal), lam=lam
        ).sample(generator(seed))
        value, _ = best_available_norm(y, 2.0, _trial_solver(cfg, t))
        return (lam, t, seed, value)

    tasks = [(lam, t) for lam in lams for t in range(cfg.trials)]
    results = _run_indexed(len(tasks), lambda i: one(tasks[i]), threads)
    for lam, t, seed, value in results:
        rows.append((lam, t, seed, value))
        values.setdefault(lam, []).append(value)

    null_max = max(values[0.0])
    margins = {lam: min(vals) - null_max for lam, vals in values.items() if lam > 0}
    lambda_hat = min((lam for lam, m in margins.items() if m > 0), default=float("nan"))
    hb = hypergraph_bound(delta_vector(h), h.d, h.r, 1.0)
    lam_a = lambda_threshold(h, 1.0, cfg.solver)
    return ExperimentResult(
        kind="pca_detection",
        columns=("lam", "trial", "seed", "value"),
        rows=tuple(rows),
        summary={
            "trials": cfg.trials,
            "null_max": null_max,
            "margins": {repr(lam): m for lam, m in sorted(margins.items())},
            "lambda_hat": lambda_hat,
            "lambda_threshold_C1": lam_a.value,
            "fitted_C": null_max / hb.value,
        },
    )


def _volumetric_bound(series: TensorSeries, p: float, s: float) -> float:
    """Volumetric covering-number curve at covering scale s.

    Inverts s = max_q d^{-q/p} t^q sigma_q (Frobenius upper surrogates,
    unit order constant) for t, then evaluates 4 exp((p-1) d / (2 t^2))."""
    r, d = series.order, series.dim
    sig = [sigma_frobenius_upper(series, q, p) for q in range(r + 1)]

    def scale_of(t: float) -> float:
        return max(d ** (-q / p) * t**q * sig[q] for q in range(1, r + 1))

    lo, hi = 1e-12, 1e12
    if scale_of(hi) < s:
        return 1.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if scale_of(mid) < s:
            lo = mid
        else:
            hi = mid
    t = math.sqrt(lo * hi)
    exponent = (p - 1.0) * d / (2.0 * t * t)
    return 4.0 * math.exp(min(exponent, 690.0))


def _slepian_bound(series: TensorSeries, p: float, s: float) -> float:
    """Covering-number curve sqrt(log N) <= sqrt(d log(3 r sigma0 / s)),
    with the exact Frobenius upper surrogate standing in for sigma0."""
    r, d = series.order, series.dim
    sigma0 = sigma_frobenius_upper(series, 0, p)
    if s >= r * sigma0:
        return 1.0
    return math.exp(min(d * math.log(3.0 * r * sigma0 / s), 690.0))


def covering_probe(
    series: TensorSeries,
    p,
    epsilon_grid,
    candidate_budget: int,
    seed: int,
) -> ExperimentResult:
    """Greedy farthest-point packing of the lp ball under the natural distance.

    Candidates are uniform ball samples; farthest-point selection from the
    origin yields nested packings, so the packing count per epsilon is
    nonincreasing by construction. The count is an empirical lower bound on
    the covering number at scale epsilon/2, and both covering-bound curves
    are reported at that matched scale.
    """
    pv = as_p(p)
    r, d = series.order, series.dim
    eps_list = sorted(float(e) for e in epsilon_grid)
    if any(e <= 0 for e in eps_list):
        raise InvalidInputError("epsilon grid values must be positive")
    rng = generator(mix(seed, 0))
    candidates = sample_ball_batch(d, pv, candidate_budget, rng)
    feats = process_features(series, candidates)
    center = np.zeros((1, feats.shape[1]))
    dist = np.linalg.norm(feats - center, axis=1)

    radii = []
    remaining = candidate_budget
    while remaining > 0:
        i = int(np.argmax(dist))
        radius = float(dist[i])
        if radius <= 0.0:
            break
        radii.append(radius)
        dist = np.minimum(dist, np.linalg.norm(feats - feats[i], axis=1))
        remaining -= 1

    fro2 = sum(inner(t, t) for t in series)
    diameter_cap = 2.0 * r * math.sqrt(fro2)
    rows = []
    counts = []
    within_slepian = True
    for eps in eps_list:
        count = 1 + sum(1 for x in radii if x > eps)
        counts.append(count)
        slep = _slepian_bound(series, pv, eps / 2.0)
        vol = _volumetric_bound(series, pv, eps / 2.0)
        if count > slep:
            within_slepian = False
        rows.append((eps, count, slep, vol))
    nonincreasing = all(a >= b for a, b in zip(counts, counts[1:]))
    unit_at_diameter = all(
        c == 1 for eps, c in zip(eps_list, counts) if eps >= diameter_cap
    )
    return ExperimentResult(
        kind="covering_probe",
        columns=("eps", "packing_count", "slepian_bound", "volumetric_bound"),
        rows=tuple(rows),
        summary={
            "p": pv,
            "candidate_budget": candidate_budget,
            "max_radius": max(radii) if radii else 0.0,
            "diameter_cap": diameter_cap,
            "nonincreasing": nonincreasing,
            "within_slepian": within_slepian,
            "unit_at_diameter": unit_at_diameter,
        },
    )


def _diagonal_free_symmetric(d: int, r: int, rng) -> Tensor:
    t = iid_symmetric(d, r, rng)
    arr = t.array.copy()
    idx = np.arange(d)
    for s in range(r):
        for u in range(s + 1, r):
            shape_s = [1] * r
            shape_s[s] = d
            shape_u = [1] * r
            shape_u[u] = d
            arr[np.broadcast_to(idx.reshape(shape_s) == idx.reshape(shape_u), arr.shape)] = 0.0
    return Tensor(order=r, dim=d, array=arr)


def _form_squares(t: Tensor, points: np.ndarray) -> np.ndarray:
    """<T, x^{x r}>^2 per row of ``points``."""
    vals = np.empty(points.shape[0])
    for i, x in enumerate(points):
        vals[i] = apply_form(t, [x] * t.order)
    return vals**2


def geometry_checks(
    d_list,
    p_list,
    r: int,
    trials: int,
    seed: int,
    t_values=(0.5, 1.0, 2.0),
) -> ExperimentResult:
    """The five ball-geometry checks, one named pass/fail row each.

    (i) ball coordinate-product moment; (ii) second moment of a
    diagonal-free symmetric form at a random ball point; (iii) expected
    natural distance after a ball perturbation; (iv) half-ball probability;
    (v) two-uniform convexity gap. Sample sizes derive from ``trials``
    (checks ii/iii/iv/v cap at 10^4/10^3/10^4/10^4).
    """
    rows = []
    slack = math.factorial(r) * r**r

    for d, p in itertools.product(d_list, p_list):
        pv = as_p(p)
        rng = generator(mix(seed, d, int(pv * 1000), 1))
        samples = sample_ball_batch(d, pv, trials, rng)
        prod = np.prod(samples[:, :r] ** 2, axis=1)
        mean, se = _mean_stderr(prod)
        bound = d ** (-2.0 * r / pv)
        rows.append(
            (
                f"ball_moment[d={d},r={r},p={pv:g}]",
                bool(mean <= bound + 3 * se),
                bound + 3 * se - mean,
                f"mean={mean:.3e} bound={bound:.3e} stderr={se:.3e}",
            )
        )

        n2 = min(trials, 10**4)
        rng = generator(mix(seed, d, int(pv * 1000), 2))
        t = _diagonal_free_symmetric(d, r, rng)
        pts = sample_ball_batch(d, pv, n2, rng)
        sq = _form_squares(t, pts)
        mean, se = _mean_stderr(sq)
        bound = slack * d ** (-2.0 * r / pv) * frobenius(t) ** 2
        rows.append(
            (
                f"contraction_moment[d={d},r={r},p={pv:g}]",
                bool(mean <= bound + 3 * se),
                bound + 3 * se - mean,
                f"mean={mean:.3e} bound={bound:.3e}",
            )
        )

        n3 = min(trials, 10**3)
        rng = generator(mix(seed, d, int(pv * 1000), 3))
        series = TensorSeries(
            terms=tuple(_diagonal_free_symmetric(d, r, rng) for _ in range(3))
        )
        sig_upper = [sigma_frobenius_upper(series, q, pv) for q in range(r + 1)]
        x = sample_ball_batch(d, pv, 1, rng)[0]
        for t_step in t_values:
            pts = x[None, :] + t_step * sample_ball_batch(d, pv, n3, rng)
            dists = np.sqrt(
                sum(
                    (_form_squares_signed(tk, pts) - apply_form(tk, [x] * r)) ** 2
                    for tk in series
                )
            )
            mean, se = _mean_stderr(dists)
            bound = slack * max(
                d ** (-q / pv) * t_step**q * sig_upper[q] for q in range(1, r + 1)
            )
            rows.append(
                (
                    f"expected_distance[d={d},r={r},p={pv:g},t={t_step:g}]",
                    bool(mean <= bound + 3 * se),
                    bound + 3 * se - mean,
                    f"mean={mean:.3e} bound={bound:.3e}",
                )
            )

    d0 = d_list[0]
    for p, t_step in itertools.product(p_list, t_values):
        pv = as_p(p)
        n4 = min(trials, 10**4)
        rng = generator(mix(seed, int(pv * 1000), int(t_step * 1000), 4))
        x = sample_ball_batch(d0, pv, 1, rng)[0]
        x = x / lp_norm(x, pv)  # worst case sits on the sphere
        balls = sample_ball_batch(d0, pv, n4, rng)
        cap = math.sqrt(t_step**2 + pv - 1.0)
        hits = np.sum(
            np.sum(np.abs(x[None, :] + t_step * balls) ** pv, axis=1) ** (1.0 / pv) <= cap
        )
        phat = hits / n4
        se = math.sqrt(max(phat * (1 - phat), 1e-12) / n4)
        rows.append(
            (
                f"half_ball[d={d0},p={pv:g},t={t_step:g}]",
                bool(phat >= 0.5 - 3 * se),
                phat - (0.5 - 3 * se),
                f"prob={phat:.4f} stderr={se:.1e}",
            )
        )

    for p in p_list:
        pv = as_p(p)
        n5 = min(trials, 10**4)
        rng = generator(mix(seed, int(pv * 1000), 5))
        xs = sample_ball_batch(d0, pv, n5, rng)
        ys = sample_ball_batch(d0, pv, n5, rng)
        gaps = np.array([convexity_gap(x, y, pv) for x, y in zip(xs, ys)])
        min_gap = float(gaps.min())
        rows.append(
            (
                f"convexity_gap[d={d0},p={pv:g}]",
                bool(min_gap >= -1e-12),
                min_gap + 1e-12,
                f"min_gap={min_gap:.3e}",
            )
        )
        if pv == 2.0:
            max_abs = float(np.max(np.abs(gaps)))
            rows.append(
                (
                    f"convexity_gap_parallelogram[d={d0}]",
                    bool(max_abs <= 1e-12),
                    1e-12 - max_abs,
                    f"max_abs_gap={max_abs:.3e}",
                )
            )

    return ExperimentResult(
        kind="geometry_checks",
        columns=("name", "passed", "margin", "detail"),
        rows=tuple(rows),
        summary={"all_passed": bool(all(r[1] for r in rows)), "failures": [r[0] for r in rows if not r[1]]},
    )


def _form_squares_signed(t: Tensor, points: np.ndarray) -> np.ndarray:
    vals = np.empty(points.shape[0])
    for i, x in enumerate(points):
        vals[i] = apply_form(t, [x] * t.order)
    return vals


def identity_checks(
    trials: int,
    seed: int,
    solver: SolverConfig,
    p_list=(2.0, 3.0, 4.0),
) -> ExperimentResult:
    """Exactly-checkable identities on randomized small instances.

    (a) the symmetric-embedding norm factor r!/r^{r/p} (with the r=2, p=2
    dilation case checked at 1e-8); (b) the embedded variance inequality
    sigma_q^emb <= r! sigma_q on oracle-exact cases; (c) the polarization
    sandwich; (d) direct vs sup variance routes, all within 2 percent.
    """
    rows = []
    worst_factor = 0.0
    worst_dilation = 0.0
    worst_sandwich = 0.0
    worst_sigma = 0.0
    sym_var_ok = True

    instance = 0
    for _ in range(trials):
        for r in (2, 3):
            for p in p_list:
                pv = as_p(p)
                instance += 1
                rng = generator(mix(seed, instance))
                d = int(rng.integers(2, 4))
                t = Tensor(order=r, dim=d, array=rng.standard_normal((d,) * r))
                base = injective_norm(t, pv, replace(solver, seed=mix(seed, instance, 1))).value
                if d <= 3 and r <= 3:
                    base = max(base, grid_oracle(t, pv, 120))
                factor = math.factorial(r) / r ** (r / pv)
                emb = sym_embed(t)
                lhs = symmetric_injective_norm(
                    emb, pv, replace(solver, seed=mix(seed, instance, 2))
                ).value
                rel = abs(lhs - factor * base) / max(factor * base, 1e-300)
                worst_factor = max(worst_factor, rel)
                if r == 2 and pv == 2.0:
                    exact_rel = abs(spectral_exact(emb) - base) / max(base, 1e-300)
                    worst_dilation = max(worst_dilation, exact_rel)

                # polarization sandwich on a symmetrized copy
                ts = symmetrize(t)
                sym_val = symmetric_injective_norm(
                    ts, pv, replace(solver, seed=mix(seed, instance, 3))
                ).value
                inj_val = injective_norm(
                    ts, pv, replace(solver, seed=mix(seed, instance, 4))
                ).value
                viol = max(
                    sym_val - inj_val * 1.02,
                    inj_val - (r**r / math.factorial(r)) * sym_val * 1.02,
                )
                worst_sandwich = max(worst_sandwich, viol)

                # variance route comparison on a small symmetric series
                n_terms = int(rng.integers(1, 5))
                series = TensorSeries(
                    terms=tuple(
                        symmetrize(
                            Tensor(order=r, dim=d, array=rng.standard_normal((d,) * r))
                        )
                        for _ in range(n_terms)
                    )
                )
                for q in range(r + 1):
                    direct = sigma_q_direct(series, q, pv, replace(solver, seed=mix(seed, instance, 5)))
                    sup = sigma_q_sup(series, q, pv, replace(solver, seed=mix(seed, instance, 6)))
                    rel = abs(direct - sup) / max(direct, sup, 1e-300)
                    worst_sigma = max(worst_sigma, rel)

                # embedded variance inequality at oracle-exact cases
                emb_series = TensorSeries(terms=tuple(sym_embed(tk) for tk in series))
                lhs_r = sigma_q_direct(emb_series, r, pv, solver)
                rhs_r = sigma_q_direct(series, r, pv, solver)
                if lhs_r > math.factorial(r) * rhs_r * (1 + 1e-10):
                    sym_var_ok = False
                if r == 2 and pv == 2.0:
                    lhs_1 = sigma_q_direct(emb_series, 1, pv, solver)
                    rhs_1 = sigma_q_direct(series, 1, pv, solver)
                    if lhs_1 > math.factorial(r) * rhs_1 * (1 + 1e-8):
                        sym_var_ok = False

    rows.append(
        (
            "symembed_norm_factor",
            bool(worst_factor <= 0.02),
            0.02 - worst_factor,
            f"worst_rel_err={worst_factor:.3e}",
        )
    )
    rows.append(
        (
            "dilation_exact_r2_p2",
            bool(worst_dilation <= 1e-8),
            1e-8 - worst_dilation,
            f"worst_rel_err={worst_dilation:.3e}",
        )
    )
    rows.append(
        (
            "embedded_variance_inequality",
            sym_var_ok,
            0.0 if sym_var_ok else -1.0,
            "sigma_q(embedded) <= r! sigma_q at oracle-exact cases",
        )
    )
    rows.append(
        (
            "polarization_sandwich",
            bool(worst_sandwich <= 0.0),
            -worst_sandwich,
            f"worst_violation={worst_sandwich:.3e}",
        )
    )
    rows.append(
        (
            "sigma_direct_vs_sup",
            bool(worst_sigma <= 0.02),
            0.02 - worst_sigma,
            f"worst_rel_err={worst_sigma:.3e}",
        )
    )
    return ExperimentResult(
        kind="identity_checks",
        columns=("name", "passed", "margin", "detail"),
        rows=tuple(rows),
        summary={"all_passed": bool(all(r[1] for r in rows)), "failures": [r[0] for r in rows if not r[1]]},
    )
