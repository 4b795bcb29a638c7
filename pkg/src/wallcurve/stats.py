"""Statistical verification harness: KS, chi-square GOF, experiments.

Monte-Carlo samples from the simulation modules are tested against the
closed-form laws of :mod:`wallcurve.oracle`, producing a
:class:`TestReport` with a pass/fail verdict at a configured significance
level.  Reports are pure functions of their configuration: every random
draw comes from the (seed, replicate) streams of :func:`wallcurve.walk.stream`
and replicates are merged in index order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Any

import numpy as np
from scipy.special import chdtrc, ndtri

from . import oracle
from .curve import Window, coverage_check, wall_area
from .scaling import default_band_width, donsker_rescale, local_time_profile
from .walk import simulate_walk

__all__ = [
    "TestReport",
    "ExperimentConfig",
    "EXPERIMENTS",
    "ks_two_sample",
    "chi2_gof_2d",
    "run_experiment",
]

EXPERIMENTS = (
    "area",
    "density",
    "identity-reversal",
    "identity-levy",
    "identity-signed",
    "knight",
    "coverage",
)

_EXACT_KS_LIMIT = 10_000
_EXPECTED_FLOOR = 5.0
_EDGE_TRUNCATION = 12.0  # outermost bin edge, in units of sqrt(t)


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov


def _kolmogorov_sf(x: float, terms: int = 100) -> float:
    """Tail of the Kolmogorov distribution, 2*sum (-1)^(j-1) exp(-2 j^2 x^2).

    The alternating series is truncated after ``terms`` terms (it converges
    much sooner for any x of practical size).  Accurate for effective
    sample sizes of 50 or more per sample.
    """
    if x <= 0.01:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, terms + 1):
        term = np.exp(-2.0 * j * j * x * x)
        total += sign * term
        if term <= 1e-18 * abs(total):
            break
        sign = -sign
    return float(min(max(2.0 * total, 0.0), 1.0))


def _ks_exact_pvalue(n1: int, n2: int, d_int: int) -> float:
    """Exact P(D >= d) for the two-sample statistic, d = d_int/(n1*n2).

    Counts monotone lattice paths from (0, 0) to (n1, n2) that keep
    |i*n2 - j*n1| < d_int throughout; under the null (no ties) all
    C(n1+n2, n1) orderings are equally likely.
    """
    if d_int <= 0:
        return 1.0
    f = [0] * (n2 + 1)
    f[0] = 1
    for j in range(1, n2 + 1):
        f[j] = f[j - 1] if j * n1 < d_int else 0
    for i in range(1, n1 + 1):
        g = [0] * (n2 + 1)
        g[0] = f[0] if i * n2 < d_int else 0
        for j in range(1, n2 + 1):
            if abs(i * n2 - j * n1) < d_int:
                g[j] = g[j - 1] + f[j]
        f = g
    inside = Fraction(f[n2], comb(n1 + n2, n1))
    return float(1 - inside)


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and p-value.

    The statistic is the sup-distance between the two empirical CDFs,
    computed on the integer lattice so ties cost nothing.  The p-value is
    exact (lattice-path enumeration) when len(a)*len(b) <= 10**4 and
    otherwise uses the asymptotic Kolmogorov tail at the effective sample
    size n1*n2/(n1+n2).
    """
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    merged = np.concatenate([a, b])
    i = np.searchsorted(a, merged, side="right").astype(np.int64)
    j = np.searchsorted(b, merged, side="right").astype(np.int64)
    d_int = int(np.abs(i * n2 - j * n1).max())
    statistic = d_int / (n1 * n2)
    if n1 * n2 <= _EXACT_KS_LIMIT:
        p_value = _ks_exact_pvalue(n1, n2, d_int)
    else:
        en = n1 * n2 / (n1 + n2)
        p_value = _kolmogorov_sf(np.sqrt(en) * statistic)
    return statistic, p_value


# ---------------------------------------------------------------------------
# Chi-square goodness of fit on a 2-D binning


def quantile_bin_edges(t: float, ny: int = 12, ns: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Marginal-equiprobable bin edges for (position, height) at time t.

    Interior edges sit at the quantiles of the Gaussian position marginal
    and the half-normal height marginal; the outer edges truncate at
    12*sqrt(t), far beyond any representable tail mass.
    """
    root_t = np.sqrt(t)
    qy = np.arange(1, ny) / ny
    y_edges = np.concatenate(
        [[-_EDGE_TRUNCATION * root_t], root_t * ndtri(qy), [_EDGE_TRUNCATION * root_t]]
    )
    qs = np.arange(1, ns) / ns
    s_edges = np.concatenate(
        [[0.0], root_t * ndtri((1.0 + qs) / 2.0), [_EDGE_TRUNCATION * root_t]]
    )
    return y_edges, s_edges


@lru_cache(maxsize=32)
def _bin_probabilities(t: float, ny: int, ns: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cell probabilities by adaptive quadrature of the joint density."""
    from scipy.integrate import dblquad

    y_edges, s_edges = quantile_bin_edges(t, ny, ns)
    probs = np.empty((ny, ns))
    for iy in range(ny):
        for js in range(ns):
            probs[iy, js], _ = dblquad(
                lambda s, y: oracle.joint_density(y, s, t),
                y_edges[iy],
                y_edges[iy + 1],
                s_edges[js],
                s_edges[js + 1],
                epsabs=1e-10,
                epsrel=1e-10,
            )
    return y_edges, s_edges, probs


def _merge_small_bins(
    observed: np.ndarray, probs: np.ndarray, n_samples: int
) -> tuple[np.ndarray, np.ndarray]:
    """Pool cells whose expected count is below the floor of 5.

    Small cells go into one pooled cell; if the pool itself is still below
    the floor, the smallest regular cells join it until it clears.  The
    rule depends only on the model probabilities, so it is deterministic
    and identical across runs with the same configuration.
    """
    obs = observed.ravel().astype(float)
    p = probs.ravel()
    expected = n_samples * p
    small = expected < _EXPECTED_FLOOR
    keep = ~small
    pool_obs = obs[small].sum()
    pool_p = p[small].sum()
    if small.any():
        order = np.argsort(expected, kind="stable")
        for idx in order:
            if n_samples * pool_p >= _EXPECTED_FLOOR:
                break
            if keep[idx]:
                keep[idx] = False
                pool_obs += obs[idx]
                pool_p += p[idx]
    obs_kept = obs[keep]
    p_kept = p[keep]
    if small.any() or pool_p > 0:
        obs_kept = np.append(obs_kept, pool_obs)
        p_kept = np.append(p_kept, pool_p)
    if len(p_kept) < 2 or n_samples * p_kept.min() < _EXPECTED_FLOOR:
        raise ValueError(
            "binning cannot reach the expected-count floor; "
            "need more samples or coarser bins"
        )
    return obs_kept, p_kept


def _histogram_2d(
    samples: np.ndarray, y_edges: np.ndarray, s_edges: np.ndarray
) -> np.ndarray:
    ny, ns = len(y_edges) - 1, len(s_edges) - 1
    iy = np.clip(np.searchsorted(y_edges, samples[:, 0], side="right") - 1, 0, ny - 1)
    js = np.clip(np.searchsorted(s_edges, samples[:, 1], side="right") - 1, 0, ns - 1)
    flat = np.bincount(iy * ns + js, minlength=ny * ns)
    return flat.reshape(ny, ns)


def _pearson(obs: np.ndarray, p: np.ndarray, n_samples: int) -> tuple[float, float, int]:
    expected = n_samples * p
    statistic = float(((obs - expected) ** 2 / expected).sum())
    dof = len(p) - 1
    p_value = float(chdtrc(dof, statistic))
    return statistic, p_value, dof


def chi2_gof_2d(
    samples, model: oracle.DensityModel, bins: tuple[int, int] = (12, 12)
) -> tuple[float, float]:
    """Pearson GOF of (y, s) pairs against the fixed-time joint law.

    Bin probabilities come from adaptive quadrature of the density over a
    marginal-equiprobable grid (cached per (t, bins)); cells below an
    expected count of 5 are pooled before the statistic is formed.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise ValueError("samples must be an (N, 2) array of (y, s) pairs")
    if len(samples) < 500:
        raise ValueError("need at least 500 samples for the 2-D GOF test")
    y_edges, s_edges, probs = _bin_probabilities(model.t, *bins)
    observed = _histogram_2d(samples, y_edges, s_edges)
    obs_kept, p_kept = _merge_small_bins(observed, probs, len(samples))
    statistic, p_value, _ = _pearson(obs_kept, p_kept, len(samples))
    return statistic, p_value


# ---------------------------------------------------------------------------
# Experiment harness


@dataclass(frozen=True)
class TestReport:
    """Outcome of one verification experiment."""

    test_name: str
    statistic: float
    p_value: float | None
    n_samples: int
    seed: int
    verdict: str
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict[str, Any]:
        return {
            "test_name": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "params": self.params,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    """Full configuration of a verification run; defaults are desk scale."""

    experiment: str
    replicates: int = 2000
    n: int = 10_000
    t: float = 1.0
    eps: float | None = None
    seed: int = 0
    alpha: float = 0.001
    c: float = 1.0
    d: float = 1.0
    window: Window = Window(-1.0, 1.0, 0.5)
    delta: float = 0.05
    step_budget: int = 10**8

    def resolved_eps(self) -> float:
        return default_band_width(self.n) if self.eps is None else self.eps


_AREA_RTOL = 1e-9
_AGREEMENT_TOL = 0.05


def _params(config: ExperimentConfig, **extra: Any) -> dict[str, Any]:
    base: dict[str, Any] = {
        "experiment": config.experiment,
        "replicates": config.replicates,
        "n": config.n,
        "t": config.t,
        "eps": config.resolved_eps(),
        "alpha": config.alpha,
    }
    base.update(extra)
    return base


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def _ks_suite(a: np.ndarray, b: np.ndarray) -> dict[str, tuple[float, float]]:
    """KS per coordinate and on |y| + s, the radial combination."""
    return {
        "coord_y": ks_two_sample(a[:, 0], b[:, 0]),
        "coord_s": ks_two_sample(a[:, 1], b[:, 1]),
        "radial": ks_two_sample(
            np.abs(a[:, 0]) + a[:, 1], np.abs(b[:, 0]) + b[:, 1]
        ),
    }


def _run_area(config: ExperimentConfig) -> TestReport:
    n_steps = max(1, int(np.ceil(config.n * config.t)))
    path = simulate_walk(n_steps, config.seed)
    spath = donsker_rescale(path, config.n)
    area = wall_area(spath, config.t, config.resolved_eps(), c=config.c, d=config.d)
    target = abs(config.c) * config.d * config.t
    statistic = abs(area - target)
    tol = _AREA_RTOL * target
    return TestReport(
        test_name="area",
        statistic=statistic,
        p_value=None,
        n_samples=n_steps,
        seed=config.seed,
        verdict=_verdict(statistic <= tol),
        params=_params(config, c=config.c, d=config.d, area=area, tolerance=tol),
    )


def _run_density(config: ExperimentConfig) -> TestReport:
    samples = oracle.sample_identity_pair(
        config.t, config.seed, config.n, "lhs", config.replicates
    )
    model = oracle.DensityModel(config.t)
    statistic, p_value = chi2_gof_2d(samples, model)
    return TestReport(
        test_name="density",
        statistic=statistic,
        p_value=p_value,
        n_samples=config.replicates,
        seed=config.seed,
        verdict=_verdict(p_value > config.alpha),
        params=_params(config, bins=[12, 12]),
    )


_IDENTITY_PAIRS = {
    "identity-reversal": ("lhs", "reversal"),
    "identity-levy": ("reversal", "levy"),
    "identity-signed": ("lhs", "signed"),
}


def _run_identity(config: ExperimentConfig) -> TestReport:
    side_a, side_b = _IDENTITY_PAIRS[config.experiment]
    a = oracle.sample_identity_pair(
        config.t, config.seed, config.n, side_a, config.replicates
    )
    b = oracle.sample_identity_pair(
        config.t, config.seed, config.n, side_b, config.replicates
    )
    if config.experiment == "identity-levy":
        # Levy's identity matches (|position|, height at 0) in law.
        a = np.column_stack([np.abs(a[:, 0]), a[:, 1]])
    results = _ks_suite(a, b)
    p_value = min(p for _, p in results.values())
    statistic = max(d for d, _ in results.values())
    return TestReport(
        test_name=config.experiment,
        statistic=statistic,
        p_value=p_value,
        n_samples=config.replicates,
        seed=config.seed,
        verdict=_verdict(p_value > config.alpha),
        params=_params(
            config,
            sides=[side_a, side_b],
            ks={k: {"statistic": d, "p_value": p} for k, (d, p) in results.items()},
        ),
    )


def estimator_agreement(
    seed: int, n: int, t: float = 1.0, levels: np.ndarray | None = None
) -> float:
    """Max gap between the two local-time estimators over a level grid.

    Levels are snapped to lattice sites and the band spans half a lattice
    spacing, the regime where the band integral resolves individual sites:
    both estimators then target the same site and the gap isolates the
    count-rescaling convention (any exponent other than ``n**-0.5`` blows
    the gap up instead of shrinking it like ``n**-0.5``).  At off-site
    levels or wider bands the gap is dominated by nearest-site
    quantization and by the spatial roughness of local time itself, which
    decays only like the square root of the band width; see the tests.
    """
    if levels is None:
        levels = np.linspace(-np.sqrt(t), np.sqrt(t), 101)
    root_n = np.sqrt(float(n))
    levels = np.unique(np.rint(np.asarray(levels) * root_n)) / root_n
    path = simulate_walk(max(1, int(np.ceil(n * t))), seed)
    eps = 0.5 / root_n
    band = local_time_profile(path, t, levels, eps, "band", n=n)
    occ = local_time_profile(path, t, levels, None, "occupation", n=n)
    return float(np.abs(band.values - occ.values).max())


def _run_knight(config: ExperimentConfig) -> TestReport:
    occ = oracle.sample_identity_pair(
        config.t, config.seed, config.n, "reversal", config.replicates
    )[:, 1]
    half_normal = oracle.sample_identity_pair(
        config.t, config.seed, config.n, "levy", config.replicates
    )[:, 1]
    statistic, p_value = ks_two_sample(occ, half_normal)
    discrepancy = estimator_agreement(config.seed, config.n, config.t)
    ok = p_value > config.alpha and discrepancy < _AGREEMENT_TOL
    return TestReport(
        test_name="knight",
        statistic=statistic,
        p_value=p_value,
        n_samples=config.replicates,
        seed=config.seed,
        verdict=_verdict(ok),
        params=_params(
            config,
            max_estimator_discrepancy=discrepancy,
            agreement_tolerance=_AGREEMENT_TOL,
        ),
    )


def _run_coverage(config: ExperimentConfig) -> TestReport:
    report = coverage_check(
        config.seed, config.window, config.delta, config.step_budget, config.n
    )
    times = report.first_cover_time[~np.isnan(report.first_cover_time)]
    quantiles = (
        {
            "min": float(times.min()),
            "median": float(np.median(times)),
            "max": float(times.max()),
        }
        if times.size
        else {}
    )
    return TestReport(
        test_name="coverage",
        statistic=report.covered_count / report.total_count,
        p_value=None,
        n_samples=report.steps_used,
        seed=config.seed,
        verdict=_verdict(not report.budget_exhausted),
        params=_params(
            config,
            window=[config.window.x_lo, config.window.x_hi, config.window.h_hi],
            delta=config.delta,
            step_budget=config.step_budget,
            covered=report.covered_count,
            total=report.total_count,
            steps_used=report.steps_used,
            first_cover=quantiles,
        ),
    )


def run_experiment(config: ExperimentConfig) -> TestReport:
    """Run one named experiment; the report is a pure function of config."""
    if config.experiment == "area":
        return _run_area(config)
    if config.experiment == "density":
        return _run_density(config)
    if config.experiment in _IDENTITY_PAIRS:
        return _run_identity(config)
    if config.experiment == "knight":
        return _run_knight(config)
    if config.experiment == "coverage":
        return _run_coverage(config)
    raise ValueError(
        f"unknown experiment {config.experiment!r}, expected one of {EXPERIMENTS}"
    )
