"""Brownian rescaling of walks and two local-time estimators.

A walk with steps of unit size becomes an approximate Brownian path under
the classical invariance-principle rescaling: time shrinks by ``1/n`` and
space by ``n**-0.5``, giving a piecewise-linear path with knot spacing
``1/n`` and knot increments ``n**-0.5``.

Local time at a level ``y`` up to time ``t`` is estimated two independent
ways:

* band estimator -- ``(2*eps)**-1`` times the exact Lebesgue measure of
  ``{u <= t : |path(u) - y| < eps}``, computed by clipping each linear
  segment against the band in closed form (no quadrature anywhere);
* occupation estimator -- the rescaled visit count
  ``n**-0.5 * L(j, ceil(n*t))`` at the lattice site ``j`` nearest to
  ``y * sqrt(n)`` (ties snapped toward zero).

Both converge to the same limit; their agreement is one of the checks the
statistical suite runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .walk import WalkPath

__all__ = [
    "ScaledPath",
    "LocalTimeProfile",
    "default_band_width",
    "donsker_rescale",
    "band_local_time",
    "occupation_local_time",
    "local_time_profile",
]


def default_band_width(n: int) -> float:
    """Default band half-width ``n**-0.25``.

    The band must shrink more slowly than the path's spatial resolution
    ``n**-0.5``; the quarter-power balances band bias against the walk's
    approximation error.
    """
    return float(n) ** -0.25


@dataclass(frozen=True)
class ScaledPath:
    """Piecewise-linear path with knots ``(k/n, positions[k]/sqrt(n))``.

    ``positions`` keeps the source lattice sites so the occupation
    estimator can be evaluated from the same object.
    """

    n: int
    values: np.ndarray
    positions: np.ndarray | None = None

    @property
    def n_segments(self) -> int:
        return len(self.values) - 1

    @property
    def horizon(self) -> float:
        return self.n_segments / self.n

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) / self.n

    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.values.tolist()))

    def __call__(self, u):
        """Evaluate by linear interpolation between knots."""
        return np.interp(u, self.times, self.values)


@dataclass(frozen=True)
class LocalTimeProfile:
    """Estimated local time per level at a fixed time ``t``."""

    t: float
    levels: np.ndarray
    values: np.ndarray
    estimator_tag: str
    eps: float | None = None
    n: int | None = None


def donsker_rescale(path: WalkPath, n: int) -> ScaledPath:
    """Rescale a walk by ``1/n`` in time and ``n**-0.5`` in space."""
    if n < 1:
        raise ValueError(f"scale parameter n must be >= 1, got {n}")
    if path.n_steps < 1:
        raise ValueError("path must have at least one step")
    values = path.positions / np.sqrt(float(n))
    return ScaledPath(n=n, values=values, positions=path.positions)


def _check_time(t: float, horizon: float) -> None:
    if not 0.0 <= t <= horizon * (1 + 1e-12):
        raise ValueError(f"t must be in [0, {horizon}], got {t}")


def _active_segments(t: float, n: int, n_segments: int) -> int:
    """Number of segments intersecting [0, t] (robust to t = k/n round-off)."""
    return min(n_segments, int(np.ceil(t * n - 1e-9)))


def band_local_time(path: ScaledPath, y: float, t: float, eps: float) -> float:
    """Exact band-occupation estimate of the local time at level ``y``.

    Each linear segment is clipped against the band ``(y-eps, y+eps)`` in
    closed form, so the result carries no quadrature error.
    """
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    _check_time(t, path.horizon)
    k = _active_segments(t, path.n, path.n_segments)
    if k == 0:
        return 0.0
    x0 = path.values[:k]
    x1 = path.values[1 : k + 1]
    # Fraction of each segment that lies before t (1 except for the last).
    s_max = np.minimum(1.0, t * path.n - np.arange(k))
    lo, hi = y - eps, y + eps
    d = x1 - x0
    flat = d == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        sa = (lo - x0) / d
        sb = (hi - x0) / d
    s1 = np.minimum(sa, sb)
    s2 = np.maximum(sa, sb)
    if flat.any():
        inside = (x0 > lo) & (x0 < hi)
        s1 = np.where(flat, np.where(inside, 0.0, np.inf), s1)
        s2 = np.where(flat, np.where(inside, 1.0, np.inf), s2)
    s1 = np.clip(s1, 0.0, s_max)
    s2 = np.clip(s2, 0.0, s_max)
    measure = float(np.maximum(s2 - s1, 0.0).sum()) / path.n
    return measure / (2.0 * eps)


def snap_level(y: float, n: int) -> int:
    """Lattice site nearest to ``y * sqrt(n)``, ties toward zero."""
    z = y * np.sqrt(float(n))
    return int(np.sign(z) * np.ceil(abs(z) - 0.5))


def occupation_local_time(path: WalkPath, n: int, y: float, t: float) -> float:
    """Rescaled visit count ``n**-0.5 * L(site nearest y*sqrt(n), ceil(n*t))``."""
    if n < 1:
        raise ValueError(f"scale parameter n must be >= 1, got {n}")
    _check_time(t, path.n_steps / n)
    m = min(path.n_steps, max(0, int(np.ceil(t * n - 1e-9))))
    site = snap_level(y, n)
    window = path.positions[: m + 1]
    return int(np.count_nonzero(window == site)) / np.sqrt(float(n))


def _band_profile(
    path: ScaledPath, t: float, levels: np.ndarray, eps: float
) -> np.ndarray:
    """Band-estimator profile over a level grid via a slope-event sweep.

    Each segment contributes a trapezoid in the level variable (overlap of
    the sliding band with the segment's value interval), i.e. a piecewise
    linear function with four slope events.  All events are sorted once and
    the piecewise-linear total is evaluated at the grid levels, which costs
    O((k + m) log(k + m)) for k segments and m levels instead of O(k * m).
    """
    k = _active_segments(t, path.n, path.n_segments)
    if k == 0:
        return np.zeros(len(levels))
    x0 = path.values[:k].copy()
    x1 = path.values[1 : k + 1].copy()
    durations = np.full(k, 1.0 / path.n)
    last_end = k / path.n
    if last_end > t:
        theta = t * path.n - (k - 1)
        x1[-1] = x0[-1] + (x1[-1] - x0[-1]) * theta
        durations[-1] = t - (k - 1) / path.n
    if np.any(x0 == x1):
        # Flat segments contribute step functions, not trapezoids; fall back
        # to direct per-level clipping (cannot occur for walk-built paths).
        return np.array([band_local_time(path, y, t, eps) for y in levels])
    m_lo = np.minimum(x0, x1)
    m_hi = np.maximum(x0, x1)
    weight = durations / (m_hi - m_lo)
    pos = np.concatenate(
        [
            m_lo - eps,
            np.minimum(m_lo + eps, m_hi - eps),
            np.maximum(m_lo + eps, m_hi - eps),
            m_hi + eps,
        ]
    )
    slope = np.concatenate([weight, -weight, -weight, weight])
    order = np.argsort(pos, kind="stable")
    pos = pos[order]
    slope = slope[order]
    cum_slope = np.cumsum(slope)
    gaps = np.diff(pos)
    knot_values = np.concatenate([[0.0], np.cumsum(cum_slope[:-1] * gaps)])
    idx = np.searchsorted(pos, levels, side="right") - 1
    values = np.zeros(len(levels))
    hit = (idx >= 0) & (levels >= m_lo.min() - eps) & (levels <= m_hi.max() + eps)
    values[hit] = knot_values[idx[hit]] + cum_slope[idx[hit]] * (
        levels[hit] - pos[idx[hit]]
    )
    return np.maximum(values, 0.0) / (2.0 * eps)


def _occupation_profile(
    positions: np.ndarray, n: int, t: float, levels: np.ndarray
) -> np.ndarray:
    m = min(len(positions) - 1, max(0, int(np.ceil(t * n - 1e-9))))
    window = positions[: m + 1]
    lo = int(window.min())
    counts = np.bincount(window - lo)
    z = levels * np.sqrt(float(n))
    sites = (np.sign(z) * np.ceil(np.abs(z) - 0.5)).astype(np.int64)
    idx = sites - lo
    valid = (idx >= 0) & (idx < len(counts))
    values = np.zeros(len(levels))
    values[valid] = counts[idx[valid]] / np.sqrt(float(n))
    return values


def local_time_profile(
    path: ScaledPath | WalkPath,
    t: float,
    levels,
    eps: float | None = None,
    estimator: str = "band",
    n: int | None = None,
) -> LocalTimeProfile:
    """Local-time profile over a strictly increasing level grid."""
    levels = np.asarray(levels, dtype=float)
    if levels.size == 0:
        raise ValueError("level grid must be non-empty")
    if levels.size > 1 and not np.all(np.diff(levels) > 0):
        raise ValueError("level grid must be strictly increasing")
    if estimator == "band":
        if isinstance(path, WalkPath):
            if n is None:
                raise ValueError("band estimator on a WalkPath requires n")
            path = donsker_rescale(path, n)
        eps = default_band_width(path.n) if eps is None else eps
        if eps <= 0:
            raise ValueError(f"eps must be > 0, got {eps}")
        _check_time(t, path.horizon)
        values = _band_profile(path, t, levels, eps)
        return LocalTimeProfile(
            t=t, levels=levels, values=values, estimator_tag="band", eps=eps, n=path.n
        )
    if estimator == "occupation":
        if isinstance(path, ScaledPath):
            if path.positions is None:
                raise ValueError("ScaledPath lacks source positions")
            positions, scale = path.positions, path.n
        else:
            if n is None:
                raise ValueError("occupation estimator on a WalkPath requires n")
            positions, scale = path.positions, n
        _check_time(t, (len(positions) - 1) / scale)
        values = _occupation_profile(positions, scale, t, levels)
        return LocalTimeProfile(
            t=t, levels=levels, values=values, estimator_tag="occupation", eps=None, n=scale
        )
    raise ValueError(f"unknown estimator {estimator!r}")
