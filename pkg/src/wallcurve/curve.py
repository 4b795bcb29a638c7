"""The space-filling curve traced by the walker and its wall.

The curve pairs the walker's rescaled position with the current wall
height at that position: point ``k`` of the trace is
``(k/n, positions[k]/sqrt(n), local_time_estimate)``.  With the occupation
estimator the height is simply the rescaled running visit count at the
current site, which is the discrete wall height itself.  The limit curve
is plane-filling in the upper half-plane and sweeps area at unit rate
(``|c| * d`` after scaling position by ``c`` and height by ``d``), which
:func:`wall_area` verifies exactly and :func:`coverage_check` probes on a
finite window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scaling import ScaledPath, _active_segments, default_band_width, band_local_time, donsker_rescale
from .walk import WalkPath, _running_visit_rank, stream

__all__ = [
    "CurveTrace",
    "Window",
    "CoverageReport",
    "build_trace",
    "scale_trace",
    "wall_area",
    "coverage_check",
    "fill_order_check",
]


@dataclass(frozen=True)
class CurveTrace:
    """Sampled curve points (t, x, h) with strictly increasing t."""

    times: np.ndarray
    levels: np.ndarray
    heights: np.ndarray
    n: int
    estimator_tag: str

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class Window:
    """Axis-aligned target rectangle [x_lo, x_hi] x [0, h_hi]."""

    x_lo: float
    x_hi: float
    h_hi: float


@dataclass(frozen=True)
class CoverageReport:
    """Outcome of driving the curve until it covers a cell grid.

    ``first_cover_time[i, j]`` is the time of the first trace point in
    cell (i, j), NaN while uncovered.  Cells are half-open squares of side
    ``delta`` anchored at (x_lo, 0).
    """

    window: Window
    delta: float
    n: int
    seed: int
    covered_count: int
    total_count: int
    first_cover_time: np.ndarray
    steps_used: int
    budget_exhausted: bool


def build_trace(
    path: WalkPath,
    n: int,
    estimator: str = "occupation",
    eps: float | None = None,
    subsample: int = 129,
) -> CurveTrace:
    """Trace the curve along a walk.

    The occupation estimator emits one point per step (the height is the
    running visit count at the current site, rescaled); the band estimator
    is slower and is evaluated at ``subsample`` evenly strided steps for
    cross-validation.
    """
    if n < 1:
        raise ValueError(f"scale parameter n must be >= 1, got {n}")
    root_n = np.sqrt(float(n))
    if estimator == "occupation":
        times = np.arange(path.n_steps + 1) / n
        levels = path.positions / root_n
        heights = _running_visit_rank(path.positions) / root_n
        return CurveTrace(
            times=times, levels=levels, heights=heights, n=n, estimator_tag="occupation"
        )
    if estimator == "band":
        eps = default_band_width(n) if eps is None else eps
        spath = donsker_rescale(path, n)
        count = min(path.n_steps + 1, max(2, subsample))
        ks = np.unique(np.linspace(0, path.n_steps, count).astype(np.int64))
        times = ks / n
        levels = path.positions[ks] / root_n
        heights = np.array(
            [band_local_time(spath, x, t, eps) for x, t in zip(levels, times)]
        )
        return CurveTrace(
            times=times, levels=levels, heights=heights, n=n, estimator_tag="band"
        )
    raise ValueError(f"unknown estimator {estimator!r}")


def scale_trace(trace: CurveTrace, c: float, d: float) -> CurveTrace:
    """Scale positions by ``c`` and heights by ``d`` (area rate |c|*d)."""
    if c == 0:
        raise ValueError("position factor c must be nonzero")
    if d <= 0:
        raise ValueError(f"height factor d must be > 0, got {d}")
    return CurveTrace(
        times=trace.times,
        levels=c * trace.levels,
        heights=d * trace.heights,
        n=trace.n,
        estimator_tag=trace.estimator_tag,
    )


def wall_area(
    path: ScaledPath, t: float, eps: float | None = None, c: float = 1.0, d: float = 1.0
) -> float:
    """Exact wall area at time ``t`` for the (c, d)-scaled curve.

    The band estimator's profile integrates per segment to exactly the
    segment's duration, independent of ``eps`` (the band indicator always
    integrates to ``2*eps`` over levels).  The closed-form accumulation is
    therefore the sum of segment durations, scaled by ``|c| * d``; only
    floating-point rounding separates the result from ``|c| * d * t``.
    """
    if c == 0:
        raise ValueError("position factor c must be nonzero")
    if d <= 0:
        raise ValueError(f"height factor d must be > 0, got {d}")
    if eps is not None and eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if not 0.0 <= t <= path.horizon * (1 + 1e-12):
        raise ValueError(f"t must be in [0, {path.horizon}], got {t}")
    k = _active_segments(t, path.n, path.n_segments)
    if k == 0:
        return 0.0
    durations = np.full(k, 1.0 / path.n)
    if k / path.n > t:
        durations[-1] = max(t - (k - 1) / path.n, 0.0)
    return abs(c) * d * float(durations.sum())


def fill_order_check(trace: CurveTrace) -> list[tuple[int, int]]:
    """All index pairs (i < j) with equal position but decreasing height.

    Empty for any trace built by :func:`build_trace`: the wall at a fixed
    position only ever grows.
    """
    m = len(trace)
    if m == 0:
        return []
    order = np.lexsort((np.arange(m), trace.levels))
    x_sorted = trace.levels[order]
    violations: list[tuple[int, int]] = []
    start = 0
    for stop in range(1, m + 1):
        if stop == m or x_sorted[stop] != x_sorted[start]:
            group = order[start:stop]
            h = trace.heights[group]
            if np.any(np.diff(h) < 0):
                for a in range(len(group)):
                    for b in range(a + 1, len(group)):
                        if h[a] > h[b]:
                            violations.append((int(group[a]), int(group[b])))
            start = stop
    return violations


_CHUNK_START = 1 << 16
_CHUNK_CAP = 1 << 22


def coverage_check(
    seed: int,
    window: Window,
    delta: float,
    step_budget: int,
    n: int,
) -> CoverageReport:
    """Run the curve until every cell of the window grid is touched.

    Cells are marked by trace points, not interpolated crossings, so the
    scale must satisfy ``n**-0.5`` well below ``delta`` or the bottom row
    of cells cannot be reached (heights move in steps of ``n**-0.5``).

    The walk is extended in geometrically growing chunks, with per-site
    visit counts carried across chunks, so memory stays bounded and a run
    stops as soon as the grid is covered.  Chunk boundaries depend only on
    the round index, never on the budget, so a longer budget replays the
    same trajectory further: covered counts are monotone in the budget.
    """
    if not window.x_lo < window.x_hi:
        raise ValueError("window must satisfy x_lo < x_hi")
    if window.h_hi <= 0:
        raise ValueError("window must extend above h = 0")
    if delta <= 0:
        raise ValueError(f"cell size delta must be > 0, got {delta}")
    if step_budget < 1:
        raise ValueError(f"step budget must be >= 1, got {step_budget}")
    if n < 1:
        raise ValueError(f"scale parameter n must be >= 1, got {n}")

    nx = int(np.ceil((window.x_hi - window.x_lo) / delta))
    nh = int(np.ceil(window.h_hi / delta))
    first_cover = np.full((nx, nh), np.nan)
    root_n = np.sqrt(float(n))

    # Dense per-site counts, re-centred on the walk's running range.
    offset = 1 << 12
    counts = np.zeros(2 * offset, dtype=np.int64)

    def mark(times: np.ndarray, x: np.ndarray, h: np.ndarray) -> None:
        inside = (
            (x >= window.x_lo)
            & (x < window.x_hi)
            & (h >= 0.0)
            & (h < window.h_hi)
        )
        if not inside.any():
            return
        ix = ((x[inside] - window.x_lo) / delta).astype(np.int64)
        ih = (h[inside] / delta).astype(np.int64)
        np.clip(ix, 0, nx - 1, out=ix)
        np.clip(ih, 0, nh - 1, out=ih)
        flat = ix * nh + ih
        uniq, first_idx = np.unique(flat, return_index=True)
        tsel = times[inside][first_idx]
        view = first_cover.reshape(-1)
        new = np.isnan(view[uniq])
        view[uniq[new]] = tsel[new]

    # Initial block at the origin, before any step.
    counts[offset] = 1
    mark(np.array([0.0]), np.array([0.0]), np.array([1.0 / root_n]))

    rng = stream(seed, 0, domain=0)
    steps_used = 0
    last_pos = 0
    chunk = _CHUNK_START
    while steps_used < step_budget and np.isnan(first_cover).any():
        draw = 2 * rng.integers(0, 2, size=chunk, dtype=np.int64) - 1
        use = min(chunk, step_budget - steps_used)
        pos = last_pos + np.cumsum(draw[:use])
        lo, hi = int(pos.min()), int(pos.max())
        while lo + offset < 0 or hi + offset >= len(counts):
            counts = np.concatenate(
                [np.zeros(len(counts), np.int64), counts, np.zeros(len(counts), np.int64)]
            )
            offset += (len(counts) // 3)
        idx = pos + offset
        ranks = _running_visit_rank(idx)
        h = (counts[idx] + ranks) / root_n
        times = (steps_used + 1 + np.arange(use)) / n
        mark(times, pos / root_n, h)
        base = lo + offset
        counts[base : hi + offset + 1] += np.bincount(idx - base, minlength=hi - lo + 1)
        steps_used += use
        last_pos = int(pos[-1])
        chunk = min(chunk * 2, _CHUNK_CAP)

    covered = int(np.count_nonzero(~np.isnan(first_cover)))
    return CoverageReport(
        window=window,
        delta=delta,
        n=n,
        seed=seed,
        covered_count=covered,
        total_count=nx * nh,
        first_cover_time=first_cover,
        steps_used=steps_used,
        budget_exhausted=covered < nx * nh,
    )
