"""Simple random walk on the integers and the block wall it builds.

The walker starts at site 0, drops a block there, and then repeatedly flips
a fair coin, steps one site left or right, and drops a block at the new
site.  After ``n`` steps the wall holds ``n + 1`` blocks and the number of
blocks at site ``j`` is the walk's occupation time of ``j`` through step
``n``.

All randomness flows through :func:`stream`, a counter-based Philox
generator keyed by ``(seed, replicate)``.  Replicates are therefore
independent, reproducible, and order-insensitive: they can be generated in
any order (or concurrently) and merged by replicate index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, replicate: int = 0, domain: int = 0) -> np.random.Generator:
    """Return the Philox generator for one (seed, replicate) pair.

    The 128-bit Philox key is the pair ``(seed, replicate)``, so distinct
    replicates of one master seed give statistically independent streams.
    ``domain`` selects one of 2**64 non-overlapping sub-streams within a
    replicate (walk steps vs. sign flips, etc.) by offsetting the most
    significant word of the 256-bit counter; each sub-stream still has
    2**192 blocks of headroom before any overlap.
    """
    key = np.array([seed & _MASK64, replicate & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, 0, domain & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


@dataclass(frozen=True)
class WalkPath:
    """Trajectory of a simple random walk started at the origin.

    ``positions`` has length ``n_steps + 1`` with ``positions[0] == 0`` and
    unit increments.  ``(seed, replicate, n_steps)`` fully determines the
    trajectory.
    """

    seed: int
    n_steps: int
    positions: np.ndarray
    replicate: int = 0


@dataclass(frozen=True)
class OccupationField:
    """Per-site block counts of a walk prefix (the wall, site by site).

    Counts are stored densely from ``min_site`` upward; a walk visits every
    site between its running extremes, so the dense window has no holes.
    """

    min_site: int
    counts: np.ndarray
    total: int

    def at(self, site: int) -> int:
        """Block count at ``site`` (0 outside the visited window)."""
        idx = site - self.min_site
        if idx < 0 or idx >= len(self.counts):
            return 0
        return int(self.counts[idx])

    def sites(self) -> np.ndarray:
        return self.min_site + np.arange(len(self.counts))

    def as_dict(self) -> dict[int, int]:
        return {int(j): int(c) for j, c in zip(self.sites(), self.counts)}


@dataclass(frozen=True)
class BlockTrace:
    """Block-by-block record of the wall: (step, site, height) per block.

    ``heights[k]`` is the number of blocks at ``sites[k]`` once block ``k``
    is placed, so within any fixed site the recorded heights are 1, 2, 3,
    ... in order of appearance.
    """

    steps: np.ndarray
    sites: np.ndarray
    heights: np.ndarray

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return zip(self.steps.tolist(), self.sites.tolist(), self.heights.tolist())


def simulate_walk(n_steps: int, seed: int, replicate: int = 0) -> WalkPath:
    """Simulate ``n_steps`` fair +/-1 steps from the origin.

    ``n_steps = 0`` is legal and yields the single-point path ``[0]``.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    rng = stream(seed, replicate, domain=0)
    positions = np.empty(n_steps + 1, dtype=np.int64)
    positions[0] = 0
    if n_steps:
        steps = 2 * rng.integers(0, 2, size=n_steps, dtype=np.int64) - 1
        np.cumsum(steps, out=positions[1:])
    return WalkPath(seed=seed, n_steps=n_steps, positions=positions, replicate=replicate)


def occupation_field(path: WalkPath, up_to_step: int | None = None) -> OccupationField:
    """Count blocks per site over ``positions[0 .. up_to_step]`` inclusive.

    The initial block at site 0 counts, so the total is ``up_to_step + 1``.
    """
    if up_to_step is None:
        up_to_step = path.n_steps
    if up_to_step < 0 or up_to_step > path.n_steps:
        raise ValueError(
            f"up_to_step must be in [0, {path.n_steps}], got {up_to_step}"
        )
    window = path.positions[: up_to_step + 1]
    lo = int(window.min())
    counts = np.bincount(window - lo)
    return OccupationField(min_site=lo, counts=counts, total=up_to_step + 1)


def _running_visit_rank(sites: np.ndarray) -> np.ndarray:
    """Rank of each entry within its site group, in time order (1-based).

    Equivalent to walking the array and incrementing a per-site counter;
    implemented with one stable sort so it vectorizes.
    """
    m = len(sites)
    order = np.argsort(sites, kind="stable")
    sorted_sites = sites[order]
    group_start = np.zeros(m, dtype=np.int64)
    if m > 1:
        new_group = np.empty(m, dtype=bool)
        new_group[0] = True
        new_group[1:] = sorted_sites[1:] != sorted_sites[:-1]
        group_start = np.maximum.accumulate(
            np.where(new_group, np.arange(m, dtype=np.int64), 0)
        )
    rank_sorted = np.arange(m, dtype=np.int64) - group_start + 1
    ranks = np.empty(m, dtype=np.int64)
    ranks[order] = rank_sorted
    return ranks


def discrete_brick_trace(path: WalkPath) -> BlockTrace:
    """Record every block placement as (step, site, running height at site)."""
    sites = path.positions
    heights = _running_visit_rank(sites)
    steps = np.arange(len(sites), dtype=np.int64)
    return BlockTrace(steps=steps, sites=sites.copy(), heights=heights)
