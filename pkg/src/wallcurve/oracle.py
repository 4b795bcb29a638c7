"""Closed-form laws of the curve at a fixed time, plus matched samplers.

At a fixed time ``t`` the pair (position, wall height) = (B(t), local time
at B(t)) has the joint density

    f(y, s) = (|y| + s) / sqrt(2*pi*t**3) * exp(-(|y| + s)**2 / (2*t))

on R x [0, inf).  The density follows from three classical identities, each
realized here as a sampler side so the whole chain can be replayed
empirically:

* time reversal -- the height above the current position has the same law
  as the height above the origin ("lhs" vs "reversal");
* Levy's identity -- (|B(t)|, local time at 0) matches (S(t) - B(t), S(t))
  with S the running maximum ("levy");
* sign symmetry -- B(t)'s sign is independent of (|B(t)|, local time at 0),
  so attaching a fair sign to S(t) - B(t) recovers the full pair
  ("signed").

The reflection principle supplies the running-maximum tail used in the
final step: Pr{B(t) in dx, S(t) >= s} has density exp(-(2s-x)**2/(2t)) /
sqrt(2*pi*t) for x < s.

Note the normalizing constant: sqrt(2*pi*t**3), not sqrt(8*pi*t**3).  The
latter fails every consistency check in this module (the density would
integrate to 1/2), while the constant used here reproduces the Gaussian
position marginal, the half-normal height marginal, and the
finite-difference replay of the reflection-principle derivation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .walk import stream

__all__ = [
    "DensityModel",
    "joint_density",
    "marginal_level",
    "marginal_height",
    "mean_height",
    "reflection_tail",
    "sample_identity_pair",
    "sample_exact",
    "IDENTITY_SIDES",
]

#: Sampler sides, with the counter domain used for each side's walk draws.
#: "signed" reuses the "levy" walk (it is that pair with a sign attached)
#: and draws its signs from a separate domain.
IDENTITY_SIDES = ("lhs", "reversal", "levy", "signed")
_WALK_DOMAIN = {"lhs": 0, "reversal": 1, "levy": 2, "signed": 2}
_SIGN_DOMAIN = 3


def _check_t(t: float) -> None:
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")


def joint_density(y, s, t: float):
    """Joint density of (position, wall height) at time ``t``.

    Defined on the closed half-plane s >= 0 by continuity: on the boundary
    it equals |y| * exp(-y**2/(2t)) / sqrt(2*pi*t**3), vanishing only at
    the origin.
    """
    _check_t(t)
    y = np.asarray(y, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("height s must be >= 0")
    r = np.abs(y) + s
    out = r / np.sqrt(2.0 * np.pi * t**3) * np.exp(-(r**2) / (2.0 * t))
    return out if out.ndim else float(out)


def marginal_level(y, t: float):
    """Position marginal: centered Gaussian with variance ``t``."""
    _check_t(t)
    y = np.asarray(y, dtype=float)
    out = np.exp(-(y**2) / (2.0 * t)) / np.sqrt(2.0 * np.pi * t)
    return out if out.ndim else float(out)


def marginal_height(s, t: float):
    """Height marginal: half-normal with scale ``sqrt(t)``.

    Takes its maximum sqrt(2/(pi*t)) at the s = 0 boundary.
    """
    _check_t(t)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("height s must be >= 0")
    out = np.sqrt(2.0 / (np.pi * t)) * np.exp(-(s**2) / (2.0 * t))
    return out if out.ndim else float(out)


def mean_height(t: float) -> float:
    """Expected wall height at the walker's position, ``sqrt(2*t/pi)``."""
    _check_t(t)
    return float(np.sqrt(2.0 * t / np.pi))


def reflection_tail(x: float, s: float, t: float) -> float:
    """Density in ``x`` of {B(t) in dx, running max >= s}, for ``x < s``.

    By reflecting the path at its first passage of ``s``, this equals the
    plain Gaussian density evaluated at ``2*s - x``.
    """
    _check_t(t)
    if s <= 0:
        raise ValueError(f"s must be > 0, got {s}")
    if x >= s:
        raise ValueError(f"identity requires x < s, got x={x}, s={s}")
    return float(np.exp(-((2.0 * s - x) ** 2) / (2.0 * t)) / np.sqrt(2.0 * np.pi * t))


@dataclass(frozen=True)
class DensityModel:
    """Fixed-time law of (position, wall height)."""

    t: float

    def __post_init__(self) -> None:
        _check_t(self.t)

    def density(self, y, s):
        return joint_density(y, s, self.t)

    def sample(self, seed: int, size: int) -> np.ndarray:
        return sample_exact(self.t, seed, size)


def sample_exact(t: float, seed: int, size: int) -> np.ndarray:
    """Draw (y, s) pairs exactly from the fixed-time law.

    Under u = |y| + s the density is Maxwell (chi with 3 degrees of
    freedom, scale sqrt(t)) and y is uniform on (-u, u) given u, so a
    3-d Gaussian norm plus one uniform inverts the law exactly.  Used as
    the synthetic null for calibrating the statistical harness.
    """
    _check_t(t)
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    rng = stream(seed, 0, domain=0)
    u = np.sqrt(t) * np.linalg.norm(rng.standard_normal((size, 3)), axis=1)
    y = u * rng.uniform(-1.0, 1.0, size=size)
    s = u - np.abs(y)
    return np.column_stack([y, s])


_BLOCK = 256


def sample_identity_pair(
    t: float,
    seed: int,
    n: int,
    side: str,
    replicates: int = 2000,
    signs: np.ndarray | None = None,
) -> np.ndarray:
    """Monte-Carlo pairs realizing one side of the identity chain.

    Each replicate simulates ``ceil(n*t)`` walk steps on its own
    ``(seed, replicate)`` stream and reports, rescaled by ``n**-0.5``:

    * ``lhs``      -- (position, visit count at the current site);
    * ``reversal`` -- (position, visit count at the origin);
    * ``levy``     -- (running max - position, running max);
    * ``signed``   -- the ``levy`` pair with its first coordinate given an
      independent fair sign.

    ``lhs``, ``reversal`` and ``levy`` use disjoint generator domains, so
    any two of those sides are independent; ``signed`` deliberately reuses
    the ``levy`` walk.  ``signs`` overrides the fair-sign stream (test
    hook: all +1 reproduces ``levy`` exactly).
    """
    _check_t(t)
    if n < 1:
        raise ValueError(f"scale parameter n must be >= 1, got {n}")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    if side not in IDENTITY_SIDES:
        raise ValueError(f"unknown side {side!r}, expected one of {IDENTITY_SIDES}")
    m = max(1, int(np.ceil(t * n - 1e-9)))
    root_n = np.sqrt(float(n))
    domain = _WALK_DOMAIN[side]
    out = np.empty((replicates, 2))
    for start in range(0, replicates, _BLOCK):
        stop = min(start + _BLOCK, replicates)
        block = stop - start
        pos = np.empty((block, m + 1), dtype=np.int64)
        pos[:, 0] = 0
        for i, r in enumerate(range(start, stop)):
            rng = stream(seed, r, domain=domain)
            steps = 2 * rng.integers(0, 2, size=m, dtype=np.int64) - 1
            np.cumsum(steps, out=pos[i, 1:])
        end = pos[:, -1]
        if side == "lhs":
            out[start:stop, 0] = end / root_n
            out[start:stop, 1] = (pos == end[:, None]).sum(axis=1) / root_n
        elif side == "reversal":
            out[start:stop, 0] = end / root_n
            out[start:stop, 1] = (pos == 0).sum(axis=1) / root_n
        else:
            run_max = np.maximum(pos.max(axis=1), 0)
            out[start:stop, 0] = (run_max - end) / root_n
            out[start:stop, 1] = run_max / root_n
    if side == "signed":
        if signs is None:
            signs = np.empty(replicates)
            for r in range(replicates):
                rng = stream(seed, r, domain=_SIGN_DOMAIN)
                signs[r] = 2.0 * rng.integers(0, 2) - 1.0
        else:
            signs = np.asarray(signs, dtype=float)
            if signs.shape != (replicates,):
                raise ValueError("signs must have one entry per replicate")
        out[:, 0] *= signs
    return out
