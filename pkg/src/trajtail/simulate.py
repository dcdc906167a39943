"""Seeded generators for the stochastic processes used throughout.

All generators are bit-reproducible functions of their spec (including the
seed): draws come from a single PCG64 stream consumed in a documented, fixed
order, so results do not depend on thread count or call context.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Seed, Trajectory

__all__ = [
    "PROCESS_KINDS",
    "ProcessSpec",
    "simulate",
    "beta_prime_sample",
    "stable_sample",
    "stable_transform",
]

PROCESS_KINDS = (
    "gaussian_walk",
    "stable_levy_walk",
    "beta_prime_walk",
    "perturbed_gd_quadratic",
)


@dataclass(frozen=True)
class ProcessSpec:
    """Configuration of one simulated process.

    Kind-specific parameters (others are ignored):

    - ``gaussian_walk``: ``sigma`` (scalar or per-coordinate scales).
    - ``stable_levy_walk``: ``stable_alpha`` in (0, 2], ``sigma`` (scale);
      each step adds i.i.d. symmetric stable coordinates.
    - ``beta_prime_walk``: ``bp_alpha``, ``bp_beta`` shapes; planar walk with
      a uniform direction and a beta-prime step length (``dim`` must be 2).
    - ``perturbed_gd_quadratic``: ``gd_step``, per-coordinate ``curvature``
      of the quadratic objective, ``sigma`` for the gradient noise, optional
      nonzero ``start``.
    """

    kind: str
    dim: int
    steps: int
    seed: int
    sigma: float | tuple[float, ...] = 1.0
    stable_alpha: float = 1.5
    bp_alpha: float = 0.5
    bp_beta: float = 3.5
    gd_step: float = 0.1
    curvature: float | tuple[float, ...] = 1.0
    start: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in PROCESS_KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}; choose from {PROCESS_KINDS}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.kind == "beta_prime_walk" and self.dim != 2:
            raise ValueError("beta_prime_walk is a planar process; dim must be 2")
        if self.kind == "stable_levy_walk" and not 0.0 < self.stable_alpha <= 2.0:
            raise ValueError(f"stable index must lie in (0, 2], got {self.stable_alpha}")
        if self.kind == "beta_prime_walk" and not (self.bp_alpha > 0 and self.bp_beta > 0):
            raise ValueError("beta-prime shapes must be positive")
        if self.kind == "perturbed_gd_quadratic" and not self.gd_step > 0:
            raise ValueError(f"gd_step must be positive, got {self.gd_step}")

    def _sigma_vector(self) -> np.ndarray:
        sig = np.broadcast_to(np.asarray(self.sigma, dtype=np.float64), (self.dim,))
        if np.any(sig < 0):
            raise ValueError("sigma must be nonnegative")
        return sig

    def _curvature_vector(self) -> np.ndarray:
        curv = np.broadcast_to(np.asarray(self.curvature, dtype=np.float64), (self.dim,))
        if np.any(curv <= 0):
            raise ValueError("curvature must be positive")
        return curv


def stable_transform(alpha: float, u: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Symmetric stable draw from uniform angle u in (-pi/2, pi/2) and unit
    exponential e; odd in u.  At alpha = 2 this reduces to 2 sin(u) sqrt(e),
    a Gaussian with variance 2."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    u = np.asarray(u, dtype=np.float64)
    e = np.maximum(np.asarray(e, dtype=np.float64), 1e-300)
    if alpha == 1.0:
        return np.tan(u)
    t1 = np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)
    t2 = (np.cos((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha)
    return t1 * t2


def stable_sample(alpha: float, rng: np.random.Generator, size=None) -> np.ndarray | float:
    """Unit-scale symmetric stable draw(s) via the trigonometric transform."""
    u = rng.uniform(-np.pi / 2, np.pi / 2, size)
    e = rng.standard_exponential(size)
    out = stable_transform(alpha, u, e)
    return float(out) if size is None else out


def beta_prime_sample(alpha: float, beta: float, rng: np.random.Generator, size=None) -> np.ndarray | float:
    """Beta-prime draw(s) as a ratio of gamma variates with shapes (alpha, beta).

    Tiny shapes can underflow a gamma draw to zero; such draws are resampled
    so the result is always positive and finite.
    """
    if not (alpha > 0 and beta > 0):
        raise ValueError(f"shapes must be positive, got ({alpha}, {beta})")
    g1 = np.atleast_1d(rng.standard_gamma(alpha, size))
    g2 = np.atleast_1d(rng.standard_gamma(beta, size))
    for _ in range(100):
        bad = (g1 <= 0.0) | (g2 <= 0.0)
        if not bad.any():
            break
        k = int(bad.sum())
        g1[bad] = rng.standard_gamma(alpha, k)
        g2[bad] = rng.standard_gamma(beta, k)
    else:
        raise RuntimeError("gamma sampling kept underflowing to zero")
    out = g1 / g2
    return float(out[0]) if size is None else out.reshape(size)


def simulate(spec: ProcessSpec) -> Trajectory:
    """Run the process for ``spec.steps`` steps from the origin.

    Returns ``steps + 1`` points.  Draw order per kind is fixed (documented
    in each branch), so trajectories are bit-reproducible given the spec.
    """
    rng = Seed(spec.seed).generator()
    n, d = spec.steps, spec.dim
    if spec.kind == "gaussian_walk":
        # one (steps, dim) normal block
        deltas = rng.standard_normal((n, d)) * spec._sigma_vector()
    elif spec.kind == "stable_levy_walk":
        # one (steps, dim) uniform block, then one exponential block
        u = rng.uniform(-np.pi / 2, np.pi / 2, (n, d))
        e = rng.standard_exponential((n, d))
        deltas = stable_transform(spec.stable_alpha, u, e) * spec._sigma_vector()
    elif spec.kind == "beta_prime_walk":
        # angles first, then step lengths
        angles = rng.uniform(-np.pi, np.pi, n)
        lengths = beta_prime_sample(spec.bp_alpha, spec.bp_beta, rng, n)
        deltas = np.column_stack([np.cos(angles), np.sin(angles)]) * lengths[:, None]
    elif spec.kind == "perturbed_gd_quadratic":
        # one (steps, dim) normal block for the gradient noise
        curv = spec._curvature_vector()
        noise = rng.standard_normal((n, d)) * spec._sigma_vector()
        w = np.zeros(d) if spec.start is None else np.asarray(spec.start, dtype=np.float64)
        if w.shape != (d,):
            raise ValueError(f"start must have dimension {d}")
        points = np.empty((n + 1, d))
        points[0] = w
        for k in range(n):
            w = w - spec.gd_step * (curv * w + noise[k])
            points[k + 1] = w
        return Trajectory(points)
    else:  # pragma: no cover - guarded by ProcessSpec
        raise ValueError(spec.kind)

    points = np.vstack([np.zeros((1, d)), np.cumsum(deltas, axis=0)])
    return Trajectory(points)
