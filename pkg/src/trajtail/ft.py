"""Normalized trajectory-clustering functional on finite point sets.

The functional of a point set W under the truncated metric
``d_rho(x, y) = min(rho, |x - y|)`` is

    (1/rho) * inf_p max_i  integral_0^rho sqrt(log 1/mu_p(B_r(w_i))) dr,

minimized over probability vectors ``p`` on the points.  For an atomic
measure the inner integral is a finite sum over the segments between
consecutive sorted distances: the segment starting at the j-th sorted
distance carries the cumulative mass of the j+1 nearest atoms, and the
trailing segment up to ``rho`` carries mass one and contributes nothing.

``estimate_gamma2`` minimizes the objective with a projected subgradient
method in softmax coordinates; ``brute_force_gamma2`` is an exhaustive
simplex-grid oracle used to validate it on small sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Seed, SimplexWeights, Trajectory

__all__ = [
    "TruncatedGram",
    "FtEstimate",
    "SubgradientOptions",
    "ft_objective",
    "estimate_gamma2",
    "brute_force_gamma2",
    "resolve_rho",
]

# Cumulative masses are clipped into [MASS_FLOOR, 1] before taking logs.
MASS_FLOOR = 1e-300
# Safety cap on the softmax-space step direction norm; the subgradient blows
# up when some cumulative mass approaches 0 or 1.
_STEP_NORM_CAP = 1e3

BRUTE_FORCE_MAX_POINTS = 6
_BATCH_ROWS = 400_000


def resolve_rho(rho: float | None, loss_bound: float | None = None, lipschitz: float | None = None) -> float:
    """Truncation radius: explicit value, else loss_bound/lipschitz, else 1."""
    if rho is not None:
        if not rho > 0:
            raise ValueError(f"rho must be positive, got {rho}")
        return float(rho)
    if loss_bound is not None and lipschitz is not None:
        if not (loss_bound > 0 and lipschitz > 0):
            raise ValueError("loss_bound and lipschitz must be positive")
        return float(loss_bound) / float(lipschitz)
    return 1.0


@dataclass(frozen=True)
class TruncatedGram:
    """Pairwise truncated distances with per-row ascending sort.

    ``entries[i, j] = min(rho, |w_i - w_j|)``; ``order[i]`` is the stable
    permutation sorting row i ascending (ties keep index order, so duplicate
    points produce zero-length segments that contribute nothing) and
    ``segments[i, j] = sorted[i, j+1] - sorted[i, j]``.
    """

    entries: np.ndarray
    rho: float
    sorted_entries: np.ndarray
    order: np.ndarray
    segments: np.ndarray

    @classmethod
    def from_points(cls, points: np.ndarray, rho: float) -> "TruncatedGram":
        if not rho > 0:
            raise ValueError(f"rho must be positive, got {rho}")
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite coordinates")
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(dist, 0.0)
        np.minimum(dist, rho, out=dist)
        order = np.argsort(dist, axis=1, kind="stable").astype(np.intp)
        sorted_entries = np.take_along_axis(dist, order, axis=1)
        segments = sorted_entries[:, 1:] - sorted_entries[:, :-1]
        return cls(dist, float(rho), sorted_entries, order, segments)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class FtEstimate:
    """Estimated functional value with the weights achieving it."""

    value: float
    weights: SimplexWeights
    objective_trace: np.ndarray
    method: str  # "subgradient" | "uniform" | "oracle"

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValueError(f"estimate must be nonnegative, got {self.value}")
        object.__setattr__(self, "objective_trace", np.asarray(self.objective_trace, dtype=np.float64))


@dataclass(frozen=True)
class SubgradientOptions:
    """Settings for the softmax-parametrized subgradient minimizer.

    One restart starts from zero logits; the remaining ``restarts - 1`` use
    standard-normal logits drawn from streams derived from ``seed``.  The
    best objective value ever seen (across iterations and restarts, and
    including uniform weights) is returned.
    """

    iterations: int = 2000
    restarts: int = 5
    step_scale: float = 0.5
    seed: int = 0
    dtype: str = "float64"

    def __post_init__(self):
        if self.iterations < 1 or self.restarts < 1:
            raise ValueError("iterations and restarts must be >= 1")
        if not self.step_scale > 0:
            raise ValueError("step_scale must be positive")
        if self.dtype not in ("float64", "float32"):
            raise ValueError(f"dtype must be float64 or float32, got {self.dtype}")


DEFAULT_OPTIONS = SubgradientOptions()


def _as_points(w) -> np.ndarray:
    if isinstance(w, Trajectory):
        return w.points
    pts = np.asarray(w, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.size == 0:
        raise ValueError("point set must be nonempty")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite coordinates")
    return pts


def _anchor_integrals(order: np.ndarray, segments: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Unnormalized per-anchor integrals for one weight vector; shape (n,)."""
    n = order.shape[0]
    if n == 1:
        return np.zeros(1, dtype=segments.dtype)
    cum = np.take(p, order)
    np.cumsum(cum, axis=1, out=cum)
    cum = cum[:, :-1]
    np.clip(cum, MASS_FLOOR, 1.0, out=cum)
    np.log(cum, out=cum)
    np.abs(cum, out=cum)
    np.sqrt(cum, out=cum)
    return np.einsum("ij,ij->i", segments, cum)


def ft_objective(gram: TruncatedGram, weights: SimplexWeights | np.ndarray) -> float:
    """Objective value at a fixed weight vector: max over anchors, over rho.

    Exact for the atomic measure (the ball-mass map r -> p(B_r(w_i)) is a
    step function); masses are clipped below at ``MASS_FLOOR`` before logs,
    so weight vectors with (near-)zero mass on isolated points evaluate to a
    large finite value rather than infinity.
    """
    p = weights.weights if isinstance(weights, SimplexWeights) else np.asarray(weights, dtype=np.float64)
    if p.shape != (gram.n,):
        raise ValueError(f"weights have length {p.shape}, gram has {gram.n} points")
    vals = _anchor_integrals(gram.order, gram.segments, p.astype(np.float64))
    return float(vals.max()) / gram.rho


def _row_subgradient(order_i: np.ndarray, segments_i: np.ndarray, p: np.ndarray, rho: float) -> np.ndarray:
    """Gradient of one anchor's integral (normalized by rho) w.r.t. p."""
    n = p.size
    g = np.zeros(n)
    if n == 1:
        return g
    c = np.cumsum(p[order_i])[:-1]
    np.clip(c, MASS_FLOOR, 1.0 - 1e-12, out=c)
    phi_prime = -1.0 / (2.0 * c * np.sqrt(np.abs(np.log(c))))
    w = segments_i * phi_prime
    suffix = np.cumsum(w[::-1])[::-1]
    g[order_i[:-1]] = suffix
    return g / rho


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def _minimize_restart(gram: TruncatedGram, z0: np.ndarray, options: SubgradientOptions):
    order = gram.order
    seg64 = gram.segments
    seg = seg64.astype(np.float32) if options.dtype == "float32" else seg64
    rho = gram.rho
    z = z0.astype(np.float64).copy()
    best_val = np.inf
    best_p = None
    trace = np.empty(options.iterations + 1)
    for t in range(1, options.iterations + 2):
        p = _softmax(z)
        p_eval = p.astype(np.float32) if options.dtype == "float32" else p
        vals = _anchor_integrals(order, seg, p_eval)
        i_star = int(np.argmax(vals))
        obj = float(vals[i_star]) / rho
        trace[t - 1] = obj
        if obj < best_val:
            best_val = obj
            best_p = p
        if t > options.iterations:
            break
        g = _row_subgradient(order[i_star], seg64[i_star], p, rho)
        gz = p * (g - float(p @ g))
        norm = float(np.linalg.norm(gz))
        if norm > _STEP_NORM_CAP:
            gz *= _STEP_NORM_CAP / norm
        z -= (options.step_scale / np.sqrt(t)) * gz
        z -= z.max()
    return best_val, best_p, trace


def estimate_gamma2(
    w,
    rho: float | None = None,
    *,
    loss_bound: float | None = None,
    lipschitz: float | None = None,
    options: SubgradientOptions | None = None,
) -> FtEstimate:
    """Minimize the objective over the simplex; deterministic given the seed.

    Returns the better of the optimized weights and uniform weights, so the
    estimate never exceeds the uniform-weights objective (and hence never
    exceeds ``sqrt(log n)``).
    """
    options = options or DEFAULT_OPTIONS
    pts = _as_points(w)
    rho = resolve_rho(rho, loss_bound, lipschitz)
    n = pts.shape[0]
    if n == 1:
        return FtEstimate(0.0, SimplexWeights.uniform(1), np.zeros(0), "uniform")
    gram = TruncatedGram.from_points(pts, rho)
    uniform = SimplexWeights.uniform(n)
    uniform_val = ft_objective(gram, uniform)

    best_val = np.inf
    best_p = None
    best_trace = np.zeros(0)
    for r in range(options.restarts):
        if r == 0:
            z0 = np.zeros(n)
        else:
            z0 = Seed(options.seed).spawn(r).generator().standard_normal(n)
        val, p, trace = _minimize_restart(gram, z0, options)
        if val < best_val:
            best_val, best_p, best_trace = val, p, trace

    if best_p is None or uniform_val <= best_val:
        return FtEstimate(uniform_val, uniform, best_trace, "uniform")
    return FtEstimate(best_val, SimplexWeights(best_p), best_trace, "subgradient")


def _concat_aranges(lengths: np.ndarray) -> np.ndarray:
    """Concatenation of arange(l) for each l in ``lengths``."""
    total = int(lengths.sum())
    starts = np.repeat(np.cumsum(lengths) - lengths, lengths)
    return np.arange(total, dtype=np.int64) - starts


@lru_cache(maxsize=4)
def _simplex_grid(q: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``q``."""
    if parts == 1:
        return np.array([[q]], dtype=np.int64)
    if parts == 2:
        j = np.arange(q + 1, dtype=np.int64)
        return np.column_stack([j, q - j])
    if parts == 3:
        lengths = np.arange(q + 1, 0, -1, dtype=np.int64)
        first = np.repeat(np.arange(q + 1, dtype=np.int64), lengths)
        second = _concat_aranges(lengths)
        return np.column_stack([first, second, q - first - second])
    blocks = []
    for first in range(q + 1):
        rest = _simplex_grid(q - first, parts - 1)
        blocks.append(np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


def brute_force_gamma2(w, rho: float | None = None, grid_resolution: int = 200) -> FtEstimate:
    """Exhaustive minimum over simplex vectors with coordinates k/q.

    Cumulative masses on the grid only take values k/q, so the integrand is
    evaluated through a precomputed table, exactly matching the clipped-log
    convention of :func:`ft_objective`.  Only feasible for very small point
    sets; refuses n > 6.
    """
    pts = _as_points(w)
    n = pts.shape[0]
    if n > BRUTE_FORCE_MAX_POINTS:
        raise ValueError(f"brute force supports at most {BRUTE_FORCE_MAX_POINTS} points, got {n}")
    if grid_resolution < 1:
        raise ValueError("grid_resolution must be >= 1")
    rho = resolve_rho(rho)
    if n == 1:
        return FtEstimate(0.0, SimplexWeights.uniform(1), np.zeros(0), "oracle")
    q = grid_resolution
    gram = TruncatedGram.from_points(pts, rho)
    grid = _simplex_grid(q, n)
    masses = np.clip(np.arange(q + 1, dtype=np.float64) / q, MASS_FLOOR, 1.0)
    table = np.sqrt(np.abs(np.log(masses)))
    best_val = np.inf
    best_row = None
    for start in range(0, grid.shape[0], _BATCH_ROWS):
        chunk = grid[start : start + _BATCH_ROWS]
        vals = np.full(chunk.shape[0], -np.inf)
        for i in range(n):
            cum = np.cumsum(chunk[:, gram.order[i]], axis=1)[:, :-1]
            np.maximum(vals, np.take(table, cum) @ gram.segments[i], out=vals)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best_row = chunk[k].astype(np.float64) / q
    return FtEstimate(best_val / rho, SimplexWeights(best_row), np.array([best_val / rho]), "oracle")
