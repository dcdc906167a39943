"""Shared domain types, trajectory ingestion and derivation utilities.

Everything here is immutable after construction and safe to share across
threads; the operations are pure functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyInputError,
    TrajectoryFormatError,
    TrajectoryParseError,
)

__all__ = [
    "Seed",
    "Trajectory",
    "IncrementSeries",
    "SimplexWeights",
    "RadiusGrid",
    "RunningStdNormalization",
    "load_trajectory",
    "save_trajectory",
    "increments",
    "normalize_by_running_std",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Weight vectors must sum to one within this slack.
SIMPLEX_TOL = 1e-9


def _splitmix64(x: int) -> int:
    """SplitMix64 avalanche finalizer; maps 64-bit ints to 64-bit ints."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class Seed:
    """Deterministic randomness root.

    Replicate ``i`` of a run seeded with ``base`` draws from the stream seeded
    by ``_splitmix64(base + (i + 1) * GOLDEN)``, i.e. the ``(i+1)``-th output
    of a SplitMix64 sequence started at ``base``.  The same ``(base, i)``
    always yields the same stream, independent of thread scheduling.
    """

    base: int

    def __post_init__(self):
        if not 0 <= int(self.base) <= _MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.base}")
        object.__setattr__(self, "base", int(self.base))

    def spawn(self, *indices: int) -> "Seed":
        """Derive a child seed from one or more replicate/grid indices."""
        value = self.base
        for i in indices:
            if i < 0:
                raise ValueError("derivation indices must be nonnegative")
            value = _splitmix64((value + (int(i) + 1) * _GOLDEN) & _MASK64)
        return Seed(value)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.base))


def _freeze(arr: np.ndarray) -> np.ndarray:
    # always copy so freezing never locks a caller-owned array
    arr = np.array(arr, dtype=np.float64, order="C", copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Trajectory:
    """Ordered sequence of iterates in R^D.

    ``points`` has shape ``(m + 1, D)``; entries must be finite.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got ndim={pts.ndim}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"trajectory needs >= 1 point of dimension >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("trajectory contains non-finite coordinates")
        object.__setattr__(self, "points", _freeze(pts))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class IncrementSeries:
    """Lagged differences ``points[j + lag] - points[j]`` of a trajectory."""

    deltas: np.ndarray
    lag: int

    def __post_init__(self):
        if self.lag < 1:
            raise ValueError(f"lag must be a positive integer, got {self.lag}")
        object.__setattr__(self, "deltas", _freeze(np.atleast_2d(self.deltas)))

    def __len__(self) -> int:
        return self.deltas.shape[0]

    @property
    def dim(self) -> int:
        return self.deltas.shape[1]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.deltas, axis=1)


@dataclass(frozen=True)
class SimplexWeights:
    """Probability vector over trajectory points."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if w.size < 1:
            raise ValueError("weights must be nonempty")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"weights must sum to 1 within {SIMPLEX_TOL}, got {w.sum()!r}")
        object.__setattr__(self, "weights", _freeze(w))

    def __len__(self) -> int:
        return self.weights.size

    @classmethod
    def uniform(cls, n: int) -> "SimplexWeights":
        return cls(np.full(n, 1.0 / n))


@dataclass(frozen=True)
class RadiusGrid:
    """Strictly increasing positive radii plus a truncation radius ``rho``."""

    radii: np.ndarray
    rho: float

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=np.float64).ravel()
        if r.size < 1:
            raise ValueError("radius grid must be nonempty")
        if np.any(r <= 0) or not np.all(np.isfinite(r)):
            raise ValueError("radii must be positive and finite")
        if np.any(np.diff(r) <= 0):
            raise ValueError("radii must be strictly increasing")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        object.__setattr__(self, "radii", _freeze(r))
        object.__setattr__(self, "rho", float(self.rho))

    def __len__(self) -> int:
        return self.radii.size

    @classmethod
    def geometric(cls, lo: float, hi: float, num: int, rho: float | None = None) -> "RadiusGrid":
        radii = np.geomspace(lo, hi, num)
        return cls(radii, hi if rho is None else rho)

    @classmethod
    def from_quantiles(
        cls, values: Sequence[float], levels: Sequence[float], rho: float | None = None
    ) -> "RadiusGrid":
        """Grid at empirical quantiles of positive ``values`` (duplicates dropped)."""
        vals = np.asarray(values, dtype=np.float64)
        vals = vals[vals > 0]
        if vals.size == 0:
            raise ValueError("no positive values to take quantiles of")
        radii = np.unique(np.quantile(vals, np.asarray(levels)))
        radii = radii[radii > 0]
        if radii.size == 0:
            raise ValueError("quantile grid collapsed to zero radii")
        return cls(radii, float(radii[-1]) if rho is None else rho)


def load_trajectory(path: str | Path, has_header: bool = False) -> Trajectory:
    """Read a trajectory from CSV: one iterate per row, D numeric columns.

    Raises :class:`TrajectoryFormatError` on ragged rows (naming the line),
    :class:`TrajectoryParseError` on non-numeric cells and
    :class:`EmptyInputError` when no data rows remain.
    """
    path = Path(path)
    rows: list[list[float]] = []
    width: int | None = None
    with path.open("r", newline="") as handle:
        for line_no, line in enumerate(handle, start=1):
            if line_no == 1 and has_header:
                continue
            cells = line.rstrip("\r\n").split(",")
            if cells == [""]:
                raise TrajectoryFormatError(f"{path}: line {line_no}: blank row")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise TrajectoryFormatError(
                    f"{path}: line {line_no}: expected {width} columns, got {len(cells)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise TrajectoryParseError(f"{path}: line {line_no}: {exc}") from None
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    return Trajectory(np.asarray(rows))


def save_trajectory(trajectory: Trajectory, path: str | Path) -> Path:
    """Write CSV with 17 significant digits so load/save round-trips exactly."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        for row in trajectory.points:
            handle.write(",".join(f"{x:.17g}" for x in row) + "\n")
    return path


def increments(trajectory: Trajectory, lag: int = 1) -> IncrementSeries:
    """Lag-k differences of a trajectory; requires ``lag < len(trajectory)``."""
    if lag < 1:
        raise ValueError(f"lag must be a positive integer, got {lag}")
    if lag >= len(trajectory):
        raise ValueError(f"lag {lag} must be smaller than trajectory length {len(trajectory)}")
    pts = trajectory.points
    return IncrementSeries(pts[lag:] - pts[:-lag], lag)


@dataclass(frozen=True)
class RunningStdNormalization:
    """Result of prefix-standard-deviation normalization.

    ``first_scaled_index`` is the first index from which scaling was applied;
    earlier points are passed through unscaled.  Coordinates that never vary
    are listed in ``degenerate_axes`` and left unscaled throughout.
    """

    trajectory: Trajectory
    first_scaled_index: int
    degenerate_axes: tuple[int, ...]
    convention: str

    @property
    def degenerate(self) -> bool:
        return self.first_scaled_index >= len(self.trajectory)


def normalize_by_running_std(trajectory: Trajectory, ddof: int = 0) -> RunningStdNormalization:
    """Divide iterate k coordinate-wise by the std of iterates 0..k.

    ``ddof=0`` (population convention, the default) divides the variance sum
    by ``k + 1``; ``ddof=1`` uses the sample convention.  Scaling starts at the
    first index where every varying coordinate has positive prefix std; a
    fully constant trajectory is returned unscaled with all axes flagged.
    """
    if len(trajectory) < 2:
        raise ValueError("running-std normalization needs at least 2 points")
    if ddof not in (0, 1):
        raise ValueError(f"ddof must be 0 or 1, got {ddof}")
    pts = trajectory.points
    n, dim = pts.shape
    counts = np.arange(1, n + 1, dtype=np.float64)[:, None]
    cum = np.cumsum(pts, axis=0)
    cum2 = np.cumsum(pts * pts, axis=0)
    var = cum2 / counts - (cum / counts) ** 2
    if ddof == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            var = var * counts / (counts - 1.0)
        var[0] = 0.0
    sd = np.sqrt(np.clip(var, 0.0, None))

    varying = sd[-1] > 0.0
    degenerate_axes = tuple(int(i) for i in np.nonzero(~varying)[0])
    if not varying.any():
        return RunningStdNormalization(trajectory, n, degenerate_axes, _convention(ddof))

    positive_from = np.argmax(sd[:, varying] > 0.0, axis=0)
    k0 = int(positive_from.max())
    scaled = pts.copy()
    cols = np.nonzero(varying)[0]
    scaled[k0:, cols] = pts[k0:, cols] / sd[k0:, cols]
    return RunningStdNormalization(Trajectory(scaled), k0, degenerate_axes, _convention(ddof))


def _convention(ddof: int) -> str:
    return "population" if ddof == 0 else "sample"
