"""Poisson point patterns in a disk and the Voronoi vertices of their tessellation.

The hot loops (Delaunay insertion, path-gain sums) live in the compiled
``_kernels`` extension when it is built and in ``_pykernels`` otherwise.
Set ``WORSTCASE_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, Optional, Union

import numpy as np

from .._rng import substream
from . import _pykernels

__all__ = [
    "BACKEND",
    "available_backends",
    "get_kernels",
    "Window",
    "PointPattern",
    "Triangle",
    "VertexRecord",
    "VertexSet",
    "DegeneratePattern",
    "DegenerateConfiguration",
    "sample_ppp",
    "delaunay",
    "voronoi_vertices",
    "circumcircles",
    "dump_pattern",
    "load_pattern",
]

try:
    from . import _kernels as _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _ckernels is not None and not os.environ.get("WORSTCASE_PURE_PYTHON"):
    _kernels, BACKEND = _ckernels, "cython"
else:
    _kernels, BACKEND = _pykernels, "python"


def available_backends() -> list[str]:
    return ["cython", "python"] if _ckernels is not None else ["python"]


def get_kernels(backend: Optional[str] = None):
    """Kernel module for ``backend`` (``None`` selects the import-time default)."""
    if backend is None:
        return _kernels
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")


class DegeneratePattern(ValueError):
    """A sampled pattern has fewer than three points."""


class DegenerateConfiguration(ValueError):
    """Points admit no triangulation (fewer than three, or all collinear)."""


# guard region keeps this fraction of the window area by default
_DEFAULT_KEEP = 0.8


@dataclass(frozen=True)
class Window:
    """Disk of ``radius`` centred at the origin.

    Vertices are only retained inside the concentric guard region of
    radius ``radius - guard``.
    """

    radius: float
    guard: float

    def __post_init__(self):
        if not (self.radius > self.guard > 0):
            raise ValueError(f"need radius > guard > 0, got radius={self.radius}, guard={self.guard}")

    @classmethod
    def default(cls, lam: float, radius: Optional[float] = None, guard: Optional[float] = None) -> "Window":
        """Guard ``4/sqrt(lam pi)``; radius so the guard region keeps 80% of the area."""
        if guard is None:
            guard = 4.0 / math.sqrt(lam * math.pi)
        if radius is None:
            radius = guard / (1.0 - math.sqrt(_DEFAULT_KEEP))
        return cls(float(radius), float(guard))

    @property
    def inner_radius(self) -> float:
        return self.radius - self.guard

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2

    @property
    def inner_area(self) -> float:
        return math.pi * self.inner_radius ** 2


@dataclass(frozen=True, eq=False)
class PointPattern:
    window: Window
    points: np.ndarray
    seed: Optional[int] = None

    def __len__(self) -> int:
        return len(self.points)


class Triangle(NamedTuple):
    """Vertex indices into the pattern, ascending."""

    i: int
    j: int
    k: int


class VertexRecord(NamedTuple):
    position: tuple
    circumradius: float
    generators: tuple


@dataclass(frozen=True, eq=False)
class VertexSet:
    """Voronoi vertices retained in the guard region, stored column-wise."""

    positions: np.ndarray
    circumradius: np.ndarray
    generators: np.ndarray
    n_filtered: int = 0

    def __len__(self) -> int:
        return len(self.circumradius)

    def __getitem__(self, idx: int) -> VertexRecord:
        return VertexRecord(tuple(self.positions[idx]), float(self.circumradius[idx]),
                            tuple(int(g) for g in self.generators[idx]))

    def __iter__(self) -> Iterator[VertexRecord]:
        for i in range(len(self)):
            yield self[i]


def sample_ppp(lam: float, window: Window, seed: Union[int, np.random.Generator]) -> PointPattern:
    """Homogeneous Poisson pattern of intensity ``lam`` on the window disk."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    rng = substream(seed)
    n = rng.poisson(lam * window.area)
    if n < 3:
        raise DegeneratePattern(f"only {n} points sampled")
    r = window.radius * np.sqrt(rng.random(n))
    theta = 2.0 * math.pi * rng.random(n)
    pts = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return PointPattern(window, pts, seed if isinstance(seed, (int, np.integer)) else None)


def _insertion_order(pts: np.ndarray) -> np.ndarray:
    # boustrophedon sweep over horizontal strips keeps consecutive
    # insertions close, so the point-location walk stays short
    n = len(pts)
    strips = max(1, int(math.sqrt(n / 4.0)))
    lo, hi = pts[:, 1].min(), pts[:, 1].max()
    span = hi - lo if hi > lo else 1.0
    row = np.minimum((pts[:, 1] - lo) / span * strips, strips - 1).astype(np.int64)
    xs = np.where(row % 2 == 0, pts[:, 0], -pts[:, 0])
    return np.lexsort((xs, row)).astype(np.int64)


def delaunay(pattern: Union[PointPattern, np.ndarray], backend: Optional[str] = None) -> np.ndarray:
    """Delaunay triangulation of the pattern.

    Returns an ``(T, 3)`` integer array; each row is a :class:`Triangle`
    (indices ascending) and rows are sorted lexicographically. Cocircular
    ties are resolved by insertion order, so a square yields one of its
    two diagonals deterministically.
    """
    pts = np.ascontiguousarray(pattern.points if isinstance(pattern, PointPattern) else pattern, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    n = len(pts)
    if n < 3:
        raise DegenerateConfiguration(f"need at least 3 points, got {n}")
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    center = 0.5 * (lo + hi)
    span = float(max(hi - lo)) or 1.0
    big = 1e5 * span
    sup = center + big * np.array([[0.0, 2.0], [-math.sqrt(3.0), -1.0], [math.sqrt(3.0), -1.0]])
    x = np.ascontiguousarray(np.concatenate([pts[:, 0], sup[:, 0]]))
    y = np.ascontiguousarray(np.concatenate([pts[:, 1], sup[:, 1]]))
    tri = get_kernels(backend).bowyer_watson(x, y, _insertion_order(pts))
    if len(tri) == 0:
        raise DegenerateConfiguration("all points are collinear")
    tri = np.sort(tri, axis=1)
    return tri[np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0]))]


def circumcircles(points: np.ndarray, triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Circumcentres and circumradii of every triangle."""
    a = points[triangles[:, 0]]
    b = points[triangles[:, 1]] - a
    c = points[triangles[:, 2]] - a
    d = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    b2 = (b * b).sum(axis=1)
    c2 = (c * c).sum(axis=1)
    ux = (c[:, 1] * b2 - b[:, 1] * c2) / d
    uy = (b[:, 0] * c2 - c[:, 0] * b2) / d
    return a + np.column_stack((ux, uy)), np.hypot(ux, uy)


def voronoi_vertices(pattern: PointPattern, triangles: np.ndarray) -> VertexSet:
    """Circumcentres of Delaunay triangles lying inside the guard region."""
    if len(triangles) == 0:
        return VertexSet(np.empty((0, 2)), np.empty(0), np.empty((0, 3), dtype=np.int64), 0)
    centers, radii = circumcircles(pattern.points, triangles)
    keep = np.hypot(centers[:, 0], centers[:, 1]) < pattern.window.inner_radius
    return VertexSet(centers[keep], radii[keep], triangles[keep], int((~keep).sum()))


def dump_pattern(pattern: Union[PointPattern, np.ndarray], path) -> None:
    """Write one ``x y`` line per point."""
    pts = pattern.points if isinstance(pattern, PointPattern) else np.asarray(pattern)
    with open(path, "w") as fh:
        for x, y in pts:
            fh.write(f"{float(x)!r} {float(y)!r}\n")


def load_pattern(path) -> np.ndarray:
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    return np.array([[float(a), float(b)] for a, b in rows]).reshape(-1, 2)
