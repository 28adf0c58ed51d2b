"""Monte-Carlo estimation on simulated Poisson networks.

Each realization samples base stations in a disk, locates the Voronoi
vertices inside the guard region (the worst-case users), draws an
independent exponential fade for every vertex/base-station link and
records the per-vertex SIR. Coverage and spectral-efficiency estimates for
any threshold are then computed from the stored SIR samples, so a whole
threshold sweep shares one set of realizations.

Realization ``i`` uses the Philox substream keyed by ``(master_seed, i)``,
so results do not depend on how realizations are spread over workers.
"""
from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ._rng import substream
from .analytic import LN2, NetworkParams, Threshold, _lin
from .geometry import (
    DegeneratePattern,
    Window,
    delaunay,
    get_kernels,
    sample_ppp,
    voronoi_vertices,
)

__all__ = [
    "SimConfig",
    "Estimate",
    "NoSamples",
    "Realization",
    "SimulationRun",
    "run_simulation",
    "exterior_interference",
    "truncation_bias_bound",
    "simulate_worst_coverage",
    "simulate_cs_coverage",
    "simulate_worst_spectral",
    "simulate_cs_spectral",
    "simulate_typical_coverage",
    "estimate_vertex_intensity",
    "sample_circumradii",
]

METRICS = ("worst", "worst-cs", "typical")
_MAX_RESAMPLE = 64
_EXTERIOR_NODES = 256


class NoSamples(RuntimeError):
    """No guard-region vertex was found in any realization."""


@dataclass(frozen=True)
class SimConfig:
    """Monte-Carlo settings.

    ``far_field="mean"`` adds the expected interference of the unsampled
    plane outside the window to every receiver; ``"none"`` leaves the
    window truncation in place.
    """

    params: NetworkParams = field(default_factory=NetworkParams)
    window: Optional[Window] = None
    realizations: int = 500
    master_seed: int = 1
    max_vertices: Optional[int] = None
    far_field: str = "mean"
    backend: Optional[str] = None

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.max_vertices is not None and self.max_vertices < 1:
            raise ValueError("max_vertices must be >= 1")
        if self.far_field not in ("mean", "none"):
            raise ValueError(f"far_field must be 'mean' or 'none', got {self.far_field!r}")
        if self.window is None:
            object.__setattr__(self, "window", Window.default(self.params.lam))


class Estimate(NamedTuple):
    mean: float
    std_error: float
    n: int

    def scaled(self, factor: float) -> "Estimate":
        return Estimate(self.mean * factor, self.std_error * factor, self.n)


class Realization(NamedTuple):
    """Per-realization samples; SIR arrays are indexed by guard-region vertex."""

    sir_worst: np.ndarray
    sir_cs: np.ndarray
    sir_typical: float
    circumradius: np.ndarray
    nearest_distance: float
    n_points: int
    n_vertices: int


def exterior_interference(s, window: Window, p: NetworkParams):
    """Mean interference at distance ``s`` from the centre due to base stations
    outside the window.

    ``(lam/mu) * integral_0^{2pi} l(theta)**(2 - alpha) / (alpha - 2) dtheta``
    where ``l`` is the distance from the receiver to the window edge along
    ``theta``; the periodic integrand makes the trapezoid rule spectrally
    accurate.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    theta = (np.arange(_EXTERIOR_NODES) + 0.5) * (2.0 * math.pi / _EXTERIOR_NODES)
    R = window.radius
    sc = s[:, None] * np.cos(theta)[None, :]
    ss = s[:, None] * np.sin(theta)[None, :]
    ell = -sc + np.sqrt(R * R - ss * ss)
    a = p.alpha
    vals = ell ** (2.0 - a) / (a - 2.0)
    return p.lam / p.mu * vals.mean(axis=1) * 2.0 * math.pi


def truncation_bias_bound(window: Window, p: NetworkParams) -> float:
    """``2 pi lam guard**(2-alpha) / ((alpha-2) mu)``: mean interference
    beyond the guard distance, bounding what the window can leave out for
    any retained vertex."""
    a = p.alpha
    return 2.0 * math.pi * p.lam * window.guard ** (2.0 - a) / ((a - 2.0) * p.mu)


def _sample_pattern(cfg: SimConfig, index: int):
    for attempt in range(_MAX_RESAMPLE):
        rng = substream(cfg.master_seed, index, attempt)
        try:
            return rng, sample_ppp(cfg.params.lam, cfg.window, rng)
        except DegeneratePattern:
            continue
    raise DegeneratePattern(f"realization {index}: no pattern with >= 3 points after {_MAX_RESAMPLE} draws")


def simulate_realization(cfg: SimConfig, index: int) -> Realization:
    p = cfg.params
    rng, pattern = _sample_pattern(cfg, index)
    pts = pattern.points
    kern = get_kernels(cfg.backend)
    verts = voronoi_vertices(pattern, delaunay(pattern, backend=cfg.backend))
    pos = verts.positions
    gens = verts.generators
    radii = verts.circumradius
    if cfg.max_vertices is not None:
        pos, gens, radii = pos[: cfg.max_vertices], gens[: cfg.max_vertices], radii[: cfg.max_vertices]
    nv, n = len(radii), len(pts)

    fades = rng.standard_exponential((nv, n)) / p.mu
    total = kern.path_gain_sums(np.ascontiguousarray(pos), pts, fades, p.alpha)
    noise = np.full(nv, p.sigma2)
    if cfg.far_field == "mean" and nv:
        noise += exterior_interference(np.hypot(pos[:, 0], pos[:, 1]), cfg.window, p)
    rows = np.arange(nv)[:, None]
    gdist = np.hypot(pos[:, None, 0] - pts[gens, 0], pos[:, None, 1] - pts[gens, 1])
    near = fades[rows, gens] * gdist ** (-p.alpha)
    # lowest-index generator serves; the fades are exchangeable
    serving = near[:, 0]
    sir_worst = serving / (noise + (total - serving))
    sir_cs = near.max(axis=1) / (noise + (total - near.sum(axis=1)))

    # typical user at the origin, served by its nearest base station
    g_typ = rng.standard_exponential(n) / p.mu
    d = np.hypot(pts[:, 0], pts[:, 1])
    k = int(np.argmin(d))
    recv = g_typ * d ** (-p.alpha)
    typ_noise = p.sigma2
    if cfg.far_field == "mean":
        typ_noise += float(exterior_interference(0.0, cfg.window, p)[0])
    sir_typ = float(recv[k] / (typ_noise + (math.fsum(recv) - recv[k])))
    return Realization(sir_worst, sir_cs, sir_typ, radii, float(d[k]), n, nv)


def _batch_mean_stderr(sums: np.ndarray, counts: np.ndarray) -> tuple[float, float]:
    total_n = counts.sum()
    mean = float(sums.sum() / total_n)
    k = len(counts)
    if k < 2:
        return mean, math.nan
    resid = sums - mean * counts
    nbar = total_n / k
    se = math.sqrt(float((resid ** 2).sum()) / (k * (k - 1))) / nbar
    return mean, se


def _binomial_floor(hits: float, n: int) -> float:
    # Agresti-Coull standard error; stays positive when no hit was observed
    pt = (hits + 2.0) / (n + 4.0)
    return math.sqrt(pt * (1.0 - pt) / (n + 4.0))


@dataclass
class SimulationRun:
    """Stored samples from all realizations of one configuration."""

    cfg: SimConfig
    realizations: list

    @property
    def n_vertices(self) -> int:
        return int(sum(r.n_vertices for r in self.realizations))

    def _per_vertex(self, metric: str) -> list:
        if metric == "worst":
            return [r.sir_worst for r in self.realizations]
        if metric == "worst-cs":
            return [r.sir_cs for r in self.realizations]
        if metric == "typical":
            return [np.array([r.sir_typical]) for r in self.realizations]
        raise ValueError(f"unknown metric {metric!r}")

    def _estimate(self, values: list, probability: bool) -> Estimate:
        counts = np.array([len(v) for v in values], dtype=float)
        n = int(counts.sum())
        if n == 0:
            raise NoSamples("no guard-region vertices in any realization")
        sums = np.array([math.fsum(v) for v in values])
        mean, se = _batch_mean_stderr(sums, counts)
        if probability:
            floor = _binomial_floor(sums.sum(), n)
            se = floor if math.isnan(se) else max(se, floor)
        elif math.isnan(se):
            pooled = np.concatenate(values)
            se = float(pooled.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return Estimate(mean, se, n)

    def coverage(self, gamma: Threshold, metric: str = "worst") -> Estimate:
        g = _lin(gamma)
        return self._estimate([(v > g).astype(float) for v in self._per_vertex(metric)], True)

    def coverage_sweep(self, gammas: Sequence[float], metric: str = "worst") -> list:
        return [self.coverage(g, metric) for g in gammas]

    def spectral(self, metric: str = "worst") -> Estimate:
        """Mean ``ln(1 + SIR)`` in nats."""
        return self._estimate([np.log1p(v) for v in self._per_vertex(metric)], False)

    def vertex_intensity(self) -> Estimate:
        area = self.cfg.window.inner_area
        dens = np.array([r.n_vertices / area for r in self.realizations])
        k = len(dens)
        se = float(dens.std(ddof=1) / math.sqrt(k)) if k > 1 else math.nan
        return Estimate(float(dens.mean()), se, self.n_vertices)

    def circumradii(self) -> np.ndarray:
        return np.concatenate([r.circumradius for r in self.realizations])

    def nearest_distances(self) -> np.ndarray:
        return np.array([r.nearest_distance for r in self.realizations])


def run_simulation(cfg: SimConfig, workers: int = 1) -> SimulationRun:
    """Simulate every realization of ``cfg``; ``workers > 1`` uses processes.

    Results are identical for any ``workers``.
    """
    job = functools.partial(simulate_realization, cfg)
    indices = range(cfg.realizations)
    if workers <= 1:
        reals = [job(i) for i in indices]
    else:
        chunk = max(1, cfg.realizations // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reals = list(pool.map(job, indices, chunksize=chunk))
    return SimulationRun(cfg, reals)


@functools.lru_cache(maxsize=4)
def _cached_run(cfg: SimConfig, workers: int) -> SimulationRun:
    return run_simulation(cfg, workers)


def simulate_worst_coverage(cfg: SimConfig, gamma: Threshold, workers: int = 1) -> Estimate:
    return _cached_run(cfg, workers).coverage(gamma, "worst")


def simulate_cs_coverage(cfg: SimConfig, gamma: Threshold, workers: int = 1) -> Estimate:
    return _cached_run(cfg, workers).coverage(gamma, "worst-cs")


def simulate_typical_coverage(cfg: SimConfig, gamma: Threshold, workers: int = 1) -> Estimate:
    return _cached_run(cfg, workers).coverage(gamma, "typical")


def simulate_worst_spectral(cfg: SimConfig, workers: int = 1) -> Estimate:
    """Worst-case spectral efficiency in nats/s/Hz (``.scaled(1/ln 2)`` for bps/Hz)."""
    return _cached_run(cfg, workers).spectral("worst")


def simulate_cs_spectral(cfg: SimConfig, workers: int = 1) -> Estimate:
    return _cached_run(cfg, workers).spectral("worst-cs")


def estimate_vertex_intensity(cfg: SimConfig, workers: int = 1) -> Estimate:
    return _cached_run(cfg, workers).vertex_intensity()


def sample_circumradii(cfg: SimConfig, workers: int = 1) -> np.ndarray:
    return _cached_run(cfg, workers).circumradii()


def to_bps(est: Estimate) -> Estimate:
    return est.scaled(1.0 / LN2)
