"""Closed-form and quadrature evaluation of worst-case-user performance.

A worst-case mobile user sits at a vertex of the Poisson-Voronoi
tessellation of the base-station process and is equidistant from its three
nearest base stations. Every quantity below is a one-dimensional integral
(or a closed form of one) and is evaluated through
:mod:`worstcase.quadrature`.

Conventions: fades ``g`` are exponential with rate ``mu`` (mean ``1/mu``,
which already folds in the transmit power ``1/mu``); thresholds are linear
unless a name says ``db``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .quadrature import (
    DEFAULT_SETTINGS,
    QuadratureSettings,
    integrate_semi_infinite,
)

__all__ = [
    "NetworkParams",
    "SirThreshold",
    "InterferenceDiverges",
    "SpectralEfficiency",
    "TYPICAL_SPECTRAL_BPS",
    "db_to_linear",
    "linear_to_db",
    "rho",
    "kappa",
    "coverage_worst_general",
    "coverage_worst_il",
    "coverage_typical_il",
    "coverage_cs",
    "coverage_cs_integral",
    "spectral_worst",
    "spectral_cs",
    "spectral_typical_baseline",
    "spectral_ratio",
    "spectral_worst_integrand",
    "spectral_cs_integrand",
    "vertex_distance_pdf",
    "vertex_distance_ccdf",
    "vertex_distance_cdf",
    "vertex_distance_mean",
    "nearest_distance_cdf",
    "laplace_interference",
    "laplace_interference_closed",
    "max_exp_ccdf",
]

LN2 = math.log(2.0)

#: Spectral efficiency of the typical user for alpha=4, interference limited.
TYPICAL_SPECTRAL_BPS = 2.15


class InterferenceDiverges(ValueError):
    """Aggregate interference is infinite for path-loss exponents <= 2."""


def _check_alpha(alpha: float) -> None:
    if not alpha > 2:
        raise InterferenceDiverges(f"interference diverges for alpha={alpha} (need alpha > 2)")


@dataclass(frozen=True)
class NetworkParams:
    """Physical model of the downlink.

    Attributes
    ----------
    lam : float
        Base-station intensity per unit area.
    alpha : float
        Path-loss exponent, must exceed 2.
    mu : float
        Fade rate; every link gain is exponential with mean ``1/mu``.
    sigma2 : float
        Noise power.
    """

    lam: float = 1.0
    alpha: float = 4.0
    mu: float = 1.0
    sigma2: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        _check_alpha(self.alpha)
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.sigma2 >= 0:
            raise ValueError(f"sigma2 must be non-negative, got {self.sigma2}")

    @property
    def interference_limited(self) -> bool:
        return self.sigma2 == 0

    @property
    def has_closed_forms(self) -> bool:
        """True when the alpha=4, noise-free closed forms apply."""
        return self.alpha == 4 and self.sigma2 == 0


def db_to_linear(db):
    if np.ndim(db):
        return np.power(10.0, np.asarray(db, dtype=float) / 10.0)
    return 10.0 ** (db / 10.0)


def linear_to_db(lin):
    if np.ndim(lin):
        return 10.0 * np.log10(lin)
    return 10.0 * math.log10(lin)


@dataclass(frozen=True)
class SirThreshold:
    """A strictly positive SIR threshold stored in linear units."""

    gamma_lin: float

    def __post_init__(self):
        if not self.gamma_lin > 0:
            raise ValueError(f"SIR threshold must be positive, got {self.gamma_lin}")

    @classmethod
    def from_db(cls, gamma_db: float) -> "SirThreshold":
        return cls(db_to_linear(float(gamma_db)))

    @property
    def gamma_db(self) -> float:
        return linear_to_db(self.gamma_lin)

    def __float__(self) -> float:
        return self.gamma_lin


Threshold = Union[float, SirThreshold]


def _lin(gamma) -> float:
    if isinstance(gamma, SirThreshold):
        return gamma.gamma_lin
    return gamma


def _rho_integrand(alpha: float):
    half = alpha / 2.0
    if half == 2.0:
        return lambda u: 1.0 / (1.0 + u * u)
    return lambda u: 1.0 / (1.0 + u ** half)


def rho(gamma: Threshold, alpha: float, method: str = "auto",
        settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Normalized interference exponent ``rho(gamma, alpha)``.

    ``gamma**(2/alpha) * integral_{gamma**(-2/alpha)}^inf du / (1 + u**(alpha/2))``.
    ``method="auto"`` uses the arctan closed form when ``alpha == 4`` and
    quadrature otherwise; ``"quadrature"`` forces the numerical route.
    """
    _check_alpha(alpha)
    g = _lin(gamma)
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed" or (method == "auto" and alpha == 4):
        if alpha != 4:
            raise ValueError("closed form exists only for alpha=4")
        g = np.asarray(g, dtype=float)
        if np.any(g < 0):
            raise ValueError("gamma must be non-negative")
        sq = np.sqrt(g)
        out = sq * np.arctan(sq)
        return float(out) if out.ndim == 0 else out
    if np.ndim(g):
        return np.array([rho(gi, alpha, "quadrature", settings) for gi in np.ravel(g)]).reshape(np.shape(g))
    if not g > 0:
        if g == 0:
            return 0.0
        raise ValueError("gamma must be non-negative")
    half = alpha / 2.0
    lower = g ** (-2.0 / alpha)
    # integral_T^inf u**(-alpha/2) du bounds the remainder
    tail = lambda T: T ** (1.0 - half) / (half - 1.0)
    integral = integrate_semi_infinite(_rho_integrand(alpha), lower, settings,
                                       tail_bound=tail, scale=max(1.0, lower))
    return g ** (2.0 / alpha) * integral


def kappa(gamma: Threshold):
    """``1 + rho(gamma, 4)``, written as ``1 + sqrt(g) * arctan(sqrt(g))``.

    Identical to ``1 + sqrt(g) * (pi/2 - arctan(1/sqrt(g)))`` for ``g > 0``
    and well defined at ``g = 0``. Accepts arrays.
    """
    g = np.asarray(_lin(gamma), dtype=float)
    if np.any(g < 0):
        raise ValueError("gamma must be non-negative")
    sq = np.sqrt(g)
    out = 1.0 + sq * np.arctan(sq)
    return float(out) if out.ndim == 0 else out


def coverage_worst_il(gamma: Threshold, alpha: float = 4.0):
    """Interference-limited worst-case coverage ``(1/((1+g)(1+rho)))**2``."""
    _check_alpha(alpha)
    g = _lin(gamma)
    k = kappa(g) if alpha == 4 else 1.0 + rho(g, alpha)
    if np.ndim(g):
        g = np.asarray(g, dtype=float)
    return (1.0 / ((1.0 + g) * k)) ** 2


def coverage_worst_general(p: NetworkParams, gamma: Threshold,
                           settings: QuadratureSettings = DEFAULT_SETTINGS,
                           rho_method: str = "auto") -> float:
    """Worst-case coverage with noise, for any ``alpha > 2``.

    Integrates over ``u = lam*pi*r**2`` so the domain no longer depends on
    ``lam``::

        integral_0^inf u exp(-u (1 + rho) - mu g sigma2 (u/(lam pi))**(alpha/2)) du / (1+g)**2
    """
    g = _lin(gamma)
    if not g > 0:
        raise ValueError("gamma must be positive")
    c = 1.0 + rho(g, p.alpha, rho_method, settings)
    pref = 1.0 / (1.0 + g) ** 2
    noise = p.mu * g * p.sigma2
    lp = p.lam * math.pi
    half = p.alpha / 2.0
    if noise == 0.0:
        f = lambda u: u * np.exp(-c * u)
    else:
        f = lambda u: u * np.exp(-c * u - noise * (u / lp) ** half)
    # the noise factor is <= 1, so the noise-free tail bounds the remainder
    tail = lambda T: math.exp(-c * T) * (T / c + 1.0 / c ** 2)
    val = integrate_semi_infinite(f, 0.0, settings, tail_bound=tail, scale=1.0 / c)
    return min(1.0, max(0.0, pref * val))


def coverage_typical_il(gamma: Threshold):
    """Typical-user coverage ``1/kappa(gamma)`` (alpha=4, no noise)."""
    return 1.0 / kappa(gamma)


def coverage_cs(gamma: Threshold):
    """Worst-case coverage under coordinated scheduling (alpha=4, no noise).

    ``3/kappa(g)**2 - 3/kappa(2g)**2 + 1/kappa(3g)**2``.
    """
    g = np.asarray(_lin(gamma), dtype=float)
    out = 3.0 / kappa(g) ** 2 - 3.0 / kappa(2.0 * g) ** 2 + 1.0 / kappa(3.0 * g) ** 2
    return float(out) if np.ndim(out) == 0 else out


def coverage_cs_integral(gamma: Threshold, lam: float = 1.0,
                         settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Coordinated-scheduling coverage by direct quadrature over the vertex distance.

    Averages ``3 exp(-lam pi r^2 rho(g)) - 3 exp(-lam pi r^2 rho(2g)) + exp(-lam pi r^2 rho(3g))``
    against the circumradius density. Serves as an independent route to
    :func:`coverage_cs`.
    """
    g = _lin(gamma)
    r1, r2, r3 = (rho(a * g, 4.0, "quadrature", settings) for a in (1, 2, 3))
    lp = lam * math.pi

    def f(r):
        x = lp * r * r
        return vertex_distance_pdf(r, lam) * (3 * np.exp(-x * r1) - 3 * np.exp(-x * r2) + np.exp(-x * r3))

    scale = 1.0 / math.sqrt(lp)
    tail = lambda T: 7.0 * vertex_distance_ccdf(T, lam)
    return integrate_semi_infinite(f, 0.0, settings, tail_bound=tail, scale=scale)


class SpectralEfficiency(NamedTuple):
    nats: float
    bps: float


def spectral_worst_integrand(t):
    """``(exp(-t) / kappa(exp(t) - 1))**2``; the coverage at ``g = e^t - 1``."""
    t = np.asarray(t, dtype=float)
    out = (np.exp(-t) / kappa(np.expm1(t))) ** 2
    return float(out) if np.ndim(out) == 0 else out


def spectral_cs_integrand(t):
    """``coverage_cs`` evaluated at ``g = e^t - 1``."""
    t = np.asarray(t, dtype=float)
    x = np.expm1(t)
    out = 3.0 / kappa(x) ** 2 + 1.0 / kappa(3.0 * x) ** 2 - 3.0 / kappa(2.0 * x) ** 2
    return float(out) if np.ndim(out) == 0 else out


def _cs_tail(T: float) -> float:
    # for x >= 1, arctan(sqrt(x)) >= pi/4 so 3/kappa(x)^2 <= 48/(pi^2 x)
    if T < LN2:
        return math.inf
    return 48.0 / math.pi ** 2 * -math.log1p(-math.exp(-T))


def spectral_worst(settings: QuadratureSettings = DEFAULT_SETTINGS) -> SpectralEfficiency:
    """Mean ``ln(1 + SIR)`` of the worst-case user, alpha=4, no noise."""
    nats = integrate_semi_infinite(spectral_worst_integrand, 0.0, settings,
                                   tail_bound=lambda T: 0.5 * math.exp(-2.0 * T))
    return SpectralEfficiency(nats, nats / LN2)


def spectral_cs(settings: QuadratureSettings = DEFAULT_SETTINGS) -> SpectralEfficiency:
    """Mean ``ln(1 + SIR)`` of the worst-case user under coordinated scheduling."""
    nats = integrate_semi_infinite(spectral_cs_integrand, 0.0, settings, tail_bound=_cs_tail)
    return SpectralEfficiency(nats, nats / LN2)


def spectral_typical_baseline() -> float:
    """Reference typical-user spectral efficiency in bps/Hz."""
    return TYPICAL_SPECTRAL_BPS


def spectral_ratio(bps: float) -> float:
    """Fraction of the typical-user spectral efficiency."""
    return bps / TYPICAL_SPECTRAL_BPS


def vertex_distance_pdf(r, lam: float):
    """Density ``2 (lam pi)^2 r^3 exp(-lam pi r^2)`` of the vertex circumradius."""
    r = np.asarray(r, dtype=float)
    lp = lam * math.pi
    out = 2.0 * lp * lp * r ** 3 * np.exp(-lp * r * r)
    return float(out) if out.ndim == 0 else out


def vertex_distance_ccdf(r, lam: float):
    """``P[r > R] = (1 + lam pi R^2) exp(-lam pi R^2)``."""
    r = np.asarray(r, dtype=float)
    x = lam * math.pi * r * r
    out = (1.0 + x) * np.exp(-x)
    return float(out) if out.ndim == 0 else out


def vertex_distance_cdf(r, lam: float):
    r = np.asarray(r, dtype=float)
    x = lam * math.pi * r * r
    # 1 - (1+x) e^-x, written to keep precision near 0
    out = -np.expm1(-x) - x * np.exp(-x)
    return float(out) if out.ndim == 0 else out


def vertex_distance_mean(lam: float) -> float:
    """Closed-form mean circumradius, ``3 / (4 sqrt(lam))``."""
    return 0.75 / math.sqrt(lam)


def nearest_distance_cdf(r, lam: float):
    """Distance from a fixed location to the nearest base station."""
    r = np.asarray(r, dtype=float)
    out = -np.expm1(-lam * math.pi * r * r)
    return float(out) if out.ndim == 0 else out


def laplace_interference(s: float, r: float, p: NetworkParams,
                         settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Laplace transform of the interference seen at a vertex of radius ``r``.

    Two co-distant interferers contribute ``(mu/(mu + s r^-alpha))^2``; the
    rest of the process lies outside the circumcircle and contributes its
    probability generating functional, integrated numerically.
    """
    if not s >= 0:
        raise ValueError("s must be non-negative")
    if not r > 0:
        raise ValueError("r must be positive")
    if s == 0:
        return 1.0
    a, mu = p.alpha, p.mu
    near = (mu / (mu + s * r ** (-a))) ** 2

    def f(v):
        w = s * v ** (-a)
        return w / (mu + w) * v

    tail = lambda T: s / mu * T ** (2.0 - a) / (a - 2.0)
    integral = integrate_semi_infinite(f, r, settings, tail_bound=tail, scale=r)
    return near * math.exp(-2.0 * p.lam * math.pi * integral)


def laplace_interference_closed(gamma: Threshold, r: float, p: NetworkParams,
                                settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """The transform above at ``s = mu * gamma * r**alpha``, in closed form."""
    g = _lin(gamma)
    return (1.0 / (1.0 + g)) ** 2 * math.exp(-p.lam * math.pi * r * r * rho(g, p.alpha, settings=settings))


def max_exp_ccdf(g, n: int, mu: float):
    """``P[max(g_0..g_n) > g]`` for i.i.d. exponential(``mu``) fades."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not mu > 0:
        raise ValueError("mu must be positive")
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise ValueError("g must be non-negative")
    with np.errstate(divide="ignore"):
        out = -np.expm1((n + 1) * np.log1p(-np.exp(-mu * g)))
    return float(out) if out.ndim == 0 else out
