"""Continuum-random-tree reference laws and scaling predictions.

Closed-form moments for three functionals of the CRT coded by the normalized
Brownian excursion (root-to-point distance = excursion value):

    diameter   -- theta-type series density, moments by adaptive quadrature
    radius     -- max of the excursion; E[R^p] = 2^{-p/2} p(p-1) Gamma(p/2) zeta(p)
    height_u   -- excursion value at an independent uniform time;
                  density 4x e^{-2x^2}, E[H^p] = 2^{-p/2} Gamma(1 + p/2)

``predict`` combines these with the scaling constants of an offspring law to
produce the asymptotic constants that desk-scale experiments are checked
against: E[stat(size n)] ~ predict(mu, stat, p) * n^{p/2}.

A transcription caveat on the diameter series, kept verbatim by design: its
zeroth moment evaluates to 1/(2*sqrt(2)) ~ 0.353553 rather than 1, and it dips
negative past x ~ 8.3, yet its first moment equals 2*sqrt(2*pi)/3 exactly --
the expected diameter used everywhere downstream.  Tests report the measured
integrals rather than renormalizing.
"""

from __future__ import annotations

import math

from scipy.integrate import quad
from scipy.special import gamma as _gamma, zeta as _zeta

from dissectree.offspring import OffspringDistribution, constants

__all__ = [
    "diameter_density",
    "diam_moment",
    "radius_density",
    "radius_moment",
    "height_u_density",
    "height_u_moment",
    "predict",
    "EXPECTED_DIAMETER",
    "EXPECTED_RADIUS",
    "EXPECTED_HEIGHT_U",
]

EXPECTED_DIAMETER = 2.0 * math.sqrt(2.0 * math.pi) / 3.0   # first diameter moment
EXPECTED_RADIUS = math.sqrt(math.pi / 2.0)
EXPECTED_HEIGHT_U = math.sqrt(math.pi / 2.0) / 2.0

_FOUR_PI = 4.0 * math.pi
_DIAM_PREFACTOR = 2.0 * math.sqrt(2.0 * math.pi) / 3.0


def diameter_density(x: float) -> float:
    """Diameter density series.

    density(x) = (2 sqrt(2 pi)/3) * sum_{k>=1} e^{-b} *
             [ (4/x^4)(4b^4 - 36b^3 + 75b^2 - 30b) + (2/x^2)(4b^3 - 10b^2) ]
    with b = (4 pi k / x)^2.  Terms decay like e^{-(4 pi k / x)^2}, so the sum
    is cut once b exceeds 700 (exp underflows well below 1e-300).
    """
    if x <= 0.0:
        return 0.0
    inv_x2 = 1.0 / (x * x)
    total = 0.0
    k = 1
    while True:
        b = (_FOUR_PI * k) ** 2 * inv_x2
        if b > 700.0:
            break
        poly = 4.0 * inv_x2 * inv_x2 * (((4.0 * b - 36.0) * b + 75.0) * b - 30.0) * b \
            + 2.0 * inv_x2 * (4.0 * b - 10.0) * b * b
        total += poly * math.exp(-b)
        k += 1
    return _DIAM_PREFACTOR * total


def diam_moment(p: float) -> float:
    """p-th moment of the diameter series by adaptive quadrature.

    The integrand is negligible below x = 2 and beyond x = 40; the quadrature
    is split there to keep the oscillation-free pieces cheap.
    """
    if p < 0:
        raise ValueError("moment order must be nonnegative")

    def integrand(x: float) -> float:
        return x ** p * diameter_density(x) if p > 0 else diameter_density(x)

    total = 0.0
    for lo, hi in ((0.0, 2.5), (2.5, 12.0), (12.0, 40.0)):
        val, _ = quad(integrand, lo, hi, limit=200, epsabs=1e-12, epsrel=1e-12)
        total += val
    return total


def radius_density(x: float) -> float:
    """Density of the excursion maximum: 2 sum_k (16 k^4 x^3 - 12 k^2 x) e^{-2 k^2 x^2}.

    Used as the independent quadrature oracle for radius_moment.
    """
    if x <= 0.0:
        return 0.0
    total = 0.0
    k = 1
    while True:
        e = 2.0 * k * k * x * x
        if e > 700.0:
            break
        total += (16.0 * k ** 4 * x ** 3 - 12.0 * k * k * x) * math.exp(-e)
        k += 1
    return 2.0 * total


def radius_moment(p: float) -> float:
    """E[R^p] = 2^{-p/2} p (p-1) Gamma(p/2) zeta(p), with the p = 1 limit
    (p-1) zeta(p) -> 1 giving sqrt(pi/2)."""
    if p < 0:
        raise ValueError("moment order must be nonnegative")
    if p == 0:
        return 1.0
    if p == 1.0:
        return math.sqrt(math.pi / 2.0)
    return 2.0 ** (-p / 2.0) * p * (p - 1.0) * _gamma(p / 2.0) * float(_zeta(p))


def height_u_density(x: float) -> float:
    """Density 4 x e^{-2 x^2} of the excursion value at a uniform time."""
    if x <= 0.0:
        return 0.0
    return 4.0 * x * math.exp(-2.0 * x * x)


def height_u_moment(p: float) -> float:
    """E[H^p] = 2^{-p/2} Gamma(1 + p/2)."""
    if p < 0:
        raise ValueError("moment order must be nonnegative")
    return 2.0 ** (-p / 2.0) * _gamma(1.0 + p / 2.0)


_STATISTICS = ("diameter", "radius", "height_u", "tree_diameter",
               "loop_diameter", "loopbar_diameter")


def predict(mu: OffspringDistribution, statistic: str, p: float = 1.0) -> float:
    """Asymptotic constant: E[stat(n)] / n^{p/2} -> predict(mu, stat, p).

    diameter/radius/height_u refer to graph distances on a size-n dissection
    (constant c); tree_diameter to its dual tree (constant c_tree);
    loop_diameter/loopbar_diameter to the loop graphs of a size-n conditioned
    tree (constants c_loop, c_loopbar).
    """
    if statistic not in _STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; expected one of {_STATISTICS}")
    k = constants(mu)
    if statistic == "diameter":
        return k.c ** p * diam_moment(p)
    if statistic == "radius":
        return k.c ** p * radius_moment(p)
    if statistic == "height_u":
        return k.c ** p * height_u_moment(p)
    if statistic == "tree_diameter":
        return k.c_tree ** p * diam_moment(p)
    if statistic == "loop_diameter":
        return k.c_loop ** p * diam_moment(p)
    return k.c_loopbar ** p * diam_moment(p)
