"""Root-system constants for A_{d-1} and Killing-form geometry on the torus.

Conventions used throughout the package:

* the Killing-form inner product is (X, Y) = -2d tr(XY), so a torus element
  X_phi = i diag(phi_1, ..., phi_{d-1}, -sum phi) has squared norm
  2d (sum_j phi_j^2 + (sum_j phi_j)^2);
* every "log" is a natural logarithm;
* the heat-kernel prefactor C(d, sigma)/|W| is only ever exposed in log
  space because C(d, sigma) grows like sigma^{-(d^2-1)/2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

TWO_PI = 2.0 * math.pi


class InvalidDimensionError(ValueError):
    """Dimension argument outside the supported range (d >= 2)."""


class InvalidParameterError(ValueError):
    """Numeric argument outside its documented domain."""


def _check_dimension(d) -> int:
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise InvalidDimensionError(f"d must be an integer >= 2, got {d!r}")
    return d


def _check_sigma(sigma) -> float:
    s = float(sigma)
    if not math.isfinite(s) or s <= 0.0:
        raise InvalidParameterError(f"sigma must be a finite positive real, got {sigma!r}")
    return s


@dataclass(frozen=True)
class GroupConstants:
    """Exact structural constants of SU(d) / A_{d-1}."""

    d: int
    m: int
    l: int
    N: int
    weyl_order: int
    cartan_det: int
    weyl_norm_sq: Fraction


def group_constants(d: int) -> GroupConstants:
    """Exact constants: m = d(d-1)/2 positive roots, rank l = d-1,
    dimension N = d^2-1, |W| = d!, Cartan determinant d, and the squared
    Weyl-vector norm (d^2-1)/24 as an exact rational."""
    _check_dimension(d)
    return GroupConstants(
        d=d,
        m=d * (d - 1) // 2,
        l=d - 1,
        N=d * d - 1,
        weyl_order=math.factorial(d),
        cartan_det=d,
        weyl_norm_sq=Fraction(d * d - 1, 24),
    )


def weyl_vector_diag(d: int) -> list[Fraction]:
    """Diagonal of X_delta / i: entries (d+1)/(4d) - k/(2d) for k = 1..d."""
    _check_dimension(d)
    return [Fraction(d + 1, 4 * d) - Fraction(k, 2 * d) for k in range(1, d + 1)]


def _wrap_angle(x: float) -> float:
    """Map a finite angle to (-pi, pi]."""
    y = math.remainder(x, TWO_PI)
    if y <= -math.pi:
        y = math.pi
    return y


@dataclass(frozen=True)
class TorusPoint:
    """A point of the maximal torus, stored via d-1 free angles.

    Angles are canonicalized to (-pi, pi] on construction. The implied
    last eigenphase is -sum(phi) (not wrapped; it only ever enters through
    exp(i * theta) or through differences that are wrapped on use).
    """

    d: int
    phi: tuple[float, ...] = field(default=())

    def __post_init__(self):
        _check_dimension(self.d)
        raw = tuple(float(x) for x in self.phi)
        if len(raw) != self.d - 1:
            raise InvalidParameterError(
                f"phi must have length d-1 = {self.d - 1}, got {len(raw)}"
            )
        if not all(math.isfinite(x) for x in raw):
            raise InvalidParameterError("phi entries must be finite")
        object.__setattr__(self, "phi", tuple(_wrap_angle(x) for x in raw))

    def eigenphases(self) -> tuple[float, ...]:
        """All d eigenphases including the implied last one."""
        return self.phi + (-math.fsum(self.phi),)

    def min_gap(self) -> float:
        """Smallest pairwise circular distance between eigenphases."""
        th = self.eigenphases()
        best = math.inf
        for i in range(self.d):
            for j in range(i + 1, self.d):
                gap = abs(math.remainder(th[i] - th[j], TWO_PI))
                if gap < best:
                    best = gap
        return best

    def is_regular(self, tol: float = 0.0) -> bool:
        return self.min_gap() > tol


def log_prefactor(d: int, sigma: float) -> float:
    """log(C(d, sigma)/|W|) for the closed-form prefactor

    sqrt(d) (2d)^{(d-1)/2 + m} / prod_{k<=d} k! * (2 pi)^{d-1+m}
    * e^{(d^2-1) sigma / 24} * (4 pi sigma)^{-(d^2-1)/2},

    assembled in log space so it stays finite down to sigma = 1e-12."""
    _check_dimension(d)
    s = _check_sigma(sigma)
    m = d * (d - 1) // 2
    n = d * d - 1
    log_fact = math.fsum(math.lgamma(k + 1) for k in range(1, d + 1))
    return math.fsum(
        [
            0.5 * math.log(d),
            ((d - 1) / 2.0 + m) * math.log(2.0 * d),
            -log_fact,
            (d - 1 + m) * math.log(TWO_PI),
            (n / 24.0) * s,
            -(n / 2.0) * math.log(4.0 * math.pi * s),
        ]
    )


def killing_norm_sq(d: int, phi: TorusPoint, k=None) -> float:
    """||X_phi + X_k||^2 = 2d (sum_j (phi_j + 2 pi k_j)^2 + (sum_j ...)^2),
    where X_k is the coroot-lattice element for the integer vector k."""
    _check_dimension(d)
    if phi.d != d:
        raise InvalidParameterError(f"TorusPoint has d={phi.d}, expected {d}")
    if k is None:
        psi = phi.phi
    else:
        kk = tuple(k)
        if len(kk) != d - 1 or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in kk
        ):
            raise InvalidParameterError("k must be an integer vector of length d-1")
        psi = tuple(p + TWO_PI * v for p, v in zip(phi.phi, kk))
    sq = math.fsum(p * p for p in psi)
    tot = math.fsum(psi)
    return 2.0 * d * (sq + tot * tot)


def eps_tilde(eps: float) -> float:
    """Geodesic radius 2 arcsin(eps/2) matching a chordal radius eps."""
    e = float(eps)
    if not math.isfinite(e) or e <= 0.0 or e > 2.0:
        raise InvalidParameterError(f"eps must lie in (0, 2], got {eps!r}")
    return 2.0 * math.asin(e / 2.0)
