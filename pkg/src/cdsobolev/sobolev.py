"""Sobolev norms, deficits, sharp constants and the extremal family.

On a space satisfying CD(rho, n) the sharp inequality reads, with
q = 2n/(n-2),

    (||v||_q^2 - ||v||_2^2) / (q - 2)  <=  (1/n) ((n-1)/rho) ||grad v||_2^2.

``sobolev_deficit`` returns both sides and their gap; the gap vanishes on
constants and, on the sphere, on the family (beta - cos theta)^{-(d-2)/2}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidExponent, InvalidParameter
from .model_space import ModelSpace, ScalarField, gamma, integrate


@dataclass(frozen=True)
class SobolevReport:
    q: float
    n: float
    rho: float
    lq_norm_sq: float
    l2_norm_sq: float
    grad_norm_sq: float
    lhs: float
    rhs: float
    deficit: float
    deficit_rel: float

    def to_json_dict(self) -> dict:
        return {
            "q": self.q, "n": self.n, "rho": self.rho,
            "lq_norm_sq": self.lq_norm_sq, "l2_norm_sq": self.l2_norm_sq,
            "grad_norm_sq": self.grad_norm_sq, "lhs": self.lhs,
            "rhs": self.rhs, "deficit": self.deficit,
            "deficit_rel": self.deficit_rel,
        }


def critical_exponent(n: float) -> float:
    """2* = 2n/(n-2)."""
    return 2.0 * n / (n - 2.0)


def lq_norm(space: ModelSpace, v: ScalarField, q: float) -> float:
    """(int |v|^q dnu)^(1/q)."""
    if q < 1.0:
        raise InvalidExponent(f"q = {q} < 1")
    mom = integrate(space, space.field(np.abs(v.values) ** q))
    return float(mom ** (1.0 / q))


def grad_norm_sq(space: ModelSpace, v: ScalarField) -> float:
    """||grad v||_2^2 = int Gamma(v, v) dnu, via the shared Gamma operator."""
    return integrate(space, gamma(space, v, v))


def sobolev_deficit(space: ModelSpace, v: ScalarField, q: float) -> SobolevReport:
    """Both sides of the sharp inequality at exponent q and their gap."""
    qc = critical_exponent(space.n)
    if not (2.0 < q <= qc):
        raise InvalidExponent(f"q = {q} outside (2, {qc}]")
    lq_sq = lq_norm(space, v, q) ** 2
    l2_sq = integrate(space, space.field(v.values ** 2))
    gsq = grad_norm_sq(space, v)
    lhs = (lq_sq - l2_sq) / (q - 2.0)
    rhs = (space.n - 1.0) / (space.n * space.rho) * gsq
    deficit = rhs - lhs
    rel = deficit / rhs if rhs > 0.0 else 0.0
    return SobolevReport(q=q, n=space.n, rho=space.rho, lq_norm_sq=lq_sq,
                         l2_norm_sq=l2_sq, grad_norm_sq=gsq, lhs=lhs,
                         rhs=rhs, deficit=deficit, deficit_rel=rel)


def extremal_field(space: ModelSpace, beta: float) -> ScalarField:
    """The sphere extremal profile theta -> (beta - cos theta)^(-(d-2)/2)."""
    if space.kind != "sphere_radial" or space.d < 3:
        raise InvalidParameter("extremal family needs sphere_radial with d >= 3")
    if beta <= 1.0 + 1e-6:
        raise InvalidParameter(f"beta = {beta} too close to the singular value 1")
    expo = -(space.d - 2.0) / 2.0
    return space.field((beta - np.cos(space.grid)) ** expo)


def sharp_constants(n: float, rho: float) -> tuple[float, float]:
    """((n-1)/(n rho), 4(n-1)/(n(n-2) rho)): inequality coefficient and A*."""
    if n <= 2.0 or rho <= 0.0:
        raise InvalidParameter(f"need n > 2 and rho > 0, got n={n}, rho={rho}")
    coeff = (n - 1.0) / (n * rho)
    a_star = 4.0 * (n - 1.0) / (n * (n - 2.0) * rho)
    return coeff, a_star
