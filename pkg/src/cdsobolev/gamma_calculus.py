"""Pointwise curvature-dimension certification and Bochner diagnostics.

The CD(rho, n) condition is the pointwise inequality

    Gamma_2(f) >= rho * Gamma(f) + (Lf)^2 / n,

checked here on every grid node.  On the sphere-radial model the Gamma_2
field additionally decomposes into the squared radial Hessian norm plus the
Ricci term; ``bochner_residual`` measures how well the discrete operators
reproduce that decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedKind
from .model_space import (ModelSpace, ScalarField, _check_same_space, _diff1,
                          _diff2, apply_L, gamma, gamma2)

# cells dropped at each pole when taking interior sup-norms; the composed
# Gamma_2 stencil touches two ghost layers there
INTERIOR_MARGIN = 2


@dataclass(frozen=True)
class GammaReport:
    """Pointwise Gamma, Gamma_2, L values and the CD(rho, n) margin."""

    gamma_field: ScalarField
    gamma2_field: ScalarField
    l_field: ScalarField
    cd_margin_field: ScalarField
    cd_margin_min: float
    rho: float
    n: float

    def to_json_dict(self) -> dict:
        return {"cd_margin_min": self.cd_margin_min, "rho": self.rho,
                "n": self.n}


def cd_margin(space: ModelSpace, f: ScalarField,
              rho: float | None = None, n: float | None = None) -> GammaReport:
    """Evaluate Gamma_2(f) - rho*Gamma(f) - (Lf)^2/n on every node.

    rho and n default to the space's curvature data; passing explicit values
    supports monotonicity studies in n.
    """
    if space.kind == "circle":
        raise UnsupportedKind("the circle carries no positive CD bound")
    _check_same_space(space, f)
    rho = space.rho if rho is None else float(rho)
    n = space.n if n is None else float(n)
    gf = gamma(space, f, f)
    g2f = gamma2(space, f)
    lf = apply_L(space, f)
    margin = g2f.values - rho * gf.values - lf.values ** 2 / n
    mf = space.field(margin)
    return GammaReport(gamma_field=gf, gamma2_field=g2f, l_field=lf,
                       cd_margin_field=mf, cd_margin_min=float(margin.min()),
                       rho=rho, n=n)


def _radial_hessian_terms(space: ModelSpace, f: ScalarField):
    fp = _diff1(space, f.values)
    fpp = _diff2(space, f.values)
    cot = 1.0 / np.tan(space.grid)
    return fp, fpp, cot


def bochner_residual(space: ModelSpace, f: ScalarField) -> float:
    """Interior sup-norm of Gamma_2(f) minus its radial Bochner bracket.

    The bracket (f'')^2 + (d-1)(cot f')^2 + (d-1)(f')^2 is the analytic
    Hessian-norm-plus-Ricci form for rotationally symmetric functions on the
    unit round d-sphere; the residual is expected O(h^2).
    """
    if space.kind != "sphere_radial":
        raise UnsupportedKind("bochner_residual is sphere_radial only")
    _check_same_space(space, f)
    d = space.d
    fp, fpp, cot = _radial_hessian_terms(space, f)
    bracket = fpp ** 2 + (d - 1.0) * (cot * fp) ** 2 + (d - 1.0) * fp ** 2
    resid = gamma2(space, f).values - bracket
    m = INTERIOR_MARGIN
    return float(np.abs(resid[m:-m]).max())


def cauchy_schwarz_margin(space: ModelSpace, f: ScalarField) -> ScalarField:
    """Pointwise ||Hess f||^2 - (Delta f)^2/d in radial form; >= -O(h^2)."""
    if space.kind != "sphere_radial":
        raise UnsupportedKind("cauchy_schwarz_margin is sphere_radial only")
    _check_same_space(space, f)
    d = space.d
    fp, fpp, cot = _radial_hessian_terms(space, f)
    hess_sq = fpp ** 2 + (d - 1.0) * (cot * fp) ** 2
    lap = fpp + (d - 1.0) * cot * fp
    return space.field(hess_sq - lap ** 2 / d)
