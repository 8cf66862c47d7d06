"""Discretized 1-D weighted measure spaces and their differential operators.

A model space is a cell-centered uniform grid on (0, pi) (or (0, 2*pi) for
the circle) carrying a normalized weighted measure nu with density
exp(-W)/Z.  Three kinds are supported:

* ``sphere_radial`` -- the radial part of the round d-sphere,
  W(theta) = -(d-1) log sin(theta), generator L f = f'' + (d-1) cot(theta) f';
* ``jacobi``        -- the same weight with a real effective dimension n > 2,
  realizing CD(n-1, n);
* ``circle``        -- uniform weight, periodic closure, no positive
  curvature bound (used by the flow modules only).

Derivatives are centered second-order finite differences with even-reflection
closure at the poles (periodic closure on the circle).  The drift W' is always
evaluated analytically as (n-1) cot(theta), never by differencing W.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvalidConfig, SpaceMismatch

KINDS = ("sphere_radial", "jacobi", "circle")

MIN_RESOLUTION = 16


@dataclass(frozen=True)
class ModelSpace:
    """Immutable discretized weighted measure space."""

    kind: str
    d: int
    n: float
    rho: float
    grid: np.ndarray
    log_weight: np.ndarray
    quad_weights: np.ndarray
    Z: float
    h: float
    resolution: int

    def __post_init__(self):
        for arr in (self.grid, self.log_weight, self.quad_weights):
            arr.setflags(write=False)

    @property
    def key(self):
        """Value identity used for field/space compatibility checks."""
        return (self.kind, self.d, float(self.n), self.resolution)

    def field(self, values) -> "ScalarField":
        """Wrap an array (or broadcastable scalar) as a field on this space."""
        vals = np.broadcast_to(np.asarray(values, dtype=float),
                               self.grid.shape).copy()
        return ScalarField(vals, self)

    def field_from_function(self, fn) -> "ScalarField":
        """Sample a callable of theta on the grid."""
        return self.field(fn(self.grid))

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "d": self.d,
            "n": self.n,
            "rho": self.rho,
            "resolution": self.resolution,
            "Z": self.Z,
        }


@dataclass(frozen=True)
class ScalarField:
    """A real-valued function sampled on a model-space grid."""

    values: np.ndarray
    space: ModelSpace = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.space.grid.shape:
            raise SpaceMismatch(
                f"field has {vals.shape} values, grid has {self.space.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise InvalidConfig("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())


def build_space(kind: str, d: int, n: float, resolution: int) -> ModelSpace:
    """Construct a model space of the given kind.

    rho is set to d-1 for sphere_radial, n-1 for jacobi; the circle carries
    no positive curvature bound and gets rho = 0.
    """
    if kind not in KINDS:
        raise InvalidConfig(f"unknown kind {kind!r}; expected one of {KINDS}")
    if resolution < MIN_RESOLUTION:
        raise InvalidConfig(f"resolution {resolution} < {MIN_RESOLUTION}")
    d = int(d)
    n = float(n)
    if d < 1:
        raise InvalidConfig("d must be >= 1")

    if kind == "circle":
        h = 2.0 * np.pi / resolution
        grid = (np.arange(resolution) + 0.5) * h
        log_w = np.zeros(resolution)
        rho = 0.0
    else:
        if n <= 2.0:
            raise InvalidConfig(f"effective dimension n = {n} must exceed 2")
        if kind == "sphere_radial" and n != d:
            raise InvalidConfig("sphere_radial requires n = d")
        if n < d:
            raise InvalidConfig("n must be >= d")
        h = np.pi / resolution
        grid = (np.arange(resolution) + 0.5) * h
        log_w = -(n - 1.0) * np.log(np.sin(grid))
        rho = (d - 1.0) if kind == "sphere_radial" else (n - 1.0)
        if rho <= 0.0:
            raise InvalidConfig("sphere_radial requires d >= 2 (rho > 0)")

    dens = np.exp(-log_w) * h
    Z = float(dens.sum())
    w = dens / Z
    return ModelSpace(kind=kind, d=d, n=n, rho=rho, grid=grid,
                      log_weight=log_w, quad_weights=w, Z=Z, h=h,
                      resolution=resolution)


def _check_same_space(space: ModelSpace, *fields: ScalarField):
    for f in fields:
        if f.space.key != space.key:
            raise SpaceMismatch(
                f"field lives on {f.space.key}, expected {space.key}")


def _pad(space: ModelSpace, v: np.ndarray) -> np.ndarray:
    """One ghost cell on each side: even reflection (periodic on circle)."""
    if space.kind == "circle":
        return np.concatenate(([v[-1]], v, [v[0]]))
    return np.concatenate(([v[0]], v, [v[-1]]))


def _diff1(space: ModelSpace, v: np.ndarray) -> np.ndarray:
    p = _pad(space, v)
    return (p[2:] - p[:-2]) / (2.0 * space.h)


def _diff2(space: ModelSpace, v: np.ndarray) -> np.ndarray:
    p = _pad(space, v)
    return (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (space.h * space.h)


def _drift(space: ModelSpace) -> np.ndarray:
    """W'(theta), evaluated analytically."""
    if space.kind == "circle":
        return np.zeros_like(space.grid)
    return -(space.n - 1.0) / np.tan(space.grid)


def integrate(space: ModelSpace, f: ScalarField) -> float:
    """Quadrature of int f dnu over the normalized measure."""
    _check_same_space(space, f)
    return float(np.dot(space.quad_weights, f.values))


def apply_L(space: ModelSpace, f: ScalarField) -> ScalarField:
    """Generator L f = f'' - W' f'."""
    _check_same_space(space, f)
    v = f.values
    return space.field(_diff2(space, v) - _drift(space) * _diff1(space, v))


def gamma(space: ModelSpace, f: ScalarField, g: ScalarField) -> ScalarField:
    """Carre du champ Gamma(f, g) = f' g' pointwise."""
    _check_same_space(space, f, g)
    return space.field(_diff1(space, f.values) * _diff1(space, g.values))


def gamma2(space: ModelSpace, f: ScalarField) -> ScalarField:
    """Iterated carre du champ Gamma_2(f) = L(Gamma(f))/2 - Gamma(f, Lf)."""
    _check_same_space(space, f)
    gf = gamma(space, f, f)
    lf = apply_L(space, f)
    half_l_gamma = 0.5 * apply_L(space, gf).values
    return space.field(half_l_gamma - gamma(space, f, lf).values)


def ibp_residual(space: ModelSpace, u: ScalarField, v: ScalarField) -> float:
    """Discrete integration-by-parts defect, a quality certificate O(h^2).

    Returns max(|int (Lu) v + int Gamma(u,v)|, |int (Lu) v - int u (Lv)|).
    """
    _check_same_space(space, u, v)
    lu_v = integrate(space, space.field(apply_L(space, u).values * v.values))
    u_lv = integrate(space, space.field(u.values * apply_L(space, v).values))
    g_uv = integrate(space, gamma(space, u, v))
    return max(abs(lu_v + g_uv), abs(lu_v - u_lv))


def fv_stiffness(space: ModelSpace) -> sp.csc_matrix:
    """Finite-volume Dirichlet form matrix S with v^T S v ~ int Gamma(v) dnu.

    Built from face-centered weights, so S is symmetric positive
    semidefinite with kernel spanned by constants and 1^T S = 0 exactly.
    Used internally by the variational and flow modules, whose iterations
    need an oscillation-proof discrete energy; the diagnostic operators above
    keep the centered stencils.
    """
    N = space.resolution
    h = space.h
    if space.kind == "circle":
        # face i sits between cells i-1 and i (cyclic), unit weight
        rows, cols, vals = [], [], []
        c = 1.0 / (space.Z * h)
        for i in range(N):
            j = (i - 1) % N
            rows += [i, j, i, j]
            cols += [i, j, j, i]
            vals += [c, c, -c, -c]
        return sp.csc_matrix(sp.coo_matrix((vals, (rows, cols)), shape=(N, N)))
    # interior faces at theta = i*h, i = 1..N-1; pole faces carry zero weight
    faces = np.arange(1, N) * h
    a = np.sin(faces) ** (space.n - 1.0)
    c = a / (space.Z * h)
    main = np.zeros(N)
    main[:-1] += c
    main[1:] += c
    off = -c
    return sp.csc_matrix(sp.diags([off, main, off], [-1, 0, 1], format="csc"))


def weighted_laplacian_fv(space: ModelSpace):
    """Return a callable approximating L in self-adjoint finite-volume form.

    L_fv = -diag(w)^{-1} S; exactly mass-free and symmetric in the nu inner
    product.  Used by the density flows to conserve mass to roundoff.
    """
    S = fv_stiffness(space)
    w = space.quad_weights

    def apply(values: np.ndarray) -> np.ndarray:
        return -(S @ values) / w

    return apply
