"""Grid, measure and operator tests for the 1-D model spaces."""

import numpy as np
import pytest

from cdsobolev import apply_L, build_space, gamma, gamma2, ibp_residual, integrate
from cdsobolev.errors import InvalidConfig, SpaceMismatch
from cdsobolev.model_space import fv_stiffness, weighted_laplacian_fv


def ones_field(space):
    return space.field(np.ones(space.resolution))


@pytest.mark.parametrize("kind,d,n", [("sphere_radial", 3, 3.0),
                                      ("sphere_radial", 5, 5.0),
                                      ("jacobi", 2, 4.5),
                                      ("jacobi", 2, 3.5),
                                      ("circle", 1, 1.0)])
@pytest.mark.parametrize("N", [64, 256])
def test_quadrature_exactness(kind, d, n, N):
    space = build_space(kind, d, n, N)
    assert abs(integrate(space, ones_field(space)) - 1.0) <= 1e-14


def test_invalid_configs():
    with pytest.raises(InvalidConfig):
        build_space("torus", 3, 3.0, 128)
    with pytest.raises(InvalidConfig):
        build_space("sphere_radial", 3, 3.0, 8)       # below min resolution
    with pytest.raises(InvalidConfig):
        build_space("sphere_radial", 3, 4.0, 128)     # sphere needs n = d
    with pytest.raises(InvalidConfig):
        build_space("jacobi", 2, 2.0, 128)            # n must exceed 2
    with pytest.raises(InvalidConfig):
        build_space("jacobi", 4, 3.0, 128)            # n >= d


def test_field_immutability_and_space_mismatch():
    space = build_space("sphere_radial", 3, 3.0, 64)
    f = space.field_from_function(np.cos)
    with pytest.raises(ValueError):
        f.values[0] = 2.0
    other = build_space("sphere_radial", 3, 3.0, 128)
    with pytest.raises(SpaceMismatch):
        gamma(space, f, other.field_from_function(np.cos))


def test_rho_assignment():
    assert build_space("sphere_radial", 4, 4.0, 64).rho == 3.0
    assert build_space("jacobi", 2, 4.5, 64).rho == 3.5
    assert build_space("circle", 1, 1.0, 64).rho == 0.0


@pytest.mark.parametrize("kind,d,n", [("sphere_radial", 3, 3.0),
                                      ("jacobi", 2, 4.5)])
def test_eigenfunction_property_second_order(kind, d, n):
    errs = {}
    for N in (256, 512):
        space = build_space(kind, d, n, N)
        f = space.field_from_function(np.cos)
        resid = apply_L(space, f).values + n * f.values
        errs[N] = np.abs(resid).max()
    assert errs[512] <= 1e-3
    assert errs[256] / errs[512] >= 3.0


def test_chain_rule_defect_identity():
    # (1/2) L(f^2) - f L f = Gamma(f) pointwise, up to O(h^2)
    rng = np.random.default_rng(11)
    errs = {}
    for N in (256, 512):
        space = build_space("sphere_radial", 3, 3.0, N)
        worst = 0.0
        for _ in range(5):
            coef = rng.uniform(-1, 1, 3)
            vals = sum(c * np.cos((k + 1) * space.grid)
                       for k, c in enumerate(coef))
            f = space.field(1.0 + vals)
            lhs = 0.5 * apply_L(space, space.field(f.values ** 2)).values \
                - f.values * apply_L(space, f).values
            worst = max(worst, np.abs(
                lhs - gamma(space, f, f).values).max())
        errs[N] = worst
    assert errs[256] / errs[512] >= 3.0


def test_self_adjointness_second_order():
    errs = {}
    for N in (256, 512):
        space = build_space("sphere_radial", 3, 3.0, N)
        u = space.field(np.cos(space.grid) + 0.3 * np.cos(2 * space.grid))
        v = space.field(1.0 + 0.5 * np.cos(space.grid))
        errs[N] = abs(ibp_residual(space, u, v))
    assert errs[256] / errs[512] >= 3.0


def test_gamma2_refinement_second_order():
    # against the closed form Gamma_2(cos) = 2 + cos^2 on the sphere d=3
    errs = {}
    for N in (256, 512):
        space = build_space("sphere_radial", 3, 3.0, N)
        g2 = gamma2(space, space.field_from_function(np.cos)).values
        errs[N] = np.abs(g2 - (2.0 + np.cos(space.grid) ** 2)).max()
    assert errs[512] <= 5e-3
    assert errs[256] / errs[512] >= 3.0


def test_moment_oracles():
    space = build_space("sphere_radial", 3, 3.0, 256)
    c = space.field_from_function(np.cos)
    assert abs(integrate(space, c)) <= 1e-14
    # int cos^2 dnu = (pi/8)/(pi/2) = 1/4; midpoint rule is exact on this
    # low-degree periodic integrand
    c2 = space.field(np.cos(space.grid) ** 2)
    assert abs(integrate(space, c2) - 0.25) <= 1e-14


@pytest.mark.parametrize("kind,d,n", [("sphere_radial", 3, 3.0),
                                      ("jacobi", 2, 4.5),
                                      ("circle", 1, 1.0)])
def test_fv_stiffness_structure(kind, d, n):
    space = build_space(kind, d, n, 128)
    S = fv_stiffness(space).toarray()
    assert np.abs(S - S.T).max() <= 1e-15
    scale = np.abs(S).max()
    assert np.abs(S @ np.ones(128)).max() <= 1e-13 * scale   # constants in kernel
    assert np.abs(np.ones(128) @ S).max() <= 1e-13 * scale   # exact conservation
    eigs = np.linalg.eigvalsh(S)
    assert eigs.min() >= -1e-12


def test_fv_laplacian_matches_centered_operator():
    space = build_space("sphere_radial", 3, 3.0, 512)
    lap = weighted_laplacian_fv(space)
    f = 1.0 + 0.5 * np.cos(space.grid)
    centered = apply_L(space, space.field(f)).values
    gap = lap(f) - centered
    # pointwise agreement away from the poles; the flux closure differs from
    # the centered stencil only in the first boundary cells, whose quadrature
    # weight is O(h^3)
    assert np.abs(gap[8:-8]).max() <= 1e-2
    assert np.sqrt(np.sum(space.quad_weights * gap ** 2)) <= 1e-2


def test_circle_periodicity():
    space = build_space("circle", 1, 1.0, 128)
    f = space.field(np.sin(space.grid))
    resid = apply_L(space, f).values + f.values
    assert np.abs(resid).max() <= 1e-3
    assert np.allclose(space.quad_weights, 1.0 / 128)


def test_space_serialization():
    space = build_space("jacobi", 2, 4.5, 64)
    doc = space.to_json_dict()
    assert doc["kind"] == "jacobi"
    assert doc["n"] == 4.5
    assert set(doc) == {"kind", "d", "n", "rho", "resolution", "Z"}
