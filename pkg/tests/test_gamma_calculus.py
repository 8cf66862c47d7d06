"""Curvature-dimension margins and Bochner diagnostics."""

import numpy as np
import pytest

from cdsobolev import (bochner_residual, build_space, cauchy_schwarz_margin,
                       cd_margin)
from cdsobolev.acceptance import trig_poly_field
from cdsobolev.errors import UnsupportedKind


def test_cd_equality_witness_sphere():
    space = build_space("sphere_radial", 3, 3.0, 512)
    rep = cd_margin(space, space.field_from_function(np.cos))
    assert abs(rep.cd_margin_min) <= 5e-3
    assert rep.rho == 2.0 and rep.n == 3.0


def test_cd_equality_witness_jacobi():
    space = build_space("jacobi", 2, 4.5, 512)
    rep = cd_margin(space, space.field_from_function(np.cos))
    assert abs(rep.cd_margin_min) <= 5e-3


def test_cd_margin_second_order_refinement():
    vals = {}
    for N in (256, 512):
        space = build_space("sphere_radial", 3, 3.0, N)
        vals[N] = cd_margin(space, space.field_from_function(np.cos)).cd_margin_min
    assert abs(vals[256]) / abs(vals[512]) >= 3.0


def test_cd_margin_monotone_in_n():
    # dropping the dimension term's weight (larger n) can only help
    space = build_space("sphere_radial", 3, 3.0, 256)
    f = space.field(1.0 + 0.5 * np.cos(2 * space.grid))
    m1 = cd_margin(space, f, n=3.0).cd_margin_min
    m2 = cd_margin(space, f, n=6.0).cd_margin_min
    assert m2 >= m1


def test_cd_margin_corpus_nonnegative():
    # low-degree corpus keeps the O(h^2) pointwise error under the tolerance
    rng = np.random.default_rng(7)
    for kind, d, n in (("sphere_radial", 3, 3.0), ("jacobi", 2, 4.5)):
        space = build_space(kind, d, n, 512)
        for _ in range(25):
            f = trig_poly_field(space, rng, degree=2, amplitude=0.5)
            assert cd_margin(space, f).cd_margin_min >= -5e-3


def test_circle_rejected():
    space = build_space("circle", 1, 1.0, 64)
    with pytest.raises(UnsupportedKind):
        cd_margin(space, space.field_from_function(np.cos))
    with pytest.raises(UnsupportedKind):
        bochner_residual(space, space.field_from_function(np.cos))


def test_bochner_residual_second_order():
    errs = {}
    for N in (256, 512):
        space = build_space("sphere_radial", 3, 3.0, N)
        f = space.field(np.cos(space.grid) + 0.2 * np.cos(2 * space.grid))
        errs[N] = bochner_residual(space, f)
    assert errs[512] <= 1e-3
    assert errs[256] / errs[512] >= 3.0


def test_bochner_sphere_only():
    space = build_space("jacobi", 2, 4.5, 128)
    with pytest.raises(UnsupportedKind):
        bochner_residual(space, space.field_from_function(np.cos))


def test_cauchy_schwarz_margin_nonnegative():
    rng = np.random.default_rng(13)
    space = build_space("sphere_radial", 4, 4.0, 512)
    for _ in range(10):
        f = trig_poly_field(space, rng)
        assert cauchy_schwarz_margin(space, f).values.min() >= -1e-3
    # equality case: cos has proportional Hessian
    eq = cauchy_schwarz_margin(space, space.field_from_function(np.cos))
    assert np.abs(eq.values).max() <= 1e-4
