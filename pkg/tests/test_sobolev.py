"""Sobolev deficits, sharp constants and the extremal family."""

import numpy as np
import pytest

from cdsobolev import (build_space, critical_exponent, extremal_field, lq_norm,
                       sharp_constants, sobolev_deficit)
from cdsobolev.acceptance import trig_poly_field
from cdsobolev.errors import InvalidExponent, InvalidParameter


def test_critical_exponent_values():
    assert critical_exponent(3.0) == 6.0
    assert critical_exponent(4.0) == 4.0
    assert critical_exponent(6.0) == 3.0


def test_sharp_constants_closed_form():
    assert sharp_constants(3.0, 2.0) == (1.0 / 3.0, 4.0 / 3.0)
    assert sharp_constants(4.0, 3.0) == (1.0 / 4.0, 1.0 / 2.0)
    with pytest.raises(InvalidParameter):
        sharp_constants(2.0, 1.0)
    with pytest.raises(InvalidParameter):
        sharp_constants(3.0, 0.0)


def test_lq_norm_oracle():
    # ||1 + 0.5 cos||_2^2 = 1 + 0.25 * int cos^2 dnu = 1 + 0.25/4 = 1.0625
    space = build_space("sphere_radial", 3, 3.0, 512)
    v = space.field(1.0 + 0.5 * np.cos(space.grid))
    assert abs(lq_norm(space, v, 2.0) - np.sqrt(1.0625)) <= 1e-14
    with pytest.raises(InvalidExponent):
        lq_norm(space, v, 0.5)


def test_lq_norm_homogeneity():
    space = build_space("sphere_radial", 3, 3.0, 256)
    v = space.field(1.0 + 0.3 * np.cos(space.grid))
    assert abs(lq_norm(space, space.field(2.5 * v.values), 4.0)
               - 2.5 * lq_norm(space, v, 4.0)) <= 1e-13


def test_deficit_scale_invariance():
    space = build_space("sphere_radial", 3, 3.0, 512)
    v = space.field(1.0 + 0.4 * np.cos(space.grid))
    base = sobolev_deficit(space, v, 6.0).deficit
    scaled = sobolev_deficit(space, space.field(3.0 * v.values), 6.0).deficit
    assert abs(scaled - 9.0 * base) <= 1e-10 * (1.0 + abs(9.0 * base))


def test_deficit_positive_on_corpus():
    rng = np.random.default_rng(3)
    for kind, d, n in (("sphere_radial", 3, 3.0), ("jacobi", 2, 3.5)):
        space = build_space(kind, d, n, 1024)
        q = critical_exponent(n)
        for _ in range(20):
            rep = sobolev_deficit(space, trig_poly_field(space, rng), q)
            assert rep.deficit >= -1e-6 * (1.0 + rep.rhs)


def test_subcritical_comparison():
    # the inequality persists for smaller exponents
    space = build_space("sphere_radial", 3, 3.0, 1024)
    v = trig_poly_field(space, np.random.default_rng(5))
    for q in (3.0, 4.0, 6.0):
        rep = sobolev_deficit(space, v, q)
        assert rep.deficit >= -1e-6 * (1.0 + rep.rhs)


def test_deficit_exponent_validation():
    space = build_space("sphere_radial", 3, 3.0, 256)
    v = space.field(np.ones(256))
    for q in (2.0, 6.5):
        with pytest.raises(InvalidExponent):
            sobolev_deficit(space, v, q)


def test_constants_saturate():
    space = build_space("sphere_radial", 3, 3.0, 256)
    rep = sobolev_deficit(space, space.field(np.ones(256)), 6.0)
    assert abs(rep.deficit) <= 1e-14


@pytest.mark.parametrize("d", [3, 4])
@pytest.mark.parametrize("beta", [1.5, 2.0, 4.0])
def test_extremal_saturation_and_refinement(d, beta):
    rels = {}
    for N in (512, 1024):
        space = build_space("sphere_radial", d, float(d), N)
        rep = sobolev_deficit(space, extremal_field(space, beta),
                              critical_exponent(float(d)))
        rels[N] = abs(rep.deficit_rel)
    assert rels[1024] <= 1e-3
    assert rels[512] / rels[1024] >= 3.0


def test_extremal_field_validation():
    sphere = build_space("sphere_radial", 3, 3.0, 128)
    with pytest.raises(InvalidParameter):
        extremal_field(sphere, 1.0)                   # singular beta
    jac = build_space("jacobi", 2, 4.5, 128)
    with pytest.raises(InvalidParameter):
        extremal_field(jac, 2.0)                      # sphere-only family


def test_jacobi_extremal_not_asserted_zero():
    # for real n the transplanted profile is recorded, not an equality case
    space = build_space("jacobi", 2, 4.5, 1024)
    prof = space.field((2.0 - np.cos(space.grid)) ** (-(space.n - 2.0) / 2.0))
    rep = sobolev_deficit(space, prof, critical_exponent(space.n))
    assert rep.deficit >= -1e-6 * (1.0 + rep.rhs)


def test_report_serialization():
    space = build_space("sphere_radial", 3, 3.0, 128)
    rep = sobolev_deficit(space, space.field(np.ones(128)), 4.0)
    doc = rep.to_json_dict()
    assert set(doc) == {"q", "n", "rho", "lq_norm_sq", "l2_norm_sq",
                        "grad_norm_sq", "lhs", "rhs", "deficit", "deficit_rel"}
