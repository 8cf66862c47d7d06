"""Subcritical minimization, pressure equation, identity and rigidity."""

import numpy as np
import pytest
import scipy.linalg as sla

from cdsobolev import build_space, integrate, lq_norm
from cdsobolev.errors import InvalidConfig, InvalidExponent, InvalidParameter, NonPositiveField
from cdsobolev.model_space import fv_stiffness
from cdsobolev.variational import (MinimizeOptions, a_star,
                                   gamma2_identity_residual, make_f_spec,
                                   minimize_subcritical, pressure_pde_residual,
                                   pressure_transform, rigidity_scan,
                                   subcritical_params)


@pytest.fixture(scope="module")
def sphere512():
    return build_space("sphere_radial", 3, 3.0, 512)


@pytest.fixture(scope="module")
def bump_init(sphere512):
    return sphere512.field(1.0 + 0.4 * np.cos(sphere512.grid))


@pytest.fixture(scope="module")
def constant_report(sphere512, bump_init):
    opts = MinimizeOptions(record_energy=True)
    return minimize_subcritical(sphere512, 2.1, 5.0, bump_init, opts)


def test_parameter_arithmetic():
    d_prime, lam, c = subcritical_params(2.1, 5.0)
    assert d_prime == 10.0 / 3.0
    assert lam == 3.0 / 4.2
    assert c == 2.0 * lam * (d_prime - 1.0)
    assert abs(a_star(10.0 / 3.0, 2.0) - 1.05) <= 1e-15


def test_minimize_constant_regime(sphere512, constant_report):
    rep = constant_report
    assert rep.converged
    assert rep.constancy <= 1e-6
    assert abs(rep.i_value - 1.0) <= 1e-8
    assert rep.minimizer.min() >= 0.0
    assert abs(lq_norm(sphere512, rep.minimizer, 5.0) - 1.0) <= 1e-10
    assert rep.el_residual_norm <= 1e-8


def test_energy_monotone_along_iteration(constant_report):
    e = np.array(constant_report.energy_trace)
    assert len(e) >= 2
    assert np.all(np.diff(e) <= 1e-12 * (1.0 + np.abs(e[:-1])))


def test_energy_not_above_init(sphere512, bump_init, constant_report):
    from cdsobolev.sobolev import grad_norm_sq
    v = bump_init.values / lq_norm(sphere512, bump_init, 5.0)
    vf = sphere512.field(v)
    e_init = 2.1 * grad_norm_sq(sphere512, vf) \
        + integrate(sphere512, sphere512.field(v * v))
    assert constant_report.i_value <= e_init + 1e-12


def test_constant_init_is_fixed_point(sphere512):
    init = sphere512.field(np.ones(512))
    rep = minimize_subcritical(sphere512, 2.1, 5.0, init)
    assert rep.converged and rep.iterations <= 2
    assert rep.constancy <= 1e-14
    assert rep.el_residual_norm <= 1e-12


def test_symmetry_breaking_small_A(sphere512, bump_init):
    rep = minimize_subcritical(sphere512, 0.05, 5.0, bump_init)
    assert rep.converged
    assert rep.constancy > 0.1
    assert rep.i_value < 1.0


def test_minimize_validation(sphere512, bump_init):
    with pytest.raises(InvalidParameter):
        minimize_subcritical(sphere512, -1.0, 5.0, bump_init)
    for q in (2.0, 6.0, 7.0):
        with pytest.raises(InvalidExponent):
            minimize_subcritical(sphere512, 1.0, q, bump_init)
    with pytest.raises(InvalidParameter):
        minimize_subcritical(sphere512, 1.0, 5.0,
                             sphere512.field(np.zeros(512)))


def test_pressure_transform_round_trip(sphere512, constant_report):
    v = constant_report.minimizer
    phi = pressure_transform(v, 5.0)
    back = sphere512.field(phi.values ** (-2.0 / 3.0))
    assert np.abs(back.values - v.values).max() <= 1e-13
    with pytest.raises(NonPositiveField):
        pressure_transform(sphere512.field(np.cos(sphere512.grid)), 5.0)


def test_pressure_of_extremal_is_affine(sphere512):
    # at the critical exponent the d=3 pressure is beta - cos theta exactly
    from cdsobolev import extremal_field
    v = extremal_field(sphere512, 2.0)
    vn = sphere512.field(v.values / lq_norm(sphere512, v, 6.0))
    phi = pressure_transform(vn, 6.0)
    ratio = phi.values / (2.0 - np.cos(sphere512.grid))
    assert ratio.max() - ratio.min() <= 1e-12


def test_pressure_pde_residual_cases(sphere512, constant_report):
    ones = sphere512.field(np.ones(512))
    assert pressure_pde_residual(sphere512, ones, 10.0 / 3.0, 1.0) == 0.0
    # converged constant-regime minimizer
    d_prime, lam, _ = subcritical_params(2.1, 5.0)
    v = constant_report.i_value ** (1.0 / 3.0) * constant_report.minimizer.values
    phi = pressure_transform(sphere512.field(v), 5.0)
    assert pressure_pde_residual(sphere512, phi, d_prime, lam) <= 1e-5
    # critical-exponent extremal pressure: lambda = 3/2 matched, others not
    s = 1.0 / np.sqrt(3.0)
    aff = sphere512.field(s * (2.0 - np.cos(sphere512.grid)))
    assert pressure_pde_residual(sphere512, aff, 3.0, 1.5) <= 1e-3
    assert pressure_pde_residual(sphere512, aff, 3.0, 1.2) >= 0.1


def test_el_to_pressure_chain(sphere512, bump_init):
    # the transform scales the EL residual by at most lambda sup(Phi^2 / v)
    rep = minimize_subcritical(sphere512, 0.8, 5.0, bump_init)
    d_prime, lam, _ = subcritical_params(0.8, 5.0)
    v = rep.i_value ** (1.0 / 3.0) * rep.minimizer.values
    phi = pressure_transform(sphere512.field(v), 5.0)
    pde = pressure_pde_residual(sphere512, phi, d_prime, lam)
    scale = lam * float(np.max(phi.values ** 2 / v))
    assert pde <= 10.0 * rep.el_residual_norm * scale


def test_identity_residual_cases(sphere512, constant_report):
    ones = sphere512.field(np.ones(512))
    assert gamma2_identity_residual(sphere512, ones, 10.0 / 3.0, 1.0) == 0.0
    with pytest.raises(InvalidParameter):
        gamma2_identity_residual(sphere512, ones, 2.0, 1.0)
    d_prime, lam, c = subcritical_params(2.1, 5.0)
    v = constant_report.i_value ** (1.0 / 3.0) * constant_report.minimizer.values
    phi = pressure_transform(sphere512.field(v), 5.0)
    assert gamma2_identity_residual(sphere512, phi, d_prime, c) <= 1e-5


def test_f_spec_families():
    f, fp = make_f_spec("constant")
    assert np.all(f(np.array([0.5, 2.0])) == 1.0)
    assert np.all(fp(np.array([0.5, 2.0])) == 0.0)
    f, fp = make_f_spec("inverse_power", 1.5)
    x = np.array([0.5, 2.0])
    assert np.allclose(f(x), (1.0 + x) ** -1.5)
    assert np.all(fp(x) < 0.0)
    with pytest.raises(InvalidConfig):
        make_f_spec("inverse_power", -1.0)
    with pytest.raises(InvalidConfig):
        make_f_spec("increasing")


def test_rigidity_scan_constant_entries(sphere512):
    entries = rigidity_scan(sphere512, 5.0, [1.05, 2.1])
    for e in entries:
        assert e.report.converged
        assert e.report.constancy <= 1e-6
        # every rigidity term vanishes at a constant minimizer
        for term in (e.term_cd, e.term_gap, e.term_f):
            assert abs(term) <= 1e-12
        assert e.identity_residual <= 1e-12


def test_rigidity_scan_nonconstant_sums_to_zero():
    # the decomposition closes at O(h^2): check the residual at two
    # resolutions and its refinement factor
    rel = {}
    for N in (512, 1024):
        space = build_space("sphere_radial", 3, 3.0, N)
        e = rigidity_scan(space, 5.0, [0.05])[0]
        assert e.report.constancy > 0.1
        assert e.term_f == 0.0                        # constant f
        total = e.term_cd + e.term_gap + e.term_f
        rel[N] = abs(total) / max(abs(e.term_cd), abs(e.term_gap), 1.0)
    assert rel[1024] <= 5e-3
    assert rel[512] / rel[1024] >= 3.0


def test_rigidity_scan_monotone_f_term_sign(sphere512):
    # nonincreasing f makes the f-term nonpositive at a nonconstant minimizer
    entries = rigidity_scan(sphere512, 5.0, [0.05],
                            f_spec={"kind": "inverse_power", "s": 1.0})
    assert entries[0].term_f <= 0.0


def test_rigidity_scan_requires_sorted():
    space = build_space("sphere_radial", 3, 3.0, 64)
    with pytest.raises(InvalidConfig):
        rigidity_scan(space, 5.0, [2.0, 1.0])


def test_jacobi_bifurcation_matches_linearization():
    # independent eigenvalue oracle: lambda_1 of the generalized problem
    # S x = lambda W x equals n; the constant branch destabilizes at
    # A = (q - 2)/lambda_1
    space = build_space("jacobi", 2, 4.5, 256)
    S = fv_stiffness(space).toarray()
    W = np.diag(space.quad_weights)
    lam1 = sla.eigh(S, W, eigvals_only=True)[1]
    assert abs(lam1 - space.n) <= 5e-3 * space.n
    q = 3.0
    a_bif = (q - 2.0) / lam1
    init = space.field(1.0 + 0.4 * np.cos(space.grid))
    below = minimize_subcritical(space, 0.95 * a_bif, q, init)
    above = minimize_subcritical(space, 1.05 * a_bif, q, init)
    assert below.constancy > 0.1
    assert above.constancy <= 1e-6
