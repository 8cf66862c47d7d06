"""Entropy gradient flows: finite-dimensional ODEs and fast diffusion.

Two layers share one trace format.  The finite-dimensional layer integrates
x' = -grad F(x) for strictly convex entropies F and certifies the convexity
inequality  G(x*) <= |grad F(x)|^2/(2 rho) + G(x)  under the condition
grad F . Hess F grad F >= -rho grad F . grad G.

The density layer runs the fast diffusion equation

    d/dt mu = (1/alpha) L mu^alpha,     0 < alpha < 1,

which is the gradient flow of the Renyi entropy
R_alpha(mu) = (1/(alpha(alpha-1))) int mu^alpha with respect to the Otto
metric |grad phi|_mu^2 = int Gamma(phi) dmu.  Time stepping uses the
self-adjoint finite-volume form of L, so mass is conserved to roundoff.
The Otto Hessian of R_alpha, its quadratic-form evaluation, and the
convexity relation that reproduces the sharp Sobolev inequality are exposed
as direct evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConditionViolated, InvalidAlpha, InvalidConfig,
                     InvalidParameter, NotAProbabilityDensity,
                     PositivityLost, StepUnstable, UnsupportedKind)
from .model_space import (ModelSpace, ScalarField, apply_L, gamma, gamma2,
                          integrate, weighted_laplacian_fv)
from .sobolev import grad_norm_sq

MASS_TOL = 1e-8


# ---------------------------------------------------------------------------
# finite-dimensional problems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteDimProblem:
    """Entropy F (quadratic or quartic-perturbed) with companion G.

    F(x) = x.Q.x/2 (+ eps * sum x_j^4).  By default G = F, for which the
    convexity condition holds whenever Q >= rho * Id.
    """

    dim: int
    family: str                      # "quadratic" | "quartic_perturbed"
    Q: np.ndarray
    rho: float
    eps: float = 0.0
    g_choice: str = "same_as_F"      # "same_as_F" | "custom"
    g_func: object = None
    g_grad: object = None

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        if Q.shape != (self.dim, self.dim):
            raise InvalidConfig(f"Q must be {self.dim}x{self.dim}")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise InvalidConfig("Q must be symmetric")
        if self.family not in ("quadratic", "quartic_perturbed"):
            raise InvalidConfig(f"unknown family {self.family!r}")
        if self.eps < 0.0 or self.rho <= 0.0:
            raise InvalidConfig("need eps >= 0 and rho > 0")
        if self.g_choice == "same_as_F":
            lam_min = float(np.linalg.eigvalsh(Q).min())
            if lam_min < self.rho - 1e-12:
                raise InvalidConfig(
                    f"eigmin(Q) = {lam_min} < rho = {self.rho}: the convexity "
                    "condition is not guaranteed with G = F")
        elif self.g_choice == "custom":
            if self.g_func is None or self.g_grad is None:
                raise InvalidConfig("custom G needs g_func and g_grad")
        else:
            raise InvalidConfig(f"unknown g_choice {self.g_choice!r}")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    # entropy and companion -------------------------------------------------
    def F(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        val = 0.5 * float(x @ (self.Q @ x))
        if self.family == "quartic_perturbed":
            val += self.eps * float(np.sum(x ** 4))
        return val

    def grad_F(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = self.Q @ x
        if self.family == "quartic_perturbed":
            g = g + 4.0 * self.eps * x ** 3
        return g

    def hess_F(self, x: np.ndarray) -> np.ndarray:
        H = np.array(self.Q)
        if self.family == "quartic_perturbed":
            H = H + np.diag(12.0 * self.eps * np.asarray(x) ** 2)
        return H

    def G(self, x: np.ndarray) -> float:
        if self.g_choice == "same_as_F":
            return self.F(x)
        return float(self.g_func(np.asarray(x, dtype=float)))

    def grad_G(self, x: np.ndarray) -> np.ndarray:
        if self.g_choice == "same_as_F":
            return self.grad_F(x)
        return np.asarray(self.g_grad(np.asarray(x, dtype=float)), dtype=float)

    @property
    def x_star(self) -> np.ndarray:
        """Unique minimizer of the shipped coercive families."""
        return np.zeros(self.dim)


# ---------------------------------------------------------------------------
# flow traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlowTrace:
    """Time series recorded along a gradient flow."""

    times: np.ndarray
    entropy: np.ndarray            # F(S_t) or R_alpha(mu_t)
    grad_norm_sq: np.ndarray
    companion: np.ndarray          # G(S_t) or R_beta(mu_t)
    dissipation_residual: np.ndarray
    sup_distance: np.ndarray       # to the equilibrium point/density
    mass: np.ndarray | None = None

    def __post_init__(self):
        for arr in (self.times, self.entropy, self.grad_norm_sq,
                    self.companion, self.dissipation_residual,
                    self.sup_distance):
            np.asarray(arr).setflags(write=False)

    def summary(self) -> dict:
        return {
            "T": float(self.times[-1]),
            "steps_recorded": int(len(self.times)),
            "final_entropy": float(self.entropy[-1]),
            "final_grad_norm_sq": float(self.grad_norm_sq[-1]),
            "final_sup_dist": float(self.sup_distance[-1]),
        }


def _dissipation_residuals(times, entropy, gnsq) -> np.ndarray:
    """|dE/dt + |grad|^2| with centered differences (one-sided at the ends)."""
    t = np.asarray(times)
    e = np.asarray(entropy)
    if len(t) < 2:
        return np.zeros_like(t)
    dedt = np.gradient(e, t)
    return np.abs(dedt + np.asarray(gnsq))


# ---------------------------------------------------------------------------
# finite-dimensional flow and convexity margins
# ---------------------------------------------------------------------------

def _rk4_step(rhs, y, dt):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def fd_flow(problem: FiniteDimProblem, x0, T: float, dt: float,
            max_records: int = 1000) -> FlowTrace:
    """RK4 integration of x' = -grad F(x) with Lyapunov monitoring."""
    if dt <= 0.0 or T < dt:
        raise InvalidParameter("need dt > 0 and T >= dt")
    x = np.array(x0, dtype=float)
    if x.shape != (problem.dim,):
        raise InvalidConfig(f"x0 must have shape ({problem.dim},)")
    nsteps = int(round(T / dt))
    every = max(1, math.ceil(nsteps / max_records))
    rhs = lambda y: -problem.grad_F(y)

    times, ent, gn, comp, dist = [], [], [], [], []

    def record(t, y):
        times.append(t)
        ent.append(problem.F(y))
        gn.append(float(np.sum(problem.grad_F(y) ** 2)))
        comp.append(problem.G(y))
        dist.append(float(np.abs(y - problem.x_star).max()))

    record(0.0, x)
    f_prev = ent[0]
    for k in range(1, nsteps + 1):
        x = _rk4_step(rhs, x, dt)
        f_now = problem.F(x)
        if f_now > f_prev + 1e-10 * (1.0 + abs(f_prev)):
            raise StepUnstable(
                f"F increased from {f_prev} to {f_now} at step {k}")
        f_prev = f_now
        if k % every == 0 or k == nsteps:
            record(k * dt, x)

    times = np.array(times)
    ent = np.array(ent)
    gn = np.array(gn)
    return FlowTrace(times=times, entropy=ent, grad_norm_sq=gn,
                     companion=np.array(comp),
                     dissipation_residual=_dissipation_residuals(times, ent, gn),
                     sup_distance=np.array(dist))


def condition_215_margin(problem: FiniteDimProblem, x) -> float:
    """grad F . Hess F grad F + rho grad F . grad G at x (>= 0 required)."""
    x = np.asarray(x, dtype=float)
    g = problem.grad_F(x)
    return float(g @ (problem.hess_F(x) @ g)
                 + problem.rho * np.dot(g, problem.grad_G(x)))


def convexity_inequality_margin(problem: FiniteDimProblem, x) -> float:
    """|grad F(x)|^2/(2 rho) + G(x) - G(x*); nonnegative under the condition."""
    x = np.asarray(x, dtype=float)
    cm = condition_215_margin(problem, x)
    scale = 1.0 + float(np.sum(problem.grad_F(x) ** 2))
    if cm < -1e-10 * scale:
        raise ConditionViolated(
            f"convexity condition fails at x (margin {cm})")
    g2 = float(np.sum(problem.grad_F(x) ** 2))
    return g2 / (2.0 * problem.rho) + problem.G(x) - problem.G(problem.x_star)


# ---------------------------------------------------------------------------
# Renyi entropy machinery
# ---------------------------------------------------------------------------

def _check_alpha(alpha: float):
    if alpha <= 0.0 or alpha == 1.0:
        raise InvalidAlpha(f"alpha = {alpha} must be positive and != 1")


def _check_density(space: ModelSpace, mu: ScalarField):
    if mu.min() <= 0.0:
        raise NotAProbabilityDensity("density must be positive")
    mass = integrate(space, mu)
    if abs(mass - 1.0) > MASS_TOL:
        raise NotAProbabilityDensity(f"int mu dnu = {mass} != 1")


def _renyi_raw(space: ModelSpace, values: np.ndarray, alpha: float) -> float:
    return float(np.dot(space.quad_weights, values ** alpha)
                 / (alpha * (alpha - 1.0)))


def renyi_entropy(space: ModelSpace, mu: ScalarField, alpha: float) -> float:
    """R_alpha(mu) = (1/(alpha(alpha-1))) int mu^alpha dnu."""
    _check_alpha(alpha)
    _check_density(space, mu)
    return _renyi_raw(space, mu.values, alpha)


def renyi_pressure(space: ModelSpace, mu: ScalarField,
                   alpha: float) -> ScalarField:
    """Phi = mu^{alpha-1}/(alpha-1), the Otto-gradient potential of R_alpha."""
    _check_alpha(alpha)
    return space.field(mu.values ** (alpha - 1.0) / (alpha - 1.0))


def renyi_grad_norm_sq(space: ModelSpace, mu: ScalarField,
                       alpha: float) -> float:
    """Squared Otto norm of grad R_alpha: int Gamma(Phi) mu dnu."""
    _check_alpha(alpha)
    _check_density(space, mu)
    phi = renyi_pressure(space, mu, alpha)
    return integrate(space, space.field(
        gamma(space, phi, phi).values * mu.values))


def renyi_hessian_quadform(space: ModelSpace, mu: ScalarField, alpha: float,
                           phi: ScalarField) -> float:
    """Otto Hessian of R_alpha at mu along grad phi:

    (1/alpha) int [ (alpha-1)(L phi)^2 + Gamma_2(phi) ] mu^alpha dnu.
    """
    _check_alpha(alpha)
    _check_density(space, mu)
    lphi = apply_L(space, phi).values
    g2 = gamma2(space, phi).values
    integrand = ((alpha - 1.0) * lphi ** 2 + g2) * mu.values ** alpha
    return float(np.dot(space.quad_weights, integrand) / alpha)


def hessian_second_derivative(space: ModelSpace, mu: ScalarField,
                              alpha: float, phi: ScalarField,
                              s: float = 5e-3, steps: int = 8) -> float:
    """Independent check of the Hessian formula by path differentiation.

    Transports mu along the geodesic-type path with initial velocity
    grad phi: the density obeys the continuity equation and the potential
    the Hamilton-Jacobi equation.  Returns the centered second difference
    (R(s) + R(-s) - 2 R(0)) / s^2 of the Renyi entropy along that path.
    """
    _check_alpha(alpha)
    _check_density(space, mu)

    def rhs(state):
        m, p = state
        mf, pf = space.field(m), space.field(p)
        div = gamma(space, mf, pf).values + m * apply_L(space, pf).values
        return (-div, -0.5 * gamma(space, pf, pf).values)

    def evolve(sign):
        m = np.array(mu.values)
        p = np.array(phi.values)
        ds = sign * s / steps
        for _ in range(steps):
            k1 = rhs((m, p))
            k2 = rhs((m + 0.5 * ds * k1[0], p + 0.5 * ds * k1[1]))
            k3 = rhs((m + 0.5 * ds * k2[0], p + 0.5 * ds * k2[1]))
            k4 = rhs((m + ds * k3[0], p + ds * k3[1]))
            m = m + (ds / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            p = p + (ds / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        return m

    r0 = _renyi_raw(space, mu.values, alpha)
    rp = _renyi_raw(space, evolve(+1.0), alpha)
    rm = _renyi_raw(space, evolve(-1.0), alpha)
    return (rp + rm - 2.0 * r0) / (s * s)


# ---------------------------------------------------------------------------
# fast diffusion flow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlowOptions:
    cfl: float = 0.4
    floor: float = 1e-8
    diss_tol: float = 1e-3
    grad_stop: float = 1e-12
    max_records: int = 1000


def fast_diffusion_flow(space: ModelSpace, mu0: ScalarField, alpha: float,
                        T: float, opts: FlowOptions | None = None) -> FlowTrace:
    """Integrate d/dt mu = (1/alpha) L mu^alpha with explicit RK4.

    The step size tracks the mobility bound, dt <= cfl * h^2 / max(mu^{alpha-1});
    mass is conserved exactly by the finite-volume form of L.
    """
    opts = opts or FlowOptions()
    _check_alpha(alpha)
    if not (0.0 < alpha < 1.0):
        raise InvalidAlpha(f"fast diffusion needs 0 < alpha < 1, got {alpha}")
    _check_density(space, mu0)
    if T <= 0.0:
        raise InvalidParameter("T must be positive")

    lap = weighted_laplacian_fv(space)
    w = space.quad_weights
    h2 = space.h * space.h
    beta = 2.0 * alpha - 1.0

    def rhs(m):
        return lap(m ** alpha) / alpha

    times, ent, gn, comp, dist, mass = [], [], [], [], [], []

    def record(t, m):
        mf = space.field(m)
        phi = renyi_pressure(space, mf, alpha)
        times.append(t)
        ent.append(_renyi_raw(space, m, alpha))
        gn.append(float(np.dot(w, gamma(space, phi, phi).values * m)))
        if abs(beta) < 1e-14:
            comp.append(float("nan"))  # beta = 0 degenerate order
        else:
            comp.append(_renyi_raw(space, m, beta))
        dist.append(float(np.abs(m - 1.0).max()))
        mass.append(float(np.dot(w, m)))

    m = np.array(mu0.values)
    t = 0.0
    record(t, m)
    rec_interval = T / opts.max_records
    next_rec = rec_interval
    ent_prev = ent[0]
    while t < T - 1e-14:
        dt = opts.cfl * h2 / float(np.max(m ** (alpha - 1.0)))
        dt = min(dt, T - t)
        m = _rk4_step(rhs, m, dt)
        t += dt
        if float(m.min()) <= opts.floor:
            raise PositivityLost(f"min mu = {m.min()} at t = {t}")
        if t >= next_rec - 1e-14 or t >= T - 1e-14:
            record(t, m)
            next_rec += rec_interval
            if ent[-1] > ent_prev + 1e-10 * (1.0 + abs(ent_prev)):
                raise StepUnstable(
                    f"R_alpha increased from {ent_prev} to {ent[-1]} at t={t}")
            ent_prev = ent[-1]
            if gn[-1] < opts.grad_stop:
                break

    times = np.array(times)
    ent = np.array(ent)
    gn = np.array(gn)
    return FlowTrace(times=times, entropy=ent, grad_norm_sq=gn,
                     companion=np.array(comp),
                     dissipation_residual=_dissipation_residuals(times, ent, gn),
                     sup_distance=np.array(dist), mass=np.array(mass))


# ---------------------------------------------------------------------------
# convexity relation and the Sobolev bridge
# ---------------------------------------------------------------------------

def convexity_relation_margin(space: ModelSpace, mu: ScalarField,
                              dim_param: float) -> float:
    """Hess R_alpha(grad R_alpha, grad R_alpha) - (rho/alpha) <grad, grad>.

    With alpha = 1 - 1/n the bracket <grad R_alpha, grad(-R_beta)> reduces to
    int Gamma(Phi) mu^alpha; nonnegative on CD(rho, n)-valid spaces.
    """
    if space.kind == "circle":
        raise UnsupportedKind("the circle carries no positive CD bound")
    n = float(dim_param)
    alpha = 1.0 - 1.0 / n
    phi = renyi_pressure(space, mu, alpha)
    quad = renyi_hessian_quadform(space, mu, alpha, phi)
    bracket = float(np.dot(space.quad_weights,
                           gamma(space, phi, phi).values
                           * mu.values ** alpha))
    return quad - (space.rho / alpha) * bracket


def entropy_inequality_margin(space: ModelSpace, mu: ScalarField) -> float:
    """(alpha/(2 rho)) |grad R_alpha|^2 - R_beta(mu) + R_beta(1), >= 0.

    With alpha = 1 - 1/n, beta = 1 - 2/n the gradient term is evaluated
    through the substitution f = mu^{(n-2)/(2n)}, which makes this margin
    exactly (2 n^2/(n-2)^2) times the Sobolev deficit of f.
    """
    if space.kind == "circle" or space.n <= 2.0:
        raise UnsupportedKind("needs a CD-positive space with n > 2")
    _check_density(space, mu)
    n = space.n
    alpha = 1.0 - 1.0 / n
    beta = 1.0 - 2.0 / n
    f = space.field(mu.values ** (beta / 2.0))
    grad_term = (alpha / (2.0 * space.rho)) * (4.0 / beta ** 2) \
        * grad_norm_sq(space, f)
    f2 = integrate(space, space.field(f.values ** 2))
    # -R_beta(mu) + R_beta(1) with int mu^beta = int f^2
    return grad_term + (1.0 - f2) / (beta * (beta - 1.0))


def density_from_field(space: ModelSpace, f: ScalarField,
                       q: float) -> ScalarField:
    """mu = |f|^q / ||f||_q^q, the probability density carried by f."""
    p = np.abs(f.values) ** q
    total = float(np.dot(space.quad_weights, p))
    if total <= 0.0:
        raise InvalidParameter("field vanishes identically")
    return space.field(p / total)
