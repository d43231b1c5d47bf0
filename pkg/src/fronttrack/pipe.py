"""Isentropic gas flow in a pipe with variable or discontinuous cross section.

With alpha = ln a the pipe equations read

    rho_t + q_x = -alpha'(x) q,    q_t + (q^2/rho + p(rho))_x = -alpha'(x) q^2/rho,

a balance law with g = alpha'(x) G(u), G(u) = -(q, q^2/rho).  Stationary
solutions follow du/dalpha = Df(u)^{-1} G(u), which conserves the mass flux
a q and the Bernoulli quantity v^2/2 + gamma kappa/(gamma-1) rho^(gamma-1).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .hriemann import solve_stationary_riemann
from .piecewise import FunctionData
from .sources import Profile, SeparableSource
from .systems import AdmissibilityError, IsentropicEuler, as_state, solve_homogeneous_riemann

TOL_PHI = 1e-11


class SonicBreakdown(AdmissibilityError):
    """The stationary flow reached the sonic line |v| = c(rho)."""


@dataclass(frozen=True)
class PipeState:
    rho: float
    q: float

    @property
    def v(self):
        return self.q / self.rho

    def as_array(self):
        return np.array([self.rho, self.q])

    def check(self, system):
        system.check_admissible(self.as_array(), "pipe state")
        return self


def isentropic_system(gamma=2.0, kappa=1.0, rho_range=(0.5, 2.0), q_range=(-1.0, 1.0), delta_sonic=None,
                      rho_ref=1.0) -> IsentropicEuler:
    return IsentropicEuler(gamma, kappa, rho_range, q_range, delta_sonic, rho_ref)


# ---------------------------------------------------------------------------
# Cross-section profiles
# ---------------------------------------------------------------------------

CONNECTORS = {
    "smoothstep": (lambda s: s * s * (3.0 - 2.0 * s), lambda s: 6.0 * s * (1.0 - s)),
    "smootherstep": (lambda s: s ** 3 * (s * (6.0 * s - 15.0) + 10.0), lambda s: 30.0 * s * s * (s - 1.0) ** 2),
    "linear": (lambda s: s, lambda s: np.ones_like(s)),
}


class PipeProfile:
    """a_l(x): a_minus for x < -l/2, a_plus for x > l/2, monotone connector
    in between; l = 0 is the discontinuous section jump at 0."""

    def __init__(self, a_minus, a_plus, l=0.0, connector="smoothstep"):
        if a_minus <= 0 or a_plus <= 0:
            raise ValueError("cross sections must be positive")
        if l < 0:
            raise ValueError("transition length must be non-negative")
        self.a_minus, self.a_plus, self.l = float(a_minus), float(a_plus), float(l)
        if isinstance(connector, str):
            self.connector_name = connector
            connector = CONNECTORS[connector]
        else:
            self.connector_name = "custom"
        self.phi, self.dphi = connector

    @property
    def dalpha(self):
        return math.log(self.a_plus) - math.log(self.a_minus)

    def _s(self, x):
        return np.clip((np.asarray(x, dtype=float) + 0.5 * self.l) / self.l, 0.0, 1.0)

    def area(self, x):
        x = np.asarray(x, dtype=float)
        if self.l == 0:
            return np.where(x < 0, self.a_minus, self.a_plus)
        return self.a_minus + (self.a_plus - self.a_minus) * self.phi(self._s(x))

    def log_area(self, x):
        return np.log(self.area(x))

    def dlog_area(self, x):
        x = np.asarray(x, dtype=float)
        if self.l == 0:
            return np.zeros_like(x)
        s = self._s(x)
        inside = (x > -0.5 * self.l) & (x < 0.5 * self.l)
        da = (self.a_plus - self.a_minus) * self.dphi(s) / self.l
        return np.where(inside, da / self.area(x), 0.0)


class LogAreaProfile(Profile):
    """Density (ln a_l)'; its antiderivative is exact and, by monotonicity,
    so is the antiderivative of its absolute value."""

    def __init__(self, pipe: PipeProfile):
        self.pipe = pipe
        self.support = (-0.5 * pipe.l, 0.5 * pipe.l)
        self.singular_points = ()

    def density(self, x):
        return self.pipe.dlog_area(x)

    def antiderivative(self, x):
        return self.pipe.log_area(x) - math.log(self.pipe.a_minus)

    def abs_antiderivative(self, x):
        return np.abs(self.antiderivative(x))


def G(u):
    rho, q = u
    return np.array([-q, -q * q / rho])


def dG(u):
    rho, q = u
    v = q / rho
    return np.array([[0.0, -1.0], [v * v, -2.0 * v]])


def box_bound(system):
    """Analytic bound of |G| and of the spectral norm of DG over the box."""
    qmax = max(abs(system.lo[1]), abs(system.hi[1]))
    vmax = float(max(system.sound_speed(system.lo[0]), system.sound_speed(system.hi[0])) - system.delta_sonic)
    vmax = min(vmax, qmax / system.lo[0])
    g_bound = qmax * math.sqrt(1.0 + vmax * vmax)
    lip = math.sqrt(1.0 + vmax ** 4 + 4.0 * vmax * vmax)
    return g_bound, lip


def pipe_source(system, pipe: PipeProfile) -> SeparableSource:
    """g(x, u) = (ln a_l)'(x) G(u) with omega = |(ln a_l)'| K."""
    g_bound, lip = box_bound(system)
    K = max(g_bound, lip)
    return SeparableSource(LogAreaProfile(pipe), G, dG, K, lip, n=2, name="pipe_profile")


# ---------------------------------------------------------------------------
# Stationary map
# ---------------------------------------------------------------------------

def _stationary_rhs(system):
    def rhs(alpha, u):
        rho, q = u
        v = q / rho
        gap = system.gamma * system.kappa * rho ** (system.gamma - 1.0) - v * v
        return np.array([q * v / gap, -q])
    return rhs


def _sonic_event(system, margin=1e-6):
    def ev(alpha, u):
        rho, q = u
        if rho <= 0:
            return -1.0
        return float(system.sound_speed(rho) - abs(q / rho) - margin)
    ev.terminal = True
    return ev


def phi_a(system, dalpha, u, dense=False):
    """Exact stationary map: integrate du/dalpha = Df^{-1} G from 0 to dalpha."""
    u = as_state(u)
    if dalpha == 0.0 or u[1] == 0.0:
        return (u.copy(), None) if dense else u.copy()
    sol = solve_ivp(_stationary_rhs(system), (0.0, dalpha), u, method="RK45", rtol=TOL_PHI,
                    atol=1e-13, events=_sonic_event(system), dense_output=dense)
    if sol.status == 1:
        raise SonicBreakdown(f"stationary flow from {u} reaches the sonic line at alpha={sol.t_events[0][0]:.6g}")
    if not sol.success:
        raise SonicBreakdown(f"stationary flow integration failed: {sol.message}")
    out = sol.y[:, -1]
    system.check_admissible(out, "stationary state")
    return (out, sol.sol) if dense else out


def bernoulli(system, u):
    rho, q = u
    v = q / rho
    return 0.5 * v * v + system.gamma * system.kappa / (system.gamma - 1.0) * rho ** (system.gamma - 1.0)


def phi_a_invariant(system, dalpha, u):
    """Closed-form stationary map from the mass-flux and Bernoulli invariants
    (subsonic branch)."""
    rho0, q0 = as_state(u)
    q1 = q0 * math.exp(-dalpha)
    if q1 == 0.0:
        return np.array([rho0, 0.0])
    B = bernoulli(system, (rho0, q0))
    g, k = system.gamma, system.kappa
    # sonic density for flux q1: gamma kappa rho^(gamma+1) = q1^2
    rho_star = (q1 * q1 / (g * k)) ** (1.0 / (g + 1.0))
    F = lambda r: bernoulli(system, (r, q1)) - B
    if rho_star > 0 and F(rho_star) > 0:
        raise SonicBreakdown("no subsonic stationary state for this area ratio")
    if rho_star == 0.0:
        # flux so small that the sonic density underflows; bracket from below instead
        rho_star = rho0
        while F(rho_star) < 0:
            rho_star *= 0.5
    hi = max(2.0 * rho0, rho_star * 2.0)
    while F(hi) < 0:
        hi *= 2.0
    rho1 = brentq(F, rho_star, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return np.array([rho1, q1])


def invariant_defect(system, a0, u0, a1, u1):
    """Max relative defect of a q and Bernoulli between two stationary states."""
    m0, m1 = a0 * u0[1], a1 * u1[1]
    b0, b1 = bernoulli(system, u0), bernoulli(system, u1)
    return max(abs(m1 - m0) / max(1.0, abs(m0)), abs(b1 - b0) / max(1.0, abs(b0)))


# ---------------------------------------------------------------------------
# a-Riemann solver and junction map
# ---------------------------------------------------------------------------

def solve_a_riemann(system, a_minus, a_plus, u_l, u_r, x0=0.0, guess=None):
    """Riemann problem across a section jump with the exact stationary map."""
    dalpha = math.log(a_plus) - math.log(a_minus)
    if dalpha == 0.0:
        jump = lambda u: as_state(u).copy()
        if guess is None:
            guess = solve_homogeneous_riemann(system, u_l, u_r).sigma
        return solve_stationary_riemann(system, jump, u_l, u_r, x0=x0, guess=guess)
    K = max(box_bound(system))
    return solve_stationary_riemann(system, lambda u: phi_a(system, dalpha, u), u_l, u_r, x0=x0,
                                    sigma_zero=abs(dalpha) * K, guess=guess)


def junction_psi(system, u1, u2, a_minus, a_plus):
    """u2 - Phi(ln a_plus - ln a_minus, u1); zero iff (u1, u2) is a junction pair."""
    dalpha = math.log(a_plus) - math.log(a_minus)
    return as_state(u2) - phi_a(system, dalpha, u1)


def junction_jacobian(system, u1, u2, a_minus, a_plus, step=1e-6):
    """Central-difference Jacobians (D_u1 Psi, D_u2 Psi)."""
    u1, u2 = as_state(u1), as_state(u2)
    J1 = np.zeros((2, 2))
    J2 = np.zeros((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = step
        J1[:, k] = (junction_psi(system, u1 + e, u2, a_minus, a_plus)
                    - junction_psi(system, u1 - e, u2, a_minus, a_plus)) / (2 * step)
        J2[:, k] = (junction_psi(system, u1, u2 + e, a_minus, a_plus)
                    - junction_psi(system, u1, u2 - e, a_minus, a_plus)) / (2 * step)
    return J1, J2


def junction_determinant(system, u1, a_minus, a_plus):
    """det[-D_u1 Psi r_1(u1), r_2(u2)] with u2 = Phi(u1): the condition for a
    locally unique a-Riemann solution."""
    dalpha = math.log(a_plus) - math.log(a_minus)
    u2 = phi_a(system, dalpha, u1)
    J1, _ = junction_jacobian(system, u1, u2, a_minus, a_plus)
    r1 = system.eigen(as_state(u1))[1][:, 0]
    r2 = system.eigen(u2)[1][:, 1]
    return float(np.linalg.det(np.column_stack([-J1 @ r1, r2])))


class JunctionComb:
    """A single zero-wave at x0 carrying the exact section jump."""

    def __init__(self, system, a_minus, a_plus, x0=0.0):
        self.system = system
        self.a_minus, self.a_plus = float(a_minus), float(a_plus)
        self.x0 = float(x0)
        self.dalpha = math.log(a_plus) - math.log(a_minus)
        self.keys = (0,) if self.dalpha != 0.0 else ()
        self._strength = abs(self.dalpha) * max(box_bound(system))
        self.h = 0.0

    def position(self, key):
        return self.x0

    def strength(self, key):
        return self._strength

    def jump(self, key, u):
        return phi_a(self.system, self.dalpha, u)

    def solve(self, key, u_l, u_r):
        return solve_a_riemann(self.system, self.a_minus, self.a_plus, u_l, u_r, x0=self.x0)

    @property
    def total_strength(self):
        return self._strength if self.keys else 0.0


# ---------------------------------------------------------------------------
# Stationary data and the limit experiment
# ---------------------------------------------------------------------------

def stationary_profile(system, pipe: PipeProfile, u_left):
    """Stationary solution over a_l with value ``u_left`` for x < -l/2, as
    initial data; returns (data, dense alpha-solution)."""
    u_left = as_state(u_left)
    _, sol = phi_a(system, pipe.dalpha, u_left, dense=True)
    alpha0 = math.log(pipe.a_minus)

    def fun(x):
        da = pipe.log_area(np.asarray(x, dtype=float)) - alpha0
        if sol is None:
            return np.tile(u_left, (len(da), 1))
        return sol(da).T

    half = max(0.5 * pipe.l, 1e-9)
    return FunctionData(fun, -half, half, breaks=(), n=2), sol


@dataclass(frozen=True)
class LimitRow:
    l: float
    eps: float
    h: float
    distance_to_reference: float
    distance_to_previous: float
    fronts: int
    events: int


@dataclass(frozen=True)
class LimitStudy:
    rows: tuple
    reference: object
    junction_residual: float

    def distances(self):
        return np.array([r.distance_to_reference for r in self.rows])

    def is_monotone(self, tol=0.0):
        d = self.distances()
        return bool(np.all(np.diff(d) <= tol))

    def to_csv(self):
        lines = ["l,eps,h,distance_to_reference,distance_to_previous,fronts,events"]
        for r in self.rows:
            lines.append(f"{r.l:.17g},{r.eps:.17g},{r.h:.17g},{r.distance_to_reference:.17g},"
                         f"{r.distance_to_previous:.17g},{r.fronts},{r.events}")
        return "\n".join(lines) + "\n"


def reference_junction_residual(system, fs, comb):
    """Max |Psi| over zero-waves of a reference run."""
    worst = 0.0
    for f in fs.fronts:
        if f.kind == "zero":
            r = junction_psi(system, f.ul, f.ur, comb.a_minus, comb.a_plus)
            worst = max(worst, float(np.linalg.norm(r)))
    return worst


def limit_study(system, a_minus, a_plus, u0, l_list, t_eval, eps_list, h_list=None, connector="smoothstep",
                domain=(-2.0, 2.0), eps_ref=None, workers=1, config=None):
    """Front tracking over a_l for each l and against the a-Riemann reference.

    ``h_list`` defaults to l/16 per member.  Members are independent engines
    and may run on a thread pool.
    """
    from .tracking import TrackerConfig, build_initial, advance

    l_list = [float(l) for l in l_list]
    h_list = [l / 16.0 for l in l_list] if h_list is None else list(h_list)
    eps_list = list(eps_list)
    eps_ref = min(eps_list) if eps_ref is None else eps_ref

    def member(k):
        pipe = PipeProfile(a_minus, a_plus, l_list[k], connector)
        src = pipe_source(system, pipe)
        cfg = TrackerConfig(eps=eps_list[k], h=h_list[k]) if config is None else \
            type(config)(**{**config.__dict__, "eps": eps_list[k], "h": h_list[k]})
        fs = build_initial(system, src, u0, eps_list[k], h_list[k], config=cfg)
        return advance(fs, t_eval)

    comb = JunctionComb(system, a_minus, a_plus)
    ref_cfg = TrackerConfig(eps=eps_ref, h=0.0) if config is None else \
        type(config)(**{**config.__dict__, "eps": eps_ref, "h": 0.0})
    ref = advance(build_initial(system, None, u0, eps_ref, 0.0, config=ref_cfg, comb=comb), t_eval)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(member, range(len(l_list))))
    else:
        runs = [member(k) for k in range(len(l_list))]
    lo, hi = domain
    ref_pc = ref.to_piecewise()
    rows = []
    prev = None
    for k, fs in enumerate(runs):
        pc = fs.to_piecewise()
        d_ref = pc.l1_distance(ref_pc, lo, hi)
        d_prev = float("nan") if prev is None else pc.l1_distance(prev, lo, hi)
        rows.append(LimitRow(l_list[k], eps_list[k], h_list[k], d_ref, d_prev, len(fs.fronts), fs.stats["events"]))
        prev = pc
    return LimitStudy(tuple(rows), ref, reference_junction_residual(system, ref, comb))
