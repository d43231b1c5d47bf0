"""Diagnostics behind the uniqueness characterization of the semigroup.

Local comparisons at a point xi of a trajectory u(tau):

* U-sharp: the homogeneous Riemann fan between u(xi-) and u(xi+);
* U-flat: the explicit solution of the linear problem with frozen
  matrix Df(u(xi)) and frozen source g(x, u(xi));
* w_h: the same linear solution with the source lumped on the comb jh.

L1 integrals of piecewise-constant differences are exact; anything that
involves a continuous profile uses Gauss-Legendre between merged
breakpoints.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .hriemann import solve_h_riemann
from .piecewise import FunctionData, PiecewiseConstant, gauss_legendre
from .sources import SeparableSource, ZeroSource, epsilon_tilde
from .systems import as_state, solve_homogeneous_riemann
from .tracking import FrontSet, FrontTracker, TrackerConfig, build_initial


class Trajectory:
    """t -> P_t u0 with snapshots cached at requested times."""

    def __init__(self, system, source, u0, eps, h, config: TrackerConfig | None = None, comb=None):
        self.system = system
        self.source = source if source is not None else ZeroSource(system.n)
        self.eps, self.h = float(eps), float(h)
        self.initial = build_initial(system, self.source, u0, eps, h, config=config, comb=comb)
        self._engine = FrontTracker.from_frontset(self.initial)
        self._cache = {0.0: self.initial}
        self._lock = threading.Lock()

    @property
    def lam_hat(self):
        return self._engine.lam_hat

    @property
    def config(self):
        return self.initial.config

    def at(self, t) -> FrontSet:
        t = float(t)
        with self._lock:
            if t in self._cache:
                return self._cache[t]
            if t >= self._engine.t:
                self._engine.advance(t)
                fs = self._engine.snapshot()
            else:
                start = max(s for s in self._cache if s <= t)
                eng = FrontTracker.from_frontset(self._cache[start])
                eng.advance(t)
                fs = eng.snapshot()
            self._cache[t] = fs
            return fs

    def tv_max(self):
        return self._engine.tv_max


# ---------------------------------------------------------------------------
# Local comparison solutions
# ---------------------------------------------------------------------------

def _as_piecewise(u):
    return u.to_piecewise() if isinstance(u, FrontSet) else u


def one_sided(u, xi):
    if isinstance(u, FrontSet):
        return u.left_limit(xi), u.evaluate(xi)
    return u.left_limit(xi), u(xi)


def sharp_fan(system, u, xi):
    ul, ur = one_sided(u, xi)
    return solve_homogeneous_riemann(system, ul, ur)


def u_sharp(system, u, xi, theta, x):
    """Homogeneous Riemann fan between u(xi-) and u(xi+), at time theta."""
    fan = sharp_fan(system, u, xi)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return fan.evaluate_many((x - xi) / theta)


@dataclass
class LinearLocalProblem:
    """w_t + A w_x = g(x, u*) with A = Df(u*)."""

    system: object
    source: object
    u_star: np.ndarray
    lam: np.ndarray = field(init=False)
    R: np.ndarray = field(init=False)
    L: np.ndarray = field(init=False)

    def __post_init__(self):
        self.u_star = as_state(self.u_star)
        self.lam, self.R, self.L = self.system.eigen(self.u_star)
        if np.any(np.abs(self.lam) < 1e-12):
            raise ValueError("frozen matrix has a vanishing eigenvalue (resonance)")
        if isinstance(self.source, SeparableSource):
            self._field = np.atleast_1d(self.source.field(self.u_star))
        else:
            self._field = None

    @property
    def A(self):
        return self.system.jacobian(self.u_star)

    def g_integral(self, a, b):
        """int_a^b g(x, u*) dx for arrays a, b (result shape (m, n))."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if self.source.is_zero:
            return np.zeros((len(a), self.system.n))
        if self._field is not None:
            prof = self.source.profile
            w = np.asarray(prof.antiderivative(b) - prof.antiderivative(a), dtype=float).reshape(-1)
            return w[:, None] * self._field[None, :]
        return np.array([self.source.integral(lo, hi, self.u_star) for lo, hi in zip(a, b)])

    def kinks(self):
        pts = list(getattr(self.source, "singular_points", ()))
        if self.source.support is not None:
            pts.extend(self.source.support)
        return pts

    def flat(self, u, theta, x):
        """Explicit solution with data u (piecewise constant) at time theta."""
        u = _as_piecewise(u)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((len(x), self.system.n))
        for i in range(self.system.n):
            lam, l, r = self.lam[i], self.L[i], self.R[:, i]
            back = x - lam * theta
            coef = u(back) @ l
            if theta > 0 and not self.source.is_zero:
                coef = coef + (self.g_integral(back, x) @ l) / lam
            out += coef[:, None] * r[None, :]
        return out

    def comb_integrals(self, h):
        """Positions jh and the window integrals of g(., u*) on [jh, jh + h)."""
        if self.source.is_zero:
            return np.zeros(0), np.zeros((0, self.system.n))
        lo, hi = self.source.support
        j = np.arange(int(np.floor(lo / h)) - 1, int(np.ceil(hi / h)) + 1)
        pos = j * h
        return pos, self.g_integral(pos, pos + h)

    def G_h(self, h, t, x):
        """Comb sums G_i^h(t, x) (shape (m, n), family index last)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        pos, win = self.comb_integrals(h)
        out = np.zeros((len(x), self.system.n))
        if len(pos) == 0:
            return out
        for i in range(self.system.n):
            c = np.concatenate([[0.0], np.cumsum(win @ self.L[i])])
            lam = self.lam[i]
            if lam > 0:
                lo = np.searchsorted(pos, x - lam * t, side="right")
                hi = np.searchsorted(pos, x, side="left")
                out[:, i] = c[np.maximum(hi, lo)] - c[lo]
            else:
                lo = np.searchsorted(pos, x, side="right")
                hi = np.searchsorted(pos, x - lam * t, side="left")
                out[:, i] = -(c[np.maximum(hi, lo)] - c[lo])
        return out

    def w_h(self, vbar, h, t, x):
        vbar = _as_piecewise(vbar)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        G = self.G_h(h, t, x)
        out = np.zeros((len(x), self.system.n))
        for i in range(self.system.n):
            lam, l, r = self.lam[i], self.L[i], self.R[:, i]
            coef = vbar(x - lam * t) @ l + G[:, i] / lam
            out += coef[:, None] * r[None, :]
        return out

    def zero_jump(self, h, j):
        """Jump of w_h across the comb point jh: A^{-1} int_{jh}^{jh+h} g(., u*)."""
        win = self.g_integral(j * h, j * h + h)[0]
        return np.linalg.solve(self.A, win)


def u_flat(system, source, u, xi, theta, x):
    """Linear comparison solution frozen at u(xi)."""
    prob = LinearLocalProblem(system, source, one_sided(u, xi)[1])
    return prob.flat(u, theta, x)


def w_h(vbar, problem: LinearLocalProblem, h, t, x):
    return problem.w_h(vbar, h, t, x)


# ---------------------------------------------------------------------------
# Integral conditions
# ---------------------------------------------------------------------------

def _l1(u_pc, fun, a, b, extra, pieces=2):
    if b <= a:
        return 0.0
    return u_pc.l1_distance_to(fun, a, b, extra_breaks=extra, pieces=pieces)


def condition_i_curve(traj: Trajectory, tau, xi, thetas):
    """[(theta, (1/theta) int_{xi - theta lam}^{xi + theta lam} |u(tau+theta) - U_sharp|)]."""
    u_tau = traj.at(tau)
    fan = sharp_fan(traj.system, u_tau, xi)
    lam = traj.lam_hat
    out = []
    for th in thetas:
        u = traj.at(tau + th).to_piecewise()
        edges = [xi + th * s for sp in fan.speeds for s in sp]
        fun = lambda x, th=th: fan.evaluate_many((np.asarray(x) - xi) / th)
        d = _l1(u, fun, xi - th * lam, xi + th * lam, edges)
        out.append((float(th), d / th))
    return out


@dataclass(frozen=True)
class ConditionII:
    lhs: float
    bound_factor: float

    @property
    def ratio(self):
        return self.lhs / self.bound_factor if self.bound_factor > 0 else (0.0 if self.lhs == 0 else np.inf)


def condition_ii_check(traj: Trajectory, tau, a, b, xi, theta):
    lam = traj.lam_hat
    if not (a < xi < b) or not (0 < theta < (b - a) / (2 * lam)):
        raise ValueError("degenerate window for condition (ii)")
    u_tau = traj.at(tau)
    pc_tau = u_tau.to_piecewise()
    prob = LinearLocalProblem(traj.system, traj.source, u_tau.evaluate(xi))
    u = traj.at(tau + theta).to_piecewise()
    extra = []
    for i in range(traj.system.n):
        sh = prob.lam[i] * theta
        extra.extend(pc_tau.breaks + sh)
        for k in prob.kinks():
            extra.extend([k, k + sh])
    lhs = _l1(u, lambda x: prob.flat(pc_tau, theta, x), a + theta * lam, b - theta * lam, extra) / theta
    bound = (pc_tau.total_variation(a, b) + traj.source.omega_integral(a, b)) ** 2
    return ConditionII(float(lhs), float(bound))


def fit_constant(checks):
    """Smallest C with lhs <= C * bound_factor over a corpus."""
    ratios = [c.ratio for c in checks if c.bound_factor > 0]
    return float(max(ratios)) if ratios else 0.0


def halving_stability(checks, rng=None, trials=20):
    """Relative spread of the fitted C over random halves of the corpus."""
    rng = np.random.default_rng(0) if rng is None else rng
    full = fit_constant(checks)
    worst = 0.0
    for _ in range(trials):
        idx = rng.permutation(len(checks))[: max(1, len(checks) // 2)]
        c = fit_constant([checks[k] for k in idx])
        worst = max(worst, abs(c - full) / full if full > 0 else 0.0)
    return full, worst


# ---------------------------------------------------------------------------
# Self-similar distance estimates
# ---------------------------------------------------------------------------

def self_similar_distance(evaluate, u_l, u_r, lam, x0=0.0, edges=(), span=None):
    """(1/t) int |v(t) - w(t)| for the jump v moving at speed lam and a
    self-similar w (given as a function of (x - x0)/t); computed at t = 1."""
    u_l, u_r = as_state(u_l), as_state(u_r)
    pts = sorted({lam, 0.0, *edges})
    span = span if span is not None else max(abs(p) for p in pts) + 1.0
    v = PiecewiseConstant([lam], [u_l, u_r])
    fun = lambda xi: np.array([evaluate(z) for z in np.asarray(xi)])
    return v.l1_distance_to(fun, -span, span, extra_breaks=pts, pieces=4)


def riemann_distance(system, u_l, u_r, lam):
    """Distance per unit time between a single jump at speed lam and the
    homogeneous Riemann fan."""
    fan = solve_homogeneous_riemann(system, u_l, u_r)
    edges = [s for sp in fan.speeds for s in sp]
    return self_similar_distance(fan.evaluate, u_l, u_r, lam, edges=edges)


def h_riemann_distance(system, source, x0, h, u_l, u_r, lam=0.0):
    """Distance per unit time between a jump at speed lam and the h-Riemann pattern at x0."""
    pat = solve_h_riemann(system, source, x0, h, u_l, u_r)
    edges = [s for fan in (pat.left, pat.right) for sp in fan.speeds for s in sp]
    ev = lambda z: pat.left.evaluate(z) if z < 0 else pat.right.evaluate(z)
    return self_similar_distance(ev, u_l, u_r, lam, edges=edges)


# ---------------------------------------------------------------------------
# Semigroup diagnostics
# ---------------------------------------------------------------------------

def run(system, source, u0, eps, h, t, config=None):
    traj = Trajectory(system, source, u0, eps, h, config=config)
    return traj.at(t)


def as_function_data(u, pad=1.0):
    """View a piecewise-constant state as generic data (no declared breaks),
    so a restart re-samples it with L1 error at most eps.

    ``pad`` must be positive: the data are clipped to [lo, hi], and the
    outer states are only seen strictly outside the first and last break.
    """
    if pad <= 0:
        raise ValueError("pad must be positive")
    pc = _as_piecewise(u)
    lo, hi = pc.range()
    return FunctionData(lambda x: pc(x), lo - pad, hi + pad, breaks=(), n=pc.n)


def semigroup_defect(system, source, u0, eps, h, t, s, domain, config=None, resample=True):
    """||P_{t+s} u - P_t P_s u||_{L1(domain)}.

    With ``resample`` the restart treats P_s u as generic data and re-samples
    it (re-initialization error <= eps); otherwise the exact piecewise-constant
    state is reused.
    """
    traj = Trajectory(system, source, u0, eps, h, config=config)
    mid = traj.at(s)
    full = traj.at(t + s)
    data = as_function_data(mid) if resample else mid.to_piecewise()
    restart = Trajectory(system, source, data, eps, h, config=config).at(t)
    return full.to_piecewise().l1_distance(restart.to_piecewise(), *domain)


@dataclass(frozen=True)
class LipschitzFit:
    L: float
    ratios: tuple


def lipschitz_matrix(system, source, data_pairs, time_pairs, eps, h, domain, config=None):
    """Fit L in ||P_s u - P_t v|| <= L (|s - t| + ||u - v||) over all given
    data and time pairs."""
    lo, hi = domain
    ratios = []
    for u, v in data_pairs:
        tu = Trajectory(system, source, u, eps, h, config=config)
        tv = Trajectory(system, source, v, eps, h, config=config)
        du = tu.initial.to_piecewise().l1_distance(tv.initial.to_piecewise(), lo, hi)
        for s, t in time_pairs:
            num = tu.at(s).to_piecewise().l1_distance(tv.at(t).to_piecewise(), lo, hi)
            den = abs(s - t) + du
            if den > 0:
                ratios.append(num / den)
    return LipschitzFit(float(max(ratios)) if ratios else 0.0, tuple(ratios))


def time_lipschitz(traj: Trajectory, times, domain):
    """max ||u(t) - u(s)|| / |t - s| over consecutive sample times."""
    times = sorted(times)
    best = 0.0
    for s, t in zip(times, times[1:]):
        d = traj.at(s).to_piecewise().l1_distance(traj.at(t).to_piecewise(), *domain)
        best = max(best, d / (t - s))
    return best


def determinacy_distance(u_run: FrontSet, v_run: FrontSet, a, b, lam_hat):
    """L1 distance of two runs on [a + lam t, b - lam t]."""
    t = u_run.t
    lo, hi = a + lam_hat * t, b - lam_hat * t
    if hi <= lo:
        return 0.0
    return u_run.to_piecewise().l1_distance(v_run.to_piecewise(), lo, hi)


def scheme_error(source, eps, h, a, b):
    """(b - a)(eps + eps_tilde_h): the reference error scale of a run."""
    et = 0.0 if source is None or source.is_zero else epsilon_tilde(source, h)
    return (b - a) * (eps + et)


def w_h_window_error(problem: LinearLocalProblem, u, vbar, h, t, a, b, lam_hat):
    """int_{a + lam t}^{b - lam t} |w - w_h| with w from data u and w_h from vbar."""
    lo, hi = a + lam_hat * t, b - lam_hat * t
    if hi <= lo:
        return 0.0
    u, vbar = _as_piecewise(u), _as_piecewise(vbar)
    pos, _ = problem.comb_integrals(h)
    knots = [lo, hi]
    for i in range(problem.system.n):
        sh = problem.lam[i] * t
        knots.extend(u.breaks + sh)
        knots.extend(vbar.breaks + sh)
        knots.extend(pos)
        knots.extend(pos + sh)
        for k in problem.kinks():
            knots.extend([k, k + sh])
    knots = np.unique([k for k in knots if lo <= k <= hi])
    total = 0.0
    f = lambda x: np.linalg.norm(problem.flat(u, t, x) - problem.w_h(vbar, h, t, x), axis=1)
    for x0, x1 in zip(knots[:-1], knots[1:]):
        total += gauss_legendre(f, x0, x1)
    return float(total)
