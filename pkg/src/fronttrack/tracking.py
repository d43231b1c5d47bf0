"""Event-driven wave-front tracking with zero-waves on a Dirac comb.

The solution is a chain of fronts (shocks, contacts, rarefaction pieces,
non-physical fronts and stationary zero-waves) between constant states.
Pairs of adjacent fronts are scheduled in a heap by collision time; each
collision is resolved with the homogeneous Riemann solver away from the
comb, the h-Riemann solver at comb points, or a simplified solver that
keeps incoming strengths and sends the residual jump to a non-physical
front moving at ``lam_hat``.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .hriemann import solve_h_riemann
from .piecewise import FunctionData, PiecewiseConstant
from .sources import ZeroSource, omega_integral, phi_h
from .systems import AdmissibilityError, RiemannError, as_state, solve_homogeneous_riemann

log = logging.getLogger(__name__)

KINDS = ("shock", "contact", "rarefaction", "nonphysical", "zero")
PHYSICAL = ("shock", "contact", "rarefaction")


def _norm(v):
    return math.sqrt(float(np.dot(v, v)))


class FrontTrackingError(RuntimeError):
    """Fatal abort of a run; ``invariant`` names the violated check."""

    def __init__(self, message, invariant="runtime", t=None, x=None):
        super().__init__(message)
        self.invariant = invariant
        self.t = t
        self.x = x


# ---------------------------------------------------------------------------
# Stationary interfaces
# ---------------------------------------------------------------------------

class DiracComb:
    """Zero-waves at x = jh carrying the source of the window [jh, jh + h).

    Windows where omega vanishes are identity jumps and are not
    instantiated; the comb is truncated to |j| < 1/(h eps).
    """

    def __init__(self, system, source, h, eps):
        self.system = system
        self.source = source if source is not None else ZeroSource(system.n)
        self.h = float(h)
        self.eps = float(eps)
        self.keys = ()
        self._strength = {}
        if self.source.is_zero:
            return
        lo, hi = self.source.support
        jmax = math.ceil(1.0 / (self.h * self.eps)) - 1
        j_lo = max(math.floor(lo / self.h) - 1, -jmax)
        j_hi = min(math.ceil(hi / self.h), jmax)
        keys = []
        for j in range(j_lo, j_hi + 1):
            s = omega_integral(self.source, j * self.h, self.h)
            if s > 0:
                keys.append(j)
                self._strength[j] = s
        self.keys = tuple(keys)
        outside = self.source.omega_l1 - sum(self._strength.values())
        if outside > self.eps:
            log.warning("omega mass %.3g outside the truncated comb exceeds eps", outside)

    def position(self, key):
        return key * self.h

    def strength(self, key):
        return self._strength[key]

    def jump(self, key, u):
        return phi_h(self.system, self.source, key * self.h, self.h, u)

    def solve(self, key, u_l, u_r):
        return solve_h_riemann(self.system, self.source, key * self.h, self.h, u_l, u_r)

    @property
    def total_strength(self):
        return float(sum(self._strength.values()))


# ---------------------------------------------------------------------------
# Fronts and snapshots
# ---------------------------------------------------------------------------

class Front:
    __slots__ = ("id", "kind", "family", "x0", "t0", "speed", "sigma", "ul", "ur", "key",
                 "prev", "next", "alive", "size")

    def __init__(self, kind, family, x0, t0, speed, sigma, ul, ur, key=None):
        self.id = -1
        self.kind = kind
        self.family = family
        self.x0 = x0
        self.t0 = t0
        self.speed = speed
        self.sigma = sigma
        self.ul = ul
        self.ur = ur
        self.key = key
        self.prev = None
        self.next = None
        self.alive = True
        self.size = 0.0  # |ur - ul|, set on registration

    def pos(self, t):
        return self.x0 + self.speed * (t - self.t0)

    @property
    def jump(self):
        return _norm(self.ur - self.ul)

    def weight(self):
        """Contribution to the Glimm total strength."""
        if self.kind in PHYSICAL:
            return abs(self.sigma)
        if self.kind == "zero":
            return self.sigma
        return self.size

    def record(self, t):
        return FrontRecord(self.id, self.kind, self.family, self.pos(t), self.speed, self.sigma,
                           self.ul.copy(), self.ur.copy(), self.key)

    def to_dict(self, t):
        return {"id": self.id, "kind": self.kind, "family": self.family, "x": self.pos(t),
                "speed": self.speed, "sigma": self.sigma, "ul": self.ul.tolist(), "ur": self.ur.tolist()}


@dataclass(frozen=True)
class FrontRecord:
    id: int
    kind: str
    family: int | None
    x: float
    speed: float
    sigma: float
    ul: np.ndarray
    ur: np.ndarray
    key: int | None = None


@dataclass(frozen=True)
class TrackerConfig:
    eps: float
    h: float
    kappa: float = 1.0
    threshold: float | None = None      # simplified-solver product threshold for front pairs, default eps**3
    comb_threshold: float | None = None  # wave strength times zero strength at comb points, default eps**2; 0 = always a full h-Riemann solve
    lam_hat: float | None = None        # non-physical speed, default 2 max|lambda|
    max_events: int = 2_000_000
    tv_blowup: float = 10.0
    merge_tol: float = 1e-12
    tv_threshold: float | None = None   # admission threshold on TV(u0)
    audit: bool = False                 # record the Glimm functional after every interaction

    @property
    def product_threshold(self):
        return self.eps ** 3 if self.threshold is None else self.threshold

    @property
    def comb_product_threshold(self):
        return self.eps ** 2 if self.comb_threshold is None else self.comb_threshold


@dataclass(frozen=True)
class GlimmState:
    V: float
    Q: float
    kappa: float
    history: tuple = ()
    violations: int = 0

    @property
    def functional(self):
        return self.V + self.kappa * self.Q


@dataclass(frozen=True)
class FrontSet:
    """Snapshot of a front-tracking solution at time ``t``."""

    t: float
    fronts: tuple
    u_left: np.ndarray
    system: object
    comb: object
    config: TrackerConfig
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def positions(self):
        return np.array([f.x for f in self.fronts])

    @property
    def states(self):
        return np.array([self.u_left] + [f.ur for f in self.fronts])

    def to_piecewise(self):
        return PiecewiseConstant(self.positions, self.states)

    def evaluate(self, x):
        """Right-continuous value at x (u+ at a front position)."""
        pos = self.positions
        k = int(np.searchsorted(pos, x, side="right"))
        return self.states[k].copy()

    def left_limit(self, x):
        k = int(np.searchsorted(self.positions, x, side="left"))
        return self.states[k].copy()

    def snapshot(self, grid):
        return self.to_piecewise()(np.asarray(grid, dtype=float))

    def total_variation(self, a=-np.inf, b=np.inf):
        return float(sum(np.linalg.norm(f.ur - f.ul) for f in self.fronts if a < f.x < b))

    def np_strength(self):
        return float(sum(np.linalg.norm(f.ur - f.ul) for f in self.fronts if f.kind == "nonphysical"))


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

class FrontTracker:
    """Mutable single-threaded engine; see ``build_initial`` / ``advance``."""

    def __init__(self, system, comb, config: TrackerConfig, event_log=None):
        self.system = system
        self.comb = comb
        self.config = config
        self.eps = config.eps
        self.lam_hat = config.lam_hat if config.lam_hat is not None else 2.0 * system.speed_bound()
        self.event_log = event_log
        self.t = 0.0
        self.first = None
        self.u_left = None
        self.heap = []
        self._seq = 0
        self._next_id = 0
        self.events = 0
        self.tv = 0.0
        self.V = 0.0
        self.np_total = 0.0
        self.tv_max = 0.0
        self.reference_functional = None
        self.history = []
        self.violations = 0
        self.counts = {"homogeneous": 0, "h-riemann": 0, "simplified": 0, "pass": 0}

    # -- linked list ---------------------------------------------------------
    def iter_fronts(self):
        f = self.first
        while f is not None:
            yield f
            f = f.next

    def _account(self, f, sign):
        self.tv += sign * f.size
        self.V += sign * f.weight()
        if f.kind == "nonphysical":
            self.np_total += sign * f.size

    def _register(self, f):
        f.id = self._next_id
        f.size = _norm(f.ur - f.ul)
        if f.kind == "nonphysical":
            f.sigma = f.size
        self._next_id += 1
        self._account(f, +1)

    def _link(self, fronts):
        prev = None
        for f in fronts:
            self._register(f)
            f.prev = prev
            if prev is None:
                self.first = f
            else:
                prev.next = f
            prev = f
        for a, b in zip(fronts, fronts[1:]):
            self._schedule(a, b)

    def _replace(self, first, last, outgoing):
        left, right = first.prev, last.next
        f = first
        while True:
            f.alive = False
            self._account(f, -1)
            if f is last:
                break
            f = f.next
        chain = list(outgoing)
        for g in chain:
            self._register(g)
        seq = [left, *chain, right]
        for a, b in zip(seq, seq[1:]):
            if a is not None:
                a.next = b
            if b is not None:
                b.prev = a
        if left is None:
            self.first = chain[0] if chain else right
        for a, b in zip(seq, seq[1:]):
            if a is not None and b is not None:
                self._schedule(a, b)

    def _schedule(self, a, b):
        ds = a.speed - b.speed
        if ds <= 1e-14:
            return
        gap = b.pos(self.t) - a.pos(self.t)
        tc = self.t + max(gap, 0.0) / ds
        heapq.heappush(self.heap, (tc, self._seq, a, b))
        self._seq += 1

    # -- front construction --------------------------------------------------
    def _wave_fronts(self, i, um, up, sigma, x, t):
        """Fronts for one elementary wave; rarefactions are split into
        pieces of strength at most eps."""
        S = self.system
        if S.gnl[i] and sigma > 0:
            m = max(1, math.ceil(sigma / self.eps - 1e-9))
            pts = [um] + [S.lax_curve(i, um, sigma * k / m) for k in range(1, m)] + [up]
            out = []
            for a, b in zip(pts, pts[1:]):
                lam_a, lam_b = S.eigenvalues(a)[i], S.eigenvalues(b)[i]
                out.append(Front("rarefaction", i, x, t, 0.5 * (lam_a + lam_b), S.strength_of(i, a, b), a, b))
            return out
        kind = "shock" if S.gnl[i] else "contact"
        return [Front(kind, i, x, t, S.shock_speed(i, um, up), float(sigma), um, up)]

    def _fan_fronts(self, fan, x, t):
        out = []
        for k, i in enumerate(fan.families):
            s = float(fan.sigma[k])
            if abs(s) <= 1e-14:
                continue
            out.extend(self._wave_fronts(i, fan.states[k], fan.states[k + 1], s, x, t))
        return out

    def _zero_front(self, key, ul, ur, t):
        return Front("zero", None, self.comb.position(key), t, 0.0, self.comb.strength(key), ul, ur, key=key)

    def _np_front(self, ul, ur, x, t):
        return Front("nonphysical", None, x, t, self.lam_hat, 0.0, ul, ur)

    @staticmethod
    def _chain(fronts, u_l, u_r):
        """Make consecutive states identical and pin the outer states."""
        if not fronts:
            return fronts
        fronts[0].ul = u_l
        for a, b in zip(fronts, fronts[1:]):
            b.ul = a.ur
        fronts[-1].ur = u_r
        return fronts

    # -- solvers -------------------------------------------------------------
    def _accurate(self, key, x, t, u_l, u_r):
        if key is None:
            fan = solve_homogeneous_riemann(self.system, u_l, u_r)
            self.counts["homogeneous"] += 1
            return self._fan_fronts(fan, x, t)
        pat = self.comb.solve(key, u_l, u_r)
        self.counts["h-riemann"] += 1
        return (self._fan_fronts(pat.left, x, t) + [self._zero_front(key, pat.u_minus, pat.u_plus, t)]
                + self._fan_fronts(pat.right, x, t))

    def _simplified_comb(self, zero, wave, wave_left, x, t, u_l, u_r):
        S = self.system
        i = wave.family
        if wave_left:
            up = self.comb.jump(zero.key, u_l)
            w = S.lax_curve(i, up, wave.sigma)
            out = [self._zero_front(zero.key, u_l, up, t)] + self._wave_fronts(i, up, w, wave.sigma, x, t)
        else:
            w = S.lax_curve(i, u_l, wave.sigma)
            wp = self.comb.jump(zero.key, w)
            out = self._wave_fronts(i, u_l, w, wave.sigma, x, t) + [self._zero_front(zero.key, w, wp, t)]
            w = wp
        if _norm(u_r - w) > 1e-15:
            out.append(self._np_front(w, u_r, x, t))
        return out

    def _simplified_pair(self, a, b, x, t, u_l, u_r):
        S = self.system
        if a.family == b.family:
            s = a.sigma + b.sigma
            w = S.lax_curve(a.family, u_l, s)
            out = self._wave_fronts(a.family, u_l, w, s, x, t)
        else:
            w1 = S.lax_curve(b.family, u_l, b.sigma)
            w = S.lax_curve(a.family, w1, a.sigma)
            out = self._wave_fronts(b.family, u_l, w1, b.sigma, x, t) + self._wave_fronts(a.family, w1, w, a.sigma, x, t)
        if _norm(u_r - w) > 1e-15:
            out.append(self._np_front(w, u_r, x, t))
        return out

    def _pass_nonphysical(self, other, x, t, u_l, u_r):
        if other.kind == "zero":
            w = self.comb.jump(other.key, u_l)
            out = [self._zero_front(other.key, u_l, w, t)]
        else:
            w = self.system.lax_curve(other.family, u_l, other.sigma)
            out = self._wave_fronts(other.family, u_l, w, other.sigma, x, t)
        if _norm(u_r - w) > 1e-15:
            out.append(self._np_front(w, u_r, x, t))
        return out

    def _resolve(self, incoming, x, t, u_l, u_r):
        zeros = [f for f in incoming if f.kind == "zero"]
        if len(zeros) > 1:
            raise FrontTrackingError("two comb points coincide", "comb", t, x)
        key = zeros[0].key if zeros else None
        nps = [f for f in incoming if f.kind == "nonphysical"]
        budget_ok = self.np_total < 0.5 * self.eps
        thr = self.config.product_threshold
        multi = self.system.n > 1
        try:
            if len(incoming) == 2 and len(nps) == 1 and incoming[0] is nps[0]:
                self.counts["pass"] += 1
                return "pass", self._pass_nonphysical(incoming[1], x, t, u_l, u_r)
            if len(incoming) == 2 and not nps and multi and budget_ok:
                if key is not None:
                    wave = incoming[0] if incoming[1].kind == "zero" else incoming[1]
                    if abs(wave.sigma) * zeros[0].sigma < self.config.comb_product_threshold:
                        self.counts["simplified"] += 1
                        return "simplified", self._simplified_comb(zeros[0], wave, incoming[0] is wave, x, t, u_l, u_r)
                else:
                    a, b = incoming
                    if abs(a.sigma * b.sigma) < thr and a.family >= b.family:
                        self.counts["simplified"] += 1
                        return "simplified", self._simplified_pair(a, b, x, t, u_l, u_r)
        except (AdmissibilityError, RiemannError):
            pass
        try:
            return ("h-riemann" if key is not None else "homogeneous"), self._accurate(key, x, t, u_l, u_r)
        except (AdmissibilityError, RiemannError) as exc:
            raise FrontTrackingError(f"interaction at t={t:.6g}, x={x:.6g} failed: {exc}", "riemann", t, x) from exc

    # -- evolution -----------------------------------------------------------
    def _interact(self, a, b):
        t = self.t
        tol = self.config.merge_tol * (1.0 + abs(a.pos(t)))
        x = 0.5 * (a.pos(t) + b.pos(t))
        first, last = a, b
        while first.prev is not None and abs(first.prev.pos(t) - x) <= tol:
            first = first.prev
        while last.next is not None and abs(last.next.pos(t) - x) <= tol:
            last = last.next
        incoming = []
        f = first
        while True:
            incoming.append(f)
            if f is last:
                break
            f = f.next
        for f in incoming:
            if f.kind == "zero":
                x = f.x0
        u_l, u_r = first.ul, last.ur
        kind, outgoing = self._resolve(incoming, x, t, u_l, u_r)
        self._chain(outgoing, u_l, u_r)
        if self.event_log is not None:
            self.event_log({"t": t, "x": x, "solver": kind,
                            "incoming": [f.to_dict(t) for f in incoming],
                            "outgoing": [g.to_dict(t) for g in outgoing]})
        self._replace(first, last, outgoing)
        self.events += 1
        self.tv_max = max(self.tv_max, self.tv)
        self._check(t, x)
        if self.config.audit:
            self._record()

    def _check(self, t, x):
        if self.np_total > self.eps * (1 + 1e-9):
            raise FrontTrackingError(f"non-physical budget exceeded: {self.np_total:.3e} > eps", "np_budget", t, x)
        if self.reference_functional and self.tv > self.config.tv_blowup * self.reference_functional:
            raise FrontTrackingError(f"total variation blow-up: {self.tv:.3e}", "tv_blowup", t, x)
        if self.events > self.config.max_events:
            raise FrontTrackingError("event budget exhausted", "max_events", t, x)

    def advance(self, t_target):
        if t_target < self.t:
            raise ValueError("cannot advance backwards")
        heap = self.heap
        while heap and heap[0][0] <= t_target:
            tc, _, a, b = heapq.heappop(heap)
            if not (a.alive and b.alive and a.next is b):
                continue
            self.t = max(self.t, tc)
            self._interact(a, b)
        self.t = float(t_target)
        self._record()
        return self

    # -- diagnostics ---------------------------------------------------------
    def interaction_potential(self):
        n = self.system.n
        s_all = np.zeros(n)
        s_shock = np.zeros(n)
        s_pos = 0.0
        z_sum = 0.0
        Q = 0.0
        for f in self.iter_fronts():
            if f.kind in PHYSICAL:
                k = f.family
                a = abs(f.sigma)
                partner = s_all[k + 1:].sum() + (s_all[k] if f.kind == "shock" else s_shock[k])
                if f.speed < 0:
                    partner += z_sum
                Q += a * partner
                s_all[k] += a
                if f.kind == "shock":
                    s_shock[k] += a
                if f.speed > 0:
                    s_pos += a
            elif f.kind == "zero":
                Q += f.sigma * s_pos
                z_sum += f.sigma
        return float(Q)

    def glimm(self):
        V = float(sum(f.weight() for f in self.iter_fronts()))
        return V, self.interaction_potential()

    def _record(self):
        V, Q = self.glimm()
        F = V + self.config.kappa * Q
        if self.history and F > self.history[-1][3] * (1 + 1e-9) + 1e-12:
            self.violations += 1
            log.debug("Glimm functional increased at t=%g: %g -> %g", self.t, self.history[-1][3], F)
        self.history.append((self.t, V, Q, F))

    def snapshot(self):
        t = self.t
        fronts = tuple(f.record(t) for f in self.iter_fronts())
        self.tv_max = max(self.tv_max, self.tv)
        stats = {"events": self.events, "fronts": len(fronts), "np_total": self.np_total,
                 "tv": self.tv, "tv_max": self.tv_max,
                 "functional_max": max(h[3] for h in self.history) if self.history else None,
                 "glimm_violations": self.violations, **self.counts}
        return FrontSet(t, fronts, self.u_left.copy(), self.system, self.comb, self.config, stats)

    @classmethod
    def from_frontset(cls, fs: FrontSet, event_log=None):
        eng = cls(fs.system, fs.comb, fs.config, event_log=event_log)
        eng.t = fs.t
        eng.u_left = fs.u_left.copy()
        fronts = [Front(r.kind, r.family, r.x, fs.t, r.speed, r.sigma, r.ul.copy(), r.ur.copy(), key=r.key)
                  for r in fs.fronts]
        eng._link(fronts)
        eng.reference_functional = fs.stats.get("reference_functional")
        eng.tv_max = fs.stats.get("tv_max", 0.0)
        eng.events = fs.stats.get("events", 0)
        eng._record()
        return eng


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def as_initial_data(u0, n=None):
    if isinstance(u0, (PiecewiseConstant, FunctionData)):
        return u0
    if isinstance(u0, FrontSet):
        return u0.to_piecewise()
    if callable(u0):
        raise TypeError("wrap callables in FunctionData(fun, lo, hi)")
    return PiecewiseConstant.constant(u0)


def sample_initial(data, eps, comb=None, max_cells=20000):
    """Piecewise-constant approximation with breakpoints at declared
    discontinuities and comb points; smooth data are cell-averaged on a
    grid with spacing eps / TV."""
    comb_pos = {} if comb is None else {comb.position(k): k for k in comb.keys}
    exact = isinstance(data, PiecewiseConstant)
    pts = list(data.declared_breaks)
    if not exact:
        lo, hi = data.range()
        tv = data.total_variation()
        if hi > lo:
            dx = eps / max(tv, 1e-300)
            cells = int(min(max_cells, max(1, math.ceil((hi - lo) / dx))))
            pts.extend(np.linspace(lo, hi, cells + 1))
    pts.extend(comb_pos)
    pts = np.unique(np.asarray(pts, dtype=float))
    # merge points closer than the tolerance, preferring comb positions
    merged = []
    for x in pts:
        if merged and abs(x - merged[-1]) <= 1e-12 * (1 + abs(x)):
            if x in comb_pos:
                merged[-1] = x
            continue
        merged.append(x)
    breaks = np.array(merged)
    if len(breaks) == 0:
        return PiecewiseConstant([], [data.u_left]), {}
    if exact:
        mids = np.concatenate([[breaks[0] - 1.0], 0.5 * (breaks[:-1] + breaks[1:]), [breaks[-1] + 1.0]])
        values = data(mids)
    else:
        inner = [data.cell_average(a, b) for a, b in zip(breaks[:-1], breaks[1:])]
        values = np.array([data.u_left, *inner, data.u_right])
    keys = {k: comb_pos[x] for k, x in enumerate(breaks.tolist()) if x in comb_pos}
    return PiecewiseConstant(breaks, values), keys


def build_initial(system, source, u0, eps, h, config: TrackerConfig | None = None, comb=None,
                  event_log=None) -> FrontSet:
    """Front set at t = 0: local (h-)Riemann patterns at every breakpoint of
    the piecewise-constant approximation of u0."""
    data = as_initial_data(u0)
    config = config or TrackerConfig(eps=eps, h=h)
    if config.eps != eps or config.h != h:
        config = replace(config, eps=eps, h=h)
    tv0 = data.total_variation()
    if config.tv_threshold is not None and tv0 > config.tv_threshold:
        raise FrontTrackingError(f"TV(u0) = {tv0:.4g} exceeds the admission threshold {config.tv_threshold}",
                                 "tv_threshold")
    comb = comb if comb is not None else DiracComb(system, source, h, eps)
    approx, keys = sample_initial(data, eps, comb)
    for u in approx.values:
        system.check_admissible(u, "initial value")
    eng = FrontTracker(system, comb, config, event_log=event_log)
    eng.u_left = approx.values[0].copy()
    fronts = []
    for k, x in enumerate(approx.breaks):
        # start from the last emitted state: a jump below the wave cutoff leaves no front
        ul = fronts[-1].ur if fronts else approx.values[0]
        ur = approx.values[k + 1]
        key = keys.get(k)
        try:
            if key is not None:
                out = eng._accurate(key, float(x), 0.0, ul, ur)
            elif _norm(ur - ul) > 0:
                out = eng._accurate(None, float(x), 0.0, ul, ur)
            else:
                continue
        except (AdmissibilityError, RiemannError) as exc:
            raise FrontTrackingError(f"initial Riemann problem at x={x:.6g} failed: {exc}", "riemann", 0.0, x) from exc
        fronts.extend(eng._chain(out, ul, ur))
    eng._link(fronts)
    eng._record()
    eng.reference_functional = eng.history[-1][3] if eng.history[-1][3] > 0 else None
    if isinstance(data, PiecewiseConstant):
        init_err = approx.l1_distance(data, *_span(approx))
    else:
        init_err = approx.l1_distance_to(data, *_span(approx, data), extra_breaks=data.declared_breaks)
    fs = eng.snapshot()
    fs.stats.update({"reference_functional": eng.reference_functional, "initial_l1_error": init_err,
                     "tv0": tv0})
    return fs


def _span(approx, data=None):
    lo = approx.breaks[0] if len(approx.breaks) else 0.0
    hi = approx.breaks[-1] if len(approx.breaks) else 0.0
    if data is not None:
        dlo, dhi = data.range()
        lo, hi = min(lo, dlo), max(hi, dhi)
    return lo - 1.0, hi + 1.0


def advance(fs: FrontSet, t_target, event_log=None) -> FrontSet:
    """Evolve a front set to ``t_target``."""
    eng = FrontTracker.from_frontset(fs, event_log=event_log)
    eng.advance(t_target)
    out = eng.snapshot()
    _carry(fs.stats, out.stats)
    return out


def _carry(old, new):
    """Propagate run-level statistics across engine restarts."""
    for k in ("reference_functional", "initial_l1_error", "tv0"):
        if k in old:
            new[k] = old[k]
    if old.get("functional_max") is not None:
        new["functional_max"] = max(new["functional_max"] or 0.0, old["functional_max"])


def evaluate(fs: FrontSet, x):
    return fs.evaluate(x)


def snapshot(fs: FrontSet, grid):
    return fs.snapshot(grid)


def glimm_report(fs: FrontSet) -> GlimmState:
    eng = FrontTracker.from_frontset(fs)
    V, Q = eng.glimm()
    return GlimmState(V, Q, fs.config.kappa)


def solve(system, source, u0, eps, h, t_final, config=None, event_log=None, record_times=()):
    """Convenience: run from u0 and return the final front set (and
    intermediate snapshots for ``record_times``)."""
    fs = build_initial(system, source, u0, eps, h, config=config, event_log=event_log)
    eng = FrontTracker.from_frontset(fs, event_log=event_log)
    snaps = {}
    for tr in sorted(set(record_times) | {t_final}):
        eng.advance(tr)
        snaps[tr] = eng.snapshot()
        _carry(fs.stats, snaps[tr].stats)
    return (snaps[t_final], snaps) if len(record_times) else snaps[t_final]
