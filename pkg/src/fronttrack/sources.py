"""Source terms g(x, u) with integrable dominating profiles.

A source carries its C1-dominating profile omega(x) (|g|, |D_u g| <= omega)
and a C2-dominating profile m_tilde(x).  Window integrals of g and omega use
closed-form antiderivatives when the profile has one and singularity-aware
adaptive quadrature otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .systems import as_state


class SourceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Scalar profiles p(x); sources are built as p(x) * field(u)
# ---------------------------------------------------------------------------

class Profile:
    """Integrable scalar density with compact support."""

    support = (0.0, 0.0)
    singular_points = ()

    def density(self, x):
        raise NotImplementedError

    def antiderivative(self, x):
        """P(x) = int_{-inf}^x p."""
        raise NotImplementedError

    def abs_antiderivative(self, x):
        """int_{-inf}^x |p|."""
        raise NotImplementedError

    @property
    def l1(self):
        return float(self.abs_antiderivative(self.support[1]))

    def integral(self, a, b):
        return float(self.antiderivative(b) - self.antiderivative(a))


class ZeroProfile(Profile):
    support = (0.0, 0.0)

    def density(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def antiderivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    abs_antiderivative = antiderivative


class IndicatorProfile(Profile):
    """value * 1_[a, b](x)."""

    def __init__(self, a=0.0, b=1.0, value=1.0):
        if b <= a:
            raise SourceError("indicator interval must have positive length")
        self.a, self.b, self.value = float(a), float(b), float(value)
        self.support = (self.a, self.b)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.a) & (x <= self.b), self.value, 0.0)

    def antiderivative(self, x):
        return self.value * (np.clip(x, self.a, self.b) - self.a)

    def abs_antiderivative(self, x):
        return abs(self.value) * (np.clip(x, self.a, self.b) - self.a)


class InverseSqrtProfile(Profile):
    """amplitude / (2 sqrt|x - center|) on |x - center| <= radius."""

    def __init__(self, amplitude=1.0, center=0.0, radius=1.0):
        if radius <= 0:
            raise SourceError("radius must be positive")
        self.amplitude, self.center, self.radius = float(amplitude), float(center), float(radius)
        self.support = (self.center - self.radius, self.center + self.radius)
        self.singular_points = (self.center,)

    def density(self, x):
        d = np.abs(np.asarray(x, dtype=float) - self.center)
        with np.errstate(divide="ignore"):
            val = self.amplitude / (2.0 * np.sqrt(d))
        return np.where(d <= self.radius, val, 0.0)

    def _base(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return np.sign(d) * np.sqrt(np.minimum(np.abs(d), self.radius))

    def antiderivative(self, x):
        return self.amplitude * (self._base(x) + np.sqrt(self.radius))

    def abs_antiderivative(self, x):
        return abs(self.amplitude) * (self._base(x) + np.sqrt(self.radius))


class PolynomialProfile(Profile):
    """Piecewise polynomial density: pieces of (a, b, coefficients), with
    coefficients in increasing degree in the local variable x - a."""

    def __init__(self, pieces):
        self.pieces = []
        for a, b, coeffs in sorted(pieces, key=lambda p: p[0]):
            if b <= a:
                raise SourceError("polynomial piece with empty interval")
            poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
            self.pieces.append((float(a), float(b), poly, poly.integ(), self._abs_integral(poly, b - a)))
        for (a0, b0, *_), (a1, *_r) in zip(self.pieces, self.pieces[1:]):
            if a1 < b0:
                raise SourceError("polynomial pieces overlap")
        self.support = (self.pieces[0][0], self.pieces[-1][1]) if self.pieces else (0.0, 0.0)

    @staticmethod
    def _abs_integral(poly, length):
        """Antiderivative of |poly| on [0, length] as a callable."""
        roots = [r.real for r in poly.roots() if abs(r.imag) < 1e-12 and 0 < r.real < length]
        knots = np.array([0.0, *sorted(roots), length])
        P = poly.integ()
        signs = np.sign(poly((knots[:-1] + knots[1:]) / 2))
        cum = np.concatenate([[0.0], np.cumsum(signs * (P(knots[1:]) - P(knots[:-1])))])

        def F(s):
            k = np.clip(np.searchsorted(knots, s, side="right") - 1, 0, len(signs) - 1)
            return cum[k] + signs[k] * (P(s) - P(knots[k]))

        return F

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, b, poly, *_ in self.pieces:
            m = (x >= a) & (x <= b)
            out = np.where(m, poly(x - a), out)
        return out

    def _accumulate(self, x, absolute):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, b, poly, P, Fabs in self.pieces:
            s = np.clip(x - a, 0.0, b - a)
            out = out + (Fabs(s) if absolute else P(s) - P(0.0))
        return out

    def antiderivative(self, x):
        return self._accumulate(x, False)

    def abs_antiderivative(self, x):
        return self._accumulate(x, True)


# ---------------------------------------------------------------------------
# Sources
# ---------------------------------------------------------------------------

class SourceTerm:
    """g(x, u) with dominating profiles.

    Subclasses override ``g``, ``dg_du``, ``omega``; the integral queries
    fall back to quadrature.
    """

    name = "source"
    support = None
    singular_points = ()

    def __init__(self, n):
        self.n = n

    def g(self, x, u):
        raise NotImplementedError

    def dg_du(self, x, u):
        raise NotImplementedError

    def omega(self, x):
        raise NotImplementedError

    def m_tilde(self, x):
        return self.omega(x)

    @property
    def is_zero(self):
        return False

    def omega_antiderivative(self, x):
        """W(x) = int_{-inf}^x omega, or None if no closed form."""
        return None

    def _pieces(self, a, b):
        cuts = [a, *sorted(s for s in self.singular_points if a < s < b), b]
        if self.support is not None:
            lo, hi = self.support
            cuts = sorted(set(cuts + [c for c in (lo, hi) if a < c < b]))
        return list(zip(cuts[:-1], cuts[1:]))

    def _quad(self, fun, a, b):
        total = 0.0
        for lo, hi in self._pieces(a, b):
            if self.support is not None and (hi <= self.support[0] or lo >= self.support[1]):
                continue
            val, _ = quad(fun, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
            total += val
        return total

    def omega_integral(self, a, b):
        """int_a^b omega (a <= b)."""
        if b <= a:
            return 0.0
        W = self.omega_antiderivative
        wa = W(a)
        if wa is not None:
            return float(W(b) - wa)
        return self._quad(lambda x: float(self.omega(x)), a, b)

    def integral(self, a, b, u):
        """int_a^b g(x, u) dx, signed in the orientation of (a, b)."""
        u = as_state(u)
        if a == b:
            return np.zeros(self.n)
        if b < a:
            return -self.integral(b, a, u)
        return np.array([self._quad(lambda x, k=k: float(self.g(x, u)[k]), a, b) for k in range(self.n)])

    def window_integral(self, x0, h, u):
        """int_0^h g(x0 + s, u) ds."""
        return self.integral(x0, x0 + h, u)

    def window_jacobian(self, x0, h, u):
        """int_0^h D_u g(x0 + s, u) ds."""
        u = as_state(u)
        out = np.zeros((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                out[i, j] = self._quad(lambda x, i=i, j=j: float(self.dg_du(x, u)[i, j]), x0, x0 + h)
        return out

    @property
    def omega_l1(self):
        if self.support is None:
            raise SourceError("omega has unbounded support")
        return self.omega_integral(*self.support)

    def m_tilde_l1(self):
        if self.support is None:
            raise SourceError("m_tilde has unbounded support")
        return self._quad(lambda x: float(self.m_tilde(x)), *self.support)


class ZeroSource(SourceTerm):
    name = "zero"
    support = (0.0, 0.0)

    def g(self, x, u):
        return np.zeros(self.n)

    def dg_du(self, x, u):
        return np.zeros((self.n, self.n))

    def omega(self, x):
        return 0.0 * np.asarray(x, dtype=float)

    @property
    def is_zero(self):
        return True

    def omega_antiderivative(self, x):
        return 0.0 * np.asarray(x, dtype=float)

    def integral(self, a, b, u):
        return np.zeros(self.n)

    def window_jacobian(self, x0, h, u):
        return np.zeros((self.n, self.n))

    def m_tilde_l1(self):
        return 0.0


class SeparableSource(SourceTerm):
    """g(x, u) = p(x) * field(u) with omega = |p| * c1_bound.

    ``c1_bound`` must dominate max(|field|, ||D field||) over the admissible
    box, ``c2_bound`` additionally the second derivatives.
    """

    def __init__(self, profile: Profile, field, dfield, c1_bound, c2_bound=None, n=None, name="separable"):
        self.profile = profile
        self.field = field
        self.dfield = dfield
        self.c1_bound = float(c1_bound)
        self.c2_bound = float(c2_bound if c2_bound is not None else c1_bound)
        self.name = name
        self.support = profile.support
        self.singular_points = tuple(profile.singular_points)
        if n is None:
            n = len(np.atleast_1d(field(np.zeros(1))))
        super().__init__(n)

    @classmethod
    def constant(cls, profile, direction, name="separable"):
        """g(x, u) = p(x) * direction, independent of u."""
        d = np.atleast_1d(np.asarray(direction, dtype=float))
        n = d.size
        return cls(profile, lambda u: d.copy(), lambda u: np.zeros((n, n)), np.linalg.norm(d),
                   np.linalg.norm(d), n=n, name=name)

    def g(self, x, u):
        return float(self.profile.density(x)) * np.atleast_1d(self.field(as_state(u)))

    def dg_du(self, x, u):
        return float(self.profile.density(x)) * np.atleast_2d(self.dfield(as_state(u)))

    def omega(self, x):
        return np.abs(self.profile.density(x)) * self.c1_bound

    def m_tilde(self, x):
        return np.abs(self.profile.density(x)) * self.c2_bound

    def omega_antiderivative(self, x):
        return self.c1_bound * self.profile.abs_antiderivative(x)

    def integral(self, a, b, u):
        return self.profile.integral(a, b) * np.atleast_1d(self.field(as_state(u)))

    def window_jacobian(self, x0, h, u):
        return self.profile.integral(x0, x0 + h) * np.atleast_2d(self.dfield(as_state(u)))

    def m_tilde_l1(self):
        return self.profile.l1 * self.c2_bound


class FunctionSource(SourceTerm):
    """General source from callables; every integral goes through quadrature."""

    def __init__(self, g, dg_du, omega, support, singular_points=(), n=1, m_tilde=None, name="function"):
        super().__init__(n)
        self._g, self._dg, self._omega, self._mt = g, dg_du, omega, m_tilde
        self.support = None if support is None else (float(support[0]), float(support[1]))
        self.singular_points = tuple(singular_points)
        self.name = name

    def g(self, x, u):
        return np.atleast_1d(np.asarray(self._g(x, as_state(u)), dtype=float))

    def dg_du(self, x, u):
        return np.atleast_2d(np.asarray(self._dg(x, as_state(u)), dtype=float))

    def omega(self, x):
        return self._omega(x)

    def m_tilde(self, x):
        return self._omega(x) if self._mt is None else self._mt(x)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def omega_integral(source: SourceTerm, x0, h):
    """int_0^h omega(x0 + s) ds."""
    if h < 0:
        raise SourceError("window length must be non-negative")
    return float(source.omega_integral(x0, x0 + h))


def epsilon_tilde(source: SourceTerm, h, grid=2001):
    """sup_x int_0^h omega(x + s) ds."""
    if h <= 0:
        raise SourceError("window length must be positive")
    if source.is_zero:
        return 0.0
    if source.support is None:
        raise SourceError("epsilon_tilde needs a bounded support for omega")
    lo, hi = source.support
    F = lambda x: source.omega_integral(x, x + h)
    cand = list(np.linspace(lo - h, hi, grid))
    for s in (*source.singular_points, lo, hi):
        cand += [s - h, s - 0.5 * h, s]
    vals = np.array([F(x) for x in cand])
    spacing = (hi - lo + h) / (grid - 1)
    best = float(vals.max())
    for k in np.argsort(vals)[-5:]:
        x = cand[k]
        res = minimize_scalar(lambda y: -F(y), bounds=(x - spacing, x + spacing), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def flux_inverse(system, y, guess=None):
    return system.flux_inverse(as_state(y), guess=guess)


def phi_h(system, source: SourceTerm, x0, h, u):
    """f^{-1}[f(u) + int_0^h g(x0 + s, u) ds]."""
    u = as_state(u)
    if h == 0 or source.is_zero:
        return u.copy()
    return system.flux_inverse(system.flux(u) + source.window_integral(x0, h, u), guess=u)


@dataclass(frozen=True)
class DominationViolation:
    x: float
    u: tuple
    quantity: str
    value: float
    bound: float


def sample_admissible(system, rng, count):
    """Uniform samples of admissible states by rejection from the box."""
    out = []
    tries = 0
    while len(out) < count and tries < 200 * count:
        u = rng.uniform(system.lo, system.hi)
        tries += 1
        if system.is_admissible(u):
            out.append(u)
    if len(out) < count:
        raise SourceError("could not sample admissible states")
    return np.array(out)


def audit_domination(system, source: SourceTerm, samples=1000, rng=None, slack=1e-12):
    """Sample (x, u) and report every violation of |g| <= omega, |D_u g| <= omega."""
    if source.is_zero:
        return []
    rng = np.random.default_rng(0) if rng is None else rng
    lo, hi = source.support if source.support is not None else (-10.0, 10.0)
    xs = rng.uniform(lo, hi, samples)
    us = sample_admissible(system, rng, samples)
    out = []
    for x, u in zip(xs, us):
        w = float(source.omega(x))
        gval = float(np.linalg.norm(source.g(x, u)))
        dval = float(np.linalg.norm(source.dg_du(x, u), 2))
        if gval > w + slack:
            out.append(DominationViolation(float(x), tuple(u), "|g|", gval, w))
        if dval > w + slack:
            out.append(DominationViolation(float(x), tuple(u), "|D_u g|", dval, w))
    return out


def make_profile(name, **params) -> Profile:
    if name == "constant_on_interval":
        return IndicatorProfile(params.get("a", 0.0), params.get("b", 1.0), params.get("value", 1.0))
    if name == "inverse_sqrt":
        return InverseSqrtProfile(params.get("amplitude", 1.0), params.get("center", 0.0), params.get("radius", 1.0))
    if name == "custom_table":
        return PolynomialProfile([(p["a"], p["b"], p["coeffs"]) for p in params["pieces"]])
    raise SourceError(f"unknown profile {name!r}")
