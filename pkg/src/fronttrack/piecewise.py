"""Piecewise-constant functions of x and initial data descriptions."""

from __future__ import annotations

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def gauss_legendre(fun, a, b, nodes=None, weights=None):
    """Integral of a vector-valued ``fun`` (vectorized over x) on [a, b]."""
    if b <= a:
        return 0.0
    xn = _GL_NODES if nodes is None else nodes
    wn = _GL_WEIGHTS if weights is None else weights
    x = 0.5 * (b - a) * xn + 0.5 * (a + b)
    return 0.5 * (b - a) * np.tensordot(wn, fun(x), axes=(0, 0))


class PiecewiseConstant:
    """Right-continuous step function: ``values[k]`` holds on
    [breaks[k-1], breaks[k]), with constant tails."""

    def __init__(self, breaks, values):
        self.breaks = np.asarray(breaks, dtype=float).ravel()
        values = np.asarray(values, dtype=float)
        self.values = values.reshape(len(values), -1)
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("need one more value than breakpoints")
        if np.any(np.diff(self.breaks) < 0):
            raise ValueError("breakpoints must be sorted")
        self.n = self.values.shape[1]

    @classmethod
    def constant(cls, u):
        return cls([], [np.atleast_1d(np.asarray(u, dtype=float))])

    @classmethod
    def riemann(cls, x0, u_l, u_r):
        return cls([x0], [np.atleast_1d(u_l), np.atleast_1d(u_r)])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breaks, x, side="right")
        return self.values[idx]

    def left_limit(self, x):
        idx = np.searchsorted(self.breaks, np.asarray(x, dtype=float), side="left")
        return self.values[idx]

    @property
    def u_left(self):
        return self.values[0]

    @property
    def u_right(self):
        return self.values[-1]

    @property
    def declared_breaks(self):
        return tuple(self.breaks)

    def total_variation(self, a=-np.inf, b=np.inf):
        """Variation over jumps located in the open interval (a, b)."""
        jumps = np.linalg.norm(np.diff(self.values, axis=0), axis=1)
        mask = (self.breaks > a) & (self.breaks < b)
        return float(np.sum(jumps[mask]))

    def integral(self, a, b):
        """Exact integral of the vector function over [a, b]."""
        if b <= a:
            return np.zeros(self.n)
        inner = self.breaks[(self.breaks > a) & (self.breaks < b)]
        knots = np.concatenate([[a], inner, [b]])
        mids = 0.5 * (knots[:-1] + knots[1:])
        return np.diff(knots) @ self(mids)

    def cell_average(self, a, b):
        return self.integral(a, b) / (b - a)

    def range(self):
        if len(self.breaks) == 0:
            return (0.0, 0.0)
        return (float(self.breaks[0]), float(self.breaks[-1]))

    def l1_distance(self, other, a, b):
        """Exact int_a^b |self - other| (Euclidean norm) by breakpoint merging."""
        if b <= a:
            return 0.0
        pts = [a, b]
        for f in (self, other):
            pts.extend(f.breaks[(f.breaks > a) & (f.breaks < b)])
        knots = np.unique(pts)
        mids = 0.5 * (knots[:-1] + knots[1:])
        diff = np.linalg.norm(self(mids) - other(mids), axis=1)
        return float(np.diff(knots) @ diff)

    def l1_distance_to(self, fun, a, b, extra_breaks=(), pieces=1):
        """int_a^b |self - fun| for a smooth ``fun`` (vectorized, returns (m, n)),
        by Gauss-Legendre between merged breakpoints."""
        pts = [a, b, *[e for e in extra_breaks if a < e < b]]
        pts.extend(self.breaks[(self.breaks > a) & (self.breaks < b)])
        knots = np.unique(pts)
        if pieces > 1:
            knots = np.unique(np.concatenate([np.linspace(lo, hi, pieces + 1)
                                              for lo, hi in zip(knots[:-1], knots[1:])]))
        total = 0.0
        for lo, hi in zip(knots[:-1], knots[1:]):
            mid = 0.5 * (lo + hi)
            u = self(mid)
            total += gauss_legendre(lambda x: np.linalg.norm(np.atleast_2d(fun(x)).reshape(len(x), -1) - u, axis=1),
                                    lo, hi)
        return float(total)

    def shifted(self, dx):
        return PiecewiseConstant(self.breaks + dx, self.values)


class FunctionData:
    """Initial datum given by a vectorized callable, constant outside [lo, hi].

    ``breaks`` lists known discontinuities; the function is assumed smooth
    between them.
    """

    def __init__(self, fun, lo, hi, breaks=(), n=None):
        self.fun = fun
        self.lo, self.hi = float(lo), float(hi)
        self.declared_breaks = tuple(sorted(float(b) for b in breaks if lo <= b <= hi))
        probe = np.atleast_2d(np.asarray(fun(np.array([self.lo]))))
        self.n = probe.shape[-1] if n is None else n
        self.u_left = self._eval(np.array([self.lo - 1.0]))[0]
        self.u_right = self._eval(np.array([self.hi + 1.0]))[0]

    def _eval(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, self.lo, self.hi)
        return np.asarray(self.fun(xc), dtype=float).reshape(len(xc), self.n)

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self._eval(x)

    def range(self):
        return (self.lo, self.hi)

    def _knots(self, a, b):
        return np.unique([a, b, *[c for c in self.declared_breaks if a < c < b]])

    def integral(self, a, b):
        knots = self._knots(a, b)
        total = np.zeros(self.n)
        for lo, hi in zip(knots[:-1], knots[1:]):
            total = total + gauss_legendre(self._eval, lo, hi)
        return total

    def cell_average(self, a, b):
        return self.integral(a, b) / (b - a)

    def total_variation(self, a=-np.inf, b=np.inf, samples=4001):
        lo, hi = max(a, self.lo - 1e-9), min(b, self.hi + 1e-9)
        if hi <= lo:
            return 0.0
        xs = np.unique(np.concatenate([np.linspace(lo, hi, samples),
                                       [c for c in self.declared_breaks if lo < c < hi],
                                       [np.nextafter(c, -np.inf) for c in self.declared_breaks if lo < c < hi]]))
        return float(np.sum(np.linalg.norm(np.diff(self._eval(xs), axis=0), axis=1)))


def polynomial_data(breaks, pieces):
    """Piecewise polynomial datum: ``pieces[k]`` is a list of per-component
    coefficient lists (increasing degree in the local variable x - breaks[k-1])
    for the interval [breaks[k-1], breaks[k]); first and last pieces are
    constants."""
    breaks = np.asarray(breaks, dtype=float)
    polys = [[np.polynomial.Polynomial(c) for c in comp] for comp in pieces]
    origins = np.concatenate([[0.0], breaks])

    def fun(x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(breaks, x, side="right")
        out = np.empty((len(x), len(polys[0])))
        for k, comps in enumerate(polys):
            m = idx == k
            if np.any(m):
                for c, p in enumerate(comps):
                    out[m, c] = p(x[m] - (origins[k] if k > 0 else breaks[0]))
        return out

    lo, hi = (float(breaks[0]), float(breaks[-1])) if len(breaks) else (0.0, 0.0)
    return FunctionData(fun, lo - 1e-12, hi + 1e-12, breaks=breaks, n=len(polys[0]))
