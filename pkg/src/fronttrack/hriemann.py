"""Riemann solvers with a standing zero-wave.

Negative-speed families (0..p-1) connect the left state to ``u_minus``, a
stationary jump ``u_plus = jump(u_minus)`` sits at ``x0``, and positive
families (p..n-1) connect ``u_plus`` to the right state.  With the jump
``Phi_h(x0, .)`` this is the h-Riemann solver; with the exact stationary
flow of a pipe it is the a-Riemann solver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .sources import omega_integral, phi_h
from .systems import (TOL_RIEMANN, AdmissibilityError, RiemannError, WaveFan, as_state, build_fan,
                      compose, newton_strengths, solve_homogeneous_riemann)


@dataclass(frozen=True)
class HRiemannPattern:
    x0: float
    h: float
    u_l: np.ndarray
    u_minus: np.ndarray
    u_plus: np.ndarray
    u_r: np.ndarray
    left: WaveFan
    right: WaveFan
    sigma: np.ndarray
    sigma_zero: float
    residual: float

    def evaluate(self, t, x):
        """Self-similar value at (t, x); the zero-wave is right-continuous."""
        if t <= 0:
            return (self.u_l if x < self.x0 else self.u_r).copy()
        xi = (x - self.x0) / t
        return self.left.evaluate(xi) if x < self.x0 else self.right.evaluate(xi)

    def evaluate_many(self, t, xs):
        return np.array([self.evaluate(t, x) for x in np.asarray(xs, dtype=float).ravel()])

    def to_dict(self):
        return {
            "x0": self.x0,
            "h": self.h,
            "u_l": self.u_l.tolist(),
            "u_minus": self.u_minus.tolist(),
            "u_plus": self.u_plus.tolist(),
            "u_r": self.u_r.tolist(),
            "sigma": self.sigma.tolist(),
            "sigma_zero": self.sigma_zero,
            "left_kinds": list(self.left.kinds),
            "right_kinds": list(self.right.kinds),
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def _split(system, sigma):
    p = system.p
    return sigma[:p], sigma[p:], tuple(range(p)), tuple(range(p, system.n))


def stationary_residual(system, jump, u_l, u_r, sigma):
    sl, sr, fl, fr = _split(system, sigma)
    um = compose(system, u_l, sl, fl)
    up = jump(um)
    return compose(system, up, sr, fr) - u_r


def solve_stationary_riemann(system, jump, u_l, u_r, x0=0.0, h=0.0, sigma_zero=0.0, guess=None,
                             max_iter=60):
    """Wave pattern with a stationary jump ``u_plus = jump(u_minus)`` at x0."""
    u_l, u_r = as_state(u_l), as_state(u_r)
    system.check_admissible(u_l, "left state")
    system.check_admissible(u_r, "right state")
    res = lambda s: stationary_residual(system, jump, u_l, u_r, s)
    if guess is None:
        try:
            shift = jump(u_l) - u_l
            guess = solve_homogeneous_riemann(system, u_l, u_r - shift).sigma
        except (RiemannError, AdmissibilityError):
            guess = np.zeros(system.n)
    sigma = newton_strengths(res, guess, tol=TOL_RIEMANN, max_iter=max_iter, what="h-Riemann problem")
    sl, sr, fl, fr = _split(system, sigma)
    left = build_fan(system, u_l, sl, fl)
    u_minus = left.u_r
    u_plus = jump(u_minus)
    right = build_fan(system, u_plus, sr, fr)
    residual = float(np.linalg.norm(right.u_r - u_r))
    if any(s[1] >= 0 for s in left.speeds) or any(s[0] <= 0 for s in right.speeds):
        raise RiemannError("h-Riemann fan violates the speed sign conditions")
    return HRiemannPattern(float(x0), float(h), u_l, u_minus, u_plus, u_r, left, right, sigma,
                           float(sigma_zero), residual)


def solve_h_riemann(system, source, x0, h, u_l, u_r, guess=None):
    """h-Riemann solver at x0 with the jump Phi_h(x0, .)."""
    jump = lambda u: phi_h(system, source, x0, h, u)
    return solve_stationary_riemann(system, jump, u_l, u_r, x0=x0, h=h,
                                    sigma_zero=omega_integral(source, x0, h), guess=guess)


def zero_wave_strength(source, j, h):
    """int_0^h omega(jh + s) ds."""
    return omega_integral(source, j * h, h)


def uniqueness_probe(system, source, x0, h, u_l, u_r, starts=16, spread=0.05, rng=None):
    """Largest deviation of Newton solutions started from perturbed guesses."""
    rng = np.random.default_rng(0) if rng is None else rng
    ref = solve_h_riemann(system, source, x0, h, u_l, u_r).sigma
    worst = 0.0
    for _ in range(starts):
        g = ref + rng.uniform(-spread, spread, size=ref.size)
        sol = solve_h_riemann(system, source, x0, h, u_l, u_r, guess=g).sigma
        worst = max(worst, float(np.max(np.abs(sol - ref))))
    return worst
