"""Strictly hyperbolic systems, Lax wave curves and the homogeneous Riemann solver.

Wave strengths use the projection parametrization: along the i-th curve
through ``u0`` the strength is ``sigma = d0 . (u - u0)`` where ``d0`` is the
unit i-th eigenvector at ``u0`` oriented so that ``sigma > 0`` is a
rarefaction for genuinely nonlinear families.  Both branches are graphs over
the same linear coordinate, so they join with second order contact.
Closed-form systems may override the parametrization as long as it stays
first-order arclength and C2 at ``sigma = 0``.

Families are numbered from 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

TOL_RIEMANN = 1e-9
TOL_CURVE = 1e-10


class HyperbolicityError(ValueError):
    """Eigenvalues are complex or too close together."""


class AdmissibilityError(ValueError):
    """A state left the admissible region."""


class RiemannError(RuntimeError):
    """A Newton solve for wave strengths did not converge."""


def as_state(u) -> np.ndarray:
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.ndim != 1 or not np.all(np.isfinite(u)):
        raise ValueError(f"not a finite state vector: {u!r}")
    return u


class SystemDefinition:
    """Base class for a system u_t + f(u)_x = 0 on a box of admissible states.

    Subclasses implement ``flux`` and ``jacobian``; everything else has a
    numerical default.
    """

    name = "generic"

    def __init__(self, n, lo, hi, gnl, margin=0.0, separation_tol=1e-8):
        self.n = int(n)
        self.lo = np.asarray(lo, dtype=float).reshape(self.n)
        self.hi = np.asarray(hi, dtype=float).reshape(self.n)
        if np.any(self.hi <= self.lo):
            raise ValueError("empty admissible box")
        self.gnl = tuple(bool(g) for g in gnl)
        if len(self.gnl) != self.n:
            raise ValueError("one genuine-nonlinearity flag per family is required")
        self.margin = float(margin)
        self.separation_tol = separation_tol
        self._p = None
        self._speed_bound = None

    # -- to be provided by subclasses -------------------------------------
    def flux(self, u):
        raise NotImplementedError

    def jacobian(self, u):
        raise NotImplementedError

    # -- admissibility -----------------------------------------------------
    def _inside(self, u):
        return bool(np.all(u >= self.lo) and np.all(u <= self.hi))

    def is_admissible(self, u) -> bool:
        u = np.asarray(u, dtype=float)
        if not np.all(np.isfinite(u)) or not self._inside(u):
            return False
        lam = np.linalg.eigvals(self.jacobian(u))
        return bool(np.all(np.abs(lam.imag) < 1e-12) and np.all(np.abs(lam.real) >= self.margin))

    def check_admissible(self, u, what="state"):
        if not self.is_admissible(u):
            raise AdmissibilityError(f"{what} {np.asarray(u)!r} is outside the admissible region of {self.name}")

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    # -- eigenstructure ----------------------------------------------------
    def eigenvalues(self, u):
        lam = np.linalg.eigvals(self.jacobian(u))
        if np.any(np.abs(lam.imag) > 1e-12):
            raise HyperbolicityError(f"complex characteristic speeds at {u!r}")
        return np.sort(lam.real)

    def eigen(self, u):
        """Return ``(lam, R, L)``: sorted eigenvalues, unit right eigenvectors
        as columns, dual left eigenvectors as rows."""
        A = np.atleast_2d(self.jacobian(u))
        lam, R = np.linalg.eig(A)
        if np.any(np.abs(lam.imag) > 1e-12):
            raise HyperbolicityError(f"complex characteristic speeds at {u!r}")
        order = np.argsort(lam.real)
        lam = lam.real[order]
        R = np.real(R[:, order])
        if self.n > 1 and np.min(np.diff(lam)) < self.separation_tol:
            raise HyperbolicityError(f"eigenvalues cluster at {u!r}: {lam}")
        R = _normalize_columns(R)
        L = np.linalg.inv(R)
        return lam, R, L

    def gradient_lambda(self, i, u, step=1e-6):
        g = np.empty(self.n)
        for k in range(self.n):
            e = np.zeros(self.n)
            e[k] = step
            g[k] = (self.eigenvalues(u + e)[i] - self.eigenvalues(u - e)[i]) / (2 * step)
        return g

    def curve_direction(self, i, u):
        """Unit i-th eigenvector oriented so that positive strength increases
        the i-th speed (rarefaction side) for genuinely nonlinear families."""
        _, R, _ = self.eigen(u)
        r = R[:, i]
        if self.gnl[i] and self.gradient_lambda(i, u) @ r < 0:
            r = -r
        return r

    @property
    def p(self) -> int:
        """Number of families with negative speed (constant over the box)."""
        if self._p is None:
            self._p = int(np.sum(self.eigenvalues(self.center) < 0))
        return self._p

    def speed_bound(self, samples=41):
        """Maximal characteristic speed magnitude over admissible box samples."""
        if self._speed_bound is None:
            axes = [np.linspace(a, b, samples) for a, b in zip(self.lo, self.hi)]
            best = 0.0
            for pt in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.n):
                if self.is_admissible(pt):
                    best = max(best, float(np.max(np.abs(self.eigenvalues(pt)))))
            self._speed_bound = best
        return self._speed_bound

    # -- wave curves -------------------------------------------------------
    def lax_curve(self, i, u0, sigma):
        """Return psi_i(sigma)(u0)."""
        u0 = as_state(u0)
        if sigma == 0.0:
            return u0.copy()
        if self.gnl[i] and sigma < 0:
            u = self._hugoniot_point(i, u0, sigma)
        else:
            u = self._integral_curve_point(i, u0, sigma)
        self.check_admissible(u, f"family-{i} curve point")
        return u

    def _integral_curve_point(self, i, u0, sigma):
        d0 = self.curve_direction(i, u0)

        def rhs(_, u):
            _, R, _ = self.eigen(u)
            r = R[:, i]
            if r @ d0 < 0:
                r = -r
            return r / (r @ d0)

        sol = solve_ivp(rhs, (0.0, sigma), u0, method="DOP853", rtol=1e-12, atol=TOL_CURVE * 1e-2)
        if not sol.success:
            raise AdmissibilityError(f"integral curve failed: {sol.message}")
        return sol.y[:, -1]

    def _hugoniot_point(self, i, u0, sigma, max_iter=30):
        # u = u0 + sigma * (d0 + z) with d0 . z = 0; divided RH relation is
        # regular at sigma = 0.
        d0 = self.curve_direction(i, u0)
        f0 = self.flux(u0)
        lam0 = self.eigenvalues(u0)[i]

        def residual(x):
            z, s = x[: self.n], x[self.n]
            v = d0 + z
            F = (self.flux(u0 + sigma * v) - f0) / sigma - s * v
            return np.append(F, d0 @ z)

        x = np.append(np.zeros(self.n), lam0)
        for _ in range(max_iter):
            F = residual(x)
            if np.linalg.norm(F) < 1e-13:
                break
            J = _fd_jacobian(residual, x, F)
            x = x - np.linalg.solve(J, F)
        else:
            if np.linalg.norm(residual(x)) > TOL_CURVE:
                raise RiemannError("Hugoniot locus continuation did not converge")
        return u0 + sigma * (d0 + x[: self.n])

    def shock_speed(self, i, um, up):
        """Rankine-Hugoniot speed between two states (exact on the Hugoniot locus)."""
        du = up - um
        nrm = du @ du
        if nrm < 1e-28:
            return float(self.eigenvalues(um)[i])
        return float((self.flux(up) - self.flux(um)) @ du / nrm)

    def strength_of(self, i, um, up):
        """Strength of the i-wave from ``um`` to ``up`` (exact for curve points)."""
        return float(self.curve_direction(i, um) @ (up - um))

    def wave_speed_range(self, i, um, up, sigma):
        if self.gnl[i] and sigma > 0:
            return float(self.eigenvalues(um)[i]), float(self.eigenvalues(up)[i])
        if not self.gnl[i]:
            s = float(self.eigenvalues(um)[i])
            return s, s
        s = self.shock_speed(i, um, up)
        return s, s

    def rarefaction_state(self, i, um, sigma, xi):
        """State inside an i-rarefaction from ``um`` (strength sigma) with
        lambda_i = xi."""
        lam = lambda tau: self.eigenvalues(self.lax_curve(i, um, tau))[i] - xi
        tau = brentq(lam, 0.0, sigma, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return self.lax_curve(i, um, tau)

    # -- flux inverse ------------------------------------------------------
    def flux_inverse(self, y, guess=None, tol=1e-11, max_iter=50):
        y = as_state(y)
        u = self.center.copy() if guess is None else as_state(guess).copy()
        for _ in range(max_iter):
            r = self.flux(u) - y
            if np.linalg.norm(r) <= tol:
                return u
            du = np.linalg.solve(np.atleast_2d(self.jacobian(u)), r)
            step = 1.0
            while step > 1e-4:
                trial = u - step * du
                if np.all(np.isfinite(self.flux(trial))) and np.linalg.norm(self.flux(trial) - y) < np.linalg.norm(r):
                    break
                step *= 0.5
            u = trial
        if np.linalg.norm(self.flux(u) - y) <= tol:
            return u
        raise RiemannError(f"flux inverse did not converge for y={y!r}")

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} n={self.n}>"


def _normalize_columns(R):
    R = R / np.linalg.norm(R, axis=0)
    for k in range(R.shape[1]):
        nz = np.flatnonzero(np.abs(R[:, k]) > 1e-14)
        if R[nz[0], k] < 0:
            R[:, k] = -R[:, k]
    return R


def _fd_jacobian(fun, x, fx=None, step=1e-7):
    fx = fun(x) if fx is None else fx
    J = np.empty((fx.size, x.size))
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        J[:, k] = (fun(x + e) - fun(x - e)) / (2 * step)
    return J


# ---------------------------------------------------------------------------
# Scalar systems
# ---------------------------------------------------------------------------

class ScalarSystem(SystemDefinition):
    """Scalar law with convex (or linear) flux; the curve is u0 + sigma."""

    def __init__(self, f, df, d2f, lo, hi, linear=False, name="scalar"):
        self._f, self._df, self._d2f = f, df, d2f
        self.name = name
        super().__init__(1, [lo], [hi], gnl=[not linear])
        speeds = [abs(df(x)) for x in np.linspace(lo, hi, 201)]
        self.margin = float(min(speeds))
        if self.margin <= 0:
            raise HyperbolicityError(f"{name}: characteristic speed vanishes on the box")

    def flux(self, u):
        return np.atleast_1d(self._f(np.asarray(u, dtype=float)))

    def jacobian(self, u):
        return np.array([[float(self._df(float(np.asarray(u).ravel()[0])))]])

    def is_admissible(self, u):
        u = np.asarray(u, dtype=float)
        return bool(np.all(np.isfinite(u)) and self._inside(u))

    def eigenvalues(self, u):
        return np.array([float(self._df(float(np.asarray(u).ravel()[0])))])

    def eigen(self, u):
        return self.eigenvalues(u), np.ones((1, 1)), np.ones((1, 1))

    def curve_direction(self, i, u):
        return np.ones(1)

    def gradient_lambda(self, i, u, step=1e-6):
        return np.array([float(self._d2f(float(np.asarray(u).ravel()[0])))])

    def speed_bound(self, samples=201):
        if self._speed_bound is None:
            xs = np.linspace(self.lo[0], self.hi[0], samples)
            self._speed_bound = float(max(abs(self._df(x)) for x in xs))
        return self._speed_bound

    def lax_curve(self, i, u0, sigma):
        u = as_state(u0) + sigma
        self.check_admissible(u, "scalar curve point")
        return u

    def strength_of(self, i, um, up):
        return float(up[0] - um[0])

    def shock_speed(self, i, um, up):
        a, b = float(um[0]), float(up[0])
        if abs(b - a) < 1e-14:
            return float(self._df(a))
        return float((self._f(b) - self._f(a)) / (b - a))

    def rarefaction_state(self, i, um, sigma, xi):
        a = float(um[0])
        u = brentq(lambda v: self._df(v) - xi, a, a + sigma, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return np.array([u])


class LinearScalar(ScalarSystem):
    """f(u) = speed * u."""

    def __init__(self, speed=2.0, lo=-1.0, hi=1.0):
        self.speed = float(speed)
        s = self.speed
        super().__init__(lambda u: s * u, lambda u: s, lambda u: 0.0, lo, hi, linear=True,
                         name="scalar_linear")

    def flux_inverse(self, y, guess=None, tol=1e-11, max_iter=50):
        return as_state(y) / self.speed


class ShiftedBurgers(ScalarSystem):
    """f(u) = u^2/2 + shift * u, speeds bounded away from zero on the box."""

    def __init__(self, shift=2.0, lo=-1.0, hi=1.0):
        self.shift = float(shift)
        c = self.shift
        super().__init__(lambda u: 0.5 * u * u + c * u, lambda u: u + c, lambda u: 1.0, lo, hi,
                         name="scalar_shifted_burgers")

    def flux_inverse(self, y, guess=None, tol=1e-11, max_iter=50):
        y = as_state(y)
        disc = self.shift ** 2 + 2.0 * y
        if np.any(disc <= 0):
            raise RiemannError(f"flux inverse undefined for y={y!r}")
        # root on the branch u > -shift; rationalized to avoid cancellation
        return 2.0 * y / (self.shift + np.sqrt(disc))


# ---------------------------------------------------------------------------
# Isentropic gas dynamics
# ---------------------------------------------------------------------------

class IsentropicEuler(SystemDefinition):
    """rho_t + q_x = 0, q_t + (q^2/rho + kappa rho^gamma)_x = 0.

    Admissible states lie in the (rho, q) box and are subsonic with margin:
    |q/rho| <= c(rho) - delta_sonic.  Wave curves are closed form and
    parametrized linearly in density: rho(sigma) = rho0 + sigma * e_i with
    e_i the density component of the oriented unit eigenvector at u0.
    """

    name = "isentropic_euler"

    def __init__(self, gamma=2.0, kappa=1.0, rho_range=(0.5, 2.0), q_range=(-1.0, 1.0),
                 delta_sonic=None, rho_ref=1.0):
        if gamma <= 1.0 or kappa <= 0.0:
            raise ValueError("need gamma > 1 and kappa > 0")
        self.gamma = float(gamma)
        self.kappa = float(kappa)
        if rho_range[0] <= 0:
            raise AdmissibilityError("density box touches vacuum")
        if delta_sonic is None:
            delta_sonic = 0.2 * self.sound_speed(rho_ref)
        self.delta_sonic = float(delta_sonic)
        super().__init__(2, [rho_range[0], q_range[0]], [rho_range[1], q_range[1]], gnl=[True, True],
                         margin=self.delta_sonic)
        if self.delta_sonic <= 0 or not any(self.is_admissible([r, 0.0]) for r in np.linspace(*rho_range, 11)):
            raise AdmissibilityError("admissible box has no subsonic states with the requested margin")

    def pressure(self, rho):
        return self.kappa * rho ** self.gamma

    def sound_speed(self, rho):
        return np.sqrt(self.gamma * self.kappa * rho ** (self.gamma - 1.0))

    def riemann_invariants(self, u):
        rho, q = u
        v = q / rho
        k = 2.0 * self.sound_speed(rho) / (self.gamma - 1.0)
        return np.array([v - k, v + k])

    def flux(self, u):
        rho, q = u
        return np.array([q, q * q / rho + self.kappa * rho ** self.gamma])

    def jacobian(self, u):
        rho, q = u
        v = q / rho
        c2 = self.gamma * self.kappa * rho ** (self.gamma - 1.0)
        return np.array([[0.0, 1.0], [c2 - v * v, 2.0 * v]])

    def is_admissible(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape != (2,):
            return False
        rho, q = float(u[0]), float(u[1])
        if not (self.lo[0] <= rho <= self.hi[0] and self.lo[1] <= q <= self.hi[1]):
            return False  # also rejects nan
        return abs(q / rho) <= math.sqrt(self.gamma * self.kappa * rho ** (self.gamma - 1.0)) - self.delta_sonic

    def flux_inverse(self, y, guess=None, tol=1e-11, max_iter=60):
        """Subsonic preimage: q = y[0] and a scalar Newton solve for rho.

        rho -> q^2/rho + p(rho) is convex and increasing on the subsonic
        branch, so Newton iterates from a subsonic guess converge monotonically.
        """
        q, m = float(y[0]), float(y[1])
        rho = float(guess[0]) if guess is not None else float(self.center[0])
        g, k = self.gamma, self.kappa
        for _ in range(max_iter):
            F = q * q / rho + k * rho ** g - m
            if abs(F) <= tol:
                return np.array([rho, q])
            dF = g * k * rho ** (g - 1.0) - q * q / (rho * rho)
            if dF <= 0:
                # supersonic side of the minimum: move right towards the subsonic branch
                rho *= 1.5
                continue
            step = F / dF
            while rho - step <= 0:
                step *= 0.5
            rho -= step
        raise RiemannError(f"flux inverse did not converge for y={np.asarray(y)!r}")

    def eigenvalues(self, u):
        rho, q = u
        v = q / rho
        c = self.sound_speed(rho)
        return np.array([v - c, v + c])

    def eigen(self, u):
        lam = self.eigenvalues(u)
        R = np.array([[1.0, 1.0], [lam[0], lam[1]]])
        R = R / np.linalg.norm(R, axis=0)
        return lam, R, np.linalg.inv(R)

    def gradient_lambda(self, i, u, step=None):
        rho, q = u
        c = self.sound_speed(rho)
        dc = 0.5 * (self.gamma - 1.0) * c / rho
        sgn = -1.0 if i == 0 else 1.0
        return np.array([-q / rho ** 2 + sgn * dc, 1.0 / rho])

    def curve_direction(self, i, u):
        lam = self.eigenvalues(u)[i]
        r = np.array([1.0, lam]) / np.hypot(1.0, lam)
        return -r if i == 0 else r

    def speed_bound(self, samples=81):
        if self._speed_bound is None:
            best = 0.0
            for rho in np.linspace(self.lo[0], self.hi[0], samples):
                vmax = self.sound_speed(rho) - self.delta_sonic
                if vmax < 0:
                    continue
                qs = np.clip(np.array([-vmax, vmax]) * rho, self.lo[1], self.hi[1])
                for q in qs:
                    best = max(best, float(np.max(np.abs(self.eigenvalues([rho, q])))))
            self._speed_bound = best
        return self._speed_bound

    def _velocity_on_curve(self, i, rho0, v0, rho, shock):
        if shock:
            jump = np.sqrt((self.pressure(rho) - self.pressure(rho0)) * (rho - rho0) / (rho * rho0))
            return v0 - jump
        k = 2.0 / (self.gamma - 1.0)
        dc = self.sound_speed(rho) - self.sound_speed(rho0)
        return v0 - k * dc if i == 0 else v0 + k * dc

    def lax_curve(self, i, u0, sigma):
        u0 = as_state(u0)
        if sigma == 0.0:
            return u0.copy()
        rho0, q0 = u0
        e = self.curve_direction(i, u0)[0]
        rho = rho0 + sigma * e
        if rho <= 0:
            raise AdmissibilityError("wave curve reached vacuum")
        v = self._velocity_on_curve(i, rho0, q0 / rho0, rho, shock=sigma < 0)
        u = np.array([rho, rho * v])
        self.check_admissible(u, f"family-{i} curve point")
        return u

    def strength_of(self, i, um, up):
        return float((up[0] - um[0]) / self.curve_direction(i, um)[0])

    def shock_speed(self, i, um, up):
        drho = up[0] - um[0]
        if abs(drho) < 1e-14:
            return float(self.eigenvalues(um)[i])
        return float((up[1] - um[1]) / drho)

    def rarefaction_state(self, i, um, sigma, xi):
        rho0, q0 = um
        v0 = q0 / rho0
        e = self.curve_direction(i, um)[0]

        def speed_gap(tau):
            rho = rho0 + tau * e
            v = self._velocity_on_curve(i, rho0, v0, rho, shock=False)
            c = self.sound_speed(rho)
            return (v - c if i == 0 else v + c) - xi

        tau = brentq(speed_gap, 0.0, sigma, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        rho = rho0 + tau * e
        return np.array([rho, rho * self._velocity_on_curve(i, rho0, v0, rho, shock=False)])


# ---------------------------------------------------------------------------
# Riemann solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveFan:
    """Self-similar solution made of consecutive simple waves.

    ``states[k]`` and ``states[k+1]`` bracket the wave of family
    ``families[k]``; ``speeds[k]`` is ``(lo, hi)`` (equal for jumps).
    """

    system: SystemDefinition
    states: np.ndarray
    sigma: np.ndarray
    families: tuple
    kinds: tuple
    speeds: tuple

    @property
    def u_l(self):
        return self.states[0]

    @property
    def u_r(self):
        return self.states[-1]

    def __len__(self):
        return len(self.families)

    def evaluate(self, xi):
        """Value at x/t = xi, right-continuous across jumps."""
        for k, (lo, hi) in enumerate(self.speeds):
            if xi < lo:
                return self.states[k].copy()
            if self.kinds[k] == "rarefaction" and xi < hi:
                return self.system.rarefaction_state(self.families[k], self.states[k], self.sigma[k], xi)
        return self.states[-1].copy()

    def evaluate_many(self, xis):
        return np.array([self.evaluate(xi) for xi in np.asarray(xis, dtype=float).ravel()])

    def min_speed(self):
        return min((s[0] for s in self.speeds), default=0.0)

    def max_speed(self):
        return max((s[1] for s in self.speeds), default=0.0)


def wave_kind(system, i, sigma):
    if not system.gnl[i]:
        return "contact"
    return "rarefaction" if sigma > 0 else "shock"


def build_fan(system, u_start, sigma, families):
    """Chain the curves psi_i(sigma_i) for the listed families."""
    states = [as_state(u_start)]
    kinds, speeds = [], []
    for s, i in zip(sigma, families):
        w = system.lax_curve(i, states[-1], float(s))
        kinds.append(wave_kind(system, i, s))
        speeds.append(system.wave_speed_range(i, states[-1], w, s))
        states.append(w)
    return WaveFan(system, np.array(states), np.asarray(sigma, dtype=float), tuple(families),
                   tuple(kinds), tuple(speeds))


def compose(system, u_start, sigma, families):
    w = as_state(u_start)
    for s, i in zip(sigma, families):
        w = system.lax_curve(i, w, float(s))
    return w


def newton_strengths(residual, x0, tol=TOL_RIEMANN, max_iter=50, what="Riemann problem"):
    """Damped Newton iteration with a central-difference Jacobian."""
    x = np.asarray(x0, dtype=float).copy()
    try:
        F = residual(x)
    except AdmissibilityError as exc:
        raise RiemannError(f"{what}: initial guess not admissible ({exc})") from exc
    norm = np.linalg.norm(F)
    for _ in range(max_iter):
        if norm <= 1e-13:
            break
        try:
            J = _fd_jacobian(residual, x, F, step=1e-7)
            dx = np.linalg.solve(J, F)
        except (AdmissibilityError, np.linalg.LinAlgError) as exc:
            raise RiemannError(f"{what}: Jacobian evaluation failed ({exc})") from exc
        step = 1.0
        while True:
            trial = x - step * dx
            try:
                Ft = residual(trial)
                nt = np.linalg.norm(Ft)
            except AdmissibilityError:
                nt = np.inf
            if nt < norm or step < 1e-6:
                break
            step *= 0.5
        if not np.isfinite(nt):
            raise RiemannError(f"{what}: Newton left the admissible region")
        if nt >= norm and norm <= tol:
            break
        x, F, norm = trial, Ft, nt
    if norm > tol:
        raise RiemannError(f"{what}: Newton did not converge (residual {norm:.3e})")
    return x


def solve_homogeneous_riemann(system, u_l, u_r, guess=None) -> WaveFan:
    """Entropic Riemann solution of u_t + f(u)_x = 0 between nearby states."""
    u_l, u_r = as_state(u_l), as_state(u_r)
    families = tuple(range(system.n))
    if system.n == 1:
        sigma = np.array([float(u_r[0] - u_l[0])])
        fan = build_fan(system, u_l, sigma, families)
        return WaveFan(system, np.array([u_l, u_r]), sigma, families, fan.kinds, fan.speeds)
    system.check_admissible(u_l, "left state")
    system.check_admissible(u_r, "right state")
    x0 = np.zeros(system.n) if guess is None else np.asarray(guess, dtype=float)
    sigma = newton_strengths(lambda s: compose(system, u_l, s, families) - u_r, x0)
    fan = build_fan(system, u_l, sigma, families)
    return fan


def eigen_decompose(system, u):
    """Sorted triples (lambda_i, r_i, l_i) at an admissible state."""
    u = as_state(u)
    system.check_admissible(u)
    lam, R, L = system.eigen(u)
    return [(float(lam[i]), R[:, i].copy(), L[i].copy()) for i in range(system.n)]


def lax_curve(system, family, u0, sigma):
    return system.lax_curve(family, as_state(u0), float(sigma))


def evaluate_fan(fan: WaveFan, xi):
    return fan.evaluate(float(xi))


SYSTEMS = {
    "scalar_linear": LinearScalar,
    "scalar_shifted_burgers": ShiftedBurgers,
    "isentropic_euler": IsentropicEuler,
}


def make_system(name, **params):
    try:
        cls = SYSTEMS[name]
    except KeyError:
        raise KeyError(f"unknown system {name!r}; known: {sorted(SYSTEMS)}") from None
    return cls(**params)
