"""Exact steady quasi-1D flow in a converging-diverging duct.

For mass flux J and Bernoulli head B0 the velocity at a station solves

    mismatch(x1, t) = t^2/2 + g*J^(g-1) / ((g-1) a(x1)^(g-1) t^(g-1)) - B0 = 0,

which has a subsonic and a supersonic root away from the throat.  Near the
throat the two roots collide; there the velocity is written as
u = c* + sign(x1)*|x1|^p * y(x1) and y is obtained from a desingularized
fixed point, with exponent p and limit y(0) set by the throat class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    InsufficientPoints,
    NoRoot,
    NotCalibrated,
    SonicWindowDivergence,
    WrongThroatClass,
)
from .gas import GasModel
from .nozzle import NozzleProfile, ThroatClass, ThroatKind, admissibility_residual, classify_throat

BRANCH_SUBSONIC = "subsonic"
BRANCH_SUPERSONIC = "supersonic"


def bernoulli_mismatch(profile, gas, J, B0, x1, t):
    """Residual of the Bernoulli/mass-flux relation at station x1, speed t."""
    g = gas.gamma
    q = g * J ** (g - 1.0) / ((g - 1.0) * profile.area(x1) ** (g - 1.0))
    return 0.5 * np.asarray(t) ** 2 + q * np.asarray(t) ** (1.0 - g) - B0


def _mismatch_dt(profile, gas, J, x1, t):
    g = gas.gamma
    return t - g * J ** (g - 1.0) / (profile.area(x1) ** (g - 1.0) * t**g)


def flux_sonic_speed(profile, gas, J, x1):
    """Speed at which flow with mass flux J is exactly sonic at x1.

    This is also the minimizer of the Bernoulli mismatch over speed.
    """
    if np.any(np.asarray(J) <= 0.0):
        raise DomainError("mass flux must be positive")
    g = gas.gamma
    return (g * J ** (g - 1.0) / profile.area(x1) ** (g - 1.0)) ** (1.0 / (g + 1.0))


def branch_velocity(profile, gas, J, B0, x1, branch):
    """Root of the Bernoulli mismatch on the requested branch.

    Vectorized over x1.  Bisection brackets the root, three Newton steps
    polish it; the returned speeds satisfy |mismatch| <= 1e-13 * B0.
    """
    x = np.atleast_1d(np.asarray(x1, dtype=float))
    tstar = np.atleast_1d(flux_sonic_speed(profile, gas, J, x))

    def F(t):
        return np.asarray(bernoulli_mismatch(profile, gas, J, B0, x, t))

    fmin = F(tstar)
    if np.any(fmin > 1e-11 * B0):
        bad = x[np.argmax(fmin)]
        raise NoRoot(f"flow cannot pass station x1={bad:.6g} (duct/inflow mismatch)")

    if branch == BRANCH_SUBSONIC:
        lo = 0.5 * tstar
        for _ in range(600):
            mask = F(lo) <= 0.0
            if not mask.any():
                break
            lo[mask] *= 0.5
        else:
            raise NoRoot("could not bracket the subsonic root")
        hi = tstar.copy()
    elif branch == BRANCH_SUPERSONIC:
        lo = tstar.copy()
        hi = np.full_like(tstar, math.sqrt(2.0 * B0) * (1.0 - 1e-14))
    else:
        raise DomainError(f"unknown branch {branch!r}")

    # subsonic: F(lo) > 0 >= F(hi); supersonic: F(lo) <= 0 < F(hi)
    sign_lo = 1.0 if branch == BRANCH_SUBSONIC else -1.0
    n_bis = int(np.ceil(np.log2(np.max(hi - lo) / 1e-8))) + 1 if np.max(hi - lo) > 1e-8 else 1
    for _ in range(max(n_bis, 1)):
        mid = 0.5 * (lo + hi)
        take_lo = sign_lo * F(mid) > 0.0
        lo = np.where(take_lo, mid, lo)
        hi = np.where(take_lo, hi, mid)
    t = 0.5 * (lo + hi)
    for _ in range(3):
        dF = _mismatch_dt(profile, gas, J, x, t)
        step = np.where(dF != 0.0, F(t) / np.where(dF != 0.0, dF, 1.0), 0.0)
        t = np.clip(t - step, lo, hi)
    if np.any(np.abs(F(t)) > 1e-13 * B0):
        raise NoRoot("branch root polishing failed to reach tolerance")
    return t if np.ndim(x1) else float(t[0])


def _leading_y(gas, cstar, a0, order, deriv_value):
    g = gas.gamma
    return math.sqrt(
        2.0 * cstar**2 * abs(deriv_value) / ((g + 1.0) * math.factorial(order) * a0)
    )


def _binom_remainder(e, z):
    """(1+z)^e - 1 - e*z, accurate relative to its own z^2 magnitude."""
    z = np.asarray(z, dtype=float)
    out = np.where(
        np.abs(z) > 0.5,
        np.expm1(e * np.log1p(np.where(np.abs(z) > 0.5, z, 0.0))) - e * z,
        0.0,
    )
    inner = np.abs(z) <= 0.5
    if np.any(inner):
        zi = np.where(inner, z, 0.0)
        term = e * zi
        total = np.zeros_like(zi)
        for k in range(2, 80):
            term = term * ((e - (k - 1)) / k) * zi
            total = total + term
            if np.max(np.abs(term)) <= 1e-18 * max(np.max(np.abs(total)), 1e-300):
                break
        out = np.where(inner, total, out)
    return out


@dataclass
class TransonicProblem:
    """Calibrated transonic flow: point evaluation of the velocity."""

    profile: NozzleProfile
    gas: GasModel
    J: float
    B0: float
    c_star: float
    throat: ThroatClass
    delta_sonic: float
    p: float = field(init=False)
    y_right: float = field(init=False)
    y_left: float = field(init=False)

    def __post_init__(self):
        cls = self.throat
        a0 = float(self.profile.area(0.0))
        if cls.kind is ThroatKind.POSITIVE_ACCELERATION:
            self.p = 1.0
        elif cls.kind is ThroatKind.ZERO_ACCEL_CASE1:
            self.p = 2.0 * cls.m + 1.0
        elif cls.kind is ThroatKind.ZERO_ACCEL_CASE2:
            self.p = 2.0 * cls.m
        else:
            self.p = cls.m + 0.5
        self.y_right = _leading_y(self.gas, self.c_star, a0, cls.order, cls.value)
        if cls.kind is ThroatKind.CORNER:
            left_value = self.profile.derivative_at_zero(cls.order, -1)
            self.y_left = _leading_y(self.gas, self.c_star, a0, cls.order, left_value)
        else:
            self.y_left = self.y_right
        # sonic-relative mismatch: with the flux re-derived from the head the
        # identity q0*(gamma-1) = c*^(gamma+1) is exact, so the constant and
        # linear pieces of the mismatch at (0, c*) vanish analytically
        g = self.gas.gamma
        self._a0 = a0
        self._q0 = self.c_star ** (g + 1.0) / (g - 1.0)

    def _shrink(self, x):
        return self.profile.area_excess(x) / self._a0

    def sonic_mismatch(self, x, w):
        """Bernoulli mismatch at speed c* + w, resolved at the w^2 scale."""
        g = self.gas.gamma
        cs = self.c_star
        rem = self._q0 * cs ** (1.0 - g) * _binom_remainder(1.0 - g, w / cs)
        dq = self._q0 * np.expm1((1.0 - g) * np.log1p(self._shrink(x)))
        return 0.5 * w * w + rem + dq * (cs + w) ** (1.0 - g)

    def _sonic_mismatch_dw(self, x, w):
        g = self.gas.gamma
        u = self.c_star + w
        qx = self._q0 * (1.0 + np.expm1((1.0 - g) * np.log1p(self._shrink(x))))
        return u - (g - 1.0) * qx * u ** (-g)

    def _window_speed(self, x):
        """Desingularized solve for u inside |x1| < delta_sonic."""
        if x == 0.0:
            return self.c_star
        g = self.gas.gamma
        s = 1.0 if x > 0.0 else -1.0
        span = abs(x) ** self.p
        scale = 2.0 / ((g + 1.0) * span * span)
        y0 = self.y_right if x > 0.0 else self.y_left
        y = y0
        for _ in range(100):
            fval = float(self.sonic_mismatch(x, s * span * y))
            radicand = y * y - scale * fval
            if radicand <= 0.0:
                y *= 0.5  # retreat toward the slow side; the map contracts there
                continue
            y_new = math.sqrt(radicand)
            if abs(y_new - y) <= 5e-15 * max(y_new, y0):
                return self.c_star + s * span * y_new
            y = y_new
        raise SonicWindowDivergence(f"no convergence at x1={x:.3g}")

    def _branch_speed(self, x, supersonic):
        """Vectorized branch root of the sonic-relative mismatch."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        g = self.gas.gamma
        cs = self.c_star
        # sonic-flux speed relative to c*, computed without cancellation
        wstar = cs * np.expm1(-(g - 1.0) / (g + 1.0) * np.log1p(self._shrink(x)))
        fstar = self.sonic_mismatch(x, wstar)
        if np.any(fstar > 1e-11 * self.B0):
            bad = x[np.argmax(fstar)]
            raise NoRoot(f"flow cannot pass station x1={bad:.6g}")
        if supersonic:
            lo = wstar.copy()
            hi = np.full_like(lo, math.sqrt(2.0 * self.B0) * (1 - 1e-14) - cs)
            sign_lo = -1.0
        else:
            hi = wstar.copy()
            lo = np.full_like(hi, -0.5 * cs)
            for _ in range(60):
                mask = self.sonic_mismatch(x, lo) <= 0.0
                if not mask.any():
                    break
                lo[mask] = -cs + 0.5 * (lo[mask] + cs)
            sign_lo = 1.0
        for _ in range(55):
            mid = 0.5 * (lo + hi)
            take_lo = sign_lo * self.sonic_mismatch(x, mid) > 0.0
            lo = np.where(take_lo, mid, lo)
            hi = np.where(take_lo, hi, mid)
        w = 0.5 * (lo + hi)
        for _ in range(3):
            dF = self._sonic_mismatch_dw(x, w)
            step = np.where(dF != 0.0, self.sonic_mismatch(x, w) / np.where(dF != 0.0, dF, 1.0), 0.0)
            w = np.clip(w - step, lo, hi)
        return cs + w

    def velocity_at(self, x):
        """Velocity at a single station (handles the sonic window)."""
        x = float(x)
        if abs(x) < self.delta_sonic:
            return self._window_speed(x)
        return float(self._branch_speed(x, supersonic=x > 0.0)[0])

    def velocity_on(self, x):
        """Velocity on a sorted grid; branch roots vectorized outside the window."""
        x = np.asarray(x, dtype=float)
        u = np.empty_like(x)
        window = np.abs(x) < self.delta_sonic
        sub = (~window) & (x < 0.0)
        sup = (~window) & (x > 0.0)
        if sub.any():
            u[sub] = self._branch_speed(x[sub], supersonic=False)
        if sup.any():
            u[sup] = self._branch_speed(x[sup], supersonic=True)
        for i in np.nonzero(window)[0]:
            u[i] = self._window_speed(x[i])
        return u

    def velocity_gradient_on(self, x, u):
        """du/dx1 from the streamwise momentum balance, cancellation-free."""
        g = self.gas.gamma
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        w = u - self.c_star
        a = self.profile.area(x)
        da = self.profile.area_derivative(x)
        e1 = np.expm1((g + 1.0) * np.log1p(w / self.c_star))
        e2 = np.expm1(-(g - 1.0) * np.log1p(self._shrink(x)))
        den = a ** (g - 1.0) * self.c_star ** (g + 1.0) * (e1 - e2)
        gj = self.c_star ** (g + 1.0) * self._a0 ** (g - 1.0)  # = gamma J^(gamma-1)
        return gj * u * (da / a) / den


@dataclass
class Flow1D:
    """Sampled quasi-1D flow with its conserved quantities."""

    x1: np.ndarray
    a: np.ndarray
    u: np.ndarray
    rho: np.ndarray
    M2: np.ndarray
    du: np.ndarray
    J: float
    B0: float
    gamma: float
    sonic_index: int | None = None
    delta_sonic: float = 0.0

    @property
    def pressure(self):
        return self.rho**self.gamma

    def mismatch(self):
        """Bernoulli residual at every node."""
        g = self.gamma
        q = g * self.J ** (g - 1.0) / ((g - 1.0) * self.a ** (g - 1.0))
        return 0.5 * self.u**2 + q * self.u ** (1.0 - g) - self.B0


def throat_grid(L0, L1, n_points):
    """Per-side uniform grid sharing the throat node x1 = 0.

    Coincides with a plain uniform grid whenever 0 falls on it (symmetric
    domain, odd point count).
    """
    if n_points < 3:
        raise DomainError("need at least 3 grid points")
    n_left = int(round((n_points - 1) * (0.0 - L0) / (L1 - L0)))
    n_left = min(max(n_left, 1), n_points - 2)
    left = np.linspace(L0, 0.0, n_left + 1)[:-1]
    right = np.linspace(0.0, L1, n_points - n_left)
    return np.concatenate([left, right])


def _du_from_ode(profile, gas, flow_u, x, J):
    g = gas.gamma
    a = profile.area(x)
    b = profile.log_derivative(x)
    num = g * J ** (g - 1.0) * flow_u * b
    den = a ** (g - 1.0) * flow_u ** (g + 1.0) - g * J ** (g - 1.0)
    return num / den


def solve_transonic(
    profile: NozzleProfile,
    gas: GasModel,
    rho0: float,
    u0: float,
    n_points: int,
    delta_sonic: float | None = None,
) -> Flow1D:
    """Accelerating transonic flow, subsonic before the throat and
    supersonic after it, for calibrated entrance data."""
    resid = admissibility_residual(profile, gas, rho0, u0)
    if abs(resid) > 1e-9:
        raise NotCalibrated(f"entrance data residual {resid:.3e} exceeds 1e-9")
    problem = make_problem(profile, gas, rho0, u0, delta_sonic)
    x = throat_grid(profile.L0, profile.L1, n_points)
    u = problem.velocity_on(x)
    return _flow_from_velocity(problem, x, u)


def make_problem(profile, gas, rho0, u0, delta_sonic=None) -> TransonicProblem:
    """Build the point-evaluation problem for calibrated entrance data.

    The mass flux is re-derived from the Bernoulli head so that the sonic
    state sits exactly at the throat; it differs from a(L0)*rho0*u0 by at
    most the admissibility residual of the inputs.
    """
    g = gas.gamma
    B0 = float(gas.bernoulli(rho0, u0 * u0))
    cstar = gas.critical_speed(B0)
    a0 = float(profile.area(0.0))
    J = (cstar ** (g + 1.0) * a0 ** (g - 1.0) / g) ** (1.0 / (g - 1.0))
    throat = classify_throat(profile)
    if delta_sonic is None:
        delta_sonic = 1e-3 * (profile.L1 - profile.L0)
    return TransonicProblem(profile, gas, J, B0, cstar, throat, delta_sonic)


def _flow_from_velocity(problem, x, u):
    profile, gas = problem.profile, problem.gas
    a = profile.area(x)
    rho = problem.J / (a * u)
    M2 = gas.mach_sq(rho, u * u)
    du = np.empty_like(u)
    at_throat = x == 0.0
    du[~at_throat] = problem.velocity_gradient_on(x[~at_throat], u[~at_throat])
    du[at_throat] = _sonic_du(problem)
    sonic = int(np.argmin(np.abs(x)))
    if x[sonic] != 0.0:
        sonic = None
    return Flow1D(
        x1=x, a=a, u=u, rho=rho, M2=M2, du=du,
        J=problem.J, B0=problem.B0, gamma=gas.gamma,
        sonic_index=sonic, delta_sonic=problem.delta_sonic,
    )


def _sonic_du(problem):
    kind = problem.throat.kind
    if kind is ThroatKind.POSITIVE_ACCELERATION:
        return problem.y_right
    if kind is ThroatKind.CORNER:
        return math.inf
    return 0.0


def sonic_acceleration(profile: NozzleProfile, gas: GasModel, B0: float) -> float:
    """Velocity gradient at the throat for a quadratic-minimum duct."""
    cls = classify_throat(profile)
    if cls.kind is not ThroatKind.POSITIVE_ACCELERATION:
        raise WrongThroatClass(f"throat class is {cls.kind.value}")
    g = gas.gamma
    cstar = gas.critical_speed(B0)
    return cstar * math.sqrt(cls.value / ((g + 1.0) * profile.area(0.0)))


def zero_accel_leading_coeff(
    profile: NozzleProfile, gas: GasModel, B0: float, throat: ThroatClass
) -> float:
    """Leading nonzero velocity derivative at the throat for the flat
    (zero-acceleration) throat classes.

    For the odd class the value is the derivative of order 2m+1 (same on
    both sides); for the even class it is the right-side derivative of
    order 2m, the left side being its negative.
    """
    if throat.kind is ThroatKind.ZERO_ACCEL_CASE1:
        k = 2 * throat.m + 1
    elif throat.kind is ThroatKind.ZERO_ACCEL_CASE2:
        k = 2 * throat.m
    else:
        raise WrongThroatClass(f"throat class is {throat.kind.value}")
    cstar = gas.critical_speed(B0)
    y0 = _leading_y(gas, cstar, float(profile.area(0.0)), throat.order, throat.value)
    return math.factorial(k) * y0


@dataclass
class OdeResiduals:
    velocity: float
    density: float
    mach_sq: float


def _d1_fourth_order(f, h):
    out = np.full_like(f, np.nan)
    out[2:-2] = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
    return out


def ode_rhs_diagnostics(flow: Flow1D, profile: NozzleProfile) -> OdeResiduals:
    """Max residual of the three streamwise ODEs, by 4th-order differences.

    The sonic window |x1| < delta_sonic is excluded; the grid must be
    uniform on each side of the throat.
    """
    g = flow.gamma
    segments = []
    if flow.sonic_index is not None:
        segments = [slice(0, flow.sonic_index + 1), slice(flow.sonic_index, len(flow.x1))]
    else:
        segments = [slice(0, len(flow.x1))]
    worst = [0.0, 0.0, 0.0]
    for seg in segments:
        x = flow.x1[seg]
        if len(x) < 5:
            continue
        h = x[1] - x[0]
        if not np.allclose(np.diff(x), h, rtol=1e-12, atol=1e-15):
            raise DomainError("diagnostics need a per-side uniform grid")
        b = profile.log_derivative(x)
        a = flow.a[seg]
        u, rho, M2 = flow.u[seg], flow.rho[seg], flow.M2[seg]
        keep = np.abs(x) >= max(flow.delta_sonic, 2.5 * h)
        keep[:2] = keep[-2:] = False
        du = _d1_fourth_order(u, h)
        drho = _d1_fourth_order(rho, h)
        dM2 = _d1_fourth_order(M2, h)
        den = a ** (g - 1.0) * u ** (g + 1.0) - g * flow.J ** (g - 1.0)
        r_u = du - g * flow.J ** (g - 1.0) * u * b / den
        r_rho = drho - rho * M2 * b / (1.0 - M2)
        r_m2 = dM2 + M2 * (2.0 + (g - 1.0) * M2) * b / (1.0 - M2)
        for k, r in enumerate((r_u, r_rho, r_m2)):
            if keep.any():
                worst[k] = max(worst[k], float(np.max(np.abs(r[keep]))))
    return OdeResiduals(*worst)


def fit_degeneracy_exponent(flow: Flow1D, side: str, window=(1e-3, 1e-1)) -> float:
    """Log-log slope of |u - c*| against |x1| on one side of the throat."""
    gas_cstar = GasModel(flow.gamma).critical_speed(flow.B0)
    r_min, r_max = window
    x, u = flow.x1, flow.u
    if side == "left":
        mask = (x < 0) & (np.abs(x) >= r_min) & (np.abs(x) <= r_max)
    elif side == "right":
        mask = (x > 0) & (x >= r_min) & (x <= r_max)
    else:
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if mask.sum() < 8:
        raise InsufficientPoints(f"only {int(mask.sum())} samples inside the window")
    lx = np.log(np.abs(x[mask]))
    ly = np.log(np.abs(u[mask] - gas_cstar))
    return float(np.polyfit(lx, ly, 1)[0])
