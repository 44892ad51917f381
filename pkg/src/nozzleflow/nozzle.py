"""Converging-diverging duct cross sections.

A profile is the wall area a(x1) on [L0, L1] with L0 < 0 < L1, strictly
decreasing before the throat at x1 = 0 and strictly increasing after it.
Profiles are supplied analytically (coefficient lists) because the throat
classification needs one-sided derivatives up to order six.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DomainError,
    NoSubsonicCalibration,
    SupersonicInflow,
    UnclassifiableThroat,
)
from .gas import GasModel

MAX_DERIV_ORDER = 6


def _poly_derivative_coeffs(coeffs, order):
    c = np.asarray(coeffs, dtype=float)
    for _ in range(order):
        if len(c) <= 1:
            return np.zeros(1)
        c = c[1:] * np.arange(1, len(c))
    return c


def _poly_eval(coeffs, x):
    return np.polynomial.polynomial.polyval(x, np.asarray(coeffs, dtype=float))


class NozzleProfile:
    """Base class: area a(x1) and derivatives on [L0, L1]."""

    kind = "abstract"

    def __init__(self, L0: float, L1: float, check_samples: int = 4096):
        if not (L0 < 0.0 < L1):
            raise DomainError(f"domain must straddle the throat: L0={L0}, L1={L1}")
        self.L0 = float(L0)
        self.L1 = float(L1)
        if check_samples:
            self._validate(check_samples)

    # subclasses implement the two-sided evaluation kernel
    def _eval(self, x, order, side):
        raise NotImplementedError

    def area(self, x):
        """a(x1); scalar in, scalar out."""
        return self._eval(np.asarray(x, dtype=float), 0, +1)

    def area_derivative(self, x, order=1):
        """d^order a / dx1^order (right-sided convention exactly at 0)."""
        if order > MAX_DERIV_ORDER:
            raise DomainError(f"derivatives supported up to order {MAX_DERIV_ORDER}")
        return self._eval(np.asarray(x, dtype=float), order, +1)

    def derivative_at_zero(self, order, side):
        """One-sided derivative at the throat; side is +1 or -1."""
        if order > MAX_DERIV_ORDER:
            raise DomainError(f"derivatives supported up to order {MAX_DERIV_ORDER}")
        return float(self._eval(np.asarray(0.0), order, side))

    def log_derivative(self, x):
        """a'(x1)/a(x1)."""
        return self.area_derivative(x) / self.area(x)

    def area_excess(self, x):
        """a(x1) - a(0) without cancellation (throat-relative area)."""
        return self._eval(np.asarray(x, dtype=float), 0, +1) - self._eval(
            np.asarray(0.0), 0, +1
        )

    def _validate(self, n):
        m = max(8, n // 2)
        xl = np.linspace(self.L0, 0.0, m, endpoint=False)
        xr = np.linspace(self.L1, 0.0, m, endpoint=False)
        for xs in (xl, xr, np.array([0.0])):
            if np.any(self._eval(xs, 0, +1) <= 0.0):
                raise DomainError("area must stay positive on the whole duct")
        if np.any(self._eval(xl, 1, -1) >= 0.0):
            raise DomainError("area must decrease strictly before the throat")
        if np.any(self._eval(xr, 1, +1) <= 0.0):
            raise DomainError("area must increase strictly after the throat")

    def to_config(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_config(block: dict) -> "NozzleProfile":
        kind = block.get("kind")
        L0, L1 = block["L0"], block["L1"]
        coeffs = block["coeffs"]
        if kind == "polynomial":
            return PolynomialProfile(coeffs, L0, L1)
        if kind == "throat_power":
            a0, c, k = coeffs
            return ThroatPowerProfile(a0, c, int(k), L0, L1)
        if kind == "piecewise":
            left, right = coeffs
            return PiecewiseProfile(left, right, L0, L1)
        raise DomainError(f"unknown profile kind {kind!r}")


class PolynomialProfile(NozzleProfile):
    """a(x1) = sum_k c_k x1^k with coefficients about the throat."""

    kind = "polynomial"

    def __init__(self, coeffs, L0, L1, check_samples=4096):
        self.coeffs = [float(c) for c in coeffs]
        super().__init__(L0, L1, check_samples)

    def _eval(self, x, order, side):
        return _poly_eval(_poly_derivative_coeffs(self.coeffs, order), x)

    def area_excess(self, x):
        x = np.asarray(x, dtype=float)
        return x * _poly_eval(self.coeffs[1:], x) if len(self.coeffs) > 1 else np.zeros_like(x)

    def to_config(self):
        return {"kind": self.kind, "L0": self.L0, "L1": self.L1, "coeffs": self.coeffs}


class ThroatPowerProfile(NozzleProfile):
    """a = a0 + c*x1**k for even k, a0 + c*|x1|**k for odd k."""

    kind = "throat_power"

    def __init__(self, a0, c, k, L0, L1, check_samples=4096):
        if k < 1:
            raise DomainError("power must be a positive integer")
        self.a0 = float(a0)
        self.c = float(c)
        self.k = int(k)
        super().__init__(L0, L1, check_samples)

    def _eval(self, x, order, side):
        k = self.k
        if order > k:
            return np.zeros_like(x)
        fac = self.c * math.factorial(k) / math.factorial(k - order)
        if k % 2 == 0:
            out = fac * x ** (k - order)
        else:
            # per-side polynomial c*(sign(x) x)^k; signs fall out of the chain rule
            sgn = np.where(x != 0.0, np.sign(x), float(side))
            out = fac * sgn**order * np.abs(x) ** (k - order)
        if order == 0:
            out = out + self.a0
        return out

    def area_excess(self, x):
        x = np.asarray(x, dtype=float)
        if self.k % 2 == 0:
            return self.c * x**self.k
        return self.c * np.abs(x) ** self.k

    def to_config(self):
        return {
            "kind": self.kind,
            "L0": self.L0,
            "L1": self.L1,
            "coeffs": [self.a0, self.c, self.k],
        }


class PiecewiseProfile(NozzleProfile):
    """Separate polynomial expansions left and right of the throat."""

    kind = "piecewise"

    def __init__(self, left_coeffs, right_coeffs, L0, L1, check_samples=4096):
        self.left_coeffs = [float(c) for c in left_coeffs]
        self.right_coeffs = [float(c) for c in right_coeffs]
        if abs(self.left_coeffs[0] - self.right_coeffs[0]) > 1e-14 * max(
            1.0, abs(self.right_coeffs[0])
        ):
            raise DomainError("piecewise halves must agree at the throat")
        super().__init__(L0, L1, check_samples)

    def _eval(self, x, order, side):
        x = np.asarray(x, dtype=float)
        cl = _poly_derivative_coeffs(self.left_coeffs, order)
        cr = _poly_derivative_coeffs(self.right_coeffs, order)
        use_right = np.where(x != 0.0, x > 0.0, side > 0)
        return np.where(use_right, _poly_eval(cr, x), _poly_eval(cl, x))

    def area_excess(self, x):
        x = np.asarray(x, dtype=float)
        left = x * _poly_eval(self.left_coeffs[1:], x) if len(self.left_coeffs) > 1 else 0.0
        right = x * _poly_eval(self.right_coeffs[1:], x) if len(self.right_coeffs) > 1 else 0.0
        return np.where(x > 0.0, right, left)

    def to_config(self):
        return {
            "kind": self.kind,
            "L0": self.L0,
            "L1": self.L1,
            "coeffs": [self.left_coeffs, self.right_coeffs],
        }


class ThroatKind(Enum):
    POSITIVE_ACCELERATION = "positive_acceleration"
    ZERO_ACCEL_CASE1 = "zero_accel_case1"
    ZERO_ACCEL_CASE2 = "zero_accel_case2"
    CORNER = "corner"


@dataclass(frozen=True)
class ThroatClass:
    """Leading throat degeneracy: kind, index m, derivative order and value.

    ``value`` is the leading area derivative at the throat (right side for
    corner profiles, where the left value is -value by the sign pattern).
    """

    kind: ThroatKind
    m: int
    order: int
    value: float


def classify_throat(profile: NozzleProfile, tol_zero: float = 1e-10) -> ThroatClass:
    """Classify the throat degeneracy from derivatives of order 1..6."""
    if tol_zero <= 0.0:
        raise DomainError("tol_zero must be positive")
    derivs = {
        (order, side): profile.derivative_at_zero(order, side)
        for order in range(0, MAX_DERIV_ORDER + 1)
        for side in (-1, +1)
    }
    scale = max(abs(v) for v in derivs.values())
    cut = tol_zero * scale

    for order in range(1, MAX_DERIV_ORDER + 1):
        dl = derivs[(order, -1)]
        dr = derivs[(order, +1)]
        if abs(dl) <= cut and abs(dr) <= cut:
            continue
        if abs(dl - dr) <= cut:  # genuine two-sided derivative
            value = 0.5 * (dl + dr)
            if order % 2 == 1 or value < 0.0:
                raise UnclassifiableThroat(
                    f"leading derivative order {order} has the wrong parity or sign"
                )
            if order % 4 == 0:
                return ThroatClass(ThroatKind.ZERO_ACCEL_CASE2, order // 4, order, value)
            m = (order - 2) // 4
            kind = ThroatKind.POSITIVE_ACCELERATION if m == 0 else ThroatKind.ZERO_ACCEL_CASE1
            return ThroatClass(kind, m, order, value)
        if order % 2 == 1 and dr > cut and dl < -cut:
            return ThroatClass(ThroatKind.CORNER, (order - 1) // 2, order, dr)
        raise UnclassifiableThroat(
            f"one-sided derivatives at order {order} do not match any throat pattern"
        )
    raise UnclassifiableThroat("all area derivatives through order 6 vanish at the throat")


def admissibility_residual(
    profile: NozzleProfile, gas: GasModel, rho0: float, u0: float
) -> float:
    """Mismatch between throat contraction and the sonic-throat requirement.

    Zero exactly when the entrance state (rho0, u0) drives the flow sonic
    at x1 = 0; positive when the contraction is too weak.
    """
    if rho0 <= 0.0 or u0 <= 0.0:
        raise DomainError("entrance state must have positive density and velocity")
    if u0 * u0 >= gas.sound_speed_sq(rho0):
        raise SupersonicInflow("entrance state must be subsonic")
    g = gas.gamma
    head = float(gas.bernoulli(rho0, u0 * u0))
    cstar = gas.critical_speed(head)
    lhs = (profile.area(0.0) / profile.area(profile.L0)) ** (g - 1.0)
    rhs = g * (rho0 * u0) ** (g - 1.0) / cstar ** (g + 1.0)
    return float(lhs - rhs)


def calibrate_inflow(profile: NozzleProfile, gas: GasModel, rho0: float) -> float:
    """Entrance velocity that puts the sonic station exactly at the throat."""
    if not profile.area(0.0) < profile.area(profile.L0):
        raise NoSubsonicCalibration("throat must be narrower than the entrance")
    c0 = math.sqrt(gas.sound_speed_sq(rho0))

    def resid(u):
        return admissibility_residual(profile, gas, rho0, u)

    lo, hi = 1e-12 * c0, (1.0 - 1e-12) * c0
    if resid(lo) <= 0.0 or resid(hi) >= 0.0:
        raise NoSubsonicCalibration("residual does not change sign on (0, c(rho0))")
    u0 = brentq(resid, lo, hi, xtol=1e-16, rtol=8.9e-16, maxiter=200)
    if abs(resid(u0)) > 1e-12:
        raise NoSubsonicCalibration("bisection stalled above tolerance")
    return float(u0)
