"""Polytropic gas thermodynamics.

All quantities are nondimensional.  The gas law is p = rho**gamma, from
which sound speed, Bernoulli head and the critical (sonic) speed follow.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, VacuumError

_RHO_MIN = 1e-300


def _pow(x, e):
    # exp/log keeps non-integer exponents well defined for tiny positive x
    return np.exp(e * np.log(x))


class GasModel:
    """Polytropic gas with adiabatic exponent gamma > 1."""

    def __init__(self, gamma: float):
        if not gamma > 1.0:
            raise DomainError(f"adiabatic exponent must exceed 1, got {gamma}")
        self.gamma = float(gamma)

    def __repr__(self):
        return f"GasModel(gamma={self.gamma})"

    def _check_density(self, rho):
        if np.any(np.asarray(rho) <= _RHO_MIN):
            raise VacuumError("non-positive density")

    def pressure(self, rho):
        """p = rho**gamma."""
        self._check_density(rho)
        return _pow(rho, self.gamma)

    def sound_speed_sq(self, rho):
        """c**2 = gamma * rho**(gamma-1)."""
        self._check_density(rho)
        return self.gamma * _pow(rho, self.gamma - 1.0)

    def enthalpy(self, rho):
        """gamma/(gamma-1) * rho**(gamma-1), the specific enthalpy."""
        self._check_density(rho)
        g = self.gamma
        return g / (g - 1.0) * _pow(rho, g - 1.0)

    def bernoulli(self, rho, speed_sq):
        """Bernoulli head: speed_sq/2 + enthalpy(rho)."""
        if np.any(np.asarray(speed_sq) < 0.0):
            raise DomainError("negative squared speed")
        return 0.5 * np.asarray(speed_sq) + self.enthalpy(rho)

    def critical_speed(self, head: float) -> float:
        """Speed at which a flow with the given Bernoulli head is sonic."""
        if not head > 0.0:
            raise DomainError(f"Bernoulli head must be positive, got {head}")
        g = self.gamma
        return float(np.sqrt(2.0 * (g - 1.0) * head / (g + 1.0)))

    def density_from_bernoulli(self, head, speed_sq):
        """Invert the Bernoulli relation for density at fixed speed."""
        margin = np.asarray(head) - 0.5 * np.asarray(speed_sq)
        if np.any(margin <= 0.0):
            raise VacuumError("Bernoulli head does not support this speed")
        g = self.gamma
        return _pow((g - 1.0) / g * margin, 1.0 / (g - 1.0))

    def mach_sq(self, rho, speed_sq):
        """Squared Mach number u^2 / c^2(rho)."""
        return np.asarray(speed_sq) / self.sound_speed_sq(rho)
