"""Quasi-1D transonic flow with a standing normal shock.

The supersonic transonic flow downstream of the throat is matched to a
prescribed exit pressure by inserting a jump that conserves mass flux and
momentum flux.  The jump strength, and hence the exit pressure, varies
monotonically with the shock position, which makes the position search a
plain bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ExitPressureOutOfRange, NonMonotone, NotSupersonic
from .gas import GasModel
from .nozzle import NozzleProfile
from .quasi1d import (
    BRANCH_SUBSONIC,
    Flow1D,
    _du_from_ode,
    branch_velocity,
    make_problem,
    solve_transonic,
    throat_grid,
)


def rh_jump(gas: GasModel, rho_minus: float, u_minus: float) -> tuple[float, float]:
    """Subsonic state downstream of a normal shock.

    Conserves m = rho*u and momentum flux m*u + p(rho); the downstream
    pressure exceeds the upstream one on this branch.
    """
    g = gas.gamma
    csq = gas.sound_speed_sq(rho_minus)
    if u_minus * u_minus < csq * (1.0 - 1e-12):
        raise NotSupersonic("upstream shock state must be supersonic")
    if u_minus * u_minus <= csq:
        return float(rho_minus), float(u_minus)  # vanishing-strength jump
    m = rho_minus * u_minus
    flux = m * u_minus + rho_minus**g

    def excess(rho):
        return m * m / rho + rho**g - flux

    # momentum flux is decreasing in rho up to the sonic density, then
    # increasing; the subsonic root sits right of the minimum
    rho_sonic = (m * m / g) ** (1.0 / (g + 1.0))
    hi = 2.0 * rho_sonic
    for _ in range(200):
        if excess(hi) > 0.0:
            break
        hi *= 2.0
    rho_plus = brentq(excess, rho_sonic, hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
    # one Newton step cleans up the last bits
    slope = -m * m / rho_plus**2 + g * rho_plus ** (g - 1.0)
    rho_plus -= excess(rho_plus) / slope
    return float(rho_plus), float(m / rho_plus)


@dataclass
class ShockSolution:
    position: float
    upstream: Flow1D
    downstream: Flow1D
    p_exit: float
    state_minus: tuple[float, float]
    state_plus: tuple[float, float]


class ShockProblem:
    """Shock-position search on top of a calibrated transonic flow."""

    def __init__(self, profile, gas, rho0, u0, delta_sonic=None):
        self.profile = profile
        self.gas = gas
        self.rho0 = float(rho0)
        self.u0 = float(u0)
        self.base = make_problem(profile, gas, rho0, u0, delta_sonic)

    def _upstream_state(self, position):
        u_minus = self.base.velocity_at(position)
        rho_minus = self.base.J / (self.profile.area(position) * u_minus)
        return rho_minus, u_minus

    def exit_state(self, position):
        """Exit (rho, u, p) when the jump sits at the given position."""
        rho_m, u_m = self._upstream_state(position)
        rho_p, u_p = rh_jump(self.gas, rho_m, u_m)
        head = float(self.gas.bernoulli(rho_p, u_p * u_p))
        if position >= self.profile.L1:
            rho_exit = rho_p
        else:
            u_exit = branch_velocity(
                self.profile, self.gas, self.base.J, head, self.profile.L1, BRANCH_SUBSONIC
            )
            rho_exit = self.base.J / (self.profile.area(self.profile.L1) * u_exit)
        return float(rho_exit), head, (rho_m, u_m), (rho_p, u_p)

    def exit_pressure(self, position):
        rho_exit, _, _, _ = self.exit_state(position)
        return float(self.gas.pressure(rho_exit))


def exit_pressure_range(profile, gas, rho0, u0, delta_sonic=None):
    """(p_min, p_max): exit pressures with the jump at the exit / the throat."""
    prob = ShockProblem(profile, gas, rho0, u0, delta_sonic)
    p_max = prob.exit_pressure(prob.base.delta_sonic)
    p_min = prob.exit_pressure(profile.L1)
    return p_min, p_max


def solve_shock(
    profile: NozzleProfile,
    gas: GasModel,
    rho0: float,
    u0: float,
    p_exit: float,
    n_points: int = 401,
    delta_sonic: float | None = None,
) -> ShockSolution:
    """Place the shock so the exit pressure matches p_exit."""
    prob = ShockProblem(profile, gas, rho0, u0, delta_sonic)
    lo = prob.base.delta_sonic
    hi = profile.L1
    p_lo, p_hi = prob.exit_pressure(lo), prob.exit_pressure(hi)
    if not (p_hi < p_exit < p_lo):
        raise ExitPressureOutOfRange(
            f"p_exit={p_exit:.6g} outside ({p_hi:.6g}, {p_lo:.6g})"
        )

    def offset(pos):
        return prob.exit_pressure(pos) - p_exit

    position = brentq(offset, lo, hi, xtol=1e-10 * (profile.L1 - profile.L0), rtol=8.9e-16)
    achieved = prob.exit_pressure(position)
    if abs(achieved - p_exit) > 1e-9 * p_exit:
        raise NonMonotone("shock-position bisection failed to match the exit pressure")

    _, head_plus, (rho_m, u_m), (rho_p, u_p) = prob.exit_state(position)

    base_grid = throat_grid(profile.L0, profile.L1, n_points)
    up_x = np.append(base_grid[base_grid < position], position)
    up_u = np.empty_like(up_x)
    up_u[:-1] = prob.base.velocity_on(up_x[:-1])
    up_u[-1] = u_m
    up_a = profile.area(up_x)
    up_rho = prob.base.J / (up_a * up_u)
    upstream = Flow1D(
        x1=up_x, a=up_a, u=up_u, rho=up_rho,
        M2=gas.mach_sq(up_rho, up_u**2),
        du=np.gradient(up_u, up_x),
        J=prob.base.J, B0=prob.base.B0, gamma=gas.gamma,
        sonic_index=int(np.argmin(np.abs(up_x))),
        delta_sonic=prob.base.delta_sonic,
    )

    n_down = max(3, int(round((profile.L1 - position) / (profile.L1 - profile.L0) * n_points)))
    down_x = np.linspace(position, profile.L1, n_down)
    down_u = branch_velocity(profile, gas, prob.base.J, head_plus, down_x, BRANCH_SUBSONIC)
    down_a = profile.area(down_x)
    down_rho = prob.base.J / (down_a * down_u)
    downstream = Flow1D(
        x1=down_x, a=down_a, u=down_u, rho=down_rho,
        M2=gas.mach_sq(down_rho, down_u**2),
        du=_du_from_ode(profile, gas, down_u, down_x, prob.base.J),
        J=prob.base.J, B0=head_plus, gamma=gas.gamma,
        sonic_index=None,
    )
    return ShockSolution(
        position=float(position),
        upstream=upstream,
        downstream=downstream,
        p_exit=float(achieved),
        state_minus=(float(rho_m), float(u_m)),
        state_plus=(float(rho_p), float(u_p)),
    )


def shock_position_sweep(profile, gas, rho0, u0, pressures, delta_sonic=None):
    """Shock positions for a list of exit pressures (cheap: no grids built)."""
    prob = ShockProblem(profile, gas, rho0, u0, delta_sonic)
    lo, hi = prob.base.delta_sonic, profile.L1
    p_lo, p_hi = prob.exit_pressure(lo), prob.exit_pressure(hi)
    out = []
    for p in pressures:
        if not (p_hi < p < p_lo):
            raise ExitPressureOutOfRange(f"p_exit={p:.6g} outside ({p_hi:.6g}, {p_lo:.6g})")
        pos = brentq(
            lambda s: prob.exit_pressure(s) - p,
            lo,
            hi,
            xtol=1e-10 * (profile.L1 - profile.L0),
            rtol=8.9e-16,
        )
        out.append((float(p), float(pos)))
    return out
