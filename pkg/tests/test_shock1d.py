import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nozzleflow.errors import ExitPressureOutOfRange, NotSupersonic
from nozzleflow.gas import GasModel
from nozzleflow.nozzle import PolynomialProfile, calibrate_inflow
from nozzleflow.shock1d import (
    ShockProblem,
    exit_pressure_range,
    rh_jump,
    shock_position_sweep,
    solve_shock,
)


@pytest.fixture(scope="module")
def standard_case():
    gas = GasModel(2.0)
    prof = PolynomialProfile([1.0, 0.0, 1.0], -1.0, 1.0)
    u0 = calibrate_inflow(prof, gas, 1.0)
    return prof, gas, 1.0, u0


def test_rh_jump_worked_example():
    # gamma=2, (rho,u)=(0.5,2): m=1, flux=2.25; the cubic factors as
    # (rho - 0.5)(rho^2 + 0.5 rho - 2)
    gas = GasModel(2.0)
    rho_p, u_p = rh_jump(gas, 0.5, 2.0)
    expected = (-0.5 + math.sqrt(8.25)) / 2.0
    assert rho_p == pytest.approx(expected, rel=1e-13)
    assert u_p == pytest.approx(1.0 / expected, rel=1e-13)


def test_rh_jump_sonic_is_identity():
    gas = GasModel(1.4)
    rho = 0.8
    u = math.sqrt(gas.sound_speed_sq(rho))
    rho_p, u_p = rh_jump(gas, rho, u)
    assert rho_p == pytest.approx(rho, rel=1e-12)
    assert u_p == pytest.approx(u, rel=1e-12)


def test_rh_jump_requires_supersonic():
    gas = GasModel(1.4)
    with pytest.raises(NotSupersonic):
        rh_jump(gas, 1.0, 0.5)


@settings(max_examples=60, deadline=None)
@given(
    gamma=st.floats(1.1, 3.0),
    rho=st.floats(0.1, 5.0),
    mach=st.floats(1.001, 6.0),
)
def test_rh_jump_invariants(gamma, rho, mach):
    gas = GasModel(gamma)
    u = mach * math.sqrt(gas.sound_speed_sq(rho))
    rho_p, u_p = rh_jump(gas, rho, u)
    m = rho * u
    flux = m * u + gas.pressure(rho)
    assert abs(rho_p * u_p - m) <= 1e-12 * (m + flux)
    assert abs(rho_p * u_p**2 + gas.pressure(rho_p) - flux) <= 1e-12 * (m + flux)
    assert gas.pressure(rho_p) > gas.pressure(rho)  # compression
    assert u_p * u_p < gas.sound_speed_sq(rho_p)  # subsonic downstream


def test_exit_pressure_range(standard_case):
    prof, gas, rho0, u0 = standard_case
    p_min, p_max = exit_pressure_range(prof, gas, rho0, u0)
    assert p_min < p_max
    # frozen regression values for the reference duct
    assert p_min == pytest.approx(0.5682866750121915, rel=1e-8)
    assert p_max == pytest.approx(0.9999999868164542, rel=1e-8)
    prob = ShockProblem(prof, gas, rho0, u0)
    mid = prob.exit_pressure(0.5)
    assert p_min < mid < p_max
    assert mid == pytest.approx(0.8845200869136002, rel=1e-8)


def test_solve_shock_interface_conditions(standard_case):
    prof, gas, rho0, u0 = standard_case
    sol = solve_shock(prof, gas, rho0, u0, 0.8, n_points=801)
    rho_m, u_m = sol.state_minus
    rho_p, u_p = sol.state_plus
    m = rho_m * u_m
    flux = m * u_m + gas.pressure(rho_m)
    assert abs(rho_p * u_p - m) <= 1e-10 * m
    assert abs(rho_p * u_p**2 + gas.pressure(rho_p) - flux) <= 1e-10 * flux
    assert gas.pressure(rho_p) > gas.pressure(rho_m)
    assert u_m**2 > gas.sound_speed_sq(rho_m)
    assert np.all(sol.downstream.M2 < 1.0)
    assert abs(sol.p_exit - 0.8) <= 1e-9 * 0.8
    # same mass flux on both sides, but the Bernoulli head jumps
    assert sol.upstream.J == pytest.approx(sol.downstream.J, rel=1e-14)
    assert sol.downstream.B0 != pytest.approx(sol.upstream.B0, rel=1e-6)
    for side in (sol.upstream, sol.downstream):
        assert np.max(np.abs(side.mismatch())) <= 1e-11 * side.B0
        assert np.max(np.abs(side.a * side.rho * side.u - side.J)) <= 1e-12 * side.J


def test_downstream_mach_decreases(standard_case):
    # widening duct slows subsonic flow, so M^2 falls behind the shock
    prof, gas, rho0, u0 = standard_case
    sol = solve_shock(prof, gas, rho0, u0, 0.75, n_points=401)
    assert np.all(np.diff(sol.downstream.M2) < 0)


def test_shock_position_monotone(standard_case):
    prof, gas, rho0, u0 = standard_case
    p_min, p_max = exit_pressure_range(prof, gas, rho0, u0)
    pressures = np.linspace(0.95 * p_max + 0.05 * p_min, 0.05 * p_max + 0.95 * p_min, 10)
    pairs = shock_position_sweep(prof, gas, rho0, u0, pressures)
    positions = [pos for _, pos in pairs]
    assert all(b > a for a, b in zip(positions, positions[1:]))


def test_shock_limits(standard_case):
    prof, gas, rho0, u0 = standard_case
    p_min, p_max = exit_pressure_range(prof, gas, rho0, u0)
    near_min = solve_shock(prof, gas, rho0, u0, p_min + 1e-6 * (p_max - p_min))
    assert near_min.position > 0.99 * prof.L1
    near_max = solve_shock(prof, gas, rho0, u0, p_max - 1e-6 * (p_max - p_min))
    assert near_max.position < 0.02 * (prof.L1 - prof.L0)


def test_shock_roundtrip(standard_case):
    prof, gas, rho0, u0 = standard_case
    prob = ShockProblem(prof, gas, rho0, u0)
    target = 0.6180339887
    p = prob.exit_pressure(target)
    sol = solve_shock(prof, gas, rho0, u0, p)
    assert sol.position == pytest.approx(target, abs=1e-8)


def test_exit_pressure_out_of_range(standard_case):
    prof, gas, rho0, u0 = standard_case
    with pytest.raises(ExitPressureOutOfRange):
        solve_shock(prof, gas, rho0, u0, 0.1)
    with pytest.raises(ExitPressureOutOfRange):
        solve_shock(prof, gas, rho0, u0, 1.5)
