import math

import numpy as np
import pytest

from formationsim import vehicle
from formationsim.errors import EnvelopeError, SingularityError
from formationsim.vehicle import (
    ActuatorCommands,
    CartesianControls,
    PolarControls,
    UavParams,
    UavState,
)
from formationsim.wake import PolarDisturbance

PARAMS = UavParams(
    mass=9295.44, wing_area=27.87, wing_span=9.144, drag_coeff=0.0794,
    lift_slope=738845.0,
)


def _state(v=120.0, gamma=0.0, psi=0.0):
    return UavState(position=np.zeros(3), total_speed=v, path_angle=gamma,
                    course_angle=psi)


def test_drag_sea_level_value():
    # 0.5 * 1.225 * 120^2 * 27.87 * 0.0794
    assert vehicle.drag(_state(), PARAMS) == pytest.approx(1.95176e4, rel=1e-3)


def test_drag_quadratic_in_speed():
    d1 = vehicle.drag(_state(v=80.0), PARAMS)
    d2 = vehicle.drag(_state(v=160.0), PARAMS)
    assert d2 == pytest.approx(4.0 * d1, rel=1e-12)


def test_trimmed_level_flight_derivative():
    s = _state()
    act = ActuatorCommands(
        thrust=vehicle.drag(s, PARAMS), lift=PARAMS.mass * vehicle.G,
        bank=0.0, alpha=0.0,
    )
    deriv = vehicle.state_derivative(s, act, PolarDisturbance(), PARAMS)
    assert np.allclose(deriv, [120.0, 0.0, 0.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_climb_rate_row():
    s = _state(v=100.0, gamma=math.pi / 6)
    act = ActuatorCommands(thrust=0.0, lift=0.0, bank=0.0, alpha=0.0)
    deriv = vehicle.state_derivative(s, act, PolarDisturbance(), PARAMS)
    assert deriv[2] == pytest.approx(-50.0, abs=1e-12)


def test_derivative_linear_in_disturbance():
    s = _state(v=100.0, gamma=0.2, psi=0.5)
    act = ActuatorCommands(thrust=1e4, lift=9e4, bank=0.1, alpha=0.0)
    d0 = vehicle.state_derivative(s, act, PolarDisturbance(), PARAMS)
    da = vehicle.state_derivative(s, act, PolarDisturbance(1.0, 0.1, -0.2), PARAMS)
    db = vehicle.state_derivative(s, act, PolarDisturbance(2.0, 0.2, -0.4), PARAMS)
    assert np.allclose(db - d0, 2.0 * (da - d0), atol=1e-12)


def test_polar_to_cartesian_axis_cases():
    s = _state()
    u = vehicle.polar_to_cartesian(PolarControls(1.0, 0.0, 0.0), s)
    assert np.allclose(u.as_array(), [1.0, 0.0, 0.0], atol=1e-15)
    u = vehicle.polar_to_cartesian(PolarControls(0.0, 1.0, 0.0), s)
    assert u.u_z == pytest.approx(-120.0)


def test_cartesian_to_polar_axis_cases():
    s = _state()
    u = vehicle.cartesian_to_polar(CartesianControls(1.0, 0.0, 0.0), s)
    assert (u.u_v, u.u_gamma, u.u_psi) == pytest.approx((1.0, 0.0, 0.0))
    u = vehicle.cartesian_to_polar(CartesianControls(0.0, 1.0, 0.0), s)
    assert u.u_psi == pytest.approx(1.0 / 120.0)
    assert u.u_v == pytest.approx(0.0)
    # a pure vertical command at level flight must show up in the
    # path-angle channel
    u = vehicle.cartesian_to_polar(CartesianControls(0.0, 0.0, -1.0), s)
    assert u.u_gamma == pytest.approx(1.0 / 120.0)


def test_conversion_roundtrips_over_envelope():
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        s = _state(
            v=rng.uniform(60.0, 200.0),
            gamma=rng.uniform(-1.2, 1.2),
            psi=rng.uniform(-math.pi, math.pi),
        )
        u = CartesianControls(*rng.uniform(-30.0, 30.0, 3))
        back = vehicle.polar_to_cartesian(vehicle.cartesian_to_polar(u, s), s)
        assert np.allclose(back.as_array(), u.as_array(), rtol=1e-10, atol=1e-10)
        up = PolarControls(*rng.uniform(-1.0, 1.0, 3))
        back_p = vehicle.cartesian_to_polar(vehicle.polar_to_cartesian(up, s), s)
        assert (back_p.u_v, back_p.u_gamma, back_p.u_psi) == pytest.approx(
            (up.u_v, up.u_gamma, up.u_psi), rel=1e-10, abs=1e-10
        )


def test_actuator_trim_cases():
    s = _state()
    act, sat = vehicle.polar_to_actuators(PolarControls(0.0, 0.0, 0.0), s, PARAMS)
    assert not sat
    assert act.bank == pytest.approx(0.0)
    assert act.lift == pytest.approx(PARAMS.mass * vehicle.G)
    assert act.thrust == pytest.approx(vehicle.drag(s, PARAMS))


def test_actuator_bank_from_course_command():
    s = _state()
    u_psi = 0.05
    act, _ = vehicle.polar_to_actuators(PolarControls(0.0, 0.0, u_psi), s, PARAMS)
    assert math.tan(act.bank) == pytest.approx(120.0 * u_psi / vehicle.G, rel=1e-12)


def test_actuator_inversion():
    rng = np.random.default_rng(9)
    for _ in range(2000):
        s = _state(
            v=rng.uniform(60.0, 200.0),
            gamma=rng.uniform(-1.2, 1.2),
            psi=rng.uniform(-math.pi, math.pi),
        )
        u = PolarControls(rng.uniform(-20, 20), rng.uniform(-0.5, 0.5),
                          rng.uniform(-0.5, 0.5))
        act, sat = vehicle.polar_to_actuators(u, s, PARAMS)
        assert act.lift >= 0.0
        if sat:
            continue
        rec = vehicle.actuators_to_polar(act, s, PARAMS)
        assert (rec.u_v, rec.u_gamma, rec.u_psi) == pytest.approx(
            (u.u_v, u.u_gamma, u.u_psi), abs=1e-9
        )


def test_negative_thrust_clamped_and_flagged():
    s = _state()
    act, sat = vehicle.polar_to_actuators(PolarControls(-50.0, 0.0, 0.0), s, PARAMS)
    assert sat
    assert act.thrust == 0.0


def test_singularity_guard():
    s = _state(gamma=math.pi / 2)
    with pytest.raises(SingularityError):
        vehicle.cartesian_to_polar(CartesianControls(1.0, 0.0, 0.0), s)
    act = ActuatorCommands(thrust=0.0, lift=1.0, bank=0.1, alpha=0.0)
    with pytest.raises(SingularityError):
        vehicle.state_derivative(s, act, PolarDisturbance(), PARAMS)


def test_speed_envelope():
    s = UavState(position=np.zeros(3), total_speed=0.0, path_angle=0.0,
                 course_angle=0.0)
    with pytest.raises(EnvelopeError):
        vehicle.drag(s, PARAMS)


def test_params_validation():
    with pytest.raises(EnvelopeError):
        UavParams(mass=-1.0, wing_area=1.0, wing_span=1.0, drag_coeff=0.1)


def test_disturbance_to_cartesian_cases():
    s = _state()
    out = vehicle.disturbance_to_cartesian(PolarDisturbance(1.0, 0.0, 0.0), s)
    assert np.allclose(out, [1.0, 0.0, 0.0])
    out = vehicle.disturbance_to_cartesian(PolarDisturbance(0.0, 1.0, 0.0), s)
    assert out[2] == pytest.approx(-120.0)
    assert np.allclose(
        vehicle.disturbance_to_cartesian(PolarDisturbance(), s), np.zeros(3)
    )
