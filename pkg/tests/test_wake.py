import math

import numpy as np
import pytest

from formationsim.errors import ConfigError
from formationsim.vehicle import UavState
from formationsim.wake import (
    VORTEX_SPAN_FACTOR,
    DisturbanceSpec,
    disturbance_at,
)

B = 9.144


def _state(pos, v=120.0, gamma=0.0, psi=0.0):
    return UavState(position=np.asarray(pos, dtype=float), total_speed=v,
                    path_angle=gamma, course_angle=psi)


def test_zero_kind():
    d = disturbance_at(0, [_state([0, 0, 0])], 3.0, DisturbanceSpec(kind="zero"))
    assert d.as_array().tolist() == [0.0, 0.0, 0.0]


def test_constant_kind():
    spec = DisturbanceSpec(kind="constant", constant=(1.0, 0.1, -0.2))
    d = disturbance_at(0, [_state([0, 0, 0])], 7.0, spec)
    assert d.as_array().tolist() == [1.0, 0.1, -0.2]


def test_caps_clamp_output():
    spec = DisturbanceSpec(kind="constant", constant=(100.0, -5.0, 0.0),
                           caps=(10.0, 1.0, 1.0))
    d = disturbance_at(0, [_state([0, 0, 0])], 0.0, spec)
    assert d.d_v == 10.0
    assert d.d_gamma == -1.0


def test_sinusoid_values_and_phase_step():
    spec = DisturbanceSpec(
        kind="sinusoid", amplitude=(0.5, 0.0, 0.0), frequency=(2.0, 0.0, 0.0),
        phase=(0.3, 0.0, 0.0), phase_step=0.1,
    )
    states = [_state([0, 0, 0])] * 3
    for i in (0, 2):
        d = disturbance_at(i, states, 1.7, spec)
        assert d.d_v == pytest.approx(0.5 * math.sin(2.0 * 1.7 + 0.3 + 0.1 * i))


def test_ramp_saturating_monotone_and_limit():
    spec = DisturbanceSpec(kind="ramp-saturating", amplitude=(2.0, 0.0, 0.0),
                           ramp_time=0.5)
    states = [_state([0, 0, 0])]
    vals = [disturbance_at(0, states, t, spec).d_v for t in (0.0, 0.5, 1.0, 10.0)]
    assert vals == sorted(vals)
    assert vals[0] == 0.0
    assert vals[-1] == pytest.approx(2.0, abs=1e-8)


def _vortex_spec(**kw):
    return DisturbanceSpec(kind="horseshoe-vortex", vortex_span=B, **kw)


def test_vortex_apex_sees_nothing():
    # vehicle 0 is ahead of everyone: no upstream source.
    states = [_state([100, 0, 0]), _state([0, 10, 0]), _state([-50, -10, 0])]
    d = disturbance_at(0, states, 0.0, _vortex_spec())
    assert d.as_array().tolist() == [0.0, 0.0, 0.0]


def test_vortex_outboard_upwash_speeds_follower():
    # Trailing vehicle laterally outside the leader's tip-vortex pair sits
    # in upwash: positive speed-channel disturbance.
    states = [_state([60, 0, 0]), _state([0, B, 0])]
    d = disturbance_at(1, states, 0.0, _vortex_spec())
    assert d.d_v > 0.0


def test_vortex_centerline_downwash():
    # Directly behind the leader, between the tips: downwash.
    states = [_state([60, 0, 0]), _state([0, 0, 0])]
    d = disturbance_at(1, states, 0.0, _vortex_spec())
    assert d.d_v < 0.0


def test_vortex_mirror_symmetry():
    states_r = [_state([60, 0, 0]), _state([0, 2 * B, 0])]
    states_l = [_state([60, 0, 0]), _state([0, -2 * B, 0])]
    d_r = disturbance_at(1, states_r, 0.0, _vortex_spec())
    d_l = disturbance_at(1, states_l, 0.0, _vortex_spec())
    assert d_r.d_v == pytest.approx(d_l.d_v, rel=1e-9)
    assert d_r.d_psi == pytest.approx(-d_l.d_psi, rel=1e-9)


def test_vortex_nearest_upstream_only():
    # Insert a nearer upstream source directly ahead; the far one must stop
    # mattering entirely.
    far = _state([100, B, 0])
    near = _state([30, B, 0])
    me = _state([0, 2 * B, 0])
    with_both = disturbance_at(2, [far, near, me], 0.0, _vortex_spec())
    near_only = disturbance_at(1, [near, me], 0.0, _vortex_spec())
    assert with_both.as_array() == pytest.approx(near_only.as_array(), rel=1e-12)


def test_vortex_strength_scales_with_circulation():
    states = [_state([60, 0, 0]), _state([0, B, 0])]
    d1 = disturbance_at(1, states, 0.0, _vortex_spec(circulation=100.0))
    d2 = disturbance_at(1, states, 0.0, _vortex_spec(circulation=200.0))
    assert d2.d_v == pytest.approx(2.0 * d1.d_v, rel=1e-12)


def test_vortex_pair_spacing_constant():
    assert VORTEX_SPAN_FACTOR == pytest.approx(math.pi / 4.0)


def test_spec_validation():
    with pytest.raises(ConfigError):
        DisturbanceSpec(kind="nosuch")
    with pytest.raises(ConfigError):
        DisturbanceSpec(kind="constant", constant=(1.0, 2.0))
    with pytest.raises(ConfigError):
        DisturbanceSpec(kind="zero", caps=(0.0, 1.0, 1.0))
    with pytest.raises(ConfigError):
        DisturbanceSpec(kind="ramp-saturating", ramp_time=0.0)
