"""Synthetic lumped-disturbance generators for the polar velocity channels.

Each vehicle sees a disturbance triple (d_V, d_gamma, d_psi) acting on its
speed, path-angle and course-angle dynamics.  Real wake aerodynamics are out
of scope; this module supplies deterministic parametric stand-ins that keep
the properties the control analysis needs (bounded signals with bounded
derivatives) plus a simplified trailing-vortex model that lets trailing
vehicles pick up a thrust-saving speed-up when they sit near the usual
upwash sweet spots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# Standard elliptic-loading spacing of the rolled-up tip-vortex pair.
VORTEX_SPAN_FACTOR = math.pi / 4.0

_KINDS = ("zero", "constant", "sinusoid", "ramp-saturating", "horseshoe-vortex")


@dataclass(frozen=True)
class PolarDisturbance:
    """Lumped disturbance in the speed / path-angle / course-angle channels."""

    d_v: float = 0.0        # m/s^2
    d_gamma: float = 0.0    # rad/s
    d_psi: float = 0.0      # rad/s

    def as_array(self) -> np.ndarray:
        return np.array([self.d_v, self.d_gamma, self.d_psi])


@dataclass(frozen=True)
class DisturbanceSpec:
    """Full description of one disturbance generator.

    amplitude/frequency/phase are per-channel triples in the channel units
    (m/s^2, rad/s, rad/s for amplitudes).  ``phase_step`` adds i*phase_step
    to vehicle i's phase so a shared sinusoid spec can still differ across
    vehicles.  caps are absolute per-channel bounds always applied to the
    output; rate_caps document the corresponding derivative bounds for the
    smooth kinds (checked by the property suites, not enforced pointwise).
    """

    kind: str = "zero"
    constant: tuple = (0.0, 0.0, 0.0)
    amplitude: tuple = (0.0, 0.0, 0.0)
    frequency: tuple = (0.0, 0.0, 0.0)       # rad/s
    phase: tuple = (0.0, 0.0, 0.0)
    phase_step: float = 0.0                  # per-vehicle phase increment
    ramp_time: float = 1.0                   # s, saturation time constant
    circulation: float = 144.0               # m^2/s, per trailing vehicle pair
    core_radius: float = 2.0                 # m, finite vortex core
    vortex_span: float = 9.144               # m, generating wing span
    gain_v: float = 1.0                      # scaling of the speed channel pickup
    gain_gamma: float = 1.0
    gain_psi: float = 1.0
    caps: tuple = (10.0, 1.0, 1.0)
    rate_caps: tuple = (10.0, 1.0, 1.0)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown disturbance kind {self.kind!r}", key="disturbance.kind")
        for name in ("constant", "amplitude", "frequency", "phase", "caps", "rate_caps"):
            v = tuple(float(x) for x in getattr(self, name))
            if len(v) != 3:
                raise ConfigError(f"{name} must have 3 entries", key=f"disturbance.{name}")
            object.__setattr__(self, name, v)
        if any(c <= 0.0 for c in self.caps):
            raise ConfigError("caps must be positive", key="disturbance.caps")
        if self.ramp_time <= 0.0:
            raise ConfigError("ramp_time must be positive", key="disturbance.ramp_time")
        if self.core_radius <= 0.0:
            raise ConfigError("core_radius must be positive", key="disturbance.core_radius")


def disturbance_at(i, states, t, spec: DisturbanceSpec) -> PolarDisturbance:
    """Evaluate the configured generator for vehicle i at time t.

    ``states`` is the full list of vehicle states; only the vortex kind
    looks at anything beyond vehicle i.
    """
    if spec.kind == "zero":
        return PolarDisturbance()
    if spec.kind == "constant":
        d = spec.constant
    elif spec.kind == "sinusoid":
        d = tuple(
            a * math.sin(w * t + p + i * spec.phase_step)
            for a, w, p in zip(spec.amplitude, spec.frequency, spec.phase)
        )
    elif spec.kind == "ramp-saturating":
        s = 1.0 - math.exp(-t / spec.ramp_time)
        d = tuple(a * s for a in spec.amplitude)
    else:
        d = _vortex_triple(i, states, spec)
    d = tuple(min(max(x, -c), c) for x, c in zip(d, spec.caps))
    return PolarDisturbance(*d)


def _velocity(s) -> np.ndarray:
    cg = math.cos(s.path_angle)
    return s.total_speed * np.array(
        [cg * math.cos(s.course_angle), cg * math.sin(s.course_angle), -math.sin(s.path_angle)]
    )


def _vortex_triple(i, states, spec: DisturbanceSpec):
    """Induced-flow pickup from the nearest upstream vehicle's trailing pair.

    Only the closest vehicle with positive along-track separation
    contributes (dominant-wake approximation); the formation apex therefore
    receives nothing.  The induced upwash/sidewash are converted into
    channel disturbances with simple lift-tilt scalings.
    """
    me = states[i]
    vel = _velocity(me)
    speed = float(np.linalg.norm(vel))
    if speed <= 0.0:
        return (0.0, 0.0, 0.0)
    fwd = vel / speed

    upstream = None
    best = math.inf
    pos_i = np.asarray(me.position, dtype=float)
    for j, other in enumerate(states):
        if j == i:
            continue
        sep = float(np.dot(np.asarray(other.position, dtype=float) - pos_i, fwd))
        if sep > 1.0 and sep < best:
            best = sep
            upstream = other
    if upstream is None:
        return (0.0, 0.0, 0.0)

    induced = _horseshoe_induced_velocity(
        pos_i,
        np.asarray(upstream.position, dtype=float),
        _velocity(upstream),
        spec,
    )
    # NED: upwash is negative z velocity.
    upwash = -induced[2]
    g = 9.81
    v = me.total_speed
    side = float(np.dot(induced, np.array([-fwd[1], fwd[0], 0.0])))
    d_v = spec.gain_v * g * upwash / v
    d_gamma = spec.gain_gamma * g * upwash / v**2
    d_psi = spec.gain_psi * g * side / v**2
    return (d_v, d_gamma, d_psi)


def _horseshoe_induced_velocity(point, leader_pos, leader_vel, spec: DisturbanceSpec):
    """Velocity induced at ``point`` by the leader's horseshoe system.

    Bound segment across the rolled-up pair plus two semi-infinite trailing
    filaments, each with a finite viscous core.  Degenerates to zero when
    the leader flies vertically (no lateral axis defined).
    """
    speed = float(np.linalg.norm(leader_vel))
    if speed <= 0.0:
        return np.zeros(3)
    fwd = leader_vel / speed
    lateral = np.cross(np.array([0.0, 0.0, 1.0]), fwd)
    lat_norm = float(np.linalg.norm(lateral))
    if lat_norm < 1e-9:
        return np.zeros(3)
    lateral = lateral / lat_norm

    b_eff = VORTEX_SPAN_FACTOR * spec.vortex_span
    left = leader_pos - 0.5 * b_eff * lateral
    right = leader_pos + 0.5 * b_eff * lateral
    far = 5.0e4
    gamma = spec.circulation
    rc = spec.core_radius
    v = np.zeros(3)
    # Upward lift with the freestream opposite the flight direction puts the
    # bound circulation left-to-right: downwash between the tips, upwash
    # outboard of them.
    v += _segment_induced(point, left, right, gamma, rc)            # bound vortex
    v += _segment_induced(point, left - far * fwd, left, gamma, rc)   # left trailer
    v += _segment_induced(point, right, right - far * fwd, gamma, rc)  # right trailer
    return v


def _segment_induced(p, a, b, gamma, core_radius):
    """Straight-filament Biot-Savart with a Lamb-Oseen core factor."""
    r1 = p - a
    r2 = p - b
    cross = np.cross(r1, r2)
    cross_sq = float(np.dot(cross, cross))
    n1 = float(np.linalg.norm(r1))
    n2 = float(np.linalg.norm(r2))
    if n1 < 1e-9 or n2 < 1e-9 or cross_sq < 1e-18:
        return np.zeros(3)
    r0 = b - a
    k = gamma / (4.0 * math.pi * cross_sq) * (
        float(np.dot(r0, r1)) / n1 - float(np.dot(r0, r2)) / n2
    )
    # Perpendicular distance from p to the segment's carrier line.
    h_sq = cross_sq / float(np.dot(r0, r0))
    core = 1.0 - math.exp(-h_sq / core_radius**2)
    return k * core * cross
