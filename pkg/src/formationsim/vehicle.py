"""Point-mass fixed-wing dynamics and exact control conversions.

State is (x, y, z, V_T, gamma, psi) in the NED inertial frame.  The outer
loop designs Cartesian accelerations; this module converts them to polar
rate commands and on to physical thrust/lift/bank, and evaluates the state
derivative given those actuators.  The conversions are exact algebraic
inverses of one another away from the vertical-flight singularity
cos(gamma) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnvelopeError, SingularityError
from .wake import PolarDisturbance

G = 9.81  # m/s^2

# cos(gamma) magnitudes below this are treated as singular.
COS_GAMMA_MIN = 1e-6


@dataclass(frozen=True)
class UavParams:
    mass: float               # kg
    wing_area: float          # m^2
    wing_span: float          # m
    drag_coeff: float
    lift_bias: float = 0.0    # N, zero-alpha lift
    lift_slope: float = 1.0   # N/rad
    air_density: float = 1.225  # kg/m^3

    def __post_init__(self):
        for name in ("mass", "wing_area", "wing_span", "lift_slope", "air_density"):
            if getattr(self, name) <= 0.0:
                raise EnvelopeError(f"UavParams.{name} must be positive")


@dataclass(frozen=True)
class UavState:
    position: np.ndarray      # m, (x, y, z) NED
    total_speed: float        # m/s
    path_angle: float         # rad
    course_angle: float       # rad

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))

    def velocity(self) -> np.ndarray:
        cg = math.cos(self.path_angle)
        return self.total_speed * np.array(
            [
                cg * math.cos(self.course_angle),
                cg * math.sin(self.course_angle),
                -math.sin(self.path_angle),
            ]
        )


@dataclass(frozen=True)
class PolarControls:
    u_v: float        # m/s^2
    u_gamma: float    # rad/s
    u_psi: float      # rad/s


@dataclass(frozen=True)
class CartesianControls:
    u_x: float
    u_y: float
    u_z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u_x, self.u_y, self.u_z])


@dataclass(frozen=True)
class ActuatorCommands:
    thrust: float   # N
    lift: float     # N
    bank: float     # rad
    alpha: float    # rad, diagnostic angle of attack


def _check_state(s: UavState):
    if s.total_speed <= 0.0:
        raise EnvelopeError(f"total speed must be positive, got {s.total_speed}")


def _cos_gamma(s: UavState) -> float:
    cg = math.cos(s.path_angle)
    if abs(cg) < COS_GAMMA_MIN:
        raise SingularityError(
            f"path angle {s.path_angle:.6f} rad too close to vertical flight"
        )
    return cg


def drag(s: UavState, p: UavParams) -> float:
    """Quadratic drag 0.5 rho V^2 S C_D."""
    _check_state(s)
    return 0.5 * p.air_density * s.total_speed**2 * p.wing_area * p.drag_coeff


def state_derivative(
    s: UavState, a: ActuatorCommands, d: PolarDisturbance, p: UavParams
) -> np.ndarray:
    """Time derivative (xdot, ydot, zdot, Vdot, gammadot, psidot)."""
    _check_state(s)
    cg = _cos_gamma(s)
    sg = math.sin(s.path_angle)
    cp = math.cos(s.course_angle)
    sp = math.sin(s.course_angle)
    v = s.total_speed
    m = p.mass
    return np.array(
        [
            v * cg * cp,
            v * cg * sp,
            -v * sg,
            (a.thrust - drag(s, p)) / m - G * sg + d.d_v,
            a.lift * math.cos(a.bank) / (m * v) - G * cg / v + d.d_gamma,
            a.lift * math.sin(a.bank) / (m * v * cg) + d.d_psi,
        ]
    )


def polar_to_cartesian(u: PolarControls, s: UavState) -> CartesianControls:
    _check_state(s)
    cg = math.cos(s.path_angle)
    sg = math.sin(s.path_angle)
    cp = math.cos(s.course_angle)
    sp = math.sin(s.course_angle)
    v = s.total_speed
    return CartesianControls(
        u_x=u.u_v * cg * cp - u.u_gamma * v * sg * cp - u.u_psi * v * cg * sp,
        u_y=u.u_v * cg * sp - u.u_gamma * v * sg * sp + u.u_psi * v * cg * cp,
        u_z=-u.u_v * sg - u.u_gamma * v * cg,
    )


def cartesian_to_polar(u: CartesianControls, s: UavState) -> PolarControls:
    """Exact inverse of :func:`polar_to_cartesian` away from the singularity."""
    _check_state(s)
    cg = _cos_gamma(s)
    sg = math.sin(s.path_angle)
    cp = math.cos(s.course_angle)
    sp = math.sin(s.course_angle)
    v = s.total_speed
    return PolarControls(
        u_v=u.u_x * cg * cp + u.u_y * cg * sp - u.u_z * sg,
        u_gamma=-(u.u_x * sg * cp + u.u_y * sg * sp + u.u_z * cg) / v,
        u_psi=(-u.u_x * sp + u.u_y * cp) / (v * cg),
    )


def polar_to_actuators(
    u: PolarControls, s: UavState, p: UavParams
) -> tuple[ActuatorCommands, bool]:
    """Physical (T, L, mu) realizing the polar rate commands.

    Negative commanded thrust is clamped to zero; the second return value
    flags that saturation so the caller can log it.
    """
    _check_state(s)
    cg = math.cos(s.path_angle)
    m = p.mass
    v = s.total_speed
    thrust = m * u.u_v + m * G * math.sin(s.path_angle) + drag(s, p)
    lat = m * v * u.u_psi * cg
    lon = m * v * u.u_gamma + m * G * cg
    lift = math.hypot(lon, lat)
    bank = math.atan2(lat, lon)
    saturated = thrust < 0.0
    if saturated:
        thrust = 0.0
    alpha = (lift - p.lift_bias) / p.lift_slope
    return ActuatorCommands(thrust=thrust, lift=lift, bank=bank, alpha=alpha), saturated


def actuators_to_polar(a: ActuatorCommands, s: UavState, p: UavParams) -> PolarControls:
    """Recover the polar rate commands realized by (T, L, mu)."""
    _check_state(s)
    cg = _cos_gamma(s)
    m = p.mass
    v = s.total_speed
    return PolarControls(
        u_v=(a.thrust - drag(s, p)) / m - G * math.sin(s.path_angle),
        u_gamma=a.lift * math.cos(a.bank) / (m * v) - G * cg / v,
        u_psi=a.lift * math.sin(a.bank) / (m * v * cg),
    )


def disturbance_to_cartesian(d: PolarDisturbance, s: UavState) -> np.ndarray:
    """Map the polar disturbance triple into Cartesian acceleration channels."""
    _check_state(s)
    cg = math.cos(s.path_angle)
    sg = math.sin(s.path_angle)
    cp = math.cos(s.course_angle)
    sp = math.sin(s.course_angle)
    v = s.total_speed
    return np.array(
        [
            d.d_v * cg * cp - d.d_gamma * v * sg * cp - d.d_psi * v * cg * sp,
            d.d_v * cg * sp - d.d_gamma * v * sg * sp + d.d_psi * v * cg * cp,
            -d.d_v * sg - d.d_gamma * v * cg,
        ]
    )
