"""Rigid-formation reference generation and the cooperative reference filter.

The whole formation is treated as one rigid shape.  A kinematic navigation
model moves the shape's geometric center; each vehicle's raw reference is a
constant horizontal offset from that center, rotated by the center heading.
The raw references are then passed through a bank of graph-coupled
second-order filters that smooth them into trackable virtual-leader states.

The reference acceleration deliberately omits the angular-acceleration term
(the scheduled rates are piecewise constant, so that term is an impulse at
the breakpoints); the resulting transient oscillations at rate switches are
an expected artifact, not a bug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import FormationGraph, laplacian


@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant signal: value of the first [start, end) segment
    containing t, zero outside all segments."""

    segments: tuple = ()   # of (start, end, value)

    def __post_init__(self):
        segs = tuple((float(a), float(b), float(v)) for a, b, v in self.segments)
        for a, b, _ in segs:
            if b <= a:
                raise ConfigError(f"schedule segment [{a}, {b}) is empty or reversed")
        object.__setattr__(self, "segments", segs)

    def value_at(self, t: float) -> float:
        for a, b, v in self.segments:
            if a <= t < b:
                return v
        return 0.0

    def breakpoints(self) -> list:
        pts = set()
        for a, b, _ in self.segments:
            pts.update((a, b))
        return sorted(pts)


@dataclass(frozen=True)
class FormationCenterState:
    position: np.ndarray   # m, NED
    speed: float           # m/s
    path_angle: float      # rad
    heading: float         # rad

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        if self.speed <= 0.0:
            raise ConfigError("formation center speed must be positive")


@dataclass(frozen=True)
class CenterCommand:
    accel: Schedule = Schedule()
    path_rate: Schedule = Schedule()
    heading_rate: Schedule = Schedule()

    def rates_at(self, t: float) -> tuple:
        return (
            self.accel.value_at(t),
            self.path_rate.value_at(t),
            self.heading_rate.value_at(t),
        )

    def breakpoints(self) -> list:
        pts = set()
        for s in (self.accel, self.path_rate, self.heading_rate):
            pts.update(s.breakpoints())
        return sorted(pts)


@dataclass(frozen=True)
class FormationLayout:
    """Constant per-vehicle offsets in the center's heading-fixed frame."""

    offsets: np.ndarray    # (n, 3) m

    def __post_init__(self):
        o = np.asarray(self.offsets, dtype=float)
        if o.ndim != 2 or o.shape[1] != 3:
            raise ConfigError("layout offsets must be an (n, 3) array")
        object.__setattr__(self, "offsets", o)

    @property
    def n(self) -> int:
        return self.offsets.shape[0]


@dataclass(frozen=True)
class VirtualLeaderRef:
    r: np.ndarray
    r_dot: np.ndarray
    r_ddot: np.ndarray


@dataclass(frozen=True)
class FilterState:
    r_hat: np.ndarray
    v_hat: np.ndarray


@dataclass(frozen=True)
class FilterGains:
    """Diagonal entries of the four positive definite 3x3 gain matrices."""

    kappa_p: np.ndarray
    kappa_v: np.ndarray
    c_p: np.ndarray
    c_v: np.ndarray

    def __post_init__(self):
        for name in ("kappa_p", "kappa_v", "c_p", "c_v"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or np.any(v <= 0.0):
                raise ConfigError(f"filter gain {name} must be 3 positive entries")
            object.__setattr__(self, name, v)


def heading_rotation(psi: float) -> np.ndarray:
    """Inertial-to-body rotation about the down axis."""
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def omega_cross(heading_rate: float) -> np.ndarray:
    return np.array(
        [[0.0, -heading_rate, 0.0], [heading_rate, 0.0, 0.0], [0.0, 0.0, 0.0]]
    )


def center_velocity(s: FormationCenterState) -> np.ndarray:
    cg = math.cos(s.path_angle)
    return s.speed * np.array(
        [cg * math.cos(s.heading), cg * math.sin(s.heading), -math.sin(s.path_angle)]
    )


def center_derivative(s: FormationCenterState, cmd: CenterCommand, t: float) -> np.ndarray:
    """(xdot, ydot, zdot, Vdot, gammadot, psidot) of the navigation model."""
    a_v, a_g, a_p = cmd.rates_at(t)
    vel = center_velocity(s)
    return np.array([vel[0], vel[1], vel[2], a_v, a_g, a_p])


def center_accel(s: FormationCenterState, rates: tuple) -> np.ndarray:
    """Analytic second derivative of the center position.

    Exact between schedule breakpoints because the rates are constant there.
    """
    a_v, a_g, a_p = rates
    cg, sg = math.cos(s.path_angle), math.sin(s.path_angle)
    cp, sp = math.cos(s.heading), math.sin(s.heading)
    v = s.speed
    return np.array(
        [
            a_v * cg * cp - a_g * v * sg * cp - a_p * v * cg * sp,
            a_v * cg * sp - a_g * v * sg * sp + a_p * v * cg * cp,
            -a_v * sg - a_g * v * cg,
        ]
    )


def leader_refs(
    s: FormationCenterState, rates: tuple, layout: FormationLayout
) -> list[VirtualLeaderRef]:
    """Raw reference triples (r, rdot, rddot) for every vehicle.

    rddot keeps only the centripetal rotation term; see module docstring.
    """
    rot_t = heading_rotation(s.heading).T
    w = omega_cross(rates[2])
    r_c = s.position
    v_c = center_velocity(s)
    a_c = center_accel(s, rates)
    refs = []
    for p_r in layout.offsets:
        wp = w @ p_r
        refs.append(
            VirtualLeaderRef(
                r=r_c + rot_t @ p_r,
                r_dot=v_c + rot_t @ wp,
                r_ddot=a_c + rot_t @ (w @ wp),
            )
        )
    return refs


def filter_step_derivative(
    states: list[FilterState],
    refs: list[VirtualLeaderRef],
    g: FormationGraph,
    gains: FilterGains,
) -> list[tuple]:
    """Derivatives (r_hat_dot, v_hat_dot) of every cooperative filter."""
    n = len(states)
    e_p = [states[i].r_hat - refs[i].r for i in range(n)]
    e_v = [states[i].v_hat - refs[i].r_dot for i in range(n)]
    out = []
    for i in range(n):
        coupling = np.zeros(3)
        for j in g.neighbors(i):
            coupling += gains.c_p * (e_p[i] - e_p[j]) + gains.c_v * (e_v[i] - e_v[j])
        v_hat_dot = (
            refs[i].r_ddot - gains.kappa_p * e_p[i] - gains.kappa_v * e_v[i] - coupling
        )
        out.append((states[i].v_hat.copy(), v_hat_dot))
    return out


def filter_error_matrix(g: FormationGraph, gains: FilterGains) -> np.ndarray:
    """System matrix of the stacked filter error dynamics (6n x 6n).

    [[0, I], [-(I (x) kp + L (x) cp), -(I (x) kv + L (x) cv)]]; Hurwitz for
    any connected graph and positive gains.
    """
    n = g.n
    lap = laplacian(g)
    eye = np.eye(n)
    p_blk = np.kron(eye, np.diag(gains.kappa_p)) + np.kron(lap, np.diag(gains.c_p))
    v_blk = np.kron(eye, np.diag(gains.kappa_v)) + np.kron(lap, np.diag(gains.c_v))
    top = np.hstack([np.zeros((3 * n, 3 * n)), np.eye(3 * n)])
    bot = np.hstack([-p_blk, -v_blk])
    return np.vstack([top, bot])
