"""Per-vehicle robust cooperative control.

Three pieces: a graph-coupled PD baseline with reference-acceleration
feedforward, a first-order uncertainty and disturbance estimator realized in
integral form, and the composite command that subtracts the estimate from
the baseline.  A modal diagnostic decomposes the closed-loop error dynamics
along the Laplacian eigenvectors into independent 2x2 systems.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, GraphError
from .graph import FormationGraph, is_connected, laplacian
from .vehicle import CartesianControls


@dataclass(frozen=True)
class ControllerGains:
    """Diagonal entries of K_p, K_v (tracking) and C_p, C_v (cooperation)."""

    k_p: np.ndarray
    k_v: np.ndarray
    c_p: np.ndarray
    c_v: np.ndarray

    def __post_init__(self):
        for name in ("k_p", "k_v"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or np.any(v <= 0.0):
                raise ConfigError(f"controller gain {name} must be 3 positive entries")
            object.__setattr__(self, name, v)
        for name in ("c_p", "c_v"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or np.any(v < 0.0):
                raise ConfigError(f"controller gain {name} must be 3 nonnegative entries")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class TrackingErrors:
    e_p: np.ndarray   # m, vehicle position minus filtered reference
    e_v: np.ndarray   # m/s


@dataclass(frozen=True)
class UdeState:
    """Running state of one vehicle's disturbance estimator.

    The estimate is (v(t) - v(0) - integral of u0) / T per axis, which is
    identically zero at start (the required initial condition).
    """

    time_constants: np.ndarray   # s, per axis
    v0: np.ndarray               # m/s, velocity at estimator start
    u0_integral: np.ndarray      # m/s, accumulated baseline command

    def __post_init__(self):
        tc = np.asarray(self.time_constants, dtype=float)
        if tc.shape != (3,) or np.any(tc <= 0.0):
            raise ConfigError("UDE time constants must be 3 positive entries")
        object.__setattr__(self, "time_constants", tc)
        object.__setattr__(self, "v0", np.asarray(self.v0, dtype=float))
        object.__setattr__(self, "u0_integral", np.asarray(self.u0_integral, dtype=float))


def baseline_control(
    i: int,
    errors: list[TrackingErrors],
    ref_accel: np.ndarray,
    g: FormationGraph,
    gains: ControllerGains,
) -> CartesianControls:
    """Feedforward + PD + neighbor-coupled correction for vehicle i."""
    e = errors[i]
    u = ref_accel - gains.k_p * e.e_p - gains.k_v * e.e_v
    for j in g.neighbors(i):
        u = u - gains.c_p * (e.e_p - errors[j].e_p) - gains.c_v * (e.e_v - errors[j].e_v)
    return CartesianControls(u[0], u[1], u[2])


def ude_estimate(st: UdeState, v_now: np.ndarray) -> np.ndarray:
    """Current disturbance estimate from the velocity/command histories."""
    return (np.asarray(v_now, dtype=float) - st.v0 - st.u0_integral) / st.time_constants


def composite_control(u0: CartesianControls, d_hat: np.ndarray) -> CartesianControls:
    return CartesianControls(u0.u_x - d_hat[0], u0.u_y - d_hat[1], u0.u_z - d_hat[2])


def ude_update(
    st: UdeState,
    u0: CartesianControls,
    dt: float,
    u0_mid: CartesianControls | None = None,
    u0_end: CartesianControls | None = None,
) -> UdeState:
    """Advance the command integral over one step.

    With only the start sample the command is treated as constant (exact in
    that case).  With mid and end samples a Simpson rule is applied, which
    matches the accuracy order of the main integrator on smooth commands.
    In the simulation loop the integral rides the global state vector
    instead, so all quantities share the same quadrature stages; this
    standalone update exists for isolated estimator use.
    """
    if dt <= 0.0:
        raise ConfigError("ude_update requires dt > 0")
    if u0_mid is None or u0_end is None:
        inc = u0.as_array() * dt
    else:
        inc = (u0.as_array() + 4.0 * u0_mid.as_array() + u0_end.as_array()) * (dt / 6.0)
    return replace(st, u0_integral=st.u0_integral + inc)


@dataclass(frozen=True)
class ErrorMode:
    """One decoupled closed-loop error channel.

    dc_gain is the steady amplification from a constant estimation error to
    the position error, 1 / (K_p + lambda C_p), read off the 2x2 system
    matrix.  dc_gain_alt uses the swapped coefficient ordering
    1 / (K_v + lambda C_v); both shrink when the cooperative gains act on a
    positive Laplacian eigenvalue.
    """

    eigenvalue: float
    axis: str
    a_matrix: np.ndarray
    dc_gain: float
    dc_gain_alt: float

    @property
    def hurwitz(self) -> bool:
        return bool(np.all(np.linalg.eigvals(self.a_matrix).real < 0.0))


AXES = ("x", "y", "z")


def modal_decomposition(g: FormationGraph, gains: ControllerGains) -> list[ErrorMode]:
    """Per-mode, per-axis 2x2 error systems along the Laplacian spectrum.

    The orthogonal diagonalization fixes the first eigenvector to the
    normalized all-ones vector (eigenvalue 0).
    """
    if not is_connected(g):
        raise GraphError("modal decomposition requires a connected graph")
    lam, q = np.linalg.eigh(laplacian(g))
    lam = lam.copy()
    lam[0] = 0.0
    q[:, 0] = 1.0 / np.sqrt(g.n)
    modes = []
    for lam_i in lam:
        for ax, kp, kv, cp, cv in zip(AXES, gains.k_p, gains.k_v, gains.c_p, gains.c_v):
            a = np.array([[0.0, 1.0], [-(kp + lam_i * cp), -(kv + lam_i * cv)]])
            mode = ErrorMode(
                eigenvalue=float(lam_i),
                axis=ax,
                a_matrix=a,
                dc_gain=1.0 / (kp + lam_i * cp),
                dc_gain_alt=1.0 / (kv + lam_i * cv),
            )
            if not mode.hurwitz:
                raise ConfigError(
                    f"error mode (lambda={lam_i:.6g}, axis={ax}) is not Hurwitz"
                )
            modes.append(mode)
    return modes


def closed_loop_error_matrix(g: FormationGraph, gains: ControllerGains) -> np.ndarray:
    """Stacked 6n x 6n tracking-error system matrix (disturbance-free part)."""
    n = g.n
    lap = laplacian(g)
    eye = np.eye(n)
    p_blk = np.kron(eye, np.diag(gains.k_p)) + np.kron(lap, np.diag(gains.c_p))
    v_blk = np.kron(eye, np.diag(gains.k_v)) + np.kron(lap, np.diag(gains.c_v))
    top = np.hstack([np.zeros((3 * n, 3 * n)), np.eye(3 * n)])
    bot = np.hstack([-p_blk, -v_blk])
    return np.vstack([top, bot])
