"""Randomized property suites behind the `check` command.

Every suite returns a list of (name, passed, detail) triples.  Seeds are
fixed so results are reproducible run to run.
"""

from __future__ import annotations

import math

import numpy as np

from . import controller, vehicle
from .controller import ControllerGains
from .graph import (
    FormationGraph,
    PinningMatrix,
    build_graph,
    coupling_min_eigenvalue,
    is_connected,
    laplacian,
)
from .planner import FilterGains, filter_error_matrix
from .vehicle import CartesianControls, PolarControls, UavParams, UavState

SUITES = ("graph", "filter", "ude", "conversions", "closedloop", "all")

_PARAMS = UavParams(
    mass=9295.44, wing_area=27.87, wing_span=9.144, drag_coeff=0.0794,
    lift_slope=738845.0, air_density=0.7364,
)


def random_connected_graph(rng, n: int) -> FormationGraph:
    """Random spanning tree plus random extra edges; always connected."""
    order = rng.permutation(n)
    edges = [(int(order[k]), int(order[int(rng.integers(k))])) for k in range(1, n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                edges.append((i, j))
    return build_graph(n, edges)


def check_graph(cases: int = 1000, seed: int = 7) -> list:
    """Laplacian spectrum and pinned-coupling positive definiteness."""
    rng = np.random.default_rng(seed)
    worst_zero = 0.0
    worst_fiedler = math.inf
    worst_coupled = math.inf
    for _ in range(cases):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(rng, n)
        lam = np.linalg.eigvalsh(laplacian(g))
        worst_zero = max(worst_zero, abs(float(lam[0])))
        worst_fiedler = min(worst_fiedler, float(lam[1]))
        diag = np.where(rng.random(n) < 0.5, rng.uniform(0.1, 2.0, n), 0.0)
        diag[int(rng.integers(n))] = rng.uniform(0.1, 2.0)
        c1 = rng.uniform(0.1, 3.0, 3)
        c2 = rng.uniform(0.1, 3.0, 3)
        worst_coupled = min(
            worst_coupled,
            coupling_min_eigenvalue(g, PinningMatrix(diag), c1, c2),
        )
    return [
        (
            "laplacian zero eigenvalue",
            worst_zero <= 1e-9,
            f"max |lambda_min(L)| = {worst_zero:.3e} over {cases} graphs",
        ),
        (
            "connectivity eigenvalue positive",
            worst_fiedler > 0.0,
            f"min lambda_2 = {worst_fiedler:.3e}",
        ),
        (
            "pinned coupling positive definite",
            worst_coupled > 1e-9,
            f"min lambda_min(L x C1 + B x C2) = {worst_coupled:.3e}",
        ),
    ]


def _preset_filter_gains() -> FilterGains:
    return FilterGains(
        kappa_p=(1.0, 1.0, 1.0), kappa_v=(2.5, 2.5, 2.5),
        c_p=(1.25, 1.25, 1.25), c_v=(0.5, 0.5, 0.5),
    )


def _preset_graph() -> FormationGraph:
    return build_graph(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])


def check_filter(cases: int = 100, seed: int = 11) -> list:
    """Stacked cooperative-filter error dynamics are exponentially stable."""
    rng = np.random.default_rng(seed)
    worst = -math.inf

    def max_real(g, gains):
        return float(np.linalg.eigvals(filter_error_matrix(g, gains)).real.max())

    worst = max(worst, max_real(_preset_graph(), _preset_filter_gains()))
    preset_ok = worst < 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(rng, n)
        gains = FilterGains(
            kappa_p=rng.uniform(0.1, 3.0, 3),
            kappa_v=rng.uniform(0.1, 3.0, 3),
            c_p=rng.uniform(0.1, 3.0, 3),
            c_v=rng.uniform(0.1, 3.0, 3),
        )
        worst = max(worst, max_real(g, gains))
    return [
        (
            "filter error matrix Hurwitz (nominal gains)",
            preset_ok,
            "stacked system max Re(eig) < 0",
        ),
        (
            "filter error matrix Hurwitz (random draws)",
            worst < 0.0,
            f"max Re(eig) = {worst:.4e} over {cases} draws",
        ),
    ]


def _simulate_ude_error(d_fun, t_end: float, tc: float, dt: float = 1e-3):
    """Closed estimation loop on one velocity channel: vdot = u0 - dhat + d.

    Returns max |d - dhat| over the run and the terminal value.
    """
    steps = int(round(t_end / dt))
    v = 0.0
    integ = 0.0   # integral of the applied baseline command (zero here)
    max_err = abs(d_fun(0.0))
    for k in range(steps):
        t = k * dt

        def deriv(tt, vv, ii):
            d_hat = (vv - ii) / tc
            return -d_hat + d_fun(tt), 0.0

        k1v, k1i = deriv(t, v, integ)
        k2v, k2i = deriv(t + dt / 2, v + dt / 2 * k1v, integ + dt / 2 * k1i)
        k3v, k3i = deriv(t + dt / 2, v + dt / 2 * k2v, integ + dt / 2 * k2i)
        k4v, k4i = deriv(t + dt, v + dt * k3v, integ + dt * k3i)
        v += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        integ += dt / 6 * (k1i + 2 * k2i + 2 * k3i + k4i)
        err = abs(d_fun(t + dt) - (v - integ) / tc)
        max_err = max(max_err, err)
    return max_err, err


def check_ude(tc: float = 0.2) -> list:
    """Estimator error stays inside max{|d(0)|, T * sup|ddot|} and vanishes
    for constant disturbances."""
    out = []
    for amp in (0.1, 1.0):
        for omega in (0.5, 2.0):
            bound = max(0.0, tc * amp * omega)
            max_err, _ = _simulate_ude_error(
                lambda t, a=amp, w=omega: a * math.sin(w * t), 20.0, tc
            )
            out.append(
                (
                    f"sinusoid bound (A={amp}, w={omega})",
                    max_err <= bound + 1e-3,
                    f"max |d~| = {max_err:.5f}, bound = {bound:.5f}",
                )
            )
    _, term = _simulate_ude_error(lambda t: 0.7, 8.0, tc)
    out.append(
        (
            "constant disturbance terminal error",
            abs(term) < 1e-4,
            f"|d~(8 s)| = {abs(term):.2e}",
        )
    )
    return out


def check_conversions(cases: int = 10_000, seed: int = 13) -> list:
    """Acceleration-frame roundtrips and actuator reconstruction are exact."""
    rng = np.random.default_rng(seed)
    worst_rt = 0.0
    worst_act = 0.0
    for _ in range(cases):
        s = UavState(
            position=rng.uniform(-1000, 1000, 3),
            total_speed=rng.uniform(60.0, 200.0),
            path_angle=rng.uniform(-1.2, 1.2),
            course_angle=rng.uniform(-math.pi, math.pi),
        )
        u_cart = CartesianControls(*rng.uniform(-20.0, 20.0, 3))
        back = vehicle.polar_to_cartesian(vehicle.cartesian_to_polar(u_cart, s), s)
        worst_rt = max(
            worst_rt, float(np.max(np.abs(back.as_array() - u_cart.as_array())))
        )
        u_pol = PolarControls(
            rng.uniform(-20.0, 20.0), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)
        )
        act, sat = vehicle.polar_to_actuators(u_pol, s, _PARAMS)
        if sat:
            continue
        rec = vehicle.actuators_to_polar(act, s, _PARAMS)
        worst_act = max(
            worst_act,
            abs(rec.u_v - u_pol.u_v),
            abs(rec.u_gamma - u_pol.u_gamma),
            abs(rec.u_psi - u_pol.u_psi),
        )
    return [
        (
            "cartesian/polar roundtrip",
            worst_rt < 1e-9,
            f"max |error| = {worst_rt:.3e} over {cases} states",
        ),
        (
            "actuator reconstruction",
            worst_act < 1e-9,
            f"max |error| = {worst_act:.3e}",
        ),
    ]


def check_closedloop(seed: int = 17) -> list:
    """Tracking error modes are stable; cooperation shrinks every coupled
    mode's steady gain."""
    g = _preset_graph()
    gains = ControllerGains(
        k_p=(0.25, 0.4, 0.3), k_v=(1.5, 1.75, 1.75),
        c_p=(0.15, 0.15, 0.15), c_v=(0.55, 0.55, 0.55),
    )
    modes = controller.modal_decomposition(g, gains)
    hurwitz = all(m.hurwitz for m in modes)
    stacked = controller.closed_loop_error_matrix(g, gains)
    stacked_max = float(np.linalg.eigvals(stacked).real.max())

    off = ControllerGains(k_p=gains.k_p, k_v=gains.k_v,
                          c_p=(0.0,) * 3, c_v=(0.0,) * 3)
    modes_off = controller.modal_decomposition(g, off)
    reduced = all(
        m.dc_gain < m0.dc_gain and m.dc_gain_alt < m0.dc_gain_alt
        for m, m0 in zip(modes, modes_off)
        if m.eigenvalue > 1e-9
    )
    return [
        ("per-mode error systems Hurwitz", hurwitz, f"{len(modes)} modes"),
        (
            "stacked error matrix Hurwitz",
            stacked_max < 0.0,
            f"max Re(eig) = {stacked_max:.4e}",
        ),
        (
            "cooperation reduces steady gain (both orderings)",
            reduced,
            "every coupled mode, nominal gains",
        ),
    ]


def run_suite(name: str) -> list:
    if name == "graph":
        return check_graph()
    if name == "filter":
        return check_filter()
    if name == "ude":
        return check_ude()
    if name == "conversions":
        return check_conversions()
    if name == "closedloop":
        return check_closedloop()
    if name == "all":
        out = []
        for sub in ("graph", "filter", "ude", "conversions", "closedloop"):
            out.extend((f"{sub}: {n}", ok, d) for n, ok, d in run_suite(sub))
        return out
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
