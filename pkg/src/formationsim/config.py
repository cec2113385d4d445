"""Scenario file loading, validation and override handling.

Scenario files are YAML with nested sections.  Scalar values may be numeric
expressions such as ``pi/60`` so angular rates can be written the way they
are usually quoted.  Edges and vehicle indices are 1-based in files,
0-based in code.  Formation offsets are given in multiples of the wing span
by default.
"""

from __future__ import annotations

import math
import re
from importlib import resources

import numpy as np
import yaml

from .controller import ControllerGains
from .errors import ConfigError
from .graph import build_graph
from .planner import (
    CenterCommand,
    FilterGains,
    FormationCenterState,
    FormationLayout,
    Schedule,
)
from .sim import Scenario
from .vehicle import UavParams, UavState
from .wake import DisturbanceSpec

_EXPR_RE = re.compile(r"^[0-9pie+\-*/(). _]*$")
_EXPR_NAMES = {"pi": math.pi, "e": math.e}

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def parse_number(value, key: str = "") -> float:
    """Accept plain numbers or simple arithmetic expressions over pi and e."""
    if isinstance(value, bool):
        raise ConfigError("expected a number, got a boolean", key=key)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or not _EXPR_RE.match(text):
            raise ConfigError(f"cannot parse number {value!r}", key=key)
        try:
            out = eval(compile(text, "<config>", "eval"), {"__builtins__": {}}, _EXPR_NAMES)
        except Exception as err:
            raise ConfigError(f"cannot parse number {value!r}: {err}", key=key) from err
        if not isinstance(out, (int, float)):
            raise ConfigError(f"{value!r} is not numeric", key=key)
        return float(out)
    raise ConfigError(f"expected a number, got {type(value).__name__}", key=key)


def _triple(value, key: str) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError("expected a list of 3 values", key=key)
    return tuple(parse_number(v, key=f"{key}[{k}]") for k, v in enumerate(value))


def _section(cfg: dict, name: str) -> dict:
    sec = cfg.get(name)
    if not isinstance(sec, dict):
        raise ConfigError("missing or malformed section", key=name)
    return sec


def _schedule(raw, key: str) -> Schedule:
    if raw is None:
        return Schedule()
    if not isinstance(raw, list):
        raise ConfigError("schedule must be a list of [start, end, value]", key=key)
    segs = []
    for k, seg in enumerate(raw):
        if not isinstance(seg, (list, tuple)) or len(seg) != 3:
            raise ConfigError("segment must be [start, end, value]", key=f"{key}[{k}]")
        segs.append(tuple(parse_number(v, key=f"{key}[{k}]") for v in seg))
    try:
        return Schedule(tuple(segs))
    except ConfigError as err:
        raise ConfigError(str(err), key=key) from None


def _state6(raw, key: str):
    fields = ("x", "y", "z", "V", "gamma", "psi")
    if isinstance(raw, dict):
        extra = set(raw) - set(fields)
        if extra:
            raise ConfigError(f"unknown fields {sorted(extra)}", key=key)
        vals = [parse_number(raw.get(f, 0.0), key=f"{key}.{f}") for f in fields]
    elif isinstance(raw, (list, tuple)) and len(raw) == 6:
        vals = [parse_number(v, key=key) for v in raw]
    else:
        raise ConfigError("expected {x,y,z,V,gamma,psi} or a 6-list", key=key)
    return vals


def apply_override(cfg: dict, dotted: str, raw_value: str):
    """Apply one ``a.b.c=value`` override in place.

    Path components may be section names, 1-based list indices, or the axis
    letters x/y/z indexing a 3-list.
    """
    parts = dotted.split(".")
    node = cfg
    for depth, part in enumerate(parts[:-1]):
        node = _descend(node, part, ".".join(parts[: depth + 1]))
    leaf = parts[-1]
    try:
        value = yaml.safe_load(raw_value)
    except yaml.YAMLError:
        value = raw_value
    if isinstance(node, list):
        idx = _list_index(node, leaf, dotted)
        node[idx] = value
    elif isinstance(node, dict):
        node[leaf] = value
    else:
        raise ConfigError("cannot set a field on a scalar", key=dotted)


def _descend(node, part, key):
    if isinstance(node, dict):
        if part not in node:
            node[part] = {}
        return node[part]
    if isinstance(node, list):
        return node[_list_index(node, part, key)]
    raise ConfigError("cannot descend into a scalar", key=key)


def _list_index(node, part, key):
    if part in _AXIS_INDEX and len(node) == 3:
        return _AXIS_INDEX[part]
    try:
        idx = int(part)
    except ValueError:
        raise ConfigError(f"bad list index {part!r}", key=key) from None
    if not 1 <= idx <= len(node):
        raise ConfigError(f"index {idx} outside 1..{len(node)}", key=key)
    return idx - 1


def load_dict(path) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read scenario file: {err}") from err
    except yaml.YAMLError as err:
        raise ConfigError(f"scenario file is not valid YAML: {err}") from err
    if not isinstance(cfg, dict):
        raise ConfigError("scenario file must contain a mapping at top level")
    return cfg


def preset_path(name: str):
    """Filesystem path of a shipped preset, e.g. ``vshape5``."""
    p = resources.files("formationsim").joinpath("presets", f"{name}.cfg")
    if not p.is_file():
        raise ConfigError(f"no preset named {name!r}")
    return str(p)


def scenario_from_dict(cfg: dict) -> Scenario:
    uav = _section(cfg, "uav")
    params = UavParams(
        mass=parse_number(uav.get("mass"), key="uav.mass"),
        wing_area=parse_number(uav.get("wing_area"), key="uav.wing_area"),
        wing_span=parse_number(uav.get("wing_span"), key="uav.wing_span"),
        drag_coeff=parse_number(uav.get("drag_coeff"), key="uav.drag_coeff"),
        lift_bias=parse_number(uav.get("lift_bias", 0.0), key="uav.lift_bias"),
        lift_slope=parse_number(uav.get("lift_slope", 1.0), key="uav.lift_slope"),
        air_density=parse_number(uav.get("air_density", 1.225), key="uav.air_density"),
    )

    gsec = _section(cfg, "graph")
    n = gsec.get("n")
    if not isinstance(n, int) or n < 2:
        raise ConfigError("n must be an integer >= 2", key="graph.n")
    raw_edges = gsec.get("edges", [])
    if not isinstance(raw_edges, list):
        raise ConfigError("edges must be a list of [i, j] pairs", key="graph.edges")
    edges = []
    for k, e in enumerate(raw_edges):
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise ConfigError("edge must be a pair", key=f"graph.edges[{k}]")
        a, b = e
        if not all(isinstance(v, int) and 1 <= v <= n for v in (a, b)):
            raise ConfigError(
                f"edge {e} must use 1-based vehicle indices in 1..{n}",
                key=f"graph.edges[{k}]",
            )
        edges.append((a - 1, b - 1))
    graph = build_graph(n, edges)

    lsec = _section(cfg, "layout")
    raw_off = lsec.get("offsets")
    if not isinstance(raw_off, list) or len(raw_off) != n:
        raise ConfigError(f"offsets must list {n} rows", key="layout.offsets")
    units = lsec.get("units", "spans")
    if units == "spans":
        scale = params.wing_span
    elif units == "m":
        scale = 1.0
    else:
        raise ConfigError("units must be 'spans' or 'm'", key="layout.units")
    offsets = np.array(
        [_triple(row, key=f"layout.offsets[{k + 1}]") for k, row in enumerate(raw_off)]
    ) * scale
    layout = FormationLayout(offsets=offsets)

    csec = _section(cfg, "center")
    ci = _state6(csec.get("initial"), key="center.initial")
    center_initial = FormationCenterState(
        position=ci[0:3], speed=ci[3], path_angle=ci[4], heading=ci[5]
    )
    ssec = csec.get("schedule") or {}
    if not isinstance(ssec, dict):
        raise ConfigError("schedule must be a mapping", key="center.schedule")
    command = CenterCommand(
        accel=_schedule(ssec.get("accel"), "center.schedule.accel"),
        path_rate=_schedule(ssec.get("path_rate"), "center.schedule.path_rate"),
        heading_rate=_schedule(ssec.get("heading_rate"), "center.schedule.heading_rate"),
    )

    vsec = _section(cfg, "vehicles")
    raw_init = vsec.get("initial")
    if not isinstance(raw_init, list) or len(raw_init) != n:
        raise ConfigError(f"need {n} initial states", key="vehicles.initial")
    vehicle_initial = []
    for k, raw in enumerate(raw_init):
        v = _state6(raw, key=f"vehicles.initial[{k + 1}]")
        vehicle_initial.append(
            UavState(position=v[0:3], total_speed=v[3], path_angle=v[4], course_angle=v[5])
        )

    fsec = _section(cfg, "filter")
    filter_gains = FilterGains(
        kappa_p=_triple(fsec.get("kappa_p"), "filter.kappa_p"),
        kappa_v=_triple(fsec.get("kappa_v"), "filter.kappa_v"),
        c_p=_triple(fsec.get("c_p"), "filter.c_p"),
        c_v=_triple(fsec.get("c_v"), "filter.c_v"),
    )

    ksec = _section(cfg, "controller")
    controller_gains = ControllerGains(
        k_p=_triple(ksec.get("Kp"), "controller.Kp"),
        k_v=_triple(ksec.get("Kv"), "controller.Kv"),
        c_p=_triple(ksec.get("Cp"), "controller.Cp"),
        c_v=_triple(ksec.get("Cv"), "controller.Cv"),
    )

    usec = _section(cfg, "ude")
    tc = _triple(usec.get("time_constants"), "ude.time_constants")

    dsec = cfg.get("disturbance") or {"kind": "zero"}
    if not isinstance(dsec, dict):
        raise ConfigError("disturbance must be a mapping", key="disturbance")
    dkw = {}
    for fname in (
        "constant", "amplitude", "frequency", "phase", "caps", "rate_caps",
    ):
        if fname in dsec:
            dkw[fname] = _triple(dsec[fname], f"disturbance.{fname}")
    for fname in (
        "phase_step", "ramp_time", "circulation", "core_radius",
        "gain_v", "gain_gamma", "gain_psi",
    ):
        if fname in dsec:
            dkw[fname] = parse_number(dsec[fname], key=f"disturbance.{fname}")
    unknown = set(dsec) - set(dkw) - {"kind", "vortex_span"}
    if unknown:
        raise ConfigError(f"unknown fields {sorted(unknown)}", key="disturbance")
    disturbance = DisturbanceSpec(
        kind=dsec.get("kind", "zero"),
        vortex_span=parse_number(dsec.get("vortex_span", params.wing_span),
                                 key="disturbance.vortex_span"),
        **dkw,
    )

    simsec = cfg.get("sim") or {}
    if not isinstance(simsec, dict):
        raise ConfigError("sim must be a mapping", key="sim")

    return Scenario(
        name=str(cfg.get("name", "scenario")),
        params=params,
        graph=graph,
        layout=layout,
        center_initial=center_initial,
        command=command,
        vehicle_initial=vehicle_initial,
        filter_gains=filter_gains,
        controller_gains=controller_gains,
        ude_time_constants=np.asarray(tc),
        disturbance=disturbance,
        dt=parse_number(simsec.get("dt", 0.01), key="sim.dt"),
        duration=parse_number(simsec.get("duration", 120.0), key="sim.duration"),
    )


def load_scenario(path, overrides=None) -> tuple:
    """Parse, override and validate a scenario file.

    Returns (scenario, resolved config dict); the dict is what gets echoed
    next to the run outputs.
    """
    cfg = load_dict(path)
    for dotted, raw in overrides or []:
        apply_override(cfg, dotted, raw)
    return scenario_from_dict(cfg), cfg


def dump_resolved(cfg: dict, path):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=False)
