"""Scenario files: schema, validation, and object construction.

Scenarios are JSON.  Unknown keys anywhere are rejected (fail closed), so
a typo cannot silently fall back to a default.  All randomness (the target
jitter option) is driven by the explicit 64-bit ``seed``.
"""

import json
import math

import numpy as np

from .constants import EARTH_MU, EARTH_RADIUS, EARTH_ROTATION_RATE
from .echo import PointTarget, RadarParams
from .geometry import (EarthModel, GroundPoint, build_imaging_frame,
                       generate_orbit, load_trajectory_file, u_from_r)
from .mocomp import SceneReference


class ScenarioError(ValueError):
    """Invalid scenario content; maps to CLI exit code 2."""


MODES = ("sga_low", "sga_high", "bp")

_SCHEMA = {
    "name": str,
    "seed": int,
    "earth": {"radius_m": float, "rotation_rate_rad_s": float},
    "radar": {"fc_hz": float, "bandwidth_hz": float, "pulse_s": float,
              "sample_rate_hz": float},
    "orbit": {"type": str, "altitude_m": float, "duration_s": float,
              "prf_hz": float, "earth_rotation": bool,
              "inclination_deg": float, "center_latitude_deg": float,
              "mu_m3_s2": float, "path": str, "center_index": int},
    "scene": {"reference_range_m": float, "center_x_m": float,
              "center_y_m": float, "jitter_m": float,
              "targets": [{"dx_m": float, "dy_m": float,
                           "amplitude_re": float, "amplitude_im": float}]},
    "processing": {"mode": str, "mocomp": str, "n_fast": int,
                   "gate_pad_samples": int, "pad_factor": int,
                   "weighting": str, "n_image_x": int, "n_image_y": int,
                   "bp_nx": int, "bp_ny": int,
                   "bp_extent_x_m": float, "bp_extent_y_m": float},
    "output": {"dir": str, "png_dynamic_db": float,
               "keep_intermediates": bool},
}

_DEFAULTS = {
    "seed": 0,
    "earth": {"radius_m": EARTH_RADIUS, "rotation_rate_rad_s": EARTH_ROTATION_RATE},
    "orbit": {"type": "circular", "earth_rotation": True,
              "inclination_deg": 90.0, "center_latitude_deg": 0.0,
              "mu_m3_s2": EARTH_MU},
    "scene": {"jitter_m": 0.0},
    "processing": {"mode": "sga_low", "mocomp": "auto", "gate_pad_samples": 64,
                   "pad_factor": 2, "weighting": "none"},
    "output": {"dir": "runs", "png_dynamic_db": 40.0,
               "keep_intermediates": False},
}


def _check_keys(cfg, schema, path):
    if not isinstance(cfg, dict):
        raise ScenarioError(f"{path or 'scenario'}: expected an object")
    for key, val in cfg.items():
        here = f"{path}.{key}" if path else key
        if key not in schema:
            raise ScenarioError(f"unknown key '{here}'")
        spec = schema[key]
        if isinstance(spec, dict):
            _check_keys(val, spec, here)
        elif isinstance(spec, list):
            if not isinstance(val, list):
                raise ScenarioError(f"'{here}' must be a list")
            for i, item in enumerate(val):
                _check_keys(item, spec[0], f"{here}[{i}]")
        else:
            ok = isinstance(val, spec) or (spec is float and isinstance(val, int)
                                           and not isinstance(val, bool))
            if spec is int and isinstance(val, bool):
                ok = False
            if not ok:
                raise ScenarioError(f"'{here}' must be {spec.__name__}")


def _merged(cfg):
    out = json.loads(json.dumps(_DEFAULTS))
    for sect, val in cfg.items():
        if isinstance(val, dict):
            out.setdefault(sect, {}).update(val)
        else:
            out[sect] = val
    return out


def _positive(cfg, path, *keys):
    sect = cfg
    for p in path.split("."):
        sect = sect[p]
    for k in keys:
        if k in sect and not sect[k] > 0:
            raise ScenarioError(f"'{path}.{k}' must be positive")


def load_scenario(source):
    """Parse and validate a scenario from a path, JSON string, or dict."""
    if isinstance(source, dict):
        cfg = source
    else:
        text = source if str(source).lstrip().startswith("{") \
            else open(source).read()
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"scenario is not valid JSON: {e}") from e
    _check_keys(cfg, _SCHEMA, "")
    cfg = _merged(cfg)

    for sect in ("radar", "scene"):
        if sect not in cfg:
            raise ScenarioError(f"missing required section '{sect}'")
    for k in ("fc_hz", "bandwidth_hz", "pulse_s", "sample_rate_hz"):
        if k not in cfg["radar"]:
            raise ScenarioError(f"missing required key 'radar.{k}'")
        if not cfg["radar"][k] > 0:
            raise ScenarioError(f"'radar.{k}' must be positive")
    _positive(cfg, "earth", "radius_m")
    if cfg["earth"]["rotation_rate_rad_s"] < 0:
        raise ScenarioError("'earth.rotation_rate_rad_s' must be non-negative")

    orbit = cfg["orbit"]
    if orbit["type"] not in ("circular", "file"):
        raise ScenarioError("'orbit.type' must be 'circular' or 'file'")
    if orbit["type"] == "circular":
        for k in ("altitude_m", "duration_s", "prf_hz"):
            if k not in orbit:
                raise ScenarioError(f"missing required key 'orbit.{k}'")
        _positive(cfg, "orbit", "altitude_m", "duration_s", "prf_hz", "mu_m3_s2")
    elif "path" not in orbit:
        raise ScenarioError("missing required key 'orbit.path'")

    scene = cfg["scene"]
    if "targets" not in scene or not scene["targets"]:
        raise ScenarioError("'scene.targets' must list at least one target")
    has_range = "reference_range_m" in scene
    has_xy = "center_x_m" in scene and "center_y_m" in scene
    if not (has_range or has_xy):
        raise ScenarioError("scene needs 'reference_range_m' or center_x/y_m")
    if has_range:
        _positive(cfg, "scene", "reference_range_m")

    proc = cfg["processing"]
    if proc["mode"] not in MODES:
        raise ScenarioError(f"'processing.mode' must be one of {MODES}")
    if proc["mocomp"] not in ("auto", "none", "h2", "h2h3"):
        raise ScenarioError("'processing.mocomp' must be auto|none|h2|h2h3")
    if proc["mocomp"] == "auto":
        proc["mocomp"] = "h2h3" if proc["mode"] == "sga_high" else "none"
    if proc["weighting"] not in ("none", "taylor"):
        raise ScenarioError("'processing.weighting' must be 'none' or 'taylor'")
    return cfg


def build_earth(cfg):
    e = cfg["earth"]
    return EarthModel(e["radius_m"], e["rotation_rate_rad_s"])


def build_radar(cfg):
    r = cfg["radar"]
    try:
        return RadarParams(fc=r["fc_hz"], bandwidth=r["bandwidth_hz"],
                           pulse=r["pulse_s"], fs=r["sample_rate_hz"])
    except ValueError as e:
        raise ScenarioError(f"radar: {e}") from e


def build_trajectory(cfg, earth):
    orbit = cfg["orbit"]
    if orbit["type"] == "circular":
        t, pos = generate_orbit(
            orbit["altitude_m"], orbit["duration_s"], orbit["prf_hz"], earth,
            earth_rotation=orbit["earth_rotation"], mu=orbit["mu_m3_s2"],
            inclination=math.radians(orbit["inclination_deg"]),
            center_latitude=math.radians(orbit["center_latitude_deg"]))
        center = len(t) // 2
    else:
        t, pos = load_trajectory_file(orbit["path"])
        center = orbit.get("center_index", len(t) // 2)
    return build_imaging_frame(t, pos, center)


def build_scene(cfg, traj, earth):
    """Scene reference and target list; jitter uses the scenario seed."""
    scene = cfg["scene"]
    if "reference_range_m" in scene:
        c = traj.center_index
        x_c = 0.0
        y_c = float(u_from_r(scene["reference_range_m"], traj.R[c], earth))
    else:
        x_c, y_c = scene["center_x_m"], scene["center_y_m"]
    try:
        ref = SceneReference.from_xy(x_c, y_c, earth)
    except ValueError as e:
        raise ScenarioError(f"scene center off the surface: {e}") from e

    rng = np.random.default_rng(cfg["seed"])
    jit = scene["jitter_m"]
    targets = []
    for i, tg in enumerate(scene["targets"]):
        dx = tg.get("dx_m", 0.0) + (jit * rng.uniform(-1, 1) if jit else 0.0)
        dy = tg.get("dy_m", 0.0) + (jit * rng.uniform(-1, 1) if jit else 0.0)
        amp = complex(tg.get("amplitude_re", 1.0), tg.get("amplitude_im", 0.0))
        try:
            gp = GroundPoint.on_sphere(x_c + dx, y_c + dy, earth)
        except ValueError as e:
            raise ScenarioError(f"scene.targets[{i}] off the surface: {e}") from e
        targets.append(PointTarget(gp, amp))
    return ref, targets
