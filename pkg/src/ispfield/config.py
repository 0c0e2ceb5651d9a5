"""Scenario configuration files (JSON).

A config is validated against :data:`SCHEMA` (unknown keys are rejected) and
then against the invariants of the domain types it builds.  Every failure is
reported as a :class:`ConfigError` whose ``key`` is the dotted path of the
offending entry.
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .control import CameraIntrinsics, ControlCommand, GuidanceParams
from .errors import ConfigError, IspError
from .simulator import AgentState, Billboard, Dynamics, Scenario, WorldState
from .transforms import ConstraintParams

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_range = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}


def _obj(props: dict, required=None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": False,
    }


_constraint = _obj({"translation": _num, "c_lo": _num, "c_hi": _num, "alpha": _pos, "beta": _pos})

SCHEMA = _obj(
    {
        "camera": _obj({"f": _pos, "cx": _num, "cy": _num,
                        "width": {"type": "integer", "minimum": 1},
                        "height": {"type": "integer", "minimum": 1}}),
        "guidance": _obj(
            {
                "w_theta": {"type": "integer", "minimum": 1},
                "band": {"type": "integer", "minimum": 1},
                "h": {"type": "integer", "minimum": 0},
                "k_p": {"type": "number", "minimum": 0},
                "k_d": {"type": "number", "minimum": 0},
                "gamma_u": _constraint,
                "bias_shape": _constraint,
                "control_bias_gain": _pos,
            },
            required=["w_theta", "band", "h", "k_p", "k_d", "gamma_u"],
        ),
        "hard": _obj({"translation": _num, "alpha": _pos, "beta": _pos}),
        "epsilon": _pos,
        "desired": _obj({"theta": _num, "a": _num}),
        "world": _obj(
            {
                "agent": _obj({"x": _num, "z": _num, "heading": _num,
                               "speed": {"type": "number", "minimum": 0}}),
                "obstacles": {
                    "type": "array",
                    "items": _obj(
                        {"id": {"type": "integer", "minimum": 1}, "center": _pair,
                         "half_width": _pos, "height": _pos, "velocity": _pair},
                        required=["id", "center", "half_width", "height"],
                    ),
                },
            },
            required=["agent"],
        ),
        "random_obstacles": _obj(
            {"count": {"type": "integer", "minimum": 0}, "x_range": _range, "z_range": _range,
             "half_width_range": _range, "height_range": _range},
        ),
        "dynamics": _obj(
            {"accel_scale": _pos, "steer_gain": _pos, "max_turn_rate": _pos,
             "agent_radius": {"type": "number", "minimum": 0}},
            required=[],
        ),
        "dt": _pos,
        "max_steps": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "scale_source": {"enum": ["mask", "continuous"]},
        "tau_baseline": {"type": "integer", "minimum": 1},
    },
    required=["camera", "guidance", "hard", "epsilon", "desired", "world", "dt", "max_steps"],
)


@dataclass(frozen=True)
class ScenarioConfig:
    camera: CameraIntrinsics
    guidance: GuidanceParams
    scenario: Scenario
    max_steps: int
    seed: int

    def to_dict(self) -> dict:
        """JSON document that parses back to an equal config.

        Randomly generated obstacles are written out explicitly.
        """
        sc = self.scenario
        w = sc.world
        hard = sc.hard
        return {
            "camera": self.camera.to_dict(),
            "guidance": self.guidance.to_dict(),
            "hard": {"translation": hard.translation, "alpha": hard.alpha, "beta": hard.beta},
            "epsilon": sc.epsilon,
            "desired": {"theta": sc.desired.theta, "a": sc.desired.a},
            "world": {
                "agent": asdict(w.agent),
                "obstacles": [
                    {"id": b.id, "center": list(b.center), "half_width": b.half_width,
                     "height": b.height, "velocity": list(b.velocity)}
                    for b in w.obstacles
                ],
            },
            "dynamics": asdict(sc.dynamics),
            "dt": sc.dt,
            "max_steps": self.max_steps,
            "seed": self.seed,
            "scale_source": sc.scale_source,
            "tau_baseline": sc.tau_baseline,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _key_of(error: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in error.absolute_path)
    if error.validator == "additionalProperties":
        extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        return ".".join(filter(None, [path, extra[0] if extra else ""]))
    if error.validator == "required":
        missing = [k for k in error.validator_value if k not in error.instance]
        return ".".join(filter(None, [path, missing[0] if missing else ""]))
    return path or "<root>"


def _section(key: str, build):
    try:
        return build()
    except (IspError, TypeError, ValueError) as e:
        raise ConfigError(f"{key}: {e}", key) from e


def _random_obstacles(ranges: dict, seed: int, first_id: int) -> list[Billboard]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(ranges["count"]):
        out.append(Billboard(
            first_id + k,
            (float(rng.uniform(*ranges["x_range"])), float(rng.uniform(*ranges["z_range"]))),
            float(rng.uniform(*ranges["half_width_range"])),
            float(rng.uniform(*ranges["height_range"])),
        ))
    return out


def parse_config(data: dict) -> ScenarioConfig:
    data = copy.deepcopy(data)
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        key = _key_of(err)
        raise ConfigError(f"{key}: {err.message}", key)

    camera = _section("camera", lambda: CameraIntrinsics(**data["camera"]))
    g = data["guidance"]
    gamma_u = _section("guidance.gamma_u", lambda: ConstraintParams(**g["gamma_u"]))
    extra = {}
    if "bias_shape" in g:
        extra["bias_shape"] = _section("guidance.bias_shape", lambda: ConstraintParams(**g["bias_shape"]))
    if "control_bias_gain" in g:
        extra["control_bias_gain"] = g["control_bias_gain"]
    guidance = _section("guidance", lambda: GuidanceParams(
        g["w_theta"], g["band"], g["h"], g["k_p"], g["k_d"], gamma_u, **extra))
    _section("guidance.h", lambda: _check_horizon(guidance, camera))

    eps = data["epsilon"]
    hard = _section("hard", lambda: ConstraintParams(
        data["hard"]["translation"], 0.0, eps, data["hard"]["alpha"], data["hard"]["beta"]))
    desired = ControlCommand(data["desired"]["theta"], data["desired"]["a"])

    seed = data.get("seed", 0)
    w = data["world"]
    agent = _section("world.agent", lambda: AgentState(**w["agent"]))
    obstacles = []
    for k, o in enumerate(w.get("obstacles", [])):
        obstacles.append(_section(f"world.obstacles.{k}", lambda o=o: Billboard(
            o["id"], tuple(o["center"]), o["half_width"], o["height"], tuple(o.get("velocity", (0.0, 0.0))))))
    if "random_obstacles" in data:
        first = max([b.id for b in obstacles], default=0) + 1
        obstacles += _section("random_obstacles", lambda: _random_obstacles(data["random_obstacles"], seed, first))
    world = _section("world.obstacles", lambda: WorldState(agent, tuple(obstacles)))
    dynamics = _section("dynamics", lambda: Dynamics(**data.get("dynamics", {})))
    scenario = _section("scenario", lambda: Scenario(
        world, hard, desired, data["dt"], dynamics,
        data.get("scale_source", "mask"), data.get("tau_baseline", 1)))
    return ScenarioConfig(camera, guidance, scenario, data["max_steps"], seed)


def _check_horizon(p: GuidanceParams, c: CameraIntrinsics) -> None:
    start = p.h - (p.band - 1) // 2
    if start < 0 or start + p.band > c.height:
        raise ValueError(f"horizon band of {p.band} rows at row {p.h} leaves the {c.height}-row image")


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return parse_config(data)
