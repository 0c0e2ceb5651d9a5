"""Deterministic 2D world with a pinhole camera, used as a ground-truth oracle.

The agent moves on the ground plane ``(x, z)``; heading 0 looks down ``+z``
with ``+x`` to the right.  Obstacles are billboards: camera-facing rectangles
``2 * half_width`` wide and ``height`` tall, vertically centred on the camera's
optical axis, so their face is always parallel to the image plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
import numpy as np

from . import extended_real as er
from .control import CameraIntrinsics, ControlCommand, Decision, GuidanceParams, decide
from .errors import InvalidParams, NonPositiveDt, UnknownObject
from .extended_real import POS_INF, ExtendedReal, Polarity
from .field import IspField
from .transforms import ConstraintParams, apply_hard
from .ttc import TtcTracker, scale_from_mask


@dataclass(frozen=True)
class AgentState:
    x: float = 0.0
    z: float = 0.0
    heading: float = 0.0
    speed: float = 0.0

    def __post_init__(self):
        if self.speed < 0:
            raise InvalidParams(f"speed must be >= 0, got {self.speed!r}")

    @property
    def forward(self) -> tuple[float, float]:
        return math.sin(self.heading), math.cos(self.heading)

    @property
    def right(self) -> tuple[float, float]:
        return math.cos(self.heading), -math.sin(self.heading)


@dataclass(frozen=True)
class Billboard:
    id: int
    center: tuple[float, float]
    half_width: float
    height: float
    velocity: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.half_width > 0 and self.height > 0):
            raise InvalidParams(f"billboard {self.id}: half_width and height must be > 0")
        if self.id == 0:
            raise InvalidParams("billboard id 0 is reserved for free space")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "velocity", tuple(float(v) for v in self.velocity))

    @property
    def diagonal(self) -> float:
        return math.hypot(2.0 * self.half_width, self.height)


@dataclass(frozen=True)
class WorldState:
    agent: AgentState
    obstacles: tuple[Billboard, ...] = ()
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        ids = [b.id for b in self.obstacles]
        if len(set(ids)) != len(ids):
            raise InvalidParams(f"obstacle ids must be unique, got {ids}")

    def obstacle(self, oid: int) -> Billboard:
        for b in self.obstacles:
            if b.id == oid:
                return b
        raise UnknownObject(oid)


@dataclass(frozen=True)
class Frame:
    labels: np.ndarray
    continuous_scales: dict[int, float]
    timestamp: float


def to_camera(w: WorldState, point: tuple[float, float]) -> tuple[float, float]:
    """Camera-frame ``(X, Z)`` of a ground-plane point."""
    a = w.agent
    dx, dz = point[0] - a.x, point[1] - a.z
    fx, fz = a.forward
    rx, rz = a.right
    return dx * rx + dz * rz, dx * fx + dz * fz


def _pixel_span(lo: float, hi: float, n: int) -> tuple[int, int]:
    # pixels whose centre lies in [lo, hi)
    start = max(0, math.ceil(lo - 0.5))
    stop = min(n, math.ceil(hi - 0.5))
    return start, stop


def project(w: WorldState, c: CameraIntrinsics) -> Frame:
    """Render the label image and the unquantised per-object scales.

    Each billboard fills the pixels whose centres fall inside its projected
    rectangle; nearer billboards overwrite farther ones.  Billboards with
    ``Z <= 0`` are not rendered.
    """
    labels = np.zeros((c.height, c.width), dtype=np.int32)
    scales = {}
    visible = []
    for b in w.obstacles:
        X, Z = to_camera(w, b.center)
        if Z <= 0:
            continue
        u0 = c.cx + c.f * (X - b.half_width) / Z
        u1 = c.cx + c.f * (X + b.half_width) / Z
        if u1 <= 0 or u0 >= c.width:
            continue
        scales[b.id] = c.f * b.diagonal / Z
        visible.append((Z, b.id, u0, u1, b))
    # far to near so the nearest object wins; ties go to the smaller id
    for Z, oid, u0, u1, b in sorted(visible, key=lambda t: (-t[0], -t[1])):
        v0 = c.cy - c.f * 0.5 * b.height / Z
        v1 = c.cy + c.f * 0.5 * b.height / Z
        c0, c1 = _pixel_span(u0, u1, c.width)
        r0, r1 = _pixel_span(v0, v1, c.height)
        labels[r0:r1, c0:c1] = oid
    return Frame(labels, scales, w.time)


def segment_scale(p1: tuple[float, float], p2: tuple[float, float], z: float, f: float) -> float:
    """Image length of a segment lying in the plane at depth ``z``."""
    return f * math.hypot(p2[0] - p1[0], p2[1] - p1[1]) / z


def render_segment(p1: tuple[float, float], p2: tuple[float, float], z: float,
                   c: CameraIntrinsics, label: int = 1) -> np.ndarray:
    """Label image of a segment at depth ``z`` (points are ``(X, Y)``, Y up).

    The segment is sampled densely and each sample marks the pixel containing
    it, so the mask's bounding box spans the pixels holding the two endpoints.
    """
    u1, v1 = c.cx + c.f * p1[0] / z, c.cy - c.f * p1[1] / z
    u2, v2 = c.cx + c.f * p2[0] / z, c.cy - c.f * p2[1] / z
    n = int(math.ceil(2 * max(abs(u2 - u1), abs(v2 - v1)))) + 2
    t = np.linspace(0.0, 1.0, n)
    cols = np.floor(u1 + t * (u2 - u1)).astype(int)
    rows = np.floor(v1 + t * (v2 - v1)).astype(int)
    keep = (cols >= 0) & (cols < c.width) & (rows >= 0) & (rows < c.height)
    labels = np.zeros((c.height, c.width), dtype=np.int32)
    labels[rows[keep], cols[keep]] = label
    return labels


def step(w: WorldState, cmd: ControlCommand, dt: float, accel_scale: float, *,
         steer_gain: float = 1.0, max_turn_rate: float = math.inf) -> WorldState:
    """Advance the world by ``dt`` seconds.

    Heading changes by ``steer_gain * cmd.theta``, bounded by
    ``max_turn_rate * dt``; speed changes by ``accel_scale * cmd.a * dt`` and
    stops at zero.  Position integrates the speed exactly along the new heading.
    """
    if not dt > 0:
        raise NonPositiveDt(f"dt must be positive, got {dt!r}")
    a = w.agent
    turn = steer_gain * cmd.theta
    limit = max_turn_rate * dt
    heading = a.heading + max(-limit, min(limit, turn))
    accel = accel_scale * cmd.a
    v0 = a.speed
    v1 = v0 + accel * dt
    if v1 < 0:
        # stops part-way through the step
        t_stop = v0 / -accel
        dist = 0.5 * v0 * t_stop
        v1 = 0.0
    else:
        dist = 0.5 * (v0 + v1) * dt
    agent = AgentState(a.x + dist * math.sin(heading), a.z + dist * math.cos(heading), heading, v1)
    obstacles = tuple(
        replace(b, center=(b.center[0] + b.velocity[0] * dt, b.center[1] + b.velocity[1] * dt))
        for b in w.obstacles
    )
    return WorldState(agent, obstacles, w.time + dt)


def closing_rate(w: WorldState, oid: int) -> float:
    """Camera-frame Z_dot of an obstacle from the current translational velocities."""
    b = w.obstacle(oid)
    fx, fz = w.agent.forward
    rel_vx = b.velocity[0] - w.agent.speed * fx
    rel_vz = b.velocity[1] - w.agent.speed * fz
    return rel_vx * fx + rel_vz * fz


def ground_truth_tau(w: WorldState, oid: int) -> ExtendedReal:
    b = w.obstacle(oid)
    _, Z = to_camera(w, b.center)
    z_dot = closing_rate(w, oid)
    if z_dot < 0 and Z > 0:
        return er.finite(Z / -z_dot)
    return POS_INF


def _in_corridor(w: WorldState, b: Billboard, radius: float) -> bool:
    X, _ = to_camera(w, b.center)
    return abs(X) <= b.half_width + radius


def corridor_min_tau(w: WorldState, radius: float) -> ExtendedReal:
    """Least ground-truth tau over obstacles ahead whose face overlaps the agent's path.

    Obstacles already passed or laterally clear of the agent's body cannot be
    hit by continuing straight and are ignored.
    """
    best = POS_INF
    for b in w.obstacles:
        _, Z = to_camera(w, b.center)
        if Z > 0 and _in_corridor(w, b, radius):
            tau = ground_truth_tau(w, b.id)
            if tau < best:
                best = tau
    return best


def in_contact(w: WorldState, radius: float, prev: WorldState | None = None) -> bool:
    """True when a billboard face has reached the image plane across the agent's body.

    With ``prev`` given, only faces that were still in front in ``prev`` count,
    so a face crossed within one step is caught and long-passed ones are not.
    """
    for b in w.obstacles:
        _, Z = to_camera(w, b.center)
        if Z > 0 or not _in_corridor(w, b, radius):
            continue
        if prev is None:
            if Z > -radius:
                return True
        elif to_camera(prev, prev.obstacle(b.id).center)[1] > 0:
            return True
    return False


@dataclass(frozen=True)
class Dynamics:
    accel_scale: float = 4.0
    steer_gain: float = 1.0
    max_turn_rate: float = 1.0
    agent_radius: float = 0.3

    def __post_init__(self):
        if not self.accel_scale > 0:
            raise InvalidParams("accel_scale must be > 0")
        if not self.steer_gain > 0:
            raise InvalidParams("steer_gain must be > 0")
        if not self.max_turn_rate > 0:
            raise InvalidParams("max_turn_rate must be > 0")
        if not self.agent_radius >= 0:
            raise InvalidParams("agent_radius must be >= 0")


@dataclass(frozen=True)
class Scenario:
    """Everything ``run_episode`` needs besides the controller and camera.

    ``hard`` is the hard transform applied to the tau image; its range is
    ``[0, epsilon]``.  ``scale_source`` selects the measured mask scale
    (``"mask"``) or the simulator's unquantised scale (``"continuous"``).
    """

    world: WorldState
    hard: ConstraintParams
    desired: ControlCommand
    dt: float = 0.1
    dynamics: Dynamics = field(default_factory=Dynamics)
    scale_source: str = "mask"
    tau_baseline: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise NonPositiveDt(f"dt must be positive, got {self.dt!r}")
        if self.scale_source not in ("mask", "continuous"):
            raise InvalidParams(f"scale_source must be 'mask' or 'continuous', got {self.scale_source!r}")

    @property
    def epsilon(self) -> float:
        return self.hard.c_hi


@dataclass(frozen=True)
class FrameRecord:
    frame: int
    world: WorldState
    command: ControlCommand
    decision: Decision
    min_gt_tau: ExtendedReal
    observations: tuple


@dataclass
class EpisodeLog:
    records: list[FrameRecord] = field(default_factory=list)
    fields: list[IspField] = field(default_factory=list)
    final: WorldState | None = None
    contact: bool = False

    @property
    def min_gt_tau(self) -> ExtendedReal:
        taus = [r.min_gt_tau for r in self.records]
        return min(taus) if taus else POS_INF


def tau_images(labels: np.ndarray, estimates: dict) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel tau and tau_dot from per-object estimates.

    Free space and objects without a finite tau get ``+inf`` (no predicted
    contact); undefined tau_dot becomes 0.
    """
    tau_lut = {0: math.inf}
    dot_lut = {0: 0.0}
    for oid, (_, _, est) in estimates.items():
        tau_lut[oid] = float(est.tau)
        dot_lut[oid] = est.tau_dot if est.tau_dot is not None else 0.0
    ids = np.unique(labels)
    tau = np.full(labels.shape, math.inf)
    dot = np.zeros(labels.shape)
    for oid in ids.tolist():
        mask = labels == oid
        tau[mask] = tau_lut.get(oid, math.inf)
        dot[mask] = dot_lut.get(oid, 0.0)
    return tau, dot


def run_episode(scenario: Scenario, params: GuidanceParams, intrinsics: CameraIntrinsics,
                max_steps: int, record_fields: bool = False) -> EpisodeLog:
    """Closed loop: render, estimate tau, build the field, control, step."""
    log = EpisodeLog()
    w = scenario.world
    tracker = TtcTracker(scenario.tau_baseline)
    dyn = scenario.dynamics
    for k in range(max_steps):
        frame = project(w, intrinsics)
        if scenario.scale_source == "continuous":
            scales = dict(frame.continuous_scales)
        else:
            scales = {oid: scale_from_mask(frame.labels, oid)
                      for oid in np.unique(frame.labels).tolist() if oid != 0}
        estimates = tracker.update(scales, frame.timestamp)
        tau, tau_dot = tau_images(frame.labels, estimates)
        f = apply_hard(tau, tau_dot, scenario.hard, Polarity.NEGATIVE)
        if record_fields:
            log.fields.append(f)
        decision = decide(scenario.desired, f, params, intrinsics)
        obs = tuple((oid, est) for oid, est in sorted(estimates.items()))
        log.records.append(FrameRecord(k, w, decision.command, decision,
                                       corridor_min_tau(w, dyn.agent_radius), obs))
        prev = w
        w = step(w, decision.command, scenario.dt, dyn.accel_scale,
                 steer_gain=dyn.steer_gain, max_turn_rate=dyn.max_turn_rate)
        if in_contact(w, dyn.agent_radius, prev):
            log.contact = True
            break
    log.final = w
    return log
