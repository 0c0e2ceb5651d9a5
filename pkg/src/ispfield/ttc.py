"""Time-to-contact from apparent object scale.

For an object whose face is roughly parallel to the image plane and which
closes at constant speed, tau = s / s_dot where ``s`` is its apparent scale.
Scale is measured here as the diagonal of the object's bounding box in a
label image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import extended_real as er
from .errors import DegenerateScale, InfiniteTau, NonMonotonicTime, ObjectMismatch
from .extended_real import POS_INF, ExtendedReal

# tau_dot at or above this means the current braking avoids contact.
TAU_DOT_THRESHOLD = -0.5


@dataclass(frozen=True)
class ScaleObservation:
    object_id: int
    s: float
    timestamp: float

    def __post_init__(self):
        if not self.s >= 0:
            raise DegenerateScale(f"scale must be non-negative, got {self.s!r}")


@dataclass(frozen=True)
class TtcEstimate:
    tau: ExtendedReal
    tau_dot: float | None = None


def scale_from_mask(labels, object_id: int) -> float:
    """Bounding-box diagonal, in pixels, of all pixels labelled ``object_id``.

    Extents are measured between pixel centres, so a single pixel has scale 0
    and a 3x4 block has scale sqrt(2**2 + 3**2).
    """
    labels = np.asarray(labels)
    rows, cols = np.nonzero(labels == object_id)
    if rows.size == 0:
        return 0.0
    return math.hypot(cols.max() - cols.min(), rows.max() - rows.min())


def estimate_s_dot(prev: ScaleObservation, curr: ScaleObservation) -> float:
    if prev.object_id != curr.object_id:
        raise ObjectMismatch(f"observations of objects {prev.object_id} and {curr.object_id}")
    dt = curr.timestamp - prev.timestamp
    if not dt > 0:
        raise NonMonotonicTime(f"timestamps {prev.timestamp!r} -> {curr.timestamp!r} do not increase")
    return (curr.s - prev.s) / dt


def estimate_tau(s: float, s_dot: float) -> ExtendedReal:
    """tau = s / s_dot, or +inf when the object is not expanding."""
    if not s > 0:
        raise DegenerateScale(f"scale must be positive, got {s!r}")
    if s_dot <= 0:
        return POS_INF
    tau = s / s_dot
    return er.finite(tau) if math.isfinite(tau) else POS_INF


def tau_from_observations(prev: ScaleObservation, curr: ScaleObservation) -> ExtendedReal:
    """Time-to-contact at ``curr.timestamp`` from two scale samples.

    Uses the earlier scale over the backward-difference rate.  Because apparent
    scale is proportional to 1/Z, this is exactly Z/|Z_dot| at the later sample
    whenever the closing speed is constant; pairing the later scale with the
    same rate would overestimate tau by the sampling interval.
    """
    return estimate_tau(prev.s, estimate_s_dot(prev, curr))


def estimate_tau_dot(prev_tau: ExtendedReal, curr_tau: ExtendedReal, dt: float) -> float:
    if prev_tau.is_infinite or curr_tau.is_infinite:
        raise InfiniteTau("tau_dot is undefined across an infinite tau sample")
    if not dt > 0:
        raise NonMonotonicTime(f"dt must be positive, got {dt!r}")
    return (curr_tau.value - prev_tau.value) / dt


def tau_dot_decision(tau_dot: float) -> int:
    """1 when the current deceleration avoids a head-on collision, else 0."""
    return 1 if tau_dot >= TAU_DOT_THRESHOLD else 0


@dataclass
class _Track:
    history: list = field(default_factory=list)
    tau: ExtendedReal | None = None
    tau_time: float | None = None


class TtcTracker:
    """Per-object scale history turned into tau and tau_dot each frame.

    ``baseline`` is the number of frames between the two scale samples used for
    the rate (1 = consecutive frames).  Objects that drop out of view lose their
    history.
    """

    def __init__(self, baseline: int = 1):
        if baseline < 1:
            raise ValueError("baseline must be at least one frame")
        self.baseline = baseline
        self._tracks: dict[int, _Track] = {}

    def update(self, scales: dict[int, float], timestamp: float) -> dict[int, tuple[ScaleObservation, float | None, TtcEstimate]]:
        """Feed one frame of scales; returns ``{id: (obs, s_dot, estimate)}``."""
        out = {}
        for oid in list(self._tracks):
            if oid not in scales:
                del self._tracks[oid]
        for oid in sorted(scales):
            obs = ScaleObservation(oid, float(scales[oid]), timestamp)
            track = self._tracks.setdefault(oid, _Track())
            track.history.append(obs)
            del track.history[:-(self.baseline + 1)]
            s_dot = None
            tau = POS_INF
            if len(track.history) > self.baseline:
                prev = track.history[0]
                s_dot = estimate_s_dot(prev, obs)
                if prev.s > 0:
                    tau = estimate_tau(prev.s, s_dot)
            tau_dot = None
            if track.tau is not None and track.tau.is_finite and tau.is_finite:
                tau_dot = estimate_tau_dot(track.tau, tau, timestamp - track.tau_time)
            if s_dot is not None:
                track.tau, track.tau_time = tau, timestamp
            out[oid] = (obs, s_dot, TtcEstimate(tau, tau_dot))
        return out
