"""Guided collision avoidance over ISP fields.

:func:`control_set` turns a field into per-column feasible acceleration
intervals; :func:`sd_control` layers guidance onto the field by addition and
picks the safest goal-directed column and acceleration.  Because guidance is
only ever added as finite potential, a column holding ``-inf`` can never be
selected while any finite column exists.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import extended_real as er
from .errors import DimensionMismatch, InvalidParams, OutOfRange, PolarityMismatch, ThetaOutOfFov
from .extended_real import Kind, Polarity
from .field import (
    IspField,
    PotentialPoint,
    Profile,
    band_rows,
    field_add,
    reduce_band,
)
from .transforms import ConstraintParams, soft_array


@dataclass(frozen=True)
class CameraIntrinsics:
    f: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.f > 0 and math.isfinite(self.f)):
            raise InvalidParams(f"f must be a positive focal length, got {self.f!r}")
        if self.width < 1 or self.height < 1:
            raise InvalidParams("width and height must be at least one pixel")
        if not (0 <= self.cx <= self.width):
            raise InvalidParams(f"cx={self.cx!r} lies outside the image")
        if not (0 <= self.cy <= self.height):
            raise InvalidParams(f"cy={self.cy!r} lies outside the image")

    @classmethod
    def centered(cls, f: float, width: int, height: int) -> "CameraIntrinsics":
        """Principal point on the centre of column ``width // 2`` and row ``height // 2``."""
        return cls(f, width // 2 + 0.5, height // 2 + 0.5, width, height)

    @property
    def half_fov(self) -> tuple[float, float]:
        """Steering limits (left, right) in radians, at the outer image edges."""
        return math.atan((0.0 - self.cx) / self.f), math.atan((self.width - self.cx) / self.f)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ControlCommand:
    theta: float
    a: float


def _default_bias_shape() -> ConstraintParams:
    return ConstraintParams(translation=0.0, c_lo=0.0, c_hi=1.0, alpha=0.05, beta=1.0)


@dataclass(frozen=True)
class GuidanceParams:
    """Controller parameters.

    ``bias_shape`` shapes the guidance biasing field (soft transform of the
    negative column distance to the desired column) and ``control_bias_gain``
    scales the control-set biasing field.
    """

    w_theta: int
    band: int
    h: int
    k_p: float
    k_d: float
    gamma_u: ConstraintParams
    bias_shape: ConstraintParams = field(default_factory=_default_bias_shape)
    control_bias_gain: float = 1.0

    def __post_init__(self):
        if self.w_theta < 1 or self.w_theta % 2 == 0:
            raise InvalidParams(f"w_theta must be odd and >= 1, got {self.w_theta!r}")
        if self.band < 1:
            raise InvalidParams(f"band must be >= 1, got {self.band!r}")
        for name in ("k_p", "k_d"):
            gain = getattr(self, name)
            if not (math.isfinite(gain) and gain >= 0):
                raise InvalidParams(f"{name} must be finite and >= 0, got {gain!r}")
        if not self.gamma_u.c_lo < self.gamma_u.c_hi:
            raise InvalidParams("gamma_u needs c_lo < c_hi")
        if not (math.isfinite(self.control_bias_gain) and self.control_bias_gain > 0):
            raise InvalidParams(f"control_bias_gain must be > 0, got {self.control_bias_gain!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        return d


@dataclass(frozen=True, eq=False)
class ControlSetMap:
    """Per-column feasible interval ``[a_min, a_max[i]]``."""

    a_min: float
    a_max: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, ControlSetMap):
            return NotImplemented
        return self.a_min == other.a_min and np.array_equal(self.a_max, other.a_max)

    __hash__ = None

    def __len__(self) -> int:
        return len(self.a_max)

    def interval(self, i: int) -> tuple[float, float]:
        return self.a_min, float(self.a_max[i])


def column_to_steering(i: int, c: CameraIntrinsics) -> float:
    if not 0 <= i < c.width:
        raise OutOfRange(f"column {i} outside [0, {c.width})")
    return math.atan((i + 0.5 - c.cx) / c.f)


def steering_to_column(theta: float, c: CameraIntrinsics) -> int:
    if not abs(theta) < math.pi / 2:
        raise OutOfRange(f"steering angle {theta!r} is not in front of the camera")
    x = c.f * math.tan(theta) + c.cx
    if not 0.0 <= x <= c.width:
        raise OutOfRange(f"steering angle {theta!r} lies outside the field of view")
    # pixel i covers [i, i+1); the right image edge belongs to the last column
    return min(int(math.floor(x)), c.width - 1)


def _erode(f: IspField, p: GuidanceParams) -> Profile:
    start, stop = band_rows(f.height, p.h, p.band)
    pk, pv, dk, dv = (a[start:stop] for a in f.parts())
    key = er.order_key(pk, pv)
    r = (p.w_theta - 1) // 2
    rows = np.empty(f.width, dtype=np.intp)
    cols = np.empty(f.width, dtype=np.intp)
    for i in range(f.width):
        lo, hi = max(0, i - r), min(f.width, i + r + 1)
        # row-major flattening makes argmin break ties by (row, col)
        flat = int(np.argmin(key[:, lo:hi]))
        rows[i], cols[i] = divmod(flat, hi - lo)
        cols[i] += lo
    return Profile(pk[rows, cols], pv[rows, cols], dk[rows, cols], dv[rows, cols])


def erode_along_horizon(f: IspField, p: GuidanceParams) -> list[PotentialPoint]:
    """Per column, the most dangerous cell in a ``w_theta``-wide window of the horizon band."""
    return _erode(f, p).points()


def _gain_term(gain: float, kind, value, polarity):
    # a zero gain drops the term entirely, avoiding 0 * inf
    if gain == 0:
        return np.zeros_like(kind), np.zeros_like(value)
    return er.scale_arrays(gain, kind, value, polarity)


def control_set(f: IspField, p: GuidanceParams) -> ControlSetMap:
    if f.polarity is not Polarity.NEGATIVE:
        raise PolarityMismatch("control_set expects a negative-polarity field")
    prof = _erode(f, p)
    neg = Polarity.NEGATIVE
    uk, uv = er.add_arrays(*_gain_term(p.k_p, prof.pk, prof.pv, neg),
                           *_gain_term(p.k_d, prof.dk, prof.dv, neg), neg)
    a_max = soft_array(er.decode(uk, uv), p.gamma_u)
    return ControlSetMap(p.gamma_u.c_lo, a_max)


def _column_field(values: np.ndarray, height: int) -> IspField:
    return IspField(np.broadcast_to(values, (height, values.size)).copy(), None, Polarity.NEGATIVE)


def bias_field_from_guidance(u_d: ControlCommand, dims: tuple[int, int], intrinsics: CameraIntrinsics,
                             shape: ConstraintParams) -> IspField:
    """Column-constant field peaking at the desired steering column."""
    width, height = dims
    try:
        peak = steering_to_column(u_d.theta, intrinsics)
    except OutOfRange as e:
        raise ThetaOutOfFov(str(e)) from None
    distance = np.abs(np.arange(width) - peak).astype(np.float64)
    return _column_field(soft_array(-distance, shape), height)


def bias_field_from_control_set(m: ControlSetMap, dims: tuple[int, int], gain: float = 1.0) -> IspField:
    """Column-constant field proportional to each column's ``a_max``."""
    width, height = dims
    if len(m) != width:
        raise DimensionMismatch(f"control set covers {len(m)} columns, field has {width}")
    return _column_field(gain * np.asarray(m.a_max, dtype=np.float64), height)


@dataclass(frozen=True)
class Decision:
    command: ControlCommand
    i_star: int
    desired_column: int
    a_max_at_istar: float
    num_neginf_columns: int
    control: ControlSetMap


def _pick_column(key: np.ndarray, desired: int) -> int:
    best = key.max()
    candidates = np.flatnonzero(key == best)
    # nearest to the desired column, then the smaller index
    order = np.lexsort((candidates, np.abs(candidates - desired)))
    return int(candidates[order[0]])


def decide(u_d: ControlCommand, f: IspField, p: GuidanceParams, intrinsics: CameraIntrinsics) -> Decision:
    """Full controller step, returning the command with its diagnostics."""
    if f.polarity is not Polarity.NEGATIVE:
        raise PolarityMismatch("sd_control expects a negative-polarity field")
    if (f.width, f.height) != (intrinsics.width, intrinsics.height):
        raise DimensionMismatch("field and camera dimensions differ")
    dims = (f.width, f.height)
    m = control_set(f, p)
    f_star = field_add(field_add(f, bias_field_from_guidance(u_d, dims, intrinsics, p.bias_shape)),
                       bias_field_from_control_set(m, dims, p.control_bias_gain))
    h_prof = reduce_band(f_star, p.h, p.band)
    desired = steering_to_column(u_d.theta, intrinsics)
    neginf = h_prof.pk == Kind.NEG_INF
    n_neginf = int(neginf.sum())
    if n_neginf == f.width:
        cmd = ControlCommand(column_to_steering(desired, intrinsics), m.a_min)
        return Decision(cmd, desired, desired, float(m.a_max[desired]), n_neginf, m)
    i_star = _pick_column(h_prof.key(), desired)
    a_lo, a_hi = m.interval(i_star)
    a_star = min(max(u_d.a, a_lo), a_hi)
    cmd = ControlCommand(column_to_steering(i_star, intrinsics), a_star)
    return Decision(cmd, i_star, desired, a_hi, n_neginf, m)


def sd_control(u_d: ControlCommand, f: IspField, p: GuidanceParams,
               intrinsics: CameraIntrinsics) -> ControlCommand:
    return decide(u_d, f, p, intrinsics).command
