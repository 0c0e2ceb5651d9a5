import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ispfield.control import (
    CameraIntrinsics,
    ControlCommand,
    ControlSetMap,
    GuidanceParams,
    bias_field_from_control_set,
    bias_field_from_guidance,
    column_to_steering,
    control_set,
    decide,
    erode_along_horizon,
    sd_control,
    steering_to_column,
)
from ispfield.errors import (
    BandOutOfBounds,
    DimensionMismatch,
    InvalidParams,
    OutOfRange,
    PolarityMismatch,
    ThetaOutOfFov,
)
from ispfield.extended_real import NEG_INF, Kind, Polarity
from ispfield.field import IspField, asymptotic_region, field_add, field_scale, min_reduce_band
from ispfield.transforms import ConstraintParams, soft_transform

CAM = CameraIntrinsics.centered(100.0, 32, 9)
GAMMA_U = ConstraintParams(-3.0, -1.0, 1.0, 2.0, 1.0)


def params(**kw):
    base = dict(w_theta=3, band=3, h=4, k_p=1.0, k_d=0.1, gamma_u=GAMMA_U)
    base.update(kw)
    return GuidanceParams(**base)


def _brute_erosion(p, h, band, w_theta):
    start = h - (band - 1) // 2
    r = (w_theta - 1) // 2
    width = p.shape[1]
    out = []
    for i in range(width):
        best = None
        for row in range(start, start + band):
            for col in range(max(0, i - r), min(width, i + r + 1)):
                if best is None or p[row, col] < p[best]:
                    best = (row, col)
        out.append(best)
    return out


# -- parameter types -------------------------------------------------------------


def test_guidance_param_validation():
    with pytest.raises(InvalidParams):
        params(w_theta=4)
    with pytest.raises(InvalidParams):
        params(k_p=-1.0)
    with pytest.raises(InvalidParams):
        params(k_d=math.inf)
    with pytest.raises(InvalidParams):
        params(gamma_u=ConstraintParams(0.0, 1.0, 1.0, 1.0, 1.0))


def test_camera_validation():
    with pytest.raises(InvalidParams):
        CameraIntrinsics(0.0, 1.0, 1.0, 4, 4)
    with pytest.raises(InvalidParams):
        CameraIntrinsics(10.0, 5.0, 1.0, 4, 4)


# -- steering mapping --------------------------------------------------------------


def test_principal_column_is_straight_ahead():
    assert column_to_steering(16, CAM) == 0.0


@pytest.mark.parametrize("cam", [CAM, CameraIntrinsics(37.0, 3.2, 1.0, 7, 3),
                                 CameraIntrinsics.centered(200.0, 512, 128)])
def test_column_round_trip(cam):
    for i in range(cam.width):
        assert steering_to_column(column_to_steering(i, cam), cam) == i


def test_steering_out_of_range():
    left, right = CAM.half_fov
    with pytest.raises(OutOfRange):
        steering_to_column(right + 1e-3, CAM)
    with pytest.raises(OutOfRange):
        steering_to_column(left - 1e-3, CAM)
    with pytest.raises(OutOfRange):
        column_to_steering(CAM.width, CAM)


# -- erosion ----------------------------------------------------------------------


def test_identity_erosion():
    rng = np.random.default_rng(0)
    f = IspField(rng.normal(size=(9, 32)), rng.normal(size=(9, 32)))
    pts = erode_along_horizon(f, params(w_theta=1, band=1))
    assert pts == [f.cell(c, 4) for c in range(32)]


def test_erosion_spreads_single_neginf():
    p = np.zeros((9, 32))
    p[4, 10] = -np.inf
    pts = erode_along_horizon(IspField(p), params(w_theta=5, band=1))
    neg = [i for i, pt in enumerate(pts) if pt.potential == NEG_INF]
    assert neg == list(range(8, 13))


def test_erosion_uniform():
    pts = erode_along_horizon(IspField.full(32, 9, -1.0, 0.5), params(w_theta=7))
    assert len(set(pts)) == 1 and len(pts) == 32


def test_erosion_band_out_of_bounds():
    with pytest.raises(BandOutOfBounds):
        erode_along_horizon(IspField.full(32, 9), params(h=8, band=3))


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 3, 5, 9]), st.integers(1, 4))
def test_erosion_matches_brute_force(seed, w_theta, band):
    rng = np.random.default_rng(seed)
    # small integer payloads create plenty of ties
    p = rng.integers(-3, 3, size=(9, 12)).astype(float)
    p[rng.random((9, 12)) < 0.05] = -np.inf
    d = rng.normal(size=(9, 12))
    f = IspField(p, d)
    pts = erode_along_horizon(f, params(w_theta=w_theta, band=band, h=4))
    want = _brute_erosion(p, 4, band, w_theta)
    assert pts == [f.cell(col, row) for row, col in want]


# -- control set ---------------------------------------------------------------------


def test_control_set_neginf_column_brakes():
    p = np.full((9, 32), -0.1)
    p[:, 20] = -np.inf
    m = control_set(IspField(p), params(w_theta=1))
    assert m.a_max[20] == GAMMA_U.c_lo
    assert m.interval(20) == (GAMMA_U.c_lo, GAMMA_U.c_lo)


def test_control_set_benign_field_near_top():
    m = control_set(IspField.full(32, 9, 50.0, 0.0), params())
    assert np.unique(m.a_max).size == 1
    assert m.a_max[0] == pytest.approx(GAMMA_U.c_hi, abs=1e-12)


def test_control_set_zero_gains():
    p = np.random.default_rng(2).normal(size=(9, 32))
    p[4, 3] = -np.inf
    m = control_set(IspField(p), params(k_p=0.0, k_d=0.0))
    assert (m.a_max == soft_transform(0.0, GAMMA_U)).all()


def test_control_set_requires_negative_polarity():
    with pytest.raises(PolarityMismatch):
        control_set(IspField.full(32, 9, polarity=Polarity.POSITIVE), params())


@given(st.integers(0, 2**32 - 1))
def test_control_set_well_formed_and_monotone(seed):
    rng = np.random.default_rng(seed)
    p = rng.normal(scale=5, size=(9, 32))
    d = rng.normal(size=(9, 32))
    p[rng.random((9, 32)) < 0.1] = -np.inf
    prm = params(w_theta=1, band=1)
    m = control_set(IspField(p, d), prm)
    assert ((m.a_min <= m.a_max) & (m.a_max <= GAMMA_U.c_hi)).all()
    # lowering potential anywhere never raises a_max
    m2 = control_set(IspField(p - np.abs(rng.normal(size=p.shape)), d), prm)
    assert (m2.a_max <= m.a_max).all()


# -- biasing fields -----------------------------------------------------------------


SHAPE = ConstraintParams(0.0, 0.0, 1.0, 0.3, 1.0)


def test_guidance_bias_peak_and_symmetry():
    theta = column_to_steering(12, CAM)
    f = bias_field_from_guidance(ControlCommand(theta, 0.0), (32, 9), CAM, SHAPE)
    row = f.potential[0]
    assert int(np.argmax(row)) == steering_to_column(theta, CAM) == 12
    for k in range(1, 12):
        assert row[12 + k] == row[12 - k]
    assert (np.diff(row[:13]) > 0).all() and (np.diff(row[12:]) < 0).all()
    assert len(asymptotic_region(f)) == 0
    assert (f.potential == row).all()


def test_guidance_bias_out_of_fov():
    with pytest.raises(ThetaOutOfFov):
        bias_field_from_guidance(ControlCommand(1.5, 0.0), (32, 9), CAM, SHAPE)


def test_control_set_bias():
    uniform = bias_field_from_control_set(ControlSetMap(-1.0, np.full(32, 0.4)), (32, 9))
    assert np.unique(uniform.potential).size == 1
    a_max = np.random.default_rng(5).uniform(-1, 1, 32)
    f = bias_field_from_control_set(ControlSetMap(-1.0, a_max), (32, 9))
    assert (np.argsort(f.potential[3], kind="stable") == np.argsort(a_max, kind="stable")).all()
    assert len(asymptotic_region(f)) == 0
    braking = bias_field_from_control_set(ControlSetMap(-1.0, np.full(32, -1.0)), (32, 9))
    assert (braking.potential == braking.potential.min()).all()
    with pytest.raises(DimensionMismatch):
        bias_field_from_control_set(ControlSetMap(-1.0, np.zeros(5)), (32, 9))


# -- sd_control ----------------------------------------------------------------------


def test_open_scene_follows_guidance():
    cmd = sd_control(ControlCommand(0.0, 0.2), IspField.full(32, 9, -1e-3), params(), CAM)
    assert cmd.theta == column_to_steering(16, CAM)
    assert cmd.a == 0.2


def test_obstacle_band_avoided_regardless_of_bias():
    p = np.full((9, 32), -0.5)
    p[:, 10:23] = -np.inf
    for gain in (1.0, 1e3, 1e9):
        prm = params(control_bias_gain=gain, bias_shape=ConstraintParams(0.0, 0.0, 1e9, 0.01, 1.0))
        d = decide(ControlCommand(0.0, 0.0), IspField(p), prm, CAM)
        assert not 10 <= d.i_star < 23


def test_all_neginf_brakes():
    d = decide(ControlCommand(0.1, 0.5), IspField.full(32, 9, -np.inf), params(), CAM)
    assert d.command.a == GAMMA_U.c_lo
    assert d.i_star == steering_to_column(0.1, CAM)
    assert d.num_neginf_columns == 32


def test_tie_break_prefers_desired_then_smaller():
    # two identical clear gaps equidistant from the desired column
    p = np.full((9, 32), -np.inf)
    p[:, 6] = p[:, 26] = -1.0
    d = decide(ControlCommand(0.0, 0.0), IspField(p), params(w_theta=1), CAM)
    assert d.i_star == 6


def test_accel_clamped_into_column_interval():
    p = np.full((9, 32), -0.8)
    prm = params()
    d = decide(ControlCommand(0.0, 1.0), IspField(p), prm, CAM)
    assert d.command.a == d.a_max_at_istar < 1.0
    d = decide(ControlCommand(0.0, -5.0), IspField(p), prm, CAM)
    assert d.command.a == GAMMA_U.c_lo


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        sd_control(ControlCommand(0.0, 0.0), IspField.full(31, 9), params(), CAM)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-9, 9))
def test_hard_constraints_dominate(seed, log_gain):
    rng = np.random.default_rng(seed)
    p = rng.normal(scale=10, size=(9, 32))
    p[rng.random((9, 32)) < rng.uniform(0, 0.6)] = -np.inf
    gain = 10.0 ** log_gain
    prm = params(w_theta=int(rng.choice([1, 3, 5])), control_bias_gain=gain,
                 bias_shape=ConstraintParams(0.0, 0.0, gain, 0.1, 1.0))
    f = IspField(p, rng.normal(size=(9, 32)))
    theta = column_to_steering(int(rng.integers(32)), CAM)
    d = decide(ControlCommand(theta, 0.0), f, prm, CAM)
    reduced = [pt.potential.kind for pt in min_reduce_band(f, prm.h, prm.band)]
    if all(k == Kind.NEG_INF for k in reduced):
        assert d.command.a == GAMMA_U.c_lo
    else:
        assert reduced[d.i_star] != Kind.NEG_INF


@given(st.integers(0, 2**32 - 1), st.floats(1e-6, 1e6))
def test_scaled_bias_keeps_neginf_columns(seed, s):
    rng = np.random.default_rng(seed)
    p = rng.normal(size=(9, 32))
    p[rng.random((9, 32)) < 0.2] = -np.inf
    f = IspField(p)
    bias = bias_field_from_guidance(ControlCommand(0.0, 0.0), (32, 9), CAM, SHAPE)
    base = [pt.potential == NEG_INF for pt in min_reduce_band(field_add(f, bias), 4, 3)]
    scaled = [pt.potential == NEG_INF for pt in min_reduce_band(field_add(f, field_scale(s, bias)), 4, 3)]
    assert base == scaled
