"""Hard and soft potential transforms.

The hard transform sends measurements inside a constraint range to ``-inf``
and everything else to a finite potential below the translation ``t_y``.  The
soft transform is a generalised logistic squashing any input into the open
interval ``(c_lo, c_hi)``, so soft information can never create an infinite
potential.  Only negative polarity is produced.

Scalar functions accept floats or :class:`ExtendedReal`.  Infinite inputs are
treated as sentinels and mapped to the transform's limit (``t_y`` for the hard
transform, ``c_hi``/``c_lo`` for the soft one) with a zero derivative.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import extended_real as er
from .errors import DimensionMismatch, InvalidParams, NonFiniteInput, PolarityMismatch
from .extended_real import NEG_INF, ExtendedReal, Polarity
from .field import IspField

# Inputs this close to the hard range from outside count as inside it.
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class ConstraintParams:
    """Parameter pack for one transform.

    ``translation`` shifts the output for the hard transform and the input for
    the soft transform.
    """

    translation: float
    c_lo: float
    c_hi: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("translation", "c_lo", "c_hi", "alpha", "beta"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidParams(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.alpha <= 0:
            raise InvalidParams(f"alpha must be > 0, got {self.alpha!r}")
        if self.beta <= 0:
            raise InvalidParams(f"beta must be > 0, got {self.beta!r}")
        if self.c_lo > self.c_hi:
            raise InvalidParams(f"c_lo ({self.c_lo!r}) must not exceed c_hi ({self.c_hi!r})")

    @property
    def c_mid(self) -> float:
        return 0.5 * (self.c_lo + self.c_hi)

    @property
    def span(self) -> float:
        return self.c_hi - self.c_lo

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ConstraintParams":
        return cls(**d)


def _as_input(i) -> float:
    """Float view of a transform input; NaN is rejected, infinities kept."""
    if isinstance(i, ExtendedReal):
        return float(i)
    try:
        x = float(i)
    except (TypeError, ValueError):
        raise NonFiniteInput(f"transform input must be real, got {i!r}") from None
    if math.isnan(x):
        raise NonFiniteInput("transform input is NaN")
    return x


def _finite_dot(x: float) -> float:
    if math.isnan(x):
        raise NonFiniteInput("time derivative is NaN")
    if math.isinf(x):
        raise NonFiniteInput("time derivative must be finite")
    return x


def _hard_distance(x: float, g: ConstraintParams) -> float | None:
    """Distance from ``x`` to the hard range, or None when inside it."""
    if x < g.c_lo - SINGULAR_TOL:
        return g.c_lo - x
    if x > g.c_hi + SINGULAR_TOL:
        return x - g.c_hi
    return None


def hard_transform(i, g: ConstraintParams) -> ExtendedReal:
    x = _as_input(i)
    if math.isinf(x):
        return er.finite(g.translation)
    d = _hard_distance(x, g)
    if d is None:
        return NEG_INF
    try:
        value = g.translation - g.alpha * d ** (-g.beta)
    except OverflowError:
        return NEG_INF
    return NEG_INF if math.isinf(value) else er.finite(value)


def hard_transform_dot(i, i_dot, g: ConstraintParams) -> ExtendedReal:
    x = _as_input(i)
    if math.isinf(x):
        return er.finite(0.0)
    x_dot = _finite_dot(float(i_dot))
    d = _hard_distance(x, g)
    if d is None:
        return er.finite(0.0)
    try:
        rate = g.alpha * g.beta * d ** (-g.beta - 1.0)
    except OverflowError:
        rate = math.inf
    if x_dot == 0.0:
        return er.finite(0.0)
    # below the range the distance shrinks as the input grows, flipping the sign
    if x < g.c_lo:
        rate = -rate
    return er.finite(_clamp(rate * x_dot))


def _clamp(x: float) -> float:
    if math.isinf(x):
        return math.copysign(er.FLOAT_MAX, x)
    return x


def _softplus(z: float) -> float:
    """log(1 + e^z) without overflow."""
    if z > 0:
        return z + math.log1p(math.exp(-z))
    return math.log1p(math.exp(z))


def _soft_exponent(x: float, g: ConstraintParams) -> float:
    return -g.alpha * (x - g.translation - g.c_mid)


def soft_transform(i, g: ConstraintParams) -> float:
    """Generalised logistic onto ``(c_lo, c_hi)``.

    For finite input the result is strictly inside the interval up to float
    resolution; the endpoints are returned for the infinite sentinels.
    """
    x = _as_input(i)
    if x == math.inf:
        return g.c_hi
    if x == -math.inf:
        return g.c_lo
    z = _soft_exponent(x, g)
    return g.c_lo + g.span * math.exp(-_softplus(z) / g.beta)


def soft_transform_dot(i, i_dot, g: ConstraintParams) -> float:
    x = _as_input(i)
    x_dot = _finite_dot(float(i_dot))
    if math.isinf(x):
        return 0.0
    z = _soft_exponent(x, g)
    # e^z / (1 + e^z)^(1 + 1/beta), evaluated in log space
    shape = math.exp(z - (1.0 + 1.0 / g.beta) * _softplus(z))
    return g.alpha * g.span * shape / g.beta * x_dot


# -- image-wise -------------------------------------------------------------


def _grids(image, image_dot):
    image = np.array(image, dtype=np.float64, ndmin=2)
    if image_dot is None:
        image_dot = np.zeros_like(image)
    image_dot = np.array(image_dot, dtype=np.float64, ndmin=2)
    if image.shape != image_dot.shape:
        raise DimensionMismatch(f"image {image.shape} and derivative {image_dot.shape} differ")
    if np.isnan(image).any():
        raise NonFiniteInput("image contains NaN")
    sentinel = np.isinf(image)
    if not np.isfinite(image_dot[~sentinel]).all():
        raise NonFiniteInput("image derivative must be finite wherever the image is")
    return image, image_dot, sentinel


def _require_negative(polarity) -> None:
    if Polarity(polarity) is not Polarity.NEGATIVE:
        raise PolarityMismatch("transforms only produce negative-polarity fields")


def apply_hard(image, image_dot, g: ConstraintParams,
               polarity: Polarity = Polarity.NEGATIVE) -> IspField:
    """Pixel-wise hard transform; infinite image values act as sentinels."""
    _require_negative(polarity)
    image, image_dot, sentinel = _grids(image, image_dot)
    below = ~sentinel & (image < g.c_lo - SINGULAR_TOL)
    above = ~sentinel & (image > g.c_hi + SINGULAR_TOL)
    inside = ~sentinel & ~below & ~above
    dist = np.where(below, g.c_lo - image, np.where(above, image - g.c_hi, 1.0))
    outside = below | above
    with np.errstate(over="ignore"):
        potential = np.where(outside, g.translation - g.alpha * dist ** (-g.beta), g.translation)
        rate = np.minimum(g.alpha * g.beta * dist ** (-g.beta - 1.0), er.FLOAT_MAX)
        rate = np.where(below, -rate, rate)
        dot = np.where(outside, rate * np.where(outside, image_dot, 0.0), 0.0)
    potential[inside] = -np.inf
    dot = np.clip(dot, -er.FLOAT_MAX, er.FLOAT_MAX)
    return IspField(potential, dot, Polarity.NEGATIVE)


def soft_array(image, g: ConstraintParams) -> np.ndarray:
    """Soft transform of a float array, with the infinite-sentinel limits."""
    x = np.asarray(image, dtype=np.float64)
    z = -g.alpha * (np.where(np.isfinite(x), x, 0.0) - g.translation - g.c_mid)
    out = g.c_lo + g.span * np.exp(-np.logaddexp(0.0, z) / g.beta)
    out = np.where(x == np.inf, g.c_hi, out)
    return np.where(x == -np.inf, g.c_lo, out)


def soft_dot_array(image, image_dot, g: ConstraintParams) -> np.ndarray:
    x = np.asarray(image, dtype=np.float64)
    finite = np.isfinite(x)
    z = -g.alpha * (np.where(finite, x, 0.0) - g.translation - g.c_mid)
    shape = np.exp(z - (1.0 + 1.0 / g.beta) * np.logaddexp(0.0, z))
    dot = g.alpha * g.span * shape / g.beta * np.where(finite, image_dot, 0.0)
    return np.where(finite, dot, 0.0)


def apply_soft(image, image_dot, g: ConstraintParams,
               polarity: Polarity = Polarity.NEGATIVE) -> IspField:
    """Pixel-wise soft transform; the result never has infinite cells."""
    _require_negative(polarity)
    image, image_dot, _ = _grids(image, image_dot)
    return IspField(soft_array(image, g), soft_dot_array(image, image_dot, g), Polarity.NEGATIVE)
