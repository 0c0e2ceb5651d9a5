"""Arithmetic on the affinely extended reals, restricted to one signed infinity.

Infinities are explicit tags rather than IEEE ``inf`` values, so an
indeterminate form such as ``+inf + -inf`` can only be reached through a
polarity violation, which raises.  The array helpers at the bottom operate on
the same tagged encoding (an ``int8`` kind code plus a ``float64`` payload)
and are what :mod:`ispfield.field` uses for whole-field operations.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass
from functools import total_ordering

import numpy as np

from .errors import InvalidScalar, NonFiniteInput, PolarityViolation

FLOAT_MAX = sys.float_info.max


class Kind(enum.IntEnum):
    NEG_INF = -1
    FINITE = 0
    POS_INF = 1


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @property
    def allowed(self) -> Kind:
        """The only infinite kind a value of this polarity may take."""
        return Kind.POS_INF if self is Polarity.POSITIVE else Kind.NEG_INF

    @property
    def forbidden(self) -> Kind:
        return Kind.NEG_INF if self is Polarity.POSITIVE else Kind.POS_INF

    @property
    def infinity(self) -> "ExtendedReal":
        return POS_INF if self is Polarity.POSITIVE else NEG_INF


@total_ordering
@dataclass(frozen=True)
class ExtendedReal:
    """A finite real, ``+inf`` or ``-inf``.

    Use :func:`finite`, :data:`POS_INF` and :data:`NEG_INF` rather than the
    constructor.  Finite payloads are never NaN or an IEEE infinity.
    """

    kind: Kind
    value: float = 0.0

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Kind.FINITE:
            value = float(self.value)
            if not math.isfinite(value):
                raise NonFiniteInput(f"finite payload must be a finite real, got {self.value!r}")
            object.__setattr__(self, "value", value)
        else:
            object.__setattr__(self, "value", 0.0)

    @property
    def is_finite(self) -> bool:
        return self.kind is Kind.FINITE

    @property
    def is_infinite(self) -> bool:
        return self.kind is not Kind.FINITE

    def conforms(self, polarity: Polarity) -> bool:
        return self.kind is not polarity.forbidden

    def __float__(self) -> float:
        if self.kind is Kind.FINITE:
            return self.value
        return math.inf if self.kind is Kind.POS_INF else -math.inf

    def __lt__(self, other):
        if not isinstance(other, ExtendedReal):
            return NotImplemented
        return float(self) < float(other)

    def __str__(self) -> str:
        if self.kind is Kind.POS_INF:
            return "+inf"
        if self.kind is Kind.NEG_INF:
            return "-inf"
        return repr(self.value)

    def __repr__(self) -> str:
        if self.kind is Kind.FINITE:
            return f"Finite({self.value!r})"
        return "PosInf" if self.kind is Kind.POS_INF else "NegInf"


POS_INF = ExtendedReal(Kind.POS_INF)
NEG_INF = ExtendedReal(Kind.NEG_INF)


def finite(value: float) -> ExtendedReal:
    return ExtendedReal(Kind.FINITE, value)


def from_float(x: float) -> ExtendedReal:
    """Lift a float, mapping IEEE infinities onto the tagged infinities."""
    x = float(x)
    if math.isnan(x):
        raise NonFiniteInput("NaN has no extended-real counterpart")
    if x == math.inf:
        return POS_INF
    if x == -math.inf:
        return NEG_INF
    return finite(x)


def parse(token: str) -> ExtendedReal:
    """Inverse of ``str()``: decimal text, ``+inf`` or ``-inf``."""
    token = token.strip()
    if token == "+inf":
        return POS_INF
    if token == "-inf":
        return NEG_INF
    value = float(token)
    if not math.isfinite(value):
        raise ValueError(f"not an extended-real token: {token!r}")
    return finite(value)


def _check(a: ExtendedReal, p: Polarity) -> None:
    if a.kind is p.forbidden:
        raise PolarityViolation(f"{a!r} is not allowed under {p.value} polarity")


def _saturate(x: float, p: Polarity) -> ExtendedReal:
    # Finite overflow in the polarity's direction becomes its infinity; the
    # other direction clamps to the largest representable magnitude.
    if math.isfinite(x):
        return finite(x)
    sign = Kind.POS_INF if x > 0 else Kind.NEG_INF
    if sign is p.allowed:
        return p.infinity
    return finite(math.copysign(FLOAT_MAX, x))


def ext_add(a: ExtendedReal, b: ExtendedReal, p: Polarity) -> ExtendedReal:
    """Add two polarity-conforming extended reals.

    >>> ext_add(NEG_INF, finite(5), Polarity.NEGATIVE)
    NegInf
    """
    _check(a, p)
    _check(b, p)
    if a.is_infinite:
        return a
    if b.is_infinite:
        return b
    return _saturate(a.value + b.value, p)


def check_scalar(s: float) -> float:
    try:
        s = float(s)
    except (TypeError, ValueError):
        raise InvalidScalar(f"scalar must be a real number, got {s!r}") from None
    if not (math.isfinite(s) and s > 0.0):
        raise InvalidScalar(f"scalar must lie in (0, +inf), got {s!r}")
    return s


def ext_scale(s: float, a: ExtendedReal, p: Polarity | None = None) -> ExtendedReal:
    """Multiply by a scalar in (0, +inf); infinities keep their sign.

    ``p`` only matters when a finite product overflows: with a polarity the
    overflow saturates as in :func:`ext_add`, without one it clamps to the
    largest finite magnitude so that no infinity is introduced.
    """
    s = check_scalar(s)
    if p is not None:
        _check(a, p)
    if a.is_infinite:
        return a
    x = s * a.value
    if p is None and not math.isfinite(x):
        return finite(math.copysign(FLOAT_MAX, x))
    return _saturate(x, p)


# -- array encoding ---------------------------------------------------------
#
# A grid of extended reals is a pair (kind: int8, value: float64) of equal
# shape.  value is 0.0 wherever kind != FINITE.


def encode(x) -> tuple[np.ndarray, np.ndarray]:
    """Encode a float array (IEEE infinities marking the infinite cells)."""
    x = np.asarray(x, dtype=np.float64)
    if np.isnan(x).any():
        raise NonFiniteInput("NaN cannot be encoded as an extended real")
    kind = np.zeros(x.shape, dtype=np.int8)
    kind[x == np.inf] = Kind.POS_INF
    kind[x == -np.inf] = Kind.NEG_INF
    value = np.where(kind == Kind.FINITE, x, 0.0)
    return kind, value


def decode(kind: np.ndarray, value: np.ndarray) -> np.ndarray:
    """Float view of an encoded grid, infinite cells as IEEE infinities."""
    return np.where(kind == Kind.FINITE, value, np.where(kind > 0, np.inf, -np.inf))


def check_array(kind: np.ndarray, p: Polarity) -> None:
    if (kind == p.forbidden).any():
        raise PolarityViolation(f"array holds values forbidden under {p.value} polarity")


def _saturate_array(kind: np.ndarray, value: np.ndarray, p: Polarity):
    over = np.isinf(value)
    if not over.any():
        return kind, value
    kind = kind.copy()
    value = value.copy()
    toward = np.where(value > 0, Kind.POS_INF, Kind.NEG_INF)
    promote = over & (toward == p.allowed)
    clamp = over & ~promote
    kind[promote] = p.allowed
    value[promote] = 0.0
    value[clamp] = np.copysign(FLOAT_MAX, value[clamp])
    return kind, value


def add_arrays(ka, va, kb, vb, p: Polarity):
    """Elementwise ``ext_add`` on encoded arrays."""
    check_array(ka, p)
    check_array(kb, p)
    kind = np.where(ka != Kind.FINITE, ka, kb).astype(np.int8)
    with np.errstate(over="ignore"):
        value = np.where(kind == Kind.FINITE, va + vb, 0.0)
    return _saturate_array(kind, value, p)


def scale_arrays(s, kind, value, p: Polarity):
    """Elementwise ``ext_scale``; ``s`` is a scalar or an array of weights."""
    check_array(kind, p)
    with np.errstate(over="ignore"):
        scaled = np.where(kind == Kind.FINITE, value * s, 0.0)
    return _saturate_array(kind.copy(), scaled, p)


def order_key(kind: np.ndarray, value: np.ndarray) -> np.ndarray:
    """Sort key realising -inf < finite < +inf for encoded arrays."""
    return decode(kind, value)
