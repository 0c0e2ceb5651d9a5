"""Image space potential fields and their closed algebra.

A field is a fixed-size grid aligned with the camera image: ``width`` columns
by ``height`` rows, each cell a (potential, potential_dot) pair of extended
reals that all conform to one polarity.  Coordinates are ``(col, row)`` with
the origin at the top-left pixel, as in the image.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from . import extended_real as er
from .errors import (
    BandOutOfBounds,
    DimensionMismatch,
    InvalidScalar,
    PolarityMismatch,
)
from .extended_real import ExtendedReal, Kind, Polarity


class PotentialPoint(NamedTuple):
    potential: ExtendedReal
    potential_dot: ExtendedReal


@dataclass(frozen=True)
class RegionOfInterest:
    x: int
    y: int
    w: int
    h: int

    def fits(self, width: int, height: int) -> bool:
        return (
            self.w >= 1 and self.h >= 1 and self.x >= 0 and self.y >= 0
            and self.x + self.w <= width and self.y + self.h <= height
        )


@dataclass(frozen=True)
class AsymptoticRegion:
    """Set of ``(col, row)`` pixels whose potential is infinite."""

    coords: frozenset

    def __contains__(self, item) -> bool:
        return tuple(item) in self.coords

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(sorted(self.coords))

    def __or__(self, other: "AsymptoticRegion") -> "AsymptoticRegion":
        return AsymptoticRegion(self.coords | other.coords)

    def __le__(self, other: "AsymptoticRegion") -> bool:
        return self.coords <= other.coords

    def __ge__(self, other: "AsymptoticRegion") -> bool:
        return self.coords >= other.coords


class ScalarField:
    """Grid of strictly positive, finite weights for :func:`field_hadamard`."""

    def __init__(self, values):
        values = np.array(values, dtype=np.float64, ndmin=2)
        if values.ndim != 2 or values.size == 0:
            raise DimensionMismatch("scalar field must be a non-empty 2D grid")
        if not (np.isfinite(values).all() and (values > 0).all()):
            raise InvalidScalar("scalar field weights must all lie in (0, +inf)")
        values.setflags(write=False)
        self.values = values

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


class IspField:
    """Constant-size potential field over the image plane.

    ``potential`` and ``potential_dot`` are accepted as float grids of shape
    ``(height, width)``; IEEE infinities in them mark infinite cells, which are
    stored as tagged values.  Fields are immutable.
    """

    __slots__ = ("_pk", "_pv", "_dk", "_dv", "polarity", "rois")

    def __init__(self, potential, potential_dot=None, polarity: Polarity = Polarity.NEGATIVE,
                 rois: Sequence[RegionOfInterest] = ()):
        potential = np.array(potential, dtype=np.float64, ndmin=2)
        if potential_dot is None:
            potential_dot = np.zeros_like(potential)
        potential_dot = np.array(potential_dot, dtype=np.float64, ndmin=2)
        pk, pv = er.encode(potential)
        dk, dv = er.encode(potential_dot)
        self._init(pk, pv, dk, dv, polarity, rois)

    @classmethod
    def _from_parts(cls, pk, pv, dk, dv, polarity, rois) -> "IspField":
        f = cls.__new__(cls)
        f._init(pk, pv, dk, dv, polarity, rois)
        return f

    def _init(self, pk, pv, dk, dv, polarity, rois):
        if pk.ndim != 2 or pk.size == 0:
            raise DimensionMismatch("field must be a non-empty 2D grid")
        if dk.shape != pk.shape:
            raise DimensionMismatch(
                f"potential_dot shape {dk.shape} differs from potential shape {pk.shape}")
        polarity = Polarity(polarity)
        er.check_array(pk, polarity)
        er.check_array(dk, polarity)
        rois = tuple(rois)
        for roi in rois:
            if not roi.fits(pk.shape[1], pk.shape[0]):
                raise DimensionMismatch(f"{roi} lies outside a {pk.shape[1]}x{pk.shape[0]} field")
        for a in (pk, pv, dk, dv):
            a.setflags(write=False)
        self._pk, self._pv, self._dk, self._dv = pk, pv, dk, dv
        self.polarity = polarity
        self.rois = rois

    @classmethod
    def full(cls, width: int, height: int, potential: float = 0.0, potential_dot: float = 0.0,
             polarity: Polarity = Polarity.NEGATIVE, rois=()) -> "IspField":
        return cls(np.full((height, width), float(potential)),
                   np.full((height, width), float(potential_dot)), polarity, rois)

    @property
    def width(self) -> int:
        return self._pk.shape[1]

    @property
    def height(self) -> int:
        return self._pk.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._pk.shape

    @property
    def potential(self) -> np.ndarray:
        """Float copy of the potentials, infinite cells as IEEE infinities."""
        return er.decode(self._pk, self._pv)

    @property
    def potential_dot(self) -> np.ndarray:
        return er.decode(self._dk, self._dv)

    def parts(self):
        """The encoded ``(kind, value)`` arrays for potential and potential_dot."""
        return self._pk, self._pv, self._dk, self._dv

    def cell(self, col: int, row: int) -> PotentialPoint:
        return PotentialPoint(
            ExtendedReal(Kind(int(self._pk[row, col])), float(self._pv[row, col])),
            ExtendedReal(Kind(int(self._dk[row, col])), float(self._dv[row, col])),
        )

    def points(self) -> Iterator[tuple[int, int, PotentialPoint]]:
        """Row-major iteration over ``(col, row, point)``."""
        for row in range(self.height):
            for col in range(self.width):
                yield col, row, self.cell(col, row)

    def infinite_mask(self) -> np.ndarray:
        return self._pk != Kind.FINITE

    def __eq__(self, other):
        if not isinstance(other, IspField):
            return NotImplemented
        return (
            self.polarity is other.polarity and self.shape == other.shape
            and all(np.array_equal(a, b) for a, b in zip(self.parts(), other.parts()))
        )

    __hash__ = None

    def __repr__(self) -> str:
        n_inf = int(self.infinite_mask().sum())
        return f"IspField({self.width}x{self.height}, {self.polarity.value}, {n_inf} infinite cells)"


def _same_shape(a, b) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"field shapes differ: {a.shape} vs {b.shape}")


def field_add(f1: IspField, f2: IspField) -> IspField:
    """Elementwise extended addition; ROIs come from ``f1``."""
    _same_shape(f1, f2)
    if f1.polarity is not f2.polarity:
        raise PolarityMismatch(
            f"cannot add a {f1.polarity.value} field to a {f2.polarity.value} field")
    p = f1.polarity
    pk1, pv1, dk1, dv1 = f1.parts()
    pk2, pv2, dk2, dv2 = f2.parts()
    pk, pv = er.add_arrays(pk1, pv1, pk2, pv2, p)
    dk, dv = er.add_arrays(dk1, dv1, dk2, dv2, p)
    return IspField._from_parts(pk, pv, dk, dv, p, f1.rois)


def field_scale(s: float, f: IspField) -> IspField:
    s = er.check_scalar(s)
    pk, pv, dk, dv = f.parts()
    pk, pv = er.scale_arrays(s, pk, pv, f.polarity)
    dk, dv = er.scale_arrays(s, dk, dv, f.polarity)
    return IspField._from_parts(pk, pv, dk, dv, f.polarity, f.rois)


def field_hadamard(w: ScalarField, f: IspField) -> IspField:
    """Multiply each cell by its own positive weight."""
    if not isinstance(w, ScalarField):
        w = ScalarField(w)
    _same_shape(w.values, f)
    pk, pv, dk, dv = f.parts()
    pk, pv = er.scale_arrays(w.values, pk, pv, f.polarity)
    dk, dv = er.scale_arrays(w.values, dk, dv, f.polarity)
    return IspField._from_parts(pk, pv, dk, dv, f.polarity, f.rois)


def asymptotic_region(f: IspField) -> AsymptoticRegion:
    rows, cols = np.nonzero(f.infinite_mask())
    return AsymptoticRegion(frozenset(zip(cols.tolist(), rows.tolist())))


def band_rows(height: int, h: int, band: int) -> tuple[int, int]:
    """Half-open row range ``[start, stop)`` of a band centred on row ``h``.

    Even bands extend one row further below the horizon than above it.
    """
    if band < 1:
        raise BandOutOfBounds(f"band must be at least one row, got {band}")
    start = h - (band - 1) // 2
    stop = start + band
    if start < 0 or stop > height:
        raise BandOutOfBounds(
            f"band of {band} rows around row {h} leaves a field of height {height}")
    return start, stop


class Profile(NamedTuple):
    """Per-column encoded (kind, value) arrays produced by a reduction."""

    pk: np.ndarray
    pv: np.ndarray
    dk: np.ndarray
    dv: np.ndarray

    def key(self) -> np.ndarray:
        return er.order_key(self.pk, self.pv)

    def points(self) -> list[PotentialPoint]:
        return [
            PotentialPoint(ExtendedReal(Kind(int(pk)), float(pv)), ExtendedReal(Kind(int(dk)), float(dv)))
            for pk, pv, dk, dv in zip(self.pk, self.pv, self.dk, self.dv)
        ]


def reduce_band(f: IspField, h: int, band: int) -> Profile:
    start, stop = band_rows(f.height, h, band)
    pk, pv, dk, dv = (a[start:stop] for a in f.parts())
    # argmin returns the first minimum, i.e. the smallest row on ties
    rows = np.argmin(er.order_key(pk, pv), axis=0)
    cols = np.arange(f.width)
    return Profile(pk[rows, cols], pv[rows, cols], dk[rows, cols], dv[rows, cols])


def min_reduce_band(f: IspField, h: int, band: int = 1) -> list[PotentialPoint]:
    """Per column, the cell of least potential within the row band around ``h``."""
    return reduce_band(f, h, band).points()
