"""Text dumps and PGM renderings of ISP fields."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import extended_real as er
from .extended_real import Polarity
from .field import IspField


def _tokens(a: np.ndarray) -> list[str]:
    # same text as str(ExtendedReal) per cell
    return ["+inf" if v == np.inf else "-inf" if v == -np.inf else repr(v) for v in a.ravel().tolist()]


def dumps_field(f: IspField) -> str:
    """Header ``width height polarity`` then ``col row potential potential_dot`` in row-major order."""
    lines = [f"{f.width} {f.height} {f.polarity.value}"]
    rows, cols = np.divmod(np.arange(f.width * f.height), f.width)
    lines += [f"{c} {r} {p} {d}" for c, r, p, d in
              zip(cols.tolist(), rows.tolist(), _tokens(f.potential), _tokens(f.potential_dot))]
    return "\n".join(lines) + "\n"


def loads_field(text: str) -> IspField:
    lines = text.splitlines()
    width, height, polarity = lines[0].split()
    width, height = int(width), int(height)
    potential = np.zeros((height, width))
    potential_dot = np.zeros((height, width))
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != width * height:
        raise ValueError(f"expected {width * height} cell lines, found {len(body)}")
    for ln in body:
        col, row, p, pd = ln.split()
        potential[int(row), int(col)] = float(er.parse(p))
        potential_dot[int(row), int(col)] = float(er.parse(pd))
    return IspField(potential, potential_dot, Polarity(polarity))


def render_pgm(f: IspField) -> bytes:
    """8-bit binary PGM of the potential.

    Finite potentials map affinely onto 1..255 over their own range (a constant
    field renders as 255); infinite cells are 0.
    """
    p = f.potential
    finite = np.isfinite(p)
    img = np.zeros(p.shape, dtype=np.uint8)
    if finite.any():
        lo, hi = p[finite].min(), p[finite].max()
        if hi > lo:
            # halved operands keep the range representable for extreme fields
            scaled = 1.0 + 254.0 * ((0.5 * p[finite] - 0.5 * lo) / (0.5 * hi - 0.5 * lo))
            img[finite] = np.clip(np.rint(scaled), 1, 255).astype(np.uint8)
        else:
            img[finite] = 255
    header = f"P5\n{f.width} {f.height}\n255\n".encode("ascii")
    return header + img.tobytes()


def write_field(f: IspField, stem: str | Path) -> None:
    """Write ``<stem>.txt`` and ``<stem>.pgm``."""
    stem = Path(stem)
    stem.with_suffix(".txt").write_text(dumps_field(f))
    stem.with_suffix(".pgm").write_bytes(render_pgm(f))
