"""Time-reversible maps of the unit square in exact fixed-point arithmetic.

A point ``(q, p)`` is stored as two integers in ``[0, 2**F)`` standing for
the fractions ``q / 2**F`` and ``p / 2**F``. Addition mod 1 becomes integer
addition masked to ``F`` bits, so shears are exact and their reversibility
can be checked bit for bit.

A map ``M`` is time-reversible when ``M(T(M(pt))) == T(pt)`` for every point,
where ``T`` negates the momentum: ``T(q, p) = (q, -p mod 1)``.

The same arithmetic runs on Python ints and on numpy ``uint64`` arrays
(see :class:`PointCloud`), since 64-bit wraparound preserves every residue
mod ``2**F`` for ``F <= 64``.
"""
from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np

from revgen.errors import RangeError

DEFAULT_FRAC_BITS = 32
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class PhasePoint:
    q: int
    p: int
    frac_bits: int = DEFAULT_FRAC_BITS

    def __post_init__(self) -> None:
        if not 1 <= self.frac_bits <= 63:
            raise RangeError(f"frac_bits must be in [1, 63], got {self.frac_bits}")
        size = 1 << self.frac_bits
        if not (0 <= self.q < size and 0 <= self.p < size):
            raise RangeError(f"point ({self.q}, {self.p}) outside [0, {size})^2")

    @classmethod
    def from_floats(cls, q: float, p: float, frac_bits: int = DEFAULT_FRAC_BITS) -> PhasePoint:
        size = 1 << frac_bits
        return cls(int(q * size) % size, int(p * size) % size, frac_bits)

    def as_floats(self) -> tuple[float, float]:
        size = float(1 << self.frac_bits)
        return self.q / size, self.p / size


@dataclass(frozen=True)
class PointCloud:
    """A batch of phase points held as parallel ``uint64`` arrays."""

    q: np.ndarray
    p: np.ndarray
    frac_bits: int = DEFAULT_FRAC_BITS

    @classmethod
    def random(cls, n: int, frac_bits: int = DEFAULT_FRAC_BITS, rng=None) -> PointCloud:
        rng = np.random.default_rng(rng)
        hi = 1 << frac_bits
        q = rng.integers(0, hi, size=n, dtype=np.uint64)
        p = rng.integers(0, hi, size=n, dtype=np.uint64)
        return cls(q, p, frac_bits)

    @classmethod
    def grid(cls, frac_bits: int) -> PointCloud:
        """Every point of the ``2**F x 2**F`` grid."""
        side = np.arange(1 << frac_bits, dtype=np.uint64)
        q, p = np.meshgrid(side, side, indexing="ij")
        return cls(q.ravel(), p.ravel(), frac_bits)

    def __len__(self) -> int:
        return len(self.q)

    def __getitem__(self, i: int) -> PhasePoint:
        return PhasePoint(int(self.q[i]), int(self.p[i]), self.frac_bits)


Points = Union[PhasePoint, PointCloud]


def _rebuild(pt: Points, q, p) -> Points:
    if isinstance(pt, PointCloud):
        return PointCloud(q, p, pt.frac_bits)
    return PhasePoint(q, p, pt.frac_bits)


class ReversibleMap:
    """Base class for maps of the fixed-point unit square."""

    def apply_qp(self, q, p, mask: int):
        raise NotImplementedError

    def __call__(self, pt: Points) -> Points:
        return apply(self, pt)

    def symbol(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ShearQ(ReversibleMap):
    """``q -> q + s*p`` (mod 1)."""

    s: int = 1

    def apply_qp(self, q, p, mask):
        return (q + (self.s & _MASK64) * p) & mask, p

    def symbol(self) -> str:
        return "Q" if self.s == 1 else f"Q{self.s}"


@dataclass(frozen=True)
class ShearP(ReversibleMap):
    """``p -> p + s*q`` (mod 1)."""

    s: int = 1

    def apply_qp(self, q, p, mask):
        return q, (p + (self.s & _MASK64) * q) & mask

    def symbol(self) -> str:
        return "P" if self.s == 1 else f"P{self.s}"


@dataclass(frozen=True)
class ExchangeReflection(ReversibleMap):
    """Swap the coordinates, ``(q, p) -> (p, q)``.

    Note this is *not* reversible under momentum negation: ``T`` does not
    commute with the swap, so :func:`check_reversibility` rejects it.
    """

    def apply_qp(self, q, p, mask):
        return p, q

    def symbol(self) -> str:
        return "X"


@dataclass(frozen=True)
class ReflectQ(ReversibleMap):
    """Position reflection ``(q, p) -> (-q mod 1, p)``, which is T-reversible."""

    def apply_qp(self, q, p, mask):
        return (0 - q) & mask, p

    def symbol(self) -> str:
        return "R"


@dataclass(frozen=True)
class Composite(ReversibleMap):
    """Apply ``maps`` left to right."""

    maps: tuple[ReversibleMap, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise ValueError("Composite needs at least one map")

    def apply_qp(self, q, p, mask):
        for m in self.maps:
            q, p = m.apply_qp(q, p, mask)
        return q, p

    def symbol(self) -> str:
        return "".join(m.symbol() for m in self.maps)


def apply(m: ReversibleMap, pt: Points) -> Points:
    mask = (1 << pt.frac_bits) - 1
    q, p = m.apply_qp(pt.q, pt.p, mask)
    return _rebuild(pt, q, p)


def time_reverse(pt: Points) -> Points:
    """Negate the momentum: ``(q, p) -> (q, -p mod 1)``."""
    mask = (1 << pt.frac_bits) - 1
    return _rebuild(pt, pt.q, (0 - pt.p) & mask)


@dataclass(frozen=True)
class ReversibilityResult:
    ok: bool
    counterexample: PhasePoint | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_reversibility(m: ReversibleMap, pts: PointCloud | Sequence[PhasePoint]) -> ReversibilityResult:
    """Test ``M(T(M(pt))) == T(pt)`` on every sample point."""
    if isinstance(pts, PointCloud):
        if len(pts) == 0:
            raise ValueError("need at least one sample point")
        lhs = apply(m, time_reverse(apply(m, pts)))
        rhs = time_reverse(pts)
        bad = np.flatnonzero((lhs.q != rhs.q) | (lhs.p != rhs.p))
        if bad.size:
            return ReversibilityResult(False, pts[int(bad[0])])
        return ReversibilityResult(True)
    if not pts:
        raise ValueError("need at least one sample point")
    for pt in pts:
        if apply(m, time_reverse(apply(m, pt))) != time_reverse(pt):
            return ReversibilityResult(False, pt)
    return ReversibilityResult(True)


def compose_palindrome(maps: Sequence[ReversibleMap]) -> ReversibleMap:
    """``[Q, P, R] -> QPRPQ``; a single map is returned unchanged."""
    maps = list(maps)
    if not maps:
        raise ValueError("compose_palindrome needs at least one map")
    if len(maps) == 1:
        return maps[0]
    return Composite(tuple(maps + maps[-2::-1]))


_TOKEN = re.compile(r"([QPXR])(-?\d+)?")


def parse_map(text: str) -> ReversibleMap:
    """Parse a word such as ``"QPRPQ"`` or ``"Q2P-3Q2"``.

    ``Q``/``P`` are shears with an optional integer coefficient (default 1),
    ``X`` the coordinate exchange and ``R`` the position reflection.
    """
    text = text.strip()
    maps: list[ReversibleMap] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ValueError(f"cannot parse map {text!r} at position {pos}")
        letter, coef = match.groups()
        if letter in "XR" and coef is not None:
            raise ValueError(f"{letter} takes no coefficient in {text!r}")
        s = int(coef) if coef is not None else 1
        maps.append(
            {"Q": lambda: ShearQ(s), "P": lambda: ShearP(s), "X": ExchangeReflection, "R": ReflectQ}[letter]()
        )
        pos = match.end()
    if not maps:
        raise ValueError("empty map specification")
    return maps[0] if len(maps) == 1 else Composite(tuple(maps))


def orbit(m: ReversibleMap, start: PhasePoint, steps: int) -> list[PhasePoint]:
    """Successive images ``M(start), M(M(start)), ...`` (``steps`` of them)."""
    if steps < 0:
        raise RangeError(f"steps must be nonnegative, got {steps}")
    out = []
    pt = start
    for _ in range(steps):
        pt = apply(m, pt)
        out.append(pt)
    return out


def image_size(m: ReversibleMap, frac_bits: int) -> int:
    """Number of distinct images of the full grid; equals ``4**F`` iff ``m`` is a bijection."""
    cloud = apply(m, PointCloud.grid(frac_bits))
    keys = (cloud.q << np.uint64(frac_bits)) | cloud.p
    return int(np.unique(keys).size)

