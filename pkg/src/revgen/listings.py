"""Line-by-line Python transcriptions of the original FORTRAN listings.

These deliberately keep FORTRAN integer semantics (``mod`` and ``/`` both
truncate toward zero) and the hard-coded constants, so they act as an
independent reference for :mod:`revgen.coupled`, not a reuse of it.
"""
from __future__ import annotations

from collections.abc import Iterator

ITEMS = 4194304


def fmod(a: int, b: int) -> int:
    """FORTRAN ``mod``: result takes the sign of ``a``."""
    return a - b * fdiv(a, b)


def fdiv(a: int, b: int) -> int:
    """FORTRAN integer division, truncating toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def rund(intx: int, inty: int) -> tuple[float, int, int]:
    """One call of ``function rund(intx,inty)``; returns ``(rund, intx, inty)``."""
    i = 1029 * intx + 1731
    j = i + 1029 * inty + 507 * intx - 1731
    intx = fmod(i, 2048)
    j = j + fdiv(i - intx, 2048)
    inty = fmod(j, 2048)
    value = (intx + 2048 * inty) / 4194304.0
    return value, intx, inty


def next_word(it: int) -> int:
    return fmod(1029 * it + 1731, 2048)


def last_word(j: int) -> int:
    return fmod(205 * j + 1497, 2048)


def forward_listing(n: int = ITEMS, intx: int = 0, inty: int = 0) -> Iterator[tuple[int, int]]:
    """First loop of the verification program: yields ``(forwx(n), forwy(n))``."""
    for _ in range(n):
        i = 1029 * intx + 1731
        j = i + 1029 * inty + 507 * intx - 1731
        intx = fmod(i, 2048)
        j = j + fdiv(i - intx, 2048)
        inty = fmod(j, 2048)
        yield intx, inty


def backward_listing(n: int = ITEMS, intx: int = 0, inty: int = 0) -> Iterator[tuple[int, int]]:
    """Second loop of the verification program: yields ``(backx(n), backy(n))``."""
    items = ITEMS
    for _ in range(n):
        oldx = fmod(205 * intx + 1497, 2048)
        inty = inty + items - 1536 * oldx - fdiv(1029 * oldx + 1731 - intx, 2048)
        inty = fmod(205 * inty, 2048)
        intx = oldx
        yield intx, inty
