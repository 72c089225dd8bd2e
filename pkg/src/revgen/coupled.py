"""Two-word carry-coupled generators (the ``rund`` family) and their reversal.

The state is a pair of ``k``-bit words ``(x, y)``. One forward step is::

    i      = a*x + c
    x'     = i mod m
    carry  = i div m
    y'     = (e*x + a*y + carry) mod m        with e = (a + b) mod m

so ``x`` evolves as a plain affine generator and ``y`` is an affine function
of ``y`` shifted by a term that depends only on the old ``x``. That
triangular shape is what makes the step invertible: recover the old ``x``
from the new one, recompute the carry, then solve for the old ``y``.
"""
from __future__ import annotations

from array import array
from dataclasses import dataclass

from revgen.affine import AffineGenerator, check_word_bits, mod_inverse_pow2
from revgen.errors import InvalidGenerator, PeriodMismatch, RangeError, ResourceLimit

MAX_SWEEP_BITS = 16


@dataclass(frozen=True)
class CoupledState:
    x: int
    y: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass(frozen=True)
class CoupledGenerator:
    """Carry-coupled generator with multiplier ``a``, increment ``c`` and shear ``b``."""

    a: int
    c: int
    b: int
    word_bits: int

    def __post_init__(self) -> None:
        check_word_bits(self.word_bits)
        m = self.modulus
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not 0 <= v < m:
                raise RangeError(f"{name}={v} outside [0, {m})")
        if self.a % 2 == 0:
            raise InvalidGenerator(f"multiplier a={self.a} must be odd")

    @property
    def modulus(self) -> int:
        return 1 << self.word_bits

    @property
    def mask(self) -> int:
        return (1 << self.word_bits) - 1

    @property
    def e(self) -> int:
        """Effective coupling of the old ``x`` into the new ``y``."""
        return (self.a + self.b) & self.mask

    @property
    def x_generator(self) -> AffineGenerator:
        return AffineGenerator(self.a, self.c, self.word_bits)

    def check_state(self, s: CoupledState) -> CoupledState:
        m = self.modulus
        if not (0 <= s.x < m and 0 <= s.y < m):
            raise RangeError(f"state {s.as_tuple()} outside [0, {m})^2")
        return s

    def step(self, s: CoupledState) -> CoupledState:
        k, mask = self.word_bits, self.mask
        i = self.a * s.x + self.c
        return CoupledState(i & mask, (self.e * s.x + self.a * s.y + (i >> k)) & mask)

    def output(self, s: CoupledState) -> float:
        return output(self, s)

    def reverse(self) -> ReversedCoupledGenerator:
        return reverse_coupled(self)

    def to_dict(self) -> dict[str, int]:
        return {"a": self.a, "c": self.c, "b": self.b, "k": self.word_bits}

    @classmethod
    def from_dict(cls, data: dict) -> CoupledGenerator:
        return cls(int(data["a"]), int(data["c"]), int(data["b"]), int(data["k"]))


@dataclass(frozen=True)
class ReversedCoupledGenerator:
    """Everything needed to step a :class:`CoupledGenerator` backward."""

    a_inv: int
    c_rev: int
    e: int
    a: int
    c: int
    word_bits: int

    @property
    def modulus(self) -> int:
        return 1 << self.word_bits

    @property
    def mask(self) -> int:
        return (1 << self.word_bits) - 1

    def step(self, s: CoupledState) -> CoupledState:
        k, mask = self.word_bits, self.mask
        old_x = (self.a_inv * s.x + self.c_rev) & mask
        # a*old_x + c - s.x is an exact multiple of m
        carry = (self.a * old_x + self.c - s.x) >> k
        old_y = (self.a_inv * (s.y - self.e * old_x - carry)) & mask
        return CoupledState(old_x, old_y)

    def to_dict(self) -> dict[str, int]:
        return {
            "a_inv": self.a_inv,
            "c_rev": self.c_rev,
            "e": self.e,
            "a": self.a,
            "c": self.c,
            "k": self.word_bits,
        }


RUND = CoupledGenerator(a=1029, c=1731, b=507, word_bits=11)
DEFAULT_SEED = CoupledState(0, 0)


def step_forward(gen: CoupledGenerator, s: CoupledState) -> CoupledState:
    return gen.step(gen.check_state(s))


def output(gen: CoupledGenerator, s: CoupledState) -> float:
    """Map a state to ``(x + m*y) / m**2`` in [0, 1).

    Exact in binary floating point because the numerator has at most
    ``2*k <= 52`` bits for ``k <= 26``.
    """
    k = gen.word_bits
    return (s.x + (s.y << k)) / float(1 << (2 * k))


def reverse_coupled(gen: CoupledGenerator) -> ReversedCoupledGenerator:
    a_inv = mod_inverse_pow2(gen.a, gen.word_bits)
    return ReversedCoupledGenerator(
        a_inv=a_inv,
        c_rev=(-a_inv * gen.c) & gen.mask,
        e=gen.e,
        a=gen.a,
        c=gen.c,
        word_bits=gen.word_bits,
    )


def step_backward(rev: ReversedCoupledGenerator, s: CoupledState) -> CoupledState:
    m = rev.modulus
    if not (0 <= s.x < m and 0 <= s.y < m):
        raise RangeError(f"state {s.as_tuple()} outside [0, {m})^2")
    return rev.step(s)


@dataclass(frozen=True)
class PeriodReport:
    claimed_period: int
    observed_period: int
    all_states_visited: bool
    distinct_count: int

    def to_dict(self) -> dict:
        return {
            "claimed_period": self.claimed_period,
            "observed_period": self.observed_period,
            "all_states_visited": self.all_states_visited,
            "distinct_count": self.distinct_count,
        }


def verify_period(gen: CoupledGenerator, seed: CoupledState = DEFAULT_SEED) -> PeriodReport:
    """Iterate from ``seed`` until it recurs, marking every state in a bitmap.

    The claimed period is the size of the full state space, ``m**2``.
    Iteration also stops if a state other than the seed repeats, which
    would mean the step is not a bijection.
    """
    k = gen.word_bits
    if k > MAX_SWEEP_BITS:
        raise ResourceLimit(f"exhaustive sweep supports k <= {MAX_SWEEP_BITS}, got {k}")
    gen.check_state(seed)
    a, c, e, mask = gen.a, gen.c, gen.e, gen.mask
    n_states = 1 << (2 * k)
    seen = bytearray(max(1, n_states >> 3))
    x0, y0 = seed.x, seed.y
    x, y = x0, y0
    s = x0 | (y0 << k)
    seen[s >> 3] |= 1 << (s & 7)
    distinct = 1
    period = 0
    steps = 0
    while steps < n_states:
        i = a * x + c
        x, y = i & mask, (e * x + a * y + (i >> k)) & mask
        steps += 1
        if x == x0 and y == y0:
            period = steps
            break
        s = x | (y << k)
        j = s >> 3
        bit = 1 << (s & 7)
        v = seen[j]
        if v & bit:
            break
        seen[j] = v | bit
        distinct += 1
    return PeriodReport(
        claimed_period=n_states,
        observed_period=period,
        all_states_visited=distinct == n_states,
        distinct_count=distinct,
    )


def _typecode(word_bits: int) -> str:
    return "H" if word_bits <= 16 else "Q"


def forward_states(gen: CoupledGenerator, seed: CoupledState, n: int) -> tuple[array, array]:
    """Return arrays ``xs, ys`` with ``(xs[i-1], ys[i-1])`` the state after ``i`` steps."""
    gen.check_state(seed)
    k, a, c, e, mask = gen.word_bits, gen.a, gen.c, gen.e, gen.mask
    tc = _typecode(k)
    xs = array(tc, bytes(array(tc).itemsize * n))
    ys = array(tc, xs)
    x, y = seed.x, seed.y
    for idx in range(n):
        i = a * x + c
        x, y = i & mask, (e * x + a * y + (i >> k)) & mask
        xs[idx] = x
        ys[idx] = y
    return xs, ys


def backward_states(rev: ReversedCoupledGenerator, seed: CoupledState, n: int) -> tuple[array, array]:
    """Backward counterpart of :func:`forward_states`."""
    k, a, c, e, mask = rev.word_bits, rev.a, rev.c, rev.e, rev.mask
    a_inv, c_rev = rev.a_inv, rev.c_rev
    tc = _typecode(k)
    xs = array(tc, bytes(array(tc).itemsize * n))
    ys = array(tc, xs)
    x, y = seed.x, seed.y
    for idx in range(n):
        ox = (a_inv * x + c_rev) & mask
        y = (a_inv * (y - e * ox - ((a * ox + c - x) >> k))) & mask
        x = ox
        xs[idx] = x
        ys[idx] = y
    return xs, ys


@dataclass(frozen=True)
class PalindromeResult:
    ok: bool
    first_mismatch: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_palindrome(
    gen: CoupledGenerator, seed: CoupledState = DEFAULT_SEED, n: int | None = None
) -> PalindromeResult:
    """Check that the backward sequence is the forward sequence read in reverse.

    With ``f(i)`` and ``b(i)`` the states after ``i`` forward and backward
    steps from ``seed``, checks ``f(i) == b(n - i)`` for ``1 <= i <= n - 1``
    and ``f(n) == b(n) == seed``. ``n`` defaults to the full state-space size.
    ``first_mismatch`` is the smallest failing ``i``.
    """
    if n is None:
        n = gen.modulus ** 2
    if n < 1:
        raise RangeError(f"n must be >= 1, got {n}")
    fx, fy = forward_states(gen, seed, n)
    if (fx[n - 1], fy[n - 1]) != seed.as_tuple():
        raise PeriodMismatch(
            f"forward state after {n} steps is {(fx[n - 1], fy[n - 1])}, not seed {seed.as_tuple()}"
        )
    bx, by = backward_states(reverse_coupled(gen), seed, n)
    if (bx[n - 1], by[n - 1]) != seed.as_tuple():
        return PalindromeResult(False, n)
    # f(i) sits at index i-1; b(n-i) at index n-i-1, so b reversed over 1..n-1
    fwd_x, fwd_y = fx[: n - 1], fy[: n - 1]
    rev_x, rev_y = bx[n - 2 :: -1] if n > 1 else bx[:0], by[n - 2 :: -1] if n > 1 else by[:0]
    if fwd_x == rev_x and fwd_y == rev_y:
        return PalindromeResult(True)
    for i in range(1, n):
        if fx[i - 1] != bx[n - i - 1] or fy[i - 1] != by[n - i - 1]:
            return PalindromeResult(False, i)
    raise AssertionError("unreachable")
