"""Single-word affine generators ``x -> (a*x + c) mod 2**k`` and their inverses."""
from __future__ import annotations

from dataclasses import dataclass

from revgen.errors import CycleNotFound, InvalidGenerator, RangeError

MAX_WORD_BITS = 62


def check_word_bits(word_bits: int) -> None:
    if not 1 <= word_bits <= MAX_WORD_BITS:
        raise RangeError(f"word_bits must be in [1, {MAX_WORD_BITS}], got {word_bits}")


def mod_inverse_pow2(a: int, word_bits: int) -> int:
    """Return the inverse of odd ``a`` modulo ``2**word_bits``.

    Uses Newton/Hensel lifting: for odd ``a`` the seed ``x = a`` is already
    correct to 3 bits (``a*a == 1 mod 8``) and each step ``x <- x*(2 - a*x)``
    doubles the number of correct low bits.
    """
    check_word_bits(word_bits)
    if a % 2 == 0:
        raise InvalidGenerator(f"multiplier {a} is even and has no inverse mod 2**{word_bits}")
    mask = (1 << word_bits) - 1
    a &= mask
    x = a
    correct = 3
    while correct < word_bits:
        x = (x * (2 - a * x)) & mask
        correct *= 2
    return x & mask


@dataclass(frozen=True)
class AffineGenerator:
    """The map ``x -> (multiplier*x + increment) mod 2**word_bits``."""

    multiplier: int
    increment: int
    word_bits: int

    def __post_init__(self) -> None:
        check_word_bits(self.word_bits)
        m = self.modulus
        if not 0 <= self.multiplier < m or not 0 <= self.increment < m:
            raise RangeError(
                f"multiplier and increment must lie in [0, {m}), "
                f"got a={self.multiplier}, c={self.increment}"
            )
        if self.multiplier % 2 == 0:
            raise InvalidGenerator(f"multiplier {self.multiplier} must be odd")

    @property
    def modulus(self) -> int:
        return 1 << self.word_bits

    @property
    def mask(self) -> int:
        return (1 << self.word_bits) - 1

    def check_word(self, x: int) -> int:
        if not 0 <= x < self.modulus:
            raise RangeError(f"word {x} outside [0, {self.modulus})")
        return x

    def step(self, x: int) -> int:
        return (self.multiplier * x + self.increment) & self.mask

    def step_all(self, xs) -> list[int]:
        """Step every word of ``xs`` once (no range checks)."""
        a, c, mask = self.multiplier, self.increment, self.mask
        return [(a * x + c) & mask for x in xs]

    def reverse(self) -> AffineGenerator:
        return reverse_affine(self)

    def iterate(self, seed: int, n: int) -> list[int]:
        return iterate(self, seed, n)

    def to_dict(self) -> dict[str, int]:
        return {"a": self.multiplier, "c": self.increment, "k": self.word_bits}

    @classmethod
    def from_dict(cls, data: dict) -> AffineGenerator:
        return cls(int(data["a"]), int(data["c"]), int(data["k"]))


# The two single-word generators of the 11-bit example: `next` and its inverse `last`.
NEXT = AffineGenerator(1029, 1731, 11)
LAST = AffineGenerator(205, 1497, 11)


def step(gen: AffineGenerator, x: int) -> int:
    return gen.step(gen.check_word(x))


def reverse_affine(gen: AffineGenerator) -> AffineGenerator:
    """Derive the generator that undoes one step of ``gen``.

    Solving ``y = a*x + c`` for ``x`` gives ``x = a_inv*y - a_inv*c``.
    """
    a_inv = mod_inverse_pow2(gen.multiplier, gen.word_bits)
    return AffineGenerator(a_inv, (-a_inv * gen.increment) & gen.mask, gen.word_bits)


def iterate(gen: AffineGenerator, seed: int, n: int) -> list[int]:
    """Return ``[step(seed), step(step(seed)), ...]`` of length ``n``."""
    if n < 0:
        raise RangeError(f"n must be nonnegative, got {n}")
    x = gen.check_word(seed)
    a, c, mask = gen.multiplier, gen.increment, gen.mask
    out = []
    for _ in range(n):
        x = (a * x + c) & mask
        out.append(x)
    return out


def cycle_length(gen: AffineGenerator, seed: int) -> int:
    """Smallest ``p >= 1`` such that ``p`` steps from ``seed`` return to it."""
    x0 = gen.check_word(seed)
    a, c, mask = gen.multiplier, gen.increment, gen.mask
    cap = 2 * gen.modulus
    x = x0
    for p in range(1, cap + 1):
        x = (a * x + c) & mask
        if x == x0:
            return p
    raise CycleNotFound(f"no return to seed {x0} within {cap} steps")
