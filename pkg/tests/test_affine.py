import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from revgen.affine import (
    LAST,
    NEXT,
    AffineGenerator,
    cycle_length,
    iterate,
    mod_inverse_pow2,
    reverse_affine,
    step,
)
from revgen.errors import InvalidGenerator, RangeError


def brute_inverse(a, k):
    m = 1 << k
    return next(x for x in range(m) if a * x % m == 1)


odd_generators = st.integers(1, 62).flatmap(
    lambda k: st.tuples(
        st.integers(0, (1 << k) - 1).map(lambda a: a | 1),
        st.integers(0, (1 << k) - 1),
        st.just(k),
    )
)


class TestModInverse:
    def test_reference_multiplier(self):
        assert mod_inverse_pow2(1029, 11) == 205

    @pytest.mark.parametrize("k", [1, 2, 3, 11, 32, 62])
    def test_identity(self, k):
        assert mod_inverse_pow2(1, k) == 1

    def test_brute_force_k8(self):
        expected = brute_inverse(77, 8)
        assert expected == 133  # frozen from the brute-force oracle
        assert mod_inverse_pow2(77, 8) == expected

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 9, 10])
    def test_matches_brute_force_exhaustively(self, k):
        for a in range(1, 1 << k, 2):
            assert mod_inverse_pow2(a, k) == brute_inverse(a, k)

    @given(st.integers(1, 62), st.integers(0, 2**62))
    def test_inverse_property(self, k, a):
        a = (a | 1) & ((1 << k) - 1)
        inv = mod_inverse_pow2(a, k)
        assert inv % 2 == 1
        assert 0 <= inv < 1 << k
        assert a * inv % (1 << k) == 1

    def test_even_rejected(self):
        with pytest.raises(InvalidGenerator):
            mod_inverse_pow2(1030, 11)

    @pytest.mark.parametrize("k", [0, 63, -1])
    def test_word_bits_range(self, k):
        with pytest.raises(RangeError):
            mod_inverse_pow2(3, k)


class TestGenerator:
    def test_invariants(self):
        with pytest.raises(InvalidGenerator):
            AffineGenerator(1030, 1731, 11)
        with pytest.raises(RangeError):
            AffineGenerator(2049, 1, 11)
        with pytest.raises(RangeError):
            AffineGenerator(3, 2048, 11)
        with pytest.raises(RangeError):
            AffineGenerator(3, 1, 63)

    def test_next_table(self):
        assert [step(NEXT, x) for x in (1, 2, 3)] == [712, 1741, 722]

    def test_last_table(self):
        assert [step(LAST, x) for x in (1, 2, 3)] == [1702, 1907, 64]

    def test_zero_seed_gives_increment(self):
        assert step(NEXT, 0) == 1731

    def test_step_range_checked(self):
        with pytest.raises(RangeError):
            step(NEXT, 2048)

    def test_no_overflow_at_62_bits(self):
        m = 1 << 62
        g = AffineGenerator(m - 1, m - 1, 62)
        assert g.step(m - 1) == ((m - 1) * (m - 1) + m - 1) % m

    def test_serialisation(self):
        assert NEXT.to_dict() == {"a": 1029, "c": 1731, "k": 11}
        assert AffineGenerator.from_dict(NEXT.to_dict()) == NEXT


class TestReverse:
    def test_reference(self):
        assert reverse_affine(NEXT) == LAST

    def test_identity_self_inverse(self):
        g = AffineGenerator(1, 0, 7)
        assert reverse_affine(g) == g

    def test_random_generators_round_trip(self):
        rng = random.Random(1234)
        for _ in range(1000):
            k = rng.randint(1, 62)
            m = 1 << k
            g = AffineGenerator(rng.randrange(m) | 1, rng.randrange(m), k)
            r = reverse_affine(g)
            for _ in range(100):
                x = rng.randrange(m)
                assert r.step(g.step(x)) == x

    @pytest.mark.parametrize("k", range(1, 13))
    def test_exhaustive_both_directions(self, k):
        rng = random.Random(k)
        m = 1 << k
        g = AffineGenerator(rng.randrange(m) | 1, rng.randrange(m), k)
        r = reverse_affine(g)
        for x in range(m):
            assert r.step(g.step(x)) == x
            assert g.step(r.step(x)) == x

    @given(odd_generators)
    def test_derivation_is_involution(self, params):
        g = AffineGenerator(*params)
        assert reverse_affine(reverse_affine(g)) == g

    @given(odd_generators, st.data())
    def test_sampled_inverse(self, params, data):
        g = AffineGenerator(*params)
        r = g.reverse()
        x = data.draw(st.integers(0, g.modulus - 1))
        assert r.step(g.step(x)) == x
        assert g.step(r.step(x)) == x


@pytest.mark.parametrize("k", [1, 4, 8, 12, 16])
def test_step_is_bijection(k):
    rng = random.Random(k)
    for _ in range(3):
        g = AffineGenerator(rng.randrange(1 << k) | 1, rng.randrange(1 << k), k)
        assert len({g.step(x) for x in range(1 << k)}) == 1 << k


class TestIterate:
    def test_first_value(self):
        assert iterate(NEXT, 1, 2)[0] == 712
        assert iterate(NEXT, 1, 2) == [712, NEXT.step(712)]

    def test_empty(self):
        assert iterate(NEXT, 5, 0) == []

    def test_full_period_returns_to_seed(self):
        seq = iterate(NEXT, 0, 2048)
        assert seq[-1] == 0
        assert len(set(seq)) == 2048

    def test_negative_count(self):
        with pytest.raises(RangeError):
            iterate(NEXT, 0, -1)


class TestCycleLength:
    def test_reference_generator_sampled_seeds(self):
        # brute-force oracle: walk the orbit until it closes
        def walk(seed):
            x, p = NEXT.step(seed), 1
            while x != seed:
                x, p = NEXT.step(x), p + 1
            return p

        for seed in (0, 1, 1000, 2047):
            assert walk(seed) == 2048
            assert cycle_length(NEXT, seed) == 2048

    def test_identity_fixed_point(self):
        assert cycle_length(AffineGenerator(1, 0, 4), 5) == 1

    def test_counter(self):
        assert cycle_length(AffineGenerator(1, 1, 4), 0) == 16

    def test_short_cycles_without_hull_dobell(self):
        # a = 3 is not 1 mod 4, so the period is shorter than 2**k
        g = AffineGenerator(3, 1, 6)
        p = cycle_length(g, 0)
        assert p < 64
        assert iterate(g, 0, p)[-1] == 0


def test_step_all_matches_step():
    words = range(2048)
    assert NEXT.step_all(words) == [NEXT.step(x) for x in words]
