import math

import mpmath
import numpy as np
import pytest

from revgen.coupled import RUND, CoupledGenerator, CoupledState, output, reverse_coupled
from revgen.errors import ModeViolation, RangeError
from revgen.langevin import (
    LangevinConfig,
    SimState,
    initial_state,
    run_bidirectional,
    step_backward,
    step_forward,
    uniform_to_kick,
)

SEED = CoupledState(0, 0)


def box_muller_oracle(u1, u2):
    mpmath.mp.dps = 50
    return float(mpmath.sqrt(-2 * mpmath.log(mpmath.mpf(u1))) * mpmath.cos(2 * mpmath.pi * mpmath.mpf(u2)))


class TestKick:
    def test_zero_scale(self):
        assert uniform_to_kick(0.3, 0.7, 0.0) == 0.0

    @pytest.mark.parametrize(
        "u1, u2",
        [(math.exp(-0.5), 0.25), (math.exp(-0.5), 0.0), (0.3, 0.1), (0.9, 0.6), (1731 / 4194304, 0.675)],
    )
    def test_against_high_precision(self, u1, u2):
        assert uniform_to_kick(u1, u2, 1.0) == pytest.approx(box_muller_oracle(u1, u2), rel=1e-13, abs=1e-15)
        assert uniform_to_kick(u1, u2, 2.5) == pytest.approx(2.5 * box_muller_oracle(u1, u2), rel=1e-13, abs=1e-15)

    def test_zero_uniform_remapped(self):
        k = uniform_to_kick(0.0, 0.0, 1.0, floor=2.0**-22)
        assert k == pytest.approx(math.sqrt(44 * math.log(2)))
        assert math.isfinite(uniform_to_kick(0.0, 0.0, 1.0))

    def test_range(self):
        with pytest.raises(RangeError):
            uniform_to_kick(1.0, 0.5, 1.0)

    def test_moments(self):
        u = np.random.default_rng(7).random((10**6, 2))
        kicks = np.array([uniform_to_kick(a, b, 1.0) for a, b in u])
        assert abs(kicks.mean()) < 0.01
        assert abs(kicks.var() - 1.0) < 0.01


class TestConfig:
    def test_fixed_with_drag(self):
        with pytest.raises(ModeViolation):
            LangevinConfig(mode="fixed", tau=10.0)

    @pytest.mark.parametrize(
        "kwargs", [{"dt": 0}, {"mass": -1}, {"tau": 0}, {"force": "gravity"}, {"mode": "exact"}, {"kick_scale": -1}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            LangevinConfig(**kwargs)


class TestStepForward:
    def test_free_flight(self):
        cfg = LangevinConfig()
        s = step_forward(cfg, SimState(1.0, 1.5, SEED))
        assert s.q_prev == 1.5
        assert s.q_curr == 2.0
        assert s.step_index == 1

    def test_kick_uses_next_two_outputs(self):
        cfg = LangevinConfig(kick_scale=1.0, dt=0.1, mass=2.0)
        s = step_forward(cfg, SimState(0.0, 0.0, SEED))
        u1 = output(RUND, CoupledState(1731, 0))
        u2 = output(RUND, CoupledState(1170, 1382))
        assert s.rng == CoupledState(1170, 1382)
        expected = box_muller_oracle(u1, u2) * 0.1 * 0.1 / 2.0
        assert s.q_curr == pytest.approx(expected, rel=1e-13)

    def test_harmonic_energy_bounded(self):
        dt, kappa = 0.01, 1.0
        cfg = LangevinConfig(force="harmonic", spring=kappa, dt=dt)
        # start at rest at q = 1: q(-dt) = cos(dt)
        s = SimState(math.cos(dt), 1.0, SEED)
        e0 = 0.5 * kappa
        energies = []
        for _ in range(10**4):
            nxt = step_forward(cfg, s)
            v = (nxt.q_curr - s.q_prev) / (2 * dt)
            energies.append(0.5 * v * v + 0.5 * kappa * s.q_curr**2)
            s = nxt
        assert max(abs(e - e0) for e in energies) < 0.01 * e0


class TestStepBackward:
    def test_fixed_free_flight_inverse(self):
        cfg = LangevinConfig(mode="fixed", frac_bits=16)
        s0 = SimState(100, 250, SEED)
        s1 = step_forward(cfg, s0)
        assert s1.q_curr == 400
        assert step_backward(cfg, s1) == s0

    def test_fixed_harmonic_with_kicks(self):
        cfg = LangevinConfig(mode="fixed", force="harmonic", spring=2.0, kick_scale=0.5)
        s0 = initial_state(cfg, 0.3, 0.31, CoupledState(17, 400))
        s = s0
        for _ in range(10**4):
            s = step_forward(cfg, s)
        for _ in range(10**4):
            s = step_backward(cfg, s)
        assert s == s0

    def test_float_drag_round_trip(self):
        cfg = LangevinConfig(force="harmonic", tau=10.0, kick_scale=1.0)
        report = run_bidirectional(cfg, 1.0, 1.0, SEED, 1000)
        assert report.rng_state_restored
        assert report.max_position_deviation <= 1e-9 * report.max_abs_position

    def test_uniforms_regenerated_in_reverse(self):
        cfg = LangevinConfig(kick_scale=1.0)
        s = step_forward(cfg, SimState(0.0, 0.0, SEED))
        back = step_backward(cfg, s)
        assert back.rng == SEED
        assert reverse_coupled(RUND).step(s.rng) == CoupledState(1731, 0)


class TestRunBidirectional:
    @pytest.mark.parametrize(
        "cfg",
        [
            LangevinConfig(),
            LangevinConfig(mode="fixed", force="harmonic", kick_scale=1.0),
            LangevinConfig(force="harmonic", tau=5.0, kick_scale=3.0),
        ],
    )
    def test_single_step(self, cfg):
        assert run_bidirectional(cfg, 0.1, 0.2, SEED, 1).rng_state_restored

    def test_n_must_be_positive(self):
        with pytest.raises(RangeError):
            run_bidirectional(LangevinConfig(), 0.0, 0.0, SEED, 0)

    @pytest.mark.parametrize("seed", [CoupledState(0, 0), CoupledState(2047, 5), CoupledState(99, 1234)])
    @pytest.mark.parametrize("spring", [0.5, 4.0])
    def test_fixed_mode_bit_exact(self, seed, spring):
        cfg = LangevinConfig(mode="fixed", force="harmonic", spring=spring, kick_scale=1.0)
        report = run_bidirectional(cfg, 1.0, 1.0, seed, 2000)
        assert report.bit_exact
        assert report.max_position_deviation == 0.0

    @pytest.mark.parametrize("mode", ["float", "fixed"])
    def test_rng_restored_every_mode(self, mode):
        gen = CoupledGenerator(5, 3, 9, 6)
        cfg = LangevinConfig(mode=mode, force="harmonic", kick_scale=1.0, generator=gen)
        assert run_bidirectional(cfg, 0.5, 0.5, CoupledState(1, 2), 777).rng_state_restored

    def test_consumption_log_is_palindrome(self):
        cfg = LangevinConfig(mode="fixed", force="harmonic", kick_scale=1.0)
        trace = []
        run_bidirectional(cfg, 1.0, 1.0, SEED, 300, trace=trace)
        fwd = [row for row in trace if row[0] == "forward"]
        bwd = [row for row in trace if row[0] == "backward"]
        assert [r[3] for r in fwd] == [2 * i for i in range(301)]
        assert [r[3] for r in bwd] == [2 * i for i in range(299, -1, -1)]
        assert [r[1:] for r in bwd] == [r[1:] for r in reversed(fwd[:-1])]

    @pytest.mark.parametrize("tau", [10.0, 100.0, 1000.0])
    @pytest.mark.parametrize("dt", [0.01, 0.001])
    def test_float_deviation_per_step_bound(self, tau, dt):
        # Regression bound: relative deviation per step stays below 1e-12 up to n = 10**4.
        cfg = LangevinConfig(force="harmonic", tau=tau, dt=dt, kick_scale=1.0)
        for n in (10**2, 10**3, 10**4):
            r = run_bidirectional(cfg, 1.0, 1.0, SEED, n)
            assert r.rng_state_restored
            assert r.max_position_deviation <= 1e-12 * n * r.max_abs_position
