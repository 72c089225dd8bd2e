"""Bidirectional Langevin dynamics driven by a reversible noise generator.

The integrator is the two-point leapfrog recurrence extended with a drag
term and a random impulse::

    q_next = 2*q - q_prev + (F(q)/m)*dt**2 - (dt/tau)*(q - q_prev) + R*dt**2/m

where ``R = kick_scale * N(0, 1)`` comes from two uniforms produced by a
:class:`~revgen.coupled.CoupledGenerator`. Running backward solves the same
recurrence for ``q_prev`` and regenerates the two uniforms by stepping the
generator in reverse, so no noise history is stored.

In ``"fixed"`` mode positions are integers on a ``2**-F`` grid and the force
and kick contributions are rounded onto that grid before being added. Both
contributions depend only on ``q`` and the generator state, so the backward
update recomputes them identically and the round trip is bit-exact. Drag is
velocity-dependent and therefore only allowed in ``"float"`` mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from revgen.coupled import (
    RUND,
    CoupledGenerator,
    CoupledState,
    output,
    reverse_coupled,
)
from revgen.errors import ModeViolation, RangeError

FORCES = ("zero", "harmonic")
MODES = ("float", "fixed")


@dataclass(frozen=True)
class LangevinConfig:
    mass: float = 1.0
    tau: float = math.inf
    dt: float = 0.01
    force: str = "zero"
    spring: float = 1.0
    kick_scale: float = 0.0
    mode: str = "float"
    frac_bits: int = 32
    generator: CoupledGenerator = RUND

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.kick_scale < 0:
            raise ValueError(f"kick_scale must be nonnegative, got {self.kick_scale}")
        if self.force not in FORCES:
            raise ValueError(f"force must be one of {FORCES}, got {self.force!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "fixed":
            if math.isfinite(self.tau):
                raise ModeViolation("fixed-point mode cannot be combined with drag (finite tau)")
            if not 1 <= self.frac_bits <= 62:
                raise RangeError(f"frac_bits must be in [1, 62], got {self.frac_bits}")
        elif self.dt == self.tau:
            raise ValueError("dt == tau makes the backward update singular")

    @property
    def drag(self) -> float:
        """Dimensionless drag per step, ``dt / tau``."""
        return self.dt / self.tau

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    def force_at(self, q: float) -> float:
        if self.force == "harmonic":
            return -self.spring * q
        return 0.0

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "tau": self.tau if math.isfinite(self.tau) else "inf",
            "dt": self.dt,
            "force": self.force,
            "spring": self.spring,
            "kick_scale": self.kick_scale,
            "mode": self.mode,
            "frac_bits": self.frac_bits,
            "generator": self.generator.to_dict(),
        }


@dataclass(frozen=True)
class SimState:
    """Leapfrog state: positions at ``t - dt`` and ``t`` plus the noise generator.

    In fixed mode ``q_prev`` and ``q_curr`` are ints scaled by ``2**F``.
    """

    q_prev: float | int
    q_curr: float | int
    rng: CoupledState
    step_index: int = 0

    @property
    def uniforms_consumed(self) -> int:
        return 2 * self.step_index


@dataclass(frozen=True)
class ReplayReport:
    steps: int
    max_position_deviation: float
    rng_state_restored: bool
    bit_exact: bool
    max_abs_position: float = 0.0

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "max_position_deviation": self.max_position_deviation,
            "rng_state_restored": self.rng_state_restored,
            "bit_exact": self.bit_exact,
            "max_abs_position": self.max_abs_position,
        }


def uniform_to_kick(u1: float, u2: float, scale: float, floor: float = 2.0**-53) -> float:
    """One Box-Muller normal deviate times ``scale``.

    ``u1 == 0`` is replaced by ``floor`` (the smallest positive uniform the
    source can produce) to keep the logarithm finite. The sine branch of the
    transform is discarded so every kick costs exactly two uniforms.
    """
    if not (0.0 <= u1 < 1.0 and 0.0 <= u2 < 1.0):
        raise RangeError(f"uniforms must lie in [0, 1), got {u1}, {u2}")
    if scale == 0:
        return 0.0
    if u1 == 0.0:
        u1 = floor
    return scale * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def _uniform_floor(gen: CoupledGenerator) -> float:
    return 1.0 / float(1 << (2 * gen.word_bits))


def _kick_term(cfg: LangevinConfig, u1: float, u2: float) -> float:
    """Displacement ``R*dt**2/m`` contributed by the random force."""
    kick = uniform_to_kick(u1, u2, cfg.kick_scale, _uniform_floor(cfg.generator))
    return kick * cfg.dt * cfg.dt / cfg.mass


def _impulse(cfg: LangevinConfig, q, u1: float, u2: float):
    """Force plus kick displacement; rounded to the grid in fixed mode."""
    h2m = cfg.dt * cfg.dt / cfg.mass
    if cfg.mode == "fixed":
        scale = cfg.scale
        force = round(cfg.force_at(q / scale) * h2m * scale)
        kick = round(_kick_term(cfg, u1, u2) * scale)
        return force + kick
    return cfg.force_at(q) * h2m + _kick_term(cfg, u1, u2)


def step_forward(cfg: LangevinConfig, s: SimState) -> SimState:
    gen = cfg.generator
    r1 = gen.step(s.rng)
    r2 = gen.step(r1)
    u1, u2 = output(gen, r1), output(gen, r2)
    q, q_prev = s.q_curr, s.q_prev
    impulse = _impulse(cfg, q, u1, u2)
    if cfg.mode == "fixed":
        q_next = 2 * q - q_prev + impulse
    else:
        q_next = 2 * q - q_prev - cfg.drag * (q - q_prev) + impulse
    return SimState(q, q_next, r2, s.step_index + 1)


def step_backward(cfg: LangevinConfig, s: SimState) -> SimState:
    """Undo one :func:`step_forward`.

    ``s.q_prev`` and ``s.q_curr`` play the roles of ``q`` and ``q_next``;
    the generator is stepped back twice, yielding ``u2`` then ``u1``.
    """
    gen = cfg.generator
    rev = reverse_coupled(gen)
    u2 = output(gen, s.rng)
    r1 = rev.step(s.rng)
    u1 = output(gen, r1)
    r0 = rev.step(r1)
    q, q_next = s.q_prev, s.q_curr
    impulse = _impulse(cfg, q, u1, u2)
    if cfg.mode == "fixed":
        q_prev = 2 * q - q_next + impulse
    else:
        d = cfg.drag
        q_prev = ((2 - d) * q + impulse - q_next) / (1 - d)
    return SimState(q_prev, q, r0, s.step_index - 1)


def initial_state(cfg: LangevinConfig, q0: float, q1: float, rng_seed: CoupledState) -> SimState:
    """Build the two-point state ``(q0, q1)``, snapping to the grid in fixed mode."""
    cfg.generator.check_state(rng_seed)
    if cfg.mode == "fixed":
        return SimState(round(q0 * cfg.scale), round(q1 * cfg.scale), rng_seed)
    return SimState(float(q0), float(q1), rng_seed)


def to_real(cfg: LangevinConfig, q) -> float:
    return q / cfg.scale if cfg.mode == "fixed" else float(q)


def run_bidirectional(
    cfg: LangevinConfig,
    q0: float,
    q1: float,
    rng_seed: CoupledState,
    n: int,
    trace: list | None = None,
) -> ReplayReport:
    """Run ``n`` steps forward, then ``n`` back, and compare against the forward pass.

    If ``trace`` is a list, rows ``(pass, step, q, uniforms_consumed)`` are
    appended to it for every state visited, ``q`` in real units.
    """
    if n < 1:
        raise RangeError(f"n must be >= 1, got {n}")
    s = initial_state(cfg, q0, q1, rng_seed)
    start = s
    history = [s]
    for _ in range(n):
        s = step_forward(cfg, s)
        history.append(s)
    if trace is not None:
        for h in history:
            trace.append(("forward", h.step_index, to_real(cfg, h.q_curr), h.uniforms_consumed))

    max_dev = 0.0
    max_abs = max(max(abs(to_real(cfg, h.q_prev)), abs(to_real(cfg, h.q_curr))) for h in history)
    exact = True
    for _ in range(n):
        s = step_backward(cfg, s)
        ref = history[s.step_index]
        if trace is not None:
            trace.append(("backward", s.step_index, to_real(cfg, s.q_curr), s.uniforms_consumed))
        if s.q_prev != ref.q_prev or s.q_curr != ref.q_curr:
            exact = False
            dev = max(
                abs(to_real(cfg, s.q_prev) - to_real(cfg, ref.q_prev)),
                abs(to_real(cfg, s.q_curr) - to_real(cfg, ref.q_curr)),
            )
            max_dev = max(max_dev, dev)
        if s.rng != ref.rng:
            exact = False
    restored = s.rng == start.rng
    return ReplayReport(
        steps=n,
        max_position_deviation=max_dev,
        rng_state_restored=restored,
        bit_exact=exact and restored,
        max_abs_position=max_abs,
    )
