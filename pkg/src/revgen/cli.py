"""Command-line front end.

Exit codes: 0 pass, 1 property failure, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from contextlib import contextmanager
from typing import Iterator, TextIO

from revgen import listings
from revgen.affine import reverse_affine
from revgen.coupled import (
    RUND,
    CoupledGenerator,
    CoupledState,
    backward_states,
    forward_states,
    output,
    reverse_coupled,
    verify_palindrome,
    verify_period,
)
from revgen.errors import PeriodMismatch, RevgenError
from revgen.langevin import LangevinConfig, run_bidirectional
from revgen.maps import PhasePoint, PointCloud, check_reversibility, orbit, parse_map

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "REVGEN_SEED"


class UsageError(Exception):
    pass


def parse_seed(text: str) -> CoupledState:
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"seed must look like 'x,y', got {text!r}") from None
    return CoupledState(x, y)


def _default_seed() -> str:
    return os.environ.get(SEED_ENV, "0,0")


def _add_generator_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=int, default=RUND.a, help="multiplier (odd)")
    p.add_argument("--c", type=int, default=RUND.c, help="increment")
    p.add_argument("--b", type=int, default=RUND.b, help="shear coefficient of x in the y update")
    p.add_argument("--k", type=int, default=RUND.word_bits, help="word bits, modulus 2**k")


def _add_seed_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", default=None, help=f"start state 'x,y' (default ${SEED_ENV} or 0,0)")


def _generator(args) -> CoupledGenerator:
    return CoupledGenerator(a=args.a, c=args.c, b=args.b, word_bits=args.k)


def _seed(args, gen: CoupledGenerator) -> CoupledState:
    seed = parse_seed(args.seed if args.seed is not None else _default_seed())
    return gen.check_state(seed)


@contextmanager
def _open_out(path: str | None) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _dump_json(obj, fh: TextIO) -> None:
    fh.write(json.dumps(obj, indent=2) + "\n")


def cmd_generate(args) -> int:
    gen = _generator(args)
    seed = _seed(args, gen)
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    if args.dir == "forward":
        xs, ys = forward_states(gen, seed, args.n)
    else:
        xs, ys = backward_states(reverse_coupled(gen), seed, args.n)
    rows = [(i + 1, x, y, output(gen, CoupledState(x, y))) for i, (x, y) in enumerate(zip(xs, ys))]
    with _open_out(args.out) as fh:
        if args.format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "x", "y", "uniform"])
            w.writerows(rows)
        else:
            _dump_json(
                {
                    "generator": gen.to_dict(),
                    "direction": args.dir,
                    "seed": [seed.x, seed.y],
                    "rows": [{"index": i, "x": x, "y": y, "uniform": u} for i, x, y, u in rows],
                },
                fh,
            )
    return EXIT_OK


def cmd_reverse_derive(args) -> int:
    gen = _generator(args)
    rev = reverse_coupled(gen)
    with _open_out(args.out) as fh:
        _dump_json(
            {
                "forward": gen.to_dict(),
                "reverse": rev.to_dict(),
                "reverse_x": reverse_affine(gen.x_generator).to_dict(),
            },
            fh,
        )
    return EXIT_OK


def cmd_verify_period(args) -> int:
    gen = _generator(args)
    report = verify_period(gen, _seed(args, gen))
    with _open_out(args.out) as fh:
        _dump_json(report.to_dict(), fh)
    full = report.observed_period == report.claimed_period and report.all_states_visited
    return EXIT_OK if full else EXIT_FAIL


def cmd_verify_palindrome(args) -> int:
    gen = _generator(args)
    seed = _seed(args, gen)
    n = args.n if args.n is not None else gen.modulus**2
    if n < 1:
        raise UsageError("--n must be >= 1")
    try:
        result = verify_palindrome(gen, seed, n)
    except PeriodMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        result = None
    with _open_out(args.out) as fh:
        _dump_json(
            {
                "n": n,
                "ok": bool(result),
                "first_mismatch": None if result is None else result.first_mismatch,
            },
            fh,
        )
    return EXIT_OK if result else EXIT_FAIL


def _rational(v: int, frac_bits: int) -> str:
    return f"{v}/{1 << frac_bits}"


def cmd_map_orbit(args) -> int:
    try:
        m = parse_map(args.map)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    F = args.frac_bits
    start = PhasePoint.from_floats(args.q, args.p, F)
    pts = orbit(m, start, args.steps)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "q", "p", "q_decimal", "p_decimal"])
        for i, pt in enumerate(pts, start=1):
            qf, pf = pt.as_floats()
            w.writerow([i, _rational(pt.q, F), _rational(pt.p, F), qf, pf])
    if args.check:
        sample = PointCloud.random(args.check, F, rng=0)
        result = check_reversibility(m, sample)
        if not result:
            ce = result.counterexample
            print(f"not time-reversible: counterexample q={ce.q}, p={ce.p}", file=sys.stderr)
            return EXIT_FAIL
    return EXIT_OK


def cmd_langevin_replay(args) -> int:
    gen = _generator(args)
    cfg = LangevinConfig(
        mass=args.mass,
        tau=args.tau,
        dt=args.dt,
        force=args.force,
        spring=args.spring,
        kick_scale=args.kick_scale,
        mode=args.mode,
        frac_bits=args.frac_bits,
        generator=gen,
    )
    seed = _seed(args, gen)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    trace: list | None = [] if args.trajectory else None
    report = run_bidirectional(cfg, args.q0, args.q1, seed, args.n, trace=trace)
    if trace is not None:
        with _open_out(args.trajectory) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["pass", "step", "q", "uniforms_consumed"])
            w.writerows(trace)
    with _open_out(args.out) as fh:
        _dump_json({"config": cfg.to_dict(), "report": report.to_dict()}, fh)
    if cfg.mode == "fixed":
        ok = report.bit_exact
    else:
        ok = report.rng_state_restored and (
            report.max_position_deviation <= args.tol * max(report.max_abs_position, 1e-300)
            or report.bit_exact
        )
    return EXIT_OK if ok else EXIT_FAIL


def run_conformance(n: int) -> int | None:
    """Compare the FORTRAN transcriptions with the library for ``n`` steps.

    Returns ``None`` when every forward state, uniform and backward state
    matches, otherwise the 1-based index of the first mismatch.
    """
    seed = CoupledState(0, 0)
    fx, fy = forward_states(RUND, seed, n)
    for idx, (x, y) in enumerate(listings.forward_listing(n)):
        if fx[idx] != x or fy[idx] != y:
            return idx + 1
        if output(RUND, CoupledState(x, y)) != (x + 2048 * y) / 4194304.0:
            return idx + 1
    bx, by = backward_states(reverse_coupled(RUND), seed, n)
    for idx, (x, y) in enumerate(listings.backward_listing(n)):
        if bx[idx] != x or by[idx] != y:
            return idx + 1
    return None


def cmd_conformance(args) -> int:
    gen = _generator(args)
    if gen != RUND:
        raise UsageError(f"conformance runs with the listing constants only: {RUND.to_dict()}")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    mismatch = run_conformance(args.n)
    if mismatch is not None:
        print(f"mismatch at index {mismatch}", file=sys.stderr)
        return EXIT_FAIL
    print(f"conformance ok: {args.n} steps bit-exact")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revgen", description="Time-reversible pseudorandom generators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit generator states as CSV or JSON")
    _add_generator_args(p)
    _add_seed_arg(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dir", choices=["forward", "backward"], default="forward")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reverse-derive", help="derive the reverse stepping constants")
    _add_generator_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reverse_derive)

    p = sub.add_parser("verify-period", help="sweep one full cycle with a state bitmap")
    _add_generator_args(p)
    _add_seed_arg(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_period)

    p = sub.add_parser("verify-palindrome", help="check backward states mirror forward states")
    _add_generator_args(p)
    _add_seed_arg(p)
    p.add_argument("--n", type=int, default=None, help="sequence length (default m**2)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_palindrome)

    p = sub.add_parser("map-orbit", help="iterate a fixed-point unit-square map")
    p.add_argument("--map", required=True, help="map word, e.g. QPQ or Q2P-1Q2 (X exchange, R reflect q)")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--q", type=float, default=0.25)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--frac-bits", type=int, default=32)
    p.add_argument("--check", type=int, default=0, metavar="N", help="also check reversibility on N random points")
    p.add_argument("--out")
    p.set_defaults(func=cmd_map_orbit)

    p = sub.add_parser("langevin-replay", help="run Langevin dynamics forward then backward")
    _add_generator_args(p)
    _add_seed_arg(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--mode", choices=["float", "fixed"], default="float")
    p.add_argument("--force", choices=["zero", "harmonic"], default="harmonic")
    p.add_argument("--spring", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=math.inf)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--kick-scale", type=float, default=1.0)
    p.add_argument("--frac-bits", type=int, default=32)
    p.add_argument("--q0", type=float, default=1.0)
    p.add_argument("--q1", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-9, help="relative position tolerance in float mode")
    p.add_argument("--trajectory", help="write the forward/backward trajectory CSV here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_langevin_replay)

    p = sub.add_parser("conformance", help="compare against literal transcriptions of the FORTRAN listings")
    _add_generator_args(p)
    p.add_argument("--n", type=int, default=listings.ITEMS)
    p.set_defaults(func=cmd_conformance)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, RevgenError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
