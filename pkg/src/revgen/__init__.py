"""Time-reversible pseudorandom number generators and reversible dynamics."""
from revgen.affine import LAST, NEXT, AffineGenerator, cycle_length, mod_inverse_pow2, reverse_affine
from revgen.coupled import (
    RUND,
    CoupledGenerator,
    CoupledState,
    PeriodReport,
    ReversedCoupledGenerator,
    reverse_coupled,
    step_backward,
    step_forward,
    verify_palindrome,
    verify_period,
)
from revgen.errors import (
    CycleNotFound,
    InvalidGenerator,
    ModeViolation,
    PeriodMismatch,
    RangeError,
    ResourceLimit,
)

__version__ = "0.1.0"
