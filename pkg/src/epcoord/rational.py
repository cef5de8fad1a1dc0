"""Exact rational scalars.

All model data and every polyhedral computation in this package use
`fractions.Fraction`, which already stores values in lowest terms with a
positive denominator and performs exact arithmetic.
"""

from fractions import Fraction

from .errors import NumberParseError

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_scalar(value) -> Fraction:
    """Parse an integer, a "p/q" string, or a finite decimal string exactly.

    Floats are rejected: binary floating point cannot be trusted to carry
    decimal model data bit-exactly.
    """
    if isinstance(value, bool):
        raise NumberParseError(f"booleans are not numbers: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise NumberParseError(f"cannot parse number {value!r}: {exc}") from exc
    raise NumberParseError(f"unsupported number type {type(value).__name__}: {value!r}")


def format_scalar(value: Fraction):
    """Render a rational for JSON output: plain int when integral, else "p/q"."""
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"
