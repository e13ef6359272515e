"""Exact-number helpers: rational parsing, integer roots, radical approximation.

All geometry in this package is carried out over Q.  Scalars that are
genuinely irrational (k-th roots appearing in body rescalings) are replaced
by dyadic rationals accurate to ``precision_bits()`` bits, which is
controlled by the NOK_PRECISION environment variable (default 128).
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

DEFAULT_PRECISION_BITS = 128


def precision_bits() -> int:
    """Significand bits used when approximating irrational scalars."""
    raw = os.environ.get("NOK_PRECISION", "")
    try:
        bits = int(raw)
    except ValueError:
        bits = DEFAULT_PRECISION_BITS
    if bits <= 0:
        bits = DEFAULT_PRECISION_BITS
    return max(bits, 64)


def parse_rational(value) -> Fraction:
    """Parse ints, floats, Fractions and "p/q" strings into a Fraction.

    Decimal strings are promoted exactly (e.g. "1.5" -> 3/2); floats are
    converted via their exact binary value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num.strip()), int(den.strip()))
        if "." in text or "e" in text or "E" in text:
            return Fraction(text)
        return Fraction(int(text))
    raise ValueError(f"cannot interpret {value!r} as a rational number")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def integer_nth_root(m: int, k: int) -> int:
    """floor(m ** (1/k)) for non-negative integer m, exact."""
    if m < 0:
        raise ValueError("negative radicand")
    if m == 0:
        return 0
    if k == 1:
        return m
    if k == 2:
        return math.isqrt(m)
    x = 1 << ((m.bit_length() + k - 1) // k + 1)
    while True:
        y = ((k - 1) * x + m // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def nth_root(q, k: int, bits: int | None = None) -> Fraction:
    """Dyadic rational approximation of q**(1/k), q >= 0 rational.

    The result is exact when q is a perfect k-th power of a rational;
    otherwise it is floor-accurate to 2**-bits.
    """
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    if k < 1:
        raise ValueError("root order must be positive")
    if q == 0:
        return Fraction(0)
    rn = integer_nth_root(q.numerator, k)
    rd = integer_nth_root(q.denominator, k)
    if rn ** k == q.numerator and rd ** k == q.denominator:
        return Fraction(rn, rd)
    if bits is None:
        bits = precision_bits()
    scaled = (q.numerator << (k * bits)) // q.denominator
    return Fraction(integer_nth_root(scaled, k), 1 << bits)


def sqrt_rational(q, bits: int | None = None) -> Fraction:
    return nth_root(q, 2, bits)


def is_perfect_power(q: Fraction, k: int) -> bool:
    q = Fraction(q)
    if q < 0:
        return False
    rn = integer_nth_root(q.numerator, k)
    rd = integer_nth_root(q.denominator, k)
    return rn ** k == q.numerator and rd ** k == q.denominator
