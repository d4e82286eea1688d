"""Parsing and formatting of exact rationals.

Wire format is always "num/den" with a positive denominator, e.g. "3/10",
"-1/2", "7/1".  Parsing additionally accepts bare integers.
"""

from fractions import Fraction


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def ceil_log2(q: Fraction) -> int:
    """Smallest integer e with 2**e >= q, for q > 0."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("ceil_log2 needs a positive argument")
    n, d = q.numerator, q.denominator
    # 2^(e-1) < n/d <= 2^e
    e = n.bit_length() - d.bit_length()
    while Fraction(2) ** e < q:
        e += 1
    while Fraction(2) ** (e - 1) >= q:
        e -= 1
    return e


def dyadic_le(exponent: int, q: Fraction) -> bool:
    """Exact test 2**(-exponent) <= q without materializing 2**(-exponent).

    `exponent` may be astronomically large; `q` must be a Fraction of
    ordinary size.
    """
    if q <= 0:
        return False
    n, d = q.numerator, q.denominator
    if exponent < 0:
        # 2^|e| <= n/d  <=>  d * 2^|e| <= n
        e = -exponent
        if e >= n.bit_length() + 1:
            return False
        return (d << e) <= n
    # 2^-m <= n/d  <=>  d <= n * 2^m; decide by bit length when m is huge
    t = (d // n).bit_length()
    if exponent >= t + 1:
        return True
    return d <= (n << exponent)
