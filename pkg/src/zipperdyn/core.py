"""Exact tile geometry of a zipper parameter.

A parameter p = (x1, y1, x2, y2) induces three horizontal and three vertical
affine contractions of [0,1]; finite words over {0,1,2} index their
compositions and the tile intervals I_w (horizontal) and J_w (vertical).
All arithmetic is exact rational.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, DomainError
from .intervals import UNIT, Interval
from .rationals import format_rational, parse_rational

ALPHABET = "012"
DEFAULT_TILE_BUDGET = 3**13


@dataclass(frozen=True)
class AffineMap1D:
    slope: Fraction
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "slope", Fraction(self.slope))
        object.__setattr__(self, "offset", Fraction(self.offset))
        if self.slope == 0:
            raise ValueError("affine map must be invertible")

    def __call__(self, x) -> Fraction:
        return self.slope * x + self.offset

    def compose(self, inner: "AffineMap1D") -> "AffineMap1D":
        """self o inner."""
        return AffineMap1D(self.slope * inner.slope, self.slope * inner.offset + self.offset)

    def inverse(self) -> "AffineMap1D":
        return AffineMap1D(1 / self.slope, -self.offset / self.slope)

    def image(self, iv: Interval) -> Interval:
        a, b = self(iv.lo), self(iv.hi)
        return Interval(a, b) if a <= b else Interval(b, a)

    def image_unit(self) -> Interval:
        return self.image(UNIT)


IDENTITY_MAP = AffineMap1D(Fraction(1), Fraction(0))


@dataclass(frozen=True)
class Parameter:
    x1: Fraction
    y1: Fraction
    x2: Fraction
    y2: Fraction

    def __post_init__(self):
        for name in ("x1", "y1", "x2", "y2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (0 < self.x1 < self.x2 < 1):
            raise DomainError("need 0 < x1 < x2 < 1")
        if not (0 < self.y2 < self.y1 < 1):
            raise DomainError("need 0 < y2 < y1 < 1")

    @classmethod
    def parse(cls, text: str) -> "Parameter":
        """Parse "x1,y1,x2,y2" with rational components."""
        parts = [parse_rational(t) for t in text.split(",")]
        if len(parts) != 4:
            raise DomainError("parameter needs exactly four rationals x1,y1,x2,y2")
        return cls(*parts)

    def as_strings(self) -> list[str]:
        return [format_rational(v) for v in (self.x1, self.y1, self.x2, self.y2)]

    @functools.cached_property
    def h_maps(self) -> tuple[AffineMap1D, AffineMap1D, AffineMap1D]:
        return (
            AffineMap1D(self.x1, Fraction(0)),
            AffineMap1D(self.x2 - self.x1, self.x1),
            AffineMap1D(1 - self.x2, self.x2),
        )

    @functools.cached_property
    def v_maps(self) -> tuple[AffineMap1D, AffineMap1D, AffineMap1D]:
        return (
            AffineMap1D(self.y1, Fraction(0)),
            AffineMap1D(self.y2 - self.y1, self.y1),
            AffineMap1D(1 - self.y2, self.y2),
        )


@dataclass(frozen=True)
class Rect:
    horizontal: Interval
    vertical: Interval


@dataclass(frozen=True)
class DerivedQuantities:
    lambda0: Fraction
    lambda1: Fraction
    lambda2: Fraction
    lambda_min: Fraction
    lambda_max: Fraction
    h_min: Fraction
    h_max: Fraction
    v_min: Fraction
    v_max: Fraction
    hypersensitive: bool
    symmetric: bool
    in_region_b: bool


def validate_word(word: str, alphabet: str = ALPHABET) -> str:
    if any(c not in alphabet for c in word):
        raise DomainError(f"word {word!r} has letters outside {alphabet!r}")
    return word


def is_prefix(a: str, b: str) -> bool:
    return b.startswith(a)


def word_maps(p: Parameter, word: str) -> tuple[AffineMap1D, AffineMap1D]:
    """(H_w, V_w) with letters composed left to right, leftmost outermost."""
    validate_word(word)
    h, v = IDENTITY_MAP, IDENTITY_MAP
    for c in word:
        i = int(c)
        h = h.compose(p.h_maps[i])
        v = v.compose(p.v_maps[i])
    return h, v


def tile(p: Parameter, word: str) -> tuple[Interval, Interval]:
    """Tile intervals (I_w, J_w); the empty word gives ([0,1], [0,1])."""
    h, v = word_maps(p, word)
    return h.image_unit(), v.image_unit()


def rect(p: Parameter, word: str) -> Rect:
    i, j = tile(p, word)
    return Rect(i, j)


def tiling(p: Parameter, depth: int, budget: int = DEFAULT_TILE_BUDGET) -> list[tuple[str, Interval]]:
    """All 3^depth horizontal tiles in lexicographic = left-to-right order."""
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    if 3**depth > budget:
        raise BudgetExceededError(f"3^{depth} tiles exceed budget {budget}")
    out: list[tuple[str, Interval]] = []

    def rec(prefix: str, h: AffineMap1D):
        if len(prefix) == depth:
            out.append((prefix, h.image_unit()))
            return
        for i in range(3):
            rec(prefix + str(i), h.compose(p.h_maps[i]))

    rec("", IDENTITY_MAP)
    return out


def derived(p: Parameter) -> DerivedQuantities:
    widths = (p.x1, p.x2 - p.x1, 1 - p.x2)
    heights = (p.y1, p.y1 - p.y2, 1 - p.y2)
    lams = tuple(h / w for h, w in zip(heights, widths))
    lam_min, lam_max = min(lams), max(lams)
    return DerivedQuantities(
        lambda0=lams[0],
        lambda1=lams[1],
        lambda2=lams[2],
        lambda_min=lam_min,
        lambda_max=lam_max,
        h_min=min(widths),
        h_max=max(widths),
        v_min=min(heights),
        v_max=max(heights),
        hypersensitive=lam_min > 1,
        symmetric=(p.x1 + p.x2 == 1 and p.y1 + p.y2 == 1),
        in_region_b=(p.y1 * p.y1 > p.y2 and p.y1 > (2 - p.y2) * p.y2),
    )


def locate(p: Parameter, x, depth: int, rightmost: bool = False) -> str:
    """Word of the depth-`depth` tile containing x.

    At shared tile endpoints the leftmost containing word is returned
    (rightmost=True flips the tie-break).
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError("locate needs x in [0,1]")
    letters = []
    t = x
    for _ in range(depth):
        if rightmost:
            i = 2 if t >= p.x2 else (1 if t >= p.x1 else 0)
        else:
            i = 0 if t <= p.x1 else (1 if t <= p.x2 else 2)
        letters.append(str(i))
        t = p.h_maps[i].inverse()(t)
    return "".join(letters)


def word_index(word: str) -> int:
    """Rank of the word among words of the same length, in lex order."""
    idx = 0
    for c in word:
        idx = idx * 3 + int(c)
    return idx


def index_word(idx: int, depth: int) -> str:
    letters = []
    for _ in range(depth):
        letters.append(str(idx % 3))
        idx //= 3
    return "".join(reversed(letters))


def canonical_range_cover(lo: int, hi: int, depth: int) -> list[str]:
    """Prefix words whose depth-`depth` subtrees exactly cover the leaf
    index range [lo, hi] (inclusive).  O(depth) prefixes."""
    out: list[str] = []
    if lo > hi:
        return out

    def rec(prefix: str, span_lo: int, span_hi: int):
        if span_hi < lo or span_lo > hi:
            return
        if lo <= span_lo and span_hi <= hi:
            out.append(prefix)
            return
        width = (span_hi - span_lo + 1) // 3
        for i in range(3):
            rec(prefix + str(i), span_lo + i * width, span_lo + (i + 1) * width - 1)

    rec("", 0, 3**depth - 1)
    return out


def count_words(depth: int) -> int:
    return 3**depth


def floor_frac(q: Fraction) -> int:
    return math.floor(q)


def ceil_frac(q: Fraction) -> int:
    return math.ceil(q)
