"""Construction and rigorous evaluation of the zipper map itself.

Two independent routes to the map's values are provided: exact
piecewise-linear iterates of the defining contraction (`approximant`), and
tile enclosures (`eval_point`, `image`) that bound values and interval
images by the vertical tiles alone.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction

from . import core
from .core import AffineMap1D, IDENTITY_MAP, Parameter, derived, locate, tile, word_index
from .errors import BudgetExceededError, DomainError
from .intervals import UNIT, Interval

DEFAULT_BREAKPOINT_BUDGET = 3**13 + 1


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function given by its breakpoints."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValueError("need matching xs/ys with at least two breakpoints")
        if any(a >= b for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("breakpoint abscissae must be strictly increasing")

    @classmethod
    def from_points(cls, points) -> "PiecewiseLinear":
        xs, ys = zip(*points)
        return cls(tuple(Fraction(x) for x in xs), tuple(Fraction(y) for y in ys))

    @classmethod
    def identity(cls) -> "PiecewiseLinear":
        return cls((Fraction(0), Fraction(1)), (Fraction(0), Fraction(1)))

    @property
    def points(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return tuple(zip(self.xs, self.ys))

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        if not self.xs[0] <= x <= self.xs[-1]:
            raise DomainError("evaluation outside breakpoint range")
        k = bisect.bisect_right(self.xs, x) - 1
        if k == len(self.xs) - 1:
            return self.ys[-1]
        x0, x1 = self.xs[k], self.xs[k + 1]
        y0, y1 = self.ys[k], self.ys[k + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def is_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.ys, self.ys[1:]))

    def sup_diff(self, other: "PiecewiseLinear") -> Fraction:
        """Exact sup |self - other| (both piecewise linear on [0,1])."""
        grid = sorted(set(self.xs) | set(other.xs))
        return max(abs(self(x) - other(x)) for x in grid)


def _fixed_space_check(f: PiecewiseLinear):
    if f.xs[0] != 0 or f.xs[-1] != 1 or f.ys[0] != 0 or f.ys[-1] != 1:
        raise DomainError("function must fix 0 and 1 on domain [0,1]")
    if any(not 0 <= y <= 1 for y in f.ys):
        raise DomainError("function values must stay in [0,1]")


def _assemble(pieces) -> PiecewiseLinear:
    """Concatenate per-letter breakpoint lists, merging shared junctions."""
    xs: list[Fraction] = []
    ys: list[Fraction] = []
    for piece in pieces:
        for x, y in piece:
            if xs and x == xs[-1]:
                if y != ys[-1]:
                    raise DomainError("pieces disagree at a junction")
                continue
            xs.append(x)
            ys.append(y)
    return PiecewiseLinear(tuple(xs), tuple(ys))


def phi_apply(p: Parameter, f: PiecewiseLinear) -> PiecewiseLinear:
    """One application of the three-piece rescaling contraction."""
    _fixed_space_check(f)
    pieces = []
    for i in range(3):
        h, v = p.h_maps[i], p.v_maps[i]
        pieces.append([(h(x), v(y)) for x, y in f.points])
    return _assemble(pieces)


def approximant(
    p: Parameter, k: int, budget: int = DEFAULT_BREAKPOINT_BUDGET
) -> tuple[PiecewiseLinear, Fraction]:
    """k-th iterate of the contraction on the identity, with its exact
    uniform error bound v_max**k."""
    if k < 0:
        raise DomainError("iteration count must be nonnegative")
    if 3**k + 1 > budget:
        raise BudgetExceededError(f"3^{k}+1 breakpoints exceed budget {budget}")
    f = PiecewiseLinear.identity()
    for _ in range(k):
        f = phi_apply(p, f)
    return f, derived(p).v_max ** k


def eval_point(p: Parameter, x, eps) -> Interval:
    """Enclosure of the zipper map value at x, of width <= eps.

    Descends the horizontal tiles; if x lands exactly on a tile endpoint the
    value is forced by the affine relations and a degenerate interval is
    returned.
    """
    x = Fraction(x)
    eps = Fraction(eps)
    if not 0 <= x <= 1:
        raise DomainError("eval needs x in [0,1]")
    if eps <= 0:
        raise DomainError("eps must be positive")
    v_max = derived(p).v_max
    v = IDENTITY_MAP
    t = x
    bound = Fraction(1)

    def step():
        nonlocal v, t
        i = 0 if t <= p.x1 else (1 if t <= p.x2 else 2)
        v = v.compose(p.v_maps[i])
        t = p.h_maps[i].inverse()(t)

    while t != 0 and t != 1 and bound > eps:
        step()
        bound *= v_max
    if t == 0 or t == 1:
        y = v(t)
        return Interval(y, y)
    # Width target met; scan a bounded horizon for exact tile endpoints so
    # endpoint inputs always come back degenerate.
    enclosure = v.image_unit()
    for _ in range(64):
        step()
        if t == 0 or t == 1:
            y = v(t)
            return Interval(y, y)
    return enclosure


@dataclass(frozen=True)
class ImageBound:
    """Two-sided bound on the image of an interval: inner <= T(A) <= outer."""

    inner: Interval | None
    outer: Interval

    def __post_init__(self):
        if self.inner is not None and not self.outer.contains_interval(self.inner):
            raise ValueError("inner bound must lie inside outer bound")


def _union_over_leaf_range(p: Parameter, lo_idx: int, hi_idx: int, depth: int) -> Interval | None:
    """Union of J_w over the lexicographic leaf range [lo_idx, hi_idx] at the
    given depth.  The union is an interval (the tiles' preimages are
    consecutive), computed from O(depth) canonical subtrees."""
    if lo_idx > hi_idx:
        return None
    lo = hi = None
    for prefix in core.canonical_range_cover(lo_idx, hi_idx, depth):
        _, v = core.word_maps(p, prefix)
        j = v.image_unit()
        lo = j.lo if lo is None else min(lo, j.lo)
        hi = j.hi if hi is None else max(hi, j.hi)
    return Interval(lo, hi)


def image(p: Parameter, a: Interval, depth: int) -> ImageBound:
    """Rigorous inner/outer bounds for the image of A under the zipper map,
    from depth-`depth` tiles."""
    if not UNIT.contains_interval(a):
        raise DomainError("interval must lie inside [0,1]")
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    left_word = locate(p, a.lo, depth)
    right_word = locate(p, a.hi, depth, rightmost=True)
    meet_lo, meet_hi = word_index(left_word), word_index(right_word)
    outer = _union_over_leaf_range(p, meet_lo, meet_hi, depth)

    li, _ = tile(p, left_word)
    cont_lo = meet_lo if li.lo == a.lo else meet_lo + 1
    ri, _ = tile(p, right_word)
    cont_hi = meet_hi if ri.hi == a.hi else meet_hi - 1
    inner = _union_over_leaf_range(p, cont_lo, cont_hi, depth)
    return ImageBound(inner, outer)


def sample_csv(p: Parameter, grid: int, eps) -> str:
    """CSV rows "x,y_lo,y_hi" for x on the uniform grid of the given size."""
    if grid < 1:
        raise DomainError("grid must have at least one cell")
    lines = ["x,y_lo,y_hi"]
    for j in range(grid + 1):
        x = Fraction(j, grid)
        enc = eval_point(p, x, eps)
        lines.append(f"{x.numerator}/{x.denominator},{enc.lo.numerator}/{enc.lo.denominator},"
                     f"{enc.hi.numerator}/{enc.hi.denominator}")
    return "\n".join(lines) + "\n"


def svg_polyline(f: PiecewiseLinear, size: int = 640, stroke: str = "#1f4e9c") -> str:
    """Minimal SVG rendering of a piecewise-linear graph on [0,1]^2."""
    pts = " ".join(
        f"{float(x) * size:.3f},{(1 - float(y)) * size:.3f}" for x, y in f.points
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'<rect width="{size}" height="{size}" fill="white" stroke="#999"/>\n'
        f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="1"/>\n'
        "</svg>\n"
    )
