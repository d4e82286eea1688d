"""Interval homeomorphisms that collapse dynamical complexity per scale.

A fast-decreasing dyadic sequence s drives a four-piece interlacing
construction whose limit homeomorphism h compresses most of [0,1] into
steep slivers.  Sequence values are stored as dyadic exponents (s_k =
2^-m_k) because certified modulus sequences decay far beyond anything
materializable; all decay inequalities are checked at exponent level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import AffineMap1D, IDENTITY_MAP, Parameter, derived
from .enclosures import log2_enclosure
from .errors import (
    BudgetExceededError,
    DepthInsufficientError,
    DomainError,
    PreconditionError,
)
from .intervals import UNIT, Interval
from .rationals import ceil_log2, dyadic_le, format_rational
from .regularity import hoelder
from .zipper import PiecewiseLinear, image
from . import mdim

MATERIALIZE_CAP_BITS = 200_000
FOUR_ALPHABET = "0123"


# ---------------------------------------------------------------------------
# the four-piece interlacing step


def four_maps(alpha) -> tuple[tuple[AffineMap1D, ...], tuple[AffineMap1D, ...]]:
    """Horizontal and vertical four-map families for one construction level."""
    a = Fraction(alpha)
    if not 0 < a < Fraction(1, 2):
        raise DomainError("level parameter must lie in (0, 1/2)")
    half = Fraction(1, 2)
    h = (
        AffineMap1D(a / 2, Fraction(0)),
        AffineMap1D((1 - a) / 2, a / 2),
        AffineMap1D(a / 2, half),
        AffineMap1D((1 - a) / 2, (1 + a) / 2),
    )
    v = (
        AffineMap1D((1 - a) / 2, Fraction(0)),
        AffineMap1D(a / 2, (1 - a) / 2),
        AffineMap1D((1 - a) / 2, half),
        AffineMap1D(a / 2, 1 - a / 2),
    )
    return h, v


def psi_apply(alpha, f: PiecewiseLinear) -> PiecewiseLinear:
    """One four-piece interlacing application; sends increasing
    homeomorphisms fixing 0 and 1 to the same class."""
    if f.xs[0] != 0 or f.xs[-1] != 1 or f.ys[0] != 0 or f.ys[-1] != 1:
        raise DomainError("function must fix 0 and 1 on domain [0,1]")
    h_maps, v_maps = four_maps(alpha)
    xs: list[Fraction] = []
    ys: list[Fraction] = []
    for i in range(4):
        h, v = h_maps[i], v_maps[i]
        for x, y in f.points:
            nx, ny = h(x), v(y)
            if xs and nx == xs[-1]:
                if ny != ys[-1]:
                    raise DomainError("pieces disagree at a junction")
                continue
            xs.append(nx)
            ys.append(ny)
    return PiecewiseLinear(tuple(xs), tuple(ys))


# ---------------------------------------------------------------------------
# sequence specifications


@dataclass(frozen=True)
class ModulusWitness:
    """Exact record of the per-level decay checks, in log2 form.

    Each check (j, lhs, rhs) asserts the exact rational inequality
    lhs < rhs, where lhs bounds log2 of the j-fold iterated image of an
    interval of length s_k and rhs = log2 of the decay ceiling."""

    k: int
    alpha_lo: Fraction
    const_log2_hi: Fraction
    checks: tuple[tuple[int, Fraction, Fraction], ...]


@dataclass(frozen=True)
class SequenceSpec:
    exponents: tuple[int, ...]  # s_k = 2^-exponents[k-1], strictly increasing
    witness: tuple[ModulusWitness, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(m) for m in self.exponents))
        if any(b <= a for a, b in zip(self.exponents, self.exponents[1:])):
            raise DomainError("sequence exponents must be strictly increasing")
        if any(m < 2 for m in self.exponents):
            raise DomainError("sequence values must lie below 1/2")

    @property
    def length(self) -> int:
        return len(self.exponents)

    def s(self, k: int) -> Fraction:
        """Materialize s_k (s_0 = 1).  Refuses absurdly deep values."""
        if k == 0:
            return Fraction(1)
        if not 1 <= k <= self.length:
            raise DomainError(f"sequence has no level {k}")
        m = self.exponents[k - 1]
        if m > MATERIALIZE_CAP_BITS:
            raise BudgetExceededError(
                f"s_{k} = 2^-{m} is too deep to materialize exactly"
            )
        return Fraction(1, 1 << m)

    def materializable_prefix(self) -> int:
        n = 0
        for m in self.exponents:
            if m > MATERIALIZE_CAP_BITS:
                break
            n += 1
        return n

    def decay_ok(self) -> bool:
        """s_n below 2^-(n+10) times the product of the earlier values, and
        the product of (1 - s_n) above 1 - 2^-10; both at exponent level."""
        total = 0
        for n, m in enumerate(self.exponents, start=1):
            if m < n + 10 + total + 1:
                return False
            total += m
        # sum of 2^-m_k <= 2^-(m_1 - 1), so the product bound holds once
        # m_1 >= 12 (1 - sum > 1 - 2^-11 > 1 - 2^-10)
        return not self.exponents or self.exponents[0] >= 12

    def to_json_dict(self) -> dict:
        data: dict = {"exponents": list(self.exponents)}
        if self.witness is not None:
            data["witness"] = [
                {
                    "k": w.k,
                    "alpha_lo": format_rational(w.alpha_lo),
                    "const_log2_hi": format_rational(w.const_log2_hi),
                    "checks": [
                        [j, format_rational(lhs), format_rational(rhs)]
                        for j, lhs, rhs in w.checks
                    ],
                }
                for w in self.witness
            ]
        return data


def dyadic_sequence(k_levels: int) -> SequenceSpec:
    """Minimal-exponent decay-valid sequence (no modulus certification):
    m_k = k + 11 + sum of earlier exponents."""
    exps: list[int] = []
    total = 0
    for k in range(1, k_levels + 1):
        m = k + 11 + total
        exps.append(m)
        total += m
    spec = SequenceSpec(tuple(exps))
    assert spec.decay_ok()
    return spec


def choose_sequence(p: Parameter, k_levels: int, bits: int) -> SequenceSpec:
    """Fully certified sequence for the given map: decay inequalities plus
    the iterated-modulus ceiling, all verified as exact rational
    inequalities at exponent level."""
    if k_levels < 0:
        raise DomainError("level count must be nonnegative")
    if not derived(p).hypersensitive:
        raise PreconditionError("modulus certification needs a hypersensitive parameter")
    if k_levels == 0:
        return SequenceSpec((), witness=())
    alpha_enc, const_enc = hoelder(p, bits)
    grid = 1 << 40
    alpha_lo = Fraction(math.floor(alpha_enc.lo * grid), grid)
    if alpha_lo <= 0:
        raise PreconditionError("alpha lower bound is not positive; increase bits")
    const_hi = Fraction(math.ceil(const_enc.hi * grid), grid)
    u = log2_enclosure(const_hi, 40)
    log2c_hi = Fraction(math.ceil(u.hi * grid), grid)

    exps: list[int] = []
    witnesses: list[ModulusWitness] = []
    total = 0
    for k in range(1, k_levels + 1):
        m = k + 11 + total
        if exps:
            m = max(m, exps[-1] + 1)
        ceiling_log2 = Fraction(-(k + 10 + total))
        apow = Fraction(1)
        for j in range(1, k + 1):
            apow *= alpha_lo  # alpha_lo^j
            gj = (1 - apow) / (1 - alpha_lo)
            # need gj*log2c - m*apow < ceiling_log2
            required = (gj * log2c_hi - ceiling_log2) / apow
            m = max(m, math.floor(required) + 1)
        checks = []
        apow = Fraction(1)
        for j in range(1, k + 1):
            apow *= alpha_lo
            gj = (1 - apow) / (1 - alpha_lo)
            lhs = gj * log2c_hi - m * apow
            if not lhs < ceiling_log2:
                raise PreconditionError("modulus check failed after solving; increase bits")
            checks.append((j, lhs, ceiling_log2))
        witnesses.append(ModulusWitness(k, alpha_lo, log2c_hi, tuple(checks)))
        exps.append(m)
        total += m
    spec = SequenceSpec(tuple(exps), witness=tuple(witnesses))
    if not spec.decay_ok():
        raise PreconditionError("internal error: solved sequence fails decay checks")
    return spec


# ---------------------------------------------------------------------------
# homeomorphism approximants and their tiles


def build_homeo(
    spec: SequenceSpec, n: int, breakpoint_budget: int = 4**9 + 1
) -> tuple[PiecewiseLinear, Fraction]:
    """n-level approximant of the limit homeomorphism, with the exact
    uniform error bound prod((1-s_j)/2)."""
    if not 0 <= n <= spec.length:
        raise DomainError("level count exceeds the sequence length")
    if 4**n + 1 > breakpoint_budget:
        raise BudgetExceededError(f"4^{n}+1 breakpoints exceed budget {breakpoint_budget}")
    values = [spec.s(j) for j in range(1, n + 1)]  # may raise materialization cap
    g = PiecewiseLinear.identity()
    for s in reversed(values):
        g = psi_apply(s, g)
    err = Fraction(1)
    for s in values:
        err *= (1 - s) / 2
    return g, err


def four_word_maps(spec: SequenceSpec, word: str) -> tuple[AffineMap1D, AffineMap1D]:
    if any(c not in FOUR_ALPHABET for c in word):
        raise DomainError(f"word {word!r} has letters outside {FOUR_ALPHABET!r}")
    if len(word) > spec.length:
        raise DepthInsufficientError("word is deeper than the sequence")
    h, v = IDENTITY_MAP, IDENTITY_MAP
    for level, c in enumerate(word, start=1):
        hs, vs = four_maps(spec.s(level))
        h = h.compose(hs[int(c)])
        v = v.compose(vs[int(c)])
    return h, v


def four_tile(spec: SequenceSpec, word: str) -> tuple[Interval, Interval, str]:
    """Exact tile intervals of the four-letter word, with orientation, and
    the aspect separation 2^(p+9) re-verified exactly."""
    h, v = four_word_maps(spec, word)
    i_iv, j_iv = h.image_unit(), v.image_unit()
    p_depth = len(word)
    if p_depth == 0:
        return i_iv, j_iv, "square"
    sep = 1 << (p_depth + 9)
    if int(word[-1]) % 2 == 0:
        orientation = "vertical"
        if not i_iv.length * sep < j_iv.length:
            raise DomainError("vertical aspect separation failed; sequence decays too slowly")
    else:
        orientation = "horizontal"
        if not i_iv.length > sep * j_iv.length:
            raise DomainError("horizontal aspect separation failed; sequence decays too slowly")
    return i_iv, j_iv, orientation


# ---------------------------------------------------------------------------
# the scale cover, its size classes, and the lemma checks


@dataclass(frozen=True)
class CoverElement:
    index: int
    bracket: Interval  # outer rational bracket of the preimage interval
    left_exact: bool
    right_exact: bool
    length_lo: Fraction
    length_hi: Fraction
    size_class: int


@dataclass(frozen=True)
class CoverClassification:
    epsilon: Fraction
    epsilon_prime: Fraction
    p0: int
    k_eps: int
    elements: tuple[CoverElement, ...]
    card_check_ok: bool
    depth_check_ok: bool
    horizontal_check_ok: bool

    def class_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for el in self.elements:
            counts[el.size_class] = counts.get(el.size_class, 0) + 1
        return counts

    def large_count(self, k: int) -> int:
        return sum(1 for el in self.elements if el.size_class <= k)

    def report_csv(self) -> str:
        lines = ["class_k,count,bound_4^max(k,p0)"]
        for k in sorted(self.class_counts()):
            bound = 4 ** max(k, self.p0)
            lines.append(f"{k},{self.class_counts()[k]},{bound}")
        return "\n".join(lines) + "\n"


def _invert_bracket(spec: SequenceSpec, y: Fraction, depth: int) -> tuple[Interval, bool]:
    """Bracket around h^-1(y) from the vertical four-tiling; exact (degenerate)
    when y hits a tile boundary.  Returns (bracket, exact)."""
    h = IDENTITY_MAP
    t = Fraction(y)
    for level in range(1, depth + 1):
        if t == 0 or t == 1:
            x = h(t)
            return Interval(x, x), True
        s = spec.s(level)
        hs, vs = four_maps(s)
        b1, b2, b3 = (1 - s) / 2, Fraction(1, 2), 1 - s / 2
        i = 0 if t <= b1 else (1 if t <= b2 else (2 if t <= b3 else 3))
        h = h.compose(hs[i])
        t = vs[i].inverse()(t)
    if t == 0 or t == 1:
        x = h(t)
        return Interval(x, x), True
    return h.image_unit(), False


def _classify_length(spec: SequenceSpec, len_lo: Fraction, len_hi: Fraction) -> int | None:
    """Size class c with s_c <= length < s_(c-1), or None if the bracket
    enclosure [len_lo, len_hi] straddles a class boundary."""
    if len_lo <= 0:
        return None
    for c in range(1, spec.length + 1):
        lower_ok = dyadic_le(spec.exponents[c - 1], len_lo)
        if c == 1:
            upper_ok = len_hi < 1
        else:
            upper_ok = not dyadic_le(spec.exponents[c - 2], len_hi)
        if lower_ok and upper_ok:
            return c
    return None


def cover_and_classify(spec: SequenceSpec, eps, depth: int) -> CoverClassification:
    """The preimage cover at scale eps with every element bracketed and
    size-classified, plus exhaustive checks of the three counting lemmas
    (chain meeting bound, large-class cardinality, maximal depth)."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0,1)")
    if depth > spec.length:
        raise DomainError("bracket depth exceeds the sequence length")
    eps_prime = Fraction(1, math.floor(1 / eps) + 1)
    count = int(1 / eps_prime)
    k_eps = ceil_log2(1 / eps) + 2
    p0 = None
    for k in range(1, spec.length + 1):
        if dyadic_le(spec.exponents[k - 1], eps_prime):
            p0 = k
            break
    if p0 is None:
        raise PreconditionError("sequence too short to place eps' among its values")

    brackets: list[tuple[Interval, bool]] = []
    for t in range(count + 1):
        brackets.append(_invert_bracket(spec, t * eps_prime, depth))

    elements: list[CoverElement] = []
    for t in range(count):
        (bl, bl_exact), (br, br_exact) = brackets[t], brackets[t + 1]
        outer = Interval(bl.lo, br.hi)
        len_lo = max(Fraction(0), br.lo - bl.hi)
        len_hi = br.hi - bl.lo
        cls = _classify_length(spec, len_lo, len_hi)
        if cls is None:
            raise DepthInsufficientError(
                f"element {t}: length in [{len_lo}, {len_hi}] straddles a size class"
            )
        elements.append(CoverElement(t, outer, bl_exact, br_exact, len_lo, len_hi, cls))

    depth_ok = all(el.size_class <= k_eps for el in elements)
    card_ok = True
    for k in range(1, k_eps + 1):
        large = sum(1 for el in elements if el.size_class <= k)
        if large > 4 ** max(k, p0):
            card_ok = False
    horizontal_ok = True
    max_mat = spec.materializable_prefix()
    for el in elements:
        m = el.size_class - 1
        if m < 1 or m > min(depth, max_mat):
            continue
        # |el| < s_m, so at most 3 depth-m tiles may meet it
        if _tiles_meeting(spec, el.bracket, m) > 3:
            horizontal_ok = False
    return CoverClassification(
        epsilon=eps,
        epsilon_prime=eps_prime,
        p0=p0,
        k_eps=k_eps,
        elements=tuple(elements),
        card_check_ok=card_ok,
        depth_check_ok=depth_ok,
        horizontal_check_ok=horizontal_ok,
    )


def _locate_four(spec: SequenceSpec, x: Fraction, depth: int, rightmost: bool) -> int:
    """Leaf index of the depth-`depth` horizontal four-tile containing x."""
    idx = 0
    t = Fraction(x)
    for level in range(1, depth + 1):
        s = spec.s(level)
        hs, _ = four_maps(s)
        b1, b2, b3 = s / 2, Fraction(1, 2), (1 + s) / 2
        if rightmost:
            i = 3 if t >= b3 else (2 if t >= b2 else (1 if t >= b1 else 0))
        else:
            i = 0 if t <= b1 else (1 if t <= b2 else (2 if t <= b3 else 3))
        idx = idx * 4 + i
        t = hs[i].inverse()(t)
    return idx


def _tiles_meeting(spec: SequenceSpec, iv: Interval, depth: int) -> int:
    left = _locate_four(spec, iv.lo, depth, rightmost=False)
    right = _locate_four(spec, iv.hi, depth, rightmost=True)
    return right - left + 1


def transversal_count(cls: CoverClassification, iv: Interval, max_class: int) -> int:
    """Number of cover elements of size class <= max_class whose outer
    bracket meets the interval (an overcount of true meetings, which is the
    conservative direction for the 4^(q+3) bound)."""
    return sum(
        1
        for el in cls.elements
        if el.size_class <= max_class and el.bracket.intersects(iv)
    )


# ---------------------------------------------------------------------------
# conjugated-metric complexity


@dataclass(frozen=True)
class ConjugatedRate:
    classification: CoverClassification
    estimate: mdim.GrowthEstimate
    ratio_upper: Fraction
    labels: tuple[int, ...]


def conjugated_rate(
    p: Parameter, spec: SequenceSpec, eps, n_max: int, depth: int, cover_depth: int | None = None
) -> ConjugatedRate:
    """Certified upper bound on the per-step complexity ratio at scale eps
    in the conjugated metric: a superset transition graph over the cover
    (edges wherever outer image bounds allow T(E) to meet E') bounds the
    separated-set counts from above."""
    eps = Fraction(eps)
    if cover_depth is None:
        cover_depth = min(spec.length, spec.materializable_prefix())
    cls = cover_and_classify(spec, eps, cover_depth)
    outers = [el.bracket for el in cls.elements]
    size = len(outers)
    out_ranges: list[tuple[int, int] | None] = []
    for o in outers:
        ib = image(p, o, depth).outer
        lo_idx = 0
        while lo_idx < size and outers[lo_idx].hi < ib.lo:
            lo_idx += 1
        hi_idx = size - 1
        while hi_idx >= 0 and outers[hi_idx].lo > ib.hi:
            hi_idx -= 1
        out_ranges.append((lo_idx, hi_idx) if lo_idx <= hi_idx else None)
    est = mdim.growth_from_ranges(tuple(out_ranges), n_max)
    if est.upper is None:
        ratio_upper = Fraction(0)
    else:
        ln_inv = mdim.log_enclosure(1 / eps, 48)
        ratio_upper = est.upper.hi / ln_inv.lo
    labels = tuple(el.size_class for el in cls.elements)
    return ConjugatedRate(cls, est, ratio_upper, labels)
