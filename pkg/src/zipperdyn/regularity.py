"""Regularity certificates: Hölder exponent bound and hypersensitivity.

The Hölder exponent reported is min_i ln(v_i)/ln(h_i) over the three
horizontal/vertical scale pairs; the hypersensitivity exponent is
1 + ln(lambda_min)/ln(h_min).  Both are delivered as enclosures; the
hypersensitive flag itself is an exact rational comparison.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Parameter, derived, tile
from .enclosures import RealEnclosure, log_enclosure, min_enclosure, pow_enclosure
from .errors import BudgetExceededError, PreconditionError, PrecisionError
from .rationals import format_rational, parse_rational
from .zipper import approximant


@dataclass(frozen=True)
class RegularityReport:
    alpha_min: RealEnclosure
    hoelder_constant_bound: RealEnclosure
    beta: RealEnclosure
    hypersensitive: bool
    c_hyp: Fraction


def _scale_pairs(p: Parameter) -> list[tuple[Fraction, Fraction]]:
    return [
        (p.y1, p.x1),
        (p.y1 - p.y2, p.x2 - p.x1),
        (1 - p.y2, 1 - p.x2),
    ]


def hoelder(p: Parameter, bits: int) -> tuple[RealEnclosure, RealEnclosure]:
    """(alpha_min, constant bound (x2-x1)^(-alpha_min)), widths <= 2^-bits."""
    inner = bits + 8
    for _ in range(6):
        ratios = [
            log_enclosure(v, inner) / log_enclosure(h, inner)
            for v, h in _scale_pairs(p)
        ]
        alpha = min_enclosure(*ratios)
        if alpha.width <= Fraction(1, 1 << bits):
            break
        inner += 16
    else:
        raise PrecisionError("alpha_min enclosure did not converge")
    const = pow_enclosure(p.x2 - p.x1, -alpha, bits)
    return alpha, const


def hypersensitivity(p: Parameter, bits: int) -> RegularityReport:
    d = derived(p)
    alpha, const = hoelder(p, bits)
    inner = bits + 8
    for _ in range(6):
        beta = 1 + log_enclosure(d.lambda_min, inner) / log_enclosure(d.h_min, inner)
        if beta.width <= Fraction(1, 1 << bits):
            break
        inner += 16
    else:
        raise PrecisionError("beta enclosure did not converge")
    return RegularityReport(
        alpha_min=alpha,
        hoelder_constant_bound=const,
        beta=beta,
        hypersensitive=d.hypersensitive,
        c_hyp=d.h_min / 2,
    )


def tile_hypersensitivity_check(p: Parameter, depth: int, budget: int = 3**13) -> bool:
    """Exact check |J_w| >= lambda_min^|w| * |I_w| for every word up to the
    given depth.  True for every valid parameter; a failure would expose a
    tile-arithmetic bug."""
    if 3**depth > budget:
        raise BudgetExceededError(f"3^{depth} words exceed budget {budget}")
    if not derived(p).hypersensitive:
        raise PreconditionError("tile check is stated for hypersensitive parameters")
    lam = derived(p).lambda_min

    def rec(word: str, bound: Fraction) -> bool:
        i_iv, j_iv = tile(p, word)
        if j_iv.length < bound * i_iv.length:
            return False
        if len(word) == depth:
            return True
        return all(rec(word + str(i), bound * lam) for i in range(3))

    return rec("", Fraction(1))


def _rational_power_le(value: Fraction, base: Fraction, expo: Fraction) -> bool:
    """Exact test value <= base**expo for positive rationals, rational expo."""
    n, d = expo.numerator, expo.denominator
    # value^d <= base^n  (both sides positive; d > 0)
    return value**d <= base**n


def _pair_ok(df: Fraction, ratio: Fraction, alpha: RealEnclosure, bits: int) -> bool:
    """Sound check df <= ratio**a for every a in the alpha enclosure."""
    if df <= 0:
        return True
    if ratio >= 1 and df <= 1:
        return True
    if ratio < 1 and df <= ratio:
        # ratio^a >= ratio for a <= 1
        return True
    # min over the enclosure sits at alpha.lo when ratio >= 1, else alpha.hi
    for denom_bits in (6, 9, 12):
        scale = 1 << denom_bits
        lo = Fraction(math.floor(alpha.lo * scale), scale)
        hi = Fraction(math.ceil(alpha.hi * scale), scale)
        expo = lo if ratio >= 1 else hi
        if _rational_power_le(df, ratio, expo):
            return True
    # fall back to log comparison: ln df <= a * ln ratio, outward rounded
    ldf = log_enclosure(df, bits)
    rhs = log_enclosure(ratio, bits) * alpha
    return ldf.hi <= rhs.lo


def approximant_hoelder_check(p: Parameter, k: int, bits: int = 60) -> bool:
    """Finite surrogate of the Hölder bound on the k-th approximant: every
    breakpoint pair (x, x') satisfies |f(x)-f(x')| <= C |x-x'|^alpha with
    C = (x2-x1)^(-alpha), verified for all alpha in the alpha_min enclosure.
    """
    alpha, _ = hoelder(p, bits)
    f, _ = approximant(p, k)
    gap = p.x2 - p.x1
    pts = f.points
    n = len(pts)
    for a in range(n):
        xa, ya = pts[a]
        for b in range(a + 1, n):
            xb, yb = pts[b]
            df = abs(yb - ya)
            ratio = (xb - xa) / gap  # df <= ratio^alpha is the claim
            if not _pair_ok(df, ratio, alpha, bits):
                return False
    return True


def report_to_json(report: RegularityReport) -> str:
    def enc(e: RealEnclosure):
        return {"lo": format_rational(e.lo), "hi": format_rational(e.hi)}

    return json.dumps(
        {
            "alpha_min": enc(report.alpha_min),
            "hoelder_constant_bound": enc(report.hoelder_constant_bound),
            "beta": enc(report.beta),
            "hypersensitive": report.hypersensitive,
            "c_hyp": format_rational(report.c_hyp),
        },
        sort_keys=True,
        indent=2,
    )


def report_from_json(text: str) -> RegularityReport:
    data = json.loads(text)

    def enc(d) -> RealEnclosure:
        return RealEnclosure(parse_rational(d["lo"]), parse_rational(d["hi"]))

    return RegularityReport(
        alpha_min=enc(data["alpha_min"]),
        hoelder_constant_bound=enc(data["hoelder_constant_bound"]),
        beta=enc(data["beta"]),
        hypersensitive=bool(data["hypersensitive"]),
        c_hyp=parse_rational(data["c_hyp"]),
    )
