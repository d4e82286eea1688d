"""Search and exact verification of horseshoe certificates.

A certificate is a list of words over {0,1,2}, no word a prefix of another,
such that every vertical tile J_w contains every horizontal tile I_w'.
`verify` is the single source of truth: all searches are heuristics guided
by the constructive arguments, and everything they return is re-checked by
exact rational comparisons before being handed out.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Parameter, derived, tile, validate_word, word_maps
from .errors import (
    BudgetExceededError,
    DomainError,
    EpsilonTooLargeError,
    PreconditionError,
    SearchFailedError,
)
from .intervals import Interval
from .rationals import format_rational, parse_rational


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class HorseshoeCertificate:
    parameter: Parameter
    words: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        for w in self.words:
            validate_word(w)

    @property
    def order(self) -> int:
        return len(self.words)

    def to_json(self) -> str:
        return json.dumps(
            {"p": self.parameter.as_strings(), "words": list(self.words), "order": self.order},
            sort_keys=True,
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "HorseshoeCertificate":
        data = json.loads(text)
        p = Parameter(*[parse_rational(s) for s in data["p"]])
        cert = cls(p, tuple(data["words"]))
        if "order" in data and data["order"] != cert.order:
            raise DomainError("stated order disagrees with the word count")
        return cert


@dataclass
class VerificationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify(cert: HorseshoeCertificate) -> VerificationReport:
    """Exact check of both certificate invariants.

    Vacuously true on the empty word list.  On failure the report names
    violating pairs (at most a handful, to keep reports readable).
    """
    violations: list[str] = []
    words = cert.words
    for a in range(len(words)):
        for b in range(len(words)):
            if a != b and words[b].startswith(words[a]):
                violations.append(f"prefix violation: {words[a]!r} prefixes {words[b]!r}")
    tiles = [tile(cert.parameter, w) for w in words]
    for a, (_, j_iv) in enumerate(tiles):
        for b, (i_iv, _) in enumerate(tiles):
            if not j_iv.contains_interval(i_iv):
                violations.append(
                    f"containment violation: J_{words[a]!r} = {j_iv} does not contain "
                    f"I_{words[b]!r} = {i_iv}"
                )
                break
        if len(violations) >= 8:
            break
    return VerificationReport(not violations, violations)


def disjointify(cert: HorseshoeCertificate) -> HorseshoeCertificate:
    """Keep every other word in left-to-right tile order; the kept tiles are
    pairwise disjoint as closed sets."""
    report = verify(cert)
    if not report:
        raise PreconditionError(f"certificate does not verify: {report.violations[:1]}")
    if not cert.words:
        raise PreconditionError("cannot disjointify an empty certificate")
    ordered = sorted(cert.words)  # lex order = tile order for prefix-free words
    kept = tuple(ordered[::2])
    out = HorseshoeCertificate(cert.parameter, kept)
    tiles = [tile(cert.parameter, w)[0] for w in kept]
    for a, b in zip(tiles, tiles[1:]):
        if not a.hi < b.lo:
            raise PreconditionError("disjointification failed to separate tiles")
    if not verify(out):
        raise PreconditionError("disjointified certificate no longer verifies")
    return out


# ---------------------------------------------------------------------------
# coverage of vertical windows by {0,2}-words


def _interval_min_multiplicity(los, his, band: Interval) -> int:
    """Exact minimum over the closed band of #{i : los[i] <= y <= his[i]},
    given the two endpoint arrays individually sorted."""

    def count(y):
        return bisect.bisect_right(los, y) - bisect.bisect_left(his, y)

    pts = {band.lo, band.hi}
    for arr in (los, his):
        a = bisect.bisect_left(arr, band.lo)
        b = bisect.bisect_right(arr, band.hi)
        pts.update(arr[a:b])
    cands = sorted(pts)
    best = min(count(y) for y in cands)
    for a, b in zip(cands, cands[1:]):
        best = min(best, count((a + b) / 2))
    return best


@dataclass(frozen=True)
class CoverageProfile:
    """Multiplicity profile of the shrunken vertical windows
    [V_s(0)+eta, V_s(1)-eta] over all words s in {0,2}^n."""

    n: int
    eta: Fraction
    windows: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "_los", sorted(w.lo for w in self.windows))
        object.__setattr__(self, "_his", sorted(w.hi for w in self.windows))

    def count_at(self, y) -> int:
        y = Fraction(y)
        return bisect.bisect_right(self._los, y) - bisect.bisect_left(self._his, y)

    def min_on(self, iv: Interval) -> int:
        """Exact minimum multiplicity over the closed interval."""
        return _interval_min_multiplicity(self._los, self._his, iv)

    def integral(self) -> Fraction:
        return sum((w.length for w in self.windows), Fraction(0))

    @property
    def breakpoints(self) -> list[tuple[Fraction, int]]:
        """(y, multiplicity at y) at every point where the profile changes."""
        ys = sorted({e for w in self.windows for e in (w.lo, w.hi)})
        return [(y, self.count_at(y)) for y in ys]


def _two_letter_windows(p: Parameter, n: int, budget: int):
    if 2**n > budget:
        raise BudgetExceededError(f"2^{n} words exceed budget {budget}")
    v0, v2 = p.v_maps[0], p.v_maps[2]
    out = []

    def rec(depth, lo, hi):
        # current V_s([0,1]) = [lo, hi]
        if depth == n:
            out.append((lo, hi))
            return
        rec(depth + 1, v0(lo), v0(hi))
        rec(depth + 1, v2(lo), v2(hi))

    rec(0, Fraction(0), Fraction(1))
    return out


def coverage_count(p: Parameter, n: int, eta, budget: int = 2**20) -> CoverageProfile:
    """Exact sweep profile of {y : [y-eta, y+eta] inside V_s([0,1])} over all
    s in {0,2}^n."""
    eta = Fraction(eta)
    if eta <= 0:
        raise DomainError("eta must be positive")
    windows = []
    for lo, hi in _two_letter_windows(p, n, budget):
        if lo + eta <= hi - eta:
            windows.append(Interval(lo + eta, hi - eta))
    return CoverageProfile(n, eta, tuple(windows))


def _strict_min_multiplicity(raw, band: Interval) -> int:
    """Minimum over the band of #{s : y strictly inside the raw window}."""
    los = sorted(lo for lo, _ in raw)
    his = sorted(hi for _, hi in raw)

    def count(y):
        return bisect.bisect_left(los, y) - bisect.bisect_right(his, y)

    pts = {band.lo, band.hi}
    for arr in (los, his):
        a = bisect.bisect_left(arr, band.lo)
        b = bisect.bisect_right(arr, band.hi)
        pts.update(arr[a:b])
    cands = sorted(pts)
    best = min(count(y) for y in cands)
    for a, b in zip(cands, cands[1:]):
        best = min(best, count((a + b) / 2))
    return best


def cover_params(
    p: Parameter, eps, k: int, max_n: int = 18, budget: int = 2**20
) -> tuple[Fraction, int]:
    """Smallest window count n and a dyadic eta such that every point of
    [eps, 1-eps] lies in at least k shrunken windows."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise DomainError("eps must lie in (0, 1/2)")
    if not derived(p).in_region_b:
        raise PreconditionError("coverage guarantee needs (y1, y2) in region B")
    band = Interval(eps, 1 - eps)
    for n in range(1, max_n + 1):
        raw = _two_letter_windows(p, n, budget)
        if _strict_min_multiplicity(raw, band) < k:
            continue
        for j in range(1, 80):
            eta = Fraction(1, 1 << j)
            shrunk = [(lo + eta, hi - eta) for lo, hi in raw if lo + eta <= hi - eta]
            if not shrunk:
                continue
            los = sorted(lo for lo, _ in shrunk)
            his = sorted(hi for _, hi in shrunk)
            if _interval_min_multiplicity(los, his, band) >= k:
                return eta, n
    raise SearchFailedError(f"no (eta, n) with n <= {max_n} covers the band {k}-fold")


# ---------------------------------------------------------------------------
# transverse lines


@dataclass(frozen=True)
class Line:
    """y = slope * x + intercept."""

    slope: Fraction
    intercept: Fraction

    def at(self, x) -> Fraction:
        return self.slope * x + self.intercept


@dataclass(frozen=True)
class LineWitness:
    word: str
    slope: Fraction
    heights_at_01: tuple[Fraction, Fraction]
    epsilon: Fraction


def pullback_line(p: Parameter, letter: int, line: Line) -> Line:
    """Preimage of the line under the square self-map of the given letter."""
    h, v = p.h_maps[letter], p.v_maps[letter]
    slope = line.slope * h.slope / v.slope
    intercept = (line.slope * h.offset + line.intercept - v.offset) / v.slope
    return Line(slope, intercept)


def line_for_word(p: Parameter, word: str) -> Line:
    """Pullback of the diagonal under the word's square map."""
    line = Line(Fraction(1), Fraction(0))
    for c in word:
        line = pullback_line(p, int(c), line)
    return line


def _in_line_family(line: Line) -> bool:
    """Negative-slope lines meeting the interior of a vertical square side."""
    if not -1 < line.slope < 0:
        return False
    return 0 < line.at(0) < 1 or 0 < line.at(1) < 1


def _letter_keeps_family(p: Parameter, letter: int, line: Line) -> bool:
    if letter == 0:
        return 0 < line.at(0) < p.y1 or 0 < line.at(p.x1) < p.y1
    if letter == 2:
        return p.y2 < line.at(p.x2) < 1 or p.y2 < line.at(1) < 1
    raise DomainError("family extension uses letters 0 and 2 only")


def _is_transverse(line: Line, eps: Fraction) -> bool:
    h0, h1 = line.at(0), line.at(1)
    return eps <= min(h0, h1) and max(h0, h1) <= 1 - eps


def transverse_search(
    p: Parameter, eps, slope_bound, max_len: int = 4096
) -> LineWitness:
    """Word w such that the diagonal pulls back to a line crossing the unit
    square inside the band [eps, 1-eps], with slope in (-slope_bound, 0).

    Starts from the central letter and extends with letters 0/2, keeping the
    line in the meeting family; once flat enough, corrective letters push the
    line into the band.  The returned witness is exact.
    """
    eps = Fraction(eps)
    slope_bound = Fraction(slope_bound)
    if eps >= Fraction(1, 2):
        raise EpsilonTooLargeError("band [eps, 1-eps] is empty")
    if slope_bound <= 0:
        raise DomainError("slope bound must be positive")
    if not derived(p).hypersensitive:
        raise PreconditionError("transverse search needs a hypersensitive parameter")

    word = "1"
    line = line_for_word(p, word)
    if not _in_line_family(line):
        raise SearchFailedError("central pullback of the diagonal left the line family")

    def centering(l: Line) -> Fraction:
        vals = (l.at(0), l.at(1))
        return min(min(vals), 1 - max(vals))

    while len(word) < max_len:
        flat = -slope_bound < line.slope < 0
        if flat and _is_transverse(line, eps):
            return LineWitness(word, line.slope, (line.at(0), line.at(1)), eps)
        if not flat:
            candidates = [
                i for i in (0, 2) if _letter_keeps_family(p, i, line)
            ]
            if not candidates:
                raise SearchFailedError("no letter keeps the line in the family")
            letter = max(candidates, key=lambda i: centering(pullback_line(p, i, line)))
        else:
            # corrective phase: raise a low line with 0, lower a high one with 2
            low = max(line.at(0), line.at(1)) < Fraction(1, 2)
            letter = 0 if low else 2
        line = pullback_line(p, letter, line)
        word += str(letter)
    raise BudgetExceededError(f"no transverse word within length {max_len}")


# ---------------------------------------------------------------------------
# constructive searches


def symmetric_search(p: Parameter, k: int, max_n: int = 512) -> HorseshoeCertificate:
    """Certificate from the centered word family 1^(n+l)i, l even, i in {0,2}."""
    d = derived(p)
    if not d.symmetric:
        raise PreconditionError("symmetric search needs x1+x2 = y1+y2 = 1")
    if not d.hypersensitive:
        raise PreconditionError("symmetric search needs a hypersensitive parameter")
    if k < 1:
        raise DomainError("order must be at least 1")
    ratio = (p.x2 - p.x1) / (p.y1 - p.y2)  # < 1 by hypersensitivity
    ceiling = (Fraction(1, 2) - p.y2) * (p.y1 - p.y2) ** k
    n = 1
    floor_n = ratio / 2
    while floor_n >= ceiling:
        n += 1
        floor_n *= ratio
        if n > max_n:
            raise SearchFailedError("window conditions admit no n within budget")
    while n <= max_n:
        words = tuple(
            "1" * (n + l) + i for l in range(0, k + 1, 2) for i in ("0", "2")
        )
        cert = HorseshoeCertificate(p, words)
        if verify(cert):
            return cert
        n += 1
    raise SearchFailedError("symmetric family failed to verify within budget")


def _covering_two_letter_words(p: Parameter, n: int, target: Interval) -> list[str]:
    """All s in {0,2}^n with V_s([0,1]) containing the target interval."""
    out: list[str] = []

    def rec(word: str, lo: Fraction, hi: Fraction):
        if not (lo <= target.lo and target.hi <= hi):
            return
        if len(word) == n:
            out.append(word)
            return
        for i in (0, 2):
            m = p.v_maps[i]
            rec(word + str(i), m(lo), m(hi))

    rec("", Fraction(0), Fraction(1))
    return out


def region_b_search(
    p: Parameter, k: int, eps_candidates=(Fraction(1, 8), Fraction(1, 16), Fraction(1, 32))
) -> HorseshoeCertificate:
    """Certificate from a flat transverse word composed with covering words.

    Pipeline: pick coverage parameters (eta, n) on the band, find a word w
    whose diagonal pullback is flatter than 2*eta and crosses inside the
    band, then attach every {0,2}^n word whose vertical window contains the
    pullback's height range.  The result is re-verified exactly.
    """
    d = derived(p)
    if not d.hypersensitive:
        raise PreconditionError("region-B search needs a hypersensitive parameter")
    if not d.in_region_b:
        raise PreconditionError("region-B search needs (y1, y2) in region B")
    if k < 1:
        raise DomainError("order must be at least 1")
    last_error: Exception | None = None
    for eps in eps_candidates:
        try:
            eta, n = cover_params(p, eps, k)
            witness = transverse_search(p, eps, 2 * eta)
            h0, h1 = witness.heights_at_01
            a, b = min(h0, h1), max(h0, h1)
            y = (a + b) / 2
            window = Interval(y - eta, y + eta)
            if not (window.lo <= a and b <= window.hi):
                raise SearchFailedError("height range escaped the eta window")
            sigmas = _covering_two_letter_words(p, n, window)
            if len(sigmas) < k:
                raise SearchFailedError("coverage produced fewer words than promised")
            cert = HorseshoeCertificate(p, tuple(witness.word + s for s in sigmas))
            report = verify(cert)
            if report:
                return cert
            last_error = SearchFailedError(f"verification failed: {report.violations[:1]}")
        except (SearchFailedError, BudgetExceededError) as exc:
            last_error = exc
    raise SearchFailedError(f"region-B search failed: {last_error}")


# ---------------------------------------------------------------------------
# brute-force oracle


def brute_search(
    p: Parameter,
    k: int,
    max_len: int,
    anchor_max_len: int | None = None,
    node_budget: int = 40_000_000,
) -> HorseshoeCertificate | None:
    """Independent scan: look for an anchor tile U = I_u and at least k
    prefix-free words w with I_w inside U inside J_w.  Returns None on
    exhaustion (which proves nothing).
    """
    if k < 1:
        raise DomainError("order must be at least 1")
    if anchor_max_len is None:
        anchor_max_len = max(0, max_len - 1)
    h_maps, v_maps = p.h_maps, p.v_maps
    budget = [node_budget]

    def best_selection(u_lo: Fraction, u_hi: Fraction):
        """Max cardinality of a prefix-free family with I_w <= U <= J_w,
        words up to max_len, plus one witness family."""

        def rec(prefix, ha, hb, va, vb):
            # current word w: I_w = [hb, ha+hb], J_w = sorted([vb, va+vb])
            if budget[0] <= 0:
                raise BudgetExceededError("brute-force node budget exhausted")
            budget[0] -= 1
            i_lo, i_hi = hb, ha + hb
            if i_hi <= u_lo or u_hi <= i_lo:
                # no descendant tile can fit inside U
                return 0, []
            j_lo, j_hi = (vb, va + vb) if va > 0 else (va + vb, vb)
            if not (j_lo <= u_lo and u_hi <= j_hi):
                # J only shrinks along descent, so the whole subtree is out
                return 0, []
            qualifies = u_lo <= i_lo and i_hi <= u_hi
            take = (1, [prefix]) if qualifies else (0, [])
            if len(prefix) == max_len:
                return take
            total, parts = 0, []
            for i in range(3):
                hm, vm = h_maps[i], v_maps[i]
                c, ws = rec(prefix + str(i), ha * hm.slope, ha * hm.offset + hb,
                            va * vm.slope, va * vm.offset + vb)
                total += c
                parts.extend(ws)
            if total > take[0]:
                return total, parts
            return take

        return rec("", Fraction(1), Fraction(0), Fraction(1), Fraction(0))

    # anchors in breadth-first order; only self-covering tiles can anchor
    frontier: list[tuple[str, Fraction, Fraction, Fraction, Fraction]] = [
        ("", Fraction(1), Fraction(0), Fraction(1), Fraction(0))
    ]
    while frontier:
        next_frontier = []
        for word, ha, hb, va, vb in frontier:
            i_lo, i_hi = hb, ha + hb
            j_lo, j_hi = (vb, va + vb) if va > 0 else (va + vb, vb)
            if j_lo <= i_lo and i_hi <= j_hi:
                count, words = best_selection(i_lo, i_hi)
                if count >= k:
                    cert = HorseshoeCertificate(p, tuple(sorted(words)))
                    if verify(cert):
                        return cert
            if len(word) < anchor_max_len:
                for i in range(3):
                    hm, vm = h_maps[i], v_maps[i]
                    next_frontier.append(
                        (word + str(i), ha * hm.slope, ha * hm.offset + hb,
                         va * vm.slope, va * vm.offset + vb)
                    )
        frontier = next_frontier
    return None
