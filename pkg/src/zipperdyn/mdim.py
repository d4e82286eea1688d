"""Certified lower bounds on metric mean dimension via cell-transition
graphs.

[0,1] is cut into k = floor(1/(2 eps)) equal cells; an edge j -> l is
recorded only when the rigorous inner image of cell j's centered eps-core
contains cell l.  Paths in this graph start at (n, eps)-separated points,
so exact big-integer path counts give certified lower bounds on the
separated-set growth at scale eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Parameter, derived
from .enclosures import RealEnclosure, log_enclosure
from .errors import DomainError, PreconditionError
from .intervals import Interval
from .rationals import format_rational
from .zipper import image

_LOG_BITS = 48


@dataclass(frozen=True)
class TransitionGraph:
    cells: tuple[Interval, ...]
    cores: tuple[Interval, ...]
    out_ranges: tuple[tuple[int, int] | None, ...]  # inclusive cell index range
    epsilon: Fraction
    depth: int

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def adjacency(self) -> tuple[tuple[bool, ...], ...]:
        rows = []
        for rng in self.out_ranges:
            row = [False] * self.size
            if rng is not None:
                for j in range(rng[0], rng[1] + 1):
                    row[j] = True
            rows.append(tuple(row))
        return tuple(rows)

    def out_degree(self, j: int) -> int:
        rng = self.out_ranges[j]
        return 0 if rng is None else rng[1] - rng[0] + 1

    def min_out_degree(self) -> int:
        return min(self.out_degree(j) for j in range(self.size))

    def edges(self):
        for j, rng in enumerate(self.out_ranges):
            if rng is not None:
                for l in range(rng[0], rng[1] + 1):
                    yield j, l

    def dump(self) -> str:
        lines = [f"# cells={self.size} epsilon={format_rational(self.epsilon)} depth={self.depth}"]
        for j, rng in enumerate(self.out_ranges):
            targets = "" if rng is None else " ".join(str(l) for l in range(rng[0], rng[1] + 1))
            lines.append(f"{j}: {targets}")
        return "\n".join(lines) + "\n"


def tile_graph(p: Parameter, eps, depth: int) -> TransitionGraph:
    e = Fraction(eps)
    if not 0 < e < Fraction(1, 4):
        raise DomainError("eps must lie in (0, 1/4)")
    if not derived(p).hypersensitive:
        raise PreconditionError("the lower bound construction needs a hypersensitive parameter")
    k = math.floor(1 / (2 * e))
    cells = tuple(Interval(Fraction(j, k), Fraction(j + 1, k)) for j in range(k))
    cores = []
    for j in range(k):
        c = Fraction(2 * j + 1, 2 * k)
        cores.append(Interval(c - e / 2, c + e / 2))
    out_ranges: list[tuple[int, int] | None] = []
    for core in cores:
        inner = image(p, core, depth).inner
        if inner is None:
            out_ranges.append(None)
            continue
        lo_idx = math.ceil(inner.lo * k)
        hi_idx = math.floor(inner.hi * k) - 1
        out_ranges.append((lo_idx, hi_idx) if lo_idx <= hi_idx else None)
    return TransitionGraph(cells, tuple(cores), tuple(out_ranges), e, depth)


@dataclass(frozen=True)
class GrowthEstimate:
    lower: RealEnclosure | None  # None: no certified positive bound
    upper: RealEnclosure | None  # None: the graph has no paths at some length
    path_counts: tuple[int, ...]


def _propagate(out_ranges, vec):
    """One step of path counting: new[j] = sum of vec over j's out-range."""
    prefix = [0]
    for v in vec:
        prefix.append(prefix[-1] + v)
    return [
        0 if rng is None else prefix[rng[1] + 1] - prefix[rng[0]]
        for rng in out_ranges
    ]


def _diag_better(d: int, n: int, bd: int, bn: int) -> bool:
    """d^(1/n) > bd^(1/bn), i.e. d^bn > bd^n, with a bit-length shortcut."""
    if bn * (d.bit_length() - 1) > n * bd.bit_length():
        return True
    if bn * d.bit_length() < n * (bd.bit_length() - 1):
        return False
    return d**bn > bd**n


def growth_rate(graph: TransitionGraph, n_max: int, bits: int = _LOG_BITS) -> GrowthEstimate:
    """Two-sided enclosure of the exponential path growth of the graph.

    path_counts[n-1] counts paths with n vertices.  The upper bound uses
    subadditivity of log counts; the lower bound uses the best diagonal
    power (a closed walk can be repeated indefinitely).
    """
    return growth_from_ranges(graph.out_ranges, n_max, bits)


def growth_from_ranges(
    out_ranges: tuple[tuple[int, int] | None, ...], n_max: int, bits: int = _LOG_BITS
) -> GrowthEstimate:
    if n_max < 2:
        raise DomainError("need n_max >= 2")
    size = len(out_ranges)
    counts = [size]
    vec = [1] * size
    for _ in range(n_max - 1):
        vec = _propagate(out_ranges, vec)
        counts.append(sum(vec))

    has_dead_length = any(c <= 0 for c in counts)
    upper = None
    if not has_dead_length:
        for n in range(2, n_max + 1):
            # n vertices = n-1 edges; Fekete on edge counts
            cand = log_enclosure(counts[n - 1], bits).scale(Fraction(1, n - 1))
            if upper is None or cand.hi < upper.hi:
                upper = cand

    best_diag: tuple[int, int] | None = None  # (diag value, edge count)
    for j in range(size):
        vec = [0] * size
        vec[j] = 1
        for n_edges in range(1, n_max):
            vec = _propagate(out_ranges, vec)
            d = vec[j]
            if d >= 1 and (best_diag is None or _diag_better(d, n_edges, *best_diag)):
                best_diag = (d, n_edges)
    lower = None
    if best_diag is not None:
        d, n_edges = best_diag
        lower = log_enclosure(d, bits).scale(Fraction(1, n_edges))
    if upper is not None and lower is not None and lower.lo > upper.hi:
        raise DomainError("internal error: growth bounds crossed")
    return GrowthEstimate(lower, upper, tuple(counts))


@dataclass(frozen=True)
class MdimRow:
    epsilon: Fraction
    rate_lower: Fraction  # certified lower bound on per-step log path growth
    ratio: Fraction  # certified lower bound on rate / ln(1/eps)
    target: RealEnclosure
    min_out_degree: int
    hypersensitive: bool


def mdim_table(p: Parameter, eps_list, depth: int, n_max: int, bits: int = _LOG_BITS) -> list[MdimRow]:
    """Certified per-scale lower bounds on log N(eps, n)/(n ln(1/eps)),
    compared against the asymptotic target ln(lambda_min)/|ln(h_min)|."""
    if not eps_list:
        raise DomainError("need at least one scale")
    d = derived(p)
    if d.hypersensitive:
        target = log_enclosure(d.lambda_min, bits) / log_enclosure(1 / d.h_min, bits)
    else:
        target = RealEnclosure(Fraction(0), Fraction(0))
    rows = []
    for eps in eps_list:
        eps = Fraction(eps)
        if not d.hypersensitive:
            rows.append(MdimRow(eps, Fraction(0), Fraction(0), target, 0, False))
            continue
        graph = tile_graph(p, eps, depth)
        est = growth_rate(graph, n_max, bits)
        rate_lo = est.lower.lo if est.lower is not None else Fraction(0)
        rate_lo = max(rate_lo, Fraction(0))  # separated sets are never empty
        ln_inv = log_enclosure(1 / eps, bits)
        ratio = rate_lo / ln_inv.hi if rate_lo > 0 else Fraction(0)
        rows.append(MdimRow(eps, rate_lo, ratio, target, graph.min_out_degree(), True))
    return rows


def table_csv(rows: list[MdimRow]) -> str:
    lines = ["epsilon,rate_lo,ratio,target"]
    for r in rows:
        lines.append(
            ",".join(
                [
                    format_rational(r.epsilon),
                    format_rational(r.rate_lower),
                    format_rational(r.ratio),
                    format_rational(r.target.lo),
                ]
            )
        )
    return "\n".join(lines) + "\n"
