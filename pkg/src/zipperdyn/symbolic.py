"""Orbit realizations built from verified horseshoes.

Everything delivered here reduces to two exactly checkable tile relations:
forward chains T(I_w) = J_w inside the next tile (itineraries), and covering
loops T(I_w) = J_w containing the next tile (periodic points, via the
intermediate value theorem).  Checkers revalidate certificates without
re-running any search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Parameter, derived, tile, word_maps
from .errors import BudgetExceededError, DomainError, PreconditionError, SearchFailedError
from .horseshoe import HorseshoeCertificate, disjointify, region_b_search, symmetric_search, verify
from .intervals import Interval

_GREEDY_CAP = 200_000


# ---------------------------------------------------------------------------
# refinement primitives


def refine_into(p: Parameter, word: str, k_iv: Interval, node_budget: int = 20_000) -> str:
    """Shortest-found extension tau with J_(word+tau) strictly inside k_iv.

    Breadth-first up to `node_budget` expansions (which yields the minimal
    depth), then a greedy midpoint descent that always terminates for
    targets of positive length.
    """
    _, v = word_maps(p, word)
    j_w = v.image_unit()
    if not j_w.contains_interval(k_iv):
        raise PreconditionError("target must lie inside the word's vertical tile")
    if k_iv.length == 0:
        raise BudgetExceededError("target has empty interior; no tile fits strictly inside")
    target = v.inverse().image(k_iv)

    queue: list[tuple[str, ...]] = [("", Fraction(0), Fraction(1))]
    nodes = 0
    while queue and nodes < node_budget:
        next_queue = []
        for tau, lo, hi in queue:
            nodes += 1
            cur = Interval(min(lo, hi), max(lo, hi))
            if target.strictly_contains(cur):
                return tau
            if not target.intersects(cur):
                continue
            for i in range(3):
                m = p.v_maps[i]
                next_queue.append((tau + str(i), m(lo), m(hi)))
        queue = next_queue

    # greedy fallback: descend towards the target midpoint
    tau = ""
    g = target
    for _ in range(_GREEDY_CAP):
        for i in range(3):
            j_i = p.v_maps[i].image_unit()
            if g.strictly_contains(j_i):
                return tau + str(i)
        clipped = g.intersect(Interval(Fraction(0), Fraction(1)))
        if clipped is None or clipped.length == 0:
            break
        mid = clipped.midpoint
        best, best_margin = None, None
        for i in range(3):
            j_i = p.v_maps[i].image_unit()
            margin = min(mid - j_i.lo, j_i.hi - mid)
            if margin > 0 and (best_margin is None or margin > best_margin):
                best, best_margin = i, margin
        if best is None:
            break
        g = p.v_maps[best].inverse().image(g)
        tau += str(best)
    raise BudgetExceededError("refinement budget exhausted")


def greedy_cover(p: Parameter, target: Interval, start: str = "") -> str:
    """Greedily deepest word tau (extending `start`) with J_tau containing
    the target; single-letter steps that keep exact containment."""
    _, v = word_maps(p, start)
    if not v.image_unit().contains_interval(target):
        raise PreconditionError("start word's vertical tile must contain the target")
    g = v.inverse().image(target)
    tau = start
    for _ in range(_GREEDY_CAP):
        best, best_margin = None, None
        for i in range(3):
            j_i = p.v_maps[i].image_unit()
            if j_i.contains_interval(g):
                margin = min(g.lo - j_i.lo, j_i.hi - g.hi)
                if best_margin is None or margin > best_margin:
                    best, best_margin = i, margin
        if best is None:
            return tau
        tau += str(best)
        g = p.v_maps[best].inverse().image(g)
    raise BudgetExceededError("cover budget exhausted")


# ---------------------------------------------------------------------------
# itineraries


@dataclass(frozen=True)
class Itinerary:
    certificate: HorseshoeCertificate
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if any(not 0 <= i < self.certificate.order for i in self.indices):
            raise DomainError("itinerary indices must reference certificate words")


@dataclass(frozen=True)
class RealizationCertificate:
    chain: tuple[str, ...]
    seed: Interval


def realize_itinerary(it: Itinerary) -> tuple[Interval, RealizationCertificate]:
    """Seed interval whose orbit visits the prescribed certificate tiles.

    Built backward: each chain word maps its tile's image strictly inside
    the next chain tile, so every point of the seed follows the itinerary.
    """
    if not it.indices:
        raise PreconditionError("itinerary must be nonempty")
    report = verify(it.certificate)
    if not report:
        raise PreconditionError(f"certificate does not verify: {report.violations[:1]}")
    p = it.certificate.parameter
    words = it.certificate.words
    chain: list[str] = [words[it.indices[-1]]]
    target = tile(p, chain[0])[0]
    for t in range(len(it.indices) - 2, -1, -1):
        base = words[it.indices[t]]
        tau = refine_into(p, base, target)
        chain.insert(0, base + tau)
        target = tile(p, chain[0])[0]
    cert = RealizationCertificate(tuple(chain), target)
    if not check_realization(it, cert):
        raise SearchFailedError("internal error: realization chain failed its own check")
    return target, cert


def check_realization(it: Itinerary, proof: RealizationCertificate) -> bool:
    """Combinatorial re-validation: prefix structure and exact J-ในside-I
    chain containments; no searches, no map evaluations."""
    p = it.certificate.parameter
    words = it.certificate.words
    if len(proof.chain) != len(it.indices):
        return False
    for t, w in enumerate(proof.chain):
        if not w.startswith(words[it.indices[t]]):
            return False
    if proof.seed != tile(p, proof.chain[0])[0]:
        return False
    for t in range(len(proof.chain) - 1):
        j_iv = tile(p, proof.chain[t])[1]
        i_next = tile(p, proof.chain[t + 1])[0]
        if not i_next.contains_interval(j_iv):
            return False
    return True


# ---------------------------------------------------------------------------
# disjoint horseshoes and order realization


def disjoint_horseshoe(p: Parameter, n: int) -> HorseshoeCertificate:
    """Verified horseshoe of order n whose tiles are pairwise disjoint as
    closed sets, in left-to-right order."""
    d = derived(p)
    if d.symmetric and d.hypersensitive:
        cert = symmetric_search(p, 2 * n)
    elif d.in_region_b and d.hypersensitive:
        cert = region_b_search(p, 2 * n)
    else:
        raise PreconditionError("no constructive search applies to this parameter")
    dis = disjointify(cert)
    if dis.order < n:
        raise SearchFailedError("disjointification produced fewer tiles than requested")
    out = HorseshoeCertificate(p, dis.words[:n])
    if not verify(out):
        raise SearchFailedError("internal error: truncated certificate failed to verify")
    return out


@dataclass(frozen=True)
class OrderRealization:
    parameter: Parameter
    k: int
    orbit_length: int
    symbols: tuple[tuple[int, int], ...]  # (i, j), listed in increasing order
    horseshoe: HorseshoeCertificate  # sorted, pairwise disjoint tiles
    points: tuple[Fraction, ...]
    itineraries: tuple[tuple[int, ...], ...]
    proofs: tuple[RealizationCertificate, ...]


def _validate_symbols(k: int, l: int, symbols) -> tuple[tuple[int, int], ...]:
    symbols = tuple((int(i), int(j)) for i, j in symbols)
    expected = {(i, j) for i in range(1, k + 1) for j in range(l + 1)}
    if len(symbols) != len(expected) or set(symbols) != expected:
        raise DomainError(f"order must list each of the {len(expected)} symbols exactly once")
    return symbols


def realize_order(p: Parameter, k: int, l: int, order) -> OrderRealization:
    """Realize a total order on the k x (l+1) symbols (i, j) by k orbit
    segments of length l+1: the j-th iterate of the i-th point sits in the
    tile whose left-to-right rank equals the symbol's rank in the order."""
    if k < 1 or l < 1:
        raise DomainError("need k >= 1 orbits of length l >= 1")
    symbols = _validate_symbols(k, l, order)
    n = k * (l + 1)
    hs = disjoint_horseshoe(p, n)
    rank = {sym: r for r, sym in enumerate(symbols)}
    points, itineraries, proofs = [], [], []
    for i in range(1, k + 1):
        indices = tuple(rank[(i, j)] for j in range(l + 1))
        seed, proof = realize_itinerary(Itinerary(hs, indices))
        points.append(seed.midpoint)
        itineraries.append(indices)
        proofs.append(proof)
    return OrderRealization(
        parameter=p,
        k=k,
        orbit_length=l,
        symbols=symbols,
        horseshoe=hs,
        points=tuple(points),
        itineraries=tuple(itineraries),
        proofs=tuple(proofs),
    )


def check_order_realization(real: OrderRealization) -> bool:
    """Standalone validation of every claim an order realization makes."""
    p = real.parameter
    hs = real.horseshoe
    if not verify(hs):
        return False
    tiles = [tile(p, w)[0] for w in hs.words]
    for a, b in zip(tiles, tiles[1:]):
        if not a.hi < b.lo:
            return False
    symbols = real.symbols
    rank = {sym: r for r, sym in enumerate(symbols)}
    if len(real.points) != real.k or len(real.proofs) != real.k:
        return False
    for i in range(1, real.k + 1):
        indices = real.itineraries[i - 1]
        if indices != tuple(rank[(i, j)] for j in range(real.orbit_length + 1)):
            return False
        it = Itinerary(hs, indices)
        if not check_realization(it, real.proofs[i - 1]):
            return False
        if not real.proofs[i - 1].seed.contains(real.points[i - 1]):
            return False
    # every pairwise comparison is decided by disjoint tile order
    for a in range(len(symbols)):
        for b in range(a + 1, len(symbols)):
            if not tiles[a].hi < tiles[b].lo:
                return False
    return True


# ---------------------------------------------------------------------------
# embedding finite dynamical systems


@dataclass(frozen=True)
class EmbeddingEntry:
    element: int  # 1-based
    word: str
    enclosure: Interval
    kind: str  # "periodic" or "preperiodic"


@dataclass(frozen=True)
class EmbeddingCertificate:
    parameter: Parameter
    mapping: tuple[int, ...]  # S(e) = mapping[e-1], 1-based values
    base_words: tuple[str, ...]  # element -> disjoint horseshoe word
    cycles: tuple[tuple[int, ...], ...]
    entries: tuple[EmbeddingEntry, ...]
    width_target: Fraction

    def entry(self, element: int) -> EmbeddingEntry:
        return self.entries[element - 1]


def _functional_cycles(mapping: tuple[int, ...]) -> list[list[int]]:
    m = len(mapping)
    on_cycle: set[int] = set()
    cycles: list[list[int]] = []
    seen_global: set[int] = set()
    for start in range(1, m + 1):
        if start in seen_global:
            continue
        path, pos = [], {}
        node = start
        while node not in pos and node not in seen_global:
            pos[node] = len(path)
            path.append(node)
            node = mapping[node - 1]
        if node in pos:  # fresh cycle
            cyc = path[pos[node]:]
            cycles.append(cyc)
            on_cycle.update(cyc)
        seen_global.update(path)
    return cycles


def _extend_self_covering(p: Parameter, word: str, max_extra: int = 3) -> str | None:
    """Shortest extension keeping J inside-out: J_(word+e) contains
    I_(word+e).  Searched breadth-first over extensions up to max_extra."""
    frontier = [word]
    for _ in range(max_extra):
        next_frontier = []
        for w in frontier:
            for i in range(3):
                cand = w + str(i)
                i_iv, j_iv = tile(p, cand)
                if j_iv.contains_interval(i_iv):
                    return cand
                next_frontier.append(cand)
        frontier = next_frontier
    return None


def _deep_fixed_word(p: Parameter, base: str, width_target: Fraction, cap: int = 4000) -> str:
    word = base
    for _ in range(cap):
        if tile(p, word)[0].length <= width_target:
            return word
        nxt = _extend_self_covering(p, word)
        if nxt is None:
            raise SearchFailedError(f"no self-covering refinement below {word!r}")
        word = nxt
    raise BudgetExceededError("fixed-point refinement budget exhausted")


def _deep_covering_loop(
    p: Parameter, bases: list[str], width_target: Fraction, lap_cap: int = 200
) -> list[str]:
    """Words u_t extending bases[t] with J_(u_t) containing I_(u_(t+1 mod q))
    and all horizontal tiles no wider than the target.

    Extension-only backward laps: targets only shrink, so every previously
    established containment stays valid; the wrap-around edge is preserved
    because position 0 never jumps, it only deepens.
    """
    q = len(bases)
    words = list(bases)
    for t in range(q):
        j_iv = tile(p, words[t])[1]
        if not j_iv.contains_interval(tile(p, words[(t + 1) % q])[0]):
            raise PreconditionError("base words do not form a covering loop")
    for _ in range(lap_cap):
        if all(tile(p, w)[0].length <= width_target for w in words):
            return words
        progress = False
        for t in range(q - 1, -1, -1):
            target = tile(p, words[(t + 1) % q])[0]
            extended = greedy_cover(p, target, start=words[t])
            if len(extended) > len(words[t]):
                progress = True
            words[t] = extended
        if not progress:
            raise SearchFailedError("covering loop refinement stalled")
    raise BudgetExceededError("covering loop refinement budget exhausted")


def embed(p: Parameter, mapping, width_target) -> EmbeddingCertificate:
    """Embed the finite dynamical system S on {1..m} given by `mapping`
    (1-based images) into the zipper map: periodic elements get covering
    loops of refined tiles, pre-periodic ones get tiles whose vertical image
    contains the already-certified successor enclosure."""
    mapping = tuple(int(v) for v in mapping)
    m = len(mapping)
    if m < 1 or any(not 1 <= v <= m for v in mapping):
        raise DomainError("mapping must send {1..m} into itself")
    width_target = Fraction(width_target)
    if width_target <= 0:
        raise DomainError("width target must be positive")
    hs = disjoint_horseshoe(p, m)
    base_words = hs.words  # element e -> base_words[e-1]
    cycles = _functional_cycles(mapping)

    words: dict[int, str] = {}
    for attempt in range(6):
        goal = width_target / (1 << (8 * attempt))
        words.clear()
        for cyc in cycles:
            if len(cyc) == 1:
                e = cyc[0]
                words[e] = _deep_fixed_word(p, base_words[e - 1], goal)
            else:
                deep = _deep_covering_loop(p, [base_words[e - 1] for e in cyc], goal)
                for e, w in zip(cyc, deep):
                    words[e] = w
        # pre-periodic elements, processed once their successor is ready
        pending = [e for e in range(1, m + 1) if e not in words]
        guard = 0
        while pending:
            rest = []
            for e in pending:
                succ = mapping[e - 1]
                if succ in words:
                    target = tile(p, words[succ])[0]
                    words[e] = greedy_cover(p, target, start=base_words[e - 1])
                else:
                    rest.append(e)
            if len(rest) == len(pending):
                raise SearchFailedError("tail ordering failed to make progress")
            pending = rest
            guard += 1
            if guard > m + 1:
                raise SearchFailedError("tail resolution exceeded the element count")
        if all(tile(p, w)[0].length <= width_target for w in words.values()):
            break
    else:
        raise BudgetExceededError("embedding refinement failed to reach the width target")

    on_cycle = {e for cyc in cycles for e in cyc}
    entries = tuple(
        EmbeddingEntry(
            element=e,
            word=words[e],
            enclosure=tile(p, words[e])[0],
            kind="periodic" if e in on_cycle else "preperiodic",
        )
        for e in range(1, m + 1)
    )
    cert = EmbeddingCertificate(
        parameter=p,
        mapping=mapping,
        base_words=base_words,
        cycles=tuple(tuple(c) for c in cycles),
        entries=entries,
        width_target=width_target,
    )
    if not check_embedding(cert):
        raise SearchFailedError("internal error: embedding certificate failed its own check")
    return cert


def check_embedding(cert: EmbeddingCertificate) -> bool:
    """Standalone validation of an embedding certificate.

    Checks the functional structure, that every element's word extends its
    own disjoint horseshoe word (injectivity), the covering containment
    J_(word_e) over I_(word_S(e)) for every element, and the enclosure
    widths.  A covering loop around each cycle plus the intermediate value
    theorem yields the periodic points; tail containments select exact
    preimages.
    """
    p = cert.parameter
    m = len(cert.mapping)
    if sorted(e for cyc in cert.cycles for e in cyc) != sorted(
        set(e for cyc in cert.cycles for e in cyc)
    ):
        return False
    if _functional_cycles(cert.mapping) != [list(c) for c in cert.cycles]:
        return False
    base_tiles = [tile(p, w)[0] for w in cert.base_words]
    for a in range(m):
        for b in range(a + 1, m):
            if base_tiles[a].intersects(base_tiles[b]):
                return False
    for e in range(1, m + 1):
        entry = cert.entry(e)
        if entry.element != e or not entry.word.startswith(cert.base_words[e - 1]):
            return False
        if entry.enclosure != tile(p, entry.word)[0]:
            return False
        if entry.enclosure.length > cert.width_target:
            return False
        succ = cert.mapping[e - 1]
        j_iv = tile(p, entry.word)[1]
        if not j_iv.contains_interval(cert.entry(succ).enclosure):
            return False
    on_cycle = {e for cyc in cert.cycles for e in cyc}
    for e in range(1, m + 1):
        expected = "periodic" if e in on_cycle else "preperiodic"
        if cert.entry(e).kind != expected:
            return False
    return True
