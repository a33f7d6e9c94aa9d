"""Mal'cev witnesses, chain witnesses, and brute-force congruence checks.

A Mal'cev table satisfies p(x, x, y) = y and p(x, y, y) = x; a chain of
length 2n+1 runs from the first projection to the third through tables
fixing the flanks, d_i(x, y, x) = x, with consecutive tables agreeing on
(x, x, y) at even positions and on (x, y, y) at odd ones.  Both are
searched inside generated clone fragments, either one sort at a time or on
the product carrier after homogenizing, and come back with the term that
produced the table.

Searches scan candidates in ascending table_search_key order.  Keys are
injective on distinct tables, so there are no ties to break, and the term
attached to a table is the one its fragment recorded.

The brute-force checks at the bottom are single-algebra statements about
the congruence lattice of their argument, a necessary condition for the
corresponding variety-level property; the term witnesses above are what
certify the variety-level direction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clone import generate_fragment
from .core import (
    JONSSON_MAX,
    SUBUNIVERSE_BUDGET,
    TABLE_BUDGET,
    OpTable,
    Profile,
    SortedAlgebra,
    Term,
    projection,
    table_search_key,
)
from .homog import homogenize
from .lattice import congruence_join, congruence_meet, enumerate_congruences


@dataclass(frozen=True)
class MalcevWitness:
    """mode is per_sort (one table per sort) or homogenized (one table on
    the product carrier); terms re-tabulate to tables."""

    mode: str
    tables: tuple[OpTable, ...]
    terms: tuple[Term, ...]


@dataclass(frozen=True)
class JonssonChain:
    """steps[i] holds position i of the chain, one table per sort in
    per_sort mode and a single table in homogenized mode."""

    mode: str
    n: int
    steps: tuple[tuple[OpTable, ...], ...]
    terms: tuple[tuple[Term, ...], ...]


def _is_malcev(table: OpTable, n: int) -> bool:
    for x in range(n):
        for y in range(n):
            if table.apply((x, x, y)) != y or table.apply((x, y, y)) != x:
                return False
    return True


def _ternary_candidates(alg: SortedAlgebra, s: int, budget: int):
    prof = Profile((s, s, s), s)
    frag = generate_fragment(alg, [prof], budget=budget)
    return sorted(frag.tables[prof], key=table_search_key), frag


def find_malcev_per_sort(alg: SortedAlgebra, *, budget: int = TABLE_BUDGET):
    """One Mal'cev table per sort, or None when any sort lacks one."""
    tables, terms = [], []
    for s in range(alg.n_sorts):
        cands, frag = _ternary_candidates(alg, s, budget)
        hit = next((t for t in cands if _is_malcev(t, alg.carriers[s])), None)
        if hit is None:
            return None
        tables.append(hit)
        terms.append(frag.witness(hit))
    return MalcevWitness("per_sort", tuple(tables), tuple(terms))


def find_malcev_homog(alg: SortedAlgebra, *, budget: int = TABLE_BUDGET):
    """A Mal'cev table in the ternary fragment of the product carrier."""
    h = homogenize(alg)
    cands, frag = _ternary_candidates(h.algebra, 0, budget)
    hit = next((t for t in cands if _is_malcev(t, h.size)), None)
    if hit is None:
        return None
    return MalcevWitness("homogenized", (hit,), (frag.witness(hit),))


def _chain_single(alg: SortedAlgebra, s: int, nmax: int, budget: int):
    """Shortest chain over one sort as [(table, term), ...], or None.

    Breadth-first search over (table, position parity): a state is reached
    at its least position, and the target projection at an even position
    2n gives the least n.  Neighbor order follows the sorted candidate
    list, so the result is deterministic.
    """
    cands, frag = _ternary_candidates(alg, s, budget)
    n = alg.carriers[s]
    pairs = [(x, y) for x in range(n) for y in range(n)]
    dset = [t for t in cands if all(t.apply((x, y, x)) == x for x, y in pairs)]
    sig_xxy = {t: tuple(t.apply((x, x, y)) for x, y in pairs) for t in dset}
    sig_xyy = {t: tuple(t.apply((x, y, y)) for x, y in pairs) for t in dset}
    by_xxy, by_xyy = {}, {}
    for t in dset:
        by_xxy.setdefault(sig_xxy[t], []).append(t)
        by_xyy.setdefault(sig_xyy[t], []).append(t)

    pi0 = projection(alg.carriers, (s, s, s), 0)
    pi2 = projection(alg.carriers, (s, s, s), 2)
    assert pi0 in sig_xxy and pi2 in sig_xxy  # projections always qualify

    start, goal = (pi0, 0), (pi2, 0)
    parent = {start: None}
    frontier = [start]
    pos = 0
    while goal not in parent and frontier and pos < 2 * nmax:
        fresh = []
        for state in frontier:
            t, parity = state
            bucket = by_xxy[sig_xxy[t]] if parity == 0 else by_xyy[sig_xyy[t]]
            for t2 in bucket:
                nxt = (t2, 1 - parity)
                if nxt not in parent:
                    parent[nxt] = state
                    fresh.append(nxt)
        frontier = fresh
        pos += 1
    if goal not in parent:
        return None
    chain = []
    state = goal
    while state is not None:
        chain.append(state[0])
        state = parent[state]
    chain.reverse()
    return [(t, frag.witness(t)) for t in chain]


def find_jonsson(alg: SortedAlgebra, *, nmax: int = JONSSON_MAX,
                 mode: str = "per_sort", budget: int = TABLE_BUDGET):
    """Least-n chain up to nmax, or None as a bounded absence verdict.

    per_sort searches each sort separately and pads shorter chains by
    repeating their final projection, which keeps every link equality;
    homogenized searches the ternary fragment of the product carrier.
    """
    assert mode in ("per_sort", "homogenized")
    assert nmax >= 0
    if mode == "homogenized":
        chain = _chain_single(homogenize(alg).algebra, 0, nmax, budget)
        if chain is None:
            return None
        return JonssonChain(mode, (len(chain) - 1) // 2,
                            tuple((t,) for t, _ in chain),
                            tuple((w,) for _, w in chain))
    per = []
    for s in range(alg.n_sorts):
        chain = _chain_single(alg, s, nmax, budget)
        if chain is None:
            return None
        per.append(chain)
    n = max((len(c) - 1) // 2 for c in per)
    for chain in per:
        while len(chain) < 2 * n + 1:
            chain.append(chain[-1])
    steps = tuple(tuple(per[s][i][0] for s in range(alg.n_sorts))
                  for i in range(2 * n + 1))
    terms = tuple(tuple(per[s][i][1] for s in range(alg.n_sorts))
                  for i in range(2 * n + 1))
    return JonssonChain("per_sort", n, steps, terms)


# --------------------------------------------- congruence lattice checks

@dataclass(frozen=True)
class PermutabilityReport:
    ok: bool
    congruences: int
    witness: tuple | None  # (theta classes, eta classes, sort, (a, c))


@dataclass(frozen=True)
class DistributivityReport:
    ok: bool
    congruences: int
    witness: tuple | None  # (theta, eta, delta classes, sort, (a, b))


def _compose_partitions(l1, l2, n):
    out = set()
    for a in range(n):
        for b in range(n):
            if l1[a] != l1[b]:
                continue
            for c in range(n):
                if l2[b] == l2[c]:
                    out.add((a, c))
    return out


def check_cp_bruteforce(alg: SortedAlgebra, *, budget: int = SUBUNIVERSE_BUDGET) -> PermutabilityReport:
    """Do all congruence pairs permute, sort by sort, composing both ways."""
    cons = enumerate_congruences(alg, budget=budget)
    for i, theta in enumerate(cons):
        for eta in cons[i + 1:]:
            for s in range(alg.n_sorts):
                n = alg.carriers[s]
                left = _compose_partitions(theta.classes[s], eta.classes[s], n)
                right = _compose_partitions(eta.classes[s], theta.classes[s], n)
                if left != right:
                    pair = min(left ^ right)
                    return PermutabilityReport(
                        False, len(cons),
                        (theta.classes, eta.classes, s, pair))
    return PermutabilityReport(True, len(cons), None)


def check_cd_bruteforce(alg: SortedAlgebra, *, budget: int = SUBUNIVERSE_BUDGET) -> DistributivityReport:
    """Does meet distribute over join across all congruence triples."""
    cons = enumerate_congruences(alg, budget=budget)
    for theta, eta, delta in itertools.product(cons, repeat=3):
        left = congruence_meet(theta, congruence_join(eta, delta))
        right = congruence_join(congruence_meet(theta, eta),
                                congruence_meet(theta, delta))
        if left != right:
            spot = None
            for s in range(alg.n_sorts):
                for a in range(alg.carriers[s]):
                    for b in range(a + 1, alg.carriers[s]):
                        if left.related(s, a, b) != right.related(s, a, b):
                            spot = (s, (a, b))
                            break
                    if spot:
                        break
                if spot:
                    break
            return DistributivityReport(
                False, len(cons),
                (theta.classes, eta.classes, delta.classes) + spot)
    return DistributivityReport(True, len(cons), None)
