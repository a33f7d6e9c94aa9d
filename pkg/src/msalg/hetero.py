"""Split a single-sorted algebra back into sorts along a diagonal pair.

The pair (d, e_0..e_{S-1}) marks out retract images R_s = e_s(C).  The
split algebra has one sort per slot, carrier R_s relabeled 0..|R_s|-1, and
one symbol per (basic operation g, argument sort assignment v, target slot
t), tabulated as

  het_<g>_t<t>_v<v>(a_1, ..., a_n) = index of e_t(g(R_v1[a_1], ..., R_vn[a_n]))

Cross-sort families and the canonical pair connect the two directions for a
collapsed algebra: when the source is pure, pick for every ordered sort
pair (s, t) the lexicographically least unary term table A_s -> A_t (the
identity on the diagonal), and define

  d = the diag table,   e_s(x) = code of (e_{s,t}(x_s) for each t).

verify_mu_roundtrip checks that collapsing and then splitting returns the
original many-sorted algebra up to the per-sort codings; verify_nu_roundtrip
checks that splitting and then collapsing returns the original single-sorted
algebra up to one carrier bijection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

from .core import (
    BudgetError,
    CheckResult,
    OpTable,
    Profile,
    ProfileError,
    SortedAlgebra,
    SortedSignature,
    Symbol,
    TABLE_BUDGET,
    Verification,
)
from .clone import generate_fragment, is_pure
from .diagonal import DiagonalPair, verify_diagonal_pair
from .homog import HomogenizedAlgebra, homogenize


@dataclass(frozen=True)
class CrossSortFamily:
    """maps[s][t] is a unary term table A_s -> A_t; maps[s][s] is the
    identity."""

    algebra: SortedAlgebra
    maps: tuple[tuple[OpTable, ...], ...]


def cross_family_from_purity(alg: SortedAlgebra, *,
                             budget: int = TABLE_BUDGET) -> CrossSortFamily | None:
    """The canonical family: identity on the diagonal, lexicographically
    least table off it.  None when some sort pair has no connecting term."""
    rows = []
    for s in range(alg.n_sorts):
        frag = generate_fragment(alg, [(s,)], budget=budget)
        row = []
        for t in range(alg.n_sorts):
            if t == s:
                row.append(OpTable(Profile((s,), s), alg.carriers,
                                   tuple(range(alg.carriers[s]))))
                continue
            candidates = frag.tables.get(Profile((s,), t), ())
            if not candidates:
                return None
            row.append(min(candidates, key=lambda c: c.outputs))
        rows.append(tuple(row))
    return CrossSortFamily(alg, tuple(rows))


def mu_maps(h: HomogenizedAlgebra, family: CrossSortFamily):
    """Per sort, the coding a -> code of (e_{s,t}(a) for each t)."""
    S = len(h.radices)
    out = []
    for s in range(S):
        out.append(tuple(
            h.encode(tuple(family.maps[s][t].apply((a,)) for t in range(S)))
            for a in range(h.radices[s])))
    return tuple(out)


def canonical_pair(h: HomogenizedAlgebra, family: CrossSortFamily | None = None) -> DiagonalPair:
    """The diag table together with e_s built from the cross family."""
    if family is None:
        family = cross_family_from_purity(h.source)
        if family is None:
            raise ProfileError("source is not pure, no canonical pair exists")
    S = len(h.radices)
    es = []
    for s in range(S):
        outputs = tuple(
            h.encode(tuple(family.maps[s][t].apply((h.decode(x)[s],)) for t in range(S)))
            for x in range(h.size))
        es.append(OpTable(Profile((0,), 0), (h.size,), outputs))
    return DiagonalPair(h.algebra.table("diag"), tuple(es))


# ---------------------------------------------------------------------------
# the split algebra

@dataclass(frozen=True)
class HeterogenizedAlgebra:
    algebra: SortedAlgebra
    source: SortedAlgebra
    pair: DiagonalPair
    retracts: tuple[tuple[int, ...], ...]

    def sort_of(self, slot: int, element: int) -> int:
        """Index of a source element inside its slot's carrier."""
        return self.retracts[slot].index(element)


def heterogenize(source: SortedAlgebra, pair: DiagonalPair, *,
                 budget: int = TABLE_BUDGET) -> HeterogenizedAlgebra:
    ver = verify_diagonal_pair(source, pair)
    if not ver.ok:
        raise ProfileError("not a diagonal pair: %s" % ver.failures()[0].name)
    S = pair.width
    retracts = pair.retracts()
    pos = [{v: i for i, v in enumerate(r)} for r in retracts]
    sizes = tuple(len(r) for r in retracts)

    total = 0
    for sym in source.signature.symbols:
        n = sym.profile.arity
        for v in itertools.product(range(S), repeat=n):
            total += S * prod(sizes[s] for s in v)
    if total > budget:
        raise BudgetError("split signature needs %d table entries, budget is %d"
                          % (total, budget))

    symbols = []
    tables = []
    for sym, g in zip(source.signature.symbols, source.tables):
        n = g.arity
        for v in itertools.product(range(S), repeat=n):
            for t in range(S):
                name = "het_%s_t%d_v%s" % (sym.name, t, "".join(str(s) for s in v))
                outputs = []
                for args in itertools.product(*(range(sizes[s]) for s in v)):
                    y = g.apply(tuple(retracts[s][a] for s, a in zip(v, args)))
                    outputs.append(pos[t][pair.es[t].apply((y,))])
                symbols.append(Symbol(name, Profile(v, t)))
                tables.append(OpTable(Profile(v, t), sizes, tuple(outputs)))
    sig = SortedSignature(tuple("r%d" % s for s in range(S)), tuple(symbols))
    return HeterogenizedAlgebra(
        algebra=SortedAlgebra(sig, sizes, tuple(tables)),
        source=source, pair=pair, retracts=retracts)


def _conjugate(f: OpTable, fwd, inv, carriers) -> OpTable:
    """Relabel a table along per-sort bijections (fwd composed with inv)."""
    sizes = [carriers[s] for s in f.profile.inputs]
    outputs = []
    for args in itertools.product(*(range(n) for n in sizes)):
        back = tuple(inv[s][a] for s, a in zip(f.profile.inputs, args))
        outputs.append(fwd[f.profile.cod][f.apply(back)])
    return OpTable(f.profile, tuple(carriers), tuple(outputs))


def verify_mu_roundtrip(alg: SortedAlgebra, *, lam: int = 2,
                        budget: int = TABLE_BUDGET) -> Verification:
    """Collapse, split along the canonical pair, compare with the original.

    The comparison runs through the per-sort codings mu_s: operation tables
    must transport symbol by symbol, and the generated fragments at every
    input profile of length <= lam must transport as sets.
    """
    checks = []
    family = cross_family_from_purity(alg, budget=budget)
    checks.append(CheckResult("pure", family is not None,
                              "" if family else "no canonical pair without purity"))
    if family is None:
        return Verification(tuple(checks))
    h = homogenize(alg)
    pair = canonical_pair(h, family)
    checks.append(CheckResult("canonical-pair", verify_diagonal_pair(h.algebra, pair).ok))
    het = heterogenize(h.algebra, pair, budget=budget)

    S = alg.n_sorts
    sizes_ok = het.algebra.carriers == alg.carriers
    checks.append(CheckResult("sort-sizes", sizes_ok,
                              "split carriers %r vs source %r" % (het.algebra.carriers, alg.carriers)))
    if not sizes_ok:
        return Verification(tuple(checks))

    mus = mu_maps(h, family)
    fwd = []
    inv = []
    bij = True
    for s in range(S):
        codes = mus[s]
        slot = tuple(het.retracts[s].index(c) if c in het.retracts[s] else -1 for c in codes)
        bij = bij and sorted(slot) == list(range(alg.carriers[s]))
        fwd.append(slot)
        inv.append(tuple(slot.index(i) if i in slot else -1 for i in range(len(slot))))
    checks.append(CheckResult("mu-bijective", bij))
    if not bij:
        return Verification(tuple(checks))

    bad = None
    for sym, f in zip(alg.signature.symbols, alg.tables):
        name = "het_lift_%s_t%d_v%s" % (sym.name, sym.profile.cod,
                                        "".join(str(s) for s in sym.profile.inputs))
        try:
            g = het.algebra.table(name)
        except ProfileError:
            bad = (sym.name, "missing %s" % name)
            break
        if _conjugate(f, fwd, inv, alg.carriers) != g:
            bad = (sym.name, "table differs after recoding")
            break
    checks.append(CheckResult("ops-transport", bad is None,
                              "" if bad is None else "%s: %s" % bad))

    profiles = [(s,) for s in range(S)]
    if lam >= 2:
        profiles += [(s1, s2) for s1 in range(S) for s2 in range(S)]
    bad = None
    frag_a = generate_fragment(alg, profiles, budget=budget)
    frag_b = generate_fragment(het.algebra, profiles, budget=budget)
    for inputs in profiles:
        for cod in range(S):
            p = Profile(inputs, cod)
            want = {_conjugate(f, fwd, inv, alg.carriers).outputs
                    for f in frag_a.tables.get(p, ())}
            got = {f.outputs for f in frag_b.tables.get(p, ())}
            if want != got:
                bad = (p, len(want), len(got))
                break
        if bad:
            break
    checks.append(CheckResult("fragments-match", bad is None,
                              "" if bad is None else "profile %r: %d vs %d" % bad))
    return Verification(tuple(checks))


def verify_nu_roundtrip(source: SortedAlgebra, pair: DiagonalPair, *, lam: int = 2,
                        budget: int = TABLE_BUDGET):
    """Split along the pair, collapse again, compare with the original.

    Returns (Verification, bijection): the bijection sends a source element
    c to the code of (slot index of e_t(c) for each t) and must carry the
    lam-bounded fragments onto each other and the pair onto the diag-based
    one of the collapsed split.
    """
    het = heterogenize(source, pair, budget=budget)
    hb = homogenize(het.algebra)
    n = source.carriers[0]
    checks = []

    pos = [{v: i for i, v in enumerate(r)} for r in het.retracts]
    psi = tuple(hb.encode(tuple(pos[t][pair.es[t].apply((c,))] for t in range(pair.width)))
                for c in range(n))
    bij = len(set(psi)) == n == hb.size
    checks.append(CheckResult("element-bijection", bij,
                              "source %d, collapsed %d, distinct %d" % (n, hb.size, len(set(psi)))))
    if not bij:
        return Verification(tuple(checks)), psi
    inv = tuple(psi.index(x) for x in range(n))

    bad = None
    for width in range(1, lam + 1):
        p = Profile((0,) * width, 0)
        frag_c = generate_fragment(source, [p.inputs], budget=budget)
        frag_h = generate_fragment(hb.algebra, [p.inputs], budget=budget)
        want = {_conjugate(f, (psi,), (inv,), (n,)).outputs for f in frag_c.tables[p]}
        got = {f.outputs for f in frag_h.tables[p]}
        if want != got:
            bad = (width, len(want), len(got))
            break
    checks.append(CheckResult("fragments-match", bad is None,
                              "" if bad is None else "arity %d: %d vs %d" % bad))

    d_moved = _conjugate(pair.d, (psi,), (inv,), (n,))
    diag_ok = d_moved == hb.algebra.table("diag")
    moved = DiagonalPair(d_moved, tuple(_conjugate(e, (psi,), (inv,), (n,)) for e in pair.es))
    checks.append(CheckResult("pair-transport",
                              diag_ok and verify_diagonal_pair(hb.algebra, moved).ok,
                              "" if diag_ok else "moved d is not the diag table"))
    return Verification(tuple(checks)), psi


def verify_pair_independence(source: SortedAlgebra, pair1: DiagonalPair,
                             pair2: DiagonalPair, *,
                             budget: int = TABLE_BUDGET) -> Verification:
    """Two pairs over the same d give the same product, up to relabeling.

    The relabeling sends a slot-s element r of the first pair's retract to
    e'_s(r); mixed idempotence makes these inverse bijections and every
    transported basic (and d itself) must commute with the relabeling.
    """
    from .diagonal import matrix_product

    checks = [CheckResult("shared-d", pair1.d == pair2.d)]
    if pair1.d != pair2.d or pair1.width != pair2.width:
        return Verification(tuple(checks))
    n = source.carriers[0]
    S = pair1.width

    bad = None
    for s in range(S):
        e, e2 = pair1.es[s], pair2.es[s]
        for a in range(n):
            if e.apply((e2.apply((a,)),)) != e.apply((a,)) or \
               e2.apply((e.apply((a,)),)) != e2.apply((a,)):
                bad = (s, a)
                break
        if bad:
            break
    checks.append(CheckResult("mixed-idempotence", bad is None,
                              "" if bad is None else "slot %d at %d" % bad))
    if bad:
        return Verification(tuple(checks))

    mp1 = matrix_product(source, pair1)
    mp2 = matrix_product(source, pair2)
    fwd = []
    inv = []
    bij = True
    for s in range(S):
        r1, r2 = mp1.retracts[s], mp2.retracts[s]
        image = tuple(pair2.es[s].apply((r,)) for r in r1)
        back = tuple(pair1.es[s].apply((r,)) for r in r2)
        bij = bij and sorted(image) == list(r2) and sorted(back) == list(r1)
        fwd.append(tuple(r2.index(x) for x in image))
        inv.append(tuple(r1.index(x) for x in back))
    checks.append(CheckResult("retract-bijections", bij))
    if not bij:
        return Verification(tuple(checks))

    psi = tuple(mp2.encode(tuple(f[i] for f, i in zip(fwd, mp1.decode(b))))
                for b in range(mp1.algebra.carriers[0]))
    psi_inv = tuple(psi.index(x) for x in range(len(psi)))
    bad = None
    shared = ["mp_%s" % s.name for s in source.signature.symbols] + ["mp_d"]
    for name in shared:
        f1 = mp1.algebra.table(name)
        f2 = mp2.algebra.table(name)
        if _conjugate(f1, (psi,), (psi_inv,), mp1.algebra.carriers) != f2:
            bad = name
            break
    checks.append(CheckResult("product-transport", bad is None,
                              "" if bad is None else "symbol %s" % bad))
    return Verification(tuple(checks))
