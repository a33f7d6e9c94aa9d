"""Diagonal pairs on a single-sorted algebra and the product they induce.

A diagonal pair of width S on an algebra C is an S-ary term operation d
together with unary term operations e_0, ..., e_{S-1} satisfying, for all
arguments:

  collapse      e_s(d(x_0, ..., x_{S-1})) = e_s(x_s)
  absorption    d(e_0(x_0), ..., e_{S-1}(x_{S-1})) = d(x_0, ..., x_{S-1})
  diagonal      d(a, a, ..., a) = a

Idempotence of each e_s follows but is checked anyway.  The strict variant
of collapse, e_s(d(x)) = x_s outright, forces every e_s to be the identity
on carriers with two or more elements, so it is not part of the verdict;
exact_projection_holds reports it separately.

The pair splits C into the retract images R_s = e_s(C).  The matrix product
rebuilds an algebra on the product of the retracts, with each basic
operation g transported along the decomposition map

  phi(g)(b_1, ..., b_n)_s = e_s(g(d(b_1), ..., d(b_n)))

where d(b) means d applied to the decoded retract components of b.  The
checks compare three independently computed versions of the lam-ary tables
of the product: the transported image phi(Clo_lam(C)), the fragment
generated from the transported basics, and the assembly of e_s-image
classes computed by closing restricted projections over retract-valued
argument points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

import numpy as np

from .core import (
    BudgetError,
    CheckResult,
    MAX_ARITY,
    OpTable,
    Profile,
    ProfileError,
    SortedAlgebra,
    SortedSignature,
    Symbol,
    TABLE_BUDGET,
    Var,
    Verification,
    check_arity,
    compose,
    decode_mixed,
    encode_mixed,
)
from .clone import generate_fragment, saturate


@dataclass(frozen=True)
class DiagonalPair:
    d: OpTable
    es: tuple[OpTable, ...]

    @property
    def width(self) -> int:
        return len(self.es)

    def retracts(self) -> tuple[tuple[int, ...], ...]:
        """Per slot, the sorted image of e_s."""
        return tuple(tuple(sorted(set(e.outputs))) for e in self.es)


def _shape_ok(alg: SortedAlgebra, pair: DiagonalPair) -> str:
    if not alg.is_single_sorted:
        return "algebra must be single sorted"
    S = pair.width
    if pair.d.profile != Profile((0,) * S, 0):
        return "d must be %d-ary on the single sort" % S
    for s, e in enumerate(pair.es):
        if e.profile != Profile((0,), 0):
            return "e_%d must be unary" % s
    if pair.d.carriers != alg.carriers or any(e.carriers != alg.carriers for e in pair.es):
        return "tables built over different carriers"
    return ""


def verify_diagonal_pair(alg: SortedAlgebra, pair: DiagonalPair) -> Verification:
    """Check the three pair equations plus idempotence of each e_s."""
    shape = _shape_ok(alg, pair)
    if shape:
        return Verification((CheckResult("shape", False, shape),))
    n = alg.carriers[0]
    S = pair.width
    checks = [CheckResult("shape", True)]

    bad = None
    for args in itertools.product(range(n), repeat=S):
        y = pair.d.apply(args)
        for s, e in enumerate(pair.es):
            if e.apply((y,)) != e.apply((args[s],)):
                bad = (s, args)
                break
        if bad:
            break
    checks.append(CheckResult("collapse", bad is None,
                              "" if bad is None else "e_%d breaks at %r" % bad))

    bad = None
    for args in itertools.product(range(n), repeat=S):
        folded = tuple(e.apply((a,)) for e, a in zip(pair.es, args))
        if pair.d.apply(folded) != pair.d.apply(args):
            bad = args
            break
    checks.append(CheckResult("absorption", bad is None,
                              "" if bad is None else "breaks at %r" % (bad,)))

    bad = next((a for a in range(n) if pair.d.apply((a,) * S) != a), None)
    checks.append(CheckResult("diagonal", bad is None,
                              "" if bad is None else "d fixes everything but %d" % bad))

    bad = None
    for s, e in enumerate(pair.es):
        for a in range(n):
            if e.apply((e.apply((a,)),)) != e.apply((a,)):
                bad = (s, a)
                break
        if bad:
            break
    checks.append(CheckResult("idempotence", bad is None,
                              "" if bad is None else "e_%d at %d" % bad))
    return Verification(tuple(checks))


def exact_projection_holds(alg: SortedAlgebra, pair: DiagonalPair):
    """The strict collapse e_s(d(x)) = x_s.  Reported separately because it
    only holds for identity retractions on carriers of size 2 or more."""
    if _shape_ok(alg, pair):
        return False, None
    n = alg.carriers[0]
    for args in itertools.product(range(n), repeat=pair.width):
        y = pair.d.apply(args)
        for s, e in enumerate(pair.es):
            if e.apply((y,)) != args[s]:
                return False, (s, args)
    return True, None


def satisfies_diagonal_identity(alg: SortedAlgebra, d: OpTable):
    """Collapsing an S x S grid row-wise and then once more agrees with
    collapsing the main diagonal.  Returns (ok, witness grid or None)."""
    if not alg.is_single_sorted or d.carriers != alg.carriers:
        raise ProfileError("d must be a table on the single-sorted algebra")
    S = d.arity
    n = alg.carriers[0]
    for grid in itertools.product(range(n), repeat=S * S):
        rows = [grid[s * S:(s + 1) * S] for s in range(S)]
        outer = d.apply(tuple(d.apply(r) for r in rows))
        if outer != d.apply(tuple(rows[s][s] for s in range(S))):
            return False, grid
    return True, None


def find_diagonal_pairs(alg: SortedAlgebra, width: int, *,
                        budget: int = TABLE_BUDGET) -> tuple[DiagonalPair, ...]:
    """All diagonal pairs of the given width among the term operations.

    Deterministic: candidates come out of fragment generation in insertion
    order and the result is sorted by (d outputs, e outputs).
    """
    if not alg.is_single_sorted:
        raise ProfileError("diagonal pairs live on single-sorted algebras")
    check_arity(width, MAX_ARITY, "pair width")
    frag = generate_fragment(alg, [(0,) * width, (0,)], budget=budget)
    ds = frag.tables[Profile((0,) * width, 0)]
    es = frag.tables[Profile((0,), 0)]
    n = alg.carriers[0]
    found = []
    for d in ds:
        if any(d.apply((a,) * width) != a for a in range(n)):
            continue
        for combo in itertools.product(es, repeat=width):
            pair = DiagonalPair(d, tuple(combo))
            if verify_diagonal_pair(alg, pair).ok:
                found.append(pair)
    found.sort(key=lambda p: (p.d.outputs, tuple(e.outputs for e in p.es)))
    return tuple(found)


# ---------------------------------------------------------------------------
# the product over the retracts

@dataclass(frozen=True)
class MatrixProduct:
    """The algebra rebuilt on the product of the retract images.

    Carrier codes are mixed-radix over the retract sizes; decode gives per
    slot an index into retracts[s], element_of turns a code into the tuple
    of actual retract elements of the source carrier.
    """

    source: SortedAlgebra
    pair: DiagonalPair
    retracts: tuple[tuple[int, ...], ...]
    algebra: SortedAlgebra

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.retracts)

    def encode(self, indices) -> int:
        return encode_mixed(indices, self.sizes)

    def decode(self, code: int) -> tuple[int, ...]:
        return decode_mixed(code, self.sizes)

    def element_of(self, code: int) -> tuple[int, ...]:
        return tuple(r[i] for r, i in zip(self.retracts, self.decode(code)))

    def recombine(self, code: int) -> int:
        """d applied to the decoded retract elements."""
        return self.pair.d.apply(self.element_of(code))


def decompose_table(source: SortedAlgebra, pair: DiagonalPair, f: OpTable,
                    retracts=None) -> OpTable:
    """Transport one term table of the source onto the product carrier."""
    if retracts is None:
        retracts = pair.retracts()
    sizes = tuple(len(r) for r in retracts)
    N = prod(sizes)
    pos = [{v: i for i, v in enumerate(r)} for r in retracts]
    outputs = []
    for args in itertools.product(range(N), repeat=f.arity):
        inner = tuple(
            pair.d.apply(tuple(r[i] for r, i in zip(retracts, decode_mixed(b, sizes))))
            for b in args)
        y = f.apply(inner)
        comps = tuple(pos[s][e.apply((y,))] for s, e in enumerate(pair.es))
        outputs.append(encode_mixed(comps, sizes))
    return OpTable(Profile((0,) * f.arity, 0), (N,), tuple(outputs))


def matrix_product(source: SortedAlgebra, pair: DiagonalPair) -> MatrixProduct:
    """Build the product algebra: one transported symbol per source symbol,
    plus the transported pair itself as mp_d and mp_e<s>."""
    ver = verify_diagonal_pair(source, pair)
    if not ver.ok:
        raise ProfileError("not a diagonal pair: %s" % (ver.failures()[0].name))
    retracts = pair.retracts()
    sizes = tuple(len(r) for r in retracts)
    N = prod(sizes)
    symbols = []
    tables = []
    for sym, f in zip(source.signature.symbols, source.tables):
        symbols.append(Symbol("mp_%s" % sym.name, Profile((0,) * f.arity, 0)))
        tables.append(decompose_table(source, pair, f, retracts))
    symbols.append(Symbol("mp_d", Profile((0,) * pair.width, 0)))
    tables.append(decompose_table(source, pair, pair.d, retracts))
    for s, e in enumerate(pair.es):
        symbols.append(Symbol("mp_e%d" % s, Profile((0,), 0)))
        tables.append(decompose_table(source, pair, e, retracts))
    alg = SortedAlgebra(SortedSignature(("p",), tuple(symbols)), (N,), tuple(tables))
    return MatrixProduct(source=source, pair=pair, retracts=retracts, algebra=alg)


def _class_assembled_fragment(mp: MatrixProduct, lam: int, *,
                              budget: int = TABLE_BUDGET) -> set:
    """Second route to the lam-ary tables of the product.

    Work over the retract-valued argument points: close the position
    projections under the source basics, push each closed vector through
    e_s, and assemble one table per choice of an e_s-image class per slot.
    The restriction to retract-valued points is what identifies two source
    terms that land in the same class.
    """
    S = mp.pair.width
    retracts = mp.retracts
    positions = [retracts[s] for _ in range(lam) for s in range(S)]
    points = list(itertools.product(*positions))
    n_points = len(points)
    cols = np.array(points, dtype=np.int64).reshape(n_points, lam * S)
    rho = (0,) * (lam * S)
    seeds = {0: [(cols[:, j], Var(Profile(rho, 0), j)) for j in range(lam * S)]}
    closed = saturate(mp.source, n_points, seeds, budget, ambient_inputs=rho)
    matrix, _terms = closed[0]
    class_reps: list[list[bytes]] = []
    arrays: list[dict[bytes, np.ndarray]] = []
    for s in range(S):
        e_flat = np.asarray(mp.pair.es[s].outputs, dtype=np.int64)
        seen: dict[bytes, np.ndarray] = {}
        for row in matrix:
            pushed = e_flat[row]
            seen.setdefault(pushed.tobytes(), pushed)
        class_reps.append(list(seen))
        arrays.append(seen)
    if prod(len(c) for c in class_reps) > budget:
        raise BudgetError("class assembly would exceed the table budget")
    sizes = mp.sizes
    N = prod(sizes)
    point_index = {p: i for i, p in enumerate(points)}
    pos = [{v: i for i, v in enumerate(r)} for r in retracts]
    out = set()
    for keys in itertools.product(*class_reps):
        reps = [arrays[s][k] for s, k in enumerate(keys)]
        outputs = []
        for args in itertools.product(range(N), repeat=lam):
            flat = tuple(v for b in args for v in mp.element_of(b))
            j = point_index[flat]
            comps = tuple(pos[s][int(reps[s][j])] for s in range(S))
            outputs.append(encode_mixed(comps, sizes))
        out.add(tuple(outputs))
    return out


def verify_decomposition(source: SortedAlgebra, pair: DiagonalPair, lam: int, *,
                         budget: int = TABLE_BUDGET) -> Verification:
    """Cross-check the transport at arity lam from three directions."""
    mp = matrix_product(source, pair)
    frag_src = generate_fragment(source, [(0,) * lam, (0,)], budget=budget)
    src_tables = frag_src.tables[Profile((0,) * lam, 0)]
    phi = {f.outputs: decompose_table(source, pair, f, mp.retracts) for f in src_tables}
    checks = []

    images = {t.outputs for t in phi.values()}
    checks.append(CheckResult(
        "phi-injective", len(images) == len(src_tables),
        "%d tables, %d images" % (len(src_tables), len(images))))

    frag_mp = generate_fragment(mp.algebra, [(0,) * lam], budget=budget)
    mp_tables = {t.outputs for t in frag_mp.tables[Profile((0,) * lam, 0)]}
    checks.append(CheckResult(
        "phi-image-equals-generated", images == mp_tables,
        "image %d vs generated %d" % (len(images), len(mp_tables))))

    class_tables = _class_assembled_fragment(mp, lam, budget=budget)
    checks.append(CheckResult(
        "phi-image-equals-classes", images == class_tables,
        "image %d vs classes %d" % (len(images), len(class_tables))))

    bad = None
    unary = frag_src.tables[Profile((0,), 0)]
    phi_unary = {g.outputs: decompose_table(source, pair, g, mp.retracts) for g in unary}
    for f in src_tables:
        for gs in itertools.product(unary, repeat=lam):
            left = decompose_table(source, pair, compose(f, gs), mp.retracts)
            right = compose(phi[f.outputs], tuple(phi_unary[g.outputs] for g in gs))
            if left != right:
                bad = (f.outputs, tuple(g.outputs for g in gs))
                break
        if bad:
            break
    checks.append(CheckResult(
        "composition-compatible", bad is None,
        "" if bad is None else "breaks at %r" % (bad,)))

    n = source.carriers[0]
    mu = [mp.encode(tuple({v: i for i, v in enumerate(r)}[e.apply((a,))]
                          for r, e in zip(mp.retracts, pair.es)))
          for a in range(n)]
    bijective = len(set(mu)) == n == mp.algebra.carriers[0]
    inverse_ok = bijective and all(mp.recombine(mu[a]) == a for a in range(n))
    checks.append(CheckResult(
        "element-bijection", bijective and inverse_ok,
        "carrier %d, product %d, distinct %d" % (n, mp.algebra.carriers[0], len(set(mu)))))

    tp = DiagonalPair(mp.algebra.table("mp_d"),
                      tuple(mp.algebra.table("mp_e%d" % s) for s in range(pair.width)))
    ver = verify_diagonal_pair(mp.algebra, tp)
    checks.append(CheckResult("product-pair", ver.ok,
                              "" if ver.ok else ver.failures()[0].name))
    return Verification(tuple(checks))
