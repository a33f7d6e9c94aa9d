"""Collapse a many-sorted algebra onto one sort.

The single carrier is the product of the source carriers, coded mixed-radix
with sort 0 most significant.  The signature keeps one n-ary symbol
"lift_<f>" per source symbol f plus one fresh S-ary symbol "diag" (S = sort
count):

  - diag(a_0, ..., a_{S-1}) takes component s from argument a_s;
  - lift_f(a_0, ..., a_{n-1}) applies f to the relevant decoded components
    in its cod slot and copies every other component from argument 0.

A nullary f has no argument 0 to copy junk from.  When every sort has some
closed term, lift_f stays nullary and the junk slots take the least value a
closed term can produce in that sort; otherwise lift_f gains one dummy
argument that supplies the junk components.

For a single-sorted input the result is the same algebra with lift_ renames
and an extra unary "diag" that is the identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

from .core import (
    MAX_ARITY,
    OpTable,
    Profile,
    ProfileError,
    SortedAlgebra,
    SortedSignature,
    Symbol,
    TABLE_BUDGET,
    check_arity,
    decode_all,
    decode_mixed,
    encode_mixed,
    is_homomorphism,
)
from .clone import generate_fragment


@dataclass(frozen=True)
class HomogenizedAlgebra:
    algebra: SortedAlgebra
    source: SortedAlgebra
    radices: tuple[int, ...]

    @property
    def size(self) -> int:
        return prod(self.radices)

    def encode(self, values) -> int:
        return encode_mixed(values, self.radices)

    def decode(self, code: int) -> tuple[int, ...]:
        return decode_mixed(code, self.radices)

    def elements(self):
        return decode_all(self.radices)


def _closed_term_values(alg: SortedAlgebra):
    """Per sort, the sorted set of values closed terms can take."""
    frag = generate_fragment(alg, [()])
    out = []
    for s in range(alg.n_sorts):
        vals = sorted({t.outputs[0] for t in frag.tables.get(Profile((), s), ())})
        out.append(tuple(vals))
    return out


def _lift(radices, f: OpTable) -> OpTable:
    n = prod(radices)
    outputs = []
    for args in itertools.product(range(n), repeat=f.arity):
        decoded = [decode_mixed(a, radices) for a in args]
        comps = list(decoded[0])
        comps[f.profile.cod] = f.apply(tuple(d[s] for d, s in zip(decoded, f.profile.inputs)))
        outputs.append(encode_mixed(comps, radices))
    return OpTable(Profile((0,) * f.arity, 0), (n,), tuple(outputs))


def _diag_table(radices) -> OpTable:
    S = len(radices)
    n = prod(radices)
    outputs = []
    for args in itertools.product(range(n), repeat=S):
        comps = tuple(decode_mixed(a, radices)[s] for s, a in enumerate(args))
        outputs.append(encode_mixed(comps, radices))
    return OpTable(Profile((0,) * S, 0), (n,), tuple(outputs))


def homogenize(alg: SortedAlgebra, *, max_arity: int = MAX_ARITY) -> HomogenizedAlgebra:
    S = alg.n_sorts
    check_arity(S, max_arity, "diag symbol (one argument per sort)")
    radices = alg.carriers
    n = prod(radices)
    symbols = [Symbol("diag", Profile((0,) * S, 0))]
    tables = [_diag_table(radices)]
    closed = None
    for sym, f in zip(alg.signature.symbols, alg.tables):
        lifted_name = "lift_%s" % sym.name
        if f.arity >= 1:
            symbols.append(Symbol(lifted_name, Profile((0,) * f.arity, 0)))
            tables.append(_lift(radices, f))
            continue
        if closed is None:
            closed = _closed_term_values(alg)
        if all(vals for vals in closed):
            comps = [vals[0] for vals in closed]
            comps[f.profile.cod] = f.outputs[0]
            symbols.append(Symbol(lifted_name, Profile((), 0)))
            tables.append(OpTable(Profile((), 0), (n,), (encode_mixed(comps, radices),)))
        else:
            outputs = []
            for a in range(n):
                comps = list(decode_mixed(a, radices))
                comps[f.profile.cod] = f.outputs[0]
                outputs.append(encode_mixed(comps, radices))
            symbols.append(Symbol(lifted_name, Profile((0,), 0)))
            tables.append(OpTable(Profile((0,), 0), (n,), tuple(outputs)))

    result = SortedAlgebra(SortedSignature(("h",), tuple(symbols)), (n,), tuple(tables))
    return HomogenizedAlgebra(algebra=result, source=alg, radices=radices)


def lift_table(h: HomogenizedAlgebra, f: OpTable) -> OpTable:
    """Lift one many-sorted table with arity >= 1 to the product carrier."""
    if f.arity < 1:
        raise ProfileError("nullary tables need the junk policy in homogenize")
    return _lift(h.radices, f)


def assemble(h: HomogenizedAlgebra, gs) -> OpTable:
    """Glue one table per sort into a single product-carrier table.

    gs[s] must land in sort s and all share the input profile
    (0, 1, ..., S-1) repeated: argument i of the result decodes to
    argument block i of each g_s.
    """
    S = len(h.radices)
    assert len(gs) == S and S >= 1
    rho = tuple(range(S))
    lam, rem = divmod(gs[0].profile.arity, S)
    if rem or any(g.profile.inputs != rho * lam for g in gs):
        raise ProfileError("component tables must share the input profile %r repeated" % (rho,))
    for s, g in enumerate(gs):
        if g.profile.cod != s:
            raise ProfileError("component %d lands in sort %d" % (s, g.profile.cod))
    n = h.size
    outputs = []
    for args in itertools.product(range(n), repeat=lam):
        flat = tuple(v for a in args for v in h.decode(a))
        outputs.append(h.encode(tuple(g.apply(flat) for g in gs)))
    return OpTable(Profile((0,) * lam, 0), (n,), tuple(outputs))


def assembled_fragment(h: HomogenizedAlgebra, lam: int, *,
                       budget: int = TABLE_BUDGET) -> dict[tuple[int, ...], OpTable]:
    """Every lam-ary product-carrier table assembled from source terms.

    One table per choice of a source term into each sort, all over the
    decoded-argument profile; the lam-ary fragment of the product algebra
    must equal this set.  Keyed by outputs.  Requires lam >= 1.
    """
    assert lam >= 1
    S = len(h.radices)
    rho = tuple(range(S)) * lam
    frag = generate_fragment(h.source, [rho], budget=budget)
    per_sort = [frag.tables.get(Profile(rho, s), ()) for s in range(S)]
    out = {}
    for gs in itertools.product(*per_sort):
        t = assemble(h, gs)
        out.setdefault(t.outputs, t)
    return out


def morphism_lift(hA: HomogenizedAlgebra, hB: HomogenizedAlgebra, maps):
    """Turn per-sort maps A_s -> B_s into one map between product carriers."""
    if len(hA.radices) != len(hB.radices):
        raise ProfileError("sort counts differ")
    out = []
    for code in range(hA.size):
        comps = hA.decode(code)
        out.append(hB.encode(tuple(m[v] for m, v in zip(maps, comps))))
    return tuple(out)


def verify_morphism_lift(hA: HomogenizedAlgebra, hB: HomogenizedAlgebra, maps):
    """Check maps is a homomorphism of the sources and that its product-
    carrier lift is one of the lifted algebras.  Returns (ok, detail)."""
    src_ok, src_wit = is_homomorphism(hA.source, hB.source, maps)
    if not src_ok:
        return False, "source maps break at %r" % (src_wit,)
    lifted = morphism_lift(hA, hB, maps)
    ok, wit = is_homomorphism(hA.algebra, hB.algebra, (lifted,))
    if not ok:
        return False, "lifted map breaks at %r" % (wit,)
    return True, ""
