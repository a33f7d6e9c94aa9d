"""Finite many-sorted algebras and their single-sorted companions.

The package moves between a many-sorted algebra A and a single-sorted
algebra on the product of its carriers, in both directions, and checks the
structure that is supposed to survive the trip: clone fragments, diagonal
pairs, matrix products, subalgebra and congruence lattices, invariant
relations, Mal'cev and Jonsson conditions.  Everything is finite and
table-driven; results come back as explicit tables, terms, or witness
tuples rather than yes/no alone.
"""

from .core import (
    App,
    BudgetError,
    CheckResult,
    OpTable,
    Profile,
    ProfileError,
    SortedAlgebra,
    SortedSignature,
    Symbol,
    Term,
    Var,
    Verification,
    build_algebra,
    compose,
    eval_term,
    projection,
    table_of_term,
    term_str,
)
from .clone import CloneFragment, PurityReport, fragment_contains, generate_fragment, is_pure
from .corpus import CORPUS, corpus_algebra, corpus_names
from .diagonal import (
    DiagonalPair,
    MatrixProduct,
    decompose_table,
    find_diagonal_pairs,
    matrix_product,
    satisfies_diagonal_identity,
    verify_decomposition,
    verify_diagonal_pair,
)
from .fmt import FormatError, emit_algebra, load_algebra, parse_algebra, save_algebra
from .hetero import (
    CrossSortFamily,
    HeterogenizedAlgebra,
    canonical_pair,
    cross_family_from_purity,
    heterogenize,
    verify_mu_roundtrip,
    verify_nu_roundtrip,
    verify_pair_independence,
)
from .homog import HomogenizedAlgebra, assemble, assembled_fragment, homogenize
from .lattice import (
    Congruence,
    PPFormula,
    Relation,
    SubUniverse,
    congruence_generate,
    direct_product,
    enumerate_congruences,
    enumerate_subuniverses,
    inv_enumerate,
    pp_evaluate,
    quotient,
    subalgebra_generate,
    verify_inv_iso,
    verify_sub_con_transfer,
)
from .malcev import (
    JonssonChain,
    MalcevWitness,
    check_cd_bruteforce,
    check_cp_bruteforce,
    find_jonsson,
    find_malcev_homog,
    find_malcev_per_sort,
)

__all__ = [
    "App", "BudgetError", "CheckResult", "OpTable", "Profile", "ProfileError",
    "SortedAlgebra", "SortedSignature", "Symbol", "Term", "Var", "Verification",
    "build_algebra", "compose", "eval_term", "projection", "table_of_term",
    "term_str", "CloneFragment", "PurityReport", "fragment_contains",
    "generate_fragment", "is_pure", "CORPUS", "corpus_algebra", "corpus_names",
    "DiagonalPair", "MatrixProduct", "decompose_table", "find_diagonal_pairs",
    "matrix_product", "satisfies_diagonal_identity", "verify_decomposition",
    "verify_diagonal_pair", "FormatError", "emit_algebra", "load_algebra",
    "parse_algebra", "save_algebra", "CrossSortFamily", "HeterogenizedAlgebra",
    "canonical_pair", "cross_family_from_purity", "heterogenize",
    "verify_mu_roundtrip", "verify_nu_roundtrip", "verify_pair_independence",
    "HomogenizedAlgebra", "assemble", "assembled_fragment", "homogenize",
    "Congruence", "PPFormula", "Relation", "SubUniverse",
    "congruence_generate", "direct_product", "enumerate_congruences",
    "enumerate_subuniverses", "inv_enumerate", "pp_evaluate", "quotient",
    "subalgebra_generate", "verify_inv_iso", "verify_sub_con_transfer",
    "JonssonChain", "MalcevWitness", "check_cd_bruteforce",
    "check_cp_bruteforce", "find_jonsson", "find_malcev_homog",
    "find_malcev_per_sort",
]
