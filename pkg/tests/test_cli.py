"""Command-line behavior: exit codes, report shape, emitted files, fixtures."""

import io
import os
import subprocess
import sys
from contextlib import redirect_stdout

from msalg.corpus import corpus_algebra, corpus_names
from msalg.cli import main
from msalg.fmt import parse_algebra
from msalg.core import build_algebra
from msalg.hetero import canonical_pair
from msalg.homog import homogenize
from msalg.lattice import inv_enumerate

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def run_cli(args):
    buf = io.StringIO()
    with redirect_stdout(buf):
        rc = main(list(args))
    return rc, buf.getvalue()


def body_after_algebra_marker(out):
    head, sep, tail = out.partition("algebra:\n")
    assert sep, "no algebra block in output"
    return tail


def test_pure_reports_match_fixtures_byte_for_byte():
    for name in corpus_names():
        rc, out = run_cli(["pure", "@" + name, "--deterministic-timing"])
        with open(os.path.join(FIXTURES, "pure_%s.txt" % name)) as fh:
            assert out == fh.read(), name
        assert rc == (1 if name == "nonpure" else 0), name


def test_pure_nonpure_lists_both_missing_sort_pairs():
    rc, out = run_cli(["pure", "@nonpure", "--deterministic-timing"])
    assert rc == 1
    assert "missing: a->b" in out
    assert "missing: b->a" in out


def test_homogenize_emits_a_parseable_single_sorted_file():
    rc, out = run_cli(["homogenize", "@a_tiny", "--deterministic-timing"])
    assert rc == 0
    assert "carrier: 6" in out
    alg = parse_algebra(body_after_algebra_marker(out))
    assert alg.is_single_sorted
    assert alg.carriers == (6,)
    names = [s.name for s in alg.signature.symbols]
    assert "diag" in names


def test_homogenize_out_flag_writes_the_file(tmp_path):
    target = str(tmp_path / "collapsed.alg")
    rc, out = run_cli(["homogenize", "@a_malcev", "--out", target])
    assert rc == 0
    assert "written: %s" % target in out
    with open(target) as fh:
        alg = parse_algebra(fh.read())
    assert alg.carriers == (6,)


def test_heterogenize_output_round_trips_through_the_parser():
    rc, out = run_cli(["heterogenize", "@a_tiny", "--deterministic-timing"])
    assert rc == 0
    alg = parse_algebra(body_after_algebra_marker(out))
    assert alg.carriers == (2, 3)


def test_reports_are_byte_identical_across_runs():
    for args in (["transfer", "@a_tiny", "--deterministic-timing"],
                 ["sub", "@a_malcev", "--deterministic-timing"],
                 ["diag-find", "@a_group", "--width", "1",
                  "--deterministic-timing"]):
        rc1, out1 = run_cli(args)
        rc2, out2 = run_cli(args)
        assert (rc1, out1) == (rc2, out2)


def named_pair_algebra(corrupt):
    """A single-sorted algebra carrying its own pair as named symbols.

    Starts from the collapse of a_tiny and appends d, e0, e1; with corrupt
    set, e1 becomes a rotation, which is not idempotent.
    """
    h = homogenize(corpus_algebra("a_tiny"))
    pair = canonical_pair(h)
    ops = []
    for sym, tab in zip(h.algebra.signature.symbols, h.algebra.tables):
        ops.append((sym.name, ["x"] * sym.profile.arity, "x", list(tab.outputs)))
    ops.append(("d", ["x", "x"], "x", list(pair.d.outputs)))
    ops.append(("e0", ["x"], "x", list(pair.es[0].outputs)))
    e1 = list(pair.es[1].outputs)
    if corrupt:
        e1 = [(v + 1) % h.size for v in e1]
    ops.append(("e1", ["x"], "x", e1))
    return build_algebra([("x", h.size)], ops)


def test_diag_verify_accepts_a_named_pair(tmp_path):
    from msalg.fmt import save_algebra
    path = str(tmp_path / "named.alg")
    save_algebra(path, named_pair_algebra(corrupt=False))
    rc, out = run_cli(["diag-verify", path, "--d", "d", "--e", "e0,e1"])
    assert rc == 0
    assert "verdict: pass" in out


def test_diag_verify_rejects_a_corrupted_e(tmp_path):
    from msalg.fmt import save_algebra
    path = str(tmp_path / "broken.alg")
    save_algebra(path, named_pair_algebra(corrupt=True))
    rc, out = run_cli(["diag-verify", path, "--d", "d", "--e", "e0,e1"])
    assert rc == 1
    assert "FAIL" in out


def test_exit_2_on_unknown_corpus_name():
    rc, _out = run_cli(["pure", "@no_such_algebra"])
    assert rc == 2


def test_exit_2_on_missing_file():
    rc, _out = run_cli(["pure", "/nonexistent/path.alg"])
    assert rc == 2


def test_exit_2_on_malformed_profile():
    rc, _out = run_cli(["clone", "@a_tiny", "--profile", "zz"])
    assert rc == 2


def test_exit_2_when_quotient_lacks_pairs():
    rc, _out = run_cli(["quotient", "@a_tiny"])
    assert rc == 2


def test_exit_2_on_budget_exhaustion():
    rc, _out = run_cli(["clone", "@a_malcev", "--profile", "u,u->u",
                        "--table-budget", "3"])
    assert rc == 2


def test_malcev_absence_exits_1():
    rc, out = run_cli(["malcev", "@a_semilat", "--mode", "per_sort"])
    assert rc == 1
    assert "per-sort: absent" in out


def test_jonsson_cli_verdicts():
    rc, out = run_cli(["jonsson", "@a_malcev", "--mode", "per_sort"])
    assert rc == 1
    assert "absent up to n=4" in out
    rc, out = run_cli(["jonsson", "@a_lattice", "--mode", "both"])
    assert rc == 0
    assert "per-sort: found n=1" in out
    assert "homogenized: found n=1" in out


def test_cp_and_cd_on_the_collapsed_semilattices():
    rc, out = run_cli(["cp", "@a_semilat", "--homogenize"])
    assert rc == 1
    assert "permutes: no" in out
    assert "witness" in out
    rc, out = run_cli(["cd", "@a_semilat", "--homogenize"])
    assert rc == 0
    assert "distributes: yes" in out


def test_sub_with_generators():
    rc, out = run_cli(["sub", "@a_tiny", "--gens", "u=1;w="])
    assert rc == 0
    assert "family: u={1} w={1}" in out


def test_con_enumeration_count():
    rc, out = run_cli(["con", "@a_tiny"])
    assert rc == 0
    assert "count: 4" in out


def test_inv_count_matches_the_library():
    rels = inv_enumerate(corpus_algebra("a_tiny"), 1)
    rc, out = run_cli(["inv", "@a_tiny", "--mu", "1"])
    assert rc == 0
    assert "count: %d" % len(rels) in out


def test_pp_composition_through_the_cli():
    rels = inv_enumerate(corpus_algebra("a_group"), 2)
    successor = frozenset({(0, 1), (1, 2), (2, 0)})
    k = next(i for i, r in enumerate(rels) if r.tuples == successor)
    rc, out = run_cli(["pp", "@a_group", "--mu", "2", "--nu", "1",
                       "--conjunct", "2:%d:0,2" % k,
                       "--conjunct", "2:%d:2,1" % k])
    assert rc == 0
    assert "result: (0,2) (1,0) (2,1)" in out


def test_quotient_output_parses_and_shrinks():
    rc, out = run_cli(["quotient", "@a_tiny", "--pair", "w", "0", "1"])
    assert rc == 0
    alg = parse_algebra(body_after_algebra_marker(out))
    assert alg.carriers == (1, 2)


def test_product_of_two_factors():
    rc, out = run_cli(["product", "@a_tiny", "@a_tiny"])
    assert rc == 0
    assert "carriers: 4 9" in out


def test_module_entry_point_runs_in_a_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "msalg", "pure", "@a_tiny",
         "--deterministic-timing"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "pure: yes" in proc.stdout
