"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the pytest terminal summary (see conftest.py).
"""

import contextlib
import io
import random
import time

import pytest

from hitchin_duality import cli
from hitchin_duality import cohomology as co
from hitchin_duality import hecke, prym
from hitchin_duality import zlattice as zl
from hitchin_duality.cameral import local_system, random_cover
from hitchin_duality.errors import InfeasibleCover
from hitchin_duality.rootdata import (
    RootDatum, all_roots, build_root_datum, center, epsilon, epsilon_dual, group_family, isogeny_classes,
    langlands_dual, pi1,
)

from oracles import hnf_bezout, smith_diagonal_minors, snf_elementary

RESULTS = {}

SIMPLE_TYPES = ([("A", n) for n in range(1, 9)] + [("B", n) for n in range(2, 9)]
                + [("C", n) for n in range(2, 9)] + [("D", n) for n in range(4, 9)]
                + [("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)])


@contextlib.contextmanager
def criterion(num, label):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as e:
        RESULTS[num] = (False, f"{label} ({type(e).__name__}: {str(e)[:160]})")
        raise
    RESULTS[num] = (True, f"{label} ({time.perf_counter() - t0:.1f} s)")


def all_classes(types):
    for letter, n in types:
        yield from isogeny_classes(letter, n)


ROOT_COUNT = {"A": lambda n: n * (n + 1), "B": lambda n: 2 * n * n, "C": lambda n: 2 * n * n,
              "D": lambda n: 2 * n * (n - 1), "E": {6: 72, 7: 126, 8: 240}.get,
              "F": lambda n: 48, "G": lambda n: 12}


def sole_length(rd):
    return rd.components[0][:2] == ("A", 1)


# -- 1, 2: root data ------------------------------------------------------------


def test_criterion_01_epsilon_tables():
    with criterion(1, "epsilon tables, all simple types of rank <= 8"):
        t0 = time.perf_counter()
        for rd in all_classes(SIMPLE_TYPES):
            fam = group_family(rd)
            letter, n, _ = rd.components[0]
            roots = all_roots(rd)
            assert len(roots) == ROOT_COUNT[letter](n), rd.name
            for r in roots:
                e, ed = epsilon(rd, r), epsilon_dual(rd, r)
                short = not r.is_long or sole_length(rd)
                assert (e == 2) == (fam == "Sp" and r.is_long), (rd.name, r)
                assert (ed == 2) == (fam == "SO_odd" and short), (rd.name, r)
                assert 2 % (e * ed) == 0
        assert time.perf_counter() - t0 < 10


def test_criterion_02_langlands_involution():
    with criterion(2, "dual is an involution and pi1(dual) = dual(center)"):
        t0 = time.perf_counter()
        for rd in all_classes(SIMPLE_TYPES):
            d = langlands_dual(rd)
            fresh = RootDatum(rd.coroots.T, rd.roots.T)
            assert fresh == d
            assert RootDatum(fresh.coroots.T, fresh.roots.T) == rd
            assert langlands_dual(d) == rd
            assert zl.iso_test(pi1(d), zl.pontryagin_dual(center(rd)))
        assert time.perf_counter() - t0 < 10


# -- 3, 4, 6: shared random sweep ------------------------------------------------

SWEEP_TYPES = [("A", 2), ("A", 3), ("A", 4), ("B", 2), ("B", 3), ("B", 4),
               ("C", 2), ("C", 3), ("C", 4), ("D", 4), ("F", 4), ("G", 2)]
PER_TYPE = 100


def sweep_record(cd):
    rd = cd.datum
    L = local_system(cd)
    tor = co.h1_torsion(L)
    pi0 = prym.component_groups(cd)
    sw = prym.prym_sandwich(cd)
    sp = group_family(rd) == "Sp"
    return {
        "name": rd.name,
        "torsion": zl.iso_test(tor.pushforward, zl.FgAbGroup.trivial() if sp else center(rd)),
        "pi0_T0": zl.iso_test(pi0.T0, zl.FgAbGroup(0, (2,)) if sp else pi1(rd)),
        "pi0_T": zl.iso_test(pi0.T, pi1(rd)),
        "handle_block": co.handle_block_gate(L) if cd.handles_trivial() else None,
        "kronecker": co.kronecker_gate(L),
        "image": sw.gates["image"],
        "det_index": sw.gates["det_index"] and abs(sw.gram.det()) == sw.index(),
        "sandwich_gates": all(sw.gates.values()),
    }


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    rows = []
    for letter, n in SWEEP_TYPES:
        classes = isogeny_classes(letter, n)
        count, seed = 0, 0
        while count < PER_TYPE:
            seed += 1
            rd = classes[seed % len(classes)]
            g, b = cli.sweep_parameters(seed, 3, 12)
            try:
                cd = random_cover(rd, g, b, seed)
            except InfeasibleCover:
                continue
            rows.append(sweep_record(cd))
            count += 1
    return rows, time.perf_counter() - t0


def test_criterion_03_pushforward_torsion(sweep):
    rows, elapsed = sweep
    with criterion(3, f"H1 torsion of the pushforward on {len(rows)} covers, sweep {elapsed:.0f} s"):
        bad = [r["name"] for r in rows if not r["torsion"]]
        assert not bad, bad
        assert len(rows) >= PER_TYPE * len(SWEEP_TYPES)
        assert elapsed < 300, elapsed


def test_criterion_04_component_groups(sweep):
    rows, _ = sweep
    with criterion(4, "component groups of T0 and T on the same sweep"):
        bad = [r["name"] for r in rows if not (r["pi0_T0"] and r["pi0_T"])]
        assert not bad, bad


def test_criterion_06_pairing_gates(sweep):
    rows, _ = sweep
    with criterion(6, "pairing gates on every sweep cover"):
        trivial = [r for r in rows if r["handle_block"] is not None]
        assert trivial and all(r["handle_block"] for r in trivial)
        for key in ("kronecker", "image", "det_index", "sandwich_gates"):
            bad = [r["name"] for r in rows if not r[key]]
            assert not bad, (key, bad)


# -- 5: Sp and SO tables -----------------------------------------------------------

Z2, ZERO = zl.FgAbGroup(0, (2,)), zl.FgAbGroup.trivial()
TABLES = {
    "Sp": ((Z2, ZERO, ZERO), (ZERO, Z2, Z2)),
    "SO_odd": ((Z2, Z2, ZERO), (ZERO, ZERO, Z2)),
}


def test_criterion_05_sp_so_tables():
    with criterion(5, "component and automorphism tables for Sp(r), SO(2r+1), r = 2..4"):
        for r in (2, 3, 4):
            for rd in (build_root_datum("C", r, "sc"), build_root_datum("B", r, "ad")):
                pi0_want, h0_want = TABLES[group_family(rd)]
                done, seed = 0, 0
                while done < 8:
                    seed += 1
                    g, b = cli.sweep_parameters(seed, 3, 12)
                    try:
                        cd = random_cover(rd, g, b, seed)
                    except InfeasibleCover:
                        continue
                    got_pi0 = prym.component_groups(cd).as_tuple()
                    got_h0 = prym.automorphism_groups(cd).as_tuple()
                    assert all(zl.iso_test(a, w) for a, w in zip(got_pi0, pi0_want)), (rd.name, seed)
                    assert all(zl.iso_test(a, w) for a, w in zip(got_h0, h0_want)), (rd.name, seed)
                    done += 1


# -- 7: duality --------------------------------------------------------------------

DUALITY_TYPES = [("A", 2), ("A", 3), ("B", 2), ("C", 2), ("B", 3), ("C", 3), ("D", 4), ("G", 2), ("F", 4)]


def test_criterion_07_duality():
    with criterion(7, "verify_duality on 25 covers per isogeny class"):
        t0 = time.perf_counter()
        for rd in all_classes(DUALITY_TYPES):
            done, seed = 0, 1000
            while done < 25:
                seed += 1
                g, b = cli.sweep_parameters(seed, 3, 12)
                try:
                    cd = random_cover(rd, g, b, seed)
                except InfeasibleCover:
                    continue
                rep = prym.verify_duality(cd)
                assert rep.verdict, (rd.name, seed, [c.name for c in rep.checks if not c.ok])
                done += 1
        assert time.perf_counter() - t0 < 900


# -- 8: normal forms against oracles -------------------------------------------------


def test_criterion_08_normal_form_oracles():
    with criterion(8, "HNF, SNF and cokernel against elementary-operation oracles, 1000 matrices"):
        rng = random.Random(20240608)
        for trial in range(1000):
            m, n = rng.randint(1, 8), rng.randint(1, 8)
            rows = [[rng.randint(-20, 20) for _ in range(n)] for _ in range(m)]
            M = zl.IntMatrix.from_rows(rows, n)
            want = snf_elementary(rows)
            if m * n <= 16:
                assert want == smith_diagonal_minors(rows)
            assert [d for d in zl.invariant_factors(M) if d] == want
            H, _ = zl.hnf(M)
            assert [r for r in H.to_rows() if any(r)] == [r for r in hnf_bezout(rows) if any(r)]
            # cokernel of the columns
            cok = zl.cokernel(M)
            assert cok.rank == m - len(want)
            assert cok.invariant_factors == tuple(d for d in want if d > 1)


# -- 9: Hecke ---------------------------------------------------------------------


def test_criterion_09_hecke():
    with criterion(9, "fundamental coweights average to zero; component shift surjects"):
        t0 = time.perf_counter()
        for letter, n in SIMPLE_TYPES:
            if n > 6:
                continue
            rd, basis = hecke.fundamental_coweights(letter, n)
            for lam in basis:
                assert hecke.characteristic_class(hecke.HeckeClass(rd, lam)).trivial, (letter, n, lam)
        for rd in all_classes(SIMPLE_TYPES):
            assert hecke.shift_transitivity(rd), rd.name
        assert time.perf_counter() - t0 < 60


# -- 10: determinism ----------------------------------------------------------------


def test_criterion_10_determinism():
    with criterion(10, "repeated sweeps give byte-identical reports"):
        for args in (["--type", "B", "--rank", "3", "--count", "4", "--seed", "5"],
                     ["--type", "G", "--rank", "2", "--count", "3", "--seed", "0", "--isogeny", "sc"]):
            outs = []
            for _ in range(2):
                buf = io.StringIO()
                code = cli.run(["sweep", *args, "--format", "json"], out=buf, err=io.StringIO())
                assert code == 0
                outs.append(buf.getvalue().encode())
            assert outs[0] == outs[1]


def summary_lines():
    lines = []
    for num in range(1, 11):
        ok, text = RESULTS.get(num, (None, "not run"))
        tag = {True: "PASS", False: "FAIL", None: "----"}[ok]
        lines.append(f"criterion {num:2d}: {tag}  {text}")
    return lines


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
