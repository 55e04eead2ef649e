import random

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from hitchin_duality import cohomology as co
from hitchin_duality import zlattice as zl
from hitchin_duality.cameral import CoverDatum, local_system, random_cover
from hitchin_duality.errors import GateError
from hitchin_duality.rootdata import (
    WeylElement, build_root_datum, center, group_family, isogeny_classes,
)
from hitchin_duality.zlattice import FgAbGroup, IntMatrix

from oracles import smith_diagonal_minors


def b2_ssll(isogeny="sc"):
    rd = build_root_datum("B", 2, isogeny)
    hs = (WeylElement.identity(2),) * 4
    brs = tuple(rd.root_from_coefficients(c) for c in ([0, 1], [0, 1], [1, 0], [1, 0]))
    return CoverDatum(rd, 2, hs, brs)


def sample_covers(groups, seeds, genus=2, b=6, **kw):
    for name in groups:
        rd = build_root_datum(*name)
        for s in seeds:
            yield random_cover(rd, genus, b, s, **kw)


MIXED = [("A", 2, "sc"), ("A", 3, "ad"), ("B", 2, "sc"), ("B", 3, "ad"), ("C", 3, "sc"),
         ("D", 4, "sc"), ("G", 2, "sc")]


def torsion_by_minors(rows):
    facs = smith_diagonal_minors(rows)
    return FgAbGroup(0, tuple(f for f in facs if f > 1))


# -- H^1 of the punctured curve --------------------------------------------------


def test_h1_open_trivial_system():
    for n in (2, 3):
        rd = build_root_datum("A", n)
        cd = CoverDatum(rd, 1, (WeylElement.identity(n),) * 2, ())
        L = local_system(cd, check=False)
        assert co.h1_open(L).group == FgAbGroup.free(2 * n)


def test_h1_open_rank_formula():
    for cd in sample_covers(MIXED, (1, 2, 3), genus=2, b=6):
        L = local_system(cd)
        n, g, b = L.fiber_rank, cd.genus, cd.b
        H = co.h1_open(L)
        assert H.rank == n * (2 * g + b - 1) + co.invariants(L).rank
        assert H.recompute() == H.group


def test_b2_open_torsion_against_minors_oracle():
    L = local_system(b2_ssll())
    rows = []
    for M in L.branch_matrices:
        rows += [[int(i == j) - M[i, j] for j in range(2)] for i in range(2)]
    assert len(rows) == 8
    expected = torsion_by_minors(rows)
    assert co.open_torsion_closed_form(L) == expected
    assert co.h1_punctured(L).group.torsion() == expected
    assert str(expected) == "Z/2"


def test_h1_punctured_recompute():
    for cd in sample_covers(MIXED[:4], (1, 2)):
        H = co.h1_punctured(local_system(cd))
        assert H.recompute() == H.group


# -- H^1 of the pushforward ------------------------------------------------------


def test_pushforward_no_branches():
    rd = build_root_datum("B", 2)
    cd = CoverDatum(rd, 2, (WeylElement.identity(2),) * 4, ())
    L = local_system(cd, check=False)
    assert co.h1_pushforward(L).group == FgAbGroup.free(8)
    rep = co.h1_torsion(L)
    assert rep.open.is_trivial and rep.pushforward.is_trivial


def test_pushforward_b2_examples():
    # B2 sc is Sp(2): no torsion. The adjoint form SO(5) has trivial center.
    sp = local_system(b2_ssll("sc"))
    so = local_system(b2_ssll("ad"))
    assert co.h1_pushforward(sp).group.torsion().is_trivial
    assert co.h1_pushforward(so).group.torsion().is_trivial
    assert str(co.h1_torsion(sp).open) == "Z/2"


def test_pushforward_c2_dual_of_b2_ad():
    from hitchin_duality.cameral import dual_cover
    cd = dual_cover(b2_ssll("ad"))
    assert group_family(cd.datum) == "Sp"
    L = local_system(cd)
    assert co.h1_pushforward(L).group.torsion().is_trivial


def test_pushforward_presentations_agree():
    for cd in sample_covers(MIXED, (1, 2, 3)):
        L = local_system(cd)
        H = co.h1_pushforward(L)
        assert H.recompute() == H.group
        assert co.h1_pushforward_direct(L) == H.group


def test_split_form_matches_general():
    for cd in sample_covers(MIXED, (1, 2, 3, 4), b=8, handle_mode="identity"):
        L = local_system(cd)
        assert co.h1_pushforward_split(L) == co.h1_pushforward(L).group
    twisted = next(cd for cd in sample_covers([("A", 3, "sc")], range(1, 20), b=4)
                   if not cd.handles_trivial())
    with pytest.raises(ValueError):
        co.h1_pushforward_split(local_system(twisted))


def test_torsion_is_center_or_zero():
    for name in MIXED + [("C", 2, "sc"), ("B", 3, "sc"), ("D", 4, "ad"), ("A", 3, "sc")]:
        rd = build_root_datum(*name)
        want = FgAbGroup.trivial() if group_family(rd) == "Sp" else center(rd)
        for s in (1, 2):
            L = local_system(random_cover(rd, 2, 6, s))
            rep = co.h1_torsion(L)
            assert zl.iso_test(rep.pushforward, want)
            if group_family(rd) == "Sp":
                assert str(rep.open) == "Z/2"


def test_closed_form_torsion_trivial_handles():
    for cd in sample_covers(MIXED, (1, 2, 3), b=8, handle_mode="identity"):
        L = local_system(cd)
        rep = co.h1_torsion(L)
        assert rep.open == co.open_torsion_closed_form(L)
        assert rep.pushforward == co.pushforward_torsion_closed_form(L)


def test_saturation_witness():
    L = local_system(b2_ssll())
    rep = co.h1_torsion(L)
    assert rep.open_witness.index == rep.open.order
    assert rep.pushforward_witness.index == rep.pushforward.order


def test_pushforward_oracle_sympy():
    # torsion of the line-coordinate quotient via sympy's Smith form
    for cd in sample_covers([("B", 3, "sc"), ("A", 3, "sc"), ("G", 2, "sc")], (1, 2)):
        L = local_system(cd)
        H = co.h1_pushforward(L)
        Z = H.cocycles
        coeffs = [Z.coefficients(r) for r in H.relations.to_rows()]
        S = smith_normal_form(sympy.Matrix(coeffs), domain=sympy.ZZ)
        diag = [abs(int(S[i, i])) for i in range(min(S.shape))]
        nz = [x for x in diag if x]
        assert tuple(x for x in nz if x > 1) == H.group.invariant_factors
        assert Z.rank - len(nz) == H.group.rank


# -- H^0, H^2 ---------------------------------------------------------------------


def test_h0_and_h2_free_parts_vanish():
    for cd in sample_covers(MIXED, (1, 2)):
        L = local_system(cd)
        assert co.h0_pushforward(L).is_trivial
        assert co.h2_pushforward(L).rank == 0


def test_h2_torsion_sp():
    for name in [("C", 2, "sc"), ("C", 3, "sc"), ("B", 2, "sc"), ("C", 4, "sc")]:
        for cd in sample_covers([name], (1, 2)):
            assert str(co.h2_pushforward(local_system(cd))) == "Z/2"


def test_h0_sheaf_t0_equals_pushforward_torsion():
    for cd in sample_covers(MIXED, (1,)):
        L = local_system(cd)
        assert co.h0_sheaf(L, "T0") == co.h1_pushforward(L).group.torsion()


# -- cup product and Gram matrix ----------------------------------------------------


def test_cup_descends_to_cohomology():
    rng = random.Random(3)
    for cd in sample_covers([("B", 2, "sc"), ("C", 3, "sc"), ("A", 3, "ad"), ("G", 2, "sc")], (1, 2)):
        L = local_system(cd)
        Ld = L.dualize()
        reps, _, _, _ = co.tf_basis(L, "T0")
        reps_d, _, _, _ = co.tf_basis(Ld, "T0")
        B = co._data(L).coboundary_line("T0")
        Bd = co._data(Ld).coboundary_line("T0")
        for u in reps:
            for v in reps_d:
                base = co.cup_product(L, u, v)
                m = [rng.randint(-3, 3) for _ in B]
                u2 = [x + sum(c * row[j] for c, row in zip(m, B)) for j, x in enumerate(u)]
                md = [rng.randint(-3, 3) for _ in Bd]
                v2 = [x + sum(c * row[j] for c, row in zip(md, Bd)) for j, x in enumerate(v)]
                assert co.cup_product(L, u2, v2) == base
                # potentials are defined up to ker alpha_i
                shift = []
                for root in L.branch_roots:
                    k = zl.kernel(IntMatrix.from_rows([list(root)], L.fiber_rank)).basis
                    coef = [rng.randint(-2, 2) for _ in k]
                    shift.append([sum(c * b[j] for c, b in zip(coef, k)) for j in range(L.fiber_rank)])
                assert co.cup_product(L, u, v, u_shift=shift) == base


def test_handle_block_gate_and_kronecker():
    for cd in sample_covers(MIXED, (1, 2), b=8, handle_mode="identity"):
        L = local_system(cd)
        assert co.handle_block_gate(L)
        assert co.kronecker_gate(L)
    for cd in sample_covers(MIXED, (3, 4)):
        assert co.kronecker_gate(local_system(cd))


def test_handle_block_needs_trivial_handles():
    twisted = next(cd for cd in sample_covers([("A", 3, "sc")], range(1, 20), b=4)
                   if not cd.handles_trivial())
    with pytest.raises(ValueError):
        co.handle_block_gate(local_system(twisted))


def test_gram_unimodular_for_simply_laced():
    for letter, n in [("A", 2), ("A", 3), ("D", 4)]:
        for rd in isogeny_classes(letter, n):
            for s in (1, 2):
                G = co.pairing_gram(local_system(random_cover(rd, 2, 6, s)))
                assert abs(G.det) == 1


def test_gram_det_is_power_of_two():
    for cd in sample_covers([("B", 2, "sc"), ("B", 3, "ad"), ("C", 3, "sc"), ("G", 2, "sc")], (1, 2)):
        d = abs(co.pairing_gram(local_system(cd)).det)
        assert d & (d - 1) == 0


def test_tf_coordinates_of_basis():
    L = local_system(b2_ssll())
    reps, _, _, _ = co.tf_basis(L)
    for i, r in enumerate(reps):
        assert co.tf_coordinates(L, "T0", r) == [int(i == j) for j in range(len(reps))]
    cond = co._data(L).condition_matrix("T0")
    bad = next(e for e in range(len(reps[0])) if any(row[e] for row in cond))
    with pytest.raises(GateError):
        co.tf_coordinates(L, "T0", [int(j == bad) for j in range(len(reps[0]))])


def test_relator_evaluates_to_zero_on_coboundaries():
    for cd in sample_covers(MIXED[:3], (1,)):
        L = local_system(cd)
        d = co._data(L)
        n = L.fiber_rank
        for e in range(n):
            m = [int(t == e) for t in range(n)]
            vals = []
            for M in L.matrices:
                vals.append([m[i] - sum(M[i, j] * m[j] for j in range(n)) for i in range(n)])
            assert co.evaluate_relator(L, vals) == [0] * n
        assert len(co.fox_matrices(L)) == d.N
