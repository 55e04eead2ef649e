import json
import os

import pytest

from hitchin_duality import cohomology as co
from hitchin_duality import prym
from hitchin_duality import zlattice as zl
from hitchin_duality.cameral import (
    CoverDatum, canonical_cover, cover_from_json, cover_to_json, dual_cover, load_cover,
    local_system, random_cover, require_valid, validate_cover,
)
from hitchin_duality.errors import CoverError, InfeasibleCover, ValidationError
from hitchin_duality.rootdata import WeylElement, build_root_datum, isogeny_classes
from hitchin_duality.zlattice import IntMatrix

EXAMPLE = os.path.join(os.path.dirname(__file__), "..", "examples", "b2_ssll.json")


def b2_cover(branch_coeffs, genus=2, isogeny="sc"):
    rd = build_root_datum("B", 2, isogeny)
    hs = tuple(WeylElement.identity(2) for _ in range(2 * genus))
    return CoverDatum(rd, genus, hs, tuple(rd.root_from_coefficients(c) for c in branch_coeffs))


SSLL = [[0, 1], [0, 1], [1, 0], [1, 0]]


def test_b2_ssll_valid_generic():
    rep = validate_cover(b2_cover(SSLL))
    assert rep.valid and rep.generic and rep.ok
    assert any("branch counts" in n for n in rep.notes)


def test_single_branch_breaks_relation():
    rep = validate_cover(b2_cover([[0, 1]]))
    assert not rep.valid
    assert [i.name for i in rep.failures()] == ["relation", "surjectivity", "genericity"]


def test_all_long_is_not_generic():
    rep = validate_cover(b2_cover([[1, 0], [1, 0], [1, 2], [1, 2]]))
    assert not rep.generic
    with pytest.raises(ValidationError):
        require_valid(b2_cover([[1, 0], [1, 0], [1, 2], [1, 2]]))


def test_proper_subgroup_detected():
    rd = build_root_datum("B", 3, "sc")
    hs = (WeylElement.identity(3),) * 2
    # e3 (short) and e1 - e2 (long) are orthogonal: they generate Z/2 x Z/2
    brs = tuple(rd.root_from_coefficients(c) for c in ([0, 0, 1], [0, 0, 1], [1, 0, 0], [1, 0, 0]))
    rep = validate_cover(CoverDatum(rd, 1, hs, brs))
    assert rep.generic
    assert not rep.valid
    assert [i.name for i in rep.failures()] == ["surjectivity"]


def test_genus_one_note_and_genus_zero_rejected():
    rep = validate_cover(b2_cover(SSLL, genus=1))
    assert rep.ok and any("genus 1" in n for n in rep.notes)
    with pytest.raises(CoverError):
        b2_cover(SSLL, genus=0)


def test_local_system_matrices():
    cd = b2_cover(SSLL)
    L = local_system(cd)
    rd = cd.datum
    s2, s1 = rd.simple_reflection(1).matrix, rd.simple_reflection(0).matrix
    assert L.branch_matrices == (s2, s2, s1, s1)
    assert all(m == IntMatrix.identity(2) for m in L.handle_matrices)
    for m in L.branch_matrices:
        assert m @ m == IntMatrix.identity(2)


def test_trivial_local_system():
    rd = build_root_datum("A", 2)
    cd = CoverDatum(rd, 1, (WeylElement.identity(2),) * 2, ())
    L = local_system(cd, check=False)
    assert all(m == IntMatrix.identity(2) for m in L.matrices)


def test_dualize_twice():
    for seed in range(1, 6):
        cd = random_cover(build_root_datum("C", 3, "sc"), 2, 6, seed)
        L = local_system(cd)
        assert L.dualize().dualize().matrices == L.matrices
        assert local_system(dual_cover(cd)).matrices == L.dualize().matrices
        ddc = dual_cover(dual_cover(cd))
        assert ddc.datum == cd.datum
        assert [r.functional for r in ddc.branches] == [r.functional for r in cd.branches]


def test_seed_zero_is_canonical_ssll():
    rd = build_root_datum("B", 2, "sc")
    cd = random_cover(rd, 2, 4, 0)
    assert cd == b2_cover(SSLL)
    assert cd == canonical_cover(rd, 2, 4)


def test_example_file_matches_seed_zero():
    cd = load_cover(EXAMPLE)
    assert cd == random_cover(build_root_datum("B", 2, "sc"), 2, 4, 0)


def test_b_zero_identity_handles():
    rd = build_root_datum("A", 2)
    cd = CoverDatum(rd, 2, (WeylElement.identity(2),) * 4, ())
    assert validate_cover(cd).failures()[0].name == "surjectivity"
    assert cd.relation_product().is_identity()


def test_odd_branch_count_infeasible():
    rd = build_root_datum("B", 2)
    with pytest.raises(InfeasibleCover):
        random_cover(rd, 2, 1, 3, handle_mode="identity")
    with pytest.raises(InfeasibleCover):
        random_cover(rd, 2, 5, 3)


def test_random_covers_valid_and_deterministic():
    for letter, n in [("A", 3), ("B", 3), ("D", 4), ("G", 2)]:
        for rd in isogeny_classes(letter, n):
            for seed in range(1, 5):
                a = random_cover(rd, 2, 6, seed)
                b = random_cover(rd, 2, 6, seed)
                assert a == b
                assert a.relation_product().matrix == IntMatrix.identity(n)
                assert validate_cover(a).ok


def test_identity_handle_mode():
    cd = random_cover(build_root_datum("F", 4), 3, 8, 7, handle_mode="identity")
    assert cd.handles_trivial()


def test_json_roundtrip():
    for seed in range(1, 6):
        cd = random_cover(build_root_datum("D", 4, "ad"), 2, 6, seed)
        text = json.dumps(cover_to_json(cd))
        assert cover_from_json(text) == cd


def test_json_conjugate_branch():
    obj = {"group": {"type": "B", "rank": 2, "isogeny": "sc"}, "genus": 1,
           "handles": [[], []],
           "branches": [{"root": [0, 1]}, {"conjugate": {"base": [0, 1], "word": []}},
                        {"root": [1, 0]}, {"conjugate": {"base": [1, 0], "word": [1]}}]}
    cd = cover_from_json(obj)
    assert cd.branches[3].functional == tuple(-x for x in cd.branches[2].functional)
    assert validate_cover(cd).ok


@pytest.mark.parametrize("bad", [
    "not json",
    "[]",
    '{"group": {"type": "B", "rank": 2}, "genus": 1, "handles": [[], []]}',
    '{"group": {"type": "B", "rank": 2}, "genus": 1, "handles": [[], []], "branches": [{"root": [2, 2]}]}',
    '{"group": {"type": "B", "rank": 2}, "genus": 1, "handles": [[]], "branches": []}',
    '{"group": {"type": "B", "rank": 2}, "genus": "1", "handles": [[], []], "branches": []}',
    '{"group": {"type": "B", "rank": 2}, "genus": 1, "handles": [[], []], "branches": [{"x": 1}]}',
])
def test_json_errors(bad):
    with pytest.raises(CoverError):
        cover_from_json(bad)


def canonical_invariants(cd):
    L = local_system(cd)
    sw = prym.prym_sandwich(cd)
    return (
        co.h1_open(L).group, co.h1_punctured(L).group, co.h1_pushforward(L).group,
        co.h2_pushforward(L), tuple(co.h0_sheaf(L, k) for k in co.SHEAVES),
        tuple(co.pi0_sheaf(L, k) for k in co.SHEAVES),
        sw.quotient("L0", "L"), sw.quotient("L", "L1"),
        zl.invariant_factors(sw.gram),
        zl.invariant_factors(co.pairing_gram(L).matrix),
    )


def test_conjugation_invariance():
    for name, seeds in [(("B", 2, "sc"), (1, 2, 3)), (("A", 3, "ad"), (1, 2)), (("G", 2, "sc"), (4,))]:
        rd = build_root_datum(*name)
        for seed in seeds:
            cd = random_cover(rd, 2, 6, seed)
            base = canonical_invariants(cd)
            for word in ([1], [2, 1], [1, 2, 1, 2, 1]):
                w = rd.weyl_word([i for i in word if i <= rd.semisimple_rank])
                conj = cd.conjugate(w)
                assert validate_cover(conj).ok
                assert canonical_invariants(conj) == base
