"""Cocharacter sandwich ``L0 <= L <= L1`` of the Prym varieties and duality checks.

``L1`` is realized as ``H^1(C, Tbar)_tf`` with coordinates ``Z^r``; ``L0`` is
the image of ``H^1(C, j_* A)_tf`` and ``L`` the image of ``H^1(C, T)_tf``.
Independently, ``L1`` must be the dual of ``L0(A^vee)`` under the cup
pairing; that identity (and the others below) are checked as gates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import cohomology as co
from . import zlattice as zl
from .cameral import (
    CoverDatum, LocalSystem, dual_cover, local_system, require_valid,
)
from .errors import GateError, ValidationError
from .rootdata import RootDatum, center, group_family, langlands_dual, pi1, reductive_datum
from .zlattice import FgAbGroup, IntMatrix, Lattice, QLattice


# --------------------------------------------------------------------------
# helpers


def _mat(rows, cols):
    return IntMatrix.from_rows(rows, cols) if rows else IntMatrix.zeros(0, cols)


def _rinv(M):
    return zl.rational_inverse(M)


def _rmm(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def _rT(a):
    return [list(r) for r in zip(*a)]


def _is_unimodular_rational(M) -> bool:
    if any(Fraction(x).denominator != 1 for r in M for x in r):
        return False
    return abs(zl.det([[int(x) for x in r] for r in M])) == 1


# --------------------------------------------------------------------------
# sandwich


@dataclass(frozen=True)
class SandwichLattice:
    """Nested lattices in ``Z^r`` = coordinates of ``L1 = cochar(Pbar)``.

    ``L0``/``L`` are sublattices given by HNF bases; ``gram`` pairs the
    representative cocycles of ``L0`` with those of ``L0`` of the dual side.
    ``zeta_moduli`` are ``eps_i eps_i^vee`` and ``zeta_matrix`` the residues
    (mod moduli) of the L1 basis lifts; ``zeta_ambiguity`` the residues of
    saturated coboundaries.
    """

    rank: int
    L0: Lattice
    L: Lattice
    L1: Lattice
    gram: IntMatrix
    l0_basis: IntMatrix
    zeta_moduli: tuple
    zeta_matrix: IntMatrix
    zeta_ambiguity: IntMatrix
    eps_dual: tuple
    gates: dict = field(default_factory=dict)
    l0_cocycles: tuple = ()

    def index(self) -> int:
        return zl.lattice_quotient(self.L0, self.L1).order

    def quotient(self, lower: str = "L0", upper: str = "L1") -> FgAbGroup:
        return zl.lattice_quotient(getattr(self, lower), getattr(self, upper))

    def zeta(self, q: Sequence[int]) -> tuple:
        """Residues of ``q`` (L1 coordinates) using the stored basis lifts.

        Well defined modulo the ambiguity rows.
        """
        out = []
        Z = self.zeta_matrix
        for i, m in enumerate(self.zeta_moduli):
            out.append(sum(q[t] * Z[t, i] for t in range(self.rank)) % m)
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "L0": [list(b) for b in self.L0.basis],
            "L": [list(b) for b in self.L.basis],
            "L1": [list(b) for b in self.L1.basis],
            "index_L1_L0": self.index(),
            "quotient_L1_L0": str(self.quotient("L0", "L1")),
            "quotient_L_L0": str(self.quotient("L0", "L")),
            "quotient_L1_L": str(self.quotient("L", "L1")),
            "gram": self.gram.to_rows(),
            "gram_det": self.gram.det() if self.rank else 1,
            "zeta_moduli": list(self.zeta_moduli),
            "gates": {k: bool(v) for k, v in sorted(self.gates.items())},
        }


def _residue_kernel(Cl, Camb, mods) -> list:
    """``{q : q Cl + s Camb = 0 mod mods}`` projected to ``q``."""
    r = len(Cl)
    b = len(mods)
    if b == 0:
        return [[int(i == j) for j in range(r)] for i in range(r)]
    rows = [list(x) for x in Cl] + [list(x) for x in Camb] + [
        [m if t == i else 0 for t in range(b)] for i, m in enumerate(mods)]
    K = zl.left_kernel(_mat(rows, b))
    return [list(v[:r]) for v in K.basis]


def _sandwich_core(L: LocalSystem) -> dict:
    """Everything about one side that does not need the dual side."""
    d = co._data(L)
    n, g, b = d.n, d.g, d.b
    key = "sandwich_core"
    if key in d.cache:
        return d.cache[key]
    reps1, proj1, Z1, S1 = co.tf_basis(L, "Tbar")
    r = len(reps1)
    off = 2 * g * n
    eps, epsd = L.epsilons, L.epsilons_dual

    def to_bar(z, kind):
        # line coordinates of kind -> Tbar line coordinates
        z = list(z)
        for i in range(b):
            if kind == "T0":
                z[off + i] *= eps[i] * epsd[i]
            elif kind == "T":
                z[off + i] *= epsd[i]
        return z

    def l1_coords(z_bar):
        c = Z1.coefficients(z_bar)
        if c is None:
            raise GateError("cocycle does not lie in the Tbar cocycle lattice")
        return [sum(c[t] * proj1[t][j] for t in range(len(c))) for j in range(r)]

    Z0 = d.cocycles("T0")
    img0 = [l1_coords(to_bar(v, "T0")) for v in Z0.basis]
    # L0 basis with representative cocycles via the HNF transform
    if img0:
        H, U = zl.hnf(_mat(img0, r))
        Hr, Ur = H.to_rows(), U.to_rows()
    else:
        Hr, Ur = [], []
    k0 = len([row for row in Hr if any(row)])
    if k0 != r:
        raise GateError(f"L0 has rank {k0}, expected {r}")
    B0 = Hr[:r]
    reps0 = [[sum(Ur[i][t] * Z0.basis[t][j] for t in range(len(Z0.basis))) for j in range(d.line_dim())]
             for i in range(r)]
    ZT = d.cocycles("T")
    imgT = [l1_coords(to_bar(v, "T")) for v in ZT.basis]
    L_T = Lattice.span(imgT, r) if imgT else Lattice.zero(r)
    # zeta data
    mods = tuple(eps[i] * epsd[i] for i in range(b))
    Cl = [[reps1[q][off + i] for i in range(b)] for q in range(r)]
    Camb = [[v[off + i] for i in range(b)] for v in S1.basis]
    res = dict(
        r=r, B0=B0, reps0=reps0, L0=Lattice.span(B0, r) if B0 else Lattice.zero(r),
        L_T=L_T, mods=mods, Cl=Cl, Camb=Camb, reps1=reps1,
    )
    d.cache[key] = res
    return res


def _sandwich(L: LocalSystem, Ld: LocalSystem) -> SandwichLattice:
    core = _sandwich_core(L)
    cored = _sandwich_core(Ld)
    r = core["r"]
    if cored["r"] != r:
        raise GateError(f"ranks differ: {r} vs {cored['r']}")
    cup = co._cup_form(L)
    up = [co.potentials_from_line(L, z) for z in core["reps0"]]
    vp = [co.potentials_from_line(Ld, z) for z in cored["reps0"]]
    G = [[cup.value(u, v) for v in vp] for u in up]
    gates = {}
    B0 = core["B0"]
    if r:
        detG = zl.det(G)
        if detG == 0:
            raise GateError("degenerate cup-product Gram matrix")
        detB = zl.det(B0)
        # Cor image: dual of L0(A^vee) under the pairing equals L1
        M = _rmm(_rinv(B0), G)
        gates["image"] = _is_unimodular_rational(M)
        gates["det_index"] = abs(detG) == abs(detB)
    else:
        gates["image"] = True
        gates["det_index"] = True
    # zeta: ker zeta must equal L0
    kz = _residue_kernel(core["Cl"], core["Camb"], core["mods"])
    Kz = Lattice.span(kz, r) if kz else Lattice.zero(r)
    gates["ker_zeta"] = Kz == core["L0"]
    epsd = L.epsilons_dual
    kl = _residue_kernel(core["Cl"], core["Camb"], tuple(epsd))
    Lz = Lattice.span(kl, r) if kl else Lattice.zero(r)
    gates["ker_reduced_zeta"] = Lz == core["L_T"]
    inc = core["L0"]
    gates["inclusions"] = Lz.contains_lattice(inc) and Lattice.full(r).contains_lattice(Lz)
    return SandwichLattice(
        rank=r, L0=core["L0"], L=Lz, L1=Lattice.full(r),
        gram=_mat(G, r) if r else IntMatrix.zeros(0, 0),
        l0_basis=_mat(B0, r) if r else IntMatrix.zeros(0, 0),
        zeta_moduli=core["mods"],
        zeta_matrix=_mat(core["Cl"], len(core["mods"])),
        zeta_ambiguity=_mat(core["Camb"], len(core["mods"])),
        eps_dual=tuple(epsd), gates=gates,
        l0_cocycles=tuple(tuple(z) for z in core["reps0"]),
    )


def _check_gates(sw: SandwichLattice, L: LocalSystem):
    bad = [k for k, v in sw.gates.items() if not v]
    if bad:
        raise GateError("sandwich gates failed: " + ", ".join(bad), {"gates": dict(sw.gates)})
    exp = sw.quotient("L0", "L1")
    if exp.invariant_factors and exp.invariant_factors[-1] != 2:
        raise GateError(f"L1/L0 = {exp} is not an elementary 2-group")


def prym_sandwich(cd: CoverDatum, *, check_gates: bool = True) -> SandwichLattice:
    """``cochar(P0) <= cochar(P) <= cochar(Pbar)`` for a valid generic cover."""
    require_valid(cd)
    L = local_system(cd, check=False)
    sw = _sandwich(L, L.dualize())
    if check_gates:
        _check_gates(sw, L)
    return sw


# --------------------------------------------------------------------------
# component and automorphism groups


def _closed_forms(rd: RootDatum) -> dict:
    fam = group_family(rd)
    p1 = pi1(rd)
    z = center(rd)
    two = FgAbGroup(0, (2,))
    zero = FgAbGroup.trivial()
    return {
        "pi0": (two if fam == "Sp" else p1, p1, zero if fam == "SO_odd" else p1),
        "h0": (zero if fam == "Sp" else z, z, two if fam == "SO_odd" else z),
    }


@dataclass(frozen=True)
class SheafTriple:
    T0: FgAbGroup
    T: FgAbGroup
    Tbar: FgAbGroup
    expected: tuple

    def as_tuple(self):
        return (self.T0, self.T, self.Tbar)

    def matches(self) -> bool:
        return all(zl.iso_test(a, b) for a, b in zip(self.as_tuple(), self.expected))

    def to_json(self):
        return {k: str(v) for k, v in zip(co.SHEAVES, self.as_tuple())} | {
            "expected": [str(x) for x in self.expected], "match": self.matches()}


def component_groups(cd: CoverDatum, *, strict: bool = True) -> SheafTriple:
    """``pi_0 H^1(C, X)`` for ``X = T0, T, Tbar``, compared with the closed forms."""
    require_valid(cd)
    L = local_system(cd, check=False)
    got = tuple(co.pi0_sheaf(L, k) for k in co.SHEAVES)
    h2 = co.h2_pushforward(L)
    if not zl.iso_test(h2, got[0]):
        raise GateError("pi_0(T0) differs from H^2(C, j_* A)")
    res = SheafTriple(*got, expected=_closed_forms(cd.datum)["pi0"])
    if strict and cd.datum.is_semisimple and not res.matches():
        raise GateError(f"component groups {[str(x) for x in got]} differ from closed forms "
                        f"{[str(x) for x in res.expected]}")
    return res


def automorphism_groups(cd: CoverDatum, *, strict: bool = True) -> SheafTriple:
    """``H^0(C, X)`` for ``X = T0, T, Tbar``, compared with the closed forms."""
    require_valid(cd)
    L = local_system(cd, check=False)
    got = tuple(co.h0_sheaf(L, k) for k in co.SHEAVES)
    if not zl.iso_test(got[0], co.h1_pushforward(L).group.torsion()):
        raise GateError("H^0(T0) differs from the torsion of H^1(C, j_* A)")
    if not zl.iso_test(got[2], co.h1_punctured(L).group.torsion()):
        raise GateError("H^0(Tbar) differs from the torsion of H^1(U, A)")
    res = SheafTriple(*got, expected=_closed_forms(cd.datum)["h0"])
    if strict and cd.datum.is_semisimple and not res.matches():
        raise GateError(f"automorphism groups {[str(x) for x in got]} differ from closed forms "
                        f"{[str(x) for x in res.expected]}")
    return res


# --------------------------------------------------------------------------
# duality


@dataclass(frozen=True)
class CheckRow:
    name: str
    lhs: object
    rhs: object
    ok: bool

    def to_json(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.ok}


@dataclass(frozen=True)
class DualityReport:
    group: str
    dual_group: str
    checks: tuple

    @property
    def verdict(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "dual_group": self.dual_group,
            "checks": [c.to_json() for c in self.checks],
            "verdict": "pass" if self.verdict else "fail",
        }


def _qbasis_json(rows):
    return [[str(Fraction(x)) for x in r] for r in rows]


def _dual_qlattice(M, P) -> QLattice:
    """``{q : q M P^T integral}`` for an invertible rational ``M P^T``."""
    X = _rmm(M, _rT(P))
    inv = _rinv(X)
    return QLattice.span(inv, len(inv))


def verify_duality(cd: CoverDatum, *, force: bool = False) -> DualityReport:
    """Check that the sandwiches of ``G`` and of its dual cover are mutually dual."""
    require_valid(cd)
    rd = cd.datum
    if rd.type_string == "A1" and not force:
        raise ValidationError("type A1 is excluded from the duality checks (use force)")
    dcd = dual_cover(cd)
    require_valid(dcd)
    L = local_system(cd, check=False)
    Ld = local_system(dcd, check=False)
    ref = L.dualize()
    if Ld.matrices != ref.matrices:
        raise GateError("dual cover does not induce the dual local system")
    sw = _sandwich(L, Ld)
    swd = _sandwich(Ld, L)
    _check_gates(sw, L)
    _check_gates(swd, Ld)
    rows = []
    r, rdual = sw.rank, swd.rank
    rows.append(CheckRow("rank", r, rdual, r == rdual))
    G = sw.gram.to_rows()
    Gd = swd.gram.to_rows()
    negT = [[-x for x in row] for row in zip(*G)] if G else []
    rows.append(CheckRow("gram_dual_is_minus_transpose", Gd, negT, Gd == [list(x) for x in negT]))
    if r and r == rdual:
        B0 = sw.l0_basis.to_rows()
        B0d = swd.l0_basis.to_rows()
        # Omega(q, p) = q B0^{-1} G B0d^{-T} p^T on L1 x L1^vee coordinates
        M = _rmm(_rmm(_rinv(B0), G), _rT(_rinv(B0d)))

        def as_q(lat: Lattice):
            return QLattice.span(lat.basis, r)

        def dual_of(lat: Lattice):
            return _dual_qlattice(M, lat.basis)

        pairs = [
            ("L_is_dual_of_dual_L", sw.L, swd.L),
            ("L0_is_dual_of_dual_L1", sw.L0, swd.L1),
            ("L1_is_dual_of_dual_L0", sw.L1, swd.L0),
        ]
        for name, mine, theirs in pairs:
            lhs = as_q(mine)
            rhs = dual_of(theirs)
            rows.append(CheckRow(name, _qbasis_json(lhs.basis()), _qbasis_json(rhs.basis()), lhs == rhs))
    pi0 = component_groups(cd, strict=False)
    h0d = automorphism_groups(dcd, strict=False)
    for (xa, a), (xb, b_) in zip(
        zip(co.SHEAVES, pi0.as_tuple()), zip(reversed(co.SHEAVES), reversed(h0d.as_tuple()))
    ):
        rhs = zl.pontryagin_dual(b_)
        rows.append(CheckRow(f"pi0({xa}) ~ H0({xb} dual)^", str(a), str(rhs), zl.iso_test(a, rhs)))
    pi0d = component_groups(dcd, strict=False)
    h0 = automorphism_groups(cd, strict=False)
    for (xa, a), (xb, b_) in zip(
        zip(co.SHEAVES, pi0d.as_tuple()), zip(reversed(co.SHEAVES), reversed(h0.as_tuple()))
    ):
        rhs = zl.pontryagin_dual(b_)
        rows.append(CheckRow(f"dual pi0({xa}) ~ H0({xb})^", str(a), str(rhs), zl.iso_test(a, rhs)))
    for name, trip in (("pi0 closed form", pi0), ("H0 closed form", h0),
                       ("dual pi0 closed form", pi0d), ("dual H0 closed form", h0d)):
        rows.append(CheckRow(name, [str(x) for x in trip.as_tuple()],
                             [str(x) for x in trip.expected], trip.matches()))
    return DualityReport(rd.name, langlands_dual(rd).name, tuple(rows))


# --------------------------------------------------------------------------
# reductive groups


def reductive_pi0(factors: Sequence[RootDatum], torus_rank: int = 0,
                  kernel_generators: Sequence[Sequence] = ()) -> FgAbGroup:
    """``pi_1`` of ``(prod G_i x T) / K`` via the extension presentation.

    ``pi_1(G/K)`` is ``Lambda' / coroot`` with ``Lambda' = Lambda + span K``.
    The presentation used: generators = ``Lambda`` basis + one per K
    generator; relations = coroots, and ``ord(k) * k`` expressed in Lambda.
    The answer is cross-checked against the assembled reductive datum.
    """
    data = reductive_datum(factors, torus_rank, kernel_generators)
    N = data.datum.ambient_rank
    gens = [list(g) for g in data.kernel_generators]
    # product coroots in product coordinates
    cols = []
    for f_off, f in _factor_offsets(factors):
        for i in range(f.semisimple_rank):
            v = [0] * N
            for j in range(f.ambient_rank):
                v[f_off + j] = f.coroots[j, i]
            cols.append(v + [0] * len(gens))
    for t, g in enumerate(gens):
        den = 1
        for x in g:
            den = zl.lcm(den, Fraction(x).denominator)
        v = [-int(x * den) for x in g] + [den if s == t else 0 for s in range(len(gens))]
        cols.append(v)
    M = IntMatrix.from_rows(cols, N + len(gens)).T if cols else IntMatrix.zeros(N + len(gens), 0)
    ext = zl.cokernel(M)
    direct = pi1(data.datum)
    if not zl.iso_test(ext, direct):
        raise GateError(f"reductive pi_1 mismatch: extension {ext} vs datum {direct}")
    return ext


def _factor_offsets(factors):
    off = 0
    for f in factors:
        yield off, f
        off += f.ambient_rank
