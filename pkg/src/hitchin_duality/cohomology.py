"""Cohomology of the local system ``A`` on the punctured curve and of ``j_* A``.

Generators of the free group ``pi_1(U - s0)`` are ``delta_1..delta_2g``
followed by ``gamma_1..gamma_b``; the relator is
``R = prod_j [delta_j, delta_{g+j}] * prod_i gamma_i``.

Conventions
-----------
* Crossed homomorphisms: ``u(xy) = u(x) + rho(x) u(y)``.
* Coboundary of ``m``: ``x -> (1 - rho(x)) m``.
* Fox evaluation: ``u(R) = sum_x F_x u(x)`` with
  ``F_x = sum_{x at j} rho(prefix_j) - sum_{x^-1 at j} rho(prefix_j x^-1)``.

Line coordinates
----------------
A cocycle whose branch values are forced onto the line ``Q alpha_i^vee`` is
stored as ``(u(delta_1), ..., u(delta_2g), c_1, ..., c_b)`` with
``u(gamma_i) = c_i * beta_i``. The step ``beta_i`` selects the sheaf:

* ``T0``   ``beta = eps_i alpha_i^vee``    (the pushforward ``j_* A``)
* ``T``    ``beta = alpha_i^vee``
* ``Tbar`` ``beta = alpha_i^vee / eps_i^vee``
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import zlattice as zl
from .cameral import LocalSystem
from .errors import GateError
from .zlattice import FgAbGroup, IntMatrix, Lattice

SHEAVES = ("T0", "T", "Tbar")


# --------------------------------------------------------------------------
# small dense helpers (lists of rows)


def _mm(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def _mv(a, v):
    return [sum(x * y for x, y in zip(r, v)) for r in a]


def _T(a):
    return [list(r) for r in zip(*a)]


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _sub(a, b):
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def _add(a, b):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def _neg(a):
    return [[-x for x in r] for r in a]


def _dot(u, v):
    return sum(x * y for x, y in zip(u, v))


# --------------------------------------------------------------------------
# relator and Fox calculus


def relator_letters(genus: int, b: int) -> list:
    """``(generator index, +1 | -1)`` letters of the surface relator."""
    out = []
    for j in range(genus):
        out += [(j, 1), (genus + j, 1), (j, -1), (genus + j, -1)]
    out += [(2 * genus + i, 1) for i in range(b)]
    return out


class _Data:
    """Per-local-system cache of dense matrices and derived presentations."""

    def __init__(self, L: LocalSystem):
        self.L = L
        self.n = L.fiber_rank
        self.g = L.genus
        self.b = L.b
        self.N = 2 * self.g + self.b
        self.rho = [M.to_rows() for M in L.matrices]
        self.rho_inv = [zl.unimodular_inverse(M).to_rows() for M in L.matrices]
        self._fox = None
        self.cache = {}

    @property
    def fox(self):
        if self._fox is None:
            n = self.n
            F = [[[0] * n for _ in range(n)] for _ in range(self.N)]
            P = _eye(n)
            for x, s in relator_letters(self.g, self.b):
                if s > 0:
                    F[x] = _add(F[x], P)
                    P = _mm(P, self.rho[x])
                else:
                    P = _mm(P, self.rho_inv[x])
                    F[x] = _sub(F[x], P)
            if P != _eye(n):
                raise GateError("relator does not evaluate to the identity")
            self._fox = F
        return self._fox

    def step(self, kind: str) -> list:
        """Branch steps ``beta_i`` (integer vectors) for a sheaf kind."""
        L = self.L
        out = []
        for i in range(self.b):
            cv = L.branch_coroots[i]
            if kind == "T0":
                out.append([L.epsilons[i] * x for x in cv])
            elif kind == "T":
                out.append(list(cv))
            elif kind == "Tbar":
                out.append([x // L.epsilons_dual[i] for x in cv])
            else:
                raise ValueError(f"unknown sheaf {kind!r}")
        return out

    def step_scale(self, kind: str) -> list:
        """``beta_i`` as a rational multiple of ``alpha_i^vee``."""
        L = self.L
        if kind == "T0":
            return [Fraction(e) for e in L.epsilons]
        if kind == "T":
            return [Fraction(1)] * self.b
        return [Fraction(1, e) for e in L.epsilons_dual]

    # --- presentations in line coordinates --------------------------------
    def line_dim(self) -> int:
        return 2 * self.g * self.n + self.b

    def condition_matrix(self, kind: str) -> list:
        """``u(R)`` as an ``n x line_dim`` matrix."""
        key = ("cond", kind)
        if key not in self.cache:
            n, g = self.n, self.g
            F = self.fox
            rows = [[0] * self.line_dim() for _ in range(n)]
            for x in range(2 * g):
                for r in range(n):
                    for c in range(n):
                        rows[r][x * n + c] = F[x][r][c]
            steps = self.step(kind)
            for i in range(self.b):
                col = _mv(F[2 * g + i], steps[i])
                for r in range(n):
                    rows[r][2 * g * n + i] = col[r]
            self.cache[key] = rows
        return self.cache[key]

    def cocycles(self, kind: str) -> Lattice:
        key = ("Z", kind)
        if key not in self.cache:
            self.cache[key] = zl.kernel(IntMatrix.from_rows(self.condition_matrix(kind), self.line_dim()))
        return self.cache[key]

    def coboundary_line(self, kind: str) -> list:
        """Rows: images of the basis vectors of Lambda (``line_dim`` columns)."""
        key = ("B", kind)
        if key not in self.cache:
            n, g = self.n, self.g
            L = self.L
            scale = self.step_scale(kind)
            rows = []
            for e in range(n):
                m = [int(t == e) for t in range(n)]
                v = []
                for x in range(2 * g):
                    Mm = _mv(self.rho[x], m)
                    v += [a - c for a, c in zip(m, Mm)]
                for i in range(self.b):
                    # (1 - rho_i) m = <alpha_i, m> alpha_i^vee = c_i beta_i
                    c = Fraction(_dot(L.branch_roots[i], m)) / scale[i]
                    if c.denominator != 1:
                        raise GateError("coboundary leaves the line lattice")
                    v.append(int(c))
                rows.append(v)
            self.cache[key] = rows
        return self.cache[key]

    def line_to_values(self, kind: str, z: Sequence) -> list:
        """Line coordinates -> values on all ``2g + b`` generators (flat)."""
        n, g = self.n, self.g
        out = list(z[:2 * g * n])
        scale = self.step_scale(kind)
        for i in range(self.b):
            c = z[2 * g * n + i] * scale[i]
            out += [c * x for x in self.L.branch_coroots[i]]
        return out

    # --- open presentation ------------------------------------------------
    def coboundary_values(self) -> list:
        """``nN x n`` stacked ``(1 - rho(x))`` matrix."""
        if "delta" not in self.cache:
            rows = []
            for x in range(self.N):
                rows += _sub(_eye(self.n), self.rho[x])
            self.cache["delta"] = rows
        return self.cache["delta"]


_DATA_CACHE: dict = {}


def _data(L: LocalSystem) -> _Data:
    d = _DATA_CACHE.get(id(L))
    if d is None or d.L is not L:
        if len(_DATA_CACHE) > 64:
            _DATA_CACHE.clear()
        d = _Data(L)
        _DATA_CACHE[id(L)] = d
    return d


def fox_matrices(L: LocalSystem) -> list:
    return [IntMatrix.from_rows(F, L.fiber_rank) for F in _data(L).fox]


def evaluate_relator(L: LocalSystem, values: Sequence[Sequence[int]]) -> list:
    """``u(R)`` for a cocycle given by its values on the generators."""
    F = _data(L).fox
    n = L.fiber_rank
    out = [0] * n
    for Fx, v in zip(F, values):
        w = _mv(Fx, v)
        out = [a + c for a, c in zip(out, w)]
    return out


# --------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class CohomologyGroup:
    """A cohomology group with the presentation it was computed from.

    ``cocycles`` lives in the coordinate space described by ``coordinates``;
    ``relations`` has one row per basis vector of Lambda (its coboundary);
    ``condition`` cuts ``cocycles`` out of the coordinate space when present.
    """

    group: FgAbGroup
    coordinates: str
    cocycles: Lattice
    relations: IntMatrix
    condition: Optional[IntMatrix] = None

    def recompute(self) -> FgAbGroup:
        B = Lattice.span(self.relations.to_rows(), self.cocycles.ambient_dim)
        return zl.lattice_quotient(B, self.cocycles)

    @property
    def torsion(self) -> FgAbGroup:
        return self.group.torsion()

    @property
    def rank(self) -> int:
        return self.group.rank


@dataclass(frozen=True)
class TorsionReport:
    open: FgAbGroup
    pushforward: FgAbGroup
    open_witness: zl.SaturationWitness
    pushforward_witness: zl.SaturationWitness


# --------------------------------------------------------------------------
# H^1 on the punctured curve


def h1_open(L: LocalSystem) -> CohomologyGroup:
    """``H^1(U - s0, A) = Lambda^{2g+b} / (1 - rho) Lambda`` (free group)."""
    d = _data(L)
    delta = d.coboundary_values()
    n = d.n
    M = IntMatrix.from_rows(delta, n) if delta else IntMatrix.zeros(0, n)
    grp = zl.cokernel(M)
    rel = M.T
    return CohomologyGroup(grp, "values", Lattice.full(n * d.N), rel)


def h1_punctured(L: LocalSystem) -> CohomologyGroup:
    """``H^1(U, A)``: cocycles with ``u(R) = 0`` modulo coboundaries."""
    d = _data(L)
    n = d.n
    F = d.fox
    cond = [[F[x][r][c] for x in range(d.N) for c in range(n)] for r in range(n)]
    Z = zl.kernel(IntMatrix.from_rows(cond, n * d.N))
    rel = _T(d.coboundary_values())
    B = Lattice.span(rel, n * d.N)
    return CohomologyGroup(zl.lattice_quotient(B, Z), "values", Z,
                           IntMatrix.from_rows(rel, n * d.N), IntMatrix.from_rows(cond, n * d.N))


def h1_sheaf(L: LocalSystem, kind: str = "T0") -> CohomologyGroup:
    """``H^1(C, X)`` for ``X`` in ``T0`` (= ``j_* A``), ``T``, ``Tbar``, in line coordinates."""
    d = _data(L)
    key = ("H1", kind)
    if key not in d.cache:
        Z = d.cocycles(kind)
        rel = d.coboundary_line(kind)
        B = Lattice.span(rel, d.line_dim())
        grp = zl.lattice_quotient(B, Z)
        d.cache[key] = CohomologyGroup(
            grp, f"line:{kind}", Z, IntMatrix.from_rows(rel, d.line_dim()),
            IntMatrix.from_rows(d.condition_matrix(kind), d.line_dim()),
        )
    return d.cache[key]


def h1_pushforward(L: LocalSystem) -> CohomologyGroup:
    """``H^1(C, j_* A)``: kernel of restriction to all punctures, ``s0`` included.

    The ``s0`` component is the Fox evaluation of the relator; the branch
    components force ``u(gamma_i)`` into ``(1 - rho_i) Lambda = Z eps_i alpha_i^vee``.
    """
    return h1_sheaf(L, "T0")


def h1_pushforward_direct(L: LocalSystem) -> FgAbGroup:
    """Same group computed as a kernel inside ``H^1(U - s0, A)`` in value coordinates.

    Used as an independent check of the line-coordinate presentation.
    """
    d = _data(L)
    n, N, g = d.n, d.N, d.g
    # conditions: u(R) = 0 and, for each branch, u(gamma_i) in eps alpha^vee Z.
    # The latter: u(gamma_i) = c beta_i  <=>  u(gamma_i) in sat-line and divisible.
    F = d.fox
    rows = [[F[x][r][c] for x in range(N) for c in range(n)] for r in range(n)]
    # orthogonal complement of alpha_i^vee inside Lambda^vee: u(gamma_i) on the line
    for i in range(d.b):
        cv = L.branch_coroots[i]
        perp = zl.kernel(IntMatrix.from_rows([cv], n))
        for p in perp.basis:
            row = [0] * (n * N)
            for c in range(n):
                row[(2 * g + i) * n + c] = p[c]
            rows.append(row)
    Z_line = zl.kernel(IntMatrix.from_rows(rows, n * N))
    # divisibility: <w_i, u(gamma_i)> in eps_i * eps_dual_i... use a functional
    # phi_i with phi_i(alpha_i^vee / eps_dual_i) = 1, then require phi_i(u) in eps*eps_dual Z
    sub = []
    for v in Z_line.basis:
        sub.append(list(v))
    mods = []
    funcs = []
    for i in range(d.b):
        prim = [x // L.epsilons_dual[i] for x in L.branch_coroots[i]]
        phi = _functional_hitting_one(prim)
        funcs.append(((2 * g + i) * n, phi))
        mods.append(L.epsilons[i] * L.epsilons_dual[i])
    # lattice {z in Z_line : phi_i(z) = 0 mod m_i}
    k = len(sub)
    cols = []
    for (off, phi), m in zip(funcs, mods):
        cols.append([_dot(phi, v[off:off + n]) for v in sub])
    # kernel of Z^k -> prod Z/m_i
    A = [[cols[i][j] for i in range(len(cols))] for j in range(k)]
    big = A + [[m if t == i else 0 for t in range(len(mods))] for i, m in enumerate(mods)]
    ker = zl.left_kernel(IntMatrix.from_rows(big, len(mods))) if mods else None
    if ker is None:
        Zp = Z_line
    else:
        vecs = []
        for y in ker.basis:
            coeff = y[:k]
            vecs.append([sum(coeff[t] * sub[t][j] for t in range(k)) for j in range(n * N)])
        Zp = Lattice.span(vecs, n * N)
    B = Lattice.span(_T(d.coboundary_values()), n * N)
    return zl.lattice_quotient(B, Zp)


def _functional_hitting_one(v: Sequence[int]) -> list:
    """Integer functional ``phi`` with ``phi(v) = 1`` for primitive ``v``."""
    sol = zl.solve_integer(IntMatrix.from_rows([list(v)], len(v)), [1])
    if sol is None:
        raise GateError("vector is not primitive")
    return sol


def h1_pushforward_split(L: LocalSystem) -> FgAbGroup:
    """Split form for trivial handles: ``Lambda^{2g} + ker[...] / (1 - rho) Lambda``.

    ``ker`` is that of ``(c_i) -> sum_i prod_{k<i} rho_k eps_i c_i alpha_i^vee``.
    """
    if not L.handles_trivial():
        raise ValueError("split form needs trivial handle monodromy")
    d = _data(L)
    n, b = d.n, d.b
    P = _eye(n)
    cols = []
    steps = d.step("T0")
    for i in range(b):
        cols.append(_mv(P, steps[i]))
        P = _mm(P, d.rho[2 * d.g + i])
    M = [[cols[i][r] for i in range(b)] for r in range(n)]
    K = zl.kernel(IntMatrix.from_rows(M, b)) if b else Lattice.zero(0)
    rel = []
    for e in range(n):
        m = [int(t == e) for t in range(n)]
        rel.append([_dot(L.branch_roots[i], m) // L.epsilons[i] for i in range(b)])
    B = Lattice.span(rel, b) if b else Lattice.zero(0)
    part = zl.lattice_quotient(B, K) if b else FgAbGroup.trivial()
    return FgAbGroup.free(2 * d.g * n).direct_sum(part)


# --------------------------------------------------------------------------
# H^0, H^2 and component groups


def invariants(L: LocalSystem) -> Lattice:
    """``Lambda^pi``: common kernel of all ``1 - rho(x)``."""
    d = _data(L)
    return zl.kernel(IntMatrix.from_rows(d.coboundary_values(), d.n))


def h0_pushforward(L: LocalSystem) -> FgAbGroup:
    """``H^0(C, j_* A) = Lambda^{pi_1}`` (free)."""
    return FgAbGroup.free(invariants(L).rank)


def h0_sheaf(L: LocalSystem, kind: str) -> FgAbGroup:
    """``H^0`` of the torus sheaf ``X``: torsion of the line-coordinate coboundary cokernel.

    Elements are ``m in Lambda_Q`` with ``(1 - w_j) m`` integral and
    ``(1 - rho_i) m in Z beta_i``, modulo ``Lambda`` (and invariants).
    """
    d = _data(L)
    rows = d.coboundary_line(kind)
    if not rows or not d.line_dim():
        return FgAbGroup.trivial()
    return FgAbGroup(0, zl.cokernel_factors(IntMatrix.from_rows(rows, d.line_dim()).T)[1])


def pi0_sheaf(L: LocalSystem, kind: str) -> FgAbGroup:
    """``pi_0 H^1(C, X) = coker[Lambda^N -> Lambda + sum_i Lambda / Z beta_i]``,
    ``u -> (u(R), u(gamma_i))``; for ``X = T0`` this is ``H^2(C, j_* A)``."""
    d = _data(L)
    n, N, g, b = d.n, d.N, d.g, d.b
    key = ("pi0", kind)
    if key in d.cache:
        return d.cache[key]
    F = d.fox
    rows_total = n * (1 + b)
    cols = []
    for x in range(N):
        for c in range(n):
            col = [F[x][r][c] for r in range(n)] + [0] * (n * b)
            if x >= 2 * g:
                col[n * (1 + x - 2 * g) + c] = 1
            cols.append(col)
    steps = d.step(kind)
    for i in range(b):
        col = [0] * rows_total
        for r in range(n):
            col[n * (1 + i) + r] = steps[i][r]
        cols.append(col)
    M = IntMatrix.from_rows(cols, rows_total).T
    r, facs = zl.cokernel_factors(M)
    res = FgAbGroup(r, facs)
    d.cache[key] = res
    return res


def h2_pushforward(L: LocalSystem) -> FgAbGroup:
    """``H^2(C, j_* A)``, cross-checked against ``((A^vee)^pi)^vee + H^1(U, A^vee)_tor^``."""
    direct = pi0_sheaf(L, "T0")
    Ld = L.dualize()
    tf = invariants(Ld).rank
    tor = zl.pontryagin_dual(h1_punctured(Ld).group.torsion())
    assembled = FgAbGroup(tf, tor.invariant_factors)
    if not zl.iso_test(direct, assembled):
        raise GateError(f"H^2 mismatch: direct {direct} vs assembled {assembled}")
    return direct


def h1_torsion(L: LocalSystem) -> TorsionReport:
    """Torsion of ``H^1(U, A)`` and of ``H^1(C, j_* A)`` with saturation witnesses."""
    d = _data(L)
    # open: sat(delta Lambda) / delta Lambda inside value coordinates
    Bv = Lattice.span(_T(d.coboundary_values()), d.n * d.N)
    w_open = zl.saturation(Bv, with_index=True)
    open_grp = zl.lattice_quotient(Bv, w_open.lattice)
    Bl = Lattice.span(d.coboundary_line("T0"), d.line_dim())
    w_push = zl.saturation(Bl, with_index=True)
    push_grp = zl.lattice_quotient(Bl, w_push.lattice)
    if open_grp != h1_punctured(L).group.torsion():
        raise GateError("open torsion disagrees with H^1(U, A)")
    if push_grp != h1_pushforward(L).group.torsion():
        raise GateError("pushforward torsion disagrees with H^1(C, j_* A)")
    return TorsionReport(open_grp, push_grp, w_open, w_push)


def open_torsion_closed_form(L: LocalSystem) -> FgAbGroup:
    """``(Lambda^b / (1 - rho_1, ..., 1 - rho_b) Lambda)_tor``."""
    d = _data(L)
    rows = []
    for i in range(d.b):
        rows += _sub(_eye(d.n), d.rho[2 * d.g + i])
    if not rows:
        return FgAbGroup.trivial()
    return FgAbGroup(0, zl.cokernel_factors(IntMatrix.from_rows(rows, d.n))[1])


def pushforward_torsion_closed_form(L: LocalSystem) -> FgAbGroup:
    """``(sum_i Z eps_i alpha_i^vee / (1 - rho) Lambda)_tor`` in branch coordinates."""
    d = _data(L)
    if not d.b:
        return FgAbGroup.trivial()
    rows = [[_dot(L.branch_roots[i], [int(t == e) for t in range(d.n)]) // L.epsilons[i]
             for e in range(d.n)] for i in range(d.b)]
    return FgAbGroup(0, zl.cokernel_factors(IntMatrix.from_rows(rows, d.n))[1])


# --------------------------------------------------------------------------
# cup product


def _potential(L: LocalSystem, i: int, c) -> list:
    """``a`` with ``(1 - rho_i) a = c * eps_i * alpha_i^vee`` (``c`` may be rational).

    Uses a fixed ``w_i`` with ``<alpha_i, w_i> = eps_i``; then ``a = c w_i``.
    """
    w = _branch_w(L.branch_roots[i], L.epsilons[i])
    return [c * x for x in w]


@lru_cache(maxsize=4096)
def _branch_w(root: tuple, eps: int) -> tuple:
    sol = zl.solve_integer(IntMatrix.from_rows([list(root)], len(root)), [eps])
    if sol is None:
        raise GateError("no vector pairing to eps with the root")
    return tuple(sol)


class CupForm:
    """Bilinear form ``H^1(C, j_* A) x H^1(C, j_* A^vee) -> Z`` on potential coordinates.

    A cocycle of ``j_* A`` is extended over a closed polygon model of ``C``
    whose boundary word is ``prod_j [delta_j, delta_{g+j}] prod_i t_i tbar_i``;
    ``t_i`` carries the potential ``a_i`` with ``(1 - rho_i) a_i = u(gamma_i)``
    and ``tbar_i`` the monodromy ``rho_i``. Walking the word accumulates
    ``sum <u(prefix), v(letter)>`` in the base frame. The sign convention is
    the one fixed by the handle-block, Kronecker and image gates.
    """

    def __init__(self, L: LocalSystem):
        d = _data(L)
        self.L = L
        n, g, b = d.n, d.g, d.b
        nv = 2 * g + b  # variable blocks: handle values, branch potentials
        self.nvars = nv
        self.n = n
        # matrix blocks: Q[(p, q)] is n x n with total = sum u_p^T Q v_q
        Q = {}
        D = {}  # var -> n x n matrix: D = sum_p D[p] u_p
        T = _eye(n)
        Tinv = _eye(n)

        def add_D(p, M):
            D[p] = _add(D[p], M) if p in D else M

        def add_pair(Phi_var, Phi_mat):
            # total += <D, Phi> = sum_p u_p^T D[p]^T Phi_mat v
            for p, Dp in D.items():
                blk = _mm(_T(Dp), Phi_mat)
                key = (p, Phi_var)
                Q[key] = _add(Q[key], blk) if key in Q else blk

        for x, s in relator_letters(g, 0):
            rho, rinv = d.rho[x], d.rho_inv[x]
            if s > 0:
                add_pair(x, _T(Tinv))
                add_D(x, [r[:] for r in T])
                T = _mm(T, rho)
                Tinv = _mm(rinv, Tinv)
            else:
                T = _mm(T, rinv)
                Tinv = _mm(rho, Tinv)
                add_D(x, _neg(T))
                add_pair(x, _neg(_T(Tinv)))
        for i in range(b):
            var = 2 * g + i
            rho = d.rho[2 * g + i]
            # t_i: value a_i, transport identity
            add_pair(var, _T(Tinv))
            add_D(var, [r[:] for r in T])
            # tbar_i: transport rho_i (an involution), value -a_i after transport
            T = _mm(T, rho)
            Tinv = _mm(rho, Tinv)
            add_D(var, _neg(T))
            add_pair(var, _neg(_T(Tinv)))
        if T != _eye(n):
            raise GateError("polygon word does not close up")
        self.Q = Q

    def value(self, u_pot: Sequence[Sequence], v_pot: Sequence[Sequence]):
        total = 0
        for (p, q), M in self.Q.items():
            up, vq = u_pot[p], v_pot[q]
            if any(up) and any(vq):
                total += _dot(up, _mv(M, vq))
        return total

    def block(self, p: int, q: int) -> list:
        return self.Q.get((p, q), [[0] * self.n for _ in range(self.n)])


def _cup_form(L: LocalSystem) -> CupForm:
    d = _data(L)
    if "cup" not in d.cache:
        d.cache["cup"] = CupForm(L)
    return d.cache["cup"]


def potentials_from_line(L: LocalSystem, z: Sequence, kind: str = "T0", *, shift=None) -> list:
    """Split a line-coordinate cocycle into ``2g + b`` potential blocks.

    ``shift`` optionally adds vectors in ``ker alpha_i`` to the branch potentials.
    """
    d = _data(L)
    n, g = d.n, d.g
    blocks = [list(z[x * n:(x + 1) * n]) for x in range(2 * g)]
    scale = d.step_scale(kind)
    for i in range(d.b):
        c = z[2 * g * n + i] * scale[i] / L.epsilons[i]
        if isinstance(c, Fraction) and c.denominator == 1:
            c = int(c)
        a = _potential(L, i, c)
        if shift is not None:
            a = [x + y for x, y in zip(a, shift[i])]
        blocks.append(a)
    return blocks


def cup_product(L: LocalSystem, u_line: Sequence, v_line: Sequence, *,
                u_kind: str = "T0", v_kind: str = "T0", u_shift=None, v_shift=None):
    """Cup pairing of a ``j_* A`` cocycle with a ``j_* A^vee`` cocycle (line coordinates)."""
    Ld = L.dualize()
    up = potentials_from_line(L, u_line, u_kind, shift=u_shift)
    vp = potentials_from_line(Ld, v_line, v_kind, shift=v_shift)
    return _cup_form(L).value(up, vp)


# --------------------------------------------------------------------------
# pairing Gram matrix


@dataclass(frozen=True)
class PairingMatrix:
    """Gram matrix between bases of ``H^1(C, j_* A)_tf`` and ``H^1(C, j_* A^vee)_tf``.

    ``row_cocycles``/``col_cocycles`` are line-coordinate representatives.
    """

    matrix: IntMatrix
    row_cocycles: tuple
    col_cocycles: tuple

    @property
    def det(self) -> int:
        return self.matrix.det()


def tf_basis(L: LocalSystem, kind: str = "T0") -> tuple:
    """Representatives of a canonical basis of ``H^1(C, X)_tf``.

    Returns ``(reps, proj)`` where ``proj`` maps cocycle-lattice coordinates
    to the tf quotient. The basis is the HNF-canonical image basis.
    """
    d = _data(L)
    key = ("tf", kind)
    if key in d.cache:
        return d.cache[key]
    Z = d.cocycles(kind)
    S = zl.saturation(Lattice.span(d.coboundary_line(kind), d.line_dim()))
    k = Z.rank
    Sc = [Z.coefficients(v) for v in S.basis]
    if any(c is None for c in Sc):
        raise GateError("saturated coboundaries escape the cocycle lattice")
    s = len(Sc)
    if s:
        _, _, V = zl.snf(IntMatrix.from_rows(Sc, k))
        Vr = V.to_rows()
        Vinv = zl.unimodular_inverse(V).to_rows()
    else:
        Vr = _eye(k)
        Vinv = _eye(k)
    proj = [[Vr[i][j] for j in range(s, k)] for i in range(k)]  # k x r
    lifts_coord = Vinv[s:]
    reps = [[sum(c[t] * Z.basis[t][j] for t in range(k)) for j in range(d.line_dim())] for c in lifts_coord]
    res = (tuple(tuple(r) for r in reps), proj, Z, S)
    d.cache[key] = res
    return res


def tf_coordinates(L: LocalSystem, kind: str, z: Sequence[int]) -> list:
    """Coordinates of a cocycle (line coordinates of ``kind``) in ``H^1(C, X)_tf``."""
    reps, proj, Z, S = tf_basis(L, kind)
    c = Z.coefficients(z)
    if c is None:
        raise GateError("vector is not a cocycle")
    return [sum(c[t] * proj[t][j] for t in range(len(c))) for j in range(len(proj[0]) if proj else 0)]


def pairing_gram(L: LocalSystem) -> PairingMatrix:
    """Cup-product Gram matrix on canonical tf bases of ``j_* A`` and ``j_* A^vee``."""
    Ld = L.dualize()
    reps, _, _, _ = tf_basis(L, "T0")
    reps_d, _, _, _ = tf_basis(Ld, "T0")
    cup = _cup_form(L)
    up = [potentials_from_line(L, r) for r in reps]
    vp = [potentials_from_line(Ld, r) for r in reps_d]
    G = [[cup.value(u, v) for v in vp] for u in up]
    M = IntMatrix.from_rows(G, len(vp)) if G else IntMatrix.zeros(0, 0)
    if len(reps) != len(reps_d):
        raise GateError("tf ranks of A and A^vee differ")
    if M.rows and M.det() == 0:
        raise GateError("degenerate cup-product Gram matrix")
    return PairingMatrix(M, reps, reps_d)


# --------------------------------------------------------------------------
# gates


def handle_block_gate(L: LocalSystem) -> bool:
    """With trivial handles the handle-handle block is ``[[0, I], [-I, 0]] (x) I_n``."""
    if not L.handles_trivial():
        raise ValueError("handle block gate needs trivial handles")
    cup = _cup_form(L)
    g, n = L.genus, L.fiber_rank
    I = _eye(n)
    Z = [[0] * n for _ in range(n)]
    for p in range(2 * g):
        for q in range(2 * g):
            if q == p + g and p < g:
                want = I
            elif p == q + g and q < g:
                want = _neg(I)
            else:
                want = Z
            if cup.block(p, q) != want:
                return False
    return True


def kronecker_gate(L: LocalSystem) -> bool:
    """Open-level Kronecker pairing ``H^1(U, A)_tf x H_1(U, A^vee)_tf`` is unimodular.

    Chains for ``A^vee`` are tuples ``(m_x)`` of row vectors; the boundary is
    ``sum_x m_x (1 - rho(x))`` and 2-boundaries are ``(phi F_x)_x``.
    """
    d = _data(L)
    n, N = d.n, d.N
    H = h1_punctured(L)
    Zc = H.cocycles
    Bsat = zl.saturation(Lattice.span(H.relations.to_rows(), n * N))
    # cycles: kernel of d1 : Z^{nN} -> Z^n (row vectors m_x)
    d1 = []  # n x nN : column (x, c) = row c of (1 - rho(x))
    for r in range(n):
        row = []
        for x in range(N):
            Mx = _sub(_eye(n), d.rho[x])
            row += [Mx[c][r] for c in range(n)]
        d1.append(row)
    Zcyc = zl.kernel(IntMatrix.from_rows(d1, n * N))
    F = d.fox
    d2 = [[F[x][r][c] for x in range(N) for c in range(n)] for r in range(n)]
    Bcyc = zl.saturation(Lattice.span(d2, n * N))
    # tf quotients via complements
    Q1 = _quotient_basis(Zc, Bsat)
    Q2 = _quotient_basis(Zcyc, Bcyc)
    if len(Q1) != len(Q2):
        return False
    if not Q1:
        return True
    G = [[_dot(u, m) for m in Q2] for u in Q1]
    return abs(zl.det(G)) == 1


def _quotient_basis(Z: Lattice, S: Lattice) -> list:
    """Vectors of ``Z`` mapping to a basis of ``Z / S`` (``S`` saturated in ``Z``)."""
    k = Z.rank
    Sc = [Z.coefficients(v) for v in S.basis]
    if any(c is None for c in Sc):
        raise GateError("sublattice not contained")
    s = len(Sc)
    if s == 0:
        return [list(b) for b in Z.basis]
    _, _, V = zl.snf(IntMatrix.from_rows(Sc, k))
    Vinv = zl.unimodular_inverse(V).to_rows()
    return [[sum(c[t] * Z.basis[t][j] for t in range(k)) for j in range(Z.ambient_dim)] for c in Vinv[s:]]
