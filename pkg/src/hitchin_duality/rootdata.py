"""Root data of simple and reductive groups, Langlands duality and Weyl actions.

Coordinates: the cocharacter lattice is ``Z^N``. A datum stores its simple
roots as integer row functionals ``R`` (k x N) and its simple coroots as
integer column vectors ``K`` (N x k), so that ``R @ K`` is the Cartan matrix
with ``cartan[i][j] = <alpha_i, alpha_j^vee>``. Simple roots follow Bourbaki
numbering.

For an isogeny class given by a lattice ``coroot <= L <= coweight`` we pick
a basis ``B`` of ``L`` written in fundamental-coweight coordinates (rows).
Then ``R = B^T`` and ``K = B^{-T} @ cartan``.
"""

from __future__ import annotations

import itertools
import re
import warnings
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from . import zlattice as zl
from .errors import CapExceeded, RootDatumError
from .zlattice import FgAbGroup, IntMatrix, Lattice

WEYL_CAP = 2_000_000
ORBIT_CAP = 2_000_000


class A1Warning(UserWarning):
    pass


# --------------------------------------------------------------------------
# Cartan matrices


def cartan_matrix(letter: str, n: int) -> list:
    letter = letter.upper()
    valid = {
        "A": n >= 1, "B": n >= 2, "C": n >= 2, "D": n >= 4,
        "E": n in (6, 7, 8), "F": n == 4, "G": n == 2,
    }
    if letter not in valid or not valid[letter]:
        raise RootDatumError(f"no simple type {letter}{n}")
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, a=-1, b=-1):  # C[i][j] = a, C[j][i] = b
        C[i][j] = a
        C[j][i] = b

    if letter in "ABC":
        for i in range(n - 1):
            link(i, i + 1)
        if letter == "B":
            C[n - 2][n - 1] = -2
        elif letter == "C":
            C[n - 1][n - 2] = -2
    elif letter == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif letter == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif letter == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif letter == "G":
        link(0, 1, -1, -3)
    return C


def weyl_order(letter: str, n: int) -> int:
    letter = letter.upper()
    if letter == "A":
        return factorial(n + 1)
    if letter in "BC":
        return 2 ** n * factorial(n)
    if letter == "D":
        return 2 ** (n - 1) * factorial(n)
    return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
            ("F", 4): 1152, ("G", 2): 12}[(letter, n)]


def classify_cartan(C: Sequence[Sequence[int]]) -> list:
    """Split a Cartan matrix into irreducible components.

    Returns ``[(letter, rank, indices)]`` where ``indices`` lists the simple
    roots of the component in Bourbaki order for that letter. Components are
    sorted by their smallest index.
    """
    k = len(C)
    seen = [False] * k
    comps = []
    for s in range(k):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(k):
                if j != i and C[i][j] and not seen[j]:
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    out = []
    for comp in comps:
        sub = [[C[i][j] for j in comp] for i in comp]
        letter, order = _identify(sub)
        out.append((letter, len(comp), [comp[i] for i in order]))
    return out


def _identify(C) -> tuple:
    """Letter and a Bourbaki ordering for an irreducible Cartan matrix."""
    n = len(C)
    candidates = []
    if n == 1:
        candidates = ["A"]
    elif n == 2:
        candidates = ["A", "B", "C", "G"]
    elif n == 4:
        candidates = ["A", "B", "C", "D", "F"]
    elif n in (6, 7, 8):
        candidates = ["A", "B", "C", "D", "E"]
    else:
        candidates = ["A", "B", "C", "D"]
    nbrs = [[j for j in range(n) if j != i and C[i][j]] for i in range(n)]
    targets = []
    for letter in candidates:
        try:
            targets.append((letter, cartan_matrix(letter, n)))
        except RootDatumError:
            continue
    ident = list(range(n))
    for letter, target in targets:
        if all(C[i][j] == target[i][j] for i in range(n) for j in range(n)):
            return letter, ident
    for order in _orderings(nbrs, n):
        for letter, target in targets:
            if all(C[order[i]][order[j]] == target[i][j] for i in range(n) for j in range(n)):
                return letter, list(order)
    raise RootDatumError("matrix is not a finite-type Cartan matrix")


def _orderings(nbrs, n):
    """Candidate vertex orderings of a Dynkin tree: chains from each leaf,
    plus branch variants for D/E shapes (tree with one trivalent vertex)."""
    if n <= 3:
        yield from itertools.permutations(range(n))
        return
    deg = [len(x) for x in nbrs]
    if max(deg) <= 2:
        for s in range(n):
            if deg[s] == 1:
                order, prev, cur = [s], None, s
                while len(order) < n:
                    nxt = [x for x in nbrs[cur] if x != prev][0]
                    order.append(nxt)
                    prev, cur = cur, nxt
                yield order
        return
    # one branch vertex: try all labelings consistent with D_n or E_n shapes
    b = deg.index(3)
    arms = []
    for s in nbrs[b]:
        arm, prev, cur = [s], b, s
        while deg[cur] == 2:
            nxt = [x for x in nbrs[cur] if x != prev][0]
            arm.append(nxt)
            prev, cur = cur, nxt
        arms.append(arm)
    for a, c, d in itertools.permutations(arms):
        # D_n: long arm a reversed, branch, then c, d short leaves
        yield list(reversed(a)) + [b] + c + d
        # E_n: 1 3 4 5 ..., 2 attached to 4 (0-based: 0 2 3 4 ..., 1 on 3)
        if len(c) == 1 and len(a) == 2:
            # arm a = [3, 1] (from branch outward), c = [2], d = [5, 6, ...]
            order = [None] * n
            order[3] = b
            order[2], order[0] = a[0], a[1]
            order[1] = c[0]
            for idx, v in enumerate(d):
                order[4 + idx] = v
            if None not in order:
                yield order


# --------------------------------------------------------------------------
# helpers


def _rat_inverse_T_times(B: list, C: list) -> list:
    """``B^{-T} @ C`` as an integer matrix, or raise."""
    BT = [list(r) for r in zip(*B)]
    inv = zl.rational_inverse(BT)
    n = len(C[0])
    out = [[sum(inv[i][l] * C[l][j] for l in range(len(C))) for j in range(n)] for i in range(len(inv))]
    if any(x.denominator != 1 for row in out for x in row):
        raise RootDatumError("lattice does not contain the coroot lattice")
    return [[int(x) for x in row] for row in out]


def _transpose(M):
    return [list(r) for r in zip(*M)] if M else []


# --------------------------------------------------------------------------
# roots and Weyl elements


@dataclass(frozen=True)
class Root:
    functional: tuple  # row in Lambda^vee
    coroot: tuple      # vector in Lambda
    coefficients: tuple  # in the simple roots
    component: int
    is_long: bool

    @property
    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coefficients)

    @property
    def length_class(self) -> tuple:
        return (self.component, "long" if self.is_long else "short")


@dataclass(frozen=True)
class WeylElement:
    matrix: IntMatrix

    @classmethod
    def identity(cls, n: int) -> "WeylElement":
        return cls(IntMatrix.identity(n))

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.matrix @ other.matrix)

    def inverse(self) -> "WeylElement":
        return WeylElement(zl.unimodular_inverse(self.matrix))

    def apply(self, v: Sequence[int]) -> tuple:
        M = self.matrix
        return tuple(sum(a * b for a, b in zip(M.row(i), v)) for i in range(M.rows))

    def apply_functional(self, f: Sequence[int]) -> tuple:
        """``f o w^{-1}``, the action on the dual lattice."""
        Mi = zl.unimodular_inverse(self.matrix)
        return tuple(sum(f[i] * Mi[i, j] for i in range(Mi.rows)) for j in range(Mi.cols))

    def is_identity(self) -> bool:
        return self.matrix == IntMatrix.identity(self.matrix.rows)

    def contragredient(self) -> "WeylElement":
        return WeylElement(zl.unimodular_inverse(self.matrix).T)


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return a * b * a.inverse() * b.inverse()


# --------------------------------------------------------------------------
# RootDatum


@dataclass(frozen=True, eq=False)
class RootDatum:
    """Root datum on ``Lambda = Z^N``.

    ``roots``: k x N simple root functionals. ``coroots``: N x k matrix whose
    columns are the simple coroots.
    """

    roots: IntMatrix
    coroots: IntMatrix
    label: Optional[str] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        R, K = self.roots, self.coroots
        if R.cols != K.rows or R.rows != K.cols:
            raise RootDatumError("roots and coroots have incompatible shapes")
        C = (R @ K).to_rows()
        if any(C[i][i] != 2 for i in range(len(C))):
            raise RootDatumError("<alpha_i, alpha_i^vee> must equal 2")
        comps = classify_cartan(C)
        self._cache["cartan"] = C
        self._cache["components"] = comps
        if len(comps) == 1 and comps[0][0] == "A" and comps[0][1] == 1 and R.cols == 1:
            warnings.warn("type A1 is excluded from the duality statements", A1Warning, stacklevel=3)

    # identity ------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, RootDatum) and self.roots == other.roots and self.coroots == other.coroots

    def __hash__(self):
        return hash((self.roots, self.coroots))

    @property
    def ambient_rank(self) -> int:
        return self.roots.cols

    @property
    def semisimple_rank(self) -> int:
        return self.roots.rows

    @property
    def cartan(self) -> list:
        return self._cache["cartan"]

    @property
    def components(self) -> list:
        return self._cache["components"]

    @property
    def is_semisimple(self) -> bool:
        return self.semisimple_rank == self.ambient_rank

    def simple_root(self, i: int) -> tuple:
        return self.roots.row(i)

    def simple_coroot(self, i: int) -> tuple:
        return self.coroots.col(i)

    @property
    def type_string(self) -> str:
        parts = [f"{l}{n}" for l, n, _ in self.components]
        return "x".join(parts) if parts else "T0"

    @property
    def isogeny(self) -> str:
        if "isogeny" not in self._cache:
            self._cache["isogeny"] = _isogeny_label(self)
        return self._cache["isogeny"]

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        t = self.type_string
        if not self.is_semisimple:
            t += f"xT{self.ambient_rank - self.semisimple_rank}"
        return f"{t}:{self.isogeny}"

    def __repr__(self):
        return f"RootDatum({self.name})"

    def is_standard(self) -> bool:
        """Whether simple roots follow the Bourbaki numbering of a single type."""
        comps = self.components
        return len(comps) == 1 and comps[0][2] == list(range(self.semisimple_rank))

    # roots ----------------------------------------------------------------
    def all_roots(self) -> list:
        if "roots" in self._cache:
            return self._cache["roots"]
        k, N = self.semisimple_rank, self.ambient_rank
        C = self.cartan
        comp_of = {}
        for ci, (_, _, idx) in enumerate(self.components):
            for i in idx:
                comp_of[i] = ci
        start = []
        for i in range(k):
            coeff = tuple(1 if j == i else 0 for j in range(k))
            start.append((coeff, i))
        found = {c: comp for c, comp in ((c, comp_of[i]) for c, i in start)}
        queue = deque(found)
        # reflect coefficient vectors: s_i(beta) = beta - <beta, alpha_i^vee> alpha_i
        while queue:
            beta = queue.popleft()
            for i in range(k):
                pair = sum(beta[j] * C[j][i] for j in range(k))
                if pair:
                    new = list(beta)
                    new[i] -= pair
                    new = tuple(new)
                    if new not in found:
                        found[new] = found[beta]
                        queue.append(new)
                        if len(found) > 10_000:
                            raise RootDatumError("root closure did not terminate")
        for c in list(found):
            neg = tuple(-x for x in c)
            if neg not in found:
                found[neg] = found[c]
        # coroots: need coefficients of beta^vee in the simple coroots.
        # Use the dual closure in parallel through a symmetrizing form.
        d = self._symmetrizer()
        roots = []
        for coeff, comp in found.items():
            func = tuple(sum(coeff[i] * self.roots[i, j] for i in range(k)) for j in range(N))
            # norm = 2 (beta, beta) where (a_i, a_j) = C_ij d_j / 2
            norm = sum(coeff[i] * coeff[j] * C[i][j] * d[j] for i in range(k) for j in range(k))
            cvec = [Fraction(2 * coeff[i] * d[i], norm) for i in range(k)]
            if any(x.denominator != 1 for x in cvec):
                raise RootDatumError("internal: non-integral coroot coefficients")
            cc = [int(x) for x in cvec]
            vec = tuple(sum(self.coroots[j, i] * cc[i] for i in range(k)) for j in range(N))
            roots.append([func, vec, coeff, comp, norm])
        # long = maximal norm inside each component
        maxnorm = {}
        for r in roots:
            maxnorm[r[3]] = max(maxnorm.get(r[3], 0), r[4])
        out = [Root(f, v, c, comp, norm == maxnorm[comp]) for f, v, c, comp, norm in roots]
        out.sort(key=lambda r: (not r.is_positive, sum(abs(x) for x in r.coefficients), r.coefficients))
        self._cache["roots"] = out
        self._cache["root_index"] = {r.functional: r for r in out}
        self._cache["coroot_index"] = {r.coroot: r for r in out}
        return out

    def _symmetrizer(self) -> list:
        """Squared simple root lengths ``d_i``, so that ``C_ij d_j`` is symmetric."""
        C = self.cartan
        k = len(C)
        d = [None] * k
        for _, _, idx in self.components:
            d[idx[0]] = Fraction(1)
            stack = [idx[0]]
            while stack:
                i = stack.pop()
                for j in idx:
                    if C[i][j] and d[j] is None:
                        # C_ij d_j = C_ji d_i
                        d[j] = d[i] * Fraction(C[j][i], C[i][j])
                        stack.append(j)
        den = 1
        for x in d:
            den = zl.lcm(den, x.denominator)
        return [int(x * den) for x in d]

    def root(self, functional: Sequence[int]) -> Root:
        self.all_roots()
        r = self._cache["root_index"].get(tuple(functional))
        if r is None:
            raise RootDatumError(f"{list(functional)} is not a root of {self.name}")
        return r

    def root_from_coefficients(self, coeff: Sequence[int]) -> Root:
        k = self.semisimple_rank
        if len(coeff) != k:
            raise RootDatumError(f"root needs {k} simple-root coefficients")
        f = tuple(sum(coeff[i] * self.roots[i, j] for i in range(k)) for j in range(self.ambient_rank))
        return self.root(f)

    def root_of_coroot(self, coroot: Sequence[int]) -> Root:
        self.all_roots()
        r = self._cache["coroot_index"].get(tuple(coroot))
        if r is None:
            raise RootDatumError(f"{list(coroot)} is not a coroot of {self.name}")
        return r

    def positive_roots(self) -> list:
        return [r for r in self.all_roots() if r.is_positive]

    def length_classes(self) -> set:
        return {r.length_class for r in self.all_roots()}

    # Weyl group -------------------------------------------------------------
    def weyl_order(self) -> int:
        o = 1
        for l, n, _ in self.components:
            o *= weyl_order(l, n)
        return o

    def reflection(self, root) -> WeylElement:
        r = root if isinstance(root, Root) else self.root(root)
        N = self.ambient_rank
        rows = [[(1 if i == j else 0) - r.coroot[i] * r.functional[j] for j in range(N)] for i in range(N)]
        return WeylElement(IntMatrix.from_rows(rows, N))

    def simple_reflection(self, i: int) -> WeylElement:
        key = ("sref", i)
        if key not in self._cache:
            self._cache[key] = self.reflection(self.simple_root(i))
        return self._cache[key]

    def weyl_word(self, word: Sequence[int]) -> WeylElement:
        """Product ``s_{w1} s_{w2} ...`` of simple reflections (1-based indices)."""
        W = WeylElement.identity(self.ambient_rank)
        for i in word:
            if not 1 <= i <= self.semisimple_rank:
                raise RootDatumError(f"simple reflection index {i} out of range")
            W = W * self.simple_reflection(i - 1)
        return W

    def rho_vee2(self) -> tuple:
        """Sum of positive coroots: a regular dominant vector of Lambda."""
        if "rho2" not in self._cache:
            N = self.ambient_rank
            v = [0] * N
            for r in self.positive_roots():
                for j in range(N):
                    v[j] += r.coroot[j]
            self._cache["rho2"] = tuple(v)
        return self._cache["rho2"]

    def reduced_word(self, w: WeylElement) -> list:
        """1-based reduced word with ``w == weyl_word(word)``."""
        v = list(w.apply(self.rho_vee2()))
        target = list(self.rho_vee2())
        word = []
        k = self.semisimple_rank
        while v != target:
            for i in range(k):
                a = self.simple_root(i)
                if sum(x * y for x, y in zip(a, v)) < 0:
                    c = self.simple_coroot(i)
                    p = sum(x * y for x, y in zip(a, v))
                    v = [x - p * y for x, y in zip(v, c)]
                    word.append(i + 1)
                    break
            else:
                raise RootDatumError("element is not in the Weyl group")
        if self.weyl_word(word) != w:
            raise RootDatumError("element is not in the Weyl group")
        return word

    def weyl_orbit(self, v: Sequence[int], cap: int = ORBIT_CAP) -> set:
        v = tuple(v)
        k = self.semisimple_rank
        R = [self.simple_root(i) for i in range(k)]
        K = [self.simple_coroot(i) for i in range(k)]
        seen = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for a, c in zip(R, K):
                p = sum(s * t for s, t in zip(a, x))
                if p:
                    y = tuple(s - p * t for s, t in zip(x, c))
                    if y not in seen:
                        seen.add(y)
                        if len(seen) > cap:
                            raise CapExceeded(f"orbit exceeds cap {cap}")
                        queue.append(y)
        return seen

    def full_weyl_sum(self, v: Sequence[int], cap: int = ORBIT_CAP) -> tuple:
        """``sum_{w in W} w(v)`` computed from the orbit and its size."""
        orb = self.weyl_orbit(v, cap)
        W = self.weyl_order()
        if W % len(orb):
            raise RootDatumError("internal: orbit size does not divide |W|")
        mult = W // len(orb)
        N = self.ambient_rank
        return tuple(mult * sum(x[j] for x in orb) for j in range(N))

    def generated_group_is_weyl(self, gens: Sequence[WeylElement], cap: int = WEYL_CAP) -> bool:
        """Whether the group generated by ``gens`` (inside W) is all of W."""
        W = self.weyl_order()
        if W > cap:
            raise CapExceeded(f"|W| = {W} exceeds the enumeration cap {cap}")
        mats = [g.matrix.to_rows() for g in gens]
        v0 = self.rho_vee2()
        seen = {v0}
        queue = deque([v0])
        while queue:
            x = queue.popleft()
            for M in mats:
                y = tuple(sum(a * b for a, b in zip(row, x)) for row in M)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == W

    # invariants -------------------------------------------------------------
    def epsilon(self, root) -> int:
        r = root if isinstance(root, Root) else self.root(root)
        return zl.vec_gcd(r.functional)

    def epsilon_dual(self, root) -> int:
        r = root if isinstance(root, Root) else self.root(root)
        return langlands_dual(self).epsilon(r.coroot)

    def pi1(self) -> FgAbGroup:
        return zl.cokernel(self.coroots)

    def center(self) -> FgAbGroup:
        g = pi1(langlands_dual(self))
        if g.rank:
            return g  # character group of the center; see center()
        return zl.pontryagin_dual(g)

    def coroot_lattice(self) -> Lattice:
        return Lattice.span(self.coroots.T.to_rows(), self.ambient_rank)

    def invariant_lattice(self) -> Lattice:
        """``Lambda^W``: common kernel of all simple roots."""
        return zl.kernel(self.roots) if self.semisimple_rank else Lattice.full(self.ambient_rank)


# --------------------------------------------------------------------------
# construction


_NAME_RE = re.compile(r"^\s*([A-Ga-g])\s*(\d+)\s*(?::\s*(.*?))?\s*$")


def build_root_datum(letter: str, rank: int, isogeny="sc") -> RootDatum:
    """Simple root datum of the given type.

    ``isogeny``: "sc", "ad", or generators of ``Lambda / coroot`` given as
    extra coweight vectors in fundamental-coweight coordinates.
    """
    letter = letter.upper()
    C = cartan_matrix(letter, rank)
    if isinstance(isogeny, str):
        iso = isogeny.strip().lower()
        if iso == "sc":
            return RootDatum(IntMatrix.from_rows(C, rank), IntMatrix.identity(rank))
        if iso == "ad":
            return RootDatum(IntMatrix.identity(rank), IntMatrix.from_rows(C, rank))
        raise RootDatumError(f"unknown isogeny {isogeny!r}")
    gens = [list(g) for g in isogeny]
    for g in gens:
        if len(g) != rank:
            raise RootDatumError("coweight generator has wrong length")
        for x in g:
            if Fraction(x).denominator != 1:
                raise RootDatumError("lattice is not inside the coweight lattice")
    # coroot lattice in coweight coordinates has rows = cartan columns
    coroot_rows = _transpose(C)
    L = Lattice.span(coroot_rows + [[int(x) for x in g] for g in gens], rank)
    if L.rank != rank:
        raise RootDatumError("lattice must have full rank")
    return _datum_from_coweight_basis(C, [list(b) for b in L.basis])


def _datum_from_coweight_basis(C, B) -> RootDatum:
    n = len(C)
    R = _transpose(B)
    K = _rat_inverse_T_times(B, C)
    return RootDatum(IntMatrix.from_rows(R, n), IntMatrix.from_rows(K, n))


def intermediate_lattices(letter: str, rank: int) -> list:
    """All lattices between coroot and coweight lattice, as isogeny specs."""
    C = cartan_matrix(letter, rank)
    pi = zl.cokernel(IntMatrix.from_rows(C, rank))  # coroot j has coweight coordinates = column j of C
    # subgroups of pi1(ad): enumerate via generator sets of the finite group
    coroot_rows = _transpose(C)
    base = Lattice.span(coroot_rows, rank)
    gens = pi.presentation.generators
    facs = pi.invariant_factors
    elements = [[]]
    for t, d in enumerate(facs):
        elements = [e + [a] for e in elements for a in range(d)]
    lattices = {}
    elem_vecs = []
    for e in elements:
        v = [sum(gens[r, t] * e[t] for t in range(len(facs))) for r in range(rank)]
        elem_vecs.append(v)
    # subgroups of a group of order <= 4 (or Z/n): generated by at most 2 elements
    for a, b in itertools.combinations_with_replacement(range(len(elem_vecs)), 2):
        L = Lattice.span(coroot_rows + [elem_vecs[a], elem_vecs[b]], rank)
        lattices[L.basis] = L
    out = []
    for L in sorted(lattices.values(), key=lambda L: (-_index(base, L), L.basis)):
        out.append(L)
    return out


def _index(sub: Lattice, sup: Lattice) -> int:
    return zl.lattice_quotient(sub, sup).order


def isogeny_classes(letter: str, rank: int) -> list:
    """Datum for every intermediate lattice, sc first and ad last."""
    out = []
    C = cartan_matrix(letter, rank)
    for L in intermediate_lattices(letter, rank):
        out.append(_datum_from_coweight_basis(C, [list(b) for b in L.basis]))
    # normalize sc/ad to their canonical matrices
    res = []
    for rd in out:
        iso = rd.isogeny
        if iso in ("sc", "ad"):
            res.append(build_root_datum(letter, rank, iso))
        else:
            res.append(rd)
    res.sort(key=lambda rd: (rd.isogeny != "sc", rd.isogeny == "ad", rd.name))
    return res


def _isogeny_label(rd: RootDatum) -> str:
    if not rd.is_semisimple:
        return "red"
    K, R = rd.coroots, rd.roots
    if abs(K.det()) == 1:
        return "sc"
    if abs(R.det()) == 1:
        return "ad"
    # coweight coordinates of a Lambda basis are the columns of R
    if len(rd.components) == 1:
        comp = rd.components[0]
        idx = comp[2]
        rows = [[R[i, j] for i in idx] for j in range(rd.ambient_rank)]
        L = Lattice.span(rows, len(idx))
        extras = _extra_generators(rd.cartan, idx, L)
        return "w=" + ";".join(",".join(str(x) for x in g) for g in extras)
    rows = [[R[i, j] for i in range(rd.semisimple_rank)] for j in range(rd.ambient_rank)]
    L = Lattice.span(rows, rd.semisimple_rank)
    return "w=" + ";".join(",".join(str(x) for x in b) for b in L.basis)


def _extra_generators(C, idx, L: Lattice) -> list:
    """Short description of L: HNF rows not already in the coroot lattice."""
    n = len(idx)
    coroot = Lattice.span([[C[i][j] for i in idx] for j in idx], n)
    return [list(b) for b in L.basis if list(b) not in coroot]


def parse_group(text: str) -> RootDatum:
    """Parse names such as ``B3:sc``, ``A3:ad``, ``D4:w=1,0,0,0`` or ``A2xA2:...``."""
    m = _NAME_RE.match(text)
    if not m:
        raise RootDatumError(f"cannot parse group name {text!r}")
    letter, rank, iso = m.group(1).upper(), int(m.group(2)), (m.group(3) or "sc")
    iso = iso.strip()
    if iso.lower().startswith("w="):
        body = iso[2:]
        gens = [[int(x) for x in part.split(",")] for part in body.split(";") if part.strip()]
        return build_root_datum(letter, rank, gens)
    return build_root_datum(letter, rank, iso.lower())


# --------------------------------------------------------------------------
# duality and invariants (functional forms)


def langlands_dual(rd: RootDatum) -> RootDatum:
    key = "dual"
    if key not in rd._cache:
        d = RootDatum(rd.coroots.T, rd.roots.T)
        d._cache["dual"] = rd
        rd._cache[key] = d
    return rd._cache[key]


def epsilon(rd: RootDatum, root) -> int:
    return rd.epsilon(root)


def epsilon_dual(rd: RootDatum, root) -> int:
    return rd.epsilon_dual(root)


def pi1(rd: RootDatum) -> FgAbGroup:
    return rd.pi1()


def center(rd: RootDatum) -> FgAbGroup:
    """``Z(G)`` as the Pontryagin dual of ``pi1`` of the dual datum.

    For a datum with a central torus the result is the character group
    ``pi1(dual)`` (which then has positive rank).
    """
    return rd.center()


def reflection(rd: RootDatum, root) -> WeylElement:
    return rd.reflection(root)


def weyl_orbit(rd: RootDatum, v, cap: int = ORBIT_CAP) -> set:
    return rd.weyl_orbit(v, cap)


def full_weyl_sum(rd: RootDatum, v, cap: int = ORBIT_CAP) -> tuple:
    return rd.full_weyl_sum(v, cap)


def all_roots(rd: RootDatum) -> list:
    return rd.all_roots()


def group_family(rd: RootDatum) -> str:
    """"Sp" for Sp(r), "SO_odd" for SO(2r+1), else "other".

    B2 and C2 coincide, so Spin(5) counts as Sp(2) and PSp(2) as SO(5).
    Likewise SL(2) = Sp(1) and PGL(2) = SO(3).
    """
    comps = rd.components
    if len(comps) != 1 or not rd.is_semisimple:
        return "other"
    letter, n, _ = comps[0]
    iso = rd.isogeny
    small = (letter, n) in (("A", 1), ("B", 2), ("C", 2))
    if (letter == "C" or small) and iso == "sc":
        return "Sp"
    if (letter == "B" or small) and iso == "ad":
        return "SO_odd"
    return "other"


# --------------------------------------------------------------------------
# reductive data


@dataclass(frozen=True)
class ReductiveData:
    """``(prod factors x torus) / K`` with K finite central, plus its root datum."""

    factors: tuple
    torus_rank: int
    kernel_generators: tuple  # rational vectors in the product cocharacter space
    datum: RootDatum


def reductive_datum(factors: Sequence[RootDatum], torus_rank: int = 0,
                    kernel_generators: Sequence[Sequence] = ()) -> ReductiveData:
    """Build the root datum of ``(G_1 x ... x T) / K``.

    Elements of K are given as vectors ``x`` of ``Lambda_Q`` of the product
    (one exponent per coordinate), representing ``exp(2 pi i x)``. Centrality
    means ``<alpha, x>`` is an integer for every root alpha. The quotient's
    cocharacter lattice is ``Lambda + span(K)``.
    """
    N = sum(f.ambient_rank for f in factors) + torus_rank
    k = sum(f.semisimple_rank for f in factors)
    R = [[0] * N for _ in range(k)]
    Kc = [[0] * k for _ in range(N)]
    ro = co = 0
    for f in factors:
        for i in range(f.semisimple_rank):
            for j in range(f.ambient_rank):
                R[ro + i][co + j] = f.roots[i, j]
                Kc[co + j][ro + i] = f.coroots[j, i]
        ro += f.semisimple_rank
        co += f.ambient_rank
    gens = [[Fraction(x) for x in g] for g in kernel_generators]
    for g in gens:
        if len(g) != N:
            raise RootDatumError(f"kernel generator needs {N} coordinates")
        for row in R:
            if sum(a * b for a, b in zip(row, g)).denominator != 1:
                raise RootDatumError(f"kernel generator {[str(x) for x in g]} is not central")
    Q = zl.QLattice.span([[Fraction(int(i == j)) for j in range(N)] for i in range(N)] + gens, N)
    # new Lambda basis (rational), written in old coordinates
    B = Q.basis()
    if len(B) != N:
        raise RootDatumError("kernel generators must be torsion")
    # coordinates change: old = B^T new  ->  roots become R B^T, coroots B^{-T} K
    BT = _transpose(B)
    Rn = [[sum(R[i][l] * BT[l][j] for l in range(N)) for j in range(N)] for i in range(k)]
    inv = zl.rational_inverse(BT)
    Kn = [[sum(inv[i][l] * Kc[l][j] for l in range(N)) for j in range(k)] for i in range(N)]
    for M in (Rn, Kn):
        if any(Fraction(x).denominator != 1 for row in M for x in row):
            raise RootDatumError("internal: reductive datum not integral")
    rd = RootDatum(IntMatrix.from_rows([[int(x) for x in r] for r in Rn], N),
                   IntMatrix.from_rows([[int(x) for x in r] for r in Kn], k))
    return ReductiveData(tuple(factors), torus_rank, tuple(tuple(g) for g in gens), rd)
