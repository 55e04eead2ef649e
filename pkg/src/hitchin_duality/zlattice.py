"""Exact integer linear algebra over Z.

Everything here works on plain Python ints, so entries never overflow.
Matrices are immutable :class:`IntMatrix` values; internally the
algorithms operate on lists of row lists and convert at the boundary.

Conventions
-----------
* Row Hermite form: ``U @ M == H``. Pivots are positive, entries above a
  pivot lie in ``[0, pivot)``, zero rows sit at the bottom.
* Smith form: ``U @ M @ V == D`` with ``d1 | d2 | ...`` and ``d_i >= 0``.
* ``cokernel(M)`` is ``Z^m / (column span of M)`` for an ``m x n`` matrix.
* Lattices are row spans; the stored basis is the nonzero part of the HNF.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import LatticeError

# Turn off to skip the U*M*V == D re-multiplication on hot paths.
VERIFY_TRANSFORMS = True

Rows = list  # list[list[int]]


def _copy(rows) -> Rows:
    return [list(r) for r in rows]


def _identity(n: int) -> Rows:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], inner: int, cols: int) -> Rows:
    bt = list(zip(*b)) if b else [()] * cols
    if inner == 0:
        return [[0] * cols for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


# --------------------------------------------------------------------------
# IntMatrix


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major flat tuple of ints

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise LatticeError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise LatticeError(
                f"entry count {len(self.entries)} != {self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        flat = []
        for r in rows:
            if len(r) != cols:
                raise LatticeError("ragged rows")
            for x in r:
                if isinstance(x, bool) or not isinstance(x, int):
                    if isinstance(x, Fraction) and x.denominator == 1:
                        x = int(x)
                    else:
                        raise LatticeError(f"non-integer entry {x!r}")
                flat.append(int(x))
        return cls(len(rows), cols, tuple(flat))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows(_identity(n), n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(m, n, (0,) * (m * n))

    @classmethod
    def diag(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls.from_rows(
            [[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n
        )

    def to_rows(self) -> Rows:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols] if self.cols else ()

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.col(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise LatticeError(f"shape mismatch {self.shape} @ {other.shape}")
        return IntMatrix.from_rows(
            _matmul(self.to_rows(), other.to_rows(), self.cols, other.cols), other.cols
        )

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def __add__(self, other):
        if self.shape != other.shape:
            raise LatticeError("shape mismatch in +")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        return self + (-other)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def det(self) -> int:
        if self.rows != self.cols:
            raise LatticeError("determinant of non-square matrix")
        return det(self.to_rows())

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r})"


def as_rows(M) -> Rows:
    if isinstance(M, IntMatrix):
        return M.to_rows()
    return _copy(M)


def _as_matrix(M, cols: Optional[int] = None) -> IntMatrix:
    if isinstance(M, IntMatrix):
        return M
    return IntMatrix.from_rows(M, cols)


def det(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    a = _copy(rows)
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ri = a[i]
            rk = a[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


# --------------------------------------------------------------------------
# Hermite normal form


def _hnf_rows(A: Rows, ncols: int, U: Optional[Rows] = None):
    """In-place row HNF of ``A``; applies the same row ops to ``U``.

    Returns the pivot columns.
    """
    m = len(A)
    r = 0
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        while True:
            best = -1
            bv = 0
            for i in range(r, m):
                v = A[i][c]
                if v and (best < 0 or abs(v) < bv):
                    best, bv = i, abs(v)
            if best < 0:
                break
            if best != r:
                A[r], A[best] = A[best], A[r]
                if U is not None:
                    U[r], U[best] = U[best], U[r]
            p = A[r][c]
            rowr = A[r]
            clean = True
            for i in range(r + 1, m):
                v = A[i][c]
                if v:
                    q = v // p
                    rowi = A[i]
                    for j in range(c, ncols):
                        rowi[j] -= q * rowr[j]
                    if U is not None:
                        ui, ur = U[i], U[r]
                        for j in range(len(ur)):
                            ui[j] -= q * ur[j]
                    if rowi[c]:
                        clean = False
            if clean:
                break
        if best < 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            if U is not None:
                U[r] = [-x for x in U[r]]
        p = A[r][c]
        rowr = A[r]
        for i in range(r):
            q = A[i][c] // p
            if q:
                rowi = A[i]
                for j in range(c, ncols):
                    rowi[j] -= q * rowr[j]
                if U is not None:
                    ui, ur = U[i], U[r]
                    for j in range(len(ur)):
                        ui[j] -= q * ur[j]
        pivots.append(c)
        r += 1
    return pivots


def hnf(M) -> tuple:
    """Row Hermite normal form: returns ``(H, U)`` with ``U @ M == H``."""
    M = _as_matrix(M)
    A = M.to_rows()
    U = _identity(M.rows)
    _hnf_rows(A, M.cols, U)
    H = IntMatrix.from_rows(A, M.cols)
    Um = IntMatrix.from_rows(U, M.rows)
    if VERIFY_TRANSFORMS:
        if Um @ M != H or abs(Um.det()) != 1:
            raise LatticeError("internal: HNF transform check failed")
    return H, Um


def hnf_basis(rows, ncols: int) -> list:
    """Nonzero rows of the HNF of ``rows``, as tuples."""
    A = _copy(rows)
    piv = _hnf_rows(A, ncols)
    return [tuple(A[i]) for i in range(len(piv))]


# --------------------------------------------------------------------------
# Smith normal form


def _snf_rows(A: Rows, m: int, n: int, U: Optional[Rows], V: Optional[Rows],
              Uinv: Optional[Rows] = None):
    """In-place Smith form. ``U``/``V`` receive row/column ops (may be None).

    ``Uinv`` tracks ``U^{-1}`` via inverse column ops. Returns the diagonal.
    """

    def row_addmul(i, k, q):  # row_i -= q * row_k
        ri, rk = A[i], A[k]
        for j in range(n):
            if rk[j]:
                ri[j] -= q * rk[j]
        if U is not None:
            ui, uk = U[i], U[k]
            for j in range(m):
                if uk[j]:
                    ui[j] -= q * uk[j]
        if Uinv is not None:  # col_k += q * col_i
            for row in Uinv:
                if row[i]:
                    row[k] += q * row[i]

    def row_swap(i, k):
        A[i], A[k] = A[k], A[i]
        if U is not None:
            U[i], U[k] = U[k], U[i]
        if Uinv is not None:
            for row in Uinv:
                row[i], row[k] = row[k], row[i]

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]
        if Uinv is not None:
            for row in Uinv:
                row[i] = -row[i]

    def col_addmul(j, k, q):  # col_j -= q * col_k
        for row in A:
            if row[k]:
                row[j] -= q * row[k]
        if V is not None:
            for row in V:
                if row[k]:
                    row[j] -= q * row[k]

    def col_swap(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        if V is not None:
            for row in V:
                row[j], row[k] = row[k], row[j]

    t = 0
    diag = []
    while t < min(m, n):
        # pivot: smallest nonzero entry of the remaining block
        best = None
        bv = 0
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < bv):
                    best, bv = (i, j), abs(v)
                    if bv == 1:
                        break
            if bv == 1:
                break
        if best is None:
            break
        i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            done = True
            p = A[t][t]
            for i in range(t + 1, m):
                v = A[i][t]
                if v:
                    row_addmul(i, t, v // p)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                v = A[t][j]
                if v:
                    col_addmul(j, t, v // p)
                    if A[t][j]:
                        done = False
            if not done:
                # move the smallest nonzero of row/column t to the pivot
                best, bv = (t, t), abs(A[t][t])
                for i in range(t + 1, m):
                    v = A[i][t]
                    if v and abs(v) < bv:
                        best, bv = (i, t), abs(v)
                for j in range(t + 1, n):
                    v = A[t][j]
                    if v and abs(v) < bv:
                        best, bv = (t, j), abs(v)
                if best[0] != t:
                    row_swap(best[0], t)
                elif best[1] != t:
                    col_swap(best[1], t)
                continue
            # divisibility fix-up against the rest of the block
            p = A[t][t]
            bad = None
            for i in range(t + 1, m):
                row = A[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_addmul(t, bad, -1)  # row_t += row_bad
        if A[t][t] < 0:
            row_neg(t)
        diag.append(A[t][t])
        t += 1
    diag.extend([0] * (min(m, n) - len(diag)))
    return diag


def snf(M) -> tuple:
    """Smith normal form: returns ``(D, U, V)`` with ``U @ M @ V == D``."""
    M = _as_matrix(M)
    m, n = M.shape
    A = M.to_rows()
    U = _identity(m)
    V = _identity(n)
    _snf_rows(A, m, n, U, V)
    D = IntMatrix.from_rows(A, n)
    Um = IntMatrix.from_rows(U, m)
    Vm = IntMatrix.from_rows(V, n)
    if VERIFY_TRANSFORMS:
        if Um @ M @ Vm != D or abs(Um.det()) != 1 or abs(Vm.det()) != 1:
            raise LatticeError("internal: SNF transform check failed")
    return D, Um, Vm


def invariant_factors(M) -> list:
    """Diagonal of the Smith form (length ``min(m, n)``), no transforms."""
    A = as_rows(M)
    m = len(A)
    n = len(A[0]) if A else (M.cols if isinstance(M, IntMatrix) else 0)
    return _snf_rows(A, m, n, None, None)


def rank(M) -> int:
    A = as_rows(M)
    if not A:
        return 0
    return len(_hnf_rows(A, len(A[0])))


# --------------------------------------------------------------------------
# Finitely generated abelian groups


@dataclass(frozen=True)
class Presentation:
    """``Z^m / col(relations)`` with its canonical coordinates.

    ``projection`` (k x m) sends ambient vectors to canonical coordinates:
    the first ``t`` coordinates are read modulo the torsion factors, the rest
    are free. ``generators`` (m x k) holds lifts of the canonical generators.
    """

    relations: IntMatrix
    projection: IntMatrix
    generators: IntMatrix


@dataclass(frozen=True)
class FgAbGroup:
    rank: int
    invariant_factors: tuple = ()
    presentation: Optional[Presentation] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.rank < 0:
            raise LatticeError("negative rank")
        f = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", f)
        for d in f:
            if d < 2:
                raise LatticeError(f"invariant factor {d} < 2")
        for a, b in zip(f, f[1:]):
            if b % a:
                raise LatticeError(f"divisibility chain broken: {a} does not divide {b}")
        if self.presentation is not None:
            p = self.presentation
            got = cokernel_factors(p.relations)
            if got != (self.rank, f):
                raise LatticeError("presentation does not reproduce invariant factors")

    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0, ())

    @classmethod
    def free(cls, r: int) -> "FgAbGroup":
        return cls(r, ())

    @classmethod
    def from_orders(cls, orders: Sequence[int], rank: int = 0) -> "FgAbGroup":
        """Canonicalize ``Z^rank + sum Z/orders[i]`` (orders 0 count as Z)."""
        extra = sum(1 for d in orders if d == 0)
        fin = [abs(d) for d in orders if d != 0]
        facs = [d for d in invariant_factors(IntMatrix.diag(fin)) if d > 1] if fin else []
        return cls(rank + extra, tuple(facs))

    @property
    def order(self) -> Optional[int]:
        if self.rank:
            return None
        return reduce(lambda a, b: a * b, self.invariant_factors, 1)

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.invariant_factors

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    def torsion(self) -> "FgAbGroup":
        return FgAbGroup(0, self.invariant_factors)

    def direct_sum(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_orders(
            list(self.invariant_factors) + list(other.invariant_factors), self.rank + other.rank
        )

    def elementary_exponent(self) -> int:
        if self.rank:
            return 0
        return self.invariant_factors[-1] if self.invariant_factors else 1

    # element handling through the attached presentation
    def coordinates(self, v: Sequence[int]) -> tuple:
        """Canonical coordinates of an ambient vector (torsion part reduced)."""
        if self.presentation is None:
            raise LatticeError("group has no presentation")
        P = self.presentation.projection
        if P.cols != len(v):
            raise LatticeError("vector length does not match presentation")
        out = []
        t = len(self.invariant_factors)
        for i in range(P.rows):
            x = sum(a * b for a, b in zip(P.row(i), v))
            out.append(x % self.invariant_factors[i] if i < t else x)
        return tuple(out)

    def is_zero_element(self, v: Sequence[int]) -> bool:
        return not any(self.coordinates(v))

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        if not parts:
            return "0"
        # free part first reads more naturally
        if self.rank:
            parts = [parts[-1]] + parts[:-1]
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"rank": self.rank, "invariant_factors": list(self.invariant_factors), "string": str(self)}


def cokernel_factors(M) -> tuple:
    """``(rank, torsion factors)`` of ``Z^m / col(M)`` without transforms."""
    M = _as_matrix(M)
    m = M.rows
    if M.cols == 0 or m == 0:
        return (m, ())
    d = invariant_factors(M)
    nz = [x for x in d if x]
    return (m - len(nz), tuple(x for x in nz if x > 1))


def cokernel(M) -> FgAbGroup:
    """``Z^m / (column span of M)`` with presentation attached."""
    M = _as_matrix(M)
    m, n = M.shape
    A = M.to_rows()
    U = _identity(m)
    Uinv = _identity(m)
    diag = _snf_rows(A, m, n, U, None, Uinv)
    full = list(diag) + [0] * (m - len(diag))
    tors_idx = [i for i, d in enumerate(full) if d > 1]
    free_idx = [i for i, d in enumerate(full) if d == 0]
    keep = tors_idx + free_idx
    proj = IntMatrix.from_rows([U[i] for i in keep], m)
    gens = IntMatrix.from_rows([[Uinv[r][i] for i in keep] for r in range(m)], len(keep))
    if VERIFY_TRANSFORMS:
        Um = IntMatrix.from_rows(U, m)
        Ui = IntMatrix.from_rows(Uinv, m)
        if Um @ Ui != IntMatrix.identity(m):
            raise LatticeError("internal: cokernel transform inverse check failed")
    return FgAbGroup(
        len(free_idx),
        tuple(full[i] for i in tors_idx),
        Presentation(M, proj, gens),
    )


def pontryagin_dual(A: FgAbGroup) -> FgAbGroup:
    """``Hom(A, Q/Z)`` for finite ``A``; abstractly isomorphic to ``A``."""
    if A.rank:
        raise LatticeError(f"Pontryagin dual needs a finite group, got rank {A.rank}")
    return FgAbGroup(0, A.invariant_factors)


def iso_test(A: FgAbGroup, B: FgAbGroup) -> bool:
    return A.rank == B.rank and A.invariant_factors == B.invariant_factors


# --------------------------------------------------------------------------
# Lattices


def _solve_echelon(basis: Sequence[Sequence[int]], pivots: Sequence[int], v: Sequence[int]):
    """Coefficients of ``v`` in an echelon basis, or None if not in the Q-span.

    Coefficients are Fractions; integrality is the caller's concern.
    """
    rem = [Fraction(x) for x in v]
    coeffs = []
    for b, p in zip(basis, pivots):
        c = rem[p] / b[p]
        coeffs.append(c)
        if c:
            for j in range(p, len(rem)):
                if b[j]:
                    rem[j] -= c * b[j]
    if any(rem):
        return None
    return coeffs


@dataclass(frozen=True)
class Lattice:
    """Row span of integer vectors in ``Z^n``, stored as its HNF basis."""

    ambient_dim: int
    basis: tuple  # tuple of tuples, HNF rows

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]], ambient_dim: Optional[int] = None) -> "Lattice":
        vecs = [list(map(int, v)) for v in vectors]
        if ambient_dim is None:
            if not vecs:
                raise LatticeError("ambient dimension needed for an empty span")
            ambient_dim = len(vecs[0])
        for v in vecs:
            if len(v) != ambient_dim:
                raise LatticeError("vector length does not match ambient dimension")
        return cls(ambient_dim, tuple(hnf_basis(vecs, ambient_dim)))

    @classmethod
    def full(cls, n: int) -> "Lattice":
        return cls(n, tuple(tuple(r) for r in _identity(n)))

    @classmethod
    def zero(cls, n: int) -> "Lattice":
        return cls(n, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> list:
        out = []
        for b in self.basis:
            for j, x in enumerate(b):
                if x:
                    out.append(j)
                    break
        return out

    def coefficients(self, v: Sequence[int]) -> Optional[list]:
        """Integer coordinates of ``v`` in the stored basis, or None."""
        c = _solve_echelon(self.basis, self.pivots, v)
        if c is None or any(x.denominator != 1 for x in c):
            return None
        return [int(x) for x in c]

    def rational_coefficients(self, v: Sequence[int]) -> Optional[list]:
        return _solve_echelon(self.basis, self.pivots, v)

    def __contains__(self, v) -> bool:
        return self.coefficients(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(b in self for b in other.basis)

    def matrix(self) -> IntMatrix:
        return IntMatrix.from_rows(self.basis, self.ambient_dim)

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.span(list(self.basis) + list(other.basis), self.ambient_dim)

    def intersect(self, other: "Lattice") -> "Lattice":
        """Intersection via the kernel of ``[B1; -B2]^T``."""
        n = self.ambient_dim
        if not self.basis or not other.basis:
            return Lattice.zero(n)
        k1 = len(self.basis)
        stacked = [list(b) for b in self.basis] + [[-x for x in b] for b in other.basis]
        ker = kernel(IntMatrix.from_rows(stacked, n).T)
        vecs = [[sum(c[i] * self.basis[i][j] for i in range(k1)) for j in range(n)] for c in ker.basis]
        return Lattice.span(vecs, n)

    def index_in(self, other: "Lattice") -> int:
        """``[other : self]`` (0 if infinite); requires ``self <= other``."""
        return lattice_quotient(self, other).order or 0

    def is_saturated(self) -> bool:
        return saturation(self) == self


def kernel(M) -> Lattice:
    """Saturated lattice ``{x in Z^n : M x = 0}``."""
    M = _as_matrix(M)
    m, n = M.shape
    if n == 0:
        return Lattice.zero(0)
    A = M.T.to_rows()  # n x m
    U = _identity(n)
    piv = _hnf_rows(A, m, U)
    r = len(piv)
    return Lattice.span([U[i] for i in range(r, n)], n)


def left_kernel(M) -> Lattice:
    """``{y in Z^m : y M = 0}``."""
    return kernel(_as_matrix(M).T)


@dataclass(frozen=True)
class SaturationWitness:
    lattice: Lattice
    index: int


def saturation(L: Lattice, *, with_index: bool = False):
    """``(Q-span of L) cap Z^n``; optionally returns the index ``[sat : L]``."""
    n = L.ambient_dim
    if not L.basis:
        sat = L
    else:
        funcs = kernel(L.matrix())  # vectors orthogonal to L
        if funcs.basis:
            sat = kernel(funcs.matrix())
        else:
            sat = Lattice.full(n)
    if not with_index:
        return sat
    facs = [d for d in invariant_factors(L.matrix()) if d] if L.basis else []
    idx = reduce(lambda a, b: a * b, facs, 1)
    return SaturationWitness(sat, idx)


@dataclass(frozen=True)
class QuotientViolation:
    vector: tuple


def lattice_quotient(L0: Lattice, L1: Lattice) -> FgAbGroup:
    """``L1 / L0`` with presentation in the coordinates of L1's basis."""
    if L0.ambient_dim != L1.ambient_dim:
        raise LatticeError("ambient dimensions differ")
    coords = []
    for b in L0.basis:
        c = L1.coefficients(b)
        if c is None:
            raise LatticeError(f"L0 is not contained in L1: {list(b)} is not in L1", vector=tuple(b))
        coords.append(c)
    k1 = L1.rank
    if k1 == 0:
        return FgAbGroup.trivial()
    C = IntMatrix.from_rows(coords, k1) if coords else IntMatrix.zeros(0, k1)
    return cokernel(C.T)


def dual_lattice(L: Lattice, gram: Optional[Sequence[Sequence]] = None):
    """Rational basis of ``{x in Q-span : x G L subset Z}`` (standard form if no gram)."""
    B = [[Fraction(x) for x in b] for b in L.basis]
    k = len(B)
    if gram is None:
        G = [[sum(a * c for a, c in zip(B[i], B[j])) for j in range(k)] for i in range(k)]
    else:
        G = [[Fraction(x) for x in row] for row in gram]
    Ginv = rational_inverse(G)
    return [[sum(Ginv[i][l] * B[l][j] for l in range(k)) for j in range(L.ambient_dim)] for i in range(k)]


# --------------------------------------------------------------------------
# rational helpers


def rational_inverse(A: Sequence[Sequence]) -> list:
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            raise LatticeError("singular matrix")
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [row[n:] for row in M]


def unimodular_inverse(M) -> IntMatrix:
    """Inverse of a unimodular integer matrix (its HNF transform)."""
    M = _as_matrix(M)
    if M.rows != M.cols:
        raise LatticeError("inverse of non-square matrix")
    A = M.to_rows()
    U = _identity(M.rows)
    _hnf_rows(A, M.cols, U)
    if A != _identity(M.rows):
        raise LatticeError("matrix is not unimodular")
    return IntMatrix.from_rows(U, M.rows)


def solve_integer(M, b: Sequence[int]) -> Optional[list]:
    """Some integer ``x`` with ``M x = b``, or None."""
    M = _as_matrix(M)
    m, n = M.shape
    if n == 0:
        return [] if not any(b) else None
    A = M.to_rows()
    U = _identity(m)
    V = _identity(n)
    d = _snf_rows(A, m, n, U, V)
    c = [sum(U[i][j] * b[j] for j in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if c[i]:
                return None
        else:
            if c[i] % di:
                return None
            y[i] = c[i] // di
    return [sum(V[i][j] * y[j] for j in range(n)) for i in range(n)]


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else 0


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


# --------------------------------------------------------------------------
# rational lattices and morphisms


@dataclass(frozen=True)
class QLattice:
    """Lattice in ``Q^n``: ``(1/denominator) * integral``, with minimal denominator."""

    denominator: int
    integral: Lattice

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "QLattice":
        vecs = [[Fraction(x) for x in v] for v in vectors]
        d = 1
        for v in vecs:
            for x in v:
                d = lcm(d, x.denominator)
        L = Lattice.span([[int(x * d) for x in v] for v in vecs], ambient_dim)
        g = reduce(gcd, [x for b in L.basis for x in b], d)
        if g > 1:
            L = Lattice(ambient_dim, tuple(tuple(x // g for x in b) for b in L.basis))
            d //= g
        return cls(d, L)

    @property
    def rank(self) -> int:
        return self.integral.rank

    @property
    def ambient_dim(self) -> int:
        return self.integral.ambient_dim

    def basis(self) -> list:
        return [[Fraction(x, self.denominator) for x in b] for b in self.integral.basis]

    def __contains__(self, v) -> bool:
        w = [Fraction(x) * self.denominator for x in v]
        if any(x.denominator != 1 for x in w):
            return False
        return [int(x) for x in w] in self.integral

    def contains_lattice(self, other: "QLattice") -> bool:
        return all(v in self for v in other.basis())

    def to_json(self):
        return [[str(x) for x in b] for b in self.basis()]


@dataclass(frozen=True)
class GroupMorphism:
    """Homomorphism between presented groups, given on ambient generators."""

    domain: FgAbGroup
    codomain: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        dp, cp = self.domain.presentation, self.codomain.presentation
        if dp is None or cp is None:
            raise LatticeError("morphism needs presented groups")
        if self.matrix.shape != (cp.relations.rows, dp.relations.rows):
            raise LatticeError("morphism matrix has wrong shape")
        image = self.matrix @ dp.relations
        for j in range(image.cols):
            if not self.codomain.is_zero_element(image.col(j)):
                raise LatticeError("matrix does not respect the domain relations")

    def __call__(self, v: Sequence[int]) -> tuple:
        w = [sum(a * b for a, b in zip(self.matrix.row(i), v)) for i in range(self.matrix.rows)]
        return self.codomain.coordinates(w)

    def cokernel_group(self) -> FgAbGroup:
        """Codomain modulo the image."""
        cp = self.codomain.presentation
        cols = cp.relations.T.to_rows() + self.matrix.T.to_rows()
        if not cols:
            return cokernel(cp.relations)
        return cokernel(IntMatrix.from_rows(cols, cp.relations.rows).T)

    def is_surjective(self) -> bool:
        return self.cokernel_group().is_trivial
