"""Slow, independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


def det_fraction(M):
    n = len(M)
    A = [[Fraction(x) for x in r] for r in M]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            return 0
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return int(d)


def rank_fraction(M):
    if not M or not M[0]:
        return 0
    A = [[Fraction(x) for x in r] for r in M]
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c] / A[r][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
        if r == m:
            break
    return r


def determinantal_divisors(M):
    """``d_k`` = gcd of all k x k minors, for k up to the rank."""
    m = len(M)
    n = len(M[0]) if M else 0
    r = rank_fraction(M)
    out = []
    for k in range(1, r + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, det_fraction([[M[i][j] for j in cols] for i in rows]))
                if g == 1:
                    break
            if g == 1:
                break
        out.append(g)
    return out


def smith_diagonal_minors(M):
    """Invariant factors (nonzero ones) from determinantal divisors."""
    dd = determinantal_divisors(M)
    prev = 1
    out = []
    for d in dd:
        out.append(d // prev)
        prev = d
    return out


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf_bezout(M):
    """Row HNF via Bezout 2x2 row operations (textbook method)."""
    A = [list(r) for r in M]
    m = len(A)
    n = len(A[0]) if A else 0
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            a, b = A[r][c], A[i][c]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            # [x y; -b/g a/g] has determinant 1
            ra, rb = A[r], A[i]
            A[r] = [x * p + y * q for p, q in zip(ra, rb)]
            A[i] = [(-b // g) * p + (a // g) * q for p, q in zip(ra, rb)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        p = A[r][c]
        for i in range(r):
            q = A[i][c] // p
            A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
    return A


def brute_kernel_vectors(M, bound=3):
    """All integer x with |x_i| <= bound and M x = 0."""
    n = len(M[0])
    out = []
    for x in itertools.product(range(-bound, bound + 1), repeat=n):
        if all(sum(a * b for a, b in zip(row, x)) == 0 for row in M):
            out.append(x)
    return out


def snf_elementary(M):
    """Nonzero invariant factors by repeated min-pivot elementary operations."""
    A = [list(r) for r in M]
    m = len(A)
    n = len(A[0]) if A else 0
    out = []
    t = 0
    while t < min(m, n):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        p = A[t][t]
        clean = True
        for i in range(t + 1, m):
            q = A[i][t] // p
            A[i] = [a - q * b for a, b in zip(A[i], A[t])]
            clean &= A[i][t] == 0
        for j in range(t + 1, n):
            q = A[t][j] // p
            for row in A:
                row[j] -= q * row[t]
            clean &= A[t][j] == 0
        if not clean:
            continue
        bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
        if bad is not None:
            # fold the offending row in so the pivot must shrink
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
            continue
        out.append(abs(p))
        t += 1
    return out
