"""Exact linear algebra over Z, GF(2) and Q used by the cohomology engine.

The Smith form keeps all four transforms: ``L @ A @ R == S`` with ``Linv``
and ``Rinv`` the exact inverses.  Arithmetic runs in int64 and silently
switches to Python integers (object arrays) if entries grow.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

__all__ = [
    "SmithForm",
    "smith_form",
    "FieldForm",
    "gf2_form",
    "rank_rational",
    "sparse_rank_rational",
    "solve_mod_integers",
    "kernel_basis",
]

_GUARD = 1 << 30


def _as_int(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return a.copy()
    return a.astype(np.int64, copy=True)


def _maybe_promote(*arrs):
    if arrs[0].dtype == object:
        return arrs
    if any(x.size and np.abs(x).max() > _GUARD for x in arrs):
        return tuple(x.astype(object) for x in arrs)
    return arrs


@dataclass
class SmithForm:
    """``L @ A @ R == diag(d_0, ..., d_{r-1}, 0, ...)`` with d_i | d_{i+1}."""

    L: np.ndarray | None
    Linv: np.ndarray | None
    R: np.ndarray | None
    Rinv: np.ndarray | None
    diag: list[int]
    shape: tuple[int, int]

    @property
    def rank(self) -> int:
        return len(self.diag)

    def torsion(self) -> list[int]:
        return [d for d in self.diag if d > 1]


def smith_form(A, transforms: bool | str = True) -> SmithForm:
    """Smith form of an integer matrix.

    ``transforms="right"`` keeps only R and Rinv (L and Linv come back as
    None), which saves most of the work for tall matrices.
    """
    A = _as_int(A)
    if A.ndim != 2:
        raise ValueError("matrix expected")
    m, n = A.shape
    eye = np.eye
    right_only = transforms == "right"
    if right_only:
        # zero-width stand-ins let the row operations below run unchanged
        L = np.zeros((m, 0), dtype=np.int64)
        Linv = np.zeros((0, m), dtype=np.int64)
    else:
        L = eye(m, dtype=np.int64) if transforms else np.zeros((0, 0), dtype=np.int64)
        Linv = eye(m, dtype=np.int64) if transforms else np.zeros((0, 0), dtype=np.int64)
    R = eye(n, dtype=np.int64) if transforms else np.zeros((0, 0), dtype=np.int64)
    Rinv = eye(n, dtype=np.int64) if transforms else np.zeros((0, 0), dtype=np.int64)
    if A.dtype == object:
        L, Linv, R, Rinv = (x.astype(object) for x in (L, Linv, R, Rinv))
    diag: list[int] = []
    t = 0
    while t < min(m, n):
        sub = A[t:, t:]
        nz = np.argwhere(sub != 0)
        if nz.size == 0:
            break
        if sub.dtype == object:
            vals = np.abs(np.array([sub[i, j] for i, j in nz], dtype=object))
        else:
            vals = np.abs(sub[nz[:, 0], nz[:, 1]])
        k = int(np.argmin(vals))
        pi, pj = int(nz[k][0]) + t, int(nz[k][1]) + t
        # move pivot to (t, t)
        if pi != t:
            A[[t, pi]] = A[[pi, t]]
            if transforms:
                L[[t, pi]] = L[[pi, t]]
                Linv[:, [t, pi]] = Linv[:, [pi, t]]
        if pj != t:
            A[:, [t, pj]] = A[:, [pj, t]]
            if transforms:
                R[:, [t, pj]] = R[:, [pj, t]]
                Rinv[[t, pj]] = Rinv[[pj, t]]
        while True:
            p = A[t, t]
            col = A[t + 1 :, t]
            row = A[t, t + 1 :]
            big = False
            if col.size and col.any():
                q = _floordiv(col, p)
                ix = np.nonzero(q)[0]
                q = q[ix]
                ix = ix + t + 1
                A[ix] -= np.outer(q, A[t])
                if transforms:
                    L[ix] -= np.outer(q, L[t])
                    Linv[:, t] += Linv[:, ix] @ q
                    big = big or _big(L[ix]) or _big(Linv[:, t])
                big = big or _big(A[ix])
            if row.size and row.any():
                q = _floordiv(A[t, t + 1 :], p)
                jx = np.nonzero(q)[0]
                q = q[jx]
                jx = jx + t + 1
                A[:, jx] -= np.outer(A[:, t], q)
                if transforms:
                    R[:, jx] -= np.outer(R[:, t], q)
                    Rinv[t] += q @ Rinv[jx]
                    big = big or _big(R[:, jx]) or _big(Rinv[t])
                big = big or _big(A[:, jx])
            if big:
                if transforms:
                    A, L, Linv, R, Rinv = _maybe_promote(A, L, Linv, R, Rinv)
                else:
                    (A,) = _maybe_promote(A)
            col = A[t + 1 :, t]
            row = A[t, t + 1 :]
            if (col.size and col.any()) or (row.size and row.any()):
                # remainders left: bring the smallest one to the pivot
                cand = [(abs(A[i, t]), i, t) for i in range(t + 1, m) if A[i, t] != 0]
                cand += [(abs(A[t, j]), t, j) for j in range(t + 1, n) if A[t, j] != 0]
                _, i, j = min(cand)
                if i != t:
                    A[[t, i]] = A[[i, t]]
                    if transforms:
                        L[[t, i]] = L[[i, t]]
                        Linv[:, [t, i]] = Linv[:, [i, t]]
                else:
                    A[:, [t, j]] = A[:, [j, t]]
                    if transforms:
                        R[:, [t, j]] = R[:, [j, t]]
                        Rinv[[t, j]] = Rinv[[j, t]]
                continue
            # divisibility of the remaining block
            p = A[t, t]
            rest = A[t + 1 :, t + 1 :]
            bad = np.argwhere(_mod(rest, p) != 0) if rest.size and abs(p) != 1 else np.zeros((0, 2))
            if len(bad):
                i = int(bad[0][0]) + t + 1
                A[t] += A[i]
                if transforms:
                    L[t] += L[i]
                    Linv[:, i] -= Linv[:, t]
                if _big(A[t]) or (transforms and (_big(L[t]) or _big(Linv[:, i]))):
                    if transforms:
                        A, L, Linv, R, Rinv = _maybe_promote(A, L, Linv, R, Rinv)
                    else:
                        (A,) = _maybe_promote(A)
                continue
            break
        if A[t, t] < 0:
            A[t] = -A[t]
            if transforms:
                L[t] = -L[t]
                Linv[:, t] = -Linv[:, t]
        diag.append(int(A[t, t]))
        t += 1
    if not transforms:
        L = Linv = R = Rinv = None
    elif right_only:
        L = Linv = None
    return SmithForm(L, Linv, R, Rinv, diag, (m, n))


def _big(x) -> bool:
    return x.dtype != object and x.size > 0 and int(np.abs(x).max()) > _GUARD


def _floordiv(v, p):
    if v.dtype == object:
        return np.array([x // p for x in v], dtype=object)
    return v // p


def _mod(v, p):
    if v.dtype == object:
        return np.vectorize(lambda x: x % p, otypes=[object])(v) if v.size else v
    return v % p


@dataclass
class FieldForm:
    """Reduction over GF(2): ``L @ A @ R == diag(1,..,1,0,..) (mod 2)``."""

    L: np.ndarray
    Linv: np.ndarray
    R: np.ndarray
    Rinv: np.ndarray
    rank: int
    shape: tuple[int, int]


def gf2_form(A) -> FieldForm:
    A = np.asarray(A, dtype=np.int64) % 2
    A = A.astype(np.uint8)
    m, n = A.shape
    L = np.eye(m, dtype=np.uint8)
    Linv = np.eye(m, dtype=np.uint8)
    R = np.eye(n, dtype=np.uint8)
    Rinv = np.eye(n, dtype=np.uint8)
    r = 0
    while r < min(m, n):
        nz = np.argwhere(A[r:, r:])
        if nz.size == 0:
            break
        pi, pj = int(nz[0][0]) + r, int(nz[0][1]) + r
        if pi != r:
            A[[r, pi]] = A[[pi, r]]
            L[[r, pi]] = L[[pi, r]]
            Linv[:, [r, pi]] = Linv[:, [pi, r]]
        if pj != r:
            A[:, [r, pj]] = A[:, [pj, r]]
            R[:, [r, pj]] = R[:, [pj, r]]
            Rinv[[r, pj]] = Rinv[[pj, r]]
        rows = np.nonzero(A[:, r])[0]
        rows = rows[rows != r]
        if rows.size:
            A[rows] ^= A[r]
            L[rows] ^= L[r]
            # inverse update: col r += sum of cols in rows
            Linv[:, r] ^= (Linv[:, rows].sum(axis=1) % 2).astype(np.uint8)
        cols = np.nonzero(A[r])[0]
        cols = cols[cols != r]
        if cols.size:
            A[:, cols] ^= A[:, [r]]
            R[:, cols] ^= R[:, [r]]
            Rinv[r] ^= (Rinv[cols].sum(axis=0) % 2).astype(np.uint8)
        r += 1
    return FieldForm(L, Linv, R, Rinv, r, (m, n))


_PRIMES = (2147483647, 2147483629)


def _rank_mod(A: np.ndarray, p: int) -> int:
    M = np.asarray(A, dtype=object)
    M = np.array([[int(x) % p for x in row] for row in M], dtype=np.int64) if M.size else np.zeros(A.shape, np.int64)
    m, n = M.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = np.nonzero(M[r:, c])[0]
        if piv.size == 0:
            continue
        i = int(piv[0]) + r
        if i != r:
            M[[r, i]] = M[[i, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r] = (M[r] * inv) % p
        rows = np.nonzero(M[:, c])[0]
        rows = rows[rows != r]
        if rows.size:
            f = M[rows, c].copy()
            # entries < p < 2^31 so the products fit in int64
            M[rows] = (M[rows] - (f[:, None] * M[r][None, :]) % p) % p
        r += 1
    return r


def rank_rational(A) -> int:
    """Rank over Q.

    Small matrices go through the exact Smith form; large ones use
    elimination modulo two 31-bit primes (the rank mod p never exceeds the
    rational rank and equals it for all but finitely many p).
    """
    A = np.asarray(A)
    if A.size == 0:
        return 0
    if A.shape[0] * A.shape[1] <= 40000:
        return smith_form(A, transforms=False).rank
    return max(_rank_mod(A, p) for p in _PRIMES)


def sparse_rank_rational(rows: list[dict[int, int]]) -> int:
    """Exact rank of a sparse integer matrix given as ``{col: value}`` rows."""
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for row in rows:
        r = dict(row)
        while r:
            c = min(r)
            if c not in pivots:
                g = 0
                for v in r.values():
                    g = gcd(g, v)
                pivots[c] = {k: v // g for k, v in r.items()}
                rank += 1
                break
            p = pivots[c]
            a, b = p[c], r[c]
            # r <- a*r - b*p clears column c
            new = {k: a * v for k, v in r.items()}
            for k, v in p.items():
                new[k] = new.get(k, 0) - b * v
            r = {k: v for k, v in new.items() if v}
            if r:
                g = 0
                for v in r.values():
                    g = gcd(g, v)
                r = {k: v // g for k, v in r.items()}
    return rank


def solve_mod_integers(snf: SmithForm, c) -> list[Fraction] | None:
    """Rational u with A u - c integral, using a Smith form of A; None if impossible."""
    L, R = snf.L, snf.R
    c = [Fraction(x) for x in c]
    m, n = snf.shape
    y = [sum((Fraction(int(L[i, k])) * c[k] for k in range(m) if L[i, k] != 0), Fraction(0)) for i in range(m)]
    r = snf.rank
    for i in range(r, m):
        if y[i].denominator != 1:
            return None
    w = [Fraction(0)] * n
    for i in range(r):
        w[i] = y[i] / snf.diag[i]
    return [sum((int(R[j, i]) * w[i] for i in range(r) if R[j, i] != 0), Fraction(0)) for j in range(n)]


def kernel_basis(A) -> np.ndarray:
    """Columns spanning the integer kernel of A (a saturated lattice)."""
    A = np.asarray(A)
    snf = smith_form(A)
    return snf.R[:, snf.rank :]
