"""Independent reference computations used by the tests.

Nothing here imports the package; each oracle is a textbook construction
written separately so agreement is evidence rather than a tautology.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
import sympy
from sympy.matrices.normalforms import invariant_factors


# -- twisted group cohomology through the inhomogeneous bar resolution ---------------------


def bar_coboundary(table, signs, p):
    """Integer matrix of d: C^p(G, Z_sign) -> C^{p+1}(G, Z_sign), C^p = maps G^p -> Z.

    (df)(g1..g_{p+1}) = g1.f(g2..) + sum_i (-1)^i f(.., g_i g_{i+1}, ..) + (-1)^{p+1} f(g1..g_p)
    """
    n = len(table)
    cols = list(itertools.product(range(n), repeat=p))
    col = {c: k for k, c in enumerate(cols)}
    rows = list(itertools.product(range(n), repeat=p + 1))
    D = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, g in enumerate(rows):
        D[r, col[g[1:]]] += signs[g[0]]
        for i in range(p):
            merged = g[:i] + (table[g[i]][g[i + 1]],) + g[i + 2 :]
            D[r, col[merged]] += (-1) ** (i + 1)
        D[r, col[g[:-1]]] += (-1) ** (p + 1)
    return D


def _nonunit_factors(D):
    if D.size == 0:
        return [], 0
    M = sympy.Matrix(D.tolist())
    facs = [abs(int(f)) for f in invariant_factors(M) if f != 0]
    return sorted(f for f in facs if f != 1), len(facs)


@lru_cache(maxsize=None)
def bar_cohomology_z(table, signs, p):
    """(torsion factors, free rank) of H^p(G, Z_sign)."""
    n = len(table)
    d_p = bar_coboundary(table, signs, p)
    _, rank_p = _nonunit_factors(d_p)
    if p == 0:
        return [], n**0 - rank_p
    d_prev = bar_coboundary(table, signs, p - 1)
    tors, rank_prev = _nonunit_factors(d_prev)
    return tors, n**p - rank_p - rank_prev


def rank_mod2(D):
    A = (np.asarray(D) % 2).astype(np.uint8)
    r = 0
    rows, cols = A.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        r += 1
    return r


def bar_cohomology_z2_dim(table, p):
    """dim over F2 of H^p(G, Z/2)."""
    n = len(table)
    ones = (1,) * n
    rank_p = rank_mod2(bar_coboundary(table, ones, p))
    rank_prev = rank_mod2(bar_coboundary(table, ones, p - 1)) if p > 0 else 0
    return n**p - rank_p - rank_prev


def brute_force_point_circle_cocycles(table, signs, denom):
    """All maps phi: G -> (1/denom)Z/Z with phi(gh) = phi(g) + sign(g) phi(h)."""
    from fractions import Fraction

    n = len(table)
    out = []
    for vals in itertools.product(range(denom), repeat=n):
        phi = [Fraction(v, denom) for v in vals]
        ok = all((phi[table[g][h]] - phi[g] - signs[g] * phi[h]) % 1 == 0 for g in range(n) for h in range(n))
        if ok:
            out.append(tuple(phi))
    return out


# -- Clifford algebra ------------------------------------------------------------------------


def blade_product(a: tuple, b: tuple):
    """Product of basis blades given as increasing index tuples: (sign, blade).

    Concatenate, bubble-sort counting swaps, cancel equal neighbours with e_i^2 = -1.
    """
    word = list(a) + list(b)
    sign = 1
    changed = True
    while changed:
        changed = False
        for k in range(len(word) - 1):
            if word[k] > word[k + 1]:
                word[k], word[k + 1] = word[k + 1], word[k]
                sign = -sign
                changed = True
    out = []
    for i in word:
        if out and out[-1] == i:
            out.pop()
            sign = -sign
        else:
            out.append(i)
    return sign, tuple(out)


def jordan_wigner(n: int):
    """Complex matrices E_1..E_n with E_i^2 = -1 and E_iE_j = -E_jE_i, faithful on Cl^c_n for even n."""
    m = (n + 1) // 2
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    Z = np.diag([1, -1]).astype(complex)
    I2 = np.eye(2, dtype=complex)
    mats = []
    for k in range(2 * m):
        site, which = divmod(k, 2)
        factors = [Z] * site + [X if which == 0 else Y] + [I2] * (m - site - 1)
        M = factors[0]
        for f in factors[1:]:
            M = np.kron(M, f)
        mats.append(1j * M)
    return mats[:n]


def commutant_dimension_svd(matrices, tol=1e-9):
    """dim {M : M A = A M for all A} from the null space of the stacked Sylvester operators."""
    d = matrices[0].shape[0]
    eye = np.eye(d)
    blocks = [np.kron(eye, A) - np.kron(A.T, eye) for A in matrices]
    S = np.linalg.svd(np.vstack(blocks).astype(complex), compute_uv=False)
    return int(np.sum(S < tol * max(1.0, S[0])))


# -- lattice Dirac -------------------------------------------------------------------------


def central_difference_spectrum(d: int, N: int):
    """Eigenvalues of sum_mu E_mu (T_mu - T_mu^-1)/2 on (Z/N)^d with fibre Cl^c_d (left regular).

    Block-diagonalise by plane waves: T_mu -> exp(i k_mu), so each momentum
    contributes the eigenvalues of i sum_mu sin(k_mu) E_mu, repeated to fill the fibre.
    """
    E = jordan_wigner(d if d % 2 == 0 else d + 1)[:d]
    rep = E[0].shape[0]
    copies = (1 << d) // rep
    out = []
    for k in itertools.product(range(N), repeat=d):
        sym = sum(1j * np.sin(2 * np.pi * kk / N) * E[mu] for mu, kk in enumerate(k))
        ev = np.linalg.eigvals(sym)
        out.extend(list(ev.real) * copies)
    return np.sort(np.array(out))
