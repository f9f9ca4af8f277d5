"""Small helpers for matrices whose entries are exact scalars (object arrays)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .numbers import Exact

__all__ = ["as_object", "exact_inverse", "exact_det", "is_exact_matrix", "conj", "to_complex", "max_abs"]


def is_exact_matrix(a) -> bool:
    a = np.asarray(a)
    if a.dtype == object:
        return all(isinstance(x, (int, Fraction, Exact)) for x in a.flat)
    return np.issubdtype(a.dtype, np.integer)


def as_object(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return a
    if np.issubdtype(a.dtype, np.integer):
        out = np.empty(a.shape, dtype=object)
        for idx, v in np.ndenumerate(a):
            out[idx] = int(v)
        return out
    raise TypeError("floating matrix cannot be made exact")


def conj(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        out = np.empty(a.shape, dtype=object)
        for idx, v in np.ndenumerate(a):
            out[idx] = v.conjugate() if isinstance(v, Exact) else v
        return out
    return np.conj(a)


def to_complex(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return np.vectorize(complex, otypes=[complex])(a) if a.size else a.astype(complex)
    return a.astype(complex)


def max_abs(a) -> float:
    a = to_complex(a)
    return float(np.max(np.abs(a), initial=0.0))


def exact_inverse(a) -> np.ndarray:
    """Gauss-Jordan inverse over Q(sqrt2, i)."""
    a = as_object(a)
    n = a.shape[0]
    m = [[a[i, j] for j in range(n)] + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p if isinstance(x, Exact) or isinstance(p, Exact) else Fraction(x) / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = _simplify(m[i][n + j])
    return out


def exact_det(a):
    a = as_object(a)
    n = a.shape[0]
    m = [[a[i, j] for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        p = m[col][col]
        det = det * p
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] / p if isinstance(p, Exact) or isinstance(m[r][col], Exact) else Fraction(m[r][col]) / p
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return _simplify(det)


def _simplify(x):
    if isinstance(x, Exact) and x.is_rational():
        x = x.a
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x
