"""Clifford algebras Cl_n (e_i^2 = -1) and their complexifications.

Blades are bitmasks: bit k-1 set means e_k is a factor, and the blade is the
increasing product of its factors.  Coefficients are exact scalars (int,
Fraction, Exact) or floats/complex; a multivector mixing both is floating.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, NotComplexified, NotGrade1
from .numbers import Exact, format_scalar, is_exact, parse_scalar

__all__ = [
    "FLOAT_TOL",
    "MultiVector",
    "blade_sign",
    "clifford_mul",
    "kappa_eps",
    "e",
    "scalar",
    "vector",
    "GammaRep",
    "build_gamma_rep",
    "commutant_dimension",
]

FLOAT_TOL = 1e-9


def _popcount(x: int) -> int:
    return bin(x).count("1")


@lru_cache(maxsize=1 << 16)
def blade_sign(a: int, b: int) -> int:
    """Sign of e_A e_B relative to e_{A xor B}."""
    swaps = 0
    s = a >> 1
    while s:
        swaps += _popcount(s & b)
        s >>= 1
    # each shared generator contributes e_i^2 = -1
    swaps += _popcount(a & b)
    return -1 if swaps & 1 else 1


def _simplify(c):
    if isinstance(c, Exact) and c.is_rational():
        c = c.a
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def _blade_from_indices(idx) -> tuple[int, int]:
    """Bitmask and sign of the product e_{i1}...e_{ik} in the given order."""
    mask, sign = 0, 1
    for i in idx:
        b = 1 << (i - 1)
        sign *= blade_sign(mask, b)
        mask ^= b
    return mask, sign


def _blade_str(mask: int) -> str:
    if mask == 0:
        return ""
    return "^".join(f"e{k + 1}" for k in range(mask.bit_length()) if mask >> k & 1)


class MultiVector:
    """An element of Cl_n, or of Cl^c_n when ``complexified``.

    Immutable; ``terms`` maps blade bitmask to a non-zero coefficient.
    """

    __slots__ = ("n", "terms", "complexified", "_hash")

    def __init__(self, n: int, terms=None, complexified: bool = False):
        if n < 0:
            raise ValueError("dimension must be non-negative")
        self.n = int(n)
        self.complexified = bool(complexified)
        clean = {}
        for mask, c in (terms or {}).items():
            if mask >> n:
                raise DimensionMismatch(f"blade {_blade_str(mask)} outside Cl_{n}")
            c = _simplify(c)
            if c == 0:
                continue
            if not complexified and _has_imag(c):
                raise NotComplexified("imaginary coefficient in a real multivector")
            clean[mask] = c
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def scalar(cls, n, c=1, complexified=False):
        return cls(n, {0: c}, complexified)

    @classmethod
    def basis(cls, n, *idx, complexified=False):
        mask, sign = _blade_from_indices(idx)
        return cls(n, {mask: sign}, complexified)

    @classmethod
    def from_vector(cls, n, coeffs, complexified=False):
        if len(coeffs) != n:
            raise DimensionMismatch(f"vector of length {len(coeffs)} in Cl_{n}")
        return cls(n, {1 << k: c for k, c in enumerate(coeffs)}, complexified)

    # -- structure ----------------------------------------------------
    def _check(self, other: "MultiVector"):
        if self.n != other.n:
            raise DimensionMismatch(f"Cl_{self.n} vs Cl_{other.n}")

    def _coerce(self, other):
        if isinstance(other, MultiVector):
            self._check(other)
            return other
        return MultiVector(self.n, {0: other}, self.complexified or _has_imag(other))

    @property
    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.terms.values())

    def grades(self) -> set[int]:
        return {_popcount(m) for m in self.terms}

    def grade(self, k: int) -> "MultiVector":
        return MultiVector(self.n, {m: c for m, c in self.terms.items() if _popcount(m) == k}, self.complexified)

    def is_even(self) -> bool:
        return all(_popcount(m) % 2 == 0 for m in self.terms)

    def coefficient(self, *idx):
        mask, sign = _blade_from_indices(idx)
        return sign * self.terms.get(mask, 0)

    def scalar_part(self):
        return self.terms.get(0, 0)

    def to_vector(self) -> list:
        if any(_popcount(m) != 1 for m in self.terms):
            raise NotGrade1("multivector is not a vector")
        return [self.terms.get(1 << k, 0) for k in range(self.n)]

    def complexify(self) -> "MultiVector":
        return MultiVector(self.n, self.terms, True)

    # -- algebra ------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        terms = dict(self.terms)
        for m, c in o.terms.items():
            terms[m] = terms.get(m, 0) + c
        return MultiVector(self.n, terms, self.complexified or o.complexified)

    __radd__ = __add__

    def __neg__(self):
        return MultiVector(self.n, {m: -c for m, c in self.terms.items()}, self.complexified)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, MultiVector):
            return clifford_mul(self, other)
        cplx = self.complexified or _has_imag(other)
        return MultiVector(self.n, {m: c * other for m, c in self.terms.items()}, cplx)

    def __rmul__(self, other):
        cplx = self.complexified or _has_imag(other)
        return MultiVector(self.n, {m: other * c for m, c in self.terms.items()}, cplx)

    def __truediv__(self, other):
        if isinstance(other, MultiVector):
            raise TypeError("divide by a multivector via .inverse()")
        if isinstance(other, int):
            other = Fraction(other)
        return MultiVector(self.n, {m: c / other for m, c in self.terms.items()}, self.complexified)

    def __pow__(self, k: int):
        out = MultiVector.scalar(self.n, 1, self.complexified)
        for _ in range(k):
            out = out * self
        return out

    def reverse(self) -> "MultiVector":
        """The anti-automorphism reversing the order of generators."""
        out = {}
        for m, c in self.terms.items():
            k = _popcount(m)
            out[m] = -c if (k * (k - 1) // 2) % 2 else c
        return MultiVector(self.n, out, self.complexified)

    def involute(self) -> "MultiVector":
        """Grade involution e_i -> -e_i."""
        return MultiVector(self.n, {m: (-c if _popcount(m) % 2 else c) for m, c in self.terms.items()}, self.complexified)

    def conj_coefficients(self) -> "MultiVector":
        return MultiVector(self.n, {m: _conj(c) for m, c in self.terms.items()}, self.complexified)

    def norm_sq(self):
        """Sum of squared absolute values of coefficients."""
        tot = 0
        for c in self.terms.values():
            tot = tot + c * _conj(c)
        return _simplify(tot)

    def embed(self, n: int, shift: int = 0) -> "MultiVector":
        """Image under Cl_m -> Cl_n, e_k -> e_{k+shift}."""
        if self.n + shift > n:
            raise DimensionMismatch(f"cannot embed Cl_{self.n} into Cl_{n} with shift {shift}")
        return MultiVector(n, {m << shift: c for m, c in self.terms.items()}, self.complexified)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, MultiVector):
            if isinstance(other, (int, Fraction, Exact, float, complex)):
                other = MultiVector.scalar(self.n, other, self.complexified)
            else:
                return NotImplemented
        if self.n != other.n:
            return False
        if self.is_exact and other.is_exact:
            return self.terms == other.terms
        return self.distance(other) <= FLOAT_TOL

    def __hash__(self):
        if not self.is_exact:
            raise TypeError("floating multivectors are not hashable")
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def key(self):
        return (self.n, tuple(sorted(self.terms.items(), key=lambda t: t[0])))

    def distance(self, other: "MultiVector") -> float:
        self._check(other)
        masks = set(self.terms) | set(other.terms)
        if not masks:
            return 0.0
        return max(abs(complex(self.terms.get(m, 0)) - complex(other.terms.get(m, 0))) for m in masks)

    def to_float(self) -> "MultiVector":
        conv = complex if self.complexified else float
        return MultiVector(self.n, {m: conv(c) for m, c in self.terms.items()}, self.complexified)

    def as_array(self) -> np.ndarray:
        """Dense coefficient vector of length 2^n indexed by bitmask."""
        out = np.zeros(1 << self.n, dtype=complex if self.complexified else float)
        for m, c in self.terms.items():
            out[m] = complex(c) if self.complexified else float(c)
        return out

    @classmethod
    def from_array(cls, n, arr, complexified=None):
        arr = np.asarray(arr)
        if complexified is None:
            complexified = np.iscomplexobj(arr)
        return cls(n, {m: arr[m] for m in range(1 << n) if arr[m] != 0}, complexified)

    # -- text ---------------------------------------------------------
    def __str__(self):
        return format_multivector(self)

    def __repr__(self):
        tag = "Clc" if self.complexified else "Cl"
        return f"MultiVector[{tag}_{self.n}]({self})"


def _has_imag(c) -> bool:
    if isinstance(c, Exact):
        return not c.is_real()
    if isinstance(c, complex):
        return c.imag != 0
    return False


def _conj(c):
    if isinstance(c, (Exact, complex)):
        return c.conjugate()
    return c


def clifford_mul(a: MultiVector, b: MultiVector) -> MultiVector:
    """Geometric product in Cl_n: e_i^2 = -1, e_i e_j = -e_j e_i."""
    a._check(b)
    out: dict[int, object] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            m = ma ^ mb
            v = ca * cb
            if blade_sign(ma, mb) < 0:
                v = -v
            out[m] = out.get(m, 0) + v
    return MultiVector(a.n, out, a.complexified or b.complexified)


def kappa_eps(gamma, a: MultiVector, group=None) -> MultiVector:
    """Coefficientwise complex conjugation when eps(gamma) = -1.

    With ``group`` given, ``gamma`` is an element id; otherwise it is the
    sign eps(gamma) itself.
    """
    if not a.complexified:
        raise NotComplexified("kappa_eps acts on complexified multivectors")
    sign = group.eps(gamma) if group is not None else int(gamma)
    if sign == 1:
        return a
    if sign != -1:
        raise ValueError("eps values are +1 or -1")
    return a.conj_coefficients()


def e(n: int, *idx, complexified=False) -> MultiVector:
    """Basis blade e_{i1}...e_{ik} of Cl_n (1-based indices, any order)."""
    return MultiVector.basis(n, *idx, complexified=complexified)


def scalar(n: int, c=1, complexified=False) -> MultiVector:
    return MultiVector.scalar(n, c, complexified)


def vector(n: int, coeffs, complexified=False) -> MultiVector:
    return MultiVector.from_vector(n, coeffs, complexified)


# -- text format ---------------------------------------------------------

_BLADE = re.compile(r"e(\d+)((?:\^e\d+)*)")


def format_multivector(a: MultiVector) -> str:
    if not a.terms:
        return "0"
    parts = []
    for mask in sorted(a.terms, key=lambda m: (_popcount(m), m)):
        c = a.terms[mask]
        blade = _blade_str(mask)
        neg = False
        if isinstance(c, (int, Fraction, float)) and c < 0:
            neg, c = True, -c
        elif isinstance(c, Exact) and sum(x != 0 for x in (c.a, c.b, c.c, c.d)) == 1:
            lead = next(x for x in (c.a, c.b, c.c, c.d) if x != 0)
            if lead < 0:
                neg, c = True, -c
        if isinstance(c, complex):
            cs = f"({c.real!r}{c.imag:+}*i)"
        elif isinstance(c, float):
            cs = repr(c)
        else:
            cs = format_scalar(c)
            if " " in cs:
                cs = f"({cs})"
        if blade:
            body = blade if cs == "1" else f"{cs} {blade}"
        else:
            body = cs
        parts.append(("-" if neg else "+", body))
    sgn0, body0 = parts[0]
    out = ("-" if sgn0 == "-" else "") + body0
    for sgn, body in parts[1:]:
        out += f" {sgn} {body}"
    return out


def _split_top(s: str) -> list[str]:
    """Split on +/- at paren depth 0, keeping signs; ignores exponent signs."""
    terms, depth, cur = [], 0, ""
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip() and not re.search(r"\d[eE]$", cur.rstrip()):
            terms.append(cur)
            cur = ch
        else:
            cur += ch
        i += 1
    if cur.strip():
        terms.append(cur)
    return terms


def parse_multivector(text: str, n: int | None = None, complexified: bool | None = None) -> MultiVector:
    """Parse e.g. ``"1.5 e1^e2 - e3"`` or ``"(1/2 + 1/2*i) e1 + sqrt2"``.

    ``n`` defaults to the largest generator index present.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty multivector")
    terms = {}
    maxidx = 0
    cplx = False
    for raw in _split_top(s):
        t = raw.strip()
        sign = 1
        while t and t[0] in "+-":
            if t[0] == "-":
                sign = -sign
            t = t[1:].strip()
        m = re.search(r"(e\d+(?:\s*\^\s*e\d+)*)\s*$", t)
        mask, bsign = 0, 1
        if m and (m.start() == 0 or not t[m.start() - 1].isalnum()):
            blade_txt = m.group(1).replace(" ", "")
            idx = [int(x) for x in re.findall(r"e(\d+)", blade_txt)]
            if any(i < 1 for i in idx):
                raise ValueError(f"generator indices start at 1: {raw!r}")
            maxidx = max([maxidx] + idx)
            mask, bsign = _blade_from_indices(idx)
            coef_txt = t[: m.start()].strip().rstrip("*").strip()
        else:
            coef_txt = t
        if coef_txt == "":
            coef = 1
        else:
            if coef_txt.startswith("(") and coef_txt.endswith(")"):
                coef_txt = coef_txt[1:-1]
            coef = parse_scalar(coef_txt)
        if _has_imag(coef):
            cplx = True
        v = sign * bsign * coef
        terms[mask] = terms.get(mask, 0) + v
    if n is None:
        n = maxidx
    if complexified is None:
        complexified = cplx
    return MultiVector(n, terms, complexified)


# -- the Cl_8 module Delta ---------------------------------------------------

_PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=np.int64),
    "X": np.array([[0, 1], [1, 0]], dtype=np.int64),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.int64),
    "J": np.array([[0, -1], [1, 0]], dtype=np.int64),
}

# Tensor words over {I, X, Z, J}; each has an odd number of J factors so it
# squares to -1, and every pair anticommutes.
GAMMA_WORDS_CL8 = ("IIIJ", "IIJX", "IXJZ", "IZJZ", "IJIZ", "IJXX", "XJZX", "ZJZX")


def _word_matrix(word: str) -> np.ndarray:
    m = np.array([[1]], dtype=np.int64)
    for ch in word:
        m = np.kron(m, _PAULI[ch])
    return m


class GammaRep:
    """Eight real 16x16 integer matrices generating the irreducible Cl_8 module."""

    def __init__(self, matrices, words=None):
        self.matrices = [np.asarray(m, dtype=np.int64) for m in matrices]
        for m in self.matrices:
            m.setflags(write=False)
        self.words = tuple(words) if words else None
        self.n = len(self.matrices)
        self.dim = self.matrices[0].shape[0]

    def relation_matrices(self):
        """All 36 matrices gamma_i gamma_j + gamma_j gamma_i + 2 delta_ij I (i <= j)."""
        eye = np.eye(self.dim, dtype=np.int64)
        out = {}
        for i, j in itertools.combinations_with_replacement(range(self.n), 2):
            a, b = self.matrices[i], self.matrices[j]
            out[(i + 1, j + 1)] = a @ b + b @ a + (2 * eye if i == j else 0)
        return out

    def check_relations(self) -> bool:
        return all(not r.any() for r in self.relation_matrices().values())

    def act(self, a: MultiVector) -> np.ndarray:
        """Matrix of left multiplication by a multivector on Delta (or Delta_c)."""
        if a.n != self.n:
            raise DimensionMismatch(f"Cl_{a.n} element on a Cl_{self.n} module")
        exact = a.is_exact
        dtype = object if exact else (complex if a.complexified else float)
        out = np.zeros((self.dim, self.dim), dtype=dtype)
        if exact:
            out[:] = 0
        for mask, c in a.terms.items():
            m = np.eye(self.dim, dtype=np.int64)
            for k in range(self.n):
                if mask >> k & 1:
                    m = m @ self.matrices[k]
            out = out + (m.astype(object) * c if exact else m * (complex(c) if a.complexified else float(c)))
        return out

    def commutant_dimension(self) -> int:
        return commutant_dimension(self.matrices)


def commutant_dimension(matrices) -> int:
    """Dimension of {M : M g = g M for all g} by exact elimination.

    The generators are real integer matrices, so the complex solution space has
    the same dimension as the rational one.
    """
    d = matrices[0].shape[0]
    rows = []
    # unknown M[p, q] -> column p*d + q; equation (M g - g M)[i, j] = 0
    for g in matrices:
        g = np.asarray(g, dtype=np.int64)
        nz_cols = [np.nonzero(g[:, j])[0] for j in range(d)]
        nz_rows = [np.nonzero(g[i, :])[0] for i in range(d)]
        for i in range(d):
            for j in range(d):
                row = {}
                for k in nz_cols[j]:  # sum_k M[i,k] g[k,j]
                    col = i * d + int(k)
                    row[col] = row.get(col, 0) + int(g[k, j])
                for k in nz_rows[i]:  # - sum_k g[i,k] M[k,j]
                    col = int(k) * d + j
                    row[col] = row.get(col, 0) - int(g[i, k])
                row = {c: v for c, v in row.items() if v}
                if row:
                    rows.append(row)
    from .intlinalg import sparse_rank_rational

    return d * d - sparse_rank_rational(rows)


@lru_cache(maxsize=1)
def build_gamma_rep() -> GammaRep:
    rep = GammaRep([_word_matrix(w) for w in GAMMA_WORDS_CL8], GAMMA_WORDS_CL8)
    if not rep.check_relations():  # pragma: no cover - construction invariant
        raise AssertionError("gamma words do not satisfy the Clifford relations")
    return rep
