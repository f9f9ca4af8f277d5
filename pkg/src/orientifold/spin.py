"""Spin(n), Spin^c(n), their adjoint maps and Lie algebras.

Spin elements keep the list of unit vectors whose product they are, so
membership in Spin(n) holds by construction.  Spin^c elements are pairs
[s, z] with z in Q/Z (or R/Z in floating mode) modulo [s, z] = [-s, z + 1/2].
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .clifford import FLOAT_TOL, MultiVector
from .errors import (
    DimensionMismatch,
    NotGrade1,
    NotUnitVector,
    SampleNotRepresentable,
    UnliftableValue,
    UnsupportedDimension,
)
from .groups import FiniteGroup, GammaGroup
from .numbers import Exact, exact_sqrt, is_exact

__all__ = [
    "SpinElement",
    "SpincElement",
    "LieAlgebraElement",
    "adjoint",
    "adjoint_matrix",
    "adc",
    "lift_so",
    "spin_lifts",
    "dAdcXq",
    "dAdcXq_inverse",
    "alpha1",
    "beta1",
    "verify_sphere_spink",
    "SphereReport",
    "point_spink",
    "PointSpink",
    "SOGroup",
    "SpinGroup",
    "SpincGroup",
    "circle_exp",
    "random_unit_vector",
    "random_spin",
    "random_spinc",
    "finite_spinc_subgroup",
    "matrices_equal",
]


def _simplify(c):
    if isinstance(c, Exact) and c.is_rational():
        c = c.a
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


# -- Spin ----------------------------------------------------------------------


class SpinElement:
    """A product x_1 ... x_2k of unit vectors in R^n, viewed inside Cl_n."""

    __slots__ = ("n", "factors", "mv")

    def __init__(self, n: int, factors: Sequence[Sequence] = (), _mv: MultiVector | None = None):
        self.n = int(n)
        fs = tuple(tuple(_simplify(c) for c in f) for f in factors)
        if len(fs) % 2:
            raise NotUnitVector("a Spin element needs an even number of factors")
        for f in fs:
            if len(f) != n:
                raise DimensionMismatch(f"factor of length {len(f)} in dimension {n}")
            sq = sum((c * c for c in f), 0)
            if all(is_exact(c) for c in f):
                if sq != 1:
                    raise NotUnitVector(f"factor {f} has squared norm {sq}")
            elif abs(float(sq) - 1.0) > FLOAT_TOL:
                raise NotUnitVector(f"factor {f} has squared norm {sq}")
        self.factors = fs
        if _mv is None:
            _mv = MultiVector.scalar(n, 1)
            for f in fs:
                _mv = _mv * MultiVector.from_vector(n, f)
        self.mv = _mv

    @classmethod
    def _trusted(cls, n: int, factors: tuple, mv: MultiVector) -> "SpinElement":
        # factors already validated (products, inverses, negation of valid elements)
        out = cls.__new__(cls)
        out.n, out.factors, out.mv = n, factors, mv
        return out

    @classmethod
    def identity(cls, n: int) -> "SpinElement":
        return cls(n)

    @classmethod
    def pair(cls, n: int, i: int, j: int) -> "SpinElement":
        """e_i e_j as a product of the two unit basis vectors."""
        vi = [0] * n
        vj = [0] * n
        vi[i - 1] = 1
        vj[j - 1] = 1
        return cls(n, [vi, vj])

    @property
    def is_exact(self) -> bool:
        return self.mv.is_exact

    def __mul__(self, other: "SpinElement") -> "SpinElement":
        if not isinstance(other, SpinElement):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch(f"Spin({self.n}) * Spin({other.n})")
        return SpinElement._trusted(self.n, self.factors + other.factors, self.mv * other.mv)

    def inverse(self) -> "SpinElement":
        # (x_1...x_2k)^-1 = x_2k^-1 ... x_1^-1 and x^-1 = -x, the signs cancel
        return SpinElement._trusted(self.n, tuple(reversed(self.factors)), self.mv.reverse())

    def __neg__(self) -> "SpinElement":
        e1 = tuple(1 if k == 0 else 0 for k in range(self.n))
        return SpinElement._trusted(self.n, (e1, e1) + self.factors, -self.mv)

    def __eq__(self, other):
        if not isinstance(other, SpinElement):
            return NotImplemented
        return self.n == other.n and self.mv == other.mv

    def __hash__(self):
        return hash(self.mv)

    def key(self):
        return self.mv.key()

    def is_central(self) -> int:
        """+1 or -1 when the element is +-1 in Cl_n, else 0."""
        if self.mv == MultiVector.scalar(self.n, 1):
            return 1
        if self.mv == MultiVector.scalar(self.n, -1):
            return -1
        return 0

    def embed(self, n: int, shift: int = 0) -> "SpinElement":
        fs = [tuple([0] * shift + list(f) + [0] * (n - self.n - shift)) for f in self.factors]
        return SpinElement(n, fs, self.mv.embed(n, shift))

    def to_float(self) -> "SpinElement":
        fs = [tuple(float(c) for c in f) for f in self.factors]
        return SpinElement(self.n, fs, self.mv.to_float())

    def __repr__(self):
        return f"SpinElement({self.mv})"


# -- Spin^c --------------------------------------------------------------------

_HALF = Fraction(1, 2)


def _reduce(z):
    if isinstance(z, float):
        return z - math.floor(z)
    z = Fraction(z)
    return z - (z.numerator // z.denominator)


_R2 = Fraction(1, 2)
_EXP8 = [
    Exact(1),
    Exact(0, _R2, 0, _R2),
    Exact(0, 0, 1),
    Exact(0, -_R2, 0, _R2),
    Exact(-1),
    Exact(0, -_R2, 0, -_R2),
    Exact(0, 0, -1),
    Exact(0, _R2, 0, -_R2),
]


def circle_exp(z):
    """exp(2 pi i z), exact when 8z is an integer."""
    if not isinstance(z, float):
        z = Fraction(z)
        if (8 * z).denominator == 1:
            return _EXP8[int(8 * z) % 8]
        z = float(z)
    return complex(math.cos(2 * math.pi * z), math.sin(2 * math.pi * z))


class SpincElement:
    """The class [s, z] in (Spin(n) x U(1)) / {+-(1, 1)}, U(1) written as R/Z.

    Stored in canonical form with z in [0, 1/2).
    """

    __slots__ = ("s", "z")

    def __init__(self, s: SpinElement, z=0):
        z = _reduce(z)
        half = 0.5 if isinstance(z, float) else _HALF
        if z >= half:
            s = -s
            z = z - half
        self.s = s
        self.z = z

    @property
    def n(self) -> int:
        return self.s.n

    @classmethod
    def identity(cls, n: int) -> "SpincElement":
        return cls(SpinElement.identity(n), 0)

    def representatives(self):
        """Both pairs (s, z) naming this class."""
        other_z = self.z + (_HALF if not isinstance(self.z, float) else 0.5)
        return [(self.s, self.z), (-self.s, other_z)]

    def __mul__(self, other: "SpincElement") -> "SpincElement":
        if not isinstance(other, SpincElement):
            return NotImplemented
        return SpincElement(self.s * other.s, self.z + other.z)

    def inverse(self) -> "SpincElement":
        return SpincElement(self.s.inverse(), -self.z)

    def kappa(self, sign: int) -> "SpincElement":
        """Conjugation of the circle factor when sign = -1."""
        if sign == 1:
            return self
        return SpincElement(self.s, -self.z)

    def to_multivector(self) -> MultiVector:
        """s * exp(2 pi i z) in Cl^c_n; injective on classes."""
        return (self.s.mv * circle_exp(self.z)).complexify()

    def __eq__(self, other):
        if not isinstance(other, SpincElement):
            return NotImplemented
        if self.n != other.n:
            return False
        exact = isinstance(self.z, Fraction) and isinstance(other.z, Fraction) and self.s.is_exact and other.s.is_exact
        if exact:
            return self.z == other.z and self.s == other.s
        return self.distance(other) <= FLOAT_TOL

    def distance(self, other: "SpincElement") -> float:
        return self.to_multivector().to_float().distance(other.to_multivector().to_float())

    def __hash__(self):
        return hash((self.s, self.z))

    def key(self):
        return (self.s.key(), self.z)

    def to_float(self) -> "SpincElement":
        return SpincElement(self.s.to_float(), float(self.z))

    def __repr__(self):
        return f"[{self.s.mv}, {self.z}]"


# -- adjoint maps ----------------------------------------------------------------


def adjoint(g: SpinElement, x: Sequence) -> list:
    """Ad_g(x) = g x g^-1 for a vector x of R^n."""
    if len(x) != g.n:
        raise DimensionMismatch(f"vector of length {len(x)} for Spin({g.n})")
    xv = MultiVector.from_vector(g.n, list(x))
    out = g.mv * xv * g.mv.reverse()
    try:
        return [_simplify(c) for c in out.to_vector()]
    except NotGrade1:
        if not out.is_exact:
            stray = max((abs(complex(c)) for m, c in out.terms.items() if bin(m).count("1") != 1), default=0.0)
            if stray <= FLOAT_TOL:
                return [out.terms.get(1 << k, 0.0) for k in range(g.n)]
        raise


def adjoint_matrix(g: SpinElement) -> np.ndarray:
    """The SO(n) matrix with columns Ad_g(e_i); exact entries as an object array."""
    n = g.n
    cols = []
    for i in range(n):
        ei = [0] * n
        ei[i] = 1
        cols.append(adjoint(g, ei))
    if g.is_exact:
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                out[i, j] = cols[j][i]
        return out
    return np.array(cols, dtype=float).T


def adc(p: SpincElement) -> np.ndarray:
    """Ad^c[s, z] = Ad(s)."""
    return adjoint_matrix(p.s)


def matrices_equal(a, b, tol: float = FLOAT_TOL) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    if a.dtype == object and b.dtype == object:
        return all(x == y for x, y in zip(a.flat, b.flat))
    diff = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex) if a.dtype != object and b.dtype != object else _obj_to_c(a) - _obj_to_c(b)
    return float(np.max(np.abs(diff), initial=0.0)) <= tol


def _obj_to_c(a):
    a = np.asarray(a)
    if a.dtype == object:
        return np.array([complex(x) for x in a.flat], dtype=complex).reshape(a.shape)
    return a.astype(complex)


def _matmul(a, b):
    return np.asarray(a) @ np.asarray(b)


def lift_so(q) -> SpinElement:
    """A Spin element g with Ad_g = q, built from Householder reflections.

    Exact input needs every reflection vector to normalise inside Q(sqrt2);
    otherwise UnliftableValue is raised.  The other lift is -g.
    """
    q = np.asarray(q)
    n = q.shape[0]
    if q.shape != (n, n):
        raise DimensionMismatch("square matrix expected")
    exact = q.dtype == object or np.issubdtype(q.dtype, np.integer)
    if exact:
        cur = [[_simplify(q[i, j] if not isinstance(q[i, j], np.integer) else int(q[i, j])) for j in range(n)] for i in range(n)]
        if not all(is_exact(c) for row in cur for c in row):
            raise UnliftableValue("matrix entries are not exact scalars")
    else:
        cur = [[float(q[i, j]) for j in range(n)] for i in range(n)]
    _check_so(cur, exact)
    vectors = []

    def reflect(v, M):
        # M <- (I - 2 v v^T) M
        vt_m = [sum((v[k] * M[k][j] for k in range(n)), 0) for j in range(n)]
        return [[M[i][j] - 2 * v[i] * vt_m[j] for j in range(n)] for i in range(n)]

    for i in range(n):
        col = [cur[k][i] for k in range(n)]
        target = [1 if k == i else 0 for k in range(n)]
        diff = [c - t for c, t in zip(col, target)]
        if exact:
            if all(d == 0 for d in diff):
                continue
        elif i == n - 1 or max(abs(d) for d in diff) <= 1e-12:
            # det = 1 forces the last column once the others are fixed
            continue
        nsq = sum((d * d for d in diff), 0)
        if exact:
            try:
                nrm = exact_sqrt(nsq)
            except ValueError:
                raise UnliftableValue(f"reflection norm sqrt({nsq}) not representable") from None
            v = [_simplify(Exact(d) / nrm if not isinstance(d, Exact) else d / nrm) for d in diff]
        else:
            nrm = math.sqrt(nsq)
            v = [d / nrm for d in diff]
        vectors.append(v)
        cur = reflect(v, cur)
    if len(vectors) % 2:  # pragma: no cover - det = 1 forces an even count
        raise UnliftableValue("odd number of reflections; matrix not in SO(n)")
    return SpinElement(n, vectors)


def _check_so(m, exact):
    n = len(m)
    for i in range(n):
        for j in range(n):
            dot = sum((m[k][i] * m[k][j] for k in range(n)), 0)
            want = 1 if i == j else 0
            if exact:
                if dot != want:
                    raise UnliftableValue("matrix is not orthogonal")
            elif abs(dot - want) > 1e-9:
                raise UnliftableValue("matrix is not orthogonal")
    from .exactmat import exact_det

    if exact:
        if exact_det(np.array(m, dtype=object)) != 1:
            raise UnliftableValue("matrix has determinant -1")
    elif abs(np.linalg.det(np.array(m, dtype=float)) - 1) > 1e-9:
        raise UnliftableValue("matrix has determinant -1")


def spin_lifts(q) -> list[SpinElement]:
    g = lift_so(q)
    return [g, -g]


# -- Lie algebras -------------------------------------------------------------


@dataclass(frozen=True)
class LieAlgebraElement:
    """An element of spin(n)+u(1) (basis e_ie_j, i<j) or so(n)+u(1) (basis E_ij).

    ``kind`` is ``"spin"`` or ``"so"``; E_ij has +1 at (i, j) and -1 at (j, i).
    """

    n: int
    biv: tuple = ()
    u1: Fraction = Fraction(0)
    kind: str = "spin"

    @classmethod
    def make(cls, n, biv=None, u1=0, kind="spin"):
        items = []
        for (i, j), c in sorted((biv or {}).items()):
            if not 1 <= i < j <= n:
                raise DimensionMismatch(f"bad index pair {(i, j)} for n={n}")
            if c != 0:
                items.append(((i, j), _simplify(Fraction(c) if isinstance(c, int) else c)))
        return cls(n, tuple(items), Fraction(u1) if not isinstance(u1, float) else u1, kind)

    def coeffs(self) -> dict:
        return dict(self.biv)

    def involution(self, sign: int) -> "LieAlgebraElement":
        """id + iota: negate the u(1) part when sign = -1."""
        return LieAlgebraElement(self.n, self.biv, self.u1 * sign, self.kind)

    def as_vector(self) -> list:
        d = self.coeffs()
        return [d.get(p, 0) for p in itertools.combinations(range(1, self.n + 1), 2)] + [self.u1]

    def matrix(self) -> np.ndarray:
        """so(n) part as an n x n matrix (kind 'so' only)."""
        if self.kind != "so":
            raise ValueError("matrix() is defined on so(n)")
        out = np.zeros((self.n, self.n), dtype=object)
        out[:] = 0
        for (i, j), c in self.biv:
            out[i - 1, j - 1] += c
            out[j - 1, i - 1] -= c
        return out

    def multivector(self) -> MultiVector:
        """spin(n) part as a bivector in Cl_n (kind 'spin' only)."""
        if self.kind != "spin":
            raise ValueError("multivector() is defined on spin(n)")
        out = MultiVector(self.n)
        for (i, j), c in self.biv:
            out = out + c * MultiVector.basis(self.n, i, j)
        return out


def dAdcXq(a: LieAlgebraElement) -> LieAlgebraElement:
    """(e_i e_j, t) -> (2 E_ij, 2 t)."""
    if a.kind != "spin":
        raise ValueError("argument must lie in spin(n)+u(1)")
    return LieAlgebraElement(a.n, tuple((p, 2 * c) for p, c in a.biv), 2 * a.u1, "so")


def dAdcXq_inverse(b: LieAlgebraElement) -> LieAlgebraElement:
    if b.kind != "so":
        raise ValueError("argument must lie in so(n)+u(1)")
    return LieAlgebraElement(b.n, tuple((p, c / 2) for p, c in b.biv), b.u1 / 2, "spin")


def dAdcXq_matrix(n: int) -> np.ndarray:
    """Matrix of dAdcXq in the ordered bases {e_ie_j} + {1} and {E_ij} + {1}."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    dim = len(pairs) + 1
    out = np.zeros((dim, dim), dtype=np.int64)
    for k, p in enumerate(pairs):
        img = dAdcXq(LieAlgebraElement.make(n, {p: 1})).as_vector()
        out[:, k] = [int(x) for x in img]
    out[:, -1] = [int(x) for x in dAdcXq(LieAlgebraElement.make(n, {}, 1)).as_vector()]
    return out


# -- coefficient groups for cocycles -----------------------------------------------


class SOGroup(GammaGroup):
    """(SO(n), id_eps); values are n x n matrices."""

    kind = "SO"

    def __init__(self, gamma: FiniteGroup, n: int):
        super().__init__(gamma)
        self.n = n

    def mul(self, a, b):
        return _matmul(a, b)

    def inv(self, a):
        return np.asarray(a).T.copy()

    def identity(self):
        out = np.empty((self.n, self.n), dtype=object)
        for i in range(self.n):
            for j in range(self.n):
                out[i, j] = 1 if i == j else 0
        return out

    def theta(self, g, a):
        return a

    def eq(self, a, b):
        return matrices_equal(a, b)


class SpinGroup(GammaGroup):
    """(Spin(n), id_eps)."""

    kind = "Spin"

    def __init__(self, gamma: FiniteGroup, n: int):
        super().__init__(gamma)
        self.n = n

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()

    def identity(self):
        return SpinElement.identity(self.n)

    def theta(self, g, a):
        return a


class SpincGroup(GammaGroup):
    """(Spin^c(n), kappa_eps)."""

    kind = "Spinc"

    def __init__(self, gamma: FiniteGroup, n: int):
        super().__init__(gamma)
        self.n = n

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()

    def identity(self):
        return SpincElement.identity(self.n)

    def theta(self, g, a):
        return a.kappa(self.gamma.eps(g))


# -- sphere and point structures ---------------------------------------------------


def alpha1(f) -> np.ndarray:
    """SO(n) -> SO(n+1), f -> diag(1, f)."""
    f = np.asarray(f)
    n = f.shape[0]
    dtype = object if f.dtype == object else float
    out = np.zeros((n + 1, n + 1), dtype=dtype)
    if dtype is object:
        out[:] = 0
    out[0, 0] = 1
    out[1:, 1:] = f
    return out


def beta1(h: SpincElement) -> SpincElement:
    """Spin^c(n) -> Spin^c(n+1) induced by e_k -> e_{k+1}; the circle value is kept."""
    return SpincElement(h.s.embed(h.n + 1, 1), h.z)


@dataclass
class SphereReport:
    n: int
    samples: int
    exact: bool
    residuals: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())

    def as_dict(self):
        return {
            "n": self.n,
            "samples": self.samples,
            "exact": self.exact,
            "passed": self.passed,
            "residuals": dict(self.residuals),
            "failures": dict(self.failures),
        }


SPHERE_IDENTITIES = (
    "projection_equivariance",
    "right_action_compatibility",
    "so_projection_equivariance",
    "so_right_action_compatibility",
    "lift_projection",
    "lift_right_action",
    "lift_left_action",
    "fibre_preserved",
)


def _vec_residual(a, b) -> float:
    return float(np.max(np.abs(_obj_to_c(np.asarray(a)) - _obj_to_c(np.asarray(b))), initial=0.0))


def _is_obj(a) -> bool:
    return np.asarray(a).dtype == object


def _equal_or_residual(a, b, exact: bool):
    if exact:
        if isinstance(a, SpincElement):
            return (0.0 if a == b else 1.0)
        a, b = np.asarray(a, dtype=object), np.asarray(b, dtype=object)
        return 0.0 if all(x == y for x, y in zip(a.flat, b.flat)) else 1.0
    if isinstance(a, SpincElement):
        return a.distance(b)
    return _vec_residual(a, b)


def verify_sphere_spink(n: int, samples, tol: float = 1e-9) -> SphereReport:
    """Check the identities making Ad^c: Spin^c(n+1) -> SO(n+1) a structure on S^n.

    ``samples`` holds tuples (gamma, g, p, h) with gamma = +-1, g and p in
    Spin^c(n+1) and h in Spin^c(n).  Exact samples are compared exactly;
    any floating sample switches the whole run to residuals against ``tol``.
    """
    samples = list(samples)
    exact = True
    for smp in samples:
        if len(smp) != 4:
            raise SampleNotRepresentable("samples are (gamma, g, p, h) tuples")
        gam, g, p, h = smp
        if gam not in (1, -1):
            raise SampleNotRepresentable(f"gamma must be +1 or -1, got {gam!r}")
        if not all(isinstance(x, SpincElement) for x in (g, p, h)):
            raise SampleNotRepresentable("g, p, h must be Spin^c elements")
        if g.n != n + 1 or p.n != n + 1 or h.n != n:
            raise SampleNotRepresentable(f"expected Spin^c({n + 1}) x Spin^c({n + 1}) x Spin^c({n})")
        for x in (g, p, h):
            if not (x.s.is_exact and not isinstance(x.z, float)):
                exact = False
    report = SphereReport(n, len(samples), exact)
    resid = {k: 0.0 for k in SPHERE_IDENTITIES}
    fails = {k: 0 for k in SPHERE_IDENTITIES}
    e1 = [1] + [0] * n

    def mv(a, v):
        return list(np.asarray(a) @ np.asarray(v, dtype=object if _is_obj(a) else float))

    for gam, g, p, h in samples:
        if not exact:
            g, p, h = g.to_float(), p.to_float(), h.to_float()
        left_p = g * p.kappa(gam)
        Ag, Ap = adc(g), adc(p)
        q = Ap
        f = adc(h)
        checks = {
            "projection_equivariance": (mv(adc(left_p), e1), mv(Ag, mv(Ap, e1))),
            "right_action_compatibility": (g * (p * beta1(h)).kappa(gam), left_p * beta1(h.kappa(gam))),
            "so_projection_equivariance": (mv(_matmul(Ag, q), e1), mv(Ag, mv(q, e1))),
            "so_right_action_compatibility": (_matmul(Ag, _matmul(q, alpha1(f))), _matmul(_matmul(Ag, q), alpha1(f))),
            "lift_projection": (mv(Ap, e1), mv(q, e1)),
            "lift_right_action": (adc(p * beta1(h)), _matmul(Ap, alpha1(f))),
            "lift_left_action": (adc(left_p), _matmul(Ag, Ap)),
            "fibre_preserved": (mv(adc(p * beta1(h)), e1), mv(Ap, e1)),
        }
        for name, (lhs, rhs) in checks.items():
            r = _equal_or_residual(lhs, rhs, exact)
            resid[name] = max(resid[name], r)
            if (exact and r != 0) or (not exact and r > tol):
                fails[name] += 1
    report.residuals = resid
    report.failures = fails
    return report


class PointSpink:
    """Spin^c(n) over a point with (gamma, g) . p = g kappa_gamma(p)."""

    def __init__(self, n: int):
        self.n = n

    def left(self, gamma: int, g: SpincElement, p: SpincElement) -> SpincElement:
        return g * p.kappa(gamma)

    def right(self, p: SpincElement, h: SpincElement) -> SpincElement:
        return p * h

    def structure_action(self, gamma: int, h: SpincElement) -> SpincElement:
        return h.kappa(gamma)

    def lift(self, p: SpincElement):
        return adc(p)

    def frame_left(self, gamma: int, g: SpincElement, q):
        return _matmul(adc(g), q)

    def check_semi_equivariance(self, elements, gammas=(1, -1)) -> int:
        """Count failures of (gamma,g)(p h) = ((gamma,g)p)(kappa_gamma h) over all triples."""
        bad = 0
        for gam in gammas:
            for g, p, h in itertools.product(elements, repeat=3):
                if self.left(gam, g, self.right(p, h)) != self.right(self.left(gam, g, p), self.structure_action(gam, h)):
                    bad += 1
        return bad

    def check_lift_intertwines(self, elements, gammas=(1, -1)) -> int:
        """Count failures of Ad^c((gamma,g)p) = (gamma,g) Ad^c(p)."""
        bad = 0
        for gam in gammas:
            for g, p in itertools.product(elements, repeat=2):
                if not matrices_equal(self.lift(self.left(gam, g, p)), self.frame_left(gam, g, self.lift(p))):
                    bad += 1
        return bad


def point_spink(n: int) -> PointSpink:
    if n not in (1, 2, 8):
        raise UnsupportedDimension(f"point structures are provided for n in {{1, 2, 8}}, not {n}")
    return PointSpink(n)


def finite_spinc_subgroup(n: int, circle_order: int = 4) -> list[SpincElement]:
    """A small finite subgroup of Spin^c(n) closed under kappa.

    Spin part generated by e_1e_2 and e_3e_4 (n >= 4), by e_1e_2 and
    (1 + e_1e_2)/sqrt2 (n = 2, 3) or {+-1} (n = 1); circle part (1/circle_order)Z/Z.
    """
    gens = [SpincElement(SpinElement.identity(n), Fraction(1, circle_order))]
    if n >= 2:
        gens.append(SpincElement(SpinElement.pair(n, 1, 2)))
    if n >= 4:
        gens.append(SpincElement(SpinElement.pair(n, 3, 4)))
    elif n >= 2:
        r = Exact(0, Fraction(1, 2))
        v = [r, -r] + [0] * (n - 2)
        w = [1] + [0] * (n - 1)
        # (e1 - e2)/sqrt2 * e1 ... gives a square root of e1e2 up to sign
        gens.append(SpincElement(SpinElement(n, [w, v])))
    seen = {x.key(): x for x in gens}
    seen[SpincElement.identity(n).key()] = SpincElement.identity(n)
    frontier = list(seen.values())
    while frontier:
        nxt = []
        for a in frontier:
            for b in gens:
                c = a * b
                if c.key() not in seen:
                    seen[c.key()] = c
                    nxt.append(c)
        frontier = nxt
    return list(seen.values())


# -- random sampling ---------------------------------------------------------------

_PYTHAGOREAN = [(Fraction(3, 5), Fraction(4, 5)), (Fraction(5, 13), Fraction(12, 13)), (Fraction(8, 17), Fraction(15, 17))]


def random_unit_vector(n: int, rng, exact: bool = True) -> list:
    """A random unit vector; exact ones use signed basis, Pythagorean and sqrt2 directions."""
    if not exact:
        v = rng.normal(size=n)
        return list(v / np.linalg.norm(v))
    kind = rng.integers(0, 3) if n >= 2 else 0
    v = [0] * n
    if kind == 0:
        v[int(rng.integers(0, n))] = int(rng.choice([-1, 1]))
        return v
    i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
    if kind == 1:
        a, b = _PYTHAGOREAN[int(rng.integers(0, len(_PYTHAGOREAN)))]
    else:
        a = b = Exact(0, Fraction(1, 2))
    v[i] = a * int(rng.choice([-1, 1]))
    v[j] = b * int(rng.choice([-1, 1]))
    return v


def random_spin(n: int, rng, pairs: int = 2, exact: bool = True) -> SpinElement:
    fs = []
    for _ in range(2 * pairs):
        fs.append(random_unit_vector(n, rng, exact))
    return SpinElement(n, fs)


def random_spinc(n: int, rng, pairs: int = 2, exact: bool = True, circle_denom: int = 8) -> SpincElement:
    s = random_spin(n, rng, pairs, exact)
    if exact:
        return SpincElement(s, Fraction(int(rng.integers(0, circle_denom)), circle_denom))
    return SpincElement(s, float(rng.random()))
