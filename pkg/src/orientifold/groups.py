"""Finite orientifold groups and their coefficient groups.

A group is stored as a dense multiplication table over ids ``0..n-1`` with
``0`` the identity.  An orientifold group additionally carries the sign map
``eps`` onto {+1, -1}.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import EpsNotHomomorphism, EpsTrivial, InfiniteCarrier, NotAGroup

__all__ = [
    "FiniteGroup",
    "OrientifoldGroup",
    "make_group",
    "make_orientifold_group",
    "group_from_elements",
    "direct_product",
    "semidirect_orientifold",
    "has_involution_in_minus",
    "GammaGroup",
    "IntegersTwisted",
    "ZTwo",
    "CircleRational",
    "TableGammaGroup",
    "GLGroup",
    "preset_group",
    "PRESET_GROUPS",
    "cyclic_group",
]


class FiniteGroup:
    """A finite group given by its multiplication table.

    ``eps`` defaults to the trivial sign so that ordinary (untwisted) groups
    can be fed to the same cohomology code as orientifold groups.
    """

    def __init__(self, table, eps=None, labels=None):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise NotAGroup("multiplication table must be a non-empty square array")
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            raise NotAGroup("table entries must be element ids 0..n-1")
        _check_group(t)
        t.setflags(write=False)
        self.table = t
        self.order = n
        self.identity = 0
        inv = np.empty(n, dtype=np.int64)
        for g in range(n):
            inv[g] = int(np.nonzero(t[g] == 0)[0][0])
        inv.setflags(write=False)
        self._inv = inv
        if eps is None:
            eps = [1] * n
        e = np.asarray([int(v) for v in eps], dtype=np.int64)
        if e.shape != (n,) or not set(e.tolist()) <= {1, -1}:
            raise EpsNotHomomorphism("eps must assign +1 or -1 to every element")
        for a in range(n):
            for b in range(n):
                if e[t[a, b]] != e[a] * e[b]:
                    raise EpsNotHomomorphism(f"eps({a}*{b}) != eps({a})eps({b})")
        e.setflags(write=False)
        self.eps_table = e
        self.labels = list(labels) if labels is not None else [str(g) for g in range(n)]
        if len(self.labels) != n:
            raise ValueError("one label per element required")

    # basic access
    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self._inv[a])

    def eps(self, a: int) -> int:
        return int(self.eps_table[a])

    def power(self, a: int, k: int) -> int:
        out = 0
        base = a if k >= 0 else self.inv(a)
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    def plus(self) -> list[int]:
        return [g for g in self.elements if self.eps(g) == 1]

    def minus(self) -> list[int]:
        return [g for g in self.elements if self.eps(g) == -1]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroup)
            and np.array_equal(self.table, other.table)
            and np.array_equal(self.eps_table, other.eps_table)
        )

    def __hash__(self):
        return hash((self.table.tobytes(), self.eps_table.tobytes()))

    def __repr__(self):
        kind = type(self).__name__
        return f"{kind}(order={self.order}, labels={self.labels})"


class OrientifoldGroup(FiniteGroup):
    """A finite group with a surjective homomorphism ``eps`` onto {+1, -1}."""

    def __init__(self, table, eps, labels=None):
        super().__init__(table, eps, labels)
        if all(v == 1 for v in self.eps_table.tolist()):
            raise EpsTrivial("eps must be surjective onto {+1,-1}")


def _check_group(t: np.ndarray) -> None:
    n = t.shape[0]
    full = np.arange(n)
    for r in range(n):
        if not np.array_equal(np.sort(t[r]), full):
            raise NotAGroup(f"row {r} is not a permutation")
        if not np.array_equal(np.sort(t[:, r]), full):
            raise NotAGroup(f"column {r} is not a permutation")
    if not np.array_equal(t[0], full) or not np.array_equal(t[:, 0], full):
        raise NotAGroup("element 0 must be the identity")
    # associativity, vectorised over the third argument
    for a in range(n):
        lhs = t[t[a]][:, :]  # (ab)c indexed [b, c]
        rhs = t[a][t]  # a(bc) indexed [b, c]
        if not np.array_equal(lhs, rhs):
            raise NotAGroup("multiplication is not associative")


def make_group(mul_table, labels=None) -> FiniteGroup:
    return FiniteGroup(mul_table, None, labels)


def make_orientifold_group(mul_table, eps, labels=None) -> OrientifoldGroup:
    """Validate a table and sign map; see ``OrientifoldGroup``.

    ``eps`` may be a sequence indexed by element id or a mapping.
    """
    n = len(mul_table)
    if isinstance(eps, dict):
        eps = [eps[g] for g in range(n)]
    elif callable(eps):
        eps = [eps(g) for g in range(n)]
    return OrientifoldGroup(mul_table, eps, labels)


def group_from_elements(
    elements: Sequence[Hashable],
    mul: Callable,
    eps: Callable | None = None,
    labels: Sequence[str] | None = None,
    orientifold: bool = True,
):
    """Build a table group from concrete elements; ``elements[0]`` must be the identity."""
    index = {g: k for k, g in enumerate(elements)}
    if len(index) != len(elements):
        raise NotAGroup("duplicate elements")
    table = []
    for a in elements:
        row = []
        for b in elements:
            c = mul(a, b)
            if c not in index:
                raise NotAGroup(f"product {a}*{b} leaves the element set")
            row.append(index[c])
        table.append(row)
    if labels is None:
        labels = [str(g) for g in elements]
    if eps is None:
        return FiniteGroup(table, None, labels)
    signs = [eps(g) for g in elements]
    if orientifold:
        return OrientifoldGroup(table, signs, labels)
    return FiniteGroup(table, signs, labels)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], None, [str(k) for k in range(n)])


def direct_product(g1: FiniteGroup, g2: FiniteGroup, eps_from: str = "first"):
    """G1 x G2 with ids ``a*|G2| + b``; eps taken from the chosen factor(s)."""
    n1, n2 = g1.order, g2.order
    table = np.empty((n1 * n2, n1 * n2), dtype=np.int64)
    for a1, b1, a2, b2 in itertools.product(range(n1), range(n2), range(n1), range(n2)):
        table[a1 * n2 + b1, a2 * n2 + b2] = g1.mul(a1, a2) * n2 + g2.mul(b1, b2)
    if eps_from == "first":
        eps = [g1.eps(a) for a in range(n1) for _ in range(n2)]
    elif eps_from == "second":
        eps = [g2.eps(b) for _ in range(n1) for b in range(n2)]
    elif eps_from == "both":
        eps = [g1.eps(a) * g2.eps(b) for a in range(n1) for b in range(n2)]
    else:
        raise ValueError(eps_from)
    labels = [f"({g1.labels[a]},{g2.labels[b]})" for a in range(n1) for b in range(n2)]
    if any(v == -1 for v in eps):
        return OrientifoldGroup(table, eps, labels)
    return FiniteGroup(table, eps, labels)


def has_involution_in_minus(g: FiniteGroup) -> bool:
    return any(g.mul(x, x) == 0 for x in g.minus())


# -- coefficient groups ---------------------------------------------------


class GammaGroup:
    """A group A with an action theta of a finite group Gamma by automorphisms.

    Subclasses supply ``mul``, ``inv``, ``identity``, ``theta`` and, for finite
    carriers, ``elements``.  Abelian subclasses are written additively through
    the same methods.
    """

    abelian = False
    finite = False
    kind = "generic"

    def __init__(self, gamma: FiniteGroup):
        self.gamma = gamma

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def theta(self, g: int, a):
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return a == b

    def normalize(self, a):
        return a

    def elements(self) -> list:
        raise InfiniteCarrier(f"{type(self).__name__} has no finite element list")

    def verify_action(self) -> None:
        """Exhaustively check the action axioms on a finite carrier."""
        els = self.elements()
        G = self.gamma
        for a in els:
            if not self.eq(self.theta(0, a), a):
                raise NotAGroup("theta(e) is not the identity")
        for g in G.elements:
            for a, b in itertools.product(els, els):
                if not self.eq(self.theta(g, self.mul(a, b)), self.mul(self.theta(g, a), self.theta(g, b))):
                    raise NotAGroup(f"theta({g}) is not a homomorphism")
        for g1, g2 in itertools.product(G.elements, G.elements):
            for a in els:
                lhs = self.theta(G.mul(g1, g2), a)
                rhs = self.theta(g1, self.theta(g2, a))
                if not self.eq(lhs, rhs):
                    raise NotAGroup("theta is not an action")


class IntegersTwisted(GammaGroup):
    """(Z, iota_eps): gamma acts by multiplication with eps(gamma).

    ``twisted=False`` gives Z with the trivial action.
    """

    abelian = True
    kind = "Z"

    def __init__(self, gamma, twisted: bool = True):
        super().__init__(gamma)
        self.twisted = twisted

    def mul(self, a, b):
        return a + b

    def inv(self, a):
        return -a

    def identity(self):
        return 0

    def theta(self, g, a):
        return self.sign(g) * a

    def sign(self, g) -> int:
        return self.gamma.eps(g) if self.twisted else 1


class ZTwo(GammaGroup):
    """(Z_2, id_eps) written additively in {0, 1}; the action is trivial."""

    abelian = True
    finite = True
    kind = "Z2"

    def mul(self, a, b):
        return (a + b) % 2

    def inv(self, a):
        return a % 2

    def identity(self):
        return 0

    def theta(self, g, a):
        return a

    def normalize(self, a):
        return int(a) % 2

    def elements(self):
        return [0, 1]

    def sign(self, g) -> int:
        return 1


class CircleRational(GammaGroup):
    """(Q/Z, kappa_eps): the rational circle, t -> eps(gamma) t mod 1.

    ``denom`` is the global denominator bound; ``elements()`` lists the
    finite subgroup (1/denom)Z/Z.
    """

    abelian = True
    kind = "QZ"

    def __init__(self, gamma, denom: int = 16, twisted: bool = True):
        super().__init__(gamma)
        if denom < 1:
            raise ValueError("denominator bound must be positive")
        self.denom = int(denom)
        self.twisted = twisted

    @staticmethod
    def reduce(t) -> Fraction:
        t = Fraction(t)
        return t - (t.numerator // t.denominator)

    def normalize(self, a):
        return self.reduce(a)

    def mul(self, a, b):
        return self.reduce(Fraction(a) + Fraction(b))

    def inv(self, a):
        return self.reduce(-Fraction(a))

    def identity(self):
        return Fraction(0)

    def theta(self, g, a):
        return self.reduce(self.sign(g) * Fraction(a))

    def eq(self, a, b):
        return self.reduce(Fraction(a) - Fraction(b)) == 0

    def elements(self):
        return [Fraction(k, self.denom) for k in range(self.denom)]

    def sign(self, g) -> int:
        return self.gamma.eps(g) if self.twisted else 1


class TableGammaGroup(GammaGroup):
    """A finite group G (by table) with Gamma acting through permutations of ids."""

    finite = True
    kind = "table"

    def __init__(self, gamma: FiniteGroup, group: FiniteGroup, action: Sequence[Sequence[int]] | None = None):
        super().__init__(gamma)
        self.group = group
        if action is None:
            action = [list(range(group.order)) for _ in gamma.elements]
        self.action = np.asarray(action, dtype=np.int64)
        if self.action.shape != (gamma.order, group.order):
            raise ValueError("action must give one permutation of G per element of Gamma")
        self.abelian = group.is_abelian()

    def mul(self, a, b):
        return self.group.mul(a, b)

    def inv(self, a):
        return self.group.inv(a)

    def identity(self):
        return 0

    def theta(self, g, a):
        return int(self.action[g, a])

    def elements(self):
        return list(self.group.elements)


class GLGroup(GammaGroup):
    """(GL(m, C), kappa_eps): elementwise complex conjugation for eps = -1.

    Values are square numpy arrays (complex, or object arrays of exact scalars).
    """

    kind = "GL"

    def __init__(self, gamma, m: int, tol: float = 1e-9):
        super().__init__(gamma)
        self.m = m
        self.tol = tol

    def mul(self, a, b):
        return np.asarray(a) @ np.asarray(b)

    def inv(self, a):
        a = np.asarray(a)
        if a.dtype == object:
            from .exactmat import exact_inverse

            return exact_inverse(a)
        return np.linalg.inv(a)

    def identity(self):
        return np.eye(self.m, dtype=complex)

    def theta(self, g, a):
        a = np.asarray(a)
        if self.gamma.eps(g) == 1:
            return a
        if a.dtype == object:
            return np.vectorize(_conj_scalar, otypes=[object])(a)
        return np.conj(a)

    def eq(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if a.shape != b.shape:
            return False
        if a.dtype == object or b.dtype == object:
            try:
                return bool(np.all(a == b))
            except TypeError:
                pass
        return bool(np.max(np.abs(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)), initial=0.0) <= self.tol)


def _conj_scalar(x):
    if hasattr(x, "conjugate"):
        return x.conjugate()
    return x


# -- semidirect products ----------------------------------------------------


def semidirect_orientifold(gamma: FiniteGroup, g: GammaGroup) -> OrientifoldGroup:
    """Gamma x_theta G with (a,x)(b,y) = (ab, x theta_a(y)) and eps(a,x) = eps(a)."""
    if not g.finite:
        raise InfiniteCarrier(f"{type(g).__name__} is not finite")
    els = g.elements()
    index = {}
    for k, x in enumerate(els):
        index[_key(x)] = k
    ident = index[_key(g.identity())]
    # put the identity first
    order_g = [ident] + [k for k in range(len(els)) if k != ident]
    pos = {k: i for i, k in enumerate(order_g)}
    n_gam, n_g = gamma.order, len(els)
    N = n_gam * n_g

    def enc(a, i):
        return a * n_g + i

    table = np.empty((N, N), dtype=np.int64)
    for a, i, b, j in itertools.product(range(n_gam), range(n_g), range(n_gam), range(n_g)):
        x, y = els[order_g[i]], els[order_g[j]]
        prod = g.normalize(g.mul(x, g.theta(a, y)))
        table[enc(a, i), enc(b, j)] = enc(gamma.mul(a, b), pos[index[_key(prod)]])
    eps = [gamma.eps(a) for a in range(n_gam) for _ in range(n_g)]
    labels = [f"({gamma.labels[a]},{els[order_g[i]]})" for a in range(n_gam) for i in range(n_g)]
    if all(v == 1 for v in eps):
        raise EpsTrivial("the base group has trivial eps")
    return OrientifoldGroup(table, eps, labels)


def _key(x):
    if isinstance(x, np.ndarray):
        return x.tobytes()
    if hasattr(x, "key"):
        return x.key()
    return x


# -- presets ---------------------------------------------------------------


def _z2() -> OrientifoldGroup:
    return OrientifoldGroup([[0, 1], [1, 0]], [1, -1], ["+1", "-1"])


def _h4q() -> OrientifoldGroup:
    # {1, i, -1, -i} as Z/4 with eps(h) = h^2
    table = [[(a + b) % 4 for b in range(4)] for a in range(4)]
    return OrientifoldGroup(table, [1, -1, 1, -1], ["1", "i", "-1", "-i"])


_Q8_NAMES = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"]


def _q8() -> OrientifoldGroup:
    # unit quaternions as (sign, axis) with axis 0..3 = 1,i,j,k
    mult = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def split(x):
        return (-1 if x >= 4 else 1), x % 4

    def join(s, ax):
        return ax if s == 1 else ax + 4

    table = []
    for a in range(8):
        sa, xa = split(a)
        row = []
        for b in range(8):
            sb, xb = split(b)
            s, ax = mult[(xa, xb)]
            row.append(join(sa * sb * s, ax))
        table.append(row)
    eps = [1, 1, -1, -1, 1, 1, -1, -1]
    return OrientifoldGroup(table, eps, _Q8_NAMES)


PRESET_GROUPS = {"z2": _z2, "h4-q": _h4q, "q8": _q8}


def preset_group(name: str) -> OrientifoldGroup:
    try:
        return PRESET_GROUPS[name]()
    except KeyError:
        raise KeyError(f"unknown group preset {name!r}; choose from {sorted(PRESET_GROUPS)}") from None


def iter_pairs(g: FiniteGroup) -> Iterable[tuple[int, int]]:
    return itertools.product(g.elements, g.elements)
