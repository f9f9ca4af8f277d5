"""Semi-equivariant Cech cochains over finite covers with a group action.

A p-cell is ``(gammas, idx, x)`` with ``gammas = (g_1, ..., g_p)``,
``idx = (a_0, ..., a_p)`` and a base point ``x``; writing x_0 = x and
x_k = g_k x_{k-1}, the cell exists when x_k lies in U_{a_k} for every k.
A degree-1 cochain is thus a table phi_{ba}(g, x) on x in U_a, gx in U_b.

For an abelian coefficient group (A, theta) the coboundary of a p-cochain c
evaluated on a (p+1)-cell is::

    c(d_0 cell) + sum_{k=1..p} (-1)^k c(d_k cell) + (-1)^(p+1) theta_{g_{p+1}} c(d_{p+1} cell)

where d_0 drops the first vertex (base point g_1 x), d_k merges g_{k+1} g_k
and drops a_k, and d_{p+1} drops the last vertex.  In degree 1 this is
phi_cb(g2, g1 x) + theta_g2 phi_ba(g1, x) - phi_ca(g2 g1, x).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    CoverMismatch,
    DenominatorBoundExceeded,
    DomainMismatch,
    NonAbelianCoefficient,
    UnliftableValue,
)
from .groups import CircleRational, FiniteGroup, GammaGroup, GLGroup, IntegersTwisted, ZTwo
from .intlinalg import gf2_form, rank_rational, smith_form
from .spin import SOGroup, SpinElement, SpinGroup, lift_so

__all__ = [
    "EquivariantCover",
    "Cochain",
    "cells",
    "coboundary",
    "coboundary_matrix",
    "cocycle_condition",
    "cohomology",
    "CohomologyGroup",
    "CohomologyClass",
    "delta_exp",
    "delta_s",
    "delta_u",
    "delta_sc",
    "spin_lift",
    "pullback",
    "dual",
    "direct_sum",
    "tensor",
    "gauge_transform",
    "twist_signs",
]


# -- covers -------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivariantCover:
    """A finite set X = {0..n-1} with a Gamma-action and a cover by subsets U_a.

    ``point_action[g][x]`` is g.x and ``index_action[g][a]`` satisfies
    g(U_a) = U_{g.a}; when omitted it is inferred from the sets.
    """

    group: FiniteGroup
    n_points: int
    point_action: tuple
    sets: tuple
    index_action: tuple | None = None

    def __post_init__(self):
        G = self.group
        pa = tuple(tuple(int(v) for v in row) for row in self.point_action)
        object.__setattr__(self, "point_action", pa)
        object.__setattr__(self, "sets", tuple(frozenset(int(x) for x in s) for s in self.sets))
        if self.index_action is not None:
            ia = tuple(tuple(int(v) for v in row) for row in self.index_action)
            object.__setattr__(self, "index_action", ia)
        n = self.n_points
        if len(pa) != G.order or any(sorted(row) != list(range(n)) for row in pa):
            raise CoverMismatch("point_action needs one permutation of X per group element")
        if pa[0] != tuple(range(n)):
            raise CoverMismatch("the identity must act trivially")
        for g, h in itertools.product(G.elements, G.elements):
            gh = G.mul(g, h)
            if any(pa[gh][x] != pa[g][pa[h][x]] for x in range(n)):
                raise CoverMismatch("point_action is not a group action")
        covered = set().union(*self.sets) if self.sets else set()
        if covered != set(range(n)):
            raise CoverMismatch("the sets do not cover X")
        if any(not s <= set(range(n)) for s in self.sets):
            raise CoverMismatch("cover sets must be subsets of X")
        if self.index_action is None:
            lookup = {u: a for a, u in enumerate(self.sets)}
            ia = []
            for g in G.elements:
                row = []
                for s in self.sets:
                    image = frozenset(pa[g][x] for x in s)
                    if image not in lookup:
                        raise CoverMismatch(f"g={g} maps a cover set onto a set outside the cover")
                    row.append(lookup[image])
                ia.append(tuple(row))
            object.__setattr__(self, "index_action", tuple(ia))
        else:
            ia = self.index_action
            m = len(self.sets)
            if len(ia) != G.order or any(sorted(row) != list(range(m)) for row in ia):
                raise CoverMismatch("index_action needs one permutation of cover indices per element")
            for g in G.elements:
                for a, s in enumerate(self.sets):
                    if frozenset(pa[g][x] for x in s) != self.sets[ia[g][a]]:
                        raise CoverMismatch(f"g={g} maps U_{a} onto a set other than U_{ia[g][a]}")

    # constructors
    @classmethod
    def point(cls, group: FiniteGroup) -> "EquivariantCover":
        return cls(group, 1, tuple((0,) for _ in group.elements), (frozenset({0}),), tuple((0,) for _ in group.elements))

    @classmethod
    def discrete(cls, group: FiniteGroup, point_action) -> "EquivariantCover":
        """One open set {x} per point; the index action equals the point action."""
        pa = tuple(tuple(row) for row in point_action)
        n = len(pa[0])
        return cls(group, n, pa, tuple(frozenset({x}) for x in range(n)), pa)

    @classmethod
    def single(cls, group: FiniteGroup, point_action) -> "EquivariantCover":
        """The one-set cover {X}."""
        pa = tuple(tuple(row) for row in point_action)
        n = len(pa[0])
        return cls(group, n, pa, (frozenset(range(n)),), tuple((0,) for _ in group.elements))

    def act(self, g: int, x: int) -> int:
        return self.point_action[g][x]

    def containing(self, x: int) -> list[int]:
        return [a for a, s in enumerate(self.sets) if x in s]

    def orbits(self) -> list[list[int]]:
        seen, out = set(), []
        for x in range(self.n_points):
            if x in seen:
                continue
            orb = sorted({self.act(g, x) for g in self.group.elements})
            seen.update(orb)
            out.append(orb)
        return out

    def cells(self, p: int) -> tuple:
        return cells(self, p)

    def cell_index(self, p: int) -> dict:
        return _cell_index(self, p)


@lru_cache(maxsize=256)
def cells(cover: EquivariantCover, p: int) -> tuple:
    """All p-cells of the cover in a fixed canonical order."""
    if p < 0:
        return ()
    G = cover.group
    contain = [cover.containing(x) for x in range(cover.n_points)]
    out = []

    def extend(gammas, idx, x, cur):
        if len(gammas) == p:
            out.append((tuple(gammas), tuple(idx), x))
            return
        for g in G.elements:
            nxt = cover.act(g, cur)
            for b in contain[nxt]:
                extend(gammas + [g], idx + [b], x, nxt)

    for x in range(cover.n_points):
        for a in contain[x]:
            extend([], [a], x, x)
    return tuple(out)


@lru_cache(maxsize=256)
def _cell_index(cover: EquivariantCover, p: int) -> dict:
    return {c: k for k, c in enumerate(cells(cover, p))}


def _faces(cover: EquivariantCover, cell):
    """Yield (face, sign, twist_element or None) for the coboundary formula."""
    gammas, idx, x = cell
    q = len(gammas)  # the cell has degree q = p + 1
    G = cover.group
    yield (gammas[1:], idx[1:], cover.act(gammas[0], x)), 1, None
    for k in range(1, q):
        merged = G.mul(gammas[k], gammas[k - 1])
        g2 = gammas[: k - 1] + (merged,) + gammas[k + 1 :]
        yield (g2, idx[:k] + idx[k + 1 :], x), (-1) ** k, None
    yield (gammas[:-1], idx[:-1], x), (-1) ** q, gammas[-1]


def twist_signs(coeff: GammaGroup) -> tuple[int, ...]:
    """The sign by which each group element acts on a rank-one abelian coefficient."""
    return tuple(coeff.sign(g) for g in coeff.gamma.elements)


@lru_cache(maxsize=256)
def _coboundary_matrix(cover: EquivariantCover, p: int, signs: tuple) -> np.ndarray:
    rows = cells(cover, p + 1)
    index = _cell_index(cover, p)
    D = np.zeros((len(rows), len(index)), dtype=np.int64)
    for r, cell in enumerate(rows):
        for face, sgn, tw in _faces(cover, cell):
            s = sgn * (signs[tw] if tw is not None else 1)
            D[r, index[face]] += s
    D.setflags(write=False)
    return D


def coboundary_matrix(cover: EquivariantCover, p: int, coeff: GammaGroup | Sequence[int]) -> np.ndarray:
    """Integer matrix of delta: C^p -> C^{p+1} for a sign-twisted rank-one coefficient."""
    signs = tuple(coeff) if not isinstance(coeff, GammaGroup) else twist_signs(coeff)
    if p < 0:
        return np.zeros((len(cells(cover, 0)), 0), dtype=np.int64)
    return _coboundary_matrix(cover, p, signs)


# -- cochains ---------------------------------------------------------------------


class Cochain:
    """A degree-p cochain: one coefficient value per p-cell."""

    def __init__(self, cover: EquivariantCover, degree: int, coeff: GammaGroup, values: dict):
        self.cover = cover
        self.degree = degree
        self.coeff = coeff
        expected = cells(cover, degree)
        if set(values) != set(expected):
            missing = len(set(expected) - set(values))
            extra = len(set(values) - set(expected))
            raise DomainMismatch(f"cochain defined on the wrong cells ({missing} missing, {extra} extra)")
        self.values = {c: coeff.normalize(values[c]) for c in expected}

    @classmethod
    def from_function(cls, cover, degree, coeff, f: Callable) -> "Cochain":
        return cls(cover, degree, coeff, {c: f(c) for c in cells(cover, degree)})

    @classmethod
    def identity(cls, cover, degree, coeff) -> "Cochain":
        return cls.from_function(cover, degree, coeff, lambda c: coeff.identity())

    @classmethod
    def from_vector(cls, cover, degree, coeff, vec) -> "Cochain":
        cs = cells(cover, degree)
        if len(vec) != len(cs):
            raise DomainMismatch("vector length does not match the number of cells")
        return cls(cover, degree, coeff, dict(zip(cs, vec)))

    def __getitem__(self, cell):
        return self.values[cell]

    def at(self, gammas, idx, x):
        return self.values[(tuple(gammas), tuple(idx), x)]

    def vector(self) -> list:
        return [self.values[c] for c in cells(self.cover, self.degree)]

    def map(self, f: Callable, coeff: GammaGroup | None = None) -> "Cochain":
        return Cochain(self.cover, self.degree, coeff or self.coeff, {c: f(v) for c, v in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        if other.cover != self.cover or other.degree != self.degree:
            return False
        return all(self.coeff.eq(self.values[c], other.values[c]) for c in self.values)

    def is_identity(self) -> bool:
        e = self.coeff.identity()
        return all(self.coeff.eq(v, e) for v in self.values.values())

    def __add__(self, other: "Cochain") -> "Cochain":
        _same_domain(self, other)
        return Cochain(self.cover, self.degree, self.coeff, {c: self.coeff.mul(v, other.values[c]) for c, v in self.values.items()})

    def __neg__(self) -> "Cochain":
        return self.map(self.coeff.inv)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __repr__(self):
        return f"Cochain(degree={self.degree}, coeff={type(self.coeff).__name__}, cells={len(self.values)})"


def _same_domain(a: Cochain, b: Cochain):
    if a.cover != b.cover or a.degree != b.degree:
        raise DomainMismatch("cochains live on different covers or degrees")


def coboundary(c: Cochain, coeff: GammaGroup | None = None) -> Cochain:
    """delta c; non-abelian coefficients are accepted in degrees 0 and 1 only."""
    A = coeff or c.coeff
    p = c.degree
    cover = c.cover
    if not A.abelian:
        if p >= 2:
            raise NonAbelianCoefficient("coboundary of a non-abelian cochain of degree >= 2")
        return _nonabelian_coboundary(c, A)
    out = {}
    for cell in cells(cover, p + 1):
        acc = A.identity()
        for face, sgn, tw in _faces(cover, cell):
            v = c.values[face]
            if tw is not None:
                v = A.theta(tw, v)
            if sgn < 0:
                v = A.inv(v)
            acc = A.mul(acc, v)
        out[cell] = acc
    return Cochain(cover, p + 1, A, out)


def _nonabelian_coboundary(c: Cochain, A: GammaGroup) -> Cochain:
    cover = c.cover
    G = cover.group
    out = {}
    if c.degree == 0:
        # (delta s)(g; a, b; x) = s_b(g x) theta_g(s_a(x))^-1
        for cell in cells(cover, 1):
            (g,), (a, b), x = cell
            out[cell] = A.mul(c.values[((), (b,), cover.act(g, x))], A.inv(A.theta(g, c.values[((), (a,), x)])))
        return Cochain(cover, 1, A, out)
    for cell in cells(cover, 2):
        (g1, g2), (a, b, cc), x = cell
        x1 = cover.act(g1, x)
        first = c.values[((g2,), (b, cc), x1)]
        second = A.theta(g2, c.values[((g1,), (a, b), x)])
        whole = c.values[((G.mul(g2, g1),), (a, cc), x)]
        out[cell] = A.mul(A.mul(first, second), A.inv(whole))
    return Cochain(cover, 2, A, out)


def cocycle_condition(phi: Cochain, group: GammaGroup | None = None) -> bool:
    """phi_ca(g2 g1, x) = phi_cb(g2, g1 x) theta_g2(phi_ba(g1, x)) and phi_aa(e, x) = 1."""
    A = group or phi.coeff
    if phi.degree != 1:
        raise DomainMismatch("cocycle_condition applies to degree-1 cochains")
    cover = phi.cover
    G = cover.group
    e = A.identity()
    for x in range(cover.n_points):
        for a in cover.containing(x):
            if not A.eq(phi.values[((G.identity,), (a, a), x)], e):
                return False
    for cell in cells(cover, 2):
        (g1, g2), (a, b, c), x = cell
        lhs = phi.values[((G.mul(g2, g1),), (a, c), x)]
        rhs = A.mul(phi.values[((g2,), (b, c), cover.act(g1, x))], A.theta(g2, phi.values[((g1,), (a, b), x)]))
        if not A.eq(lhs, rhs):
            return False
    return True


# -- cohomology -------------------------------------------------------------------


@lru_cache(maxsize=512)
def _snf(cover, p, signs):
    return smith_form(coboundary_matrix(cover, p, signs))


@lru_cache(maxsize=512)
def _snf_right(cover, p, signs):
    return smith_form(coboundary_matrix(cover, p, signs), transforms="right")


@lru_cache(maxsize=512)
def _factors(cover, p, signs):
    return smith_form(coboundary_matrix(cover, p, signs), transforms=False).diag


@lru_cache(maxsize=512)
def _gf2(cover, p):
    return gf2_form(coboundary_matrix(cover, p, (1,) * cover.group.order) % 2)


@lru_cache(maxsize=512)
def _rank_q(cover, p, signs):
    if p < 0:
        return 0
    D = coboundary_matrix(cover, p, signs)
    if D.size == 0:
        return 0
    if D.shape[0] * D.shape[1] <= 40000:
        return len(_factors(cover, p, signs))
    return rank_rational(D)


def _frac_vec(values) -> list[Fraction]:
    return [Fraction(v) for v in values]


def _int_matvec(M, v):
    M = np.asarray(M)
    out = []
    for i in range(M.shape[0]):
        row = M[i]
        s = 0
        for j in np.nonzero(row)[0]:
            s += int(row[j]) * v[j]
        out.append(s)
    return out


@dataclass
class CohomologyGroup:
    """H^p_Gamma(X, (A, theta)) for A in {Z, Z/2, Q/Z} with a sign twist.

    ``factors`` are the orders of the cyclic summands of the finite part;
    ``free_rank`` counts Z summands (kind Z), Z/2 summands are all in
    ``factors`` (kind Z2), and ``divisible_rank`` counts Q/Z summands.
    """

    cover: EquivariantCover
    coeff: GammaGroup
    degree: int
    factors: list[int]
    free_rank: int = 0
    divisible_rank: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def kind(self) -> str:
        return self.coeff.kind

    @property
    def signs(self) -> tuple:
        return twist_signs(self.coeff)

    def order(self) -> int | None:
        if self.free_rank or self.divisible_rank:
            return None
        out = 1
        for d in self.factors:
            out *= d
        return out

    def invariant_factors(self) -> list[int]:
        return list(self.factors)

    def is_trivial(self) -> bool:
        return self.order() == 1

    def describe(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        if self.divisible_rank:
            parts.append("Q/Z" if self.divisible_rank == 1 else f"(Q/Z)^{self.divisible_rank}")
        parts += [f"Z/{d}" for d in self.factors]
        return " + ".join(parts) if parts else "0"

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coefficients": self.kind,
            "invariant_factors": list(self.factors),
            "free_rank": self.free_rank,
            "divisible_rank": self.divisible_rank,
            "order": self.order(),
            "description": self.describe(),
        }

    # -- coordinates ------------------------------------------------------------
    def _is_cocycle_vec(self, vec) -> bool:
        D = coboundary_matrix(self.cover, self.degree, self.signs)
        img = _int_matvec(D, vec)
        if self.kind == "Z":
            return all(v == 0 for v in img)
        if self.kind == "Z2":
            return all(v % 2 == 0 for v in img)
        return all(Fraction(v).denominator == 1 for v in img)

    def _vec(self, c: Cochain) -> list:
        if c.cover != self.cover or c.degree != self.degree:
            raise DomainMismatch("cochain does not belong to this cohomology group")
        if self.kind == "QZ":
            vals = _frac_vec(c.vector())
            bound = getattr(self.coeff, "denom", None)
            if bound is not None and any(bound % v.denominator for v in vals):
                raise DenominatorBoundExceeded(f"cochain values exceed the denominator bound {bound}")
            return [v - (v.numerator // v.denominator) for v in vals]
        if self.kind == "Z2":
            return [int(v) % 2 for v in c.vector()]
        return [int(v) for v in c.vector()]

    def coordinates(self, c: Cochain) -> tuple:
        """Canonical coordinates of the class of a cocycle (a tuple of ints / Fractions)."""
        vec = self._vec(c)
        if not self._is_cocycle_vec(vec):
            raise ValueError("cochain is not a cocycle")
        p, cover, signs = self.degree, self.cover, self.signs
        if self.kind == "Z":
            snf = _snf(cover, p - 1, signs) if p > 0 else None
            y = _int_matvec(snf.L, vec) if snf is not None else list(vec)
            r = snf.rank if snf is not None else 0
            tors = tuple(y[i] % d for i, d in enumerate(snf.diag) if d > 1) if snf is not None else ()
            free = self._free_coords(y[r:], r)
            return tors + free
        if self.kind == "Z2":
            f = _gf2(cover, p - 1) if p > 0 else None
            y = [v % 2 for v in _int_matvec(f.L, vec)] if f is not None else list(vec)
            r = f.rank if f is not None else 0
            return self._free_coords_gf2(y[r:], r)
        # Q/Z: Smith coordinates of the p-th coboundary
        snf = _snf_right(cover, p, signs)
        w = [Fraction(v) for v in _int_matvec(snf.Rinv, vec)]
        tors = tuple(int(snf.diag[i] * w[i]) % snf.diag[i] for i in range(snf.rank) if snf.diag[i] > 1)
        if self.divisible_rank == 0:
            return tors
        if p != 0:  # pragma: no cover - finite groupoids have no rational cohomology above 0
            raise NotImplementedError("divisible classes above degree 0")
        div = tuple((v - (v.numerator // v.denominator)) for v in w[snf.rank :])
        return tors + div

    def _free_coords(self, tail, r) -> tuple:
        if not self.free_rank:
            return ()
        B, snfB = self._free_basis(r)
        z = _int_matvec(snfB.Rinv, tail)
        return tuple(z[snfB.rank :])

    def _free_basis(self, r):
        key = ("free", r)
        if key not in self._cache:
            p, cover, signs = self.degree, self.cover, self.signs
            D = coboundary_matrix(cover, p, signs)
            if p > 0:
                Pinv = _snf(cover, p - 1, signs).Linv
                B = np.asarray(D, dtype=object) @ np.asarray(Pinv[:, r:], dtype=object)
            else:
                B = np.asarray(D, dtype=object)
            self._cache[key] = (B, smith_form(B))
        return self._cache[key]

    def _free_coords_gf2(self, tail, r) -> tuple:
        key = ("gf2", r)
        if key not in self._cache:
            p, cover = self.degree, self.cover
            D = coboundary_matrix(cover, p, (1,) * cover.group.order) % 2
            if p > 0:
                Pinv = _gf2(cover, p - 1).Linv.astype(np.int64)
                B = (D @ Pinv[:, r:]) % 2
            else:
                B = D
            self._cache[key] = gf2_form(B)
        fB = self._cache[key]
        z = [v % 2 for v in _int_matvec(fB.Rinv.astype(np.int64), tail)]
        return tuple(z[fB.rank :])

    def is_coboundary(self, c: Cochain) -> bool:
        vec = self._vec(c)
        p, cover, signs = self.degree, self.cover, self.signs
        if p == 0:
            if self.kind == "QZ":
                return all(v == 0 for v in vec)
            return all(v == 0 for v in vec)
        if self.kind == "Z2":
            f = _gf2(cover, p - 1)
            y = [v % 2 for v in _int_matvec(f.L, vec)]
            return all(v == 0 for v in y[f.rank :])
        snf = _snf(cover, p - 1, signs)
        y = _int_matvec(snf.L, vec)
        if self.kind == "Z":
            return all(v == 0 for v in y[snf.rank :]) and all(y[i] % d == 0 for i, d in enumerate(snf.diag))
        return all(Fraction(v).denominator == 1 for v in y[snf.rank :])

    def class_of(self, c: Cochain) -> "CohomologyClass":
        return CohomologyClass(self, self.coordinates(c), c)

    def zero(self) -> "CohomologyClass":
        return self.class_of(Cochain.identity(self.cover, self.degree, self.coeff))

    # -- generators -------------------------------------------------------------
    def generators(self) -> list[Cochain]:
        """Representative cocycles, one per cyclic summand, in coordinate order."""
        p, cover, signs = self.degree, self.cover, self.signs
        m = len(cells(cover, p))
        out = []
        if self.kind == "Z":
            if p > 0:
                snf = _snf(cover, p - 1, signs)
                Pinv, r = snf.Linv, snf.rank
                for i, d in enumerate(snf.diag):
                    if d > 1:
                        out.append([int(v) for v in Pinv[:, i]])
            else:
                Pinv, r = np.eye(m, dtype=np.int64), 0
            if self.free_rank:
                B, snfB = self._free_basis(r)
                for j in range(snfB.rank, B.shape[1]):
                    tail = [int(v) for v in snfB.R[:, j]]
                    vec = [sum(int(Pinv[k, r + t]) * tail[t] for t in range(len(tail))) for k in range(m)]
                    out.append(vec)
        elif self.kind == "Z2":
            if p > 0:
                f = _gf2(cover, p - 1)
                Pinv, r = f.Linv.astype(np.int64), f.rank
            else:
                Pinv, r = np.eye(m, dtype=np.int64), 0
            fB = self._free_coords_gf2_basis(r)
            for j in range(fB.rank, fB.shape[1]):
                tail = fB.R[:, j].astype(np.int64)
                out.append([int(v) % 2 for v in Pinv[:, r:] @ tail])
        else:
            snf = _snf_right(cover, p, signs)
            bound = getattr(self.coeff, "denom", None)
            for i, d in enumerate(snf.diag):
                if d > 1:
                    if bound is not None and bound % d:
                        raise DenominatorBoundExceeded(f"a Z/{d} generator needs denominator {d} > bound {bound}")
                    out.append([CircleRational.reduce(Fraction(int(v), d)) for v in snf.R[:, i]])
        return [Cochain.from_vector(cover, p, self.coeff, v) for v in out]

    def _free_coords_gf2_basis(self, r):
        self._free_coords_gf2([0] * (len(cells(self.cover, self.degree)) - r), r)
        return self._cache[("gf2", r)]

    def element(self, coords: Sequence[int]) -> Cochain:
        """The cocycle sum_i coords[i] * generator_i (finite summands only)."""
        gens = self.generators()
        if len(coords) != len(gens):
            raise ValueError(f"expected {len(gens)} coordinates")
        A = self.coeff
        acc = Cochain.identity(self.cover, self.degree, A)
        for k, g in zip(coords, gens):
            acc = acc + g.map(lambda v, k=k: A.normalize(k * v))
        return acc

    def enumerate_classes(self) -> list["CohomologyClass"]:
        if self.free_rank or self.divisible_rank:
            raise ValueError("group is infinite")
        ranges = [range(d) for d in self.factors]
        return [self.class_of(self.element(list(k))) for k in itertools.product(*ranges)]


@dataclass
class CohomologyClass:
    group: CohomologyGroup
    coords: tuple
    representative: Cochain

    @property
    def degree(self) -> int:
        return self.group.degree

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        return self.group.cover == other.group.cover and self.group.degree == other.group.degree and self.group.kind == other.group.kind and self.coords == other.coords

    def __hash__(self):
        return hash((self.group.degree, self.group.kind, self.coords))

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coefficients": self.group.kind,
            "coordinates": [str(c) for c in self.coords],
            "zero": self.is_zero(),
        }


_COH_CACHE: dict = {}


def cohomology(cover: EquivariantCover, coeff: GammaGroup, p: int) -> CohomologyGroup:
    """H^p with coefficients Z (sign twisted), Z/2 or Q/Z (sign twisted)."""
    if coeff.gamma != cover.group:
        raise CoverMismatch("coefficient group and cover use different Gamma")
    if p < 0:
        raise ValueError("degree must be non-negative")
    kind = coeff.kind
    signs = twist_signs(coeff) if kind in ("Z", "QZ", "Z2") else None
    if signs is None:
        raise NonAbelianCoefficient(f"cohomology needs Z, Z/2 or Q/Z coefficients, not {kind}")
    key = (cover, kind, signs, p, getattr(coeff, "denom", None))
    if key in _COH_CACHE:
        return _COH_CACHE[key]
    m = len(cells(cover, p))
    if kind == "Z":
        tors = [d for d in _factors(cover, p - 1, signs) if d > 1] if p > 0 else []
        free = m - _rank_q(cover, p, signs) - _rank_q(cover, p - 1, signs)
        grp = CohomologyGroup(cover, coeff, p, tors, free_rank=free)
    elif kind == "Z2":
        rp = _gf2(cover, p).rank
        rq = _gf2(cover, p - 1).rank if p > 0 else 0
        grp = CohomologyGroup(cover, coeff, p, [2] * (m - rp - rq))
    else:
        tors = [d for d in _factors(cover, p, signs) if d > 1]
        div = m - _rank_q(cover, p, signs) - _rank_q(cover, p - 1, signs)
        grp = CohomologyGroup(cover, coeff, p, tors, divisible_rank=div)
    _COH_CACHE[key] = grp
    return grp


# -- connecting maps --------------------------------------------------------------------


def _as_cochain_class(c, kind):
    if isinstance(c, CohomologyClass):
        return c.representative
    return c


def delta_exp(c) -> CohomologyClass:
    """Connecting map H^p(Q/Z, kappa) -> H^{p+1}(Z, iota): lift to [0,1), take delta."""
    rep = _as_cochain_class(c, "QZ")
    if rep.coeff.kind != "QZ":
        raise DomainMismatch("delta_exp takes a Q/Z-valued cocycle")
    G = rep.cover.group
    Z = IntegersTwisted(G, twisted=getattr(rep.coeff, "twisted", True))
    lift = {cell: Fraction(v) for cell, v in rep.values.items()}
    D = coboundary_matrix(rep.cover, rep.degree, twist_signs(rep.coeff))
    vec = [lift[cell] for cell in cells(rep.cover, rep.degree)]
    img = _int_matvec(D, vec)
    if any(v.denominator != 1 for v in img):
        raise ValueError("argument is not a cocycle")
    out = Cochain.from_vector(rep.cover, rep.degree + 1, Z, [int(v) for v in img])
    return cohomology(rep.cover, Z, rep.degree + 1).class_of(out)


def spin_lift(phi: Cochain) -> Cochain:
    """Cellwise Spin lift of an SO(n)-valued 1-cochain (first lift in canonical order).

    Cells over the identity with equal indices lift to 1.
    """
    if phi.degree != 1:
        raise DomainMismatch("spin_lift expects a degree-1 cochain")
    n = _so_dim(phi)
    G = phi.cover.group
    out = {}
    for cell, q in phi.values.items():
        (g,), (a, b), x = cell
        if g == G.identity and a == b:
            out[cell] = SpinElement.identity(n)
        else:
            try:
                out[cell] = lift_so(q)
            except UnliftableValue:
                raise
    return Cochain(phi.cover, 1, SpinGroup(G, n), out)


def _so_dim(phi: Cochain) -> int:
    if isinstance(phi.coeff, SOGroup):
        return phi.coeff.n
    first = next(iter(phi.values.values()))
    return np.asarray(first).shape[0]


def _central_signs(d: Cochain) -> dict:
    out = {}
    for cell, s in d.values.items():
        v = s.is_central()
        if v == 0:
            raise ValueError("coboundary of the lift is not central; input is not a cocycle")
        out[cell] = v
    return out


def delta_s(phi: Cochain, lift: Cochain | None = None) -> CohomologyClass:
    """[delta phi_s] in H^2(Z/2) for any Spin lift phi_s of phi."""
    lift = lift or spin_lift(phi)
    d = coboundary(lift)
    signs = _central_signs(d)
    Z2 = ZTwo(phi.cover.group)
    c = Cochain(phi.cover, 2, Z2, {cell: (0 if v == 1 else 1) for cell, v in signs.items()})
    return cohomology(phi.cover, Z2, 2).class_of(c)


def half_lift(psi: Cochain) -> Cochain:
    """t -> t/2 with t taken in [0, 1)."""
    return psi.map(lambda t: CircleRational.reduce(t) / 2)


def delta_u(psi: Cochain) -> CohomologyClass:
    """Connecting map of the squaring sequence Z/2 -> U(1) -> U(1)."""
    if psi.coeff.kind != "QZ" or psi.degree != 1:
        raise DomainMismatch("delta_u takes a degree-1 Q/Z cocycle")
    d = coboundary(half_lift(psi))
    Z2 = ZTwo(psi.cover.group)
    vals = {}
    for cell, v in d.values.items():
        v = CircleRational.reduce(v)
        if v not in (0, Fraction(1, 2)):
            raise ValueError("psi is not a cocycle")
        vals[cell] = 0 if v == 0 else 1
    return cohomology(psi.cover, Z2, 2).class_of(Cochain(psi.cover, 2, Z2, vals))


def delta_sc_cochain(phi: Cochain, lift: Cochain | None = None, denom: int = 16) -> Cochain:
    lift = lift or spin_lift(phi)
    signs = _central_signs(coboundary(lift))
    QZ = CircleRational(phi.cover.group, denom)
    return Cochain(phi.cover, 2, QZ, {cell: (Fraction(0) if v == 1 else Fraction(1, 2)) for cell, v in signs.items()})


def delta_sc(phi: Cochain, lift: Cochain | None = None, denom: int = 16) -> CohomologyClass:
    """Lift to Spin^c with zero circle part; the class of its coboundary in H^2(U(1), kappa)."""
    c = delta_sc_cochain(phi, lift, denom)
    return cohomology(phi.cover, c.coeff, 2).class_of(c)


# -- cocycle operations -------------------------------------------------------------


def pullback(
    phi: Cochain,
    new_cover: EquivariantCover,
    point_map: Sequence[int] | None = None,
    hom: Sequence[int] | None = None,
    coeff: GammaGroup | None = None,
) -> Cochain:
    """Pull a degree-p cochain back along (hom, point_map): (Gamma', Y) -> (Gamma, X).

    The new cover must be f^* of the old one with the same index set:
    its sets are f^-1(U_a).  Values: phi'(gammas', idx, y) = phi(hom(gammas'), idx, f(y)).
    """
    old = phi.cover
    f = list(point_map) if point_map is not None else list(range(new_cover.n_points))
    pi = list(hom) if hom is not None else list(range(new_cover.group.order))
    if len(f) != new_cover.n_points or len(pi) != new_cover.group.order:
        raise CoverMismatch("maps have the wrong length")
    for g in new_cover.group.elements:
        for y in range(new_cover.n_points):
            if f[new_cover.act(g, y)] != old.act(pi[g], f[y]):
                raise CoverMismatch("point map is not equivariant")
    for g1, g2 in itertools.product(new_cover.group.elements, repeat=2):
        if pi[new_cover.group.mul(g1, g2)] != old.group.mul(pi[g1], pi[g2]):
            raise CoverMismatch("group map is not a homomorphism")
    if len(new_cover.sets) != len(old.sets) or any(
        new_cover.sets[a] != frozenset(y for y in range(new_cover.n_points) if f[y] in old.sets[a]) for a in range(len(old.sets))
    ):
        raise CoverMismatch("new cover is not the pulled-back cover")
    target = coeff or _rebase(phi.coeff, new_cover.group)
    vals = {}
    for cell in cells(new_cover, phi.degree):
        gammas, idx, y = cell
        vals[cell] = phi.values[(tuple(pi[g] for g in gammas), idx, f[y])]
    return Cochain(new_cover, phi.degree, target, vals)


def pullback_cover(cover: EquivariantCover, new_group: FiniteGroup, hom: Sequence[int]) -> EquivariantCover:
    """Same space and sets with the action extended through a homomorphism new_group -> group."""
    pa = tuple(cover.point_action[hom[g]] for g in new_group.elements)
    ia = tuple(cover.index_action[hom[g]] for g in new_group.elements) if cover.index_action else None
    return EquivariantCover(new_group, cover.n_points, pa, cover.sets, ia)


def _rebase(coeff: GammaGroup, gamma: FiniteGroup) -> GammaGroup:
    """Same coefficient kind over another Gamma."""
    if isinstance(coeff, SOGroup):
        return SOGroup(gamma, coeff.n)
    if isinstance(coeff, SpinGroup):
        return SpinGroup(gamma, coeff.n)
    if isinstance(coeff, GLGroup):
        return GLGroup(gamma, coeff.m, coeff.tol)
    if isinstance(coeff, CircleRational):
        return CircleRational(gamma, coeff.denom, coeff.twisted)
    if isinstance(coeff, ZTwo):
        return ZTwo(gamma)
    if isinstance(coeff, IntegersTwisted):
        return IntegersTwisted(gamma, coeff.twisted)
    raise CoverMismatch(f"cannot move {type(coeff).__name__} to another group")


def _gl(phi: Cochain) -> GLGroup:
    if not isinstance(phi.coeff, GLGroup):
        raise DomainMismatch("matrix-valued (GL) cochain expected")
    return phi.coeff


def dual(phi: Cochain) -> Cochain:
    """Transpose-inverse of every value."""
    A = _gl(phi)
    return phi.map(lambda m: np.asarray(A.inv(m)).T.copy())


def direct_sum(phi1: Cochain, phi2: Cochain) -> Cochain:
    A1, A2 = _gl(phi1), _gl(phi2)
    if phi1.cover != phi2.cover or phi1.degree != phi2.degree:
        raise CoverMismatch("direct sum needs cochains on the same cover")
    m1, m2 = A1.m, A2.m
    out = GLGroup(phi1.cover.group, m1 + m2, A1.tol)

    def block(a, b):
        a, b = np.asarray(a), np.asarray(b)
        dtype = object if a.dtype == object or b.dtype == object else np.result_type(a, b, complex)
        z = np.zeros((m1 + m2, m1 + m2), dtype=dtype)
        if dtype is object:
            z[:] = 0
        z[:m1, :m1] = a
        z[m1:, m1:] = b
        return z

    return Cochain(phi1.cover, phi1.degree, out, {c: block(phi1.values[c], phi2.values[c]) for c in phi1.values})


def tensor(phi1: Cochain, phi2: Cochain) -> Cochain:
    A1, A2 = _gl(phi1), _gl(phi2)
    if phi1.cover != phi2.cover or phi1.degree != phi2.degree:
        raise CoverMismatch("tensor product needs cochains on the same cover")
    out = GLGroup(phi1.cover.group, A1.m * A2.m, A1.tol)
    return Cochain(phi1.cover, phi1.degree, out, {c: np.kron(np.asarray(phi1.values[c]), np.asarray(phi2.values[c])) for c in phi1.values})


def gauge_transform(phi: Cochain, g: Cochain) -> Cochain:
    """phi'_ba(gamma, x) = g_b(gamma x)^-1 phi_ba(gamma, x) theta_gamma(g_a(x))."""
    if g.degree != 0 or phi.degree != 1 or g.cover != phi.cover:
        raise DomainMismatch("gauge transform takes a 1-cochain and a 0-cochain on one cover")
    A = phi.coeff
    cover = phi.cover
    out = {}
    for cell, v in phi.values.items():
        (gam,), (a, b), x = cell
        left = A.inv(g.values[((), (b,), cover.act(gam, x))])
        right = A.theta(gam, g.values[((), (a,), x)])
        out[cell] = A.mul(A.mul(left, v), right)
    return Cochain(cover, 1, A, out)


def iter_cochains(cover: EquivariantCover, degree: int, coeff: GammaGroup) -> Iterable[Cochain]:
    """Every cochain with values in a finite carrier (use on tiny covers only)."""
    cs = cells(cover, degree)
    for vals in itertools.product(coeff.elements(), repeat=len(cs)):
        yield Cochain(cover, degree, coeff, dict(zip(cs, vals)))
