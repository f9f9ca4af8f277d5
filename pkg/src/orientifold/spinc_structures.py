"""Spin^k structures: the W3 obstruction, lift searches and the trivial-extension checks.

Every search works with a fixed Spin lift phi_s of the frame cocycle and a
circle-valued cochain u: the Spin^c cochain [phi_s, u] is a cocycle iff
delta u = c, where c is 1/2 on the cells with delta phi_s = -1 and 0 elsewhere.
The sign ambiguity of phi_s is absorbed by [-s, z] = [s, z + 1/2].
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator

import numpy as np

from .cech import (
    Cochain,
    CohomologyClass,
    EquivariantCover,
    cells,
    coboundary_matrix,
    cocycle_condition,
    cohomology,
    delta_exp,
    delta_s,
    delta_sc_cochain,
    delta_u,
    half_lift,
    pullback,
    pullback_cover,
    spin_lift,
)
from .errors import BudgetExceeded, DomainMismatch
from .groups import CircleRational, FiniteGroup, IntegersTwisted, ZTwo, direct_product, preset_group
from .intlinalg import gf2_form, smith_form, solve_mod_integers
from .spin import SOGroup, SpincElement, SpincGroup, adc

__all__ = [
    "SpinkProblem",
    "ObstructionReport",
    "compute_w3",
    "find_spinc_lift",
    "soucond_check",
    "extend_to_qxl",
    "trivial_extension",
    "TrivialExtension",
    "w2_in_image_of_delta_u",
    "bundle_cocycle",
    "enumerate_circle_cocycles",
    "DEFAULT_BUDGET",
    "DEFAULT_DENOM",
]

DEFAULT_DENOM = 8


def _default_budget() -> int:
    return int(os.environ.get("ORIENTIFOLD_BUDGET", 1 << 20))


DEFAULT_BUDGET = _default_budget()


@dataclass
class SpinkProblem:
    """An SO(n)-valued frame cocycle over an equivariant cover."""

    cover: EquivariantCover
    phi: Cochain
    n: int

    def __post_init__(self):
        if self.phi.cover != self.cover or self.phi.degree != 1:
            raise DomainMismatch("phi must be a degree-1 cochain on the given cover")
        if not isinstance(self.phi.coeff, SOGroup):
            self.phi = Cochain(self.cover, 1, SOGroup(self.cover.group, self.n), self.phi.values)
        if not cocycle_condition(self.phi):
            raise DomainMismatch("phi does not satisfy the cocycle condition")

    @property
    def group(self) -> FiniteGroup:
        return self.cover.group

    @classmethod
    def from_table(cls, cover: EquivariantCover, n: int, table) -> "SpinkProblem":
        """``table`` maps each 1-cell (or, over a one-set point cover, each group element) to a matrix."""
        coeff = SOGroup(cover.group, n)
        vals = {}
        for cell in cells(cover, 1):
            key = cell if cell in table else cell[0][0]
            vals[cell] = np.asarray(table[key])
        return cls(cover, Cochain(cover, 1, coeff, vals), n)

    @classmethod
    def identity(cls, cover: EquivariantCover, n: int) -> "SpinkProblem":
        return cls(cover, Cochain.identity(cover, 1, SOGroup(cover.group, n)), n)


@dataclass
class ObstructionReport:
    delta_sc: CohomologyClass
    w3: CohomologyClass
    exists: bool
    certificate: Cochain | None
    classification_order: int | None
    h3_description: str = ""

    def as_dict(self) -> dict:
        return {
            "w3": [str(c) for c in self.w3.coords],
            "w3_group": self.h3_description,
            "delta_sc": [str(c) for c in self.delta_sc.coords],
            "exists": self.exists,
            "certificate": cochain_table(self.certificate) if self.certificate is not None else None,
            "classification_order": self.classification_order,
        }


def cochain_table(c: Cochain) -> list:
    """JSON-friendly listing of a cochain, one entry per cell."""
    from .clifford import format_multivector

    out = []
    for cell, v in c.values.items():
        gammas, idx, x = cell
        labels = [c.cover.group.labels[g] for g in gammas]
        if isinstance(v, SpincElement):
            val = {"spin": format_multivector(v.s.mv), "circle": str(v.z)}
        elif isinstance(v, np.ndarray):
            val = [[str(e) for e in row] for row in v.tolist()]
        else:
            val = str(v)
        out.append({"gammas": labels, "indices": list(idx), "point": x, "value": val})
    return out


# -- the linear problem behind every search -------------------------------------------


def _target(problem: SpinkProblem, lift: Cochain | None = None):
    lift = lift or spin_lift(problem.phi)
    c = delta_sc_cochain(problem.phi, lift)
    return lift, c


def compute_w3(problem: SpinkProblem) -> ObstructionReport:
    """W3 = Delta_exp(Delta_sc(phi)); when it vanishes a certificate lift is solved for."""
    cover = problem.cover
    G = cover.group
    lift, c = _target(problem)
    dsc = cohomology(cover, c.coeff, 2).class_of(c)
    w3 = delta_exp(dsc)
    h2 = cohomology(cover, IntegersTwisted(G), 2)
    exists = w3.is_zero()
    cert = None
    if exists:
        u = _solve_circle(cover, c)
        if u is None:  # pragma: no cover - W3 = 0 guarantees a rational solution
            raise AssertionError("W3 vanishes but no circle cochain solves delta u = c")
        cert = _assemble(problem, lift, u)
    return ObstructionReport(dsc, w3, exists, cert, h2.order(), w3.group.describe())


def _solve_circle(cover: EquivariantCover, c: Cochain):
    """Rational u on 1-cells with delta u = c mod 1 and u = 0 on identity cells."""
    signs = tuple(c.coeff.sign(g) for g in cover.group.elements)
    snf = _snf_d1(cover, signs)
    sol = solve_mod_integers(snf, [Fraction(v) for v in c.vector()])
    if sol is None:
        return None
    one_cells = cells(cover, 1)
    # identity cells: delta u on (e, e | a, a, a) equals u(e | a, a), so they are integral already
    return {cell: CircleRational.reduce(v) for cell, v in zip(one_cells, sol)}


_SNF_CACHE: dict = {}


def _snf_d1(cover, signs):
    key = (cover, signs)
    if key not in _SNF_CACHE:
        _SNF_CACHE[key] = smith_form(coboundary_matrix(cover, 1, signs))
    return _SNF_CACHE[key]


def _assemble(problem: SpinkProblem, lift: Cochain, u: dict) -> Cochain:
    vals = {cell: SpincElement(lift.values[cell], u[cell]) for cell in cells(problem.cover, 1)}
    out = Cochain(problem.cover, 1, SpincGroup(problem.group, problem.n), vals)
    if not cocycle_condition(out):  # pragma: no cover - guarded by construction
        raise AssertionError("assembled Spin^c cochain is not a cocycle")
    return out


# -- exhaustive search over (1/denom) Z / Z ------------------------------------------------


class _Solver:
    """Backtracking over circle values for delta u = target (mod denom), with propagation.

    Constraints are ``sum coef * u[var] = rhs (mod denom)``, one per 2-cell.
    """

    def __init__(self, cover: EquivariantCover, signs, target: dict, denom: int, budget: int):
        self.cover = cover
        self.denom = denom
        G = cover.group
        one = cells(cover, 1)
        self.vars = [cell for cell in one if not (cell[0][0] == G.identity and cell[1][0] == cell[1][1])]
        self.fixed = {cell: 0 for cell in one if cell not in set(self.vars)}
        space = denom ** len(self.vars)
        if space > budget:
            raise BudgetExceeded(f"search space {denom}^{len(self.vars)} exceeds the budget {budget}")
        pos = {cell: k for k, cell in enumerate(self.vars)}
        self.constraints = []
        self.watch = [[] for _ in self.vars]
        for cell in cells(cover, 2):
            (g1, g2), (a, b, c), x = cell
            terms = [
                (((g2,), (b, c), cover.act(g1, x)), 1),
                (((g1,), (a, b), x), signs[g2]),
                (((G.mul(g2, g1),), (a, c), x), -1),
            ]
            rhs = target[cell] % denom
            coefs: dict[int, int] = {}
            for t, s in terms:
                if t in pos:
                    coefs[pos[t]] = (coefs.get(pos[t], 0) + s) % denom
                else:
                    rhs = (rhs - s * self.fixed[t]) % denom
            coefs = {k: v for k, v in coefs.items() if v}
            if not coefs:
                if rhs:
                    self.constraints = None
                    return
                continue
            k = len(self.constraints)
            self.constraints.append((coefs, rhs))
            for v in coefs:
                self.watch[v].append(k)

    def solutions(self) -> Iterator[list[int]]:
        if self.constraints is None:
            return
        vals: list[int | None] = [None] * len(self.vars)
        yield from self._search(vals)

    def _propagate(self, vals, start: list[int], trail: list[int]) -> bool:
        queue = list(start)
        d = self.denom
        while queue:
            v = queue.pop()
            for k in self.watch[v]:
                coefs, rhs = self.constraints[k]
                free = [w for w in coefs if vals[w] is None]
                if not free:
                    if sum(c * vals[w] for w, c in coefs.items()) % d != rhs:
                        return False
                    continue
                if len(free) == 1:
                    w = free[0]
                    a = coefs[w]
                    rest = (rhs - sum(c * vals[u] for u, c in coefs.items() if u != w)) % d
                    if gcd(a, d) == 1:
                        vals[w] = (rest * pow(a, -1, d)) % d
                        trail.append(w)
                        queue.append(w)
                    elif rest % gcd(a, d):
                        return False
        return True

    def _search(self, vals):
        try:
            k = vals.index(None)
        except ValueError:
            yield list(vals)
            return
        for t in range(self.denom):
            trail = [k]
            vals[k] = t
            if self._propagate(vals, [k], trail):
                yield from self._search(vals)
            for w in trail:
                vals[w] = None

    def cochain_values(self, sol: list[int]) -> dict:
        out = {cell: Fraction(0) for cell in self.fixed}
        for cell, t in zip(self.vars, sol):
            out[cell] = Fraction(t, self.denom)
        return out


def _check_denom(denom: int):
    if denom < 2 or denom % 2:
        raise ValueError("the denominator bound must be an even integer >= 2")


def find_spinc_lift(problem: SpinkProblem, denom_bound: int = DEFAULT_DENOM, budget: int | None = None) -> Cochain | None:
    """First Spin^c cocycle lifting phi with circle values in (1/denom_bound) Z / Z, or None."""
    _check_denom(denom_bound)
    budget = DEFAULT_BUDGET if budget is None else budget
    lift, c = _target(problem)
    cover = problem.cover
    signs = tuple(problem.group.eps(g) for g in problem.group.elements)
    target = {cell: int(v * denom_bound) for cell, v in c.values.items()}
    solver = _Solver(cover, signs, target, denom_bound, budget)
    for sol in solver.solutions():
        return _assemble(problem, lift, solver.cochain_values(sol))
    return None


def enumerate_circle_cocycles(cover: EquivariantCover, denom_bound: int = DEFAULT_DENOM, budget: int | None = None) -> Iterator[Cochain]:
    """All degree-1 (Q/Z, kappa) cocycles with values in (1/denom_bound) Z / Z."""
    budget = DEFAULT_BUDGET if budget is None else budget
    G = cover.group
    signs = tuple(G.eps(g) for g in G.elements)
    target = {cell: 0 for cell in cells(cover, 2)}
    solver = _Solver(cover, signs, target, denom_bound, budget)
    QZ = CircleRational(G, max(denom_bound, 2))
    for sol in solver.solutions():
        yield Cochain(cover, 1, QZ, solver.cochain_values(sol))


def soucond_check(problem: SpinkProblem, denom_bound: int = DEFAULT_DENOM, budget: int | None = None):
    """Search psi with Delta_u(psi) = Delta_s(phi); return (found, psi, certificate).

    When found, the certificate is [phi_s, psi/2 + phi'/2] with phi' a Z/2
    cochain whose coboundary is the difference of the two Z/2 cocycles.
    """
    _check_denom(denom_bound)
    lift = spin_lift(problem.phi)
    ds = delta_s(problem.phi, lift)
    for psi in enumerate_circle_cocycles(problem.cover, denom_bound, budget):
        du = delta_u(psi)
        if du.coords == ds.coords:
            cert = _soucond_certificate(problem, lift, ds, du, psi)
            return True, psi, cert
    return False, None, None


def _soucond_certificate(problem, lift, ds, du, psi) -> Cochain:
    cover = problem.cover
    diff = [(a + b) % 2 for a, b in zip(ds.representative.vector(), du.representative.vector())]
    D = coboundary_matrix(cover, 1, (1,) * cover.group.order) % 2
    f = gf2_form(D)
    y = (f.L.astype(np.int64) @ np.array(diff, dtype=np.int64)) % 2
    if y[f.rank :].any():  # pragma: no cover - equal classes differ by a coboundary
        raise AssertionError("classes agree but the difference is not a coboundary")
    w = np.zeros(D.shape[1], dtype=np.int64)
    w[: f.rank] = y[: f.rank]
    phi_prime = (f.R.astype(np.int64) @ w) % 2
    half = half_lift(psi)
    u = {}
    for cell, p in zip(cells(cover, 1), phi_prime):
        u[cell] = CircleRational.reduce(half.values[cell] + Fraction(int(p), 2))
    return _assemble(problem, lift, u)


def extend_to_qxl(lift: Cochain):
    """(Ad(phi_s), phi_u^2) for a Spin^c cocycle [phi_s, phi_u]."""
    if not isinstance(lift.coeff, SpincGroup):
        raise DomainMismatch("a Spin^c-valued cocycle is expected")
    cover = lift.cover
    n = lift.coeff.n
    so = Cochain(cover, 1, SOGroup(cover.group, n), {cell: adc(v) for cell, v in lift.values.items()})
    circle = Cochain(cover, 1, CircleRational(cover.group), {cell: CircleRational.reduce(2 * v.z) for cell, v in lift.values.items()})
    if not cocycle_condition(circle):  # pragma: no cover - squaring a cocycle gives a cocycle
        raise AssertionError("phi_u^2 is not a cocycle")
    return so, circle


# -- trivial extensions ---------------------------------------------------------------------


def bundle_cocycle(cover: EquivariantCover, n: int, rho, frames) -> Cochain:
    """Transition cocycle of X x R^n with g(x, v) = (gx, rho(g, x) v) and local frames.

    phi_ba(g, x) = F_b(gx)^-1 rho(g, x) F_a(x), where F_a(x) = frames(a, x).
    """
    coeff = SOGroup(cover.group, n)
    vals = {}
    for cell in cells(cover, 1):
        (g,), (a, b), x = cell
        gx = cover.act(g, x)
        vals[cell] = coeff.mul(coeff.mul(coeff.inv(frames(b, gx)), rho(g, x)), frames(a, x))
    return Cochain(cover, 1, coeff, vals)


@dataclass
class TrivialExtension:
    h_cover: EquivariantCover
    h_phi: Cochain
    problem: SpinkProblem
    projection: list[int]
    w2_h: CohomologyClass
    pulled_w2: CohomologyClass
    delta_s_pulled: CohomologyClass
    statements: dict = field(default_factory=dict)

    def statement2(self) -> bool:
        return self.pulled_w2.coords == self.delta_s_pulled.coords


def trivial_extension(h_cover: EquivariantCover, h_phi: Cochain, n: int | None = None) -> TrivialExtension:
    """Gamma = Z2 x H with eps(z, h) = z acting through H; phi is pulled back along pi(z, h) = h."""
    H = h_cover.group
    n = n or h_phi.coeff.n
    z2 = preset_group("z2")
    gamma = direct_product(z2, H, eps_from="first")
    proj = [g % H.order for g in gamma.elements]
    cover = pullback_cover(h_cover, gamma, proj)
    phi = pullback(h_phi, cover, hom=proj, coeff=SOGroup(gamma, n))
    problem = SpinkProblem(cover, phi, n)
    h_lift = spin_lift(h_phi)
    w2 = delta_s(h_phi, h_lift)
    pulled = pullback(w2.representative, cover, hom=proj, coeff=ZTwo(gamma))
    pulled_cls = cohomology(cover, ZTwo(gamma), 2).class_of(pulled)
    ds = delta_s(phi)
    return TrivialExtension(h_cover, h_phi, problem, proj, w2, pulled_cls, ds)


def w2_in_image_of_delta_u(ext: TrivialExtension, denom_bound: int = DEFAULT_DENOM, budget: int | None = None):
    """Statement (3) side: some psi with Delta_u(psi) = pi^* w2^H."""
    for psi in enumerate_circle_cocycles(ext.problem.cover, denom_bound, budget):
        if delta_u(psi).coords == ext.pulled_w2.coords:
            return psi
    return None
