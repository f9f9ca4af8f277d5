"""Associated bundles, averaged metrics and connections, and the lattice Dirac operator.

Lattice conventions.  Sites of the periodic lattice (Z/N)^d are flattened
row-major.  Spinor fields take values in Cl^c_d (the total spinor model),
stored as coefficient vectors indexed by blade bitmask, and the Clifford
algebra acts by left multiplication.  With links U_mu(x) on the edge
x -> x + mu the covariant central difference is

    (nabla_mu psi)(x) = (U_mu(x) psi(x + mu) - U_mu(x - mu)^-1 psi(x - mu)) / 2

and D = sum_mu e_mu nabla_mu.  An element gamma acts on fields by
(gamma psi)(sigma_gamma x) = S_gamma kappa_gamma(psi(x)), with S_gamma in
Spin^c(d) lifting the differential of sigma_gamma.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .clifford import MultiVector, blade_sign, build_gamma_rep
from .errors import (
    ActionDoesNotLift,
    DimensionMismatch,
    IncompatibleFibers,
    NotPositiveDefinite,
    ReducedModelHasNoRightAction,
    TooLarge,
)
from .exactmat import conj as mat_conj
from .exactmat import exact_det, to_complex
from .groups import FiniteGroup, preset_group
from .numbers import Exact
from .spin import SpincElement, SpinElement, lift_so

__all__ = [
    "left_matrix",
    "right_matrix",
    "LatticeAction",
    "lattice_action",
    "LatticeDiracModel",
    "dirac_apply",
    "act_on_field",
    "dirac_left_equivariance_residual",
    "dirac_right_equivariance_check",
    "covariant_derivative",
    "derivative_equivariance_residual",
    "spectrum",
    "fourier_spectrum",
    "spectrum_symmetry",
    "average_metric",
    "metric_identity_residual",
    "SemiEquivariantConnection",
    "average_connection",
    "connection_axiom_residuals",
    "FiniteBundleModel",
    "SectionMap",
    "clifford_mul_sections",
    "right_clifford_action",
    "MAX_OPERATOR_DIM",
]

MAX_OPERATOR_DIM = 4096


# -- Clifford algebra as matrices -------------------------------------------------------


def left_matrix(a: MultiVector, exact: bool = False) -> np.ndarray:
    """Matrix of v -> a v on Cl^c_n in the bitmask basis."""
    return _mult_matrix(a, exact, left=True)


def right_matrix(a: MultiVector, exact: bool = False) -> np.ndarray:
    """Matrix of v -> v a on Cl^c_n in the bitmask basis."""
    return _mult_matrix(a, exact, left=False)


def _mult_matrix(a: MultiVector, exact: bool, left: bool) -> np.ndarray:
    dim = 1 << a.n
    if exact:
        out = np.empty((dim, dim), dtype=object)
        out[:] = 0
    else:
        out = np.zeros((dim, dim), dtype=complex)
    for m_in in range(dim):
        for ma, c in a.terms.items():
            s = blade_sign(ma, m_in) if left else blade_sign(m_in, ma)
            v = c if s > 0 else -c
            out[ma ^ m_in, m_in] += v if exact else complex(v)
    return out


def _mv_vector(a: MultiVector, exact: bool) -> np.ndarray:
    dim = 1 << a.n
    if exact:
        out = np.empty(dim, dtype=object)
        out[:] = 0
        for m, c in a.terms.items():
            out[m] = c
        return out
    return a.as_array().astype(complex)


def _theta(sign: int, m):
    """Entrywise complex conjugation for sign -1 (kappa on Cl^c in the real blade basis)."""
    if sign == 1:
        return m
    return mat_conj(m)


# -- lattice and group action -------------------------------------------------------------


def _sites(d: int, N: int) -> list[tuple]:
    return list(itertools.product(range(N), repeat=d))


def _flat(x: Sequence[int], N: int) -> int:
    k = 0
    for c in x:
        k = k * N + (c % N)
    return k


@dataclass
class LatticeAction:
    """A finite group acting on (Z/N)^d by affine maps x -> A x + t with spinor lifts.

    ``perms[g]`` is sigma_g on flattened sites, ``linear[g]`` the signed
    permutation A_g, ``spinor[g]`` the Spin^c lift S_g and ``eps`` the
    orientifold sign.
    """

    group: FiniteGroup
    d: int
    N: int
    perms: list
    linear: list
    spinor: list
    name: str = ""

    def eps(self, g: int) -> int:
        return self.group.eps(g)

    def spinor_matrix(self, g: int, exact: bool = False) -> np.ndarray:
        return left_matrix(self.spinor[g].to_multivector(), exact)

    def inverse_perm(self, g: int) -> list[int]:
        p = self.perms[g]
        out = [0] * len(p)
        for x, y in enumerate(p):
            out[y] = x
        return out


def _affine_perm(d, N, A, t):
    perm = []
    for x in _sites(d, N):
        y = [sum(A[i][j] * x[j] for j in range(d)) + t[i] for i in range(d)]
        perm.append(_flat(y, N))
    return perm


def _matpow(A, k):
    d = len(A)
    out = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    for _ in range(k):
        out = [[sum(out[i][m] * A[m][j] for m in range(d)) for j in range(d)] for i in range(d)]
    return out


def lattice_action(d: int, N: int, group: str | FiniteGroup = "z2", kind: str = "antipodal") -> LatticeAction:
    """Actions of a cyclic orientifold group on the torus through one generator.

    kind "antipodal": the generator translates the first axis by N/2.
    kind "inversion": the generator acts by x -> -x.
    kind "trivial": every element fixes every site.
    The generator's spinor lift S is searched among [s, z] with s a Spin lift
    of the linear part and z in (1/8)Z/Z, subject to the cocycle law
    S_{gh} = S_g kappa_g(S_h); ActionDoesNotLift when nothing works.
    """
    G = preset_group(group) if isinstance(group, str) else group
    if d not in (1, 2):
        raise DimensionMismatch("lattice models exist for d = 1 and d = 2")
    gen = _generator(G)
    order = G.element_order(gen)
    if kind == "antipodal":
        if N % 2:
            raise DimensionMismatch("the antipodal action needs even N")
        A = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        t = [N // 2] + [0] * (d - 1)
    elif kind == "inversion":
        A = [[-1 if i == j else 0 for j in range(d)] for i in range(d)]
        t = [0] * d
        if d == 1:
            raise ActionDoesNotLift("x -> -x reverses the orientation of the circle; it has no Spin^c lift")
    elif kind == "trivial":
        A = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        t = [0] * d
    else:
        raise ValueError(f"unknown action kind {kind!r}")
    spin_lifts = _spin_lifts_of(A)
    for s in spin_lifts:
        for k in range(8):
            S = SpincElement(s, Fraction(k, 8))
            table = _cocycle_from_generator(G, gen, order, S)
            if table is not None:
                break
        else:
            continue
        break
    else:
        raise ActionDoesNotLift(f"the {kind} action of {len(G.elements)} elements has no Spin^c lift satisfying the cocycle law")
    perms, linear, spinor = [None] * G.order, [None] * G.order, [None] * G.order
    g = G.identity
    for k in range(order):
        Ak = _matpow(A, k)
        tk = [0] * d
        for _ in range(k):  # t_{k+1} = A t_k + t
            tk = [sum(A[i][j] * tk[j] for j in range(d)) + t[i] for i in range(d)]
        perms[g] = _affine_perm(d, N, Ak, tk)
        linear[g] = Ak
        spinor[g] = table[g]
        g = G.mul(gen, g)
    if any(p is None for p in perms):
        raise ValueError("the group must be cyclic for a one-generator action")
    act = LatticeAction(G, d, N, perms, linear, spinor, kind)
    _check_action(act)
    return act


def _generator(G: FiniteGroup) -> int:
    for g in G.elements:
        if G.element_order(g) == G.order:
            return g
    raise ValueError("lattice actions are implemented for cyclic groups")


def _spin_lifts_of(A) -> list[SpinElement]:
    d = len(A)
    M = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            M[i, j] = A[i][j]
    s = lift_so(M)
    return [s, -s]


def _cocycle_from_generator(G, gen, order, S):
    table = {G.identity: SpincElement.identity(S.n)}
    g = G.identity
    cur = table[g]
    for _ in range(order):
        # S_{gen * g} = S_gen kappa_gen(S_g)
        nxt = S * cur.kappa(G.eps(gen))
        g = G.mul(gen, g)
        if g == G.identity:
            return table if nxt == table[G.identity] else None
        table[g] = nxt
        cur = nxt
    return None  # pragma: no cover


def _check_action(act: LatticeAction) -> None:
    G = act.group
    for g, h in itertools.product(G.elements, repeat=2):
        lhs = act.spinor[G.mul(g, h)]
        rhs = act.spinor[g] * act.spinor[h].kappa(G.eps(g))
        if lhs != rhs:
            raise ActionDoesNotLift("spinor lifts violate S_gh = S_g kappa_g(S_h)")


# -- the Dirac model -------------------------------------------------------------------------


@dataclass
class LatticeDiracModel:
    """Periodic lattice, total spinor fibre Cl^c_d, links U[mu][x] as left-multiplication matrices."""

    d: int
    N: int
    action: LatticeAction
    links: list | None = None
    exact: bool = False
    _ops: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.d not in (1, 2):
            raise DimensionMismatch("d must be 1 or 2")
        if self.action.d != self.d or self.action.N != self.N:
            raise DimensionMismatch("action and lattice disagree")
        if self.links is not None and self.exact:
            self.links = [np.asarray(u, dtype=object) for u in self.links]

    @property
    def fibre_dim(self) -> int:
        return 1 << self.d

    @property
    def n_sites(self) -> int:
        return self.N**self.d

    @property
    def dim(self) -> int:
        return self.n_sites * self.fibre_dim

    def gamma_matrix(self, mu: int) -> np.ndarray:
        key = ("e", mu)
        if key not in self._ops:
            self._ops[key] = left_matrix(MultiVector.basis(self.d, mu + 1, complexified=True), self.exact)
        return self._ops[key]

    def shift(self, mu: int, step: int) -> np.ndarray:
        """Index array x -> x + step * e_mu."""
        key = ("shift", mu, step)
        if key not in self._ops:
            out = []
            for x in _sites(self.d, self.N):
                y = list(x)
                y[mu] += step
                out.append(_flat(y, self.N))
            self._ops[key] = np.array(out)
        return self._ops[key]

    def link_inverse(self, mu: int) -> np.ndarray:
        key = ("uinv", mu)
        if key not in self._ops:
            U = self.links[mu]
            if self.exact:
                from .exactmat import exact_inverse

                self._ops[key] = np.array([exact_inverse(u) for u in U], dtype=object)
            else:
                self._ops[key] = np.conj(np.transpose(U, (0, 2, 1)))
        return self._ops[key]

    def zero_field(self) -> np.ndarray:
        if self.exact:
            out = np.empty((self.n_sites, self.fibre_dim), dtype=object)
            out[:] = 0
            return out
        return np.zeros((self.n_sites, self.fibre_dim), dtype=complex)

    def random_field(self, rng, denom: int = 4) -> np.ndarray:
        if self.exact:
            out = self.zero_field()
            for idx in np.ndindex(out.shape):
                out[idx] = Exact(Fraction(int(rng.integers(-denom, denom + 1)), denom), 0, Fraction(int(rng.integers(-denom, denom + 1)), denom))
            return out
        return rng.normal(size=(self.n_sites, self.fibre_dim)) + 1j * rng.normal(size=(self.n_sites, self.fibre_dim))


def covariant_derivative(model: LatticeDiracModel, psi: np.ndarray) -> list[np.ndarray]:
    """[nabla_mu psi for mu in 0..d-1], central differences with links."""
    psi = np.asarray(psi)
    out = []
    for mu in range(model.d):
        fwd = psi[model.shift(mu, 1)]
        back_idx = model.shift(mu, -1)
        bwd = psi[back_idx]
        if model.links is not None:
            U = model.links[mu]
            Uinv = model.link_inverse(mu)[back_idx]
            fwd = np.einsum("xij,xj->xi", U, fwd) if not model.exact else _batched(U, fwd)
            bwd = np.einsum("xij,xj->xi", Uinv, bwd) if not model.exact else _batched(Uinv, bwd)
        diff = fwd - bwd
        out.append(diff * Fraction(1, 2) if model.exact else diff / 2)
    return out


def _batched(mats, vecs):
    return np.array([m.dot(v) for m, v in zip(mats, vecs)], dtype=object)


def dirac_apply(model: LatticeDiracModel, psi: np.ndarray) -> np.ndarray:
    """D psi = sum_mu e_mu (nabla_mu psi)."""
    nab = covariant_derivative(model, psi)
    out = model.zero_field()
    for mu, v in enumerate(nab):
        out = out + v.dot(model.gamma_matrix(mu).T)
    return out


def act_on_field(model: LatticeDiracModel, g: int, psi: np.ndarray) -> np.ndarray:
    """(g psi)(sigma_g x) = S_g kappa_g(psi(x))."""
    act = model.action
    S = act.spinor_matrix(g, model.exact)
    vals = _theta(act.eps(g), np.asarray(psi)).dot(S.T)
    out = model.zero_field()
    out[np.array(act.perms[g])] = vals
    return out


def _residual(a, b, exact: bool):
    if exact:
        return 0.0 if all(x == y for x, y in zip(np.asarray(a).flat, np.asarray(b).flat)) else float(np.max(np.abs(to_complex(a) - to_complex(b))))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def dirac_left_equivariance_residual(model: LatticeDiracModel, psi: np.ndarray) -> float:
    """max over gamma of |D(gamma psi) - gamma D(psi)|."""
    Dpsi = dirac_apply(model, psi)
    worst = 0.0
    for g in model.action.group.elements:
        r = _residual(dirac_apply(model, act_on_field(model, g, psi)), act_on_field(model, g, Dpsi), model.exact)
        worst = max(worst, r)
    return worst


def derivative_equivariance_residual(model: LatticeDiracModel, psi: np.ndarray) -> float:
    """nabla_{A_g e_mu}(g psi)(sigma_g x) = g (nabla_mu psi)(x) for signed-permutation A_g."""
    worst = 0.0
    nab = covariant_derivative(model, psi)
    for g in model.action.group.elements:
        A = model.action.linear[g]
        nab_g = covariant_derivative(model, act_on_field(model, g, psi))
        for mu in range(model.d):
            nu = next(i for i in range(model.d) if A[i][mu] != 0)
            lhs = nab_g[nu] * A[nu][mu]
            rhs = act_on_field(model, g, nab[mu])
            worst = max(worst, _residual(lhs, rhs, model.exact))
    return worst


def right_multiply_field(model: LatticeDiracModel, psi: np.ndarray, phi: MultiVector) -> np.ndarray:
    R = right_matrix(phi, model.exact)
    return np.asarray(psi).dot(R.T)


def dirac_right_equivariance_check(model: LatticeDiracModel, psi: np.ndarray, phi: MultiVector) -> float:
    """max-norm of D(psi phi) - D(psi) phi."""
    lhs = dirac_apply(model, right_multiply_field(model, psi, phi))
    rhs = right_multiply_field(model, dirac_apply(model, psi), phi)
    return _residual(lhs, rhs, model.exact)


def operator_matrix(model: LatticeDiracModel) -> np.ndarray:
    if model.dim > MAX_OPERATOR_DIM:
        raise TooLarge(f"operator dimension {model.dim} exceeds {MAX_OPERATOR_DIM}")
    M = np.zeros((model.dim, model.dim), dtype=complex)
    flat_model = model if not model.exact else LatticeDiracModel(model.d, model.N, model.action, _float_links(model), False)
    for k in range(model.dim):
        e = np.zeros(model.dim, dtype=complex)
        e[k] = 1
        M[:, k] = dirac_apply(flat_model, e.reshape(model.n_sites, model.fibre_dim)).reshape(-1)
    return M


def _float_links(model):
    if model.links is None:
        return None
    return [to_complex(np.asarray(u).reshape(-1, model.fibre_dim)).reshape(np.asarray(u).shape) for u in model.links]


def spectrum(model: LatticeDiracModel) -> np.ndarray:
    """Sorted eigenvalues of D (real: D is hermitian for unitary links)."""
    M = operator_matrix(model)
    if np.max(np.abs(M - M.conj().T), initial=0.0) < 1e-12:
        return np.sort(np.linalg.eigvalsh(M))
    ev = np.linalg.eigvals(M)
    return ev[np.lexsort((ev.imag, ev.real))]


def fourier_spectrum(d: int, N: int, momentum_map: Callable | None = None) -> np.ndarray:
    """Flat-link oracle: +-sqrt(sum_mu sin^2 k_mu), each with multiplicity 2^(d-1)."""
    out = []
    for k in itertools.product(range(N), repeat=d):
        if momentum_map is not None:
            k = momentum_map(k)
        s = np.sqrt(sum(np.sin(2 * np.pi * kk / N) ** 2 for kk in k))
        out += [s, -s] * (1 << (d - 1))
    return np.sort(np.array(out))


def spectrum_symmetry(model: LatticeDiracModel) -> dict:
    """Anti-unitary symmetry diagnostics for every gamma with eps = -1.

    ``commutator`` is max |C D - D C| with C psi = gamma psi; ``pairing`` is the
    distance between the spectrum and its image under C D C^-1.
    """
    M = operator_matrix(model)
    ev = np.sort(np.linalg.eigvals(M).real)
    out = {"commutator": 0.0, "pairing": 0.0}
    fm = LatticeDiracModel(model.d, model.N, model.action, _float_links(model), False)
    for g in model.action.group.elements:
        perm = np.array(fm.action.perms[g])
        S = fm.action.spinor_matrix(g)
        # C = P (I x S) K, K complex conjugation when eps = -1
        C = np.zeros((fm.dim, fm.dim), dtype=complex)
        f = fm.fibre_dim
        for x in range(fm.n_sites):
            C[perm[x] * f : perm[x] * f + f, x * f : x * f + f] = S
        Mg = M if fm.action.eps(g) == 1 else M.conj()
        out["commutator"] = max(out["commutator"], float(np.max(np.abs(C @ Mg - M @ C))))
        conj_ev = np.sort(np.linalg.eigvals(C @ Mg @ np.linalg.inv(C)).real)
        out["pairing"] = max(out["pairing"], float(np.max(np.abs(conj_ev - ev))))
    return out


def links_from_connection(d: int, N: int, alpha: np.ndarray) -> list[np.ndarray]:
    """U_mu(x) = exp of the average of alpha[x, mu] and alpha[x + mu, mu] (matrix Lie algebra)."""
    links = []
    for mu in range(d):
        shift = []
        for x in _sites(d, N):
            y = list(x)
            y[mu] += 1
            shift.append(_flat(y, N))
        U = np.array([expm((alpha[x, mu] + alpha[shift[x], mu]) / 2) for x in range(N**d)])
        links.append(U)
    return links


# -- metrics ----------------------------------------------------------------------------------


def _check_positive(H, exact: bool):
    H = np.asarray(H)
    if exact:
        n = H.shape[0]
        for k in range(1, n + 1):
            det = exact_det(H[:k, :k])
            if isinstance(det, Exact):
                if not det.is_real() or det.real <= 0:
                    raise NotPositiveDefinite("leading minor is not positive")
            elif det <= 0:
                raise NotPositiveDefinite("leading minor is not positive")
        if any(H[i, j] != (H[j, i].conjugate() if hasattr(H[j, i], "conjugate") else H[j, i]) for i in range(n) for j in range(n)):
            raise NotPositiveDefinite("form is not hermitian")
        return
    if np.max(np.abs(H - H.conj().T), initial=0.0) > 1e-12:
        raise NotPositiveDefinite("form is not hermitian")
    if np.linalg.eigvalsh(H).min() <= 0:
        raise NotPositiveDefinite("form is not positive definite")


def _dagger(M):
    return mat_conj(np.asarray(M)).T


def average_metric(h0: Sequence, action: LatticeAction, exact: bool = False) -> list:
    """h_Gamma(u, v)_x = sum_gamma gamma^-1 . h(gamma u, gamma v)_{gamma x} (no normalization).

    Forms are matrices H_x with h(u, v) = u^dagger H_x v; gamma u = S_gamma kappa_gamma(u).
    In matrix terms H_Gamma,x = sum_gamma theta_gamma(S_gamma^dagger H_{sigma_gamma x} S_gamma).
    """
    for H in h0:
        _check_positive(H, exact)
    out = []
    for x in range(len(h0)):
        acc = None
        for g in action.group.elements:
            S = action.spinor_matrix(g, exact)
            term = _theta(action.eps(g), _dagger(S).dot(np.asarray(h0[action.perms[g][x]])).dot(S))
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def metric_identity_residual(h: Sequence, action: LatticeAction, exact: bool = False) -> float:
    """max over gamma, x of |S^dagger H_{sigma x} S - theta_gamma(H_x)|, i.e. h(gu, gv)_{gx} = g.h(u, v)_x."""
    worst = 0.0
    for g in action.group.elements:
        S = action.spinor_matrix(g, exact)
        for x in range(len(h)):
            lhs = _dagger(S).dot(np.asarray(h[action.perms[g][x]])).dot(S)
            rhs = _theta(action.eps(g), np.asarray(h[x]))
            worst = max(worst, _residual(lhs, rhs, exact))
    return worst


# -- connections on P = X x G -------------------------------------------------------------------


@dataclass
class SemiEquivariantConnection:
    """omega_(x, g)(v, xi) = g^-1 alpha_x(v) g + xi on the trivial bundle X x G.

    G is a matrix group (Spin^c(d) in the left-regular representation) and
    tangent vectors at (x, g) are pairs (v in R^d, xi in Lie(G)) with xi
    left-trivialized.  Group elements act by eta_gamma(x, g) = (sigma x, S theta(g)).
    ``terms`` lists (weight, gamma, alpha) summands; the plain connection has one.
    """

    action: LatticeAction
    terms: list

    @classmethod
    def plain(cls, action: LatticeAction, alpha: np.ndarray) -> "SemiEquivariantConnection":
        return cls(action, [(1.0, action.group.identity, np.asarray(alpha))])

    def _single(self, alpha, x, g, v, xi):
        av = sum(v[mu] * alpha[x, mu] for mu in range(len(v)))
        return np.linalg.inv(g) @ av @ g + xi

    def _push(self, gam, x, g, v, xi):
        act = self.action
        S = act.spinor_matrix(gam)
        y = act.perms[gam][x]
        h = S @ _theta(act.eps(gam), g)
        A = np.array(act.linear[gam], dtype=float)
        return y, h, A @ np.asarray(v, dtype=float), _theta(act.eps(gam), xi)

    def __call__(self, x, g, v, xi) -> np.ndarray:
        """omega at the point (x, g) on the tangent vector (v, xi)."""
        G = self.action.group
        total = np.zeros_like(np.asarray(g, dtype=complex))
        for w, gam, alpha in self.terms:
            if gam == G.identity:
                total = total + w * self._single(alpha, x, g, v, xi)
                continue
            # theta_gam . omega . (eta_{gam^-1})_*
            inv = G.inv(gam)
            y, h, v2, xi2 = self._push(inv, x, g, v, xi)
            val = self._single(alpha, y, h, v2, xi2)
            total = total + w * _theta(self.action.eps(gam), val)
        return total

    def alpha(self) -> np.ndarray:
        """The Lie-algebra valued 1-form with omega_(x, 1)(v, 0) = alpha_x(v)."""
        act = self.action
        n_sites = len(act.perms[0])
        d = act.d
        dim = 1 << d
        eye = np.eye(dim, dtype=complex)
        zero = np.zeros((dim, dim), dtype=complex)
        out = np.zeros((n_sites, d, dim, dim), dtype=complex)
        for x in range(n_sites):
            for mu in range(d):
                v = [0.0] * d
                v[mu] = 1.0
                out[x, mu] = self(x, eye, v, zero)
        return out


def average_connection(omega0: np.ndarray, action: LatticeAction, normalize: bool = True) -> SemiEquivariantConnection:
    """omega_Gamma = c sum_gamma theta_gamma . omega . (eta_{gamma^-1})_*, c = 1/|Gamma| by default."""
    w = 1.0 / action.group.order if normalize else 1.0
    alpha = np.asarray(omega0)
    return SemiEquivariantConnection(action, [(w, g, alpha) for g in action.group.elements])


def averaged_alpha_closed_form(alpha: np.ndarray, action: LatticeAction) -> np.ndarray:
    """(1/|Gamma|) sum_gamma S_gamma theta_gamma(alpha_{sigma_gamma^-1 x}(A_gamma^-1 v)) S_gamma^-1."""
    G = action.group
    out = np.zeros_like(alpha, dtype=complex)
    n_sites, d = alpha.shape[:2]
    for g in G.elements:
        S = action.spinor_matrix(g)
        Sinv = np.linalg.inv(S)
        inv = G.inv(g)
        Ainv = np.array(action.linear[inv], dtype=float)
        src = action.inverse_perm(g)
        for x in range(n_sites):
            for mu in range(d):
                val = sum(Ainv[nu, mu] * alpha[src[x], nu] for nu in range(d))
                out[x, mu] += S @ _theta(action.eps(g), val) @ Sinv
    return out / G.order


def connection_axiom_residuals(omega: SemiEquivariantConnection, samples: list) -> dict:
    """Residuals of the three connection conditions on sample tuples (x, g, h, v, xi, A).

    vertical:    omega(R_*A) = A
    right:       omega_(x, gh)(v, Ad_{h^-1} xi) = Ad_{h^-1} omega_(x, g)(v, xi)
    semi_equiv:  omega_{eta_gamma p}((eta_gamma)_*(v, xi)) = theta_gamma omega_p(v, xi)
    """
    act = omega.action
    res = {"vertical": 0.0, "right": 0.0, "semi_equivariance": 0.0}
    d = act.d
    for x, g, h, v, xi, A in samples:
        zero_v = [0.0] * d
        res["vertical"] = max(res["vertical"], float(np.max(np.abs(omega(x, g, zero_v, A) - A))))
        hinv = np.linalg.inv(h)
        lhs = omega(x, g @ h, v, hinv @ xi @ h)
        rhs = hinv @ omega(x, g, v, xi) @ h
        res["right"] = max(res["right"], float(np.max(np.abs(lhs - rhs))))
        base = omega(x, g, v, xi)
        for gam in act.group.elements:
            y, k, v2, xi2 = omega._push(gam, x, g, v, xi)
            diff = omega(y, k, v2, xi2) - _theta(act.eps(gam), base)
            res["semi_equivariance"] = max(res["semi_equivariance"], float(np.max(np.abs(diff))))
    return res


def spinc_lie_basis(d: int) -> list[np.ndarray]:
    """Matrices spanning spin^c(d) in the left-regular representation: e_ie_j / 2 and i."""
    out = [1j * np.eye(1 << d)]
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            out.append(left_matrix(MultiVector.basis(d, i, j, complexified=True)) / 2)
    return out


def random_connection(d: int, N: int, rng, scale: float = 0.3) -> np.ndarray:
    basis = spinc_lie_basis(d)
    out = np.zeros((N**d, d, 1 << d, 1 << d), dtype=complex)
    for x in range(N**d):
        for mu in range(d):
            out[x, mu] = sum(scale * rng.normal() * b for b in basis)
    return out


# -- finite associated-bundle model ------------------------------------------------------------------


class FiniteBundleModel:
    """P = X x G_f for a finite subgroup G_f of Spin^c(n) closed under kappa.

    Gamma acts by gamma(x, g) = (sigma_gamma x, S_gamma kappa_gamma(g)) and on
    the fibre by kappa_gamma.  ``fiber="total"`` uses Cl^c_n with G acting by
    left multiplication; ``fiber="reduced"`` uses the 16-dimensional module
    Delta_c of Cl^c_8 (n = 8 only).
    """

    def __init__(self, group: FiniteGroup, n: int, point_perms, spinor, elements: list[SpincElement], fiber: str = "total"):
        self.group = group
        self.n = n
        self.point_perms = [list(p) for p in point_perms]
        self.n_points = len(self.point_perms[0])
        self.spinor = list(spinor)
        self.elements = list(elements)
        self.fiber = fiber
        if fiber not in ("total", "reduced"):
            raise ValueError("fiber is 'total' or 'reduced'")
        if fiber == "reduced" and n != 8:
            raise DimensionMismatch("the reduced fibre Delta_c is implemented for n = 8")
        self._index = {g.key(): k for k, g in enumerate(self.elements)}
        for g in self.elements:
            for s in (1, -1):
                if g.kappa(s).key() not in self._index:
                    raise IncompatibleFibers("G_f is not closed under kappa")
        for S in self.spinor:
            if S.key() not in self._index:
                raise IncompatibleFibers("spinor lifts must lie in G_f")
        self._rep = build_gamma_rep() if fiber == "reduced" else None
        self._mv_cache = {}

    @property
    def points(self) -> list[tuple[int, int]]:
        return [(x, k) for x in range(self.n_points) for k in range(len(self.elements))]

    def index(self, g: SpincElement) -> int:
        return self._index[g.key()]

    def right(self, p, k: int):
        x, i = p
        return (x, self.index(self.elements[i] * self.elements[k]))

    def act_point(self, gam: int, p):
        x, i = p
        g = self.spinor[gam] * self.elements[i].kappa(self.group.eps(gam))
        return (self.point_perms[gam][x], self.index(g))

    # fibre operations
    def _mv(self, k: int) -> MultiVector:
        if k not in self._mv_cache:
            self._mv_cache[k] = self.elements[k].to_multivector()
        return self._mv_cache[k]

    def fibre_act(self, k: int, v):
        """g . v for g = elements[k]."""
        return self.clifford_act(self._mv(k), v)

    def clifford_act(self, a: MultiVector, v):
        if self.fiber == "total":
            return a * v
        return self._rep.act(a).dot(v)

    def kappa(self, sign: int, v):
        if sign == 1:
            return v
        if isinstance(v, MultiVector):
            return v.conj_coefficients()
        return mat_conj(np.asarray(v))

    def fibre_equal(self, a, b) -> bool:
        if isinstance(a, MultiVector):
            return a == b
        return all(x == y for x, y in zip(np.asarray(a).flat, np.asarray(b).flat))


@dataclass
class SectionMap:
    """Values on every point of a finite model; ``kind`` is 'spinor' or 'clifford'.

    Spinor sections satisfy psi(pg) = g^-1 psi(p); Clifford (adjoint bundle)
    sections satisfy phi(pg) = g^-1 phi(p) g.
    """

    model: FiniteBundleModel
    values: dict
    kind: str = "spinor"

    @classmethod
    def from_base(cls, model: FiniteBundleModel, f: Callable, kind: str = "spinor") -> "SectionMap":
        """Extend values at (x, 1) along the fibres by covariance."""
        e = model.index(SpincElement.identity(model.n))
        vals = {}
        for x in range(model.n_points):
            base = f(x)
            for k, g in enumerate(model.elements):
                ginv = g.inverse().to_multivector()
                if kind == "spinor":
                    vals[(x, k)] = model.clifford_act(ginv, base)
                else:
                    vals[(x, k)] = ginv * base * g.to_multivector()
            assert (x, e) in vals
        return cls(model, vals, kind)

    def is_covariant(self) -> bool:
        m = self.model
        for p in m.points:
            for k, g in enumerate(m.elements):
                q = m.right(p, k)
                ginv = g.inverse().to_multivector()
                if self.kind == "spinor":
                    expect = m.clifford_act(ginv, self.values[p])
                else:
                    expect = ginv * self.values[p] * g.to_multivector()
                if not m.fibre_equal(self.values[q], expect):
                    return False
        return True

    def act(self, gam: int) -> "SectionMap":
        """(gamma psi)(p) = kappa_gamma(psi(gamma^-1 p))."""
        m = self.model
        inv = m.group.inv(gam)
        sign = m.group.eps(gam)
        return SectionMap(m, {p: m.kappa(sign, self.values[m.act_point(inv, p)]) for p in m.points}, self.kind)

    def equals(self, other: "SectionMap") -> bool:
        return all(self.model.fibre_equal(self.values[p], other.values[p]) for p in self.model.points)


def clifford_mul_sections(phi: SectionMap, psi: SectionMap) -> SectionMap:
    """(phi psi)(p) = phi(p) psi(p)."""
    if phi.model is not psi.model or phi.kind != "clifford" or psi.kind != "spinor":
        raise IncompatibleFibers("need a Clifford section and a spinor section on one model")
    m = psi.model
    return SectionMap(m, {p: m.clifford_act(phi.values[p], psi.values[p]) for p in m.points}, "spinor")


def right_clifford_action(psi: SectionMap, phi: MultiVector) -> SectionMap:
    """(psi phi)(p) = psi(p) phi; only the total spinor model carries this action."""
    if psi.model.fiber != "total":
        raise ReducedModelHasNoRightAction("Delta_c is not a right Cl^c_n-module")
    return SectionMap(psi.model, {p: v * phi for p, v in psi.values.items()}, psi.kind)

