"""Closest incoherent state in a product basis and closest separable state, under the QJSD.

Both searches minimize the divergence J itself (smooth) rather than its square
root. Gradients are analytic: for a matrix entropy S(X) = -Tr f(X) the
differential is -Tr[(log X + 1) dX], which stays finite on degenerate spectra
where eigenvector-based autodiff breaks down.

The separable objective never forms a D x D matrix. With rho = R R^dag and
sigma = A A^dag (columns sqrt(p_k) |psi_k>), the nonzero spectra of sigma and
of (rho + sigma)/2 = B B^dag, B = [R, A]/sqrt(2), equal those of the small Gram
matrices A^dag A and B^dag B. Cost is O(D (r + K)^2) per evaluation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .quantum import (
    QuantumState,
    entropy_of_spectrum,
    permute_matrix,
    qjsd_matrices,
    reduce_matrix,
)
from .states import BasisSpec

log = logging.getLogger(__name__)

LN_BASE = np.log(2.0)
RANK_TOL = 1e-14
PAD_WEIGHT = 1e-6


@dataclass(frozen=True)
class OptimOptions:
    restarts: int | None = None  # None: 10 for dimension <= 64, else 4
    max_iterations: int = 2000
    objective_tolerance: float = 1e-9
    seed: int = 0
    K_override: int | None = None

    def __post_init__(self):
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.objective_tolerance > 0:
            raise ValueError("objective_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.K_override is not None and self.K_override < 1:
            raise ValueError("K_override must be >= 1")

    def n_restarts(self, dim: int) -> int:
        if self.restarts is not None:
            return self.restarts
        return 10 if dim <= 64 else 4

    def with_seed(self, seed: int) -> "OptimOptions":
        return OptimOptions(self.restarts, self.max_iterations, self.objective_tolerance, seed, self.K_override)


@dataclass(frozen=True, eq=False)
class SeparableAnsatz:
    """sum_k p_k (x)_n |psi_kn><psi_kn| over the groups of a site partition."""

    partition: tuple[tuple[int, ...], ...]
    weights: np.ndarray
    factors: tuple[tuple[np.ndarray, ...], ...]  # factors[k][n] on group n

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise ValueError("weights must be a probability vector")
        for fk in self.factors:
            for f in fk:
                if abs(np.linalg.norm(f) - 1) > 1e-12:
                    raise ValueError("factor states must be normalized")

    @property
    def K(self) -> int:
        return len(self.weights)

    def realize(self, dims: Sequence[int]) -> QuantumState:
        """Density matrix in the original site order."""
        order = [s - 1 for g in self.partition for s in g]
        n_groups = len(self.partition)
        psi = _kron_rows([np.array([fk[n] for fk in self.factors]) for n in range(n_groups)])
        m = (psi.T * self.weights) @ psi.conj()
        pdims = [dims[i] for i in order]
        return QuantumState(tuple(dims), permute_matrix(m, pdims, np.argsort(order)))


@dataclass(frozen=True, eq=False)
class MinimizationResult:
    minimizer: QuantumState
    objective: float
    iterations_used: int
    restart_index: int
    converged: bool
    initial_objective: float = float("nan")
    ansatz: SeparableAnsatz | None = field(default=None, repr=False)

    @property
    def distance(self) -> float:
        return float(np.sqrt(max(self.objective, 0.0)))


def _is_maximally_mixed(rho: QuantumState) -> bool:
    return np.max(np.abs(rho.matrix - np.eye(rho.dim) / rho.dim)) < 1e-12


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng([seed, restart])


def _lbfgs(fun, x0, opts: OptimOptions):
    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": opts.max_iterations, "ftol": opts.objective_tolerance, "gtol": 1e-12, "maxcor": 20},
    )
    # status 2 is a line-search stall at the floating-point floor, not a budget overrun
    return res.x, float(res.fun), int(res.nit), res.status != 1


# --- closest incoherent state ---------------------------------------------------

def _incoherent_objective(x, rho_b, s_rho):
    logq = x - np.logaddexp.reduce(x)
    q = np.exp(logq)
    m = rho_b / 2
    m[np.diag_indices_from(m)] += q / 2
    ev, V = np.linalg.eigh(m)
    lg = np.log(np.maximum(ev, 1e-300))
    s_m = -np.sum(np.where(ev > 0, ev * lg, 0.0))
    s_q = -np.sum(q * logq)
    j = s_m - s_rho / 2 - s_q / 2
    log_m_diag = np.einsum("ij,j,ij->i", V, lg, V.conj()).real
    g = 0.5 * (logq - log_m_diag)
    grad = q * (g - np.dot(q, g))
    return j / LN_BASE, grad / LN_BASE


def closest_incoherent(rho: QuantumState, basis: BasisSpec | None = None,
                       opts: OptimOptions | None = None) -> MinimizationResult:
    """Nearest state diagonal in the product basis ``basis`` (computational by default)."""
    opts = opts or OptimOptions()
    basis = basis or BasisSpec.computational(rho.dims)
    if basis.dims != rho.dims:
        raise ValueError(f"basis dims {list(basis.dims)} do not match state dims {list(rho.dims)}")
    if _is_maximally_mixed(rho):
        return MinimizationResult(rho, 0.0, 0, 0, True, 0.0)

    u = basis.unitary()
    rho_b = u.conj().T @ rho.matrix @ u
    s_rho = entropy_of_spectrum(np.linalg.eigvalsh(rho_b)) * LN_BASE
    q_diag = np.clip(np.diag(rho_b).real, 0.0, None)
    q_diag /= q_diag.sum()
    j_diag = qjsd_matrices(rho_b, np.diag(q_diag))

    candidates = [(j_diag, 0, 0, True, q_diag)]
    for r in range(opts.n_restarts(rho.dim)):
        if r == 0:
            x0 = np.log(np.maximum(q_diag, 1e-12))
        else:
            x0 = np.log(_restart_rng(opts.seed, r).dirichlet(np.ones(rho.dim)))
        x, j, nit, ok = _lbfgs(lambda x: _incoherent_objective(x, rho_b, s_rho), x0, opts)
        q = np.exp(x - np.logaddexp.reduce(x))
        candidates.append((j, r, nit, ok, q))
    # lowest objective, ties to the lowest restart index
    j, r, nit, ok, q = min(candidates, key=lambda c: (round(c[0], 14), c[1]))
    sigma = QuantumState(rho.dims, u @ np.diag(q) @ u.conj().T)
    objective = qjsd_matrices(rho.matrix, sigma.matrix)
    if j_diag - objective > 1e-6:
        log.info("optimization improved on the diagonal projection by %.3g", j_diag - objective)
    return MinimizationResult(sigma, objective, nit, r, ok, j_diag)


# --- closest separable state ----------------------------------------------------

def _entropy_and_grad(B):
    """Natural-log entropy of B B^dag and its complex gradient 2 B f'(B^dag B)."""
    G = B.conj().T @ B
    ev, V = np.linalg.eigh(G)
    lg = np.log(np.maximum(ev, 1e-300))
    s = -np.sum(np.where(ev > 0, ev * lg, 0.0))
    grad = 2 * B @ ((V * -(lg + 1)) @ V.conj().T)
    return s, grad


def _kron_rows(us):
    p = us[0]
    for u in us[1:]:
        p = (p[:, :, None] * u[:, None, :]).reshape(p.shape[0], -1)
    return p


def _kron_all(ms):
    out = ms[0]
    for m in ms[1:]:
        out = np.kron(out, m)
    return out


def _weight_grad(s, q, gs, gq=None):
    """Chain d/ds (s = sqrt q) and d/dq through q = softmax(x)."""
    g = (s / 2) * gs
    gx = g - q * np.sum(g)
    if gq is not None:
        gx = gx + q * (gq - np.dot(q, gq))
    return gx


class _MixtureProblem:
    """sigma = sum_k p_k |psi_k><psi_k|, psi_k a product of free pure states per group."""

    def __init__(self, R, s_rho, group_dims, K):
        self.R = R
        self.s_rho = s_rho
        self.dims = list(group_dims)
        self.K = K
        self.r = R.shape[1]
        letters = "abcdefghijlmnopqrstuvwxyz"[: len(self.dims)]
        self.contractions = []
        for n in range(len(self.dims)):
            others = [f"k{letters[m]}" for m in range(len(self.dims)) if m != n]
            self.contractions.append(",".join([f"k{letters}"] + others) + f"->k{letters[n]}")

    def pack(self, weights, factors):
        parts = [np.log(np.maximum(weights, 1e-300))]
        for n in range(len(self.dims)):
            z = np.array([fk[n] for fk in factors])
            parts += [z.real.ravel(), z.imag.ravel()]
        return np.concatenate(parts)

    def _unpack(self, x):
        w = x[: self.K]
        zs, off = [], self.K
        for d in self.dims:
            n = self.K * d
            zs.append((x[off: off + n] + 1j * x[off + n: off + 2 * n]).reshape(self.K, d))
            off += 2 * n
        return w, zs

    def ansatz_parts(self, x):
        w, zs = self._unpack(x)
        p = np.exp(w - np.logaddexp.reduce(w))
        us = [z / np.linalg.norm(z, axis=1, keepdims=True) for z in zs]
        return p, [[u[k] for u in us] for k in range(self.K)]

    def __call__(self, x):
        w, zs = self._unpack(x)
        p = np.exp(w - np.logaddexp.reduce(w))
        s = np.sqrt(p)
        norms = [np.linalg.norm(z, axis=1) for z in zs]
        us = [z / nz[:, None] for z, nz in zip(zs, norms)]
        psi = _kron_rows(us).T  # D x K
        A = psi * s
        s_sigma, g_sigma = _entropy_and_grad(A)
        s_mid, g_mid = _entropy_and_grad(np.hstack([self.R, A]) / np.sqrt(2))
        j = s_mid - self.s_rho / 2 - s_sigma / 2
        gA = g_mid[:, self.r:] / np.sqrt(2) - g_sigma / 2

        grads = [_weight_grad(s, p, np.real(np.sum(gA.conj() * psi, axis=0)))]
        h = (gA * s).T.reshape([self.K] + self.dims)
        for n, spec in enumerate(self.contractions):
            others = [us[m].conj() for m in range(len(self.dims)) if m != n]
            hn = np.einsum(spec, h, *others, optimize=True) if others else h
            z, nz = zs[n], norms[n][:, None]
            proj = np.real(np.sum(z.conj() * hn, axis=1, keepdims=True))
            gz = hn / nz - z * proj / nz ** 3
            grads += [gz.real.ravel(), gz.imag.ravel()]
        return j / LN_BASE, np.concatenate(grads) / LN_BASE


def _polar(z):
    """Isometry z (z^dag z)^(-1/2) and the pieces needed to differentiate it."""
    lam, E = np.linalg.eigh(z.conj().T @ z)
    lam = np.maximum(lam, 1e-300)
    r = 1 / np.sqrt(lam)
    inv_sqrt = (E * r) @ E.conj().T
    return z @ inv_sqrt, inv_sqrt, lam, E


def _polar_grad(z, gv, inv_sqrt, lam, E):
    """Pull the gradient of an isometry v = polar(z) back to z."""
    sq = np.sqrt(lam)
    # divided differences of x^(-1/2)
    gamma = -1 / (np.outer(sq, sq) * (sq[:, None] + sq[None, :]))
    mt = E.conj().T @ (z.conj().T @ gv) @ E
    nmat = E @ (mt * gamma) @ E.conj().T
    return gv @ inv_sqrt + z @ (nmat + nmat.conj().T)


class _ProductBasisProblem:
    """sigma = W diag(q) W^dag with W the tensor product of one isometry per group.

    Group n keeps m_n <= d_n orthonormal basis vectors; the sigma are the
    separable states diagonal in a product basis that is free to rotate.
    """

    def __init__(self, R, s_rho, group_dims, keep_dims):
        self.R = R
        self.s_rho = s_rho
        self.dims = list(group_dims)
        self.keep = list(keep_dims)
        self.r = R.shape[1]
        self.K = int(np.prod(self.keep))
        f = len(self.dims)
        rows = "abcdefghij"[:f] if f <= 10 else None
        if rows is None:
            raise ValueError("at most 10 groups are supported")
        cols = "ABCDEFGHIJ"[:f]
        self.contractions = []
        for n in range(f):
            others = [rows[m] + cols[m] for m in range(f) if m != n]
            self.contractions.append(",".join([rows + cols] + others) + f"->{rows[n]}{cols[n]}")

    def pack(self, q, bases):
        parts = [np.log(np.maximum(q, 1e-300))]
        for v in bases:
            parts += [v.real.ravel(), v.imag.ravel()]
        return np.concatenate(parts)

    def _unpack(self, x):
        w = x[: self.K]
        zs, off = [], self.K
        for d, m in zip(self.dims, self.keep):
            n = d * m
            zs.append((x[off: off + n] + 1j * x[off + n: off + 2 * n]).reshape(d, m))
            off += 2 * n
        return w, zs

    def ansatz_parts(self, x):
        w, zs = self._unpack(x)
        q = np.exp(w - np.logaddexp.reduce(w))
        vs = [_polar(z)[0] for z in zs]
        factors = []
        for idx in np.ndindex(*self.keep):
            factors.append([v[:, a] for v, a in zip(vs, idx)])
        return q, factors

    def __call__(self, x):
        w, zs = self._unpack(x)
        logq = w - np.logaddexp.reduce(w)
        q = np.exp(logq)
        s = np.sqrt(q)
        polars = [_polar(z) for z in zs]
        W = _kron_all([p[0] for p in polars])
        A = W * s
        s_mid, g_mid = _entropy_and_grad(np.hstack([self.R, A]) / np.sqrt(2))
        s_sigma = -np.sum(q * logq)  # W is an isometry
        j = s_mid - self.s_rho / 2 - s_sigma / 2
        gA = g_mid[:, self.r:] / np.sqrt(2)

        gs = np.real(np.sum(gA.conj() * W, axis=0))
        grads = [_weight_grad(s, q, gs, gq=(logq + 1) / 2)]
        gW = (gA * s).reshape(self.dims + self.keep)
        for n, spec in enumerate(self.contractions):
            others = [polars[m][0].conj() for m in range(len(self.dims)) if m != n]
            gv = np.einsum(spec, gW, *others, optimize=True) if others else gW
            _, inv_sqrt, lam, E = polars[n]
            gz = _polar_grad(zs[n], gv, inv_sqrt, lam, E)
            grads += [gz.real.ravel(), gz.imag.ravel()]
        return j / LN_BASE, np.concatenate(grads) / LN_BASE


def _validate_partition(partition, n_sites):
    groups = tuple(tuple(sorted(int(s) for s in g)) for g in partition)
    flat = sorted(s for g in groups for s in g)
    if any(not g for g in groups) or flat != list(range(1, n_sites + 1)):
        raise ValueError(f"partition {partition} must cover sites 1..{n_sites} exactly once")
    return groups


def default_ansatz_size(group_dims: Sequence[int], rank: int) -> int:
    """Component count K for the free-mixture family."""
    total = int(np.prod(group_dims))
    if len(group_dims) == 2 and total <= 16:
        k = 4
    elif len(group_dims) == 3 and all(d == 2 for d in group_dims):
        k = 8
    else:
        k = 16
    # the minimizer's support must contain that of rho
    return max(k, 2 * rank)


def default_basis_sizes(group_dims: Sequence[int], group_ranks: Sequence[int], cap: int | None = None) -> list[int]:
    """Basis vectors kept per group for the product-basis family.

    Groups up to dimension 16 keep a full basis; larger ones keep enough
    vectors to cover the support of rho's marginal on that group.
    """
    out = []
    for d, r in zip(group_dims, group_ranks):
        if cap is not None:
            out.append(min(d, max(cap, r)))
        elif d <= 16:
            out.append(d)
        else:
            out.append(min(d, max(8, 2 * r)))
    return out


def product_terms(vec: np.ndarray, dims: Sequence[int], cap: int) -> list[tuple[float, list[np.ndarray]]]:
    """Weighted product terms from successive Schmidt splits of a normalized vector."""
    if len(dims) == 1:
        return [(1.0, [vec / np.linalg.norm(vec)])]
    u, s, vh = np.linalg.svd(vec.reshape(dims[0], -1), full_matrices=False)
    terms = []
    for j in range(len(s)):
        if s[j] <= 1e-10 * s[0]:
            break
        for w, fs in product_terms(vh[j], dims[1:], cap):
            terms.append((s[j] ** 2 * w, [u[:, j]] + fs))
    terms.sort(key=lambda t: -t[0])
    return terms[:cap]


def _normalize_terms(terms, K):
    terms = sorted(terms, key=lambda t: -t[0])[:K]
    total = sum(w for w, _ in terms)
    return [(w / total, fs) for w, fs in terms]


def _schmidt_terms(evals, evecs, group_dims, K):
    terms = []
    for lam, v in zip(evals, evecs.T):
        if lam > RANK_TOL:
            terms += [(lam * w, fs) for w, fs in product_terms(v, group_dims, 4 * K)]
    return _normalize_terms(terms, K)


def _diagonal_terms(rho_p, group_dims, K):
    diag = np.diag(rho_p).real
    terms = []
    for idx in np.argsort(-diag, kind="stable")[:K]:
        if diag[idx] <= 0:
            break
        digits = np.unravel_index(idx, group_dims)
        terms.append((diag[idx], [np.eye(d)[i].astype(complex) for d, i in zip(group_dims, digits)]))
    return _normalize_terms(terms, K)


def _random_factor(d, rng):
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return z / np.linalg.norm(z)


def _pad(terms, group_dims, K, rng):
    weights = [w for w, _ in terms]
    factors = [list(fs) for _, fs in terms]
    while len(weights) < K:
        weights.append(PAD_WEIGHT)
        factors.append([_random_factor(d, rng) for d in group_dims])
    weights = np.array(weights)
    return weights / weights.sum(), factors


def _group_marginals(rho_p, group_dims):
    n = len(group_dims)
    return [reduce_matrix(rho_p, group_dims, [i]) for i in range(n)]


def _local_eigenbases(marginals, keep):
    """Leading eigenvectors of each group marginal, largest eigenvalue first."""
    out = []
    for m, k in zip(marginals, keep):
        _, vecs = np.linalg.eigh(m)
        out.append(vecs[:, ::-1][:, :k])
    return out


def _computational_bases(marginals, keep):
    out = []
    for m, k in zip(marginals, keep):
        idx = np.sort(np.argsort(-np.diag(m).real, kind="stable")[:k])
        out.append(np.eye(m.shape[0], dtype=complex)[:, idx])
    return out


def _dephased_weights(rho_p, bases):
    w = _kron_all(bases)
    q = np.clip(np.einsum("ik,ij,jk->k", w.conj(), rho_p, w).real, 0.0, None)
    return q / q.sum()


def _random_bases(group_dims, keep, rng):
    out = []
    for d, k in zip(group_dims, keep):
        z = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
        out.append(_polar(z)[0])
    return out


def closest_separable(rho: QuantumState, partition: Sequence[Sequence[int]],
                      opts: OptimOptions | None = None, family: str = "product-basis") -> MinimizationResult:
    """Nearest separable state across the site groups of ``partition``.

    ``family="product-basis"`` (default) searches states diagonal in a product
    of freely rotated local bases, one basis per group. Restart 0 starts from
    the eigenbases of the group marginals (for pure bipartite rho this is the
    dephased Schmidt state), restart 1 from the computational basis, the rest
    from random bases.

    ``family="mixture"`` searches arbitrary mixtures of K product pure states.
    Restart 0 starts from the eigenvalue-weighted dominant Schmidt product
    terms of rho's eigenvectors, restart 1 from the diagonal of rho.
    """
    if family not in ("product-basis", "mixture"):
        raise ValueError(f"unknown separable family {family!r}")
    opts = opts or OptimOptions()
    groups = _validate_partition(partition, rho.n_sites)
    if len(groups) == 1 or _is_maximally_mixed(rho):
        return MinimizationResult(rho, 0.0, 0, 0, True, 0.0)

    order = [s - 1 for g in groups for s in g]
    group_dims = [int(np.prod([rho.dims[s - 1] for s in g])) for g in groups]
    rho_p = permute_matrix(rho.matrix, rho.dims, order)

    evals, evecs = np.linalg.eigh(rho_p)
    keep = evals > RANK_TOL
    R = evecs[:, keep] * np.sqrt(evals[keep])
    s_rho = entropy_of_spectrum(evals[keep] / evals[keep].sum()) * LN_BASE

    if family == "mixture":
        K = opts.K_override or default_ansatz_size(group_dims, int(keep.sum()))
        problem = _MixtureProblem(R, s_rho, group_dims, K)
        init_terms = [_schmidt_terms(evals, evecs, group_dims, K), _diagonal_terms(rho_p, group_dims, K)]

        def start(r, rng):
            if r < len(init_terms) and init_terms[r]:
                return problem.pack(*_pad(init_terms[r], group_dims, K, rng))
            factors = [[_random_factor(d, rng) for d in group_dims] for _ in range(K)]
            return problem.pack(rng.dirichlet(np.ones(K)), factors)

        canonical = ([w for w, _ in init_terms[0]], [fs for _, fs in init_terms[0]])
    else:
        marginals = _group_marginals(rho_p, group_dims)
        ranks = [int(np.sum(np.linalg.eigvalsh(m) > RANK_TOL)) for m in marginals]
        keep_dims = default_basis_sizes(group_dims, ranks, opts.K_override)
        problem = _ProductBasisProblem(R, s_rho, group_dims, keep_dims)
        init_bases = [_local_eigenbases(marginals, keep_dims), _computational_bases(marginals, keep_dims)]

        def start(r, rng):
            bases = init_bases[r] if r < len(init_bases) else _random_bases(group_dims, keep_dims, rng)
            q = _dephased_weights(rho_p, bases) if r < len(init_bases) else rng.dirichlet(np.ones(problem.K))
            return problem.pack(np.maximum(q, 1e-12), bases)

        q0 = _dephased_weights(rho_p, init_bases[0])
        canonical = (q0, [[v[:, a] for v, a in zip(init_bases[0], idx)] for idx in np.ndindex(*keep_dims)])

    def make_ansatz(weights, factors):
        p = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        return SeparableAnsatz(
            partition=groups,
            weights=p / p.sum(),
            factors=tuple(tuple(np.asarray(f, dtype=complex) / np.linalg.norm(f) for f in fk) for fk in factors),
        )

    start_ansatz = make_ansatz(*canonical)
    sigma0 = start_ansatz.realize(rho.dims)
    j0 = qjsd_matrices(rho.matrix, sigma0.matrix)
    # the canonical start competes as restart 0 before any descent
    best = (j0, 0, 0, True, start_ansatz, sigma0)
    for r in range(opts.n_restarts(rho.dim)):
        x, j, nit, ok = _lbfgs(problem, start(r, _restart_rng(opts.seed, r)), opts)
        if round(j, 14) < round(best[0], 14):
            ansatz = make_ansatz(*problem.ansatz_parts(x))
            sigma = ansatz.realize(rho.dims)
            best = (qjsd_matrices(rho.matrix, sigma.matrix), r, nit, ok, ansatz, sigma)
    objective, r, nit, ok, ansatz, sigma = best
    return MinimizationResult(sigma, objective, nit, r, ok, j0, ansatz)
