"""Density matrices, tensor composition/reduction, von Neumann entropy and the QJSD metric."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

ENTROPY_BASE = 2.0

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


class StateValidationError(ValueError):
    """Raised when a matrix is not a valid density matrix."""


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Validated density matrix over a tensor product of sites.

    Site 1 is the most significant tensor factor. The matrix is hermitized
    once at construction and stored read-only.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise StateValidationError(f"dims must be positive integers, got {self.dims}")
        m = np.array(self.matrix, dtype=complex)
        side = int(np.prod(dims))
        if m.shape != (side, side):
            raise StateValidationError(f"matrix shape {m.shape} does not match dims {dims}")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > HERMITIAN_TOL:
            raise StateValidationError(f"matrix is not Hermitian (max deviation {herm_err:.3g})")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1) > TRACE_TOL:
            raise StateValidationError(f"trace is {tr!r}, expected 1")
        lmin = np.linalg.eigvalsh(m)[0]
        if lmin < -PSD_TOL:
            raise StateValidationError(f"matrix is not positive semidefinite (min eigenvalue {lmin:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> SpectralDecomposition:
        return spectral_decomposition(self.matrix)

    def allclose(self, other: "QuantumState", atol: float = 1e-10) -> bool:
        return self.dims == other.dims and np.allclose(self.matrix, other.matrix, atol=atol, rtol=0)

    def __repr__(self):
        return f"QuantumState(dims={list(self.dims)})"

    @classmethod
    def from_vector(cls, psi, dims: Sequence[int]) -> "QuantumState":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(tuple(dims), np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "QuantumState":
        d = int(np.prod(dims))
        return cls(tuple(dims), np.eye(d) / d)


def spectral_decomposition(matrix: np.ndarray) -> SpectralDecomposition:
    """Eigen-decomposition of a density matrix with the spectrum clipped to [0, 1].

    Negative eigenvalues are rounding artefacts of already validated states;
    they are set to zero and the spectrum renormalized to unit sum.
    """
    evals, evecs = np.linalg.eigh(matrix)
    if evals[0] < -PSD_TOL:
        raise StateValidationError(f"eigenvalue {evals[0]:.3g} below floor")
    evals = np.clip(evals, 0.0, None)
    evals = np.clip(evals / evals.sum(), 0.0, 1.0)
    return SpectralDecomposition(evals, evecs)


def entropy_of_spectrum(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)) / np.log(ENTROPY_BASE))


def matrix_entropy(m: np.ndarray) -> float:
    """Entropy of a PSD unit-trace array, without constructing a QuantumState."""
    return entropy_of_spectrum(np.linalg.eigvalsh(m))


def vn_entropy(rho: QuantumState) -> float:
    return entropy_of_spectrum(rho.spectrum().eigenvalues)


def _check_same_dims(rho: QuantumState, sigma: QuantumState):
    if rho.dims != sigma.dims:
        raise ValueError(f"dimension mismatch: {list(rho.dims)} vs {list(sigma.dims)}")


def qjsd_matrices(rho: np.ndarray, sigma: np.ndarray) -> float:
    # both sums commute bitwise, so J(rho, sigma) == J(sigma, rho) exactly
    j = matrix_entropy((rho + sigma) / 2) - (matrix_entropy(rho) + matrix_entropy(sigma)) / 2
    return max(j, 0.0)


def qjsd(rho: QuantumState, sigma: QuantumState) -> float:
    """Quantum Jensen-Shannon divergence S((rho+sigma)/2) - S(rho)/2 - S(sigma)/2 in bits."""
    _check_same_dims(rho, sigma)
    return qjsd_matrices(rho.matrix, sigma.matrix)


def qjsd_distance(rho: QuantumState, sigma: QuantumState) -> float:
    return float(np.sqrt(qjsd(rho, sigma)))


def tensor(a: QuantumState, b: QuantumState) -> QuantumState:
    return QuantumState(a.dims + b.dims, np.kron(a.matrix, b.matrix))


def tensor_all(states: Sequence[QuantumState]) -> QuantumState:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def _validate_sites(sites: Sequence[int], n: int) -> list[int]:
    sites = [int(s) for s in sites]
    if not sites:
        raise ValueError("site set must be nonempty")
    if any(s < 1 or s > n for s in sites):
        raise ValueError(f"site index out of range 1..{n}: {sites}")
    if any(b <= a for a, b in zip(sites, sites[1:])):
        raise ValueError(f"site indices must be strictly increasing: {sites}")
    return sites


def reduce_matrix(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace on a raw array; ``keep`` holds 0-based site indices in increasing order."""
    n = len(dims)
    t = matrix.reshape(tuple(dims) + tuple(dims))
    drop = [i for i in range(n) if i not in keep]
    # trace out from the highest index so the remaining axis numbers stay valid
    for k, i in enumerate(sorted(drop, reverse=True)):
        cur = n - k
        t = np.trace(t, axis1=i, axis2=i + cur)
    d = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d, d)


def partial_trace(rho: QuantumState, keep: Sequence[int]) -> QuantumState:
    """Reduced state on the 1-based, strictly increasing site set ``keep``."""
    keep = _validate_sites(keep, rho.n_sites)
    idx = [k - 1 for k in keep]
    return QuantumState(tuple(rho.dims[i] for i in idx), reduce_matrix(rho.matrix, rho.dims, idx))


def permute_matrix(matrix: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new site j is old site ``order[j]`` (0-based)."""
    n = len(dims)
    t = matrix.reshape(tuple(dims) + tuple(dims))
    t = t.transpose(list(order) + [n + i for i in order])
    d = matrix.shape[0]
    return t.reshape(d, d)


def permute_sites(rho: QuantumState, order: Sequence[int]) -> QuantumState:
    """Relabel sites; ``order`` is a 1-based permutation, new site j holds old site order[j-1]."""
    idx = [o - 1 for o in order]
    if sorted(idx) != list(range(rho.n_sites)):
        raise ValueError(f"not a permutation of 1..{rho.n_sites}: {list(order)}")
    return QuantumState(tuple(rho.dims[i] for i in idx), permute_matrix(rho.matrix, rho.dims, idx))


def apply_unitary(rho: QuantumState, u: np.ndarray) -> QuantumState:
    return QuantumState(rho.dims, u @ rho.matrix @ u.conj().T)


def random_state(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> QuantumState:
    """Random density matrix G G^dag / Tr(G G^dag) with complex Gaussian G of the given rank."""
    d = int(np.prod(dims))
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return QuantumState(tuple(dims), m / np.trace(m).real)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def trace_distance(rho: QuantumState, sigma: QuantumState) -> float:
    _check_same_dims(rho, sigma)
    return float(np.sum(np.abs(np.linalg.eigvalsh(rho.matrix - sigma.matrix))) / 2)


# --- state file format -------------------------------------------------------

def dumps_state(rho: QuantumState) -> str:
    rows = []
    for row in rho.matrix:
        cells = ", ".join(f"[{z.real:.17g}, {z.imag:.17g}]" for z in row)
        rows.append(f"    [{cells}]")
    body = ",\n".join(rows)
    return f'{{\n  "dims": {json.dumps(list(rho.dims))},\n  "matrix": [\n{body}\n  ]\n}}\n'


def loads_state(text: str) -> QuantumState:
    try:
        doc = json.loads(text)
        dims = [int(d) for d in doc["dims"]]
        m = np.array([[complex(re, im) for re, im in row] for row in doc["matrix"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise StateValidationError(f"malformed state document: {exc}") from exc
    return QuantumState(tuple(dims), m)


def save_state(rho: QuantumState, path) -> None:
    Path(path).write_text(dumps_state(rho))


def load_state(path) -> QuantumState:
    return loads_state(Path(path).read_text())
