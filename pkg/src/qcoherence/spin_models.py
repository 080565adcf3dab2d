"""Two-site transverse Ising and XXZ chain Hamiltonians, ground states by exact diagonalization.

Spin up is |0> (sigma_z = +1); the total-Sz label of a basis state is
(#zeros - #ones) / 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .quantum import QuantumState

MAX_DIM = 2 ** 14
DEGENERACY_TOL = 1e-10

SX = np.array([[0, 1], [1, 0]], dtype=float)
SZ = np.array([[1, 0], [0, -1]], dtype=float)
I2 = np.eye(2)


class CapacityError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    variant: str  # "ising2" or "xxz"
    N: int = 2
    J: float = 1.0
    lam: float = 1.0
    eps: float = 0.2
    delta: float = 1.0
    boundary: str = "periodic"

    def __post_init__(self):
        if self.variant not in ("ising2", "xxz"):
            raise ValueError(f"unknown model variant {self.variant!r}")
        if self.variant == "ising2" and self.N != 2:
            raise ValueError("ising2 is defined for N = 2 only")
        if self.N < 2:
            raise ValueError("need N >= 2")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be periodic or open, got {self.boundary!r}")
        for name in ("J", "lam", "eps", "delta"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class GroundStateResult:
    state: QuantumState
    vector: np.ndarray
    energy: float
    degeneracy_gap: float
    sector_label: float | None = None


def build_ising2(lam: float, J: float, eps: float) -> np.ndarray:
    h = lam * np.kron(SX, SX)
    h += J * (np.kron(SX, I2) + np.kron(I2, SX))
    h += eps * lam * (np.kron(SZ, I2) + np.kron(I2, SZ))
    return h


def bonds(N: int, boundary: str) -> list[tuple[int, int]]:
    """Nearest-neighbour bonds (0-based). Periodic takes n+1 mod N literally, so N=2 doubles the bond."""
    out = [(n, n + 1) for n in range(N - 1)]
    if boundary == "periodic":
        out.append((N - 1, 0))
    return out


@dataclass(frozen=True)
class SectorBlock:
    sz: float
    basis: np.ndarray  # integer basis-state labels, site 1 = most significant bit
    matrix: np.ndarray


@dataclass(frozen=True)
class BlockedOperator:
    N: int
    blocks: tuple[SectorBlock, ...]

    def dense(self) -> np.ndarray:
        d = 2 ** self.N
        h = np.zeros((d, d))
        for b in self.blocks:
            h[np.ix_(b.basis, b.basis)] = b.matrix
        return h


def _sector_basis(N: int, n_down: int) -> np.ndarray:
    labels = []
    for ones in combinations(range(N), n_down):
        labels.append(sum(1 << (N - 1 - i) for i in ones))
    return np.array(sorted(labels), dtype=np.int64)


def build_xxz(N: int, J: float, delta: float, boundary: str = "periodic") -> BlockedOperator:
    """J * sum_n (XX + YY + delta ZZ) on bonds (n, n+1), blocked by total Sz."""
    if N < 2:
        raise ValueError("need N >= 2")
    bl = bonds(N, boundary)
    blocks = []
    for n_down in range(N + 1):
        basis = _sector_basis(N, n_down)
        index = {int(s): i for i, s in enumerate(basis)}
        h = np.zeros((len(basis), len(basis)))
        for i, s in enumerate(basis):
            s = int(s)
            for a, b in bl:
                ba = (s >> (N - 1 - a)) & 1
                bb = (s >> (N - 1 - b)) & 1
                h[i, i] += J * delta * (1 if ba == bb else -1)
                if ba != bb:
                    # XX + YY = 2 (S+S- + S-S+) flips an antiparallel pair
                    t = s ^ (1 << (N - 1 - a)) ^ (1 << (N - 1 - b))
                    h[index[t], i] += 2 * J
        blocks.append(SectorBlock(sz=(N - 2 * n_down) / 2, basis=basis, matrix=h))
    return BlockedOperator(N, tuple(blocks))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v).round(12)))
    return v * (abs(v[k]) / v[k])


def ground_state(spec: ModelSpec) -> GroundStateResult:
    """Lowest eigenstate; ties within 1e-10 go to the largest total Sz."""
    if 2 ** spec.N > MAX_DIM:
        raise CapacityError(f"Hilbert dimension 2^{spec.N} exceeds the {MAX_DIM} guard")
    if spec.variant == "ising2":
        evals, evecs = np.linalg.eigh(build_ising2(spec.lam, spec.J, spec.eps))
        v = _fix_phase(evecs[:, 0].astype(complex))
        return GroundStateResult(
            state=QuantumState.from_vector(v, (2, 2)),
            vector=v,
            energy=float(evals[0]),
            degeneracy_gap=float(evals[1] - evals[0]),
        )

    op = build_xxz(spec.N, spec.J, spec.delta, spec.boundary)
    all_levels = []
    best = None
    for block in op.blocks:
        evals, evecs = np.linalg.eigh(block.matrix)
        all_levels.extend(evals.tolist())
        e0 = evals[0]
        if best is None or e0 < best[0] - DEGENERACY_TOL or (
            abs(e0 - best[0]) <= DEGENERACY_TOL and block.sz > best[1].sz
        ):
            best = (e0, block, evecs[:, 0])
    e0, block, vec = best
    full = np.zeros(2 ** spec.N, dtype=complex)
    full[block.basis] = vec
    full = _fix_phase(full)
    levels = np.sort(all_levels)
    return GroundStateResult(
        state=QuantumState.from_vector(full, (2,) * spec.N),
        vector=full,
        energy=float(e0),
        degeneracy_gap=float(levels[1] - levels[0]),
        sector_label=block.sz,
    )


def neel_superposition(N: int) -> np.ndarray:
    a = int("01" * (N // 2) + "0" * (N % 2), 2)
    b = int("10" * (N // 2) + "1" * (N % 2), 2)
    v = np.zeros(2 ** N)
    v[a] = v[b] = 1 / np.sqrt(2)
    return v
