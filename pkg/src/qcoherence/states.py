"""Named state families and product reference bases."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quantum import QuantumState, tensor_all

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])
MINUS = np.array([1.0, -1.0]) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class BasisSpec:
    """Per-site reference basis; column j of ``site_bases[n]`` is basis vector |b_j> on site n+1."""

    site_bases: tuple[np.ndarray, ...]

    def __post_init__(self):
        bases = []
        for i, b in enumerate(self.site_bases):
            b = np.array(b, dtype=complex)
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ValueError(f"site {i + 1}: basis must be a square matrix of column vectors")
            if np.max(np.abs(b.conj().T @ b - np.eye(b.shape[0]))) > 1e-12:
                raise ValueError(f"site {i + 1}: basis vectors are not orthonormal")
            b.setflags(write=False)
            bases.append(b)
        object.__setattr__(self, "site_bases", tuple(bases))

    @classmethod
    def computational(cls, dims: Sequence[int]) -> "BasisSpec":
        return cls(tuple(np.eye(d) for d in dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.site_bases)

    def unitary(self) -> np.ndarray:
        u = np.ones((1, 1), dtype=complex)
        for b in self.site_bases:
            u = np.kron(u, b)
        return u

    def restrict(self, sites: Sequence[int]) -> "BasisSpec":
        """Basis on the 1-based site subset."""
        return BasisSpec(tuple(self.site_bases[s - 1] for s in sites))

    def rotated(self, site_unitaries: Sequence[np.ndarray]) -> "BasisSpec":
        return BasisSpec(tuple(u @ b for u, b in zip(site_unitaries, self.site_bases)))


def _pure(amplitudes, dims) -> QuantumState:
    return QuantumState.from_vector(amplitudes, dims)


def ghz_vector(phi: float) -> np.ndarray:
    v = np.zeros(8)
    v[0], v[7] = np.cos(phi), np.sin(phi)
    return v


def ghz_state(phi: float) -> QuantumState:
    """cos(phi)|000> + sin(phi)|111>."""
    return _pure(ghz_vector(phi), (2, 2, 2))


def werner_ghz(mu: float, phi: float) -> QuantumState:
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    g = ghz_vector(phi)
    return QuantumState((2, 2, 2), (1 - mu) / 8 * np.eye(8) + mu * np.outer(g, g))


def w_state(theta: float, phi: float) -> QuantumState:
    v = np.zeros(8)
    v[0b100] = np.sin(theta) * np.cos(phi)
    v[0b010] = np.sin(theta) * np.sin(phi)
    v[0b001] = np.cos(theta)
    return _pure(v, (2, 2, 2))


def bell_state(sign: int = -1) -> QuantumState:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return _pure(np.array([1.0, 0.0, 0.0, float(sign)]), (2, 2))


def product_minus_state(n: int) -> QuantumState:
    """N-fold tensor power of |-><-|, the (|0>-|1>)^N product state."""
    if n < 1:
        raise ValueError("need at least one site")
    return tensor_all([QuantumState.from_vector(MINUS, (2,))] * n)


# the state is a product of |-> factors; the name follows the family it stands for
product_plus_state = product_minus_state


def basis_state(bits: str) -> QuantumState:
    v = np.zeros(2 ** len(bits))
    v[int(bits, 2)] = 1.0
    return _pure(v, (2,) * len(bits))


def dephased_bell() -> QuantumState:
    """(|00><00| + |11><11|)/2."""
    return QuantumState((2, 2), np.diag([0.5, 0, 0, 0.5]))


FACTORY = {
    "ghz": lambda p: ghz_state(p.get("phi", np.pi / 4)),
    "werner-ghz": lambda p: werner_ghz(p.get("mu", 1.0), p.get("phi", np.pi / 4)),
    "w-state": lambda p: w_state(p.get("theta", np.pi / 4), p.get("phi", 0.0)),
    "bell": lambda p: bell_state(int(p.get("sign", -1))),
    "product-minus": lambda p: product_minus_state(int(p.get("N", 2))),
    "maximally-mixed": lambda p: QuantumState.maximally_mixed((2,) * int(p.get("N", 2))),
}
