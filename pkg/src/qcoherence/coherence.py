"""Decomposition of coherence into total, local, intrinsic, per-site, pairwise and bipartition parts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .minimizers import MinimizationResult, OptimOptions, closest_incoherent, closest_separable
from .quantum import QuantumState, partial_trace, qjsd_distance
from .states import BasisSpec

OUTPUTS = ("c_total", "c_local", "c_intrinsic", "per_site", "pairwise", "bipartitions", "monogamy")


def _basis(rho, basis):
    return basis or BasisSpec.computational(rho.dims)


def total_coherence(rho: QuantumState, basis: BasisSpec | None = None,
                    opts: OptimOptions | None = None) -> tuple[float, QuantumState]:
    res = closest_incoherent(rho, _basis(rho, basis), opts)
    return res.distance, res.minimizer


def intrinsic_coherence(rho: QuantumState, partition: Sequence[Sequence[int]] | None = None,
                        opts: OptimOptions | None = None, family: str = "product-basis") -> tuple[float, QuantumState]:
    """Distance to the closest separable state; the default partition splits every site."""
    partition = partition or [[n] for n in range(1, rho.n_sites + 1)]
    res = closest_separable(rho, partition, opts, family)
    return res.distance, res.minimizer


def local_coherence(rho: QuantumState, basis: BasisSpec | None = None,
                    opts: OptimOptions | None = None, family: str = "product-basis") -> float:
    _, rho_d = total_coherence(rho, basis, opts)
    _, sigma = intrinsic_coherence(rho, None, opts, family)
    return qjsd_distance(sigma, rho_d)


def site_coherence(rho: QuantumState, n: int, basis: BasisSpec | None = None,
                   opts: OptimOptions | None = None) -> float:
    if not 1 <= n <= rho.n_sites:
        raise ValueError(f"site {n} out of range 1..{rho.n_sites}")
    return total_coherence(partial_trace(rho, [n]), _basis(rho, basis).restrict([n]), opts)[0]


def pairwise_intrinsic(rho: QuantumState, m: int, n: int, opts: OptimOptions | None = None,
                       family: str = "product-basis") -> float:
    if m == n:
        raise ValueError("pairwise coherence needs two distinct sites")
    m, n = sorted((m, n))
    return intrinsic_coherence(partial_trace(rho, [m, n]), [[1], [2]], opts, family)[0]


def bipartition_coherence(rho: QuantumState, group: Sequence[int], opts: OptimOptions | None = None,
                          family: str = "product-basis") -> float:
    """Intrinsic coherence across ``group`` versus the remaining sites."""
    rest = [s for s in range(1, rho.n_sites + 1) if s not in group]
    return intrinsic_coherence(rho, [list(group), rest], opts, family)[0]


def monogamy(rho: QuantumState, opts: OptimOptions | None = None, family: str = "product-basis") -> float:
    """sum_n C_{1:n} - C_{1:2...N}; M <= 0 is monogamous, M > 0 polygamous."""
    if rho.n_sites < 2:
        raise ValueError("monogamy needs at least two sites")
    pairs = sum(pairwise_intrinsic(rho, 1, n, opts, family) for n in range(2, rho.n_sites + 1))
    return pairs - bipartition_coherence(rho, [1], opts, family)


def bipartition_label(group: Sequence[int], n_sites: int) -> str:
    rest = [s for s in range(1, n_sites + 1) if s not in group]
    return "".join(map(str, group)) + ":" + "".join(map(str, rest))


@dataclass
class CoherenceReport:
    n_sites: int
    c_total: float | None = None
    c_intrinsic: float | None = None
    c_local: float | None = None
    per_site: list[float] | None = None
    pairwise: dict[tuple[int, int], float] = field(default_factory=dict)
    bipartitions: dict[int, float] = field(default_factory=dict)  # site n -> C_{n:rest}
    monogamy_M: float | None = None
    slack_local_intrinsic: float | None = None  # C_L + C_I - C
    slack_site_sum: float | None = None  # sum_n C_n + C_I - C
    tri_sums: dict[str, float] | None = None
    converged: bool = True
    rho_d: QuantumState | None = field(default=None, repr=False)
    sigma_min: QuantumState | None = field(default=None, repr=False)

    @property
    def full_split(self) -> float | None:
        return self.c_intrinsic

    def bipartition_by_label(self) -> dict[str, float]:
        return {bipartition_label([n], self.n_sites): v for n, v in sorted(self.bipartitions.items())}

    def records(self) -> list[tuple[str, float | int]]:
        """Flat (key, value) pairs of every computed field."""
        out: list[tuple[str, float | int]] = []
        for key in ("c_total", "c_local", "c_intrinsic"):
            if getattr(self, key) is not None:
                out.append((key, getattr(self, key)))
        if self.per_site is not None:
            out += [(f"c_site_{n}", v) for n, v in enumerate(self.per_site, start=1)]
        out += [(f"c_pair_{m}_{n}", v) for (m, n), v in sorted(self.pairwise.items())]
        out += [(f"c_bipart_{n}_rest", v) for n, v in sorted(self.bipartitions.items())]
        if self.c_intrinsic is not None:
            out.append(("c_full_split", self.c_intrinsic))
        if self.monogamy_M is not None:
            out.append(("monogamy", self.monogamy_M))
        if self.slack_local_intrinsic is not None:
            out.append(("slack_eq6", self.slack_local_intrinsic))
        if self.slack_site_sum is not None:
            out.append(("slack_eq7", self.slack_site_sum))
        for k, v in (self.tri_sums or {}).items():
            out.append((f"tri_sum_{k}", v))
        out.append(("converged", int(self.converged)))
        return out


def _needs(outputs: Iterable[str]) -> set[str]:
    want = set(outputs)
    unknown = want - set(OUTPUTS)
    if unknown:
        raise ValueError(f"unknown outputs: {sorted(unknown)}")
    if "c_local" in want:
        want |= {"c_total", "c_intrinsic"}
    return want


def decomposition_report(rho: QuantumState, basis: BasisSpec | None = None, opts: OptimOptions | None = None,
                         outputs: Iterable[str] | None = None, scope: str = "all",
                         family: str = "product-basis") -> CoherenceReport:
    """Compute the requested coherence contributions of one state.

    ``scope="first"`` restricts pairs to (1, n) and bipartitions to 1:rest,
    which is all the monogamy score needs. The local coherence always uses the
    two minimizers found in this same call.
    """
    if scope not in ("all", "first"):
        raise ValueError(f"scope must be 'all' or 'first', got {scope!r}")
    opts = opts or OptimOptions()
    basis = _basis(rho, basis)
    want = _needs(OUTPUTS if outputs is None else outputs)
    N = rho.n_sites
    rep = CoherenceReport(n_sites=N)
    flags = []

    def track(res: MinimizationResult) -> MinimizationResult:
        flags.append(res.converged)
        return res

    if "c_total" in want:
        res = track(closest_incoherent(rho, basis, opts))
        rep.c_total, rep.rho_d = res.distance, res.minimizer
    if "c_intrinsic" in want:
        partition = [[n] for n in range(1, N + 1)]
        res = track(closest_separable(rho, partition, opts, family))
        rep.c_intrinsic, rep.sigma_min = res.distance, res.minimizer
    if "c_local" in want:
        rep.c_local = qjsd_distance(rep.sigma_min, rep.rho_d)
    if "per_site" in want:
        rep.per_site = []
        for n in range(1, N + 1):
            res = track(closest_incoherent(partial_trace(rho, [n]), basis.restrict([n]), opts))
            rep.per_site.append(res.distance)

    pairs = []
    if "pairwise" in want or "monogamy" in want:
        pairs = [(1, n) for n in range(2, N + 1)]
        if "pairwise" in want and scope == "all":
            pairs = [(m, n) for m in range(1, N + 1) for n in range(m + 1, N + 1)]
    for m, n in pairs:
        res = track(closest_separable(partial_trace(rho, [m, n]), [[1], [2]], opts, family))
        rep.pairwise[(m, n)] = res.distance

    cut_sites = []
    if N >= 2 and ("bipartitions" in want or "monogamy" in want):
        cut_sites = [1]
        if "bipartitions" in want and scope == "all":
            cut_sites = list(range(1, N + 1))
    for n in cut_sites:
        rest = [s for s in range(1, N + 1) if s != n]
        res = track(closest_separable(rho, [[n], rest], opts, family))
        rep.bipartitions[n] = res.distance

    if "monogamy" in want and N >= 2:
        rep.monogamy_M = sum(rep.pairwise[(1, n)] for n in range(2, N + 1)) - rep.bipartitions[1]
    if rep.c_local is not None:
        rep.slack_local_intrinsic = rep.c_local + rep.c_intrinsic - rep.c_total
    if rep.per_site is not None and rep.c_total is not None and rep.c_intrinsic is not None:
        rep.slack_site_sum = sum(rep.per_site) + rep.c_intrinsic - rep.c_total
    if N == 3 and len(rep.pairwise) == 3 and len(rep.bipartitions) == 3:
        p, b = rep.pairwise, rep.bipartitions
        rep.tri_sums = {
            "23_1": p[(2, 3)] + b[1],
            "12_3": p[(1, 2)] + b[3],
            "13_2": p[(1, 3)] + b[2],
        }
    rep.converged = all(flags)
    return rep


def triangle_slack(rho: QuantumState, rho_d: QuantumState, sigma: QuantumState) -> float:
    """D(rho, sigma) + D(sigma, rho_d) - D(rho, rho_d); nonnegative when the triangle inequality holds."""
    return qjsd_distance(rho, sigma) + qjsd_distance(sigma, rho_d) - qjsd_distance(rho, rho_d)


def is_monogamous(M: float, tol: float = 0.0) -> bool:
    return M <= tol


__all__ = [
    "CoherenceReport",
    "OUTPUTS",
    "bipartition_coherence",
    "decomposition_report",
    "intrinsic_coherence",
    "local_coherence",
    "monogamy",
    "pairwise_intrinsic",
    "site_coherence",
    "total_coherence",
    "triangle_slack",
]

