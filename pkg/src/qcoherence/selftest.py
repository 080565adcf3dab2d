"""Analytic-oracle and metric-property checks runnable from the command line."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import quantum as qc
from .minimizers import OptimOptions, closest_incoherent, closest_separable
from .quantum import QuantumState
from .states import bell_state, dephased_bell, ghz_state, product_minus_state

BELL_J = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25)) - 0.5


def _plus_zero_qjsd() -> float:
    lam = np.array([1 + 1 / math.sqrt(2), 1 - 1 / math.sqrt(2)]) / 2
    return float(-np.sum(lam * np.log2(lam)))


@dataclass
class SuiteResult:
    name: str
    count: int
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def _oracle_suite() -> SuiteResult:
    z = QuantumState.from_vector([1, 0], (2,))
    o = QuantumState.from_vector([0, 1], (2,))
    plus = QuantumState.from_vector([1, 1], (2,))
    checks = [
        (qc.vn_entropy(QuantumState((2,), np.eye(2) / 2)), 1.0),
        (qc.vn_entropy(QuantumState((2,), np.diag([0.75, 0.25]))), BELL_J + 0.5),
        (qc.qjsd(z, o), 1.0),
        (qc.qjsd(z, plus), _plus_zero_qjsd()),
        (qc.qjsd_distance(bell_state(-1), dephased_bell()), math.sqrt(BELL_J)),
        (qc.qjsd_distance(bell_state(-1), bell_state(1)), 1.0),
    ]
    dev = max(abs(a - b) for a, b in checks)
    return SuiteResult("entropy/qjsd oracles", len(checks), dev, 1e-9)


def _metric_suite(seed: int, n_triples: int = 200) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_triples):
        dims = (2,) if i % 2 == 0 else (2, 2)
        a, b, c = (qc.random_state(dims, rng, rank=int(rng.integers(1, 2 ** len(dims) + 1))) for _ in range(3))
        dab, dba = qc.qjsd_distance(a, b), qc.qjsd_distance(b, a)
        dbc, dac = qc.qjsd_distance(b, c), qc.qjsd_distance(a, c)
        worst = max(worst, abs(dab - dba), max(0.0, dac - dab - dbc), max(0.0, dab - 1.0), max(0.0, -dab))
    return SuiteResult("metric axioms on random triples", n_triples, worst, 1e-9)


def _minimizer_suite(seed: int) -> SuiteResult:
    opts = OptimOptions(seed=seed)
    checks = [
        (closest_incoherent(bell_state(-1), opts=opts).objective, BELL_J),
        (closest_incoherent(QuantumState.from_vector([1, 1], (2,)), opts=opts).objective, BELL_J),
        (closest_separable(bell_state(-1), [[1], [2]], opts).objective, BELL_J),
        (closest_separable(ghz_state(math.pi / 4), [[1], [2], [3]], opts).objective, BELL_J),
        (closest_separable(product_minus_state(2), [[1], [2]], opts).objective, 0.0),
    ]
    dev = max(abs(a - b) for a, b in checks)
    return SuiteResult("minimizer anchors", len(checks), dev, 1e-4)


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "oracles": lambda seed: _oracle_suite(),
    "metric": _metric_suite,
    "minimizers": _minimizer_suite,
}


def run(seed: int = 0, echo: Callable[[str], None] = print) -> bool:
    ok = True
    for fn in SUITES.values():
        res = fn(seed)
        ok &= res.passed
        status = "PASS" if res.passed else "FAIL"
        echo(f"{status}  {res.name:34s} n={res.count:<4d} max_dev={res.max_deviation:.3e} (tol {res.tolerance:g})")
    echo("selftest " + ("passed" if ok else "FAILED"))
    return ok
