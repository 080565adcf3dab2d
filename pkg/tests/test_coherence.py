import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcoherence import quantum as qc
from qcoherence.coherence import (
    bipartition_label,
    decomposition_report,
    intrinsic_coherence,
    local_coherence,
    monogamy,
    pairwise_intrinsic,
    site_coherence,
    total_coherence,
    triangle_slack,
)
from qcoherence.minimizers import OptimOptions
from qcoherence.quantum import QuantumState
from qcoherence.spin_models import ModelSpec, ground_state
from qcoherence.states import BasisSpec, bell_state, ghz_state, product_minus_state, w_state, werner_ghz

BELL_D = 0.5579230452841438
FAST = OptimOptions(restarts=3)


def test_bell_total():
    c, rho_d = total_coherence(bell_state(-1))
    assert c == pytest.approx(BELL_D, abs=1e-6)
    np.testing.assert_allclose(rho_d.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-6)


def test_incoherent_product_is_zero():
    rho = qc.tensor(QuantumState.from_vector([1, 0], (2,)), QuantumState((2,), np.diag([0.3, 0.7])))
    rep = decomposition_report(rho, opts=FAST)
    for key, v in rep.records():
        if key != "converged":
            assert abs(v) <= 1e-6, key


def test_product_minus_local():
    rho = product_minus_state(2)
    c, _ = total_coherence(rho)
    c_i, _ = intrinsic_coherence(rho)
    assert c_i <= 1e-3
    assert local_coherence(rho) == pytest.approx(c, abs=2e-3)


def test_bell_local_vanishes():
    assert local_coherence(bell_state(-1)) <= 1e-3


@pytest.mark.parametrize("phi", [0.0, 0.4, math.pi / 4])
def test_ghz_sites_incoherent(phi):
    for n in (1, 2, 3):
        assert site_coherence(ghz_state(phi), n) <= 1e-6


def test_product_minus_site():
    for n in (1, 2):
        assert site_coherence(product_minus_state(2), n) == pytest.approx(BELL_D, abs=1e-6)


def test_site_range():
    with pytest.raises(ValueError):
        site_coherence(bell_state(1), 3)


@pytest.mark.parametrize("delta", [-1.5, 1.0, 4.0])
def test_xxz_sites_incoherent(delta):
    rho = ground_state(ModelSpec("xxz", N=6, delta=delta)).state
    for n in range(1, 7):
        assert site_coherence(rho, n) <= 1e-6


@pytest.mark.parametrize("mu", [0.25, 1.0])
def test_werner_pairs_vanish(mu):
    rho = werner_ghz(mu, math.pi / 4)
    for m, n in [(1, 2), (1, 3), (2, 3)]:
        assert pairwise_intrinsic(rho, m, n, FAST) <= 1e-3


def test_w_pairs():
    assert pairwise_intrinsic(w_state(math.pi / 4, 0.0), 1, 3) == pytest.approx(BELL_D, abs=2e-3)
    assert pairwise_intrinsic(w_state(math.pi / 4, math.pi / 2), 1, 3) <= 1e-3
    with pytest.raises(ValueError):
        pairwise_intrinsic(w_state(0.3, 0.2), 2, 2)


def test_ghz_monogamy():
    assert monogamy(ghz_state(math.pi / 4)) == pytest.approx(-BELL_D, abs=2e-3)


def test_w_polygamous():
    for phi in np.linspace(0, 2 * math.pi, 8, endpoint=False):
        assert monogamy(w_state(math.pi / 4, phi), FAST) >= -1e-3


def test_maximally_mixed_report():
    rep = decomposition_report(QuantumState.maximally_mixed((2, 2, 2)))
    assert all(v == 0 for k, v in rep.records() if k != "converged")
    assert rep.converged


def test_werner_pure_report():
    rep = decomposition_report(werner_ghz(1.0, math.pi / 4))
    assert rep.c_total == pytest.approx(rep.full_split, abs=2e-3)
    for v in rep.bipartitions.values():
        assert v == pytest.approx(rep.c_total, abs=2e-3)
    assert set(rep.tri_sums) == {"23_1", "12_3", "13_2"}
    assert rep.monogamy_M == pytest.approx(-rep.c_total, abs=2e-3)


def test_ising_crossover():
    weak = decomposition_report(ground_state(ModelSpec("ising2", J=0.0, eps=0.01)).state, outputs=["c_local"])
    strong = decomposition_report(ground_state(ModelSpec("ising2", J=3.0, eps=0.2)).state, outputs=["c_local"])
    assert weak.c_intrinsic > weak.c_local
    assert strong.c_local > strong.c_intrinsic


def test_scope_first_only_needs_site_one():
    rho = w_state(math.pi / 4, 0.3)
    rep = decomposition_report(rho, opts=FAST, outputs=["monogamy"], scope="first")
    assert set(rep.pairwise) == {(1, 2), (1, 3)} and set(rep.bipartitions) == {1}
    assert rep.c_total is None and rep.tri_sums is None


def test_output_validation():
    with pytest.raises(ValueError):
        decomposition_report(bell_state(1), outputs=["entanglement"])
    with pytest.raises(ValueError):
        decomposition_report(bell_state(1), scope="some")


def test_labels():
    assert bipartition_label([1], 3) == "1:23"
    assert bipartition_label([2], 3) == "2:13"


def _random(seed, dims=(2, 2, 2)):
    rng = np.random.default_rng(seed)
    return qc.random_state(dims, rng, rank=int(rng.integers(1, 4)))


seeds = st.integers(0, 2 ** 32 - 1)


@given(seeds)
@settings(max_examples=8)
def test_report_invariants(seed):
    rho = _random(seed)
    rep = decomposition_report(rho, opts=FAST)
    assert triangle_slack(rho, rep.rho_d, rep.sigma_min) >= -1e-9
    assert rep.slack_local_intrinsic >= -1e-9
    assert rep.slack_site_sum >= -1e-6
    for key, v in rep.records():
        if key.startswith("c_"):
            assert -1e-12 <= v <= 1 + 1e-12, key


@given(seeds, seeds)
@settings(max_examples=8)
def test_basis_covariance(s1, s2):
    rho = _random(s1, (2, 2))
    rng = np.random.default_rng(s2)
    us = [qc.random_unitary(2, rng) for _ in range(2)]
    basis = BasisSpec.computational((2, 2)).rotated(us)
    rotated = qc.apply_unitary(rho, np.kron(us[0], us[1]))
    assert total_coherence(rotated, basis)[0] == pytest.approx(total_coherence(rho)[0], abs=2e-3)


@given(seeds)
@settings(max_examples=5)
def test_permutation_equivariance(seed):
    rho = _random(seed)
    order = [3, 1, 2]  # new site j holds old site order[j-1]
    a = decomposition_report(rho, opts=FAST, outputs=["per_site", "pairwise"])
    b = decomposition_report(qc.permute_sites(rho, order), opts=FAST, outputs=["per_site", "pairwise"])
    for j, old in enumerate(order):
        assert b.per_site[j] == pytest.approx(a.per_site[old - 1], abs=2e-3)
    for (m, n), v in b.pairwise.items():
        key = tuple(sorted((order[m - 1], order[n - 1])))
        assert v == pytest.approx(a.pairwise[key], abs=2e-3)


@pytest.mark.slow
def test_xxz_large_anisotropy_monogamous():
    rho = ground_state(ModelSpec("xxz", N=10, delta=10.0)).state
    rep = decomposition_report(rho, outputs=["monogamy"], scope="first")
    assert rep.monogamy_M < 0
    # pair coherence decays like the 1/(2 delta) nearest-neighbour off-diagonal
    assert max(rep.pairwise.values()) <= 0.05
