import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density
from fermient.channels import CHOI_DIMS, erasure_choi, grassmann_output_state
from fermient.density import DensityError, DensityMatrix
from fermient.entanglement import (
    EntanglementReport,
    RoofConfig,
    RoofConstraint,
    binary_entropy,
    concurrence_two_qubit,
    eof_convex_roof,
    eof_wootters,
    log_negativity,
    negativity,
    von_neumann_entropy,
)
from fermient.roof import _Objective, range_factor

SSR = RoofConstraint.PARITY_SSR
FAST = RoofConfig(restarts=8)
BELL = np.zeros((4, 4))
BELL[np.ix_([0, 3], [0, 3])] = 0.5


def h_direct(x):
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def x_state_concurrence(rho):
    rho = np.asarray(rho)
    a = abs(rho[0, 3]) - math.sqrt(rho[1, 1].real * rho[2, 2].real)
    b = abs(rho[1, 2]) - math.sqrt(rho[0, 0].real * rho[3, 3].real)
    return 2 * max(0.0, a, b)


def textbook_concurrence(rho):
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sort(np.sqrt(np.abs(np.linalg.eigvals(r))))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def ssr_valid_density(rng, even_rank=2, odd_rank=2):
    rho = np.zeros((4, 4), dtype=complex)
    for idx, rank in (([0, 3], even_rank), ([1, 2], odd_rank)):
        a = rng.standard_normal((2, rank)) + 1j * rng.standard_normal((2, rank))
        rho[np.ix_(idx, idx)] = a @ a.conj().T
    return rho / np.trace(rho).real


# entropies


def test_entropy_examples():
    assert von_neumann_entropy(BELL) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1)
    assert von_neumann_entropy(np.diag([0.85355, 0.14645])) == pytest.approx(h_direct(0.85355), abs=1e-12)
    assert von_neumann_entropy(np.diag([0.85355, 0.14645])) == pytest.approx(0.601, abs=1e-3)
    with pytest.raises(DensityError):
        von_neumann_entropy(np.diag([1.2, -0.2]))


def test_binary_entropy_edges():
    assert binary_entropy(0) == binary_entropy(1) == 0
    assert binary_entropy(0.5) == 1


# negativity


def test_negativity_examples():
    diag = DensityMatrix("ab", np.diag([0.1, 0.2, 0.3, 0.4]))
    assert negativity(diag, ["b"]) == 0
    assert log_negativity(diag, ["b"]) == 0
    bell = DensityMatrix("ab", BELL)
    assert negativity(bell, ["b"]) == pytest.approx(0.5)
    assert log_negativity(bell, ["b"]) == pytest.approx(1)
    for p in (0.0, 0.3, 1.0):
        assert negativity(erasure_choi(p), [1], CHOI_DIMS) == pytest.approx((1 - p) / 2, abs=1e-12)
    with pytest.raises(DensityError):
        negativity(BELL, [1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3))
def test_negativity_vanishes_on_diagonal_states(weights):
    w = np.array(weights) / sum(weights)
    assert negativity(DensityMatrix("ab", np.diag(w)), ["b"]) == 0


# concurrence


def test_concurrence_bell():
    assert concurrence_two_qubit(BELL) == pytest.approx(1, abs=1e-14)
    assert eof_wootters(BELL) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("r", np.linspace(0, math.pi / 4, 7))
def test_concurrence_accelerated_state(r):
    rho = grassmann_output_state(r)
    assert concurrence_two_qubit(rho) == pytest.approx(x_state_concurrence(rho.matrix), abs=1e-13)
    assert concurrence_two_qubit(rho) == pytest.approx(math.cos(r), abs=1e-13)
    assert eof_wootters(rho) == pytest.approx(binary_entropy((1 + math.sin(r)) / 2), abs=1e-12)


def test_eof_wootters_infinite_acceleration():
    expected = h_direct((1 + math.sqrt(0.5)) / 2)
    assert eof_wootters(grassmann_output_state(math.pi / 4)) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.601, abs=1e-3)


def test_concurrence_matches_textbook_route_on_full_rank_states():
    rng = np.random.default_rng(5)
    for _ in range(30):
        rho = random_density(rng)
        assert concurrence_two_qubit(rho) == pytest.approx(textbook_concurrence(rho), abs=1e-8)


def test_concurrence_of_pure_states():
    rng = np.random.default_rng(6)
    for _ in range(20):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v /= np.linalg.norm(v)
        a, b, c, d = v
        assert concurrence_two_qubit(np.outer(v, v.conj())) == pytest.approx(2 * abs(a * d - b * c), abs=1e-10)


def test_concurrence_rejects_wrong_dimension():
    with pytest.raises(DensityError):
        concurrence_two_qubit(np.eye(2) / 2)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_wootters_vanishes_when_concurrence_does(p, q, mix):
    # products of single-mode diagonal states mixed with white noise are separable
    prod = np.kron(np.diag([p, 1 - p]), np.diag([q, 1 - q]))
    rho = (1 - mix) * prod + mix * np.eye(4) / 4
    assert concurrence_two_qubit(rho) == 0
    assert eof_wootters(rho) == 0


# convex roof


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    obj = _Objective(range_factor(random_density(rng)), (2, 2), 8)
    x = rng.standard_normal(64)
    _, grad = obj(x)
    step = 1e-6
    fd = np.array([(obj(x + step * e)[0] - obj(x - step * e)[0]) / (2 * step) for e in np.eye(64)])
    np.testing.assert_allclose(grad, fd, atol=1e-7)


@pytest.mark.parametrize("r", [0.0, math.pi / 8, math.pi / 4])
def test_unconstrained_roof_matches_wootters_on_accelerated_state(r):
    rho = grassmann_output_state(r)
    report, _ = eof_convex_roof(rho)
    assert report.value == pytest.approx(eof_wootters(rho), abs=1e-3)


def test_ssr_roof_at_rest_is_one():
    report, decomp = eof_convex_roof(grassmann_output_state(0.0), SSR)
    assert report.value == pytest.approx(1, abs=1e-12)
    assert len(decomp) == 1


def test_ssr_roof_exceeds_qubit_value_at_infinite_acceleration():
    rho = grassmann_output_state(math.pi / 4)
    report, _ = eof_convex_roof(rho, SSR)
    assert report.value > eof_wootters(rho) + 0.05


def test_ssr_roof_matches_blockwise_wootters():
    # each parity block is a two-qubit state in its own right, so Wootters is exact per block
    rng = np.random.default_rng(21)
    for _ in range(4):
        rho = ssr_valid_density(rng)
        oracle = 0.0
        for idx in ([0, 3], [1, 2]):
            block = np.zeros((4, 4), dtype=complex)
            block[np.ix_(idx, idx)] = rho[np.ix_(idx, idx)]
            w = np.trace(block).real
            oracle += w * eof_wootters(block / w)
        report, _ = eof_convex_roof(rho, SSR, FAST)
        assert report.value == pytest.approx(oracle, abs=1e-6)


def test_ssr_roof_rejects_forbidden_state(psi_ab):
    from fermient.density import outer

    with pytest.raises(DensityError, match="forbidden"):
        eof_convex_roof(outer(psi_ab), SSR)


def test_roof_needs_two_modes():
    with pytest.raises(DensityError):
        eof_convex_roof(DensityMatrix("abc", np.eye(8) / 8))


def test_decompositions_reconstruct_and_respect_parity():
    rng = np.random.default_rng(8)
    rho = ssr_valid_density(rng)
    for constraint in RoofConstraint:
        _, decomp = eof_convex_roof(rho, constraint, FAST)
        np.testing.assert_allclose(decomp.reconstruct(), rho, atol=1e-8)
        assert decomp.weights.sum() == pytest.approx(1, abs=1e-12)
        np.testing.assert_allclose(np.linalg.norm(decomp.states, axis=1), 1, atol=1e-12)
    _, decomp = eof_convex_roof(rho, SSR, FAST)
    even = np.abs(decomp.states[:, [0, 3]]).max(axis=1)
    odd = np.abs(decomp.states[:, [1, 2]]).max(axis=1)
    assert np.all(np.minimum(even, odd) < 1e-10)


def test_roof_of_pure_states_is_reduced_entropy():
    rng = np.random.default_rng(9)
    for _ in range(5):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v /= np.linalg.norm(v)
        sv = np.linalg.svd(v.reshape(2, 2), compute_uv=False) ** 2
        expected = -sum(x * math.log2(x) for x in sv if x > 0)
        report, _ = eof_convex_roof(np.outer(v, v.conj()))
        assert report.value == pytest.approx(expected, abs=1e-8)
        even = np.where([1, 0, 0, 1], v, 0)
        even /= np.linalg.norm(even)
        report, _ = eof_convex_roof(np.outer(even, even.conj()), SSR)
        p = abs(even[0]) ** 2
        assert report.value == pytest.approx(binary_entropy(p), abs=1e-8)


def test_roof_orderings_on_random_ssr_states():
    rng = np.random.default_rng(13)
    for _ in range(4):
        rho = ssr_valid_density(rng, even_rank=int(rng.integers(1, 3)), odd_rank=int(rng.integers(1, 3)))
        free, _ = eof_convex_roof(rho, config=FAST)
        constrained, _ = eof_convex_roof(rho, SSR, FAST)
        assert constrained.value >= free.value - 1e-6
        assert free.value >= eof_wootters(rho) - 1e-3
        assert free.value == pytest.approx(eof_wootters(rho), abs=1e-3)


def test_roof_is_deterministic_for_a_seed():
    rho = random_density(np.random.default_rng(2))
    cfg = RoofConfig(restarts=6, seed=42)
    serial, dec_a = eof_convex_roof(rho, config=cfg)
    again, _ = eof_convex_roof(rho, config=cfg)
    threaded, dec_b = eof_convex_roof(rho, config=RoofConfig(restarts=6, seed=42, workers=3))
    assert serial == again == threaded
    np.testing.assert_array_equal(dec_a.states, dec_b.states)


def test_roof_report_diagnostics():
    report, _ = eof_convex_roof(random_density(np.random.default_rng(4)), config=FAST)
    assert report.restarts == 8
    assert report.gap >= 0
    assert report.converged
    assert report.residual < 1e-4


def test_report_line_round_trip():
    report = EntanglementReport("eof-roof", 0.6887218755408673, restarts=32, residual=3.5e-09)
    line = report.to_line()
    assert line == "measure=eof-roof value=0.68872187554086728 restarts=32 residual=3.4999999999999999e-09"
    back = EntanglementReport.from_line(line)
    assert (back.measure, back.value, back.restarts, back.residual) == ("eof-roof", report.value, 32, 3.5e-09)
