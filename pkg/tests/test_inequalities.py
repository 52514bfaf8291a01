import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import psd_cases
from rangeproj.errors import (
    DimensionMismatch,
    EmptyComplement,
    NotAProjection,
    NotPSD,
    PowerOutOfRange,
    QuadratureNonConvergence,
    ZeroOperator,
)
from rangeproj.functional_calculus import default_schedule
from rangeproj.generators import (
    GenConfig,
    SplitMix64,
    derive_seed,
    psd_with_block_diag_range,
    psd_with_strict_gap,
    random_partition,
    random_pd,
    random_projection,
    random_psd,
)
from rangeproj.inequalities import (
    QuadratureParams,
    check_hadamard_fischer,
    check_jensen_power,
    check_limit_lemma,
    check_main_theorem,
    check_normalized_rank,
    check_projection_lemma,
    check_rank_inequality,
    eig_det,
    power_integrand,
    scalar_power_integral,
)
from rangeproj.pinching import PinchingMap, parse_partition, singletons

POWERS = (0.1, 0.25, 0.5, 0.75, 0.9)


def pinch(text):
    return PinchingMap(parse_partition(text))


# --- main theorem ---------------------------------------------------------

def test_main_theorem_running_example(all_ones):
    v = check_main_theorem(all_ones, pinch("1|2"))
    assert v.holds and v.status == "pass"
    assert v.gap == pytest.approx(0.5, abs=1e-12)
    assert v.excess == pytest.approx(0.5, abs=1e-12)
    assert v.equality_predicted is False and v.equality_observed is False
    assert v.witnesses["trace_lhs"] == pytest.approx(1.0)
    assert v.witnesses["trace_rhs"] == pytest.approx(2.0)


@pytest.mark.parametrize("text", ["1,2,3,4", "1|2|3|4", "1,3|2,4", "2|1,3,4"])
def test_main_theorem_identity(text):
    v = check_main_theorem(np.eye(4), pinch(text))
    assert v.holds and v.equality_observed and v.equality_predicted
    assert abs(v.gap) < 1e-12 and v.status == "pass"


def test_main_theorem_direct_sum():
    B1 = random_psd(GenConfig(1, 2, 1))
    B2 = random_psd(GenConfig(2, 3, 2))
    A = np.zeros((5, 5), dtype=complex)
    A[:2, :2], A[2:, 2:] = B1, B2
    v = check_main_theorem(A, pinch("1,2|3,4,5"))
    assert v.equality_predicted and v.equality_observed and v.status == "pass"


def test_main_theorem_errors():
    with pytest.raises(NotPSD) as info:
        check_main_theorem(np.diag([1.0, -0.5]), pinch("1|2"))
    assert info.value.min_eigenvalue == pytest.approx(-0.5)
    with pytest.raises(DimensionMismatch):
        check_main_theorem(np.eye(3), pinch("1|2"))


# --- Jensen power ---------------------------------------------------------

def test_jensen_running_example(all_ones):
    v = check_jensen_power(all_ones, pinch("1|2"), 0.5)
    assert v.holds
    assert v.gap == pytest.approx(1 - 2**-0.5, abs=1e-12)
    assert v.equality_predicted is None and v.equality_observed is None


@pytest.mark.parametrize("r", POWERS)
def test_jensen_diagonal_and_identity(r):
    D = np.diag([3.0, 0.0, 1.5, 2.0])
    v = check_jensen_power(D, pinch("1,3|2,4"), r)
    assert v.holds and abs(v.gap) < 1e-12 and abs(v.excess) < 1e-12
    v = check_jensen_power(np.eye(3), pinch("1|2,3"), r)
    assert v.holds and abs(v.gap) < 1e-12


@pytest.mark.parametrize("r", [0.0, 1.0, -0.5, 1.5])
def test_jensen_power_out_of_range(r, all_ones):
    with pytest.raises(PowerOutOfRange):
        check_jensen_power(all_ones, pinch("1|2"), r)


def test_jensen_near_one_tends_to_zero():
    for A, phi in psd_cases(5, 30):
        norm = np.linalg.norm(A, 2)
        for r in (0.99, 0.999):
            v = check_jensen_power(A, phi, r)
            assert v.holds
            assert v.excess <= 0.05 * max(norm, 1e-300) + 1e-12


# --- rank inequalities ----------------------------------------------------

def test_rank_examples(all_ones):
    v = check_rank_inequality(all_ones, pinch("1|2"))
    assert v.holds and not v.equality_observed and not v.equality_predicted
    assert (v.witnesses["rank_A"], v.witnesses["rank_block_1"], v.witnesses["rank_block_2"]) == (1, 1, 1)
    assert v.witnesses["rank_sum"] == 2 and v.gap == 1.0

    v = check_rank_inequality(np.eye(4), PinchingMap(singletons(4)))
    assert v.holds and v.equality_observed and v.equality_predicted and v.gap == 0

    v = check_rank_inequality(np.diag([1.0, 0.0, 0.0, 1.0]), pinch("1,2|3,4"))
    assert v.witnesses["rank_A"] == 2 and v.equality_observed and v.equality_predicted


def test_normalized_rank_examples(all_ones):
    v = check_normalized_rank(all_ones, pinch("1|2"))
    assert v.holds and v.witnesses["normalized_rank_A"] == 0.5
    assert v.witnesses["normalized_rank_pinched"] == 1.0
    for M in (np.zeros((3, 3)), np.eye(3)):
        v = check_normalized_rank(M, pinch("1|2,3"))
        assert v.holds and v.equality_observed and v.equality_predicted


def test_rank_and_normalized_rank_agree():
    for A, phi in psd_cases(17, 150, dim_max=12):
        a, b = check_rank_inequality(A, phi), check_normalized_rank(A, phi)
        assert (a.holds, a.equality_observed, a.equality_predicted, a.status) == \
               (b.holds, b.equality_observed, b.equality_predicted, b.status)
        # rank of the pinched matrix equals the sum of the block ranks
        assert b.witnesses["normalized_rank_pinched"] * A.shape[0] == pytest.approx(a.witnesses["rank_sum"])


# --- Hadamard-Fischer -----------------------------------------------------

def test_hadamard_fischer_examples(all_ones):
    v = check_hadamard_fischer(all_ones, [0])
    assert v.holds and v.witnesses["det_A"] == pytest.approx(0, abs=1e-15)
    assert v.gap == pytest.approx(1.0)
    assert v.status == "indeterminate"  # singular input, equality clause not asserted

    v = check_hadamard_fischer(np.diag([2.0, 3.0]), [0])
    assert v.holds and v.equality_observed and v.equality_predicted and v.status == "pass"
    assert v.witnesses["det_A"] == pytest.approx(6)

    v = check_hadamard_fischer(np.array([[2.0, 1.0], [1.0, 2.0]]), [0])
    assert v.holds and not v.equality_observed and not v.equality_predicted
    assert v.gap == pytest.approx(1.0, abs=1e-12)
    assert v.witnesses["det_A"] == pytest.approx(3.0, abs=1e-12)


def test_hadamard_fischer_errors():
    with pytest.raises(EmptyComplement):
        check_hadamard_fischer(np.eye(3), [0, 1, 2])
    with pytest.raises(NotPSD):
        check_hadamard_fischer(np.diag([1.0, -1.0]), [0])


def test_eig_det_matches_lu():
    for seed in range(30):
        n = 1 + seed % 12
        A = random_pd(GenConfig(seed, n, n))
        ref = np.linalg.det(A).real
        assert abs(eig_det(A) - ref) <= 1e-10 * abs(ref)


# --- projection lemma -----------------------------------------------------

def test_projection_lemma_examples(all_ones):
    phi = pinch("1|2")
    for E in (np.eye(2), np.zeros((2, 2))):
        v = check_projection_lemma(E, phi)
        assert v.holds and v.equality_observed and v.equality_predicted

    v = check_projection_lemma(0.5 * all_ones, phi)
    assert v.holds and not v.equality_observed and not v.equality_predicted
    assert v.witnesses["projection_defect"] == pytest.approx(math.sqrt(2) / 4, abs=1e-15)

    E = np.diag([1.0, 0.0, 0.0, 1.0])
    E[1:3, 1:3] = 0.5
    v = check_projection_lemma(E, pinch("1|2,3|4"))
    assert v.holds and v.equality_observed and v.equality_predicted


def test_projection_lemma_rejects_non_projection():
    with pytest.raises(NotAProjection):
        check_projection_lemma(np.diag([1.0, 0.5]), pinch("1|2"))


def test_projection_lemma_sweep():
    indeterminate = 0
    for seed in range(200):
        n = 2 + seed % 9
        E = random_projection(GenConfig(seed, n, SplitMix64(seed).integers(0, n)))
        phi = PinchingMap(random_partition(derive_seed(seed, 1), n, 1 + seed % n))
        v = check_projection_lemma(E, phi)
        if v.indeterminate:
            indeterminate += 1
        else:
            assert v.holds
    assert indeterminate <= 2


# --- limit lemma ----------------------------------------------------------

def test_limit_lemma_examples():
    v = check_limit_lemma(np.diag([1.0, 0.5]))
    assert v.holds and v.witnesses["mu_min"] == 0.5
    r = default_schedule()[-1]
    assert v.witnesses["final_error"] == pytest.approx(1 - 2**-r, abs=1e-15)
    for A in (np.eye(3), np.diag([1.0, 0.0])):
        v = check_limit_lemma(A)
        assert v.holds and v.witnesses["max_error"] <= 1e-15


def test_limit_lemma_errors():
    with pytest.raises(ZeroOperator):
        check_limit_lemma(np.zeros((2, 2)))
    with pytest.raises(NotPSD):
        check_limit_lemma(np.diag([1.0, -1.0]))


# --- properties -----------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), n=st.integers(1, 24), data=st.data(),
       field=st.sampled_from(["real", "complex"]))
def test_universal_validity(seed, n, data, field):
    rank = data.draw(st.integers(0, n))
    k = data.draw(st.integers(1, n))
    A = random_psd(GenConfig(seed, n, rank, field))
    phi = PinchingMap(random_partition(derive_seed(seed, 1), n, k))
    assert check_main_theorem(A, phi).holds
    for r in POWERS:
        assert check_jensen_power(A, phi, r).holds
    assert check_rank_inequality(A, phi).holds
    assert check_normalized_rank(A, phi).holds
    if k >= 2:
        assert check_hadamard_fischer(A, phi.partition.blocks[0]).holds


def test_equality_soundness():
    for seed in range(60):
        n = 2 + seed % 11
        phi = PinchingMap(random_partition(seed, n, 1 + seed % n))
        rng = SplitMix64(derive_seed(seed, 2))
        ranks = [rng.integers(0, len(b)) for b in phi.partition.blocks]
        A = psd_with_block_diag_range(phi, ranks, seed, "real" if seed % 3 == 0 else "complex")
        for v in (check_main_theorem(A, phi), check_rank_inequality(A, phi)):
            assert v.holds and v.equality_observed and v.equality_predicted and v.status == "pass"


def test_equality_soundness_with_rotated_blocks():
    """``A = Q (B_1 + B_2) Q*`` with ``Q`` a block-diagonal unitary."""
    phi = pinch("1,4|2,3,5")
    B = psd_with_block_diag_range(phi, [1, 2], seed=9)
    Q = np.zeros((5, 5), dtype=complex)
    for i, block in enumerate(phi.partition.blocks):
        X = SplitMix64(derive_seed(9, i)).gaussian_matrix(len(block), len(block), "complex")
        U, _ = np.linalg.qr(X)
        Q[np.ix_(block, block)] = U
    A = Q @ B @ Q.conj().T
    A = (A + A.conj().T) / 2
    v = check_main_theorem(A, phi)
    assert v.equality_observed and v.equality_predicted


def test_strictness_witness():
    for seed in range(60):
        n = 2 + seed % 11
        phi = PinchingMap(random_partition(seed, n, 2 + seed % (n - 1)))
        A = psd_with_strict_gap(phi, derive_seed(seed, 3), noise_rank=seed % 2)
        v = check_main_theorem(A, phi)
        assert v.holds and not v.equality_observed and not v.equality_predicted
        assert v.excess > 1e-4 and v.gap > -1e-9


def test_real_and_complex_entries_agree():
    for A, phi in psd_cases(23, 40, field="real"):
        Ac = A.astype(complex)
        for check in (check_main_theorem, check_rank_inequality, check_normalized_rank):
            a, b = check(A, phi), check(Ac, phi)
            assert (a.holds, a.equality_predicted, a.equality_observed, a.status) == \
                   (b.holds, b.equality_predicted, b.equality_observed, b.status)
            ints = {k: w for k, w in a.witnesses.items() if isinstance(w, int)}
            assert ints == {k: b.witnesses[k] for k in ints}
        for r in POWERS:
            assert check_jensen_power(A, phi, r).holds == check_jensen_power(Ac, phi, r).holds
        if phi.partition.k >= 2:
            a = check_hadamard_fischer(A, phi.partition.blocks[0])
            b = check_hadamard_fischer(Ac, phi.partition.blocks[0])
            assert (a.holds, a.equality_predicted, a.equality_observed, a.status) == \
                   (b.holds, b.equality_predicted, b.equality_observed, b.status)


def test_verdict_to_dict(all_ones):
    d = check_main_theorem(all_ones, pinch("1|2")).to_dict()
    assert set(d) == {"name", "holds", "gap", "excess", "equality_predicted",
                      "equality_observed", "status", "witnesses"}


# --- integral representation ----------------------------------------------

def test_scalar_power_integral_examples():
    for r in (0.1, 0.5, 0.9):
        assert abs(scalar_power_integral(1.0, r) - 1) <= 1e-6
        assert scalar_power_integral(0.0, r) == 0.0
    assert abs(scalar_power_integral(4.0, 0.5) - 2.0) <= 1e-6


@pytest.mark.parametrize("t", [0.01, 1.0, 10.0])
@pytest.mark.parametrize("r", [0.2, 0.5, 0.8])
def test_integrand_matches_scipy_quad(t, r):
    # independent adaptive quadrature of the untransformed integrand
    f = lambda lam: power_integrand(lam, t, r)
    head, _ = scipy.integrate.quad(f, 0, 1, limit=200)
    tail, _ = scipy.integrate.quad(f, 1, np.inf, limit=200)
    via_scipy = math.sin(r * math.pi) / math.pi * (head + tail)
    assert abs(via_scipy - t**r) <= 1e-6 * max(t**r, 1)
    assert abs(scalar_power_integral(t, r) - via_scipy) <= 1e-6 * max(t**r, 1)


def test_scalar_power_integral_errors():
    with pytest.raises(PowerOutOfRange):
        scalar_power_integral(2.0, 1.0)
    with pytest.raises(ValueError):
        scalar_power_integral(-1.0, 0.5)
    with pytest.raises(QuadratureNonConvergence):
        scalar_power_integral(2.0, 0.5, QuadratureParams(max_halvings=1, rel_tol=1e-15))
    with pytest.raises(QuadratureNonConvergence):
        scalar_power_integral(2.0, 0.01, QuadratureParams(max_half_width=10))
