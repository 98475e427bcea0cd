import numpy as np
import pytest

from lrmipt import oracle
from lrmipt.bounds import (
    BoundDomainError,
    BoundParameters,
    bilinear_norm,
    classify_threshold,
    dense_norm_oracle,
    growth_rate_lambda,
    growth_rate_report,
    half_cut_norm,
    lemma1_bound_bilinear,
    lemma1_bound_interacting,
    norm_scaling_series,
)
from lrmipt.model import BoundaryBlock, LatticeSpec, build_boundary_block


def test_nuclear_norm_two_unit_bonds():
    # short-range ring cut twice: extreme many-body energy is exactly 2
    block = build_boundary_block(LatticeSpec(L=4, alpha=1000.0), 2)
    assert bilinear_norm(block) == pytest.approx(2.0, abs=1e-12)
    assert dense_norm_oracle(block) == pytest.approx(2.0, abs=1e-12)


def test_nuclear_norm_zero_block():
    assert bilinear_norm(BoundaryBlock(M=np.zeros((3, 3)), ell=3)) == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_nuclear_norm_matches_dense_many_body(alpha):
    block = build_boundary_block(LatticeSpec(L=8, alpha=alpha), 4)
    assert bilinear_norm(block) == pytest.approx(dense_norm_oracle(block),
                                                 abs=1e-9)


def test_nuclear_norm_matches_dense_asymmetric_cut():
    block = build_boundary_block(LatticeSpec(L=6, alpha=1.3), 2)
    assert bilinear_norm(block) == pytest.approx(dense_norm_oracle(block),
                                                 abs=1e-9)


def test_norm_series_monotone_growth_below_one():
    series = norm_scaling_series(0.5, [32, 64, 128, 256])
    assert np.all(np.diff(series.norms) > 0)
    assert series.classification == "power"


def test_norm_series_near_constant_tail_for_large_alpha():
    series = norm_scaling_series(3.0, [64, 128, 256, 512])
    assert series.classification == "bounded"
    # spec calls the series non-decreasing; numerically the large-alpha tail
    # drifts down by ~1e-5 relative, so the check carries that tolerance
    assert np.all(np.diff(series.norms) > -1e-3 * series.norms[:-1])


def test_lemma_bilinear_d1_finite_and_decreasing_in_alpha():
    vals = [lemma1_bound_bilinear(BoundParameters(alpha=a, d=1), 64)
            for a in (1.0, 2.0, 3.0)]
    assert all(np.isfinite(vals))
    assert vals[0] > vals[1] > vals[2]


def test_lemma_bilinear_d1_direct_sum_oracle():
    # brute-force re-summation with explicit loops
    alpha, L = 2.0, 32
    total = 0.0
    for x in range(1, L // 2 + 1):
        inner = sum(1.0 / (x + y - 1) ** (2 * alpha)
                    for y in range(1, L // 2 + 1))
        total += np.sqrt(inner)
    assert lemma1_bound_bilinear(BoundParameters(alpha=alpha, d=1),
                                 L) == pytest.approx(4 * total, rel=1e-12)


def test_lemma_bilinear_domain_errors():
    with pytest.raises(BoundDomainError):
        lemma1_bound_bilinear(BoundParameters(alpha=0.4, d=1), 64)
    with pytest.raises(BoundDomainError):
        lemma1_bound_bilinear(BoundParameters(alpha=0.9, d=2), 64)


def test_lemma_inequality_sweep():
    # DERIVED: exact nuclear norm never exceeds the analytic bound
    for alpha in (1.6, 2.0, 3.0):
        params = BoundParameters(alpha=alpha, d=1, g_max=1.0)
        for L in (64, 128, 256, 512, 1024):
            assert half_cut_norm(L, alpha) <= lemma1_bound_bilinear(params, L)


def test_lemma_bound_l_dependence_changes_at_threshold():
    # the L-dependent exponent changes sign at alpha_sc = 1.5 (d=1 bilinear):
    # below it the bound keeps growing by a fixed factor per size decade,
    # above it the growth dies out (slowly just above, sharply well above)
    grow = [lemma1_bound_bilinear(BoundParameters(alpha=1.3, d=1), L)
            for L in (64, 4096)]
    near = [lemma1_bound_bilinear(BoundParameters(alpha=1.7, d=1), L)
            for L in (64, 4096)]
    far = [lemma1_bound_bilinear(BoundParameters(alpha=2.5, d=1), L)
           for L in (64, 4096)]
    assert grow[1] / grow[0] > 2.0
    assert near[1] / near[0] < 1.5
    assert far[1] / far[0] < 1.05


def test_lemma_interacting_d1_closed_form():
    params = BoundParameters(alpha=3.0, d=1, g_max=1.0)
    manual = 1.0 / 2.0 + (50.0 ** -1.0 - 1.0) / (2.0 * -1.0)
    assert lemma1_bound_interacting(params, 100) == pytest.approx(manual,
                                                                  rel=1e-12)


def test_lemma_interacting_monotone_decreasing_to_zero():
    alphas = [2.0, 3.0, 5.0, 10.0, 50.0]
    vals = [lemma1_bound_interacting(BoundParameters(alpha=a, d=1), 64)
            for a in alphas]
    assert all(np.diff(vals) < 0)
    assert vals[-1] < 0.1


def test_lemma_interacting_d2_threshold_behavior():
    # below alpha = d + 1 the bound diverges with L; above it converges to
    # the finite closed-form limit (slowly at 3.1, almost exactly at 4.0)
    from scipy.special import beta as beta_function
    grow = [lemma1_bound_interacting(BoundParameters(alpha=2.9, d=2), L)
            for L in (8, 1024, 8192)]
    assert grow[1] / grow[0] > 3.0
    assert grow[2] > grow[1] * 1.2  # still climbing at large L
    for alpha in (3.1, 4.0):
        p = BoundParameters(alpha=alpha, d=2)
        lead = 2.0 * beta_function(0.5, (alpha - 1) / 2) / (2 * (alpha - 2))
        limit = lead * (1.0 + 1.0 / (alpha - 3.0))
        vals = [lemma1_bound_interacting(p, L) for L in (8, 1024, 8192)]
        assert vals[0] < vals[1] < vals[2] < limit
    with pytest.raises(BoundDomainError):
        lemma1_bound_interacting(BoundParameters(alpha=1.9, d=2), 64)


def test_classify_threshold_values():
    assert classify_threshold(1, "bilinear") == 1.5
    assert classify_threshold(1, "interacting") == 2.0
    assert classify_threshold(3, "bilinear") == 2.5
    with pytest.raises(ValueError):
        classify_threshold(4, "bilinear")
    with pytest.raises(ValueError):
        classify_threshold(1, "other")


def test_removable_singularity_is_continuous():
    eps = 1e-9
    at = lemma1_bound_interacting(BoundParameters(alpha=2.0, d=1), 128)
    near = lemma1_bound_interacting(BoundParameters(alpha=2.0 + eps, d=1), 128)
    assert at == pytest.approx(near, rel=1e-6)


def test_growth_rate_neel_is_exactly_zero():
    spec = LatticeSpec(L=6, alpha=1.5)
    report = growth_rate_report(oracle.neel_dense(6), spec, 3)
    assert report.lambda_literal == 0
    assert report.lambda_log == 0
    assert report.pred_literal == 0.0
    assert report.pred_log == 0.0
    assert abs(report.fd_rate) < 1e-7


def test_growth_rate_phase_invariance():
    spec = LatticeSpec(L=6, alpha=1.5)
    block = build_boundary_block(spec, 3)
    state = oracle.dense_evolve(oracle.neel_dense(6),
                                oracle.dense_hamiltonian(spec), 0.8)
    rotated = oracle.DenseState(
        amplitudes=np.exp(1j * 0.37) * state.amplitudes, L=6, n_fermions=3)
    a = growth_rate_lambda(state, block, 3)
    b = growth_rate_lambda(rotated, block, 3)
    assert a.lambda_literal == pytest.approx(b.lambda_literal, abs=1e-14)
    assert a.lambda_log == pytest.approx(b.lambda_log, abs=1e-12)


def test_growth_rate_log_variant_matches_finite_difference():
    spec = LatticeSpec(L=6, alpha=1.5)
    state = oracle.dense_evolve(oracle.neel_dense(6),
                                oracle.dense_hamiltonian(spec), 0.6)
    report = growth_rate_report(state, spec, 3)
    assert report.matched_variant == "log_corrected"
    assert report.matched_sign == -1
    assert abs(-report.pred_log - report.fd_rate) < 1e-6
    # the literal rho_A variant does not reproduce the rate either way
    assert min(abs(report.pred_literal - report.fd_rate),
               abs(-report.pred_literal - report.fd_rate)) > 1e-3


def test_growth_rate_after_measurement_history():
    spec = LatticeSpec(L=6, alpha=1.5)
    ham = oracle.dense_hamiltonian(spec)
    st = oracle.dense_measure(oracle.dense_evolve(oracle.neel_dense(6), ham,
                                                  1.1), 2)
    st = oracle.dense_evolve(st, ham, 0.4)
    report = growth_rate_report(st, spec, 3)
    assert report.matched_variant == "log_corrected"
    assert abs(report.matched_sign * report.pred_log - report.fd_rate) < 1e-6


def test_bound_parameters_validation():
    with pytest.raises(ValueError):
        BoundParameters(alpha=1.0, d=4)
    with pytest.raises(ValueError):
        BoundParameters(alpha=1.0, d=1, g_max=0.0)
    assert BoundParameters(alpha=1.0, d=2).surface_coefficient == 2.0
    assert BoundParameters(alpha=1.0, d=3).surface_coefficient == pytest.approx(
        2 * np.pi)
