import numpy as np
import pytest

from lrmipt import oracle
from lrmipt.gaussian import neel_state, correlation_matrix
from lrmipt.model import LatticeSpec, build_hopping_matrix
from lrmipt.trajectory import (
    JumpRecord,
    ObservablePlan,
    TrajectoryConfig,
    evolve_unitary,
    run_trajectory,
)


def test_sector_basis_counts():
    assert len(oracle.sector_basis(6, 3)) == 20
    assert len(oracle.sector_basis(8, 4)) == 70
    with pytest.raises(ValueError):
        oracle.sector_basis(12, 6)


def test_two_site_single_particle_structure():
    coeff = np.array([[0.0, -2.0], [-2.0, 0.0]])
    mat = oracle.dense_bilinear(coeff, 2, 1)
    np.testing.assert_allclose(mat, [[0, -2], [-2, 0]], atol=1e-15)


def test_dense_hamiltonian_hermitian():
    ham = oracle.dense_hamiltonian(LatticeSpec(L=6, alpha=1.3))
    np.testing.assert_array_equal(ham.matrix, ham.matrix.conj().T)


def test_free_spectrum_is_subset_sums():
    spec = LatticeSpec(L=6, alpha=1.3)
    single = np.linalg.eigvalsh(build_hopping_matrix(spec).h)
    from itertools import combinations
    subset_sums = sorted(sum(c) for c in combinations(single, 3))
    sector = np.linalg.eigvalsh(oracle.dense_hamiltonian(spec).matrix)
    np.testing.assert_allclose(sector, subset_sums, atol=1e-10)


def test_interaction_term_diagonal_weights():
    spec = LatticeSpec(L=4, alpha=1.0)
    ham0 = oracle.dense_hamiltonian(spec).matrix
    ham_v = oracle.dense_hamiltonian(spec, include_V=True, V=2.0).matrix
    shift = ham_v - ham0
    assert np.abs(shift - np.diag(np.diag(shift))).max() < 1e-15
    basis = oracle.sector_basis(4, 2)
    # |0011> = sites 1,2 occupied: adjacent pair with weight 1 -> V * 1
    idx = basis.index(0b0011)
    assert shift[idx, idx].real == pytest.approx(2.0)
    # |0101> = sites 1,3 occupied: antipodal pair, weight 2/2 = 1 -> V * 1
    idx2 = basis.index(0b0101)
    assert shift[idx2, idx2].real == pytest.approx(2.0)


def test_dense_evolution_preserves_norm_and_identity_at_zero():
    spec = LatticeSpec(L=6, alpha=0.9)
    ham = oracle.dense_hamiltonian(spec)
    st = oracle.neel_dense(6)
    assert oracle.dense_evolve(st, ham, 0.0).amplitudes == pytest.approx(
        st.amplitudes)
    moved = oracle.dense_evolve(st, ham, 2.3)
    assert moved.norm() == pytest.approx(1.0, abs=1e-12)


def test_dense_matches_gaussian_evolution():
    spec = LatticeSpec(L=6, alpha=1.5)
    h = build_hopping_matrix(spec)
    st_g = evolve_unitary(neel_state(spec), h, 0.7)
    st_d = oracle.dense_evolve(oracle.neel_dense(6),
                               oracle.dense_hamiltonian(spec), 0.7)
    np.testing.assert_allclose(correlation_matrix(st_g).D,
                               oracle.dense_correlation_matrix(st_d),
                               atol=1e-8)


def test_dense_measure_neel_fixed_point_and_occupation():
    st = oracle.neel_dense(6)
    measured = oracle.dense_measure(st, 1)
    np.testing.assert_allclose(measured.amplitudes, st.amplitudes, atol=1e-15)
    spec = LatticeSpec(L=6, alpha=1.0)
    moved = oracle.dense_evolve(st, oracle.dense_hamiltonian(spec), 0.9)
    measured = oracle.dense_measure(moved, 4)
    assert oracle.dense_occupations(measured)[3] == pytest.approx(1.0,
                                                                  abs=1e-12)


def test_dense_measure_empty_site_rejected():
    st = oracle.neel_dense(6)
    with pytest.raises(ValueError):
        oracle.dense_measure(st, 2)


def test_dense_entropy_product_state_and_symmetry():
    st = oracle.neel_dense(8)
    assert oracle.dense_entropy(st, [1, 2, 3]) == pytest.approx(0.0, abs=1e-12)
    spec = LatticeSpec(L=8, alpha=1.2)
    moved = oracle.dense_evolve(st, oracle.dense_hamiltonian(spec), 1.4)
    for sites in ([1, 2], [1, 2, 3], [2, 5, 7]):
        rest = [s for s in range(1, 9) if s not in sites]
        assert oracle.dense_entropy(moved, sites) == pytest.approx(
            oracle.dense_entropy(moved, rest), abs=1e-10)


def test_dense_entropy_noncontiguous_matches_gaussian():
    spec = LatticeSpec(L=6, alpha=1.1)
    h = build_hopping_matrix(spec)
    st_g = evolve_unitary(neel_state(spec), h, 1.9)
    st_d = oracle.dense_evolve(oracle.neel_dense(6),
                               oracle.dense_hamiltonian(spec), 1.9)
    from lrmipt.gaussian import subsystem_entropy_bits
    for sites in ([1, 4], [2, 3, 6], [1, 3, 5]):
        rows = np.asarray(sites) - 1
        assert oracle.dense_entropy(st_d, sites) == pytest.approx(
            subsystem_entropy_bits(st_g.u, rows), abs=1e-9)


def test_replay_empty_record_is_pure_unitary():
    spec = LatticeSpec(L=6, alpha=1.5)
    cfg = TrajectoryConfig(spec=spec, gamma=1.0, t_burn=0.0, t_sample=3.0,
                           dt_sample=1.0, seed=0, n_traj=2)
    record = JumpRecord(events=[], seed=0, trajectory_id=0)
    plan = ObservablePlan(s_half=True, correlations=True)
    times, series = oracle.dense_trajectory_replay(record, cfg, plan)
    h = build_hopping_matrix(spec)
    for k, t in enumerate(times):
        st = evolve_unitary(neel_state(spec), h, t)
        np.testing.assert_allclose(series["corr"][k],
                                   correlation_matrix(st).D, atol=1e-9)


def test_replay_is_deterministic():
    spec = LatticeSpec(L=6, alpha=1.5)
    cfg = TrajectoryConfig(spec=spec, gamma=1.0, t_burn=0.0, t_sample=10.0,
                           dt_sample=1.0, seed=11, n_traj=2)
    res = run_trajectory(cfg, trajectory_id=0)
    _, s1 = oracle.dense_trajectory_replay(res.record, cfg)
    _, s2 = oracle.dense_trajectory_replay(res.record, cfg)
    for name in s1:
        np.testing.assert_array_equal(s1[name], s2[name])


def test_replay_rejects_record_beyond_window():
    spec = LatticeSpec(L=6, alpha=1.5)
    cfg = TrajectoryConfig(spec=spec, gamma=1.0, t_burn=0.0, t_sample=1.0,
                           dt_sample=1.0, seed=0, n_traj=2)
    record = JumpRecord(events=[(5.0, 1)], seed=0, trajectory_id=0)
    with pytest.raises(ValueError):
        oracle.dense_trajectory_replay(record, cfg)
