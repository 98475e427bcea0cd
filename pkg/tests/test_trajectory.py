import numpy as np
import pytest
from scipy import stats

from lrmipt import oracle
from lrmipt.gaussian import GaussianState, neel_state
from lrmipt.model import LatticeSpec, build_hopping_matrix
from lrmipt.trajectory import (
    ObservablePlan,
    TrajectoryConfig,
    apply_measurement,
    evolve_unitary,
    run_ensemble,
    run_trajectory,
    sample_jump_time,
    sampling_times,
    select_measurement_site,
    trajectory_rng,
)


def small_config(L=6, alpha=1.5, gamma=1.0, t_burn=0.0, t_sample=10.0,
                 dt=1.0, seed=1, n_traj=4):
    return TrajectoryConfig(spec=LatticeSpec(L=L, alpha=alpha), gamma=gamma,
                            t_burn=t_burn, t_sample=t_sample, dt_sample=dt,
                            seed=seed, n_traj=n_traj)


def test_sample_jump_time_closed_form():
    assert sample_jump_time(1.0, 2.0, 5) == 0.0
    assert sample_jump_time(np.exp(-1.0), 1.0, 4) == pytest.approx(0.25)


def test_sample_jump_time_rejects_zero():
    with pytest.raises(ValueError):
        sample_jump_time(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        sample_jump_time(1.5, 1.0, 4)


def test_jump_time_mean_matches_exponential():
    # DERIVED: Monte Carlo estimate of the exponential mean 1/(gamma N)
    rng = np.random.default_rng(42)
    gamma, n = 2.0, 10
    draws = np.array([sample_jump_time(1.0 - rng.random(), gamma, n)
                      for _ in range(100_000)])
    expected = 1.0 / (gamma * n)
    stderr = draws.std(ddof=1) / np.sqrt(len(draws))
    assert abs(draws.mean() - expected) < 3 * stderr


def test_evolve_identity_at_zero_and_particle_conservation():
    spec = LatticeSpec(L=8, alpha=1.1)
    h = build_hopping_matrix(spec)
    st = neel_state(spec)
    same = evolve_unitary(st, h, 0.0)
    np.testing.assert_array_equal(same.u, st.u)
    moved = evolve_unitary(st, h, 3.7)
    assert moved.occupations().sum() == pytest.approx(4.0, abs=1e-10)
    assert moved.orthonormality_defect() < 1e-10
    assert moved.t == pytest.approx(3.7)


def test_evolution_against_dense_oracle():
    spec = LatticeSpec(L=6, alpha=1.5)
    st = evolve_unitary(neel_state(spec), build_hopping_matrix(spec), 0.7)
    dense = oracle.dense_evolve(oracle.neel_dense(6),
                                oracle.dense_hamiltonian(spec), 0.7)
    from lrmipt.gaussian import correlation_matrix
    np.testing.assert_allclose(correlation_matrix(st).D,
                               oracle.dense_correlation_matrix(dense),
                               atol=1e-8)


def test_site_selection_neel():
    st = neel_state(LatticeSpec(L=4, alpha=1.0))
    assert select_measurement_site(0.3, st) == 1
    assert select_measurement_site(0.7, st) == 3
    # only occupied sites are selectable
    for rand in np.linspace(0, 0.999, 40):
        assert select_measurement_site(rand, st) in (1, 3)


def test_site_selection_uniform_state():
    # plane-wave orbitals: <n_j> = N/L exactly, so site choice is uniform
    L, n = 8, 4
    j, m = np.meshgrid(np.arange(L), np.arange(n), indexing="ij")
    st = GaussianState(u=np.exp(2j * np.pi * j * m / L) / np.sqrt(L))
    np.testing.assert_allclose(st.occupations(), n / L, atol=1e-12)
    for rand in (0.0, 0.12, 0.49, 0.51, 0.99):
        assert select_measurement_site(rand, st) == int(rand * L) + 1


def test_site_selection_empirical_frequencies():
    # DERIVED: multinomial check against <n_j>/N over 1e5 draws
    spec = LatticeSpec(L=6, alpha=1.5)
    st = evolve_unitary(neel_state(spec), build_hopping_matrix(spec), 1.3)
    probs = st.occupations() / 3.0
    rng = np.random.default_rng(7)
    n_draws = 100_000
    counts = np.zeros(6)
    for r in rng.random(n_draws):
        counts[select_measurement_site(r, st) - 1] += 1
    sigma = np.sqrt(n_draws * probs * (1 - probs))
    assert np.all(np.abs(counts - n_draws * probs) <= 3 * sigma + 1e-9)


def test_measurement_neel_fixed_point():
    st = neel_state(LatticeSpec(L=4, alpha=1.0))
    out = apply_measurement(st, 1)
    proj_in = st.u @ st.u.conj().T
    proj_out = out.u @ out.u.conj().T
    assert np.abs(proj_in - proj_out).max() < 1e-12


def test_measurement_two_site_formula():
    u = np.array([[1.0], [1.0]], dtype=complex) / np.sqrt(2)
    out = apply_measurement(GaussianState(u=u), 1)
    from lrmipt.gaussian import correlation_matrix
    np.testing.assert_allclose(correlation_matrix(out).D, np.diag([1.0, 0.0]),
                               atol=1e-12)


def test_measurement_projector_and_oracle_agreement():
    spec = LatticeSpec(L=6, alpha=1.5)
    h = build_hopping_matrix(spec)
    st = evolve_unitary(neel_state(spec), h, 1.1)
    dense = oracle.dense_evolve(oracle.neel_dense(6),
                                oracle.dense_hamiltonian(spec), 1.1)
    for site in (1, 3, 6):
        out = apply_measurement(st, site)
        proj = out.u @ out.u.conj().T
        assert np.abs(proj @ proj - proj).max() < 1e-8
        from lrmipt.gaussian import correlation_matrix
        np.testing.assert_allclose(
            correlation_matrix(out).D,
            oracle.dense_correlation_matrix(oracle.dense_measure(dense, site)),
            atol=1e-8)
        assert out.occupations()[site - 1] == pytest.approx(1.0, abs=1e-10)


def test_measurement_empty_site_rejected():
    st = neel_state(LatticeSpec(L=4, alpha=1.0))
    with pytest.raises(ValueError):
        apply_measurement(st, 2)


def test_sampling_times_grid():
    cfg = small_config(t_burn=3.0, t_sample=2.0, dt=0.5)
    np.testing.assert_allclose(sampling_times(cfg), [3.0, 3.5, 4.0, 4.5])
    assert len(sampling_times(small_config(t_sample=0.0))) == 0


def test_trajectory_determinism():
    cfg = small_config(seed=9)
    r1 = run_trajectory(cfg, trajectory_id=3)
    r2 = run_trajectory(cfg, trajectory_id=3)
    assert r1.record.events == r2.record.events
    for name in r1.series:
        np.testing.assert_array_equal(r1.series[name], r2.series[name])
    r3 = run_trajectory(cfg, trajectory_id=4)
    assert r1.record.events != r3.record.events


def test_trajectory_methods_agree():
    cfg = small_config(seed=21, t_sample=20.0)
    plan = ObservablePlan(s_half=True, mi_far=True, correlations=True)
    r_e = run_trajectory(cfg, trajectory_id=0, plan=plan, method="eigh")
    r_r = run_trajectory(cfg, trajectory_id=0, plan=plan, method="rank1")
    assert r_e.record.events == r_r.record.events
    assert np.abs(r_e.series["corr"] - r_r.series["corr"]).max() < 1e-10
    assert r_r.max_orth_dev < 1e-9


def test_trajectory_zeno_pinning():
    cfg = small_config(L=6, alpha=10.0, gamma=1000.0, t_burn=1.0,
                       t_sample=2.0, dt=0.25, seed=2)
    res = run_trajectory(cfg, trajectory_id=0, method="rank1")
    assert res.time_means()["s_half"] < 0.05


def test_trajectory_conservation_diagnostics():
    cfg = small_config(L=8, alpha=0.8, gamma=0.5, t_sample=30.0, seed=6)
    for method in ("eigh", "rank1"):
        res = run_trajectory(cfg, trajectory_id=1, method=method)
        assert res.max_trace_dev < 1e-9
        assert res.max_orth_dev < 1e-9


def test_trajectory_oracle_replay_agreement():
    spec = LatticeSpec(L=6, alpha=1.5)
    cfg = TrajectoryConfig(spec=spec, gamma=1.0, t_burn=0.0, t_sample=20.0,
                           dt_sample=0.5, seed=12, n_traj=2)
    plan = ObservablePlan(s_half=True, profile_ells=(1, 2, 3), mi_far=True,
                          correlations=True)
    res = run_trajectory(cfg, trajectory_id=0, plan=plan)
    assert res.n_jumps >= 30
    _, dense_series = oracle.dense_trajectory_replay(res.record, cfg, plan)
    for name in ("s_half", "profile", "mi_far", "corr"):
        dev = np.abs(np.asarray(res.series[name])
                     - np.asarray(dense_series[name])).max()
        assert dev < 1e-8, f"{name} deviates by {dev}"


def test_trajectory_oracle_replay_agreement_eight_sites():
    spec = LatticeSpec(L=8, alpha=0.9)
    cfg = TrajectoryConfig(spec=spec, gamma=0.8, t_burn=0.0, t_sample=12.0,
                           dt_sample=1.0, seed=41, n_traj=2)
    plan = ObservablePlan(s_half=True, mi_quarters=True, correlations=True)
    res = run_trajectory(cfg, trajectory_id=0, plan=plan, method="rank1")
    _, dense_series = oracle.dense_trajectory_replay(res.record, cfg, plan)
    for name in ("s_half", "mi_quarters", "corr"):
        dev = np.abs(np.asarray(res.series[name])
                     - np.asarray(dense_series[name])).max()
        assert dev < 1e-8, f"{name} deviates by {dev}"


def test_jump_record_validation():
    from lrmipt.trajectory import JumpRecord
    cfg = small_config(seed=13)
    res = run_trajectory(cfg, trajectory_id=0)
    res.record.validate(cfg.spec.L)  # real records are well formed
    with pytest.raises(ValueError):
        JumpRecord(events=[(1.0, 2), (0.5, 3)], seed=0,
                   trajectory_id=0).validate(6)
    with pytest.raises(ValueError):
        JumpRecord(events=[(1.0, 9)], seed=0, trajectory_id=0).validate(6)


def test_waiting_times_are_exponential():
    cfg = small_config(L=6, gamma=1.5, t_sample=400.0, dt=50.0, seed=31)
    res = run_trajectory(cfg, trajectory_id=0, method="rank1")
    times = res.record.times()
    waits = np.diff(np.concatenate([[0.0], times]))
    ks = stats.kstest(waits, "expon", args=(0, 1 / (1.5 * 3)))
    assert ks.pvalue > 0.01


def test_ensemble_reduction_and_forced_identical_seeds():
    cfg = small_config(seed=5, n_traj=4)
    ens = run_ensemble(cfg, trajectory_ids=[2, 2])
    for name in ens.observable_names:
        np.testing.assert_allclose(ens.stderr[name], 0.0, atol=1e-15)
    ens2 = run_ensemble(cfg)
    assert set(ens2.observable_names) >= {"s_half", "mi_far"}
    assert ens2.traj_means["s_half"].shape == (4,)
    assert ens2.max_trace_dev < 1e-9


def test_ensemble_zeno_mean():
    cfg = small_config(L=6, alpha=10.0, gamma=500.0, t_burn=1.0, t_sample=1.0,
                       dt=0.5, seed=3, n_traj=3)
    ens = run_ensemble(cfg, method="rank1", trajectory_ids=[0, 1, 2])
    assert ens.mean["s_half"] < 0.05


def test_ensemble_worker_count_invariance():
    cfg = small_config(seed=17, n_traj=4, t_sample=6.0)
    seq = run_ensemble(cfg, n_workers=1)
    par = run_ensemble(cfg, n_workers=2)
    for name in seq.observable_names:
        np.testing.assert_array_equal(seq.traj_means[name],
                                      par.traj_means[name])


def test_ensemble_jump_count_poisson():
    # DERIVED: mean jump count ~ gamma * N * (t_burn + t_sample)
    cfg = small_config(L=6, gamma=2.0, t_burn=2.0, t_sample=8.0, seed=23,
                       n_traj=24)
    ens = run_ensemble(cfg, method="rank1")
    lam = 2.0 * 3 * 10.0
    counts = ens.n_jumps
    stderr = counts.std(ddof=1) / np.sqrt(len(counts))
    assert abs(counts.mean() - lam) < 3 * max(stderr, 1e-9)


def test_trajectory_rng_streams_independent():
    a = trajectory_rng(1, 0).random(4)
    b = trajectory_rng(1, 1).random(4)
    c = trajectory_rng(1, 0, cell_key=(5,)).random(4)
    assert not np.allclose(a, b)
    assert not np.allclose(a, c)
    np.testing.assert_array_equal(a, trajectory_rng(1, 0).random(4))


def test_config_validation():
    with pytest.raises(ValueError):
        small_config(gamma=0.0)
    with pytest.raises(ValueError):
        small_config(dt=0.0)
    with pytest.raises(ValueError):
        TrajectoryConfig(spec=LatticeSpec(L=6, alpha=1.0), gamma=1.0,
                         t_burn=-1.0, t_sample=1.0, dt_sample=1.0, seed=0)
