"""Quantum-jump evolution of Gaussian states and reproducible ensembles.

One trajectory alternates three steps: draw an exponential waiting time with
total rate gamma*N, propagate exactly with the cached spectral decomposition
of the hopping matrix, then project one site onto occupation 1, the site
drawn with probability <n_j>/N.  Sampling times are exact segment boundaries,
so a unitary segment never straddles one.

Two measurement-update engines coexist:

* ``method="eigh"`` rebuilds the post-measurement correlation matrix with the
  Wick rank-one formula and takes the top-N eigenvectors (the reference
  path; O(L^3) per jump).
* ``method="rank1"`` applies the equivalent Householder rotation in orbital
  space and swaps the measured orbital for the site vector (O(L^2 N) per
  jump, dominated by one occupancy evaluation).  Equivalence of the two is
  pinned by tests against the dense Fock-space oracle.

Every trajectory owns an independent RNG stream derived from
(seed, cell key, trajectory_id) through numpy's SeedSequence spawning, so
ensembles are reproducible for any worker count.
"""

from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .model import LatticeSpec, SingleParticleHamiltonian, build_hopping_matrix
from .gaussian import (
    OCCUPATION_FLOOR,
    GaussianState,
    neel_state,
    subsystem_entropy_bits,
)
from . import observables as obs

#: re-orthonormalize the orbital matrix after this many rank-1 updates
REORTHONORMALIZE_EVERY = 256


@dataclass(frozen=True)
class TrajectoryConfig:
    """Everything one trajectory depends on besides its id."""

    spec: LatticeSpec
    gamma: float
    t_burn: float
    t_sample: float
    dt_sample: float
    seed: int
    n_traj: int = 200

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.t_burn < 0 or self.t_sample < 0:
            raise ValueError("t_burn and t_sample must be non-negative")
        if self.dt_sample <= 0:
            raise ValueError("dt_sample must be positive")

    @property
    def t_end(self) -> float:
        return self.t_burn + self.t_sample

    @classmethod
    def defaults_for(cls, spec: LatticeSpec, gamma: float, seed: int,
                     n_traj: int = 200) -> "TrajectoryConfig":
        """Default windows: burn in and sample for 2L each, unit spacing
        (entanglement saturates on a timescale linear in subsystem size)."""
        return cls(spec=spec, gamma=gamma, t_burn=2.0 * spec.L,
                   t_sample=2.0 * spec.L, dt_sample=1.0, seed=seed,
                   n_traj=n_traj)


@dataclass
class JumpRecord:
    """Ordered measurement events of one trajectory; replayable by the oracle."""

    events: list  # (time, 1-based site) pairs
    seed: int
    trajectory_id: int

    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.events])

    def sites(self) -> np.ndarray:
        return np.array([s for _, s in self.events], dtype=int)

    def validate(self, L: int):
        times = self.times()
        if len(times) and (np.any(np.diff(times) <= 0) or times[0] < 0):
            raise ValueError("event times must be strictly increasing")
        sites = self.sites()
        if len(sites) and (sites.min() < 1 or sites.max() > L):
            raise ValueError(f"sites must lie in [1, {L}]")


@dataclass(frozen=True)
class ObservablePlan:
    """Which quantities to record at each sampling time."""

    s_half: bool = True
    profile_ells: tuple = ()
    mi_quarters: bool = False
    mi_far: bool = False
    correlations: bool = False

    @classmethod
    def default_for(cls, L: int) -> "ObservablePlan":
        return cls(s_half=True, mi_quarters=(L % 8 == 0), mi_far=True)


@dataclass
class TrajectoryResult:
    times: np.ndarray
    series: dict
    record: JumpRecord
    n_jumps: int
    max_trace_dev: float
    max_orth_dev: float

    def time_means(self) -> dict:
        return {name: np.asarray(vals).mean(axis=0) for name, vals in
                self.series.items() if name != "corr"}


def sampling_times(config: TrajectoryConfig) -> np.ndarray:
    """Deterministic sampling grid: t_burn + k*dt_sample covering [t_burn, t_end)."""
    n = int(round(config.t_sample / config.dt_sample))
    return config.t_burn + config.dt_sample * np.arange(n)


def trajectory_rng(seed: int, trajectory_id: int, cell_key=()) -> np.random.Generator:
    """Independent stream for one trajectory of one sweep cell."""
    ss = np.random.SeedSequence(entropy=seed,
                                spawn_key=(*cell_key, trajectory_id))
    return np.random.default_rng(ss)


def sample_jump_time(rand: float, gamma: float, n_fermions: int) -> float:
    """Waiting time tau = -log(rand)/(gamma*N) for rand in (0, 1]."""
    if not (0.0 < rand <= 1.0):
        raise ValueError(f"rand must lie in (0, 1], got {rand}")
    return -np.log(rand) / (gamma * n_fermions)


def evolve_unitary(state: GaussianState, h: SingleParticleHamiltonian,
                   tau: float) -> GaussianState:
    """u <- V exp(-i E tau) V^T u, advancing the state clock by tau."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if tau == 0.0:
        return GaussianState(u=state.u.copy(), t=state.t)
    energies, modes = h.spectral
    coeffs = modes.T @ state.u
    coeffs *= np.exp(-1j * energies * tau)[:, None]
    return GaussianState(u=modes @ coeffs, t=state.t + tau)


def select_measurement_site(rand: float, state: GaussianState) -> int:
    """Draw a 1-based site with probability <n_j>/N by cumulative inversion."""
    if not (0.0 <= rand < 1.0):
        raise ValueError(f"rand must lie in [0, 1), got {rand}")
    occ = state.occupations()
    occ = np.where(occ > OCCUPATION_FLOOR, occ, 0.0)
    total = occ.sum()
    if total <= 0.0:
        raise RuntimeError("no occupied site available for measurement")
    cum = np.cumsum(occ / total)
    j = int(np.searchsorted(cum, rand, side="right"))
    return min(j, state.L - 1) + 1


def apply_measurement(state: GaussianState, site: int) -> GaussianState:
    """Project site onto occupation 1: Wick update of the correlation matrix
    followed by re-extraction of the orbitals from its top-N eigenvectors."""
    j = site - 1
    u = state.u
    n = state.n_fermions
    proj = u @ u.conj().T
    occ_j = proj[j, j].real
    if occ_j <= OCCUPATION_FLOOR:
        raise ValueError(f"measuring empty site {site}: <n> ~ {occ_j:.3e}")
    proj = proj - np.outer(proj[:, j], proj[j, :]) / proj[j, j]
    proj[j, j] = 1.0
    vals, vecs = np.linalg.eigh(proj)
    kept = vals[-n:]
    if np.abs(kept - 1.0).max() > 1e-6:
        raise ValueError("post-measurement correlation matrix is not a clean "
                         f"rank-N projector: kept eigenvalues {kept}")
    return GaussianState(u=vecs[:, -n:], t=state.t)


def _householder_measure(u_repr: np.ndarray, row_j: np.ndarray,
                         site_column: np.ndarray) -> np.ndarray:
    """Rank-1 equivalent of apply_measurement, in any orbital representation.

    ``u_repr`` is the orbital matrix in some fixed unitary frame, ``row_j``
    the measured site's row of the site-basis orbital matrix, and
    ``site_column`` the frame representation of that site's basis vector.
    """
    w = row_j.conj()
    nw = np.linalg.norm(w)
    if nw * nw <= OCCUPATION_FLOOR:
        raise ValueError(f"measuring empty site: <n> ~ {nw * nw:.3e}")
    x = w / nw
    beta = 1.0 if x[0] == 0 else -x[0] / abs(x[0])
    v = x.copy()
    v[0] -= beta
    q = u_repr @ v
    out = u_repr - np.outer(q, v.conj()) * (2.0 / np.vdot(v, v).real)
    out[:, 0] = site_column
    return out


def _phase_fixed_qr(m: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(m)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def _record_samples(u: np.ndarray, plan: ObservablePlan, series: dict,
                    idx: int, n_fermions: int):
    L = u.shape[0]
    if plan.s_half:
        series["s_half"][idx] = subsystem_entropy_bits(u, np.arange(L // 2))
    for k, ell in enumerate(plan.profile_ells):
        series["profile"][idx, k] = subsystem_entropy_bits(u, np.arange(ell))
    state = GaussianState(u=u)
    if plan.mi_quarters:
        series["mi_quarters"][idx] = obs.mutual_information_quarters(state)
    if plan.mi_far:
        series["mi_far"][idx] = obs.mutual_information_far_sites(state)
    if plan.correlations:
        series["corr"][idx] = u.conj() @ u.T


def _alloc_series(plan: ObservablePlan, n_samples: int, L: int) -> dict:
    series = {}
    if plan.s_half:
        series["s_half"] = np.empty(n_samples)
    if plan.profile_ells:
        series["profile"] = np.empty((n_samples, len(plan.profile_ells)))
    if plan.mi_quarters:
        series["mi_quarters"] = np.empty(n_samples)
    if plan.mi_far:
        series["mi_far"] = np.empty(n_samples)
    if plan.correlations:
        series["corr"] = np.empty((n_samples, L, L), dtype=complex)
    return series


def run_trajectory(config: TrajectoryConfig, h: SingleParticleHamiltonian = None,
                   trajectory_id: int = 0, plan: ObservablePlan = None,
                   method: str = "eigh", cell_key=()) -> TrajectoryResult:
    """One trajectory from the Neel state; deterministic in (config, id)."""
    if method not in ("eigh", "rank1"):
        raise ValueError(f"unknown method {method!r}")
    spec = config.spec
    if spec.n_fermions != spec.L // 2:
        raise ValueError("trajectories start from the Neel state: N must be L/2")
    if h is None:
        h = build_hopping_matrix(spec)
    if plan is None:
        plan = ObservablePlan.default_for(spec.L)
    L, n = spec.L, spec.n_fermions
    energies, modes = h.spectral

    rng = trajectory_rng(config.seed, trajectory_id, cell_key)
    sample_ts = sampling_times(config)
    n_samples = len(sample_ts)
    series = _alloc_series(plan, n_samples, L)

    u = neel_state(spec).u
    coeffs = modes.T @ u  # orbital matrix in the eigenbasis frame
    t_cur = 0.0
    events = []
    max_trace_dev = 0.0
    max_orth_dev = 0.0
    jumps_since_qr = 0

    def advance(target: float):
        nonlocal coeffs, t_cur
        tau = target - t_cur
        if tau > 0.0:
            coeffs = np.exp(-1j * energies * tau)[:, None] * coeffs
        t_cur = target

    t_jump = sample_jump_time(1.0 - rng.random(), config.gamma, n)
    si = 0
    while True:
        next_sample = sample_ts[si] if si < n_samples else np.inf
        if t_jump < next_sample and t_jump <= config.t_end:
            advance(t_jump)
            u_site = modes @ coeffs
            state = GaussianState(u=u_site, t=t_cur)
            site = select_measurement_site(rng.random(), state)
            if method == "eigh":
                u_site = apply_measurement(state, site).u
                coeffs = modes.T @ u_site
            else:
                coeffs = _householder_measure(coeffs, u_site[site - 1],
                                              modes[site - 1])
                jumps_since_qr += 1
                if jumps_since_qr >= REORTHONORMALIZE_EVERY:
                    coeffs = _phase_fixed_qr(coeffs)
                    jumps_since_qr = 0
            events.append((float(t_cur), site))
            t_jump = t_cur + sample_jump_time(1.0 - rng.random(), config.gamma, n)
        elif si < n_samples:
            advance(next_sample)
            u_site = modes @ coeffs
            _record_samples(u_site, plan, series, si, n)
            state = GaussianState(u=u_site, t=t_cur)
            max_trace_dev = max(max_trace_dev,
                                abs(state.occupations().sum() - n))
            max_orth_dev = max(max_orth_dev, state.orthonormality_defect())
            si += 1
        else:
            break

    record = JumpRecord(events=events, seed=config.seed,
                        trajectory_id=trajectory_id)
    return TrajectoryResult(times=sample_ts, series=series, record=record,
                            n_jumps=len(events), max_trace_dev=max_trace_dev,
                            max_orth_dev=max_orth_dev)


@dataclass
class EnsembleResult:
    """Trajectory-level time averages reduced in trajectory_id order."""

    observable_names: list
    traj_means: dict          # name -> (n_traj, ...) array
    mean: dict                # name -> scalar or vector
    stderr: dict
    trajectory_ids: list
    n_jumps: np.ndarray
    max_trace_dev: float
    max_orth_dev: float
    records: list = field(default_factory=list)


def _reduce_trajectories(per_traj: list, trajectory_ids, keep_records: bool
                         ) -> EnsembleResult:
    names = [k for k in per_traj[0].time_means()]
    traj_means = {k: np.stack([r.time_means()[k] for r in per_traj])
                  for k in names}
    mean = {k: v.mean(axis=0) for k, v in traj_means.items()}
    stderr = {k: (v.std(axis=0, ddof=1) / np.sqrt(v.shape[0])
                  if v.shape[0] > 1 else np.zeros_like(v[0], dtype=float))
              for k, v in traj_means.items()}
    return EnsembleResult(
        observable_names=names,
        traj_means=traj_means,
        mean=mean,
        stderr=stderr,
        trajectory_ids=list(trajectory_ids),
        n_jumps=np.array([r.n_jumps for r in per_traj]),
        max_trace_dev=max(r.max_trace_dev for r in per_traj),
        max_orth_dev=max(r.max_orth_dev for r in per_traj),
        records=[r.record for r in per_traj] if keep_records else [],
    )


def run_ensemble(config: TrajectoryConfig, h: SingleParticleHamiltonian = None,
                 plan: ObservablePlan = None, method: str = "eigh",
                 n_workers: int = 1, cell_key=(), trajectory_ids=None,
                 keep_records: bool = False) -> EnsembleResult:
    """Run n_traj trajectories and reduce their time averages.

    The reduction consumes results in trajectory_id order whatever the worker
    scheduling, so the outcome depends only on (config, trajectory_ids).
    """
    if trajectory_ids is None:
        trajectory_ids = list(range(config.n_traj))
    if len(trajectory_ids) < 2:
        raise ValueError("an ensemble needs at least two trajectories")
    if h is None:
        h = build_hopping_matrix(config.spec)
        h.spectral  # compute once, share read-only
    if n_workers > 1:
        per_traj = Parallel(n_jobs=n_workers)(
            delayed(run_trajectory)(config, h, tid, plan, method, cell_key)
            for tid in trajectory_ids)
    else:
        per_traj = [run_trajectory(config, h, tid, plan, method, cell_key)
                    for tid in trajectory_ids]
    return _reduce_trajectories(per_traj, trajectory_ids, keep_records)
