"""Dense many-body reference in the fixed particle-number sector (L <= 10).

Everything here is brute force on purpose: states are full amplitude vectors
over occupation bitmasks, operators are dense sector matrices with explicit
Jordan-Wigner signs (sites ordered 1..L, site 1 = least significant bit), and
entropies come from Schmidt decompositions with the fermionic reordering
signs.  The Gaussian engine is validated against this module, never the
other way around.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .model import LatticeSpec, _distance_weights, build_hopping_matrix

SECTOR_SITE_CAP = 10


@lru_cache(maxsize=None)
def sector_basis(L: int, n: int) -> tuple[int, ...]:
    """Ascending occupation bitmasks with n of L bits set."""
    if L > SECTOR_SITE_CAP:
        raise ValueError(f"dense sector capped at L={SECTOR_SITE_CAP}, got {L}")
    masks = [sum(1 << b for b in bits) for bits in combinations(range(L), n)]
    return tuple(sorted(masks))


@lru_cache(maxsize=None)
def _index_of(L: int, n: int) -> dict:
    return {m: i for i, m in enumerate(sector_basis(L, n))}


@dataclass
class DenseState:
    """Amplitude vector over the fixed-N occupation basis."""

    amplitudes: np.ndarray
    L: int
    n_fermions: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        dim = len(sector_basis(self.L, self.n_fermions))
        if self.amplitudes.shape != (dim,):
            raise ValueError(
                f"amplitude vector must have sector dimension {dim}, "
                f"got {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class DenseHamiltonian:
    """Sector matrix with a cached spectral decomposition for exact evolution."""

    def __init__(self, matrix: np.ndarray, L: int, n_fermions: int):
        self.matrix = matrix
        self.L = L
        self.n_fermions = n_fermions
        self._eig = None

    def spectral(self):
        if self._eig is None:
            self._eig = np.linalg.eigh(self.matrix)
        return self._eig


def _jw_sign(mask: int, site_bit: int) -> int:
    """(-1)^(number of occupied modes below site_bit) for the ordered product."""
    below = mask & ((1 << site_bit) - 1)
    return -1 if bin(below).count("1") % 2 else 1


def dense_bilinear(coeff: np.ndarray, L: int, n: int) -> np.ndarray:
    """Sector matrix of sum_ij coeff[i, j] c_i^dag c_j (coeff Hermitian)."""
    basis = sector_basis(L, n)
    index = _index_of(L, n)
    dim = len(basis)
    out = np.zeros((dim, dim), dtype=complex)
    for col, mask in enumerate(basis):
        for j in range(L):
            if not (mask >> j) & 1:
                continue
            sign_j = _jw_sign(mask, j)
            removed = mask & ~(1 << j)
            for i in range(L):
                if coeff[i, j] == 0.0:
                    continue
                if i == j:
                    out[col, col] += coeff[j, j]
                    continue
                if (removed >> i) & 1:
                    continue
                sign_i = _jw_sign(removed, i)
                row = index[removed | (1 << i)]
                out[row, col] += coeff[i, j] * sign_i * sign_j
    return out


def dense_hamiltonian(spec: LatticeSpec, include_V: bool = False,
                      V: float = 0.0) -> DenseHamiltonian:
    """Sector matrix of the full chain Hamiltonian, optionally with the
    density-density term V accumulated with the same pair weights as the
    hopping."""
    L, n = spec.L, spec.n_fermions
    hop = build_hopping_matrix(spec).h
    matrix = dense_bilinear(hop.astype(complex), L, n)
    if include_V and V != 0.0:
        w = _distance_weights(L, spec.alpha)
        basis = sector_basis(L, n)
        diag = np.zeros(len(basis))
        for idx, mask in enumerate(basis):
            occ = [b for b in range(L) if (mask >> b) & 1]
            total = 0.0
            for a, b in combinations(occ, 2):
                total += w[(b - a) % L]
            diag[idx] = V * total
        matrix = matrix + np.diag(diag)
    return DenseHamiltonian(matrix, L, n)


def neel_dense(L: int) -> DenseState:
    """Dense counterpart of the alternating-occupation initial state."""
    n = L // 2
    mask = sum(1 << (2 * m) for m in range(n))
    amps = np.zeros(len(sector_basis(L, n)), dtype=complex)
    amps[_index_of(L, n)[mask]] = 1.0
    return DenseState(amplitudes=amps, L=L, n_fermions=n)


def dense_evolve(state: DenseState, ham: DenseHamiltonian, tau: float) -> DenseState:
    """Exact propagation exp(-i H tau) via the sector spectral decomposition."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    energies, modes = ham.spectral()
    coeffs = modes.conj().T @ state.amplitudes
    coeffs *= np.exp(-1j * energies * tau)
    return DenseState(amplitudes=modes @ coeffs, L=state.L,
                      n_fermions=state.n_fermions)


def dense_measure(state: DenseState, site: int) -> DenseState:
    """Project onto n_site = 1 (1-based site) and renormalize."""
    bit = site - 1
    basis = sector_basis(state.L, state.n_fermions)
    keep = np.array([(m >> bit) & 1 for m in basis], dtype=bool)
    amps = np.where(keep, state.amplitudes, 0.0)
    norm = np.linalg.norm(amps)
    if norm <= 1e-12:
        raise ValueError(f"measuring empty site {site}: <n> ~ {norm**2:.3e}")
    return DenseState(amplitudes=amps / norm, L=state.L,
                      n_fermions=state.n_fermions)


def dense_occupations(state: DenseState) -> np.ndarray:
    """<n_j> for every site."""
    basis = sector_basis(state.L, state.n_fermions)
    probs = np.abs(state.amplitudes) ** 2
    occ = np.zeros(state.L)
    for idx, mask in enumerate(basis):
        for b in range(state.L):
            if (mask >> b) & 1:
                occ[b] += probs[idx]
    return occ


def dense_correlation_matrix(state: DenseState) -> np.ndarray:
    """Full <c_i^dag c_j> matrix, indexed by site order."""
    L, n = state.L, state.n_fermions
    if n == 0:
        return np.zeros((L, L), dtype=complex)
    lower = sector_basis(L, n - 1)
    lower_index = _index_of(L, n - 1)
    basis = sector_basis(L, n)
    annihilated = np.zeros((len(lower), L), dtype=complex)
    for idx, mask in enumerate(basis):
        amp = state.amplitudes[idx]
        if amp == 0.0:
            continue
        for b in range(L):
            if (mask >> b) & 1:
                sign = _jw_sign(mask, b)
                annihilated[lower_index[mask & ~(1 << b)], b] += sign * amp
    return annihilated.conj().T @ annihilated


def _schmidt_matrix(state: DenseState, sites: list[int]) -> np.ndarray:
    """Amplitudes rearranged as (subsystem config) x (complement config).

    Includes the fermionic reordering sign picked up when the occupied modes
    of the subsystem are moved in front of the occupied complement modes.
    """
    L = state.L
    sub_bits = [s - 1 for s in sorted(sites)]
    env_bits = [b for b in range(L) if b not in set(sub_bits)]
    sub_pos = {b: i for i, b in enumerate(sub_bits)}
    env_pos = {b: i for i, b in enumerate(env_bits)}
    mat = np.zeros((1 << len(sub_bits), 1 << len(env_bits)), dtype=complex)
    basis = sector_basis(L, state.n_fermions)
    for idx, mask in enumerate(basis):
        amp = state.amplitudes[idx]
        if amp == 0.0:
            continue
        sub_cfg = env_cfg = 0
        crossings = 0
        env_seen = 0
        for b in range(L):
            if not (mask >> b) & 1:
                continue
            if b in sub_pos:
                sub_cfg |= 1 << sub_pos[b]
                crossings += env_seen
            else:
                env_cfg |= 1 << env_pos[b]
                env_seen += 1
        sign = -1 if crossings % 2 else 1
        mat[sub_cfg, env_cfg] += sign * amp
    return mat


def dense_entropy(state: DenseState, sites) -> float:
    """Entanglement entropy (bits) of a 1-based site subset."""
    sites = list(sites)
    if not sites or len(set(sites)) != len(sites):
        raise ValueError("sites must be a nonempty set of distinct labels")
    if min(sites) < 1 or max(sites) > state.L:
        raise ValueError(f"sites must lie in [1, {state.L}]")
    mat = _schmidt_matrix(state, sites)
    weights = np.linalg.svd(mat, compute_uv=False) ** 2
    weights = weights[weights > 1e-16]
    return float(-np.sum(weights * np.log2(weights)))


def dense_mutual_information(state: DenseState, sites_a, sites_c) -> float:
    """I = S_a + S_c - S_(a u c) in bits."""
    return (dense_entropy(state, sites_a) + dense_entropy(state, sites_c)
            - dense_entropy(state, list(sites_a) + list(sites_c)))


def dense_trajectory_replay(record, config, plan=None, include_V: bool = False,
                            V: float = 0.0):
    """Replay a recorded jump trajectory in the dense sector, no RNG involved.

    Consumes the exact event list a Gaussian trajectory produced and emits
    the same sampled observables (plus full correlation matrices when the
    plan asks for them), with the same tie rule: a sample scheduled at the
    instant of a jump reads the pre-jump state.
    """
    from .trajectory import ObservablePlan, sampling_times
    from .observables import quarters_partition

    spec = config.spec
    if plan is None:
        plan = ObservablePlan.default_for(spec.L)
    ham = dense_hamiltonian(spec, include_V=include_V, V=V)
    state = neel_dense(spec.L)
    sample_ts = sampling_times(config)
    events = list(record.events)
    for t_ev, _ in events:
        if t_ev > config.t_end:
            raise ValueError("record extends beyond the configured window")

    series = {}
    n_samples = len(sample_ts)
    if plan.s_half:
        series["s_half"] = np.empty(n_samples)
    if plan.profile_ells:
        series["profile"] = np.empty((n_samples, len(plan.profile_ells)))
    if plan.mi_quarters:
        series["mi_quarters"] = np.empty(n_samples)
    if plan.mi_far:
        series["mi_far"] = np.empty(n_samples)
    if plan.correlations:
        series["corr"] = np.empty((n_samples, spec.L, spec.L), dtype=complex)

    t_cur = 0.0
    ev = 0

    def advance(target):
        nonlocal state, t_cur
        tau = target - t_cur
        if tau > 0.0:
            state = dense_evolve(state, ham, tau)
        t_cur = target

    for si, t_s in enumerate(sample_ts):
        while ev < len(events) and events[ev][0] < t_s:
            advance(events[ev][0])
            state = dense_measure(state, events[ev][1])
            ev += 1
        advance(t_s)
        if plan.s_half:
            series["s_half"][si] = dense_entropy(
                state, range(1, spec.L // 2 + 1))
        for k, ell in enumerate(plan.profile_ells):
            series["profile"][si, k] = dense_entropy(state, range(1, ell + 1))
        if plan.mi_quarters:
            a, _, c, _ = quarters_partition(spec.L)
            series["mi_quarters"][si] = dense_mutual_information(state, a, c)
        if plan.mi_far:
            series["mi_far"][si] = dense_mutual_information(
                state, [1], [spec.L // 2 + 1])
        if plan.correlations:
            series["corr"][si] = dense_correlation_matrix(state)
    while ev < len(events):
        advance(events[ev][0])
        state = dense_measure(state, events[ev][1])
        ev += 1
    return sample_ts, series
