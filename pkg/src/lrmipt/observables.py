"""Entanglement profiles, mutual information, and the CFT fit.

Entropies are in bits throughout; the fit coordinate is
x = log2[(L/pi) sin(pi*ell/L)], so the recovered effective central charge is
unit-independent while the fitted constant is not.
"""

from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState, subsystem_entropy_bits


@dataclass
class EntanglementProfile:
    """Trajectory/ensemble-averaged S_ell over ell = 1..L/2."""

    L: int
    ells: np.ndarray
    values: np.ndarray
    stderr: np.ndarray = None

    def __post_init__(self):
        self.ells = np.asarray(self.ells, dtype=int)
        self.values = np.asarray(self.values, dtype=float)
        if self.stderr is None:
            self.stderr = np.zeros_like(self.values)
        if len(self.ells) != len(self.values):
            raise ValueError("ells and values must align")


@dataclass
class MutualInfoEstimate:
    """Ensemble estimate of I = S_a + S_c - S_ac at one sweep cell."""

    gamma: float
    alpha: float
    L: int
    mean: float
    stderr: float
    n_traj: int
    partition: tuple

    def __post_init__(self):
        if sum(self.partition) != self.L:
            raise ValueError("partition sizes must sum to L")
        if self.mean < -3.0 * self.stderr - 1e-12:
            raise ValueError(
                f"mutual information {self.mean} is negative beyond noise "
                f"(stderr {self.stderr})")


def mutual_info_estimate(config, ensemble,
                         observable: str = "mi_quarters") -> MutualInfoEstimate:
    """Package one sweep cell's ensemble mean as a MutualInfoEstimate."""
    L = config.spec.L
    if observable == "mi_quarters":
        partition = tuple(len(r) for r in quarters_partition(L))
    elif observable == "mi_far":
        partition = (1, L // 2 - 1, 1, L - L // 2 - 1)
    else:
        raise ValueError(f"unknown mutual-information observable {observable}")
    n_traj = ensemble.traj_means[observable].shape[0]
    return MutualInfoEstimate(
        gamma=config.gamma, alpha=config.spec.alpha, L=L,
        mean=float(ensemble.mean[observable]),
        stderr=float(ensemble.stderr[observable]),
        n_traj=n_traj, partition=partition)


def entanglement_profile(state: GaussianState) -> EntanglementProfile:
    """S_ell from the leading ell-site block, for every ell up to L/2."""
    L = state.L
    ells = np.arange(1, L // 2 + 1)
    values = np.array([subsystem_entropy_bits(state.u, np.arange(ell))
                       for ell in ells])
    return EntanglementProfile(L=L, ells=ells, values=values)


def quarters_partition(L: int) -> tuple:
    """1-based site ranges (a, b, c, d): a and c of length L/8, opposite."""
    if L % 8 != 0:
        raise ValueError(f"quarters partition needs L divisible by 8, got {L}")
    p = L // 8
    a = list(range(1, p + 1))
    b = list(range(p + 1, p + 3 * p + 1))
    c = list(range(4 * p + 1, 5 * p + 1))
    d = list(range(5 * p + 1, L + 1))
    return a, b, c, d


def _mutual_information(state: GaussianState, sites_a, sites_c) -> float:
    u = state.u
    rows_a = np.asarray(sites_a) - 1
    rows_c = np.asarray(sites_c) - 1
    rows_ac = np.concatenate([rows_a, rows_c])
    return (subsystem_entropy_bits(u, rows_a)
            + subsystem_entropy_bits(u, rows_c)
            - subsystem_entropy_bits(u, rows_ac))


def mutual_information_quarters(state: GaussianState) -> float:
    """I between the two opposite L/8 blocks separated by 3L/8 spacers."""
    a, _, c, _ = quarters_partition(state.L)
    return _mutual_information(state, a, c)


def mutual_information_far_sites(state: GaussianState) -> float:
    """I between single sites 1 and L/2+1 (the farthest pair on the ring)."""
    if state.L % 2 != 0:
        raise ValueError("far-site partition needs even L")
    return _mutual_information(state, [1], [state.L // 2 + 1])


def cft_coordinate(L: int, ells: np.ndarray) -> np.ndarray:
    """x = log2[(L/pi) sin(pi*ell/L)], the chord-length fit abscissa."""
    ells = np.asarray(ells, dtype=float)
    return np.log2((L / np.pi) * np.sin(np.pi * ells / L))


def default_fit_window(L: int) -> tuple:
    """ell range [3L/8, L/2]: the near-half-cut region the fit targets."""
    return (int(np.ceil(3 * L / 8)), L // 2)


def cft_fit(profile: EntanglementProfile, fit_window: tuple = None) -> tuple:
    """Least squares of S_ell against the CFT chord coordinate.

    Returns (c_eff, const, r_squared); the slope times 3 is the effective
    central charge.
    """
    if fit_window is None:
        fit_window = default_fit_window(profile.L)
    lo, hi = fit_window
    mask = (profile.ells >= lo) & (profile.ells <= hi)
    if mask.sum() < 4:
        raise ValueError(f"fit window [{lo}, {hi}] holds fewer than 4 points")
    x = cft_coordinate(profile.L, profile.ells[mask])
    y = profile.values[mask]
    if np.ptp(x) < 1e-12:
        raise ValueError("degenerate fit window: all abscissae equal")
    slope, const = np.polyfit(x, y, 1)
    resid = y - (slope * x + const)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return 3.0 * slope, const, r_squared


def profile_from_ensemble(L: int, ells, traj_mean_profiles: np.ndarray
                          ) -> EntanglementProfile:
    """Average per-trajectory time-mean profiles; stderr across trajectories."""
    arr = np.asarray(traj_mean_profiles, dtype=float)
    return EntanglementProfile(
        L=L, ells=np.asarray(ells, dtype=int),
        values=arr.mean(axis=0),
        stderr=arr.std(axis=0, ddof=1) / np.sqrt(arr.shape[0])
        if arr.shape[0] > 1 else np.zeros(arr.shape[1]),
    )
