"""Long-range hopping model on a ring and its subsystem boundary coupling.

The chain has L sites with periodic boundaries and a hopping amplitude
1/r^alpha accumulated over r = 1 .. L/2 for every base site, so the pair at
ring distance L/2 is counted from both endpoints and carries weight
2/(L/2)^alpha.  That convention is kept literally (it is what the double sum
says), and every downstream quantity inherits it.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Alpha at or above this value is treated as the short-range limit: all
# couplings beyond ring distance 1 are set to exactly zero.  Avoids overflow
# in r**alpha while preserving the nearest-neighbor term.
SHORT_RANGE_ALPHA = 500.0


@dataclass(frozen=True)
class LatticeSpec:
    """Chain size, decay exponent and particle number.

    Parameters
    ----------
    L : int
        Number of sites; even, at least 4 (the r-sum runs to L/2).
    alpha : float
        Decay exponent of the hopping amplitude 1/r^alpha; non-negative.
    n_fermions : int, optional
        Conserved particle number.  Defaults to half filling L//2.
    """

    L: int
    alpha: float
    n_fermions: int | None = None

    def __post_init__(self):
        if self.L < 4 or self.L % 2 != 0:
            raise ValueError(f"L must be even and >= 4, got {self.L}")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if self.n_fermions is None:
            object.__setattr__(self, "n_fermions", self.L // 2)
        if not (1 <= self.n_fermions <= self.L):
            raise ValueError(f"n_fermions must be in [1, L], got {self.n_fermions}")


class SingleParticleHamiltonian:
    """Real symmetric L x L hopping matrix with a cached spectral decomposition.

    The matrix is immutable after construction; the eigendecomposition is
    computed once on first use and shared read-only across trajectory workers.
    """

    def __init__(self, h: np.ndarray):
        h = np.asarray(h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"h must be square, got shape {h.shape}")
        if not np.array_equal(h, h.T):
            raise ValueError("h must be exactly symmetric")
        self.h = h
        self.h.setflags(write=False)

    @property
    def L(self) -> int:
        return self.h.shape[0]

    @cached_property
    def spectral(self) -> tuple[np.ndarray, np.ndarray]:
        """(eigenvalues, orthonormal eigenvectors) of h, ascending order."""
        energies, modes = np.linalg.eigh(self.h)
        energies.setflags(write=False)
        modes.setflags(write=False)
        return energies, modes


@dataclass(frozen=True)
class BoundaryBlock:
    """Coupling weights between subsystem A = sites 1..ell and B = the rest.

    ``M[j, k]`` is the (negative) hopping weight between site j+1 of A and
    site ell+k+1 of B.  The full boundary Hamiltonian is the bilinear form
    with single-particle matrix [[0, M], [M^dag, 0]].
    """

    M: np.ndarray
    ell: int


def _distance_weights(L: int, alpha: float) -> np.ndarray:
    """Total coupling weight by ring offset k = 0..L-1 (index 0 unused)."""
    w = np.zeros(L)
    k = np.arange(1, L)
    if alpha >= SHORT_RANGE_ALPHA:
        w[1] = 1.0
        w[L - 1] += 1.0
        return w
    r_fwd = k.astype(float)
    r_bck = (L - k).astype(float)
    w[1:] = np.where(r_fwd <= L // 2, r_fwd ** -alpha, 0.0)
    w[1:] += np.where(r_bck <= L // 2, r_bck ** -alpha, 0.0)
    return w


def pair_coupling(spec: LatticeSpec, i: int, j: int) -> float:
    """Total hopping weight accumulated on the unordered pair (i, j).

    Sites are 1-based.  The weight is the literal double sum over base site
    and range r <= L/2, so the antipodal pair receives 2/(L/2)^alpha.  The
    sign (-1) is applied by the matrix builders, not here.
    """
    if i == j:
        raise ValueError("pair_coupling requires two distinct sites")
    if not (1 <= i <= spec.L and 1 <= j <= spec.L):
        raise ValueError(f"sites must lie in [1, {spec.L}]")
    w = _distance_weights(spec.L, spec.alpha)
    return float(w[(j - i) % spec.L])


def build_hopping_matrix(spec: LatticeSpec) -> SingleParticleHamiltonian:
    """Single-particle matrix h with h_ij = -pair_coupling(i, j), zero diagonal."""
    w = _distance_weights(spec.L, spec.alpha)
    offsets = (np.arange(spec.L)[None, :] - np.arange(spec.L)[:, None]) % spec.L
    h = -w[offsets]
    np.fill_diagonal(h, 0.0)
    return SingleParticleHamiltonian(h)


def build_boundary_block(spec: LatticeSpec, ell: int) -> BoundaryBlock:
    """A-B coupling block M_jk = -pair_coupling(j, k), j in A, k in B."""
    if not (1 <= ell <= spec.L // 2):
        raise ValueError(f"ell must lie in [1, L/2], got {ell}")
    h = build_hopping_matrix(spec).h
    M = h[:ell, ell:].copy()
    M.setflags(write=False)
    return BoundaryBlock(M=M, ell=ell)


def boundary_coefficient_matrix(block: BoundaryBlock) -> np.ndarray:
    """Full L x L single-particle matrix [[0, M], [M^dag, 0]] of H_AB."""
    ell = block.ell
    L = ell + block.M.shape[1]
    coeff = np.zeros((L, L))
    coeff[:ell, ell:] = block.M
    coeff[ell:, :ell] = block.M.T
    return coeff
