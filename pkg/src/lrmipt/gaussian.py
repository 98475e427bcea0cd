"""Orbital-matrix representation of free-fermion states and their entropies.

A pure number-conserving Gaussian state of N fermions on L sites is the
Slater determinant of the columns of an L x N matrix u with orthonormal
columns.  Two-point functions follow from u alone,

    D_ij = <c_i^dag c_j> = sum_m conj(u[i, m]) * u[j, m],

and every entanglement entropy is a function of the eigenvalues of the
correlation matrix restricted to the subsystem.  The index placement above
is the one that agrees entry-by-entry with the dense Fock-space reference
(see tests); the transposed variant describes the same state but would fail
the raw-correlation comparison.
"""

from dataclasses import dataclass, field

import numpy as np

from .model import LatticeSpec

#: tolerance for eigenvalues of a correlation matrix leaking out of [0, 1]
EIGENVALUE_TOL = 1e-6

#: occupations below this are treated as an empty site
OCCUPATION_FLOOR = 1e-12


@dataclass
class GaussianState:
    """L x N complex orbital matrix plus the simulation time it represents."""

    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=complex)
        if self.u.ndim != 2:
            raise ValueError("u must be a 2-d (sites x orbitals) array")
        if self.u.shape[1] > self.u.shape[0]:
            raise ValueError("cannot hold more orbitals than sites")

    @property
    def L(self) -> int:
        return self.u.shape[0]

    @property
    def n_fermions(self) -> int:
        return self.u.shape[1]

    def occupations(self) -> np.ndarray:
        """<n_j> for every site, the diagonal of u u^dag."""
        return np.einsum("jm,jm->j", self.u, self.u.conj()).real

    def orthonormality_defect(self) -> float:
        """max |u^dag u - I|, the drift away from the normalization constraint."""
        gram = self.u.conj().T @ self.u
        return float(np.abs(gram - np.eye(self.n_fermions)).max())


@dataclass
class CorrelationMatrix:
    """Hermitian <c_i^dag c_j> matrix on a site subset, with 1-based labels."""

    D: np.ndarray
    site_index_map: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.D = np.asarray(self.D, dtype=complex)
        if self.D.ndim != 2 or self.D.shape[0] != self.D.shape[1]:
            raise ValueError("D must be square")
        if not self.site_index_map:
            self.site_index_map = list(range(1, self.D.shape[0] + 1))
        if len(self.site_index_map) != self.D.shape[0]:
            raise ValueError("site_index_map length must match D")


def neel_state(spec: "LatticeSpec | int") -> GaussianState:
    """Alternating occupation product state 1,0,1,0,... at half filling.

    Accepts a LatticeSpec or a bare even integer L (the lattice-geometry
    constraint L >= 4 is irrelevant to the state itself).
    """
    if isinstance(spec, LatticeSpec):
        L, n = spec.L, spec.n_fermions
    else:
        L, n = int(spec), int(spec) // 2
        if L < 2 or L % 2 != 0:
            raise ValueError(f"L must be even and >= 2, got {L}")
    if n != L // 2:
        raise ValueError(f"Neel state needs half filling, got N={n} at L={L}")
    u = np.zeros((L, n), dtype=complex)
    u[2 * np.arange(n), np.arange(n)] = 1.0
    return GaussianState(u=u, t=0.0)


def correlation_matrix(state: GaussianState, sites=None) -> CorrelationMatrix:
    """Correlation matrix on a subset of (1-based) sites; full lattice if None."""
    if sites is None:
        sites = range(1, state.L + 1)
    sites = list(sites)
    if not sites:
        raise ValueError("sites must be nonempty")
    if len(set(sites)) != len(sites):
        raise ValueError("duplicate sites in subset")
    if min(sites) < 1 or max(sites) > state.L:
        raise ValueError(f"sites must lie in [1, {state.L}]")
    rows = np.asarray(sites) - 1
    u_sub = state.u[rows]
    return CorrelationMatrix(D=u_sub.conj() @ u_sub.T, site_index_map=sites)


def _mode_entropy_bits(occ: np.ndarray, tol: float = EIGENVALUE_TOL) -> float:
    """Binary entropy (bits) summed over mode occupancies, 0*log 0 := 0."""
    occ = np.asarray(occ, dtype=float)
    if occ.min() < -tol or occ.max() > 1 + tol:
        raise ValueError(
            f"mode occupancy outside [{-tol}, {1 + tol}]: "
            f"range [{occ.min()}, {occ.max()}]"
        )
    occ = np.clip(occ, 0.0, 1.0)
    s = 0.0
    for nu in (occ, 1.0 - occ):
        mask = nu > 0.0
        s -= float(np.sum(nu[mask] * np.log2(nu[mask])))
    return s


def entanglement_entropy(corr: CorrelationMatrix) -> float:
    """Von Neumann entropy in bits from the correlation-matrix eigenvalues."""
    return _mode_entropy_bits(np.linalg.eigvalsh(corr.D))


def entanglement_entropy_nats(corr: CorrelationMatrix) -> float:
    """Same entropy in natural-log units."""
    return entanglement_entropy(corr) * np.log(2.0)


def subsystem_entropy_bits(u: np.ndarray, rows: np.ndarray) -> float:
    """Entropy of the site subset ``rows`` (0-based) straight from the orbitals.

    Uses whichever Gram matrix is smaller: the ell x ell correlation block or
    the N x N overlap of the restricted orbitals (same nonzero spectrum; the
    padding eigenvalues are exact 0s or 1s and carry no entropy).
    """
    u_sub = u[rows]
    ell, n = u_sub.shape
    if ell <= n:
        gram = u_sub @ u_sub.conj().T
    else:
        gram = u_sub.conj().T @ u_sub
    return _mode_entropy_bits(np.linalg.eigvalsh(gram))


def orthonormalize(state: GaussianState) -> GaussianState:
    """Restore exact column orthonormality without changing the column span.

    QR with the phase convention that makes the operation idempotent: an
    already-orthonormal u comes back unchanged to machine precision.
    """
    q, r = np.linalg.qr(state.u)
    diag = np.diagonal(r)
    if np.abs(diag).min() < 1e-12 * max(1.0, np.abs(diag).max()):
        raise ValueError("orbital matrix is numerically rank deficient")
    q = q * (diag / np.abs(diag))
    return GaussianState(u=q, t=state.t)
