"""Monitored long-range free-fermion chains: trajectories, entanglement
scaling, and boundary operator-norm diagnostics."""

__version__ = "0.1.0"

from .model import (
    LatticeSpec,
    SingleParticleHamiltonian,
    BoundaryBlock,
    pair_coupling,
    build_hopping_matrix,
    build_boundary_block,
)
from .gaussian import (
    GaussianState,
    CorrelationMatrix,
    neel_state,
    correlation_matrix,
    entanglement_entropy,
    orthonormalize,
)
from .trajectory import (
    TrajectoryConfig,
    JumpRecord,
    ObservablePlan,
    sample_jump_time,
    evolve_unitary,
    select_measurement_site,
    apply_measurement,
    run_trajectory,
    run_ensemble,
)
from .observables import (
    EntanglementProfile,
    MutualInfoEstimate,
    entanglement_profile,
    mutual_information_quarters,
    mutual_information_far_sites,
    mutual_info_estimate,
    cft_fit,
)
from .scaling import (
    Curve,
    CurveFamily,
    ScalingFitResult,
    detect_crossing,
    crossing_bootstrap,
    bkt_collapse_fit,
    power_law_collapse_fit,
    power_law_fit,
    log_fit,
)
from .bounds import (
    BoundParameters,
    NormScalingSeries,
    bilinear_norm,
    norm_scaling_series,
    lemma1_bound_bilinear,
    lemma1_bound_interacting,
    classify_threshold,
    growth_rate_lambda,
    growth_rate_report,
)
