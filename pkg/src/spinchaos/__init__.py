"""Exact diagonalization and quantum-chaos statistics for dipolar spin systems."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    GeometryError,
    InsufficientDataError,
    NumericsError,
    ResourceError,
    SectorError,
    SelectionEmptyError,
    SmoothingError,
    SpinChaosError,
    SymmetryError,
)
from .hilbert import (
    SectorBasis,
    SectorOperator,
    SymmetrySectorTransform,
    default_sz,
    desymmetrize,
    from_bitstring,
    reflect_bits,
    reflection_transform,
    sector_basis,
    to_bitstring,
    write_basis_csv,
)
from .hamiltonian import (
    FCC_POSITIONS,
    SpinGeometry,
    assemble_sector_hamiltonian,
    chain_couplings,
    chain_geometry,
    couplings,
    fcc_couplings,
    fcc_geometry,
    two_body_term,
    two_spin_full_dipolar,
    two_spin_secular,
    write_operator_coo,
)
from .spectral import (
    SmoothedCurve,
    SpacingHistogram,
    SpacingSample,
    SpectralData,
    S0,
    density_at,
    eigendecompose,
    kernel_smooth,
    level_density,
    lsi,
    lsi_profile,
    reference_pdf,
    sample_goe,
    silverman_bandwidth,
    spacing_histogram,
    unfold,
)
from .eigvec import (
    ComponentSample,
    ComponentSelection,
    NpcProfile,
    goe_mean_npc,
    npc,
    npc_profile,
    select_components,
    unfold_components,
)
from .observables import (
    ConcentrationScan,
    ObservableSeries,
    concentration_scan,
    detrend_and_rescale,
    eigen_expectations,
    local_sigma_z,
    pair_energy_op,
    subsystem_hamiltonian,
)
from .dynamics import (
    EvolutionResult,
    TimeGrid,
    computational_state,
    evolve_expectation,
    evolve_sigma_z_batch,
    highest_npc_state,
    long_time_average,
    microcanonical_value,
    reflection_combo_state,
    support_density,
    support_mean,
)
from .config import RunConfig, parse_config
from .runner import run
