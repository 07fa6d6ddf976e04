"""Neutral nitrogen-vacancy ground-state model and memory estimates."""

__version__ = "0.1.0"

from .model import (
    PhysicalConstants,
    DjtParams,
    FieldNV,
    StrainNV,
    NvOrientation,
    ORIENTATIONS,
    orientation_by_label,
    lab_field_to_nv,
    lab_strain_to_nv,
    oriented_djt,
    load_constants,
    resolve_config_path,
)
from .hamiltonian import (
    abcd,
    build_ground,
    build_excited,
    ground_eigensystem,
    excited_eigensystem,
    diagonalize,
    level_sweep,
)
from .optics import (
    DipoleSet,
    dipole_set_nv0,
    dipole_set_nvm,
    forc_condition,
    raman_coupling,
    transition_degrees,
    noise_suppression,
    noise_suppression_approx,
    ensemble_noise,
    single_nv_spectra,
)
from .decoherence import (
    kappa,
    strain_broadening,
    strain_from_linewidth,
    splitting_spread_from_strain,
    splitting_spread_tensor_iid,
    mc_splitting_spread,
    strained_noise_spread,
    bose_occupation,
    lifetime_bound,
)
from .memory import (
    Bulk,
    Waveguide,
    MemoryConfig,
    coupling_strength,
    default_wavelength,
    r_times_delta_si,
)
from .spectro import (
    Spectrum,
    synth_spectrum,
    fit_single,
    fit_double_sweep,
    upsilon_bound,
)
