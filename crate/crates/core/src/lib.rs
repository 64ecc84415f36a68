//! Momentum-space treatment of the attractive Coulomb problem at fixed
//! negative energy, built on the stereographic map that turns the problem
//! into free motion on the unit 3-sphere.
//!
//! The crate provides:
//!
//! - the projection between momentum space and the 3-sphere together with
//!   the associated measure and metric factors ([`sphere`]),
//! - hyperspherical harmonics through their SU(2) representation
//!   ([`wigner`], [`harmonics`]),
//! - bound-state spectra, pole finding and fixed-energy amplitudes
//!   ([`spectral`]),
//! - a time-sliced propagator pipeline that measures which curvature-term
//!   normalization reproduces the physical spectrum ([`sliced`]),
//! - semiclassical checks: geodesic eikonal phases and classical Kepler
//!   orbits in momentum space ([`eikonal`]).

pub mod eikonal;
pub mod energy;
pub mod error;
pub mod harmonics;
pub mod quadrature;
pub mod sliced;
pub mod spectral;
pub mod sphere;
pub mod wigner;

pub use eikonal::{
    eikonal_action, eikonal_along_orbit, fit_hodograph, minimize_eikonal,
    minimize_eikonal_seeded, simulate_kepler,
    ActionComparison, EikonalMinimum, HodographCircle, KeplerOrbit, KeplerState, MomentumPath,
};
pub use energy::{EnergyContext, Momentum3, ENERGY_UNIT_EV};
pub use error::{CoulombError, Result};
pub use harmonics::{
    addition_theorem_residual, character, gram_identity_deviation, gram_matrix,
    hyperspherical_y, legendre4, su2_from_sphere, HarmonicBasis, QuantumNumbers,
};
pub use quadrature::{s3_quadrature, GaussLegendre, QuadratureEstimate, S3Grid};
pub use sliced::{
    compose_slices, convolve_isotropic, discrimination_report, extract_spectrum,
    kernel_to_modes, project_modes, short_time_kernel, DiscriminationReport, DiscriminationRow,
    ModeCoefficients, SliceConfig, SliceKernel, SlicedLevel, SlicedSpectrum, SweepConfig,
    BOUND_STATE_THRESHOLD, EXCLUSION_PERCENT, UNIT_SPHERE_CURVATURE,
};
pub use spectral::{
    find_poles, fixed_energy_amplitude, fixed_energy_amplitude_at_angle,
    fixed_energy_amplitude_direct, level_spacing_report, no_measure_factor_spectrum,
    pseudotime_amplitude, spectrum, LevelSpacingReport, LocatedPole, NoMeasureEntry,
    RTermVariant, SeriesResult, SpacingRow, SpectrumEntry, VariantSpacing,
};
pub use sphere::{
    invariant_angle, measure_density, measure_integral, metric_factor, project, unproject,
    SpherePoint4,
};
pub use wigner::{clebsch_gordan, wigner_d, SpinLabel, SU2Element, MAX_TWO_J};
