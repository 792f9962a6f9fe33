//! Simulator for interacting distinguishable particles traversing a
//! two-arm Mach-Zehnder interferometer with a quarter-wave phase
//! shifter in one arm.
//!
//! The crate follows the full quantum-mechanical story of the "quantum
//! pigeonhole" setup end to end:
//!
//! * [`branch`] expands the product superposition of N particles
//!   through the beam splitters, the phase shifter and a detector
//!   post-selection into signed complex coefficients per companion
//!   structure (which particles shared an arm).
//! * [`geometry`] and [`modes`] place the interaction-deflected
//!   Gaussian wavepackets at the detector plane, including the
//!   geometric (beam-tilt) and interaction phases, and evaluate mode
//!   overlaps in closed form.
//! * [`density`] assembles the normalized single-particle marginal
//!   density with all interference cross terms, the incoherent
//!   baseline, and a literal transcription of the worked closed form
//!   for regression testing.
//! * [`observables`] computes displacement expectation values versus
//!   interaction strength, small-d slopes, and the transverse momentum
//!   balance.
//! * [`quadrature`] is the independent brute-force verification path:
//!   Simpson/trapezoid overlaps and a direct 4-D two-particle marginal.
//! * [`feasibility`] carries the physical-units analysis of an electron
//!   realization.
//! * [`export`] serializes grids and sweep curves (CSV, PGM, JSON) with
//!   deterministic bytes.
//! * [`verify`] bundles the oracle-equivalence checks behind a runtime
//!   report.
//!
//! All lengths inside the simulation are expressed in units of the beam
//! width sigma; SI units appear only in [`feasibility`].

pub mod branch;
pub mod density;
pub mod error;
pub mod export;
pub mod feasibility;
pub mod geometry;
pub mod modes;
pub mod observables;
pub mod quadrature;
pub mod verify;

pub use branch::{
    branch_coefficient, expand_postselected, verify_classical_php, Arm, ArmAssignment,
    CompanionStructure, Detector, DetectorPattern, PostSelectedState,
};
pub use density::{
    build_terms, closed_form_reference, incoherent_density, probability_density, DensityGrid,
    DensityTerms, GridSpec,
};
pub use error::{Error, Result};
pub use geometry::{DeflectionGeometry, Vec2};
pub use modes::{evaluate, mode_for, overlap, GaussianMode, InteractionConfig, PhaseModel};
pub use observables::{
    d_grid, default_d_grid, expectation, expectation_analytic, incoherent_expectation,
    momentum_sum, slope_at_zero, sweep, SweepCurve,
};
pub use quadrature::{
    numeric_expectation, numeric_marginal_two_particle, numeric_overlap, QuadRule, QuadratureSpec,
};

pub use num_complex::Complex64;
