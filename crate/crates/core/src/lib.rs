//! Simulation and analysis of three-photon interference in a Mach–Zehnder
//! interferometer fed with a coherent state and squeezed vacuum.
//!
//! The exact truncated Fock-space simulation in [`fock`] and [`mzi`] is the
//! reference for everything else: the closed-form harmonic model, the fringe
//! metrics in [`metrology`] and the fits in [`fit`].

// comparisons are negated on purpose so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fit;
pub mod fock;
pub mod metrology;
pub mod mzi;
pub mod scan;
pub mod source;
pub mod validation;

pub use error::{Error, Result};
pub use fit::{
    fit_fringe, fit_fringe_with, fit_initialize, fit_model_eval, form_weights, synthetic_scan, FitModelParams,
    FitOptions, FitResult, StandardErrors,
};
pub use fock::{
    apply_beam_splitter, apply_phase, make_state, norm_sq, project_photon_numbers, Arm, BeamSplitterSpec, ModeMatrix,
    SplitterConvention, TwoModeState, DEFAULT_N_MAX,
};
pub use metrology::{
    fourier_components, hl_limit, log_space, min_sensitivity, ratio_sweep, sql_limit, visibility,
    FourierComponents, RateModel, SensitivityCurve, SweepRow,
};
pub use mzi::{
    analytic_coefficients, calibrate_convention, three_photon_rate_analytic, three_photon_rate_oracle,
    AnalyticCoefficients, ModelForm, MziSettings, OracleFringe, Port, SignCalibration, CALIBRATED,
};
pub use scan::{normalize_fringe, phase_grid, wrap_phase, FringeScan, ScanKind, DEFAULT_GRID};
pub use source::{Expansion, SourceParams};
pub use validation::{discrepancy_ledger, equivalence_sweep, validate, EquivalenceGrid, ValidationReport};
