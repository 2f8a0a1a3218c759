//! Experiment configuration, Monte Carlo drivers, CSV output and the
//! validation suite.

pub mod config;
pub mod experiment;
pub mod validate;

pub use config::{
    parse_snr_range, resolve_code, AtildeSpec, CodeDef, CodeRef, ExperimentConfig, ModeSel,
    ResolvedCode, VariantSel,
};
pub use experiment::{
    atilde_to_csv, curve_to_csv, dstar_to_csv, run_atilde_table, run_bound_curve, run_curve,
    run_simulation_curve, simulate_point, AtildeRow, CurvePoint, SimOptions, SimStats, CSV_HEADER,
};
pub use validate::{run_validation_suite, ValidationOptions, ValidationReport};
