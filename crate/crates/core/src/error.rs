//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("OAM index {ell} outside truncation range [-{l_max}, {l_max}]")]
    OamOutOfRange { ell: i32, l_max: u32 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("q-plate charge {q} is not a half-integer")]
    InvalidQPlateCharge { q: f64 },

    #[error(
        "q-plate output OAM {ell_out} (from input {ell_in}) exceeds truncation |l| <= {l_max}"
    )]
    QPlateOverflow {
        ell_in: i32,
        ell_out: i32,
        l_max: u32,
    },

    #[error("parameter {name} = {value} out of range ({expected})")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("no guided LP({ell},{p}) mode: V-number {v_number:.4} is below cutoff")]
    BelowCutoff { ell: u32, p: u32, v_number: f64 },

    #[error("fiber mode ({ell},{p}) not solved for this fiber")]
    UnknownFiberMode { ell: u32, p: u32 },

    #[error("projection has zero norm; conditional quantities undefined")]
    ZeroNormProjection,

    #[error("visibility undefined: all counts are zero")]
    UndefinedVisibility,

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("theta samples span {span_deg:.2} deg, need at least {need_deg:.2} deg")]
    InsufficientThetaSpan { span_deg: f64, need_deg: f64 },

    #[error("fringe fit is singular for this theta grid")]
    SingularFit,

    #[error("calibration targets infeasible: {reason}")]
    InfeasibleTargets { reason: String },

    #[error("scan is missing required analyzer setting alpha = {alpha_deg} deg")]
    MissingSetting { alpha_deg: f64 },

    #[error("render grid resolution {resolution} too small (need >= {min})")]
    GridTooSmall { resolution: usize, min: usize },

    #[error("CSV schema error at line {line}: {detail}")]
    CsvSchema { line: usize, detail: String },
}
