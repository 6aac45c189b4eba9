use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{field}: matrix is not positive definite (m11 = {m11}, m12 = {m12})")]
    NonPositiveDefinite { field: &'static str, m11: f64, m12: f64 },

    #[error("{field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("degenerate source: Y0 + Y1 = 0")]
    DegenerateSource,

    #[error("window [{start}, {end}] s contains no samples")]
    EmptyWindow { start: f64, end: f64 },

    #[error("pulse train term has invalid delay {delay} or gain {gain}")]
    InvalidTerm { delay: f64, gain: f64 },

    #[error("transfer denominator underflow at f = {freq} Hz")]
    ResonancePole { freq: f64 },

    #[error("oracle window {window} s is shorter than required {required} s")]
    WindowTooShort { window: f64, required: f64 },

    #[error("inverse transform left imaginary residue {residue} (relative)")]
    ComplexResidue { residue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("must be positive and finite, got {value}"),
        })
    }
}
