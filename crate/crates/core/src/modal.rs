//! Per-unit-length matrices of a symmetric coupled pair and their even/odd
//! mode decomposition.
//!
//! Sign convention: the mutual capacitance `m12` of a capacitance matrix is
//! stored as it appears in the Maxwell capacitance matrix, i.e. negative for
//! a physical pair. The even-mode capacitance is therefore `C11 + C12` and
//! the odd-mode capacitance `C11 - C12`. Tools that report the mutual
//! capacitance as a positive number must be negated before ingestion.

use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// F/m
    Capacitance,
    /// H/m
    Inductance,
    /// Ω
    Impedance,
}

impl MatrixKind {
    fn name(self) -> &'static str {
        match self {
            MatrixKind::Capacitance => "capacitance",
            MatrixKind::Inductance => "inductance",
            MatrixKind::Impedance => "impedance",
        }
    }
}

/// A 2×2 symmetric matrix `[[m11, m12], [m12, m11]]` of a symmetric pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricMatrix2 {
    m11: f64,
    m12: f64,
    kind: MatrixKind,
}

impl SymmetricMatrix2 {
    /// Builds a matrix, rejecting anything that is not positive definite.
    pub fn new(kind: MatrixKind, m11: f64, m12: f64) -> Result<Self> {
        let pd = m11.is_finite()
            && m12.is_finite()
            && m11 > 0.0
            && m11 + m12 > 0.0
            && m11 - m12 > 0.0;
        if !pd {
            return Err(Error::NonPositiveDefinite {
                field: kind.name(),
                m11,
                m12,
            });
        }
        Ok(Self { m11, m12, kind })
    }

    pub fn capacitance(c11: f64, c12: f64) -> Result<Self> {
        Self::new(MatrixKind::Capacitance, c11, c12)
    }

    pub fn inductance(l11: f64, l12: f64) -> Result<Self> {
        Self::new(MatrixKind::Inductance, l11, l12)
    }

    pub fn impedance(z11: f64, z12: f64) -> Result<Self> {
        Self::new(MatrixKind::Impedance, z11, z12)
    }

    pub fn m11(&self) -> f64 {
        self.m11
    }

    pub fn m12(&self) -> f64 {
        self.m12
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    /// Eigenvalue along `[1, 1]`.
    pub fn even(&self) -> f64 {
        self.m11 + self.m12
    }

    /// Eigenvalue along `[1, -1]`.
    pub fn odd(&self) -> f64 {
        self.m11 - self.m12
    }
}

/// Characteristic admittances (S) and per-unit-length delays (s/m) of the
/// even and odd modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalParameters {
    pub y_even: f64,
    pub y_odd: f64,
    pub tau_even: f64,
    pub tau_odd: f64,
}

impl ModalParameters {
    pub fn new(y_even: f64, y_odd: f64, tau_even: f64, tau_odd: f64) -> Result<Self> {
        ensure_positive("y_even", y_even)?;
        ensure_positive("y_odd", y_odd)?;
        ensure_positive("tau_even", tau_even)?;
        ensure_positive("tau_odd", tau_odd)?;
        Ok(Self {
            y_even,
            y_odd,
            tau_even,
            tau_odd,
        })
    }

    pub fn from_impedances(z_even: f64, z_odd: f64, tau_even: f64, tau_odd: f64) -> Result<Self> {
        ensure_positive("z_even", z_even)?;
        ensure_positive("z_odd", z_odd)?;
        Self::new(1.0 / z_even, 1.0 / z_odd, tau_even, tau_odd)
    }

    pub fn z_even(&self) -> f64 {
        1.0 / self.y_even
    }

    pub fn z_odd(&self) -> f64 {
        1.0 / self.y_odd
    }

    /// A coupled microstrip-like cross-section has `y_odd >= y_even`.
    /// Violations are legal but usually mean swapped columns in the input.
    pub fn is_microstrip_like(&self) -> bool {
        self.y_odd >= self.y_even
    }
}

/// Even/odd decomposition of a symmetric lossless pair:
/// `Y = sqrt(C_mode / L_mode)`, `tau = sqrt(L_mode * C_mode)`.
pub fn extract_modal(l: &SymmetricMatrix2, c: &SymmetricMatrix2) -> Result<ModalParameters> {
    for (m, want) in [(l, MatrixKind::Inductance), (c, MatrixKind::Capacitance)] {
        if m.kind != want {
            return Err(Error::InvalidParameter {
                field: want.name(),
                reason: format!("expected a {} matrix, got {}", want.name(), m.kind.name()),
            });
        }
    }
    let (le, lo) = (l.even(), l.odd());
    let (ce, co) = (c.even(), c.odd());
    ModalParameters::new(
        (ce / le).sqrt(),
        (co / lo).sqrt(),
        (le * ce).sqrt(),
        (lo * co).sqrt(),
    )
}

pub fn characteristic_impedance_matrix(p: &ModalParameters) -> SymmetricMatrix2 {
    let (ze, zo) = (p.z_even(), p.z_odd());
    // Valid modal parameters always give m11 > |m12|.
    SymmetricMatrix2 {
        m11: 0.5 * (ze + zo),
        m12: 0.5 * (ze - zo),
        kind: MatrixKind::Impedance,
    }
}

/// `k = sqrt(Y_odd / Y_even) = sqrt(Z_even / Z_odd)`.
pub fn coupling_coefficient(p: &ModalParameters) -> f64 {
    (p.y_odd / p.y_even).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn paper_pair() -> (SymmetricMatrix2, SymmetricMatrix2) {
        (
            SymmetricMatrix2::inductance(390.34e-9, 309.03e-9).unwrap(),
            SymmetricMatrix2::capacitance(232.06e-12, -138.12e-12).unwrap(),
        )
    }

    #[test]
    fn published_cross_section_impedances() {
        let (l, c) = paper_pair();
        let p = extract_modal(&l, &c).unwrap();
        assert!(rel(p.z_odd(), 14.8211) < 1e-4, "{}", p.z_odd());
        assert!(rel(p.z_even(), 86.282) < 1e-4, "{}", p.z_even());
        // sqrt((L11 ± L12)(C11 ± C12)) by hand: sqrt(699.37e-9 * 93.94e-12), sqrt(81.31e-9 * 370.18e-12)
        assert!(rel(p.tau_even, 8.1055e-9) < 1e-4, "{}", p.tau_even);
        assert!(rel(p.tau_odd, 5.4864e-9) < 1e-4, "{}", p.tau_odd);
        assert!(p.is_microstrip_like());
    }

    #[test]
    fn published_impedance_matrix() {
        let (l, c) = paper_pair();
        let z = characteristic_impedance_matrix(&extract_modal(&l, &c).unwrap());
        assert_eq!(z.kind(), MatrixKind::Impedance);
        assert!(rel(z.m11(), 50.5516) < 1e-4, "{}", z.m11());
        assert!(rel(z.m12(), 35.7304) < 1e-4, "{}", z.m12());
    }

    #[test]
    fn uncoupled_pair() {
        let l = SymmetricMatrix2::inductance(250e-9, 0.0).unwrap();
        let c = SymmetricMatrix2::capacitance(100e-12, 0.0).unwrap();
        let p = extract_modal(&l, &c).unwrap();
        assert!(rel(p.y_even, 0.02) < 1e-14);
        assert!(rel(p.y_odd, 0.02) < 1e-14);
        assert!(rel(p.tau_even, 5e-9) < 1e-14);
        assert!(rel(p.tau_odd, 5e-9) < 1e-14);
        let z = characteristic_impedance_matrix(&p);
        assert!(rel(z.m11(), 50.0) < 1e-14);
        assert_eq!(z.m12(), 0.0);
        assert_eq!(coupling_coefficient(&p), 1.0);
    }

    #[test]
    fn coupling_coefficient_values() {
        let (l, c) = paper_pair();
        let k = coupling_coefficient(&extract_modal(&l, &c).unwrap());
        assert!((k - 2.4128).abs() < 1e-3, "{k}");
        let p = ModalParameters::from_impedances(100.0, 25.0, 1e-9, 1e-9).unwrap();
        assert!((coupling_coefficient(&p) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_definite() {
        assert!(matches!(
            SymmetricMatrix2::capacitance(100e-12, -100e-12),
            Err(Error::NonPositiveDefinite { field: "capacitance", .. })
        ));
        assert!(SymmetricMatrix2::inductance(100e-9, 120e-9).is_err());
        assert!(SymmetricMatrix2::inductance(-1.0, 0.0).is_err());
        assert!(SymmetricMatrix2::capacitance(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn rejects_swapped_kinds() {
        let (l, c) = paper_pair();
        assert!(extract_modal(&c, &l).is_err());
    }

    #[test]
    fn modal_parameters_must_be_positive() {
        assert!(ModalParameters::new(0.0, 0.02, 1e-9, 1e-9).is_err());
        assert!(ModalParameters::new(0.02, 0.02, f64::INFINITY, 1e-9).is_err());
        let swapped = ModalParameters::new(0.03, 0.02, 1e-9, 1e-9).unwrap();
        assert!(!swapped.is_microstrip_like());
    }
}
