//! Multiple-reflection (bounce) model of a single lossless line section fed
//! by a source of internal admittance `Y0` and terminated in `Y2`.
//!
//! Near-end trains hold the reflected part only: the total near-end voltage
//! is `V_in(t)` plus the near-end train.

use crate::error::{ensure_positive, Error, Result};
use crate::excitation::{PulseTrain, Term};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSection {
    /// Characteristic admittance, S.
    pub y1: f64,
    /// Per-unit-length delay, s/m.
    pub tau1: f64,
    /// m
    pub length: f64,
}

impl LineSection {
    pub fn new(y1: f64, tau1: f64, length: f64) -> Result<Self> {
        ensure_positive("y1", y1)?;
        ensure_positive("tau1", tau1)?;
        ensure_positive("length", length)?;
        Ok(Self { y1, tau1, length })
    }

    /// One-way delay `l * tau1`.
    pub fn one_way(&self) -> f64 {
        self.length * self.tau1
    }
}

/// Far-end load. The infinite-admittance limit is the `Short` variant,
/// never a floating-point infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Admittance(f64),
    Open,
    Short,
}

impl Termination {
    pub fn admittance(y: f64) -> Result<Self> {
        if y.is_finite() && y >= 0.0 {
            Ok(Termination::Admittance(y))
        } else {
            Err(Error::InvalidParameter {
                field: "termination",
                reason: format!("admittance must be finite and >= 0, got {y}"),
            })
        }
    }
}

/// `(Y1 - Y2) / (Y1 + Y2)`.
pub fn reflection_far(y1: f64, far: Termination) -> f64 {
    match far {
        Termination::Open => 1.0,
        Termination::Short => -1.0,
        Termination::Admittance(y2) => (y1 - y2) / (y1 + y2),
    }
}

/// `2 Y1 / (Y1 + Y2)`.
pub fn transmission_far(y1: f64, far: Termination) -> f64 {
    match far {
        Termination::Open => 2.0,
        Termination::Short => 0.0,
        Termination::Admittance(y2) => 2.0 * y1 / (y1 + y2),
    }
}

fn source_sum(y0: f64, y1: f64) -> Result<f64> {
    let s = y0 + y1;
    if !y0.is_finite() || s.abs() <= f64::EPSILON * y1.abs() {
        return Err(Error::DegenerateSource);
    }
    Ok(s)
}

/// `(Y1 - Y0) / (Y0 + Y1)`, seen by waves returning to the source.
pub fn reflection_source(y0: f64, y1: f64) -> Result<f64> {
    Ok((y1 - y0) / source_sum(y0, y1)?)
}

/// The three first arrivals: transmitted `V0`, immediate reflection `V1'`
/// and the first round trip `V1''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryComponents {
    pub v0: Term,
    pub v1p: Term,
    pub v1pp: Term,
}

pub fn primary_components(sec: &LineSection, y0: f64, far: Termination) -> Result<PrimaryComponents> {
    let y1 = sec.y1;
    let sum = source_sum(y0, y1)?;
    let launch = 2.0 * y0 / sum;
    let t = sec.one_way();
    Ok(PrimaryComponents {
        v0: Term::new(launch * transmission_far(y1, far), t),
        v1p: Term::new((y0 - y1) / sum, 0.0),
        v1pp: Term::new(launch * (2.0 * y1 / sum) * reflection_far(y1, far), 2.0 * t),
    })
}

/// Round-trip factor `Gamma_far * Gamma_src`.
pub fn round_trip(sec: &LineSection, y0: f64, far: Termination) -> Result<f64> {
    Ok(reflection_far(sec.y1, far) * reflection_source(y0, sec.y1)?)
}

/// Far-end voltage after `k_ref` reflections: `floor(k_ref / 2) + 1`
/// arrivals at `(2k + 1) l tau1`.
pub fn far_response(sec: &LineSection, y0: f64, far: Termination, k_ref: usize) -> Result<PulseTrain> {
    let pc = primary_components(sec, y0, far)?;
    let r = round_trip(sec, y0, far)?;
    let t = sec.one_way();
    let mut gain = pc.v0.gain;
    let mut terms = Vec::with_capacity(k_ref / 2 + 1);
    for k in 0..=k_ref / 2 {
        terms.push(Term::new(gain, (2 * k + 1) as f64 * t));
        gain *= r;
    }
    PulseTrain::new(terms)
}

/// Reflected near-end voltage: `V1'`, `V1''` and `floor((k_ref - 1) / 2)`
/// further round trips at `2(k + 1) l tau1`.
pub fn near_response(sec: &LineSection, y0: f64, far: Termination, k_ref: usize) -> Result<PulseTrain> {
    let pc = primary_components(sec, y0, far)?;
    let r = round_trip(sec, y0, far)?;
    let t = sec.one_way();
    let extra = k_ref.saturating_sub(1) / 2;
    let mut terms = Vec::with_capacity(extra + 2);
    terms.push(pc.v1p);
    terms.push(pc.v1pp);
    let mut gain = pc.v1pp.gain;
    for k in 1..=extra {
        gain *= r;
        terms.push(Term::new(gain, 2.0 * (k + 1) as f64 * t));
    }
    PulseTrain::new(terms)
}
