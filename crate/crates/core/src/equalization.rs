//! Amplitudes of the three pulses a turn splits an input pulse into, and the
//! conditions that make them equal.
//!
//! At the passive conductor's near end the first three arrivals are the
//! crosstalk pulse (delay 0), the odd-mode pulse (`2 l tau_odd`) and the
//! even-mode pulse (`2 l tau_even`). All amplitudes are normalized to the
//! `V_in` peak.

use crate::error::{ensure_positive, Result};
use crate::modal::{coupling_coefficient, ModalParameters};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseAmplitudes {
    pub v_c: f64,
    pub v_o: f64,
    pub v_e: f64,
}

impl PulseAmplitudes {
    pub fn as_array(&self) -> [f64; 3] {
        [self.v_c, self.v_o, self.v_e]
    }

    /// (max - min) / max|v| over the three pulses.
    pub fn spread(&self) -> f64 {
        let a = self.as_array();
        let max = a.iter().cloned().fold(f64::MIN, f64::max);
        let min = a.iter().cloned().fold(f64::MAX, f64::min);
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            0.0
        } else {
            (max - min) / scale
        }
    }
}

pub fn pulse_amplitudes(modal: &ModalParameters, y0: f64) -> PulseAmplitudes {
    let (ye, yo) = (modal.y_even, modal.y_odd);
    PulseAmplitudes {
        v_c: y0 * (yo - ye) / ((yo + y0) * (ye + y0)),
        v_o: 2.0 * y0 * yo / ((yo + y0) * (yo + y0)),
        v_e: 2.0 * y0 * ye / ((ye + y0) * (ye + y0)),
    }
}

/// Terminal admittance that equalizes the odd- and even-mode pulses.
pub fn matched_admittance(modal: &ModalParameters) -> f64 {
    (modal.y_even * modal.y_odd).sqrt()
}

/// Condition for equal crosstalk and odd-mode pulses, written as
/// `(Yo - 3 Ye) / Y0 - Ye / Yo - 1`; zero exactly when `v_c == v_o`.
pub fn crosstalk_odd_residual(modal: &ModalParameters, y0: f64) -> f64 {
    let (ye, yo) = (modal.y_even, modal.y_odd);
    (yo - 3.0 * ye) / y0 - ye / yo - 1.0
}

/// `k^3 - k^2 - 3k - 1`: the crosstalk/odd equality under the matching
/// condition, in terms of the coupling coefficient.
pub fn equalization_cubic(k: f64) -> f64 {
    ((k - 1.0) * k - 3.0) * k - 1.0
}

fn polish(mut k: f64) -> f64 {
    for _ in 0..3 {
        let p = equalization_cubic(k);
        let dp = (3.0 * k - 2.0) * k - 3.0;
        if p == 0.0 || dp == 0.0 {
            break;
        }
        k -= p / dp;
    }
    k
}

/// Roots of [`equalization_cubic`], ascending. It factors as
/// `(k + 1)(k^2 - 2k - 1)`, so the roots are `-1` and `1 ± sqrt 2`.
pub fn equalization_cubic_roots() -> [f64; 3] {
    let s = std::f64::consts::SQRT_2;
    [polish(-1.0), polish(1.0 - s), polish(1.0 + s)]
}

/// The only root above 1, i.e. the coupling coefficient that equalizes all
/// three pulses under the matching condition.
pub fn physical_root() -> f64 {
    equalization_cubic_roots()
        .into_iter()
        .find(|k| *k > 1.0)
        .expect("cubic has a root above 1")
}

/// Amplitude of the three equal pulses at coupling `k`: `(k - 1) / (k + 1)`.
pub fn normalized_equal_amplitude(k: f64) -> f64 {
    (k - 1.0) / (k + 1.0)
}

/// True when the crosstalk, odd and even pulses arrive far enough apart to be
/// seen as separate peaks.
pub fn check_separation(modal: &ModalParameters, length: f64, pulse_duration: f64) -> bool {
    let first = modal.tau_odd.min(modal.tau_even);
    let gap = (modal.tau_even - modal.tau_odd).abs();
    if gap == 0.0 {
        return false;
    }
    (2.0 * length * first).min(2.0 * length * gap) > pulse_duration
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualizedDesign {
    pub z_odd: f64,
    pub y0: f64,
    pub predicted_amplitude: f64,
}

/// Odd-mode impedance and terminal admittance that equalize all three
/// pulses for a given even-mode impedance.
pub fn design_equalized(z_even: f64) -> Result<EqualizedDesign> {
    ensure_positive("z_even", z_even)?;
    let k = physical_root();
    let z_odd = z_even / (k * k);
    Ok(EqualizedDesign {
        z_odd,
        y0: 1.0 / (z_even * z_odd).sqrt(),
        predicted_amplitude: normalized_equal_amplitude(k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualizationReport {
    pub k: f64,
    pub y0_matched: f64,
    /// Admittance the amplitudes were evaluated at.
    pub y0: f64,
    pub amplitudes: PulseAmplitudes,
    pub eq9_residual: f64,
    /// False for an uncoupled pair (k = 1), where there is nothing to split.
    pub eq9_applicable: bool,
    pub separation_ok: bool,
}

/// Report at `y0`, or at the matched admittance when `y0` is `None`.
pub fn equalization_report(
    modal: &ModalParameters,
    y0: Option<f64>,
    length: f64,
    pulse_duration: f64,
) -> EqualizationReport {
    let y0_matched = matched_admittance(modal);
    let y0 = y0.unwrap_or(y0_matched);
    let k = coupling_coefficient(modal);
    EqualizationReport {
        k,
        y0_matched,
        y0,
        amplitudes: pulse_amplitudes(modal, y0),
        eq9_residual: crosstalk_odd_residual(modal, y0),
        eq9_applicable: modal.y_odd > modal.y_even,
        separation_ok: check_separation(modal, length, pulse_duration),
    }
}
