#![allow(dead_code)]

use meander_core::bounce::{reflection_source, transmission_far, Termination};
use meander_core::excitation::{ExcitationSpec, PulseShape};
use meander_core::modal::ModalParameters;
use meander_core::oracle::{required_window, OracleConfig};
use meander_core::turn::TurnConfig;
use rand::Rng;

pub const MAX_SOURCE_REFLECTION: f64 = 0.9;
pub const MAX_TAIL: f64 = 1e-3;

/// Upper bound on the node-level contribution of every arrival the series
/// drops, relative to the V_in peak.
pub fn truncated_tail(modal: &ModalParameters, y0: f64, k_ref: usize) -> f64 {
    let near_kept = k_ref.saturating_sub(1) / 2;
    let far_kept = k_ref / 2;
    let mut worst = 0.0_f64;
    for (y, far) in [(modal.y_even, Termination::Open), (modal.y_odd, Termination::Short)] {
        let g = reflection_source(y0, y).unwrap().abs();
        let launch = 2.0 * y0 / (y0 + y);
        let first_round = launch * 2.0 * y / (y0 + y);
        let near = 0.5 * first_round * g.powi(near_kept as i32 + 1) / (1.0 - g);
        let far = 0.5 * launch * transmission_far(y, far).abs() * g.powi(far_kept as i32 + 1) / (1.0 - g);
        worst = worst.max(near).max(far);
    }
    worst
}

/// Smallest reflection count whose dropped tail is below `MAX_TAIL`.
pub fn k_ref_for(modal: &ModalParameters, y0: f64) -> usize {
    (2..).find(|k| truncated_tail(modal, y0, *k) < MAX_TAIL).unwrap()
}

fn random_excitation<R: Rng>(rng: &mut R) -> ExcitationSpec {
    let emf = rng.gen_range(0.5..5.0) * if rng.gen_bool(0.2) { -1.0 } else { 1.0 };
    if rng.gen_bool(0.6) {
        let rise = rng.gen_range(30e-12..120e-12);
        ExcitationSpec::new(
            PulseShape::Trapezoid {
                rise,
                top: rng.gen_range(20e-12..200e-12),
                fall: rise * rng.gen_range(1.0..2.0),
            },
            emf,
        )
        .unwrap()
    } else {
        let fwhm = rng.gen_range(30e-12..150e-12);
        ExcitationSpec::new(PulseShape::Gaussian { fwhm, center: 3.0 * fwhm }, emf).unwrap()
    }
}

/// A turn whose source reflection is at most 0.9 in both modes, whose
/// series keeps all but a 0.1 % tail, and which fits the default oracle
/// window of 2^14 samples.
pub fn random_turn<R: Rng>(rng: &mut R) -> TurnConfig {
    loop {
        let ye = 1.0 / rng.gen_range(30.0..150.0);
        let yo = ye * rng.gen_range(1.0_f64..3.5).powi(2);
        let modal = ModalParameters::new(ye, yo, rng.gen_range(3e-9..9e-9), rng.gen_range(3e-9..9e-9)).unwrap();
        let y0 = 1.0 / rng.gen_range(5.0..200.0);
        let g = reflection_source(y0, ye).unwrap().abs().max(reflection_source(y0, yo).unwrap().abs());
        if g > MAX_SOURCE_REFLECTION {
            continue;
        }
        let k_ref = k_ref_for(&modal, y0);
        let cfg = TurnConfig::new(modal, rng.gen_range(0.005..0.08), y0, k_ref, random_excitation(rng)).unwrap();
        let oc = OracleConfig::default_for(&cfg);
        if oc.window() >= required_window(&cfg, oc.settle_margin).unwrap() {
            return cfg;
        }
    }
}

pub fn paper_modal() -> ModalParameters {
    use meander_core::modal::{extract_modal, SymmetricMatrix2};
    extract_modal(
        &SymmetricMatrix2::inductance(390.34e-9, 309.03e-9).unwrap(),
        &SymmetricMatrix2::capacitance(232.06e-12, -138.12e-12).unwrap(),
    )
    .unwrap()
}
