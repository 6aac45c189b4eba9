//! Node responses of a meander-line turn: a symmetric coupled pair whose
//! conductors are joined at the far end, driven on one conductor by a source
//! with internal admittance `Y0` and loaded by `Y0` on the other.
//!
//! Node 1 and node 2 are the near ends of the active and passive conductors,
//! nodes 3 and 4 their far ends. At the joined far end the even mode sees an
//! open circuit and the odd mode a short.
//!
//! Two independent routes compute the same trains: [`coupled_node_responses`]
//! superposes per-mode bounce trains, [`turn_responses`] evaluates the
//! turn-specific closed forms directly.

use crate::bounce::{far_response, near_response, LineSection, Termination};
use crate::error::{ensure_positive, Error, Result};
use crate::excitation::{sample_train, ExcitationSpec, PulseTrain, Term, Waveform};
use crate::modal::ModalParameters;

#[derive(Debug, Clone, PartialEq)]
pub struct TurnConfig {
    pub modal: ModalParameters,
    /// m
    pub length: f64,
    /// Source internal admittance, equal to the load admittance, S.
    pub y0: f64,
    /// Number of reflections kept in the series, at least 2.
    pub k_ref: usize,
    pub excitation: ExcitationSpec,
}

impl TurnConfig {
    pub fn new(
        modal: ModalParameters,
        length: f64,
        y0: f64,
        k_ref: usize,
        excitation: ExcitationSpec,
    ) -> Result<Self> {
        ensure_positive("length", length)?;
        ensure_positive("y0", y0)?;
        if k_ref < 2 {
            return Err(Error::InvalidParameter {
                field: "k_ref",
                reason: format!("must be at least 2, got {k_ref}"),
            });
        }
        Ok(Self {
            modal,
            length,
            y0,
            k_ref,
            excitation,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeResponses {
    pub v1: PulseTrain,
    pub v2: PulseTrain,
    pub v3: PulseTrain,
    pub v4: PulseTrain,
}

impl NodeResponses {
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        self.v1.approx_eq(&other.v1, rel_tol)
            && self.v2.approx_eq(&other.v2, rel_tol)
            && self.v3.approx_eq(&other.v3, rel_tol)
            && self.v4.approx_eq(&other.v4, rel_tol)
    }

    pub fn last_delay(&self) -> f64 {
        [&self.v1, &self.v2, &self.v3, &self.v4]
            .iter()
            .map(|t| t.last_delay())
            .fold(0.0, f64::max)
    }

    /// Samples nodes 1–3 on `t0 + j * dt`.
    pub fn sample(&self, ex: &ExcitationSpec, t0: f64, dt: f64, n: usize) -> Result<[Waveform; 3]> {
        Ok([
            sample_train(&self.v1, ex, t0, dt, n)?,
            sample_train(&self.v2, ex, t0, dt, n)?,
            sample_train(&self.v3, ex, t0, dt, n)?,
        ])
    }
}

/// Half-sum / half-difference of the per-mode bounce trains.
pub fn coupled_node_responses(
    modal: &ModalParameters,
    y0: f64,
    far_even: Termination,
    far_odd: Termination,
    length: f64,
    k_ref: usize,
) -> Result<NodeResponses> {
    let even = LineSection::new(modal.y_even, modal.tau_even, length)?;
    let odd = LineSection::new(modal.y_odd, modal.tau_odd, length)?;
    let near_e = near_response(&even, y0, far_even, k_ref)?;
    let near_o = near_response(&odd, y0, far_odd, k_ref)?;
    let far_e = far_response(&even, y0, far_even, k_ref)?;
    let far_o = far_response(&odd, y0, far_odd, k_ref)?;
    Ok(NodeResponses {
        v1: near_e.combine(0.5, &near_o, 0.5),
        v2: near_e.combine(0.5, &near_o, -0.5),
        v3: far_e.combine(0.5, &far_o, 0.5),
        v4: far_e.combine(0.5, &far_o, -0.5),
    })
}

/// Closed-form node trains of the turn.
pub fn turn_responses(cfg: &TurnConfig) -> Result<NodeResponses> {
    let ModalParameters {
        y_even: ye,
        y_odd: yo,
        tau_even,
        tau_odd,
    } = cfg.modal;
    let y0 = cfg.y0;
    let te = cfg.length * tau_even;
    let to = cfg.length * tau_odd;
    // Highest index of the near-end and far-end sums.
    let near_max = cfg.k_ref.saturating_sub(1) / 2 + 1;
    let far_max = cfg.k_ref / 2 + 1;

    // Even mode sees an open far end, odd mode a short one.
    let re = (y0 - ye) / (ye + y0);
    let ro = (y0 - yo) / (yo + y0);
    let even_round = 2.0 * y0 * ye / ((ye + y0) * (ye + y0));
    let odd_round = 2.0 * y0 * yo / ((yo + y0) * (yo + y0));

    let crosstalk = |odd_sign: f64| Term::new(0.5 * (re + odd_sign * ro), 0.0);
    let even_terms = (1..=near_max).map(|i| {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        Term::new(sign * even_round * re.powi(i as i32 - 1), 2.0 * te * i as f64)
    });
    let odd_terms = (1..=near_max).map(|i| Term::new(odd_round * ro.powi(i as i32 - 1), 2.0 * to * i as f64));

    let v1 = PulseTrain::new(
        std::iter::once(crosstalk(1.0))
            .chain(even_terms.clone())
            .chain(odd_terms.clone().map(|t| Term::new(-t.gain, t.delay))),
    )?;
    let v2 = PulseTrain::new(std::iter::once(crosstalk(-1.0)).chain(even_terms).chain(odd_terms))?;

    let through = 2.0 * y0 / (ye + y0);
    let v3 = PulseTrain::new((1..=far_max).map(|i| {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        Term::new(sign * through * re.powi(i as i32 - 1), te * (2 * i - 1) as f64)
    }))?;

    Ok(NodeResponses {
        v1,
        v2,
        v4: v3.clone(),
        v3,
    })
}
