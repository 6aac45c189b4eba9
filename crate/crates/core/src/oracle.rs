//! Frequency-domain reference solution of the turn.
//!
//! Each mode is treated as a lossless line of characteristic admittance
//! `Y_mode` driven by the e.m.f. through `Y0` and terminated at the far end
//! (even mode: open, odd mode: short). Node voltages follow from the
//! line's input admittance and its voltage transfer; no reflection series
//! is involved. The e.m.f. is sampled, transformed, multiplied by the
//! per-bin transfer functions and transformed back.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::bounce::Termination;
use crate::error::{Error, Result};
use crate::excitation::{vin_value, Waveform};
use crate::turn::{turn_responses, TurnConfig};

pub const DEFAULT_N_SAMPLES: usize = 1 << 14;
pub const DEFAULT_SETTLE_MARGIN: f64 = 3.0;
/// Default time step as a fraction of the excitation rise time.
pub const DEFAULT_STEPS_PER_RISE: f64 = 20.0;
/// Coarsest allowed time step as a fraction of the rise time.
pub const MIN_STEPS_PER_RISE: f64 = 10.0;
/// Largest tolerated imaginary part after the inverse transform, relative
/// to the real peak.
pub const MAX_IMAG_RESIDUE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub n_samples: usize,
    pub dt: f64,
    /// Window length must be at least this many times the span of the
    /// analytic response.
    pub settle_margin: f64,
}

impl OracleConfig {
    pub fn new(n_samples: usize, dt: f64, settle_margin: f64) -> Result<Self> {
        if n_samples < 1024 || !n_samples.is_power_of_two() {
            return Err(Error::InvalidParameter {
                field: "n_samples",
                reason: format!("must be a power of two >= 1024, got {n_samples}"),
            });
        }
        crate::error::ensure_positive("dt", dt)?;
        crate::error::ensure_positive("settle_margin", settle_margin)?;
        Ok(Self {
            n_samples,
            dt,
            settle_margin,
        })
    }

    /// `2^14` samples at a twentieth of the rise time, margin 3.
    pub fn default_for(cfg: &TurnConfig) -> Self {
        Self {
            n_samples: DEFAULT_N_SAMPLES,
            dt: cfg.excitation.rise_time() / DEFAULT_STEPS_PER_RISE,
            settle_margin: DEFAULT_SETTLE_MARGIN,
        }
    }

    /// Like [`OracleConfig::default_for`], doubling the sample count until
    /// the window is long enough.
    pub fn sized_for(cfg: &TurnConfig) -> Result<Self> {
        let mut oc = Self::default_for(cfg);
        let need = required_window(cfg, oc.settle_margin)?;
        while (oc.n_samples as f64) * oc.dt < need {
            oc.n_samples *= 2;
        }
        Ok(oc)
    }

    pub fn window(&self) -> f64 {
        self.n_samples as f64 * self.dt
    }

    pub fn check(&self, cfg: &TurnConfig) -> Result<()> {
        let max_dt = cfg.excitation.rise_time() / MIN_STEPS_PER_RISE;
        if self.dt > max_dt {
            return Err(Error::InvalidParameter {
                field: "dt",
                reason: format!("{} s exceeds rise/10 = {max_dt} s", self.dt),
            });
        }
        let required = required_window(cfg, self.settle_margin)?;
        if self.window() < required {
            return Err(Error::WindowTooShort {
                window: self.window(),
                required,
            });
        }
        Ok(())
    }
}

/// `margin * (last arrival of the analytic trains + pulse support)`.
pub fn required_window(cfg: &TurnConfig, margin: f64) -> Result<f64> {
    let last = turn_responses(cfg)?.last_delay();
    Ok(margin * (last + cfg.excitation.support_end()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Near,
    Far,
}

/// Voltage transfer from the e.m.f. to the near or far end of one mode line.
///
/// With `c = cos(beta l)`, `s = sin(beta l)` and a load `Y2`, the input
/// admittance is `Ym (Y2 c + j Ym s) / (Ym c + j Y2 s)`, the near-end
/// voltage divides as `Y0 / (Y0 + Y_in)`, and the far end carries
/// `Ym / (Ym c + j Y2 s)` times the near-end voltage.
pub fn mode_transfer(
    y0: f64,
    y_mode: f64,
    tau_mode: f64,
    length: f64,
    far: Termination,
    node: Node,
    f: f64,
) -> Result<Complex64> {
    let j = Complex64::i();
    let bl = 2.0 * PI * f * tau_mode * length;
    let (s, c) = bl.sin_cos();
    let (num_near, num_far, den, scale) = match far {
        Termination::Short => {
            // Y2 -> infinity after dividing through by Y2.
            let a = j * (y0 * s);
            (a, Complex64::new(0.0, 0.0), a + y_mode * c, y0 + y_mode)
        }
        Termination::Open => {
            let a = Complex64::new(y0 * c, 0.0);
            (a, Complex64::new(y0, 0.0), a + j * (y_mode * s), y0 + y_mode)
        }
        Termination::Admittance(y2) => {
            let a = y0 * (y_mode * c + j * (y2 * s));
            let b = y_mode * (y2 * c + j * (y_mode * s));
            (a, Complex64::new(y0 * y_mode, 0.0), a + b, (y0 + y_mode) * (y_mode + y2))
        }
    };
    if !(den.norm() > 1e-12 * scale) {
        return Err(Error::ResonancePole { freq: f });
    }
    Ok(match node {
        Node::Near => num_near / den,
        Node::Far => num_far / den,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleWaveforms {
    pub w1: Waveform,
    pub w2: Waveform,
    pub w3: Waveform,
}

impl OracleWaveforms {
    pub fn as_array(&self) -> [&Waveform; 3] {
        [&self.w1, &self.w2, &self.w3]
    }
}

struct Spectral {
    n: usize,
    dt: f64,
    emf: Vec<Complex64>,
    planner: FftPlanner<f64>,
}

impl Spectral {
    /// Real response of one transfer function to the sampled e.m.f.
    fn respond(&mut self, h: impl Fn(f64) -> Result<Complex64>) -> Result<Vec<f64>> {
        let n = self.n;
        let df = 1.0 / (n as f64 * self.dt);
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..=n / 2 {
            let v = self.emf[k] * h(k as f64 * df)?;
            if k == 0 || k == n / 2 {
                spec[k] = Complex64::new(v.re, 0.0);
            } else {
                spec[k] = v;
                spec[n - k] = v.conj();
            }
        }
        self.planner.plan_fft_inverse(n).process(&mut spec);
        let inv = 1.0 / n as f64;
        let peak = spec.iter().fold(0.0_f64, |m, v| m.max(v.re.abs())) * inv;
        let imag = spec.iter().fold(0.0_f64, |m, v| m.max(v.im.abs())) * inv;
        if imag > MAX_IMAG_RESIDUE * peak.max(f64::MIN_POSITIVE) {
            return Err(Error::ComplexResidue {
                residue: imag / peak.max(f64::MIN_POSITIVE),
            });
        }
        Ok(spec.into_iter().map(|v| v.re * inv).collect())
    }
}

/// Node voltages 1–3 of the turn on the grid `j * dt`, `j < n_samples`.
/// Node 1 excludes the incident `V_in`, like the analytic trains.
pub fn turn_oracle(cfg: &TurnConfig, ocfg: &OracleConfig) -> Result<OracleWaveforms> {
    ocfg.check(cfg)?;
    let n = ocfg.n_samples;
    let dt = ocfg.dt;
    let mut emf: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new(cfg.excitation.emf(j as f64 * dt), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut emf);
    let mut sp = Spectral {
        n,
        dt,
        emf,
        planner,
    };

    let m = cfg.modal;
    let (y0, l) = (cfg.y0, cfg.length);
    let even = |node| move |f| mode_transfer(y0, m.y_even, m.tau_even, l, Termination::Open, node, f);
    let odd = |node| move |f| mode_transfer(y0, m.y_odd, m.tau_odd, l, Termination::Short, node, f);

    let near_e = sp.respond(even(Node::Near))?;
    let near_o = sp.respond(odd(Node::Near))?;
    let far_e = sp.respond(even(Node::Far))?;
    let far_o = sp.respond(odd(Node::Far))?;

    let vin: Vec<f64> = (0..n).map(|j| vin_value(&cfg.excitation, j as f64 * dt)).collect();
    let mut w1 = Vec::with_capacity(n);
    let mut w2 = Vec::with_capacity(n);
    let mut w3 = Vec::with_capacity(n);
    for i in 0..n {
        let re = near_e[i] - vin[i];
        let ro = near_o[i] - vin[i];
        w1.push(0.5 * (re + ro));
        w2.push(0.5 * (re - ro));
        w3.push(0.5 * (far_e[i] + far_o[i]));
    }
    Ok(OracleWaveforms {
        w1: Waveform::new(0.0, dt, w1)?,
        w2: Waveform::new(0.0, dt, w2)?,
        w3: Waveform::new(0.0, dt, w3)?,
    })
}
