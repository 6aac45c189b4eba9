//! Excitation pulses, exact delayed-copy responses and sampled waveforms.
//!
//! The source is described by its e.m.f. `E(t)`. Every response in this
//! crate is expressed in terms of the incident voltage `V_in(t) = E(t) / 2`,
//! which is also the unit the normalized amplitudes refer to.

use std::io::{self, Write};

use crate::error::{ensure_positive, Error, Result};

/// Terms closer than this are treated as one arrival.
pub const MERGE_DELAY_S: f64 = 1e-18;
/// Terms with a smaller gain are dropped.
pub const NEGLIGIBLE_GAIN: f64 = 1e-15;

/// Gaussian pulses are truncated at `center ± GAUSSIAN_HALF_SPAN * fwhm`.
pub const GAUSSIAN_HALF_SPAN: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// Starts at t = 0, unit height on the flat top.
    Trapezoid { rise: f64, top: f64, fall: f64 },
    /// Unit peak at `center`.
    Gaussian { fwhm: f64, center: f64 },
    /// Linearly interpolated dimensionless shape, zero outside the grid.
    Samples(Waveform),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSpec {
    shape: PulseShape,
    emf_amplitude: f64,
}

impl ExcitationSpec {
    pub fn new(shape: PulseShape, emf_amplitude: f64) -> Result<Self> {
        if !emf_amplitude.is_finite() || emf_amplitude == 0.0 {
            return Err(Error::InvalidParameter {
                field: "emf_amplitude",
                reason: format!("must be finite and nonzero, got {emf_amplitude}"),
            });
        }
        match &shape {
            PulseShape::Trapezoid { rise, top, fall } => {
                ensure_positive("rise", *rise)?;
                ensure_positive("top", *top)?;
                ensure_positive("fall", *fall)?;
            }
            PulseShape::Gaussian { fwhm, center } => {
                ensure_positive("fwhm", *fwhm)?;
                if !(center.is_finite() && *center >= GAUSSIAN_HALF_SPAN * fwhm) {
                    return Err(Error::InvalidParameter {
                        field: "center",
                        reason: format!(
                            "must be at least {GAUSSIAN_HALF_SPAN} fwhm so the pulse starts at t >= 0"
                        ),
                    });
                }
            }
            PulseShape::Samples(w) => {
                if w.t0() < 0.0 {
                    return Err(Error::InvalidParameter {
                        field: "samples",
                        reason: "grid must start at t >= 0".into(),
                    });
                }
                if w.samples().iter().all(|v| *v == 0.0) {
                    return Err(Error::InvalidParameter {
                        field: "samples",
                        reason: "shape is identically zero".into(),
                    });
                }
            }
        }
        Ok(Self {
            shape,
            emf_amplitude,
        })
    }

    /// Trapezoid 50/100/50 ps with E = 2 V, so that the V_in peak is 1 V.
    pub fn default_trapezoid() -> Self {
        Self {
            shape: PulseShape::Trapezoid {
                rise: 50e-12,
                top: 100e-12,
                fall: 50e-12,
            },
            emf_amplitude: 2.0,
        }
    }

    pub fn shape(&self) -> &PulseShape {
        &self.shape
    }

    pub fn emf_amplitude(&self) -> f64 {
        self.emf_amplitude
    }

    fn unit_shape(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match &self.shape {
            PulseShape::Trapezoid { rise, top, fall } => {
                if t < *rise {
                    t / rise
                } else if t <= rise + top {
                    1.0
                } else if t < rise + top + fall {
                    (rise + top + fall - t) / fall
                } else {
                    0.0
                }
            }
            PulseShape::Gaussian { fwhm, center } => {
                let x = t - center;
                if x.abs() > GAUSSIAN_HALF_SPAN * fwhm {
                    0.0
                } else {
                    (-4.0 * std::f64::consts::LN_2 * x * x / (fwhm * fwhm)).exp()
                }
            }
            PulseShape::Samples(w) => w.interpolate(t),
        }
    }

    /// The e.m.f. `E(t)`.
    pub fn emf(&self, t: f64) -> f64 {
        self.emf_amplitude * self.unit_shape(t)
    }

    /// Pulse length: `rise + top + fall`, `6 * fwhm`, or the sample span.
    pub fn duration(&self) -> f64 {
        match &self.shape {
            PulseShape::Trapezoid { rise, top, fall } => rise + top + fall,
            PulseShape::Gaussian { fwhm, .. } => 2.0 * GAUSSIAN_HALF_SPAN * fwhm,
            PulseShape::Samples(w) => w.t_end() - w.t0(),
        }
    }

    /// Last instant at which the e.m.f. can be nonzero.
    pub fn support_end(&self) -> f64 {
        match &self.shape {
            PulseShape::Trapezoid { .. } => self.duration(),
            PulseShape::Gaussian { fwhm, center } => center + GAUSSIAN_HALF_SPAN * fwhm,
            PulseShape::Samples(w) => w.t_end(),
        }
    }

    /// Shortest edge of the pulse; sampling steps are bounded by a tenth of it.
    /// Gaussian: the 10–90 % rise time. Samples: ten grid steps.
    pub fn rise_time(&self) -> f64 {
        match &self.shape {
            PulseShape::Trapezoid { rise, fall, .. } => rise.min(*fall),
            PulseShape::Gaussian { fwhm, .. } => {
                let at = |level: f64| (level.recip().ln() / (4.0 * std::f64::consts::LN_2)).sqrt();
                fwhm * (at(0.1) - at(0.9))
            }
            PulseShape::Samples(w) => 10.0 * w.dt(),
        }
    }

    /// Largest |V_in| of the pulse.
    pub fn vin_peak(&self) -> f64 {
        let shape_peak = match &self.shape {
            PulseShape::Samples(w) => w.samples().iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            _ => 1.0,
        };
        0.5 * self.emf_amplitude.abs() * shape_peak
    }
}

/// Incident voltage `V_in(t) = E(t) / 2`.
pub fn vin_value(ex: &ExcitationSpec, t: f64) -> f64 {
    0.5 * ex.emf(t)
}

/// One delayed, scaled copy of `V_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub gain: f64,
    pub delay: f64,
}

impl Term {
    pub fn new(gain: f64, delay: f64) -> Self {
        Self { gain, delay }
    }
}

/// A response `sum_i gain_i * V_in(t - delay_i)`, kept sorted by delay with
/// coincident arrivals merged and negligible terms dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseTrain {
    terms: Vec<Term>,
}

impl PulseTrain {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        let mut terms: Vec<Term> = terms.into_iter().collect();
        if let Some(bad) = terms
            .iter()
            .find(|t| !t.gain.is_finite() || !t.delay.is_finite() || t.delay < 0.0)
        {
            return Err(Error::InvalidTerm {
                delay: bad.delay,
                gain: bad.gain,
            });
        }
        terms.sort_by(|a, b| a.delay.total_cmp(&b.delay));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if t.delay - last.delay < MERGE_DELAY_S => last.gain += t.gain,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.gain.abs() >= NEGLIGIBLE_GAIN);
        Ok(Self { terms: merged })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn last_delay(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.delay)
    }

    pub fn gain_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.gain).sum()
    }

    /// Gain of the arrival at `delay`, or 0 if there is none.
    pub fn gain_at(&self, delay: f64) -> f64 {
        self.terms
            .iter()
            .find(|t| (t.delay - delay).abs() < MERGE_DELAY_S)
            .map_or(0.0, |t| t.gain)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.terms.iter().map(|t| Term::new(t.gain * factor, t.delay)))
            .expect("scaling a valid train by a finite factor")
    }

    pub fn shifted(&self, by: f64) -> Result<Self> {
        Self::new(self.terms.iter().map(|t| Term::new(t.gain, t.delay + by)))
    }

    /// Term-by-term comparison. Arrivals missing on one side count as zero
    /// gain, so terms sitting right at the drop threshold are tolerated.
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        let within = |a: f64, b: f64| (a - b).abs() <= rel_tol * a.abs().max(b.abs()) + 2.0 * NEGLIGIBLE_GAIN;
        self.terms.iter().all(|t| within(t.gain, other.gain_at(t.delay)))
            && other.terms.iter().all(|t| within(t.gain, self.gain_at(t.delay)))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let lhs = self.terms.iter().map(|t| Term::new(a * t.gain, t.delay));
        let rhs = other.terms.iter().map(|t| Term::new(b * t.gain, t.delay));
        Self::new(lhs.chain(rhs)).expect("combining valid trains with finite weights")
    }
}

/// Uniformly sampled record.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    t0: f64,
    dt: f64,
    samples: Vec<f64>,
}

impl Waveform {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        ensure_positive("dt", dt)?;
        if !t0.is_finite() {
            return Err(Error::InvalidParameter {
                field: "t0",
                reason: "must be finite".into(),
            });
        }
        if samples.len() < 2 {
            return Err(Error::InvalidParameter {
                field: "samples",
                reason: format!("need at least 2 samples, got {}", samples.len()),
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "samples",
                reason: "all samples must be finite".into(),
            });
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.samples.len() - 1)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.len() == other.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest pointwise |self - other| on a shared grid.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        self.same_grid(other).then(|| {
            self.samples
                .iter()
                .zip(&other.samples)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
        })
    }

    /// Linear interpolation, zero outside `[t0, t_end]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.dt;
        let last = (self.samples.len() - 1) as f64;
        if !(0.0..=last).contains(&x) {
            return 0.0;
        }
        let i = x.floor() as usize;
        if i + 1 >= self.samples.len() {
            return self.samples[self.samples.len() - 1];
        }
        let frac = x - i as f64;
        self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
    }
}

/// Samples `sum_i gain_i * V_in(t - delay_i)` at `t0 + j * dt`, exactly.
pub fn sample_train(
    train: &PulseTrain,
    ex: &ExcitationSpec,
    t0: f64,
    dt: f64,
    n: usize,
) -> Result<Waveform> {
    let samples = (0..n)
        .map(|j| {
            let t = t0 + j as f64 * dt;
            train
                .terms()
                .iter()
                .map(|term| term.gain * vin_value(ex, t - term.delay))
                .sum()
        })
        .collect();
    Waveform::new(t0, dt, samples)
}

/// Signed sample of largest magnitude inside each `[start, end]` window.
pub fn measure_pulse_peaks(w: &Waveform, windows: &[(f64, f64)]) -> Result<Vec<f64>> {
    windows
        .iter()
        .map(|&(start, end)| {
            (0..w.len())
                .filter(|&j| {
                    let t = w.time(j);
                    t >= start && t <= end
                })
                .map(|j| w.samples[j])
                .reduce(|best, v| if v.abs() > best.abs() { v } else { best })
                .ok_or(Error::EmptyWindow { start, end })
        })
        .collect()
}

/// Writes `time_s,<name>_V,...` CSV. All columns must share one grid.
pub fn write_csv<W: Write>(out: &mut W, columns: &[(&str, &Waveform)]) -> io::Result<()> {
    let Some((_, first)) = columns.first() else {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no columns"));
    };
    if columns.iter().any(|(_, w)| !w.same_grid(first)) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "columns are sampled on different grids",
        ));
    }
    write!(out, "time_s")?;
    for (name, _) in columns {
        write!(out, ",{name}_V")?;
    }
    out.write_all(b"\n")?;
    for j in 0..first.len() {
        write!(out, "{}", first.time(j))?;
        for (_, w) in columns {
            write!(out, ",{}", w.samples[j])?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}
