//! JSON run configuration.
//!
//! ```json
//! {
//!   "L_nH_per_m": [390.34, 309.03],
//!   "C_pF_per_m": [232.06, -138.12],
//!   "length_m": 0.05,
//!   "y0_S": "matched",
//!   "k_ref": 20,
//!   "excitation": { "shape": "trapezoid", "rise_ps": 50, "top_ps": 100, "fall_ps": 50, "emf_V": 2 },
//!   "sampling": { "dt_s": 2.5e-12, "t_end_s": 3e-9 },
//!   "oracle": { "n_samples": 16384, "dt_s": 2.5e-12, "settle_margin": 3 }
//! }
//! ```
//!
//! Instead of the two matrices a `"modal"` block with `Ze_ohm`, `Zo_ohm`,
//! `tau_e_ns_per_m` and `tau_o_ns_per_m` may be given. The terminal
//! admittance is either `"y0_S"` (a number or `"matched"`) or `"z0_ohm"`.

use serde::Deserialize;

use crate::error::Error;
use crate::excitation::{ExcitationSpec, PulseShape, Waveform};
use crate::modal::{extract_modal, ModalParameters, SymmetricMatrix2};
use crate::oracle::{OracleConfig, DEFAULT_N_SAMPLES, DEFAULT_SETTLE_MARGIN, DEFAULT_STEPS_PER_RISE, MIN_STEPS_PER_RISE};
use crate::turn::{turn_responses, TurnConfig};

pub const DEFAULT_K_REF: usize = 20;

/// A configuration problem, prefixed with the offending field path.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    fn at(field: &str, err: impl std::fmt::Display) -> Self {
        ConfigError(format!("{field}: {err}"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "L_nH_per_m")]
    l_nh_per_m: Option<[f64; 2]>,
    #[serde(rename = "C_pF_per_m")]
    c_pf_per_m: Option<[f64; 2]>,
    modal: Option<RawModal>,
    length_m: Option<f64>,
    #[serde(rename = "y0_S")]
    y0_s: Option<RawY0>,
    z0_ohm: Option<f64>,
    k_ref: Option<usize>,
    excitation: Option<RawExcitation>,
    sampling: Option<RawSampling>,
    oracle: Option<RawOracle>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModal {
    #[serde(rename = "Ze_ohm")]
    ze_ohm: f64,
    #[serde(rename = "Zo_ohm")]
    zo_ohm: f64,
    tau_e_ns_per_m: f64,
    tau_o_ns_per_m: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawY0 {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
enum RawExcitation {
    Trapezoid {
        rise_ps: f64,
        top_ps: f64,
        fall_ps: f64,
        #[serde(rename = "emf_V")]
        emf_v: f64,
    },
    Gaussian {
        fwhm_ps: f64,
        center_ps: f64,
        #[serde(rename = "emf_V")]
        emf_v: f64,
    },
    Samples {
        t0_ps: f64,
        dt_ps: f64,
        values: Vec<f64>,
        #[serde(rename = "emf_V")]
        emf_v: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    dt_s: Option<f64>,
    t_end_s: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    n_samples: Option<usize>,
    dt_s: Option<f64>,
    settle_margin: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerminalAdmittance {
    Value(f64),
    Matched,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOverrides {
    pub n_samples: Option<usize>,
    pub dt: Option<f64>,
    pub settle_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub modal: ModalParameters,
    /// True when the modal parameters came from L and C matrices.
    pub from_matrices: bool,
    pub length: Option<f64>,
    pub y0: Option<TerminalAdmittance>,
    pub k_ref: usize,
    pub excitation: ExcitationSpec,
    pub sampling_dt: Option<f64>,
    pub sampling_t_end: Option<f64>,
    pub oracle: Option<OracleOverrides>,
}

/// Uniform output grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::at(field, format!("must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "config".to_string() } else { path };
            ConfigError::at(&path, e.into_inner())
        })?;
        Self::from_raw(raw)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let (modal, from_matrices) = match (raw.l_nh_per_m, raw.c_pf_per_m, raw.modal) {
            (Some(l), Some(c), None) => {
                let lm = SymmetricMatrix2::inductance(l[0] * 1e-9, l[1] * 1e-9)
                    .map_err(|e| ConfigError::at("L_nH_per_m", e))?;
                let cm = SymmetricMatrix2::capacitance(c[0] * 1e-12, c[1] * 1e-12)
                    .map_err(|e| ConfigError::at("C_pF_per_m", e))?;
                (extract_modal(&lm, &cm).map_err(|e| ConfigError::at("L_nH_per_m", e))?, true)
            }
            (None, None, Some(m)) => {
                let p = ModalParameters::from_impedances(
                    positive("modal.Ze_ohm", m.ze_ohm)?,
                    positive("modal.Zo_ohm", m.zo_ohm)?,
                    positive("modal.tau_e_ns_per_m", m.tau_e_ns_per_m)? * 1e-9,
                    positive("modal.tau_o_ns_per_m", m.tau_o_ns_per_m)? * 1e-9,
                )
                .map_err(|e| ConfigError::at("modal", e))?;
                (p, false)
            }
            (Some(_), None, None) => return Err(ConfigError::at("C_pF_per_m", "missing (L_nH_per_m given)")),
            (None, Some(_), None) => return Err(ConfigError::at("L_nH_per_m", "missing (C_pF_per_m given)")),
            (None, None, None) => {
                return Err(ConfigError::at("config", "need either L_nH_per_m + C_pF_per_m or modal"))
            }
            _ => return Err(ConfigError::at("modal", "give either the matrices or the modal block, not both")),
        };

        let length = raw.length_m.map(|l| positive("length_m", l)).transpose()?;

        let y0 = match (raw.y0_s, raw.z0_ohm) {
            (Some(_), Some(_)) => return Err(ConfigError::at("z0_ohm", "give either y0_S or z0_ohm, not both")),
            (Some(RawY0::Value(y)), None) => Some(TerminalAdmittance::Value(positive("y0_S", y)?)),
            (Some(RawY0::Keyword(k)), None) if k == "matched" => Some(TerminalAdmittance::Matched),
            (Some(RawY0::Keyword(k)), None) => {
                return Err(ConfigError::at("y0_S", format!("expected a number or \"matched\", got \"{k}\"")))
            }
            (None, Some(z)) => Some(TerminalAdmittance::Value(1.0 / positive("z0_ohm", z)?)),
            (None, None) => None,
        };

        let k_ref = raw.k_ref.unwrap_or(DEFAULT_K_REF);
        if k_ref < 2 {
            return Err(ConfigError::at("k_ref", format!("must be at least 2, got {k_ref}")));
        }

        let excitation = match raw.excitation {
            None => ExcitationSpec::default_trapezoid(),
            Some(RawExcitation::Trapezoid {
                rise_ps,
                top_ps,
                fall_ps,
                emf_v,
            }) => ExcitationSpec::new(
                PulseShape::Trapezoid {
                    rise: rise_ps * 1e-12,
                    top: top_ps * 1e-12,
                    fall: fall_ps * 1e-12,
                },
                emf_v,
            )
            .map_err(|e| ConfigError::at("excitation", e))?,
            Some(RawExcitation::Gaussian {
                fwhm_ps,
                center_ps,
                emf_v,
            }) => ExcitationSpec::new(
                PulseShape::Gaussian {
                    fwhm: fwhm_ps * 1e-12,
                    center: center_ps * 1e-12,
                },
                emf_v,
            )
            .map_err(|e| ConfigError::at("excitation", e))?,
            Some(RawExcitation::Samples {
                t0_ps,
                dt_ps,
                values,
                emf_v,
            }) => {
                let w = Waveform::new(t0_ps * 1e-12, dt_ps * 1e-12, values)
                    .map_err(|e| ConfigError::at("excitation.values", e))?;
                ExcitationSpec::new(PulseShape::Samples(w), emf_v).map_err(|e| ConfigError::at("excitation", e))?
            }
        };

        let max_dt = excitation.rise_time() / MIN_STEPS_PER_RISE;
        let (sampling_dt, sampling_t_end) = match raw.sampling {
            None => (None, None),
            Some(s) => {
                let dt = s.dt_s.map(|v| positive("sampling.dt_s", v)).transpose()?;
                if let Some(dt) = dt {
                    if dt > max_dt {
                        return Err(ConfigError::at(
                            "sampling.dt_s",
                            format!("{dt} s is coarser than rise/10 = {max_dt} s"),
                        ));
                    }
                }
                (dt, s.t_end_s.map(|v| positive("sampling.t_end_s", v)).transpose()?)
            }
        };

        let oracle = raw
            .oracle
            .map(|o| -> Result<OracleOverrides, ConfigError> {
                if let Some(n) = o.n_samples {
                    if n < 1024 || !n.is_power_of_two() {
                        return Err(ConfigError::at(
                            "oracle.n_samples",
                            format!("must be a power of two >= 1024, got {n}"),
                        ));
                    }
                }
                let dt = o.dt_s.map(|v| positive("oracle.dt_s", v)).transpose()?;
                if let Some(dt) = dt {
                    if dt > max_dt {
                        return Err(ConfigError::at(
                            "oracle.dt_s",
                            format!("{dt} s is coarser than rise/10 = {max_dt} s"),
                        ));
                    }
                }
                Ok(OracleOverrides {
                    n_samples: o.n_samples,
                    dt,
                    settle_margin: o.settle_margin.map(|v| positive("oracle.settle_margin", v)).transpose()?,
                })
            })
            .transpose()?;

        if !modal.is_microstrip_like() {
            eprintln!("warning: odd-mode admittance is below the even-mode one; check matrix column order");
        }

        Ok(Self {
            modal,
            from_matrices,
            length,
            y0,
            k_ref,
            excitation,
            sampling_dt,
            sampling_t_end,
            oracle,
        })
    }

    pub fn require_length(&self) -> Result<f64, ConfigError> {
        self.length.ok_or_else(|| ConfigError::at("length_m", "required for this command"))
    }

    /// Terminal admittance; `"matched"` and a missing entry resolve to
    /// `sqrt(Ye * Yo)`.
    pub fn y0_value(&self) -> f64 {
        match self.y0 {
            Some(TerminalAdmittance::Value(y)) => y,
            Some(TerminalAdmittance::Matched) | None => crate::equalization::matched_admittance(&self.modal),
        }
    }

    pub fn turn_config(&self) -> Result<TurnConfig, ConfigError> {
        let length = self.require_length()?;
        TurnConfig::new(self.modal, length, self.y0_value(), self.k_ref, self.excitation.clone())
            .map_err(|e| ConfigError::at("config", e))
    }

    /// Output grid: `dt` defaults to rise/20, `t_end` to the last arrival
    /// plus the pulse support.
    pub fn grid(&self, turn: &TurnConfig) -> Result<Grid, ConfigError> {
        let dt = self
            .sampling_dt
            .unwrap_or(turn.excitation.rise_time() / DEFAULT_STEPS_PER_RISE);
        let t_end = match self.sampling_t_end {
            Some(t) => t,
            None => {
                let last = turn_responses(turn).map_err(|e| ConfigError::at("config", e))?.last_delay();
                last + turn.excitation.support_end()
            }
        };
        let n = (t_end / dt).round() as usize + 1;
        Ok(Grid { t0: 0.0, dt, n: n.max(2) })
    }

    /// Oracle settings: explicit overrides are validated as given, otherwise
    /// the defaults grow the sample count until the window is long enough.
    pub fn oracle_config(&self, turn: &TurnConfig) -> Result<OracleConfig, ConfigError> {
        let wrap = |e: Error| ConfigError::at("oracle", e);
        match self.oracle {
            None => OracleConfig::sized_for(turn).map_err(wrap),
            Some(o) => {
                let d = OracleConfig::default_for(turn);
                let oc = OracleConfig::new(
                    o.n_samples.unwrap_or(DEFAULT_N_SAMPLES),
                    o.dt.unwrap_or(d.dt),
                    o.settle_margin.unwrap_or(DEFAULT_SETTLE_MARGIN),
                )
                .map_err(wrap)?;
                oc.check(turn).map_err(wrap)?;
                Ok(oc)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER: &str = r#"{
        "L_nH_per_m": [390.34, 309.03],
        "C_pF_per_m": [232.06, -138.12],
        "length_m": 0.05,
        "y0_S": "matched",
        "k_ref": 20
    }"#;

    #[test]
    fn loads_matrix_config() {
        let c = RunConfig::from_json(PAPER).unwrap();
        assert!(c.from_matrices);
        assert!((c.modal.z_odd() - 14.8211).abs() < 2e-3);
        assert_eq!(c.y0, Some(TerminalAdmittance::Matched));
        assert!((c.y0_value() - 0.027964).abs() < 1e-6);
        assert_eq!(c.excitation, ExcitationSpec::default_trapezoid());
        let t = c.turn_config().unwrap();
        let g = c.grid(&t).unwrap();
        assert!((g.dt - 2.5e-12).abs() < 1e-24);
        assert!(g.n > 100);
    }

    #[test]
    fn loads_modal_block_and_z0() {
        let c = RunConfig::from_json(
            r#"{"modal": {"Ze_ohm": 50, "Zo_ohm": 50, "tau_e_ns_per_m": 5, "tau_o_ns_per_m": 5},
                "z0_ohm": 50, "length_m": 0.1,
                "excitation": {"shape": "gaussian", "fwhm_ps": 40, "center_ps": 120, "emf_V": 1}}"#,
        )
        .unwrap();
        assert!(!c.from_matrices);
        assert!((c.y0_value() - 0.02).abs() < 1e-17);
        assert_eq!(c.k_ref, DEFAULT_K_REF);
    }

    fn err(text: &str) -> String {
        RunConfig::from_json(text).unwrap_err().0
    }

    #[test]
    fn field_paths_in_errors() {
        assert!(err(r#"{"L_nH_per_m": [390.34, 309.03], "C_pF_per_m": [100, -120]}"#).starts_with("C_pF_per_m"));
        assert!(err(r#"{"L_nH_per_m": [390.34, 309.03]}"#).starts_with("C_pF_per_m"));
        assert!(err(r#"{"modal": {"Ze_ohm": -1, "Zo_ohm": 5, "tau_e_ns_per_m": 5, "tau_o_ns_per_m": 5}}"#)
            .starts_with("modal.Ze_ohm"));
        let base = r#""modal": {"Ze_ohm": 50, "Zo_ohm": 50, "tau_e_ns_per_m": 5, "tau_o_ns_per_m": 5}"#;
        assert!(err(&format!(r#"{{{base}, "y0_S": 0.02, "z0_ohm": 50}}"#)).starts_with("z0_ohm"));
        assert!(err(&format!(r#"{{{base}, "y0_S": "auto"}}"#)).starts_with("y0_S"));
        assert!(err(&format!(r#"{{{base}, "k_ref": 1}}"#)).starts_with("k_ref"));
        assert!(err(&format!(r#"{{{base}, "sampling": {{"dt_s": 1e-11}}}}"#)).starts_with("sampling.dt_s"));
        assert!(err(&format!(r#"{{{base}, "oracle": {{"n_samples": 1000}}}}"#)).starts_with("oracle.n_samples"));
        assert!(err(&format!(r#"{{{base}, "excitation": {{"shape": "trapezoid", "rise_ps": 0, "top_ps": 1, "fall_ps": 1, "emf_V": 1}}}}"#))
            .starts_with("excitation"));
        assert!(err(&format!(r#"{{{base}, "length_m": "long"}}"#)).starts_with("length_m"));
        assert!(err(&format!(r#"{{{base}, "bogus": 1}}"#)).contains("bogus"));
    }

    #[test]
    fn length_is_required_for_turn() {
        let c = RunConfig::from_json(
            r#"{"modal": {"Ze_ohm": 50, "Zo_ohm": 40, "tau_e_ns_per_m": 5, "tau_o_ns_per_m": 5}}"#,
        )
        .unwrap();
        assert!(c.turn_config().unwrap_err().0.starts_with("length_m"));
    }

    #[test]
    fn oracle_window_grows_by_default_and_is_checked_when_given() {
        let c = RunConfig::from_json(PAPER).unwrap();
        let t = c.turn_config().unwrap();
        let oc = c.oracle_config(&t).unwrap();
        assert!(oc.window() >= crate::oracle::required_window(&t, 3.0).unwrap());

        let mut long = c.clone();
        long.length = Some(2.0);
        let t = long.turn_config().unwrap();
        assert!(long.oracle_config(&t).unwrap().n_samples > DEFAULT_N_SAMPLES);
        long.oracle = Some(OracleOverrides {
            n_samples: Some(1024),
            dt: None,
            settle_margin: None,
        });
        assert!(long.oracle_config(&t).unwrap_err().0.starts_with("oracle"));
    }
}
