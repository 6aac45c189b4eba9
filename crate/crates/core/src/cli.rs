//! Command-line front end. Exit codes: 0 success, 1 input or validation
//! error, 2 verification failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::equalization::{design_equalized, equalization_report};
use crate::excitation::{write_csv, Waveform};
use crate::modal::{characteristic_impedance_matrix, coupling_coefficient};
use crate::oracle::turn_oracle;
use crate::plot::{parse_csv, render_svg};
use crate::turn::turn_responses;

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const DEFAULT_TOLERANCE: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(name = "meander", version, about = "Pulse response of a meander-line turn")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Even/odd mode parameters from the L and C matrices.
    Extract {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sampled node voltages as CSV.
    Respond {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated subset of v1,v2,v3,v4.
        #[arg(long, default_value = "v1,v2,v3")]
        nodes: String,
    },
    /// Pulse amplitudes and the equalization condition.
    Equalize {
        #[arg(long)]
        config: PathBuf,
        /// Even-mode impedance (Ω) to design an equalized pair for.
        #[arg(long, value_name = "Z_EVEN_OHM")]
        design: Option<f64>,
    },
    /// Compares the closed-form response with the frequency-domain solution.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Largest allowed deviation, as a fraction of the V_in peak.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// SVG chart of a CSV written by `respond`.
    Plot {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Verification(m) => f.write_str(m),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Serialize)]
struct ExtractOut {
    #[serde(rename = "Ze_ohm")]
    ze_ohm: f64,
    #[serde(rename = "Zo_ohm")]
    zo_ohm: f64,
    tau_e_ns_per_m: f64,
    tau_o_ns_per_m: f64,
    k: f64,
    #[serde(rename = "Z11_ohm")]
    z11_ohm: f64,
    #[serde(rename = "Z12_ohm")]
    z12_ohm: f64,
}

#[derive(Serialize)]
struct DesignOut {
    z_even_ohm: f64,
    z_odd_ohm: f64,
    #[serde(rename = "y0_S")]
    y0_s: f64,
    predicted_amplitude: f64,
}

#[derive(Serialize)]
struct EqualizeOut {
    k: f64,
    #[serde(rename = "y0_matched_S")]
    y0_matched_s: f64,
    z0_matched_ohm: f64,
    #[serde(rename = "y0_S")]
    y0_s: f64,
    v_c: f64,
    v_o: f64,
    v_e: f64,
    eq9_residual: f64,
    eq9_applicable: bool,
    separation_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<DesignOut>,
}

#[derive(Serialize)]
struct VerifyOut {
    n_samples: usize,
    dt_s: f64,
    tolerance: f64,
    deviation_v1: f64,
    deviation_v2: f64,
    deviation_v3: f64,
    pass: bool,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain structs serialize")
}

/// Runs one command, writing its report to `out`.
pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Extract { config } => {
            let cfg = RunConfig::load(config).map_err(input)?;
            if !cfg.from_matrices {
                return Err(CliError::Input(
                    "L_nH_per_m: extract needs the L_nH_per_m and C_pF_per_m matrices".into(),
                ));
            }
            let m = cfg.modal;
            let z = characteristic_impedance_matrix(&m);
            let rep = ExtractOut {
                ze_ohm: m.z_even(),
                zo_ohm: m.z_odd(),
                tau_e_ns_per_m: m.tau_even * 1e9,
                tau_o_ns_per_m: m.tau_odd * 1e9,
                k: coupling_coefficient(&m),
                z11_ohm: z.m11(),
                z12_ohm: z.m12(),
            };
            writeln!(out, "{}", to_json(&rep)).map_err(input)
        }
        Command::Respond { config, out: path, nodes } => {
            let cfg = RunConfig::load(config).map_err(input)?;
            let turn = cfg.turn_config().map_err(input)?;
            let grid = cfg.grid(&turn).map_err(input)?;
            let r = turn_responses(&turn).map_err(input)?;
            let mut cols: Vec<(&str, Waveform)> = Vec::new();
            for name in nodes.split(',').map(str::trim) {
                let (label, train) = match name.to_ascii_lowercase().as_str() {
                    "v1" => ("V1", &r.v1),
                    "v2" => ("V2", &r.v2),
                    "v3" => ("V3", &r.v3),
                    "v4" => ("V4", &r.v4),
                    other => return Err(CliError::Input(format!("--nodes: unknown node {other:?}"))),
                };
                let w = crate::excitation::sample_train(train, &turn.excitation, grid.t0, grid.dt, grid.n)
                    .map_err(input)?;
                cols.push((label, w));
            }
            let refs: Vec<(&str, &Waveform)> = cols.iter().map(|(n, w)| (*n, w)).collect();
            let mut buf = Vec::new();
            write_csv(&mut buf, &refs).map_err(input)?;
            std::fs::write(path, buf).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
        }
        Command::Equalize { config, design } => {
            let cfg = RunConfig::load(config).map_err(input)?;
            let length = cfg.require_length().map_err(input)?;
            let y0 = match cfg.y0 {
                Some(crate::config::TerminalAdmittance::Value(y)) => Some(y),
                _ => None,
            };
            let rep = equalization_report(&cfg.modal, y0, length, cfg.excitation.duration());
            let design = design
                .map(|ze| {
                    design_equalized(ze)
                        .map(|d| DesignOut {
                            z_even_ohm: ze,
                            z_odd_ohm: d.z_odd,
                            y0_s: d.y0,
                            predicted_amplitude: d.predicted_amplitude,
                        })
                        .map_err(|e| CliError::Input(format!("--design: {e}")))
                })
                .transpose()?;
            let o = EqualizeOut {
                k: rep.k,
                y0_matched_s: rep.y0_matched,
                z0_matched_ohm: 1.0 / rep.y0_matched,
                y0_s: rep.y0,
                v_c: rep.amplitudes.v_c,
                v_o: rep.amplitudes.v_o,
                v_e: rep.amplitudes.v_e,
                eq9_residual: rep.eq9_residual,
                eq9_applicable: rep.eq9_applicable,
                separation_ok: rep.separation_ok,
                design,
            };
            writeln!(out, "{}", to_json(&o)).map_err(input)
        }
        Command::Verify { config, tolerance } => {
            if !(tolerance.is_finite() && *tolerance > 0.0) {
                return Err(CliError::Input(format!("--tolerance: must be positive, got {tolerance}")));
            }
            let cfg = RunConfig::load(config).map_err(input)?;
            let turn = cfg.turn_config().map_err(input)?;
            let oc = cfg.oracle_config(&turn).map_err(input)?;
            let oracle = turn_oracle(&turn, &oc).map_err(input)?;
            let analytic = turn_responses(&turn)
                .and_then(|r| r.sample(&turn.excitation, 0.0, oc.dt, oc.n_samples))
                .map_err(input)?;
            let peak = turn.excitation.vin_peak();
            let dev: Vec<f64> = analytic
                .iter()
                .zip(oracle.as_array())
                .map(|(a, o)| a.max_abs_diff(o).expect("shared grid") / peak)
                .collect();
            let pass = dev.iter().all(|d| *d <= *tolerance);
            let o = VerifyOut {
                n_samples: oc.n_samples,
                dt_s: oc.dt,
                tolerance: *tolerance,
                deviation_v1: dev[0],
                deviation_v2: dev[1],
                deviation_v3: dev[2],
                pass,
            };
            writeln!(out, "{}", to_json(&o)).map_err(input)?;
            if pass {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "deviation above tolerance {tolerance}: V1 {:.3e}, V2 {:.3e}, V3 {:.3e}",
                    dev[0], dev[1], dev[2]
                )))
            }
        }
        Command::Plot { input: path, out: svg } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let table = parse_csv(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            std::fs::write(svg, render_svg(&table))
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", svg.display())))
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli.command, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
