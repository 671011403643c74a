//! Closed-loop compensation of a single phase; emits the iteration trace
//! with the run summary in the header comments.

use std::path::PathBuf;

use serde::Serialize;

use wva_core::{
    run_servo, trace_csv_header, trace_csv_row, NoiseParams, Scheme, ServoConfig, TrainConfig,
};

use crate::args::{CommonArgs, OutputFormat};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output;

use super::{out_dir, selection_for};

const DEFAULTS: &[(&str, &str)] = &[
    ("scheme", "dwm"),
    ("theta", "1e-3"),
    ("aw", "100"),
    ("phi_min", "1e-6"),
    ("modulator_range", "6.283185307179586"),
    ("gain", "0.5"),
    ("max_iterations", "10000"),
    ("epsilon", "0"),
    ("input_intensity", "1"),
];
const OPTIONAL: &[&str] = &["seed", "settle_tolerance", "noise_alpha", "noise_beta"];

#[derive(Debug, Serialize)]
struct ServoRow {
    iteration: usize,
    phi_hat: f64,
    signal: f64,
    theta_hat_running: f64,
}

#[derive(Debug, Serialize)]
struct ServoSummary {
    converged: bool,
    stalled: bool,
    iterations: usize,
    phi_hat: f64,
    theta_hat: f64,
}

#[derive(Debug, Serialize)]
struct ServoDoc<'a> {
    config: &'a std::collections::BTreeMap<String, String>,
    summary: ServoSummary,
    steps: Vec<ServoRow>,
}

pub fn run(args: &CommonArgs) -> Result<Vec<PathBuf>> {
    let cfg = RunConfig::assemble(args, DEFAULTS, OPTIONAL)?;
    let dir = out_dir(args);
    let format = cfg.format()?;

    let scheme = match cfg.get_str("scheme")? {
        "dwm" => Scheme::Dwm,
        "si" => Scheme::Si,
        other => {
            return Err(CliError::Usage(format!(
                "config key `scheme`: `{other}` is not dwm or si"
            )))
        }
    };
    let theta = cfg.get_f64("theta")?;
    let aw = cfg.get_complex_list("aw")?[0];

    let mut train = TrainConfig::new(theta, selection_for(aw))?;
    train.epsilon = cfg.get_f64("epsilon")?;
    train.input_intensity = cfg.get_f64("input_intensity")?;

    let mut servo = ServoConfig::new(scheme, cfg.get_f64("phi_min")?, cfg.get_f64("modulator_range")?);
    servo.gain = cfg.get_f64("gain")?;
    servo.max_iterations = cfg.get_usize("max_iterations")?;
    servo.settle_tolerance = cfg.get_opt_f64("settle_tolerance")?;

    let alpha = cfg.get_opt_f64("noise_alpha")?;
    let beta = cfg.get_opt_f64("noise_beta")?;
    if alpha.is_some() || beta.is_some() {
        let params = NoiseParams::new(alpha.unwrap_or(0.0), beta.unwrap_or(0.0))?;
        let seed = cfg.get_opt_u64("seed")?.ok_or_else(|| {
            CliError::Usage("seed is required when detector noise is configured".into())
        })?;
        servo.noise = Some((params, seed));
    }

    let trace = run_servo(theta, &train, &servo)?;

    let summary = ServoSummary {
        converged: trace.converged,
        stalled: trace.stalled,
        iterations: trace.iterations,
        phi_hat: trace.phi_hat,
        theta_hat: trace.theta_hat,
    };

    let path = match format {
        OutputFormat::Csv => {
            let comments = vec![
                format!("converged={}", summary.converged),
                format!("stalled={}", summary.stalled),
                format!("iterations={}", summary.iterations),
                format!("phi_hat={}", wva_core::csv_float(summary.phi_hat)),
                format!("theta_hat={}", wva_core::csv_float(summary.theta_hat)),
            ];
            let rows: Vec<String> = trace.steps.iter().map(trace_csv_row).collect();
            output::write_csv(&dir, "servo_trace", &cfg, &comments, trace_csv_header(), &rows)?
        }
        OutputFormat::Json => {
            let steps = trace
                .steps
                .iter()
                .map(|s| ServoRow {
                    iteration: s.iteration,
                    phi_hat: s.phi_hat,
                    signal: s.signal,
                    theta_hat_running: s.theta_hat_running,
                })
                .collect();
            let doc = ServoDoc {
                config: cfg.as_map(),
                summary,
                steps,
            };
            output::write_json(&dir, "servo_trace", &doc)?
        }
    };
    Ok(vec![path])
}
