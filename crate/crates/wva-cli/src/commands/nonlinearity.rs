//! Readout nonlinearity versus theta for each weak value, in parts per
//! million, with the usable-phase bound at the configured threshold.

use std::path::PathBuf;

use serde::Serialize;

use wva_core::{csv_float, max_measurable_phase, nonlinearity};

use crate::args::{CommonArgs, OutputFormat};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output;

use super::out_dir;

const DEFAULTS: &[(&str, &str)] = &[
    ("theta_grid", "log:1e-4:0.78:200"),
    ("aw", "10,50,100"),
    ("d_threshold", "1e-4"),
];
const OPTIONAL: &[&str] = &["seed"];

pub const HEADER: &str = "aw,theta,aw_theta,d,d_ppm,theta_max";

#[derive(Debug, Serialize)]
struct NonlinRow {
    aw: f64,
    theta: f64,
    aw_theta: f64,
    d: f64,
    d_ppm: f64,
    /// Largest phase whose distortion stays at or below the threshold.
    theta_max: f64,
}

#[derive(Debug, Serialize)]
struct NonlinDoc<'a> {
    config: &'a std::collections::BTreeMap<String, String>,
    rows: Vec<NonlinRow>,
}

pub fn run(args: &CommonArgs) -> Result<Vec<PathBuf>> {
    let cfg = RunConfig::assemble(args, DEFAULTS, OPTIONAL)?;
    let dir = out_dir(args);
    let format = cfg.format()?;

    let thetas = cfg.get_grid("theta_grid")?;
    let aws = cfg.get_complex_list("aw")?;
    let threshold = cfg.get_f64("d_threshold")?;

    let mut rows = Vec::new();
    for &aw in &aws {
        if aw.im != 0.0 {
            return Err(CliError::Usage(format!(
                "aw: the distortion metric is defined for real weak values, got {aw}"
            )));
        }
        let a = aw.re;
        let theta_max = max_measurable_phase(a, threshold)?;
        for &theta in &thetas {
            let d = nonlinearity(theta, a)?;
            rows.push(NonlinRow {
                aw: a,
                theta,
                aw_theta: a * theta,
                d,
                d_ppm: 1e6 * d,
                theta_max,
            });
        }
    }

    let path = match format {
        OutputFormat::Csv => {
            let csv_rows: Vec<String> = rows
                .iter()
                .map(|r| {
                    [
                        csv_float(r.aw),
                        csv_float(r.theta),
                        csv_float(r.aw_theta),
                        csv_float(r.d),
                        csv_float(r.d_ppm),
                        csv_float(r.theta_max),
                    ]
                    .join(",")
                })
                .collect();
            output::write_csv(&dir, "nonlinearity", &cfg, &[], HEADER, &csv_rows)?
        }
        OutputFormat::Json => {
            let doc = NonlinDoc {
                config: cfg.as_map(),
                rows,
            };
            output::write_json(&dir, "nonlinearity", &doc)?
        }
    };
    Ok(vec![path])
}
