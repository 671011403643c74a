//! Amplified-phase and signal curves over a theta grid: one file per weak
//! value plus a combined file with a leading `aw` column.

use std::path::PathBuf;

use serde::Serialize;

use wva_core::{propagate_exact, readings_csv_header, readings_csv_row, TrainConfig};

use crate::args::{CommonArgs, OutputFormat};
use crate::config::RunConfig;
use crate::error::Result;
use crate::grid::complex_label;
use crate::output;

use super::{out_dir, selection_for};

const DEFAULTS: &[(&str, &str)] = &[
    ("theta_grid", "log:1e-6:0.3:200"),
    ("aw", "1,10,50,100"),
    ("epsilon", "0"),
    ("input_intensity", "1"),
    ("efficiency_d1", "1"),
    ("efficiency_d2", "1"),
];
const OPTIONAL: &[&str] = &["seed"];

#[derive(Debug, Serialize)]
struct CurveRow {
    theta: f64,
    delta: f64,
    epsilon: f64,
    p_d1: f64,
    p_d2: f64,
    i_d1: f64,
    i_d2: f64,
    signal: Option<f64>,
    theta_prime: f64,
}

#[derive(Debug, Serialize)]
struct CurveGroup {
    aw: String,
    rows: Vec<CurveRow>,
}

#[derive(Debug, Serialize)]
struct CurvesDoc<'a> {
    config: &'a std::collections::BTreeMap<String, String>,
    groups: Vec<CurveGroup>,
}

pub fn run(args: &CommonArgs) -> Result<Vec<PathBuf>> {
    let cfg = RunConfig::assemble(args, DEFAULTS, OPTIONAL)?;
    let dir = out_dir(args);
    let format = cfg.format()?;

    let thetas = cfg.get_grid("theta_grid")?;
    let aws = cfg.get_complex_list("aw")?;
    let epsilon = cfg.get_f64("epsilon")?;
    let intensity = cfg.get_f64("input_intensity")?;
    let efficiency = (cfg.get_f64("efficiency_d1")?, cfg.get_f64("efficiency_d2")?);

    let mut written = Vec::new();
    let mut combined_rows = Vec::new();
    let mut groups = Vec::new();

    for &aw in &aws {
        let selection = selection_for(aw);
        let label = complex_label(aw);
        let mut rows = Vec::new();
        let mut json_rows = Vec::new();
        for &theta in &thetas {
            let mut train = TrainConfig::new(theta, selection)?;
            train.epsilon = epsilon;
            train.input_intensity = intensity;
            train.detector_efficiency = efficiency;
            let readings = propagate_exact(&train)?;
            combined_rows.push(format!("{label},{}", readings_csv_row(&train, &readings)));
            rows.push(readings_csv_row(&train, &readings));
            json_rows.push(CurveRow {
                theta,
                delta: selection.delta(),
                epsilon,
                p_d1: readings.p_d1,
                p_d2: readings.p_d2,
                i_d1: readings.i_d1,
                i_d2: readings.i_d2,
                signal: readings.normalized_signal().ok(),
                theta_prime: readings.theta_prime,
            });
        }
        let stem = format!("curves_aw_{label}");
        match format {
            OutputFormat::Csv => {
                written.push(output::write_csv(
                    &dir,
                    &stem,
                    &cfg,
                    &[],
                    readings_csv_header(),
                    &rows,
                )?);
            }
            OutputFormat::Json => {
                let doc = CurvesDoc {
                    config: cfg.as_map(),
                    groups: vec![CurveGroup {
                        aw: label.clone(),
                        rows: json_rows,
                    }],
                };
                written.push(output::write_json(&dir, &stem, &doc)?);
                groups.extend(doc.groups);
                continue;
            }
        }
        groups.push(CurveGroup {
            aw: label,
            rows: json_rows,
        });
    }

    match format {
        OutputFormat::Csv => {
            let header = format!("aw,{}", readings_csv_header());
            written.push(output::write_csv(
                &dir,
                "curves_all",
                &cfg,
                &[],
                &header,
                &combined_rows,
            )?);
        }
        OutputFormat::Json => {
            let doc = CurvesDoc {
                config: cfg.as_map(),
                groups,
            };
            written.push(output::write_json(&dir, "curves_all", &doc)?);
        }
    }
    Ok(written)
}
