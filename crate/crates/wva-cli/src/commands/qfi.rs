//! Fisher information versus dephasing strength at a fixed probe phase,
//! for each requested weak value plus the standard-interferometry
//! reference.

use std::path::PathBuf;

use serde::Serialize;

use wva_core::{cramer_rao, csv_float, qfi_dwm, qfi_si};

use crate::args::{CommonArgs, OutputFormat};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{self, opt_csv_float};

use super::out_dir;

const DEFAULTS: &[(&str, &str)] = &[
    ("eta_grid", "lin:0:0.5:51"),
    ("theta_ref", "1e-3"),
    ("aw", "100,100+10i"),
    ("n_repeats", "1"),
];
const OPTIONAL: &[&str] = &["seed"];

pub const HEADER: &str = "eta,theta,scheme,re_aw,im_aw,qfi,cramer_rao_bound";

#[derive(Debug, Serialize)]
struct QfiRow {
    eta: f64,
    theta: f64,
    scheme: String,
    re_aw: f64,
    im_aw: f64,
    qfi: f64,
    /// Absent where the state carries no information.
    cramer_rao_bound: Option<f64>,
}

#[derive(Debug, Serialize)]
struct QfiDoc<'a> {
    config: &'a std::collections::BTreeMap<String, String>,
    rows: Vec<QfiRow>,
}

fn bound(fisher: f64, n: u64) -> Result<Option<f64>> {
    match cramer_rao(fisher, n) {
        Ok(b) => Ok(Some(b)),
        Err(wva_core::WvaError::ZeroInformation { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run(args: &CommonArgs) -> Result<Vec<PathBuf>> {
    let cfg = RunConfig::assemble(args, DEFAULTS, OPTIONAL)?;
    let dir = out_dir(args);
    let format = cfg.format()?;

    let etas = cfg.get_grid("eta_grid")?;
    let theta = cfg.get_f64("theta_ref")?;
    let aws = cfg.get_complex_list("aw")?;
    let n_repeats = cfg.get_usize("n_repeats")? as u64;
    if n_repeats == 0 {
        return Err(CliError::Usage("n_repeats must be >= 1".into()));
    }

    let mut rows = Vec::new();
    for &aw in &aws {
        for &eta in &etas {
            let eval = qfi_dwm(theta, aw, eta)?;
            rows.push(QfiRow {
                eta,
                theta,
                scheme: "dwm".into(),
                re_aw: aw.re,
                im_aw: aw.im,
                qfi: eval.value,
                cramer_rao_bound: bound(eval.value, n_repeats)?,
            });
        }
    }
    for &eta in &etas {
        let eval = qfi_si(theta, eta)?;
        rows.push(QfiRow {
            eta,
            theta,
            scheme: "si".into(),
            re_aw: 1.0,
            im_aw: 0.0,
            qfi: eval.value,
            cramer_rao_bound: bound(eval.value, n_repeats)?,
        });
    }

    let path = match format {
        OutputFormat::Csv => {
            let csv_rows: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        csv_float(r.eta),
                        csv_float(r.theta),
                        r.scheme,
                        csv_float(r.re_aw),
                        csv_float(r.im_aw),
                        csv_float(r.qfi),
                        opt_csv_float(r.cramer_rao_bound)
                    )
                })
                .collect();
            output::write_csv(&dir, "qfi", &cfg, &[], HEADER, &csv_rows)?
        }
        OutputFormat::Json => {
            let doc = QfiDoc {
                config: cfg.as_map(),
                rows,
            };
            output::write_json(&dir, "qfi", &doc)?
        }
    };
    Ok(vec![path])
}
