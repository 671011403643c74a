//! Side-by-side scheme comparison: a per-scheme report (accuracy,
//! precision, SNR, usable range, information at a reference point) plus a
//! signal-to-noise sweep over theta.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use wva_core::{
    accuracy_limit, closed_loop_dynamic_range, closed_loop_precision, csv_float, dynamic_range,
    max_measurable_phase, precision_limit, qfi_dwm, qfi_si, resolvable_theta, snr,
    AlignmentScheme, NoiseParams, SaturationRegime, Scheme, SwmDetectorSpec,
};

use crate::args::{CommonArgs, OutputFormat};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{self, opt_csv_float};

use super::out_dir;

const DEFAULTS: &[(&str, &str)] = &[
    ("gamma", "0.01"),
    ("epsilon", "0.01"),
    ("alpha", "1"),
    ("beta", "0.01"),
    ("i0", "1e6"),
    ("omega0_dt", "1e4"),
    ("theta_ref", "1e-3"),
    ("eta_ref", "0"),
    ("d_threshold", "1e-4"),
    ("snr_threshold", "1"),
    ("theta_grid", "log:1e-6:0.3:50"),
    ("phi_min", "1e-6"),
    ("modulator_range", "6.283185307179586"),
];
const OPTIONAL: &[&str] = &["seed", "i_max", "aw"];

pub const REPORT_HEADER: &str =
    "scheme,accuracy_limit,precision_limit,snr,theta_max,dynamic_range,qfi_ref";
pub const SWEEP_HEADER: &str = "scheme,theta,gamma,i0,snr,precision_limit";

#[derive(Debug, Serialize)]
struct ReportRow {
    scheme: String,
    accuracy_limit: Option<f64>,
    precision_limit: Option<f64>,
    snr: Option<f64>,
    theta_max: Option<f64>,
    dynamic_range: Option<f64>,
    qfi_ref: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    scheme: String,
    theta: f64,
    gamma: f64,
    i0: f64,
    snr: f64,
    precision_limit: f64,
}

#[derive(Debug, Serialize)]
struct ReportDoc<'a> {
    config: &'a std::collections::BTreeMap<String, String>,
    rows: Vec<ReportRow>,
}

#[derive(Debug, Serialize)]
struct SweepDoc<'a> {
    config: &'a std::collections::BTreeMap<String, String>,
    rows: Vec<SweepRow>,
}

pub fn run(args: &CommonArgs) -> Result<Vec<PathBuf>> {
    let cfg = RunConfig::assemble(args, DEFAULTS, OPTIONAL)?;
    let dir = out_dir(args);
    let format = cfg.format()?;

    // A weak value overrides the scale factor; otherwise gamma defines a
    // real weak value 1/gamma.
    let (gamma, aw) = match cfg.get_opt_str("aw") {
        Some(_) => {
            let list = cfg.get_complex_list("aw")?;
            let aw = list[0];
            (1.0 / aw.norm(), aw)
        }
        None => {
            let gamma = cfg.get_f64("gamma")?;
            (gamma, Complex64::new(1.0 / gamma, 0.0))
        }
    };
    let epsilon = cfg.get_f64("epsilon")?;
    let params = NoiseParams::new(cfg.get_f64("alpha")?, cfg.get_f64("beta")?)?;
    let i0 = cfg.get_f64("i0")?;
    let omega0_dt = cfg.get_f64("omega0_dt")?;
    let theta_ref = cfg.get_f64("theta_ref")?;
    let eta_ref = cfg.get_f64("eta_ref")?;
    let d_threshold = cfg.get_f64("d_threshold")?;
    let snr_threshold = cfg.get_f64("snr_threshold")?;
    let thetas = cfg.get_grid("theta_grid")?;
    let phi_min = cfg.get_f64("phi_min")?;
    let modulator_range = cfg.get_f64("modulator_range")?;
    let regime = match cfg.get_opt_f64("i_max")? {
        Some(i_max) => SaturationRegime::EasyToSaturate { i_max },
        None => SaturationRegime::HardToSaturate,
    };

    let mut rows = Vec::new();

    let dwm_theta_max = max_measurable_phase(1.0 / gamma, d_threshold)?;
    let dwm_theta_min = resolvable_theta(Scheme::Dwm, gamma, i0, &params, snr_threshold)?;
    rows.push(ReportRow {
        scheme: "dwm".into(),
        accuracy_limit: Some(accuracy_limit(
            AlignmentScheme::Dwm,
            epsilon,
            Some(gamma),
            None,
        )?),
        precision_limit: Some(precision_limit(Scheme::Dwm, gamma, i0, &params, regime)?),
        snr: Some(snr(Scheme::Dwm, theta_ref, gamma, i0, &params)?),
        theta_max: Some(dwm_theta_max),
        dynamic_range: Some(dynamic_range(dwm_theta_max, dwm_theta_min)?),
        qfi_ref: Some(qfi_dwm(theta_ref, aw, eta_ref)?.value),
    });

    let si_theta_max = max_measurable_phase(1.0, d_threshold)?;
    let si_theta_min = resolvable_theta(Scheme::Si, 1.0, i0, &params, snr_threshold)?;
    rows.push(ReportRow {
        scheme: "si".into(),
        accuracy_limit: Some(accuracy_limit(AlignmentScheme::Si, epsilon, None, None)?),
        precision_limit: Some(precision_limit(Scheme::Si, 1.0, i0, &params, regime)?),
        snr: Some(snr(Scheme::Si, theta_ref, 1.0, i0, &params)?),
        theta_max: Some(si_theta_max),
        dynamic_range: Some(dynamic_range(si_theta_max, si_theta_min)?),
        qfi_ref: Some(qfi_si(theta_ref, eta_ref)?.value),
    });

    rows.push(ReportRow {
        scheme: "swm".into(),
        accuracy_limit: Some(accuracy_limit(
            AlignmentScheme::Swm,
            epsilon,
            None,
            Some(&SwmDetectorSpec { omega0_dt }),
        )?),
        precision_limit: None,
        snr: None,
        theta_max: None,
        dynamic_range: None,
        qfi_ref: None,
    });

    for (label, scheme, g) in [
        ("dwm_closed_loop", Scheme::Dwm, gamma),
        ("si_closed_loop", Scheme::Si, 1.0),
    ] {
        let (theta_max, ratio) =
            closed_loop_dynamic_range(scheme, g, phi_min, modulator_range)?;
        rows.push(ReportRow {
            scheme: label.into(),
            accuracy_limit: None,
            precision_limit: Some(closed_loop_precision(scheme, g, phi_min)?),
            snr: None,
            theta_max: Some(theta_max),
            dynamic_range: Some(ratio),
            qfi_ref: None,
        });
    }

    let mut sweep = Vec::new();
    for (label, scheme, g) in [("dwm", Scheme::Dwm, gamma), ("si", Scheme::Si, 1.0)] {
        let precision = precision_limit(scheme, g, i0, &params, regime)?;
        for &theta in &thetas {
            sweep.push(SweepRow {
                scheme: label.into(),
                theta,
                gamma: g,
                i0,
                snr: snr(scheme, theta, g, i0, &params)?,
                precision_limit: precision,
            });
        }
    }

    let mut written = Vec::new();
    match format {
        OutputFormat::Csv => {
            let report_rows: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        r.scheme,
                        opt_csv_float(r.accuracy_limit),
                        opt_csv_float(r.precision_limit),
                        opt_csv_float(r.snr),
                        opt_csv_float(r.theta_max),
                        opt_csv_float(r.dynamic_range),
                        opt_csv_float(r.qfi_ref)
                    )
                })
                .collect();
            written.push(output::write_csv(
                &dir,
                "compare_report",
                &cfg,
                &[],
                REPORT_HEADER,
                &report_rows,
            )?);
            let sweep_rows: Vec<String> = sweep
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{},{}",
                        r.scheme,
                        csv_float(r.theta),
                        csv_float(r.gamma),
                        csv_float(r.i0),
                        csv_float(r.snr),
                        csv_float(r.precision_limit)
                    )
                })
                .collect();
            written.push(output::write_csv(
                &dir,
                "compare_noise_sweep",
                &cfg,
                &[],
                SWEEP_HEADER,
                &sweep_rows,
            )?);
        }
        OutputFormat::Json => {
            written.push(output::write_json(
                &dir,
                "compare_report",
                &ReportDoc {
                    config: cfg.as_map(),
                    rows,
                },
            )?);
            written.push(output::write_json(
                &dir,
                "compare_noise_sweep",
                &SweepDoc {
                    config: cfg.as_map(),
                    rows: sweep,
                },
            )?);
        }
    }
    Ok(written)
}
