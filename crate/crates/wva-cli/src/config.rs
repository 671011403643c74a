//! Effective run configuration: built-in defaults, overlaid by an optional
//! flat key=value file, overlaid by command-line flags. The merged result
//! is echoed into every output file for provenance.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::args::{CommonArgs, OutputFormat};
use crate::error::{CliError, Result};
use crate::grid::{parse_complex_list, parse_grid};

#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn parse_kv_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                idx + 1
            ))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

impl RunConfig {
    /// Merges defaults, config file, and flags. `defaults` lists every key
    /// with a built-in value; `optional` lists keys that are recognized but
    /// unset by default. Unknown file keys are usage errors.
    pub fn assemble(
        args: &CommonArgs,
        defaults: &[(&str, &str)],
        optional: &[&str],
    ) -> Result<Self> {
        let mut values: BTreeMap<String, String> = defaults
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let known = |k: &str| {
            defaults.iter().any(|(d, _)| *d == k) || optional.contains(&k)
        };

        if let Some(path) = &args.config {
            for (key, value) in parse_kv_file(path)? {
                if !known(&key) {
                    return Err(CliError::Usage(format!(
                        "unknown config key `{key}` for this subcommand"
                    )));
                }
                values.insert(key, value);
            }
        }

        let mut flag = |key: &str, value: Option<String>| -> Result<()> {
            if let Some(v) = value {
                if !known(key) {
                    return Err(CliError::Usage(format!(
                        "--{} is not used by this subcommand",
                        key.replace('_', "-")
                    )));
                }
                values.insert(key.to_string(), v);
            }
            Ok(())
        };
        flag("theta_grid", args.theta_grid.clone())?;
        flag("eta_grid", args.eta_grid.clone())?;
        flag("aw", args.aw.clone())?;
        flag("seed", args.seed.map(|s| s.to_string()))?;
        let format = args.format.map(|f| match f {
            OutputFormat::Csv => "csv".to_string(),
            OutputFormat::Json => "json".to_string(),
        });
        values.insert(
            "format".to_string(),
            format.unwrap_or_else(|| {
                values.get("format").cloned().unwrap_or_else(|| "csv".into())
            }),
        );

        Ok(Self { values })
    }

    pub fn get_str(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::Usage(format!("missing config key `{key}`")))
    }

    pub fn get_opt_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let raw = self.get_str(key)?;
        raw.parse::<f64>()
            .map_err(|_| CliError::Usage(format!("config key `{key}`: `{raw}` is not a number")))
    }

    pub fn get_opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(_) => self.get_f64(key).map(Some),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<usize> {
        let raw = self.get_str(key)?;
        raw.parse::<usize>().map_err(|_| {
            CliError::Usage(format!("config key `{key}`: `{raw}` is not a count"))
        })
    }

    pub fn get_opt_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<u64>().map(Some).map_err(|_| {
                CliError::Usage(format!("config key `{key}`: `{raw}` is not a seed"))
            }),
        }
    }

    pub fn get_grid(&self, key: &str) -> Result<Vec<f64>> {
        parse_grid(self.get_str(key)?, key)
    }

    pub fn get_complex_list(&self, key: &str) -> Result<Vec<Complex64>> {
        parse_complex_list(self.get_str(key)?, key)
    }

    pub fn format(&self) -> Result<OutputFormat> {
        match self.get_str("format")? {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Usage(format!(
                "config key `format`: `{other}` is not csv or json"
            ))),
        }
    }

    /// Sorted `# key=value` provenance lines for CSV headers.
    pub fn echo_lines(&self) -> Vec<String> {
        self.values
            .iter()
            .map(|(k, v)| format!("# {k}={v}"))
            .collect()
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}
