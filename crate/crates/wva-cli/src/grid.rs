//! Sweep-grid syntax shared by all subcommands.
//!
//! A grid is `log:START:STOP:COUNT`, `lin:START:STOP:COUNT`, or a
//! comma-separated list of values. Real grids must be strictly monotone;
//! log grids additionally need same-signed nonzero endpoints.

use num_complex::Complex64;

use crate::error::{CliError, Result};

const MAX_POINTS: usize = 1_000_000;

fn parse_f64(token: &str, what: &str) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("{what}: cannot parse `{token}` as a number")))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Usage(format!("{what}: `{token}` is not finite")))
            }
        })
}

fn parse_count(token: &str, what: &str) -> Result<usize> {
    let n = token
        .trim()
        .parse::<usize>()
        .map_err(|_| CliError::Usage(format!("{what}: cannot parse `{token}` as a count")))?;
    if n == 0 || n > MAX_POINTS {
        return Err(CliError::Usage(format!(
            "{what}: count {n} outside 1..={MAX_POINTS}"
        )));
    }
    Ok(n)
}

fn require_monotone(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(CliError::Usage(format!("{what}: grid is empty")));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage(format!(
            "{what}: grid must be strictly increasing"
        )));
    }
    Ok(())
}

/// Parses a real grid specification.
pub fn parse_grid(spec: &str, what: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let values = if let Some(rest) = spec.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!(
                "{what}: expected log:START:STOP:COUNT, got `{spec}`"
            )));
        }
        let a = parse_f64(parts[0], what)?;
        let b = parse_f64(parts[1], what)?;
        let n = parse_count(parts[2], what)?;
        if a == 0.0 || b == 0.0 || a.signum() != b.signum() {
            return Err(CliError::Usage(format!(
                "{what}: log grid endpoints must be nonzero with equal sign"
            )));
        }
        if n == 1 {
            vec![a]
        } else {
            let ratio = b / a;
            (0..n)
                .map(|k| a * ratio.powf(k as f64 / (n - 1) as f64))
                .collect()
        }
    } else if let Some(rest) = spec.strip_prefix("lin:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!(
                "{what}: expected lin:START:STOP:COUNT, got `{spec}`"
            )));
        }
        let a = parse_f64(parts[0], what)?;
        let b = parse_f64(parts[1], what)?;
        let n = parse_count(parts[2], what)?;
        if n == 1 {
            vec![a]
        } else {
            let step = (b - a) / (n - 1) as f64;
            (0..n).map(|k| a + step * k as f64).collect()
        }
    } else {
        spec.split(',')
            .map(|t| parse_f64(t, what))
            .collect::<Result<Vec<f64>>>()?
    };
    require_monotone(&values, what)?;
    Ok(values)
}

/// Parses one complex value, accepting plain reals and `a+bi` forms.
pub fn parse_complex(token: &str, what: &str) -> Result<Complex64> {
    let t = token.trim();
    let c = t
        .parse::<Complex64>()
        .map_err(|_| CliError::Usage(format!("{what}: cannot parse `{t}` as a complex number")))?;
    if !c.is_finite() {
        return Err(CliError::Usage(format!("{what}: `{t}` is not finite")));
    }
    Ok(c)
}

/// Comma-separated list of (possibly complex) weak values.
pub fn parse_complex_list(spec: &str, what: &str) -> Result<Vec<Complex64>> {
    let values: Vec<Complex64> = spec
        .split(',')
        .map(|t| parse_complex(t, what))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("{what}: list is empty")));
    }
    Ok(values)
}

/// Canonical short label for a weak value, used in file names and echoes.
pub fn complex_label(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}
