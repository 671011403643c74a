//! Deterministic file emission. Same inputs must give identical bytes, so
//! everything is written in sorted/declared order with no timestamps.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub use wva_core::csv_float;

pub fn opt_csv_float(x: Option<f64>) -> String {
    x.map(csv_float).unwrap_or_default()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

/// CSV file: `# key=value` provenance lines, optional extra `#` lines
/// (result summaries), the column header, then the rows.
pub fn write_csv(
    dir: &Path,
    stem: &str,
    cfg: &RunConfig,
    extra_comments: &[String],
    header: &str,
    rows: &[String],
) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{stem}.csv"));
    let mut text = String::new();
    for line in cfg.echo_lines() {
        text.push_str(&line);
        text.push('\n');
    }
    for line in extra_comments {
        text.push_str("# ");
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// JSON mirror with identical field names, document shape defined per
/// subcommand. Struct fields serialize in declaration order and the config
/// map is sorted, so output is deterministic.
pub fn write_json<T: Serialize>(dir: &Path, stem: &str, doc: &T) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::CommonArgs;

    #[test]
    fn csv_layout_and_byte_stability() {
        let cfg = RunConfig::assemble(&CommonArgs::default(), &[("k", "v")], &[]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let rows = vec!["1,2".to_string()];
        let p1 = write_csv(dir.path(), "t", &cfg, &[], "a,b", &rows).unwrap();
        let bytes1 = fs::read(&p1).unwrap();
        assert_eq!(
            String::from_utf8(bytes1.clone()).unwrap(),
            "# format=csv\n# k=v\na,b\n1,2\n"
        );
        let p2 = write_csv(dir.path(), "t", &cfg, &[], "a,b", &rows).unwrap();
        assert_eq!(bytes1, fs::read(&p2).unwrap());
    }

    #[test]
    fn unwritable_target_is_an_io_error() {
        let cfg = RunConfig::assemble(&CommonArgs::default(), &[], &[]).unwrap();
        let err = write_csv(Path::new("/proc/nope"), "t", &cfg, &[], "a", &[]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn optional_float_field() {
        assert_eq!(opt_csv_float(Some(0.25)), "2.5e-1");
        assert_eq!(opt_csv_float(None), "");
    }
}
