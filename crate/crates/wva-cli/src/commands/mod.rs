//! Subcommand implementations. Each `run` returns the list of files it
//! wrote so the binary can report them.

pub mod compare;
pub mod curves;
pub mod nonlinearity;
pub mod qfi;
pub mod servo;

use std::path::PathBuf;

use num_complex::Complex64;

use crate::args::CommonArgs;
use wva_core::WeakValueSelection;

/// Maps a requested weak value onto a selection. Real values >= 1 use the
/// half-angle parameterization (exact cotangent identity); everything else
/// goes through the general inversion.
pub(crate) fn selection_for(aw: Complex64) -> WeakValueSelection {
    if aw.im == 0.0 && aw.re >= 1.0 {
        WeakValueSelection::Delta((1.0 / aw.re).atan())
    } else {
        WeakValueSelection::Target(aw)
    }
}

pub(crate) fn out_dir(args: &CommonArgs) -> PathBuf {
    args.out.clone().unwrap_or_else(|| PathBuf::from("."))
}
