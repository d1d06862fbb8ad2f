//! Parameter sweeps over generalized coherent states, written as CSV tables
//! with a `manifest.txt` describing the run.
//!
//! Each subcommand has a `compute_*` function returning typed rows and a
//! `run_*` function that also writes the files. Rows are computed in
//! parallel but always emitted in a fixed order, so repeated runs with the
//! same configuration give byte-identical CSVs.

pub mod error;
pub mod fig2;
pub mod fig3;
pub mod fig4;
pub mod output;
pub mod params;
pub mod witness;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use error::{CliError, CliResult};
pub use fig2::{compute_fig2, run_fig2, Fig2Config, Fig2Series};
pub use fig3::{compute_fig3, run_fig3, Fig3Config, Fig3Map};
pub use fig4::{compute_fig4, run_fig4, Fig4Config, Fig4Curve};
pub use output::{Manifest, Table};
pub use params::{Numerics, ThetaSpec};
pub use witness::{evaluate_point, run_sweep, run_witness, PointConfig, SweepConfig};

/// Files written by one command, in write order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<(PathBuf, usize)>,
    pub manifest: PathBuf,
}

impl RunSummary {
    /// Writes every table, then the manifest with their row counts.
    pub(crate) fn write(tables: Vec<Table>, mut manifest: Manifest, dir: &Path, start: Instant) -> CliResult<Self> {
        output::ensure_dir(dir)?;
        let mut files = Vec::with_capacity(tables.len());
        for table in &tables {
            let path = table.write(dir)?;
            manifest.set(&format!("rows.{}", table.name), table.rows.len());
            files.push((path, table.rows.len()));
        }
        let manifest = manifest.write(dir, start.elapsed())?;
        Ok(RunSummary { files, manifest })
    }
}
