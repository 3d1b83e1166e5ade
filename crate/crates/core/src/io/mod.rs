//! Branch persistence, run configuration, SVG plots and range frames.

mod config;
mod frames;
mod plot;
mod table;

use std::path::Path;

use serde::Serialize;

pub use config::RunConfig;
pub use frames::{emit_range_frames, render_frame, sample_frames, Frame, FrameSampling, FRAME_FORMAT_VERSION};
pub use plot::{emit_expectation_plot, render_expectation_plot, PotAxis};
pub use table::{export_branch_csv, load_branch_csv, BranchRow, BranchTable, BRANCH_FORMAT_VERSION};

use crate::continuation::{Branch, ContinuationConfig, Termination};
use crate::error::{Error, Result};
use crate::game::GameSpec;

/// Metadata written next to a branch file.
#[derive(Debug, Clone, Serialize)]
pub struct BranchSummary<'a> {
    pub format: &'static str,
    pub spec: GameSpec,
    pub epsilon: f64,
    pub points: usize,
    pub pot_range: (f64, f64),
    pub max_residual: f64,
    pub termination: Termination,
    pub config: &'a ContinuationConfig,
}

impl<'a> BranchSummary<'a> {
    pub fn new(branch: &'a Branch) -> Self {
        let pots = branch.points.iter().map(|p| p.pot);
        BranchSummary {
            format: BRANCH_FORMAT_VERSION,
            spec: branch.spec,
            epsilon: branch.epsilon,
            points: branch.points.len(),
            pot_range: (
                pots.clone().fold(f64::INFINITY, f64::min),
                pots.fold(f64::NEG_INFINITY, f64::max),
            ),
            max_residual: branch.points.iter().map(|p| p.residual_norm).fold(0.0, f64::max),
            termination: branch.termination,
            config: &branch.config,
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
