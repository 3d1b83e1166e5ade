//! Range frames: per-solution tables of how much of each holding reaches
//! each node and how often it takes the aggressive action there.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::table::{BranchRow, BranchTable};
use crate::error::{Error, Result};
use crate::game::{build_topology, reach_fraction, Layout, NUM_NODES};

pub const FRAME_FORMAT_VERSION: &str = "kuhn3-frame/1";

/// Which branch points become frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameSampling {
    /// Every `stride`-th point of the branch.
    Stride(usize),
    /// `count` frames at equal arc-length spacing, interpolated linearly
    /// between neighbouring points.
    EqualArc(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub pot: f64,
    pub arclen: f64,
    pub x_free: Vec<f64>,
}

impl From<&BranchRow> for Frame {
    fn from(r: &BranchRow) -> Self {
        Frame {
            pot: r.pot,
            arclen: r.arclen,
            x_free: r.x_free.clone(),
        }
    }
}

pub fn sample_frames(table: &BranchTable, sampling: FrameSampling) -> Result<Vec<Frame>> {
    if table.rows.is_empty() {
        return Err(Error::Contract("branch is empty".into()));
    }
    match sampling {
        FrameSampling::Stride(0) | FrameSampling::EqualArc(0) => {
            Err(Error::Contract("frame stride and count must be positive".into()))
        }
        FrameSampling::Stride(stride) => Ok(table.rows.iter().step_by(stride).map(Frame::from).collect()),
        FrameSampling::EqualArc(count) => {
            let rows = &table.rows;
            let total = rows.last().unwrap().arclen;
            let mut frames = Vec::with_capacity(count);
            let mut j = 0;
            for k in 0..count {
                let s = if count == 1 { 0.0 } else { total * k as f64 / (count - 1) as f64 };
                while j + 1 < rows.len() - 1 && rows[j + 1].arclen < s {
                    j += 1;
                }
                if rows.len() == 1 {
                    frames.push(Frame::from(&rows[0]));
                    continue;
                }
                let (a, b) = (&rows[j], &rows[j + 1]);
                let len = b.arclen - a.arclen;
                let t = if len > 0.0 { ((s - a.arclen) / len).clamp(0.0, 1.0) } else { 0.0 };
                let lerp = |u: f64, v: f64| u + t * (v - u);
                frames.push(Frame {
                    pot: lerp(a.pot, b.pot),
                    arclen: s,
                    x_free: a.x_free.iter().zip(&b.x_free).map(|(u, v)| lerp(*u, *v)).collect(),
                });
            }
            Ok(frames)
        }
    }
}

/// CSV text of one frame: `12 N` rows of
/// `node, card, reach_fraction, aggressive_frequency`.
pub fn render_frame(table: &BranchTable, frame: &Frame) -> Result<String> {
    let system = table.system()?;
    let n = table.spec.n_cards;
    let layout = Layout::new(n)?;
    let topology = build_topology();
    let x = system.embed(&frame.x_free);
    let mut out = String::new();
    let _ = writeln!(out, "# {FRAME_FORMAT_VERSION}");
    let _ = writeln!(
        out,
        "# reach_fraction: probability that the node's owner reaches it holding the card, averaged over opponent holdings"
    );
    let _ = writeln!(out, "# P={:.16e} arclen={:.16e}", frame.pot, frame.arclen);
    out.push_str("node,card,reach_fraction,aggressive_frequency\n");
    for node in 1..=NUM_NODES {
        let player = topology.node(node).player;
        for card in 1..=n {
            let reach = reach_fraction(&topology, n, &x, node, card)?;
            let freq = x[layout.index_unchecked(player, node, card)];
            let _ = writeln!(out, "{node},{card},{reach:.16e},{freq:.16e}");
        }
    }
    Ok(out)
}

/// Writes `frame_00000.csv`, `frame_00001.csv`, ... into `dir`.
pub fn emit_range_frames(table: &BranchTable, dir: &Path, sampling: FrameSampling) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let frames = sample_frames(table, sampling)?;
    let mut written = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let path = dir.join(format!("frame_{i:05}.csv"));
        std::fs::write(&path, render_frame(table, frame)?).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
