//! Branch files: one CSV row per accepted point.
//!
//! Columns are `step, arclen, P, delta, E1, E2, E3` followed by one column
//! per free frequency labelled `p<player>_n<node>_c<card>`. Numbers are
//! written with 17 significant digits so they read back bit for bit.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::continuation::Branch;
use crate::equilibrium::{EquilibriumSystem, SystemOptions};
use crate::error::{Error, Result};
use crate::game::{GameSpec, Slot, Variant};

pub const BRANCH_FORMAT_VERSION: &str = "kuhn3-branch/1";

const LEADING: [&str; 7] = ["step", "arclen", "P", "delta", "E1", "E2", "E3"];

#[derive(Debug, Clone, PartialEq)]
pub struct BranchRow {
    pub step: usize,
    pub arclen: f64,
    pub pot: f64,
    pub delta: f64,
    pub expectations: [f64; 3],
    pub x_free: Vec<f64>,
}

/// The tabular content of a branch, as written to and read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTable {
    pub spec: GameSpec,
    pub slots: Vec<Slot>,
    pub rows: Vec<BranchRow>,
}

fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl BranchTable {
    pub fn from_branch(branch: &Branch) -> Result<Self> {
        if branch.points.is_empty() {
            return Err(Error::Contract("cannot export an empty branch".into()));
        }
        let rows = branch
            .points
            .iter()
            .zip(branch.arc_lengths())
            .enumerate()
            .map(|(step, (p, arclen))| BranchRow {
                step,
                arclen,
                pot: p.pot,
                delta: p.delta_used,
                expectations: p.expectations,
                x_free: p.x_free.clone(),
            })
            .collect();
        Ok(BranchTable {
            spec: branch.spec,
            slots: branch.slots.clone(),
            rows,
        })
    }

    pub fn system(&self) -> Result<EquilibriumSystem> {
        EquilibriumSystem::with_options(&self.spec, SystemOptions::default())
    }

    pub fn header(&self) -> Vec<String> {
        LEADING
            .iter()
            .map(|s| s.to_string())
            .chain(self.slots.iter().map(Slot::label))
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Contract("cannot export an empty branch".into()));
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(file));
        let csv_err = |e: csv::Error| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        };
        w.write_record(self.header()).map_err(csv_err)?;
        for row in &self.rows {
            let mut record = vec![
                row.step.to_string(),
                format_f64(row.arclen),
                format_f64(row.pot),
                format_f64(row.delta),
            ];
            record.extend(row.expectations.iter().map(|v| format_f64(*v)));
            record.extend(row.x_free.iter().map(|v| format_f64(*v)));
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Format {
            path: path.to_path_buf(),
            reason,
        };
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.len() < LEADING.len() || header.iter().zip(LEADING).any(|(a, b)| a != b) {
            return Err(bad(format!("header must start with {}", LEADING.join(","))));
        }
        let slots = header
            .iter()
            .skip(LEADING.len())
            .map(|l| Slot::parse_label(l).ok_or_else(|| bad(format!("bad column label {l:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let spec = infer_spec(&slots).ok_or_else(|| bad("columns match no game layout".into()))?;

        let mut rows = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let num = |i: usize| -> Result<f64> {
                record[i]
                    .parse::<f64>()
                    .map_err(|e| bad(format!("row {}: column {}: {e}", line + 1, header[i].to_string())))
            };
            let step = record[0]
                .parse::<usize>()
                .map_err(|e| bad(format!("row {}: step: {e}", line + 1)))?;
            let x_free = (LEADING.len()..record.len()).map(num).collect::<Result<Vec<_>>>()?;
            rows.push(BranchRow {
                step,
                arclen: num(1)?,
                pot: num(2)?,
                delta: num(3)?,
                expectations: [num(4)?, num(5)?, num(6)?],
                x_free,
            });
        }
        if rows.is_empty() {
            return Err(bad("no data rows".into()));
        }
        Ok(BranchTable { spec, slots, rows })
    }
}

/// The game whose free frequencies are exactly `slots`, in order.
fn infer_spec(slots: &[Slot]) -> Option<GameSpec> {
    let max_card = slots.iter().map(|s| s.card).max()?;
    for variant in [Variant::Full, Variant::Simplified] {
        let Ok(spec) = GameSpec::with_variant(max_card, variant) else {
            continue;
        };
        let system = EquilibriumSystem::with_options(&spec, SystemOptions::default()).ok()?;
        if system.free_slots() == slots {
            return Some(spec);
        }
    }
    None
}

pub fn export_branch_csv(branch: &Branch, path: &Path) -> Result<()> {
    BranchTable::from_branch(branch)?.write_csv(path)
}

pub fn load_branch_csv(path: &Path) -> Result<BranchTable> {
    BranchTable::read_csv(path)
}
