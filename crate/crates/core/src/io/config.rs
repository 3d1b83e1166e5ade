use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::continuation::ContinuationConfig;
use crate::error::{Error, Result};
use crate::game::{GameSpec, Variant, MIN_CARDS};

/// Settings of one CLI run. Also the schema of the `--config` JSON file;
/// every field is optional there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_cards: usize,
    pub pot_stop: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub delta_init: Option<f64>,
    pub delta_max: Option<f64>,
    pub out: PathBuf,
    pub skp: bool,
    pub tol_zero: f64,
    pub max_exploitability: f64,
    /// Lower-level solver settings; the fields above take precedence.
    pub continuation: ContinuationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_cards: 4,
            pot_stop: 10.0,
            epsilon: 1e-6,
            seed: 1,
            delta_init: None,
            delta_max: None,
            out: PathBuf::from("run"),
            skp: false,
            tol_zero: 1e-3,
            max_exploitability: 1e-3,
            continuation: ContinuationConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cards < MIN_CARDS {
            return Err(Error::InvalidSpec(format!(
                "the deck needs more than 3 cards, got {}",
                self.n_cards
            )));
        }
        if self.skp && self.n_cards != 4 {
            return Err(Error::InvalidSpec("simplified Kuhn poker uses 4 cards".into()));
        }
        for (name, v) in [
            ("pot_stop", self.pot_stop),
            ("epsilon", self.epsilon),
            ("tol_zero", self.tol_zero),
            ("max_exploitability", self.max_exploitability),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")));
            }
        }
        self.continuation_config().validate()
    }

    pub fn spec(&self) -> Result<GameSpec> {
        let variant = if self.skp { Variant::Simplified } else { Variant::Full };
        GameSpec::with_variant(self.n_cards, variant)
    }

    pub fn continuation_config(&self) -> ContinuationConfig {
        let mut c = self.continuation.clone();
        c.epsilon_target = self.epsilon;
        c.epsilon_start = c.epsilon_start.max(self.epsilon);
        c.p_stop = self.pot_stop;
        c.rng_seed = self.seed;
        if let Some(d) = self.delta_init {
            c.delta_init = d;
        }
        if let Some(d) = self.delta_max {
            c.delta_max = d;
        }
        c
    }
}
