use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ExecConfig;
use crate::gbdt::GbdtConfig;
use crate::strategies::Strategy;

/// Target of the fault-revealing classifier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// Positive when every killing test reveals the fault.
    #[default]
    Binary,
    /// Squared-loss regression on the fault-revealing ratio.
    Ratio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub seed: u64,
    pub gbdt: GbdtConfig,
    pub label_mode: LabelMode,
    pub strategies: Vec<Strategy>,
    /// Percent of the live mutants.
    pub budgets: Vec<f64>,
    pub repetitions: usize,
    pub k: usize,
    pub threshold: f64,
    pub exec: ExecConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus: PathBuf::from("data/corpus"),
            seed: 7,
            gbdt: GbdtConfig::default(),
            label_mode: LabelMode::Binary,
            strategies: Strategy::ALL.to_vec(),
            budgets: vec![2.0, 5.0, 10.0, 20.0],
            repetitions: 100,
            k: 10,
            threshold: 0.25,
            exec: ExecConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// TOML, or JSON when the file name ends in `.json`. A relative corpus
    /// path is resolved against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig = if path.extension().and_then(|e| e.to_str()) == Some("json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        if cfg.corpus.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.corpus = dir.join(&cfg.corpus);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(b) = self.budgets.iter().find(|b| !(**b > 0.0 && **b <= 100.0)) {
            return Err(Error::Config(format!("budget {b} outside (0, 100]")));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::Config(format!("threshold {} outside (0, 1]", self.threshold)));
        }
        if self.k < 2 {
            return Err(Error::Config("k must be at least 2".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("no strategies".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("c.toml");
        std::fs::write(&t, "corpus = \"/c\"\nseed = 3\nbudgets = [5.0]\n[gbdt]\ntrees = 10\n").unwrap();
        let j = dir.path().join("c.json");
        std::fs::write(&j, r#"{"corpus": "/c", "seed": 3, "budgets": [5.0], "gbdt": {"trees": 10}}"#).unwrap();
        let a = ExperimentConfig::load(&t).unwrap();
        assert_eq!(a, ExperimentConfig::load(&j).unwrap());
        assert_eq!(a.gbdt.trees, 10);
        assert_eq!(a.gbdt.depth, 5);
        assert_eq!(a.repetitions, 100);
    }

    #[test]
    fn invalid_values_are_rejected() {
        let bad = ExperimentConfig {
            budgets: vec![0.0],
            ..Default::default()
        };
        assert_eq!(bad.validate().unwrap_err().exit_code(), 1);
        let bad = ExperimentConfig {
            threshold: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let round = ExperimentConfig::default();
        assert_eq!(toml::from_str::<ExperimentConfig>(&round.to_toml()).unwrap(), round);
    }
}
