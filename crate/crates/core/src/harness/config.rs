use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{all_four_vertex_graphs, generate_erdos_renyi, ProblemInstance, ProblemKind};
use crate::qaoa::Variant;
use crate::rng::derive_seed;
use crate::subspace::binomial;
use crate::tuner::{AngleStrategy, TunerConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Subset size as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KRule {
    /// `k = n / 2`, rounded down.
    Half,
    Fixed(usize),
}

impl KRule {
    pub fn k(self, n: usize) -> usize {
        match self {
            KRule::Half => n / 2,
            KRule::Fixed(k) => k,
        }
    }
}

/// One ensemble experiment, as read from its JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kinds: Vec<ProblemKind>,
    pub n_values: Vec<usize>,
    #[serde(default = "default_k_rule")]
    pub k_rule: KRule,
    #[serde(default = "default_edge_probability")]
    pub edge_probability: f64,
    #[serde(default = "default_instances_per_n")]
    pub instances_per_n: usize,
    /// Use all 64 labelled four-vertex graphs instead of random ones at `n = 4`.
    #[serde(default = "default_true")]
    pub exhaustive_n4: bool,
    pub variants: Vec<Variant>,
    #[serde(default = "default_targets")]
    pub targets: Vec<f64>,
    /// Round cap; `ceil(4 sqrt(C(n, k)))` per instance when absent.
    #[serde(default)]
    pub p_cap: Option<usize>,
    #[serde(default = "default_strategy")]
    pub angle_strategy: AngleStrategy,
    #[serde(default)]
    pub tuner: TunerConfig,
    pub master_seed: u64,
    /// Not part of the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn default_k_rule() -> KRule {
    KRule::Half
}
fn default_edge_probability() -> f64 {
    0.5
}
fn default_instances_per_n() -> usize {
    40
}
fn default_true() -> bool {
    true
}
fn default_targets() -> Vec<f64> {
    vec![0.99, 0.95]
}
fn default_strategy() -> AngleStrategy {
    AngleStrategy::GradientDescent
}

/// A generated instance together with its position in the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub index: usize,
    pub instance: ProblemInstance,
}

impl ExperimentConfig {
    /// Config with defaults for everything but the required fields.
    pub fn new(kinds: Vec<ProblemKind>, n_values: Vec<usize>, variants: Vec<Variant>, master_seed: u64) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            kinds,
            n_values,
            k_rule: default_k_rule(),
            edge_probability: default_edge_probability(),
            instances_per_n: default_instances_per_n(),
            exhaustive_n4: true,
            variants,
            targets: default_targets(),
            p_cap: None,
            angle_strategy: default_strategy(),
            tuner: TunerConfig::default(),
            master_seed,
            out_dir: None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.kinds.is_empty() || self.n_values.is_empty() || self.variants.is_empty() || self.targets.is_empty() {
            return Err(Error::invalid("kinds, n_values, variants and targets must be non-empty"));
        }
        if let Some(t) = self.targets.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::invalid(format!("target ratio {t} outside (0, 1]")));
        }
        if self.p_cap == Some(0) {
            return Err(Error::invalid("p_cap must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return Err(Error::invalid("edge_probability must lie in [0, 1]"));
        }
        if self.instances_per_n == 0 {
            return Err(Error::invalid("instances_per_n must be positive"));
        }
        self.tuner.validate()?;
        for &kind in &self.kinds {
            for &n in &self.n_values {
                let k = self.k_rule.k(n);
                if k == 0 || k >= n || (kind == ProblemKind::Bisection && 2 * k != n) {
                    return Err(Error::invalid(format!("k = {k} is not valid for {kind} at n = {n}")));
                }
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form, ignoring `out_dir`.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out_dir = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn p_cap_for(&self, n: usize, k: usize) -> usize {
        self.p_cap.unwrap_or_else(|| {
            let dim = binomial(n as u64, k as u64).unwrap_or(u128::MAX) as f64;
            (4.0 * dim.sqrt()).ceil() as usize
        })
    }

    /// Seed of random instance `index` at size `n`; shared by all problem kinds.
    pub fn instance_seed(&self, n: usize, index: usize) -> u64 {
        derive_seed(self.master_seed, &[n as u64, index as u64])
    }

    /// The instances of one `(kind, n)` cell.
    pub fn ensemble(&self, kind: ProblemKind, n: usize) -> Result<Vec<EnsembleMember>> {
        let k = self.k_rule.k(n);
        if n == 4 && self.exhaustive_n4 {
            return all_four_vertex_graphs()
                .into_iter()
                .enumerate()
                .map(|(index, g)| {
                    Ok(EnsembleMember {
                        index,
                        instance: ProblemInstance::new(g, kind, k)?,
                    })
                })
                .collect();
        }
        (0..self.instances_per_n)
            .map(|index| {
                let seed = self.instance_seed(n, index);
                let g = generate_erdos_renyi(n, self.edge_probability, seed)?;
                Ok(EnsembleMember {
                    index,
                    instance: ProblemInstance::new(g, kind, k)?.with_seed(Some(seed)),
                })
            })
            .collect()
    }
}
