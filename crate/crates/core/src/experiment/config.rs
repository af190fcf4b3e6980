use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::semantics::LanguageSpec;
use crate::speakers::SpeakerSpec;

fn default_tolerance() -> f64 {
    1e-9
}
fn default_max_len() -> usize {
    crate::marginal::DEFAULT_MAX_LEN
}
fn default_threshold_factor() -> f64 {
    0.5
}
fn default_budget() -> u64 {
    crate::marginal::DEFAULT_BUDGET as u64
}
fn default_max_size() -> u64 {
    10_000_000
}
fn default_min_size() -> u64 {
    2
}
fn default_seeds() -> u32 {
    10
}
fn default_max_pair_len() -> usize {
    5
}
fn default_order() -> usize {
    crate::estimate::DEFAULT_ORDER
}
fn default_guard() -> usize {
    crate::estimate::DEFAULT_MAX_LEN_GUARD
}
fn default_sweep_worlds() -> usize {
    12
}
fn default_x_worlds() -> usize {
    8
}
fn default_lengths() -> Vec<u32> {
    (0..=10).collect()
}
fn default_delta() -> f64 {
    0.1
}
fn default_epsilon() -> f64 {
    1.0
}
fn default_perplexity() -> f64 {
    20.0
}
fn default_stats_n() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentSpec {
    ExhaustiveTest {
        #[serde(default = "default_max_len")]
        max_len: usize,
        /// Near-contradiction threshold as a fraction of `min(p(⟦x⟧), p(⟦y⟧))`.
        #[serde(default = "default_threshold_factor")]
        threshold_factor: f64,
        #[serde(default = "default_budget")]
        budget: u64,
    },
    CorpusSweep {
        /// Explicit grid; when absent, `max_size / 2^k` rounded, down to `min_size`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sizes: Option<Vec<u64>>,
        #[serde(default = "default_max_size")]
        max_size: u64,
        #[serde(default = "default_min_size")]
        min_size: u64,
        #[serde(default = "default_seeds")]
        seeds: u32,
        #[serde(default = "default_max_pair_len")]
        max_pair_len: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pair_cap: Option<usize>,
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default = "default_guard")]
        max_len_guard: usize,
    },
    CounterexampleSweep {
        #[serde(default = "default_sweep_worlds")]
        worlds: usize,
        #[serde(default = "default_x_worlds")]
        x_worlds: usize,
    },
    ComplexityCurve {
        #[serde(default = "default_lengths")]
        lengths: Vec<u32>,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_perplexity")]
        perplexity: f64,
    },
    CorpusStats {
        #[serde(default = "default_stats_n")]
        n: usize,
        #[serde(default = "default_guard")]
        max_len_guard: usize,
    },
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentSpec::ExhaustiveTest { .. } => "exhaustive-test",
            ExperimentSpec::CorpusSweep { .. } => "corpus-sweep",
            ExperimentSpec::CounterexampleSweep { .. } => "counterexample-sweep",
            ExperimentSpec::ComplexityCurve { .. } => "complexity-curve",
            ExperimentSpec::CorpusStats { .. } => "corpus-stats",
        }
    }
}

/// A validated experiment document with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub language: LanguageSpec,
    #[serde(default)]
    pub speaker: SpeakerSpec,
    pub experiment: ExperimentSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_seconds: Option<f64>,
}

fn reject(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    /// Canonical JSON of the effective config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    /// Checks every field before any computation.
    pub fn validate(&self) -> Result<()> {
        let loaded = self
            .language
            .build()
            .map_err(|e| reject(format!("language: {e}")))?;
        if let SpeakerSpec::Gricean { alpha, .. } = &self.speaker {
            if !(alpha.is_finite() && *alpha > 0.0) {
                return Err(reject(format!("speaker.alpha must be positive (a Gricean speaker needs some alpha > 0), got {alpha}")));
            }
        }
        self.speaker
            .build(&loaded)
            .map_err(|e| reject(format!("speaker: {e}")))?;
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(reject(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        if let Some(b) = self.budget_seconds {
            if !(b.is_finite() && b > 0.0) {
                return Err(reject(format!("budget_seconds must be positive, got {b}")));
            }
        }
        match &self.experiment {
            ExperimentSpec::ExhaustiveTest {
                threshold_factor, ..
            } => {
                if !(threshold_factor.is_finite() && *threshold_factor >= 0.0) {
                    return Err(reject("threshold_factor must be nonnegative"));
                }
            }
            ExperimentSpec::CorpusSweep {
                sizes,
                max_size,
                min_size,
                seeds,
                max_pair_len,
                order,
                max_len_guard,
                pair_cap,
            } => {
                if let Some(s) = sizes {
                    if s.is_empty() || s.contains(&0) {
                        return Err(reject("corpus sizes must be positive and nonempty"));
                    }
                }
                if *min_size == 0 || max_size < min_size {
                    return Err(reject(format!(
                        "need 1 <= min_size <= max_size, got {min_size} and {max_size}"
                    )));
                }
                if *seeds == 0 {
                    return Err(reject("seeds must be at least 1"));
                }
                if *max_pair_len == 0 || *order == 0 || *max_len_guard == 0 || *pair_cap == Some(0)
                {
                    return Err(reject(
                        "max_pair_len, order, max_len_guard and pair_cap must be positive",
                    ));
                }
                if !matches!(
                    self.speaker,
                    SpeakerSpec::Gricean { .. } | SpeakerSpec::DynamicRsa { .. }
                ) {
                    return Err(reject(
                        "corpus-sweep scores g, which needs a gricean or dynamic-rsa speaker",
                    ));
                }
            }
            ExperimentSpec::CounterexampleSweep { worlds, x_worlds } => {
                if *worlds > crate::semantics::MAX_WORLDS || *x_worlds == 0 || x_worlds >= worlds {
                    return Err(reject(format!(
                        "counterexample needs 1 <= x_worlds < worlds <= 64, got {x_worlds} and {worlds}"
                    )));
                }
                if !matches!(self.speaker, SpeakerSpec::Gricean { .. }) {
                    return Err(reject("counterexample-sweep needs a gricean speaker"));
                }
            }
            ExperimentSpec::ComplexityCurve {
                lengths,
                delta,
                epsilon,
                perplexity,
            } => {
                if lengths.is_empty() {
                    return Err(reject("lengths must be nonempty"));
                }
                if !(*delta > 0.0 && *delta < 1.0 && *epsilon > 0.0 && *perplexity >= 0.0) {
                    return Err(reject("need 0 < delta < 1, epsilon > 0, perplexity >= 0"));
                }
            }
            ExperimentSpec::CorpusStats { n, max_len_guard } => {
                if *n == 0 || *max_len_guard == 0 {
                    return Err(reject("n and max_len_guard must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a JSON config document.
pub fn validate_config(document: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        serde_json::from_str(document).map_err(|e| reject(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = validate_config(r#"{"experiment":{"kind":"complexity-curve"}}"#).unwrap();
        assert_eq!(cfg.tolerance, 1e-9);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.language, LanguageSpec::Synthetic { worlds: 3 });
        let json = cfg.canonical_json();
        assert!(json.contains("\"perplexity\":20.0"));
        assert!(json.contains("\"alpha\":5.0"));
        assert_eq!(cfg.sha256().len(), 64);
        let again = validate_config(&json).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = [
            r#"{"experiment":{"kind":"complexity-curve"},"speaker":{"kind":"gricean","alpha":0}}"#,
            r#"{"experiment":{"kind":"corpus-sweep","sizes":[-5]}}"#,
            r#"{"experiment":{"kind":"corpus-sweep","sizes":[0]}}"#,
            r#"{"experiment":{"kind":"complexity-curve"},"surprise":1}"#,
            r#"{"experiment":{"kind":"nope"}}"#,
            r#"{"experiment":{"kind":"counterexample-sweep","worlds":4,"x_worlds":4}}"#,
            r#"{"language":{"kind":"synthetic","worlds":0},"experiment":{"kind":"complexity-curve"}}"#,
            r#"{"experiment":{"kind":"complexity-curve"},"tolerance":-1}"#,
            "not json",
        ];
        for doc in bad {
            assert!(
                matches!(validate_config(doc), Err(Error::Config(_))),
                "{doc}"
            );
        }
        let msg = validate_config(bad[0]).unwrap_err().to_string();
        assert!(msg.contains("alpha > 0"));
    }
}
