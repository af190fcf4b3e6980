//! Speaker families: conditional next-utterance distributions `p(y | x, w)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semantics::{Language, LoadedLanguage, WorldSpace};

mod dynamic_rsa;
mod factorized;
mod gricean;
mod nonredundant;
mod static_rsa;
mod uniform;

pub use dynamic_rsa::{DynamicRsaSpeaker, ListenerTable};
pub use factorized::FactorizedTruthful;
pub use gricean::{conditional_information, GriceanSpeaker};
pub use nonredundant::NonredundantTruthful;
pub use static_rsa::{static_rsa_factorization, Factorization, StaticRsaSpeaker};
pub use uniform::UniformTruthful;

/// Per-utterance cost, additive over texts.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    costs: Vec<f64>,
}

impl CostFunction {
    pub fn new(costs: Vec<f64>) -> Result<Self> {
        if let Some(c) = costs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::Parameter(format!(
                "costs must be finite and nonnegative, got {c}"
            )));
        }
        Ok(Self { costs })
    }

    pub fn zero(lang: &Language) -> Self {
        Self {
            costs: vec![0.0; lang.len()],
        }
    }

    /// `c(x) = coefficient · |x|` where `|x|` is the display label length.
    pub fn length_proportional(lang: &Language, coefficient: f64) -> Result<Self> {
        Self::new(
            lang.utterances()
                .iter()
                .map(|u| coefficient * u.display.chars().count() as f64)
                .collect(),
        )
    }

    /// Length-proportional costs with explicit per-utterance replacements.
    pub fn with_overrides(
        lang: &Language,
        coefficient: f64,
        overrides: &[Option<f64>],
    ) -> Result<Self> {
        let mut c = Self::length_proportional(lang, coefficient)?;
        for (slot, o) in c.costs.iter_mut().zip(overrides) {
            if let Some(v) = o {
                *slot = *v;
            }
        }
        Self::new(c.costs)
    }

    pub fn of(&self, utterance: usize) -> f64 {
        self.costs[utterance]
    }

    pub fn text(&self, tokens: &[usize]) -> f64 {
        tokens.iter().map(|&t| self.costs[t]).sum()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    fn check(&self, lang: &Language) -> Result<()> {
        if self.costs.len() != lang.len() {
            return Err(Error::Structure(format!(
                "cost table has {} entries for {} utterances",
                self.costs.len(),
                lang.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeakerKind {
    UniformTruthful,
    FactorizedTruthful,
    StaticRsa,
    DynamicRsa,
    DynamicGricean,
    NonredundantTruthful,
}

/// Conditional next-utterance distribution over a fixed language.
pub trait Speaker {
    fn language(&self) -> &Language;
    fn worlds(&self) -> &WorldSpace;
    fn kind(&self) -> SpeakerKind;

    /// `ln p(· | context, w)`, one entry per utterance (ω included).
    fn log_next(&self, context: &[usize], w: usize) -> Result<Vec<f64>>;

    /// True when `p(y | x, w)` never depends on `x`.
    fn context_free(&self) -> bool {
        false
    }

    fn next(&self, context: &[usize], w: usize) -> Result<Vec<f64>> {
        Ok(self
            .log_next(context, w)?
            .into_iter()
            .map(f64::exp)
            .collect())
    }
}

pub(crate) fn check_world(ws: &WorldSpace, w: usize) -> Result<()> {
    if w >= ws.size() {
        return Err(Error::Domain(format!(
            "world {w} outside space of {}",
            ws.size()
        )));
    }
    Ok(())
}

pub(crate) fn check_compatible(lang: &Language, ws: &WorldSpace) -> Result<()> {
    if lang.n_worlds() != ws.size() {
        return Err(Error::Structure(format!(
            "language over {} worlds paired with a space of {}",
            lang.n_worlds(),
            ws.size()
        )));
    }
    Ok(())
}

pub(crate) fn check_prior(prior: &[f64], ws: &WorldSpace) -> Result<()> {
    if prior.len() != ws.size() {
        return Err(Error::Structure(format!(
            "listener prior has {} entries for {} worlds",
            prior.len(),
            ws.size()
        )));
    }
    WorldSpace::new(prior.to_vec()).map(|_| ())
}

/// Any of the concrete speaker families.
#[derive(Debug, Clone)]
pub enum SpeakerModel {
    Uniform(UniformTruthful),
    Factorized(FactorizedTruthful),
    StaticRsa(StaticRsaSpeaker),
    DynamicRsa(DynamicRsaSpeaker),
    Gricean(GriceanSpeaker),
    Nonredundant(NonredundantTruthful),
}

impl SpeakerModel {
    fn inner(&self) -> &dyn Speaker {
        match self {
            SpeakerModel::Uniform(s) => s,
            SpeakerModel::Factorized(s) => s,
            SpeakerModel::StaticRsa(s) => s,
            SpeakerModel::DynamicRsa(s) => s,
            SpeakerModel::Gricean(s) => s,
            SpeakerModel::Nonredundant(s) => s,
        }
    }
}

impl Speaker for SpeakerModel {
    fn language(&self) -> &Language {
        self.inner().language()
    }
    fn worlds(&self) -> &WorldSpace {
        self.inner().worlds()
    }
    fn kind(&self) -> SpeakerKind {
        self.inner().kind()
    }
    fn log_next(&self, context: &[usize], w: usize) -> Result<Vec<f64>> {
        self.inner().log_next(context, w)
    }
    fn context_free(&self) -> bool {
        self.inner().context_free()
    }
}

fn default_cost_coefficient() -> f64 {
    0.1
}

fn default_alpha() -> f64 {
    5.0
}

/// Speaker part of a config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpeakerSpec {
    Uniform {},
    Factorized {
        /// Weight per utterance id; missing ids weigh 1.
        #[serde(default)]
        f: BTreeMap<String, f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<Vec<f64>>,
    },
    StaticRsa {
        depth: i32,
        #[serde(default = "default_cost_coefficient")]
        cost_coefficient: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<Vec<f64>>,
    },
    DynamicRsa {
        depth: i32,
        #[serde(default = "default_cost_coefficient")]
        cost_coefficient: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<Vec<f64>>,
    },
    Gricean {
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_cost_coefficient")]
        cost_coefficient: f64,
        #[serde(default)]
        listener_depth: i32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<Vec<f64>>,
    },
    Nonredundant {},
}

impl Default for SpeakerSpec {
    fn default() -> Self {
        SpeakerSpec::Gricean {
            alpha: 5.0,
            cost_coefficient: 0.1,
            listener_depth: 0,
            prior: None,
        }
    }
}

impl SpeakerSpec {
    /// Cost function this spec implies over `loaded`; zero for cost-free families.
    pub fn cost(&self, loaded: &LoadedLanguage) -> Result<CostFunction> {
        let coefficient = match self {
            SpeakerSpec::StaticRsa {
                cost_coefficient, ..
            }
            | SpeakerSpec::DynamicRsa {
                cost_coefficient, ..
            }
            | SpeakerSpec::Gricean {
                cost_coefficient, ..
            } => *cost_coefficient,
            _ => return Ok(CostFunction::zero(&loaded.language)),
        };
        if !(coefficient.is_finite() && coefficient >= 0.0) {
            return Err(Error::Parameter(format!(
                "cost coefficient must be nonnegative, got {coefficient}"
            )));
        }
        CostFunction::with_overrides(&loaded.language, coefficient, &loaded.cost_overrides)
    }

    pub fn build(&self, loaded: &LoadedLanguage) -> Result<SpeakerModel> {
        let lang = loaded.language.clone();
        let ws = loaded.worlds.clone();
        let cost = self.cost(loaded)?;
        let prior_or = |p: &Option<Vec<f64>>| p.clone().unwrap_or_else(|| ws.prior().to_vec());
        Ok(match self {
            SpeakerSpec::Uniform {} => SpeakerModel::Uniform(UniformTruthful::new(lang, ws)?),
            SpeakerSpec::Factorized { f, g } => {
                let mut fv = vec![1.0; lang.len()];
                for (id, v) in f {
                    fv[lang.index_of(id)?] = *v;
                }
                let gv = g.clone().unwrap_or_else(|| vec![1.0; ws.size()]);
                SpeakerModel::Factorized(FactorizedTruthful::new(lang, ws, fv, gv)?)
            }
            SpeakerSpec::StaticRsa { depth, prior, .. } => {
                let p = prior_or(prior);
                SpeakerModel::StaticRsa(StaticRsaSpeaker::new(lang, ws, *depth, cost, p)?)
            }
            SpeakerSpec::DynamicRsa { depth, prior, .. } => {
                let p = prior_or(prior);
                SpeakerModel::DynamicRsa(DynamicRsaSpeaker::new(lang, ws, *depth, cost, p)?)
            }
            SpeakerSpec::Gricean {
                alpha,
                listener_depth,
                prior,
                ..
            } => {
                let p = prior_or(prior);
                let listener =
                    ListenerTable::new(lang.clone(), ws.clone(), *listener_depth, cost.clone(), p)?;
                SpeakerModel::Gricean(GriceanSpeaker::new(*alpha, cost, listener)?)
            }
            SpeakerSpec::Nonredundant {} => {
                SpeakerModel::Nonredundant(NonredundantTruthful::new(lang, ws)?)
            }
        })
    }
}
