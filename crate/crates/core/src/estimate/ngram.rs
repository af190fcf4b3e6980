//! Unsmoothed maximum-likelihood n-gram model with start padding and ω as stop.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::logspace::NEG_INF;
use crate::marginal::TextScorer;
use crate::semantics::Language;

use super::Corpus;

pub const DEFAULT_ORDER: usize = 3;

#[derive(Debug, Clone)]
struct Row {
    total: u64,
    counts: Vec<u64>,
}

/// Context state: the last `order − 1` symbols packed in base `|𝒳| + 1`,
/// where the extra symbol is the start pad.
pub type State = u64;

#[derive(Debug, Clone)]
pub struct NgramModel {
    lang: Language,
    order: usize,
    base: u64,
    modulus: u64,
    start: State,
    rows: HashMap<State, Row>,
}

/// Chain probability and whether an unseen n-gram zeroed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgramProb {
    pub prob: f64,
    pub unseen: bool,
}

impl NgramModel {
    pub fn new(lang: Language, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Parameter("n-gram order must be at least 1".into()));
        }
        let base = lang.len() as u64 + 1;
        let mut modulus: u64 = 1;
        for _ in 0..order - 1 {
            modulus = modulus.checked_mul(base).ok_or_else(|| {
                Error::Parameter(format!(
                    "order {order} too large for {} utterances",
                    lang.len()
                ))
            })?;
        }
        // all-pad context
        let pad = base - 1;
        let start = (0..order - 1).fold(0u64, |s, _| (s * base + pad) % modulus);
        Ok(Self {
            lang,
            order,
            base,
            modulus,
            start,
            rows: HashMap::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn start_state(&self) -> State {
        self.start
    }

    pub fn advance(&self, state: State, token: usize) -> State {
        if self.modulus == 1 {
            0
        } else {
            (state * self.base + token as u64) % self.modulus
        }
    }

    pub fn add_text(&mut self, tokens: &[usize]) {
        let v = self.lang.len();
        let mut s = self.start;
        for &t in tokens {
            let row = self.rows.entry(s).or_insert_with(|| Row {
                total: 0,
                counts: vec![0; v],
            });
            row.total += 1;
            row.counts[t] += 1;
            s = self.advance(s, t);
        }
    }

    /// `ln p̂(y | state)`; `-inf` when unseen.
    pub fn log_cond(&self, state: State, y: usize) -> f64 {
        match self.rows.get(&state) {
            Some(r) if r.counts[y] > 0 => (r.counts[y] as f64 / r.total as f64).ln(),
            _ => NEG_INF,
        }
    }

    /// `ln Π p̂(z_t | state)` from `state`, with the final state.
    pub fn log_chain(&self, mut state: State, z: &[usize]) -> (f64, State) {
        let mut lp = 0.0;
        for &t in z {
            lp += self.log_cond(state, t);
            state = self.advance(state, t);
        }
        (lp, state)
    }

    /// Padded chain product over `z`; ω inside `z` is scored like any token.
    pub fn ngram_prob(&self, z: &[usize]) -> NgramProb {
        let (lp, _) = self.log_chain(self.start, z);
        NgramProb {
            prob: lp.exp(),
            unseen: lp == NEG_INF,
        }
    }

    /// Conditional row for a context given as tokens (most recent last).
    pub fn conditional(&self, context: &[usize]) -> Option<Vec<f64>> {
        let s = context.iter().fold(self.start, |s, &t| self.advance(s, t));
        self.rows.get(&s).map(|r| {
            r.counts
                .iter()
                .map(|&c| c as f64 / r.total as f64)
                .collect()
        })
    }
}

/// Fits an order-`order` model to every text of `corpus`.
pub fn ngram_fit(lang: Language, corpus: &Corpus, order: usize) -> Result<NgramModel> {
    if corpus.texts.is_empty() {
        return Err(Error::Parameter(
            "cannot fit an n-gram model to an empty corpus".into(),
        ));
    }
    let mut m = NgramModel::new(lang, order)?;
    for t in &corpus.texts {
        m.add_text(t);
    }
    Ok(m)
}

impl TextScorer for NgramModel {
    fn language(&self) -> &Language {
        &self.lang
    }

    fn log_prob(&self, z: &[usize]) -> Result<f64> {
        self.lang.check_tokens(z)?;
        Ok(self.log_chain(self.start, z).0)
    }
}
