//! Prefix-frequency estimator `p̂(z) = #{i : z prefixes Z_i} / n`.

use crate::error::Result;
use crate::logspace::ln;
use crate::marginal::TextScorer;
use crate::semantics::Language;

use super::Corpus;

/// Probability reported for unseen texts under LM-style scoring.
pub const UNKNOWN_FLOOR: f64 = 1e-20;

/// Prefix counts stored as a trie; node 0 is the empty prefix.
#[derive(Debug, Clone)]
pub struct FrequencyModel {
    lang: Language,
    counts: Vec<u64>,
    /// `children[node * |𝒳| + y]`, 0 meaning absent
    children: Vec<u32>,
    epsilon_unknown: f64,
    floor_enabled: bool,
}

impl FrequencyModel {
    pub fn new(lang: Language) -> Self {
        let v = lang.len();
        Self {
            lang,
            counts: vec![0],
            children: vec![0; v],
            epsilon_unknown: UNKNOWN_FLOOR,
            floor_enabled: false,
        }
    }

    pub fn from_corpus(lang: Language, corpus: &Corpus) -> Self {
        let mut m = Self::new(lang);
        for t in &corpus.texts {
            m.add_text(t);
        }
        m
    }

    /// Turns on LM-style scoring: unseen texts score `epsilon_unknown`.
    pub fn with_floor(mut self, epsilon_unknown: f64) -> Self {
        self.floor_enabled = true;
        self.epsilon_unknown = epsilon_unknown;
        self
    }

    pub fn epsilon_unknown(&self) -> f64 {
        self.epsilon_unknown
    }

    pub fn add_text(&mut self, tokens: &[usize]) {
        let v = self.lang.len();
        let mut node = 0usize;
        self.counts[0] += 1;
        for &t in tokens {
            let slot = node * v + t;
            let mut next = self.children[slot] as usize;
            if next == 0 {
                next = self.counts.len();
                self.counts.push(0);
                self.children.extend(std::iter::repeat_n(0, v));
                self.children[slot] = next as u32;
            }
            self.counts[next] += 1;
            node = next;
        }
    }

    /// Corpus size.
    pub fn n(&self) -> u64 {
        self.counts[0]
    }

    pub fn node(&self, z: &[usize]) -> Option<usize> {
        self.walk(0, z)
    }

    /// Follows `tokens` from `node`.
    pub fn walk(&self, mut node: usize, tokens: &[usize]) -> Option<usize> {
        let v = self.lang.len();
        for &t in tokens {
            match self.children[node * v + t] {
                0 => return None,
                c => node = c as usize,
            }
        }
        Some(node)
    }

    pub fn child(&self, node: usize, y: usize) -> Option<usize> {
        match self.children[node * self.lang.len() + y] {
            0 => None,
            c => Some(c as usize),
        }
    }

    pub fn count(&self, node: usize) -> u64 {
        self.counts[node]
    }

    pub fn prefix_count(&self, z: &[usize]) -> u64 {
        self.node(z).map_or(0, |n| self.counts[n])
    }

    /// Raw `count / n`; zero for unseen prefixes.
    pub fn prefix_frequency(&self, z: &[usize]) -> f64 {
        if self.n() == 0 {
            return 0.0;
        }
        self.prefix_count(z) as f64 / self.n() as f64
    }

    /// Prefix frequency with unseen texts lifted to the floor.
    pub fn floored(&self, z: &[usize]) -> f64 {
        let p = self.prefix_frequency(z);
        if p == 0.0 {
            self.epsilon_unknown
        } else {
            p
        }
    }
}

impl TextScorer for FrequencyModel {
    fn language(&self) -> &Language {
        &self.lang
    }

    fn log_prob(&self, z: &[usize]) -> Result<f64> {
        self.lang.check_tokens(z)?;
        Ok(if self.floor_enabled {
            self.floored(z).ln()
        } else {
            ln(self.prefix_frequency(z))
        })
    }
}
