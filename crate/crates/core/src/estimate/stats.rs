//! Descriptive statistics of a corpus.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::semantics::Language;

use super::Corpus;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub n: usize,
    /// Occurrences per utterance, ω included.
    pub utterance_counts: Vec<u64>,
    /// Texts per count of non-ω tokens.
    pub length_histogram: BTreeMap<usize, u64>,
    /// Adjacent non-ω token pairs whose denotations are equal, over all such pairs.
    pub redundancy_rate: f64,
    /// Texts ending in ω, over all texts.
    pub omega_fraction: f64,
    pub mean_length: f64,
}

pub fn corpus_stats(corpus: &Corpus, lang: &Language) -> Result<CorpusStats> {
    if corpus.texts.is_empty() {
        return Err(Error::Parameter("corpus is empty".into()));
    }
    let eos = lang.eos();
    let mut counts = vec![0u64; lang.len()];
    let mut lengths = BTreeMap::new();
    let (mut adjacent, mut repeated, mut ended, mut total_len) = (0u64, 0u64, 0u64, 0u64);
    for t in &corpus.texts {
        lang.check_tokens(t)?;
        for &x in t {
            counts[x] += 1;
        }
        let body: Vec<usize> = t.iter().copied().filter(|&x| x != eos).collect();
        *lengths.entry(body.len()).or_insert(0) += 1;
        total_len += body.len() as u64;
        for pair in body.windows(2) {
            adjacent += 1;
            if lang.denotation(pair[0]) == lang.denotation(pair[1]) {
                repeated += 1;
            }
        }
        if t.last() == Some(&eos) {
            ended += 1;
        }
    }
    let n = corpus.texts.len();
    Ok(CorpusStats {
        n,
        utterance_counts: counts,
        length_histogram: lengths,
        redundancy_rate: if adjacent == 0 {
            0.0
        } else {
            repeated as f64 / adjacent as f64
        },
        omega_fraction: ended as f64 / n as f64,
        mean_length: total_len as f64 / n as f64,
    })
}
