//! Corpus sampling, empirical estimators and finite-sample bounds.

mod bounds;
mod corpus;
mod frequency;
mod ngram;
mod stats;

pub use bounds::{
    chebyshev_log_bound, complexity_gricean, complexity_uniform, g_bound, hoeffding_bound,
    sample_complexity_curve, ChebyshevBound, GBound,
};
pub use corpus::{sample_corpus, Corpus, Sampler, DEFAULT_MAX_LEN_GUARD, TRUNCATION_WARNING_RATE};
pub use frequency::{FrequencyModel, UNKNOWN_FLOOR};
pub use ngram::{ngram_fit, NgramModel, NgramProb, State, DEFAULT_ORDER};
pub use stats::{corpus_stats, CorpusStats};
