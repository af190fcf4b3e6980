//! Sample a corpus from the α = 5 Gricean speaker and compare estimated g
//! against the exact value for a few pairs, under prefix-frequency and
//! trigram estimators. For single utterances g only reads two-token
//! prefixes, where the two estimators coincide.
//!
//! cargo run --release --example corpus_estimates -- 200000

use entail_lab::enttest::gricean_score;
use entail_lab::estimate::{ngram_fit, sample_corpus, FrequencyModel};
use entail_lab::marginal::{enumerate_texts, DEFAULT_BUDGET};
use entail_lab::semantics::make_synthetic_language;
use entail_lab::speakers::GriceanSpeaker;

fn main() -> entail_lab::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(100_000, |s| s.parse().expect("n must be a count"));
    let (ws, lang) = make_synthetic_language(3)?;
    let speaker = GriceanSpeaker::literal(lang.clone(), ws, 5.0, 0.1)?;
    let exact = enumerate_texts(&speaker, 2, DEFAULT_BUDGET)?;
    let corpus = sample_corpus(&speaker, n, 7, 50, "gricean alpha=5")?;

    let mut freq = FrequencyModel::new(lang.clone());
    for t in &corpus.texts {
        freq.add_text(t);
    }
    let trigram = ngram_fit(lang.clone(), &corpus, 3)?;

    println!("{n} texts, {} truncated", corpus.truncated);
    println!(
        "{:>4} {:>4} {:>8} {:>10} {:>10} {:>10}",
        "x", "y", "entails", "exact", "frequency", "trigram"
    );
    for (x, y) in [(0, 3), (3, 0), (0, 1), (3, 4), (4, 5), (1, 3)] {
        let entails = lang.denotation(x).is_subset(lang.denotation(y));
        println!(
            "{:>4} {:>4} {:>8} {:>10.4} {:>10.4} {:>10.4}",
            lang.utterance(x).display,
            lang.utterance(y).display,
            entails,
            gricean_score(&exact, x, y)?,
            gricean_score(&freq, x, y).unwrap_or(f64::NAN),
            gricean_score(&trigram, x, y).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
