//! Recover entailment from exact text probabilities of a uniformly truthful
//! speaker on the 3-world synthetic language.
//!
//! cargo run --example uniform_entailment

use entail_lab::enttest::test_uniform;
use entail_lab::marginal::{enumerate_texts, DEFAULT_BUDGET};
use entail_lab::semantics::make_synthetic_language;
use entail_lab::speakers::UniformTruthful;

fn main() -> entail_lab::Result<()> {
    let (ws, lang) = make_synthetic_language(3)?;
    let speaker = UniformTruthful::new(lang.clone(), ws)?;
    let table = enumerate_texts(&speaker, 3, DEFAULT_BUDGET)?;

    println!("{:>4} {:>4} {:>9} {:>14}", "x", "y", "entails", "residual");
    for x in lang.content_utterances() {
        for y in 0..lang.len() {
            let r = test_uniform(&table, x, y)?;
            let entails = lang.denotation(x).is_subset(lang.denotation(y));
            println!(
                "{:>4} {:>4} {:>9} {:>14.6}",
                lang.utterance(x).display,
                lang.utterance(y).display,
                entails,
                r
            );
        }
    }
    Ok(())
}
