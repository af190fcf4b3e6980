//! A nonredundant speaker never says something already implied, so
//! p(xy) = 0 exactly when x strictly entails y. The (x, ω) rows show why ω
//! breaks that reading: ω is a tautology but also ends every text.
//!
//! cargo run --example nonredundant

use entail_lab::enttest::test_nonredundant_strict;
use entail_lab::marginal::{enumerate_texts, DEFAULT_BUDGET};
use entail_lab::semantics::make_synthetic_language;
use entail_lab::speakers::NonredundantTruthful;

fn main() -> entail_lab::Result<()> {
    let (ws, lang) = make_synthetic_language(3)?;
    let speaker = NonredundantTruthful::new(lang.clone(), ws)?;
    let table = enumerate_texts(&speaker, 3, DEFAULT_BUDGET)?;
    let mut mismatches = 0;
    for x in 0..lang.len() {
        for y in 0..lang.len() {
            let (dx, dy) = (lang.denotation(x), lang.denotation(y));
            let strict = dx.is_subset(dy) && dx != dy;
            let said = test_nonredundant_strict(&table, x, y)?;
            if said != strict {
                mismatches += 1;
                println!(
                    "mismatch {} {}: test {said}, denotations {strict}",
                    lang.utterance(x).display,
                    lang.utterance(y).display
                );
            }
        }
    }
    println!(
        "{mismatches} mismatches over {} ordered pairs",
        lang.len() * lang.len()
    );
    Ok(())
}
