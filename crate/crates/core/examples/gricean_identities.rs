//! Gricean speaker with α = 5 over a literal listener. The end-of-text
//! probability recovers utterance cost, and g vanishes on entailing pairs.
//!
//! cargo run --example gricean_identities

use entail_lab::enttest::{cost_recovery, erratum_condition, gricean_score};
use entail_lab::marginal::{enumerate_texts, DEFAULT_BUDGET};
use entail_lab::semantics::make_synthetic_language;
use entail_lab::speakers::GriceanSpeaker;

fn main() -> entail_lab::Result<()> {
    let (ws, lang) = make_synthetic_language(3)?;
    let speaker = GriceanSpeaker::literal(lang.clone(), ws, 5.0, 0.1)?;
    let table = enumerate_texts(&speaker, 3, DEFAULT_BUDGET)?;
    let c_omega = 0.3;

    println!("recovered costs (true cost 0.3 each):");
    for x in lang.content_utterances() {
        println!(
            "  c({}) = {:.12}",
            lang.utterance(x).display,
            cost_recovery(&table, x, c_omega)?
        );
    }

    println!(
        "\n{:>4} {:>4} {:>8} {:>12} {:>12}",
        "x", "y", "entails", "g", "p(Y)I(Y)-I"
    );
    for x in lang.content_utterances() {
        for y in lang.content_utterances() {
            let g = gricean_score(&table, x, y)?;
            let e = erratum_condition(&speaker, x, y)?;
            let entails = lang.denotation(x).is_subset(lang.denotation(y));
            println!(
                "{:>4} {:>4} {:>8} {:>12.4e} {:>12.4e}",
                lang.utterance(x).display,
                lang.utterance(y).display,
                entails,
                g,
                e.residual
            );
        }
    }
    Ok(())
}
