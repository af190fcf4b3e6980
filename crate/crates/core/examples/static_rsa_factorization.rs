//! A static RSA speaker factorizes as p(x|w) = f(x) g(w) on ⟦x⟧, which makes
//! it independently truthful. Prints the factors and both residual forms.
//!
//! cargo run --example static_rsa_factorization -- 2

use entail_lab::enttest::test_independent;
use entail_lab::marginal::{enumerate_texts, DEFAULT_BUDGET};
use entail_lab::semantics::make_synthetic_language;
use entail_lab::speakers::{static_rsa_factorization, CostFunction, StaticRsaSpeaker};

fn main() -> entail_lab::Result<()> {
    let depth: i32 = std::env::args()
        .nth(1)
        .map_or(1, |s| s.parse().expect("depth must be an integer"));
    let (ws, lang) = make_synthetic_language(3)?;
    let cost = CostFunction::length_proportional(&lang, 0.1)?;
    let speaker =
        StaticRsaSpeaker::new(lang.clone(), ws.clone(), depth, cost, ws.prior().to_vec())?;

    let fac = static_rsa_factorization(&speaker)?;
    println!(
        "depth {depth}, max factorization residual {:.2e}",
        fac.max_residual
    );
    for (x, f) in fac.f.iter().enumerate() {
        println!("  f({}) = {f:.6}", lang.utterance(x).display);
    }
    println!("  g = {:?}", fac.g);

    // Both forms vanish exactly on entailing pairs. The marginal form relies
    // on g being constant, which the uniform prior gives here.
    let table = enumerate_texts(&speaker, 3, DEFAULT_BUDGET)?;
    let tau = lang.eos();
    for x in lang.content_utterances() {
        for y in lang.content_utterances() {
            let r = test_independent(&table, x, y, tau)?;
            println!(
                "{} -> {}: tau form {:>12.4e}, marginal form {:>12.4e}",
                lang.utterance(x).display,
                lang.utterance(y).display,
                r.tau_form,
                r.marginal_form
            );
        }
    }
    Ok(())
}
