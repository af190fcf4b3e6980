use crate::enttest::{
    classify, default_threshold, erratum_condition, gricean_score, s_score, test_independent,
    test_nonredundant_strict, test_uniform, test_uniform_omega, u_score, write_verdicts_csv,
    Scores,
};
use crate::error::Result;
use crate::marginal::enumerate_texts;
use crate::semantics::{strictly_entails, Denotation};
use crate::speakers::{static_rsa_factorization, Speaker, SpeakerModel};

use super::{ExperimentConfig, ExperimentSpec, Report};

/// Non-entailing residuals must clear this gap for a dichotomy to count as separated.
pub const SEPARATION_GAP: f64 = 1e-6;

/// `true` when `r` sits on the side of the dichotomy that `entails` predicts.
fn dichotomy(r: f64, entails: bool, tol: f64) -> bool {
    if entails {
        r.abs() < tol
    } else {
        r.is_nan() || r.abs() > SEPARATION_GAP
    }
}

/// Scores every ordered pair against the exact text table and checks the
/// theorems that apply to the configured speaker family.
pub fn run_exhaustive_test(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let ExperimentSpec::ExhaustiveTest {
        max_len,
        threshold_factor,
        budget,
    } = config.experiment
    else {
        return Err(crate::Error::Config(
            "run_exhaustive_test needs an exhaustive-test config".into(),
        ));
    };
    let loaded = config.language.build()?;
    let speaker = config.speaker.build(&loaded)?;
    let cost = config.speaker.cost(&loaded)?;
    let lang = speaker.language().clone();
    let ws = speaker.worlds().clone();
    let tol = config.tolerance;
    let table = enumerate_texts(&speaker, max_len, budget as u128)?;

    let mut report = Report::new(config);
    report.meta("speaker_kind", format!("{:?}", speaker.kind()));
    report.meta("max_len", max_len);
    report.meta("threshold_factor", threshold_factor);
    report.meta("truncated", "0/0");
    report.meta("table_entries", table.len());
    let norm = table.normalization_residual();
    let additivity = table.prefix_additivity_residual();
    report.meta("normalization_residual", format!("{norm:e}"));
    report.meta("prefix_additivity_residual", format!("{additivity:e}"));
    report.check(
        "table normalization and prefix additivity",
        2,
        usize::from(norm < tol) + usize::from(additivity < tol),
    );

    let eos = lang.eos();
    let n = lang.len();
    let full = Denotation::full(lang.n_worlds());
    let tau = (0..n).find(|&i| lang.denotation(i) == full).unwrap_or(eos);

    let mut verdicts = Vec::with_capacity(n * n);
    // (checked, passed) per check
    let mut uniform = (0, 0);
    let mut uniform_omega = (0, 0);
    let mut tau_form = (0, 0);
    let mut marginal_form = (0, 0);
    let mut agreement = (0, 0);
    let mut strict = (0, 0);
    let mut strict_sentences = (0, 0);
    let mut entailing_g = (0, 0);
    let mut erratum = (0, 0);
    let mut marginal_skipped = 0;
    let tally = |t: &mut (usize, usize), ok: bool| {
        t.0 += 1;
        t.1 += usize::from(ok);
    };

    // the marginal form needs g(w) constant over worlds
    let g_values = match &speaker {
        SpeakerModel::Factorized(s) => Some(s.g().to_vec()),
        SpeakerModel::StaticRsa(s) => Some(static_rsa_factorization(s)?.g),
        _ => None,
    };
    let constant_g = g_values.as_ref().is_some_and(|g| {
        let (lo, hi) = g
            .iter()
            .fold((f64::INFINITY, 0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo <= tol * hi
    });

    let gricean = match &speaker {
        SpeakerModel::Gricean(g) => Some(g),
        _ => None,
    };

    for x in 0..n {
        for y in 0..n {
            let entails = lang.denotation(x).is_subset(lang.denotation(y));
            let mut scores = Scores {
                g: gricean_score(&table, x, y).ok(),
                s: s_score(&table, x, y, &cost).ok(),
                u: u_score(&table, x, y).ok(),
                uniform_residual: test_uniform(&table, x, y).ok(),
                independent_residual: None,
                erratum_residual: None,
            };
            match &speaker {
                SpeakerModel::Uniform(_) => {
                    if let Some(r) = scores.uniform_residual {
                        tally(&mut uniform, dichotomy(r, entails, tol));
                    }
                    if let Ok(r) = test_uniform_omega(&table, x, y) {
                        tally(&mut uniform_omega, dichotomy(r, entails, tol));
                    }
                }
                SpeakerModel::Factorized(_) | SpeakerModel::StaticRsa(_) => {
                    if let Ok(r) = test_independent(&table, x, y, tau) {
                        scores.independent_residual = Some(r.tau_form);
                        tally(&mut tau_form, dichotomy(r.tau_form, entails, tol));
                        if !constant_g {
                            marginal_skipped += 1;
                        } else {
                            tally(&mut marginal_form, dichotomy(r.marginal_form, entails, tol));
                            let agree = if r.tau_form.is_finite() || r.marginal_form.is_finite() {
                                (r.tau_form - r.marginal_form).abs() < tol
                            } else {
                                r.tau_form == r.marginal_form
                            };
                            tally(&mut agreement, agree);
                        }
                    }
                }
                SpeakerModel::Nonredundant(_) => {
                    let ok = test_nonredundant_strict(&table, x, y)?
                        == strictly_entails(lang.utterance(x), lang.utterance(y));
                    tally(&mut strict, ok);
                    // ω ends every text, so p(xω) > 0 even though x strictly entails it
                    if x != eos && y != eos {
                        tally(&mut strict_sentences, ok);
                    }
                }
                SpeakerModel::Gricean(_) | SpeakerModel::DynamicRsa(_) => {
                    if entails {
                        tally(&mut entailing_g, scores.g.is_some_and(|g| g.abs() < tol));
                    }
                }
            }
            if let Some(gs) = gricean {
                let terms = erratum_condition(gs, x, y)?;
                scores.erratum_residual = Some(terms.residual);
                if !entails && scores.g.is_some_and(|g| g.abs() < tol) {
                    tally(&mut erratum, terms.residual.abs() < tol * terms.i_const);
                }
            }
            let threshold = default_threshold(&lang, &ws, x, y, threshold_factor);
            verdicts.push(classify(&lang, &ws, x, y, scores, tol, Some(threshold)));
        }
    }

    match &speaker {
        SpeakerModel::Uniform(_) => {
            report.check("uniform test dichotomy", uniform.0, uniform.1);
            report.check(
                "uniform omega test dichotomy",
                uniform_omega.0,
                uniform_omega.1,
            );
        }
        SpeakerModel::Factorized(_) | SpeakerModel::StaticRsa(_) => {
            report.check(
                "independent test dichotomy (tautology form)",
                tau_form.0,
                tau_form.1,
            );
            if constant_g {
                report.check(
                    "independent test dichotomy (marginal form)",
                    marginal_form.0,
                    marginal_form.1,
                );
                report.check(
                    "tautology and marginal forms agree",
                    agreement.0,
                    agreement.1,
                );
            } else {
                report.summary.push(format!(
                    "skip marginal form on {marginal_skipped} pairs: g(w) varies across worlds"
                ));
            }
        }
        SpeakerModel::Nonredundant(_) => {
            report.check(
                "strict entailment test matches denotations",
                strict.0,
                strict.1,
            );
            report.summary.push(format!(
                "info sentence pairs without ω: {}/{} match",
                strict_sentences.1, strict_sentences.0
            ));
        }
        SpeakerModel::Gricean(_) | SpeakerModel::DynamicRsa(_) => {
            let mut checked = 0;
            let mut passed = 0;
            for x in lang.content_utterances() {
                // ln p(xω) − ln p(xx) = c(x) − c(ω)
                let lhs = table.get(&[x, eos]).map(|e| e.log_prob);
                let rhs = table.get(&[x, x]).map(|e| e.log_prob);
                checked += 1;
                if let (Some(a), Some(b)) = (lhs, rhs) {
                    passed += usize::from(((a - b) - (cost.of(x) - cost.of(eos))).abs() < tol);
                }
            }
            report.check("cost identity", checked, passed);
            report.check("entailing pairs have zero g", entailing_g.0, entailing_g.1);
            if gricean.is_some() {
                report.check(
                    "near-zero non-entailing g satisfies the revised condition",
                    erratum.0,
                    erratum.1,
                );
            }
        }
    }

    let mut buf = Vec::new();
    write_verdicts_csv(&lang, &verdicts, &mut buf)?;
    report.body = String::from_utf8(buf).expect("csv is utf-8");
    Ok(report)
}
