//! Distributional entailment tests, scores, erratum terms and the classifier.

use std::io::Write;

use crate::error::{Error, Result};
use crate::logspace::{log_sum_exp, NEG_INF};
use crate::marginal::{format_float, TextScorer};
use crate::semantics::{truth_probability, Language, WorldSpace};
use crate::speakers::{CostFunction, GriceanSpeaker, Speaker};

/// Default zero tolerance on log residuals from exact tables.
pub const EXACT_TOLERANCE: f64 = 1e-9;

fn lp<T: TextScorer + ?Sized>(d: &T, z: &[usize]) -> Result<f64> {
    d.log_prob(z)
}

fn positive<T: TextScorer + ?Sized>(d: &T, z: &[usize], what: &str) -> Result<f64> {
    let v = lp(d, z)?;
    if v == NEG_INF {
        return Err(Error::Degenerate(format!(
            "{what}: p({}) = 0",
            d.language().format_text(z)
        )));
    }
    Ok(v)
}

/// `ln p(xy) − ln p(xx)`; zero exactly when x entails y under a uniformly
/// truthful speaker. `-inf` marks a contradictory pair.
pub fn test_uniform<T: TextScorer + ?Sized>(d: &T, x: usize, y: usize) -> Result<f64> {
    let xx = positive(d, &[x, x], "test_uniform")?;
    Ok(lp(d, &[x, y])? - xx)
}

/// `ln p(xy) − ln p(xω)`.
pub fn test_uniform_omega<T: TextScorer + ?Sized>(d: &T, x: usize, y: usize) -> Result<f64> {
    let eos = d.language().eos();
    let xw = positive(d, &[x, eos], "test_uniform_omega")?;
    Ok(lp(d, &[x, y])? - xw)
}

/// Both residual forms of the independently truthful test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependentResidual {
    /// `ln p(xy) − ln p(xτ) − ln p(yy) + ln p(yτ)`
    pub tau_form: f64,
    /// `ln p(xy) − ln p(x) − ln p(yy) + ln p(y)`
    pub marginal_form: f64,
}

/// Independently truthful test with tautology `τ`. Both forms vanish
/// exactly when `⟦x⟧ ⊆ ⟦y⟧`; the marginal form needs a constant `g`.
pub fn test_independent<T: TextScorer + ?Sized>(
    d: &T,
    x: usize,
    y: usize,
    tau: usize,
) -> Result<IndependentResidual> {
    let lang = d.language();
    lang.check_tokens(&[x, y, tau])?;
    if lang.denotation(tau) != crate::semantics::Denotation::full(lang.n_worlds()) {
        return Err(Error::Parameter(format!(
            "'{}' is not a tautology",
            lang.utterance(tau).id
        )));
    }
    let xy = lp(d, &[x, y])?;
    let xt = positive(d, &[x, tau], "test_independent")?;
    let yy = positive(d, &[y, y], "test_independent")?;
    let yt = positive(d, &[y, tau], "test_independent")?;
    let px = positive(d, &[x], "test_independent")?;
    let py = positive(d, &[y], "test_independent")?;
    Ok(IndependentResidual {
        tau_form: xy - xt - yy + yt,
        marginal_form: xy - px - yy + py,
    })
}

/// `g(x, y) = ln p(xy)/p(xω) − ln p(yy)/p(yω)`. Infinite values flag
/// zero probabilities instead of raising.
pub fn gricean_score<T: TextScorer + ?Sized>(d: &T, x: usize, y: usize) -> Result<f64> {
    let eos = d.language().eos();
    let xy = lp(d, &[x, y])?;
    let xw = lp(d, &[x, eos])?;
    let yy = lp(d, &[y, y])?;
    let yw = lp(d, &[y, eos])?;
    let v = (xy - xw) - (yy - yw);
    if v.is_nan() {
        return Err(Error::Degenerate(format!(
            "g undefined for ({}, {})",
            d.language().utterance(x).id,
            d.language().utterance(y).id
        )));
    }
    Ok(v)
}

/// `c(x) = ln p(xω) − ln p(xx) + c(ω)`.
pub fn cost_recovery<T: TextScorer + ?Sized>(d: &T, x: usize, c_omega: f64) -> Result<f64> {
    let eos = d.language().eos();
    let xx = positive(d, &[x, x], "cost_recovery")?;
    Ok(lp(d, &[x, eos])? - xx + c_omega)
}

/// `ln p(xω) − ln p(xy) − c(y) + c(ω)`; `+inf` for a contradictory pair.
pub fn s_score<T: TextScorer + ?Sized>(
    d: &T,
    x: usize,
    y: usize,
    cost: &CostFunction,
) -> Result<f64> {
    let eos = d.language().eos();
    Ok(lp(d, &[x, eos])? - lp(d, &[x, y])? - cost.of(y) + cost.of(eos))
}

/// `ln p(xω) − ln p(xy)`; `+inf` for a contradictory pair.
pub fn u_score<T: TextScorer + ?Sized>(d: &T, x: usize, y: usize) -> Result<f64> {
    let eos = d.language().eos();
    Ok(lp(d, &[x, eos])? - lp(d, &[x, y])?)
}

/// `p(xy) = 0 ∧ p(yx) ≠ 0`, with exact zero tests.
pub fn test_nonredundant_strict<T: TextScorer + ?Sized>(d: &T, x: usize, y: usize) -> Result<bool> {
    Ok(lp(d, &[x, y])? == NEG_INF && lp(d, &[y, x])? != NEG_INF)
}

/// Terms of the revised zero condition `p(Y) I(Y) = I` for a Gricean speaker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErratumTerms {
    /// `p(⟦xy⟧) / p(⟦x⟧)`
    pub p_y: f64,
    /// `E[exp(α I(y|x; w)) G(x, w) | w ∈ Y]`, zero when `Y` is empty
    pub i_y: f64,
    /// `E[G(x, w) | w ∈ ⟦x⟧]`
    pub i_const: f64,
    /// `p_y · i_y − i_const`
    pub residual: f64,
    /// `ln(p_y · i_y / i_const)`; equals the g-score when `I(y|y; w) = 0` on `⟦y⟧`
    pub g: f64,
    /// `Y` is empty
    pub contradiction: bool,
}

/// Computes the revised condition with `G(x, w) = p(x | w) / Z(x, w)`,
/// `Z` being the speaker's normalizer after context `x` in `w`.
pub fn erratum_condition(speaker: &GriceanSpeaker, x: usize, y: usize) -> Result<ErratumTerms> {
    let lang = speaker.language();
    let ws = speaker.worlds();
    lang.check_tokens(&[x, y])?;
    let dx = lang.denotation(x);
    let dy = dx.intersect(lang.denotation(y));
    let cy = speaker.cost().of(y);
    let mut x_terms = Vec::new();
    let mut y_terms = Vec::new();
    for w in dx.worlds() {
        let lp_x = speaker.log_next(&[], w)?[x];
        let weights = speaker.log_weights(&[x], w)?;
        let log_g = lp_x - log_sum_exp(&weights);
        let lprior = ws.prior()[w].ln();
        x_terms.push(lprior + log_g);
        if dy.contains(w) {
            // exp(α I) = exp(weight + c(y))
            y_terms.push(lprior + log_g + weights[y] + cy);
        }
    }
    let px = truth_probability(dx, ws);
    let py = truth_probability(dy, ws);
    let sx = log_sum_exp(&x_terms).exp();
    let sy = log_sum_exp(&y_terms).exp();
    let i_const = sx / px;
    let p_y = py / px;
    let i_y = if dy.is_empty() { 0.0 } else { sy / py };
    Ok(ErratumTerms {
        p_y,
        i_y,
        i_const,
        residual: sy / px - i_const,
        g: log_sum_exp(&y_terms) - log_sum_exp(&x_terms),
        contradiction: dy.is_empty(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruth {
    /// `⟦x⟧ = ⟦y⟧`
    Entails,
    /// `⟦x⟧ ⊂ ⟦y⟧`
    StrictlyEntails,
    /// jointly satisfiable, `⟦x⟧ ⊄ ⟦y⟧`
    Incomparable,
    /// `⟦x⟧ ∩ ⟦y⟧ = ∅`
    Contradictory,
}

impl GroundTruth {
    pub fn of(lang: &Language, x: usize, y: usize) -> Self {
        let (dx, dy) = (lang.denotation(x), lang.denotation(y));
        if dx == dy {
            GroundTruth::Entails
        } else if dx.is_subset(dy) {
            GroundTruth::StrictlyEntails
        } else if dx.intersect(dy).is_empty() {
            GroundTruth::Contradictory
        } else {
            GroundTruth::Incomparable
        }
    }

    pub fn entails(self) -> bool {
        matches!(self, GroundTruth::Entails | GroundTruth::StrictlyEntails)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroundTruth::Entails => "entails",
            GroundTruth::StrictlyEntails => "strictly_entails",
            GroundTruth::Incomparable => "incomparable",
            GroundTruth::Contradictory => "contradictory",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Entails,
    EntailsOrNearContradiction,
    NotEntails,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Entails => "entails",
            Classification::EntailsOrNearContradiction => "entails_or_near_contradiction",
            Classification::NotEntails => "not_entails",
        }
    }
}

/// Scores gathered for one ordered pair. Missing entries did not apply.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scores {
    pub g: Option<f64>,
    pub s: Option<f64>,
    pub u: Option<f64>,
    pub uniform_residual: Option<f64>,
    pub independent_residual: Option<f64>,
    pub erratum_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntailmentVerdict {
    pub x: usize,
    pub y: usize,
    pub ground_truth: GroundTruth,
    pub scores: Scores,
    /// `|g| ≤ tol` alone; cannot separate entailment from near contradiction.
    pub two_way: Classification,
    /// Two-way label refined by the truth-probability threshold.
    pub classification: Classification,
    pub tolerance_used: f64,
    pub threshold_used: f64,
}

/// Truth-probability threshold `factor · min(p(⟦x⟧), p(⟦y⟧))`.
pub fn default_threshold(lang: &Language, ws: &WorldSpace, x: usize, y: usize, factor: f64) -> f64 {
    factor
        * truth_probability(lang.denotation(x), ws).min(truth_probability(lang.denotation(y), ws))
}

/// Labels a pair from its g-score. `threshold` defaults to half the smaller
/// truth probability of `x` and `y`.
pub fn classify(
    lang: &Language,
    ws: &WorldSpace,
    x: usize,
    y: usize,
    scores: Scores,
    tolerance: f64,
    threshold: Option<f64>,
) -> EntailmentVerdict {
    let threshold = threshold.unwrap_or_else(|| default_threshold(lang, ws, x, y, 0.5));
    let near_zero = scores.g.is_some_and(|g| g.abs() <= tolerance);
    let two_way = if near_zero {
        Classification::EntailsOrNearContradiction
    } else {
        Classification::NotEntails
    };
    let joint = truth_probability(lang.denotation(x).intersect(lang.denotation(y)), ws);
    let classification = match two_way {
        Classification::EntailsOrNearContradiction if joint >= threshold => Classification::Entails,
        other => other,
    };
    EntailmentVerdict {
        x,
        y,
        ground_truth: GroundTruth::of(lang, x, y),
        scores,
        two_way,
        classification,
        tolerance_used: tolerance,
        threshold_used: threshold,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// Verdict CSV, one row per pair.
pub fn write_verdicts_csv<W: Write>(
    lang: &Language,
    verdicts: &[EntailmentVerdict],
    out: W,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "x",
        "y",
        "ground_truth",
        "g",
        "s",
        "u",
        "uniform_residual",
        "independent_residual",
        "classification",
        "two_way",
        "erratum_residual",
    ])?;
    for v in verdicts {
        wtr.write_record([
            lang.utterance(v.x).id.clone(),
            lang.utterance(v.y).id.clone(),
            v.ground_truth.as_str().into(),
            opt(v.scores.g),
            opt(v.scores.s),
            opt(v.scores.u),
            opt(v.scores.uniform_residual),
            opt(v.scores.independent_residual),
            v.classification.as_str().into(),
            v.two_way.as_str().into(),
            opt(v.scores.erratum_residual),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginal::{enumerate_texts, ExactScorer, TextDistribution, DEFAULT_BUDGET};
    use crate::semantics::make_synthetic_language;
    use crate::speakers::{NonredundantTruthful, StaticRsaSpeaker, UniformTruthful};

    fn id(lang: &Language, s: &str) -> usize {
        lang.index_of(s).unwrap()
    }

    fn uniform_table() -> TextDistribution {
        let (ws, lang) = make_synthetic_language(3).unwrap();
        enumerate_texts(&UniformTruthful::new(lang, ws).unwrap(), 2, DEFAULT_BUDGET).unwrap()
    }

    fn gricean(coef: f64) -> GriceanSpeaker {
        let (ws, lang) = make_synthetic_language(3).unwrap();
        GriceanSpeaker::literal(lang, ws, 5.0, coef).unwrap()
    }

    #[test]
    fn uniform_examples() {
        let t = uniform_table();
        let lang = t.language().clone();
        let (a, b) = (id(&lang, "100"), id(&lang, "110"));
        assert!(test_uniform(&t, a, b).unwrap().abs() < 1e-12);
        assert_eq!(test_uniform(&t, b, b).unwrap(), 0.0);
        assert!((test_uniform(&t, b, a).unwrap() + 2f64.ln()).abs() < 1e-12);
        assert!(test_uniform_omega(&t, a, b).unwrap().abs() < 1e-12);
        assert!(test_uniform_omega(&t, b, b).unwrap().abs() < 1e-12);
        assert!(test_uniform_omega(&t, b, a).unwrap().abs() > 1e-6);
        assert_eq!(test_uniform(&t, a, id(&lang, "010")).unwrap(), NEG_INF);
    }

    #[test]
    fn uniform_u_and_cost_recovery() {
        let t = uniform_table();
        let lang = t.language().clone();
        let (a, b) = (id(&lang, "100"), id(&lang, "110"));
        assert!(u_score(&t, a, b).unwrap().abs() < 1e-12);
        assert_eq!(u_score(&t, a, a).unwrap(), 0.0);
        assert!(u_score(&t, b, a).unwrap() > 0.0);
        for x in 0..7 {
            assert!((cost_recovery(&t, x, 0.3).unwrap() - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn independent_examples() {
        let (ws, lang) = make_synthetic_language(3).unwrap();
        let cost = CostFunction::length_proportional(&lang, 0.1).unwrap();
        let s = StaticRsaSpeaker::new(lang.clone(), ws, 1, cost, vec![1.0 / 3.0; 3]).unwrap();
        let t = enumerate_texts(&s, 2, DEFAULT_BUDGET).unwrap();
        let eos = lang.eos();
        let r = test_independent(&t, id(&lang, "100"), id(&lang, "110"), eos).unwrap();
        assert!(r.tau_form.abs() < 1e-9 && r.marginal_form.abs() < 1e-9);
        let r = test_independent(&t, 3, 3, eos).unwrap();
        assert_eq!(r.tau_form, 0.0);
        let r = test_independent(&t, id(&lang, "110"), id(&lang, "011"), eos).unwrap();
        assert!(r.tau_form.abs() > 1e-6);
        assert!((r.tau_form - r.marginal_form).abs() < 1e-9);
        assert!(matches!(
            test_independent(&t, 0, 1, 3),
            Err(Error::Parameter(_))
        ));
    }

    // Exact values from an independent numpy implementation.
    #[test]
    fn gricean_examples() {
        let s = gricean(0.1);
        let d = ExactScorer::new(&s);
        let lang = s.language().clone();
        let (a, b) = (id(&lang, "100"), id(&lang, "110"));
        assert_eq!(gricean_score(&d, b, b).unwrap(), 0.0);
        assert!(gricean_score(&d, a, b).unwrap().abs() < 1e-9);
        assert_eq!(gricean_score(&d, a, id(&lang, "010")).unwrap(), NEG_INF);
        assert!((d.log_prob(&[a, b]).unwrap() - 0.07812876778394018f64.ln()).abs() < 1e-12);
        assert!((d.log_prob(&[b, b]).unwrap() - 0.0002959423022118945f64.ln()).abs() < 1e-10);
        assert!((d.log_prob(&[b, a]).unwrap() - 0.004735076835390312f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn gricean_cost_recovery_and_s() {
        for coef in [0.1, 0.2] {
            let s = gricean(coef);
            let d = ExactScorer::new(&s);
            let lang = s.language().clone();
            let c_omega = s.cost().of(lang.eos());
            for x in 0..7 {
                let rec = cost_recovery(&d, x, c_omega).unwrap();
                assert!((rec - s.cost().of(x)).abs() < 1e-9, "coef {coef} x {x}");
            }
            let (a, b) = (id(&lang, "100"), id(&lang, "110"));
            assert!(s_score(&d, a, b, s.cost()).unwrap().abs() < 1e-9);
            assert!(s_score(&d, b, b, s.cost()).unwrap().abs() < 1e-9);
            assert_eq!(
                s_score(&d, a, id(&lang, "010"), s.cost()).unwrap(),
                f64::INFINITY
            );
        }
    }

    #[test]
    fn nonredundant_examples() {
        let (ws, lang) = make_synthetic_language(3).unwrap();
        let t = enumerate_texts(
            &NonredundantTruthful::new(lang.clone(), ws).unwrap(),
            2,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(test_nonredundant_strict(&t, id(&lang, "100"), id(&lang, "110")).unwrap());
        assert!(!test_nonredundant_strict(&t, 3, 3).unwrap());
        assert!(!test_nonredundant_strict(&t, id(&lang, "100"), id(&lang, "010")).unwrap());
    }

    #[test]
    fn erratum_examples() {
        let s = gricean(0.1);
        let lang = s.language().clone();
        let d = ExactScorer::new(&s);
        let (a, b) = (id(&lang, "100"), id(&lang, "110"));
        let e = erratum_condition(&s, a, b).unwrap();
        assert!((e.p_y - 1.0).abs() < 1e-15);
        assert!((e.i_y - e.i_const).abs() < 1e-12 * e.i_const);
        assert!(e.residual.abs() < 1e-12 * e.i_const);
        let e = erratum_condition(&s, a, id(&lang, "010")).unwrap();
        assert!(e.contradiction);
        assert_eq!(e.residual, -e.i_const);
        assert_eq!(e.g, NEG_INF);
        for x in 0..7 {
            for y in 0..7 {
                let e = erratum_condition(&s, x, y).unwrap();
                let g = gricean_score(&d, x, y).unwrap();
                if g.is_finite() {
                    assert!((e.g - g).abs() < 1e-10, "{x} {y}");
                } else {
                    assert_eq!(e.g, g);
                }
            }
        }
    }

    #[test]
    fn classification_labels() {
        let s = gricean(0.1);
        let lang = s.language().clone();
        let ws = s.worlds().clone();
        let d = ExactScorer::new(&s);
        let label = |x: &str, y: &str| {
            let (x, y) = (id(&lang, x), id(&lang, y));
            let scores = Scores {
                g: Some(gricean_score(&d, x, y).unwrap()),
                ..Default::default()
            };
            classify(&lang, &ws, x, y, scores, 1e-9, None)
        };
        let v = label("100", "110");
        assert_eq!(v.ground_truth, GroundTruth::StrictlyEntails);
        assert_eq!(v.two_way, Classification::EntailsOrNearContradiction);
        assert_eq!(v.classification, Classification::Entails);
        let v = label("110", "011");
        assert_eq!(v.ground_truth, GroundTruth::Incomparable);
        assert_eq!(v.classification, Classification::NotEntails);
        // a pair whose g is zero but whose joint truth mass is small
        let (x, y) = (id(&lang, "110"), id(&lang, "011"));
        let v = classify(
            &lang,
            &ws,
            x,
            y,
            Scores {
                g: Some(0.0),
                ..Default::default()
            },
            1e-9,
            Some(0.9),
        );
        assert_eq!(v.classification, Classification::EntailsOrNearContradiction);
        assert_eq!(v.ground_truth, GroundTruth::Incomparable);
    }

    #[test]
    fn verdict_csv_has_one_row_per_pair() {
        let s = gricean(0.1);
        let lang = s.language().clone();
        let ws = s.worlds().clone();
        let vs: Vec<_> = (0..2)
            .map(|y| {
                classify(
                    &lang,
                    &ws,
                    0,
                    y,
                    Scores {
                        g: Some(0.5),
                        ..Default::default()
                    },
                    1e-9,
                    None,
                )
            })
            .collect();
        let mut buf = Vec::new();
        write_verdicts_csv(&lang, &vs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("x,y,ground_truth,g,s,u,"));
    }
}
