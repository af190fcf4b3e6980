use crate::enttest::{erratum_condition, gricean_score};
use crate::error::{Error, Result};
use crate::marginal::{format_float, ExactScorer};
use crate::semantics::{Denotation, Language, Utterance, WorldSpace};
use crate::speakers::{CostFunction, GriceanSpeaker, ListenerTable, SpeakerSpec};

use super::{ExperimentConfig, ExperimentSpec, Report};

/// One point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// `|⟦x⟧ ∖ ⟦y⟧|`
    pub k: usize,
    pub g: f64,
    pub p_y: f64,
    pub i_y: f64,
    pub i_const: f64,
    pub residual: f64,
    pub erratum_g: f64,
}

/// Language `{x, y_k, ω}` over `worlds` worlds: `x` holds in the first
/// `x_worlds`, `y_k` drops the first `k` of those and holds everywhere outside.
pub fn counterexample_language(worlds: usize, x_worlds: usize, k: usize) -> Result<Language> {
    if x_worlds == 0 || x_worlds >= worlds || k > x_worlds {
        return Err(Error::Parameter(format!(
            "need 0 < x_worlds < worlds and k <= x_worlds, got {x_worlds}, {worlds}, {k}"
        )));
    }
    let x = Denotation::from_worlds(0..x_worlds);
    let y = Denotation::from_worlds((k..x_worlds).chain(x_worlds..worlds));
    let full = Denotation::full(worlds);
    let utt = |id: &str, d: Denotation| Utterance {
        id: id.into(),
        denotation: d,
        display: d.to_bitstring(worlds),
    };
    Language::new(worlds, vec![utt("x", x), utt("y", y), utt("eos", full)], 2)
}

/// Exact `g(x, y_k)` and the revised-condition terms for `k = 0..=x_worlds`.
pub fn counterexample_sweep(
    worlds: usize,
    x_worlds: usize,
    alpha: f64,
    cost_coefficient: f64,
    listener_depth: i32,
) -> Result<Vec<SweepPoint>> {
    let ws = WorldSpace::uniform(worlds)?;
    let mut out = Vec::with_capacity(x_worlds + 1);
    for k in 0..=x_worlds {
        let lang = counterexample_language(worlds, x_worlds, k)?;
        let cost = CostFunction::length_proportional(&lang, cost_coefficient)?;
        let prior = ws.prior().to_vec();
        let listener = ListenerTable::new(lang, ws.clone(), listener_depth, cost.clone(), prior)?;
        let speaker = GriceanSpeaker::new(alpha, cost, listener)?;
        let g = gricean_score(&ExactScorer::new(&speaker), 0, 1)?;
        let t = erratum_condition(&speaker, 0, 1)?;
        out.push(SweepPoint {
            k,
            g,
            p_y: t.p_y,
            i_y: t.i_y,
            i_const: t.i_const,
            residual: t.residual,
            erratum_g: t.g,
        });
    }
    Ok(out)
}

/// Exact zeros plus strict sign flips between consecutive finite nonzero values.
pub fn crossing_count(values: &[f64], tol: f64) -> usize {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let zeros = finite.iter().filter(|v| v.abs() <= tol).count();
    let nonzero: Vec<f64> = finite.into_iter().filter(|v| v.abs() > tol).collect();
    let flips = nonzero
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    zeros + flips
}

pub fn run_counterexample_sweep(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let ExperimentSpec::CounterexampleSweep { worlds, x_worlds } = config.experiment else {
        return Err(Error::Config(
            "run_counterexample_sweep needs a counterexample-sweep config".into(),
        ));
    };
    let SpeakerSpec::Gricean {
        alpha,
        cost_coefficient,
        listener_depth,
        ..
    } = config.speaker
    else {
        return Err(Error::Config(
            "counterexample-sweep needs a gricean speaker".into(),
        ));
    };
    let tol = config.tolerance;
    let points = counterexample_sweep(worlds, x_worlds, alpha, cost_coefficient, listener_depth)?;

    let mut report = Report::new(config);
    report.meta("worlds", worlds);
    report.meta("x_worlds", x_worlds);
    report.meta("alpha", alpha);
    report.meta("cost_coefficient", cost_coefficient);
    report.meta("listener_depth", listener_depth);
    report.meta("truncated", "0/0");
    let g: Vec<f64> = points.iter().map(|p| p.g).collect();
    let crossings = crossing_count(&g, tol);
    report.meta("crossings", crossings);

    let last = points.last().expect("k = x_worlds is always present");
    report.check(
        "entailment intercept g(k=0) = 0",
        1,
        usize::from(points[0].g.abs() < tol),
    );
    report.check(
        "contradiction endpoint g = -inf",
        1,
        usize::from(last.g == f64::NEG_INFINITY),
    );
    let mut consistent = 0;
    for p in &points {
        let zero_g = p.g.abs() < tol;
        let zero_r = p.residual.abs() < tol * p.i_const;
        consistent += usize::from(zero_g == zero_r);
    }
    report.check(
        "g vanishes exactly when the revised condition holds",
        points.len(),
        consistent,
    );
    report.summary.push(format!(
        "info crossings before the -inf endpoint: {crossings}"
    ));

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "k",
        "g",
        "p_y",
        "i_y",
        "i_const",
        "erratum_residual",
        "erratum_g",
    ])?;
    for p in &points {
        wtr.write_record([
            p.k.to_string(),
            format_float(p.g),
            format_float(p.p_y),
            format_float(p.i_y),
            format_float(p.i_const),
            format_float(p.residual),
            format_float(p.erratum_g),
        ])?;
    }
    report.body =
        String::from_utf8(wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf-8");
    Ok(report)
}
