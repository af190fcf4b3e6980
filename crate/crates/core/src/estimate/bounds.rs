//! Concentration bounds and sentence-complexity formulas.

use crate::error::{Error, Result};
use crate::semantics::{truth_probability, Language, WorldSpace};
use crate::speakers::CostFunction;

fn check_delta_n(delta: f64, n: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(n >= 1.0) {
        return Err(Error::Parameter(format!("n must be at least 1, got {n}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevBound {
    /// `√(K / (δ n))`
    pub bound: f64,
    /// `δ + (1 − 1/K)^n`
    pub failure: f64,
}

/// Log-scale deviation bound `|ln p − ln p̂| ≤ √(K/(δn))` for complexity `K`.
pub fn chebyshev_log_bound(k: f64, delta: f64, n: f64) -> Result<ChebyshevBound> {
    check_delta_n(delta, n)?;
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::Parameter(format!(
            "complexity must be finite and at least 1, got {k}"
        )));
    }
    Ok(ChebyshevBound {
        bound: (k / (delta * n)).sqrt(),
        failure: delta + (1.0 - 1.0 / k).powf(n),
    })
}

/// Linear-scale deviation bound `√(ln(2/δ) / (2n))`.
pub fn hoeffding_bound(delta: f64, n: f64) -> Result<f64> {
    check_delta_n(delta, n)?;
    Ok(((2.0 / delta).ln() / (2.0 * n)).sqrt())
}

fn satisfiable_mass(lang: &Language, ws: &WorldSpace, z: &[usize]) -> Result<f64> {
    let d = lang.text_denotation(z)?;
    if d.is_empty() {
        return Err(Error::Domain(format!(
            "text '{}' is unsatisfiable",
            lang.format_text(z)
        )));
    }
    Ok(truth_probability(d, ws))
}

/// `|𝒳| / p(⟦z⟧)`, ω counted in `|𝒳|`.
pub fn complexity_uniform(lang: &Language, ws: &WorldSpace, z: &[usize]) -> Result<f64> {
    Ok(lang.len() as f64 / satisfiable_mass(lang, ws, z)?)
}

/// `exp(c(z)) / p(⟦z⟧)`.
pub fn complexity_gricean(
    lang: &Language,
    ws: &WorldSpace,
    cost: &CostFunction,
    z: &[usize],
) -> Result<f64> {
    Ok(cost.text(z).exp() / satisfiable_mass(lang, ws, z)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GBound {
    /// `8 √(exp(max(c(xy), c(yy))) / p(⟦xy⟧) / (δ n))`
    pub bound: f64,
    /// `2 √(exp(c(xy)) / p(⟦xy⟧) · 2 / (δ n))`
    pub s_bound: f64,
    /// `1 − δ − 4 qⁿ`
    pub confidence: f64,
}

/// Finite-sample bound on `|g_p − g_p̂|` for utterances `x`, `y`, where
/// `min_prob = min(p(xy), p(yy))` sets `q = 1 − min_prob`.
pub fn g_bound(
    lang: &Language,
    ws: &WorldSpace,
    cost: &CostFunction,
    x: usize,
    y: usize,
    delta: f64,
    n: f64,
    min_prob: f64,
) -> Result<GBound> {
    check_delta_n(delta, n)?;
    if !(0.0..=1.0).contains(&min_prob) {
        return Err(Error::Parameter(format!(
            "min_prob must be a probability, got {min_prob}"
        )));
    }
    let mass = satisfiable_mass(lang, ws, &[x, y])?;
    let c_xy = cost.text(&[x, y]);
    let c_yy = cost.text(&[y, y]);
    let q = 1.0 - min_prob;
    Ok(GBound {
        bound: 8.0 * (c_xy.max(c_yy).exp() / mass / (delta * n)).sqrt(),
        s_bound: 2.0 * (c_xy.exp() / mass * 2.0 / (delta * n)).sqrt(),
        confidence: 1.0 - delta - 4.0 * q.powf(n),
    })
}

/// `128 (S + 1)^{ℓ + 1} / (δ ε²)`.
pub fn sample_complexity_curve(
    length: u32,
    delta: f64,
    epsilon: f64,
    perplexity: f64,
) -> Result<f64> {
    if !(delta > 0.0 && epsilon > 0.0 && perplexity >= 0.0) {
        return Err(Error::Parameter(format!(
            "need delta > 0, epsilon > 0, perplexity >= 0; got {delta}, {epsilon}, {perplexity}"
        )));
    }
    Ok(128.0 * (perplexity + 1.0).powi(length as i32 + 1) / (delta * epsilon * epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::make_synthetic_language;

    #[test]
    fn chebyshev_examples() {
        let b = chebyshev_log_bound(10.0, 0.1, 1e4).unwrap();
        assert!((b.bound - 0.1).abs() < 1e-15);
        let b4 = chebyshev_log_bound(10.0, 0.1, 4e4).unwrap();
        assert!((b4.bound - b.bound / 2.0).abs() < 1e-15);
        let b = chebyshev_log_bound(1.0, 0.2, 50.0).unwrap();
        assert!((b.bound - (1.0f64 / 10.0).sqrt()).abs() < 1e-15);
        assert_eq!(b.failure, 0.2);
        assert!(chebyshev_log_bound(0.5, 0.1, 10.0).is_err());
        assert!(chebyshev_log_bound(2.0, 1.0, 10.0).is_err());
    }

    #[test]
    fn hoeffding_examples() {
        let b = hoeffding_bound(0.05, 1000.0).unwrap();
        assert!((b - (40f64.ln() / 2000.0).sqrt()).abs() < 1e-15);
        assert!((b - 0.04295).abs() < 1e-5);
        let b4 = hoeffding_bound(0.05, 4000.0).unwrap();
        assert!((b4 - b / 2.0).abs() < 1e-15);
        let d = 2.0 / std::f64::consts::E.powi(2);
        assert!((hoeffding_bound(d, 25.0).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn complexity_examples() {
        let (ws, lang) = make_synthetic_language(3).unwrap();
        let cost = CostFunction::length_proportional(&lang, 0.1).unwrap();
        let t = lang.parse_text("111").unwrap();
        assert!((complexity_uniform(&lang, &ws, &t).unwrap() - 7.0).abs() < 1e-12);
        let t = lang.parse_text("100").unwrap();
        assert!((complexity_uniform(&lang, &ws, &t).unwrap() - 21.0).abs() < 1e-12);
        let t = lang.parse_text("100 010").unwrap();
        assert!(matches!(
            complexity_uniform(&lang, &ws, &t),
            Err(Error::Domain(_))
        ));
        let t = lang.parse_text("100 111").unwrap();
        let k = complexity_gricean(&lang, &ws, &cost, &t).unwrap();
        assert!((k - 3.0 * 0.6f64.exp()).abs() < 1e-12);
        assert!((k - 5.466).abs() < 1e-3);
        let zero = CostFunction::zero(&lang);
        assert_eq!(complexity_gricean(&lang, &ws, &zero, &[6]).unwrap(), 1.0);
    }

    #[test]
    fn g_bound_scaling_and_constants() {
        let (ws, lang) = make_synthetic_language(3).unwrap();
        let cost = CostFunction::length_proportional(&lang, 0.1).unwrap();
        let a = g_bound(&lang, &ws, &cost, 0, 3, 0.1, 1e4, 0.01).unwrap();
        let b = g_bound(&lang, &ws, &cost, 0, 3, 0.1, 4e4, 0.01).unwrap();
        assert!((b.bound - a.bound / 2.0).abs() < 1e-14);
        // equal costs: s/g = 2√2 / 8
        assert!((a.s_bound / a.bound - 2.0 * 2f64.sqrt() / 8.0).abs() < 1e-14);
        assert!(a.s_bound <= a.bound);
        assert!((a.confidence - (0.9 - 4.0 * 0.99f64.powf(1e4))).abs() < 1e-15);
        assert!(g_bound(&lang, &ws, &cost, 0, 1, 0.1, 1e4, 0.01).is_err());
    }

    #[test]
    fn curve_examples() {
        let n0 = sample_complexity_curve(0, 0.1, 1.0, 20.0).unwrap();
        assert!((n0 - 26880.0).abs() < 1e-6);
        let n4 = sample_complexity_curve(4, 0.1, 1.0, 20.0).unwrap();
        assert!((n4 / 5.2e9 - 1.0).abs() < 0.01);
        let n10 = sample_complexity_curve(10, 0.1, 1.0, 20.0).unwrap();
        // 128 · 21^11 / 0.1
        assert!((n10 - 1280.0 * 21f64.powi(11)).abs() / n10 < 1e-14);
        assert!(sample_complexity_curve(1, 0.0, 1.0, 20.0).is_err());
    }
}
