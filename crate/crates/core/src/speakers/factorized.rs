use crate::error::{Error, Result};
use crate::logspace::NEG_INF;
use crate::semantics::{Language, WorldSpace};

use super::{check_compatible, check_world, Speaker, SpeakerKind};

/// `p(x | w) = ⟦x⟧(w) f(x) g(w)`, ignoring context.
///
/// The supplied `g` is replaced by the per-world normalizer that makes each
/// row a distribution; [`FactorizedTruthful::g`] returns that effective table.
#[derive(Debug, Clone)]
pub struct FactorizedTruthful {
    lang: Language,
    ws: WorldSpace,
    f: Vec<f64>,
    given_g: Vec<f64>,
    g: Vec<f64>,
}

impl FactorizedTruthful {
    pub fn new(lang: Language, ws: WorldSpace, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        check_compatible(&lang, &ws)?;
        if f.len() != lang.len() || g.len() != ws.size() {
            return Err(Error::Structure(format!(
                "f has {} entries (want {}), g has {} (want {})",
                f.len(),
                lang.len(),
                g.len(),
                ws.size()
            )));
        }
        if let Some(v) = f.iter().chain(&g).find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Parameter(format!(
                "f and g must be positive and finite, got {v}"
            )));
        }
        let eff = (0..ws.size())
            .map(|w| {
                let s: f64 = lang
                    .utterances()
                    .iter()
                    .zip(&f)
                    .filter(|(u, _)| u.denotation.contains(w))
                    .map(|(_, fx)| fx)
                    .sum();
                1.0 / s
            })
            .collect();
        Ok(Self {
            lang,
            ws,
            f,
            given_g: g,
            g: eff,
        })
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    /// Effective per-world factor after normalization.
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// The `g` passed to the constructor.
    pub fn given_g(&self) -> &[f64] {
        &self.given_g
    }
}

impl Speaker for FactorizedTruthful {
    fn language(&self) -> &Language {
        &self.lang
    }
    fn worlds(&self) -> &WorldSpace {
        &self.ws
    }
    fn kind(&self) -> SpeakerKind {
        SpeakerKind::FactorizedTruthful
    }
    fn context_free(&self) -> bool {
        true
    }

    fn log_next(&self, _context: &[usize], w: usize) -> Result<Vec<f64>> {
        check_world(&self.ws, w)?;
        let lg = self.g[w].ln();
        Ok(self
            .lang
            .utterances()
            .iter()
            .zip(&self.f)
            .map(|(u, fx)| {
                if u.denotation.contains(w) {
                    fx.ln() + lg
                } else {
                    NEG_INF
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::make_synthetic_language;
    use crate::speakers::{CostFunction, UniformTruthful};

    fn synth() -> (WorldSpace, Language) {
        make_synthetic_language(3).unwrap()
    }

    #[test]
    fn constant_weights_reduce_to_uniform() {
        let (ws, lang) = synth();
        let fs =
            FactorizedTruthful::new(lang.clone(), ws.clone(), vec![1.0; 7], vec![1.0; 3]).unwrap();
        let us = UniformTruthful::new(lang, ws).unwrap();
        for w in 0..3 {
            assert_eq!(fs.next(&[], w).unwrap(), us.next(&[], w).unwrap());
        }
    }

    #[test]
    fn cost_weights_on_equal_lengths_are_uniform() {
        let (ws, lang) = synth();
        let c = CostFunction::length_proportional(&lang, 0.1).unwrap();
        let f: Vec<f64> = (0..7).map(|x| (-c.of(x)).exp()).collect();
        let fs = FactorizedTruthful::new(lang.clone(), ws.clone(), f, vec![1.0; 3]).unwrap();
        let us = UniformTruthful::new(lang, ws).unwrap();
        for w in 0..3 {
            let a = fs.next(&[], w).unwrap();
            let b = us.next(&[], w).unwrap();
            for x in 0..7 {
                assert!((a[x] - b[x]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn doubled_weight() {
        let (ws, lang) = synth();
        let mut f = vec![1.0; 7];
        f[lang.index_of("100").unwrap()] = 2.0;
        let fs = FactorizedTruthful::new(lang.clone(), ws, f, vec![1.0; 3]).unwrap();
        let p = fs.next(&[], 0).unwrap();
        assert!((p[lang.index_of("100").unwrap()] - 2.0 / 5.0).abs() < 1e-15);
        assert!((fs.g()[0] - 0.2).abs() < 1e-15);
        assert_eq!(fs.given_g(), &[1.0; 3]);
    }

    #[test]
    fn context_is_ignored() {
        let (ws, lang) = synth();
        let fs = FactorizedTruthful::new(
            lang,
            ws,
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
            vec![1.0; 3],
        )
        .unwrap();
        for w in 0..3 {
            assert_eq!(
                fs.log_next(&[], w).unwrap(),
                fs.log_next(&[3, 4], w).unwrap()
            );
        }
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let (ws, lang) = synth();
        let r = FactorizedTruthful::new(lang.clone(), ws.clone(), vec![0.0; 7], vec![1.0; 3]);
        assert!(matches!(r, Err(Error::Parameter(_))));
        let r = FactorizedTruthful::new(lang, ws, vec![1.0; 7], vec![1.0, -1.0, 1.0]);
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
