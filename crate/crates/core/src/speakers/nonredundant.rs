use crate::error::{Error, Result};
use crate::logspace::NEG_INF;
use crate::semantics::{Language, WorldSpace};

use super::{check_compatible, check_world, Speaker, SpeakerKind};

/// Uniform over utterances that are true in `w` and strictly shrink the
/// context denotation. ω is always allowed so that texts can end.
#[derive(Debug, Clone)]
pub struct NonredundantTruthful {
    lang: Language,
    ws: WorldSpace,
}

impl NonredundantTruthful {
    pub fn new(lang: Language, ws: WorldSpace) -> Result<Self> {
        check_compatible(&lang, &ws)?;
        Ok(Self { lang, ws })
    }

    /// Utterances with nonzero probability after `context` in `w`.
    pub fn support(&self, context: &[usize], w: usize) -> Result<Vec<usize>> {
        check_world(&self.ws, w)?;
        let d = self.lang.text_denotation(context)?;
        if !d.contains(w) {
            return Err(Error::Domain(format!(
                "context '{}' is false in world {w}",
                self.lang.format_text(context)
            )));
        }
        let eos = self.lang.eos();
        Ok((0..self.lang.len())
            .filter(|&y| {
                let dy = self.lang.denotation(y);
                y == eos || (dy.contains(w) && d.intersect(dy) != d)
            })
            .collect())
    }
}

impl Speaker for NonredundantTruthful {
    fn language(&self) -> &Language {
        &self.lang
    }
    fn worlds(&self) -> &WorldSpace {
        &self.ws
    }
    fn kind(&self) -> SpeakerKind {
        SpeakerKind::NonredundantTruthful
    }

    fn log_next(&self, context: &[usize], w: usize) -> Result<Vec<f64>> {
        let support = self.support(context, w)?;
        let lp = -(support.len() as f64).ln();
        let mut out = vec![NEG_INF; self.lang.len()];
        for y in support {
            out[y] = lp;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::make_synthetic_language;

    fn ids(lang: &Language, v: &[usize]) -> Vec<String> {
        v.iter().map(|&i| lang.utterance(i).id.clone()).collect()
    }

    #[test]
    fn support_examples() {
        let (ws, lang) = make_synthetic_language(3).unwrap();
        let s = NonredundantTruthful::new(lang.clone(), ws).unwrap();
        assert_eq!(
            ids(&lang, &s.support(&[], 0).unwrap()),
            ["100", "110", "101", "111"]
        );
        let x = lang.parse_text("100").unwrap();
        assert_eq!(ids(&lang, &s.support(&x, 0).unwrap()), ["111"]);
        let p = s.next(&[], 0).unwrap();
        assert_eq!(p[lang.index_of("010").unwrap()], 0.0);
        assert!((p[lang.index_of("100").unwrap()] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn false_context_is_a_domain_error() {
        let (ws, lang) = make_synthetic_language(3).unwrap();
        let s = NonredundantTruthful::new(lang.clone(), ws).unwrap();
        let x = lang.parse_text("010").unwrap();
        assert!(matches!(s.log_next(&x, 0), Err(Error::Domain(_))));
    }
}
