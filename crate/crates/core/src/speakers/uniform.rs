use crate::error::Result;
use crate::logspace::NEG_INF;
use crate::semantics::{Language, WorldSpace};

use super::{check_compatible, check_world, Speaker, SpeakerKind};

/// `p(x | w) = ⟦x⟧(w) / n(w)`, ignoring context.
#[derive(Debug, Clone)]
pub struct UniformTruthful {
    lang: Language,
    ws: WorldSpace,
}

impl UniformTruthful {
    pub fn new(lang: Language, ws: WorldSpace) -> Result<Self> {
        check_compatible(&lang, &ws)?;
        Ok(Self { lang, ws })
    }

    /// Number of utterances (ω included) true in `w`.
    pub fn n_true(&self, w: usize) -> usize {
        self.lang
            .utterances()
            .iter()
            .filter(|u| u.denotation.contains(w))
            .count()
    }
}

impl Speaker for UniformTruthful {
    fn language(&self) -> &Language {
        &self.lang
    }
    fn worlds(&self) -> &WorldSpace {
        &self.ws
    }
    fn kind(&self) -> SpeakerKind {
        SpeakerKind::UniformTruthful
    }
    fn context_free(&self) -> bool {
        true
    }

    fn log_next(&self, _context: &[usize], w: usize) -> Result<Vec<f64>> {
        check_world(&self.ws, w)?;
        let lp = -(self.n_true(w) as f64).ln();
        Ok(self
            .lang
            .utterances()
            .iter()
            .map(|u| {
                if u.denotation.contains(w) {
                    lp
                } else {
                    NEG_INF
                }
            })
            .collect())
    }
}
