use crate::error::{Error, Result};
use crate::logspace::{ln, log_normalize, log_ratio, NEG_INF};
use crate::semantics::{Language, WorldSpace};

use super::{check_world, CostFunction, ListenerTable, Speaker, SpeakerKind};

/// `I_ℓ(y | x; w) = ln ℓ(w | xy) − ln ℓ(w | x)` with `ln 0 = -inf` and
/// `(-inf) − (-inf) = 0`.
pub fn conditional_information(
    listener: &ListenerTable,
    x: &[usize],
    y: usize,
    w: usize,
) -> Result<f64> {
    let lang = listener.language();
    check_world(listener.worlds(), w)?;
    lang.check_tokens(x)?;
    lang.check_tokens(&[y])?;
    let before = listener.weights(x);
    let mut xy = x.to_vec();
    xy.push(y);
    let after = listener.weights(&xy);
    Ok(log_ratio(ln(after[w]), ln(before[w])))
}

/// `p(y | x, w) ∝ exp(α I_ℓ(y | x; w) − c(y))`, normalized per sentence.
#[derive(Debug, Clone)]
pub struct GriceanSpeaker {
    alpha: f64,
    cost: CostFunction,
    listener: ListenerTable,
}

impl GriceanSpeaker {
    pub fn new(alpha: f64, cost: CostFunction, listener: ListenerTable) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Parameter(format!(
                "rationality alpha must be positive and finite, got {alpha}"
            )));
        }
        cost.check(listener.language())?;
        Ok(Self {
            alpha,
            cost,
            listener,
        })
    }

    /// Literal-listener speaker with `c(x) = coefficient · |x|`.
    pub fn literal(lang: Language, ws: WorldSpace, alpha: f64, coefficient: f64) -> Result<Self> {
        let cost = CostFunction::length_proportional(&lang, coefficient)?;
        let listener = ListenerTable::literal(lang, ws, cost.clone())?;
        Self::new(alpha, cost, listener)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    pub fn listener(&self) -> &ListenerTable {
        &self.listener
    }

    /// Unnormalized log weights `α I − c(y)` for every `y`.
    pub fn log_weights(&self, context: &[usize], w: usize) -> Result<Vec<f64>> {
        let lang = self.listener.language();
        check_world(self.listener.worlds(), w)?;
        if !lang.text_denotation(context)?.contains(w) {
            return Err(Error::Domain(format!(
                "context '{}' is false in world {w}",
                lang.format_text(context)
            )));
        }
        let before = ln(self.listener.weights(context)[w]);
        let mut xy = context.to_vec();
        xy.push(0);
        let mut out = Vec::with_capacity(lang.len());
        for y in 0..lang.len() {
            *xy.last_mut().unwrap() = y;
            let info = log_ratio(ln(self.listener.weights(&xy)[w]), before);
            out.push(if info == NEG_INF {
                NEG_INF
            } else {
                self.alpha * info - self.cost.of(y)
            });
        }
        Ok(out)
    }
}

impl Speaker for GriceanSpeaker {
    fn language(&self) -> &Language {
        self.listener.language()
    }
    fn worlds(&self) -> &WorldSpace {
        self.listener.worlds()
    }
    fn kind(&self) -> SpeakerKind {
        SpeakerKind::DynamicGricean
    }

    fn log_next(&self, context: &[usize], w: usize) -> Result<Vec<f64>> {
        let mut v = self.log_weights(context, w)?;
        log_normalize(&mut v);
        Ok(v)
    }
}
