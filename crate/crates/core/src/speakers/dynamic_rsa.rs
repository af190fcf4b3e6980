use crate::error::{Error, Result};
use crate::logspace::ln;
use crate::semantics::{Language, WorldSpace};

use super::{check_compatible, check_prior, check_world, CostFunction, Speaker, SpeakerKind};

/// Shared recursion state for dynamic RSA.
#[derive(Debug, Clone)]
struct Recursion {
    lang: Language,
    ws: WorldSpace,
    cost: CostFunction,
    prior: Vec<f64>,
}

impl Recursion {
    /// `ℓ_n(· | z)`: raw indicator at `n = -1`, otherwise normalized
    /// (all zeros when `z` is unsatisfiable).
    fn listener(&self, n: i32, z: &[usize]) -> Vec<f64> {
        let nw = self.ws.size();
        if n < 0 {
            let d = self.lang.denotation_unchecked(z);
            return (0..nw)
                .map(|w| if d.contains(w) { 1.0 } else { 0.0 })
                .collect();
        }
        let mut v = self.prior.clone();
        for t in 0..z.len() {
            if v.iter().all(|&p| p == 0.0) {
                break;
            }
            let s = self.speaker(n - 1, &z[..t]);
            for w in 0..nw {
                v[w] *= s[w][z[t]];
            }
        }
        let total: f64 = v.iter().sum();
        if total > 0.0 {
            v.iter_mut().for_each(|p| *p /= total);
        }
        v
    }

    /// `s_n(· | x, w)` for every world, indexed `[w][y]`; rows for worlds
    /// where `x` is false are zero.
    fn speaker(&self, n: i32, x: &[usize]) -> Vec<Vec<f64>> {
        let nw = self.ws.size();
        let nx = self.lang.len();
        if n < 0 {
            return (0..nw)
                .map(|w| {
                    (0..nx)
                        .map(|y| {
                            if self.lang.denotation(y).contains(w) {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect();
        }
        let mut rows = vec![vec![0.0; nx]; nw];
        let mut xy = x.to_vec();
        xy.push(0);
        for y in 0..nx {
            *xy.last_mut().unwrap() = y;
            let l = self.listener(n - 1, &xy);
            let decay = (-self.cost.of(y)).exp();
            for w in 0..nw {
                rows[w][y] = l[w] * decay;
            }
        }
        for row in rows.iter_mut() {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter_mut().for_each(|p| *p /= total);
            }
        }
        rows
    }
}

/// Dynamic RSA listener `ℓ_n(w | z)` with
/// `ℓ_{n+1}(w | xy) ∝ s_n(y | x, w) ℓ_{n+1}(w | x)` and `ℓ_{n+1}(w | ε) = ℓ(w)`.
///
/// Posteriors are computed on demand. The public posterior at depth −1 is
/// the normalized `⟦z⟧(w) ℓ(w)`; the recursion itself uses the raw indicator.
#[derive(Debug, Clone)]
pub struct ListenerTable {
    rec: Recursion,
    depth: i32,
}

impl ListenerTable {
    pub fn new(
        lang: Language,
        ws: WorldSpace,
        depth: i32,
        cost: CostFunction,
        prior: Vec<f64>,
    ) -> Result<Self> {
        check_compatible(&lang, &ws)?;
        cost.check(&lang)?;
        check_prior(&prior, &ws)?;
        if depth < -1 {
            return Err(Error::Parameter(format!(
                "depth must be at least -1, got {depth}"
            )));
        }
        Ok(Self {
            rec: Recursion {
                lang,
                ws,
                cost,
                prior,
            },
            depth,
        })
    }

    /// Literal listener `ℓ(w | z) ∝ ⟦z⟧(w) ℓ(w)`.
    pub fn literal(lang: Language, ws: WorldSpace, cost: CostFunction) -> Result<Self> {
        let prior = ws.prior().to_vec();
        Self::new(lang, ws, 0, cost, prior)
    }

    pub fn depth(&self) -> i32 {
        self.depth
    }

    pub fn language(&self) -> &Language {
        &self.rec.lang
    }

    pub fn worlds(&self) -> &WorldSpace {
        &self.rec.ws
    }

    pub fn cost(&self) -> &CostFunction {
        &self.rec.cost
    }

    pub fn prior(&self) -> &[f64] {
        &self.rec.prior
    }

    /// Posterior over worlds given `context`; all zeros when unsatisfiable.
    pub fn weights(&self, context: &[usize]) -> Vec<f64> {
        self.rec.listener(self.depth.max(0), context)
    }

    pub fn posterior(&self, context: &[usize]) -> Result<Vec<f64>> {
        self.rec.lang.check_tokens(context)?;
        let v = self.weights(context);
        if v.iter().all(|&p| p == 0.0) {
            return Err(Error::Domain(format!(
                "context '{}' is unsatisfiable",
                self.rec.lang.format_text(context)
            )));
        }
        Ok(v)
    }
}

/// Dynamic RSA speaker `s_n(y | x, w) ∝ ℓ_{n-1}(w | xy) exp(-c(y))`.
/// Depth −1 is the raw indicator `⟦y⟧(w)`.
#[derive(Debug, Clone)]
pub struct DynamicRsaSpeaker {
    rec: Recursion,
    depth: i32,
}

impl DynamicRsaSpeaker {
    pub fn new(
        lang: Language,
        ws: WorldSpace,
        depth: i32,
        cost: CostFunction,
        prior: Vec<f64>,
    ) -> Result<Self> {
        let t = ListenerTable::new(lang, ws, depth, cost, prior)?;
        Ok(Self { rec: t.rec, depth })
    }

    pub fn depth(&self) -> i32 {
        self.depth
    }

    /// `s_n(· | x, w)` for all worlds at once, indexed `[w][y]`.
    pub fn table(&self, context: &[usize]) -> Result<Vec<Vec<f64>>> {
        self.rec.lang.check_tokens(context)?;
        Ok(self.rec.speaker(self.depth, context))
    }
}

impl Speaker for DynamicRsaSpeaker {
    fn language(&self) -> &Language {
        &self.rec.lang
    }
    fn worlds(&self) -> &WorldSpace {
        &self.rec.ws
    }
    fn kind(&self) -> SpeakerKind {
        SpeakerKind::DynamicRsa
    }

    fn log_next(&self, context: &[usize], w: usize) -> Result<Vec<f64>> {
        check_world(&self.rec.ws, w)?;
        let d = self.rec.lang.text_denotation(context)?;
        if !d.contains(w) {
            return Err(Error::Domain(format!(
                "context '{}' is false in world {w}",
                self.rec.lang.format_text(context)
            )));
        }
        let rows = self.rec.speaker(self.depth, context);
        Ok(rows[w].iter().map(|p| ln(*p)).collect())
    }
}
