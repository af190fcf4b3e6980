use crate::error::{Error, Result};
use crate::semantics::{Language, WorldSpace};

use super::{check_compatible, check_prior, check_world, CostFunction, Speaker, SpeakerKind};

/// Context-free RSA speaker `s_n(x | w)`.
///
/// `s_{-1}` and `ℓ_{-1}` are the raw indicator `⟦x⟧(w)`; then
/// `ℓ_{n+1}(w|x) ∝ s_n(x|w) ℓ(w)` and `s_{n+1}(x|w) ∝ ℓ_n(w|x) exp(-c(x))`.
/// At depth −1 the "distribution" is the unnormalized indicator.
#[derive(Debug, Clone)]
pub struct StaticRsaSpeaker {
    lang: Language,
    ws: WorldSpace,
    depth: i32,
    cost: CostFunction,
    listener_prior: Vec<f64>,
    /// `s[w][x]`
    table: Vec<Vec<f64>>,
}

fn indicator(lang: &Language, n_worlds: usize) -> Vec<Vec<f64>> {
    (0..n_worlds)
        .map(|w| {
            lang.utterances()
                .iter()
                .map(|u| if u.denotation.contains(w) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect()
}

impl StaticRsaSpeaker {
    pub fn new(
        lang: Language,
        ws: WorldSpace,
        depth: i32,
        cost: CostFunction,
        listener_prior: Vec<f64>,
    ) -> Result<Self> {
        check_compatible(&lang, &ws)?;
        cost.check(&lang)?;
        check_prior(&listener_prior, &ws)?;
        if depth < -1 {
            return Err(Error::Parameter(format!(
                "depth must be at least -1, got {depth}"
            )));
        }
        let nw = ws.size();
        let nx = lang.len();
        // s and l both indexed [w][x]
        let mut s_prev = indicator(&lang, nw);
        let mut l_prev = s_prev.clone();
        for _ in 0..=depth {
            let mut l = vec![vec![0.0; nx]; nw];
            for x in 0..nx {
                let z: f64 = (0..nw).map(|w| s_prev[w][x] * listener_prior[w]).sum();
                for w in 0..nw {
                    l[w][x] = s_prev[w][x] * listener_prior[w] / z;
                }
            }
            let mut s = vec![vec![0.0; nx]; nw];
            for w in 0..nw {
                let z: f64 = (0..nx).map(|x| l_prev[w][x] * (-cost.of(x)).exp()).sum();
                for x in 0..nx {
                    s[w][x] = l_prev[w][x] * (-cost.of(x)).exp() / z;
                }
            }
            s_prev = s;
            l_prev = l;
        }
        Ok(Self {
            lang,
            ws,
            depth,
            cost,
            listener_prior,
            table: s_prev,
        })
    }

    pub fn depth(&self) -> i32 {
        self.depth
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    pub fn listener_prior(&self) -> &[f64] {
        &self.listener_prior
    }

    /// `s_n(x | w)`.
    pub fn prob(&self, x: usize, w: usize) -> f64 {
        self.table[w][x]
    }
}

impl Speaker for StaticRsaSpeaker {
    fn language(&self) -> &Language {
        &self.lang
    }
    fn worlds(&self) -> &WorldSpace {
        &self.ws
    }
    fn kind(&self) -> SpeakerKind {
        SpeakerKind::StaticRsa
    }
    fn context_free(&self) -> bool {
        true
    }

    fn log_next(&self, _context: &[usize], w: usize) -> Result<Vec<f64>> {
        check_world(&self.ws, w)?;
        Ok(self.table[w]
            .iter()
            .map(|p| crate::logspace::ln(*p))
            .collect())
    }
}

/// Tables with `s_n(x|w) = ⟦x⟧(w) f(x) g(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// Largest relative deviation from the speaker's own table.
    pub max_residual: f64,
}

pub const FACTORIZATION_TOLERANCE: f64 = 1e-10;

/// Derives `(f_n, g_n)` by the two-step factor recursion and checks it
/// against the speaker's directly computed table.
pub fn static_rsa_factorization(speaker: &StaticRsaSpeaker) -> Result<Factorization> {
    let lang = &speaker.lang;
    let nw = speaker.ws.size();
    let nx = lang.len();
    let prior = &speaker.listener_prior;
    let ind = |x: usize, w: usize| {
        if lang.denotation(x).contains(w) {
            1.0
        } else {
            0.0
        }
    };
    let decay: Vec<f64> = (0..nx).map(|x| (-speaker.cost.of(x)).exp()).collect();

    // (f, g) at depths n-1 and n; start from (-1, 0)
    let mut lower = (vec![1.0; nx], vec![1.0; nw]);
    let g0: Vec<f64> = (0..nw)
        .map(|w| 1.0 / (0..nx).map(|x| ind(x, w) * decay[x]).sum::<f64>())
        .collect();
    let mut upper = (decay.clone(), g0);
    let (f, g) = if speaker.depth == -1 {
        lower
    } else {
        for _ in 0..speaker.depth {
            let (fl, gl) = &lower;
            // ℓ_{n+1}(w|x) = ⟦x⟧ f'(x) g'(w)
            let fp: Vec<f64> = (0..nx)
                .map(|x| {
                    fl[x]
                        / (0..nw)
                            .map(|w| ind(x, w) * fl[x] * gl[w] * prior[w])
                            .sum::<f64>()
                })
                .collect();
            let gp: Vec<f64> = (0..nw).map(|w| gl[w] * prior[w]).collect();
            let f_next: Vec<f64> = (0..nx).map(|x| fp[x] * decay[x]).collect();
            let g_next: Vec<f64> = (0..nw)
                .map(|w| {
                    gp[w]
                        / (0..nx)
                            .map(|x| ind(x, w) * fp[x] * gp[w] * decay[x])
                            .sum::<f64>()
                })
                .collect();
            lower = std::mem::replace(&mut upper, (f_next, g_next));
        }
        upper
    };

    let mut max_residual: f64 = 0.0;
    for w in 0..nw {
        for x in 0..nx {
            if ind(x, w) == 1.0 {
                let direct = speaker.table[w][x];
                let fact = f[x] * g[w];
                max_residual = max_residual.max(((fact - direct) / direct).abs());
            }
        }
    }
    if !(max_residual <= FACTORIZATION_TOLERANCE) {
        return Err(Error::Consistency(format!(
            "static RSA factorization residual {max_residual:e} at depth {}",
            speaker.depth
        )));
    }
    Ok(Factorization { f, g, max_residual })
}
