//! Exact conditional and marginal text probabilities.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::logspace::{log_sum_exp, NEG_INF};
use crate::semantics::Language;
use crate::speakers::Speaker;

/// Default cap on non-ω tokens per tabulated text.
pub const DEFAULT_MAX_LEN: usize = 6;
/// Default enumeration budget, in `|𝒳|^max_len · |𝒲|` units.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// `ln p(z | w) = Σ_t ln p(z_t | z_<t, w)`; `-inf` once any step is impossible.
pub fn text_prob_given_world<S: Speaker + ?Sized>(
    speaker: &S,
    z: &[usize],
    w: usize,
) -> Result<f64> {
    speaker.language().check_tokens(z)?;
    crate::speakers::check_world(speaker.worlds(), w)?;
    let mut lp = 0.0;
    for t in 0..z.len() {
        lp += speaker.log_next(&z[..t], w)?[z[t]];
        if lp == NEG_INF {
            break;
        }
    }
    Ok(lp)
}

/// `ln p(z) = ln Σ_w p(w) p(z | w)`.
pub fn marginal_prob<S: Speaker + ?Sized>(speaker: &S, z: &[usize]) -> Result<f64> {
    let prior = speaker.worlds().prior();
    let mut terms = Vec::with_capacity(prior.len());
    for (w, p) in prior.iter().enumerate() {
        terms.push(p.ln() + text_prob_given_world(speaker, z, w)?);
    }
    Ok(log_sum_exp(&terms))
}

/// Anything that assigns a log-probability to a text.
pub trait TextScorer {
    fn language(&self) -> &Language;
    fn log_prob(&self, z: &[usize]) -> Result<f64>;
}

/// Scores texts by exact marginalization on demand.
pub struct ExactScorer<'a, S: Speaker + ?Sized> {
    speaker: &'a S,
}

impl<'a, S: Speaker + ?Sized> ExactScorer<'a, S> {
    pub fn new(speaker: &'a S) -> Self {
        Self { speaker }
    }
}

impl<S: Speaker + ?Sized> TextScorer for ExactScorer<'_, S> {
    fn language(&self) -> &Language {
        self.speaker.language()
    }
    fn log_prob(&self, z: &[usize]) -> Result<f64> {
        marginal_prob(self.speaker, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextKind {
    /// Probability that a sampled text starts with these tokens.
    Prefix,
    /// Probability of exactly this text, ending in ω.
    Complete,
}

impl TextKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TextKind::Prefix => "prefix",
            TextKind::Complete => "complete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub log_prob: f64,
    pub kind: TextKind,
}

/// Exact table of `p(z)` for every text with at most `max_len` non-ω tokens.
///
/// Besides canonical prefixes and completions it holds the auxiliary
/// two-token texts `ω y`, which treat a leading ω as a tautology.
#[derive(Debug, Clone)]
pub struct TextDistribution {
    lang: Language,
    max_len: usize,
    entries: HashMap<Vec<usize>, Entry>,
    order: Vec<Vec<usize>>,
    auxiliary: usize,
}

/// Required budget units for an enumeration.
pub fn enumeration_cost(lang_size: usize, n_worlds: usize, max_len: usize) -> u128 {
    let mut c: u128 = n_worlds as u128;
    for _ in 0..max_len {
        c = c.saturating_mul(lang_size as u128);
    }
    c
}

/// Tabulates every text of at most `max_len` non-ω tokens.
pub fn enumerate_texts<S: Speaker + ?Sized>(
    speaker: &S,
    max_len: usize,
    budget: u128,
) -> Result<TextDistribution> {
    let lang = speaker.language().clone();
    let ws = speaker.worlds();
    let required = enumeration_cost(lang.len(), ws.size(), max_len);
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    let mut table = TextDistribution {
        lang: lang.clone(),
        max_len,
        entries: HashMap::new(),
        order: Vec::new(),
        auxiliary: 0,
    };
    let root: Vec<f64> = ws.prior().iter().map(|p| p.ln()).collect();
    let mut prefix = Vec::with_capacity(max_len + 1);
    expand(speaker, &mut table, &mut prefix, &root)?;
    let eos = lang.eos();
    for y in 0..lang.len() {
        let z = vec![eos, y];
        let lp = marginal_prob(speaker, &z)?;
        table.insert(z, lp, TextKind::Prefix);
        table.auxiliary += 1;
    }
    Ok(table)
}

fn expand<S: Speaker + ?Sized>(
    speaker: &S,
    table: &mut TextDistribution,
    prefix: &mut Vec<usize>,
    lp: &[f64],
) -> Result<()> {
    table.insert(prefix.clone(), log_sum_exp(lp), TextKind::Prefix);
    let lang = speaker.language();
    let eos = lang.eos();
    let nw = lp.len();
    let frontier = prefix.len() == table.max_len;
    // next[w] is None when the prefix is unreachable in w
    let mut next: Vec<Option<Vec<f64>>> = Vec::with_capacity(nw);
    for (w, &l) in lp.iter().enumerate() {
        next.push(if l == NEG_INF {
            None
        } else {
            Some(speaker.log_next(prefix, w)?)
        });
    }
    let child = |y: usize| -> Vec<f64> {
        (0..nw)
            .map(|w| match &next[w] {
                Some(row) => lp[w] + row[y],
                None => NEG_INF,
            })
            .collect()
    };
    for y in 0..lang.len() {
        if y == eos {
            let c = child(y);
            prefix.push(y);
            table.insert(prefix.clone(), log_sum_exp(&c), TextKind::Complete);
            prefix.pop();
        } else if !frontier {
            let c = child(y);
            prefix.push(y);
            expand(speaker, table, prefix, &c)?;
            prefix.pop();
        }
    }
    Ok(())
}

impl TextDistribution {
    fn insert(&mut self, z: Vec<usize>, log_prob: f64, kind: TextKind) {
        self.order.push(z.clone());
        self.entries.insert(z, Entry { log_prob, kind });
    }

    pub fn language(&self) -> &Language {
        &self.lang
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, z: &[usize]) -> Option<Entry> {
        self.entries.get(z).copied()
    }

    /// Entries in enumeration order (depth-first, utterance order).
    pub fn iter(&self) -> impl Iterator<Item = (&[usize], Entry)> + '_ {
        self.order
            .iter()
            .map(move |z| (z.as_slice(), self.entries[z]))
    }

    fn is_auxiliary(&self, z: &[usize]) -> bool {
        z.len() == 2 && z[0] == self.lang.eos()
    }

    /// `Σ_{complete, |z| < L} p(zω) + Σ_{|z| = L} p(z) − 1`.
    pub fn normalization_residual(&self) -> f64 {
        let eos = self.lang.eos();
        let mut total = 0.0;
        for (z, e) in self.iter() {
            if self.is_auxiliary(z) {
                continue;
            }
            match e.kind {
                TextKind::Complete if z.len() <= self.max_len => total += e.log_prob.exp(),
                TextKind::Prefix if z.len() == self.max_len && !z.contains(&eos) => {
                    total += e.log_prob.exp()
                }
                _ => {}
            }
        }
        total - 1.0
    }

    /// Largest `|p(z) − Σ_y p(zy)|` over prefixes below the frontier.
    pub fn prefix_additivity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut z1 = Vec::with_capacity(self.max_len + 1);
        for (z, e) in self.iter() {
            if e.kind != TextKind::Prefix || z.len() >= self.max_len || self.is_auxiliary(z) {
                continue;
            }
            z1.clear();
            z1.extend_from_slice(z);
            z1.push(0);
            let mut sum = 0.0;
            for y in 0..self.lang.len() {
                *z1.last_mut().unwrap() = y;
                sum += self.entries[&z1].log_prob.exp();
            }
            worst = worst.max((sum - e.log_prob.exp()).abs());
        }
        worst
    }

    /// CSV export: `text,kind,log_prob` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["text", "kind", "log_prob"])?;
        for (z, e) in self.iter() {
            wtr.write_record([
                self.lang.format_text(z),
                e.kind.as_str().to_string(),
                format_float(e.log_prob),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

impl TextScorer for TextDistribution {
    fn language(&self) -> &Language {
        &self.lang
    }
    fn log_prob(&self, z: &[usize]) -> Result<f64> {
        self.get(z)
            .map(|e| e.log_prob)
            .ok_or_else(|| Error::NotTabulated(self.lang.format_text(z)))
    }
}

/// Decimal with 17 significant digits; infinities as `inf` / `-inf`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
