//! Worlds, denotations, languages and texts.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported world space (one bit per world).
pub const MAX_WORLDS: usize = 64;
/// Largest world count accepted by [`make_synthetic_language`].
pub const MAX_SYNTHETIC_WORLDS: usize = 16;

const PRIOR_TOLERANCE: f64 = 1e-12;

/// A set of worlds stored as a bitmask; bit `i` is world `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Denotation(u64);

impl Denotation {
    pub const EMPTY: Denotation = Denotation(0);

    pub fn from_mask(mask: u64) -> Self {
        Denotation(mask)
    }

    /// All worlds of an `n`-world space.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Denotation(u64::MAX)
        } else {
            Denotation((1u64 << n) - 1)
        }
    }

    pub fn singleton(w: usize) -> Self {
        Denotation(1u64 << w)
    }

    pub fn from_worlds<I: IntoIterator<Item = usize>>(worlds: I) -> Self {
        Denotation(worlds.into_iter().fold(0u64, |m, w| m | (1u64 << w)))
    }

    /// Parses a bitstring whose character `i` is world `i` ("110" = {w0, w1}).
    pub fn from_bitstring(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_WORLDS {
            return Err(Error::Structure(format!(
                "bitstring '{s}' must have 1..={MAX_WORLDS} characters"
            )));
        }
        let mut mask = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => mask |= 1u64 << i,
                '0' => {}
                _ => {
                    return Err(Error::Structure(format!(
                        "bad character '{c}' in bitstring '{s}'"
                    )))
                }
            }
        }
        Ok(Denotation(mask))
    }

    pub fn to_bitstring(self, n: usize) -> String {
        (0..n)
            .map(|w| if self.contains(w) { '1' } else { '0' })
            .collect()
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, w: usize) -> bool {
        w < 64 && (self.0 >> w) & 1 == 1
    }

    pub fn intersect(self, other: Denotation) -> Denotation {
        Denotation(self.0 & other.0)
    }

    pub fn union(self, other: Denotation) -> Denotation {
        Denotation(self.0 | other.0)
    }

    pub fn minus(self, other: Denotation) -> Denotation {
        Denotation(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Denotation) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Worlds in increasing order.
    pub fn worlds(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let w = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(w)
            }
        })
    }
}

impl fmt::Debug for Denotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Denotation({:#b})", self.0)
    }
}

/// Finite world space with a strictly positive prior.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldSpace {
    prior: Vec<f64>,
}

impl WorldSpace {
    pub fn new(prior: Vec<f64>) -> Result<Self> {
        if prior.is_empty() || prior.len() > MAX_WORLDS {
            return Err(Error::Structure(format!(
                "world count {} outside 1..={MAX_WORLDS}",
                prior.len()
            )));
        }
        if let Some(p) = prior.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::Parameter(format!(
                "prior entries must be positive and finite, got {p}"
            )));
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > PRIOR_TOLERANCE {
            return Err(Error::Parameter(format!("prior sums to {total}, not 1")));
        }
        Ok(Self { prior })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Structure(
                "world space needs at least one world".into(),
            ));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn size(&self) -> usize {
        self.prior.len()
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn full(&self) -> Denotation {
        Denotation::full(self.size())
    }
}

/// Probability that a denotation is true: the prior mass of its worlds.
pub fn truth_probability(d: Denotation, ws: &WorldSpace) -> f64 {
    d.worlds()
        .filter(|&w| w < ws.size())
        .map(|w| ws.prior[w])
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub id: String,
    pub denotation: Denotation,
    pub display: String,
}

/// `⟦x⟧ ⊆ ⟦y⟧`.
pub fn entails(x: &Utterance, y: &Utterance) -> bool {
    x.denotation.is_subset(y.denotation)
}

/// `⟦x⟧ ⊂ ⟦y⟧`.
pub fn strictly_entails(x: &Utterance, y: &Utterance) -> bool {
    entails(x, y) && x.denotation != y.denotation
}

/// Ordered utterance list whose `eos` entry (ω) is true everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Language {
    n_worlds: usize,
    utterances: Vec<Utterance>,
    eos: usize,
    index: HashMap<String, usize>,
}

impl Language {
    pub fn new(n_worlds: usize, utterances: Vec<Utterance>, eos: usize) -> Result<Self> {
        if n_worlds == 0 || n_worlds > MAX_WORLDS {
            return Err(Error::Structure(format!(
                "world count {n_worlds} outside 1..={MAX_WORLDS}"
            )));
        }
        if utterances.is_empty() {
            return Err(Error::Structure("language has no utterances".into()));
        }
        if eos >= utterances.len() {
            return Err(Error::Structure(format!("eos index {eos} out of range")));
        }
        let full = Denotation::full(n_worlds);
        let mut index = HashMap::new();
        for (i, u) in utterances.iter().enumerate() {
            if u.id.is_empty() || u.id.chars().any(char::is_whitespace) {
                return Err(Error::Structure(format!(
                    "utterance id '{}' must be nonempty without whitespace",
                    u.id
                )));
            }
            if u.id.starts_with('#') {
                return Err(Error::Structure(format!(
                    "utterance id '{}' may not start with '#'",
                    u.id
                )));
            }
            if index.insert(u.id.clone(), i).is_some() {
                return Err(Error::Structure(format!(
                    "duplicate utterance id '{}'",
                    u.id
                )));
            }
            if u.denotation.is_empty() {
                return Err(Error::Structure(format!(
                    "utterance '{}' is true in no world",
                    u.id
                )));
            }
            if !u.denotation.is_subset(full) {
                return Err(Error::Structure(format!(
                    "utterance '{}' names worlds beyond {n_worlds}",
                    u.id
                )));
            }
        }
        if utterances[eos].denotation != full {
            return Err(Error::Structure(format!(
                "eos '{}' must be true in every world",
                utterances[eos].id
            )));
        }
        Ok(Self {
            n_worlds,
            utterances,
            eos,
            index,
        })
    }

    pub fn n_worlds(&self) -> usize {
        self.n_worlds
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn eos(&self) -> usize {
        self.eos
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn utterance(&self, i: usize) -> &Utterance {
        &self.utterances[i]
    }

    pub fn denotation(&self, i: usize) -> Denotation {
        self.utterances[i].denotation
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Structure(format!("unknown utterance id '{id}'")))
    }

    /// Indices of every utterance other than ω.
    pub fn content_utterances(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| i != self.eos)
    }

    pub fn check_tokens(&self, tokens: &[usize]) -> Result<()> {
        match tokens.iter().find(|&&t| t >= self.len()) {
            Some(t) => Err(Error::Structure(format!(
                "token index {t} not in language of {}",
                self.len()
            ))),
            None => Ok(()),
        }
    }

    /// Intersection of token denotations; the empty text denotes every world.
    pub fn text_denotation(&self, tokens: &[usize]) -> Result<Denotation> {
        self.check_tokens(tokens)?;
        Ok(self.denotation_unchecked(tokens))
    }

    pub(crate) fn denotation_unchecked(&self, tokens: &[usize]) -> Denotation {
        tokens
            .iter()
            .fold(Denotation::full(self.n_worlds), |d, &t| {
                d.intersect(self.utterances[t].denotation)
            })
    }

    /// Parses whitespace-separated utterance ids.
    pub fn parse_text(&self, s: &str) -> Result<Vec<usize>> {
        s.split_whitespace().map(|id| self.index_of(id)).collect()
    }

    /// Space-joined ids.
    pub fn format_text(&self, tokens: &[usize]) -> String {
        let ids: Vec<&str> = tokens
            .iter()
            .map(|&t| self.utterances[t].id.as_str())
            .collect();
        ids.join(" ")
    }

    /// Space-joined display labels.
    pub fn display_text(&self, tokens: &[usize]) -> String {
        let ids: Vec<&str> = tokens
            .iter()
            .map(|&t| self.utterances[t].display.as_str())
            .collect();
        ids.join(" ")
    }
}

/// A token sequence with its completeness flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Text {
    pub tokens: Vec<usize>,
    pub complete: bool,
}

impl Text {
    pub fn new(tokens: Vec<usize>, lang: &Language) -> Result<Self> {
        lang.check_tokens(&tokens)?;
        let eos = lang.eos();
        let omegas = tokens.iter().filter(|&&t| t == eos).count();
        let complete = omegas == 1 && tokens.last() == Some(&eos);
        Ok(Self { tokens, complete })
    }

    pub fn parse(s: &str, lang: &Language) -> Result<Self> {
        Self::new(lang.parse_text(s)?, lang)
    }

    pub fn denotation(&self, lang: &Language) -> Result<Denotation> {
        lang.text_denotation(&self.tokens)
    }
}

/// All `2^n - 1` nonempty subsets of `n` worlds under a uniform prior.
///
/// Utterances are ordered by size, then lexicographically by world index,
/// and labeled by bitstrings; the all-ones utterance is ω.
pub fn make_synthetic_language(n_worlds: usize) -> Result<(WorldSpace, Language)> {
    if n_worlds == 0 {
        return Err(Error::Structure(
            "synthetic language needs at least one world".into(),
        ));
    }
    if n_worlds > MAX_SYNTHETIC_WORLDS {
        return Err(Error::Parameter(format!(
            "synthetic language limited to {MAX_SYNTHETIC_WORLDS} worlds, got {n_worlds}"
        )));
    }
    let mut masks: Vec<u64> = (1..(1u64 << n_worlds)).collect();
    masks.sort_by_key(|&m| {
        let key: Vec<usize> = Denotation(m).worlds().collect();
        (m.count_ones(), key)
    });
    let utterances: Vec<Utterance> = masks
        .into_iter()
        .map(|m| {
            let label = Denotation(m).to_bitstring(n_worlds);
            Utterance {
                id: label.clone(),
                denotation: Denotation(m),
                display: label,
            }
        })
        .collect();
    let eos = utterances.len() - 1;
    Ok((
        WorldSpace::uniform(n_worlds)?,
        Language::new(n_worlds, utterances, eos)?,
    ))
}

/// Language part of a config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LanguageSpec {
    Synthetic {
        worlds: usize,
    },
    Explicit {
        worlds: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<Vec<f64>>,
        utterances: Vec<UtteranceSpec>,
        omega: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtteranceSpec {
    pub id: String,
    /// Bitstring, character `i` = world `i`.
    pub denotation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
}

/// A language built from a config block, with any per-utterance cost overrides.
#[derive(Debug, Clone)]
pub struct LoadedLanguage {
    pub worlds: WorldSpace,
    pub language: Language,
    pub cost_overrides: Vec<Option<f64>>,
}

impl Default for LanguageSpec {
    fn default() -> Self {
        LanguageSpec::Synthetic { worlds: 3 }
    }
}

impl LanguageSpec {
    pub fn build(&self) -> Result<LoadedLanguage> {
        match self {
            LanguageSpec::Synthetic { worlds } => {
                let (ws, lang) = make_synthetic_language(*worlds)?;
                let n = lang.len();
                Ok(LoadedLanguage {
                    worlds: ws,
                    language: lang,
                    cost_overrides: vec![None; n],
                })
            }
            LanguageSpec::Explicit {
                worlds,
                prior,
                utterances,
                omega,
            } => {
                let ws = match prior {
                    Some(p) => {
                        if p.len() != *worlds {
                            return Err(Error::Structure(format!(
                                "prior has {} entries for {worlds} worlds",
                                p.len()
                            )));
                        }
                        WorldSpace::new(p.clone())?
                    }
                    None => WorldSpace::uniform(*worlds)?,
                };
                let mut utts = Vec::with_capacity(utterances.len());
                for u in utterances {
                    if u.denotation.len() != *worlds {
                        return Err(Error::Structure(format!(
                            "denotation '{}' of '{}' needs {worlds} characters",
                            u.denotation, u.id
                        )));
                    }
                    utts.push(Utterance {
                        id: u.id.clone(),
                        denotation: Denotation::from_bitstring(&u.denotation)?,
                        display: u.display.clone().unwrap_or_else(|| u.id.clone()),
                    });
                }
                let eos = utts.iter().position(|u| &u.id == omega).ok_or_else(|| {
                    Error::Structure(format!("omega '{omega}' is not an utterance id"))
                })?;
                let lang = Language::new(*worlds, utts, eos)?;
                let cost_overrides = utterances.iter().map(|u| u.cost).collect();
                Ok(LoadedLanguage {
                    worlds: ws,
                    language: lang,
                    cost_overrides,
                })
            }
        }
    }
}
