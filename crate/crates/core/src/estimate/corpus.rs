//! Seeded ancestral sampling and the corpus file format.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::semantics::Language;
use crate::speakers::Speaker;

pub const DEFAULT_MAX_LEN_GUARD: usize = 50;
/// Truncation rate above which a warning is recorded.
pub const TRUNCATION_WARNING_RATE: f64 = 0.01;

/// Sampled complete texts with generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub texts: Vec<Vec<usize>>,
    pub seed: u64,
    pub speaker_config: String,
    pub max_len_guard: usize,
    /// Texts cut at the guard and closed with ω.
    pub truncated: usize,
}

impl Corpus {
    pub fn n(&self) -> usize {
        self.texts.len()
    }

    pub fn truncation_rate(&self) -> f64 {
        if self.texts.is_empty() {
            0.0
        } else {
            self.truncated as f64 / self.texts.len() as f64
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.truncation_rate() > TRUNCATION_WARNING_RATE {
            out.push(format!(
                "{} of {} texts ({:.2}%) hit the length guard of {}",
                self.truncated,
                self.n(),
                100.0 * self.truncation_rate(),
                self.max_len_guard
            ));
        }
        out
    }

    /// Header lines start with `#`; each text is one line of space-separated ids.
    pub fn write<W: Write>(&self, lang: &Language, mut out: W) -> Result<()> {
        writeln!(out, "# seed: {}", self.seed)?;
        writeln!(out, "# speaker: {}", self.speaker_config)?;
        writeln!(out, "# n: {}", self.n())?;
        writeln!(out, "# max_len_guard: {}", self.max_len_guard)?;
        writeln!(out, "# truncated: {}", self.truncated)?;
        for w in self.warnings() {
            writeln!(out, "# warning: {w}")?;
        }
        for t in &self.texts {
            writeln!(out, "{}", lang.format_text(t))?;
        }
        Ok(())
    }

    /// Reads the format written by [`Corpus::write`]. Every text must be complete.
    pub fn read<R: BufRead>(lang: &Language, input: R) -> Result<Self> {
        let mut corpus = Corpus {
            texts: Vec::new(),
            seed: 0,
            speaker_config: String::new(),
            max_len_guard: DEFAULT_MAX_LEN_GUARD,
            truncated: 0,
        };
        let eos = lang.eos();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once(": ") {
                    let bad = |_| Error::Structure(format!("line {}: bad value for '{k}'", i + 1));
                    match k {
                        "seed" => corpus.seed = v.parse().map_err(bad)?,
                        "speaker" => corpus.speaker_config = v.to_string(),
                        "max_len_guard" => corpus.max_len_guard = v.parse().map_err(bad)?,
                        "truncated" => corpus.truncated = v.parse().map_err(bad)?,
                        _ => {}
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let t = lang.parse_text(&line)?;
            let omegas = t.iter().filter(|&&x| x == eos).count();
            if omegas != 1 || t.last() != Some(&eos) {
                return Err(Error::Structure(format!(
                    "line {}: text '{line}' is not complete",
                    i + 1
                )));
            }
            corpus.texts.push(t);
        }
        Ok(corpus)
    }
}

struct CacheNode {
    children: Vec<u32>,
    /// cumulative next-token probabilities per world
    rows: Vec<Option<Box<[f64]>>>,
}

/// Draws texts one index at a time; text `i` depends only on `(seed, i)`.
///
/// Next-token distributions are cached per (context, world) in a trie.
pub struct Sampler<'a, S: Speaker + ?Sized> {
    speaker: &'a S,
    seed: u64,
    max_len_guard: usize,
    prior_cdf: Vec<f64>,
    nodes: Vec<CacheNode>,
    context_free: bool,
}

fn cumulative(p: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    p.map(|v| {
        acc += v;
        acc
    })
    .collect()
}

fn draw(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    cdf.iter().position(|&c| target < c).unwrap_or_else(|| {
        // rounding at the top end: last token with mass
        (0..cdf.len())
            .rev()
            .find(|&i| i == 0 || cdf[i] > cdf[i - 1])
            .unwrap_or(0)
    })
}

impl<'a, S: Speaker + ?Sized> Sampler<'a, S> {
    pub fn new(speaker: &'a S, seed: u64, max_len_guard: usize) -> Result<Self> {
        if max_len_guard == 0 {
            return Err(Error::Parameter("max_len_guard must be positive".into()));
        }
        let nw = speaker.worlds().size();
        let nx = speaker.language().len();
        Ok(Self {
            speaker,
            seed,
            max_len_guard,
            prior_cdf: cumulative(speaker.worlds().prior().iter().copied()),
            nodes: vec![CacheNode {
                children: vec![0; nx],
                rows: vec![None; nw],
            }],
            context_free: speaker.context_free(),
        })
    }

    fn row(&mut self, node: usize, context: &[usize], w: usize) -> Result<&[f64]> {
        if self.nodes[node].rows[w].is_none() {
            let p = self.speaker.next(context, w)?;
            if p.iter().sum::<f64>() <= 0.0 {
                return Err(Error::Domain(format!(
                    "speaker has no continuation after '{}' in world {w}",
                    self.speaker.language().format_text(context)
                )));
            }
            self.nodes[node].rows[w] = Some(cumulative(p.into_iter()).into_boxed_slice());
        }
        Ok(self.nodes[node].rows[w].as_deref().unwrap())
    }

    fn child(&mut self, node: usize, y: usize) -> usize {
        if self.context_free {
            return 0;
        }
        let c = self.nodes[node].children[y];
        if c != 0 {
            return c as usize;
        }
        let id = self.nodes.len();
        let nw = self.speaker.worlds().size();
        let nx = self.speaker.language().len();
        self.nodes.push(CacheNode {
            children: vec![0; nx],
            rows: vec![None; nw],
        });
        self.nodes[node].children[y] = id as u32;
        id
    }

    /// Text number `index` and whether it hit the guard.
    pub fn text(&mut self, index: u64) -> Result<(Vec<usize>, bool)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let w = draw(&self.prior_cdf, rng.gen::<f64>());
        let eos = self.speaker.language().eos();
        let mut tokens = Vec::new();
        let mut node = 0;
        loop {
            if tokens.len() == self.max_len_guard {
                tokens.push(eos);
                return Ok((tokens, true));
            }
            let u = rng.gen::<f64>();
            let y = {
                let ctx = std::mem::take(&mut tokens);
                let r = self.row(node, &ctx, w).map(|cdf| draw(cdf, u));
                tokens = ctx;
                r?
            };
            tokens.push(y);
            if y == eos {
                return Ok((tokens, false));
            }
            node = self.child(node, y);
        }
    }

    /// Appends texts until the corpus holds `n` of them.
    pub fn extend(&mut self, corpus: &mut Corpus, n: usize) -> Result<()> {
        for i in corpus.texts.len()..n {
            let (t, cut) = self.text(i as u64)?;
            corpus.truncated += usize::from(cut);
            corpus.texts.push(t);
        }
        Ok(())
    }
}

/// Samples `n` complete texts: a world from the prior, then utterances until ω.
pub fn sample_corpus<S: Speaker + ?Sized>(
    speaker: &S,
    n: usize,
    seed: u64,
    max_len_guard: usize,
    speaker_config: &str,
) -> Result<Corpus> {
    if n == 0 {
        return Err(Error::Parameter("corpus size must be at least 1".into()));
    }
    let mut corpus = Corpus {
        texts: Vec::with_capacity(n),
        seed,
        speaker_config: speaker_config.to_string(),
        max_len_guard,
        truncated: 0,
    };
    Sampler::new(speaker, seed, max_len_guard)?.extend(&mut corpus, n)?;
    Ok(corpus)
}
