//! Corpus-size sweep of empirical g-scores over many (x, y) text pairs.

use std::collections::HashMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimate::{FrequencyModel, NgramModel, Sampler, State, UNKNOWN_FLOOR};
use crate::marginal::format_float;
use crate::semantics::{Denotation, Language};
use crate::speakers::Speaker;

use super::{ExperimentConfig, ExperimentSpec, Report};

pub const ESTIMATORS: [&str; 2] = ["frequency", "trigram"];

/// `round(max / 2^k)` for `k = 0, 1, ...` while at least `min`, ascending.
pub fn size_grid(max: u64, min: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let v = (max as f64 / 2f64.powi(k)).round() as u64;
        if v < min || k > 64 {
            break;
        }
        out.push(v);
        k += 1;
    }
    out.reverse();
    out.dedup();
    out
}

/// Satisfiable texts of length `1..=max_len` without ω, in lexicographic order.
pub fn sweep_texts(lang: &Language, max_len: usize) -> Vec<Vec<usize>> {
    let content: Vec<usize> = lang.content_utterances().collect();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, Denotation)> =
        vec![(Vec::new(), Denotation::full(lang.n_worlds()))];
    // depth-first with children pushed in reverse keeps lexicographic order
    while let Some((t, d)) = stack.pop() {
        if !t.is_empty() {
            out.push(t.clone());
        }
        if t.len() == max_len {
            continue;
        }
        for &y in content.iter().rev() {
            let nd = d.intersect(lang.denotation(y));
            if !nd.is_empty() {
                let mut nt = t.clone();
                nt.push(y);
                stack.push((nt, nd));
            }
        }
    }
    out
}

/// The pair set of a sweep: indices into `texts`, grouped by `x`.
#[derive(Debug, Clone)]
pub struct PairSet {
    pub texts: Vec<Vec<usize>>,
    pub denotations: Vec<Denotation>,
    pub pairs: Vec<(u32, u32)>,
}

impl PairSet {
    /// All ordered pairs, or a fixed pseudo-random subset of `cap` of them.
    pub fn new(lang: &Language, max_len: usize, cap: Option<usize>) -> Result<Self> {
        let texts = sweep_texts(lang, max_len);
        let denotations = texts.iter().map(|t| lang.denotation_unchecked(t)).collect();
        let m = texts.len() as u32;
        let mut pairs: Vec<(u32, u32)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
        if let Some(cap) = cap {
            if cap < pairs.len() {
                pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
                pairs.truncate(cap);
                pairs.sort_unstable();
            }
        }
        if pairs.is_empty() {
            return Err(Error::Parameter("the sweep has no text pairs".into()));
        }
        Ok(Self {
            texts,
            denotations,
            pairs,
        })
    }

    pub fn entailed(&self, i: u32, j: u32) -> bool {
        self.denotations[i as usize].is_subset(self.denotations[j as usize])
    }

    pub fn bucket(&self, i: u32, j: u32) -> usize {
        self.texts[i as usize].len() + self.texts[j as usize].len()
    }

    pub fn max_bucket(&self) -> usize {
        2 * self.texts.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Sum of `|g|` and pair count, indexed `[estimator][bucket][entailed]`;
/// bucket 0 holds every pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAccumulator {
    pub sums: Vec<Vec<[f64; 2]>>,
    pub counts: Vec<Vec<[u64; 2]>>,
}

impl GridAccumulator {
    fn new(buckets: usize) -> Self {
        Self {
            sums: vec![vec![[0.0; 2]; buckets + 1]; 2],
            counts: vec![vec![[0; 2]; buckets + 1]; 2],
        }
    }

    fn add(&mut self, est: usize, bucket: usize, entailed: bool, g: f64) {
        let e = usize::from(entailed);
        for b in [0, bucket] {
            self.sums[est][b][e] += g.abs();
            self.counts[est][b][e] += 1;
        }
    }

    /// Mean `|g|` for a cell, `None` without pairs.
    pub fn mean(&self, est: usize, bucket: usize, entailed: bool) -> Option<f64> {
        let e = usize::from(entailed);
        let c = self.counts[est][bucket][e];
        (c > 0).then(|| self.sums[est][bucket][e] / c as f64)
    }
}

fn log_floor() -> f64 {
    UNKNOWN_FLOOR.ln()
}

/// Scores every pair under both estimators after the corpus reaches its current size.
///
/// Each probability is lifted to `UNKNOWN_FLOOR` before the logs are combined.
/// A pair is skipped when neither `xy` nor `yy` occurs as a corpus prefix.
pub fn evaluate(
    freq: &FrequencyModel,
    tri: &NgramModel,
    pairs: &PairSet,
    eos: usize,
) -> GridAccumulator {
    let lf = log_floor();
    let fl = |v: f64| v.max(lf);
    let ln_n = (freq.n() as f64).ln();
    let lfreq = |node: Option<usize>| match node.map(|n| freq.count(n)) {
        Some(c) if c > 0 => (c as f64).ln() - ln_n,
        _ => lf,
    };
    let m = pairs.texts.len();
    let mut node = Vec::with_capacity(m);
    let mut node_yy = Vec::with_capacity(m);
    let mut f_xw = Vec::with_capacity(m);
    let mut f_y = Vec::with_capacity(m);
    let mut t_x = Vec::with_capacity(m);
    let mut t_state = Vec::with_capacity(m);
    let mut t_xw = Vec::with_capacity(m);
    let mut t_y = Vec::with_capacity(m);
    for z in &pairs.texts {
        let nd = freq.node(z);
        let nyy = nd.and_then(|n| freq.walk(n, z));
        node.push(nd);
        node_yy.push(nyy);
        f_xw.push(lfreq(nd.and_then(|n| freq.child(n, eos))));
        f_y.push(lfreq(nyy) - lfreq(nd.and_then(|n| freq.child(n, eos))));
        let (lp, s) = tri.log_chain(tri.start_state(), z);
        let (lzz, _) = tri.log_chain(s, z);
        t_x.push(lp);
        t_state.push(s);
        t_xw.push(fl(lp + tri.log_cond(s, eos)));
        t_y.push(fl(lp + lzz) - fl(lp + tri.log_cond(s, eos)));
    }
    // ln p̂(y | state) chains for every state some x ends in
    let mut chains: HashMap<State, Vec<f64>> = HashMap::new();
    for &s in &t_state {
        chains
            .entry(s)
            .or_insert_with(|| pairs.texts.iter().map(|z| tri.log_chain(s, z).0).collect());
    }

    let mut acc = GridAccumulator::new(pairs.max_bucket());
    let mut current = u32::MAX;
    let mut chain: &[f64] = &[];
    for &(i, j) in &pairs.pairs {
        let (iu, ju) = (i as usize, j as usize);
        let xy = node[iu].and_then(|n| freq.walk(n, &pairs.texts[ju]));
        if xy.is_none() && node_yy[ju].is_none() {
            continue;
        }
        if i != current {
            current = i;
            chain = &chains[&t_state[iu]];
        }
        let entailed = pairs.entailed(i, j);
        let bucket = pairs.bucket(i, j);
        let g_freq = lfreq(xy) - f_xw[iu] - f_y[ju];
        let g_tri = fl(t_x[iu] + chain[ju]) - t_xw[iu] - t_y[ju];
        acc.add(0, bucket, entailed, g_freq);
        acc.add(1, bucket, entailed, g_tri);
    }
    acc
}

/// Per-seed results of a sweep over the size grid.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub grid: Vec<GridAccumulator>,
    pub sampled: u64,
    pub truncated: u64,
}

/// Grows one seeded corpus through `sizes` (ascending), evaluating at each
/// point. Stops early once `stop_after(i)` is true for grid index `i`.
pub fn run_seed<S: Speaker + ?Sized>(
    speaker: &S,
    seed: u64,
    sizes: &[u64],
    pairs: &PairSet,
    order: usize,
    guard: usize,
    mut stop_after: impl FnMut(usize) -> bool,
) -> Result<SeedRun> {
    let lang = speaker.language().clone();
    let eos = lang.eos();
    let mut sampler = Sampler::new(speaker, seed, guard)?;
    let mut freq = FrequencyModel::new(lang.clone());
    let mut tri = NgramModel::new(lang, order)?;
    let mut run = SeedRun {
        seed,
        grid: Vec::new(),
        sampled: 0,
        truncated: 0,
    };
    for (gi, &size) in sizes.iter().enumerate() {
        while run.sampled < size {
            let (t, cut) = sampler.text(run.sampled)?;
            freq.add_text(&t);
            tri.add_text(&t);
            run.sampled += 1;
            run.truncated += u64::from(cut);
        }
        run.grid.push(evaluate(&freq, &tri, pairs, eos));
        if stop_after(gi) {
            break;
        }
    }
    Ok(run)
}

/// Cell of the aggregated sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub size: u64,
    pub estimator: &'static str,
    /// `None` for the all-lengths bucket
    pub bucket: Option<usize>,
    pub entailed: bool,
    /// Mean over seeds of each seed's mean `|g|`
    pub mean_abs_g: f64,
    pub mean_pairs: f64,
    pub seeds_with_pairs: usize,
}

/// Averages per-seed cell means over seeds that scored any pair in the cell.
pub fn aggregate(sizes: &[u64], runs: &[SeedRun], buckets: usize) -> Vec<SweepRow> {
    let points = runs.iter().map(|r| r.grid.len()).min().unwrap_or(0);
    let mut rows = Vec::new();
    for (gi, &size) in sizes.iter().enumerate().take(points) {
        for (est, name) in ESTIMATORS.iter().enumerate() {
            for b in 0..=buckets {
                for entailed in [true, false] {
                    let e = usize::from(entailed);
                    let means: Vec<f64> = runs
                        .iter()
                        .filter_map(|r| r.grid[gi].mean(est, b, entailed))
                        .collect();
                    if means.is_empty() {
                        continue;
                    }
                    let pairs: u64 = runs.iter().map(|r| r.grid[gi].counts[est][b][e]).sum();
                    rows.push(SweepRow {
                        size,
                        estimator: name,
                        bucket: (b > 0).then_some(b),
                        entailed,
                        mean_abs_g: means.iter().sum::<f64>() / means.len() as f64,
                        mean_pairs: pairs as f64 / runs.len() as f64,
                        seeds_with_pairs: means.len(),
                    });
                }
            }
        }
    }
    rows
}

pub fn write_sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "n",
        "estimator",
        "length_xy",
        "entailed",
        "mean_abs_g",
        "mean_pairs",
        "seeds_with_pairs",
    ])?;
    for r in rows {
        wtr.write_record([
            r.size.to_string(),
            r.estimator.to_string(),
            r.bucket
                .map_or_else(|| "all".to_string(), |b| b.to_string()),
            r.entailed.to_string(),
            format_float(r.mean_abs_g),
            format_float(r.mean_pairs),
            r.seeds_with_pairs.to_string(),
        ])?;
    }
    Ok(String::from_utf8(wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf-8"))
}

/// Looks up the all-lengths mean for `(size, estimator, entailed)`.
pub fn overall_mean(rows: &[SweepRow], size: u64, estimator: &str, entailed: bool) -> Option<f64> {
    rows.iter()
        .find(|r| {
            r.size == size
                && r.estimator == estimator
                && r.bucket.is_none()
                && r.entailed == entailed
        })
        .map(|r| r.mean_abs_g)
}

/// Seeds `seed, seed + 1, ...` run one after another; with a budget, the
/// first seed's timing fixes a grid cutoff shared by all seeds.
pub fn run_corpus_sweep(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let ExperimentSpec::CorpusSweep {
        ref sizes,
        max_size,
        min_size,
        seeds,
        max_pair_len,
        pair_cap,
        order,
        max_len_guard,
    } = config.experiment
    else {
        return Err(Error::Config(
            "run_corpus_sweep needs a corpus-sweep config".into(),
        ));
    };
    let loaded = config.language.build()?;
    let speaker = config.speaker.build(&loaded)?;
    let lang = speaker.language().clone();
    let mut grid = match sizes {
        Some(s) => s.clone(),
        None => size_grid(max_size, min_size),
    };
    grid.sort_unstable();
    grid.dedup();
    let pairs = PairSet::new(&lang, max_pair_len, pair_cap)?;

    let start = Instant::now();
    let share = config.budget_seconds.map(|b| b / f64::from(seeds));
    let mut cutoff = grid.len();
    let mut runs = Vec::with_capacity(seeds as usize);
    for k in 0..seeds {
        let seed = config.seed.wrapping_add(u64::from(k));
        let first = k == 0;
        let limit = cutoff;
        let run = run_seed(
            &speaker,
            seed,
            &grid[..limit],
            &pairs,
            order,
            max_len_guard,
            |gi| {
                first && share.is_some_and(|s| start.elapsed().as_secs_f64() > s) && gi + 1 < limit
            },
        )?;
        if first {
            cutoff = run.grid.len();
        }
        runs.push(run);
    }
    let rows = aggregate(&grid[..cutoff], &runs, pairs.max_bucket());

    let mut report = Report::new(config);
    report.meta("grid", format!("{:?}", &grid[..cutoff]));
    if cutoff < grid.len() {
        report.meta("grid_trimmed_by_budget", format!("{:?}", &grid[cutoff..]));
    }
    report.meta("texts", pairs.texts.len());
    report.meta("pairs", pairs.pairs.len());
    let sampled: u64 = runs.iter().map(|r| r.sampled).sum();
    let truncated: u64 = runs.iter().map(|r| r.truncated).sum();
    report.meta("truncated", format!("{truncated}/{sampled}"));
    if sampled > 0 && truncated as f64 / sampled as f64 > crate::estimate::TRUNCATION_WARNING_RATE {
        report.warnings.push(format!(
            "{truncated} of {sampled} sampled texts hit the length guard"
        ));
    }
    if let Some(&top) = grid[..cutoff].last() {
        for est in ESTIMATORS {
            if let (Some(e), Some(ne)) = (
                overall_mean(&rows, top, est, true),
                overall_mean(&rows, top, est, false),
            ) {
                report.summary.push(format!(
                    "info {est} at n={top}: entailed {e:.4}, not entailed {ne:.4}, ratio {:.4}",
                    e / ne
                ));
            }
        }
    }
    report.body = write_sweep_csv(&rows)?;
    Ok(report)
}
