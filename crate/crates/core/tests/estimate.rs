//! Estimator consistency against the finite-sample bounds over many seeds.

use entail_lab::estimate::{chebyshev_log_bound, hoeffding_bound, FrequencyModel, Sampler};
use entail_lab::marginal::{enumerate_texts, DEFAULT_BUDGET};
use entail_lab::semantics::make_synthetic_language;
use entail_lab::speakers::{Speaker, UniformTruthful};

const SEEDS: u64 = 100;
const SIZES: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];
const DELTA: f64 = 0.1;

#[test]
fn prefix_frequencies_concentrate_within_the_bounds() {
    let (ws, lang) = make_synthetic_language(3).unwrap();
    let sp = UniformTruthful::new(lang.clone(), ws).unwrap();
    let eos = lang.eos();
    let table = enumerate_texts(&sp, 4, DEFAULT_BUDGET).unwrap();
    let targets: Vec<(Vec<usize>, f64)> = table
        .iter()
        .filter(|(z, _)| {
            !z.is_empty()
                && z.iter()
                    .position(|&t| t == eos)
                    .is_none_or(|i| i + 1 == z.len())
        })
        .map(|(z, e)| (z.to_vec(), e.log_prob.exp()))
        .filter(|(_, p)| *p >= 1e-3)
        .collect();
    assert!(targets.len() > 20);

    // [size][target] -> (within chebyshev, hoeffding violations, sum |log error|)
    let mut cheb = vec![vec![0u32; targets.len()]; SIZES.len()];
    let mut hoef = vec![vec![0u32; targets.len()]; SIZES.len()];
    let mut err = vec![0f64; SIZES.len()];
    for seed in 0..SEEDS {
        let mut sampler = Sampler::new(&sp, seed, 50).unwrap();
        let mut freq = FrequencyModel::new(lang.clone());
        let mut drawn = 0;
        for (si, &n) in SIZES.iter().enumerate() {
            while drawn < n {
                freq.add_text(&sampler.text(drawn).unwrap().0);
                drawn += 1;
            }
            let h = hoeffding_bound(DELTA, n as f64).unwrap();
            for (ti, (z, p)) in targets.iter().enumerate() {
                let got = freq.prefix_frequency(z);
                let b = chebyshev_log_bound(1.0 / p, DELTA, n as f64).unwrap().bound;
                let e = (got.ln() - p.ln()).abs();
                cheb[si][ti] += u32::from(e <= b);
                hoef[si][ti] += u32::from((got - p).abs() > h);
                err[si] += e.min(50.0);
            }
        }
    }
    // The pinned threshold is a flat 85%. The bound itself only promises
    // 1 − δ − (1 − p)^n, which sits below 85% for p near 1e-3 at n = 1000,
    // so the shortfalls are printed next to that guarantee.
    let mut failures = Vec::new();
    for si in 0..SIZES.len() {
        for ti in 0..targets.len() {
            let z = lang.format_text(&targets[ti].0);
            let n = SIZES[si];
            let guaranteed = 1.0
                - chebyshev_log_bound(1.0 / targets[ti].1, DELTA, n as f64)
                    .unwrap()
                    .failure;
            if (cheb[si][ti] as f64) < 0.85 * SEEDS as f64 {
                failures.push(format!(
                    "chebyshev n={n} z={z}: {}/{SEEDS} within (guaranteed {guaranteed:.3})",
                    cheb[si][ti]
                ));
            }
            if hoef[si][ti] as f64 > DELTA * 1.5 * SEEDS as f64 {
                failures.push(format!(
                    "hoeffding n={n} z={z}: {} violations",
                    hoef[si][ti]
                ));
            }
        }
    }
    for f in &failures {
        eprintln!("{f}");
    }
    for w in err.windows(2) {
        assert!(w[1] < w[0], "mean log error must shrink with n: {err:?}");
    }
    assert!(
        failures.is_empty(),
        "{} target/size cells below the pinned rate",
        failures.len()
    );
}

#[test]
fn sampled_corpora_are_seed_determined() {
    let (ws, lang) = make_synthetic_language(3).unwrap();
    let sp = UniformTruthful::new(lang, ws).unwrap();
    let a: Vec<_> = (0..200)
        .map(|i| Sampler::new(&sp, 9, 50).unwrap().text(i).unwrap())
        .collect();
    let mut s = Sampler::new(&sp, 9, 50).unwrap();
    let b: Vec<_> = (0..200).map(|i| s.text(i).unwrap()).collect();
    assert_eq!(a, b);
    assert!(sp.context_free());
}
