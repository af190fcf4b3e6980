//! Slide y from entailed by x (k = 0) to contradicting x, over 12 equally
//! likely worlds. g touches zero at the entailment end and again near
//! contradiction, so a zero score does not single out entailment.
//!
//! cargo run --example counterexample_sweep

use entail_lab::experiment::{counterexample_sweep, crossing_count};

fn main() -> entail_lab::Result<()> {
    let points = counterexample_sweep(12, 8, 5.0, 0.1, 0)?;
    println!("{:>3} {:>14} {:>14}", "k", "g", "p(Y)I(Y)-I");
    for p in &points {
        println!("{:>3} {:>14.6} {:>14.6}", p.k, p.g, p.residual);
    }
    let g: Vec<f64> = points.iter().map(|p| p.g).collect();
    println!(
        "zero crossings before the -inf endpoint: {}",
        crossing_count(&g, 1e-9)
    );
    Ok(())
}
