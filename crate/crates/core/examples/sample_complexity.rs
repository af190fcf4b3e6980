//! How many texts the bounds ask for: the sample-complexity curve over
//! text length, plus the Chebyshev log-error bound at a few corpus sizes.
//!
//! cargo run --example sample_complexity

use entail_lab::estimate::{chebyshev_log_bound, sample_complexity_curve};

fn main() -> entail_lab::Result<()> {
    println!("length  texts needed (δ = 0.1, ε = 1, perplexity 20)");
    for l in 0..=10 {
        println!(
            "{l:>6}  {:.3e}",
            sample_complexity_curve(l, 0.1, 1.0, 20.0)?
        );
    }
    println!("\nlog-error bound for a text with complexity K = 768:");
    for n in [1e3, 1e4, 1e5, 1e6] {
        let b = chebyshev_log_bound(768.0, 0.1, n)?;
        println!(
            "  n = {n:.0e}: |log p - log p̂| <= {:.4} with probability >= {:.3}",
            b.bound,
            1.0 - b.failure
        );
    }
    Ok(())
}
