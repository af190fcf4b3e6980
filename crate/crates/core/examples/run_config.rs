//! Run any experiment from a JSON document, the same path the CLI takes.
//!
//! cargo run --example run_config -- '{"speaker": {"kind": "uniform"}, "experiment": {"kind": "exhaustive-test", "max_len": 4}}'

use entail_lab::experiment::{run, validate_config};

fn main() -> entail_lab::Result<()> {
    let doc = std::env::args()
        .nth(1)
        .unwrap_or_else(|| r#"{"experiment": {"kind": "counterexample-sweep"}}"#.to_string());
    let config = validate_config(&doc)?;
    let report = run(&config)?;
    report.write(std::io::stdout().lock())?;
    eprintln!("{} violation(s)", report.violations);
    Ok(())
}
