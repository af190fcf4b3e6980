//! Command-line runner. Exit codes: 0 success, 2 invariant violation,
//! 3 config error, 1 anything else.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use entail_lab::experiment::{self, validate_config, ExperimentConfig};
use entail_lab::Error;

#[derive(Parser)]
#[command(
    name = "entail-lab",
    version,
    about = "Distributional entailment experiments over finite world spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config; defaults apply to missing fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    tolerance: Option<f64>,
    /// Wall-clock budget; the corpus sweep trims its grid to fit
    #[arg(long = "budget-seconds", global = true, allow_negative_numbers = true)]
    budget_seconds: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Exhaustive theorem checks on exact text tables
    Test,
    /// Empirical g-scores across corpus sizes
    Sweep,
    /// g as x and y drift from entailment to contradiction
    Counterexample,
    /// Sample-complexity curve
    Complexity,
    /// Descriptive statistics of a sampled corpus
    Stats,
    /// Write a sampled corpus file
    Sample {
        /// Number of texts
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long = "max-len-guard", default_value_t = entail_lab::estimate::DEFAULT_MAX_LEN_GUARD)]
        max_len_guard: usize,
    },
}

impl Command {
    fn kind(self) -> Option<&'static str> {
        match self {
            Command::Test => Some("exhaustive-test"),
            Command::Sweep => Some("corpus-sweep"),
            Command::Counterexample => Some("counterexample-sweep"),
            Command::Complexity => Some("complexity-curve"),
            Command::Stats => Some("corpus-stats"),
            Command::Sample { .. } => None,
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut doc: serde_json::Value = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => serde_json::json!({}),
    };
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    match (cli.command.kind(), obj.get("experiment")) {
        (Some(kind), None) => {
            obj.insert("experiment".into(), serde_json::json!({ "kind": kind }));
        }
        (Some(kind), Some(e)) if e.get("kind").and_then(|k| k.as_str()) != Some(kind) => {
            return Err(Error::Config(format!(
                "subcommand expects an experiment of kind '{kind}'"
            )));
        }
        (None, None) => {
            obj.insert(
                "experiment".into(),
                serde_json::json!({ "kind": "corpus-stats" }),
            );
        }
        _ => {}
    }
    if let Some(s) = cli.seed {
        obj.insert("seed".into(), s.into());
    }
    if let Some(t) = cli.tolerance {
        obj.insert("tolerance".into(), serde_json::json!(t));
    }
    if let Some(b) = cli.budget_seconds {
        obj.insert("budget_seconds".into(), serde_json::json!(b));
    }
    if let Some(o) = &cli.out {
        obj.insert("output".into(), o.display().to_string().into());
    }
    validate_config(&doc.to_string())
}

fn sink(config: &ExperimentConfig) -> Result<Box<dyn Write>, Error> {
    Ok(match &config.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cli: &Cli) -> Result<usize, Error> {
    let config = load(cli)?;
    let start = Instant::now();
    if let Command::Sample { n, max_len_guard } = cli.command {
        if n == 0 || max_len_guard == 0 {
            return Err(Error::Config(
                "--n and --max-len-guard must be positive".into(),
            ));
        }
        let lang = config.language.build()?.language;
        let corpus = experiment::sample_from_config(&config, n, max_len_guard)?;
        let mut out = sink(&config)?;
        corpus.write(&lang, &mut out)?;
        out.flush()?;
        for w in corpus.warnings() {
            eprintln!("warning: {w}");
        }
        eprintln!("sampled {n} texts in {:.2}s", start.elapsed().as_secs_f64());
        return Ok(0);
    }
    let report = experiment::run(&config)?;
    let mut out = sink(&config)?;
    report.write(&mut out)?;
    out.flush()?;
    for s in &report.summary {
        eprintln!("{s}");
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "{} finished in {:.2}s with {} violation(s)",
        config.experiment.kind(),
        start.elapsed().as_secs_f64(),
        report.violations
    );
    Ok(report.violations)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(3)
        }
        Err(e @ Error::Consistency(_)) => {
            eprintln!("invariant violation: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
