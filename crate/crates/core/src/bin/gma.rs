use clap::{Parser, Subcommand};
use gma::cli::{run, Command, RunConfig};
use gma::frame::TransformKind;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gma", version, about = "Multiscale transforms, estimation and beta numbers")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[arg(long, global = true, default_value = "wavelet")]
    transform: TransformKind,
    /// Side of synthetic inputs
    #[arg(long, global = true, default_value_t = 256)]
    n: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Noise level or tolerance; repeat or comma-separate for a grid
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, global = true, default_value_t = 6)]
    jmax: u32,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 32)]
    replicates: usize,
    /// Term counts for approx
    #[arg(long, global = true, value_delimiter = ',')]
    terms: Vec<usize>,
}

#[derive(Subcommand)]
enum Verb {
    Transform { input: Option<String> },
    Synthesize { input: Option<String> },
    Approx { input: Option<String> },
    Denoise { input: Option<String> },
    Riskcurve { input: Option<String> },
    Compress { input: Option<String> },
    Betascan { input: Option<String> },
    Selftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 5 } else { 0 });
        }
    };
    let (command, input) = match cli.verb {
        Verb::Transform { input } => (Command::Transform, input),
        Verb::Synthesize { input } => (Command::Synthesize, input),
        Verb::Approx { input } => (Command::Approx, input),
        Verb::Denoise { input } => (Command::Denoise, input),
        Verb::Riskcurve { input } => (Command::Riskcurve, input),
        Verb::Compress { input } => (Command::Compress, input),
        Verb::Betascan { input } => (Command::Betascan, input),
        Verb::Selftest => (Command::Selftest, None),
    };
    let cfg = RunConfig {
        command,
        input,
        transform: cli.transform,
        n: cli.n,
        seed: cli.seed,
        eps: cli.eps,
        jmax: cli.jmax,
        replicates: cli.replicates,
        terms: cli.terms,
        out: cli.out,
        threads: cli.threads,
    };
    match run(&cfg) {
        Ok(o) => {
            let _ = std::io::stdout().write_all(&o.stdout);
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("gma: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
