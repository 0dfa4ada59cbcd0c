use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regsimp::stats::{corpus_lines, format_csv, format_table, run_row};
use regsimp::{randgen, Error, PipelineConfig, Simplifier, DEFAULT_CAPACITY};

#[derive(Parser)]
#[command(name = "regsimp", version, about = "Simplify regular expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simplify expressions, one result per line.
    Simplify(SimplifyArgs),
    /// Compare two expressions.
    Check(CheckArgs),
    /// Run a corpus through one or more algorithm sets and report statistics.
    Stats(StatsArgs),
    /// Generate uniformly random expressions.
    Gen(GenArgs),
}

#[derive(Args)]
struct Common {
    /// Algorithm letters: n, f, r, s, S.
    #[arg(long, default_value = "rsS", allow_hyphen_values = true)]
    alg: String,
    /// Number of expression identifiers.
    #[arg(long, default_value_t = DEFAULT_CAPACITY)]
    capacity: usize,
    /// Depth limit of the equation solver.
    #[arg(long)]
    solve_depth: Option<usize>,
    /// Size cap of the equation solver.
    #[arg(long)]
    solve_cap: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = PipelineConfig::parse(&self.alg)?;
        cfg.solve_depth = self.solve_depth;
        cfg.solve_cap = self.solve_cap;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimplifyArgs {
    #[command(flatten)]
    common: Common,
    /// Expression to simplify.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    expr: Option<String>,
    /// File with one expression per line.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Print whether both expressions denote the same language.
    #[arg(long, group = "op")]
    equiv: bool,
    /// Print whether the first language is included in the second.
    #[arg(long, group = "op")]
    include: bool,
    /// Print a simplified expression for the difference.
    #[arg(long, group = "op")]
    diff: bool,
    /// Exit with status 4 when the answer is false.
    #[arg(long)]
    strict: bool,
    left: String,
    right: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Args)]
struct StatsArgs {
    /// Corpus file, one expression per line.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated algorithm sets; an empty item is the baseline.
    #[arg(long, default_value = "rsS", allow_hyphen_values = true)]
    alg: String,
    #[arg(long, default_value_t = DEFAULT_CAPACITY)]
    capacity: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Independent backgrounds to split the corpus across.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 2)]
    letters: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave the constant 0 out of the leaves.
    #[arg(long)]
    no_zero: bool,
}

/// Exit status for a library error.
fn status(err: &Error) -> u8 {
    match err {
        Error::ArenaFull { .. } => 2,
        Error::UnknownAlgorithm(_) | Error::ReservedAlgorithm => 3,
        _ => 1,
    }
}

fn fail(context: &str, err: &Error) -> ExitCode {
    eprintln!("regsimp: {context}{err}");
    ExitCode::from(status(err))
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("regsimp: {}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn simplify(args: SimplifyArgs) -> ExitCode {
    let cfg = match args.common.config() {
        Ok(c) => c,
        Err(e) => return fail("", &e),
    };
    let text = match (&args.expr, &args.input) {
        (Some(e), _) => e.clone(),
        (None, Some(p)) => match read(p) {
            Ok(t) => t,
            Err(code) => return code,
        },
        (None, None) => unreachable!("clap requires one of --expr and --input"),
    };
    let mut s = Simplifier::with_capacity(cfg, args.common.capacity);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match s.simplify_text(line) {
            Ok(r) => {
                let _ = writeln!(out, "{r}");
            }
            Err(e) => return fail(&format!("line {}: ", i + 1), &e),
        }
    }
    ExitCode::SUCCESS
}

fn check(args: CheckArgs) -> ExitCode {
    let cfg = match args.common.config() {
        Ok(c) => c,
        Err(e) => return fail("", &e),
    };
    let mut s = Simplifier::with_capacity(cfg, args.common.capacity);
    let answer = if args.diff {
        match s.check_diff(&args.left, &args.right) {
            Ok(text) => {
                println!("{text}");
                return ExitCode::SUCCESS;
            }
            Err(e) => return fail("", &e),
        }
    } else if args.include {
        s.check_include(&args.left, &args.right)
    } else if args.equiv {
        s.check_equiv(&args.left, &args.right)
    } else {
        eprintln!("regsimp: one of --equiv, --include, --diff is required");
        return ExitCode::from(1);
    };
    match answer {
        Ok(b) => {
            println!("{b}");
            if !b && args.strict {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => fail("", &e),
    }
}

fn stats(args: StatsArgs) -> ExitCode {
    let text = match read(&args.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let lines = corpus_lines(&text);
    let mut rows = Vec::new();
    for alg in args.alg.split(',') {
        match run_row(&lines, alg.trim(), args.capacity, args.jobs) {
            Ok(row) => rows.push(row),
            Err(e) => return fail(&format!("algorithms {alg:?}: "), &e),
        }
    }
    match args.format {
        Format::Table => print!("{}", format_table(&rows)),
        Format::Csv => print!("{}", format_csv(&rows)),
    }
    ExitCode::SUCCESS
}

fn gen(args: GenArgs) -> ExitCode {
    if args.size == 0 || args.letters == 0 {
        eprintln!("regsimp: --size and --letters must be positive");
        return ExitCode::from(1);
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let leaves = if args.no_zero {
        randgen::Leaves::NoZero
    } else {
        randgen::Leaves::All
    };
    let mut g = randgen::Generator::with_leaves(args.size, args.letters, args.seed, leaves);
    for _ in 0..args.count {
        let _ = writeln!(out, "{}", g.sample(args.size));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simplify(a) => simplify(a),
        Command::Check(a) => check(a),
        Command::Stats(a) => stats(a),
        Command::Gen(a) => gen(a),
    }
}
