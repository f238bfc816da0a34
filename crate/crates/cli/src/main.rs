use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use gqprof::table::unescape_gram;
use gqprof::{
    build_profile_with, compress_text, count_unigrams, parse_slp, qgram_distance, write_slp,
    Algorithm, Build, BuildConfig, Error, ProfileTable, Slp,
};

const DEFAULT_SEED: u64 = 0x9e37_79b9;

#[derive(Parser)]
#[command(
    name = "gqprof",
    version,
    about = "q-gram profiles of grammar-compressed strings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Basic,
    Improved,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Basic => Algorithm::Basic,
            AlgorithmArg::Improved => Algorithm::Improved,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compress a text file into a grammar (.slp).
    Compress {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the q-gram profile of a grammar as TSV.
    Profile {
        slp: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "improved")]
        algorithm: AlgorithmArg,
        /// Print build statistics as JSON on stderr.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rebuilds allowed after a fingerprint collision.
        #[arg(long, default_value_t = 8)]
        max_retries: usize,
        /// Use this small prime as modulus on the first attempt.
        #[arg(long, hide = true)]
        weak_modulus: Option<u64>,
    },
    /// Print the number of occurrences of one q-gram.
    Query {
        slp: PathBuf,
        #[arg(long)]
        q: usize,
        /// The q-gram; bytes may be written as \xHH.
        gram: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print the q-gram distance between two profile TSV files.
    Dist { a: PathBuf, b: PathBuf },
    /// Write the q-gram graph in Graphviz DOT format.
    Dot {
        slp: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status 1 for bad input, 2 when fingerprint verification kept failing.
enum Failure {
    Input(anyhow::Error),
    Verification(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read_slp(path: &Path) -> anyhow::Result<Slp> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_slp(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_table(path: &Path) -> anyhow::Result<ProfileTable> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ProfileTable::from_tsv(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn check_q(q: usize) -> anyhow::Result<()> {
    if q == 0 {
        bail!("--q must be at least 1");
    }
    Ok(())
}

fn build(slp: &Slp, q: usize, seed: u64, config: &BuildConfig) -> Result<Build, Failure> {
    build_profile_with(slp, q, seed, config).map_err(|e| match e {
        Error::RetriesExhausted {
            attempts,
            ref witnesses,
        } => {
            let listed: Vec<String> = witnesses
                .iter()
                .map(|w| {
                    format!(
                        "{:?} / {:?} -> {:#x}",
                        String::from_utf8_lossy(&w.first),
                        String::from_utf8_lossy(&w.second),
                        w.fingerprint
                    )
                })
                .collect();
            Failure::Verification(anyhow!(
                "fingerprint collisions in all {attempts} attempts: {}",
                listed.join("; ")
            ))
        }
        other => Failure::Input(other.into()),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compress { input, out } => {
            let text = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let slp = compress_text(&text).map_err(anyhow::Error::from)?;
            emit(out.as_deref(), &write_slp(&slp))?;
            eprintln!("n={} N={}", slp.num_rules(), slp.text_len());
        }
        Command::Profile {
            slp,
            q,
            seed,
            algorithm,
            stats,
            out,
            max_retries,
            weak_modulus,
        } => {
            check_q(q)?;
            let slp = read_slp(&slp)?;
            let (table, stats_json) = if q == 1 {
                let table = count_unigrams(&slp);
                let json = serde_json::json!({
                    "algorithm": "unigram",
                    "n": slp.num_rules(),
                    "N": slp.text_len(),
                    "q": 1,
                    "size_Sq": 0,
                    "chars_decompressed": 0,
                    "distinct_qgrams": table.len(),
                    "total_qgrams": table.total(),
                    "retries": 0,
                });
                (table, json)
            } else {
                let config = BuildConfig {
                    algorithm: algorithm.into(),
                    max_retries,
                    first_attempt_modulus: weak_modulus,
                    ..BuildConfig::default()
                };
                let b = build(&slp, q, seed, &config)?;
                let json = serde_json::to_value(&b.stats).map_err(anyhow::Error::from)?;
                (b.profile.table(), json)
            };
            emit(out.as_deref(), &table.to_tsv())?;
            if stats {
                eprintln!("{stats_json}");
            }
        }
        Command::Query { slp, q, gram, seed } => {
            check_q(q)?;
            let gram = unescape_gram(&gram).map_err(|e| anyhow!(e))?;
            if gram.len() != q {
                return Err(anyhow!(
                    "usage: the q-gram must have exactly {q} bytes, got {}",
                    gram.len()
                )
                .into());
            }
            let slp = read_slp(&slp)?;
            let count = if q == 1 {
                count_unigrams(&slp).get(&gram)
            } else {
                let b = build(&slp, q, seed, &BuildConfig::default())?;
                b.profile.query(&gram).map_err(anyhow::Error::from)?
            };
            println!("{count}");
        }
        Command::Dist { a, b } => {
            let (ta, tb) = (read_table(&a)?, read_table(&b)?);
            let d = qgram_distance(&ta, &tb).map_err(anyhow::Error::from)?;
            println!("{d}");
        }
        Command::Dot { slp, q, seed, out } => {
            if q < 2 {
                return Err(anyhow!("--q must be at least 2 for the graph").into());
            }
            let slp = read_slp(&slp)?;
            let b = build(&slp, q, seed, &BuildConfig::default())?;
            emit(out.as_deref(), &b.graph.to_dot())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
