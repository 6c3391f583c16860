//! Command-line surface for the siedm index: build an index file from a
//! text, run threshold queries against it, inspect index metadata and
//! search counters, and cross-check results with brute-force references.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use siedm_core::esp::parse_query;
use siedm_core::index::EspIndex;
use siedm_core::oracle::{
    enumerate_stabbed, exact_edm, window_l1, EdmConfig, PlainGrammar,
};
use siedm_core::search::{search_parsed, SearchOptions};
use siedm_core::Error as CoreError;

/// Succinct text index with approximate pattern search under edit
/// distance with moves.
#[derive(Parser)]
#[command(name = "siedm", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index file from a text file (read as raw bytes).
    Build {
        /// Input text file.
        #[arg(short = 'i', value_name = "TEXT")]
        input: PathBuf,
        /// Output index file.
        #[arg(short = 'o', value_name = "INDEX")]
        output: PathBuf,
    },
    /// Report positions whose window distance to the pattern is at most tau.
    Search {
        /// Index file produced by `build`.
        #[arg(short = 'x', value_name = "INDEX")]
        index: PathBuf,
        /// Pattern given inline (UTF-8; use -Q for arbitrary bytes).
        #[arg(short = 'q', value_name = "STRING", required_unless_present = "query_file", conflicts_with = "query_file")]
        query: Option<String>,
        /// Pattern read from a file as raw bytes.
        #[arg(short = 'Q', value_name = "FILE")]
        query_file: Option<PathBuf>,
        /// Distance threshold, a non-negative integer.
        #[arg(short = 't', value_name = "TAU", allow_hyphen_values = true)]
        tau: i64,
        /// Output format: tsv prints "position TAB distance" per line, json
        /// adds the decomposition size.
        #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
        format: OutputFormat,
    },
    /// Print index metadata; with -q and -t, also search counters.
    Stats {
        /// Index file produced by `build`.
        #[arg(short = 'x', value_name = "INDEX")]
        index: PathBuf,
        /// Pattern to run for counter reporting (requires -t).
        #[arg(short = 'q', value_name = "STRING")]
        query: Option<String>,
        /// Distance threshold for counter reporting (requires -q).
        #[arg(short = 't', value_name = "TAU", allow_hyphen_values = true)]
        tau: Option<i64>,
    },
    /// Brute-force cross-checks for small inputs.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exact edit distance with moves between two short strings.
    Edm {
        #[arg(short = 'a', value_name = "STRING")]
        a: String,
        #[arg(short = 'b', value_name = "STRING")]
        b: String,
    },
    /// Per-window L1 distances by direct parse-tree walk; with -t, also an
    /// agreement line against `search` output.
    Window {
        /// Input text file (the index is built in memory).
        #[arg(short = 'i', value_name = "TEXT")]
        input: PathBuf,
        /// Pattern string.
        #[arg(short = 'q', value_name = "STRING")]
        query: String,
        /// Threshold for the search agreement check.
        #[arg(short = 't', value_name = "TAU", allow_hyphen_values = true)]
        tau: Option<i64>,
    },
    /// Size of the exhaustive candidate space for a pattern length.
    Stab {
        /// Input text file (the index is built in memory).
        #[arg(short = 'i', value_name = "TEXT")]
        input: PathBuf,
        /// Pattern string (only its length matters).
        #[arg(short = 'q', value_name = "STRING")]
        query: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Tsv,
    Json,
}

/// Invalid argument combinations detected after clap parsing.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    if let Some(core) = err.downcast_ref::<CoreError>() {
        return match core {
            CoreError::Format(_) | CoreError::Truncated { .. } | CoreError::Checksum { .. } => 3,
            CoreError::QueryTooShort(_)
            | CoreError::QueryTooLong { .. }
            | CoreError::TextTooShort(_) => 4,
            _ => 2,
        };
    }
    2
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::Build { input, output } => build(&input, &output),
        Cmd::Search {
            index,
            query,
            query_file,
            tau,
            format,
        } => {
            let pattern = read_pattern(query, query_file)?;
            search_cmd(&index, &pattern, check_tau(tau)?, format)
        }
        Cmd::Stats { index, query, tau } => stats_cmd(&index, query, tau),
        Cmd::Oracle { which } => match which {
            OracleCmd::Edm { a, b } => oracle_edm(a.as_bytes(), b.as_bytes()),
            OracleCmd::Window { input, query, tau } => {
                oracle_window(&input, query.as_bytes(), tau)
            }
            OracleCmd::Stab { input, query } => oracle_stab(&input, query.len() as u64),
        },
    }
}

fn check_tau(tau: i64) -> anyhow::Result<u64> {
    u64::try_from(tau).map_err(|_| usage(format!("tau must be non-negative, got {tau}")))
}

fn read_pattern(query: Option<String>, query_file: Option<PathBuf>) -> anyhow::Result<Vec<u8>> {
    match (query, query_file) {
        (Some(q), None) => Ok(q.into_bytes()),
        (None, Some(path)) => {
            fs::read(&path).with_context(|| format!("reading pattern file {}", path.display()))
        }
        _ => Err(usage("give exactly one of -q and -Q")),
    }
}

fn threads_from_env() -> anyhow::Result<usize> {
    match std::env::var("SIEDM_THREADS") {
        Err(_) => Ok(1),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(usage(format!(
                "SIEDM_THREADS must be a positive integer, got {raw:?}"
            ))),
        },
    }
}

fn load_index(path: &PathBuf) -> anyhow::Result<EspIndex> {
    let bytes =
        fs::read(path).with_context(|| format!("reading index file {}", path.display()))?;
    Ok(EspIndex::deserialize(&bytes)?)
}

fn print_metadata(idx: &EspIndex) {
    let (tree, vectors, lens) = idx.component_sizes();
    println!("text length: {}", idx.text_len());
    println!("n: {}", idx.n());
    println!("sigma: {}", idx.sigma());
    println!("rounds: {}", idx.rounds());
    println!("encoded tree: {tree} bytes");
    println!("characteristic vectors: {vectors} bytes");
    println!("length vector: {lens} bytes");
}

fn build(input: &PathBuf, output: &PathBuf) -> anyhow::Result<()> {
    let text =
        fs::read(input).with_context(|| format!("reading text file {}", input.display()))?;
    let idx = EspIndex::build(&text)?;
    let bytes = idx.serialize();
    fs::write(output, &bytes)
        .with_context(|| format!("writing index file {}", output.display()))?;
    print_metadata(&idx);
    println!("index file: {} bytes", bytes.len());
    Ok(())
}

fn search_cmd(
    index: &PathBuf,
    pattern: &[u8],
    tau: u64,
    format: OutputFormat,
) -> anyhow::Result<()> {
    let idx = load_index(index)?;
    let opts = SearchOptions {
        threads: threads_from_env()?,
        ..SearchOptions::default()
    };
    let qp = parse_query(&idx, pattern)?;
    let out = search_parsed(&idx, &qp, tau, &opts)?;
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    for occ in &out.occurrences {
        match format {
            OutputFormat::Tsv => writeln!(w, "{}\t{}", occ.pos, occ.dist)?,
            OutputFormat::Json => {
                let obj = serde_json::json!({
                    "pos": occ.pos,
                    "dist": occ.dist,
                    "decomp_len": occ.decomp_len,
                });
                writeln!(w, "{obj}")?;
            }
        }
    }
    Ok(())
}

fn stats_cmd(index: &PathBuf, query: Option<String>, tau: Option<i64>) -> anyhow::Result<()> {
    let idx = load_index(index)?;
    print_metadata(&idx);
    match (query, tau) {
        (None, None) => Ok(()),
        (Some(q), Some(t)) => {
            let opts = SearchOptions {
                threads: threads_from_env()?,
                ..SearchOptions::default()
            };
            let qp = parse_query(&idx, q.as_bytes())?;
            let out = search_parsed(&idx, &qp, check_tau(t)?, &opts)?;
            println!("#TN: {}", out.stats.traversed_nodes);
            println!("#CAND: {}", out.stats.candidates);
            println!("#TP: {}", out.stats.accepted);
            println!("#OCC: {}", out.stats.occurrences);
            Ok(())
        }
        _ => Err(usage("counter reporting needs both -q and -t")),
    }
}

fn oracle_edm(a: &[u8], b: &[u8]) -> anyhow::Result<()> {
    let cfg = EdmConfig::default();
    if a.len() > cfg.max_len || b.len() > cfg.max_len {
        return Err(usage(format!(
            "oracle edm accepts strings of at most {} bytes",
            cfg.max_len
        )));
    }
    match exact_edm(a, b, &cfg)? {
        Some(d) => println!("{d}"),
        None => println!("unresolved"),
    }
    Ok(())
}

fn oracle_window(input: &PathBuf, pattern: &[u8], tau: Option<i64>) -> anyhow::Result<()> {
    let text =
        fs::read(input).with_context(|| format!("reading text file {}", input.display()))?;
    let idx = EspIndex::build(&text)?;
    let qp = parse_query(&idx, pattern)?;
    if qp.q_len > idx.text_len() {
        return Err(CoreError::QueryTooLong {
            query: pattern.len(),
            text: text.len(),
        }
        .into());
    }
    let g = PlainGrammar::from_index(&idx)?;
    let walked = window_l1(&g, &qp.f_q, qp.q_len);
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    for (pos0, d) in walked.iter().enumerate() {
        writeln!(w, "{}\t{}", pos0 + 1, d)?;
    }
    if let Some(t) = tau {
        let t = check_tau(t)?;
        let out = search_parsed(&idx, &qp, t, &SearchOptions::default())?;
        let reported: HashSet<u64> = out.occurrences.iter().map(|o| o.pos).collect();
        let within: HashSet<u64> = walked
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= t)
            .map(|(pos0, _)| pos0 as u64 + 1)
            .collect();
        let both = within.intersection(&reported).count();
        let oracle_only = within.difference(&reported).count();
        let search_only = reported.difference(&within).count();
        writeln!(
            w,
            "# search-agreement: both={both} oracle-only={oracle_only} search-only={search_only}"
        )?;
    }
    Ok(())
}

fn oracle_stab(input: &PathBuf, q_len: u64) -> anyhow::Result<()> {
    let text =
        fs::read(input).with_context(|| format!("reading text file {}", input.display()))?;
    if q_len < 2 {
        return Err(CoreError::QueryTooShort(q_len as usize).into());
    }
    let idx = EspIndex::build(&text)?;
    let g = PlainGrammar::from_index(&idx)?;
    let pairs = enumerate_stabbed(&g, q_len);
    let distinct: HashSet<u32> = pairs.iter().map(|&(x, _)| x).collect();
    println!("stabbed pairs: {}", pairs.len());
    println!("distinct variables: {}", distinct.len());
    Ok(())
}
