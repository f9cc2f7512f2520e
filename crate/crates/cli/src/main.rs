//! `mortal` — shortest zero products of matrix sets over finite fields.

mod catalog;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use catalog::{CatalogRecord, RecordKind};
use mortal_core::field::Field;
use mortal_core::fibonacci;
use mortal_core::genfile::GeneratorFile;
use mortal_core::matrix::{parse_matrix_literal, Matrix};
use mortal_core::rystov::{self, KMax, RysQuery};
use mortal_core::search::{self, SearchConfig};
use mortal_core::verify;

const VERSION_LINE: &str =
    concat!(env!("CARGO_PKG_VERSION"), " (catalog schema ", "1", ")");

/// Exit codes: 0 success, 1 verification counterexamples or runtime failure,
/// 2 usage or input errors.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser)]
#[command(name = "mortal", version = VERSION_LINE)]
#[command(about = "Shortest zero products of matrix sets over finite fields")]
struct Cli {
    /// Emit machine-readable JSON instead of human output.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Append a result record to this JSONL catalog
    /// (default: $MORTAL_CATALOG when set).
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Field order q (a prime power).
    #[arg(long)]
    q: Option<u64>,
    /// Field characteristic p (prime).
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree e (default 1).
    #[arg(long)]
    e: Option<u32>,
}

impl FieldArgs {
    fn resolve(&self) -> Result<Arc<Field>, CliError> {
        if self.q.is_none() && self.p.is_none() {
            return Err(CliError::Usage("specify a field with --q or --p/--e".into()));
        }
        Field::from_designation(self.q, self.p, self.e).map(Arc::new).map_err(usage)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Shortest zero product of a generator set (BFS over product values).
    Shortest {
        #[command(flatten)]
        field: FieldArgs,
        /// Matrix dimension; inferred from the generators when omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Generator file (JSON: {"q","p","e","n","generators"}).
        #[arg(long, conflicts_with = "gen")]
        generators: Option<PathBuf>,
        /// Matrix literal, rows `;`-separated, entries `,`-separated
        /// (repeat per generator), e.g. --gen 1,0;0,0
        #[arg(long = "gen")]
        gen: Vec<String>,
        /// Depth bound; searches stopped by it are flagged truncated.
        #[arg(long)]
        max_len: Option<u64>,
        /// Also count the minimal-length zero words.
        #[arg(long)]
        count_minimal: bool,
        /// State budget; exceeding it is an error, never a wrong answer.
        #[arg(long)]
        max_states: Option<u64>,
    },
    /// Construct a generator pair whose shortest zero product exceeds a
    /// target length.
    Construct {
        /// The shortest zero product must be longer than this (1..=92).
        #[arg(long)]
        min_length: u64,
        /// Also write the bundle as a generator file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Rystov number Rys(n, q): maximum shortest-zero-product length over
    /// mortal generator sets.
    Rys {
        #[command(flatten)]
        field: FieldArgs,
        /// Matrix dimension.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Max generator-set cardinality, or `all` for the full powerset.
        #[arg(long)]
        k_max: String,
        /// Enumerate one representative per conjugation/scaling orbit.
        #[arg(long)]
        orbits: bool,
        /// Examine at most this many sets (result degrades to lower_bound).
        #[arg(long)]
        max_sets: Option<u64>,
        /// Resumable progress file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Rank of apparition: least a >= 1 with F_a = 0 (mod p).
    Rank {
        #[arg(long)]
        p: u64,
    },
    /// Exhaustive verifiers; exit 1 when counterexamples exist.
    Verify {
        #[command(subcommand)]
        statement: VerifyCommand,
    },
    /// Describe a finite field (modulus choice, optionally the tables).
    Field {
        #[command(flatten)]
        field: FieldArgs,
        /// Print the multiplication table (fields up to q = 64).
        #[arg(long)]
        show_table: bool,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// ABC = O with B singular forces AB = O or BC = O (all 2x2 triples).
    Lemma {
        #[arg(long)]
        q: u64,
    },
    /// Mortal pairs (A, B) with B invertible have a unique minimal zero word
    /// of shape [0, 1 x m, 0].
    Corollary {
        #[arg(long)]
        q: u64,
    },
    /// Minimal zero words have singular edges and invertible interiors.
    Shape {
        #[arg(long)]
        q: u64,
        /// Largest generator-set cardinality to enumerate.
        #[arg(long, default_value_t = 2)]
        k_max: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    let run = || match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    };
    match threads {
        None => run(),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build();
            match pool {
                Ok(pool) => pool.install(run),
                Err(e) => {
                    eprintln!("error: building thread pool: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

/// Serializes a result for stdout, dropping wall-clock keys so identical
/// flags always print identical bytes.
fn result_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(value).expect("results serialize");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("elapsed_ms");
        obj.remove("timestamp");
    }
    v
}

fn emit_catalog(
    cli_catalog: &Option<PathBuf>,
    kind: RecordKind,
    q: u64,
    n: usize,
    elapsed_ms: u64,
    payload: serde_json::Value,
) -> Result<(), CliError> {
    if let Some(path) = catalog::resolve_path(cli_catalog) {
        let record = CatalogRecord::new(kind, q, n, elapsed_ms, payload);
        catalog::append(&path, &record).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Shortest {
            ref field,
            n,
            ref generators,
            ref gen,
            max_len,
            count_minimal,
            max_states,
        } => {
            let (fld, gens) = load_generators(field, generators, gen)?;
            if let Some(n) = n {
                if gens.iter().any(|g| g.n() != n) {
                    return Err(CliError::Usage(format!(
                        "--n {n} does not match the parsed {}x{} generators",
                        gens[0].n(),
                        gens[0].n()
                    )));
                }
            }
            let cfg = SearchConfig { max_len, count_minimal, max_states };
            let started = Instant::now();
            let result = search::shortest_zero_product(&gens, &cfg)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            let elapsed = started.elapsed().as_millis() as u64;
            let payload = serde_json::to_value(&result).expect("serializes");
            emit_catalog(&cli.catalog, RecordKind::Shortest, fld.q(), gens[0].n(), elapsed, payload)?;
            if cli.json {
                println!("{}", result_json(&result));
            } else {
                print_search_result(&result, elapsed);
            }
            Ok(0)
        }

        Command::Construct { min_length, ref emit } => {
            let started = Instant::now();
            let bundle = fibonacci::construct_counterexample(min_length).map_err(usage)?;
            let elapsed = started.elapsed().as_millis() as u64;
            let payload = serde_json::to_value(&bundle).expect("serializes");
            if let Some(path) = emit {
                std::fs::write(path, format!("{payload}\n"))
                    .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
            }
            emit_catalog(&cli.catalog, RecordKind::Construct, bundle.p, 2, elapsed, payload.clone())?;
            if cli.json {
                println!("{payload}");
            } else {
                println!(
                    "target N = {}: p = {} (least prime >= F_{} = {}), k = {}",
                    bundle.target,
                    bundle.p,
                    bundle.target + 1,
                    fibonacci::fib_exact(bundle.target + 1).expect("target <= 92"),
                    bundle.k
                );
                println!(
                    "shortest zero product of {{A, B}} over GF({}) has length k + 2 = {} > {}",
                    bundle.p, bundle.shortest_length, bundle.target
                );
                if let Some(path) = emit {
                    println!("generator file written to {}", path.display());
                }
            }
            Ok(0)
        }

        Command::Rys { ref field, n, ref k_max, orbits, max_sets, ref checkpoint } => {
            let fld = field.resolve()?;
            let k_max = match k_max.as_str() {
                "all" | "ALL" => KMax::All,
                text => KMax::AtMost(text.parse::<usize>().map_err(|_| {
                    CliError::Usage(format!("--k-max expects a number or 'all', got '{text}'"))
                })?),
            };
            let query = RysQuery {
                n,
                field: fld.spec().clone(),
                k_max,
                use_orbits: orbits,
                max_sets,
                checkpoint: checkpoint.clone(),
            };
            let record = rystov::rys_number(&query).map_err(|e| match e {
                rystov::RysError::InvalidKMax
                | rystov::RysError::AllTooLarge(_)
                | rystov::RysError::SpaceTooLarge { .. }
                | rystov::RysError::Field(_) => usage(e),
                other => CliError::Runtime(other.to_string()),
            })?;
            let payload = serde_json::to_value(&record).expect("serializes");
            emit_catalog(&cli.catalog, RecordKind::Rys, record.q, record.n, record.elapsed_ms, payload)?;
            if cli.json {
                println!("{}", result_json(&record));
            } else {
                print_rys_record(&record);
            }
            Ok(0)
        }

        Command::Rank { p } => {
            let rank = fibonacci::rank_of_apparition(p).map_err(usage)?;
            if cli.json {
                println!("{}", serde_json::json!({"p": p, "rank": rank}));
            } else {
                println!("rank of apparition of {p}: {rank} (F_{rank} is the first Fibonacci number divisible by {p})");
            }
            Ok(0)
        }

        Command::Verify { ref statement } => {
            let started = Instant::now();
            let report = match statement {
                VerifyCommand::Lemma { q } => verify::verify_lemma_abc(*q),
                VerifyCommand::Corollary { q } => verify::verify_corollary(*q),
                VerifyCommand::Shape { q, k_max } => verify::verify_minimal_shape(*q, *k_max),
            }
            .map_err(|e| match e {
                verify::VerifyError::OrderTooLarge { .. }
                | verify::VerifyError::TooManySets { .. }
                | verify::VerifyError::Field(_) => usage(e),
                other => CliError::Runtime(other.to_string()),
            })?;
            let elapsed = started.elapsed().as_millis() as u64;
            let payload = serde_json::to_value(&report).expect("serializes");
            emit_catalog(&cli.catalog, RecordKind::Verify, report.q, 2, elapsed, payload)?;
            if cli.json {
                println!("{}", result_json(&report));
            } else {
                println!(
                    "{} over GF({}): {} cases checked, {} counterexamples{} [{} ms]",
                    report.statement,
                    report.q,
                    report.cases_checked,
                    report.counterexamples.len(),
                    report
                        .degenerate_cases
                        .map(|d| format!(", {d} degenerate pairs excluded"))
                        .unwrap_or_default(),
                    elapsed
                );
                for cx in &report.counterexamples {
                    println!("counterexample: {}", serde_json::to_string(cx).expect("serializes"));
                }
                println!("{}", if report.passed() { "PASS" } else { "FAIL" });
            }
            Ok(if report.passed() { 0 } else { 1 })
        }

        Command::Field { ref field, show_table } => {
            let fld = field.resolve()?;
            if show_table && fld.q() > 64 {
                return Err(CliError::Usage(format!(
                    "--show-table supports q <= 64, got q = {}",
                    fld.q()
                )));
            }
            let table: Option<Vec<Vec<u64>>> = show_table.then(|| {
                fld.elements()
                    .map(|a| fld.elements().map(|b| fld.mul(a, b).code()).collect())
                    .collect()
            });
            if cli.json {
                let mut v = serde_json::to_value(fld.spec()).expect("serializes");
                if let Some(t) = &table {
                    v["mul_table"] = serde_json::to_value(t).expect("serializes");
                }
                println!("{v}");
            } else {
                let spec = fld.spec();
                println!("GF({}) = GF({}^{})", spec.q, spec.p, spec.e);
                match &spec.modulus {
                    Some(m) => println!("modulus: {}", poly_string(m)),
                    None => println!("modulus: none (prime field)"),
                }
                if let Some(t) = table {
                    println!("multiplication table (row * column):");
                    for row in t {
                        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                        println!("  {}", cells.join(" "));
                    }
                }
            }
            Ok(0)
        }
    }
}

fn load_generators(
    field_args: &FieldArgs,
    file: &Option<PathBuf>,
    literals: &[String],
) -> Result<(Arc<Field>, Vec<Matrix>), CliError> {
    match (file, literals.is_empty()) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Runtime(format!("reading {}: {e}", path.display())))?;
            let parsed = GeneratorFile::parse(&text).map_err(usage)?;
            parsed.to_matrices().map_err(usage)
        }
        (None, false) => {
            let field = field_args.resolve()?;
            let mut gens = Vec::with_capacity(literals.len());
            for (i, lit) in literals.iter().enumerate() {
                let m = parse_matrix_literal(lit, &field)
                    .map_err(|e| CliError::Usage(format!("--gen #{}: {e}", i + 1)))?;
                gens.push(m);
            }
            if gens.iter().any(|g| g.n() != gens[0].n()) {
                return Err(CliError::Usage("generators must share one dimension".into()));
            }
            Ok((field, gens))
        }
        (None, true) => Err(CliError::Usage(
            "no generators: pass --generators FILE or one or more --gen literals".into(),
        )),
    }
}

fn poly_string(coeffs: &[u64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "x".into(),
            (1, c) => format!("{c}x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}x^{i}"),
        })
        .collect();
    terms.join(" + ")
}

fn print_search_result(result: &search::SearchResult, elapsed_ms: u64) {
    if result.mortal {
        println!("mortal: shortest zero product has length {}", result.shortest_length.unwrap());
        let letters: Vec<String> =
            result.witness.as_ref().unwrap().letters().iter().map(u32::to_string).collect();
        println!("witness word: [{}]", letters.join(", "));
    } else if result.truncated {
        println!("no zero product within the length bound (truncated search)");
    } else {
        println!("not mortal: the semigroup closes without the zero matrix");
    }
    println!(
        "semigroup size: {}{}",
        result.semigroup_size,
        if result.truncated { " (partial)" } else { "" }
    );
    if let Some(count) = result.minimal_word_count {
        println!("minimal zero words: {count}");
    }
    println!("[{elapsed_ms} ms]");
}

fn print_rys_record(record: &rystov::RysRecord) {
    let k_max = match record.k_max {
        KMax::All => "all".to_string(),
        KMax::AtMost(k) => k.to_string(),
    };
    println!(
        "Rys({}, {}) = {}  [{}]",
        record.n,
        record.q,
        record.value,
        match record.mode {
            rystov::RysMode::Exact => "exact",
            rystov::RysMode::LowerBound => "lower bound",
        }
    );
    println!(
        "k_max: {}, sets examined: {}{}, elapsed: {} ms",
        k_max,
        record.sets_examined,
        record
            .orbits_examined
            .map(|o| format!(" ({o} orbit representatives)"))
            .unwrap_or_default(),
        record.elapsed_ms
    );
    println!("value by cardinality: {:?}", record.value_by_k);
    let set: Vec<String> = record
        .witness_set
        .iter()
        .map(|rows| {
            let r: Vec<String> = rows
                .iter()
                .map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
                .collect();
            r.join(";")
        })
        .collect();
    println!("witness set: [{}]", set.join("  "));
    let letters: Vec<String> =
        record.witness_word.letters().iter().map(u32::to_string).collect();
    println!("witness word: [{}]", letters.join(", "));
}
