//! `sfq` — command-line front end.
//!
//! Exit status: 0 on success, 2 on a parse or usage error, 3 when a linear
//! system of the construction is inconsistent, 4 when verification fails.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use num_traits::Signed;
use sfq::graph::{fmt_q, Graph, GraphVector};
use sfq::homology::{hoch, pi, pike_d, pike_h};
use sfq::induction::{run_induction, InductionError, StageRecord};
use sfq::io::{format_graph_vector, format_report, format_table, parse_graph_file, parse_graph_lines, parse_table};
use sfq::kgra::{broom_graph, insert_black, insert_white};
use sfq::oc::{mc_verify, Cutoff, Verdict};
use sfq::weight::{estimate_weight, estimate_weight_edges, WeightEstimate};

const EXIT_PARSE: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;
const EXIT_FAIL: u8 = 4;

#[derive(Parser)]
#[command(name = "sfq", version, about = "Exact graph-operad engine for rational stable formality quasi-isomorphisms")]
struct Cli {
    /// Print stage records to stderr as they are produced.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Colour {
    C,
    O,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form and sign of every graph line of a file.
    Canon { file: PathBuf },
    /// Operadic insertion of INNER into slot I of OUTER.
    Compose {
        outer: PathBuf,
        inner: PathBuf,
        #[arg(long)]
        slot: usize,
        #[arg(long, value_enum)]
        color: Colour,
    },
    /// Hochschild differential of an open vector.
    Hoch { file: PathBuf },
    /// Projection onto white-univalent, white-antisymmetric graphs.
    Pi { file: PathBuf },
    /// Pike-creating operator on an invariant vector.
    PikeD { file: PathBuf },
    /// Homotopy inverse of the pike operator on an invariant vector.
    PikeH { file: PathBuf },
    /// Run the construction up to a cutoff and write the table and report.
    Run {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..))]
        nmax: u8,
        #[arg(long, default_value_t = 0)]
        kmax: u8,
        /// Seed of the Monte-Carlo cross-check of the boundary row.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples per broom for the cross-check; 0 skips it.
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value = "sfq-out")]
        out: PathBuf,
    },
    /// Check the Maurer–Cartan equation and boundary row of a table file.
    Verify { file: PathBuf },
    /// Monte-Carlo estimate of the configuration-space weight of one graph.
    Weight {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure with its exit status.
struct Failure(u8, String);

fn parse_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_PARSE, format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        return std::io::read_to_string(std::io::stdin()).map_err(|e| parse_failure(path, e));
    }
    std::fs::read_to_string(path).map_err(|e| parse_failure(path, e))
}

fn read_vector(path: &Path) -> Result<GraphVector, Failure> {
    parse_graph_file(&read(path)?).map_err(|e| parse_failure(path, e))
}

fn format_estimate(w: &WeightEstimate) -> String {
    format!("mean={:.6e} stderr={:.6e} samples={} seed={}", w.mean, w.stderr, w.samples, w.seed)
}

fn cmd_canon(path: &Path) -> Result<String, Failure> {
    let mut out = String::new();
    for (n, gl) in parse_graph_lines(&read(path)?).map_err(|e| parse_failure(path, e))? {
        let canon = Graph::canonicalize(gl.nb, gl.nw, &gl.edges).map_err(|e| parse_failure(path, format!("line {n}: {e}")))?;
        let term = canon.iter().next().map(|(g, c)| (g.clone(), c.clone()));
        match term {
            None => out.push_str("ZERO\n"),
            Some((g, sign)) => {
                let line = format_graph_vector(&GraphVector::single(g, &sign * &gl.coeff, gl.color));
                let sign = if sign.is_negative() { "-1" } else { "+1" };
                writeln!(out, "{} sign={sign}", line.trim_end()).unwrap();
            }
        }
    }
    Ok(out)
}

fn cmd_run(nmax: u8, kmax: u8, seed: u64, samples: u64, out: &Path, verbose: bool) -> Result<String, Failure> {
    let cutoff = Cutoff::new(nmax, kmax);
    let mut state = run_induction(cutoff, None).map_err(|e| match e {
        InductionError::Inconsistent(_) => Failure(EXIT_INCONSISTENT, e.to_string()),
        _ => Failure(1, e.to_string()),
    })?;
    if samples > 0 {
        for k in 0..=kmax.min(3) {
            let w = estimate_weight(&broom_graph(k), samples, seed);
            state.log.push(StageRecord { tag: format!("weight@k={k}"), detail: format_estimate(&w) });
        }
    }
    if verbose {
        eprint!("{}", format_report(&state.log));
    }
    std::fs::create_dir_all(out).map_err(|e| Failure(1, format!("{}: {e}", out.display())))?;
    let write = |name: &str, text: &str| {
        let p = out.join(name);
        std::fs::write(&p, text).map_err(|e| Failure(1, format!("{}: {e}", p.display())))
    };
    write("alpha.txt", &format_table(&state.table))?;
    write("report.txt", &format_report(&state.log))?;
    let report = mc_verify(&state.table);
    write("verify.txt", &report.to_string())?;
    let summary = format!(
        "entries={} pass={} fail={} unchecked={} out={}\n",
        state.table.keys().count(),
        report.count(|v| *v == Verdict::Pass),
        report.count(|v| matches!(v, Verdict::Fail(_))),
        report.count(|v| matches!(v, Verdict::Unchecked(_))),
        out.display()
    );
    if report.passed() {
        Ok(summary)
    } else {
        Err(Failure(EXIT_FAIL, format!("{report}{summary}")))
    }
}

fn cmd_verify(path: &Path) -> Result<String, Failure> {
    let table = parse_table(&read(path)?).map_err(|e| parse_failure(path, e))?;
    let report = mc_verify(&table);
    if report.passed() {
        Ok(report.to_string())
    } else {
        let names: Vec<String> = report.failures().iter().map(|c| c.to_string()).collect();
        Err(Failure(EXIT_FAIL, format!("{report}FAIL at {}\n", names.join(" "))))
    }
}

fn cmd_weight(path: &Path, samples: u64, seed: u64) -> Result<String, Failure> {
    let lines = parse_graph_lines(&read(path)?).map_err(|e| parse_failure(path, e))?;
    let [(n, gl)] = lines.as_slice() else {
        return Err(parse_failure(path, "expected exactly one graph line"));
    };
    let w = estimate_weight_edges(gl.nb, gl.nw, &gl.edges, samples, seed)
        .map_err(|e| parse_failure(path, format!("line {n}: {e}")))?;
    Ok(format!("{} coeff={}\n", format_estimate(&w), fmt_q(&gl.coeff)))
}

fn vector_op<E: std::fmt::Display>(path: &Path, op: impl Fn(&GraphVector) -> Result<GraphVector, E>) -> Result<String, Failure> {
    let v = read_vector(path)?;
    op(&v).map(|r| format_graph_vector(&r)).map_err(|e| Failure(1, e.to_string()))
}

fn dispatch(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Canon { file } => cmd_canon(&file),
        Command::Compose { outer, inner, slot, color } => {
            let (a, b) = (read_vector(&outer)?, read_vector(&inner)?);
            let r = match color {
                Colour::C => insert_black(&a, slot, &b),
                Colour::O => insert_white(&a, slot, &b),
            };
            r.map(|v| format_graph_vector(&v)).map_err(|e| Failure(1, e.to_string()))
        }
        Command::Hoch { file } => vector_op(&file, hoch),
        Command::Pi { file } => vector_op(&file, |v| Ok::<_, String>(pi(v))),
        Command::PikeD { file } => vector_op(&file, pike_d),
        Command::PikeH { file } => vector_op(&file, pike_h),
        Command::Run { nmax, kmax, seed, samples, out } => cmd_run(nmax, kmax, seed, samples, &out, cli.verbose),
        Command::Verify { file } => cmd_verify(&file),
        Command::Weight { file, samples, seed } => cmd_weight(&file, samples, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("SFQ_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure(code, msg)) => {
            if code == EXIT_FAIL {
                print!("{msg}");
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
