//! `qosearch`: run the ordered-search adversary, verify its inequality suite,
//! check parameters and sweep parameter grids.
//!
//! Exit codes: 0 success, 1 inequality violation, 2 configuration error,
//! 3 algorithm outside the regime the adversary covers.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qosearch_core::report::{self, format_real, AttackDoc, ParamsReport, SWEEP_HEADER};
use qosearch_core::suite::{run_suite, SuiteConfig, SuiteReport};
use qosearch_core::{
    construct_hard_input, derive_params, hybrid_profile, verdict, AlgorithmSpec, AttackOptions,
    Error, ThresholdInput, DEFAULT_SUCCESS_THRESHOLD,
};

#[derive(Parser)]
#[command(
    name = "qosearch",
    version,
    about = "Adversary workbench for quantum ordered search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the subdivision adversary against an algorithm and report the hard pair.
    Attack(AttackArgs),
    /// Run the randomized inequality suite.
    Verify(VerifyArgs),
    /// Check one parameter triple (q, t, u).
    Params(ParamsArgs),
    /// Evaluate a grid of parameter triples as CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    n: usize,
    /// `lifted-bs`, `truncated-bs:<rounds>`, `zero-query` or `random:T=<T>,w=<w>[,seed=<s>]`.
    #[arg(long)]
    algorithm: String,
    #[arg(long, default_value_t = 18.3)]
    q: f64,
    #[arg(long, default_value_t = 8)]
    t: usize,
    #[arg(long, default_value_t = 4)]
    u: u32,
    /// Stopping depth used instead of the derived v.
    #[arg(long)]
    v_override: Option<u32>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SUCCESS_THRESHOLD)]
    success_threshold: f64,
    /// Skip the adversary and judge the adjacent pair (K-1, K) directly.
    #[arg(long, value_name = "K")]
    pair: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value_t = 18.3)]
    q: f64,
    #[arg(long, default_value_t = 8)]
    t: usize,
    #[arg(long, default_value_t = 4)]
    u: u32,
    /// Nesting levels per descent (default: down to blocks of length 1).
    #[arg(long)]
    v_override: Option<u32>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of seeded random algorithms.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Queries per random algorithm.
    #[arg(long, default_value_t = 4)]
    queries: usize,
    #[arg(long, default_value_t = 4.0)]
    bv_constant: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ParamsArgs {
    #[arg(long)]
    q: f64,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    u: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<f64>,
    /// Comma-separated t values.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<usize>,
    /// Comma-separated u values.
    #[arg(long, value_delimiter = ',', required = true)]
    u: Vec<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<u8, Failure>;

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_text(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn attack(args: &AttackArgs) -> Outcome {
    let spec: AlgorithmSpec = args.algorithm.parse()?;
    let alg = spec.build(args.n, args.seed)?;
    if !(0.0..=1.0).contains(&args.success_threshold) {
        return Err(Error::Config("--success-threshold must lie in [0, 1]".into()).into());
    }

    if let Some(k) = args.pair {
        if k == 0 || k > args.n {
            return Err(Error::Config(format!("--pair must lie in [1, {}]", args.n)).into());
        }
        let v = verdict(
            &alg,
            &ThresholdInput::new(args.n, k - 1)?,
            &ThresholdInput::new(args.n, k)?,
            args.success_threshold,
        )?;
        let text = match args.output.format {
            Format::Json => report::to_json(&v)?,
            Format::Csv => csv_text(
                &[
                    "k_lo",
                    "k_hi",
                    "distinguishable",
                    "l2_distance",
                    "variational",
                    "success_lo",
                    "success_hi",
                ],
                [vec![
                    v.k_lo.to_string(),
                    v.k_hi.to_string(),
                    v.distinguishable.to_string(),
                    format_real(v.l2_distance),
                    format_real(v.variational),
                    format_real(v.success_lo),
                    format_real(v.success_hi),
                ]],
            )?,
        };
        emit(&args.output.out, &text)?;
        eprintln!(
            "pair ({}, {}): {}",
            k - 1,
            k,
            if v.distinguishable {
                "distinguishable"
            } else {
                "not distinguishable"
            }
        );
        return Ok(0);
    }

    let params = derive_params(args.q, args.t, args.u)?;
    if args.v_override == Some(0) {
        return Err(Error::Config("--v-override must be at least 1".into()).into());
    }
    let options = AttackOptions {
        depth_override: args.v_override,
    };
    let trace = construct_hard_input(&alg, &params, &options)?;
    let hybrid = hybrid_profile(&alg, trace.final_interval, trace.final_s, params.q())?;
    let (lo, hi) = trace.hard_pair();
    let v = verdict(&alg, &lo, &hi, args.success_threshold)?;
    let doc = AttackDoc::new(&spec.to_string(), &trace, &hybrid, &v);

    let text = match args.output.format {
        Format::Json => report::to_json(&doc)?,
        Format::Csv => {
            let mut header: Vec<String> = [
                "s", "parent_l", "parent_m", "child_l", "child_m", "chosen_r", "S_before",
                "S_after",
            ]
            .map(String::from)
            .to_vec();
            header.extend((1..=params.t()).map(|r| format!("S_{r}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = doc.records.iter().map(|r| {
                let mut row = vec![
                    r.s.to_string(),
                    r.parent.l.to_string(),
                    r.parent.m.to_string(),
                    r.child.l.to_string(),
                    r.child.m.to_string(),
                    r.chosen_r.to_string(),
                    format_real(r.S_before),
                    format_real(r.S_after),
                ];
                row.extend(r.S_values.iter().map(|x| format_real(*x)));
                row
            });
            csv_text(&header, rows)?
        }
    };
    emit(&args.output.out, &text)?;

    let consistent = doc.invariants.holds()
        && hybrid.triangle_holds()
        && hybrid.perturbation_holds()
        && !v.distinguishable;
    eprintln!(
        "hard pair ({}, {}): {}; final S = {:.6e}; hybrid distance = {:.6e}",
        lo.k(),
        hi.k(),
        if v.distinguishable {
            "distinguishable"
        } else {
            "not distinguishable"
        },
        trace.final_sum,
        hybrid.total_distance
    );
    Ok(if consistent { 0 } else { 1 })
}

fn verify(args: &VerifyArgs) -> Outcome {
    let config = SuiteConfig {
        n: args.n,
        t: args.t,
        q: args.q,
        u: args.u,
        algorithms: args.count,
        queries: args.queries,
        depth: args.v_override,
        seed: args.seed,
        bv_constant: args.bv_constant,
        ..SuiteConfig::default()
    };
    let report: SuiteReport = run_suite(&config)?;
    let text = match args.output.format {
        Format::Json => report::to_json(&report)?,
        Format::Csv => csv_text(
            &["check", "evaluated", "violations", "worst_slack"],
            report.checks.iter().map(|(name, c)| {
                vec![
                    name.to_owned(),
                    c.evaluated.to_string(),
                    c.violations.to_string(),
                    format_real(c.worst_slack),
                ]
            }),
        )?,
    };
    emit(&args.output.out, &text)?;
    for (name, c) in report.checks.iter() {
        eprintln!(
            "{:<24} {:>7} checked {:>4} violations  worst slack {:.3e}",
            name, c.evaluated, c.violations, c.worst_slack
        );
    }
    eprintln!("max variational/l2 ratio: {:.6}", report.bv_max_ratio);
    Ok(if report.passed() { 0 } else { 1 })
}

fn params(args: &ParamsArgs) -> Outcome {
    let r: ParamsReport = report::params_report(args.q, args.t, args.u)?;
    let text = match args.output.format {
        Format::Json => report::to_json(&r)?,
        Format::Csv => csv_text(&SWEEP_HEADER, [r.csv_row()])?,
    };
    emit(&args.output.out, &text)?;
    if r.accepted {
        eprintln!(
            "accepted: coefficient {} (v = {})",
            r.coefficient_fraction,
            r.v.unwrap_or(0)
        );
        Ok(0)
    } else {
        eprintln!("rejected: {}", r.rejection.as_deref().unwrap_or(""));
        Ok(1)
    }
}

fn sweep(args: &SweepArgs) -> Outcome {
    let rows = report::sweep(&args.q, &args.t, &args.u)?;
    let text = csv_text(&SWEEP_HEADER, rows.iter().map(ParamsReport::csv_row))?;
    emit(&args.out, &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Attack(a) => attack(a),
        Command::Verify(a) => verify(a),
        Command::Params(a) => params(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
