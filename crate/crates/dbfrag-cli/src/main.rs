//! `dbfrag`: workload-driven fragmentation design from the command line.
//!
//! Exit codes: 0 on success, 1 when a clustering pipeline did not
//! converge (the plan is still emitted), 2 on input or validation errors.

mod table;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dbfrag::baselines::{affinity_matrix, bea_vertical, bond_energy_order, phorizontal};
use dbfrag::horizontal::{
    horizontal_fragment, record_similarity, record_vectors, validate_horizontal,
};
use dbfrag::kocluster::{ClusterMode, ClusterOptions, DEFAULT_GAMMA_THRESHOLD, DEFAULT_MAX_ITERS};
use dbfrag::plan::{round_sig, PLAN_SIGNIFICANT_DIGITS};
use dbfrag::similarity::{AffinityMatrix, SimilarityMatrix};
use dbfrag::vertical::{attribute_similarity, validate_vertical, vertical_fragment};
use dbfrag::workload::{parse_workload, BinaryMatrix, Workload};
use dbfrag::FragmentationPlan;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "dbfrag",
    version,
    about = "Workload-driven vertical and horizontal fragmentation design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fragment the attribute set by clustering usage similarity
    Vertical(RunArgs),
    /// Fragment the record set by clustering predicate similarity
    Horizontal(RunArgs),
    /// Classical bond-energy vertical fragmentation
    Bea(CommonArgs),
    /// Classical minterm-based horizontal fragmentation
    Phorizontal(CommonArgs),
    /// Run clustering and classical methods, report partition agreement
    Compare(RunArgs),
    /// Check a plan document against a workload
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Auto,
    K,
}

#[derive(Args)]
struct CommonArgs {
    /// Workload JSON document
    #[arg(long)]
    input: PathBuf,
    /// Write the result here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format (json is canonical, table is for humans)
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include the intermediate matrices in the output document
    #[arg(long)]
    dump_matrix: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Cluster-count selection: derived from the data, or forced to k
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Target fragment count (required with --mode k)
    #[arg(long)]
    k: Option<usize>,
    /// Indiscernibility threshold for the refinement step, in [0,1]
    #[arg(long, default_value_t = DEFAULT_GAMMA_THRESHOLD)]
    gamma: f64,
    /// Iteration cap for the refinement loop
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
}

#[derive(Args)]
struct ValidateArgs {
    /// Workload JSON document
    #[arg(long)]
    input: PathBuf,
    /// Plan document to check
    #[arg(long)]
    plan: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Vertical(args) => run_vertical(args),
        Command::Horizontal(args) => run_horizontal(args),
        Command::Bea(args) => run_bea(args),
        Command::Phorizontal(args) => run_phorizontal(args),
        Command::Compare(args) => run_compare(args),
        Command::Validate(args) => run_validate(args),
    }
}

fn load_workload(path: &Path) -> Result<Workload> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_workload(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn cluster_options(args: &RunArgs) -> Result<ClusterOptions> {
    if !(0.0..=1.0).contains(&args.gamma) {
        bail!("--gamma must lie in [0,1], got {}", args.gamma);
    }
    if args.max_iters == 0 {
        bail!("--max-iters must be positive");
    }
    let mode = match (args.mode, args.k) {
        (ModeArg::Auto, None) => ClusterMode::Auto,
        (ModeArg::Auto, Some(_)) => bail!("--k is only meaningful with --mode k"),
        (ModeArg::K, Some(k)) => ClusterMode::TargetK(k),
        (ModeArg::K, None) => bail!("--mode k requires --k"),
    };
    Ok(ClusterOptions {
        mode,
        gamma_threshold: args.gamma,
        max_iters: args.max_iters,
    })
}

fn run_vertical(args: RunArgs) -> Result<u8> {
    let workload = load_workload(&args.common.input)?;
    let opts = cluster_options(&args)?;
    let mut plan = vertical_fragment(&workload, &opts)?;
    if args.common.dump_matrix {
        let similarity = attribute_similarity(&workload)?;
        plan.matrices = Some(json!({ "similarity": similarity_json(&similarity) }));
    }
    emit_plan(&args.common, &plan)?;
    Ok(plan_exit_code(&plan))
}

fn run_horizontal(args: RunArgs) -> Result<u8> {
    let workload = load_workload(&args.common.input)?;
    let opts = cluster_options(&args)?;
    let mut plan = horizontal_fragment(&workload, &opts)?;
    if args.common.dump_matrix {
        let vectors = record_vectors(&workload)?;
        let similarity = record_similarity(&vectors)?;
        plan.matrices = Some(json!({
            "binary": binary_json(&vectors),
            "similarity": similarity_json(&similarity),
        }));
    }
    emit_plan(&args.common, &plan)?;
    Ok(plan_exit_code(&plan))
}

fn run_bea(args: CommonArgs) -> Result<u8> {
    let workload = load_workload(&args.input)?;
    let mut plan = bea_vertical(&workload)?;
    if args.dump_matrix {
        let aff = affinity_matrix(&workload)?;
        let ca = bond_energy_order(&aff);
        plan.matrices = Some(json!({
            "affinity": affinity_json(&aff),
            "clustered_affinity": affinity_json(&ca.matrix),
        }));
    }
    emit_plan(&args, &plan)?;
    Ok(plan_exit_code(&plan))
}

fn run_phorizontal(args: CommonArgs) -> Result<u8> {
    let workload = load_workload(&args.input)?;
    let mut plan = phorizontal(&workload)?;
    if args.dump_matrix {
        let vectors = record_vectors(&workload)?;
        plan.matrices = Some(json!({ "binary": binary_json(&vectors) }));
    }
    emit_plan(&args, &plan)?;
    Ok(plan_exit_code(&plan))
}

fn run_compare(args: RunArgs) -> Result<u8> {
    let workload = load_workload(&args.common.input)?;
    let opts = cluster_options(&args)?;
    let has_vertical = !workload.queries.is_empty();
    let has_horizontal = !workload.records.is_empty() && !workload.predicates.is_empty();
    if !has_vertical && !has_horizontal {
        bail!("workload supports neither pipeline: needs queries, or records plus predicates");
    }

    let mut plans = Vec::new();
    let mut vertical_agreement = None;
    let mut horizontal_agreement = None;
    if has_vertical {
        let ko = vertical_fragment(&workload, &opts)?;
        let bea = bea_vertical(&workload)?;
        vertical_agreement = Some(ko.same_partition(&bea));
        plans.push(ko);
        plans.push(bea);
    }
    if has_horizontal {
        let ko = horizontal_fragment(&workload, &opts)?;
        let ph = phorizontal(&workload)?;
        horizontal_agreement = Some(ko.same_partition(&ph));
        plans.push(ko);
        plans.push(ph);
    }
    let agreement = vertical_agreement.unwrap_or(true) && horizontal_agreement.unwrap_or(true);
    let exit = if plans.iter().any(|p| !p.converged) {
        1
    } else {
        0
    };

    let text = match args.common.format {
        Format::Json => {
            let mut report = serde_json::Map::new();
            report.insert("agreement".into(), agreement.into());
            if let Some(v) = vertical_agreement {
                report.insert("vertical_agreement".into(), v.into());
            }
            if let Some(h) = horizontal_agreement {
                report.insert("horizontal_agreement".into(), h.into());
            }
            report.insert(
                "plans".into(),
                serde_json::to_value(&plans).expect("plans serialize"),
            );
            format!(
                "{}\n",
                serde_json::to_string_pretty(&Value::Object(report)).expect("report serializes")
            )
        }
        Format::Table => {
            table::compare_table(vertical_agreement, horizontal_agreement, agreement, &plans)
        }
    };
    write_output(args.common.output.as_deref(), &text)?;
    Ok(exit)
}

fn run_validate(args: ValidateArgs) -> Result<u8> {
    let workload = load_workload(&args.input)?;
    let text = fs::read_to_string(&args.plan)
        .with_context(|| format!("reading {}", args.plan.display()))?;
    let plan = FragmentationPlan::from_json(&text)
        .map_err(|e| anyhow!("{}: {e}", args.plan.display()))?;
    let report = if plan.method.is_vertical() {
        validate_vertical(&plan, &workload)
    } else {
        validate_horizontal(&plan, &workload)
    };
    let rendered = match args.format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Table => table::report_table(&report),
    };
    write_output(args.output.as_deref(), &rendered)?;
    Ok(if report.valid { 0 } else { 2 })
}

fn plan_exit_code(plan: &FragmentationPlan) -> u8 {
    if plan.converged {
        0
    } else {
        1
    }
}

fn emit_plan(args: &CommonArgs, plan: &FragmentationPlan) -> Result<()> {
    let text = match args.format {
        Format::Json => format!("{}\n", plan.to_json()),
        Format::Table => table::plan_table(plan),
    };
    write_output(args.output.as_deref(), &text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn rounded_rows(n: usize, get: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| round_sig(get(i, j), PLAN_SIGNIFICANT_DIGITS))
                .collect()
        })
        .collect()
}

fn similarity_json(matrix: &SimilarityMatrix) -> Value {
    json!({
        "ids": matrix.ids(),
        "values": rounded_rows(matrix.n(), |i, j| matrix.get(i, j)),
    })
}

fn affinity_json(matrix: &AffinityMatrix) -> Value {
    json!({
        "ids": matrix.ids(),
        "values": rounded_rows(matrix.n(), |i, j| matrix.get(i, j)),
    })
}

fn binary_json(matrix: &BinaryMatrix) -> Value {
    let cells: Vec<Vec<u8>> = matrix
        .rows()
        .iter()
        .map(|row| row.iter().map(|&b| u8::from(b)).collect())
        .collect();
    json!({
        "rows": matrix.row_ids(),
        "columns": matrix.col_ids(),
        "cells": cells,
    })
}
