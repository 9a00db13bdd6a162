//! `hmsched`: reduce, solve, evaluate and verify high-multiplicity scheduling instances.
//!
//! Exit codes: 0 success or feasible, 1 I/O, 2 validation, 3 infeasible or
//! failed check, 4 state budget exceeded.

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hmsched_core::arith::{format_rational, parse_rational};
use hmsched_core::eval::{eval_objective, eval_sumwc_closed, EvalError};
use hmsched_core::format::{read_document, to_pretty_string, write_document, DocError, Document};
use hmsched_core::model::{Assignment, Objective, ScheduleInstance};
use hmsched_core::nfold::{build_nfold_cmax, build_nfold_objective, export_model, import_model, FormatError};
use hmsched_core::reductions::{
    bp_to_bbp, packing_from_perfect_schedule, perfect_schedule, q_to_cutting_stock, reduce_bbp,
    BalancedBinPackingInstance, Family, ReductionCertificate, ReductionError,
};
use hmsched_core::solvers::{
    brute_force_solve_with, cuttingstock_solve_with, dp_feasible_cmax_with, dp_minimize_with, SolveError,
    SolverOptions, DEFAULT_MAX_STATES,
};
use hmsched_core::verify::{
    oracle_equivalence_sweep, roundtrip_check, target_value_check, Generator, SweepReport, SweepSpec,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hmsched", version, about = "Exact tools for high-multiplicity scheduling")]
struct Cli {
    /// Cap on DP states or enumerated assignments.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a (balanced) bin packing or uniform instance.
    Reduce {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a scheduling or cutting stock instance exactly.
    Solve {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long = "in")]
        input: PathBuf,
        /// Decide whether the optimum is at most this value (`p/q` allowed).
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an assignment.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
    },
    /// Run a soundness sweep.
    Verify {
        #[command(subcommand)]
        sweep: Sweep,
    },
    /// Export or check N-fold models.
    Nfold {
        #[command(subcommand)]
        action: NFoldAction,
    },
    /// Build the perfect schedule of a packing, or recover the packing from a schedule.
    Perfect {
        /// A reduction document.
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated bin index of each item (zero-based).
        #[arg(long, conflicts_with = "assignment")]
        packing: Option<String>,
        #[arg(long)]
        assignment: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Dp,
    Brute,
    Cuttingstock,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "2", value_delimiter = ',')]
    bins: Vec<usize>,
    /// Item count per sampled instance.
    #[arg(long, default_value_t = 4)]
    items: usize,
    #[arg(long, default_value_t = 1)]
    min_items: usize,
    #[arg(long, default_value_t = 4)]
    max_items: usize,
    #[arg(long)]
    max_size: Option<u64>,
    /// Also try non-tight capacities (bp2bbp only).
    #[arg(long)]
    all_capacities: bool,
    /// Write 0 into wall_ms so reports are byte-identical across runs.
    #[arg(long)]
    no_timing: bool,
    /// Directory for the CSV and JSON reports.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Sweep {
    /// Feasibility equivalence between source and reduced instances.
    Roundtrip(SweepArgs),
    /// Perfect-schedule value equals the certificate target.
    Target(SweepArgs),
    /// DP optimum equals the brute-force optimum.
    Oracle {
        /// Largest total job count.
        #[arg(long, default_value_t = 6)]
        max_n: u64,
        #[arg(long, default_value_t = 3)]
        max_machines: usize,
        #[arg(long, default_value_t = 3)]
        max_types: usize,
        #[arg(long, default_value_t = 5)]
        max_size: u64,
        #[arg(long, default_value_t = 5)]
        max_weight: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sample this many grid points instead of the whole grid.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        no_timing: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum NFoldAction {
    /// Write the `.nfold` model of a scheduling instance.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        /// Makespan bound; defaults to the instance target for makespan instances.
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a solution against an exported model.
    Check {
        #[arg(long)]
        model: PathBuf,
        /// Whitespace-separated integers, one per variable.
        #[arg(long, conflicts_with = "assignment")]
        solution: Option<PathBuf>,
        /// An assignment, flattened against `--in`.
        #[arg(long, requires = "input")]
        assignment: Option<PathBuf>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::from_tag(s).ok_or_else(|| {
        let valid: Vec<&str> = Family::ALL.iter().map(|f| f.tag()).collect();
        format!("unknown family '{s}'; valid families: {}", valid.join(", "))
    })
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn fail(code: u8, err: impl Into<anyhow::Error>) -> Failure {
    Failure { code, err: err.into() }
}

fn invalid(msg: impl std::fmt::Display) -> Failure {
    fail(2, anyhow::anyhow!("{msg}"))
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        let code = if matches!(e, DocError::Io(_)) { 1 } else { 2 };
        fail(code, e)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::BudgetExceeded { .. } => 4,
            SolveError::NoFeasibleAssignment | SolveError::Infeasible { .. } => 3,
            _ => 2,
        };
        fail(code, e)
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::NotTight { total, capacity } => {
                invalid(format!("instance not tight: total size {total} ≠ k·B = {capacity}"))
            }
            other => fail(2, other),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        fail(2, e)
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        let code = if matches!(e, FormatError::Io(_)) { 1 } else { 2 };
        fail(code, e)
    }
}

fn io(e: impl Into<anyhow::Error>) -> Failure {
    fail(1, e)
}

type Outcome = Result<u8, Failure>;

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn rat(v: &BigRational) -> Value {
    Value::String(format_rational(v))
}

fn parse_target(s: &str) -> Result<BigRational, Failure> {
    parse_rational(s).map_err(|e| invalid(format!("bad target '{s}': {e}")))
}

/// The scheduling instance in a schedule or reduction document, with the
/// certificate when present.
fn schedule_of(doc: Document) -> Result<(ScheduleInstance, Option<ReductionCertificate>), Failure> {
    match doc {
        Document::Schedule(s) => Ok((s, None)),
        Document::Reduction { instance, certificate } => match *instance {
            Document::Schedule(s) => Ok((s, Some(certificate))),
            other => Err(invalid(format!(
                "expected a scheduling instance, found {}",
                other.kind()
            ))),
        },
        other => Err(invalid(format!(
            "expected a scheduling instance, found {}",
            other.kind()
        ))),
    }
}

fn cmd_reduce(family: Family, input: &Path, out: &Path) -> Outcome {
    let doc = read_document(input)?;
    let output = match family {
        Family::Bp2Bbp => {
            let Document::BinPacking(bp) = doc else {
                return Err(invalid(format!(
                    "{family} expects a bin_packing instance, found {}",
                    doc.kind()
                )));
            };
            let bbp = bp_to_bbp(&bp);
            print_json(&json!({
                "items": bbp.items.len(),
                "bins": bbp.bins,
                "capacity": bbp.capacity.to_string(),
            }));
            Document::BalancedBinPacking(bbp)
        }
        Family::Q2Cs => {
            let (q, source) = schedule_of(doc)?;
            let (cs, cert) = q_to_cutting_stock(&q, source.as_ref())?;
            let (k1, k2) = cert.radix.clone().expect("cutting stock certificates carry the radix");
            print_json(&json!({
                "K1": k1.to_string(),
                "K2": k2.to_string(),
                "budget": rat(&cert.target),
            }));
            Document::Reduction {
                instance: Box::new(Document::CuttingStock(cs)),
                certificate: cert,
            }
        }
        _ => {
            let bbp = match doc {
                Document::BalancedBinPacking(b) => b,
                Document::BinPacking(b) => BalancedBinPackingInstance::new(b.items, b.bins, b.capacity)
                    .map_err(|e| invalid(format!("not a balanced instance: {e}")))?,
                other => {
                    return Err(invalid(format!(
                        "{family} expects a balanced_bin_packing instance, found {}",
                        other.kind()
                    )))
                }
            };
            let (inst, cert) = reduce_bbp(family, &bbp)?;
            print_json(&json!({
                "A": cert.total.to_string(),
                "T": cert.horizon.to_string(),
                "target": rat(&cert.target),
            }));
            Document::Reduction {
                instance: Box::new(Document::Schedule(inst)),
                certificate: cert,
            }
        }
    };
    write_document(&output, out)?;
    Ok(0)
}

fn write_or_print(doc: &Document, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => Ok(write_document(doc, p)?),
        None => {
            print!("{}", to_pretty_string(doc));
            Ok(())
        }
    }
}

fn cmd_solve(algo: Algo, input: &Path, target: Option<&str>, out: Option<&Path>, opts: &SolverOptions) -> Outcome {
    let doc = read_document(input)?;
    let target = target.map(parse_target).transpose()?;
    if let Algo::Cuttingstock = algo {
        let cs = match doc {
            Document::CuttingStock(cs) => cs,
            Document::Reduction { instance, .. } => match *instance {
                Document::CuttingStock(cs) => cs,
                other => {
                    return Err(invalid(format!(
                        "expected a cutting_stock instance, found {}",
                        other.kind()
                    )))
                }
            },
            other => {
                return Err(invalid(format!(
                    "expected a cutting_stock instance, found {}",
                    other.kind()
                )))
            }
        };
        let sol = cuttingstock_solve_with(&cs, opts)?;
        let cost = BigRational::from_integer(sol.cost.clone());
        let mut summary = json!({ "cost": sol.cost.to_string() });
        if let Some(b) = &cs.budget {
            summary["within_budget"] = Value::Bool(&sol.cost <= b);
        }
        print_json(&summary);
        if let Some(p) = out {
            write_document(&Document::CuttingStockSolution(sol), p)?;
        }
        return Ok(match target {
            Some(t) if cost > t => 3,
            _ => 0,
        });
    }

    let (inst, _) = schedule_of(doc)?;
    let report = inst.validate();
    if !report.is_ok() {
        return Err(invalid(format!("invalid instance: {report}")));
    }
    let tag = inst.objective.tag();
    let (assignment, value, feasible) = match (algo, &target) {
        (Algo::Dp, Some(t)) if inst.objective == Objective::Cmax => match dp_feasible_cmax_with(&inst, t, opts)? {
            Some(a) => {
                let v = eval_objective(&inst, &a)?;
                (Some(a), Some(v), true)
            }
            None => (None, None, false),
        },
        _ => {
            let solved = match algo {
                Algo::Dp => dp_minimize_with(&inst, opts),
                _ => brute_force_solve_with(&inst, opts),
            };
            match solved {
                Ok((a, v)) => {
                    let feasible = target.as_ref().is_none_or(|t| &v <= t);
                    (Some(a), Some(v), feasible)
                }
                Err(SolveError::NoFeasibleAssignment) => (None, None, false),
                Err(e) => return Err(e.into()),
            }
        }
    };
    let mut summary = json!({ "objective": tag, "feasible": feasible });
    if let Some(v) = &value {
        summary["value"] = rat(v);
    }
    if let Some(t) = &target {
        summary["target"] = rat(t);
    }
    print_json(&summary);
    if let (Some(a), true) = (assignment, feasible) {
        if let Some(p) = out {
            write_document(&Document::Assignment(a), p)?;
        }
    }
    Ok(if feasible { 0 } else { 3 })
}

fn read_assignment(path: &Path) -> Result<Assignment, Failure> {
    match read_document(path)? {
        Document::Assignment(a) => Ok(a),
        other => Err(invalid(format!("expected an assignment, found {}", other.kind()))),
    }
}

fn cmd_eval(input: &Path, assignment: &Path) -> Outcome {
    let (inst, _) = schedule_of(read_document(input)?)?;
    let a = read_assignment(assignment)?;
    let value = eval_objective(&inst, &a)?;
    let mut out = json!({ inst.objective.tag(): rat(&value) });
    if inst.objective == Objective::SumWc {
        let b = eval_sumwc_closed(&inst, &a)?;
        out["breakdown"] = json!({
            "load_term": rat(&b.load_term),
            "uniform_linear": rat(&b.uniform_linear),
            "gamma_linear": rat(&b.gamma_linear),
            "gamma_quadr": rat(&b.gamma_quadr),
            "total": rat(&b.total),
        });
    }
    print_json(&out);
    Ok(0)
}

fn finish_sweep(rep: SweepReport, out_dir: &Path) -> Outcome {
    std::fs::create_dir_all(out_dir).map_err(io)?;
    let stem = out_dir.join(format!("{}_{}", rep.sweep, rep.family));
    rep.write_files(&stem)
        .with_context(|| format!("writing {}", stem.display()))
        .map_err(io)?;
    print_json(&rep.summary_json());
    Ok(if rep.passed() { 0 } else { 3 })
}

fn sweep_spec(
    args: &SweepArgs,
    default_size: u64,
    default_trials: usize,
    opts: &SolverOptions,
) -> Result<SweepSpec, Failure> {
    let family = args.family.ok_or_else(|| invalid("--family is required"))?;
    let max_size = args.max_size.unwrap_or(default_size);
    let generator = if args.exhaustive {
        Generator::Exhaustive {
            bins: args.bins.clone(),
            min_items: args.min_items,
            max_items: args.max_items,
            max_size,
        }
    } else {
        let [bins] = args.bins[..] else {
            return Err(invalid("randomized sweeps take a single --bins value"));
        };
        Generator::Randomized {
            trials: args.trials.unwrap_or(default_trials),
            seed: args.seed,
            bins,
            items: args.items,
            max_size,
        }
    };
    let mut spec = SweepSpec::new(Some(family), generator);
    spec.tight_only = !args.all_capacities;
    spec.budget = *opts;
    spec.timing = !args.no_timing;
    Ok(spec)
}

fn cmd_verify(sweep: &Sweep, opts: &SolverOptions) -> Outcome {
    match sweep {
        Sweep::Roundtrip(args) => {
            let spec = sweep_spec(args, 8, 50, opts)?;
            finish_sweep(roundtrip_check(&spec).map_err(invalid)?, &args.out_dir)
        }
        Sweep::Target(args) => {
            let spec = sweep_spec(args, 8, 20, opts)?;
            finish_sweep(target_value_check(&spec).map_err(invalid)?, &args.out_dir)
        }
        Sweep::Oracle {
            max_n,
            max_machines,
            max_types,
            max_size,
            max_weight,
            seed,
            trials,
            no_timing,
            out_dir,
        } => {
            let mut spec = SweepSpec::new(
                None,
                Generator::Grid {
                    max_machines: *max_machines,
                    max_types: *max_types,
                    max_total: *max_n,
                    max_size: *max_size,
                    max_weight: *max_weight,
                    seed: *seed,
                    sample: *trials,
                },
            );
            spec.budget = *opts;
            spec.timing = !no_timing;
            finish_sweep(oracle_equivalence_sweep(&spec).map_err(invalid)?, out_dir)
        }
    }
}

fn cmd_nfold(action: &NFoldAction) -> Outcome {
    match action {
        NFoldAction::Export { input, target, out } => {
            let (inst, _) = schedule_of(read_document(input)?)?;
            let bound = match target {
                Some(t) => Some(parse_target(t)?),
                None if inst.objective == Objective::Cmax => inst.target.clone(),
                None => None,
            };
            let model = match (&bound, inst.objective) {
                (Some(t), _) => build_nfold_cmax(&inst, t),
                (None, Objective::Cmax) => return Err(invalid("makespan export needs --target or an instance target")),
                (None, _) => build_nfold_objective(&inst),
            }
            .map_err(invalid)?;
            export_model(&model, out)?;
            print_json(&json!({
                "blocks": model.n,
                "variables": model.num_vars(),
                "rows": model.num_rows(),
            }));
            Ok(0)
        }
        NFoldAction::Check {
            model,
            solution,
            assignment,
            input,
        } => {
            let m = import_model(model)?;
            let x: Vec<BigInt> = match (solution, assignment, input) {
                (Some(p), _, _) => {
                    let text = std::fs::read_to_string(p).map_err(io)?;
                    text.split_whitespace()
                        .map(|w| w.parse::<BigInt>().map_err(|_| invalid(format!("bad integer '{w}'"))))
                        .collect::<Result<_, _>>()?
                }
                (None, Some(a), Some(i)) => {
                    let (inst, _) = schedule_of(read_document(i)?)?;
                    m.solution_vector(&inst, &read_assignment(a)?)
                }
                _ => return Err(invalid("pass --solution, or --assignment with --in")),
            };
            let report = m.check_solution(&x).map_err(invalid)?;
            print_json(&json!({ "ok": report.ok, "violations": report.violations }));
            Ok(if report.ok { 0 } else { 3 })
        }
    }
}

fn cmd_perfect(input: &Path, packing: Option<&str>, assignment: Option<&Path>, out: Option<&Path>) -> Outcome {
    let (_, cert) = schedule_of(read_document(input)?)?;
    let cert = cert.ok_or_else(|| invalid("expected a reduction document with a certificate"))?;
    match (packing, assignment) {
        (Some(p), _) => {
            let map: Vec<usize> = p
                .split(',')
                .map(|w| w.trim().parse().map_err(|_| invalid(format!("bad bin index '{w}'"))))
                .collect::<Result<_, _>>()?;
            let a = perfect_schedule(&cert, &map)?;
            write_or_print(&Document::Assignment(a), out)?;
            Ok(0)
        }
        (None, Some(a)) => {
            let x = read_assignment(a)?;
            match packing_from_perfect_schedule(&cert, &x) {
                Ok(map) => {
                    print_json(&json!({ "perfect": true, "packing": map }));
                    Ok(0)
                }
                Err(e) => {
                    print_json(&json!({ "perfect": false, "reason": e.to_string() }));
                    Ok(3)
                }
            }
        }
        (None, None) => Err(invalid("pass --packing or --assignment")),
    }
}

fn run(cli: &Cli) -> Outcome {
    let opts = SolverOptions {
        max_states: cli.max_states,
    };
    match &cli.command {
        Command::Reduce { family, input, out } => cmd_reduce(*family, input, out),
        Command::Solve {
            algo,
            input,
            target,
            out,
        } => cmd_solve(*algo, input, target.as_deref(), out.as_deref(), &opts),
        Command::Eval { input, assignment } => cmd_eval(input, assignment),
        Command::Verify { sweep } => cmd_verify(sweep, &opts),
        Command::Nfold { action } => cmd_nfold(action),
        Command::Perfect {
            input,
            packing,
            assignment,
            out,
        } => cmd_perfect(input, packing.as_deref(), assignment.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
