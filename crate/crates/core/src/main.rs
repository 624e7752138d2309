use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use presdist::barcode::Barcode;
use presdist::cost::Exponent;
use presdist::field::Modulus;
use presdist::gadgets::ci::Pattern;
use presdist::gadgets::{
    balpart_certificate, build_balpart_trees, build_ci_modules, ci_certificate, BalPartInstance, CiInstance, Instance,
};
use presdist::matching::wasserstein;
use presdist::merge_tree::MergeTreePresentation;
use presdist::ordered::project_x;
use presdist::pipeline;
use presdist::rational;
use presdist::report::{canonical_json, digest, RunReport};
use presdist::solvers::{
    solve_balpart, solve_ci, verify_balpart, verify_ci, BalPartSolution, CiSolution, DEFAULT_BALPART_LIMIT, DEFAULT_CI_LIMIT,
};
use presdist::two_param::{Grade2, TwoParamPresentation};

const LIMIT_ENV: &str = "PRESDIST_LIMIT";

#[derive(Parser)]
#[command(name = "presdist", version, about = "Presentation distances, Wasserstein matching and reduction gadgets")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Cost exponent p (>= 1, or "inf").
    #[arg(short = 'p', long = "p", global = true, default_value = "1")]
    p: Exponent,
    /// Prime field size q <= 251.
    #[arg(long, global = true, default_value_t = 2)]
    field: u32,
    /// Output file (a directory for `gadget`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Solver size limit; overrides PRESDIST_LIMIT.
    #[arg(long, global = true)]
    limit: Option<u64>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Build the gadget presentations of an instance.
    Gadget { instance: PathBuf },
    /// Barcode of a merge tree, or of the x-projection of a 2-parameter presentation.
    Barcode { presentation: PathBuf },
    /// Optimal p-Wasserstein matching between two barcodes.
    Wasserstein { x: PathBuf, y: PathBuf },
    /// Solve an instance.
    Solve { instance: PathBuf },
    /// Build certificate presentations from a solution.
    Certify { instance: PathBuf, solution: PathBuf },
    /// Check a solution.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Pointwise dimension of a 2-parameter presentation.
    Dim {
        presentation: PathBuf,
        /// Grade "x,y"; repeatable.
        #[arg(long = "at", required = true)]
        at: Vec<String>,
    },
    /// Solve, certify and cross-check an instance.
    Pipeline { instance: PathBuf },
}

#[derive(Subcommand)]
enum GenKind {
    /// Balanced partition: sizes and bin count.
    Balpart {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<u64>,
        #[arg(short = 'k', long)]
        k: usize,
    },
    /// Constrained invertibility: a worked example or explicit patterns.
    Ci {
        #[arg(long, conflicts_with_all = ["pattern_p", "pattern_q"])]
        worked_example: Option<u32>,
        /// Rows separated by ';', entries "*" or "0" separated by spaces.
        #[arg(long = "P", requires = "pattern_q")]
        pattern_p: Option<String>,
        #[arg(long = "Q", requires = "pattern_p")]
        pattern_q: Option<String>,
    },
}

enum Failure {
    /// Bad input, I/O or limits: exit 2.
    Input(String),
    /// A checked property failed: exit 1.
    Inconsistent(String),
}

impl From<presdist::Error> for Failure {
    fn from(e: presdist::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<(T, Value)> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let parsed = serde_json::from_value(raw.clone()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((parsed, raw))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, format!("{text}\n")).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| Failure::Input(e.to_string()))
}

fn limit(common: &Common, default: u64) -> CliResult<u64> {
    if let Some(l) = common.limit {
        return Ok(l);
    }
    match std::env::var(LIMIT_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("{LIMIT_ENV}={v:?} is not a non-negative integer"))),
        Err(_) => Ok(default),
    }
}

fn parse_pattern(text: &str) -> CliResult<Pattern> {
    let rows: Vec<&str> = text.split(';').collect();
    Ok(Pattern::parse(&rows)?)
}

fn parse_grade(text: &str) -> CliResult<Grade2> {
    let (x, y) = text.split_once(',').ok_or_else(|| Failure::Input(format!("grade {text:?} is not \"x,y\"")))?;
    Ok(Grade2::new(rational::parse(x)?, rational::parse(y)?))
}

struct Ctx<'a> {
    common: &'a Common,
    modulus: Modulus,
    started: Instant,
}

impl Ctx<'_> {
    fn report(&self, command: &str, inputs: &[&Value], result: &str, data: Value) -> CliResult<RunReport> {
        Ok(RunReport {
            command: command.into(),
            digest: digest(inputs)?,
            p: self.common.p.to_string(),
            field: self.modulus.get(),
            result: result.into(),
            cost: None,
            data,
            timings_ms: None,
        })
    }
}

fn run(cli: &Cli) -> CliResult<Option<RunReport>> {
    let common = &cli.common;
    let modulus = Modulus::new(common.field)?;
    let ctx = Ctx { common, modulus, started: Instant::now() };
    let report = match &cli.command {
        Command::Gen { kind } => {
            let inst = match kind {
                GenKind::Balpart { sizes, k } => Instance::Balpart(BalPartInstance::new(sizes.clone(), *k)?),
                GenKind::Ci { worked_example: Some(i), .. } => Instance::Ci(CiInstance::worked_example(*i)?),
                GenKind::Ci { pattern_p: Some(p), pattern_q: Some(q), .. } => {
                    Instance::Ci(CiInstance::new(parse_pattern(p)?, parse_pattern(q)?)?)
                }
                GenKind::Ci { .. } => return Err(Failure::Input("gen ci needs --worked-example or both --P and --Q".into())),
            };
            let text = canonical_json(&inst)?;
            match &common.out {
                Some(path) => write_text(path, &text)?,
                None => print_line(&text)?,
            }
            return Ok(None);
        }
        Command::Gadget { instance } => {
            let (inst, raw): (Instance, Value) = read_json(instance)?;
            let (constants, m, n) = match &inst {
                Instance::Balpart(b) => {
                    let t = build_balpart_trees(b, common.p)?;
                    (json!({"C": t.c, "n": b.n()}), to_value(&t.m)?, to_value(&t.n)?)
                }
                Instance::Ci(c) => {
                    let g = build_ci_modules(c, common.p, modulus)?;
                    let anchors: Vec<Value> = g
                        .anchors
                        .iter()
                        .map(|a| json!({"zero": a.zero.to_string(), "point": [rational::format(a.point.x()), rational::format(a.point.y())]}))
                        .collect();
                    (json!({"C": g.c, "K": g.anchors.len(), "n": c.n, "anchors": anchors}), to_value(&g.m)?, to_value(&g.n)?)
                }
            };
            if let Some(dir) = &common.out {
                fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
                write_text(&dir.join("M.json"), &canonical_json(&m)?)?;
                write_text(&dir.join("N.json"), &canonical_json(&n)?)?;
                write_text(&dir.join("constants.json"), &canonical_json(&constants)?)?;
            }
            ctx.report("gadget", &[&raw], "gadget", json!({"constants": constants, "M": m, "N": n}))?
        }
        Command::Barcode { presentation } => {
            let (raw, _): (Value, Value) = read_json(presentation)?;
            let barcode: Barcode = if raw.get("q").is_some() {
                let p: TwoParamPresentation = serde_json::from_value(raw.clone()).map_err(|e| Failure::Input(e.to_string()))?;
                project_x(&p).barcode()
            } else {
                let p: MergeTreePresentation = serde_json::from_value(raw.clone()).map_err(|e| Failure::Input(e.to_string()))?;
                p.barcode()
            };
            ctx.report("barcode", &[&raw], "barcode", to_value(&barcode)?)?
        }
        Command::Wasserstein { x, y } => {
            let (bx, rx): (Barcode, Value) = read_json(x)?;
            let (by, ry): (Barcode, Value) = read_json(y)?;
            let (cost, matching) = wasserstein(&bx, &by, common.p);
            ctx.report("wasserstein", &[&rx, &ry], "distance", json!({"matching": to_value(&matching)?}))?.with_cost(&cost)
        }
        Command::Solve { instance } => {
            let (inst, raw): (Instance, Value) = read_json(instance)?;
            let solution = match &inst {
                Instance::Balpart(b) => solve_balpart(b, limit(common, DEFAULT_BALPART_LIMIT)?)?.map(|s| to_value(&s)).transpose()?,
                Instance::Ci(c) => solve_ci(c, modulus, limit(common, DEFAULT_CI_LIMIT)?)?.map(|s| to_value(&s)).transpose()?,
            };
            if let (Some(path), Some(sol)) = (&common.out, &solution) {
                write_text(path, &canonical_json(sol)?)?;
            }
            let result = if solution.is_some() { "solvable" } else { "no_solution" };
            ctx.report("solve", &[&raw], result, json!({"solvable": solution.is_some(), "solution": solution}))?
        }
        Command::Certify { instance, solution } => {
            let (inst, raw): (Instance, Value) = read_json(instance)?;
            match &inst {
                Instance::Balpart(b) => {
                    let (sol, raw_sol): (BalPartSolution, Value) = read_json(solution)?;
                    let cert = balpart_certificate(b, &sol, common.p)?;
                    let data = json!({"P": to_value(&cert.p)?, "Q": to_value(&cert.q)?, "sigma": to_value(&cert.sigma)?});
                    ctx.report("certify", &[&raw, &raw_sol], "certificate", data)?.with_cost(&cert.cost)
                }
                Instance::Ci(c) => {
                    let (sol, raw_sol): (CiSolution, Value) = read_json(solution)?;
                    let cert = ci_certificate(c, &sol, common.p)?;
                    let rows = |m: &presdist::FieldMatrix| m.to_rows();
                    let data = json!({
                        "P_M": to_value(&cert.pm)?,
                        "P_N": to_value(&cert.pn)?,
                        "iota_M": rows(&cert.iota_m),
                        "iota_N": rows(&cert.iota_n),
                        "sigma": rows(&cert.sigma),
                    });
                    ctx.report("certify", &[&raw, &raw_sol], "certificate", data)?.with_cost(&cert.cost)
                }
            }
        }
        Command::Verify { instance, solution } => {
            let (inst, raw): (Instance, Value) = read_json(instance)?;
            let (valid, raw_sol) = match &inst {
                Instance::Balpart(b) => {
                    let (sol, raw_sol): (BalPartSolution, Value) = read_json(solution)?;
                    (verify_balpart(b, &sol), raw_sol)
                }
                Instance::Ci(c) => {
                    let (sol, raw_sol): (CiSolution, Value) = read_json(solution)?;
                    (verify_ci(c, &sol)?, raw_sol)
                }
            };
            let result = if valid { "valid" } else { "invalid" };
            ctx.report("verify", &[&raw, &raw_sol], result, json!({"valid": valid}))?
        }
        Command::Dim { presentation, at } => {
            let (p, raw): (TwoParamPresentation, Value) = read_json(presentation)?;
            let mut dims = Vec::with_capacity(at.len());
            for text in at {
                let pt = parse_grade(text)?;
                dims.push(json!({"at": [rational::format(pt.x()), rational::format(pt.y())], "dim": p.dim_at(&pt)}));
            }
            ctx.report("dim", &[&raw], "dimensions", Value::Array(dims))?
        }
        Command::Pipeline { instance } => {
            let (inst, raw): (Instance, Value) = read_json(instance)?;
            let default = if matches!(inst, Instance::Balpart(_)) { DEFAULT_BALPART_LIMIT } else { DEFAULT_CI_LIMIT };
            let rep = pipeline::run(&inst, common.p, modulus, limit(common, default)?)?;
            let result = if rep.solvable { "solvable" } else { "no_solution" };
            let consistent = rep.consistent();
            let report = ctx.report("pipeline", &[&raw], result, to_value(&rep)?)?;
            if !consistent {
                let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                emit(&finish(report, &ctx), common)?;
                return Err(Failure::Inconsistent(format!("failed checks: {}", failed.join("; "))));
            }
            report
        }
    };
    Ok(Some(finish(report, &ctx)))
}

fn finish(mut report: RunReport, ctx: &Ctx) -> RunReport {
    let ms = ctx.started.elapsed().as_secs_f64() * 1e3;
    eprintln!("{} finished in {ms:.1} ms", report.command);
    if ctx.common.timings {
        report.timings_ms = Some(ms);
    }
    report
}

fn emit(report: &RunReport, common: &Common) -> CliResult<()> {
    let text = canonical_json(report)?;
    match (&common.out, report.command.as_str()) {
        (Some(path), cmd) if cmd != "gadget" && cmd != "solve" => write_text(path, &text),
        _ => print_line(&text),
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn print_line(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Input(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|report| match report {
        Some(r) => emit(&r, &cli.common),
        None => Ok(()),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Inconsistent(msg)) => {
            eprintln!("inconsistency: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
