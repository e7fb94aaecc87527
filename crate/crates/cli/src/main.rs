use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use propval::costmodel::{
    benchmark_paths, classical_cost, conjecture1_report, doubling_grid, fit_growth, quantum_cost, write_csv,
    CostProfile, PathKind, DEFAULT_BAND, STANDARD_MODELS,
};
use propval::fixtures::{self, FIXTURES};
use propval::linalg::validate_projector;
use propval::membership::{EliminationOptions, MembershipResult};
use propval::numerics::OpCounter;
use propval::valuation::{
    demo_nondistributivity, kernel_basis_from_matrix, valuate_ql_with, valuate_with, GapCollapse,
};
use propval::{Error, Matrix, StateVector, Tolerance, C64};

const DEFAULT_SEED: u64 = 42;
const SIG_DIGITS: usize = 9;
const ROUNDOFF_FLOOR: f64 = 1e-13;

#[derive(Parser)]
#[command(name = "propval", version, about = "Three-valued valuation of quantum propositions")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Absolute tolerance for comparisons and pivot selection.
    #[arg(long, global = true, env = "PROPVAL_TOLERANCE", default_value_t = 1e-9)]
    abs_eps: f64,
    /// Relative tolerance for comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Valuate a state against a projector.
    Valuate {
        /// Projector matrix file (JSON).
        projector: PathBuf,
        /// State file (JSON, an n x 1 matrix).
        state: PathBuf,
        /// Two-valued variant: a gap collapses to false.
        #[arg(long)]
        ql: bool,
        /// With --ql, collapse a gap to true instead.
        #[arg(long, requires = "ql")]
        gap_true: bool,
        /// Kernel columns to use instead of the computed kernel basis.
        #[arg(long)]
        kernel: Option<PathBuf>,
    },
    /// Measure operation counts per path over a grid of dimensions.
    Bench {
        #[arg(long, default_value_t = 8)]
        min_n: usize,
        #[arg(long, default_value_t = 256)]
        max_n: usize,
        /// Comma-separated dimensions; overrides the doubling grid.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Work/span cost profile for a classical or quantum machine.
    Cost {
        #[arg(long)]
        t1: u64,
        #[arg(long)]
        tinf: u64,
        /// Classical processor count.
        #[arg(long, conflicts_with_all = ["q", "eq"], required_unless_present = "q")]
        p: Option<u64>,
        /// Quantum processor count.
        #[arg(long, requires = "eq")]
        q: Option<u64>,
        /// Quantum efficiency.
        #[arg(long, requires = "q")]
        eq: Option<f64>,
    },
    /// Demonstrations on fixtures.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Fixture utilities.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Failure of the distributive law for noncommuting projectors.
    Nondistributivity {
        #[arg(long, value_enum, default_value_t = FixtureName::Qubit)]
        fixture: FixtureName,
        /// Use the fixture projector as its own partner.
        #[arg(long)]
        commuting: bool,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    /// Write fixture matrices as JSON files.
    Export {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    Qubit,
    Spin52,
}

impl FixtureName {
    fn as_str(self) -> &'static str {
        match self {
            FixtureName::Qubit => "qubit",
            FixtureName::Spin52 => "spin52",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let tol = tolerance(&cli.tol)?;
    let opts = EliminationOptions::with_tol(tol);
    match cli.command {
        Command::Valuate { projector, state, ql, gap_true, kernel } => {
            cmd_valuate(&projector, &state, ql, gap_true, kernel.as_deref(), &opts)
        }
        Command::Bench { min_n, max_n, grid, seed, out } => cmd_bench(min_n, max_n, grid, seed, out.as_deref()),
        Command::Cost { t1, tinf, p, q, eq } => cmd_cost(t1, tinf, p, q.zip(eq)),
        Command::Demo { demo: Demo::Nondistributivity { fixture, commuting } } => {
            let f = fixtures::by_name(fixture.as_str())?;
            let partner = if commuting { &f.projector } else { &f.partner };
            let rep = demo_nondistributivity(&f.projector, partner, &f.phi, &opts)?;
            let mut v = serde_json::to_value(&rep).map_err(json_err)?;
            v["fixture"] = json!(f.name);
            emit(&v)
        }
        Command::Fixtures { action: FixtureAction::Export { name, out_dir } } => cmd_export(name, &out_dir),
    }
}

fn tolerance(t: &TolArgs) -> Result<Tolerance, Error> {
    for (name, v) in [("abs-eps", t.abs_eps), ("rel-eps", t.rel_eps)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    Ok(Tolerance { abs_eps: t.abs_eps, rel_eps: t.rel_eps })
}

fn json_err(e: serde_json::Error) -> Error {
    Error::InvalidInput(e.to_string())
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

fn read_matrix(path: &Path) -> Result<Matrix, Error> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn write_matrix(path: &Path, v: &Matrix) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(v).map_err(json_err)?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// Rounds every float in `v` to `SIG_DIGITS` significant digits and
/// flushes roundoff-sized values to zero.
fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            let x = if x.abs() < ROUNDOFF_FLOOR { 0.0 } else { x };
            let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x);
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

fn emit(v: &Value) -> Result<ExitCode, Error> {
    let mut v = v.clone();
    round_value(&mut v);
    println!("{}", serde_json::to_string(&v).map_err(json_err)?);
    Ok(ExitCode::SUCCESS)
}

fn pairs(v: &[C64]) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn counts(c: &OpCounter) -> Value {
    json!({"mul": c.mul, "div": c.div, "add_sub": c.add_sub, "cmp": c.cmp, "total": c.total()})
}

fn check_report(m: &MembershipResult) -> Value {
    json!({
        "member": m.member,
        "counts": counts(&m.counts),
        "final_check": counts(&m.final_check),
        "row_swaps": m.row_swaps,
    })
}

fn cmd_valuate(
    projector: &Path,
    state: &Path,
    ql: bool,
    gap_true: bool,
    kernel: Option<&Path>,
    opts: &EliminationOptions,
) -> Result<ExitCode, Error> {
    let p = validate_projector(read_matrix(projector)?, &opts.tol)?;
    let psi = StateVector::from_matrix(&read_matrix(state)?, &opts.tol)?;
    if ql {
        let collapse = if gap_true { GapCollapse::ToTrue } else { GapCollapse::ToFalse };
        let v = valuate_ql_with(&p, &psi, collapse, opts)?;
        let collapse = serde_json::to_value(collapse).map_err(json_err)?;
        return emit(&json!({
            "verdict": if v.value { "true" } else { "false" },
            "collapse": collapse,
            "check": check_report(&v.check),
            "total": v.check.total().total(),
        }));
    }
    let kernel_basis = match kernel {
        Some(path) => Some(kernel_basis_from_matrix(&p, &read_matrix(path)?, &opts.tol)?),
        None => None,
    };
    let v = valuate_with(&p, &psi, kernel_basis.as_ref(), opts)?;
    emit(&json!({
        "verdict": v.value.as_str(),
        "witness": v.witness().map(pairs),
        "range": check_report(&v.range),
        "kernel": v.kernel.as_ref().map(check_report),
        "total": v.total().total(),
    }))
}

fn cmd_bench(
    min_n: usize,
    max_n: usize,
    grid: Option<Vec<usize>>,
    seed: u64,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let grid = match grid {
        Some(g) => g,
        None => {
            if min_n < 3 || min_n > max_n {
                return Err(Error::InvalidInput(format!("need 3 <= min-n <= max-n, got {min_n}..{max_n}")));
            }
            doubling_grid(min_n, max_n)
        }
    };
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let samples = benchmark_paths(&grid, seed)?;
    match out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
            write_csv(&samples, io::BufWriter::new(file))?;
        }
        None => {
            write_csv(&samples, io::stdout().lock())?;
            io::stdout().flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
    }

    let mut fits = serde_json::Map::new();
    for path in PathKind::ALL {
        fits.insert(path.as_str().into(), serde_json::to_value(fit_growth(&samples, path)?).map_err(json_err)?);
    }
    let mut models = Vec::new();
    for model in STANDARD_MODELS {
        let rep = conjecture1_report(&samples, model, DEFAULT_BAND)?;
        let slopes: serde_json::Map<String, Value> =
            rep.slopes.iter().map(|s| (s.path.as_str().to_string(), json!(s.fit.slope))).collect();
        models.push(json!({
            "model": model.name(),
            "params": serde_json::to_value(model).map_err(json_err)?,
            "verdict": serde_json::to_value(rep.verdict).map_err(json_err)?,
            "band": rep.band,
            "slopes": slopes,
        }));
    }
    emit(&json!({"seed": seed, "grid": grid, "fits": fits, "conjecture1": models}))
}

fn profile_report(p: &CostProfile) -> Result<Value, Error> {
    let mut v = serde_json::to_value(p).map_err(json_err)?;
    v["parallelism"] = json!(p.parallelism());
    v["work_law"] = json!(p.work_law_holds());
    v["span_law"] = json!(p.span_law_holds());
    v["speedup_chain"] = json!(p.speedup_chain_holds());
    Ok(v)
}

fn cmd_cost(t1: u64, tinf: u64, p: Option<u64>, quantum: Option<(u64, f64)>) -> Result<ExitCode, Error> {
    let profile = match (p, quantum) {
        (Some(p), None) => classical_cost(t1, tinf, p)?,
        (None, Some((q, eq))) => quantum_cost(t1, tinf, q, eq)?,
        _ => return Err(Error::InvalidInput("give either --p or both --q and --eq".into())),
    };
    emit(&profile_report(&profile)?)
}

fn cmd_export(name: FixtureName, out_dir: &Path) -> Result<ExitCode, Error> {
    let f = fixtures::by_name(name.as_str())?;
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut written = Vec::new();
    let mut put = |file: String, m: &Matrix| -> Result<(), Error> {
        let path = out_dir.join(&file);
        write_matrix(&path, m)?;
        written.push(file);
        Ok(())
    };
    put("projector.json".into(), f.projector.matrix())?;
    put("partner.json".into(), f.partner.matrix())?;
    put("phi.json".into(), &f.phi.to_matrix())?;
    for s in &f.states {
        put(format!("{}.json", s.name), &s.state.to_matrix())?;
    }
    if let Some(k) = &f.kernel_system {
        put("kernel.json".into(), k)?;
    }
    let expected: serde_json::Map<String, Value> =
        f.states.iter().map(|s| (s.name.to_string(), json!(s.expected.as_str()))).collect();
    emit(&json!({"fixture": f.name, "available": FIXTURES, "files": written, "expected": expected}))
}
