//! Measured operation counts per valuation path, log-log growth fits, and
//! the work/span cost algebra for classical and quantum parallel machines.
//!
//! Times are derived with the two-regime greedy schedule
//! `T = max(T1 / (p E), T_inf)`: the work law bounds it from below by
//! `T1 / p` and the span law by `T_inf`. A requested quantum efficiency
//! that would push the time under the span is clamped, and the profile
//! records the efficiency actually achieved.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::{random_instance, Target};
use crate::numerics::OpCounter;
use crate::valuation::{valuate, Truth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    RangeTrue,
    KernelFalse,
    GapBoth,
}

impl PathKind {
    pub const ALL: [PathKind; 3] = [PathKind::RangeTrue, PathKind::KernelFalse, PathKind::GapBoth];

    pub fn as_str(self) -> &'static str {
        match self {
            PathKind::RangeTrue => "range_true",
            PathKind::KernelFalse => "kernel_false",
            PathKind::GapBoth => "gap_both",
        }
    }

    fn target(self) -> Target {
        match self {
            PathKind::RangeTrue => Target::InRange,
            PathKind::KernelFalse => Target::InKernel,
            PathKind::GapBoth => Target::Generic,
        }
    }

    fn verdict(self) -> Truth {
        match self {
            PathKind::RangeTrue => Truth::True,
            PathKind::KernelFalse => Truth::False,
            PathKind::GapBoth => Truth::Gap,
        }
    }
}

/// Counts for one valuation of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSample {
    pub n: usize,
    pub path: PathKind,
    /// Range check (cross-product comparisons).
    pub range: OpCounter,
    /// Kernel elimination steps, excluding the trailing 2x2 test.
    pub elimination: OpCounter,
    /// Trailing 2x2 consistency test.
    pub final_check: OpCounter,
    /// Work of each elimination step.
    pub kernel_steps: Vec<u64>,
    pub wall_time: Option<f64>,
}

impl CostSample {
    /// All work on the path.
    pub fn counts(&self) -> OpCounter {
        self.range + self.elimination + self.final_check
    }

    pub fn kernel_ran(&self) -> bool {
        self.path != PathKind::RangeTrue
    }
}

/// Valuates one seeded random instance along `path`.
pub fn sample_path(n: usize, seed: u64, path: PathKind) -> Result<CostSample> {
    let (p, psi) = random_instance(n, seed, path.target())?;
    let start = Instant::now();
    let v = valuate(&p, &psi)?;
    let elapsed = start.elapsed().as_secs_f64();
    if v.value != path.verdict() {
        return Err(Error::InvalidInput(format!(
            "instance n={n} seed={seed} expected {} but valuated {}",
            path.verdict().as_str(),
            v.value.as_str()
        )));
    }
    let (elimination, final_check, kernel_steps) = match &v.kernel {
        Some(k) => (k.counts, k.final_check, k.step_work.clone()),
        None => Default::default(),
    };
    Ok(CostSample {
        n,
        path,
        range: v.range.total(),
        elimination,
        final_check,
        kernel_steps,
        wall_time: Some(elapsed),
    })
}

/// One sample per (n, path), ordered by n then path.
pub fn benchmark_paths(n_values: &[usize], seed: u64) -> Result<Vec<CostSample>> {
    if let Some(&n) = n_values.iter().find(|&&n| n < 3) {
        return Err(Error::InvalidInput(format!("benchmark dimensions must be >= 3, got {n}")));
    }
    let jobs: Vec<(usize, PathKind)> =
        n_values.iter().flat_map(|&n| PathKind::ALL.map(|p| (n, p))).collect();
    jobs.par_iter().map(|&(n, path)| sample_path(n, seed, path)).collect()
}

/// Writes `n,path,mul,div,add_sub,cmp,total`.
pub fn write_csv<W: Write>(samples: &[CostSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(e.to_string());
    w.write_record(["n", "path", "mul", "div", "add_sub", "cmp", "total"]).map_err(io)?;
    for s in samples {
        let c = s.counts();
        w.write_record([
            s.n.to_string(),
            s.path.as_str().to_string(),
            c.mul.to_string(),
            c.div.to_string(),
            c.add_sub.to_string(),
            c.cmp.to_string(),
            c.total().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Least-squares line through `(ln n, ln cost)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub const MIN_FIT_POINTS: usize = 4;

/// Fits `ln cost = slope ln n + intercept` over `(n, cost)` points.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<GrowthFit> {
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    if ns.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientSamples { needed: MIN_FIT_POINTS, got: ns.len() });
    }
    if points.iter().any(|&(n, c)| !(n > 0.0 && c > 0.0)) {
        return Err(Error::InvalidInput("log-log fit needs positive n and cost".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * m { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(GrowthFit { slope, intercept, r_squared })
}

/// Fits total operation count against n for one path.
pub fn fit_growth(samples: &[CostSample], path: PathKind) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.path == path)
        .map(|s| (s.n as f64, s.counts().total() as f64))
        .collect();
    fit_loglog(&pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    ClassicalPram,
    QuantumQpram,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostProfile {
    pub kind: ProfileKind,
    pub work: u64,
    pub span: u64,
    pub processors: u64,
    /// Requested quantum efficiency; `None` for classical profiles.
    pub requested_efficiency: Option<f64>,
    /// Achieved efficiency `T1 / (processors * time)`.
    pub efficiency: f64,
    /// `T_p` or `X_q`.
    pub time: f64,
    /// `processors * time`.
    pub cost: f64,
    /// `T1 / time`.
    pub speedup: f64,
    /// Time was raised to the span.
    pub clamped: bool,
}

impl CostProfile {
    pub fn parallelism(&self) -> f64 {
        self.work as f64 / self.span as f64
    }

    pub fn work_law_holds(&self) -> bool {
        self.time >= self.work as f64 / self.processors as f64
    }

    pub fn span_law_holds(&self) -> bool {
        self.time >= self.span as f64
    }

    /// `T1/T_inf >= T1/X_q >= q`, multiplied through by the positive
    /// `X_q` and `T_inf`: `X_q >= T_inf` and `q X_q <= T1`.
    pub fn speedup_chain_holds(&self) -> bool {
        self.span_law_holds() && self.cost <= self.work as f64
    }
}

fn check_bounds(t1: u64, tinf: u64, procs: u64) -> Result<()> {
    if tinf < 1 {
        return Err(Error::InvalidBounds(format!("span must be >= 1, got {tinf}")));
    }
    if tinf > t1 {
        return Err(Error::InvalidBounds(format!("span {tinf} exceeds work {t1}")));
    }
    if procs < 1 {
        return Err(Error::InvalidBounds("processor count must be >= 1".into()));
    }
    Ok(())
}

/// `T_p = max(T1/p, T_inf)`, `C_p = p T_p`.
pub fn classical_cost(t1: u64, tinf: u64, p: u64) -> Result<CostProfile> {
    check_bounds(t1, tinf, p)?;
    // Decide the regime in integers so the efficiency bound is exact.
    let span_bound = u128::from(p) * u128::from(tinf) > u128::from(t1);
    let (time, cost, efficiency) = if span_bound {
        let cost = (u128::from(p) * u128::from(tinf)) as f64;
        (tinf as f64, cost, t1 as f64 / cost)
    } else {
        (t1 as f64 / p as f64, t1 as f64, 1.0)
    };
    Ok(CostProfile {
        kind: ProfileKind::ClassicalPram,
        work: t1,
        span: tinf,
        processors: p,
        requested_efficiency: None,
        efficiency,
        time,
        cost,
        speedup: efficiency * p as f64,
        clamped: span_bound,
    })
}

/// `X_q = max(T1 / (q E_q), T_inf)`, `C_q = q X_q`.
pub fn quantum_cost(t1: u64, tinf: u64, q: u64, eq: f64) -> Result<CostProfile> {
    check_bounds(t1, tinf, q)?;
    if !(eq > 0.0 && eq.is_finite()) {
        return Err(Error::InvalidBounds(format!("efficiency must be finite and > 0, got {eq}")));
    }
    let unclamped = t1 as f64 / (q as f64 * eq);
    let clamped = unclamped < tinf as f64;
    let (time, cost, efficiency) = if clamped {
        let cost = (u128::from(q) * u128::from(tinf)) as f64;
        (tinf as f64, cost, t1 as f64 / cost)
    } else {
        (unclamped, t1 as f64 / eq, eq)
    };
    Ok(CostProfile {
        kind: ProfileKind::QuantumQpram,
        work: t1,
        span: tinf,
        processors: q,
        requested_efficiency: Some(eq),
        efficiency,
        time,
        cost,
        speedup: t1 as f64 / time,
        clamped,
    })
}

/// Span of one elimination step: divide, multiply, subtract.
pub const STEP_SPAN: u64 = 3;
/// Span of the trailing 2x2 test: two products in parallel, one comparison.
pub const FINAL_CHECK_SPAN: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum CostModel {
    /// Cost equals work.
    Serial,
    /// Range check sequential on one processor; each elimination step on
    /// `p` processors, `p` being the parallelism of the largest step.
    ClassicalPram,
    /// Range check sequential; each elimination step on `processors`
    /// quantum processors at the given efficiency.
    QuantumQpram { processors: u64, efficiency: f64 },
}

/// Quantum model in which each elimination step is span-bound.
pub const QUANTUM_FAST: CostModel = CostModel::QuantumQpram { processors: 16, efficiency: 1e12 };

/// Serial, classical PRAM and the span-bound quantum model.
pub const STANDARD_MODELS: [CostModel; 3] = [CostModel::Serial, CostModel::ClassicalPram, QUANTUM_FAST];

impl CostModel {
    pub fn name(&self) -> &'static str {
        match self {
            CostModel::Serial => "serial",
            CostModel::ClassicalPram => "classical_pram",
            CostModel::QuantumQpram { .. } => "quantum_qpram",
        }
    }
}

/// Segments of a sample as `(work, span)` pairs: the sequential range
/// check, then each elimination step, then the trailing test.
fn segments(s: &CostSample) -> Vec<(u64, u64)> {
    let mut segs = Vec::with_capacity(s.kernel_steps.len() + 2);
    let r = s.range.total();
    if r > 0 {
        segs.push((r, r));
    }
    segs.extend(s.kernel_steps.iter().filter(|&&w| w > 0).map(|&w| (w, STEP_SPAN.min(w))));
    let f = s.final_check.total();
    if f > 0 {
        segs.push((f, FINAL_CHECK_SPAN.min(f)));
    }
    segs
}

/// Cost of one sample under `model`.
pub fn model_cost(s: &CostSample, model: &CostModel) -> Result<f64> {
    match *model {
        CostModel::Serial => Ok(s.counts().total() as f64),
        CostModel::ClassicalPram => {
            let range_work = s.range.total();
            let mut cost = 0.0;
            if range_work > 0 {
                cost += classical_cost(range_work, range_work, 1)?.cost;
            }
            let steps: Vec<(u64, u64)> = segments(s).into_iter().skip(usize::from(range_work > 0)).collect();
            let p = steps.iter().map(|&(w, sp)| w.div_ceil(sp)).max().unwrap_or(1);
            for (w, sp) in steps {
                cost += classical_cost(w, sp, p)?.cost;
            }
            Ok(cost)
        }
        CostModel::QuantumQpram { processors, efficiency } => segments(s)
            .into_iter()
            .map(|(w, sp)| quantum_cost(w, sp, processors, efficiency).map(|p| p.cost))
            .sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conjecture1Verdict {
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSlope {
    pub path: PathKind,
    pub fit: GrowthFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conjecture1Report {
    pub model: CostModel,
    pub band: f64,
    pub slopes: Vec<PathSlope>,
    pub verdict: Conjecture1Verdict,
}

impl Conjecture1Report {
    pub fn slope(&self, path: PathKind) -> Option<f64> {
        self.slopes.iter().find(|s| s.path == path).map(|s| s.fit.slope)
    }
}

/// Default slope-agreement band.
pub const DEFAULT_BAND: f64 = 0.3;

/// Whether the cost of deciding each verdict grows at the same rate under
/// `model`: satisfied iff all path slopes lie within `band` of each other.
pub fn conjecture1_report(samples: &[CostSample], model: CostModel, band: f64) -> Result<Conjecture1Report> {
    let mut slopes = Vec::new();
    for path in PathKind::ALL {
        let pts = samples
            .iter()
            .filter(|s| s.path == path)
            .map(|s| Ok((s.n as f64, model_cost(s, &model)?)))
            .collect::<Result<Vec<_>>>()?;
        slopes.push(PathSlope { path, fit: fit_loglog(&pts)? });
    }
    let (lo, hi) = slopes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.fit.slope), hi.max(s.fit.slope)));
    let verdict = if hi - lo <= band { Conjecture1Verdict::Satisfied } else { Conjecture1Verdict::Violated };
    Ok(Conjecture1Report { model, band, slopes, verdict })
}

/// `lo, 2 lo, 4 lo, ...` up to `hi`.
pub fn doubling_grid(lo: usize, hi: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = lo;
    while n <= hi && n > 0 {
        out.push(n);
        n *= 2;
    }
    out
}
