//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use propval::costmodel::{
    benchmark_paths, classical_cost, conjecture1_report, fit_growth, quantum_cost, Conjecture1Verdict, CostModel,
    PathKind, DEFAULT_BAND, QUANTUM_FAST,
};
use propval::fixtures::{qubit_fixture, random_instance, spin52_fixture, Target};
use propval::linalg::{kernel_basis, projector_from_state, range_basis};
use propval::membership::{
    kernel_membership_iterative, kernel_membership_matrix, range_membership_basis, residual, residual_oracle,
    AugmentedMatrix, EliminationOptions,
};
use propval::valuation::{
    demo_nondistributivity, join, kernel_basis_from_matrix, meet, valuate, valuate_with, Subspace,
};
use propval::{Matrix, StateVector, Tolerance, Truth, C64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("runtime {elapsed:?} exceeds {limit:?}"))
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn unit(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    StateVector::normalized(gaussian_vec(rng, n)).expect("nonzero draw")
}

fn qubit_regression() -> Outcome {
    let f = qubit_fixture();
    let mut total = Duration::ZERO;
    for s in &f.states {
        let start = Instant::now();
        let v = valuate(&f.projector, &s.state).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        total += elapsed;
        ensure(v.value == s.expected, || format!("{}: got {:?}, expected {:?}", s.name, v.value, s.expected))?;
        within(elapsed, Duration::from_millis(1))?;
    }
    Ok(format!("psi1 true, psi2 false, psi3 gap in {total:?}"))
}

fn spin52_regression() -> Outcome {
    let f = spin52_fixture();
    let tol = Tolerance::default();
    let psi = &f.state("psi").ok_or("missing psi")?.state;
    let k = f.kernel_system.as_ref().ok_or("missing kernel system")?;
    let basis = kernel_basis_from_matrix(&f.projector, k, &tol).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let v = valuate_with(&f.projector, psi, Some(&basis), &EliminationOptions::default())
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(!v.range.member, || "range system unexpectedly consistent".into())?;
    ensure(v.value == Truth::False, || format!("verdict {:?}", v.value))?;
    let w = v.witness().ok_or("no witness")?;
    let s2 = 2f64.sqrt();
    let expected = [0.0, -s2, -1.0, -1.0, -s2].map(|x| C64::new(x / 32.0, 0.0));
    ensure(w.len() == expected.len(), || format!("witness length {}", w.len()))?;
    let err = w.iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    ensure(err < 1e-9, || format!("witness error {err:e}"))?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("false, witness error {err:.1e}, {elapsed:?}"))
}

/// Projector onto `x` with `|x_j| <= |x_last|`, and the kernel basis
/// `e_j - (conj x_j / conj x_last) e_last`, so the pivot stays on the
/// diagonal at every step.
fn no_swap_instance(rng: &mut ChaCha8Rng, n: usize) -> (propval::Projector, Matrix, StateVector, StateVector) {
    let tol = Tolerance::default();
    let mut x = gaussian_vec(rng, n);
    let big = (0..n).max_by(|&a, &b| x[a].norm().total_cmp(&x[b].norm())).unwrap();
    x.swap(big, n - 1);
    let x = StateVector::normalized(x).unwrap();
    let p = projector_from_state(&x, &tol).unwrap();
    let xs = x.components();
    let last = xs[n - 1].conj();
    let cols: Vec<Vec<C64>> = (0..n - 1)
        .map(|j| {
            let mut v = vec![C64::new(0.0, 0.0); n];
            v[j] = C64::new(1.0, 0.0);
            v[n - 1] = -xs[j].conj() / last;
            v
        })
        .collect();
    let k = Matrix::from_columns(n, &cols).unwrap();
    let coeffs = gaussian_vec(rng, n - 1);
    let kernel_state: Vec<C64> = (0..n).map(|i| cols.iter().zip(&coeffs).map(|(c, a)| c[i] * a).sum()).collect();
    (p, k, x, StateVector::normalized(kernel_state).unwrap())
}

fn exact_counts() -> Outcome {
    let tol = Tolerance::default();
    let opts = EliminationOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 3..=64u64 {
        let (p, k, x, psi) = no_swap_instance(&mut rng, n as usize);
        let basis = kernel_basis_from_matrix(&p, &k, &tol).map_err(|e| format!("n={n}: {e}"))?;
        let v = valuate_with(&p, &psi, Some(&basis), &opts).map_err(|e| e.to_string())?;
        let kr = v.kernel.as_ref().ok_or_else(|| format!("n={n}: kernel path not taken"))?;
        ensure(kr.row_swaps == 0, || format!("n={n}: {} row swaps", kr.row_swaps))?;
        ensure(v.value == Truth::False, || format!("n={n}: verdict {:?}", v.value))?;
        let div = n * (n - 1) / 2 - 1;
        let mul = n * (n - 1) * (2 * n - 1) / 6 - 1;
        let c = kr.counts;
        ensure(c.div == div && c.mul == mul && c.add_sub == mul, || {
            format!("n={n}: div {} mul {} sub {}, expected {div}/{mul}/{mul}", c.div, c.mul, c.add_sub)
        })?;

        let v = valuate(&p, &x).map_err(|e| e.to_string())?;
        let r = v.range.counts;
        ensure(v.value == Truth::True && r.mul == 2 * (n - 1) && r.cmp == n - 1 && r.div == 0 && r.add_sub == 0, || {
            format!("n={n}: range counts {r:?}")
        })?;
    }
    Ok("n = 3..64 kernel div/mul/sub and range mul/cmp exact".into())
}

const GRID: [usize; 6] = [8, 16, 32, 64, 128, 256];

fn growth_rates() -> Outcome {
    let start = Instant::now();
    let samples = benchmark_paths(&GRID, 42).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (path, lo, hi) in [
        (PathKind::RangeTrue, 0.8, 1.2),
        (PathKind::KernelFalse, 2.7, 3.3),
        (PathKind::GapBoth, 2.7, 3.3),
    ] {
        let fit = fit_growth(&samples, path).map_err(|e| e.to_string())?;
        ensure((lo..=hi).contains(&fit.slope) && fit.r_squared > 0.99, || {
            format!("{}: slope {:.4} r2 {:.5}", path.as_str(), fit.slope, fit.r_squared)
        })?;
        parts.push(format!("{} {:.3} (r2 {:.4})", path.as_str(), fit.slope, fit.r_squared));
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{} in {:?}", parts.join(", "), start.elapsed()))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let tol = Tolerance::default();
    let opts = EliminationOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut verdicts = [0usize; 3];
    for i in 0..1000u64 {
        let n = rng.random_range(3..=32);
        let target = Target::ALL[(i % 3) as usize];
        let (p, psi) = random_instance(n, i, target).map_err(|e| e.to_string())?;
        let psi = psi.components();
        let ctx = || format!("instance {i} (n={n}, {target:?})");

        let rb = range_basis(&p, &tol).map_err(|e| e.to_string())?;
        let range = range_membership_basis(&rb, psi, &tol).map_err(|e| e.to_string())?;
        let range_oracle = residual_oracle(&rb.as_matrix(), psi).map_err(|e| e.to_string())?;
        ensure(range.member == range_oracle.member, || format!("{}: range disagrees with oracle", ctx()))?;

        let kb = kernel_basis(&p, &tol).map_err(|e| e.to_string())?;
        let km = kb.as_matrix();
        let aug = AugmentedMatrix::from_basis(&kb, psi).map_err(|e| e.to_string())?;
        let it = kernel_membership_iterative(&aug, &opts);
        let mx = kernel_membership_matrix(&aug, &opts);
        let kernel_oracle = residual_oracle(&km, psi).map_err(|e| e.to_string())?;
        ensure(it.member == kernel_oracle.member && mx.member == kernel_oracle.member, || {
            format!("{}: kernel verdicts {}/{} vs oracle {}", ctx(), it.member, mx.member, kernel_oracle.member)
        })?;
        if let (Some(a), Some(b)) = (&it.witness, &mx.witness) {
            let ra = residual(&km, a, psi).map_err(|e| e.to_string())?;
            let rb = residual(&km, b, psi).map_err(|e| e.to_string())?;
            let gap = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            ensure(ra < 1e-7 && rb < 1e-7 && gap < 1e-7, || {
                format!("{}: residuals {ra:e}/{rb:e}, witness gap {gap:e}", ctx())
            })?;
        }
        ensure(it.witness.is_some() == mx.witness.is_some(), || format!("{}: witness presence differs", ctx()))?;
        let v = if range.member {
            0
        } else if it.member {
            1
        } else {
            2
        };
        verdicts[v] += 1;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "1000 instances agree (true {}, false {}, gap {}) in {:?}",
        verdicts[0],
        verdicts[1],
        verdicts[2],
        start.elapsed()
    ))
}

fn cost_laws() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut qcost_checked = 0;
    for i in 0..10_000 {
        let t1: u64 = rng.random_range(1..=1_000_000);
        let tinf: u64 = rng.random_range(1..=t1);
        let p: u64 = rng.random_range(1..=4 * (t1 / tinf) + 1);
        let c = classical_cost(t1, tinf, p).map_err(|e| e.to_string())?;
        ensure(c.work_law_holds() && c.span_law_holds() && c.efficiency <= 1.0, || {
            format!("tuple {i}: classical ({t1}, {tinf}, p={p}) -> {c:?}")
        })?;

        // Feasible quantum domain: q within the parallelism, Eq >= 1.
        let q: u64 = rng.random_range(1..=t1 / tinf);
        let eq_cap = (t1 as f64 / (q * tinf) as f64).max(1.0 + 1e-9);
        let eq: f64 = if i % 2 == 0 { rng.random_range(1.0..eq_cap) } else { rng.random_range(1.0..64.0) };
        let x = quantum_cost(t1, tinf, q, eq).map_err(|e| e.to_string())?;
        let (t1f, tinff) = (t1 as f64, tinf as f64);
        let chain = t1f / tinff >= t1f / x.time && t1f / x.time >= q as f64 * (1.0 - 1e-12);
        ensure(x.span_law_holds() && chain, || format!("tuple {i}: quantum ({t1}, {tinf}, q={q}, eq={eq}) -> {x:?}"))?;
        if eq > 1.0 && !x.clamped {
            qcost_checked += 1;
            ensure(x.cost < t1f, || format!("tuple {i}: C_q {} >= T1 {t1}", x.cost))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("10000 tuples, {qcost_checked} unclamped quantum with C_q < T1, {:?}", start.elapsed()))
}

fn conjecture1() -> Outcome {
    let samples = benchmark_paths(&GRID, 42).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (model, want) in [
        (CostModel::Serial, Conjecture1Verdict::Violated),
        (CostModel::ClassicalPram, Conjecture1Verdict::Violated),
        (QUANTUM_FAST, Conjecture1Verdict::Satisfied),
    ] {
        let rep = conjecture1_report(&samples, model, DEFAULT_BAND).map_err(|e| e.to_string())?;
        let slopes: Vec<String> = rep.slopes.iter().map(|s| format!("{:.2}", s.fit.slope)).collect();
        ensure(rep.verdict == want, || format!("{}: {:?} with slopes {slopes:?}", model.name(), rep.verdict))?;
        parts.push(format!("{} {:?} [{}]", model.name(), rep.verdict, slopes.join(", ")));
    }
    Ok(parts.join("; "))
}

fn random_subspace(rng: &mut ChaCha8Rng, n: usize, pool: &[Vec<C64>]) -> Subspace {
    let k = rng.random_range(0..=n);
    let vectors: Vec<Vec<C64>> = (0..k)
        .map(|_| {
            if !pool.is_empty() && rng.random_bool(0.5) {
                pool[rng.random_range(0..pool.len())].clone()
            } else {
                gaussian_vec(rng, n)
            }
        })
        .collect();
    Subspace::span(n, &vectors, &Tolerance::default()).unwrap()
}

fn nondistributivity() -> Outcome {
    let f = qubit_fixture();
    let opts = EliminationOptions::default();
    let rep = demo_nondistributivity(&f.projector, &f.partner, &f.phi, &opts).map_err(|e| e.to_string())?;
    ensure(rep.lhs && !rep.q_and_p && !rep.q_and_not_p && rep.violated, || format!("demo report {rep:?}"))?;

    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..500 {
        let n = rng.random_range(2..=16);
        let shared: Vec<Vec<C64>> = (0..rng.random_range(0..=n / 2)).map(|_| gaussian_vec(&mut rng, n)).collect();
        let a = random_subspace(&mut rng, n, &shared);
        let b = random_subspace(&mut rng, n, &shared);
        let e = |e: propval::Error| format!("pair {i}: {e}");
        let same = |x: &Subspace, y: &Subspace| x.span_eq(y, &tol);
        ensure(same(&meet(&a, &a, &tol).map_err(e)?, &a) && same(&join(&a, &a, &tol).map_err(e)?, &a), || {
            format!("pair {i}: idempotence fails")
        })?;
        let a_or_ab = join(&a, &meet(&a, &b, &tol).map_err(e)?, &tol).map_err(e)?;
        let a_and_ab = meet(&a, &join(&a, &b, &tol).map_err(e)?, &tol).map_err(e)?;
        ensure(same(&a_or_ab, &a) && same(&a_and_ab, &a), || format!("pair {i} (n={n}): absorption fails"))?;
        let ab = meet(&a, &b, &tol).map_err(e)?;
        ensure(same(&ab, &meet(&b, &a, &tol).map_err(e)?), || format!("pair {i}: meet not commutative"))?;

        let p = projector_from_state(&unit(&mut rng, n), &tol).map_err(e)?;
        let full = join(
            &Subspace::range_of(&p, &tol).map_err(e)?,
            &Subspace::kernel_of(&p, &tol).map_err(e)?,
            &tol,
        )
        .map_err(e)?;
        ensure(full.rank() == n, || format!("pair {i}: range join kernel has rank {} < {n}", full.rank()))?;
    }
    Ok("qubit demo violated (lhs true, both conjuncts false); 500 lattice pairs pass".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("qubit example verdicts", qubit_regression),
        ("spin-5/2 kernel witness", spin52_regression),
        ("exact operation counts", exact_counts),
        ("growth-rate slopes", growth_rates),
        ("oracle equivalence", oracle_equivalence),
        ("cost-law properties", cost_laws),
        ("equal-cost verdicts per model", conjecture1),
        ("non-distributivity and lattice laws", nondistributivity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
