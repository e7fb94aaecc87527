//! Solvability of `R X = psi` and `K X = psi`.
//!
//! The range check uses the cross-product test `b_p R_j = b_j R_p` against
//! an anchor entry `p`, which costs `2(n-1)` multiplications and `n-1`
//! comparisons on a member. The kernel check reduces the augmented matrix
//! `[K | psi]` to row echelon form and then examines the trailing 2x2 block
//! `a_{n,n-1} a_{n-1,n} = a_{n-1,n-1} a_{n,n}`. Two formulations of the
//! elimination are provided: the entrywise iteration and the matrix form
//! built from a scaled pivot column, its outer product with the pivot row,
//! and a matrix subtraction. They perform the same floating-point
//! operations in the same order, so their verdicts and witnesses agree
//! bit for bit.
//!
//! Each call owns a fresh [`OpCounter`] and returns the snapshot inside the
//! [`MembershipResult`]. Pivot searches and back-substitution are not
//! counted unless [`EliminationOptions::count_pivot_search`] is set (which
//! only affects the search).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SubspaceBasis};
use crate::numerics::{norm, OpCounter, Tally, Tolerance, C64, ZERO};

/// `[K | psi]`: `unknowns` coefficient columns followed by the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    body: Matrix,
    unknowns: usize,
}

impl AugmentedMatrix {
    pub fn new(columns: &[Vec<C64>], psi: &[C64]) -> Result<Self> {
        let n = psi.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty right-hand side".into()));
        }
        let mut cols = columns.to_vec();
        cols.push(psi.to_vec());
        let body = Matrix::from_columns(n, &cols)?;
        Ok(Self { body, unknowns: columns.len() })
    }

    pub fn from_parts(coefficients: &Matrix, psi: &[C64]) -> Result<Self> {
        if coefficients.rows() != psi.len() {
            return Err(Error::DimensionMismatch { expected: coefficients.rows(), actual: psi.len() });
        }
        Self::new(&coefficients.columns(), psi)
    }

    pub fn from_basis(basis: &SubspaceBasis, psi: &[C64]) -> Result<Self> {
        if basis.dim != psi.len() {
            return Err(Error::DimensionMismatch { expected: basis.dim, actual: psi.len() });
        }
        Self::new(&basis.vectors, psi)
    }

    pub fn body(&self) -> &Matrix {
        &self.body
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rows(&self) -> usize {
        self.body.rows()
    }

    pub fn coefficients(&self) -> Matrix {
        let cols: Vec<_> = (0..self.unknowns).map(|j| self.body.column(j)).collect();
        Matrix::from_columns(self.rows(), &cols).expect("consistent shape")
    }

    pub fn rhs(&self) -> Vec<C64> {
        self.body.column(self.unknowns)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub member: bool,
    pub witness: Option<Vec<C64>>,
    /// Range check: all of its work. Kernel check: the elimination steps.
    pub counts: OpCounter,
    /// The trailing consistency test of the kernel check.
    pub final_check: OpCounter,
    /// Operations per elimination step, in order.
    pub step_work: Vec<u64>,
    pub row_swaps: usize,
    /// Columns whose every pivot candidate was below tolerance.
    pub skipped_columns: Vec<usize>,
}

impl MembershipResult {
    fn empty(member: bool) -> Self {
        Self {
            member,
            witness: None,
            counts: OpCounter::default(),
            final_check: OpCounter::default(),
            step_work: Vec::new(),
            row_swaps: 0,
            skipped_columns: Vec::new(),
        }
    }

    pub fn total(&self) -> OpCounter {
        self.counts + self.final_check
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EliminationOptions {
    pub tol: Tolerance,
    pub pivoting: bool,
    pub count_pivot_search: bool,
}

impl Default for EliminationOptions {
    fn default() -> Self {
        Self { tol: Tolerance::default(), pivoting: true, count_pivot_search: false }
    }
}

impl EliminationOptions {
    pub fn with_tol(tol: Tolerance) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Decides `r x = psi` for a single column `r`.
pub fn range_membership(r: &[C64], psi: &[C64], tol: &Tolerance) -> Result<MembershipResult> {
    if r.len() != psi.len() {
        return Err(Error::DimensionMismatch { expected: r.len(), actual: psi.len() });
    }
    let scale = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if norm(r) <= tol.abs_eps {
        return Err(Error::ZeroColumn);
    }
    // Anchor on the first entry above tolerance; for P_11 != 0 this is
    // the first row.
    let anchor = r
        .iter()
        .position(|z| !tol.is_negligible(z.norm(), scale))
        .ok_or(Error::ZeroColumn)?;
    let (r_p, b_p) = (r[anchor], psi[anchor]);

    let mut ctx = OpCounter::new();
    let mut member = true;
    for j in (0..r.len()).filter(|&j| j != anchor) {
        let lhs = ctx.mul(b_p, r[j]);
        let rhs = ctx.mul(psi[j], r_p);
        if !ctx.compare(lhs, rhs, tol) {
            member = false;
            break;
        }
    }
    let mut out = MembershipResult::empty(member);
    out.counts = ctx;
    if member {
        out.witness = Some(vec![b_p / r_p]);
    }
    Ok(out)
}

/// Range check against a one-vector basis.
pub fn range_membership_basis(
    basis: &SubspaceBasis,
    psi: &[C64],
    tol: &Tolerance,
) -> Result<MembershipResult> {
    match basis.vectors.as_slice() {
        [r] => range_membership(r, psi, tol),
        v => Err(Error::InvalidInput(format!(
            "range check expects exactly one basis vector, got {}",
            v.len()
        ))),
    }
}

/// Kernel check by the entrywise iteration
/// `a_jl <- a_jl - (a_ji / a_ii) a_il`.
pub fn kernel_membership_iterative(
    k: &AugmentedMatrix,
    opts: &EliminationOptions,
) -> MembershipResult {
    eliminate(k, opts, iterative_step)
}

/// Kernel check by the matrix form: scale the pivot column, take its outer
/// product `D` with the pivot row, subtract `D`.
pub fn kernel_membership_matrix(k: &AugmentedMatrix, opts: &EliminationOptions) -> MembershipResult {
    eliminate(k, opts, matrix_step)
}

/// Membership of `psi` in the span of `vectors`: zero subspace, single
/// column cross-product test, or elimination otherwise.
pub fn span_membership(
    dim: usize,
    vectors: &[Vec<C64>],
    psi: &[C64],
    opts: &EliminationOptions,
) -> Result<MembershipResult> {
    if dim != psi.len() {
        return Err(Error::DimensionMismatch { expected: dim, actual: psi.len() });
    }
    match vectors {
        [] => {
            let mut ctx = OpCounter::new();
            let member = psi.iter().all(|&b| ctx.compare(b, ZERO, &opts.tol));
            let mut out = MembershipResult::empty(member);
            out.counts = ctx;
            if member {
                out.witness = Some(Vec::new());
            }
            Ok(out)
        }
        [r] => range_membership(r, psi, &opts.tol),
        _ => Ok(kernel_membership_iterative(&AugmentedMatrix::new(vectors, psi)?, opts)),
    }
}

type Step = fn(&mut Matrix, usize, usize, &mut OpCounter);

fn iterative_step(a: &mut Matrix, r: usize, c: usize, ctx: &mut OpCounter) {
    let pivot = a[(r, c)];
    for j in r + 1..a.rows() {
        let factor = ctx.div(a[(j, c)], pivot);
        for l in c + 1..a.cols() {
            let t = ctx.mul(factor, a[(r, l)]);
            a[(j, l)] = ctx.sub(a[(j, l)], t);
        }
        a[(j, c)] = ZERO;
    }
}

fn matrix_step(a: &mut Matrix, r: usize, c: usize, ctx: &mut OpCounter) {
    let pivot = a[(r, c)];
    let below = a.rows() - r - 1;
    let right = a.cols() - c - 1;
    let scaled: Vec<C64> = (r + 1..a.rows()).map(|j| ctx.div(a[(j, c)], pivot)).collect();
    let pivot_row: Vec<C64> = (c + 1..a.cols()).map(|l| a[(r, l)]).collect();
    let mut outer = Matrix::zeros(below, right);
    for (j, &s) in scaled.iter().enumerate() {
        for (l, &p) in pivot_row.iter().enumerate() {
            outer[(j, l)] = ctx.mul(s, p);
        }
    }
    for j in 0..below {
        for l in 0..right {
            let (row, col) = (r + 1 + j, c + 1 + l);
            a[(row, col)] = ctx.sub(a[(row, col)], outer[(j, l)]);
        }
        a[(r + 1 + j, c)] = ZERO;
    }
}

fn select_pivot(
    a: &Matrix,
    r: usize,
    c: usize,
    opts: &EliminationOptions,
    scale: f64,
    ctx: &mut OpCounter,
) -> usize {
    if opts.pivoting {
        let mut best = r;
        for i in r + 1..a.rows() {
            if opts.count_pivot_search {
                ctx.cmp += 1;
            }
            if a[(i, c)].norm() > a[(best, c)].norm() {
                best = i;
            }
        }
        best
    } else {
        (r..a.rows())
            .find(|&i| !opts.tol.is_negligible(a[(i, c)].norm(), scale))
            .unwrap_or(r)
    }
}

fn eliminate(k: &AugmentedMatrix, opts: &EliminationOptions, step: Step) -> MembershipResult {
    let tol = &opts.tol;
    let rows = k.rows();
    let unknowns = k.unknowns();
    let rhs_col = unknowns;
    let mut a = k.body().clone();
    let scale = a.max_abs();

    let mut out = MembershipResult::empty(false);
    let mut ctx = OpCounter::new();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;

    // Columns 0..unknowns-1 are eliminated; the last unknown column is
    // decided by the trailing cross-product test.
    let last = unknowns.saturating_sub(1);
    for c in 0..last {
        if r == rows {
            break;
        }
        let before = ctx;
        let best = select_pivot(&a, r, c, opts, scale, &mut ctx);
        if tol.is_negligible(a[(best, c)].norm(), scale) {
            for i in r..rows {
                a[(i, c)] = ZERO;
            }
            out.skipped_columns.push(c);
            continue;
        }
        if best != r {
            a.swap_rows(r, best);
            out.row_swaps += 1;
        }
        step(&mut a, r, c, &mut ctx);
        out.step_work.push(ctx.since(&before).total());
        pivots.push((r, c));
        r += 1;
    }
    out.counts = ctx;

    let mut fin = OpCounter::new();
    let member = if unknowns == 0 || r == rows {
        // No column left to test: every remaining row must read 0 = b.
        (r..rows).all(|i| fin.compare(a[(i, rhs_col)], ZERO, tol))
    } else {
        let mut anchor = r;
        for i in r + 1..rows {
            if opts.count_pivot_search {
                fin.cmp += 1;
            }
            if a[(i, last)].norm() > a[(anchor, last)].norm() {
                anchor = i;
            }
        }
        if tol.is_negligible(a[(anchor, last)].norm(), scale) {
            out.skipped_columns.push(last);
            (r..rows).all(|i| fin.compare(a[(i, rhs_col)], ZERO, tol))
        } else {
            pivots.push((anchor, last));
            let (p_coef, p_rhs) = (a[(anchor, last)], a[(anchor, rhs_col)]);
            (r..rows).filter(|&i| i != anchor).all(|i| {
                let lhs = fin.mul(a[(i, last)], p_rhs);
                let rhs = fin.mul(p_coef, a[(i, rhs_col)]);
                fin.compare(lhs, rhs, tol)
            })
        }
    };
    out.final_check = fin;
    out.member = member;
    if member {
        out.witness = Some(back_substitute(&a, &pivots, unknowns));
    }
    out
}

fn back_substitute(a: &Matrix, pivots: &[(usize, usize)], unknowns: usize) -> Vec<C64> {
    let mut x = vec![ZERO; unknowns];
    for &(row, col) in pivots.iter().rev() {
        let mut s = a[(row, unknowns)];
        for l in col + 1..unknowns {
            s -= a[(row, l)] * x[l];
        }
        x[col] = s / a[(row, col)];
    }
    x
}

/// Residual tolerance used by [`residual_oracle`].
pub const ORACLE_TOLERANCE: f64 = 1e-7;

/// Least-squares check of `A X = psi` through an SVD pseudo-inverse.
///
/// Independent of the elimination routines above; uncounted.
pub fn residual_oracle(a: &Matrix, psi: &[C64]) -> Result<MembershipResult> {
    residual_oracle_with(a, psi, ORACLE_TOLERANCE)
}

pub fn residual_oracle_with(a: &Matrix, psi: &[C64], threshold: f64) -> Result<MembershipResult> {
    if a.rows() != psi.len() {
        return Err(Error::DimensionMismatch { expected: a.rows(), actual: psi.len() });
    }
    if a.cols() == 0 {
        let member = norm(psi) < threshold;
        let mut out = MembershipResult::empty(member);
        out.witness = member.then(Vec::new);
        return Ok(out);
    }
    // Real embedding [[Re, -Im], [Im, Re]]; the complex SVD is inaccurate
    // when singular values cluster.
    let (r, c) = (a.rows(), a.cols());
    let am = DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = a[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let b = DMatrix::from_fn(2 * r, 1, |i, _| if i < r { psi[i].re } else { psi[i - r].im });
    let svd = am.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let xr = svd
        .solve(&b, 1e-12 * sigma_max.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let resid = (&am * &xr - &b).norm();
    let x: Vec<C64> = (0..c).map(|j| C64::new(xr[j], xr[j + c])).collect();
    let member = resid < threshold;
    let mut out = MembershipResult::empty(member);
    if member {
        out.witness = Some(x);
    }
    Ok(out)
}

/// `|A x - psi|`.
pub fn residual(a: &Matrix, x: &[C64], psi: &[C64]) -> Result<f64> {
    let ax = a.mul_vec(x)?;
    Ok(norm(&ax.iter().zip(psi).map(|(p, q)| p - q).collect::<Vec<_>>()))
}
