//! Dense complex matrices, projector validation and range/kernel bases.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{inner, norm, Tolerance, C64, ONE, ZERO};

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// On-disk form: `{"rows": n, "cols": m, "entries": [[re, im], ...]}`, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixFile> for Matrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        if f.entries.len() != f.rows * f.cols {
            return Err(Error::InvalidInput(format!(
                "entries has {} elements, rows*cols = {}",
                f.entries.len(),
                f.rows * f.cols
            )));
        }
        if f.entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let data = f.entries.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        Ok(Matrix { rows: f.rows, cols: f.cols, data })
    }
}

impl From<Matrix> for MatrixFile {
    fn from(m: Matrix) -> Self {
        MatrixFile {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.into_iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from a row-major entry list.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Builds a matrix whose columns are `columns`, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, actual: c.len() });
            }
            for (i, &z) in c.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: rhs.rows });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch { expected: self.data.len(), actual: rhs.data.len() });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise deviation `|self - other|`, and whether every entry
    /// is equal under `tol`.
    fn compare(&self, other: &Matrix, tol: &Tolerance) -> (f64, bool) {
        let mut worst = 0.0f64;
        let mut all = true;
        for (a, b) in self.data.iter().zip(&other.data) {
            worst = worst.max((a - b).norm());
            all &= tol.equal(*a, *b);
        }
        (worst, all)
    }
}

/// Unit-norm column vector `psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<C64>);

impl StateVector {
    /// Checks that `|psi| = 1` within `tol`.
    pub fn new(components: Vec<C64>, tol: &Tolerance) -> Result<Self> {
        let n = norm(&components);
        if components.is_empty() || !tol.equal(C64::new(n, 0.0), ONE) {
            return Err(Error::NotUnitNorm { norm: n });
        }
        Ok(Self(components))
    }

    /// Rescales `components` to unit norm.
    pub fn normalized(components: Vec<C64>) -> Result<Self> {
        let n = norm(&components);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotUnitNorm { norm: n });
        }
        Ok(Self(components.into_iter().map(|z| z / n).collect()))
    }

    pub fn from_matrix(m: &Matrix, tol: &Tolerance) -> Result<Self> {
        if m.cols() != 1 {
            return Err(Error::InvalidInput(format!(
                "state vector must have cols = 1, got {}",
                m.cols()
            )));
        }
        Self::new(m.entries().to_vec(), tol)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix { rows: self.0.len(), cols: 1, data: self.0.clone() }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[C64] {
        &self.0
    }
}

/// Validated orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: Matrix,
    rank: usize,
}

impl Projector {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn nullity(&self) -> usize {
        self.dim() - self.rank
    }

    /// `I - M`, the projector onto the kernel.
    pub fn complement(&self) -> Projector {
        let n = self.dim();
        let matrix = Matrix::identity(n).sub(&self.matrix).expect("square");
        Projector { matrix, rank: n - self.rank }
    }
}

/// Rank-1 projector `psi psi^dagger`.
pub fn projector_from_state(psi: &StateVector, tol: &Tolerance) -> Result<Projector> {
    let v = psi.components();
    let n = norm(v);
    if !tol.equal(C64::new(n, 0.0), ONE) {
        return Err(Error::NotUnitNorm { norm: n });
    }
    let d = v.len();
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = v[i] * v[j].conj();
        }
    }
    validate_projector(m, tol)
}

/// Checks Hermiticity and idempotence, then computes the rank by
/// elimination with partial pivoting.
pub fn validate_projector(m: Matrix, tol: &Tolerance) -> Result<Projector> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let (deviation, ok) = m.compare(&m.adjoint(), tol);
    if !ok {
        return Err(Error::NotHermitian { deviation });
    }
    let sq = m.matmul(&m)?;
    let (deviation, ok) = sq.compare(&m, tol);
    if !ok {
        return Err(Error::NotIdempotent { deviation });
    }
    let rank = rank(&m, tol);
    Ok(Projector { matrix: m, rank })
}

/// Reduced row echelon form with partial pivoting.
///
/// A pivot candidate whose magnitude is at most `abs_eps * max|entry|` is
/// treated as zero and its column is skipped.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: Matrix,
    /// Pivot columns in increasing order; these are the lowest-index
    /// linearly independent columns of the input.
    pub pivots: Vec<usize>,
}

pub fn rref(m: &Matrix, tol: &Tolerance) -> Echelon {
    let mut a = m.clone();
    let scale = m.max_abs();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let (best, mag) = (r..a.rows())
            .map(|i| (i, a[(i, c)].norm()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if tol.is_negligible(mag, scale) {
            for i in r..a.rows() {
                a[(i, c)] = ZERO;
            }
            continue;
        }
        a.swap_rows(r, best);
        let p = a[(r, c)];
        for j in c..a.cols() {
            a[(r, j)] /= p;
        }
        for i in 0..a.rows() {
            if i == r {
                continue;
            }
            let f = a[(i, c)];
            if f == ZERO {
                continue;
            }
            for j in c..a.cols() {
                let t = f * a[(r, j)];
                a[(i, j)] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { reduced: a, pivots }
}

pub fn rank(m: &Matrix, tol: &Tolerance) -> usize {
    rref(m, tol).pivots.len()
}

/// Basis of `{x : m x = 0}`, one vector per free column.
pub fn null_space(m: &Matrix, tol: &Tolerance) -> Vec<Vec<C64>> {
    let e = rref(m, tol);
    let free = (0..m.cols()).filter(|c| !e.pivots.contains(c));
    free.map(|f| {
        let mut x = vec![ZERO; m.cols()];
        x[f] = ONE;
        for (row, &pc) in e.pivots.iter().enumerate() {
            x[pc] = -e.reduced[(row, f)];
        }
        x
    })
    .collect()
}

/// Lowest-index linearly independent subset of `vectors`.
pub fn independent_subset(dim: usize, vectors: &[Vec<C64>], tol: &Tolerance) -> Vec<Vec<C64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_columns(dim, vectors).expect("uniform dimension");
    rref(&m, tol).pivots.into_iter().map(|j| vectors[j].clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    Range,
    Kernel,
}

/// Linearly independent columns spanning the range or kernel of a projector.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub dim: usize,
    pub vectors: Vec<Vec<C64>>,
    pub kind: BasisKind,
}

impl SubspaceBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_columns(self.dim, &self.vectors).expect("basis vectors share dimension")
    }
}

/// Independent columns of `M`; for rank 1 this is the first nonzero column.
pub fn range_basis(p: &Projector, tol: &Tolerance) -> Result<SubspaceBasis> {
    if p.rank() == 0 {
        return Err(Error::ZeroProjector);
    }
    let m = p.matrix();
    let pivots = rref(m, tol).pivots;
    Ok(SubspaceBasis {
        dim: p.dim(),
        vectors: pivots.into_iter().map(|j| m.column(j)).collect(),
        kind: BasisKind::Range,
    })
}

/// Independent columns of `I - M`, lowest index first.
pub fn kernel_basis(p: &Projector, tol: &Tolerance) -> Result<SubspaceBasis> {
    if p.rank() == p.dim() {
        return Err(Error::FullRankProjector);
    }
    let k = p.complement();
    let pivots = rref(k.matrix(), tol).pivots;
    Ok(SubspaceBasis {
        dim: p.dim(),
        vectors: pivots.into_iter().map(|j| k.matrix().column(j)).collect(),
        kind: BasisKind::Kernel,
    })
}

/// Splits `psi` into `(P psi, (I - P) psi)`.
pub fn decompose(psi: &StateVector, p: &Projector) -> Result<(Vec<C64>, Vec<C64>)> {
    if psi.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), actual: psi.dim() });
    }
    let range_part = p.matrix().mul_vec(psi.components())?;
    let kernel_part = psi.components().iter().zip(&range_part).map(|(a, b)| a - b).collect();
    Ok((range_part, kernel_part))
}

/// `|QP - PQ|_F`.
pub fn commutator_norm(q: &Matrix, p: &Matrix) -> Result<f64> {
    Ok(q.matmul(p)?.sub(&p.matmul(q)?)?.frobenius_norm())
}

/// Whether two vectors are parallel (one is a scalar multiple of the other).
pub fn parallel(a: &[C64], b: &[C64], tol: &Tolerance) -> bool {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return na == nb;
    }
    tol.equal(C64::new(inner(a, b).norm() / (na * nb), 0.0), ONE)
}
