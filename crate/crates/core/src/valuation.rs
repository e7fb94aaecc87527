//! Truth values of propositions in a pure state, and the subspace lattice.
//!
//! A proposition `P` (a projector) is true in `psi` when `R X = psi` is
//! solvable, false when `K X = psi` is, and has no truth value otherwise.
//! The two-valued variant decides from the range system alone and folds
//! the gap into one of the classical values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    commutator_norm, independent_subset, kernel_basis, null_space, range_basis, rank, BasisKind,
    Matrix, Projector, StateVector, SubspaceBasis,
};
use crate::membership::{
    kernel_membership_iterative, span_membership, AugmentedMatrix, EliminationOptions,
    MembershipResult,
};
use crate::numerics::{norm, OpCounter, Tolerance, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Gap,
}

impl Truth {
    pub fn as_str(self) -> &'static str {
        match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Gap => "gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthVerdict {
    pub value: Truth,
    /// The range check, always executed.
    pub range: MembershipResult,
    /// The kernel check, executed only when the range check fails.
    pub kernel: Option<MembershipResult>,
}

impl TruthVerdict {
    /// Witness of the system that decided the verdict.
    pub fn witness(&self) -> Option<&[C64]> {
        match self.value {
            Truth::True => self.range.witness.as_deref(),
            Truth::False => self.kernel.as_ref().and_then(|k| k.witness.as_deref()),
            Truth::Gap => None,
        }
    }

    /// All work done on the executed path.
    pub fn total(&self) -> OpCounter {
        self.range.total() + self.kernel.as_ref().map(MembershipResult::total).unwrap_or_default()
    }
}

fn check_dims(p: &Projector, psi: &StateVector) -> Result<()> {
    if p.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), actual: psi.dim() });
    }
    Ok(())
}

fn range_vectors(p: &Projector, tol: &Tolerance) -> Result<Vec<Vec<C64>>> {
    match range_basis(p, tol) {
        Ok(b) => Ok(b.vectors),
        Err(Error::ZeroProjector) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

fn kernel_check(
    p: &Projector,
    psi: &StateVector,
    kernel: Option<&SubspaceBasis>,
    opts: &EliminationOptions,
) -> Result<MembershipResult> {
    let owned;
    let basis = match kernel {
        Some(k) => k,
        None => match kernel_basis(p, &opts.tol) {
            Ok(k) => {
                owned = k;
                &owned
            }
            Err(Error::FullRankProjector) => {
                return span_membership(p.dim(), &[], psi.components(), opts);
            }
            Err(e) => return Err(e),
        },
    };
    let aug = AugmentedMatrix::from_basis(basis, psi.components())?;
    Ok(kernel_membership_iterative(&aug, opts))
}

/// Three-valued verdict with default options.
pub fn valuate(p: &Projector, psi: &StateVector) -> Result<TruthVerdict> {
    valuate_with(p, psi, None, &EliminationOptions::default())
}

/// Three-valued verdict. `kernel` replaces the computed kernel basis with
/// caller-supplied spanning columns (see [`kernel_basis_from_matrix`]).
pub fn valuate_with(
    p: &Projector,
    psi: &StateVector,
    kernel: Option<&SubspaceBasis>,
    opts: &EliminationOptions,
) -> Result<TruthVerdict> {
    check_dims(p, psi)?;
    let range = span_membership(p.dim(), &range_vectors(p, &opts.tol)?, psi.components(), opts)?;
    if range.member {
        return Ok(TruthVerdict { value: Truth::True, range, kernel: None });
    }
    let k = kernel_check(p, psi, kernel, opts)?;
    let value = if k.member { Truth::False } else { Truth::Gap };
    Ok(TruthVerdict { value, range, kernel: Some(k) })
}

/// Checks caller-supplied kernel columns: each must be annihilated by the
/// projector, and together they must be independent and span the kernel.
pub fn kernel_basis_from_matrix(p: &Projector, k: &Matrix, tol: &Tolerance) -> Result<SubspaceBasis> {
    if k.rows() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), actual: k.rows() });
    }
    let vectors = k.columns();
    for (j, v) in vectors.iter().enumerate() {
        let mv = p.matrix().mul_vec(v)?;
        if norm(&mv) > tol.abs_eps * norm(v).max(1.0) {
            return Err(Error::InvalidInput(format!("kernel column {j} is not annihilated by the projector")));
        }
    }
    if rank(k, tol) != vectors.len() || vectors.len() != p.nullity() {
        return Err(Error::InvalidInput(format!(
            "kernel columns must be {} linearly independent vectors",
            p.nullity()
        )));
    }
    Ok(SubspaceBasis { dim: p.dim(), vectors, kind: BasisKind::Kernel })
}

/// How the two-valued variant treats a state in neither subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapCollapse {
    /// True iff `U_R` is nonempty; only the range system is solved.
    #[default]
    ToFalse,
    /// False iff `U_K` is nonempty; only the kernel system is solved.
    ToTrue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlVerdict {
    pub value: bool,
    pub collapse: GapCollapse,
    pub check: MembershipResult,
}

pub fn valuate_ql(p: &Projector, psi: &StateVector) -> Result<QlVerdict> {
    valuate_ql_with(p, psi, GapCollapse::ToFalse, &EliminationOptions::default())
}

pub fn valuate_ql_with(
    p: &Projector,
    psi: &StateVector,
    collapse: GapCollapse,
    opts: &EliminationOptions,
) -> Result<QlVerdict> {
    check_dims(p, psi)?;
    match collapse {
        GapCollapse::ToFalse => {
            let check = span_membership(p.dim(), &range_vectors(p, &opts.tol)?, psi.components(), opts)?;
            Ok(QlVerdict { value: check.member, collapse, check })
        }
        GapCollapse::ToTrue => {
            let check = kernel_check(p, psi, None, opts)?;
            Ok(QlVerdict { value: !check.member, collapse, check })
        }
    }
}

/// Closed subspace of `C^dim` given by independent spanning vectors; an
/// empty basis is the zero subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    dim: usize,
    basis: Vec<Vec<C64>>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Self { dim, basis: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Self { dim, basis: Matrix::identity(dim).columns() }
    }

    /// Span of `vectors`, dropping dependent ones.
    pub fn span(dim: usize, vectors: &[Vec<C64>], tol: &Tolerance) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, actual: v.len() });
        }
        Ok(Self { dim, basis: independent_subset(dim, vectors, tol) })
    }

    pub fn range_of(p: &Projector, tol: &Tolerance) -> Result<Self> {
        Ok(Self { dim: p.dim(), basis: range_vectors(p, tol)? })
    }

    pub fn kernel_of(p: &Projector, tol: &Tolerance) -> Result<Self> {
        match kernel_basis(p, tol) {
            Ok(b) => Ok(Self { dim: p.dim(), basis: b.vectors }),
            Err(Error::FullRankProjector) => Ok(Self::zero(p.dim())),
            Err(e) => Err(e),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subspace.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    /// Span equality: `rank(A) = rank(B) = rank([A B])`.
    pub fn span_eq(&self, other: &Subspace, tol: &Tolerance) -> bool {
        if self.dim != other.dim || self.rank() != other.rank() {
            return false;
        }
        if self.basis.is_empty() {
            return true;
        }
        let mut both = self.basis.clone();
        both.extend(other.basis.iter().cloned());
        let m = Matrix::from_columns(self.dim, &both).expect("shared dimension");
        rank(&m, tol) == self.rank()
    }

    /// Two-valued membership of `psi`, decided by the membership machinery.
    pub fn contains(&self, psi: &[C64], opts: &EliminationOptions) -> Result<MembershipResult> {
        span_membership(self.dim, &self.basis, psi, opts)
    }
}

fn same_dim(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, actual: b.dim });
    }
    Ok(())
}

/// Intersection `a ∩ b`, from the null space of `[A | -B]`.
pub fn meet(a: &Subspace, b: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    same_dim(a, b)?;
    if a.basis.is_empty() || b.basis.is_empty() {
        return Ok(Subspace::zero(a.dim));
    }
    let mut stacked = a.basis.clone();
    stacked.extend(b.basis.iter().map(|v| v.iter().map(|z| -z).collect::<Vec<_>>()));
    let m = Matrix::from_columns(a.dim, &stacked)?;
    let ka = a.basis.len();
    let a_mat = Matrix::from_columns(a.dim, &a.basis)?;
    let vectors: Vec<Vec<C64>> = null_space(&m, tol)
        .into_iter()
        .map(|coeffs| a_mat.mul_vec(&coeffs[..ka]))
        .collect::<Result<_>>()?;
    Subspace::span(a.dim, &vectors, tol)
}

/// Span of `a ∪ b`.
pub fn join(a: &Subspace, b: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    same_dim(a, b)?;
    let mut all = a.basis.clone();
    all.extend(b.basis.iter().cloned());
    Subspace::span(a.dim, &all, tol)
}

/// Commutator threshold above which two projectors are treated as
/// noncommuting.
pub const COMMUTATOR_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonDistributivityReport {
    pub commutator_norm: f64,
    /// `[[Q ⊓ (P ⊔ ¬P)]]` at phi.
    pub lhs: bool,
    /// `[[Q ⊓ P]]` at phi.
    pub q_and_p: bool,
    /// `[[Q ⊓ ¬P]]` at phi.
    pub q_and_not_p: bool,
    /// `[[(Q ⊓ P) ⊔ (Q ⊓ ¬P)]]` at phi.
    pub rhs: bool,
    /// `Q ⊓ (P ⊔ ¬P)` spans the same subspace as `Q`.
    pub lhs_equals_q: bool,
    pub dim_q_and_p: usize,
    pub dim_q_and_not_p: usize,
    pub dim_rhs: usize,
    pub violated: bool,
}

/// Distributive-law check at a state `phi` in `ran(Q)` for noncommuting
/// `Q` and `P`, with compound propositions valued two-valuedly by
/// membership in the meet/join subspaces.
pub fn demo_nondistributivity(
    q: &Projector,
    p: &Projector,
    phi: &StateVector,
    opts: &EliminationOptions,
) -> Result<NonDistributivityReport> {
    let tol = &opts.tol;
    if q.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), actual: p.dim() });
    }
    check_dims(q, phi)?;
    let commutator = commutator_norm(q.matrix(), p.matrix())?;
    if commutator <= COMMUTATOR_THRESHOLD {
        return Err(Error::CommutingOperators { norm: commutator });
    }
    let ran_q = Subspace::range_of(q, tol)?;
    if !ran_q.contains(phi.components(), opts)?.member {
        return Err(Error::PhiNotInRange);
    }
    let ran_p = Subspace::range_of(p, tol)?;
    let ker_p = Subspace::kernel_of(p, tol)?;

    let p_or_not_p = join(&ran_p, &ker_p, tol)?;
    let lhs_space = meet(&ran_q, &p_or_not_p, tol)?;
    let q_and_p = meet(&ran_q, &ran_p, tol)?;
    let q_and_not_p = meet(&ran_q, &ker_p, tol)?;
    let rhs_space = join(&q_and_p, &q_and_not_p, tol)?;

    let at_phi = |s: &Subspace| s.contains(phi.components(), opts).map(|m| m.member);
    let lhs = at_phi(&lhs_space)?;
    let rhs = at_phi(&rhs_space)?;
    Ok(NonDistributivityReport {
        commutator_norm: commutator,
        lhs,
        q_and_p: at_phi(&q_and_p)?,
        q_and_not_p: at_phi(&q_and_not_p)?,
        rhs,
        lhs_equals_q: lhs_space.span_eq(&ran_q, tol),
        dim_q_and_p: q_and_p.rank(),
        dim_q_and_not_p: q_and_not_p.rank(),
        dim_rhs: rhs_space.rank(),
        violated: lhs != rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{qubit_fixture, random_instance, spin52_fixture, Target};
    use crate::linalg::projector_from_state;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn qubit_verdicts() {
        let f = qubit_fixture();
        for s in &f.states {
            let v = valuate(&f.projector, &s.state).unwrap();
            assert_eq!(v.value, s.expected, "{}", s.name);
        }
        let psi3 = &f.state("psi3").unwrap().state;
        let v = valuate(&f.projector, psi3).unwrap();
        assert!(v.witness().is_none());
        assert!(v.kernel.is_some());
    }

    #[test]
    fn spin52_false_with_hand_kernel() {
        let f = spin52_fixture();
        let psi = &f.state("psi").unwrap().state;
        let k = kernel_basis_from_matrix(&f.projector, f.kernel_system.as_ref().unwrap(), &tol()).unwrap();
        let v = valuate_with(&f.projector, psi, Some(&k), &EliminationOptions::default()).unwrap();
        assert_eq!(v.value, Truth::False);
        let w = v.witness().unwrap();
        for (a, b) in w.iter().zip(f.kernel_witness.as_ref().unwrap()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn bad_kernel_override_rejected() {
        let f = spin52_fixture();
        let not_kernel = Matrix::identity(6);
        assert!(kernel_basis_from_matrix(&f.projector, &not_kernel, &tol()).is_err());
    }

    #[test]
    fn ql_variants() {
        let f = qubit_fixture();
        let expect = [("psi1", true), ("psi2", false), ("psi3", false)];
        for (name, value) in expect {
            let s = &f.state(name).unwrap().state;
            assert_eq!(valuate_ql(&f.projector, s).unwrap().value, value, "{name}");
        }
        let psi3 = &f.state("psi3").unwrap().state;
        let alt = valuate_ql_with(&f.projector, psi3, GapCollapse::ToTrue, &EliminationOptions::default()).unwrap();
        assert!(alt.value);
    }

    #[test]
    fn identity_projector_always_true() {
        let p = crate::linalg::validate_projector(Matrix::identity(3), &tol()).unwrap();
        let psi = StateVector::normalized(vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)]).unwrap();
        assert_eq!(valuate(&p, &psi).unwrap().value, Truth::True);
        let z = crate::linalg::validate_projector(Matrix::zeros(3, 3), &tol()).unwrap();
        assert_eq!(valuate(&z, &psi).unwrap().value, Truth::False);
    }

    #[test]
    fn meet_of_distinct_lines_is_zero() {
        let f = qubit_fixture();
        let q = Subspace::range_of(&f.projector, &tol()).unwrap();
        let p = Subspace::range_of(&f.partner, &tol()).unwrap();
        assert_eq!(meet(&q, &p, &tol()).unwrap().rank(), 0);
        assert!(meet(&q, &q, &tol()).unwrap().span_eq(&q, &tol()));
        assert!(meet(&q, &Subspace::full(2), &tol()).unwrap().span_eq(&q, &tol()));
    }

    #[test]
    fn join_cases() {
        let (p, _) = random_instance(5, 3, Target::Generic).unwrap();
        let r = Subspace::range_of(&p, &tol()).unwrap();
        let k = Subspace::kernel_of(&p, &tol()).unwrap();
        assert!(join(&r, &k, &tol()).unwrap().span_eq(&Subspace::full(5), &tol()));
        assert!(join(&r, &Subspace::zero(5), &tol()).unwrap().span_eq(&r, &tol()));
        let e = Matrix::identity(3).columns();
        let a = Subspace::span(3, &e[..1], &tol()).unwrap();
        let b = Subspace::span(3, &e[1..2], &tol()).unwrap();
        assert_eq!(join(&a, &b, &tol()).unwrap().rank(), 2);
        assert!(matches!(join(&a, &r, &tol()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn demo_qubit() {
        let f = qubit_fixture();
        let rep = demo_nondistributivity(&f.projector, &f.partner, &f.phi, &EliminationOptions::default()).unwrap();
        assert!(rep.lhs && !rep.q_and_p && !rep.q_and_not_p && !rep.rhs);
        assert!(rep.lhs_equals_q);
        assert_eq!(rep.dim_rhs, 0);
        assert!(rep.violated);
    }

    #[test]
    fn demo_spin52() {
        let f = spin52_fixture();
        let rep = demo_nondistributivity(&f.projector, &f.partner, &f.phi, &EliminationOptions::default()).unwrap();
        assert!(rep.violated);
        assert!(rep.lhs && !rep.rhs);
    }

    #[test]
    fn demo_errors() {
        let f = qubit_fixture();
        let o = EliminationOptions::default();
        assert!(matches!(
            demo_nondistributivity(&f.projector, &f.projector, &f.phi, &o),
            Err(Error::CommutingOperators { .. })
        ));
        let psi2 = &f.state("psi2").unwrap().state;
        assert_eq!(demo_nondistributivity(&f.projector, &f.partner, psi2, &o), Err(Error::PhiNotInRange));
    }

    #[test]
    fn noncommuting_phi_outside_both() {
        for seed in 0..20 {
            let (q, phi) = random_instance(6, seed, Target::InRange).unwrap();
            let (p, _) = random_instance(6, seed + 1000, Target::Generic).unwrap();
            assert!(commutator_norm(q.matrix(), p.matrix()).unwrap() > COMMUTATOR_THRESHOLD);
            let v = valuate(&p, &phi).unwrap();
            assert_eq!(v.value, Truth::Gap);
        }
    }

    #[test]
    fn projector_from_phi_matches_range() {
        let f = qubit_fixture();
        let p = projector_from_state(&f.phi, &tol()).unwrap();
        assert!(p.matrix().sub(f.projector.matrix()).unwrap().max_abs() < 1e-15);
    }
}
