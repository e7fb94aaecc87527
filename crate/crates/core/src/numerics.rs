//! Complex scalars with primitive-operation counting.
//!
//! Every counted operation goes through a [`Tally`]. One complex
//! multiply, divide, add/subtract or comparison is one primitive
//! operation; real flops are not modelled.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Kind of primitive operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Mul,
    Div,
    AddSub,
    Cmp,
}

/// Per-context operation counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCounter {
    pub mul: u64,
    pub div: u64,
    pub add_sub: u64,
    pub cmp: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total work `mul + div + add_sub + cmp`.
    pub fn total(&self) -> u64 {
        self.mul + self.div + self.add_sub + self.cmp
    }

    /// Counts accumulated since `earlier` was taken from the same context.
    pub fn since(&self, earlier: &OpCounter) -> OpCounter {
        OpCounter {
            mul: self.mul - earlier.mul,
            div: self.div - earlier.div,
            add_sub: self.add_sub - earlier.add_sub,
            cmp: self.cmp - earlier.cmp,
        }
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(self, rhs: OpCounter) -> OpCounter {
        OpCounter {
            mul: self.mul + rhs.mul,
            div: self.div + rhs.div,
            add_sub: self.add_sub + rhs.add_sub,
            cmp: self.cmp + rhs.cmp,
        }
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: OpCounter) {
        *self = *self + rhs;
    }
}

/// A counting context.
///
/// The arithmetic is defined once in the provided methods so counted and
/// uncounted evaluation produce bitwise-identical results.
pub trait Tally {
    fn record(&mut self, op: Op);

    #[inline]
    fn mul(&mut self, a: C64, b: C64) -> C64 {
        self.record(Op::Mul);
        a * b
    }

    #[inline]
    fn div(&mut self, a: C64, b: C64) -> C64 {
        self.record(Op::Div);
        a / b
    }

    #[inline]
    fn add(&mut self, a: C64, b: C64) -> C64 {
        self.record(Op::AddSub);
        a + b
    }

    #[inline]
    fn sub(&mut self, a: C64, b: C64) -> C64 {
        self.record(Op::AddSub);
        a - b
    }

    #[inline]
    fn compare(&mut self, a: C64, b: C64, tol: &Tolerance) -> bool {
        self.record(Op::Cmp);
        tol.equal(a, b)
    }
}

impl Tally for OpCounter {
    #[inline]
    fn record(&mut self, op: Op) {
        match op {
            Op::Mul => self.mul += 1,
            Op::Div => self.div += 1,
            Op::AddSub => self.add_sub += 1,
            Op::Cmp => self.cmp += 1,
        }
    }
}

/// The null context: evaluates without counting.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTally;

impl Tally for NoTally {
    #[inline]
    fn record(&mut self, _op: Op) {}
}

/// Tolerance used for every equality and zero decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: 1e-9,
            rel_eps: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Self {
        Self { abs_eps, rel_eps }
    }

    /// `|a - b| <= abs_eps + rel_eps * max(|a|, |b|)`.
    pub fn equal(&self, a: C64, b: C64) -> bool {
        let scale = a.norm().max(b.norm());
        (a - b).norm() <= self.abs_eps + self.rel_eps * scale
    }

    /// Whether `x` is numerically zero relative to `scale`, the largest
    /// magnitude in play (pivot threshold `abs_eps * scale`).
    pub fn is_negligible(&self, x: f64, scale: f64) -> bool {
        x.abs() <= self.abs_eps * scale.max(1.0)
    }
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `<a, b> = sum conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
