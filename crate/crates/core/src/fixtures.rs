//! Worked examples (the spin-1/2 y-axis proposition and the spin-5/2
//! x-axis proposition) and a seeded random-instance generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{projector_from_state, validate_projector, Matrix, Projector, StateVector};
use crate::numerics::{inner, norm, Tolerance, C64};
use crate::valuation::Truth;

/// `coef * sqrt(radicand) / denom`, kept exact until materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Radical {
    pub coef: i64,
    pub radicand: u32,
    pub denom: u32,
}

impl Radical {
    pub const fn new(coef: i64, radicand: u32, denom: u32) -> Self {
        Self { coef, radicand, denom }
    }

    pub const fn int(coef: i64) -> Self {
        Self::new(coef, 1, 1)
    }

    pub fn value(self) -> f64 {
        self.coef as f64 * f64::from(self.radicand).sqrt() / f64::from(self.denom)
    }
}

const fn r(coef: i64, radicand: u32, denom: u32) -> Radical {
    Radical::new(coef, radicand, denom)
}

/// Complex entry `re + i im` with radical parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadicalComplex {
    pub re: Radical,
    pub im: Radical,
}

const R0: Radical = Radical::int(0);

const fn real(x: Radical) -> RadicalComplex {
    RadicalComplex { re: x, im: R0 }
}

const fn imag(x: Radical) -> RadicalComplex {
    RadicalComplex { re: R0, im: x }
}

impl RadicalComplex {
    pub fn value(self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

fn materialize(v: &[RadicalComplex]) -> Vec<C64> {
    v.iter().map(|z| z.value()).collect()
}

/// A named state with its expected three-valued verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureState {
    pub name: &'static str,
    pub state: StateVector,
    pub expected: Truth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSet {
    pub name: &'static str,
    pub projector: Projector,
    pub states: Vec<FixtureState>,
    /// Coefficient matrix of the kernel system exactly as written out by
    /// hand (columns spanning the kernel), when the example supplies one.
    pub kernel_system: Option<Matrix>,
    /// Solution of `kernel_system X = psi` for the state named
    /// `witness_state`.
    pub kernel_witness: Option<Vec<C64>>,
    pub witness_state: Option<&'static str>,
    /// A second projector not commuting with `projector`, plus a state in
    /// the range of `projector`, for the distributivity demonstration.
    pub partner: Projector,
    pub phi: StateVector,
}

impl FixtureSet {
    pub fn state(&self, name: &str) -> Option<&FixtureState> {
        self.states.iter().find(|s| s.name == name)
    }
}

/// Available fixture names.
pub const FIXTURES: [&str; 2] = ["qubit", "spin52"];

pub fn by_name(name: &str) -> Result<FixtureSet> {
    match name {
        "qubit" => Ok(qubit_fixture()),
        "spin52" => Ok(spin52_fixture()),
        other => Err(Error::InvalidInput(format!(
            "unknown fixture {other:?}; expected one of {FIXTURES:?}"
        ))),
    }
}

fn state(v: &[RadicalComplex]) -> StateVector {
    StateVector::new(materialize(v), &Tolerance::default()).expect("fixture state is unit norm")
}

fn z_up_projector(n: usize) -> Projector {
    let mut m = Matrix::zeros(n, n);
    m[(0, 0)] = crate::numerics::ONE;
    validate_projector(m, &Tolerance::default()).expect("e1 e1^dagger is a projector")
}

/// Spin-1/2 projector onto the `+y` eigenstate `(1/sqrt2)[1, i]`.
pub fn qubit_fixture() -> FixtureSet {
    let tol = Tolerance::default();
    let half = r(1, 1, 2);
    let minus_half = r(-1, 1, 2);
    // (1/2) [[1, -i], [i, 1]]
    let entries = [real(half), imag(minus_half), imag(half), real(half)];
    let m = Matrix::from_vec(2, 2, materialize(&entries)).expect("2x2");
    let projector = validate_projector(m, &tol).expect("y projector");

    let s = r(1, 2, 2); // 1/sqrt2
    let ms = r(-1, 2, 2);
    let psi1 = state(&[real(s), imag(s)]);
    let psi2 = state(&[real(s), imag(ms)]);
    let psi3 = state(&[real(Radical::int(1)), real(R0)]);

    FixtureSet {
        name: "qubit",
        projector,
        states: vec![
            FixtureState { name: "psi1", state: psi1.clone(), expected: Truth::True },
            FixtureState { name: "psi2", state: psi2, expected: Truth::False },
            FixtureState { name: "psi3", state: psi3, expected: Truth::Gap },
        ],
        kernel_system: None,
        kernel_witness: None,
        witness_state: None,
        partner: z_up_projector(2),
        phi: psi1,
    }
}

const SPIN52_X: [Radical; 6] = [r(1, 2, 8), r(1, 10, 8), r(1, 5, 4), r(1, 5, 4), r(1, 10, 8), r(1, 2, 8)];

// 32 * M, row by row.
const SPIN52_M32: [[Radical; 6]; 6] = {
    const ONE: Radical = Radical::int(1);
    const S5: Radical = r(1, 5, 1);
    const S10: Radical = r(1, 10, 1);
    const FIVE: Radical = Radical::int(5);
    const F2: Radical = r(5, 2, 1);
    const TEN: Radical = Radical::int(10);
    [
        [ONE, S5, S10, S10, S5, ONE],
        [S5, FIVE, F2, F2, FIVE, S5],
        [S10, F2, TEN, TEN, F2, S10],
        [S10, F2, TEN, TEN, F2, S10],
        [S5, FIVE, F2, F2, FIVE, S5],
        [ONE, S5, S10, S10, S5, ONE],
    ]
};

// The five kernel columns as displayed (32 (I - M), first five columns).
const SPIN52_K: [[Radical; 5]; 6] = {
    const M1: Radical = Radical::int(-1);
    const MS5: Radical = r(-1, 5, 1);
    const MS10: Radical = r(-1, 10, 1);
    const M5: Radical = Radical::int(-5);
    const MF2: Radical = r(-5, 2, 1);
    const M10: Radical = Radical::int(-10);
    [
        [Radical::int(31), MS5, MS10, MS10, MS5],
        [MS5, Radical::int(27), MF2, MF2, M5],
        [MS10, MF2, Radical::int(22), M10, MF2],
        [MS10, MF2, M10, Radical::int(22), MF2],
        [MS5, M5, MF2, MF2, Radical::int(27)],
        [M1, MS5, MS10, MS10, MS5],
    ]
};

// (1/(4 sqrt2)) [sqrt5, -3, sqrt2, sqrt2, -3, sqrt5]
const SPIN52_PSI: [Radical; 6] = [r(1, 10, 8), r(-3, 2, 8), r(1, 1, 4), r(1, 1, 4), r(-3, 2, 8), r(1, 10, 8)];

// (1/32) [0, -sqrt2, -1, -1, -sqrt2]
const SPIN52_WITNESS: [Radical; 5] = [r(0, 1, 32), r(-1, 2, 32), r(-1, 1, 32), r(-1, 1, 32), r(-1, 2, 32)];

/// Spin-5/2 projector onto the `+5/2` eigenstate of the x-axis spin.
pub fn spin52_fixture() -> FixtureSet {
    let tol = Tolerance::default();
    let m: Vec<C64> = SPIN52_M32
        .iter()
        .flatten()
        .map(|x| C64::new(x.value() / 32.0, 0.0))
        .collect();
    let projector = validate_projector(Matrix::from_vec(6, 6, m).expect("6x6"), &tol)
        .expect("spin-5/2 projector");
    let k: Vec<C64> = SPIN52_K.iter().flatten().map(|x| C64::new(x.value(), 0.0)).collect();
    let kernel_system = Matrix::from_vec(6, 5, k).expect("6x5");
    let psi = state(&SPIN52_PSI.map(real));
    let x_up = state(&SPIN52_X.map(real));

    FixtureSet {
        name: "spin52",
        projector,
        states: vec![
            FixtureState { name: "psi", state: psi, expected: Truth::False },
            FixtureState { name: "x_up", state: x_up.clone(), expected: Truth::True },
        ],
        kernel_system: Some(kernel_system),
        kernel_witness: Some(materialize(&SPIN52_WITNESS.map(real))),
        witness_state: Some("psi"),
        partner: z_up_projector(6),
        phi: x_up,
    }
}

/// Which kind of state [`random_instance`] pairs with its projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    InRange,
    InKernel,
    Generic,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::InRange, Target::InKernel, Target::Generic];

    fn salt(self) -> u64 {
        match self {
            Target::InRange => 0x5241_4e47,
            Target::InKernel => 0x4b45_524e,
            Target::Generic => 0x4745_4e45,
        }
    }
}

const MAX_REDRAWS: usize = 16;

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Result<StateVector> {
    for _ in 0..MAX_REDRAWS {
        let v = gaussian_vector(rng, n);
        if norm(&v) > 1e-6 {
            return StateVector::normalized(v);
        }
    }
    Err(Error::DegenerateDraw { retries: MAX_REDRAWS })
}

fn instance_rng(n: usize, seed: u64, target: Target) -> ChaCha8Rng {
    let mixed = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((n as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
        ^ target.salt();
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Rank-1 projector `psi psi^dagger` for `psi` uniform on the unit sphere
/// of `C^n`, plus a state chosen by `target`. Deterministic in all three
/// arguments.
pub fn random_instance(n: usize, seed: u64, target: Target) -> Result<(Projector, StateVector)> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {n}")));
    }
    let tol = Tolerance::default();
    let mut rng = instance_rng(n, seed, target);
    let psi = unit_vector(&mut rng, n)?;
    let projector = projector_from_state(&psi, &tol)?;
    let state = match target {
        Target::InRange => {
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let phase = C64::from_polar(1.0, theta);
            StateVector::normalized(psi.components().iter().map(|z| z * phase).collect())?
        }
        Target::InKernel => {
            let mut found = None;
            for _ in 0..MAX_REDRAWS {
                let g = gaussian_vector(&mut rng, n);
                let overlap = inner(psi.components(), &g);
                let orth: Vec<C64> =
                    g.iter().zip(psi.components()).map(|(gi, pi)| gi - pi * overlap).collect();
                if norm(&orth) > 1e-6 {
                    found = Some(StateVector::normalized(orth)?);
                    break;
                }
            }
            found.ok_or(Error::DegenerateDraw { retries: MAX_REDRAWS })?
        }
        Target::Generic => unit_vector(&mut rng, n)?,
    };
    Ok((projector, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kernel_basis, range_basis};

    #[test]
    fn spin52_trace_is_one() {
        let f = spin52_fixture();
        let t = f.projector.matrix().trace();
        assert!((t.re - 1.0).abs() < 1e-15 && t.im == 0.0);
        assert_eq!(f.projector.rank(), 1);
        assert_eq!(f.projector.nullity(), 5);
    }

    #[test]
    fn spin52_matrix_is_outer_product_of_x_up() {
        let f = spin52_fixture();
        let p = projector_from_state(&f.phi, &Tolerance::default()).unwrap();
        let diff = p.matrix().sub(f.projector.matrix()).unwrap();
        assert!(diff.max_abs() < 1e-15);
    }

    #[test]
    fn spin52_kernel_columns_match_display() {
        let f = spin52_fixture();
        let k = kernel_basis(&f.projector, &Tolerance::default()).unwrap();
        let shown = f.kernel_system.as_ref().unwrap();
        assert_eq!(k.len(), 5);
        for (j, v) in k.vectors.iter().enumerate() {
            for (i, z) in v.iter().enumerate() {
                assert!((z * 32.0 - shown[(i, j)]).norm() < 1e-12);
            }
        }
        let r = range_basis(&f.projector, &Tolerance::default()).unwrap();
        let lead = r.vectors[0][0];
        for (z, x) in r.vectors[0].iter().zip(SPIN52_M32[0]) {
            assert!((z / lead - C64::new(x.value(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn qubit_states_unit_norm() {
        let f = qubit_fixture();
        assert_eq!(f.states.len(), 3);
        assert_eq!(f.projector.rank(), 1);
    }

    #[test]
    fn random_instance_deterministic() {
        for t in Target::ALL {
            let a = random_instance(7, 42, t).unwrap();
            let b = random_instance(7, 42, t).unwrap();
            assert_eq!(a, b);
            let c = random_instance(7, 43, t).unwrap();
            assert_ne!(a.1, c.1);
        }
    }

    #[test]
    fn random_instance_targets() {
        let tol = Tolerance::default();
        let (p, s) = random_instance(9, 1, Target::InRange).unwrap();
        let ps = p.matrix().mul_vec(s.components()).unwrap();
        assert!(ps.iter().zip(s.components()).all(|(a, b)| tol.equal(*a, *b)));
        let (p, s) = random_instance(9, 1, Target::InKernel).unwrap();
        assert!(norm(&p.matrix().mul_vec(s.components()).unwrap()) < 1e-12);
    }

    #[test]
    fn unknown_fixture() {
        assert!(by_name("spin1").is_err());
        assert_eq!(by_name("qubit").unwrap().name, "qubit");
    }
}
