//! Three-level state vectors and operators.
//!
//! Every vector and matrix in the crate uses the basis ordering
//! `(|+1>, |0>, |-1>)`: index 0 is the ground state `|+1>`, index 1 the
//! intermediate state `|0>` and index 2 the ground state `|-1>`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Tolerance on `| ||psi|| - 1 |` accepted when building a [`StateVector`].
pub const NORM_TOL: f64 = 1e-12;
/// Relative tolerance on `||H - H^dagger||` for Hermitian operators.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    /// `|+1>`
    Plus,
    /// `|0>`, the intermediate state.
    Zero,
    /// `|-1>`
    Minus,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Plus, Level::Zero, Level::Minus];

    pub const fn index(self) -> usize {
        match self {
            Level::Plus => 0,
            Level::Zero => 1,
            Level::Minus => 2,
        }
    }
}

/// Normalized state of the three-level system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector(Vector3<C64>);

impl StateVector {
    /// Builds a state from `(c_{+1}, c_0, c_{-1})`; the amplitudes must already
    /// be normalized.
    pub fn new(amplitudes: [C64; 3]) -> Result<Self> {
        let v = Vector3::from(amplitudes);
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(format!(
                "state norm {norm} differs from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(StateVector(v))
    }

    /// Rescales arbitrary (nonzero) amplitudes to unit norm.
    pub fn normalized(amplitudes: [C64; 3]) -> Result<Self> {
        let v = Vector3::from(amplitudes);
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        Ok(StateVector(v / C64::from(norm)))
    }

    pub fn basis(level: Level) -> Self {
        let mut v = Vector3::zeros();
        v[level.index()] = ONE;
        StateVector(v)
    }

    /// Skips the norm check. Used on states produced by unitary evolution,
    /// whose drift is measured rather than rejected.
    pub(crate) fn from_vector_unchecked(v: Vector3<C64>) -> Self {
        StateVector(v)
    }

    pub fn amplitude(&self, level: Level) -> C64 {
        self.0[level.index()]
    }

    pub fn amplitudes(&self) -> [C64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn population(&self, level: Level) -> f64 {
        self.0[level.index()].norm_sqr()
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[0].norm_sqr(), self.0[1].norm_sqr(), self.0[2].norm_sqr()]
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_vector(&self) -> &Vector3<C64> {
        &self.0
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }

    /// Euclidean distance between the amplitude vectors.
    pub fn distance(&self, other: &StateVector) -> f64 {
        (self.0 - other.0).norm()
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        StateVector(self.0 * factor)
    }
}

/// `<a|b>`.
pub fn overlap(a: &StateVector, b: &StateVector) -> C64 {
    a.overlap(b)
}

/// Dense 3x3 complex operator, either a Hamiltonian (angular frequency) or a
/// propagator (dimensionless).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator3(Matrix3<C64>);

impl Operator3 {
    pub fn zeros() -> Self {
        Operator3(Matrix3::zeros())
    }

    pub fn identity() -> Self {
        Operator3(Matrix3::identity())
    }

    pub fn from_matrix(m: Matrix3<C64>) -> Self {
        Operator3(m)
    }

    pub fn from_rows(rows: [[C64; 3]; 3]) -> Self {
        Operator3(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    pub fn diagonal(d: [C64; 3]) -> Self {
        Operator3(Matrix3::from_diagonal(&Vector3::from(d)))
    }

    /// `|row><col|`.
    pub fn ket_bra(row: Level, col: Level) -> Self {
        let mut m = Matrix3::zeros();
        m[(row.index(), col.index())] = ONE;
        Operator3(m)
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.0
    }

    pub fn entry(&self, row: Level, col: Level) -> C64 {
        self.0[(row.index(), col.index())]
    }

    pub fn dagger(&self) -> Self {
        Operator3(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Operator3(self.0 * factor)
    }

    pub fn commutator(&self, other: &Operator3) -> Self {
        Operator3(self.0 * other.0 - other.0 * self.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.0 - self.0.adjoint()).norm() <= tol * self.0.norm().max(1.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.0.adjoint() * self.0 - Matrix3::identity()).norm() <= tol
    }

    /// Column `level` of the operator, i.e. the image of that basis state.
    pub fn column(&self, level: Level) -> [C64; 3] {
        let c = self.0.column(level.index());
        [c[0], c[1], c[2]]
    }

    /// Applies the operator without renormalizing.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector::from_vector_unchecked(self.0 * psi.0)
    }
}

impl Add for Operator3 {
    type Output = Operator3;
    fn add(self, rhs: Operator3) -> Operator3 {
        Operator3(self.0 + rhs.0)
    }
}

impl Sub for Operator3 {
    type Output = Operator3;
    fn sub(self, rhs: Operator3) -> Operator3 {
        Operator3(self.0 - rhs.0)
    }
}

impl Mul for Operator3 {
    type Output = Operator3;
    fn mul(self, rhs: Operator3) -> Operator3 {
        Operator3(self.0 * rhs.0)
    }
}

impl Mul<f64> for Operator3 {
    type Output = Operator3;
    fn mul(self, rhs: f64) -> Operator3 {
        Operator3(self.0 * C64::from(rhs))
    }
}

impl fmt::Display for Operator3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..3 {
            let row: Vec<String> = (0..3)
                .map(|c| {
                    let z = self.0[(r, c)];
                    format!("{:+.6e}{:+.6e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `exp(-i H dt)` for Hermitian `H`, via eigendecomposition.
pub fn expm_hermitian(h: &Operator3, dt: f64) -> Result<Operator3> {
    if !dt.is_finite() {
        return Err(Error::validation(format!("time step {dt} is not finite")));
    }
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::validation("generator is not Hermitian"));
    }
    Ok(Operator3(exp_step(&h.0, dt)))
}

/// Unchecked kernel of [`expm_hermitian`]. Only the lower triangle of `h` is
/// read.
pub(crate) fn exp_step(h: &Matrix3<C64>, dt: f64) -> Matrix3<C64> {
    let eig = h.symmetric_eigen();
    let v = eig.eigenvectors;
    let phases = eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * dt));
    let mut scaled = v;
    for c in 0..3 {
        let p = phases[c];
        for r in 0..3 {
            scaled[(r, c)] *= p;
        }
    }
    scaled * v.adjoint()
}
