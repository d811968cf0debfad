//! Truncated Fock space of a single oscillator mode: ladder operators,
//! states, expectation values and functions of Hermitian operators.

mod eigen;
mod state;

pub use eigen::{hermitian_eig, matrix_function, unitary_evolve, HermitianEigensystem};
pub use state::{MixedRepr, MixedState, PureState, State};

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance for treating an operator as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Levels `|0⟩ … |dim−1⟩` of the oscillator together with the tail mass
/// above which results computed in this space are flagged unreliable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpace {
    dim: usize,
    tail_tol: f64,
}

impl FockSpace {
    pub const DEFAULT_DIM: usize = 128;
    pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

    pub fn new(dim: usize) -> Result<Self> {
        Self::with_tail_tol(dim, Self::DEFAULT_TAIL_TOL)
    }

    pub fn with_tail_tol(dim: usize, tail_tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSpace(format!("dim must be at least 2, got {dim}")));
        }
        if !(0.0..1.0).contains(&tail_tol) {
            return Err(Error::InvalidSpace(format!("tail_tol must lie in [0, 1), got {tail_tol}")));
        }
        Ok(FockSpace { dim, tail_tol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Number of top levels whose population counts as tail mass (10%, at least one).
    pub fn tail_levels(&self) -> usize {
        self.dim.div_ceil(10).max(1)
    }

    /// Probability mass on the top decile of levels.
    pub fn tail_mass(&self, populations: &[f64]) -> f64 {
        let start = self.dim - self.tail_levels();
        populations[start..].iter().sum()
    }

    pub(crate) fn check(&self, other: &FockSpace) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn zero(&self) -> Operator {
        Operator { space: *self, m: CMatrix::zeros(self.dim, self.dim) }
    }

    pub fn identity(&self) -> Operator {
        Operator { space: *self, m: CMatrix::identity(self.dim, self.dim) }
    }

    /// `⟨n−1|a|n⟩ = √n`.
    pub fn annihilation(&self) -> Operator {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for n in 1..self.dim {
            m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        Operator { space: *self, m }
    }

    pub fn creation(&self) -> Operator {
        self.annihilation().adjoint()
    }

    pub fn number(&self) -> Operator {
        let diag = CVector::from_iterator(self.dim, (0..self.dim).map(|n| C64::new(n as f64, 0.0)));
        Operator { space: *self, m: CMatrix::from_diagonal(&diag) }
    }

    /// `x̂_φ = a e^{−iφ} + a† e^{iφ}`, normalized so that the vacuum variance is 1.
    pub fn quadrature(&self, phase: f64) -> Operator {
        let a = self.annihilation();
        let ad = self.creation();
        &a.scale(C64::from_polar(1.0, -phase)) + &ad.scale(C64::from_polar(1.0, phase))
    }
}

/// Dense operator on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    m: CMatrix,
}

impl Operator {
    pub fn from_matrix(space: FockSpace, m: CMatrix) -> Result<Self> {
        if m.nrows() != space.dim() || m.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: if m.nrows() != space.dim() { m.nrows() } else { m.ncols() },
            });
        }
        Ok(Operator { space, m })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn adjoint(&self) -> Operator {
        Operator { space: self.space, m: self.m.adjoint() }
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator { space: self.space, m: &self.m * c }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.m * v
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// `f†f`, symmetrized so the result is Hermitian to the last bit.
    pub fn gram(&self) -> Operator {
        let g = self.m.adjoint() * &self.m;
        Operator { space: self.space, m: hermitize(&g) }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    pub(crate) fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation: self.hermitian_deviation() })
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn same_space(a: &Operator, b: &Operator) {
    assert_eq!(a.space.dim, b.space.dim, "operators act on Fock spaces of different dimension");
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        same_space(self, rhs);
        Operator { space: self.space, m: &self.m + &rhs.m }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        same_space(self, rhs);
        Operator { space: self.space, m: &self.m - &rhs.m }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        same_space(self, rhs);
        Operator { space: self.space, m: &self.m * &rhs.m }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { space: self.space, m: -&self.m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn space_validation() {
        assert!(FockSpace::new(1).is_err());
        assert!(FockSpace::with_tail_tol(4, 1.0).is_err());
        assert!(FockSpace::with_tail_tol(4, -1e-3).is_err());
        let s = FockSpace::new(128).unwrap();
        assert_eq!(s.tail_levels(), 13);
        assert_eq!(FockSpace::new(2).unwrap().tail_levels(), 1);
    }

    #[test]
    fn ladder_matrix_elements() {
        let s = FockSpace::new(3).unwrap();
        let a = s.annihilation();
        let m = a.matrix();
        for i in 0..3 {
            for j in 0..3 {
                let expected = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 2) => 2f64.sqrt(),
                    _ => 0.0,
                };
                assert_eq!(m[(i, j)], c(expected));
            }
        }
        let vac = CVector::from_vec(vec![c(1.0), c(0.0), c(0.0)]);
        assert!(a.apply(&vac).iter().all(|z| *z == C64::new(0.0, 0.0)));
        let one = s.creation().apply(&vac);
        assert_eq!(one, CVector::from_vec(vec![c(0.0), c(1.0), c(0.0)]));
    }

    #[test]
    fn creation_is_exact_adjoint_and_number_diagonal() {
        let s = FockSpace::new(6).unwrap();
        assert_eq!(s.creation().matrix(), &s.annihilation().matrix().adjoint());
        let n = FockSpace::new(4).unwrap().number();
        let d: Vec<f64> = n.matrix().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![0.0, 1.0, 2.0, 3.0]);
        let adag_a = &s.creation() * &s.annihilation();
        for k in 0..6 {
            assert!((adag_a.matrix()[(k, k)] - c(k as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn truncated_commutator_has_corner_defect() {
        let dim = 7;
        let s = FockSpace::new(dim).unwrap();
        let comm = s.annihilation().commutator(&s.creation());
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i != j {
                    0.0
                } else if i < dim - 1 {
                    1.0
                } else {
                    -((dim - 1) as f64)
                };
                assert!((comm.matrix()[(i, j)] - c(expected)).norm() < 1e-13, "({i},{j})");
            }
        }
        // (√n)² rounds, so the lower block is the identity to a few ulp
        for i in 0..dim - 1 {
            assert!((comm.matrix()[(i, i)] - c(1.0)).norm() <= 4.0 * f64::EPSILON * dim as f64);
        }
    }

    #[test]
    fn quadrature_identities() {
        let s = FockSpace::new(2).unwrap();
        let x = s.quadrature(0.0);
        assert_eq!(x.matrix()[(0, 1)], c(1.0));
        assert_eq!(x.matrix()[(1, 0)], c(1.0));
        assert_eq!(x.matrix()[(0, 0)], c(0.0));
        let s = FockSpace::new(9).unwrap();
        for &phi in &[0.0, 0.3, 1.0, 2.5] {
            let x = s.quadrature(phi);
            let y = s.quadrature(phi + std::f64::consts::PI);
            assert!(x.is_hermitian());
            let diff = (&x + &y).max_abs();
            assert!(diff < 1e-15, "{diff}");
        }
    }

    #[test]
    fn operator_shape_checked() {
        let s = FockSpace::new(3).unwrap();
        assert!(Operator::from_matrix(s, CMatrix::zeros(3, 4)).is_err());
        assert!(Operator::from_matrix(s, CMatrix::zeros(3, 3)).is_ok());
    }

    #[test]
    fn hermiticity_detection() {
        let s = FockSpace::new(4).unwrap();
        assert!(!s.annihilation().is_hermitian());
        assert!(s.number().is_hermitian());
        assert!(s.annihilation().gram().is_hermitian());
    }
}
