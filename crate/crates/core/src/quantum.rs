//! Dense complex linear algebra for small Hilbert spaces (dimension <= 16):
//! pure states, Kronecker products, projectors, Born probabilities, Lüders
//! collapse and evolution under `U(t) = exp(-i H t)`.
//!
//! Tensor indexing is row-major: the basis vector `e_i (x) e_j` sits at index
//! `i * dim(b) + j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ImpossibleOutcome, MeasurementError, ValidationError};

pub type C64 = Complex<f64>;

/// Tolerance for structural checks (normalization, Hermiticity, idempotence).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for checks after time evolution.
pub const DYNAMICAL_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    /// Fails unless the vector is nonempty with norm 1 within
    /// [`STRUCTURAL_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, ValidationError> {
        if amplitudes.is_empty() {
            return Err(ValidationError::ZeroDimension);
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(ValidationError::NotNormalized(norm));
        }
        Ok(StateVector(v))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self, ValidationError> {
        Self::new(amplitudes.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalize(amplitudes: Vec<C64>) -> Result<Self, ValidationError> {
        if amplitudes.is_empty() {
            return Err(ValidationError::ZeroDimension);
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm <= STRUCTURAL_TOL {
            return Err(ValidationError::NotNormalized(norm));
        }
        Ok(StateVector(v.unscale(norm)))
    }

    /// The computational basis vector `e_{index+1}` of `C^dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut v = DVector::zeros(dim);
        v[index] = c(1.0, 0.0);
        StateVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        (&self.0 - &other.0).norm()
    }

    /// Distance after removing the relative global phase.
    pub fn ray_distance(&self, other: &StateVector) -> f64 {
        let ip = self.inner(other);
        if ip.norm() == 0.0 {
            return self.distance(other);
        }
        let phase = ip / ip.norm();
        (&self.0 * phase - &other.0).norm()
    }
}

/// `a (x) b`
pub fn tensor_state(a: &StateVector, b: &StateVector) -> Result<StateVector, ValidationError> {
    if a.dim() == 0 || b.dim() == 0 {
        return Err(ValidationError::ZeroDimension);
    }
    Ok(StateVector(a.0.kronecker(&b.0)))
}

/// A square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self, ValidationError> {
        if m.nrows() == 0 {
            return Err(ValidationError::ZeroDimension);
        }
        if m.nrows() != m.ncols() {
            return Err(ValidationError::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
        }
        Ok(Operator(m))
    }

    /// Builds a `dim x dim` operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self, ValidationError> {
        if entries.len() != dim * dim {
            return Err(ValidationError::DimensionMismatch { expected: dim * dim, actual: entries.len() });
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Operator(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Operator(DMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x, 0.0)))))
    }

    /// `|v><v|` scaled by `weight`.
    pub fn outer(v: &StateVector, weight: f64) -> Self {
        Operator(&v.0 * v.0.adjoint() * c(weight, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Operator {
        Operator(self.0.adjoint())
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator, ValidationError> {
        self.check_dim(other.dim())?;
        Ok(Operator(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator, ValidationError> {
        self.check_dim(other.dim())?;
        Ok(Operator(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator, ValidationError> {
        self.check_dim(other.dim())?;
        Ok(Operator(&self.0 - &other.0))
    }

    /// Applies the operator; the result need not be normalized.
    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>, ValidationError> {
        self.check_dim(psi.dim())?;
        Ok(&self.0 * &psi.0)
    }

    /// Applies an operator known to be unitary.
    pub fn apply_unitary(&self, psi: &StateVector) -> Result<StateVector, ValidationError> {
        Ok(StateVector(self.apply(psi)?))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Operator) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_deviation(&self.adjoint())
    }

    /// `max |U^dagger U - 1|`
    pub fn unitarity_error(&self) -> f64 {
        Operator(self.0.adjoint() * &self.0).max_deviation(&Operator::identity(self.dim()))
    }

    pub fn commutator_norm(&self, other: &Operator) -> f64 {
        Operator(&self.0 * &other.0).max_deviation(&Operator(&other.0 * &self.0))
    }

    fn check_dim(&self, dim: usize) -> Result<(), ValidationError> {
        if dim != self.dim() {
            return Err(ValidationError::DimensionMismatch { expected: self.dim(), actual: dim });
        }
        Ok(())
    }
}

/// `a (x) b`, indexed consistently with [`tensor_state`].
pub fn tensor_operator(a: &Operator, b: &Operator) -> Operator {
    Operator(a.0.kronecker(&b.0))
}

/// An orthogonal projector: Hermitian and idempotent within
/// [`STRUCTURAL_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorOperator(Operator);

impl ProjectorOperator {
    pub fn new(op: Operator) -> Result<Self, ValidationError> {
        let herm = op.hermiticity_error();
        if herm > STRUCTURAL_TOL {
            return Err(ValidationError::NotHermitian(herm));
        }
        let idem = op.max_deviation(&Operator(&op.0 * &op.0));
        if idem > STRUCTURAL_TOL {
            return Err(ValidationError::NotProjector(idem));
        }
        Ok(ProjectorOperator(op))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `1 - P`
    pub fn complement(&self) -> ProjectorOperator {
        ProjectorOperator(Operator(DMatrix::identity(self.dim(), self.dim()) - &self.0 .0))
    }
}

/// `||P psi||^2`
pub fn born_probability(p: &ProjectorOperator, psi: &StateVector) -> Result<f64, ValidationError> {
    Ok(p.0.apply(psi)?.norm_squared())
}

/// Lüders collapse `P psi / ||P psi||`.
pub fn collapse(p: &ProjectorOperator, psi: &StateVector) -> Result<StateVector, MeasurementError> {
    let projected = p.0.apply(psi)?;
    let prob = projected.norm_squared();
    if prob <= STRUCTURAL_TOL {
        return Err(ImpossibleOutcome { outcome: "projector".into(), probability: prob }.into());
    }
    Ok(StateVector(projected.unscale(prob.sqrt())))
}

/// A Hermitian operator with its spectral decomposition `H = V diag(w) V^dagger`.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    op: Operator,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(op: Operator) -> Result<Self, ValidationError> {
        let herm = op.hermiticity_error();
        if herm > STRUCTURAL_TOL {
            return Err(ValidationError::NotHermitian(herm));
        }
        // symmetrize so the solver sees an exactly Hermitian input
        let sym = (&op.0 + op.0.adjoint()).unscale(2.0);
        let eig = sym.clone().symmetric_eigen();
        Ok(HermitianOperator {
            op: Operator(sym),
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    /// `sum_m theta_m |v_m><v_m|` for orthonormal `v_m`.
    pub fn from_spectrum(pairs: &[(f64, StateVector)]) -> Result<Self, ValidationError> {
        let dim = pairs.first().map(|(_, v)| v.dim()).ok_or(ValidationError::ZeroDimension)?;
        let mut m = DMatrix::zeros(dim, dim);
        for (theta, v) in pairs {
            if v.dim() != dim {
                return Err(ValidationError::DimensionMismatch { expected: dim, actual: v.dim() });
            }
            m += Operator::outer(v, *theta).0;
        }
        Self::new(Operator(m))
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(Operator::zeros(dim)).expect("zero is Hermitian")
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `k` is the eigenvector of `eigenvalues()[k]`.
    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    /// `U(t) = V diag(exp(-i w t)) V^dagger`
    pub fn propagator(&self, t: f64) -> Operator {
        let phases = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&w| Complex::from_polar(1.0, -w * t)),
        );
        let v = &self.eigenvectors;
        Operator(v * DMatrix::from_diagonal(&phases) * v.adjoint())
    }

    pub fn evolve(&self, t: f64, psi: &StateVector) -> Result<StateVector, ValidationError> {
        self.op.check_dim(psi.dim())?;
        let v = &self.eigenvectors;
        let mut coeffs = v.adjoint() * &psi.0;
        for (a, &w) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *a *= Complex::from_polar(1.0, -w * t);
        }
        Ok(StateVector(v * coeffs))
    }
}

/// `exp(-i H t) psi` via the eigendecomposition of `H`.
pub fn evolve(h: &HermitianOperator, t: f64, psi: &StateVector) -> Result<StateVector, ValidationError> {
    h.evolve(t, psi)
}

fn pair_of(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.0.iter().map(pair_of).collect();
        v.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        StateVector::new(v.into_iter().map(|[re, im]| c(re, im)).collect()).map_err(D::Error::custom)
    }
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self.0.row_iter().map(|r| r.iter().map(pair_of).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let dim = rows.len();
        let entries: Vec<C64> = rows.iter().flatten().map(|&[re, im]| c(re, im)).collect();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(D::Error::custom("operator rows must form a square matrix"));
        }
        Operator::from_rows(dim, &entries).map_err(D::Error::custom)
    }
}
