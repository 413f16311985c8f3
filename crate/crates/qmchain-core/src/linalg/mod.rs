//! Dense complex linear algebra over small tensor-product Hilbert spaces.
//!
//! Index convention, fixed here and relied on by every other module: the flat
//! index of a tuple (i₀, …, i_{k−1}) over factor dimensions (d₀, …, d_{k−1})
//! is i₀·d₁⋯d_{k−1} + i₁·d₂⋯d_{k−1} + ⋯ + i_{k−1}, i.e. the left factor is
//! the most significant digit. Tensor products of states and operators, lifts
//! and partial traces all follow it.

mod eigen;
mod matrix;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use matrix::Matrix;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::STRUCT_TOL;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinalgError {
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    SlotOutOfRange {
        slot: usize,
        factors: usize,
    },
    EmptyDims,
    ZeroDimension {
        slot: usize,
    },
    NotNormalized {
        norm: f64,
    },
    NotHermitian {
        residual: f64,
    },
    NotIdempotent {
        residual: f64,
    },
    NotPositive {
        min_eigenvalue: f64,
    },
    TraceNotOne {
        trace: f64,
    },
    /// A quantity that must be real carried an imaginary residue above
    /// tolerance; this indicates a logic bug, not rounding.
    ImaginaryResidue {
        value: f64,
    },
    RaggedRows {
        row: usize,
    },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LinalgError::SlotOutOfRange { slot, factors } => {
                write!(f, "slot {slot} out of range for {factors} tensor factors")
            }
            LinalgError::EmptyDims => write!(f, "factor dimension list is empty"),
            LinalgError::ZeroDimension { slot } => {
                write!(f, "factor dimension at slot {slot} is zero")
            }
            LinalgError::NotNormalized { norm } => {
                write!(f, "state vector norm {norm:e} is not 1 within tolerance")
            }
            LinalgError::NotHermitian { residual } => {
                write!(f, "hermiticity residual {residual:e} above tolerance")
            }
            LinalgError::NotIdempotent { residual } => {
                write!(f, "idempotency residual {residual:e} above tolerance")
            }
            LinalgError::NotPositive { min_eigenvalue } => {
                write!(
                    f,
                    "minimum eigenvalue {min_eigenvalue:e} below positivity floor"
                )
            }
            LinalgError::TraceNotOne { trace } => {
                write!(f, "trace {trace:e} is not 1 within tolerance")
            }
            LinalgError::ImaginaryResidue { value } => {
                write!(f, "imaginary residue {value:e} above tolerance")
            }
            LinalgError::RaggedRows { row } => {
                write!(f, "matrix row {row} has a different length than row 0")
            }
        }
    }
}

impl core::error::Error for LinalgError {}

fn check_dims(dims: &[usize]) -> Result<(), LinalgError> {
    if dims.is_empty() {
        return Err(LinalgError::EmptyDims);
    }
    if let Some(slot) = dims.iter().position(|&d| d == 0) {
        return Err(LinalgError::ZeroDimension { slot });
    }
    Ok(())
}

/// Flat index of a multi-index under the left-most-significant convention.
pub fn composite_index(dims: &[usize], indices: &[usize]) -> usize {
    assert_eq!(dims.len(), indices.len(), "index arity mismatch");
    let mut flat = 0;
    for (d, i) in dims.iter().zip(indices) {
        debug_assert!(i < d);
        flat = flat * d + i;
    }
    flat
}

/// Inverse of [`composite_index`].
pub fn split_index(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
    out
}

/// Normalized complex amplitude vector over a tensor-product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Checked constructor: the amplitude count must match the factor
    /// dimensions and the 2-norm must be 1 within [`STRUCT_TOL`].
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self, LinalgError> {
        check_dims(&dims)?;
        let expected: usize = dims.iter().product();
        if amps.len() != expected {
            return Err(LinalgError::DimensionMismatch {
                expected,
                got: amps.len(),
            });
        }
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STRUCT_TOL {
            return Err(LinalgError::NotNormalized { norm });
        }
        Ok(StateVector { dims, amps })
    }

    /// Skips the norm check; the caller guarantees normalization (or, in
    /// negative-control tests, deliberately breaks it).
    pub fn new_unchecked(dims: Vec<usize>, amps: Vec<Complex64>) -> Self {
        let expected: usize = dims.iter().product();
        assert_eq!(amps.len(), expected, "amplitude count mismatch");
        StateVector { dims, amps }
    }

    /// Rescale an arbitrary nonzero vector to unit norm.
    pub fn normalized(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self, LinalgError> {
        check_dims(&dims)?;
        let expected: usize = dims.iter().product();
        if amps.len() != expected {
            return Err(LinalgError::DimensionMismatch {
                expected,
                got: amps.len(),
            });
        }
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(LinalgError::NotNormalized { norm });
        }
        let amps = amps.into_iter().map(|a| a.unscale(norm)).collect();
        Ok(StateVector { dims, amps })
    }

    /// Computational basis state |index⟩ of a single factor.
    pub fn basis(dim: usize, index: usize) -> Result<Self, LinalgError> {
        if index >= dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            dims: vec![dim],
            amps,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, flat: usize) -> Complex64 {
        self.amps[flat]
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, LinalgError> {
        if self.total_dim() != other.total_dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.total_dim(),
                got: other.total_dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product; `self` becomes the most significant factor block.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector { dims, amps }
    }
}

/// Square complex matrix acting on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    matrix: Matrix,
}

impl Operator {
    pub fn new(dims: Vec<usize>, matrix: Matrix) -> Result<Self, LinalgError> {
        check_dims(&dims)?;
        let side: usize = dims.iter().product();
        if !matrix.is_square() || matrix.rows() != side {
            return Err(LinalgError::DimensionMismatch {
                expected: side,
                got: matrix.rows(),
            });
        }
        Ok(Operator { dims, matrix })
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let side: usize = dims.iter().product();
        Operator {
            dims,
            matrix: Matrix::identity(side),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// Kronecker product with the same most-significant-left convention as
    /// [`StateVector::tensor`], so (A⊗B)(x⊗y) = (Ax)⊗(By).
    pub fn tensor(&self, other: &Operator) -> Operator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Operator {
            dims,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Embed `op` at position `slot` of a tensor-product space, identity on
    /// every other factor. Lifted operators at distinct slots commute.
    pub fn lift(op: &Operator, slot: usize, dims: &[usize]) -> Result<Operator, LinalgError> {
        check_dims(dims)?;
        if slot >= dims.len() {
            return Err(LinalgError::SlotOutOfRange {
                slot,
                factors: dims.len(),
            });
        }
        if op.total_dim() != dims[slot] {
            return Err(LinalgError::DimensionMismatch {
                expected: dims[slot],
                got: op.total_dim(),
            });
        }
        let left: usize = dims[..slot].iter().product();
        let right: usize = dims[slot + 1..].iter().product();
        let matrix = Matrix::identity(left)
            .kron(&op.matrix)
            .kron(&Matrix::identity(right));
        Ok(Operator {
            dims: dims.to_vec(),
            matrix,
        })
    }

    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        self.matrix.matvec(amps)
    }
}

/// Hermitian idempotent operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    op: Operator,
}

impl Projector {
    /// Checked constructor: ‖P − P†‖_F and ‖P² − P‖_F must both be within
    /// [`STRUCT_TOL`].
    pub fn new(op: Operator) -> Result<Self, LinalgError> {
        let herm = op.matrix().hermiticity_residual();
        if herm > STRUCT_TOL {
            return Err(LinalgError::NotHermitian { residual: herm });
        }
        let idem = op.matrix().idempotency_residual();
        if idem > STRUCT_TOL {
            return Err(LinalgError::NotIdempotent { residual: idem });
        }
        Ok(Projector { op })
    }

    /// For constructions that are projectors by construction (diagonal 0/1,
    /// tensor products and lifts of projectors).
    pub(crate) fn new_unchecked(op: Operator) -> Self {
        Projector { op }
    }

    /// Diagonal 0/1 projector on a single factor, supported on the given
    /// basis indices.
    pub fn diagonal(dim: usize, support: impl IntoIterator<Item = usize>) -> Projector {
        let mut m = Matrix::zeros(dim, dim);
        for i in support {
            assert!(i < dim, "support index out of range");
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        Projector {
            op: Operator {
                dims: vec![dim],
                matrix: m,
            },
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &Matrix {
        self.op.matrix()
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn total_dim(&self) -> usize {
        self.op.total_dim()
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        let t = self.op.matrix().trace().re;
        (t + 0.5) as usize
    }

    pub fn tensor(&self, other: &Projector) -> Projector {
        Projector {
            op: self.op.tensor(&other.op),
        }
    }

    pub fn lift(&self, slot: usize, dims: &[usize]) -> Result<Projector, LinalgError> {
        Operator::lift(&self.op, slot, dims).map(Projector::new_unchecked)
    }

    /// I − P.
    pub fn complement(&self) -> Projector {
        let id = Matrix::identity(self.total_dim());
        Projector {
            op: Operator {
                dims: self.op.dims.clone(),
                matrix: id.sub(self.op.matrix()),
            },
        }
    }
}

/// Born probability ⟨ψ|P|ψ⟩.
///
/// The imaginary part of the expectation must be at rounding level; anything
/// above [`STRUCT_TOL`] is reported as an error rather than silently dropped.
/// The real part is clamped to [0, 1].
pub fn born(state: &StateVector, projector: &Projector) -> Result<f64, LinalgError> {
    if projector.total_dim() != state.total_dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: state.total_dim(),
            got: projector.total_dim(),
        });
    }
    let y = projector.matrix().matvec(state.amplitudes());
    let mut val = Complex64::new(0.0, 0.0);
    for (a, b) in state.amplitudes().iter().zip(&y) {
        val += a.conj() * b;
    }
    if val.im.abs() > STRUCT_TOL {
        return Err(LinalgError::ImaginaryResidue { value: val.im });
    }
    Ok(val.re.clamp(0.0, 1.0))
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Matrix,
}

impl DensityOperator {
    /// Checked constructor: hermiticity within [`STRUCT_TOL`], eigenvalues
    /// ≥ −[`STRUCT_TOL`] (Hermitian eigensolver), trace 1 within
    /// [`STRUCT_TOL`].
    pub fn new(matrix: Matrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::DimensionMismatch {
                expected: matrix.rows(),
                got: matrix.cols(),
            });
        }
        let herm = matrix.hermiticity_residual();
        if herm > STRUCT_TOL {
            return Err(LinalgError::NotHermitian { residual: herm });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STRUCT_TOL || tr.im.abs() > STRUCT_TOL {
            return Err(LinalgError::TraceNotOne { trace: tr.re });
        }
        let eig = hermitian_eigen(&matrix);
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -STRUCT_TOL {
            return Err(LinalgError::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(DensityOperator { matrix })
    }

    /// |ψ⟩⟨ψ| of a normalized state.
    pub fn from_pure(state: &StateVector) -> Self {
        DensityOperator {
            matrix: Matrix::outer(state.amplitudes(), state.amplitudes()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `Tr[ρ²]`; 1 for pure states, 1/d for the maximally mixed state.
    pub fn purity(&self) -> f64 {
        let sq = self.matrix.mul(&self.matrix);
        sq.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).values
    }
}

/// Trace out every factor except `keep`; trace and positivity are preserved.
pub fn partial_trace(
    rho: &DensityOperator,
    dims: &[usize],
    keep: usize,
) -> Result<DensityOperator, LinalgError> {
    let m = partial_trace_matrix(rho.matrix(), dims, keep)?;
    DensityOperator::new(m)
}

pub(crate) fn partial_trace_matrix(
    m: &Matrix,
    dims: &[usize],
    keep: usize,
) -> Result<Matrix, LinalgError> {
    check_dims(dims)?;
    if keep >= dims.len() {
        return Err(LinalgError::SlotOutOfRange {
            slot: keep,
            factors: dims.len(),
        });
    }
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(LinalgError::DimensionMismatch {
            expected: total,
            got: m.rows(),
        });
    }
    let dk = dims[keep];
    let stride: usize = dims[keep + 1..].iter().product();
    let rest = total / dk;
    let mut out = Matrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..rest {
                let low = r % stride;
                let high = r / stride;
                let i = high * dk * stride + a * stride + low;
                let j = high * dk * stride + b * stride + low;
                acc += m.get(i, j);
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// T(ρ, σ) = ½‖ρ − σ‖₁, evaluated from the eigenvalues of the Hermitian
/// difference.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let diff = a.matrix().sub(b.matrix());
    let eig = hermitian_eigen(&diff);
    Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryCheck {
    pub residual: f64,
    pub pass: bool,
}

/// ‖V†V − I‖_F and pass/fail at [`STRUCT_TOL`].
pub fn is_isometry(v: &Matrix) -> IsometryCheck {
    let g = v.adjoint().mul(v);
    let residual = g.frobenius_distance(&Matrix::identity(v.cols()));
    IsometryCheck {
        residual,
        pass: residual <= STRUCT_TOL,
    }
}
