//! The lattice of outcome propositions over a fixed orthonormal basis.
//!
//! A complete set of commuting observables fixes a simultaneous eigenbasis
//! indexed by value tuples; a proposition is a finite set of those tuples.
//! Within the fixed basis the lattice is Boolean, propositions are stored as
//! index sets (so meet, join and complement are exact set operations with no
//! float drift), and projectors are materialized on demand as diagonal 0/1
//! matrices.
//!
//! [`meet_limit`] also implements the general projector-limit formula
//! lim_k (Π₁Π₂)^k for arbitrary, possibly non-commuting projectors.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::linalg::{hermitian_eigen, LinalgError, Matrix, Operator, Projector, StateVector};
use crate::CONDITION_EPS;

#[derive(Debug, Clone, PartialEq)]
pub enum LogicError {
    /// The propositions refer to different outcome bases.
    BasisMismatch,
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    EmptyValueList {
        observable: usize,
    },
    DuplicateValue {
        observable: usize,
        value: i64,
    },
    UnknownTuple,
    IndexOutOfRange {
        index: usize,
        dim: usize,
    },
    ConditionUndefined {
        probability: f64,
    },
    /// The projector power iteration did not settle within the cap.
    NonConvergence {
        iterations: usize,
        residual: f64,
    },
    Linalg(LinalgError),
}

impl fmt::Display for LogicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicError::BasisMismatch => f.write_str("propositions belong to different bases"),
            LogicError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LogicError::EmptyValueList { observable } => {
                write!(f, "observable {observable} has an empty value list")
            }
            LogicError::DuplicateValue { observable, value } => {
                write!(f, "observable {observable} lists value {value} twice")
            }
            LogicError::UnknownTuple => f.write_str("value tuple not in the basis"),
            LogicError::IndexOutOfRange { index, dim } => {
                write!(f, "tuple index {index} out of range for basis of size {dim}")
            }
            LogicError::ConditionUndefined { probability } => write!(
                f,
                "conditioning proposition has probability {probability:e} below threshold"
            ),
            LogicError::NonConvergence { iterations, residual } => write!(
                f,
                "projector limit did not converge in {iterations} iterations (residual {residual:e})"
            ),
            LogicError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LogicError {}

impl From<LinalgError> for LogicError {
    fn from(e: LinalgError) -> Self {
        LogicError::Linalg(e)
    }
}

/// Simultaneous eigenbasis of n commuting observables, indexed by value
/// tuples (r₁, …, r_n). Tuple enumeration follows the crate's tensor
/// convention: the first observable is the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeBasis {
    values: Vec<Vec<i64>>,
}

impl OutcomeBasis {
    pub fn new(values: Vec<Vec<i64>>) -> Result<Self, LogicError> {
        if values.is_empty() {
            return Err(LogicError::EmptyValueList { observable: 0 });
        }
        for (k, list) in values.iter().enumerate() {
            if list.is_empty() {
                return Err(LogicError::EmptyValueList { observable: k });
            }
            for (i, v) in list.iter().enumerate() {
                if list[..i].contains(v) {
                    return Err(LogicError::DuplicateValue {
                        observable: k,
                        value: *v,
                    });
                }
            }
        }
        Ok(OutcomeBasis { values })
    }

    pub fn observables(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self, observable: usize) -> &[i64] {
        &self.values[observable]
    }

    /// Number of simultaneous eigenvectors (the Hilbert dimension).
    pub fn dim(&self) -> usize {
        self.values.iter().map(Vec::len).product()
    }

    pub fn tuple_index(&self, tuple: &[i64]) -> Result<usize, LogicError> {
        if tuple.len() != self.values.len() {
            return Err(LogicError::UnknownTuple);
        }
        let mut flat = 0;
        for (list, v) in self.values.iter().zip(tuple) {
            let pos = list
                .iter()
                .position(|x| x == v)
                .ok_or(LogicError::UnknownTuple)?;
            flat = flat * list.len() + pos;
        }
        Ok(flat)
    }

    pub fn tuple_at(&self, mut flat: usize) -> Vec<i64> {
        let mut out = vec![0; self.values.len()];
        for k in (0..self.values.len()).rev() {
            let len = self.values[k].len();
            out[k] = self.values[k][flat % len];
            flat /= len;
        }
        out
    }
}

/// A finite set of value tuples of one basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposition {
    basis: OutcomeBasis,
    support: BTreeSet<usize>,
}

impl Proposition {
    pub fn empty(basis: OutcomeBasis) -> Self {
        Proposition {
            basis,
            support: BTreeSet::new(),
        }
    }

    /// The unit proposition (full support).
    pub fn unit(basis: OutcomeBasis) -> Self {
        let support = (0..basis.dim()).collect();
        Proposition { basis, support }
    }

    pub fn from_indices(
        basis: OutcomeBasis,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self, LogicError> {
        let dim = basis.dim();
        let mut support = BTreeSet::new();
        for i in indices {
            if i >= dim {
                return Err(LogicError::IndexOutOfRange { index: i, dim });
            }
            support.insert(i);
        }
        Ok(Proposition { basis, support })
    }

    pub fn from_tuples(basis: OutcomeBasis, tuples: &[Vec<i64>]) -> Result<Self, LogicError> {
        let mut support = BTreeSet::new();
        for t in tuples {
            support.insert(basis.tuple_index(t)?);
        }
        Ok(Proposition { basis, support })
    }

    pub fn basis(&self) -> &OutcomeBasis {
        &self.basis
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn cardinality(&self) -> usize {
        self.support.len()
    }

    fn same_basis(&self, other: &Proposition) -> Result<(), LogicError> {
        if self.basis != other.basis {
            return Err(LogicError::BasisMismatch);
        }
        Ok(())
    }

    /// Conjunction: set intersection of supports.
    pub fn meet(&self, other: &Proposition) -> Result<Proposition, LogicError> {
        self.same_basis(other)?;
        Ok(Proposition {
            basis: self.basis.clone(),
            support: self.support.intersection(&other.support).copied().collect(),
        })
    }

    /// Disjunction: set union of supports.
    pub fn join(&self, other: &Proposition) -> Result<Proposition, LogicError> {
        self.same_basis(other)?;
        Ok(Proposition {
            basis: self.basis.clone(),
            support: self.support.union(&other.support).copied().collect(),
        })
    }

    /// Negation: set complement of the support.
    pub fn complement(&self) -> Proposition {
        let support = (0..self.basis.dim())
            .filter(|i| !self.support.contains(i))
            .collect();
        Proposition {
            basis: self.basis.clone(),
            support,
        }
    }

    pub fn implies(&self, other: &Proposition) -> Result<bool, LogicError> {
        self.same_basis(other)?;
        Ok(self.support.is_subset(&other.support))
    }

    pub fn is_disjoint(&self, other: &Proposition) -> Result<bool, LogicError> {
        self.same_basis(other)?;
        Ok(self.support.is_disjoint(&other.support))
    }

    /// The diagonal 0/1 projector Σ_{r̄ ∈ Δ} |r̄⟩⟨r̄|; rank = |support|.
    pub fn projector(&self) -> Projector {
        Projector::diagonal(self.basis.dim(), self.support.iter().copied())
    }
}

/// Both distributive laws of a triple, checked as exact set identities.
pub fn distributive(
    p1: &Proposition,
    p2: &Proposition,
    p3: &Proposition,
) -> Result<bool, LogicError> {
    let a = p1.meet(&p2.join(p3)?)?;
    let b = p1.meet(p2)?.join(&p1.meet(p3)?)?;
    let c = p1.join(&p2.meet(p3)?)?;
    let d = p1.join(p2)?.meet(&p1.join(p3)?)?;
    Ok(a == b && c == d)
}

const MEET_LIMIT_CAP: usize = 10_000;
const MEET_LIMIT_TOL: f64 = 1e-12;

/// lim_{k→∞} (P₁P₂)^k for arbitrary projectors: the projector onto
/// range(P₁) ∩ range(P₂).
///
/// Iterates X ← X·(P₁P₂) until the Frobenius increment is ≤ 1e-12 (or errors
/// at the iteration cap), then Hermitizes the fixed point and rounds its
/// eigenvalues to 0/1. Commuting inputs settle after one multiplication.
pub fn meet_limit(p1: &Projector, p2: &Projector) -> Result<Projector, LogicError> {
    if p1.total_dim() != p2.total_dim() {
        return Err(LogicError::DimensionMismatch {
            expected: p1.total_dim(),
            got: p2.total_dim(),
        });
    }
    let step = p1.matrix().mul(p2.matrix());
    let mut x = step.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..MEET_LIMIT_CAP {
        let next = x.mul(&step);
        residual = next.frobenius_distance(&x);
        x = next;
        if residual <= MEET_LIMIT_TOL {
            break;
        }
    }
    if residual > MEET_LIMIT_TOL {
        return Err(LogicError::NonConvergence {
            iterations: MEET_LIMIT_CAP,
            residual,
        });
    }
    // Finite powers of Π₁Π₂ are not Hermitian; the limit is. Hermitize and
    // round the spectrum to rebuild an exact projector.
    let h = x.hermitian_part();
    let eig = hermitian_eigen(&h);
    let n = h.rows();
    let mut rounded = Matrix::zeros(n, n);
    for (k, lambda) in eig.values.iter().enumerate() {
        if *lambda >= 0.5 {
            let col: Vec<Complex64> = (0..n).map(|i| eig.vectors.get(i, k)).collect();
            rounded = rounded.add(&Matrix::outer(&col, &col));
        }
    }
    let op = Operator::new(p1.dims().to_vec(), rounded)?;
    Projector::new(op).map_err(LogicError::Linalg)
}

/// I − lim_k [(I−Π₁)(I−Π₂)]^k: the projector onto range(P₁) + range(P₂), by
/// the same limit construction applied to the complements.
pub fn join_limit(p1: &Projector, p2: &Projector) -> Result<Projector, LogicError> {
    let q = meet_limit(&p1.complement(), &p2.complement())?;
    Ok(q.complement())
}

/// Born probability of a proposition: Σ_{r̄ ∈ Δ} |⟨r̄|ψ⟩|².
pub fn probability(state: &StateVector, p: &Proposition) -> Result<f64, LogicError> {
    if state.total_dim() != p.basis.dim() {
        return Err(LogicError::DimensionMismatch {
            expected: p.basis.dim(),
            got: state.total_dim(),
        });
    }
    Ok(p.support
        .iter()
        .map(|&i| state.amplitude(i).norm_sqr())
        .sum())
}

/// Pr(p_j | p_i) = Pr(p_j ∧ p_i) / Pr(p_i), defined when Pr(p_i) is at least
/// [`CONDITION_EPS`].
pub fn conditional_probability(
    state: &StateVector,
    p_j: &Proposition,
    p_i: &Proposition,
) -> Result<f64, LogicError> {
    let denom = probability(state, p_i)?;
    if denom < CONDITION_EPS {
        return Err(LogicError::ConditionUndefined { probability: denom });
    }
    let joint = probability(state, &p_j.meet(p_i)?)?;
    Ok((joint / denom).clamp(0.0, 1.0))
}

/// Worst violations of the Kolmogorov conditions (non-negativity, finite
/// additivity on disjoint pairs, unit normalization) for [`probability`] and
/// for [`conditional_probability`] with each sufficiently probable sample
/// member as the conditioner.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub nonnegativity: f64,
    pub additivity: f64,
    pub unit: f64,
    pub conditional_nonnegativity: f64,
    pub conditional_additivity: f64,
    pub conditional_unit: f64,
    pub disjoint_pairs: usize,
    pub conditioners: usize,
}

impl AxiomReport {
    pub fn max_violation(&self) -> f64 {
        self.nonnegativity
            .max(self.additivity)
            .max(self.unit)
            .max(self.conditional_nonnegativity)
            .max(self.conditional_additivity)
            .max(self.conditional_unit)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_violation() <= tolerance
    }
}

pub fn check_axioms(
    state: &StateVector,
    basis: &OutcomeBasis,
    sample: &[Proposition],
) -> Result<AxiomReport, LogicError> {
    if state.total_dim() != basis.dim() {
        return Err(LogicError::DimensionMismatch {
            expected: basis.dim(),
            got: state.total_dim(),
        });
    }
    for p in sample {
        if p.basis != *basis {
            return Err(LogicError::BasisMismatch);
        }
    }
    let unit = Proposition::unit(basis.clone());

    let mut report = AxiomReport {
        nonnegativity: 0.0,
        additivity: 0.0,
        unit: (probability(state, &unit)? - 1.0).abs(),
        conditional_nonnegativity: 0.0,
        conditional_additivity: 0.0,
        conditional_unit: 0.0,
        disjoint_pairs: 0,
        conditioners: 0,
    };

    for p in sample {
        let pr = probability(state, p)?;
        report.nonnegativity = report.nonnegativity.max((-pr).max(0.0));
    }
    for (i, p) in sample.iter().enumerate() {
        for q in &sample[i + 1..] {
            if !p.is_disjoint(q)? {
                continue;
            }
            report.disjoint_pairs += 1;
            let sum = probability(state, p)? + probability(state, q)?;
            let joined = probability(state, &p.join(q)?)?;
            report.additivity = report.additivity.max((joined - sum).abs());
        }
    }

    for cond in sample {
        if probability(state, cond)? < CONDITION_EPS {
            continue;
        }
        report.conditioners += 1;
        report.conditional_unit = report
            .conditional_unit
            .max((conditional_probability(state, &unit, cond)? - 1.0).abs());
        for p in sample {
            let pr = conditional_probability(state, p, cond)?;
            report.conditional_nonnegativity = report.conditional_nonnegativity.max((-pr).max(0.0));
        }
        for (i, p) in sample.iter().enumerate() {
            for q in &sample[i + 1..] {
                if !p.is_disjoint(q)? {
                    continue;
                }
                let sum = conditional_probability(state, p, cond)?
                    + conditional_probability(state, q, cond)?;
                let joined = conditional_probability(state, &p.join(q)?, cond)?;
                report.conditional_additivity =
                    report.conditional_additivity.max((joined - sum).abs());
            }
        }
    }

    Ok(report)
}
