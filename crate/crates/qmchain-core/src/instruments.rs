//! The five measurement instrument classes and the isometry each induces on
//! system ⊗ pointer.
//!
//! Every instrument couples the system to a pointer degree of freedom that
//! starts in a fixed ready state. The interaction is unitary on the full
//! apparatus space, but a chain of measurements only ever explores its
//! restriction to the ready sector, so instruments are represented by that
//! restriction: an isometry V: H_S → H_S ⊗ H_pointer.
//!
//! Pointer space layout:
//!
//! * ideal / degenerate / non-ideal: dimension (#outcomes + 1); index 0 is
//!   the ready state, outcome q sits at index q + 1.
//! * generalized: dimension #outcomes; the ready state is reused as the
//!   outcome-0 basis state.
//! * macroscopic: dimension (#outcomes + 1)·μ, pointer-major, so index
//!   a·μ + m couples pointer value a with microscopic label m.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_complex::Complex64;

use crate::linalg::{is_isometry, LinalgError, Matrix, Projector};
use crate::STRUCT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstrumentClass {
    Ideal,
    IdealDegenerate,
    NonIdeal,
    Generalized,
    Macroscopic,
}

impl InstrumentClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstrumentClass::Ideal => "ideal",
            InstrumentClass::IdealDegenerate => "ideal_degenerate",
            InstrumentClass::NonIdeal => "non_ideal",
            InstrumentClass::Generalized => "generalized",
            InstrumentClass::Macroscopic => "macroscopic",
        }
    }
}

impl fmt::Display for InstrumentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficient tensor `u[q][m][q′][m′]` of a macroscopic instrument: the
/// interaction sends |q⟩|a₀,m⟩ to Σ_{q′m′} `u[q][m][q′][m′]` |q′⟩|a_q,m′⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    system_dim: usize,
    micro_dim: usize,
    data: Vec<Complex64>,
}

impl CoefficientTensor {
    pub fn new(
        system_dim: usize,
        micro_dim: usize,
        data: Vec<Complex64>,
    ) -> Result<Self, InstrumentError> {
        let expected = system_dim * micro_dim * system_dim * micro_dim;
        if system_dim == 0 || micro_dim == 0 {
            return Err(InstrumentError::BadShape(
                "coefficient tensor dimensions must be nonzero",
            ));
        }
        if data.len() != expected {
            return Err(InstrumentError::BadShape(
                "coefficient tensor length must be (system_dim × micro_dim)²",
            ));
        }
        Ok(CoefficientTensor {
            system_dim,
            micro_dim,
            data,
        })
    }

    /// Build a tensor whose only populated initial label is `m0`:
    /// `images[q]` is the image of |q⟩|a₀,m0⟩ as amplitudes over (q′, m′),
    /// row-major with q′ most significant.
    pub fn from_images(
        micro_dim: usize,
        m0: usize,
        images: &[Vec<Complex64>],
    ) -> Result<Self, InstrumentError> {
        let d = images.len();
        if d == 0 || micro_dim == 0 {
            return Err(InstrumentError::BadShape(
                "coefficient tensor dimensions must be nonzero",
            ));
        }
        if m0 >= micro_dim {
            return Err(InstrumentError::BadShape(
                "initial microscopic label out of range",
            ));
        }
        let mut t = CoefficientTensor {
            system_dim: d,
            micro_dim,
            data: vec![Complex64::new(0.0, 0.0); d * micro_dim * d * micro_dim],
        };
        for (q, img) in images.iter().enumerate() {
            if img.len() != d * micro_dim {
                return Err(InstrumentError::BadShape(
                    "image length must be system_dim × micro_dim",
                ));
            }
            for qp in 0..d {
                for mp in 0..micro_dim {
                    let idx = t.index(q, m0, qp, mp);
                    t.data[idx] = img[qp * micro_dim + mp];
                }
            }
        }
        Ok(t)
    }

    #[inline]
    fn index(&self, q: usize, m: usize, qp: usize, mp: usize) -> usize {
        ((q * self.micro_dim + m) * self.system_dim + qp) * self.micro_dim + mp
    }

    pub fn get(&self, q: usize, m: usize, qp: usize, mp: usize) -> Complex64 {
        self.data[self.index(q, m, qp, mp)]
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn micro_dim(&self) -> usize {
        self.micro_dim
    }
}

/// Untyped description of an instrument, as authored. [`Instrument::new`]
/// validates it; every downstream operation works on the validated handle
/// only.
#[derive(Debug, Clone, PartialEq)]
pub enum InstrumentSpec {
    /// Projective, non-degenerate: |q⟩|a₀⟩ → |q⟩|a_q⟩. `basis[q]` is the
    /// measured eigenvector |q⟩.
    Ideal { basis: Vec<Vec<Complex64>> },
    /// Projective with degenerate eigenvalues; `projectors[q]` is the
    /// eigenprojector Π_q and outcome q leaves the state Lüders-projected.
    IdealDegenerate { projectors: Vec<Matrix> },
    /// Registers like the ideal instrument but disturbs the system:
    /// |q⟩|a₀⟩ → |μ_q⟩|a_q⟩ with `disturbed[q]` = |μ_q⟩.
    NonIdeal {
        basis: Vec<Vec<Complex64>>,
        disturbed: Vec<Vec<Complex64>>,
    },
    /// Kraus family {M_m} with Σ M_m†M_m = I; |φ⟩|0⟩ → Σ_m (M_m|φ⟩)|m⟩.
    Generalized { kraus: Vec<Matrix> },
    /// Pointer plus hidden microscopic labels, coupled through a coefficient
    /// tensor; only the slice at `initial_label` enters any computed
    /// quantity.
    Macroscopic {
        coefficients: CoefficientTensor,
        initial_label: usize,
    },
}

impl InstrumentSpec {
    pub fn class(&self) -> InstrumentClass {
        match self {
            InstrumentSpec::Ideal { .. } => InstrumentClass::Ideal,
            InstrumentSpec::IdealDegenerate { .. } => InstrumentClass::IdealDegenerate,
            InstrumentSpec::NonIdeal { .. } => InstrumentClass::NonIdeal,
            InstrumentSpec::Generalized { .. } => InstrumentClass::Generalized,
            InstrumentSpec::Macroscopic { .. } => InstrumentClass::Macroscopic,
        }
    }
}

/// One validation check with its Frobenius (or absolute) residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn residual(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Check {
            name,
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    fn structural(name: &'static str, ok: bool) -> Self {
        Check {
            name,
            residual: if ok { 0.0 } else { f64::INFINITY },
            tolerance: 0.0,
            pass: ok,
        }
    }
}

/// Pass/fail per invariant of one instrument spec.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub class: InstrumentClass,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} instrument: {}",
            self.class,
            if self.passed() { "valid" } else { "rejected" }
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  {}: residual={:.3e} tolerance={:.1e} {}",
                c.name,
                c.residual,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstrumentError {
    /// Validation rejected the spec; the report carries each failed check.
    Rejected(ValidationReport),
    UnknownOutcome {
        outcome: usize,
        outcomes: usize,
    },
    NotIsometry {
        residual: f64,
    },
    BadShape(&'static str),
}

impl fmt::Display for InstrumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstrumentError::Rejected(report) => {
                write!(f, "instrument spec rejected by validation:\n{report}")
            }
            InstrumentError::UnknownOutcome { outcome, outcomes } => {
                write!(
                    f,
                    "outcome {outcome} not declared (instrument has {outcomes})"
                )
            }
            InstrumentError::NotIsometry { residual } => {
                write!(f, "matrix is not an isometry (residual {residual:e})")
            }
            InstrumentError::BadShape(what) => f.write_str(what),
        }
    }
}

impl core::error::Error for InstrumentError {}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn gram_residual(vectors: &[Vec<Complex64>]) -> f64 {
    let n = vectors.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut g = Complex64::new(0.0, 0.0);
            for k in 0..vectors[i].len() {
                g += vectors[i][k].conj() * vectors[j][k];
            }
            let want = if i == j { 1.0 } else { 0.0 };
            acc += (g - Complex64::new(want, 0.0)).norm_sqr();
        }
    }
    acc.sqrt()
}

fn validate_basis(checks: &mut Vec<Check>, basis: &[Vec<Complex64>]) -> bool {
    let d = basis.len();
    let shape_ok = d > 0 && basis.iter().all(|b| b.len() == d);
    checks.push(Check::structural(
        "measured basis is d vectors of length d",
        shape_ok,
    ));
    if !shape_ok {
        return false;
    }
    checks.push(Check::residual(
        "measured basis orthonormality",
        gram_residual(basis),
        STRUCT_TOL,
    ));
    true
}

/// A validated instrument. Construction runs the physicality checks of the
/// spec's class and rejects on any failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    spec: InstrumentSpec,
    system_dim: usize,
    outcomes: usize,
    pointer_dim: usize,
}

impl Instrument {
    /// Run every invariant of the class and report residuals; never panics.
    pub fn validate(spec: &InstrumentSpec) -> ValidationReport {
        let mut checks = Vec::new();
        match spec {
            InstrumentSpec::Ideal { basis } => {
                validate_basis(&mut checks, basis);
            }
            InstrumentSpec::IdealDegenerate { projectors } => {
                let d = projectors.first().map_or(0, Matrix::rows);
                let shape_ok = !projectors.is_empty()
                    && d > 0
                    && projectors.iter().all(|p| p.is_square() && p.rows() == d);
                checks.push(Check::structural(
                    "eigenprojectors are square of equal size",
                    shape_ok,
                ));
                if shape_ok {
                    let herm = projectors
                        .iter()
                        .map(Matrix::hermiticity_residual)
                        .fold(0.0, f64::max);
                    checks.push(Check::residual(
                        "eigenprojector hermiticity",
                        herm,
                        STRUCT_TOL,
                    ));
                    let idem = projectors
                        .iter()
                        .map(Matrix::idempotency_residual)
                        .fold(0.0, f64::max);
                    checks.push(Check::residual(
                        "eigenprojector idempotence",
                        idem,
                        STRUCT_TOL,
                    ));
                    let mut ortho: f64 = 0.0;
                    for i in 0..projectors.len() {
                        for j in 0..projectors.len() {
                            if i != j {
                                ortho =
                                    ortho.max(projectors[i].mul(&projectors[j]).frobenius_norm());
                            }
                        }
                    }
                    checks.push(Check::residual(
                        "eigenprojector mutual orthogonality",
                        ortho,
                        STRUCT_TOL,
                    ));
                    let mut sum = Matrix::zeros(d, d);
                    for p in projectors {
                        sum = sum.add(p);
                    }
                    checks.push(Check::residual(
                        "eigenprojector completeness (Σ Π_q = I)",
                        sum.frobenius_distance(&Matrix::identity(d)),
                        STRUCT_TOL,
                    ));
                }
            }
            InstrumentSpec::NonIdeal { basis, disturbed } => {
                let basis_ok = validate_basis(&mut checks, basis);
                let d = basis.len();
                let shape_ok = disturbed.len() == d && disturbed.iter().all(|v| v.len() == d);
                checks.push(Check::structural(
                    "one disturbed state of length d per outcome",
                    shape_ok && basis_ok,
                ));
                if shape_ok {
                    let worst = disturbed
                        .iter()
                        .map(|v| (vec_norm(v) - 1.0).abs())
                        .fold(0.0, f64::max);
                    checks.push(Check::residual(
                        "disturbed state normalization",
                        worst,
                        STRUCT_TOL,
                    ));
                }
            }
            InstrumentSpec::Generalized { kraus } => {
                let d = kraus.first().map_or(0, Matrix::rows);
                let shape_ok = !kraus.is_empty()
                    && d > 0
                    && kraus.iter().all(|m| m.is_square() && m.rows() == d);
                checks.push(Check::structural(
                    "kraus operators are square of equal size",
                    shape_ok,
                ));
                if shape_ok {
                    let mut sum = Matrix::zeros(d, d);
                    for m in kraus {
                        sum = sum.add(&m.adjoint().mul(m));
                    }
                    checks.push(Check::residual(
                        "kraus completeness (Σ M†M = I)",
                        sum.frobenius_distance(&Matrix::identity(d)),
                        STRUCT_TOL,
                    ));
                }
            }
            InstrumentSpec::Macroscopic {
                coefficients,
                initial_label,
            } => {
                let label_ok = *initial_label < coefficients.micro_dim();
                checks.push(Check::structural(
                    "initial microscopic label in range",
                    label_ok,
                ));
                if label_ok {
                    let d = coefficients.system_dim();
                    let mu = coefficients.micro_dim();
                    let mut worst: f64 = 0.0;
                    for q in 0..d {
                        let mut sum = 0.0;
                        for qp in 0..d {
                            for mp in 0..mu {
                                sum += coefficients.get(q, *initial_label, qp, mp).norm_sqr();
                            }
                        }
                        worst = worst.max((sum - 1.0).abs());
                    }
                    checks.push(Check::residual(
                        "ready-slice image normalization",
                        worst,
                        STRUCT_TOL,
                    ));
                }
            }
        }
        ValidationReport {
            class: spec.class(),
            checks,
        }
    }

    pub fn new(spec: InstrumentSpec) -> Result<Self, InstrumentError> {
        let report = Self::validate(&spec);
        if !report.passed() {
            return Err(InstrumentError::Rejected(report));
        }
        let (system_dim, outcomes, pointer_dim) = match &spec {
            InstrumentSpec::Ideal { basis } => (basis.len(), basis.len(), basis.len() + 1),
            InstrumentSpec::IdealDegenerate { projectors } => {
                (projectors[0].rows(), projectors.len(), projectors.len() + 1)
            }
            InstrumentSpec::NonIdeal { basis, .. } => (basis.len(), basis.len(), basis.len() + 1),
            InstrumentSpec::Generalized { kraus } => (kraus[0].rows(), kraus.len(), kraus.len()),
            InstrumentSpec::Macroscopic { coefficients, .. } => {
                let d = coefficients.system_dim();
                (d, d, (d + 1) * coefficients.micro_dim())
            }
        };
        Ok(Instrument {
            spec,
            system_dim,
            outcomes,
            pointer_dim,
        })
    }

    pub fn spec(&self) -> &InstrumentSpec {
        &self.spec
    }

    pub fn class(&self) -> InstrumentClass {
        self.spec.class()
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn pointer_dim(&self) -> usize {
        self.pointer_dim
    }

    fn check_outcome(&self, outcome: usize) -> Result<(), InstrumentError> {
        if outcome >= self.outcomes {
            Err(InstrumentError::UnknownOutcome {
                outcome,
                outcomes: self.outcomes,
            })
        } else {
            Ok(())
        }
    }

    /// Pointer basis indices registering `outcome`; a single index except for
    /// the macroscopic class, whose sector spans all microscopic labels.
    pub fn pointer_sector(&self, outcome: usize) -> Result<Range<usize>, InstrumentError> {
        self.check_outcome(outcome)?;
        Ok(match &self.spec {
            InstrumentSpec::Ideal { .. }
            | InstrumentSpec::IdealDegenerate { .. }
            | InstrumentSpec::NonIdeal { .. } => (outcome + 1)..(outcome + 2),
            InstrumentSpec::Generalized { .. } => outcome..(outcome + 1),
            InstrumentSpec::Macroscopic { coefficients, .. } => {
                let mu = coefficients.micro_dim();
                ((outcome + 1) * mu)..((outcome + 2) * mu)
            }
        })
    }

    /// Pointer indices of the ready state; `None` for the generalized class,
    /// which reuses the outcome-0 basis state as its ready state.
    pub fn ready_sector(&self) -> Option<Range<usize>> {
        match &self.spec {
            InstrumentSpec::Generalized { .. } => None,
            InstrumentSpec::Macroscopic { coefficients, .. } => Some(0..coefficients.micro_dim()),
            _ => Some(0..1),
        }
    }

    /// Projector on H_pointer for one outcome: rank 1, or rank μ (coarse,
    /// summed over microscopic labels) for the macroscopic class.
    pub fn pointer_projector(&self, outcome: usize) -> Result<Projector, InstrumentError> {
        let sector = self.pointer_sector(outcome)?;
        Ok(Projector::diagonal(self.pointer_dim, sector))
    }

    /// Projector on the ready sector, when it is distinct from every outcome.
    pub fn ready_projector(&self) -> Option<Projector> {
        self.ready_sector()
            .map(|sector| Projector::diagonal(self.pointer_dim, sector))
    }

    /// The measurement map restricted to the apparatus ready state, as an
    /// isometry V: H_S → H_S ⊗ H_pointer.
    pub fn isometry(&self) -> Matrix {
        let d = self.system_dim;
        let pd = self.pointer_dim;
        let mut v = Matrix::zeros(d * pd, d);
        match &self.spec {
            InstrumentSpec::Ideal { basis } => {
                // V = Σ_q (|q⟩ ⊗ |a_q⟩)⟨q|
                for (q, bq) in basis.iter().enumerate() {
                    let a = q + 1;
                    for j in 0..d {
                        let w = bq[j].conj();
                        if w.norm_sqr() == 0.0 {
                            continue;
                        }
                        for s in 0..d {
                            let row = s * pd + a;
                            v.set(row, j, v.get(row, j) + bq[s] * w);
                        }
                    }
                }
            }
            InstrumentSpec::NonIdeal { basis, disturbed } => {
                // V = Σ_q (|μ_q⟩ ⊗ |a_q⟩)⟨q|
                for (q, bq) in basis.iter().enumerate() {
                    let a = q + 1;
                    let mu = &disturbed[q];
                    for j in 0..d {
                        let w = bq[j].conj();
                        if w.norm_sqr() == 0.0 {
                            continue;
                        }
                        for s in 0..d {
                            let row = s * pd + a;
                            v.set(row, j, v.get(row, j) + mu[s] * w);
                        }
                    }
                }
            }
            InstrumentSpec::IdealDegenerate { projectors } => {
                // V|φ⟩ = Σ_q (Π_q|φ⟩) ⊗ |a_q⟩
                for (q, p) in projectors.iter().enumerate() {
                    let a = q + 1;
                    for s in 0..d {
                        for j in 0..d {
                            let row = s * pd + a;
                            v.set(row, j, v.get(row, j) + p.get(s, j));
                        }
                    }
                }
            }
            InstrumentSpec::Generalized { kraus } => {
                // V|φ⟩ = Σ_m (M_m|φ⟩) ⊗ |m⟩
                for (m, k) in kraus.iter().enumerate() {
                    for s in 0..d {
                        for j in 0..d {
                            v.set(s * pd + m, j, k.get(s, j));
                        }
                    }
                }
            }
            InstrumentSpec::Macroscopic {
                coefficients,
                initial_label,
            } => {
                // V|q⟩ = Σ_{q′m′} u[q][m0][q′][m′] |q′⟩ ⊗ |a_q, m′⟩
                let mu = coefficients.micro_dim();
                for q in 0..d {
                    for qp in 0..d {
                        for mp in 0..mu {
                            let a = (q + 1) * mu + mp;
                            v.set(qp * pd + a, q, coefficients.get(q, *initial_label, qp, mp));
                        }
                    }
                }
            }
        }
        v
    }

    /// The Kraus family the instrument induces on the system, sliced from its
    /// isometry. Validation already bounds the isometry residual, so unlike
    /// [`kraus_from_isometry`] no separate gate is applied here.
    pub fn kraus(&self) -> Vec<Matrix> {
        let v = self.isometry();
        let d = self.system_dim;
        let pd = self.pointer_dim;
        (0..pd)
            .map(|m| Matrix::from_fn(d, d, |i, j| v.get(i * pd + m, j)))
            .collect()
    }

    /// The effect operator E_r whose expectation in the incoming state is the
    /// probability of outcome r: the measured-basis projector for projective
    /// classes, N_r†N_r for the generalized class, |r⟩⟨r| in the
    /// computational basis for the macroscopic class.
    pub fn effect(&self, outcome: usize) -> Result<Matrix, InstrumentError> {
        self.check_outcome(outcome)?;
        let d = self.system_dim;
        Ok(match &self.spec {
            InstrumentSpec::Ideal { basis } | InstrumentSpec::NonIdeal { basis, .. } => {
                Matrix::outer(&basis[outcome], &basis[outcome])
            }
            InstrumentSpec::IdealDegenerate { projectors } => projectors[outcome].clone(),
            InstrumentSpec::Generalized { kraus } => {
                let k = &kraus[outcome];
                k.adjoint().mul(k)
            }
            InstrumentSpec::Macroscopic { .. } => {
                let mut m = Matrix::zeros(d, d);
                m.set(outcome, outcome, Complex64::new(1.0, 0.0));
                m
            }
        })
    }
}

/// Extract the measurement operators from an isometry V: H_S → H_S ⊗
/// H_pointer via M_m = (I ⊗ ⟨m|)·V. Rebuilding V from the family reproduces
/// it exactly.
pub fn kraus_from_isometry(v: &Matrix, pointer_dim: usize) -> Result<Vec<Matrix>, InstrumentError> {
    let d = v.cols();
    if pointer_dim == 0 || v.rows() != d * pointer_dim {
        return Err(InstrumentError::BadShape(
            "isometry must have system_dim × pointer_dim rows",
        ));
    }
    let check = is_isometry(v);
    if !check.pass {
        return Err(InstrumentError::NotIsometry {
            residual: check.residual,
        });
    }
    Ok((0..pointer_dim)
        .map(|m| Matrix::from_fn(d, d, |i, j| v.get(i * pointer_dim + m, j)))
        .collect())
}

impl From<LinalgError> for InstrumentError {
    fn from(_: LinalgError) -> Self {
        InstrumentError::BadShape("linear algebra shape error")
    }
}
