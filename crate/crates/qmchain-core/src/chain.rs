//! Two consecutive measurements on one system.
//!
//! A scenario evolves |φ⟩|ready_A⟩|ready_B⟩ through both instrument
//! isometries, reads outcome statistics off the final joint state with the
//! Born rule, and deduces the state the first outcome prepares. The central
//! identities, each checked two ways:
//!
//! * Pr(b_r | a_q) computed as a quotient of joint Born probabilities equals
//!   Tr[ρ_q E_r] over the analytic prepared state ρ_q of the first
//!   instrument's class.
//! * ρ_q equals what projecting the post-first-measurement joint state and
//!   tracing out the apparatus yields ([`ChainResult::prepared_state_oracle`]).
//!
//! Pointer projectors are diagonal in the pointer basis, so joint Born
//! probabilities are accumulated directly over pointer sectors of the state
//! vector; the dense lifted-projector route is exercised against it in tests.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::instruments::{Instrument, InstrumentError, InstrumentSpec};
use crate::linalg::{
    partial_trace_matrix, trace_distance, DensityOperator, LinalgError, Matrix, StateVector,
};
use crate::{CONDITION_EPS, CROSS_TOL, STRUCT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum ChainError {
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    UnknownOutcome {
        instrument: &'static str,
        outcome: usize,
        outcomes: usize,
    },
    /// The conditioning outcome has probability below [`CONDITION_EPS`]; the
    /// conditional quantity is undefined rather than 0/0.
    ConditionUndefined {
        outcome: usize,
        probability: f64,
    },
    InvariantViolation {
        what: &'static str,
        value: f64,
    },
    Linalg(LinalgError),
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            ChainError::UnknownOutcome {
                instrument,
                outcome,
                outcomes,
            } => write!(
                f,
                "outcome {outcome} not declared by the {instrument} instrument ({outcomes} outcomes)"
            ),
            ChainError::ConditionUndefined { outcome, probability } => write!(
                f,
                "conditioning on outcome {outcome} undefined: probability {probability:e} below threshold"
            ),
            ChainError::InvariantViolation { what, value } => {
                write!(f, "internal invariant violated: {what} (value {value:e})")
            }
            ChainError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ChainError {}

impl From<LinalgError> for ChainError {
    fn from(e: LinalgError) -> Self {
        ChainError::Linalg(e)
    }
}

fn outcome_err(instrument: &'static str, e: InstrumentError) -> ChainError {
    match e {
        InstrumentError::UnknownOutcome { outcome, outcomes } => ChainError::UnknownOutcome {
            instrument,
            outcome,
            outcomes,
        },
        _ => ChainError::InvariantViolation {
            what: "validated instrument rejected an internal query",
            value: f64::NAN,
        },
    }
}

/// Deviation of the deduced prepared state from the textbook collapse rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollapseDeviation {
    /// ½‖ρ_prepared − ρ_collapse‖₁.
    TraceDistance(f64),
    /// Kraus instruments declare no eigenbasis, so there is no collapse
    /// prediction to compare against.
    NoCanonicalReference,
}

/// An initial system state and two validated instruments applied in order.
#[derive(Debug, Clone)]
pub struct ChainScenario {
    initial: StateVector,
    first: Instrument,
    second: Instrument,
}

impl ChainScenario {
    pub fn new(
        initial: StateVector,
        first: Instrument,
        second: Instrument,
    ) -> Result<Self, ChainError> {
        let d = first.system_dim();
        if second.system_dim() != d {
            return Err(ChainError::DimensionMismatch {
                expected: d,
                got: second.system_dim(),
            });
        }
        if initial.total_dim() != d {
            return Err(ChainError::DimensionMismatch {
                expected: d,
                got: initial.total_dim(),
            });
        }
        // normalize the bookkeeping to a single system factor
        let initial = StateVector::new_unchecked(vec![d], initial.amplitudes().to_vec());
        Ok(ChainScenario {
            initial,
            first,
            second,
        })
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn first(&self) -> &Instrument {
        &self.first
    }

    pub fn second(&self) -> &Instrument {
        &self.second
    }

    /// Probability that the first instrument registers `q`, evaluated on the
    /// incoming state as ⟨φ|E_q|φ⟩.
    pub fn occurrence(&self, q: usize) -> Result<f64, ChainError> {
        let e = self.first.effect(q).map_err(|e| outcome_err("first", e))?;
        let y = e.matvec(self.initial.amplitudes());
        let mut val = Complex64::new(0.0, 0.0);
        for (a, b) in self.initial.amplitudes().iter().zip(&y) {
            val += a.conj() * b;
        }
        if val.im.abs() > STRUCT_TOL {
            return Err(ChainError::Linalg(LinalgError::ImaginaryResidue {
                value: val.im,
            }));
        }
        Ok(val.re.clamp(0.0, 1.0))
    }

    /// The analytic post-first-measurement state of the system, conditional
    /// on outcome `q`: the measured eigenvector for the ideal class, the
    /// Lüders projection for the degenerate class, the disturbed state for
    /// the non-ideal class, the normalized Kraus image for the generalized
    /// class, and the microscopic-label contraction of the coefficient
    /// tensor for the macroscopic class.
    pub fn prepared_state(&self, q: usize) -> Result<DensityOperator, ChainError> {
        let p = self.occurrence(q)?;
        if p < CONDITION_EPS {
            return Err(ChainError::ConditionUndefined {
                outcome: q,
                probability: p,
            });
        }
        let phi = self.initial.amplitudes();
        let raw = match self.first.spec() {
            InstrumentSpec::Ideal { basis } => Matrix::outer(&basis[q], &basis[q]),
            InstrumentSpec::NonIdeal { disturbed, .. } => {
                Matrix::outer(&disturbed[q], &disturbed[q])
            }
            InstrumentSpec::IdealDegenerate { projectors } => {
                let v = projectors[q].matvec(phi);
                Matrix::outer(&v, &v)
            }
            InstrumentSpec::Generalized { kraus } => {
                let v = kraus[q].matvec(phi);
                Matrix::outer(&v, &v)
            }
            InstrumentSpec::Macroscopic {
                coefficients,
                initial_label,
            } => {
                let d = coefficients.system_dim();
                let mu = coefficients.micro_dim();
                Matrix::from_fn(d, d, |qp, qpp| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for mt in 0..mu {
                        acc += coefficients.get(q, *initial_label, qp, mt)
                            * coefficients.get(q, *initial_label, qpp, mt).conj();
                    }
                    acc
                })
            }
        };
        let tr = raw.trace().re;
        if tr < CONDITION_EPS {
            return Err(ChainError::ConditionUndefined {
                outcome: q,
                probability: tr,
            });
        }
        DensityOperator::new(raw.scale(Complex64::new(1.0 / tr, 0.0))).map_err(ChainError::Linalg)
    }

    /// Trace distance between the prepared state and the collapse-postulate
    /// prediction Π_q|φ⟩⟨φ|Π_q / ⟨φ|Π_q|φ⟩.
    pub fn collapse_deviation(&self, q: usize) -> Result<CollapseDeviation, ChainError> {
        let p = self.occurrence(q)?;
        if p < CONDITION_EPS {
            return Err(ChainError::ConditionUndefined {
                outcome: q,
                probability: p,
            });
        }
        if matches!(self.first.spec(), InstrumentSpec::Generalized { .. }) {
            return Ok(CollapseDeviation::NoCanonicalReference);
        }
        let prepared = self.prepared_state(q)?;
        let pi = self.first.effect(q).map_err(|e| outcome_err("first", e))?;
        let v = pi.matvec(self.initial.amplitudes());
        let raw = Matrix::outer(&v, &v);
        let tr = raw.trace().re;
        let reference = DensityOperator::new(raw.scale(Complex64::new(1.0 / tr, 0.0)))
            .map_err(ChainError::Linalg)?;
        Ok(CollapseDeviation::TraceDistance(trace_distance(
            &prepared, &reference,
        )?))
    }

    /// Evolve through both instruments and accumulate the outcome tables.
    pub fn run(&self) -> Result<ChainResult, ChainError> {
        let after_first = apply_isometry_append(
            &self.initial,
            &self.first.isometry(),
            0,
            self.first.pointer_dim(),
        )?;
        let joint_final = apply_isometry_append(
            &after_first,
            &self.second.isometry(),
            0,
            self.second.pointer_dim(),
        )?;

        let a_dim = self.first.pointer_dim();
        let b_dim = self.second.pointer_dim();
        let a_map = sector_map(&self.first);
        let b_map = sector_map(&self.second);
        let ka = self.first.outcomes();
        let kb = self.second.outcomes();

        let mut pr_first = vec![0.0; ka];
        let mut pr_joint = vec![vec![0.0; kb]; ka];
        for (flat, amp) in joint_final.amplitudes().iter().enumerate() {
            let w = amp.norm_sqr();
            if w == 0.0 {
                continue;
            }
            let b = flat % b_dim;
            let a = (flat / b_dim) % a_dim;
            if let Some(q) = a_map[a] {
                pr_first[q] += w;
                if let Some(r) = b_map[b] {
                    pr_joint[q][r] += w;
                }
            }
        }

        let total: f64 = pr_first.iter().sum();
        if (total - 1.0).abs() > CROSS_TOL {
            return Err(ChainError::InvariantViolation {
                what: "first-outcome probabilities must sum to 1",
                value: total,
            });
        }
        for q in 0..ka {
            if pr_first[q] >= CONDITION_EPS {
                let s: f64 = pr_joint[q].iter().sum();
                if (s / pr_first[q] - 1.0).abs() > CROSS_TOL {
                    return Err(ChainError::InvariantViolation {
                        what: "conditional probabilities must sum to 1",
                        value: s / pr_first[q],
                    });
                }
            }
        }

        Ok(ChainResult {
            scenario: self.clone(),
            after_first,
            joint_final,
            pr_first,
            pr_joint,
        })
    }
}

fn sector_map(instrument: &Instrument) -> Vec<Option<usize>> {
    let mut map = vec![None; instrument.pointer_dim()];
    for q in 0..instrument.outcomes() {
        let sector = instrument
            .pointer_sector(q)
            .expect("declared outcome has a sector");
        for a in sector {
            map[a] = Some(q);
        }
    }
    map
}

/// Apply an isometry d_slot → d_slot ⊗ d_new to one tensor factor, appending
/// the new factor at the end of the dims list.
fn apply_isometry_append(
    state: &StateVector,
    v: &Matrix,
    slot: usize,
    appended: usize,
) -> Result<StateVector, ChainError> {
    let dims = state.dims();
    if slot >= dims.len() {
        return Err(ChainError::Linalg(LinalgError::SlotOutOfRange {
            slot,
            factors: dims.len(),
        }));
    }
    let ds = dims[slot];
    if appended == 0 || v.cols() != ds || v.rows() != ds * appended {
        return Err(ChainError::DimensionMismatch {
            expected: ds * appended,
            got: v.rows(),
        });
    }
    let stride: usize = dims[slot + 1..].iter().product();
    let total = state.total_dim();
    let mut out = vec![Complex64::new(0.0, 0.0); total * appended];
    for (flat, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let s = (flat / stride) % ds;
        let base = flat - s * stride;
        for sp in 0..ds {
            let rebased = (base + sp * stride) * appended;
            for b in 0..appended {
                let w = v.get(sp * appended + b, s);
                if w.norm_sqr() != 0.0 {
                    out[rebased + b] += w * amp;
                }
            }
        }
    }
    let mut out_dims = dims.to_vec();
    out_dims.push(appended);
    // Isometries of validated instruments preserve the norm up to their
    // validation residuals; two stacked boundary-tolerance instruments may
    // drift past the strict state tolerance, so guard at the cross-route one.
    let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > CROSS_TOL {
        return Err(ChainError::InvariantViolation {
            what: "isometry application must preserve the norm",
            value: norm,
        });
    }
    Ok(StateVector::new_unchecked(out_dims, out))
}

/// Statistics of one evolved scenario: the final joint state and the
/// per-outcome probability tables, with conditional quantities, prepared
/// states and collapse deviations derived on demand.
#[derive(Debug, Clone)]
pub struct ChainResult {
    scenario: ChainScenario,
    after_first: StateVector,
    joint_final: StateVector,
    pr_first: Vec<f64>,
    pr_joint: Vec<Vec<f64>>,
}

impl ChainResult {
    pub fn scenario(&self) -> &ChainScenario {
        &self.scenario
    }

    /// |Ψ_final⟩ on H_S ⊗ H_A ⊗ H_B.
    pub fn joint_final(&self) -> &StateVector {
        &self.joint_final
    }

    /// The joint state after the first measurement only, on H_S ⊗ H_A.
    pub fn after_first(&self) -> &StateVector {
        &self.after_first
    }

    fn check_first(&self, q: usize) -> Result<(), ChainError> {
        if q >= self.pr_first.len() {
            return Err(ChainError::UnknownOutcome {
                instrument: "first",
                outcome: q,
                outcomes: self.pr_first.len(),
            });
        }
        Ok(())
    }

    fn check_second(&self, r: usize) -> Result<(), ChainError> {
        let kb = self.scenario.second.outcomes();
        if r >= kb {
            return Err(ChainError::UnknownOutcome {
                instrument: "second",
                outcome: r,
                outcomes: kb,
            });
        }
        Ok(())
    }

    /// Pr(a_q): Born probability of the (coarse) pointer projector of the
    /// first instrument, lifted to the joint space.
    pub fn pr_first(&self, q: usize) -> Result<f64, ChainError> {
        self.check_first(q)?;
        Ok(self.pr_first[q])
    }

    /// Pr(b_r ∧ a_q): Born probability of the product of the two commuting
    /// lifted pointer projectors.
    pub fn pr_joint(&self, q: usize, r: usize) -> Result<f64, ChainError> {
        self.check_first(q)?;
        self.check_second(r)?;
        Ok(self.pr_joint[q][r])
    }

    /// Pr(b_r | a_q) = Pr(b_r ∧ a_q) / Pr(a_q).
    pub fn conditional(&self, q: usize, r: usize) -> Result<f64, ChainError> {
        self.check_first(q)?;
        self.check_second(r)?;
        let p = self.pr_first[q];
        if p < CONDITION_EPS {
            return Err(ChainError::ConditionUndefined {
                outcome: q,
                probability: p,
            });
        }
        Ok((self.pr_joint[q][r] / p).clamp(0.0, 1.0))
    }

    pub fn prepared_state(&self, q: usize) -> Result<DensityOperator, ChainError> {
        self.scenario.prepared_state(q)
    }

    /// Independent route to the prepared state: project the
    /// post-first-measurement joint state with the lifted pointer projector
    /// for a_q, renormalize by Pr(a_q), and trace out the apparatus.
    pub fn prepared_state_oracle(&self, q: usize) -> Result<DensityOperator, ChainError> {
        let first = &self.scenario.first;
        let sector = first
            .pointer_sector(q)
            .map_err(|e| outcome_err("first", e))?;
        let pd = first.pointer_dim();
        let amps = self.after_first.amplitudes();
        let mut p = 0.0;
        for (flat, amp) in amps.iter().enumerate() {
            if sector.contains(&(flat % pd)) {
                p += amp.norm_sqr();
            }
        }
        if p < CONDITION_EPS {
            return Err(ChainError::ConditionUndefined {
                outcome: q,
                probability: p,
            });
        }
        let scale = 1.0 / p.sqrt();
        let projected: Vec<Complex64> = amps
            .iter()
            .enumerate()
            .map(|(flat, amp)| {
                if sector.contains(&(flat % pd)) {
                    amp.scale(scale)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let rho = Matrix::outer(&projected, &projected);
        let reduced = partial_trace_matrix(&rho, &[first.system_dim(), pd], 0)?;
        DensityOperator::new(reduced).map_err(ChainError::Linalg)
    }

    pub fn collapse_deviation(&self, q: usize) -> Result<CollapseDeviation, ChainError> {
        self.scenario.collapse_deviation(q)
    }
}

/// Pr(b_r) for a system entering the second instrument in state `rho`:
/// Tr[ρ Π_r] for projective instruments, Tr[ρ N_r†N_r] for generalized ones.
pub fn predict_conditional(
    rho: &DensityOperator,
    second: &Instrument,
    r: usize,
) -> Result<f64, ChainError> {
    if rho.dim() != second.system_dim() {
        return Err(ChainError::DimensionMismatch {
            expected: second.system_dim(),
            got: rho.dim(),
        });
    }
    let e = second.effect(r).map_err(|e| outcome_err("second", e))?;
    let d = rho.dim();
    let mut val = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            val += rho.matrix().get(i, j) * e.get(j, i);
        }
    }
    if val.im.abs() > STRUCT_TOL {
        return Err(ChainError::Linalg(LinalgError::ImaginaryResidue {
            value: val.im,
        }));
    }
    Ok(val.re.clamp(0.0, 1.0))
}
