//! The scenario file format: a single JSON document describing an initial
//! state and two instruments.
//!
//! Complex numbers are two-element arrays `[re, im]`, matrices are row-major
//! nested arrays, and the instrument class is selected by a `"type"` string.
//! The macroscopic payload carries the full coefficient tensor `u` indexed
//! `[q][m][q'][m']` plus the initial microscopic label `m0`; only the
//! `m = m0` slice enters any computed quantity.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qmchain_core::chain::{ChainError, ChainScenario};
use qmchain_core::instruments::{CoefficientTensor, Instrument, InstrumentError, InstrumentSpec};
use qmchain_core::linalg::{LinalgError, Matrix, StateVector};

pub type CNum = [f64; 2];

pub fn to_complex(z: CNum) -> Complex64 {
    Complex64::new(z[0], z[1])
}

pub fn from_complex(z: Complex64) -> CNum {
    [z.re, z.im]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub system_dim: usize,
    pub initial_state: Vec<CNum>,
    pub first: InstrumentFile,
    pub second: InstrumentFile,
    #[serde(default, skip_serializing_if = "ReportOptions::is_default")]
    pub report: ReportOptions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<ReportFormat>,
}

impl ReportOptions {
    fn is_default(&self) -> bool {
        *self == ReportOptions::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InstrumentFile {
    Ideal {
        basis: Vec<Vec<CNum>>,
    },
    IdealDegenerate {
        projectors: Vec<Vec<Vec<CNum>>>,
    },
    NonIdeal {
        basis: Vec<Vec<CNum>>,
        disturbed: Vec<Vec<CNum>>,
    },
    Generalized {
        kraus: Vec<Vec<Vec<CNum>>>,
    },
    Macroscopic {
        u: Vec<Vec<Vec<Vec<CNum>>>>,
        m0: usize,
    },
}

/// Semantic failure turning a parsed file into a validated scenario; maps to
/// exit code 3.
#[derive(Debug)]
pub enum BuildError {
    Version {
        found: u32,
    },
    Shape {
        field: &'static str,
        message: String,
    },
    State(LinalgError),
    Instrument {
        which: &'static str,
        error: InstrumentError,
    },
    Chain(ChainError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Version { found } => {
                write!(f, "unsupported scenario version {found} (expected 1)")
            }
            BuildError::Shape { field, message } => write!(f, "field `{field}`: {message}"),
            BuildError::State(e) => write!(f, "field `initial_state`: {e}"),
            BuildError::Instrument { which, error } => {
                write!(f, "{which} instrument: {error}")
            }
            BuildError::Chain(e) => write!(f, "scenario: {e}"),
        }
    }
}

impl std::error::Error for BuildError {}

fn vectors(rows: &[Vec<CNum>]) -> Vec<Vec<Complex64>> {
    rows.iter()
        .map(|row| row.iter().copied().map(to_complex).collect())
        .collect()
}

fn matrix(field: &'static str, rows: &[Vec<CNum>]) -> Result<Matrix, BuildError> {
    Matrix::from_nested(&vectors(rows)).map_err(|e| BuildError::Shape {
        field,
        message: e.to_string(),
    })
}

fn build_instrument(file: &InstrumentFile, which: &'static str) -> Result<Instrument, BuildError> {
    let spec = match file {
        InstrumentFile::Ideal { basis } => InstrumentSpec::Ideal {
            basis: vectors(basis),
        },
        InstrumentFile::IdealDegenerate { projectors } => InstrumentSpec::IdealDegenerate {
            projectors: projectors
                .iter()
                .map(|p| matrix("projectors", p))
                .collect::<Result<_, _>>()?,
        },
        InstrumentFile::NonIdeal { basis, disturbed } => InstrumentSpec::NonIdeal {
            basis: vectors(basis),
            disturbed: vectors(disturbed),
        },
        InstrumentFile::Generalized { kraus } => InstrumentSpec::Generalized {
            kraus: kraus
                .iter()
                .map(|m| matrix("kraus", m))
                .collect::<Result<_, _>>()?,
        },
        InstrumentFile::Macroscopic { u, m0 } => {
            let d = u.len();
            let mu = u.first().map_or(0, Vec::len);
            let mut flat = Vec::with_capacity(d * mu * d * mu);
            for per_q in u {
                if per_q.len() != mu {
                    return Err(BuildError::Shape {
                        field: "u",
                        message: "inconsistent microscopic dimension".into(),
                    });
                }
                for per_m in per_q {
                    if per_m.len() != d {
                        return Err(BuildError::Shape {
                            field: "u",
                            message: "inner system dimension must match u's length".into(),
                        });
                    }
                    for per_qp in per_m {
                        if per_qp.len() != mu {
                            return Err(BuildError::Shape {
                                field: "u",
                                message: "inconsistent microscopic dimension".into(),
                            });
                        }
                        flat.extend(per_qp.iter().copied().map(to_complex));
                    }
                }
            }
            let coefficients =
                CoefficientTensor::new(d, mu, flat).map_err(|e| BuildError::Shape {
                    field: "u",
                    message: e.to_string(),
                })?;
            InstrumentSpec::Macroscopic {
                coefficients,
                initial_label: *m0,
            }
        }
    };
    Instrument::new(spec).map_err(|error| BuildError::Instrument { which, error })
}

impl ScenarioFile {
    /// Validate into a runnable scenario.
    pub fn build(&self) -> Result<ChainScenario, BuildError> {
        if self.version != 1 {
            return Err(BuildError::Version {
                found: self.version,
            });
        }
        if self.initial_state.len() != self.system_dim {
            return Err(BuildError::Shape {
                field: "initial_state",
                message: format!(
                    "expected {} amplitudes, found {}",
                    self.system_dim,
                    self.initial_state.len()
                ),
            });
        }
        let amps = self.initial_state.iter().copied().map(to_complex).collect();
        let initial = StateVector::new(vec![self.system_dim], amps).map_err(BuildError::State)?;
        let first = build_instrument(&self.first, "first")?;
        let second = build_instrument(&self.second, "second")?;
        if first.system_dim() != self.system_dim {
            return Err(BuildError::Shape {
                field: "first",
                message: format!(
                    "instrument acts on dimension {}, scenario declares {}",
                    first.system_dim(),
                    self.system_dim
                ),
            });
        }
        ChainScenario::new(initial, first, second).map_err(BuildError::Chain)
    }
}
