//! Random scenario generation for the verification harness: system dims 2–4,
//! at most 4 pointer labels, microscopic dimension at most 3, everything
//! built from orthonormalized Gaussian matrices.

use qmchain_core::instruments::{CoefficientTensor, Instrument, InstrumentClass, InstrumentSpec};
use qmchain_core::linalg::Matrix;

use crate::rng::Sampler;

pub const MAX_KRAUS_OUTCOMES: usize = 4;
pub const MAX_MICRO_DIM: usize = 3;

/// Random validated instrument of the requested class on a d-dimensional
/// system.
pub fn random_instrument(class: InstrumentClass, d: usize, s: &mut Sampler) -> Instrument {
    let spec = match class {
        InstrumentClass::Ideal => InstrumentSpec::Ideal { basis: s.basis(d) },
        InstrumentClass::IdealDegenerate => {
            let parts = random_partition(d, s);
            let vectors = s.basis(d);
            let mut projectors = Vec::with_capacity(parts.len());
            let mut offset = 0;
            for part in parts {
                let mut m = Matrix::zeros(d, d);
                for v in &vectors[offset..offset + part] {
                    m = m.add(&Matrix::outer(v, v));
                }
                projectors.push(m);
                offset += part;
            }
            InstrumentSpec::IdealDegenerate { projectors }
        }
        InstrumentClass::NonIdeal => {
            let basis = s.basis(d);
            let disturbed = (0..d).map(|_| s.state(d).amplitudes().to_vec()).collect();
            InstrumentSpec::NonIdeal { basis, disturbed }
        }
        InstrumentClass::Generalized => {
            let k = s.range(2, MAX_KRAUS_OUTCOMES);
            InstrumentSpec::Generalized {
                kraus: random_kraus(d, k, s),
            }
        }
        InstrumentClass::Macroscopic => {
            let mu = s.range(1, MAX_MICRO_DIM);
            let m0 = s.below(mu);
            let images: Vec<_> = (0..d)
                .map(|_| s.state(d * mu).amplitudes().to_vec())
                .collect();
            InstrumentSpec::Macroscopic {
                coefficients: CoefficientTensor::from_images(mu, m0, &images)
                    .expect("image shapes are consistent by construction"),
                initial_label: m0,
            }
        }
    };
    Instrument::new(spec).expect("random specs satisfy their class invariants")
}

/// Complete Kraus family obtained by slicing a random isometry.
pub fn random_kraus(d: usize, outcomes: usize, s: &mut Sampler) -> Vec<Matrix> {
    let v = s.isometry(d * outcomes, d);
    (0..outcomes)
        .map(|m| Matrix::from_fn(d, d, |i, j| v.get(i * outcomes + m, j)))
        .collect()
}

/// Random composition of d into nonempty ordered parts.
fn random_partition(d: usize, s: &mut Sampler) -> Vec<usize> {
    let groups = s.range(1, d);
    let mut cuts = std::collections::BTreeSet::new();
    while cuts.len() < groups - 1 {
        cuts.insert(s.range(1, d - 1));
    }
    let mut parts = Vec::with_capacity(groups);
    let mut prev = 0;
    for cut in cuts {
        parts.push(cut - prev);
        prev = cut;
    }
    parts.push(d - prev);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmchain_core::linalg::is_isometry;

    #[test]
    fn random_instruments_validate_and_induce_isometries() {
        let mut s = Sampler::new(9);
        for class in [
            InstrumentClass::Ideal,
            InstrumentClass::IdealDegenerate,
            InstrumentClass::NonIdeal,
            InstrumentClass::Generalized,
            InstrumentClass::Macroscopic,
        ] {
            for d in 2..=4 {
                for _ in 0..5 {
                    let inst = random_instrument(class, d, &mut s);
                    assert_eq!(inst.system_dim(), d);
                    let check = is_isometry(&inst.isometry());
                    assert!(check.pass, "{class} residual {}", check.residual);
                }
            }
        }
    }

    #[test]
    fn partitions_cover_dimension() {
        let mut s = Sampler::new(3);
        for d in 2..=4 {
            for _ in 0..20 {
                let parts = random_partition(d, &mut s);
                assert!(!parts.is_empty());
                assert!(parts.iter().all(|&p| p >= 1));
                assert_eq!(parts.iter().sum::<usize>(), d);
            }
        }
    }
}
