//! Proposition-lattice suites: Kolmogorov axioms, distributivity, and the
//! projector-limit meet, shared by the `lattice` subcommand and the verify
//! harness.

use std::fmt::Write;

use num_complex::Complex64;

use qmchain_core::linalg::{hermitian_eigen, Matrix, Operator, Projector};
use qmchain_core::logic::{check_axioms, distributive, meet_limit, OutcomeBasis, Proposition};

use crate::metrics::{Metrics, Outcome};
use crate::rng::Sampler;

pub struct LatticeOptions {
    pub dim: usize,
    pub seed: u64,
}

pub fn run_lattice(opts: &LatticeOptions) -> Result<Outcome, String> {
    if !(2..=64).contains(&opts.dim) {
        return Err(format!("dim must be between 2 and 64, got {}", opts.dim));
    }
    let mut sampler = Sampler::new(opts.seed);
    let basis = factored_basis(opts.dim);
    let mut out = String::new();
    writeln!(out, "qmchain lattice: dim={} seed={}", opts.dim, opts.seed).unwrap();
    let counts: Vec<usize> = (0..basis.observables())
        .map(|k| basis.values(k).len())
        .collect();
    writeln!(
        out,
        "basis: {} commuting observable(s), value counts {:?}",
        basis.observables(),
        counts
    )
    .unwrap();

    let mut metrics = Metrics::new();
    axiom_suite(&mut metrics, &basis, &mut sampler, 6);
    distributivity_suite(&mut metrics, &basis, &mut sampler);
    meet_limit_suite(&mut metrics, opts.dim.min(8), &mut sampler);
    zero_projector_demo(&mut metrics);
    metrics.render(&mut out);

    let violations = metrics.violations();
    writeln!(
        out,
        "overall: {} ({} violations)",
        if violations == 0 { "PASS" } else { "FAIL" },
        violations
    )
    .unwrap();
    Ok(Outcome {
        report: out,
        violations,
    })
}

/// Greedy prime factorization into per-observable value lists, so composite
/// dimensions exercise genuine value tuples.
pub fn factored_basis(dim: usize) -> OutcomeBasis {
    let mut rest = dim;
    let mut factors = Vec::new();
    let mut p = 2;
    while rest > 1 {
        while rest.is_multiple_of(p) {
            factors.push(p);
            rest /= p;
        }
        p += 1;
    }
    OutcomeBasis::new(factors.iter().map(|&k| (0..k as i64).collect()).collect())
        .expect("nonempty duplicate-free value lists")
}

fn random_proposition(basis: &OutcomeBasis, s: &mut Sampler) -> Proposition {
    let dim = basis.dim();
    let support: Vec<usize> = (0..dim).filter(|_| s.bool()).collect();
    Proposition::from_indices(basis.clone(), support).expect("indices in range")
}

pub fn axiom_suite(metrics: &mut Metrics, basis: &OutcomeBasis, s: &mut Sampler, reps: usize) {
    let dim = basis.dim();
    for _ in 0..reps {
        let state = s.state(dim);
        let mut sample = vec![
            Proposition::empty(basis.clone()),
            Proposition::unit(basis.clone()),
        ];
        for _ in 0..20 {
            sample.push(random_proposition(basis, s));
        }
        match check_axioms(&state, basis, &sample) {
            Ok(report) => {
                metrics.record(
                    "kolmogorov axioms (plain and conditional)",
                    report.max_violation(),
                    1e-10,
                );
            }
            Err(e) => metrics.fail(format!("axiom check errored: {e}")),
        }
    }
}

/// Exact set-level distributivity plus the projector homomorphism
/// (entrywise-equal 0/1 diagonals); exhaustive when the basis has at most 4
/// tuples, random triples otherwise.
pub fn distributivity_suite(metrics: &mut Metrics, basis: &OutcomeBasis, s: &mut Sampler) {
    let dim = basis.dim();
    let mut violations = 0usize;
    let mut projector_mismatch = 0usize;
    let mut check_triple = |p1: &Proposition, p2: &Proposition, p3: &Proposition| {
        if !distributive(p1, p2, p3).expect("same basis") {
            violations += 1;
        }
    };
    if dim <= 4 {
        let props: Vec<Proposition> = (0..1usize << dim)
            .map(|mask| {
                Proposition::from_indices(basis.clone(), (0..dim).filter(|i| mask >> i & 1 == 1))
                    .unwrap()
            })
            .collect();
        for p1 in &props {
            for p2 in &props {
                for p3 in &props {
                    check_triple(p1, p2, p3);
                }
            }
        }
    } else {
        for _ in 0..200 {
            let p1 = random_proposition(basis, s);
            let p2 = random_proposition(basis, s);
            let p3 = random_proposition(basis, s);
            check_triple(&p1, &p2, &p3);
        }
    }
    // projector homomorphism on a few random pairs
    for _ in 0..20 {
        let p = random_proposition(basis, s);
        let q = random_proposition(basis, s);
        let meet_direct = p.meet(&q).unwrap().projector();
        let product = p.projector().matrix().mul(q.projector().matrix());
        if meet_direct.matrix() != &product {
            projector_mismatch += 1;
        }
        let join_direct = p.join(&q).unwrap().projector();
        let formula = p
            .projector()
            .matrix()
            .add(q.projector().matrix())
            .sub(&product);
        if join_direct.matrix() != &formula {
            projector_mismatch += 1;
        }
    }
    metrics.record(
        "distributivity violations (exact set algebra)",
        violations as f64,
        0.0,
    );
    metrics.record(
        "projector homomorphism mismatches",
        projector_mismatch as f64,
        0.0,
    );
}

pub fn meet_limit_suite(metrics: &mut Metrics, dim: usize, s: &mut Sampler) {
    // commuting diagonal pairs agree with the shortcut after one step
    for _ in 0..20 {
        let sup1: Vec<usize> = (0..dim).filter(|_| s.bool()).collect();
        let sup2: Vec<usize> = (0..dim).filter(|_| s.bool()).collect();
        let p = Projector::diagonal(dim, sup1);
        let q = Projector::diagonal(dim, sup2);
        let shortcut = p.matrix().mul(q.matrix());
        match meet_limit(&p, &q) {
            Ok(limit) => metrics.record(
                "meet limit vs commuting shortcut",
                limit.matrix().frobenius_distance(&shortcut),
                1e-12,
            ),
            Err(e) => metrics.fail(format!("meet limit on commuting pair errored: {e}")),
        }
    }
    // Non-commuting pairs agree with the subspace-intersection oracle.
    // Pairs whose smallest principal angle is too shallow for the capped
    // power iteration are reported as skipped and redrawn; the agreement
    // claim is over converged limits.
    let mut compared = 0;
    let mut skipped = 0;
    for _ in 0..24 {
        if compared >= 12 {
            break;
        }
        let r1 = s.range(1, dim - 1);
        let r2 = s.range(1, dim - 1);
        let p1 =
            Projector::new(Operator::new(vec![dim], s.projector_matrix(dim, r1)).unwrap()).unwrap();
        let p2 =
            Projector::new(Operator::new(vec![dim], s.projector_matrix(dim, r2)).unwrap()).unwrap();
        let limit = match meet_limit(&p1, &p2) {
            Ok(l) => l,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        compared += 1;
        let sum = p1.matrix().add(p2.matrix());
        let eig = hermitian_eigen(&sum);
        let mut oracle = Matrix::zeros(dim, dim);
        for (k, lambda) in eig.values.iter().enumerate() {
            if *lambda >= 2.0 - 1e-8 {
                let col: Vec<Complex64> = (0..dim).map(|i| eig.vectors.get(i, k)).collect();
                oracle = oracle.add(&Matrix::outer(&col, &col));
            }
        }
        metrics.record(
            "meet limit vs intersection oracle",
            limit.matrix().frobenius_distance(&oracle),
            1e-9,
        );
    }
    if skipped > 0 {
        metrics.record(
            "meet limit pairs skipped at iteration cap",
            skipped as f64,
            f64::INFINITY,
        );
    }
}

/// |0⟩⟨0| against |+⟩⟨+|: the ranges meet only at 0, so the limit is the zero
/// projector.
pub fn zero_projector_demo(metrics: &mut Metrics) {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let p = Projector::diagonal(2, [0]);
    let plus = [Complex64::new(half, 0.0), Complex64::new(half, 0.0)];
    let q = Projector::new(Operator::new(vec![2], Matrix::outer(&plus, &plus)).unwrap()).unwrap();
    match meet_limit(&p, &q) {
        Ok(limit) => metrics.record(
            "non-commuting line-pair meet demo (zero projector)",
            limit.matrix().frobenius_norm(),
            1e-12,
        ),
        Err(e) => metrics.fail(format!("line-pair demo errored: {e}")),
    }
}
