//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them).
//!
//! Criteria 1 and 2 share a corpus of 200 random scenarios per first
//! instrument class (system dims 2–4, alternating projective and generalized
//! second instruments).

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;

use qmchain_cli::gen;
use qmchain_cli::lattice::zero_projector_demo;
use qmchain_cli::metrics::Metrics;
use qmchain_cli::rng::Sampler;
use qmchain_cli::scenario::ScenarioFile;
use qmchain_core::chain::{ChainScenario, CollapseDeviation};
use qmchain_core::instruments::{Instrument, InstrumentClass, InstrumentSpec};
use qmchain_core::linalg::{
    hermitian_eigen, trace_distance, DensityOperator, Matrix, Operator, Projector, StateVector,
};
use qmchain_core::logic::{check_axioms, distributive, meet_limit, OutcomeBasis, Proposition};
use qmchain_core::predict_conditional;

const CLASSES: [InstrumentClass; 5] = [
    InstrumentClass::Ideal,
    InstrumentClass::IdealDegenerate,
    InstrumentClass::NonIdeal,
    InstrumentClass::Generalized,
    InstrumentClass::Macroscopic,
];

const TRIALS_PER_CLASS: usize = 200;

fn corpus(seed: u64) -> Vec<(InstrumentClass, ChainScenario)> {
    let mut out = Vec::with_capacity(CLASSES.len() * TRIALS_PER_CLASS);
    for (i, class) in CLASSES.iter().enumerate() {
        let mut s = Sampler::new(seed.wrapping_add(i as u64 + 1));
        for trial in 0..TRIALS_PER_CLASS {
            let d = s.range(2, 4);
            let first = gen::random_instrument(*class, d, &mut s);
            let second_class = if trial % 2 == 0 {
                InstrumentClass::Ideal
            } else {
                InstrumentClass::Generalized
            };
            let second = gen::random_instrument(second_class, d, &mut s);
            let scenario = ChainScenario::new(s.state(d), first, second).expect("dims agree");
            out.push((*class, scenario));
        }
    }
    out
}

fn load_shipped(name: &str) -> ChainScenario {
    let path = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name);
    let text = std::fs::read_to_string(&path).expect("shipped scenario exists");
    let file: ScenarioFile = serde_json::from_str(&text).expect("shipped scenario parses");
    file.build().expect("shipped scenario validates")
}

#[test]
fn criterion_1_conditionals_agree_along_both_routes() {
    let start = Instant::now();
    let mut max_diff: f64 = 0.0;
    let mut evaluated = 0usize;
    for (_, scenario) in corpus(0xACC) {
        let result = scenario.run().expect("valid scenario evolves");
        for q in 0..scenario.first().outcomes() {
            if result.pr_first(q).unwrap() < 1e-9 {
                continue;
            }
            let prepared = result.prepared_state(q).expect("outcome above threshold");
            for r in 0..scenario.second().outcomes() {
                let via_joint = result.conditional(q, r).unwrap();
                let via_trace = predict_conditional(&prepared, scenario.second(), r).unwrap();
                max_diff = max_diff.max((via_joint - via_trace).abs());
                evaluated += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = max_diff <= 1e-9 && elapsed < 60.0;
    println!(
        "acceptance 1 (conditional via joint Born rule vs trace over prepared state): {} - max diff {max_diff:.3e} over {evaluated} conditionals, 1000 scenarios, {elapsed:.2}s",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(max_diff <= 1e-9, "max diff {max_diff:e}");
    assert!(elapsed < 60.0, "took {elapsed}s");
}

#[test]
fn criterion_2_prepared_state_matches_partial_trace_oracle() {
    let mut max_dist: f64 = 0.0;
    let mut evaluated = 0usize;
    for (_, scenario) in corpus(0xACC) {
        let result = scenario.run().expect("valid scenario evolves");
        for q in 0..scenario.first().outcomes() {
            if result.pr_first(q).unwrap() < 1e-9 {
                continue;
            }
            let prepared = result.prepared_state(q).unwrap();
            let oracle = result.prepared_state_oracle(q).unwrap();
            max_dist = max_dist.max(trace_distance(&prepared, &oracle).unwrap());
            evaluated += 1;
        }
    }
    let pass = max_dist <= 1e-9;
    println!(
        "acceptance 2 (analytic prepared state vs project-and-trace oracle): {} - max trace distance {max_dist:.3e} over {evaluated} outcomes",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "max trace distance {max_dist:e}");
}

#[test]
fn criterion_3_projective_chains_coincide_with_collapse() {
    let mut max_dev: f64 = 0.0;
    let mut evaluated = 0usize;
    for (class, scenario) in corpus(0xACC) {
        if !matches!(
            class,
            InstrumentClass::Ideal | InstrumentClass::IdealDegenerate
        ) {
            continue;
        }
        let result = scenario.run().unwrap();
        for q in 0..scenario.first().outcomes() {
            if result.pr_first(q).unwrap() < 1e-9 {
                continue;
            }
            match scenario.collapse_deviation(q).unwrap() {
                CollapseDeviation::TraceDistance(t) => {
                    max_dev = max_dev.max(t);
                    evaluated += 1;
                }
                CollapseDeviation::NoCanonicalReference => {
                    panic!("projective instrument must have a collapse reference")
                }
            }
        }
    }

    // the degenerate reference case: outcome 1 prepares (|1⟩+|2⟩)/√2
    let lueders = load_shipped("lueders_qutrit.json");
    let rho = lueders.prepared_state(1).unwrap();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let expect = DensityOperator::from_pure(
        &StateVector::new(
            vec![3],
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(half, 0.0),
                Complex64::new(half, 0.0),
            ],
        )
        .unwrap(),
    );
    let lueders_dist = trace_distance(&rho, &expect).unwrap();
    let rank_one = (rho.purity() - 1.0).abs();

    let pass = max_dev <= 1e-10 && lueders_dist <= 1e-10 && rank_one <= 1e-10;
    println!(
        "acceptance 3 (ideal and degenerate chains coincide with collapse): {} - max deviation {max_dev:.3e} over {evaluated} outcomes; degenerate example distance {lueders_dist:.3e}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(max_dev <= 1e-10);
    assert!(lueders_dist <= 1e-10);
    assert!(rank_one <= 1e-10);
}

#[test]
// the reference deviation is pinned to five decimal places with a matching
// 1e-5 band, not to the exact constant
#[allow(clippy::approx_constant)]
fn criterion_4_shipped_nonideal_scenario_breaks_collapse() {
    let scenario = load_shipped("nonideal_qubit.json");
    let result = scenario.run().unwrap();
    let conditional = result.conditional(1, 0).unwrap();
    let deviation = match scenario.collapse_deviation(1).unwrap() {
        CollapseDeviation::TraceDistance(t) => t,
        CollapseDeviation::NoCanonicalReference => panic!("projective class"),
    };
    let cond_err = (conditional - 0.5).abs();
    let dev_err = (deviation - 0.70711).abs();
    let pass = cond_err <= 1e-10 && dev_err <= 1e-5;
    println!(
        "acceptance 4 (non-ideal collapse violation): {} - Pr(b_0|a_1) = {conditional:.12} where collapse predicts 0; deviation {deviation:.12}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(cond_err <= 1e-10, "conditional {conditional}");
    assert!(dev_err <= 1e-5, "deviation {deviation}");
}

#[test]
fn criterion_5_generalized_measurements_follow_kraus_formulas() {
    let mut s = Sampler::new(0xACC5);
    let mut max_pr_diff: f64 = 0.0;
    let mut max_cond_diff: f64 = 0.0;
    let mut max_roundtrip: f64 = 0.0;
    for _ in 0..TRIALS_PER_CLASS {
        let d = s.range(2, 4);
        let m_set = gen::random_kraus(d, s.range(2, 4), &mut s);
        let n_set = gen::random_kraus(d, s.range(2, 4), &mut s);
        let first = Instrument::new(InstrumentSpec::Generalized {
            kraus: m_set.clone(),
        })
        .unwrap();
        let second = Instrument::new(InstrumentSpec::Generalized {
            kraus: n_set.clone(),
        })
        .unwrap();

        // the isometry round-trips the declared family
        for (extracted, declared) in first.kraus().iter().zip(&m_set) {
            max_roundtrip = max_roundtrip.max(extracted.frobenius_distance(declared));
        }

        let phi = s.state(d);
        let scenario = ChainScenario::new(phi.clone(), first, second).unwrap();
        let result = scenario.run().unwrap();
        for m in 0..m_set.len() {
            // Pr(m) directly from the measurement operators
            let image = m_set[m].matvec(phi.amplitudes());
            let weight: f64 = image.iter().map(|z| z.norm_sqr()).sum();
            max_pr_diff = max_pr_diff.max((result.pr_first(m).unwrap() - weight).abs());
            if weight < 1e-9 {
                continue;
            }
            // conditional against the normalized Kraus image fed through the
            // second family, with raw vector arithmetic
            let scale = 1.0 / weight.sqrt();
            let phi_m: Vec<Complex64> = image.iter().map(|z| z * scale).collect();
            for (r, n_op) in n_set.iter().enumerate() {
                let out = n_op.matvec(&phi_m);
                let want: f64 = out.iter().map(|z| z.norm_sqr()).sum();
                let got = result.conditional(m, r).unwrap();
                max_cond_diff = max_cond_diff.max((got - want).abs());
            }
        }
    }
    let pass = max_pr_diff <= 1e-10 && max_cond_diff <= 1e-9 && max_roundtrip <= 1e-12;
    println!(
        "acceptance 5 (generalized measurement statistics): {} - outcome prob diff {max_pr_diff:.3e}, chained conditional diff {max_cond_diff:.3e}, kraus round-trip {max_roundtrip:.3e}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(max_pr_diff <= 1e-10);
    assert!(max_cond_diff <= 1e-9);
    assert!(max_roundtrip <= 1e-12);
}

#[test]
fn criterion_6_shipped_macroscopic_scenario_prepares_mixed_state() {
    let scenario = load_shipped("macroscopic_qubit.json");
    let rho = scenario.prepared_state(0).unwrap();
    let trace_err = (rho.matrix().trace().re - 1.0).abs();
    let purity_err = (rho.purity() - 0.5).abs();
    let min_eig = rho.eigenvalues().first().copied().unwrap();
    let pass = trace_err <= 1e-10 && purity_err <= 1e-9 && min_eig >= -1e-10;
    println!(
        "acceptance 6 (macroscopic instrument prepares a mixed state): {} - trace error {trace_err:.3e}, purity {:.12}, min eigenvalue {min_eig:.3e}",
        if pass { "PASS" } else { "FAIL" },
        rho.purity()
    );
    assert!(trace_err <= 1e-10);
    assert!(purity_err <= 1e-9);
    assert!(min_eig >= -1e-10);
}

#[test]
fn criterion_7_proposition_lattice_obeys_kolmogorov_axioms() {
    let mut s = Sampler::new(0xACC7);

    // axioms on random states and proposition samples, dims up to 16
    let mut max_axiom: f64 = 0.0;
    for factors in [vec![2usize, 2], vec![2, 2, 2], vec![2, 2, 2, 2]] {
        let basis =
            OutcomeBasis::new(factors.iter().map(|&k| (0..k as i64).collect()).collect()).unwrap();
        let dim = basis.dim();
        for _ in 0..5 {
            let state = s.state(dim);
            let mut sample = vec![
                Proposition::empty(basis.clone()),
                Proposition::unit(basis.clone()),
            ];
            for _ in 0..20 {
                let support: Vec<usize> = (0..dim).filter(|_| s.bool()).collect();
                sample.push(Proposition::from_indices(basis.clone(), support).unwrap());
            }
            let report = check_axioms(&state, &basis, &sample).unwrap();
            max_axiom = max_axiom.max(report.max_violation());
        }
    }

    // distributivity, exhaustively for bases with at most 4 tuples
    let mut distributive_ok = true;
    for dims in [vec![2usize], vec![3], vec![4], vec![2, 2]] {
        let basis =
            OutcomeBasis::new(dims.iter().map(|&k| (0..k as i64).collect()).collect()).unwrap();
        let n = basis.dim();
        let props: Vec<Proposition> = (0..1usize << n)
            .map(|mask| {
                Proposition::from_indices(basis.clone(), (0..n).filter(|i| mask >> i & 1 == 1))
                    .unwrap()
            })
            .collect();
        for p1 in &props {
            for p2 in &props {
                for p3 in &props {
                    distributive_ok &= distributive(p1, p2, p3).unwrap();
                }
            }
        }
    }

    // projector-limit meet: commuting shortcut and intersection oracle
    let mut max_commuting: f64 = 0.0;
    for _ in 0..20 {
        let sup1: Vec<usize> = (0..8).filter(|_| s.bool()).collect();
        let sup2: Vec<usize> = (0..8).filter(|_| s.bool()).collect();
        let p = Projector::diagonal(8, sup1);
        let q = Projector::diagonal(8, sup2);
        let shortcut = p.matrix().mul(q.matrix());
        let limit = meet_limit(&p, &q).unwrap();
        max_commuting = max_commuting.max(limit.matrix().frobenius_distance(&shortcut));
    }
    let mut max_oracle: f64 = 0.0;
    let mut compared = 0;
    for dim in [4usize, 6, 8] {
        let mut attempts = 0;
        while compared < 30 && attempts < 60 {
            attempts += 1;
            let r1 = s.range(1, dim - 1);
            let p1 = Projector::new(Operator::new(vec![dim], s.projector_matrix(dim, r1)).unwrap())
                .unwrap();
            let r2 = s.range(1, dim - 1);
            let p2 = Projector::new(Operator::new(vec![dim], s.projector_matrix(dim, r2)).unwrap())
                .unwrap();
            let limit = match meet_limit(&p1, &p2) {
                Ok(l) => l,
                Err(_) => continue, // shallow principal angle: capped, redrawn
            };
            let sum = p1.matrix().add(p2.matrix());
            let eig = hermitian_eigen(&sum);
            let mut oracle = Matrix::zeros(dim, dim);
            for (k, lambda) in eig.values.iter().enumerate() {
                if *lambda >= 2.0 - 1e-8 {
                    let col: Vec<Complex64> = (0..dim).map(|i| eig.vectors.get(i, k)).collect();
                    oracle = oracle.add(&Matrix::outer(&col, &col));
                }
            }
            max_oracle = max_oracle.max(limit.matrix().frobenius_distance(&oracle));
            compared += 1;
        }
    }

    // the non-commuting line pair converges to the zero projector
    let mut demo = Metrics::new();
    zero_projector_demo(&mut demo);
    let demo_ok = demo.violations() == 0;

    let pass = max_axiom <= 1e-10
        && distributive_ok
        && max_commuting <= 1e-12
        && max_oracle <= 1e-9
        && compared >= 12
        && demo_ok;
    println!(
        "acceptance 7 (proposition lattice): {} - axiom violation {max_axiom:.3e}, distributivity exact: {distributive_ok}, commuting meet {max_commuting:.3e}, intersection oracle {max_oracle:.3e} over {compared} pairs, zero-projector demo: {demo_ok}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(max_axiom <= 1e-10);
    assert!(distributive_ok);
    assert!(max_commuting <= 1e-12);
    assert!(max_oracle <= 1e-9);
    assert!(compared >= 12);
    assert!(demo_ok);
}

#[test]
fn criterion_8_verify_is_deterministic() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qmchain"))
            .args(["verify", "--seed", "42", "--trials", "200"])
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    let pass = a.status.code() == Some(0) && a.stdout == b.stdout && !a.stdout.is_empty();
    println!(
        "acceptance 8 (verify determinism): {} - two runs of `verify --seed 42 --trials 200`: exit codes {:?}/{:?}, byte-identical: {}",
        if pass { "PASS" } else { "FAIL" },
        a.status.code(),
        b.status.code(),
        a.stdout == b.stdout
    );
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "reports differ between runs");
}
