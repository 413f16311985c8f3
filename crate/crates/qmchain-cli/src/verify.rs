//! Randomized verification harness: runs every chain and lattice invariant
//! over seeded random scenarios of all five instrument classes and reports
//! the worst residual per check.

use std::fmt::Write;

use num_complex::Complex64;

use qmchain_core::chain::{ChainError, ChainScenario, CollapseDeviation};
use qmchain_core::instruments::{Instrument, InstrumentClass, InstrumentSpec};
use qmchain_core::linalg::{is_isometry, trace_distance, Matrix};
use qmchain_core::predict_conditional;

use crate::fixtures;
use crate::gen;
use crate::lattice;
use crate::metrics::{Metrics, Outcome};
use crate::rng::Sampler;

pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    pub inject_fault: bool,
}

const CLASSES: [InstrumentClass; 5] = [
    InstrumentClass::Ideal,
    InstrumentClass::IdealDegenerate,
    InstrumentClass::NonIdeal,
    InstrumentClass::Generalized,
    InstrumentClass::Macroscopic,
];

pub fn run_verify(opts: &VerifyOptions) -> Outcome {
    let mut out = String::new();
    writeln!(
        out,
        "qmchain verify: seed={} trials={} fault_injection={}",
        opts.seed,
        opts.trials,
        if opts.inject_fault { "on" } else { "off" }
    )
    .unwrap();
    let mut violations = 0usize;

    for (idx, class) in CLASSES.iter().enumerate() {
        let mut metrics = Metrics::new();
        let mut sampler = Sampler::new(opts.seed.wrapping_add((idx as u64 + 1) << 32));
        for trial in 0..opts.trials {
            let inject = opts.inject_fault && *class == InstrumentClass::Generalized && trial == 0;
            class_trial(&mut metrics, *class, trial, &mut sampler, inject);
        }
        writeln!(out, "[{class}] trials={}", opts.trials).unwrap();
        metrics.render(&mut out);
        violations += metrics.violations();
    }

    {
        let mut metrics = Metrics::new();
        let mut sampler = Sampler::new(opts.seed.wrapping_add(101 << 32));
        for _ in 0..opts.trials {
            repeatability_trial(&mut metrics, &mut sampler);
        }
        writeln!(out, "[repeatability] trials={}", opts.trials).unwrap();
        metrics.render(&mut out);
        violations += metrics.violations();
    }

    {
        let mut metrics = Metrics::new();
        fixed_scenario_checks(&mut metrics);
        writeln!(out, "[fixed scenarios]").unwrap();
        metrics.render(&mut out);
        violations += metrics.violations();
    }

    {
        let mut metrics = Metrics::new();
        let mut sampler = Sampler::new(opts.seed.wrapping_add(202 << 32));
        logic_checks(&mut metrics, &mut sampler);
        writeln!(out, "[logic]").unwrap();
        metrics.render(&mut out);
        violations += metrics.violations();
    }

    writeln!(
        out,
        "overall: {} ({} violations)",
        if violations == 0 { "PASS" } else { "FAIL" },
        violations
    )
    .unwrap();
    Outcome {
        report: out,
        violations,
    }
}

fn class_trial(
    metrics: &mut Metrics,
    class: InstrumentClass,
    trial: usize,
    sampler: &mut Sampler,
    inject_fault: bool,
) {
    let d = sampler.range(2, 4);
    if inject_fault {
        inject_kraus_fault(metrics, d, sampler);
        return;
    }
    let first = gen::random_instrument(class, d, sampler);
    instrument_checks(metrics, &first);

    let second_class = if trial.is_multiple_of(2) {
        InstrumentClass::Ideal
    } else {
        InstrumentClass::Generalized
    };
    let second = gen::random_instrument(second_class, d, sampler);
    let phi = sampler.state(d);
    let scenario = match ChainScenario::new(phi, first, second) {
        Ok(s) => s,
        Err(e) => {
            metrics.fail(format!("scenario construction failed: {e}"));
            return;
        }
    };
    chain_checks(
        metrics,
        &scenario,
        matches!(
            class,
            InstrumentClass::Ideal | InstrumentClass::IdealDegenerate
        ),
    );
    if class == InstrumentClass::NonIdeal {
        non_ideal_checks(
            metrics,
            &scenario,
            sampler,
            second_class == InstrumentClass::Ideal,
        );
    }
}

fn inject_kraus_fault(metrics: &mut Metrics, d: usize, sampler: &mut Sampler) {
    let mut kraus = gen::random_kraus(d, 2, sampler);
    kraus[0] = kraus[0].scale(Complex64::new(1.05, 0.0));
    let report = Instrument::validate(&InstrumentSpec::Generalized { kraus });
    match report
        .checks
        .iter()
        .find(|c| c.name.contains("completeness"))
    {
        Some(check) if !check.pass => metrics.fail(format!(
            "injected fault detected: kraus completeness residual={:.3e} exceeds {:.1e}",
            check.residual, check.tolerance
        )),
        _ => metrics.fail("injected kraus fault was NOT detected by validation".into()),
    }
}

fn instrument_checks(metrics: &mut Metrics, inst: &Instrument) {
    let isometry = inst.isometry();
    metrics.record("isometry residual", is_isometry(&isometry).residual, 1e-10);

    let kraus = inst.kraus();
    let d = inst.system_dim();
    let mut sum = Matrix::zeros(d, d);
    for k in &kraus {
        sum = sum.add(&k.adjoint().mul(k));
    }
    metrics.record(
        "extracted kraus completeness",
        sum.frobenius_distance(&Matrix::identity(d)),
        1e-10,
    );

    match inst.spec() {
        InstrumentSpec::Ideal { basis } => {
            // ideal measurement is the projective special case: the extracted
            // operators are the eigenprojectors
            let mut worst: f64 = kraus[0].frobenius_norm();
            for (q, b) in basis.iter().enumerate() {
                worst = worst.max(kraus[q + 1].frobenius_distance(&Matrix::outer(b, b)));
            }
            metrics.record("ideal kraus are eigenprojectors", worst, 1e-12);
        }
        InstrumentSpec::Generalized { kraus: declared } => {
            let mut worst: f64 = 0.0;
            for (extracted, original) in kraus.iter().zip(declared) {
                worst = worst.max(extracted.frobenius_distance(original));
            }
            metrics.record("generalized kraus round-trip", worst, 1e-12);
        }
        _ => {}
    }

    let pd = inst.pointer_dim();
    let mut total = Matrix::zeros(pd, pd);
    let mut ortho: f64 = 0.0;
    let mut sectors = Vec::with_capacity(inst.outcomes());
    for q in 0..inst.outcomes() {
        let p = inst.pointer_projector(q).expect("declared outcome");
        for other in &sectors {
            ortho = ortho.max(p.matrix().mul(other).frobenius_norm());
        }
        total = total.add(p.matrix());
        sectors.push(p.matrix().clone());
    }
    if let Some(ready) = inst.ready_projector() {
        total = total.add(ready.matrix());
    }
    metrics.record("pointer sector orthogonality", ortho, 1e-12);
    metrics.record(
        "pointer sector completeness",
        total.frobenius_distance(&Matrix::identity(pd)),
        1e-12,
    );
}

fn chain_checks(metrics: &mut Metrics, scenario: &ChainScenario, projective_first: bool) {
    let result = match scenario.run() {
        Ok(r) => r,
        Err(e) => {
            metrics.fail(format!("chain evolution failed: {e}"));
            return;
        }
    };
    let ka = scenario.first().outcomes();
    let kb = scenario.second().outcomes();

    let mut sum = 0.0;
    for q in 0..ka {
        let pr = result.pr_first(q).expect("declared outcome");
        sum += pr;
        let analytic = scenario.occurrence(q).expect("declared outcome");
        metrics.record(
            "first-outcome Born vs effect expectation",
            (pr - analytic).abs(),
            1e-10,
        );
    }
    metrics.record("first-outcome normalization", (sum - 1.0).abs(), 1e-9);

    for q in 0..ka {
        let pr = result.pr_first(q).unwrap();
        if pr < 1e-9 {
            continue;
        }
        let mut csum = 0.0;
        for r in 0..kb {
            csum += result
                .conditional(q, r)
                .expect("probability above threshold");
        }
        metrics.record("conditional normalization", (csum - 1.0).abs(), 1e-9);

        let prepared = match result.prepared_state(q) {
            Ok(p) => p,
            Err(e) => {
                metrics.fail(format!("prepared state failed for outcome {q}: {e}"));
                continue;
            }
        };
        match result.prepared_state_oracle(q) {
            Ok(oracle) => match trace_distance(&prepared, &oracle) {
                Ok(t) => metrics.record("prepared state vs partial-trace oracle", t, 1e-9),
                Err(e) => metrics.fail(format!("trace distance failed: {e}")),
            },
            Err(e) => metrics.fail(format!("oracle failed for outcome {q}: {e}")),
        }
        for r in 0..kb {
            let via_joint = result.conditional(q, r).unwrap();
            match predict_conditional(&prepared, scenario.second(), r) {
                Ok(via_trace) => metrics.record(
                    "conditional: Born quotient vs prepared trace",
                    (via_joint - via_trace).abs(),
                    1e-9,
                ),
                Err(e) => metrics.fail(format!("trace-route conditional failed: {e}")),
            }
        }
        if projective_first {
            match result.collapse_deviation(q) {
                Ok(CollapseDeviation::TraceDistance(t)) => {
                    metrics.record("projective collapse deviation", t, 1e-10);
                }
                Ok(CollapseDeviation::NoCanonicalReference) => {
                    metrics.fail("projective instrument reported no collapse reference".into());
                }
                Err(e) => metrics.fail(format!("collapse deviation failed: {e}")),
            }
        }
    }
}

fn non_ideal_checks(
    metrics: &mut Metrics,
    scenario: &ChainScenario,
    sampler: &mut Sampler,
    second_is_ideal: bool,
) {
    let result = match scenario.run() {
        Ok(r) => r,
        Err(e) => {
            metrics.fail(format!("chain evolution failed: {e}"));
            return;
        }
    };
    let (basis, disturbed) = match scenario.first().spec() {
        InstrumentSpec::NonIdeal { basis, disturbed } => (basis, disturbed),
        _ => return,
    };
    let d = scenario.first().system_dim();
    let phi = scenario.initial().amplitudes();

    // first-outcome statistics are untouched by the disturbance
    for (q, bq) in basis.iter().enumerate() {
        let overlap: Complex64 = bq.iter().zip(phi).map(|(b, p)| b.conj() * p).sum();
        let pr = result.pr_first(q).unwrap();
        metrics.record(
            "non-ideal first-outcome faithfulness",
            (pr - overlap.norm_sqr()).abs(),
            1e-10,
        );
    }

    // against the closed form: the conditional is |<r|mu_q>|^2
    if second_is_ideal {
        if let InstrumentSpec::Ideal { basis: r_basis } = scenario.second().spec() {
            for q in 0..d {
                if result.pr_first(q).unwrap() < 1e-9 {
                    continue;
                }
                for (r, rvec) in r_basis.iter().enumerate() {
                    let overlap: Complex64 = rvec
                        .iter()
                        .zip(&disturbed[q])
                        .map(|(b, m)| b.conj() * m)
                        .sum();
                    let cond = result.conditional(q, r).unwrap();
                    metrics.record(
                        "non-ideal conditional matches disturbed-state overlap",
                        (cond - overlap.norm_sqr()).abs(),
                        1e-10,
                    );
                }
            }
        }
    }

    // the conditional does not depend on the incoming state
    let phi2 = sampler.state(d);
    let scenario2 = ChainScenario::new(phi2, scenario.first().clone(), scenario.second().clone())
        .expect("dimensions agree");
    let result2 = match scenario2.run() {
        Ok(r) => r,
        Err(e) => {
            metrics.fail(format!("chain evolution failed: {e}"));
            return;
        }
    };
    for q in 0..d {
        if result.pr_first(q).unwrap() < 1e-6 || result2.pr_first(q).unwrap() < 1e-6 {
            continue;
        }
        for r in 0..scenario.second().outcomes() {
            let c1 = result.conditional(q, r).unwrap();
            let c2 = result2.conditional(q, r).unwrap();
            metrics.record(
                "non-ideal conditional independence of initial state",
                (c1 - c2).abs(),
                1e-10,
            );
        }
    }
}

fn repeatability_trial(metrics: &mut Metrics, sampler: &mut Sampler) {
    let d = sampler.range(2, 4);
    let basis = sampler.basis(d);
    let make = || {
        Instrument::new(InstrumentSpec::Ideal {
            basis: basis.clone(),
        })
        .expect("orthonormalized basis validates")
    };
    let scenario = ChainScenario::new(sampler.state(d), make(), make()).expect("dims agree");
    let result = match scenario.run() {
        Ok(r) => r,
        Err(e) => {
            metrics.fail(format!("chain evolution failed: {e}"));
            return;
        }
    };
    for q in 0..d {
        if result.pr_first(q).unwrap() < 1e-9 {
            continue;
        }
        metrics.record(
            "repeated ideal measurement agreement",
            (result.conditional(q, q).unwrap() - 1.0).abs(),
            1e-10,
        );
        for r in 0..d {
            if r != q {
                metrics.record(
                    "repeated ideal measurement leakage",
                    result.conditional(q, r).unwrap(),
                    1e-10,
                );
            }
        }
    }
}

fn expect_trace_distance(
    metrics: &mut Metrics,
    deviation: Result<CollapseDeviation, ChainError>,
    context: &str,
) -> Option<f64> {
    match deviation {
        Ok(CollapseDeviation::TraceDistance(t)) => Some(t),
        Ok(CollapseDeviation::NoCanonicalReference) => {
            metrics.fail(format!("{context}: unexpected missing collapse reference"));
            None
        }
        Err(e) => {
            metrics.fail(format!("{context}: {e}"));
            None
        }
    }
}

fn fixed_scenario_checks(metrics: &mut Metrics) {
    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    // ideal qubit: both conditionals 1/2, zero deviation
    let ideal = fixtures::ideal_qubit();
    match ideal.run() {
        Ok(result) => {
            for q in 0..2 {
                for r in 0..2 {
                    metrics.record(
                        "fixture ideal: conditional is 1/2",
                        (result.conditional(q, r).unwrap() - 0.5).abs(),
                        1e-10,
                    );
                }
                if let Some(t) =
                    expect_trace_distance(metrics, result.collapse_deviation(q), "fixture ideal")
                {
                    metrics.record("fixture ideal: collapse deviation", t, 1e-10);
                }
            }
        }
        Err(e) => metrics.fail(format!("fixture ideal failed: {e}")),
    }

    // non-ideal qubit: Pr(b_0|a_1) = 1/2 against the collapse prediction 0,
    // deviation 1/sqrt(2)
    let nonideal = fixtures::nonideal_qubit();
    match nonideal.run() {
        Ok(result) => {
            metrics.record(
                "fixture non-ideal: collapse-violating conditional is 1/2",
                (result.conditional(1, 0).unwrap() - 0.5).abs(),
                1e-10,
            );
            if let Some(t) =
                expect_trace_distance(metrics, result.collapse_deviation(1), "fixture non-ideal")
            {
                metrics.record(
                    "fixture non-ideal: collapse deviation is 1/sqrt(2)",
                    (t - SQRT_HALF).abs(),
                    1e-10,
                );
            }
        }
        Err(e) => metrics.fail(format!("fixture non-ideal failed: {e}")),
    }

    // degenerate qutrit: outcome 1 prepares (|1>+|2>)/sqrt(2)
    let lueders = fixtures::lueders_qutrit();
    match lueders.prepared_state(1) {
        Ok(rho) => {
            let expect = qmchain_core::linalg::StateVector::new(
                vec![3],
                vec![
                    Complex64::new(0.0, 0.0),
                    Complex64::new(SQRT_HALF, 0.0),
                    Complex64::new(SQRT_HALF, 0.0),
                ],
            )
            .unwrap();
            let expect = qmchain_core::linalg::DensityOperator::from_pure(&expect);
            match trace_distance(&rho, &expect) {
                Ok(t) => metrics.record("fixture degenerate: prepared state", t, 1e-10),
                Err(e) => metrics.fail(format!("fixture degenerate: {e}")),
            }
            if let Some(t) =
                expect_trace_distance(metrics, lueders.collapse_deviation(1), "fixture degenerate")
            {
                metrics.record("fixture degenerate: collapse deviation", t, 1e-10);
            }
        }
        Err(e) => metrics.fail(format!("fixture degenerate failed: {e}")),
    }

    // macroscopic qubit: trace-1 PSD prepared state with purity 1/2
    let macroscopic = fixtures::macroscopic_qubit();
    match macroscopic.prepared_state(0) {
        Ok(rho) => {
            metrics.record(
                "fixture macroscopic: prepared trace",
                (rho.matrix().trace().re - 1.0).abs(),
                1e-10,
            );
            metrics.record(
                "fixture macroscopic: purity is 1/2",
                (rho.purity() - 0.5).abs(),
                1e-9,
            );
            let min = rho.eigenvalues().first().copied().unwrap_or(0.0);
            metrics.record(
                "fixture macroscopic: positivity floor",
                (-min).max(0.0),
                1e-10,
            );
            if let Some(t) = expect_trace_distance(
                metrics,
                macroscopic.collapse_deviation(0),
                "fixture macroscopic",
            ) {
                metrics.record(
                    "fixture macroscopic: collapse deviation is 1/2",
                    (t - 0.5).abs(),
                    1e-10,
                );
            }
            match macroscopic.run() {
                Ok(result) => {
                    for r in 0..2 {
                        metrics.record(
                            "fixture macroscopic: mixed-state conditionals are 1/2",
                            (result.conditional(0, r).unwrap() - 0.5).abs(),
                            1e-10,
                        );
                    }
                }
                Err(e) => metrics.fail(format!("fixture macroscopic failed: {e}")),
            }
        }
        Err(e) => metrics.fail(format!("fixture macroscopic failed: {e}")),
    }
}

fn logic_checks(metrics: &mut Metrics, sampler: &mut Sampler) {
    use qmchain_core::logic::OutcomeBasis;

    // axioms on tuple bases of total dimension 4, 8, 16
    for factors in [vec![2usize, 2], vec![2, 2, 2], vec![2, 2, 2, 2]] {
        let basis =
            OutcomeBasis::new(factors.iter().map(|&k| (0..k as i64).collect()).collect()).unwrap();
        lattice::axiom_suite(metrics, &basis, sampler, 4);
    }
    // exact distributivity, exhaustively on small bases
    for dim in 2..=4usize {
        let basis = OutcomeBasis::new(vec![(0..dim as i64).collect()]).unwrap();
        lattice::distributivity_suite(metrics, &basis, sampler);
    }
    let big = OutcomeBasis::new(vec![(0..4).collect(), (0..4).collect()]).unwrap();
    lattice::distributivity_suite(metrics, &big, sampler);
    // projector-limit meets
    lattice::meet_limit_suite(metrics, 8, sampler);
    lattice::zero_projector_demo(metrics);
}
