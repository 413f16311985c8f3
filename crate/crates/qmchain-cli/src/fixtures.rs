//! Built-in reference scenarios, mirrored by the shipped JSON files under
//! `examples/`.

use num_complex::Complex64;

use qmchain_core::chain::ChainScenario;
use qmchain_core::instruments::{CoefficientTensor, Instrument, InstrumentSpec};
use qmchain_core::linalg::{Matrix, StateVector};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn z_basis() -> Vec<Vec<Complex64>> {
    vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(1.0)]]
}

fn x_basis() -> Vec<Vec<Complex64>> {
    vec![
        vec![cr(SQRT_HALF), cr(SQRT_HALF)],
        vec![cr(SQRT_HALF), cr(-SQRT_HALF)],
    ]
}

fn ideal(basis: Vec<Vec<Complex64>>) -> Instrument {
    Instrument::new(InstrumentSpec::Ideal { basis }).expect("fixture instruments are valid")
}

fn plus() -> StateVector {
    StateVector::new(vec![2], vec![cr(SQRT_HALF), cr(SQRT_HALF)]).unwrap()
}

/// (|0⟩+|1⟩)/√2 measured along z, then along x: both conditionals ½ and zero
/// collapse deviation.
pub fn ideal_qubit() -> ChainScenario {
    ChainScenario::new(plus(), ideal(z_basis()), ideal(x_basis())).unwrap()
}

/// Non-ideal z instrument that leaves |0⟩ alone but maps |1⟩ to (|0⟩+|1⟩)/√2,
/// followed by an ideal z measurement: Pr(b_0|a_1) = ½ where the collapse
/// postulate predicts 0, with deviation 1/√2.
pub fn nonideal_qubit() -> ChainScenario {
    let first = Instrument::new(InstrumentSpec::NonIdeal {
        basis: z_basis(),
        disturbed: vec![vec![cr(1.0), cr(0.0)], vec![cr(SQRT_HALF), cr(SQRT_HALF)]],
    })
    .unwrap();
    ChainScenario::new(plus(), first, ideal(z_basis())).unwrap()
}

/// Degenerate measurement on a qutrit separating {|0⟩} from span{|1⟩,|2⟩};
/// outcome 1 prepares the pure state (|1⟩+|2⟩)/√2.
pub fn lueders_qutrit() -> ChainScenario {
    let mut pi0 = Matrix::zeros(3, 3);
    pi0.set(0, 0, cr(1.0));
    let mut pi1 = Matrix::zeros(3, 3);
    pi1.set(1, 1, cr(1.0));
    pi1.set(2, 2, cr(1.0));
    let first = Instrument::new(InstrumentSpec::IdealDegenerate {
        projectors: vec![pi0, pi1],
    })
    .unwrap();
    let second = Instrument::new(InstrumentSpec::Ideal {
        basis: vec![
            vec![cr(1.0), cr(0.0), cr(0.0)],
            vec![cr(0.0), cr(1.0), cr(0.0)],
            vec![cr(0.0), cr(0.0), cr(1.0)],
        ],
    })
    .unwrap();
    let s = 1.0 / 3f64.sqrt();
    let initial = StateVector::new(vec![3], vec![cr(s), cr(s), cr(s)]).unwrap();
    ChainScenario::new(initial, first, second).unwrap()
}

/// Macroscopic qubit instrument whose hidden labels entangle with the system:
/// outcome 0 prepares the maximally mixed state (purity ½) from a pure input.
pub fn macroscopic_qubit() -> ChainScenario {
    let images = vec![
        vec![
            cr(0.0),
            cr(SQRT_HALF),
            cr(0.0),
            cr(0.0),
            cr(0.0),
            cr(SQRT_HALF),
        ],
        vec![cr(0.0), cr(0.0), cr(0.0), cr(1.0), cr(0.0), cr(0.0)],
    ];
    let first = Instrument::new(InstrumentSpec::Macroscopic {
        coefficients: CoefficientTensor::from_images(3, 0, &images).unwrap(),
        initial_label: 0,
    })
    .unwrap();
    ChainScenario::new(StateVector::basis(2, 0).unwrap(), first, ideal(x_basis())).unwrap()
}
