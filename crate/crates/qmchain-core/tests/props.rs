//! Property tests for the linear-algebra and lattice invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use qmchain_core::linalg::{
    born, composite_index, hermitian_eigen, is_isometry, partial_trace, split_index,
    DensityOperator, Matrix, Operator, Projector, StateVector,
};
use qmchain_core::logic::meet_limit;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Small deterministic generator for the matrix-heavy checks.
struct Lcg(u64);

impl Lcg {
    fn new(seed: u64) -> Self {
        Lcg(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1))
    }

    fn f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn complex(&mut self) -> Complex64 {
        c(self.f64(), self.f64())
    }

    fn vector(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex()).collect()
    }

    fn state(&mut self, n: usize) -> StateVector {
        loop {
            if let Ok(s) = StateVector::normalized(vec![n], self.vector(n)) {
                return s;
            }
        }
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.complex())
    }

    /// Orthonormal columns via Gram-Schmidt with one re-orthogonalization.
    fn orthonormal_columns(&mut self, rows: usize, cols: usize) -> Vec<Vec<Complex64>> {
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
        while out.len() < cols {
            let mut v = self.vector(rows);
            for _ in 0..2 {
                for u in &out {
                    let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= overlap * ui;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            for vi in &mut v {
                *vi /= norm;
            }
            out.push(v);
        }
        out
    }

    fn projector_of_rank(&mut self, dim: usize, rank: usize) -> Projector {
        let cols = self.orthonormal_columns(dim, rank);
        let mut m = Matrix::zeros(dim, dim);
        for col in &cols {
            m = m.add(&Matrix::outer(col, col));
        }
        Projector::new(Operator::new(vec![dim], m).unwrap()).unwrap()
    }

    fn density(&mut self, dim: usize, terms: usize) -> DensityOperator {
        let mut weights: Vec<f64> = (0..terms).map(|_| self.f64().abs() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut m = Matrix::zeros(dim, dim);
        for w in weights {
            let v = self.state(dim);
            m = m.add(&Matrix::outer(v.amplitudes(), v.amplitudes()).scale(c(w, 0.0)));
        }
        DensityOperator::new(m).unwrap()
    }
}

fn amp_strategy() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

fn state_strategy(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(amp_strategy(), dim).prop_filter_map("zero vector", move |amps| {
        StateVector::normalized(vec![dim], amps).ok()
    })
}

proptest! {
    #[test]
    fn tensor_components_follow_index_convention(
        a in state_strategy(3),
        b in state_strategy(4),
    ) {
        let t = a.tensor(&b);
        prop_assert_eq!(t.dims(), &[3, 4][..]);
        for i in 0..3 {
            for j in 0..4 {
                let flat = composite_index(&[3, 4], &[i, j]);
                let want = a.amplitude(i) * b.amplitude(j);
                prop_assert!((t.amplitude(flat) - want).norm() < 1e-12);
                prop_assert_eq!(split_index(&[3, 4], flat), vec![i, j]);
            }
        }
    }

    #[test]
    fn tensor_preserves_normalization(a in state_strategy(2), b in state_strategy(5)) {
        prop_assert!((a.tensor(&b).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn born_of_identity_is_one(s in state_strategy(6)) {
        let id = Projector::diagonal(6, 0..6);
        prop_assert!((born(&s, &id).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn born_respects_diagonal_additivity(s in state_strategy(8), mask in 0u32..256) {
        let p1 = Projector::diagonal(8, (0..8).filter(|i| mask >> i & 1 == 1));
        let p2 = p1.complement();
        let total = born(&s, &p1).unwrap() + born(&s, &p2).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}

#[test]
fn tensor_op_factorizes_over_product_vectors() {
    let mut rng = Lcg::new(7);
    for da in 2..=4usize {
        for db in 2..=4usize {
            for _ in 0..8 {
                let a = rng.matrix(da, da);
                let b = rng.matrix(db, db);
                let x = rng.vector(da);
                let y = rng.vector(db);
                let op_a = Operator::new(vec![da], a.clone()).unwrap();
                let op_b = Operator::new(vec![db], b.clone()).unwrap();
                let joint = op_a.tensor(&op_b);

                let mut xy = Vec::with_capacity(da * db);
                for xi in &x {
                    for yj in &y {
                        xy.push(xi * yj);
                    }
                }
                let lhs = joint.apply(&xy);

                let ax = a.matvec(&x);
                let by = b.matvec(&y);
                let mut rhs = Vec::with_capacity(da * db);
                for xi in &ax {
                    for yj in &by {
                        rhs.push(xi * yj);
                    }
                }
                for (l, r) in lhs.iter().zip(&rhs) {
                    assert!((l - r).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn lifted_operators_at_distinct_slots_commute() {
    let mut rng = Lcg::new(11);
    let dims = [2usize, 3, 2];
    for _ in 0..12 {
        let slots = [(0usize, 1usize), (0, 2), (1, 2)];
        for (i, j) in slots {
            let p = Operator::new(vec![dims[i]], rng.matrix(dims[i], dims[i])).unwrap();
            let q = Operator::new(vec![dims[j]], rng.matrix(dims[j], dims[j])).unwrap();
            let lp = Operator::lift(&p, i, &dims).unwrap();
            let lq = Operator::lift(&q, j, &dims).unwrap();
            let commutator = lp
                .matrix()
                .mul(lq.matrix())
                .sub(&lq.matrix().mul(lp.matrix()));
            assert!(commutator.frobenius_norm() <= 1e-12);
        }
    }
}

#[test]
fn born_additive_over_orthogonal_projector_sum() {
    let mut rng = Lcg::new(23);
    for _ in 0..20 {
        let dim = 6;
        let cols = rng.orthonormal_columns(dim, 5);
        let (first, second) = cols.split_at(2);
        let mut m1 = Matrix::zeros(dim, dim);
        for col in first {
            m1 = m1.add(&Matrix::outer(col, col));
        }
        let mut m2 = Matrix::zeros(dim, dim);
        for col in second {
            m2 = m2.add(&Matrix::outer(col, col));
        }
        let p1 = Projector::new(Operator::new(vec![dim], m1.clone()).unwrap()).unwrap();
        let p2 = Projector::new(Operator::new(vec![dim], m2.clone()).unwrap()).unwrap();
        // P1 P2 = 0 by construction, so the sum is itself a projector
        assert!(m1.mul(&m2).frobenius_norm() < 1e-12);
        let sum = Projector::new(Operator::new(vec![dim], m1.add(&m2)).unwrap()).unwrap();
        let s = rng.state(dim);
        let direct = born(&s, &sum).unwrap();
        let split = born(&s, &p1).unwrap() + born(&s, &p2).unwrap();
        assert!((direct - split).abs() < 1e-10);
    }
}

#[test]
fn partial_trace_of_tensor_recovers_kept_factor() {
    let mut rng = Lcg::new(31);
    for _ in 0..10 {
        let (da, db) = (3usize, 2usize);
        let rho_a = rng.density(da, 2);
        let rho_b = rng.density(db, 3);
        let joint = DensityOperator::new(rho_a.matrix().kron(rho_b.matrix())).unwrap();
        let back_a = partial_trace(&joint, &[da, db], 0).unwrap();
        let back_b = partial_trace(&joint, &[da, db], 1).unwrap();
        assert!(back_a.matrix().frobenius_distance(rho_a.matrix()) < 1e-10);
        assert!(back_b.matrix().frobenius_distance(rho_b.matrix()) < 1e-10);
        // trace preserved on arbitrary slots
        assert!((back_a.matrix().trace().re - 1.0).abs() < 1e-10);
    }
}

#[test]
fn gram_schmidt_columns_form_isometries() {
    let mut rng = Lcg::new(41);
    for _ in 0..10 {
        let cols = rng.orthonormal_columns(6, 3);
        let mut v = Matrix::zeros(6, 3);
        for (j, col) in cols.iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                v.set(i, j, *z);
            }
        }
        let check = is_isometry(&v);
        assert!(check.pass, "residual {}", check.residual);
    }
}

#[test]
fn meet_limit_matches_intersection_oracle() {
    let mut rng = Lcg::new(53);
    for dim in [4usize, 6, 8] {
        for _ in 0..8 {
            let r1 = 1 + (rng.f64().abs() * (dim - 1) as f64) as usize;
            let r2 = 1 + (rng.f64().abs() * (dim - 1) as f64) as usize;
            let p1 = rng.projector_of_rank(dim, r1.min(dim - 1));
            let p2 = rng.projector_of_rank(dim, r2.min(dim - 1));
            let limit = match meet_limit(&p1, &p2) {
                Ok(l) => l,
                // legitimately reported for near-parallel ranges; not hit for
                // generic random inputs
                Err(e) => panic!("unexpected non-convergence: {e}"),
            };
            // oracle: eigenvectors of P1 + P2 with eigenvalue 2 span the
            // intersection of the ranges
            let sum = p1.matrix().add(p2.matrix());
            let eig = hermitian_eigen(&sum);
            let mut oracle = Matrix::zeros(dim, dim);
            for (k, lambda) in eig.values.iter().enumerate() {
                if *lambda >= 2.0 - 1e-8 {
                    let col: Vec<Complex64> = (0..dim).map(|i| eig.vectors.get(i, k)).collect();
                    oracle = oracle.add(&Matrix::outer(&col, &col));
                }
            }
            assert!(
                limit.matrix().frobenius_distance(&oracle) < 1e-9,
                "dim {dim}: limit and intersection oracle disagree"
            );
        }
    }
}
