//! Seeded sampling for the verification harness.
//!
//! Built directly on a ChaCha stream so reports are reproducible bit for bit
//! from the seed alone.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmchain_core::linalg::{Matrix, StateVector};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in [0, 1).
    pub fn f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.rng.next_u64() % n as u64) as usize
    }

    /// Uniform in lo..=hi.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn bool(&mut self) -> bool {
        self.rng.next_u64() & 1 == 1
    }

    /// Standard normal via Box-Muller.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = (1.0 - self.f64()).max(f64::MIN_POSITIVE);
        let u2 = self.f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian())
    }

    pub fn complex_vector(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex_gaussian()).collect()
    }

    /// Normalized Gaussian state.
    pub fn state(&mut self, dim: usize) -> StateVector {
        loop {
            if let Ok(s) = StateVector::normalized(vec![dim], self.complex_vector(dim)) {
                return s;
            }
        }
    }

    /// Orthonormalized Gaussian vectors (Gram-Schmidt, re-orthogonalized).
    pub fn orthonormal_vectors(&mut self, dim: usize, count: usize) -> Vec<Vec<Complex64>> {
        assert!(count <= dim);
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(count);
        while out.len() < count {
            let mut v = self.complex_vector(dim);
            for _ in 0..2 {
                for u in &out {
                    let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= overlap * ui;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            for vi in &mut v {
                *vi /= norm;
            }
            out.push(v);
        }
        out
    }

    /// Random orthonormal basis of the whole space.
    pub fn basis(&mut self, dim: usize) -> Vec<Vec<Complex64>> {
        self.orthonormal_vectors(dim, dim)
    }

    /// Matrix with orthonormal columns (an isometry).
    pub fn isometry(&mut self, rows: usize, cols: usize) -> Matrix {
        let vs = self.orthonormal_vectors(rows, cols);
        Matrix::from_fn(rows, cols, |i, j| vs[j][i])
    }

    /// Projector of the given rank onto a random subspace.
    pub fn projector_matrix(&mut self, dim: usize, rank: usize) -> Matrix {
        let vs = self.orthonormal_vectors(dim, rank);
        let mut m = Matrix::zeros(dim, dim);
        for v in &vs {
            m = m.add(&Matrix::outer(v, v));
        }
        m
    }
}
