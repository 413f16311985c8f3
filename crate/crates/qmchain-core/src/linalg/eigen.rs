use alloc::vec::Vec;

use super::matrix::Matrix;

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order and the matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi diagonalization with complex rotations.
///
/// Operates on the Hermitian part of `m`. Sweeps stop once the off-diagonal
/// norm reaches rounding level, which takes a handful of sweeps at the
/// dimensions this crate handles (a few hundred at most).
pub fn hermitian_eigen(m: &Matrix) -> HermitianEigen {
    assert!(m.is_square(), "eigendecomposition requires a square matrix");
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = Matrix::identity(n);
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: v,
        };
    }
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let abs = apq.norm();
                if abs <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = apq.unscale(abs);
                let tau = (aqq - app) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotation differs from the identity in the (p,q) block:
                //   U[p][p] = c, U[p][q] = s·phase, U[q][p] = −s·conj(phase), U[q][q] = c,
                // chosen so (U† A U)[p][q] = 0.
                let sp = phase.scale(s);
                let spc = phase.conj().scale(s);
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip.scale(c) - spc * aiq);
                    a.set(i, q, sp * aip + aiq.scale(c));
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj.scale(c) - sp * aqj);
                    a.set(q, j, spc * apj + aqj.scale(c));
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip.scale(c) - spc * viq);
                    v.set(i, q, sp * vip + viq.scale(c));
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    HermitianEigen { values, vectors }
}
