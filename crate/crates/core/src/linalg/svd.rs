//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! One-sided Jacobi orthogonalizes the columns of the working matrix with
//! exact plane rotations, which makes it accurate for the small, often
//! structured matrices this crate deals in: tiny singular values come out
//! at machine precision relative to the largest one, and the right singular
//! vectors (used for nullspaces) are an accumulated product of unitaries.
//! Everything here is deterministic, so kernel bases are reproducible.

use num_complex::Complex64;

use super::matrix::CMatrix;

/// Result of `svd`: `a = u * diag(singular_values) * v^H` with the singular
/// values sorted in descending order. `u` is `rows x cols` (columns for zero
/// singular values are zero vectors), `v` is `cols x cols` unitary.
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

const MAX_SWEEPS: usize = 64;
const JACOBI_TOL: f64 = 1e-14;

/// Full (thin) SVD of a rectangular complex matrix.
pub fn svd(a: &CMatrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::ZERO;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    app += wp.norm_sqr();
                    aqq += wq.norm_sqr();
                    apq += wp.conj() * wq;
                }
                let off = apq.norm();
                if app == 0.0 || aqq == 0.0 || off <= JACOBI_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;

                // Zero the (p,q) entry of the column Gram matrix with the
                // unitary rotation [[c, -s*phase], [s*conj(phase), c]].
                let phase = apq / off;
                let tau = (aqq - app) / (2.0 * off);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;

                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = wp * c + wq * phase.conj() * s;
                    w[(i, q)] = -wp * phase * s + wq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c + vq * phase.conj() * s;
                    v[(i, q)] = -vp * phase * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort them descending and
    // permute u and v to match.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let mut u = CMatrix::zeros(m, n);
    let mut v_sorted = CMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        singular_values.push(sigma);
        if sigma > 0.0 {
            for i in 0..m {
                u[(i, dst)] = w[(i, src)] / sigma;
            }
        }
        for i in 0..n {
            v_sorted[(i, dst)] = v[(i, src)];
        }
    }

    Svd {
        u,
        singular_values,
        v: v_sorted,
    }
}

/// Largest singular value. Zero for empty shapes.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    svd(a).singular_values[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent oracle: power iteration on a^H a gives the largest
    /// singular value squared.
    fn power_iteration_norm(a: &CMatrix) -> f64 {
        let gram = a.adjoint().mul(a);
        let n = gram.rows();
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| c(1.0 + 0.1 * i as f64, 0.3 - 0.05 * i as f64))
            .collect();
        let mut lambda = 0.0;
        for _ in 0..20_000 {
            let mut y = vec![Complex64::ZERO; n];
            for i in 0..n {
                for j in 0..n {
                    y[i] += gram[(i, j)] * x[j];
                }
            }
            let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            for z in &mut y {
                *z /= norm;
            }
            let prev = lambda;
            lambda = norm;
            x = y;
            if (lambda - prev).abs() <= 1e-15 * lambda.max(1.0) {
                break;
            }
        }
        lambda.sqrt()
    }

    fn pseudo_random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
        // Small deterministic LCG; quality is irrelevant here.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        CMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    #[test]
    fn identity_has_norm_one() {
        assert!((operator_norm(&CMatrix::identity(3)) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn diagonal_norm_is_largest_entry() {
        let d = CMatrix::diagonal(&[0.5, 0.25]);
        assert!((operator_norm(&d) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn random_norm_matches_power_iteration() {
        for seed in 0..5 {
            let a = pseudo_random_matrix(5, 5, seed + 7);
            let jacobi = operator_norm(&a);
            let power = power_iteration_norm(&a);
            assert!(
                (jacobi - power).abs() <= 1e-9 * power.max(1.0),
                "seed {seed}: {jacobi} vs {power}"
            );
        }
    }

    #[test]
    fn reconstruction_and_unitarity() {
        let a = pseudo_random_matrix(6, 4, 42);
        let Svd {
            u,
            singular_values,
            v,
        } = svd(&a);
        let sigma = CMatrix::diagonal(&singular_values);
        let back = u.mul(&sigma).mul(&v.adjoint());
        assert!(back.sub(&a).max_abs() <= 1e-12);
        let vhv = v.adjoint().mul(&v).sub(&CMatrix::identity(4));
        assert!(vhv.max_abs() <= 1e-13);
    }

    #[test]
    fn wide_matrix_has_trailing_zero_singular_values() {
        let a = pseudo_random_matrix(2, 5, 3);
        let s = svd(&a).singular_values;
        assert_eq!(s.len(), 5);
        assert!(s[2] <= 1e-12 * s[0]);
        assert!(s[3] <= 1e-12 * s[0]);
        assert!(s[4] <= 1e-12 * s[0]);
    }

    #[test]
    fn adjoint_has_same_norm() {
        for seed in 0..8 {
            let a = pseudo_random_matrix(4, 6, seed);
            let direct = operator_norm(&a);
            let adj = operator_norm(&a.adjoint());
            assert!((direct - adj).abs() <= 1e-12 * direct.max(1.0));
        }
    }
}
