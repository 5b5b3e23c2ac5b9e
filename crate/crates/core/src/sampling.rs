//! Seeded random generators for matrices, unitaries and commuting
//! contraction tuples. Everything is driven by an explicit RNG so callers
//! can reproduce any run from its seed.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::CMatrix;
use crate::tuples::OperatorTuple;

/// Standard complex Gaussian entry (real and imaginary parts N(0, 1/2)).
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(radius * angle.cos(), radius * angle.sin()) / 2.0_f64.sqrt()
}

/// Matrix of independent complex Gaussians.
pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-ish random unitary: QR of a complex Ginibre matrix via modified
/// Gram-Schmidt with re-orthogonalization, phases fixed by the diagonal.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_matrix(dim, dim, rng);
    let mut q: Vec<Vec<Complex64>> = (0..dim).map(|j| g.column(j)).collect();
    for j in 0..dim {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..dim).map(|i| q[k][i].conj() * q[j][i]).sum();
                let (left, right) = q.split_at_mut(j);
                for (target, source) in right[0].iter_mut().zip(&left[k]) {
                    *target -= proj * source;
                }
            }
        }
        let norm = q[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A Ginibre matrix is almost surely nonsingular; regenerate the
        // column in the measure-zero degenerate case.
        if norm < 1e-12 {
            for z in q[j].iter_mut() {
                *z = complex_gaussian(rng);
            }
            let n2 = q[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in q[j].iter_mut() {
                *z /= n2;
            }
        } else {
            for z in q[j].iter_mut() {
                *z /= norm;
            }
        }
    }
    CMatrix::from_fn(dim, dim, |i, j| q[j][i])
}

/// Random point in the closed complex disk of the given radius.
pub fn random_disk_point<R: Rng>(radius: f64, rng: &mut R) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let angle = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    Complex64::new(r * angle.cos(), r * angle.sin())
}

/// Tuple of mutually commuting operators with prescribed norms, built as a
/// common random unitary conjugating independent diagonals. Each component
/// has operator norm exactly `norms[i]` up to rounding.
pub fn random_commuting_tuple<R: Rng>(dim: usize, norms: &[f64], rng: &mut R) -> OperatorTuple {
    let q = random_unitary(dim, rng);
    let q_adj = q.adjoint();
    let ops = norms
        .iter()
        .map(|&target| {
            let mut diag: Vec<Complex64> = (0..dim)
                .map(|_| {
                    let angle = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                    let modulus = rng.random::<f64>();
                    Complex64::from_polar(modulus, angle)
                })
                .collect();
            let max_modulus = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if max_modulus > 0.0 {
                let factor = target / max_modulus;
                for z in &mut diag {
                    *z *= factor;
                }
            } else if target > 0.0 {
                diag[0] = Complex64::new(target, 0.0);
            }
            let d = CMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    diag[i]
                } else {
                    Complex64::ZERO
                }
            });
            q.mul(&d).mul(&q_adj)
        })
        .collect();
    OperatorTuple::new(ops).expect("constructed square operators")
}
