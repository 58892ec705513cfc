//! Small dense Hermitian helpers shared by the oracles and the test suites.
//!
//! Complex Hermitian problems are mapped onto the real symmetric embedding
//! `H = X + iY  ->  [[X, -Y], [Y, X]]`, whose spectrum is that of `H` with
//! every eigenvalue doubled. This keeps all eigensolves on the well-trodden
//! real symmetric path.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Dense complex matrix in row-major storage with its dimension.
fn embed(h: &[C64], d: usize) -> DMatrix<f64> {
    assert_eq!(h.len(), d * d);
    let mut m = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = h[i * d + j];
            m[(i, j)] = z.re;
            m[(i + d, j + d)] = z.re;
            m[(i, j + d)] = -z.im;
            m[(i + d, j)] = z.im;
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix (row-major `d x d`), ascending.
///
/// The input is symmetrized as `(H + H†)/2` first, so small Hermiticity
/// defects are tolerated.
pub fn hermitian_eigenvalues(h: &[C64], d: usize) -> Vec<f64> {
    let mut sym = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            sym[i * d + j] = 0.5 * (h[i * d + j] + h[j * d + i].conj());
        }
    }
    let mut vals: Vec<f64> = embed(&sym, d).symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Every eigenvalue of H appears twice in the embedding.
    vals.into_iter().step_by(2).collect()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(h: &[C64], d: usize) -> f64 {
    hermitian_eigenvalues(h, d)[0]
}

/// Full Hermitian eigendecomposition: ascending eigenvalues and an
/// orthonormal set of complex eigenvectors (row-major, one per row).
///
/// Every real eigenvector `(x; y)` of the embedding maps to the complex
/// candidate `x + i y`, and each eigenvalue appears twice (the partner maps
/// to `i` times the same complex direction). Pivoted Gram-Schmidt over all
/// `2d` candidates selects one complex direction per pair; pivoting by
/// residual norm keeps near-degenerate clusters from crowding out genuine
/// directions.
pub fn hermitian_eigen(h: &[C64], d: usize) -> (Vec<f64>, Vec<Vec<C64>>) {
    let mut sym = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            sym[i * d + j] = 0.5 * (h[i * d + j] + h[j * d + i].conj());
        }
    }
    let eig = embed(&sym, d).symmetric_eigen();
    let mut cands: Vec<(f64, Vec<C64>)> = (0..2 * d)
        .map(|idx| {
            let col = eig.eigenvectors.column(idx);
            let z: Vec<C64> = (0..d).map(|i| C64::new(col[i], col[i + d])).collect();
            (eig.eigenvalues[idx], z)
        })
        .collect();

    let norm_of = |z: &[C64]| z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let mut accepted: Vec<(f64, Vec<C64>)> = Vec::with_capacity(d);
    while accepted.len() < d {
        let (best, _) = cands
            .iter()
            .enumerate()
            .map(|(i, (_, z))| (i, norm_of(z)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("candidate pool exhausted");
        let (lambda, mut v) = cands.swap_remove(best);
        // Re-orthogonalize the pivot against what is already accepted.
        for _ in 0..2 {
            for (_, a) in &accepted {
                let overlap: C64 = a.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ai) in v.iter_mut().zip(a) {
                    *vi -= overlap * ai;
                }
            }
        }
        let n = norm_of(&v);
        assert!(n > 1e-6, "eigenvector reconstruction lost a direction");
        for x in v.iter_mut() {
            *x /= n;
        }
        // Remove the new direction from every remaining candidate.
        for (_, z) in cands.iter_mut() {
            let overlap: C64 = v.iter().zip(z.iter()).map(|(x, y)| x.conj() * y).sum();
            for (zi, vi) in z.iter_mut().zip(&v) {
                *zi -= overlap * vi;
            }
        }
        accepted.push((lambda, v));
    }
    accepted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let vals = accepted.iter().map(|(l, _)| *l).collect();
    let vecs = accepted.into_iter().map(|(_, v)| v).collect();
    (vals, vecs)
}

fn matmul(a: &[C64], b: &[C64], d: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

/// Hermitian square root built from the eigendecomposition; negative
/// eigenvalues from rounding are clamped to zero.
pub fn hermitian_sqrt(h: &[C64], d: usize) -> Vec<C64> {
    let (vals, vecs) = hermitian_eigen(h, d);
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for (lambda, v) in vals.iter().zip(&vecs) {
        let s = lambda.max(0.0).sqrt();
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] += s * v[i] * v[j].conj();
            }
        }
    }
    out
}

/// Uhlmann fidelity `F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`
/// between two density matrices (row-major `d x d`).
pub fn state_fidelity(rho: &[C64], sigma: &[C64], d: usize) -> f64 {
    let root = hermitian_sqrt(rho, d);
    let inner = matmul(&matmul(&root, sigma, d), &root, d);
    let vals = hermitian_eigenvalues(&inner, d);
    let tr: f64 = vals.iter().map(|&v| v.max(0.0).sqrt()).sum();
    tr * tr
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(rng: &mut SmallRng, d: usize) -> Vec<C64> {
        let mut h = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            h[i * d + i] = C64::new(rng.gen_range(-2.0..2.0), 0.0);
            for j in (i + 1)..d {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[i * d + j] = z;
                h[j * d + i] = z.conj();
            }
        }
        h
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let d = 3;
        let mut h = vec![C64::new(0.0, 0.0); 9];
        h[0] = C64::new(3.0, 0.0);
        h[4] = C64::new(-1.0, 0.0);
        h[8] = C64::new(2.0, 0.0);
        let vals = hermitian_eigenvalues(&h, d);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let mut rng = SmallRng::seed_from_u64(7);
        for &d in &[2usize, 5, 9] {
            let h = random_hermitian(&mut rng, d);
            let (vals, vecs) = hermitian_eigen(&h, d);
            // Orthonormality.
            for i in 0..d {
                for j in 0..d {
                    let dot: C64 = vecs[i]
                        .iter()
                        .zip(&vecs[j])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - C64::new(expect, 0.0)).norm() < 1e-10);
                }
            }
            // H = sum_k lambda_k v_k v_k^dagger.
            let mut rec = vec![C64::new(0.0, 0.0); d * d];
            for (lambda, v) in vals.iter().zip(&vecs) {
                for i in 0..d {
                    for j in 0..d {
                        rec[i * d + j] += *lambda * v[i] * v[j].conj();
                    }
                }
            }
            for (a, b) in rec.iter().zip(&h) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn eigen_handles_degenerate_spectrum() {
        // 2x2 identity: both candidates collapse onto one complex direction
        // per eigenvalue; reconstruction must still find two.
        let h = vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        let (vals, vecs) = hermitian_eigen(&h, 2);
        assert_eq!(vecs.len(), 2);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_pure_states_is_overlap() {
        // rho = |0><0|, sigma = |psi><psi| with |<0|psi>|^2 = 0.36.
        let d = 2;
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let mut rho = vec![C64::new(0.0, 0.0); 4];
        rho[0] = C64::new(1.0, 0.0);
        let mut sigma = vec![C64::new(0.0, 0.0); 4];
        for i in 0..d {
            for j in 0..d {
                sigma[i * d + j] = psi[i] * psi[j].conj();
            }
        }
        let f = state_fidelity(&rho, &sigma, d);
        assert!((f - 0.36).abs() < 1e-10);
        assert!((state_fidelity(&sigma, &sigma, d) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigen_rank_deficient_with_noise() {
        // A low-rank density matrix plus rounding-scale noise: the null
        // cluster must not crowd out the macroscopic eigenvectors.
        let d = 16;
        let mut rng = SmallRng::seed_from_u64(3);
        let mut v1 = vec![C64::new(0.0, 0.0); d];
        let mut v2 = vec![C64::new(0.0, 0.0); d];
        for i in 0..d {
            v1[i] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            v2[i] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n1: f64 = v1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let n2: f64 = v2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut rho = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                rho[i * d + j] = 0.7 * v1[i] * v1[j].conj() / (n1 * n1)
                    + 0.3 * v2[i] * v2[j].conj() / (n2 * n2)
                    + 1e-13 * C64::new(rng.gen_range(-1.0..1.0), 0.0) * if i == j { 1.0 } else { 0.0 };
            }
        }
        let f = state_fidelity(&rho, &rho, d);
        assert!((f - 1.0).abs() < 1e-6, "self fidelity {f}");
    }

    #[test]
    fn fidelity_with_maximally_mixed() {
        let d = 4;
        let mut rho = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            rho[i * d + i] = C64::new(0.25, 0.0);
        }
        let mut pure = vec![C64::new(0.0, 0.0); d * d];
        pure[0] = C64::new(1.0, 0.0);
        let f = state_fidelity(&rho, &pure, d);
        assert!((f - 0.25).abs() < 1e-10);
    }
}
