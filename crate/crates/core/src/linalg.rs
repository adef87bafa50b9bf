//! Dense complex linear algebra for the small matrices that show up here
//! (side ≤ 64): Hermitian eigensystems by cyclic Jacobi, trace norms and a
//! few helpers.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::TOL;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Serialized form of a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ReIm {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ReIm> for C64 {
    fn from(z: ReIm) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Largest entrywise modulus of `a - b`. Panics on shape mismatch.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Validation(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = hermiticity_defect(m);
    if defect > tol {
        return Err(Error::Validation(format!(
            "matrix not Hermitian: max |M - M^dagger| = {defect:e}"
        )));
    }
    Ok(())
}

/// Real spectrum (ascending) with orthonormal eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// Eigenpairs with λ < -threshold.
    pub fn negative_pairs(&self, threshold: f64) -> Vec<(f64, CVector)> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l < -threshold)
            .map(|(i, &l)| (l, self.vector(i)))
            .collect()
    }

    /// Σ|λ|.
    pub fn abs_sum(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Stops once the off-diagonal Frobenius norm falls below
/// `1e-13 * max(1, ‖M‖_F)`.
pub fn hermitian_eigensystem(m: &CMatrix) -> Result<EigenSystem> {
    check_hermitian(m, TOL.herm)?;
    let n = m.nrows();
    // Symmetrize so that rounding in the input does not leak into the rotations.
    let mut a = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n, n);
    let scale = a.norm().max(1.0);
    let stop = TOL.jacobi_off * scale;

    let off_norm = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&a) < stop;
    let mut sweeps = 0;
    while !converged {
        if sweeps == TOL.jacobi_max_sweeps {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge in {} sweeps (off-diagonal norm {:e})",
                TOL.jacobi_max_sweeps,
                off_norm(&a)
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // U = I except U_pp = U_qq = c, U_pq = s·e^{iθ}, U_qp = -s·e^{-iθ}.
                let u_pp = cr(cs);
                let u_qq = cr(cs);
                let u_pq = phase * sn;
                let u_qp = -phase.conj() * sn;
                // A ← A U (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                // A ← U† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
        converged = off_norm(&a) < stop;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, col| v[(r, order[col])]);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Sum of singular values. Computed through an SVD, independently of the
/// Jacobi eigensolver.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Σ v v† over the given vectors.
pub fn projector<'a>(vectors: impl IntoIterator<Item = &'a CVector>, dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for v in vectors {
        p += v * v.adjoint();
    }
    p
}

/// Re Tr(A B) without forming the product.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..n {
            s += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    s
}

/// `x` rounded to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

/// max |U†U - 1|.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        &g + g.adjoint()
    }

    #[test]
    fn pauli_y_spectrum() {
        let es = hermitian_eigensystem(&sigma_y()).unwrap();
        assert!((es.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((es.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_spectrum() {
        let es = hermitian_eigensystem(&CMatrix::identity(8, 8)).unwrap();
        assert!(es.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert!(matches!(
            hermitian_eigensystem(&m),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn residuals_and_orthonormality() {
        for (n, seed) in [(4, 1), (8, 2), (16, 3), (32, 4)] {
            let m = random_hermitian(n, seed);
            let es = hermitian_eigensystem(&m).unwrap();
            for i in 0..n {
                let v = es.vector(i);
                let r = (&m * &v - v.clone() * cr(es.eigenvalues[i])).norm();
                assert!(r <= 1e-10, "residual {r}");
            }
            let gram = es.eigenvectors.adjoint() * &es.eigenvectors;
            assert!(max_abs_diff(&gram, &CMatrix::identity(n, n)) <= 1e-10);
            assert!(es.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn agrees_with_library_eigensolver() {
        let m = random_hermitian(8, 11);
        let ours = hermitian_eigensystem(&m).unwrap().eigenvalues;
        let mut theirs: Vec<f64> = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_norm_two_routes() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![cr(1.0), cr(-1.0)]));
        assert!((trace_norm(&d) - 2.0).abs() < 1e-15);
        for seed in 0..10 {
            let m = random_hermitian(8, 100 + seed);
            let es = hermitian_eigensystem(&m).unwrap();
            assert!((trace_norm(&m) - es.abs_sum()).abs() < 1e-10);
        }
    }
}
