//! Dense complex linear algebra helpers shared by the representation code.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Kronecker product with `a` indexing the slow (outer) axis.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Largest entrywise modulus, 0 for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `(m + m*) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// `exp(t H)` for Hermitian `H`, via the eigendecomposition `H = U diag(w) U*`.
pub fn hermitian_exp(h: &CMatrix, t: f64) -> CMatrix {
    let n = h.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let eig = SymmetricEigen::new(hermitian_part(h));
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, w) in eig.eigenvalues.iter().enumerate() {
        let e = (t * w).exp();
        for i in 0..n {
            scaled[(i, j)] *= e;
        }
    }
    scaled * u.adjoint()
}

/// Block-diagonal sum `a ⊕ b`.
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: number of singular values strictly above `threshold`.
pub fn rank_above(m: &CMatrix, threshold: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > threshold).count()
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Haar-ish random unitary from the QR factor of a random complex matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    if n == 0 {
        return zeros(0, 0);
    }
    random_complex(rng, n, n).qr().q()
}

/// Random normal matrix `U diag(w) U*` with eigenvalues in the unit box.
pub fn random_normal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let u = random_unitary(rng, n);
    let mut d = zeros(n, n);
    for i in 0..n {
        d[(i, i)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    &u * d * u.adjoint()
}

/// Orthonormal basis of the column span of `m` together with its numerical rank.
/// Right singular vectors of the `k` smallest singular values of a square
/// matrix, with the largest of those values.
pub fn near_null_space(m: &CMatrix, k: usize) -> (CMatrix, f64) {
    let n = m.ncols();
    assert!(m.nrows() == n && k <= n, "square matrix and k <= n");
    if k == 0 {
        return (zeros(n, 0), 0.0);
    }
    let svd = m.clone().svd(false, true);
    let vh = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let mut basis = zeros(n, k);
    for (col, &i) in order[..k].iter().enumerate() {
        basis.set_column(col, &vh.row(i).adjoint());
    }
    (basis, svd.singular_values[order[k - 1]])
}

pub fn column_space(m: &CMatrix, rel_tol: f64) -> (CMatrix, usize) {
    if m.ncols() == 0 || m.nrows() == 0 {
        return (zeros(m.nrows(), 0), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax.max(f64::MIN_POSITIVE))
        .collect();
    idx.sort_unstable();
    let mut basis = zeros(m.nrows(), idx.len());
    for (k, &j) in idx.iter().enumerate() {
        basis.set_column(k, &u.column(j));
    }
    let r = idx.len();
    (basis, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exp_of_hermitian_matches_series_for_diagonal() {
        let mut h = zeros(2, 2);
        h[(0, 0)] = c(1.0, 0.0);
        h[(1, 1)] = c(-2.0, 0.0);
        let e = hermitian_exp(&h, 0.5);
        assert!((e[(0, 0)].re - 0.5f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-1.0f64).exp()).abs() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn exp_inverse_pair_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_complex(&mut rng, 4, 4);
        let h = hermitian_part(&a);
        let prod = hermitian_exp(&h, 0.3) * hermitian_exp(&h, -0.3);
        assert!(frobenius(&(prod - identity(4))) < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(&mut rng, 5);
        assert!(frobenius(&(&u * u.adjoint() - identity(5))) < 1e-12);
    }

    #[test]
    fn kron_slow_axis_is_first_factor() {
        let a = CMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(2.0, 0.0)]);
        let k = kron(&a, &identity(2));
        assert_eq!(k.shape(), (2, 4));
        assert_eq!(k[(0, 0)], c(1.0, 0.0));
        assert_eq!(k[(1, 1)], c(1.0, 0.0));
        assert_eq!(k[(0, 2)], c(2.0, 0.0));
        assert_eq!(k[(1, 3)], c(2.0, 0.0));
    }

    #[test]
    fn complex_schur_triangularizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_complex(&mut rng, 5, 5);
        let (q, t) = nalgebra::Schur::new(a.clone()).unpack();
        assert!(frobenius(&(&q * &t * q.adjoint() - &a)) < 1e-10);
        for i in 0..5 {
            for j in 0..i {
                assert!(t[(i, j)].norm() < 1e-10);
            }
        }
    }
}
