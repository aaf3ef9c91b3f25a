use nalgebra::Schur;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Largest size handled by exact expansion in [`char_poly_invariants`].
pub const EXACT_CHARPOLY_MAX: usize = 6;
pub const DEFAULT_GRID_TOL: f64 = 1e-6;
const SPECTRUM_ATTEMPTS: u64 = 5;

/// `[e_1, ..., e_N]`, the elementary symmetric functions of the eigenvalues
/// (`e_1` the trace, `e_N` the determinant).
pub fn char_poly_invariants(a: &CMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", a.nrows(), a.ncols())));
    }
    let n = a.nrows();
    if n <= EXACT_CHARPOLY_MAX {
        let c = berkowitz(a);
        // det(xI - A) = sum_k (-1)^k e_k x^{n-k}
        return Ok((1..=n).map(|k| if k % 2 == 0 { c[k] } else { -c[k] }).collect());
    }
    Ok(elementary_symmetric(&eigenvalues(a)))
}

/// Coefficients `c_0 = 1, c_1, ..., c_n` of `det(xI - A)`, division free.
fn berkowitz(a: &CMatrix) -> Vec<Complex64> {
    let n = a.nrows();
    let mut v = vec![Complex64::new(1.0, 0.0)];
    for r in 0..n {
        // Toeplitz column for the leading (r+1)x(r+1) block
        let row = a.view((r, 0), (1, r)).into_owned();
        let mut col = a.view((0, r), (r, 1)).into_owned();
        let lead = a.view((0, 0), (r, r)).into_owned();
        let mut t = vec![Complex64::new(1.0, 0.0), -a[(r, r)]];
        for _ in 0..r {
            t.push(-(&row * &col)[(0, 0)]);
            col = &lead * col;
        }
        let mut next = vec![Complex64::new(0.0, 0.0); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate().take(i + 1) {
                *slot += t[i - j] * vj;
            }
        }
        v = next;
    }
    v
}

fn elementary_symmetric(values: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); values.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (k, &x) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            let prev = e[j - 1];
            e[j] += prev * x;
        }
    }
    e.remove(0);
    e
}

pub fn eigenvalues(a: &CMatrix) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    Schur::new(a.clone()).eigenvalues().expect("complex Schur form is triangular").iter().copied().collect()
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Joint eigenvalue tuples of commuting diagonalizable matrices, with
/// multiplicity, sorted lexicographically.
///
/// A random linear combination is diagonalized; each eigenvalue cluster
/// spans a common eigenspace on which every input must act as a scalar.
pub fn joint_spectrum(mats: &[CMatrix], tol: f64, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    let Some(first) = mats.first() else {
        return Err(Error::Precondition("no matrices".into()));
    };
    let n = first.nrows();
    if let Some(m) = mats.iter().find(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} among {n}x{n} matrices",
            m.nrows(),
            m.ncols()
        )));
    }
    if mats.iter().any(|m| !linalg::is_finite(m)) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let comm = linalg::frobenius(&(&mats[i] * &mats[j] - &mats[j] * &mats[i]));
            if comm > tol {
                return Err(Error::NotCommuting(comm));
            }
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    for attempt in 0..SPECTRUM_ATTEMPTS {
        if let Some(tuples) = try_joint_spectrum(mats, seed.wrapping_add(attempt)) {
            return Ok(tuples);
        }
    }
    Err(Error::DefectiveCombination)
}

fn try_joint_spectrum(mats: &[CMatrix], seed: u64) -> Option<Vec<Vec<Complex64>>> {
    let n = mats[0].nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut combo = CMatrix::zeros(n, n);
    for m in mats {
        combo += m * Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let scale = linalg::frobenius(&combo).max(1.0);
    let gap = 1e-6 * scale;
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for lam in eigenvalues(&combo) {
        match clusters.iter_mut().find(|c| (c[0] - lam).norm() <= gap) {
            Some(c) => c.push(lam),
            None => clusters.push(vec![lam]),
        }
    }
    let mut tuples = Vec::with_capacity(n);
    for cluster in clusters {
        let k = cluster.len();
        let mean = cluster.iter().sum::<Complex64>() / k as f64;
        let shifted = &combo - CMatrix::identity(n, n) * mean;
        let (basis, worst) = linalg::near_null_space(&shifted, k);
        if worst > 1e-5 * scale {
            return None;
        }
        let mut values = Vec::with_capacity(mats.len());
        for m in mats {
            let block = basis.adjoint() * m * &basis;
            let value = block.trace() / k as f64;
            let off = linalg::frobenius(&(&block - CMatrix::identity(k, k) * value));
            if off > 1e-6 * linalg::frobenius(m).max(1.0) {
                return None;
            }
            values.push(value);
        }
        tuples.extend(std::iter::repeat_n(values, k));
    }
    tuples.sort_by(|a, b| lex_cmp(a, b));
    Some(tuples)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub is_grid: bool,
    /// One multiset per factor when the tuples form a grid.
    pub factors: Option<Vec<Vec<Complex64>>>,
}

/// Whether a multiset of `n_1 ⋯ n_r` tuples equals `A_1 × ⋯ × A_r` for
/// multisets `A_s` of nonzero numbers of sizes `n_s`.
///
/// `tol` is absolute for entries of modulus up to `1e3` and scales with the
/// largest entry beyond that.
pub fn grid_test_r(tuples: &[Vec<Complex64>], dims: &[usize], tol: f64) -> Result<GridResult> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Precondition("factor sizes must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let total: usize = dims.iter().product();
    if tuples.len() != total {
        return Err(Error::DimensionMismatch(format!("{} tuples for a grid of {total}", tuples.len())));
    }
    if let Some(t) = tuples.iter().find(|t| t.len() != dims.len()) {
        return Err(Error::ArityMismatch(format!("tuple of length {} for {} factors", t.len(), dims.len())));
    }
    let biggest = tuples.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if tuples.iter().flatten().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("tuple entry".into()));
    }
    let tol = tol * (biggest / 1e3).max(1.0);
    if tuples.iter().flatten().any(|z| z.norm() <= tol) {
        return Err(Error::ZeroEigenvalue);
    }
    let factors = split_grid(tuples.to_vec(), dims, tol);
    Ok(GridResult {
        is_grid: factors.is_some(),
        factors,
    })
}

pub fn grid_test(pairs: &[(Complex64, Complex64)], n: usize, m: usize, tol: f64) -> Result<GridResult> {
    let tuples: Vec<Vec<Complex64>> = pairs.iter().map(|&(a, b)| vec![a, b]).collect();
    grid_test_r(&tuples, &[n, m], tol)
}

fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

/// Groups items by the key under `tol`, returning representatives and members.
fn cluster_by<T: Clone>(items: &[T], key: impl Fn(&T) -> &[Complex64], tol: f64) -> Vec<Vec<T>> {
    let mut groups: Vec<Vec<T>> = Vec::new();
    for it in items {
        match groups.iter_mut().find(|g| close(key(&g[0]), key(it), tol)) {
            Some(g) => g.push(it.clone()),
            None => groups.push(vec![it.clone()]),
        }
    }
    groups
}

fn same_multiset(a: &[Vec<Complex64>], b: &[Vec<Complex64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let hit = (0..b.len()).find(|&i| !used[i] && close(x, &b[i], tol));
        hit.map(|i| used[i] = true).is_some()
    })
}

fn split_grid(tuples: Vec<Vec<Complex64>>, dims: &[usize], tol: f64) -> Option<Vec<Vec<Complex64>>> {
    if dims.len() == 1 {
        return Some(vec![tuples.into_iter().map(|t| t[0]).collect()]);
    }
    let rest: usize = dims[1..].iter().product();
    let mut first = Vec::new();
    let mut common: Option<Vec<Vec<Complex64>>> = None;
    for cluster in cluster_by(&tuples, |t| &t[..1], tol) {
        if cluster.len() % rest != 0 {
            return None;
        }
        let copies = cluster.len() / rest;
        let tails: Vec<Vec<Complex64>> = cluster.iter().map(|t| t[1..].to_vec()).collect();
        // divide the multiset of tails by its multiplicity
        let mut reduced = Vec::with_capacity(rest);
        for group in cluster_by(&tails, |t| t, tol) {
            if group.len() % copies != 0 {
                return None;
            }
            reduced.extend(std::iter::repeat_n(group[0].clone(), group.len() / copies));
        }
        match &common {
            None => common = Some(reduced),
            Some(c) if same_multiset(c, &reduced, tol) => {}
            Some(_) => return None,
        }
        first.extend(std::iter::repeat_n(cluster[0][0], copies));
    }
    let mut factors = vec![first];
    factors.extend(split_grid(common?, &dims[1..], tol)?);
    Some(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, kron};
    use proptest::prelude::*;
    use rand::Rng;

    fn diag(v: &[Complex64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v.to_vec()))
    }

    fn random_diagonalizable(rng: &mut ChaCha8Rng, n: usize) -> (CMatrix, Vec<Complex64>) {
        let vals: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        let mut g = linalg::random_complex(rng, n, n);
        g += CMatrix::identity(n, n) * c(3.0, 0.0);
        let a = &g * diag(&vals) * g.clone().try_inverse().unwrap();
        (a, vals)
    }

    #[test]
    fn char_poly_examples() {
        let e = char_poly_invariants(&CMatrix::identity(2, 2)).unwrap();
        assert_eq!(e, vec![c(2.0, 0.0), c(1.0, 0.0)]);
        let e = char_poly_invariants(&diag(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)])).unwrap();
        assert_eq!(e, vec![c(6.0, 0.0), c(11.0, 0.0), c(6.0, 0.0)]);
        assert!(char_poly_invariants(&CMatrix::zeros(2, 3)).is_err());
        assert!(char_poly_invariants(&CMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn exact_expansion_agrees_with_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let a = linalg::random_complex(&mut rng, n, n);
            let exact = char_poly_invariants(&a).unwrap();
            let from_eigs = elementary_symmetric(&eigenvalues(&a));
            for (x, y) in exact.iter().zip(&from_eigs) {
                assert!((x - y).norm() <= 1e-10 * (1.0 + y.norm()), "n = {n}");
            }
        }
        // Vieta oracle above the exact range
        let vals: Vec<Complex64> = (1..=8).map(|k| c(k as f64, 0.0)).collect();
        let e = char_poly_invariants(&diag(&vals)).unwrap();
        assert!((e[0] - c(36.0, 0.0)).norm() < 1e-9);
        assert!((e[7] - c(40320.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn joint_spectrum_examples() {
        let a = [c(1.0, 0.0), c(-2.0, 1.0)];
        let b = [c(3.0, 0.0), c(0.5, 0.0), c(-1.0, -1.0)];
        let big_a = kron(&diag(&a), &CMatrix::identity(3, 3));
        let big_b = kron(&CMatrix::identity(2, 2), &diag(&b));
        let spec = joint_spectrum(&[big_a, big_b], 1e-10, 0).unwrap();
        let mut want: Vec<Vec<Complex64>> = a.iter().flat_map(|&x| b.iter().map(move |&y| vec![x, y])).collect();
        want.sort_by(|x, y| lex_cmp(x, y));
        for (got, w) in spec.iter().zip(&want) {
            assert!(close(got, w, 1e-10));
        }
        let scalars = joint_spectrum(
            &[CMatrix::identity(3, 3) * c(2.0, 0.0), CMatrix::identity(3, 3) * c(0.0, 1.0)],
            1e-12,
            0,
        )
        .unwrap();
        assert_eq!(scalars.len(), 3);
        assert!(scalars.iter().all(|t| close(t, &[c(2.0, 0.0), c(0.0, 1.0)], 1e-12)));
    }

    #[test]
    fn joint_spectrum_errors() {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let y = x.transpose();
        assert!(matches!(joint_spectrum(&[x.clone(), y], 1e-8, 0), Err(Error::NotCommuting(_))));
        assert_eq!(joint_spectrum(&[x], 1e-8, 0), Err(Error::DefectiveCombination));
        assert!(joint_spectrum(&[], 1e-8, 0).is_err());
    }

    #[test]
    fn single_matrix_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (a, mut vals) = random_diagonalizable(&mut rng, 4);
        let spec = joint_spectrum(&[a], 1e-10, 1).unwrap();
        vals.sort_by(|x, y| lex_cmp(&[*x], &[*y]));
        for (t, v) in spec.iter().zip(&vals) {
            assert!((t[0] - v).norm() < 1e-8);
        }
    }

    #[test]
    fn grid_examples() {
        let pairs = |v: &[(f64, f64)]| v.iter().map(|&(a, b)| (c(a, 0.0), c(b, 0.0))).collect::<Vec<_>>();
        let good = grid_test(&pairs(&[(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 4.0)]), 2, 2, 1e-6).unwrap();
        assert!(good.is_grid);
        let f = good.factors.unwrap();
        assert_eq!(f[0], vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(f[1], vec![c(3.0, 0.0), c(4.0, 0.0)]);
        let bad = grid_test(&pairs(&[(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 5.0)]), 2, 2, 1e-6).unwrap();
        assert!(!bad.is_grid && bad.factors.is_none());
        assert_eq!(
            grid_test(&pairs(&[(0.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 5.0)]), 2, 2, 1e-6),
            Err(Error::ZeroEigenvalue)
        );
        assert!(grid_test(&pairs(&[(1.0, 3.0)]), 2, 2, 1e-6).is_err());
        // repeated factor entries
        let rep = grid_test(&pairs(&[(1.0, 3.0), (1.0, 3.0), (1.0, 3.0), (1.0, 3.0)]), 2, 2, 1e-6).unwrap();
        assert!(rep.is_grid);
    }

    #[test]
    fn rank_one_factor_grids() {
        // n = 1: every grid has a common first coordinate and any second coordinates
        let pairs: Vec<_> = [3.0, -1.0, 7.5].iter().map(|&b| (c(2.0, 1.0), c(b, 0.0))).collect();
        assert!(grid_test(&pairs, 1, 3, 1e-6).unwrap().is_grid);
        let swapped: Vec<_> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        assert!(grid_test(&swapped, 3, 1, 1e-6).unwrap().is_grid);
        let mixed = vec![(c(1.0, 0.0), c(2.0, 0.0)), (c(3.0, 0.0), c(4.0, 0.0))];
        assert!(!grid_test(&mixed, 1, 2, 1e-6).unwrap().is_grid);
        assert!(!grid_test(&mixed, 2, 1, 1e-6).unwrap().is_grid);
    }

    #[test]
    fn three_factor_grid() {
        let vs = [[c(1.0, 0.0), c(2.0, 0.0)], [c(-1.0, 1.0), c(3.0, 0.0)], [c(0.5, 0.0), c(0.0, 2.0)]];
        let mut tuples = Vec::new();
        for x in vs[0] {
            for y in vs[1] {
                for z in vs[2] {
                    tuples.push(vec![x, y, z]);
                }
            }
        }
        let r = grid_test_r(&tuples, &[2, 2, 2], 1e-6).unwrap();
        assert!(r.is_grid);
        tuples[5][2] += c(1e-2, 0.0);
        assert!(!grid_test_r(&tuples, &[2, 2, 2], 1e-6).unwrap().is_grid);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn kronecker_spectrum_is_the_grid(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, va) = random_diagonalizable(&mut rng, n);
            let (b, vb) = random_diagonalizable(&mut rng, m);
            let big_a = kron(&a, &CMatrix::identity(m, m));
            let big_b = kron(&CMatrix::identity(n, n), &b);
            let comm = linalg::frobenius(&(&big_a * &big_b - &big_b * &big_a));
            let spec = joint_spectrum(&[big_a, big_b], 1e-9_f64.max(10.0 * comm), seed).unwrap();
            let want: Vec<Vec<Complex64>> = va.iter().flat_map(|&x| vb.iter().map(move |&y| vec![x, y])).collect();
            prop_assert!(same_multiset(&spec, &want, 1e-8));
            let pairs: Vec<_> = spec.iter().map(|t| (t[0], t[1])).collect();
            prop_assert!(grid_test(&pairs, n, m, 1e-6).unwrap().is_grid);
        }

        #[test]
        fn conjugation_preserves_char_poly(seed in any::<u64>(), n in 1usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = linalg::random_complex(&mut rng, n, n);
            let mut g = linalg::random_complex(&mut rng, n, n);
            g += CMatrix::identity(n, n) * c(3.0, 0.0);
            let b = &g * &a * g.clone().try_inverse().unwrap();
            let (ea, eb) = (char_poly_invariants(&a).unwrap(), char_poly_invariants(&b).unwrap());
            for (x, y) in ea.iter().zip(&eb) {
                prop_assert!((x - y).norm() <= 1e-9 * (1.0 + x.norm()));
            }
        }
    }
}
