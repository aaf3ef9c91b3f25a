use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{1, ..., N}` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn new(one_line: Vec<usize>) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n];
        for &x in &one_line {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::InvalidPermutation(format!("{one_line:?}")));
            }
            seen[x - 1] = true;
        }
        Ok(Permutation(one_line))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    /// The transposition `(i i+1)`, 1-based.
    pub fn adjacent(n: usize, i: usize) -> Self {
        let mut v: Vec<usize> = (1..=n).collect();
        v.swap(i - 1, i);
        Permutation(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.0
    }

    /// Image of `i`, 1-based.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::ArityMismatch(format!("S_{} and S_{}", self.len(), other.len())));
        }
        Ok(Permutation(other.0.iter().map(|&i| self.apply(i)).collect()))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        Permutation(inv)
    }

    /// Every element of `S_n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
    }
}

/// `τ` on `{1, ..., n_1 ⋯ n_r}`: the index of `(k_1, ..., k_r)` in row-major
/// order goes to the index of `(σ_1(k_1), ..., σ_r(k_r))`.
pub fn tau_r(dims: &[usize], perms: &[Permutation]) -> Result<Permutation> {
    if dims.is_empty() || dims.len() != perms.len() {
        return Err(Error::ArityMismatch(format!(
            "{} sizes for {} permutations",
            dims.len(),
            perms.len()
        )));
    }
    for (&d, p) in dims.iter().zip(perms) {
        if d == 0 {
            return Err(Error::Precondition("factor sizes must be at least 1".into()));
        }
        if p.len() != d {
            return Err(Error::InvalidPermutation(format!("{:?} is not in S_{d}", p.0)));
        }
    }
    let total: usize = dims.iter().product();
    let mut image = Vec::with_capacity(total);
    for idx in 0..total {
        let ks = unrank(idx, dims);
        let mut out = 0;
        for ((&k, &d), p) in ks.iter().zip(dims).zip(perms) {
            out = out * d + (p.apply(k + 1) - 1);
        }
        image.push(out + 1);
    }
    Ok(Permutation(image))
}

/// `km + j ↦ m(σ(k+1) - 1) + σ'(j)`.
pub fn tau(n: usize, m: usize, sigma: &Permutation, sigma_p: &Permutation) -> Result<Permutation> {
    tau_r(&[n, m], &[sigma.clone(), sigma_p.clone()])
}

/// Row-major multi-index of a 0-based position.
pub(crate) fn unrank(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut ks = vec![0; dims.len()];
    for s in (0..dims.len()).rev() {
        ks[s] = idx % dims[s];
        idx /= dims[s];
    }
    ks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![2, 3]).is_err());
        assert!(Permutation::new(vec![]).is_ok());
        let json: std::result::Result<Permutation, _> = serde_json::from_str("[2,2]");
        assert!(json.is_err());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(Permutation::all(0).len(), 1);
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(4).len(), 24);
        let all = Permutation::all(4);
        let unique: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), 24);
    }

    #[test]
    fn compose_and_inverse() {
        let a = p(&[2, 3, 1]);
        let b = p(&[2, 1, 3]);
        assert_eq!(a.compose(&b).unwrap(), p(&[3, 2, 1]));
        assert_eq!(a.compose(&a.inverse()).unwrap(), Permutation::identity(3));
        assert!(a.compose(&Permutation::identity(2)).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(
            tau(2, 3, &Permutation::identity(2), &Permutation::identity(3)).unwrap(),
            Permutation::identity(6)
        );
        // the displayed formula evaluated by hand: 1 -> 3, 2 -> 4, 3 -> 1, 4 -> 2
        assert_eq!(tau(2, 2, &p(&[2, 1]), &p(&[1, 2])).unwrap(), p(&[3, 4, 1, 2]));
        assert!(tau(2, 2, &p(&[1, 2, 3]), &p(&[1, 2])).is_err());
        assert!(tau(0, 2, &p(&[]), &p(&[1, 2])).is_err());
    }

    #[test]
    fn tau_matches_the_formula() {
        for n in 1..=3 {
            for m in 1..=3 {
                for s in Permutation::all(n) {
                    for sp in Permutation::all(m) {
                        let t = tau(n, m, &s, &sp).unwrap();
                        for k in 0..n {
                            for j in 1..=m {
                                assert_eq!(t.apply(k * m + j), m * (s.apply(k + 1) - 1) + sp.apply(j));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tau_is_a_homomorphism() {
        for n in 1..=3 {
            for m in 1..=3 {
                let (sn, sm) = (Permutation::all(n), Permutation::all(m));
                for s1 in &sn {
                    for s2 in &sn {
                        for t1 in &sm {
                            for t2 in &sm {
                                let lhs = tau(n, m, &s1.compose(s2).unwrap(), &t1.compose(t2).unwrap()).unwrap();
                                let rhs = tau(n, m, s1, t1).unwrap().compose(&tau(n, m, s2, t2).unwrap()).unwrap();
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tau_r_homomorphism_for_three_factors() {
        let dims = [2, 2, 2];
        let s2 = Permutation::all(2);
        let mut triples = Vec::new();
        for a in &s2 {
            for b in &s2 {
                for c in &s2 {
                    triples.push(vec![a.clone(), b.clone(), c.clone()]);
                }
            }
        }
        for x in &triples {
            for y in &triples {
                let xy: Vec<Permutation> = x.iter().zip(y).map(|(a, b)| a.compose(b).unwrap()).collect();
                let lhs = tau_r(&dims, &xy).unwrap();
                let rhs = tau_r(&dims, x).unwrap().compose(&tau_r(&dims, y).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn tau_r_with_two_factors_is_tau() {
        let (s, sp) = (p(&[3, 1, 2]), p(&[2, 1]));
        assert_eq!(
            tau_r(&[3, 2], &[s.clone(), sp.clone()]).unwrap(),
            tau(3, 2, &s, &sp).unwrap()
        );
    }
}
