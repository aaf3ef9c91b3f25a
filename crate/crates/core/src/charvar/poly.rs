use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::perm::{unrank, Permutation};
use crate::error::{Error, Result};

/// Exact complex rational coefficient.
pub type Coeff = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> Coeff {
    Complex::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

pub fn integer(x: i64) -> Coeff {
    rational(x, 1)
}

/// A sparse polynomial in named variable families, such as
/// `lambda_1..lambda_N, mu_1..mu_N`.
///
/// Exponent tuples concatenate the families in order; zero coefficients
/// are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPoly {
    families: Vec<(String, usize)>,
    terms: BTreeMap<Vec<u32>, Coeff>,
}

/// Which permutation action to test invariance against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// One `S_N` permuting all listed families simultaneously.
    Simultaneous(Vec<usize>),
    /// A separate symmetric group for each listed family.
    Independent(Vec<usize>),
}

impl SymPoly {
    pub fn zero(families: Vec<(String, usize)>) -> Self {
        SymPoly {
            families,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(families: Vec<(String, usize)>, c: Coeff) -> Self {
        let arity = families.iter().map(|f| f.1).sum();
        let mut p = SymPoly::zero(families);
        p.insert(vec![0; arity], c);
        p
    }

    pub fn one(families: Vec<(String, usize)>) -> Self {
        SymPoly::constant(families, Coeff::one())
    }

    /// Variable `i` (1-based) of family `family`.
    pub fn var(families: Vec<(String, usize)>, family: usize, i: usize) -> Result<Self> {
        let (_, arity) = families
            .get(family)
            .ok_or_else(|| Error::ArityMismatch(format!("no family {family}")))?;
        if i == 0 || i > *arity {
            return Err(Error::ArityMismatch(format!("variable {i} of a family of arity {arity}")));
        }
        let offset: usize = families[..family].iter().map(|f| f.1).sum();
        let total = families.iter().map(|f| f.1).sum();
        let mut exp = vec![0; total];
        exp[offset + i - 1] = 1;
        let mut p = SymPoly::zero(families);
        p.insert(exp, Coeff::one());
        Ok(p)
    }

    pub fn from_terms(
        families: Vec<(String, usize)>,
        terms: impl IntoIterator<Item = (Vec<u32>, Coeff)>,
    ) -> Result<Self> {
        let mut p = SymPoly::zero(families);
        let arity = p.arity();
        for (exp, c) in terms {
            if exp.len() != arity {
                return Err(Error::ArityMismatch(format!(
                    "exponent of length {} for total arity {arity}",
                    exp.len()
                )));
            }
            p.insert(exp, c);
        }
        Ok(p)
    }

    fn insert(&mut self, exp: Vec<u32>, c: Coeff) {
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn families(&self) -> &[(String, usize)] {
        &self.families
    }

    pub fn arity(&self) -> usize {
        self.families.iter().map(|f| f.1).sum()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Coeff> {
        &self.terms
    }

    pub fn coeff(&self, exp: &[u32]) -> Coeff {
        self.terms.get(exp).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn offset(&self, family: usize) -> usize {
        self.families[..family].iter().map(|f| f.1).sum()
    }

    fn same_ring(&self, other: &SymPoly) -> Result<()> {
        if self.families != other.families {
            return Err(Error::ArityMismatch(format!(
                "families {:?} and {:?}",
                self.families, other.families
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SymPoly) -> Result<SymPoly> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coeff) -> SymPoly {
        let mut out = SymPoly::zero(self.families.clone());
        for (e, x) in &self.terms {
            out.insert(e.clone(), x * c);
        }
        out
    }

    pub fn sub(&self, other: &SymPoly) -> Result<SymPoly> {
        self.add(&other.scale(&integer(-1)))
    }

    pub fn mul(&self, other: &SymPoly) -> Result<SymPoly> {
        self.same_ring(other)?;
        let mut acc: BTreeMap<Vec<u32>, Coeff> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = acc.entry(e).or_insert_with(Coeff::zero);
                *slot = &*slot + c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(SymPoly {
            families: self.families.clone(),
            terms: acc,
        })
    }

    /// Substitutes `x_i ↦ x_{σ(i)}` in each family that has a permutation.
    pub fn permute(&self, perms: &[Option<&Permutation>]) -> Result<SymPoly> {
        if perms.len() != self.families.len() {
            return Err(Error::ArityMismatch("one optional permutation per family".into()));
        }
        for (f, p) in perms.iter().enumerate() {
            if let Some(p) = p {
                if p.len() != self.families[f].1 {
                    return Err(Error::ArityMismatch(format!(
                        "S_{} acting on family {} of arity {}",
                        p.len(),
                        self.families[f].0,
                        self.families[f].1
                    )));
                }
            }
        }
        let mut out = SymPoly::zero(self.families.clone());
        for (e, c) in &self.terms {
            out.insert(self.permute_exponent(e, perms), c.clone());
        }
        Ok(out)
    }

    fn permute_exponent(&self, e: &[u32], perms: &[Option<&Permutation>]) -> Vec<u32> {
        let mut out = e.to_vec();
        for (f, p) in perms.iter().enumerate() {
            if let Some(p) = p {
                let off = self.offset(f);
                for i in 0..p.len() {
                    out[off + p.apply(i + 1) - 1] = e[off + i];
                }
            }
        }
        out
    }

    fn check_action(&self, action: &Action) -> Result<Vec<usize>> {
        let fams = match action {
            Action::Simultaneous(f) | Action::Independent(f) => f.clone(),
        };
        if let Some(&f) = fams.iter().find(|&&f| f >= self.families.len()) {
            return Err(Error::ArityMismatch(format!("no family {f}")));
        }
        if let Action::Simultaneous(_) = action {
            let arities: BTreeSet<usize> = fams.iter().map(|&f| self.families[f].1).collect();
            if arities.len() > 1 {
                return Err(Error::ArityMismatch(
                    "simultaneous action needs families of equal arity".into(),
                ));
            }
        }
        Ok(fams)
    }

    /// Adjacent transpositions generating the action.
    fn generators(&self, action: &Action) -> Result<Vec<Vec<Option<Permutation>>>> {
        let fams = self.check_action(action)?;
        let nf = self.families.len();
        let mut out = Vec::new();
        match action {
            Action::Simultaneous(_) => {
                if let Some(&f0) = fams.first() {
                    let n = self.families[f0].1;
                    for i in 1..n {
                        let mut g = vec![None; nf];
                        for &f in &fams {
                            g[f] = Some(Permutation::adjacent(n, i));
                        }
                        out.push(g);
                    }
                }
            }
            Action::Independent(_) => {
                for &f in &fams {
                    let n = self.families[f].1;
                    for i in 1..n {
                        let mut g = vec![None; nf];
                        g[f] = Some(Permutation::adjacent(n, i));
                        out.push(g);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact invariance check against adjacent transpositions, which
    /// generate each symmetric group.
    pub fn is_invariant(&self, action: &Action) -> Result<bool> {
        for g in &self.generators(action)? {
            let refs: Vec<Option<&Permutation>> = g.iter().map(|p| p.as_ref()).collect();
            if self.permute(&refs)? != *self {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sum over the orbit of each monomial (not the group average), so
    /// integer coefficients stay integral.
    pub fn symmetrize(&self, action: &Action) -> Result<SymPoly> {
        let gens = self.generators(action)?;
        let gens: Vec<Vec<Option<&Permutation>>> =
            gens.iter().map(|g| g.iter().map(|p| p.as_ref()).collect()).collect();
        let mut out = SymPoly::zero(self.families.clone());
        for (e, c) in &self.terms {
            let mut orbit = BTreeSet::from([e.clone()]);
            let mut queue = VecDeque::from([e.clone()]);
            while let Some(x) = queue.pop_front() {
                for g in &gens {
                    let y = self.permute_exponent(&x, g);
                    if orbit.insert(y.clone()) {
                        queue.push_back(y);
                    }
                }
            }
            for x in orbit {
                out.insert(x, c.clone());
            }
        }
        Ok(out)
    }
}

/// Orbit representatives of monomials of degree `1..=max_degree` under the
/// simultaneous action of `S_n` on `families` families of arity `n`.
///
/// A monomial is determined up to the action by the multiset of its nonzero
/// columns `(e_{f,i})_f`.
pub fn simultaneous_orbit_representatives(n: usize, families: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut types: Vec<Vec<u32>> = Vec::new();
    for d in 1..=max_degree {
        compositions(d, families, &mut Vec::new(), &mut types);
    }
    let mut reps = Vec::new();
    let mut chosen = Vec::new();
    multisets(&types, 0, max_degree, n, &mut chosen, &mut |cols: &[usize]| {
        let mut exp = vec![0u32; n * families];
        for (i, &t) in cols.iter().enumerate() {
            for f in 0..families {
                exp[f * n + i] = types[t][f];
            }
        }
        reps.push(exp);
    });
    reps
}

fn compositions(d: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() + 1 == parts {
        cur.push(d);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for x in (0..=d).rev() {
        cur.push(x);
        compositions(d - x, parts, cur, out);
        cur.pop();
    }
}

fn multisets(
    types: &[Vec<u32>],
    start: usize,
    budget: u32,
    slots: usize,
    chosen: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if !chosen.is_empty() {
        emit(chosen);
    }
    if chosen.len() == slots {
        return;
    }
    for t in start..types.len() {
        let deg: u32 = types[t].iter().sum();
        if deg <= budget {
            chosen.push(t);
            multisets(types, t, budget - deg, slots, chosen, emit);
            chosen.pop();
        }
    }
}

/// Output family names for `r` factors.
pub fn factor_families(dims: &[usize]) -> Vec<(String, usize)> {
    if dims.len() == 2 {
        return vec![("alpha".into(), dims[0]), ("beta".into(), dims[1])];
    }
    dims.iter()
        .enumerate()
        .map(|(s, &d)| (format!("alpha{}", s + 1), d))
        .collect()
}

/// `λ^{(s)}_{idx} ↦ α^{(s)}_{k_s}` where `idx` is the row-major index of
/// `(k_1, ..., k_r)`.
pub fn phi_substitute_r(p: &SymPoly, dims: &[usize]) -> Result<SymPoly> {
    let n: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Precondition("factor sizes must be at least 1".into()));
    }
    if p.families.len() != dims.len() || p.families.iter().any(|f| f.1 != n) {
        return Err(Error::ArityMismatch(format!(
            "expected {} families of arity {n}, got {:?}",
            dims.len(),
            p.families
        )));
    }
    let families = factor_families(dims);
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let total: usize = dims.iter().sum();
    let index: Vec<Vec<usize>> = (0..n).map(|i| unrank(i, dims)).collect();
    let mut out = SymPoly::zero(families);
    for (e, c) in &p.terms {
        let mut img = vec![0u32; total];
        for s in 0..dims.len() {
            for (i, ks) in index.iter().enumerate() {
                img[offsets[s] + ks[s]] += e[s * n + i];
            }
        }
        out.insert(img, c.clone());
    }
    Ok(out)
}

/// `λ_{km+j} ↦ α_{k+1}`, `μ_{km+j} ↦ β_j`.
pub fn phi_substitute(p: &SymPoly, n: usize, m: usize) -> Result<SymPoly> {
    phi_substitute_r(p, &[n, m])
}

/// Checks `φ(p)(α_σ, β_σ') = φ(τ·p) = φ(p)` exactly for a `p` invariant
/// under the simultaneous action.
pub fn equivariance_check_r(p: &SymPoly, dims: &[usize], perms: &[Permutation]) -> Result<bool> {
    let all: Vec<usize> = (0..p.families.len()).collect();
    if !p.is_invariant(&Action::Simultaneous(all))? {
        return Err(Error::Precondition(
            "polynomial is not invariant under the simultaneous action".into(),
        ));
    }
    let t = super::perm::tau_r(dims, perms)?;
    let image = phi_substitute_r(p, dims)?;
    let moved = image.permute(&perms.iter().map(Some).collect::<Vec<_>>())?;
    let via_tau = phi_substitute_r(&p.permute(&vec![Some(&t); dims.len()])?, dims)?;
    Ok(moved == via_tau && via_tau == image)
}

pub fn equivariance_check(
    p: &SymPoly,
    n: usize,
    m: usize,
    sigma: &Permutation,
    sigma_p: &Permutation,
) -> Result<bool> {
    equivariance_check_r(p, &[n, m], &[sigma.clone(), sigma_p.clone()])
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    families: Vec<(String, usize)>,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coeff: CoeffJson,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Real(Scalar),
    Complex([Scalar; 2]),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Scalar {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            Scalar::Text(s) => BigRational::from_str(s.trim())
                .map_err(|_| Error::Parse(format!("bad rational {s:?}"))),
            Scalar::Int(i) => Ok(BigRational::from_integer(BigInt::from(*i))),
            Scalar::Float(f) => {
                BigRational::from_float(*f).ok_or_else(|| Error::Parse(format!("non-finite coefficient {f}")))
            }
        }
    }
}

impl TryFrom<PolyJson> for SymPoly {
    type Error = Error;
    fn try_from(j: PolyJson) -> Result<Self> {
        let terms = j
            .terms
            .into_iter()
            .map(|t| {
                let c = match t.coeff {
                    CoeffJson::Real(x) => Complex::new(x.to_rational()?, BigRational::zero()),
                    CoeffJson::Complex([re, im]) => Complex::new(re.to_rational()?, im.to_rational()?),
                };
                Ok((t.exp, c))
            })
            .collect::<Result<Vec<_>>>()?;
        SymPoly::from_terms(j.families, terms)
    }
}

impl From<&SymPoly> for PolyJson {
    fn from(p: &SymPoly) -> Self {
        PolyJson {
            families: p.families.clone(),
            terms: p
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    coeff: if c.im.is_zero() {
                        CoeffJson::Real(Scalar::Text(c.re.to_string()))
                    } else {
                        CoeffJson::Complex([Scalar::Text(c.re.to_string()), Scalar::Text(c.im.to_string())])
                    },
                })
                .collect(),
        }
    }
}

impl Serialize for SymPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        SymPoly::try_from(j).map_err(serde::de::Error::custom)
    }
}
