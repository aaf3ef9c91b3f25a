//! Finite elements of the path algebra, relations, and the commutation ideal
//! of a tensor quiver with its normal forms.

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use num_traits::Num;

use crate::error::{Error, Result};
use crate::quiver::{EdgeOrigin, Path, Quiver, TensorQuiverMap};

/// A finite linear combination of paths. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct PathAlgebraElement<K> {
    quiver: Quiver,
    terms: BTreeMap<Path, K>,
}

impl<K: Num + Clone> PathAlgebraElement<K> {
    pub fn zero(q: &Quiver) -> Self {
        PathAlgebraElement {
            quiver: q.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_path(q: &Quiver, p: Path, coeff: K) -> Result<Self> {
        q.validate_path(&p)?;
        let mut x = PathAlgebraElement::zero(q);
        x.add_term(p, coeff);
        Ok(x)
    }

    /// `1 = sum_i e_i`.
    pub fn unit(q: &Quiver) -> Self {
        let mut x = PathAlgebraElement::zero(q);
        for v in 0..q.vertex_count() {
            x.add_term(Path::trivial(v), K::one());
        }
        x
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn terms(&self) -> &BTreeMap<Path, K> {
        &self.terms
    }

    pub fn coeff(&self, p: &Path) -> K {
        self.terms.get(p).cloned().unwrap_or_else(K::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest path with a nonzero coefficient.
    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Path::len).max().unwrap_or(0)
    }

    fn add_term(&mut self, p: Path, c: K) {
        let sum = match self.terms.remove(&p) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(p, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.quiver != other.quiver {
            return Err(Error::MixedQuivers);
        }
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &K) -> Self {
        let mut out = PathAlgebraElement::zero(&self.quiver);
        for (p, c) in &self.terms {
            out.add_term(p.clone(), c.clone() * s.clone());
        }
        out
    }

    /// Bilinear extension of concatenation; `p . q` vanishes unless `tail(p) == head(q)`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.quiver != other.quiver {
            return Err(Error::MixedQuivers);
        }
        let mut out = PathAlgebraElement::zero(&self.quiver);
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                if let Some(pq) = p.compose(q) {
                    out.add_term(pq, a.clone() * b.clone());
                }
            }
        }
        Ok(out)
    }

    /// Drops every term longer than `max_len`.
    pub fn truncate(&self, max_len: usize) -> Self {
        PathAlgebraElement {
            quiver: self.quiver.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| p.len() <= max_len)
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        }
    }
}

/// `sum_p c_p p` over parallel paths of length at least 2.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    terms: Vec<(Complex64, Path)>,
}

impl Relation {
    pub fn new(q: &Quiver, terms: Vec<(Complex64, Path)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidRelation("no terms".into()));
        };
        let (h, t) = (first.head(), first.tail());
        for (_, p) in &terms {
            q.validate_path(p)?;
            if p.len() < 2 {
                return Err(Error::InvalidRelation(format!(
                    "path {:?} has length {}, relations need length at least 2",
                    p.edges(),
                    p.len()
                )));
            }
            if p.head() != h || p.tail() != t {
                return Err(Error::InvalidRelation("paths are not parallel".into()));
            }
        }
        Ok(Relation { terms })
    }

    pub fn terms(&self) -> &[(Complex64, Path)] {
        &self.terms
    }

    pub fn head(&self) -> usize {
        self.terms[0].1.head()
    }

    pub fn tail(&self) -> usize {
        self.terms[0].1.tail()
    }
}

/// Generators `(h alpha, beta)(alpha, t beta) - (alpha, h beta)(t alpha, beta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutationIdeal {
    /// `(alpha, beta)` for each generator.
    pub pairs: Vec<(usize, usize)>,
    /// `(normal, swapped)`: the normal path applies `(alpha, t beta)` first.
    pub generators: Vec<(Path, Path)>,
}

impl CommutationIdeal {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn relations(&self, tq: &TensorQuiverMap) -> Vec<Relation> {
        self.generators
            .iter()
            .map(|(a, b)| {
                Relation::new(
                    &tq.quiver,
                    vec![(Complex64::new(1.0, 0.0), a.clone()), (Complex64::new(-1.0, 0.0), b.clone())],
                )
                .expect("commutation generators are valid relations")
            })
            .collect()
    }
}

pub fn commutation_generators(tq: &TensorQuiverMap) -> CommutationIdeal {
    let mut pairs = Vec::new();
    let mut generators = Vec::new();
    for a in tq.left.edges() {
        for b in tq.right.edges() {
            let normal = Path::new(
                &tq.quiver,
                vec![tq.second_edge(a.head, b.id), tq.first_edge(a.id, b.tail)],
            )
            .expect("generator path");
            let swapped = Path::new(
                &tq.quiver,
                vec![tq.first_edge(a.id, b.head), tq.second_edge(a.tail, b.id)],
            )
            .expect("generator path");
            pairs.push((a.id, b.id));
            generators.push((normal, swapped));
        }
    }
    CommutationIdeal { pairs, generators }
}

/// The representative of `p` modulo the commutation ideal in which every
/// first-factor edge is applied before every second-factor edge.
pub fn normal_form(p: &Path, tq: &TensorQuiverMap) -> Result<Path> {
    tq.quiver.validate_path(p)?;
    if p.is_trivial() {
        return Ok(p.clone());
    }
    let mut firsts = Vec::new();
    let mut seconds = Vec::new();
    // application order
    for &e in p.edges().iter().rev() {
        match tq.origin(e) {
            EdgeOrigin::First { edge, .. } => firsts.push(edge),
            EdgeOrigin::Second { edge, .. } => seconds.push(edge),
        }
    }
    let (i0, j0) = tq.vertex_pair(p.tail());
    let i1 = firsts.last().map(|&a| tq.left.head(a)).unwrap_or(i0);
    let mut applied: Vec<usize> = firsts.iter().map(|&a| tq.first_edge(a, j0)).collect();
    applied.extend(seconds.iter().map(|&b| tq.second_edge(i1, b)));
    applied.reverse();
    Path::new(&tq.quiver, applied)
}

/// All paths reachable from `p` by one application of a commutation
/// generator, in either direction.
pub fn generator_rewrites(p: &Path, tq: &TensorQuiverMap) -> Result<Vec<Path>> {
    tq.quiver.validate_path(p)?;
    let edges = p.edges();
    let mut out = Vec::new();
    for k in 0..edges.len().saturating_sub(1) {
        let (outer, inner) = (tq.origin(edges[k]), tq.origin(edges[k + 1]));
        let swapped = match (outer, inner) {
            // (alpha, h beta)(t alpha, beta) -> (h alpha, beta)(alpha, t beta)
            (EdgeOrigin::First { edge: a, .. }, EdgeOrigin::Second { edge: b, .. }) => [
                tq.second_edge(tq.left.head(a), b),
                tq.first_edge(a, tq.right.tail(b)),
            ],
            (EdgeOrigin::Second { edge: b, .. }, EdgeOrigin::First { edge: a, .. }) => [
                tq.first_edge(a, tq.right.head(b)),
                tq.second_edge(tq.left.tail(a), b),
            ],
            _ => continue,
        };
        let mut new_edges = edges.to_vec();
        new_edges[k] = swapped[0];
        new_edges[k + 1] = swapped[1];
        out.push(Path::new(&tq.quiver, new_edges)?);
    }
    Ok(out)
}

/// Number of distinct normal forms among paths `from -> to` of length at most `max_len`.
pub fn count_paths_mod_ideal(
    tq: &TensorQuiverMap,
    from: (usize, usize),
    to: (usize, usize),
    max_len: usize,
) -> Result<u64> {
    let (f, t) = tensor_vertices(tq, from, to)?;
    let mut seen = HashSet::new();
    for p in tq.quiver.enumerate_paths(f, t, max_len)? {
        seen.insert(normal_form(&p, tq)?);
    }
    Ok(seen.len() as u64)
}

/// `sum_{a+b <= L} #paths'(i -> k, a) * #paths''(j -> l, b)`.
pub fn count_paths_product_formula(
    tq: &TensorQuiverMap,
    from: (usize, usize),
    to: (usize, usize),
    max_len: usize,
) -> Result<u64> {
    tensor_vertices(tq, from, to)?;
    let by_len = |q: &Quiver, s: usize, e: usize| -> Result<Vec<u64>> {
        let mut counts = vec![0u64; max_len + 1];
        for p in q.enumerate_paths(s, e, max_len)? {
            counts[p.len()] += 1;
        }
        Ok(counts)
    };
    let left = by_len(&tq.left, from.0, to.0)?;
    let right = by_len(&tq.right, from.1, to.1)?;
    let mut total = 0;
    for (a, x) in left.iter().enumerate() {
        for y in &right[..=max_len - a] {
            total += x * y;
        }
    }
    Ok(total)
}

fn tensor_vertices(
    tq: &TensorQuiverMap,
    from: (usize, usize),
    to: (usize, usize),
) -> Result<(usize, usize)> {
    for (i, j) in [from, to] {
        tq.left.check_vertex(i)?;
        tq.right.check_vertex(j)?;
    }
    Ok((tq.vertex_index(from.0, from.1), tq.vertex_index(to.0, to.1)))
}
