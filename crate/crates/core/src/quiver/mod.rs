//! Finite quivers, paths, dimension vectors and the Euler form.
//!
//! Vertices and edges are dense indices. Edge `id` always equals its position
//! in [`Quiver::edges`]; labels are display metadata only.

mod ops;
mod path;
mod tensor;

pub use ops::{
    clone_edge, clone_vertex, collapse_edges, collapse_vertices, delete_edge, delete_vertex,
    Correspondence, EdgeImage, Operation,
};
pub use path::Path;
pub use tensor::{tensor_quiver, EdgeOrigin, TensorQuiverMap};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of paths [`Quiver::enumerate_paths`] may return.
pub const DEFAULT_PATH_BOUND: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
}

/// A finite directed multigraph `Q = (Q0, Q1, h, t)`; loops and parallel edges allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "crate::json::QuiverJson", into = "crate::json::QuiverJson")]
pub struct Quiver {
    labels: Vec<String>,
    edges: Vec<Edge>,
}

impl Quiver {
    /// Builds a quiver from vertex labels and `(tail, head)` pairs.
    pub fn new(labels: Vec<String>, arrows: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut edges = Vec::with_capacity(arrows.len());
        for (id, &(tail, head)) in arrows.iter().enumerate() {
            if tail >= n {
                return Err(Error::InvalidQuiver(format!(
                    "edge {id} has tail {tail} but only {n} vertices"
                )));
            }
            if head >= n {
                return Err(Error::InvalidQuiver(format!(
                    "edge {id} has head {head} but only {n} vertices"
                )));
            }
            edges.push(Edge { id, tail, head });
        }
        Ok(Quiver { labels, edges })
    }

    /// Quiver with vertices labelled `0..n`.
    pub fn with_vertices(n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        Quiver::new((0..n).map(|i| i.to_string()).collect(), arrows)
    }

    /// The Jordan quiver: one vertex, one loop.
    pub fn jordan() -> Self {
        Quiver::with_vertices(1, &[(0, 0)]).expect("valid")
    }

    /// One vertex carrying `r` loops (the `r`-fold tensor power of the Jordan quiver).
    pub fn loops(r: usize) -> Self {
        Quiver::with_vertices(1, &vec![(0, 0); r]).expect("valid")
    }

    /// Type `A_m`: vertices labelled `1..=m`, edge `alpha_k : k -> k-1` for `k = 2..=m`.
    /// Vertex label `k` sits at index `k - 1`, and `alpha_k` has id `k - 2`.
    pub fn a_type(m: usize) -> Self {
        let labels = (1..=m).map(|k| k.to_string()).collect();
        let arrows: Vec<(usize, usize)> = (2..=m).map(|k| (k - 1, k - 2)).collect();
        Quiver::new(labels, &arrows).expect("valid")
    }

    /// The `n`-edge Kronecker quiver: tail vertex 0, head vertex 1.
    pub fn kronecker(n: usize) -> Self {
        Quiver::new(vec!["1".into(), "2".into()], &vec![(0, 1); n]).expect("valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.edges.get(id).ok_or(Error::InvalidEdge(id))
    }

    pub fn head(&self, id: usize) -> usize {
        self.edges[id].head
    }

    pub fn tail(&self, id: usize) -> usize {
        self.edges[id].tail
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Edges whose head is `v`.
    pub fn incoming(&self, v: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.head == v)
    }

    /// Edges whose tail is `v`.
    pub fn outgoing(&self, v: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.tail == v)
    }

    /// Reverses every arrow. Edge `alpha*` keeps the id of `alpha`.
    pub fn opposite(&self) -> Quiver {
        let arrows: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.head, e.tail)).collect();
        Quiver::new(self.labels.clone(), &arrows).expect("opposite of a valid quiver")
    }

    /// `adj[h][t]` = number of edges `t -> h`.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0u64; n]; n];
        for e in &self.edges {
            a[e.head][e.tail] += 1;
        }
        a
    }

    /// Checks that `p` is a path of this quiver.
    pub fn validate_path(&self, p: &Path) -> Result<()> {
        self.check_vertex(p.head())?;
        self.check_vertex(p.tail())?;
        if p.is_trivial() {
            return Ok(());
        }
        let edges = p.edges();
        for &e in edges {
            self.edge(e)?;
        }
        if self.head(edges[0]) != p.head() || self.tail(edges[edges.len() - 1]) != p.tail() {
            return Err(Error::InvalidPath("endpoints disagree with edges".into()));
        }
        for w in edges.windows(2) {
            if self.tail(w[0]) != self.head(w[1]) {
                return Err(Error::InvalidPath(format!(
                    "edge {} does not follow edge {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    /// Euler form `<d, e> = sum_i d_i e_i - sum_alpha d_{t alpha} e_{h alpha}`.
    pub fn euler_form(&self, d: &DimensionVector, e: &DimensionVector) -> Result<i64> {
        d.check(self)?;
        e.check(self)?;
        let diag: i64 = d.0.iter().zip(&e.0).map(|(&a, &b)| (a * b) as i64).sum();
        let off: i64 = self
            .edges
            .iter()
            .map(|a| (d.0[a.tail] * e.0[a.head]) as i64)
            .sum();
        Ok(diag - off)
    }

    /// All paths `from -> to` of length at most `max_len`, ordered by length and
    /// then lexicographically by edge ids (written head-first).
    pub fn enumerate_paths(&self, from: usize, to: usize, max_len: usize) -> Result<Vec<Path>> {
        self.enumerate_paths_bounded(from, to, max_len, DEFAULT_PATH_BOUND)
    }

    pub fn enumerate_paths_bounded(
        &self,
        from: usize,
        to: usize,
        max_len: usize,
        bound: usize,
    ) -> Result<Vec<Path>> {
        self.check_vertex(from)?;
        self.check_vertex(to)?;
        let dist = self.distances_to(to);
        let mut out = Vec::new();
        // Application order: applied[0] acts first.
        let mut applied: Vec<usize> = Vec::new();
        self.extend_paths(from, to, max_len, &dist, &mut applied, &mut out, bound)?;
        out.sort();
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_paths(
        &self,
        at: usize,
        to: usize,
        remaining: usize,
        dist: &[Option<usize>],
        applied: &mut Vec<usize>,
        out: &mut Vec<Path>,
        bound: usize,
    ) -> Result<()> {
        if at == to {
            if out.len() >= bound {
                return Err(Error::TooManyPaths(bound));
            }
            let from = applied.first().map(|&e| self.tail(e)).unwrap_or(at);
            let written: Vec<usize> = applied.iter().rev().copied().collect();
            out.push(if written.is_empty() {
                Path::trivial(at)
            } else {
                Path::from_parts(to, from, written)
            });
        }
        if remaining == 0 {
            return Ok(());
        }
        for e in self.edges.iter().filter(|e| e.tail == at) {
            match dist[e.head] {
                Some(d) if d < remaining => {
                    applied.push(e.id);
                    self.extend_paths(e.head, to, remaining - 1, dist, applied, out, bound)?;
                    applied.pop();
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Shortest number of edges from each vertex to `to`.
    fn distances_to(&self, to: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[to] = Some(0);
        let mut queue = VecDeque::from([to]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].expect("queued vertices have a distance");
            for e in self.edges.iter().filter(|e| e.head == v) {
                if dist[e.tail].is_none() {
                    dist[e.tail] = Some(dv + 1);
                    queue.push_back(e.tail);
                }
            }
        }
        dist
    }
}

/// One nonnegative integer per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimensionVector(pub Vec<usize>);

impl DimensionVector {
    pub fn new(d: Vec<usize>) -> Self {
        DimensionVector(d)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// `gcd` of the entries equals 1.
    pub fn is_indivisible(&self) -> bool {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        self.0.iter().fold(0, |g, &x| gcd(g, x)) == 1
    }

    pub fn check(&self, q: &Quiver) -> Result<()> {
        if self.0.len() != q.vertex_count() {
            return Err(Error::DimensionMismatch(format!(
                "dimension vector has {} entries, quiver has {} vertices",
                self.0.len(),
                q.vertex_count()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DimensionVector) -> Result<DimensionVector> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("dimension vector lengths".into()));
        }
        Ok(DimensionVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

impl std::ops::Index<usize> for DimensionVector {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}
