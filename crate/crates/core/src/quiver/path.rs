use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::Quiver;
use crate::error::{Error, Result};

/// A path `alpha_1 ... alpha_k` written head-first: `alpha_k` is applied first,
/// so `tail(alpha_k)` is the tail of the path and `head(alpha_1)` its head.
/// A trivial path `e_v` has no edges and `head == tail == v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    head: usize,
    tail: usize,
    edges: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path {
            head: v,
            tail: v,
            edges: Vec::new(),
        }
    }

    /// Validated path from head-first edge ids. An empty list is rejected;
    /// use [`Path::trivial`] for `e_v`.
    pub fn new(q: &Quiver, edges: Vec<usize>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidPath(
                "empty edge list needs an explicit vertex".into(),
            ));
        }
        for &e in &edges {
            q.edge(e)?;
        }
        let p = Path {
            head: q.head(edges[0]),
            tail: q.tail(edges[edges.len() - 1]),
            edges,
        };
        q.validate_path(&p)?;
        Ok(p)
    }

    pub fn edge(q: &Quiver, e: usize) -> Result<Self> {
        Path::new(q, vec![e])
    }

    /// Unchecked constructor for callers that already know the endpoints.
    pub(crate) fn from_parts(head: usize, tail: usize, edges: Vec<usize>) -> Self {
        Path { head, tail, edges }
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    /// Edge ids, head-first.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.head == self.tail
    }

    /// `self . other` (apply `other` first), or `None` when
    /// `tail(self) != head(other)`.
    pub fn compose(&self, other: &Path) -> Option<Path> {
        if self.tail != other.head {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(Path {
            head: self.head,
            tail: other.tail,
            edges,
        })
    }
}

/// Length first, then lexicographic on head-first edge ids, then endpoints.
impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges
            .len()
            .cmp(&other.edges.len())
            .then_with(|| self.edges.cmp(&other.edges))
            .then_with(|| self.head.cmp(&other.head))
            .then_with(|| self.tail.cmp(&other.tail))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_checks_endpoints() {
        let q = Quiver::a_type(3);
        // alpha_2: 2 -> 1 (id 0), alpha_3: 3 -> 2 (id 1)
        let a2 = Path::edge(&q, 0).unwrap();
        let a3 = Path::edge(&q, 1).unwrap();
        let p = a2.compose(&a3).unwrap();
        assert_eq!(p.edges(), &[0, 1]);
        assert_eq!((p.tail(), p.head()), (2, 0));
        assert!(a3.compose(&a2).is_none());
        assert!(Path::new(&q, vec![1, 0]).is_err());
    }

    #[test]
    fn trivial_paths_are_units() {
        let q = Quiver::jordan();
        let l = Path::edge(&q, 0).unwrap();
        let e = Path::trivial(0);
        assert_eq!(l.compose(&e).unwrap(), l);
        assert_eq!(e.compose(&l).unwrap(), l);
    }
}
