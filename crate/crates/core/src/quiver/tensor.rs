use serde::{Deserialize, Serialize};

use super::Quiver;
use crate::error::{Error, Result};

/// Where an edge of `Q' ⊗ Q''` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "factor", rename_all = "snake_case")]
pub enum EdgeOrigin {
    /// `(alpha, j)`: an edge of the first factor, carried at second-factor vertex `j`.
    First { edge: usize, vertex: usize },
    /// `(i, beta)`: an edge of the second factor, carried at first-factor vertex `i`.
    Second { vertex: usize, edge: usize },
}

/// The tensor product quiver together with its bookkeeping.
///
/// Vertex `(i, j)` has index `i * |Q''_0| + j`. Edges `(alpha, j)` come first,
/// ordered by `alpha` then `j`; then edges `(i, beta)`, ordered by `i` then `beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorQuiverMap {
    pub quiver: Quiver,
    pub left: Quiver,
    pub right: Quiver,
    origins: Vec<EdgeOrigin>,
}

pub fn tensor_quiver(left: &Quiver, right: &Quiver) -> Result<TensorQuiverMap> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::EmptyQuiver);
    }
    let n1 = left.vertex_count();
    let n2 = right.vertex_count();
    let mut labels = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            labels.push(format!("({},{})", left.labels()[i], right.labels()[j]));
        }
    }
    let mut arrows = Vec::new();
    let mut origins = Vec::new();
    for a in left.edges() {
        for j in 0..n2 {
            arrows.push((a.tail * n2 + j, a.head * n2 + j));
            origins.push(EdgeOrigin::First {
                edge: a.id,
                vertex: j,
            });
        }
    }
    for i in 0..n1 {
        for b in right.edges() {
            arrows.push((i * n2 + b.tail, i * n2 + b.head));
            origins.push(EdgeOrigin::Second {
                vertex: i,
                edge: b.id,
            });
        }
    }
    Ok(TensorQuiverMap {
        quiver: Quiver::new(labels, &arrows).expect("tensor of valid quivers"),
        left: left.clone(),
        right: right.clone(),
        origins,
    })
}

impl TensorQuiverMap {
    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        i * self.right.vertex_count() + j
    }

    /// `(i, j)` for a tensor vertex index.
    pub fn vertex_pair(&self, v: usize) -> (usize, usize) {
        let n2 = self.right.vertex_count();
        (v / n2, v % n2)
    }

    pub fn origin(&self, edge: usize) -> EdgeOrigin {
        self.origins[edge]
    }

    pub fn origins(&self) -> &[EdgeOrigin] {
        &self.origins
    }

    /// Id of the edge `(alpha, j)`.
    pub fn first_edge(&self, alpha: usize, j: usize) -> usize {
        alpha * self.right.vertex_count() + j
    }

    /// Id of the edge `(i, beta)`.
    pub fn second_edge(&self, i: usize, beta: usize) -> usize {
        self.left.edge_count() * self.right.vertex_count() + i * self.right.edge_count() + beta
    }

    pub fn is_first(&self, edge: usize) -> bool {
        matches!(self.origins[edge], EdgeOrigin::First { .. })
    }
}
