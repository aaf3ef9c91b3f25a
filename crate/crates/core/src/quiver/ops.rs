//! Quiver surgery: collapsing, cloning and deleting vertices and edges.
//!
//! Every operation returns a [`Correspondence`] that records where each old
//! vertex and edge went and, for each new vertex and edge, which old ones it
//! came from. Representations are pulled through these records generically.

use serde::{Deserialize, Serialize};

use super::Quiver;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    CollapseVertices,
    CollapseEdges,
    CloneVertex,
    CloneEdge,
    DeleteVertex,
    DeleteEdge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeImage {
    Edge(usize),
    Deleted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub operation: Operation,
    pub source: Quiver,
    pub target: Quiver,
    /// Old vertex to new vertex; `None` when deleted.
    pub vertex_images: Vec<Option<usize>>,
    /// Old edge to new edge.
    pub edge_images: Vec<EdgeImage>,
    /// New vertex to the old vertices it is built from, in increasing order.
    pub vertex_origins: Vec<Vec<usize>>,
    /// New edge to the old edges it is built from, in increasing order.
    pub edge_origins: Vec<Vec<usize>>,
}

impl Correspondence {
    /// Checks the record against its two quivers: every origin edge must run
    /// between origin vertices of the new edge's endpoints.
    pub fn verify(&self) -> Result<()> {
        let mismatch = |s: String| Err(Error::CorrespondenceMismatch(s));
        if self.vertex_origins.len() != self.target.vertex_count()
            || self.edge_origins.len() != self.target.edge_count()
            || self.vertex_images.len() != self.source.vertex_count()
            || self.edge_images.len() != self.source.edge_count()
        {
            return mismatch("record sizes differ from the quivers".into());
        }
        for (nv, origins) in self.vertex_origins.iter().enumerate() {
            for &ov in origins {
                if self.vertex_images[ov].is_none() {
                    return mismatch(format!("vertex {ov} is both deleted and an origin"));
                }
            }
            if origins.is_empty() {
                return mismatch(format!("new vertex {nv} has no origin"));
            }
        }
        for (ne, origins) in self.edge_origins.iter().enumerate() {
            let e = &self.target.edges()[ne];
            for &oe in origins {
                let o = &self.source.edges()[oe];
                if !self.vertex_origins[e.tail].contains(&o.tail)
                    || !self.vertex_origins[e.head].contains(&o.head)
                {
                    return mismatch(format!("edge {oe} does not fit new edge {ne}"));
                }
            }
        }
        Ok(())
    }
}

fn invert_vertex_images(images: &[Option<usize>], n_new: usize) -> Vec<Vec<usize>> {
    let mut origins = vec![Vec::new(); n_new];
    for (old, img) in images.iter().enumerate() {
        if let Some(new) = img {
            origins[*new].push(old);
        }
    }
    origins
}

fn invert_edge_images(images: &[EdgeImage], n_new: usize) -> Vec<Vec<usize>> {
    let mut origins = vec![Vec::new(); n_new];
    for (old, img) in images.iter().enumerate() {
        if let EdgeImage::Edge(new) = img {
            origins[*new].push(old);
        }
    }
    origins
}

/// Merges each group of vertices into a single vertex. Vertices not listed
/// stay on their own. New vertices are numbered in order of their smallest
/// member; edges keep their ids.
pub fn collapse_vertices(q: &Quiver, groups: &[Vec<usize>]) -> Result<Correspondence> {
    let n = q.vertex_count();
    let mut group_of = vec![None; n];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::InvalidQuiver(format!("group {g} is empty")));
        }
        for &v in members {
            q.check_vertex(v)?;
            if group_of[v].is_some() {
                return Err(Error::InvalidQuiver(format!(
                    "vertex {v} appears in more than one group"
                )));
            }
            group_of[v] = Some(g);
        }
    }
    let mut vertex_images = vec![None; n];
    let mut group_image = vec![None; groups.len()];
    let mut labels = Vec::new();
    for v in 0..n {
        let new = match group_of[v] {
            Some(g) => match group_image[g] {
                Some(x) => x,
                None => {
                    let x = labels.len();
                    let mut members = groups[g].clone();
                    members.sort_unstable();
                    let names: Vec<&str> = members.iter().map(|&u| q.labels()[u].as_str()).collect();
                    labels.push(names.join("+"));
                    group_image[g] = Some(x);
                    x
                }
            },
            None => {
                labels.push(q.labels()[v].clone());
                labels.len() - 1
            }
        };
        vertex_images[v] = Some(new);
    }
    let img = |v: usize| vertex_images[v].expect("every vertex survives a collapse");
    let arrows: Vec<(usize, usize)> = q.edges().iter().map(|e| (img(e.tail), img(e.head))).collect();
    let target = Quiver::new(labels, &arrows)?;
    let edge_images: Vec<EdgeImage> = (0..q.edge_count()).map(EdgeImage::Edge).collect();
    Ok(Correspondence {
        operation: Operation::CollapseVertices,
        vertex_origins: invert_vertex_images(&vertex_images, target.vertex_count()),
        edge_origins: invert_edge_images(&edge_images, target.edge_count()),
        source: q.clone(),
        target,
        vertex_images,
        edge_images,
    })
}

/// Replaces a bundle of parallel edges by one edge, placed at the position of
/// the bundle's smallest id. Remaining edges are renumbered densely.
pub fn collapse_edges(q: &Quiver, bundle: &[usize]) -> Result<Correspondence> {
    if bundle.is_empty() {
        return Err(Error::NotParallel("empty bundle".into()));
    }
    let mut bundle = bundle.to_vec();
    bundle.sort_unstable();
    bundle.dedup();
    let first = *q.edge(bundle[0])?;
    for &e in &bundle {
        let edge = q.edge(e)?;
        if edge.tail != first.tail || edge.head != first.head {
            return Err(Error::NotParallel(format!(
                "edge {e} is not parallel to edge {}",
                first.id
            )));
        }
    }
    let mut edge_images = vec![EdgeImage::Deleted; q.edge_count()];
    let mut arrows = Vec::new();
    for e in q.edges() {
        if bundle.contains(&e.id) {
            if e.id == first.id {
                arrows.push((e.tail, e.head));
            }
            continue;
        }
        edge_images[e.id] = EdgeImage::Edge(arrows.len());
        arrows.push((e.tail, e.head));
    }
    // position of the merged edge = number of kept edges before it
    let merged = q.edges()[..first.id]
        .iter()
        .filter(|e| !bundle.contains(&e.id))
        .count();
    for &e in &bundle {
        edge_images[e] = EdgeImage::Edge(merged);
    }
    let target = Quiver::new(q.labels().to_vec(), &arrows)?;
    let vertex_images: Vec<Option<usize>> = (0..q.vertex_count()).map(Some).collect();
    Ok(Correspondence {
        operation: Operation::CollapseEdges,
        vertex_origins: invert_vertex_images(&vertex_images, target.vertex_count()),
        edge_origins: invert_edge_images(&edge_images, target.edge_count()),
        source: q.clone(),
        target,
        vertex_images,
        edge_images,
    })
}

/// Adds a copy `v'` of vertex `v` (appended last) with a copy of every edge
/// incident to `v`; a loop at `v` becomes a loop at `v'`. Copies are appended
/// after the original edges in id order.
pub fn clone_vertex(q: &Quiver, v: usize) -> Result<Correspondence> {
    q.check_vertex(v)?;
    let nv = q.vertex_count();
    let mut labels = q.labels().to_vec();
    labels.push(format!("{}'", q.labels()[v]));
    let mut arrows: Vec<(usize, usize)> = q.edges().iter().map(|e| (e.tail, e.head)).collect();
    let mut edge_origins: Vec<Vec<usize>> = (0..q.edge_count()).map(|e| vec![e]).collect();
    for e in q.edges() {
        let copy = match (e.tail == v, e.head == v) {
            (true, true) => Some((nv, nv)),
            (true, false) => Some((nv, e.head)),
            (false, true) => Some((e.tail, nv)),
            (false, false) => None,
        };
        if let Some(a) = copy {
            arrows.push(a);
            edge_origins.push(vec![e.id]);
        }
    }
    let target = Quiver::new(labels, &arrows)?;
    let mut vertex_origins: Vec<Vec<usize>> = (0..nv).map(|u| vec![u]).collect();
    vertex_origins.push(vec![v]);
    Ok(Correspondence {
        operation: Operation::CloneVertex,
        source: q.clone(),
        target,
        vertex_images: (0..nv).map(Some).collect(),
        edge_images: (0..q.edge_count()).map(EdgeImage::Edge).collect(),
        vertex_origins,
        edge_origins,
    })
}

/// Appends a parallel copy of edge `e`.
pub fn clone_edge(q: &Quiver, e: usize) -> Result<Correspondence> {
    let edge = *q.edge(e)?;
    let mut arrows: Vec<(usize, usize)> = q.edges().iter().map(|a| (a.tail, a.head)).collect();
    arrows.push((edge.tail, edge.head));
    let target = Quiver::new(q.labels().to_vec(), &arrows)?;
    let mut edge_origins: Vec<Vec<usize>> = (0..q.edge_count()).map(|a| vec![a]).collect();
    edge_origins.push(vec![e]);
    Ok(Correspondence {
        operation: Operation::CloneEdge,
        source: q.clone(),
        target,
        vertex_images: (0..q.vertex_count()).map(Some).collect(),
        edge_images: (0..q.edge_count()).map(EdgeImage::Edge).collect(),
        vertex_origins: (0..q.vertex_count()).map(|u| vec![u]).collect(),
        edge_origins,
    })
}

/// Removes vertex `v` and every edge incident to it.
pub fn delete_vertex(q: &Quiver, v: usize) -> Result<Correspondence> {
    q.check_vertex(v)?;
    let vertex_images: Vec<Option<usize>> = (0..q.vertex_count())
        .map(|u| match u.cmp(&v) {
            std::cmp::Ordering::Less => Some(u),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(u - 1),
        })
        .collect();
    let labels: Vec<String> = q
        .labels()
        .iter()
        .enumerate()
        .filter(|&(u, _)| u != v)
        .map(|(_, l)| l.clone())
        .collect();
    let mut edge_images = Vec::with_capacity(q.edge_count());
    let mut arrows = Vec::new();
    for e in q.edges() {
        match (vertex_images[e.tail], vertex_images[e.head]) {
            (Some(t), Some(h)) => {
                edge_images.push(EdgeImage::Edge(arrows.len()));
                arrows.push((t, h));
            }
            _ => edge_images.push(EdgeImage::Deleted),
        }
    }
    let target = Quiver::new(labels, &arrows)?;
    Ok(Correspondence {
        operation: Operation::DeleteVertex,
        vertex_origins: invert_vertex_images(&vertex_images, target.vertex_count()),
        edge_origins: invert_edge_images(&edge_images, target.edge_count()),
        source: q.clone(),
        target,
        vertex_images,
        edge_images,
    })
}

/// Removes edge `e`.
pub fn delete_edge(q: &Quiver, e: usize) -> Result<Correspondence> {
    q.edge(e)?;
    let edge_images: Vec<EdgeImage> = (0..q.edge_count())
        .map(|a| match a.cmp(&e) {
            std::cmp::Ordering::Less => EdgeImage::Edge(a),
            std::cmp::Ordering::Equal => EdgeImage::Deleted,
            std::cmp::Ordering::Greater => EdgeImage::Edge(a - 1),
        })
        .collect();
    let arrows: Vec<(usize, usize)> = q
        .edges()
        .iter()
        .filter(|a| a.id != e)
        .map(|a| (a.tail, a.head))
        .collect();
    let target = Quiver::new(q.labels().to_vec(), &arrows)?;
    let vertex_images: Vec<Option<usize>> = (0..q.vertex_count()).map(Some).collect();
    Ok(Correspondence {
        operation: Operation::DeleteEdge,
        vertex_origins: invert_vertex_images(&vertex_images, target.vertex_count()),
        edge_origins: invert_edge_images(&edge_images, target.edge_count()),
        source: q.clone(),
        target,
        vertex_images,
        edge_images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_quiver() -> impl Strategy<Value = Quiver> {
        (1usize..=4)
            .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=5)))
            .prop_map(|(n, arrows)| Quiver::with_vertices(n, &arrows).unwrap())
    }

    #[test]
    fn collapse_kronecker_vertices_gives_loops() {
        let c = collapse_vertices(&Quiver::kronecker(3), &[vec![0, 1]]).unwrap();
        assert_eq!(c.target.vertex_count(), 1);
        assert_eq!(c.target.labels(), &["1+2".to_string()]);
        assert!(c.target.edges().iter().all(|e| e.tail == 0 && e.head == 0));
        c.verify().unwrap();
    }

    #[test]
    fn collapse_kronecker_edges() {
        let c = collapse_edges(&Quiver::kronecker(3), &[0, 1, 2]).unwrap();
        assert_eq!(c.target.edge_count(), 1);
        assert_eq!(c.edge_origins, vec![vec![0, 1, 2]]);
        let c = collapse_edges(&Quiver::kronecker(3), &[1, 2]).unwrap();
        assert_eq!(c.target.edge_count(), 2);
        assert_eq!(c.edge_images, vec![EdgeImage::Edge(0), EdgeImage::Edge(1), EdgeImage::Edge(1)]);
        assert!(matches!(
            collapse_edges(&Quiver::a_type(3), &[0, 1]),
            Err(Error::NotParallel(_))
        ));
    }

    #[test]
    fn clone_middle_of_a3() {
        let c = clone_vertex(&Quiver::a_type(3), 1).unwrap();
        assert_eq!(c.target.vertex_count(), 4);
        assert_eq!(c.target.edge_count(), 4);
        c.verify().unwrap();
    }

    #[test]
    fn clone_jordan_vertex_copies_the_loop() {
        let c = clone_vertex(&Quiver::jordan(), 0).unwrap();
        assert_eq!(c.target.vertex_count(), 2);
        let e = c.target.edges();
        assert_eq!((e[0].tail, e[0].head), (0, 0));
        assert_eq!((e[1].tail, e[1].head), (1, 1));
    }

    #[test]
    fn delete_vertex_drops_incident_edges() {
        let c = delete_vertex(&Quiver::a_type(3), 1).unwrap();
        assert_eq!(c.target.vertex_count(), 2);
        assert_eq!(c.target.edge_count(), 0);
        assert_eq!(c.edge_images, vec![EdgeImage::Deleted, EdgeImage::Deleted]);
        c.verify().unwrap();
    }

    proptest! {
        #[test]
        fn clone_then_delete_clone_restores(q in arb_quiver(), v in 0usize..4) {
            let v = v % q.vertex_count();
            let c = clone_vertex(&q, v).unwrap();
            prop_assert!(c.verify().is_ok());
            let d = delete_vertex(&c.target, q.vertex_count()).unwrap();
            prop_assert_eq!(d.target, q);
        }

        #[test]
        fn clone_then_delete_edge_restores(q in arb_quiver(), e in 0usize..5) {
            prop_assume!(q.edge_count() > 0);
            let e = e % q.edge_count();
            let c = clone_edge(&q, e).unwrap();
            let d = delete_edge(&c.target, q.edge_count()).unwrap();
            prop_assert_eq!(d.target, q);
        }

        #[test]
        fn correspondence_records_are_consistent(q in arb_quiver(), v in 0usize..4, w in 0usize..4) {
            let v = v % q.vertex_count();
            let w = w % q.vertex_count();
            let group = if v == w { vec![v] } else { vec![v, w] };
            let records = vec![
                collapse_vertices(&q, &[group]).unwrap(),
                clone_vertex(&q, v).unwrap(),
                delete_vertex(&q, v).unwrap(),
            ];
            for c in records {
                prop_assert!(c.verify().is_ok());
                let total: usize = c.edge_origins.iter().map(Vec::len).sum();
                let kept = c.edge_images.iter().filter(|i| **i != EdgeImage::Deleted).count();
                match c.operation {
                    Operation::CloneVertex => prop_assert!(total >= kept),
                    _ => prop_assert_eq!(total, kept),
                }
            }
        }
    }
}
