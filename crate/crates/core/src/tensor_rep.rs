//! Tensor products and duals of representations, restriction along quiver
//! operations, and transport of stability parameters.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::path_algebra::{commutation_generators, CommutationIdeal, Relation};
use crate::quiver::{tensor_quiver, Correspondence, DimensionVector, EdgeOrigin, Operation, TensorQuiverMap};
use crate::representation::{Representation, StabilityData};

/// A representation of `Q' ⊗ Q''` built from one representation of each factor.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorRepresentation {
    pub rep: Representation,
    pub map: TensorQuiverMap,
    pub left: Representation,
    pub right: Representation,
    pub ideal: CommutationIdeal,
}

impl TensorRepresentation {
    pub fn relations(&self) -> Vec<Relation> {
        self.ideal.relations(&self.map)
    }
}

/// `(alpha, j) -> phi_alpha ⊗ I`, `(i, beta) -> I ⊗ psi_beta`.
pub fn tensor(a: &Representation, b: &Representation) -> Result<TensorRepresentation> {
    let map = tensor_quiver(a.quiver(), b.quiver())?;
    let (da, db) = (a.dims(), b.dims());
    let mut dims = Vec::with_capacity(map.quiver.vertex_count());
    for i in 0..da.len() {
        for j in 0..db.len() {
            dims.push(da[i] * db[j]);
        }
    }
    let matrices = map
        .origins()
        .iter()
        .map(|o| match *o {
            EdgeOrigin::First { edge, vertex } => linalg::kron(a.matrix(edge), &linalg::identity(db[vertex])),
            EdgeOrigin::Second { vertex, edge } => linalg::kron(&linalg::identity(da[vertex]), b.matrix(edge)),
        })
        .collect();
    let rep = Representation::new(&map.quiver, DimensionVector(dims), matrices)?;
    Ok(TensorRepresentation {
        rep,
        ideal: commutation_generators(&map),
        map,
        left: a.clone(),
        right: b.clone(),
    })
}

/// The dual representation of `Q^op`: edge `alpha*` carries `-phi_alpha^T`.
pub fn dual(rep: &Representation) -> Representation {
    let op = rep.quiver().opposite();
    let matrices = rep.matrices().iter().map(|m| -m.transpose()).collect();
    Representation::new(&op, rep.dims().clone(), matrices).expect("dual shapes match the opposite quiver")
}

/// Pulls `rep` through a quiver operation. Each new vertex carries the direct
/// sum of its origin spaces; each new edge carries the sum of its origin maps,
/// embedded blockwise.
pub fn restrict_along(rep: &Representation, corr: &Correspondence) -> Result<Representation> {
    if rep.quiver() != &corr.source {
        return Err(Error::CorrespondenceMismatch(
            "representation does not live on the source quiver".into(),
        ));
    }
    corr.verify()?;
    let d = rep.dims();
    let new_dims: Vec<usize> = corr
        .vertex_origins
        .iter()
        .map(|origins| origins.iter().map(|&v| d[v]).sum())
        .collect();
    // offset of old vertex `v` inside new vertex `nv`
    let offset = |nv: usize, v: usize| -> usize {
        corr.vertex_origins[nv]
            .iter()
            .take_while(|&&u| u != v)
            .map(|&u| d[u])
            .sum()
    };
    let mut matrices = Vec::with_capacity(corr.target.edge_count());
    for e in corr.target.edges() {
        let mut m = linalg::zeros(new_dims[e.head], new_dims[e.tail]);
        for &oe in &corr.edge_origins[e.id] {
            let o = corr.source.edges()[oe];
            let (r, c) = (offset(e.head, o.head), offset(e.tail, o.tail));
            let block = rep.matrix(oe);
            let mut view = m.view_mut((r, c), block.shape());
            view += block;
        }
        matrices.push(m);
    }
    Representation::new(&corr.target, DimensionVector(new_dims), matrices)
}

/// `sigma_(i,j) = sigma'_i sigma''_j`, `theta_(i,j) = theta'_i sigma''_j + theta''_j sigma'_i`.
pub fn tensor_theta(a: &StabilityData, b: &StabilityData) -> StabilityData {
    let mut sigma = Vec::with_capacity(a.len() * b.len());
    let mut theta = Vec::with_capacity(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            sigma.push(a.sigma[i] * b.sigma[j]);
            theta.push(a.theta[i] * b.sigma[j] + b.theta[j] * a.sigma[i]);
        }
    }
    StabilityData { sigma, theta }
}

/// Stability parameters after a quiver operation. Edge collapse, clone and
/// delete need the isotropy constant `tau` of the affected edges.
pub fn transported_theta(s: &StabilityData, corr: &Correspondence, tau: Option<f64>) -> Result<StabilityData> {
    if s.len() != corr.source.vertex_count() {
        return Err(Error::DimensionMismatch("stability data length".into()));
    }
    let need_tau = || tau.ok_or_else(|| Error::Precondition("this operation needs the isotropy constant tau".into()));
    let mut sigma = Vec::with_capacity(corr.target.vertex_count());
    let mut theta = Vec::with_capacity(corr.target.vertex_count());
    for origins in &corr.vertex_origins {
        let v = origins[0];
        for &u in &origins[1..] {
            if s.theta[u] != s.theta[v] || s.sigma[u] != s.sigma[v] {
                return Err(Error::Precondition(format!(
                    "collapsed vertices {v} and {u} carry different stability parameters"
                )));
            }
        }
        sigma.push(s.sigma[v]);
        theta.push(s.theta[v]);
    }
    // (shift at head, shift at tail) per unit of tau
    let shift = match corr.operation {
        Operation::CollapseEdges | Operation::CloneEdge => Some((-1.0, 1.0)),
        Operation::DeleteEdge => Some((1.0, -1.0)),
        _ => None,
    };
    if let Some((sh, st)) = shift {
        let tau = need_tau()?;
        let affected = match corr.operation {
            Operation::CollapseEdges => corr.edge_origins.iter().find(|o| o.len() > 1).map(|o| o[0]),
            Operation::CloneEdge => corr.edge_origins.last().map(|o| o[0]),
            _ => corr.edge_images.iter().position(|i| *i == crate::quiver::EdgeImage::Deleted),
        };
        if let Some(old) = affected {
            let e = corr.source.edges()[old];
            let img = |v: usize| corr.vertex_images[v].expect("edge operations keep vertices");
            theta[img(e.head)] += sh * tau;
            theta[img(e.tail)] += st * tau;
        }
    }
    StabilityData::new(sigma, theta)
}

/// `tau` with `S S* = tau I` and `S* S = tau I` for `S = sum of the bundle's maps`,
/// or `None` when either product is not scalar within `tol` (relative to `max(1, |tau|)`).
pub fn isotropy_constant(rep: &Representation, bundle: &[usize], tol: f64) -> Result<Option<f64>> {
    let q = rep.quiver();
    let Some(&first) = bundle.first() else {
        return Err(Error::NotParallel("empty bundle".into()));
    };
    let e0 = *q.edge(first)?;
    let mut s = linalg::zeros(rep.dims()[e0.head], rep.dims()[e0.tail]);
    for &e in bundle {
        let edge = q.edge(e)?;
        if edge.head != e0.head || edge.tail != e0.tail {
            return Err(Error::NotParallel(format!("edge {e} is not parallel to edge {first}")));
        }
        s += rep.matrix(e);
    }
    let outer = &s * s.adjoint();
    let inner = s.adjoint() * &s;
    let tau = if outer.nrows() > 0 {
        outer.trace().re / outer.nrows() as f64
    } else if inner.nrows() > 0 {
        inner.trace().re / inner.nrows() as f64
    } else {
        0.0
    };
    let scale = tol * tau.abs().max(1.0);
    let off = |m: &CMatrix| linalg::frobenius(&(m - linalg::identity(m.nrows()) * linalg::c(tau, 0.0)));
    if off(&outer) <= scale && off(&inner) <= scale {
        Ok(Some(tau))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::quiver::{clone_edge, collapse_edges, collapse_vertices, delete_edge, Quiver};
    use crate::representation::{direct_sum, DEFAULT_TOL};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[usize]) -> DimensionVector {
        DimensionVector(v.to_vec())
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn jordan_tensor_jordan() {
        let mut r = rng(1);
        let j = Quiver::jordan();
        let a = Representation::random(&j, dv(&[2]), &mut r).unwrap();
        let b = Representation::random(&j, dv(&[3]), &mut r).unwrap();
        let t = tensor(&a, &b).unwrap();
        assert_eq!(t.rep.dims(), &dv(&[6]));
        assert_eq!(t.rep.matrix(0), &linalg::kron(a.matrix(0), &linalg::identity(3)));
        assert_eq!(t.rep.matrix(1), &linalg::kron(&linalg::identity(2), b.matrix(0)));
        let check = t.rep.satisfies_relations(&t.relations(), 0.0).unwrap();
        assert!(check.satisfied);
    }

    #[test]
    fn tensor_dims_multiply() {
        let q = Quiver::kronecker(1);
        let a = Representation::zero(&q, dv(&[2, 3])).unwrap();
        let b = Representation::zero(&q, dv(&[1, 4])).unwrap();
        assert_eq!(tensor(&a, &b).unwrap().rep.dims(), &dv(&[2, 8, 3, 12]));
    }

    #[test]
    fn kronecker_diamond_arms() {
        let z = [c(1.0, 2.0), c(-0.5, 0.0)];
        let w = [c(0.0, 1.0), c(3.0, 0.0), c(2.0, -1.0)];
        let qa = Quiver::kronecker(2);
        let qb = Quiver::kronecker(3);
        let scal = |x: Complex64| CMatrix::from_element(1, 1, x);
        let a = Representation::new(&qa, dv(&[1, 1]), z.iter().map(|&x| scal(x)).collect()).unwrap();
        let b = Representation::new(&qb, dv(&[1, 1]), w.iter().map(|&x| scal(x)).collect()).unwrap();
        let t = tensor(&a, &b).unwrap();
        for alpha in 0..2 {
            for j in 0..2 {
                assert_eq!(t.rep.matrix(t.map.first_edge(alpha, j))[(0, 0)], z[alpha]);
            }
        }
        for i in 0..2 {
            for beta in 0..3 {
                assert_eq!(t.rep.matrix(t.map.second_edge(i, beta))[(0, 0)], w[beta]);
            }
        }
        assert!(t.rep.satisfies_relations(&t.relations(), 0.0).unwrap().satisfied);
    }

    type Complex64 = num_complex::Complex64;

    #[test]
    fn dual_is_an_involution_and_transposes() {
        let mut r = rng(2);
        let q = Quiver::a_type(2);
        let rep = Representation::random(&q, dv(&[2, 3]), &mut r).unwrap();
        let d = dual(&rep);
        assert_eq!(d.quiver(), &q.opposite());
        assert_eq!(d.matrix(0), &(-rep.matrix(0).transpose()));
        assert_eq!(dual(&d), rep);
    }

    #[test]
    fn collapsing_jordan_square_loops_gives_sum() {
        let mut r = rng(3);
        let j = Quiver::jordan();
        let a = Representation::random(&j, dv(&[2]), &mut r).unwrap();
        let b = Representation::random(&j, dv(&[3]), &mut r).unwrap();
        let t = tensor(&a, &b).unwrap();
        let corr = collapse_edges(&t.map.quiver, &[0, 1]).unwrap();
        let collapsed = restrict_along(&t.rep, &corr).unwrap();
        let want = linalg::kron(a.matrix(0), &linalg::identity(3)) + linalg::kron(&linalg::identity(2), b.matrix(0));
        assert_eq!(collapsed.quiver().vertex_count(), 1);
        assert_eq!(collapsed.quiver().edge_count(), 1);
        assert_eq!(collapsed.matrix(0), &want);

        let s = StabilityData::linear(vec![0.75]).unwrap();
        let moved = transported_theta(&s, &corr, Some(2.5)).unwrap();
        assert_eq!(moved.theta, vec![0.75]);
    }

    #[test]
    fn deformation_complex_collapse() {
        // A_3 with edges alpha_2 (id 0): 2 -> 1 and alpha_3 (id 1): 3 -> 2
        let mut r = rng(4);
        let q = Quiver::a_type(3);
        let e = Representation::random(&q, dv(&[2, 1, 2]), &mut r).unwrap();
        let hom = tensor(&dual(&e), &e).unwrap();
        let diag: Vec<usize> = (0..3).map(|i| hom.map.vertex_index(i, i)).collect();
        let merged = collapse_vertices(&hom.map.quiver, &[diag.clone()]).unwrap();
        let rep = restrict_along(&hom.rep, &merged).unwrap();
        let center = merged.vertex_images[diag[0]].unwrap();
        assert_eq!(rep.dims()[center], 4 + 1 + 4);

        // vertex (1, 0) = E_2^* ⊗ E_1 receives (alpha_2^*, 0) from (0, 0)
        // and (1, alpha_2) from (1, 1)
        let target = merged.vertex_images[hom.map.vertex_index(1, 0)].unwrap();
        let bundle: Vec<usize> = rep
            .quiver()
            .edges()
            .iter()
            .filter(|x| x.tail == center && x.head == target)
            .map(|x| x.id)
            .collect();
        assert_eq!(bundle.len(), 2);
        let collapsed = collapse_edges(rep.quiver(), &bundle).unwrap();
        let complex = restrict_along(&rep, &collapsed).unwrap();
        let id = collapsed.edge_images[bundle[0]];
        let crate::quiver::EdgeImage::Edge(id) = id else { panic!() };
        let m = complex.matrix(id);
        // columns: Hom(E_1,E_1) (4) | Hom(E_2,E_2) (1) | Hom(E_3,E_3) (4)
        assert_eq!(m.shape(), (2, 9));
        let from_e1 = -e.matrix(0).transpose();
        let want_left = linalg::kron(&from_e1, &linalg::identity(2));
        let want_mid = linalg::kron(&linalg::identity(1), e.matrix(0));
        assert_eq!(m.columns(0, 4).into_owned(), want_left);
        assert_eq!(m.columns(4, 1).into_owned(), want_mid);
        assert!(m.columns(5, 4).iter().all(|x| *x == c(0.0, 0.0)));
    }

    #[test]
    fn theta_transport_examples() {
        let a = StabilityData::linear(vec![1.0, -1.0]).unwrap();
        let t = tensor_theta(&a, &a);
        assert_eq!(t.theta, vec![2.0, 0.0, 0.0, -2.0]);
        assert_eq!(t.sigma, vec![1.0; 4]);
        let b = StabilityData::new(vec![2.0, 3.0], vec![0.5, 1.0]).unwrap();
        let t = tensor_theta(&a, &b);
        assert_eq!(t.sigma, vec![2.0, 3.0, 2.0, 3.0]);
        assert_eq!(t.theta, vec![2.5, 4.0, -1.5, -2.0]);

        let q = Quiver::kronecker(2);
        let s = StabilityData::linear(vec![1.0, -1.0]).unwrap();
        let cl = transported_theta(&s, &clone_edge(&q, 0).unwrap(), Some(0.5)).unwrap();
        assert_eq!(cl.theta, vec![1.5, -1.5]);
        let de = transported_theta(&s, &delete_edge(&q, 0).unwrap(), Some(0.5)).unwrap();
        assert_eq!(de.theta, vec![0.5, -0.5]);
        assert!(transported_theta(&s, &delete_edge(&q, 0).unwrap(), None).is_err());
        let merged = collapse_vertices(&q, &[vec![0, 1]]).unwrap();
        assert!(matches!(transported_theta(&s, &merged, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn isotropy_of_unitary_bundles() {
        let mut r = rng(5);
        let q = Quiver::kronecker(2);
        let u = linalg::random_unitary(&mut r, 3);
        let rep = Representation::new(
            &q,
            dv(&[3, 3]),
            vec![&u * c(0.5, 0.0), &u * c(1.5, 0.0)],
        )
        .unwrap();
        let tau = isotropy_constant(&rep, &[0, 1], 1e-12).unwrap().unwrap();
        assert!((tau - 4.0).abs() < 1e-12);
        let generic = Representation::random(&q, dv(&[3, 3]), &mut r).unwrap();
        assert_eq!(isotropy_constant(&generic, &[0, 1], 1e-9).unwrap(), None);
    }

    fn brackets(rep: &Representation) -> Vec<CMatrix> {
        let q = rep.quiver();
        let mut out: Vec<CMatrix> = rep.dims().0.iter().map(|&d| linalg::zeros(d, d)).collect();
        for e in q.edges() {
            let m = rep.matrix(e.id);
            out[e.head] += m * m.adjoint();
            out[e.tail] -= m.adjoint() * m;
        }
        out
    }

    fn arb_pair() -> impl Strategy<Value = (Quiver, Quiver, Vec<usize>, Vec<usize>, u64)> {
        let quiver = (1usize..=2).prop_flat_map(|n| {
            (Just(n), prop::collection::vec((0..n, 0..n), 0..=3), prop::collection::vec(1usize..=2, n))
        });
        (quiver.clone(), quiver, any::<u64>()).prop_map(|((n1, a1, d1), (n2, a2, d2), seed)| {
            (
                Quiver::with_vertices(n1, &a1).unwrap(),
                Quiver::with_vertices(n2, &a2).unwrap(),
                d1,
                d2,
                seed,
            )
        })
    }

    proptest! {
        #[test]
        fn tensors_satisfy_commutation_relations((qa, qb, da, db, seed) in arb_pair()) {
            let mut r = rng(seed);
            let a = Representation::random(&qa, DimensionVector(da), &mut r).unwrap();
            let b = Representation::random(&qb, DimensionVector(db), &mut r).unwrap();
            let t = tensor(&a, &b).unwrap();
            prop_assert!(t.rep.satisfies_relations(&t.relations(), 0.0).unwrap().satisfied);
        }

        #[test]
        fn brackets_are_additive((qa, qb, da, db, seed) in arb_pair()) {
            let mut r = rng(seed);
            let a = Representation::random(&qa, DimensionVector(da), &mut r).unwrap();
            let b = Representation::random(&qb, DimensionVector(db), &mut r).unwrap();
            let t = tensor(&a, &b).unwrap();
            let (ba, bb, bt) = (brackets(&a), brackets(&b), brackets(&t.rep));
            for i in 0..qa.vertex_count() {
                for j in 0..qb.vertex_count() {
                    let want = linalg::kron(&ba[i], &linalg::identity(b.dims()[j]))
                        + linalg::kron(&linalg::identity(a.dims()[i]), &bb[j]);
                    let got = &bt[t.map.vertex_index(i, j)];
                    prop_assert!(linalg::frobenius(&(got - want)) <= 1e-12);
                }
            }
        }

        #[test]
        fn tensor_distributes_over_direct_sums((qa, qb, da, db, seed) in arb_pair()) {
            let mut r = rng(seed);
            let a1 = Representation::random(&qa, DimensionVector(da.clone()), &mut r).unwrap();
            let a2 = Representation::random(&qa, DimensionVector(da), &mut r).unwrap();
            let b1 = Representation::random(&qb, DimensionVector(db.clone()), &mut r).unwrap();
            let b2 = Representation::random(&qb, DimensionVector(db), &mut r).unwrap();

            // first factor: the slow axis already lines up, no permutation needed
            let lhs = tensor(&direct_sum(&a1, &a2).unwrap(), &b1).unwrap().rep;
            let rhs = direct_sum(&tensor(&a1, &b1).unwrap().rep, &tensor(&a2, &b1).unwrap().rep).unwrap();
            prop_assert_eq!(&lhs, &rhs);

            // second factor: reorder (k, l) with l in b1 ⊕ b2 into block order
            let lhs = tensor(&a1, &direct_sum(&b1, &b2).unwrap()).unwrap();
            let rhs = direct_sum(&tensor(&a1, &b1).unwrap().rep, &tensor(&a1, &b2).unwrap().rep).unwrap();
            let perm = |i: usize, j: usize| -> Vec<usize> {
                // position in lhs of each rhs basis vector at vertex (i, j)
                let (n, p1, p2) = (a1.dims()[i], b1.dims()[j], b2.dims()[j]);
                let mut out = Vec::new();
                for k in 0..n { for l in 0..p1 { out.push(k * (p1 + p2) + l); } }
                for k in 0..n { for l in 0..p2 { out.push(k * (p1 + p2) + p1 + l); } }
                out
            };
            for e in lhs.map.quiver.edges() {
                let (hi, hj) = lhs.map.vertex_pair(e.head);
                let (ti, tj) = lhs.map.vertex_pair(e.tail);
                let (ph, pt) = (perm(hi, hj), perm(ti, tj));
                let m = lhs.rep.matrix(e.id);
                let permuted = CMatrix::from_fn(ph.len(), pt.len(), |r, c| m[(ph[r], pt[c])]);
                prop_assert_eq!(&permuted, rhs.matrix(e.id));
            }
        }

        #[test]
        fn deleting_a_zero_edge_keeps_relations(seed in any::<u64>()) {
            let mut r = rng(seed);
            let q = Quiver::with_vertices(2, &[(0, 1), (0, 1), (1, 1)]).unwrap();
            let mut rep = Representation::random(&q, dv(&[2, 2]), &mut r).unwrap();
            let mut ms = rep.matrices().to_vec();
            ms[1] = linalg::zeros(2, 2);
            rep = rep.with_matrices(ms).unwrap();
            let corr = delete_edge(&q, 1).unwrap();
            let restricted = restrict_along(&rep, &corr).unwrap();
            let before = brackets(&rep);
            let after = brackets(&restricted);
            for (x, y) in before.iter().zip(&after) {
                prop_assert!(linalg::frobenius(&(x - y)) <= DEFAULT_TOL);
            }
        }
    }
}
