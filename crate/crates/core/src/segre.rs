//! Semi-invariants of thin representations of the Kronecker diamond
//! `Q_n ⊗ Q_m` and membership in the image of the tensor product map.
//!
//! Vertex indices follow [`tensor_quiver`]: source `(0,0)`, bottom `(0,1)`,
//! top `(1,0)`, sink `(1,1)`. The arms are
//! `x` (source to top, `n` edges), `y` (top to sink, `m`),
//! `w` (source to bottom, `m`) and `z` (bottom to sink, `n`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quiver::{tensor_quiver, Quiver, TensorQuiverMap};
use crate::representation::Representation;

/// `s_ij = x_i y_j` (`n x m`) and `t_kl = w_k z_l` (`m x n`).
#[derive(Clone, Debug, PartialEq)]
pub struct DiamondInvariants {
    pub s: CMatrix,
    pub t: CMatrix,
}

/// `(n, m)` when `q` has the edge structure of `Q_n ⊗ Q_m`.
pub fn diamond_shape(q: &Quiver) -> Option<(usize, usize)> {
    if q.vertex_count() != 4 {
        return None;
    }
    let n = q.edges().iter().filter(|e| e.tail == 0 && e.head == 2).count();
    let m = q.edges().iter().filter(|e| e.tail == 0 && e.head == 1).count();
    let expected = diamond(n, m);
    (expected.quiver.edges() == q.edges()).then_some((n, m))
}

fn diamond(n: usize, m: usize) -> TensorQuiverMap {
    tensor_quiver(&Quiver::kronecker(n), &Quiver::kronecker(m)).expect("nonempty factors")
}

fn arm(rep: &Representation, ids: impl Iterator<Item = usize>) -> Vec<Complex64> {
    ids.map(|e| rep.matrix(e)[(0, 0)]).collect()
}

pub fn diamond_invariants(rep: &Representation) -> Result<DiamondInvariants> {
    let (n, m) = diamond_shape(rep.quiver())
        .ok_or_else(|| Error::Precondition("not a Kronecker diamond Q_n ⊗ Q_m".into()))?;
    if rep.dims().0 != [1, 1, 1, 1] {
        return Err(Error::NotThin);
    }
    let map = diamond(n, m);
    let x = arm(rep, (0..n).map(|a| map.first_edge(a, 0)));
    let y = arm(rep, (0..m).map(|b| map.second_edge(1, b)));
    let w = arm(rep, (0..m).map(|b| map.second_edge(0, b)));
    let z = arm(rep, (0..n).map(|a| map.first_edge(a, 1)));
    Ok(DiamondInvariants {
        s: CMatrix::from_fn(n, m, |i, j| x[i] * y[j]),
        t: CMatrix::from_fn(m, n, |k, l| w[k] * z[l]),
    })
}

fn max_minor(a: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i1 in 0..a.nrows() {
        for i2 in i1 + 1..a.nrows() {
            for j1 in 0..a.ncols() {
                for j2 in j1 + 1..a.ncols() {
                    let minor = a[(i1, j1)] * a[(i2, j2)] - a[(i1, j2)] * a[(i2, j1)];
                    worst = worst.max(minor.norm());
                }
            }
        }
    }
    worst
}

/// Largest `|2x2 minor|` of `s` and of `t`.
pub fn segre_quadric_residual(inv: &DiamondInvariants) -> f64 {
    max_minor(&inv.s).max(max_minor(&inv.t))
}

/// `max |s_ij - t_ji|`.
pub fn diagonal_residual(inv: &DiamondInvariants) -> Result<f64> {
    if inv.s.shape() != (inv.t.ncols(), inv.t.nrows()) {
        return Err(Error::DimensionMismatch("s must be the shape of t transposed".into()));
    }
    Ok((&inv.s - inv.t.transpose())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factors {
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegreCheck {
    pub quadric_residual: f64,
    pub diagonal_residual: f64,
    pub in_image: bool,
    /// Kronecker factors `(z, w)` with `s = z w^T`, when in the image.
    pub factors: Option<Factors>,
}

/// Whether the invariants of `rep` come from a tensor product of two
/// Kronecker points; reconstructs the factors from the largest entry of `s`.
pub fn in_segre_image(rep: &Representation, tol: f64) -> Result<SegreCheck> {
    let inv = diamond_invariants(rep)?;
    let all_zero = inv.s.iter().chain(inv.t.iter()).all(|z| *z == Complex64::new(0.0, 0.0));
    if all_zero {
        return Err(Error::DegenerateInvariants);
    }
    let quadric = segre_quadric_residual(&inv);
    let diagonal = diagonal_residual(&inv)?;
    let in_image = quadric <= tol && diagonal <= tol;
    let factors = in_image.then(|| reconstruct(&inv.s)).flatten();
    Ok(SegreCheck {
        quadric_residual: quadric,
        diagonal_residual: diagonal,
        in_image,
        factors,
    })
}

fn reconstruct(s: &CMatrix) -> Option<Factors> {
    let (mut pi, mut pj, mut best) = (0, 0, 0.0);
    for i in 0..s.nrows() {
        for j in 0..s.ncols() {
            if s[(i, j)].norm() > best {
                (pi, pj, best) = (i, j, s[(i, j)].norm());
            }
        }
    }
    if best == 0.0 {
        return None;
    }
    let pivot = s[(pi, pj)];
    Some(Factors {
        z: (0..s.nrows()).map(|i| s[(i, pj)]).collect(),
        w: (0..s.ncols()).map(|j| s[(pi, j)] / pivot).collect(),
    })
}

/// Thin tensor product of the Kronecker points `z` and `w`.
pub fn tensor_of_points(z: &[Complex64], w: &[Complex64]) -> Result<Representation> {
    let point = |v: &[Complex64]| {
        Representation::new(
            &Quiver::kronecker(v.len()),
            crate::quiver::DimensionVector(vec![1, 1]),
            v.iter().map(|&x| CMatrix::from_element(1, 1, x)).collect(),
        )
    };
    Ok(crate::tensor_rep::tensor(&point(z)?, &point(w)?)?.rep)
}
