//! Complex representations of quivers: path evaluation, relations, slopes and
//! stability of thin representations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::path_algebra::Relation;
use crate::quiver::{DimensionVector, Path, Quiver};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest support [`thin_stability`] will enumerate subsets of.
pub const MAX_THIN_VERTICES: usize = 24;

/// One `d_{h alpha} x d_{t alpha}` matrix per edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::json::RepresentationJson", into = "crate::json::RepresentationJson")]
pub struct Representation {
    quiver: Quiver,
    dims: DimensionVector,
    matrices: Vec<CMatrix>,
}

impl Representation {
    pub fn new(q: &Quiver, dims: DimensionVector, matrices: Vec<CMatrix>) -> Result<Self> {
        dims.check(q)?;
        if matrices.len() != q.edge_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for {} edges",
                matrices.len(),
                q.edge_count()
            )));
        }
        for (e, m) in q.edges().iter().zip(&matrices) {
            let want = (dims[e.head], dims[e.tail]);
            if m.shape() != want {
                return Err(Error::DimensionMismatch(format!(
                    "edge {} carries a {}x{} matrix, expected {}x{}",
                    e.id,
                    m.nrows(),
                    m.ncols(),
                    want.0,
                    want.1
                )));
            }
            if !linalg::is_finite(m) {
                return Err(Error::NonFinite(format!("matrix on edge {}", e.id)));
            }
        }
        Ok(Representation {
            quiver: q.clone(),
            dims,
            matrices,
        })
    }

    pub fn zero(q: &Quiver, dims: DimensionVector) -> Result<Self> {
        dims.check(q)?;
        let matrices = q
            .edges()
            .iter()
            .map(|e| linalg::zeros(dims[e.head], dims[e.tail]))
            .collect();
        Representation::new(q, dims, matrices)
    }

    /// Entries uniform in the unit box of the complex plane.
    pub fn random<R: Rng + ?Sized>(q: &Quiver, dims: DimensionVector, rng: &mut R) -> Result<Self> {
        dims.check(q)?;
        let matrices = q
            .edges()
            .iter()
            .map(|e| linalg::random_complex(rng, dims[e.head], dims[e.tail]))
            .collect();
        Representation::new(q, dims, matrices)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, edge: usize) -> &CMatrix {
        &self.matrices[edge]
    }

    pub fn is_thin(&self) -> bool {
        self.dims.0.iter().all(|&d| d <= 1)
    }

    /// Same quiver and dimension vector, new matrices.
    pub fn with_matrices(&self, matrices: Vec<CMatrix>) -> Result<Self> {
        Representation::new(&self.quiver, self.dims.clone(), matrices)
    }

    /// `sum_alpha |phi_alpha|_F^2`.
    pub fn norm_sq(&self) -> f64 {
        self.matrices.iter().map(linalg::frobenius_sq).sum()
    }

    /// `phi_{alpha_1} ... phi_{alpha_k}`; the identity for a trivial path.
    pub fn evaluate_path(&self, p: &Path) -> Result<CMatrix> {
        self.quiver.validate_path(p)?;
        let mut acc = linalg::identity(self.dims[p.tail()]);
        for &e in p.edges().iter().rev() {
            acc = &self.matrices[e] * acc;
        }
        Ok(acc)
    }

    /// `nu_r(phi) = sum_p c_p phi_p`.
    pub fn evaluate_relation(&self, r: &Relation) -> Result<CMatrix> {
        let mut acc = linalg::zeros(self.dims[r.head()], self.dims[r.tail()]);
        for (c, p) in r.terms() {
            let m = self.evaluate_path(p)?;
            if m.shape() != acc.shape() {
                return Err(Error::DimensionMismatch("relation terms disagree".into()));
            }
            acc += m * *c;
        }
        Ok(acc)
    }

    pub fn satisfies_relations(&self, rels: &[Relation], tol: f64) -> Result<RelationCheck> {
        let residuals = rels
            .iter()
            .map(|r| self.evaluate_relation(r).map(|m| linalg::frobenius(&m)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(RelationCheck {
            satisfied: residuals.iter().all(|&x| x <= tol),
            residuals,
        })
    }

    /// `g . phi = (g_{h alpha} phi_alpha g_{t alpha}^{-1})`.
    pub fn act(&self, g: &[CMatrix]) -> Result<Self> {
        if g.len() != self.quiver.vertex_count() {
            return Err(Error::DimensionMismatch("one group element per vertex".into()));
        }
        let mut inverses = Vec::with_capacity(g.len());
        for (v, gv) in g.iter().enumerate() {
            if gv.shape() != (self.dims[v], self.dims[v]) {
                return Err(Error::DimensionMismatch(format!("group element at vertex {v}")));
            }
            inverses.push(
                gv.clone()
                    .try_inverse()
                    .ok_or_else(|| Error::Precondition(format!("g at vertex {v} is singular")))?,
            );
        }
        let matrices = self
            .quiver
            .edges()
            .iter()
            .map(|e| &g[e.head] * &self.matrices[e.id] * &inverses[e.tail])
            .collect();
        self.with_matrices(matrices)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub satisfied: bool,
    pub residuals: Vec<f64>,
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum(a: &Representation, b: &Representation) -> Result<Representation> {
    if a.quiver != b.quiver {
        return Err(Error::MixedQuivers);
    }
    let dims = a.dims.add(&b.dims)?;
    let matrices = a
        .matrices
        .iter()
        .zip(&b.matrices)
        .map(|(x, y)| linalg::block_diag(x, y))
        .collect();
    Representation::new(&a.quiver, dims, matrices)
}

/// Per-vertex `sigma > 0` and `theta`. In the linear setting `sigma = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityData {
    pub sigma: Vec<f64>,
    pub theta: Vec<f64>,
}

impl StabilityData {
    pub fn new(sigma: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if sigma.len() != theta.len() {
            return Err(Error::DimensionMismatch("sigma and theta lengths".into()));
        }
        if let Some(i) = sigma.iter().position(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::Precondition(format!("sigma at vertex {i} must be positive")));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("theta".into()));
        }
        Ok(StabilityData { sigma, theta })
    }

    pub fn linear(theta: Vec<f64>) -> Result<Self> {
        StabilityData::new(vec![1.0; theta.len()], theta)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `theta'` balanced against `d`.
    pub fn balanced(&self, d: &DimensionVector) -> Result<Vec<f64>> {
        balance_theta(&self.theta, d)
    }
}

/// Exact rational value of a finite float.
pub fn to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::NonFinite(format!("{x}")))
}

fn rational_theta(theta: &[f64]) -> Result<Vec<BigRational>> {
    theta.iter().map(|&t| to_rational(t)).collect()
}

/// `sum_i theta_i d_i / sum_i d_i`, exactly.
pub fn slope_exact(d: &DimensionVector, theta: &[BigRational]) -> Result<BigRational> {
    if d.len() != theta.len() {
        return Err(Error::DimensionMismatch("theta and dimension vector lengths".into()));
    }
    let total = d.total();
    if total == 0 {
        return Err(Error::ZeroDimension);
    }
    let num: BigRational = d
        .0
        .iter()
        .zip(theta)
        .map(|(&di, t)| t * BigInt::from(di))
        .sum();
    Ok(num / BigInt::from(total))
}

pub fn slope(d: &DimensionVector, s: &StabilityData) -> Result<f64> {
    let mu = slope_exact(d, &rational_theta(&s.theta)?)?;
    Ok(mu.to_f64().unwrap_or(f64::NAN))
}

/// `theta'_i = theta_i sum_j d_j - sum_j theta_j d_j`, exactly.
pub fn balance_theta_exact(theta: &[BigRational], d: &DimensionVector) -> Result<Vec<BigRational>> {
    if d.len() != theta.len() {
        return Err(Error::DimensionMismatch("theta and dimension vector lengths".into()));
    }
    if d.is_zero() {
        return Err(Error::ZeroDimension);
    }
    let total = BigInt::from(d.total());
    let pairing: BigRational = d
        .0
        .iter()
        .zip(theta)
        .map(|(&di, t)| t * BigInt::from(di))
        .sum();
    Ok(theta.iter().map(|t| t * &total - &pairing).collect())
}

pub fn balance_theta(theta: &[f64], d: &DimensionVector) -> Result<Vec<f64>> {
    Ok(balance_theta_exact(&rational_theta(theta)?, d)?
        .iter()
        .map(|t| t.to_f64().unwrap_or(f64::NAN))
        .collect())
}

/// Per-vertex basis matrices of subspaces `F_i ⊆ C^{d_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceFamily {
    pub bases: Vec<CMatrix>,
}

impl SubspaceFamily {
    pub fn full(dims: &DimensionVector) -> Self {
        SubspaceFamily {
            bases: dims.0.iter().map(|&d| linalg::identity(d)).collect(),
        }
    }

    pub fn zero(dims: &DimensionVector) -> Self {
        SubspaceFamily {
            bases: dims.0.iter().map(|&d| linalg::zeros(d, 0)).collect(),
        }
    }
}

/// Whether `phi_alpha(F_{t alpha}) ⊆ F_{h alpha}` for every edge, measured by
/// the Frobenius norm of the component orthogonal to `F_{h alpha}`.
pub fn is_subrepresentation(rep: &Representation, f: &SubspaceFamily, tol: f64) -> Result<bool> {
    let q = rep.quiver();
    if f.bases.len() != q.vertex_count() {
        return Err(Error::DimensionMismatch("one basis per vertex".into()));
    }
    let mut projectors = Vec::with_capacity(f.bases.len());
    for (v, b) in f.bases.iter().enumerate() {
        if b.nrows() != rep.dims()[v] {
            return Err(Error::DimensionMismatch(format!("basis at vertex {v}")));
        }
        if b.ncols() > b.nrows() {
            return Err(Error::RankDeficient(v));
        }
        if b.ncols() > 0 {
            let sv = linalg::singular_values(b);
            let smax = sv[0];
            let smin = sv[sv.len() - 1];
            if smax == 0.0 || smin <= 1e-10 * smax {
                return Err(Error::RankDeficient(v));
            }
        }
        let qf = if b.ncols() == 0 {
            linalg::zeros(b.nrows(), 0)
        } else {
            b.clone().qr().q().columns(0, b.ncols()).into_owned()
        };
        projectors.push(qf);
    }
    for e in q.edges() {
        let image = rep.matrix(e.id) * &f.bases[e.tail];
        let qh = &projectors[e.head];
        let residual = &image - qh * (qh.adjoint() * &image);
        if linalg::frobenius(&residual) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityVerdict {
    Stable,
    SemistableNotStable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinStability {
    pub verdict: StabilityVerdict,
    /// A destabilizing subset for `unstable`, an equal-slope one for
    /// `semistable_not_stable`, none for `stable`.
    pub witness: Option<Vec<usize>>,
}

/// Exact stability of a thin representation by enumerating the vertex subsets
/// of the support that are closed under its nonzero arrows.
pub fn thin_stability(rep: &Representation, s: &StabilityData) -> Result<ThinStability> {
    if !rep.is_thin() {
        return Err(Error::NotThin);
    }
    let q = rep.quiver();
    if s.len() != q.vertex_count() {
        return Err(Error::DimensionMismatch("stability data length".into()));
    }
    let support: Vec<usize> = (0..q.vertex_count()).filter(|&v| rep.dims()[v] == 1).collect();
    if support.is_empty() {
        return Err(Error::ZeroDimension);
    }
    if support.len() > MAX_THIN_VERTICES {
        return Err(Error::TooManyVertices(support.len(), MAX_THIN_VERTICES));
    }
    let k = support.len();
    let mut local = vec![usize::MAX; q.vertex_count()];
    for (i, &v) in support.iter().enumerate() {
        local[v] = i;
    }
    // required[i]: heads that must be in S whenever support[i] is
    let mut required = vec![0u32; k];
    for e in q.edges() {
        let (t, h) = (local[e.tail], local[e.head]);
        if t == usize::MAX || h == usize::MAX {
            continue;
        }
        if rep.matrix(e.id)[(0, 0)] != num_complex::Complex64::zero() {
            required[t] |= 1 << h;
        }
    }
    let theta = rational_theta(&s.theta)?;
    let local_theta: Vec<&BigRational> = support.iter().map(|&v| &theta[v]).collect();
    let total: BigRational = local_theta.iter().copied().sum();
    let mu_e = total / BigInt::from(k);

    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let mut worst: Option<(BigRational, u32)> = None;
    let mut tie: Option<u32> = None;
    for mask in 1..full {
        let closed = (0..k).all(|i| mask & (1 << i) == 0 || required[i] & !mask == 0);
        if !closed {
            continue;
        }
        let mut sum = BigRational::zero();
        for i in 0..k {
            if mask & (1 << i) != 0 {
                sum += local_theta[i];
            }
        }
        let mu = sum / BigInt::from(mask.count_ones());
        if mu > mu_e {
            if worst.as_ref().is_none_or(|(w, _)| mu > *w) {
                worst = Some((mu, mask));
            }
        } else if mu == mu_e && tie.is_none() {
            tie = Some(mask);
        }
    }
    let to_vertices = |mask: u32| -> Vec<usize> {
        (0..k).filter(|i| mask & (1 << i) != 0).map(|i| support[i]).collect()
    };
    Ok(match (worst, tie) {
        (Some((_, mask)), _) => ThinStability {
            verdict: StabilityVerdict::Unstable,
            witness: Some(to_vertices(mask)),
        },
        (None, Some(mask)) => ThinStability {
            verdict: StabilityVerdict::SemistableNotStable,
            witness: Some(to_vertices(mask)),
        },
        (None, None) => ThinStability {
            verdict: StabilityVerdict::Stable,
            witness: None,
        },
    })
}
