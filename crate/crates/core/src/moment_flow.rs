//! Moment map, vortex residuals, and a Kempf-Ness style descent flow along
//! `GL(d)`-orbits used to certify polystability numerically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::quiver::{DimensionVector, Path};
use crate::representation::{balance_theta, Representation};

/// Sign in the vortex equation `[phi, phi*]_i = kappa theta'_i Id`. With `-1`,
/// nonzero Kronecker points solve it at `theta' = (1, -1)`, in agreement with
/// slope stability.
pub const DEFAULT_KAPPA: f64 = -1.0;

/// Below this squared norm a flow with `theta' != 0` is declared collapsed.
pub const COLLAPSE_NORM_SQ: f64 = 1e-14;

const MAX_BACKTRACKS: usize = 60;
const HISTORY_LEN: usize = 256;
const MAX_CYCLES: usize = 256;
const CYCLE_LEN: usize = 4;

/// `H(a, b) = sum_alpha Tr(phi_alpha psi_alpha^*)`.
pub fn inner_product(a: &Representation, b: &Representation) -> Result<Complex64> {
    if a.quiver() != b.quiver() || a.dims() != b.dims() {
        return Err(Error::DimensionMismatch("inner product of different spaces".into()));
    }
    Ok(a
        .matrices()
        .iter()
        .zip(b.matrices())
        .map(|(x, y)| (x * y.adjoint()).trace())
        .sum())
}

/// `[phi, phi*]_i = sum_{h alpha = i} phi phi* - sum_{t alpha = i} phi* phi`.
pub fn bracket(rep: &Representation) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = rep.dims().0.iter().map(|&d| linalg::zeros(d, d)).collect();
    for e in rep.quiver().edges() {
        let m = rep.matrix(e.id);
        out[e.head] += m * m.adjoint();
        out[e.tail] -= m.adjoint() * m;
    }
    out
}

fn check_balanced(theta_prime: &[f64], d: &DimensionVector) -> Result<()> {
    if theta_prime.len() != d.len() {
        return Err(Error::DimensionMismatch("theta' length".into()));
    }
    if theta_prime.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("theta'".into()));
    }
    let pairing: f64 = theta_prime.iter().zip(&d.0).map(|(t, &di)| t * di as f64).sum();
    let scale: f64 = theta_prime.iter().zip(&d.0).map(|(t, &di)| t.abs() * di as f64).sum();
    if pairing.abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::UnbalancedTheta(pairing));
    }
    Ok(())
}

/// `R_i = [phi, phi*]_i - kappa theta'_i Id`. Requires `theta' . d = 0`.
pub fn vortex_residual(rep: &Representation, theta_prime: &[f64], kappa: f64) -> Result<Vec<CMatrix>> {
    check_balanced(theta_prime, rep.dims())?;
    Ok(residual_unchecked(rep, theta_prime, kappa))
}

fn residual_unchecked(rep: &Representation, theta_prime: &[f64], kappa: f64) -> Vec<CMatrix> {
    let mut r = bracket(rep);
    for (i, m) in r.iter_mut().enumerate() {
        for k in 0..m.nrows() {
            m[(k, k)] -= Complex64::new(kappa * theta_prime[i], 0.0);
        }
    }
    r
}

/// `f = sum_i |R_i|_F^2`.
pub fn energy(residual: &[CMatrix]) -> f64 {
    residual.iter().map(linalg::frobenius_sq).sum()
}

/// `max_i |R_i|_F`.
pub fn max_residual(residual: &[CMatrix]) -> f64 {
    residual.iter().map(linalg::frobenius).fold(0.0, f64::max)
}

/// Gradient of `f` in the real inner product `Re Tr(A B*)`:
/// `4 (R_{h alpha} phi_alpha - phi_alpha R_{t alpha})`.
pub fn energy_gradient(rep: &Representation, residual: &[CMatrix]) -> Vec<CMatrix> {
    rep.quiver()
        .edges()
        .iter()
        .map(|e| {
            let m = rep.matrix(e.id);
            (&residual[e.head] * m - m * &residual[e.tail]) * Complex64::new(4.0, 0.0)
        })
        .collect()
}

/// One flow step of size `eps`: `phi_alpha <- exp(-eps R_h) phi_alpha exp(eps R_t)`.
pub fn flow_step(rep: &Representation, residual: &[CMatrix], eps: f64) -> Result<Representation> {
    let down: Vec<CMatrix> = residual.iter().map(|r| linalg::hermitian_exp(r, -eps)).collect();
    let up: Vec<CMatrix> = residual.iter().map(|r| linalg::hermitian_exp(r, eps)).collect();
    let matrices = rep
        .quiver()
        .edges()
        .iter()
        .map(|e| &down[e.head] * rep.matrix(e.id) * &up[e.tail])
        .collect();
    rep.with_matrices(matrices)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub step: f64,
    pub backtrack: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Seed for randomized choices; the flow itself is deterministic.
    pub seed: u64,
    pub kappa: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            step: 0.05,
            backtrack: 0.5,
            tol: 1e-8,
            max_iters: 50_000,
            seed: 0,
            kappa: DEFAULT_KAPPA,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Precondition("step must be positive".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Precondition("backtrack must lie in (0, 1)".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Precondition("tol must be positive".into()));
        }
        if self.kappa != 1.0 && self.kappa != -1.0 {
            return Err(Error::Precondition("kappa must be +1 or -1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Converged,
    MaxIters,
    CollapsedToZero,
    /// The line search could not decrease the energy at any step size.
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub status: FlowStatus,
    pub iterations: usize,
    /// Final `max_i |R_i|_F`.
    pub residual: f64,
    pub kappa: f64,
    /// Largest relative change of `Tr(phi_p)` over closed paths of length at most 4.
    pub cycle_trace_drift: f64,
    /// Energy after each accepted step, downsampled; starts with the initial energy.
    pub energy_history: Vec<f64>,
}

/// Closed paths of length 1..=4, capped, with their trace scale at the input.
fn cycles(rep: &Representation) -> Vec<(Path, Complex64, f64)> {
    let q = rep.quiver();
    let norms: Vec<f64> = rep.matrices().iter().map(linalg::frobenius).collect();
    let mut out = Vec::new();
    'outer: for v in 0..q.vertex_count() {
        let Ok(paths) = q.enumerate_paths_bounded(v, v, CYCLE_LEN, 4 * MAX_CYCLES) else {
            continue;
        };
        for p in paths.into_iter().filter(|p| !p.is_trivial()) {
            // |Tr(phi_p)| is at most the product of the Frobenius norms
            let scale: f64 = p.edges().iter().map(|&e| norms[e]).product();
            if scale == 0.0 {
                continue;
            }
            let tr = rep.evaluate_path(&p).expect("own path").trace();
            out.push((p, tr, scale));
            if out.len() >= MAX_CYCLES {
                break 'outer;
            }
        }
    }
    out
}

fn trace_drift(rep: &Representation, reference: &[(Path, Complex64, f64)]) -> f64 {
    reference
        .iter()
        .map(|(p, before, scale)| {
            let after = rep.evaluate_path(p).expect("own path").trace();
            (after - before).norm() / before.norm().max(*scale)
        })
        .fold(0.0, f64::max)
}

fn downsample(history: &[f64]) -> Vec<f64> {
    if history.len() <= HISTORY_LEN {
        return history.to_vec();
    }
    let last = history.len() - 1;
    (0..HISTORY_LEN)
        .map(|k| history[k * last / (HISTORY_LEN - 1)])
        .collect()
}

/// Descends `f = sum |R_i|^2` along the `GL(d)`-orbit of `rep`.
pub fn kempf_ness_flow(
    rep: &Representation,
    theta_prime: &[f64],
    cfg: &FlowConfig,
) -> Result<(Representation, FlowReport)> {
    cfg.validate()?;
    check_balanced(theta_prime, rep.dims())?;
    let nonzero_theta = theta_prime.iter().any(|&t| t != 0.0);
    let reference = cycles(rep);

    let mut current = rep.clone();
    let mut residual = residual_unchecked(&current, theta_prime, cfg.kappa);
    let mut f = energy(&residual);
    let mut history = vec![f];
    let mut eps = cfg.step;
    let mut streak = 0;
    let mut iterations = 0;

    let status = loop {
        if nonzero_theta && current.norm_sq() < COLLAPSE_NORM_SQ {
            break FlowStatus::CollapsedToZero;
        }
        if max_residual(&residual) <= cfg.tol {
            break FlowStatus::Converged;
        }
        if iterations >= cfg.max_iters {
            break FlowStatus::MaxIters;
        }
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate = flow_step(&current, &residual, eps)?;
            let r = residual_unchecked(&candidate, theta_prime, cfg.kappa);
            let fc = energy(&r);
            if !fc.is_finite() {
                return Err(Error::NonFinite(format!("energy after {iterations} iterations")));
            }
            if fc <= f {
                accepted = Some((candidate, r, fc));
                break;
            }
            eps *= cfg.backtrack;
            streak = 0;
        }
        let Some((candidate, r, fc)) = accepted else {
            break FlowStatus::Stalled;
        };
        current = candidate;
        residual = r;
        f = fc;
        history.push(f);
        iterations += 1;
        streak += 1;
        if streak >= 5 {
            eps *= 1.2;
            streak = 0;
        }
    };

    let report = FlowReport {
        status,
        iterations,
        residual: max_residual(&residual),
        kappa: cfg.kappa,
        cycle_trace_drift: trace_drift(&current, &reference),
        energy_history: downsample(&history),
    };
    Ok((current, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolystabilityVerdict {
    Polystable,
    NotPolystableEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: PolystabilityVerdict,
    pub theta_prime: Vec<f64>,
    pub report: FlowReport,
}

/// Complex matrix of `d0 : X -> (X_{h alpha} phi_alpha - phi_alpha X_{t alpha})`,
/// the infinitesimal `gl(d)` action, in column-major coordinates.
fn infinitesimal_action(rep: &Representation) -> CMatrix {
    let q = rep.quiver();
    let d = rep.dims();
    let mut x_offset = vec![0; q.vertex_count()];
    let mut cols = 0;
    for v in 0..q.vertex_count() {
        x_offset[v] = cols;
        cols += d[v] * d[v];
    }
    let mut a_offset = vec![0; q.edge_count()];
    let mut rows = 0;
    for e in q.edges() {
        a_offset[e.id] = rows;
        rows += d[e.head] * d[e.tail];
    }
    let mut m = linalg::zeros(rows, cols);
    for e in q.edges() {
        let phi = rep.matrix(e.id);
        let (dh, dt) = (d[e.head], d[e.tail]);
        let out = |r: usize, c: usize| a_offset[e.id] + r + c * dh;
        // (X_h phi)[r, c] = sum_k X_h[r, k] phi[k, c]
        for r in 0..dh {
            for c in 0..dt {
                for k in 0..dh {
                    let col = x_offset[e.head] + r + k * dh;
                    m[(out(r, c), col)] += phi[(k, c)];
                }
                // -(phi X_t)[r, c] = -sum_k phi[r, k] X_t[k, c]
                for k in 0..dt {
                    let col = x_offset[e.tail] + k + c * dt;
                    m[(out(r, c), col)] -= phi[(r, k)];
                }
            }
        }
    }
    m
}

/// Real rank of the complex-linear map `d0`, counting singular values above `threshold`.
fn orbit_rank(rep: &Representation, threshold: f64) -> usize {
    let m = infinitesimal_action(rep);
    linalg::rank_above(&m, threshold)
}

/// Balances `theta` against the dimension vector, runs the flow and judges
/// whether `rep` itself (not just its orbit closure) is polystable.
pub fn certify_polystable(rep: &Representation, theta: &[f64], cfg: &FlowConfig) -> Result<Certificate> {
    let theta_prime = balance_theta(theta, rep.dims())?;
    let (limit, report) = kempf_ness_flow(rep, &theta_prime, cfg)?;
    let verdict = match report.status {
        FlowStatus::CollapsedToZero => PolystabilityVerdict::NotPolystableEvidence,
        FlowStatus::Stalled => {
            if report.residual <= 10.0 * cfg.tol {
                PolystabilityVerdict::Inconclusive
            } else {
                PolystabilityVerdict::NotPolystableEvidence
            }
        }
        FlowStatus::MaxIters => {
            if still_decreasing(&report.energy_history) {
                PolystabilityVerdict::Inconclusive
            } else {
                PolystabilityVerdict::NotPolystableEvidence
            }
        }
        FlowStatus::Converged => closed_orbit_verdict(rep, &limit, &theta_prime, cfg.tol),
    };
    Ok(Certificate {
        verdict,
        theta_prime,
        report,
    })
}

/// Energy dropped by more than a relative `1e-6` over the last tenth of the run.
fn still_decreasing(history: &[f64]) -> bool {
    let n = history.len();
    if n < 2 {
        return false;
    }
    let window = (n / 10).max(1);
    let (start, end) = (history[n - 1 - window], history[n - 1]);
    start - end > 1e-6 * start
}

/// The flow limit lies in the closure of the input's orbit. The input is
/// polystable iff the limit lies in the orbit itself, which we detect by
/// comparing orbit dimensions: a limit on the boundary has a strictly smaller orbit.
fn closed_orbit_verdict(
    input: &Representation,
    limit: &Representation,
    theta_prime: &[f64],
    tol: f64,
) -> PolystabilityVerdict {
    let theta_scale = theta_prime.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let cycle_scale = cycles(input)
        .iter()
        .map(|(p, tr, _)| tr.norm().powf(2.0 / p.len() as f64))
        .fold(0.0f64, f64::max);
    let s_sq = theta_scale.max(cycle_scale);
    if s_sq <= 1e-12 {
        // Every invariant vanishes: the only closed orbit is the origin.
        return if input.norm_sq().sqrt() <= 10.0 * tol.sqrt() {
            PolystabilityVerdict::Polystable
        } else {
            PolystabilityVerdict::NotPolystableEvidence
        };
    }
    let threshold = 10.0 * tol.sqrt() * s_sq.sqrt();
    if orbit_rank(limit, threshold) < orbit_rank(input, threshold) {
        PolystabilityVerdict::NotPolystableEvidence
    } else {
        PolystabilityVerdict::Polystable
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentDimension {
    /// Real dimension of `ker d1 ∩ ker d0*` at the given solution.
    pub dimension: usize,
    /// `2 (1 - <d, d>)`, the expected real dimension at a stable point with
    /// trivial stabilizer up to scalars.
    pub euler_prediction: i64,
}

/// Real dimension of the tangent space to the moduli space at a vortex solution.
///
/// On `ker d0*` the linearized bracket `d1(A)_i = C_i + C_i^*` vanishes, where
/// `C = d0*(A)`, so the space is `ker d0*` and its dimension is
/// `dim_R Rep(Q, d) - rank_R d0`.
pub fn moduli_tangent_dim(
    rep: &Representation,
    theta_prime: &[f64],
    kappa: f64,
    tol: f64,
) -> Result<TangentDimension> {
    let r = vortex_residual(rep, theta_prime, kappa)?;
    let res = max_residual(&r);
    if res > tol {
        return Err(Error::Precondition(format!(
            "not a vortex solution: residual {res:e} exceeds {tol:e}"
        )));
    }
    let m = infinitesimal_action(rep);
    let real_dim = 2 * m.nrows();
    let sv = linalg::singular_values(&m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > 1e-7 * smax).count();
    let euler = rep.quiver().euler_form(rep.dims(), rep.dims())?;
    Ok(TangentDimension {
        dimension: real_dim - 2 * rank,
        euler_prediction: 2 * (1 - euler),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorPolystabilityReport {
    pub residual_left: f64,
    pub residual_right: f64,
    /// `max |R_(i,j)|_F` of the tensor at `theta_(i,j) = theta'_i + theta''_j`.
    pub tensor_residual: f64,
    /// `c tol` with `c = 2 max(|a|, |b|, 1)`.
    pub bound: f64,
    pub within_bound: bool,
    pub kappa: f64,
}

pub fn verify_tensor_polystability(
    a: &Representation,
    theta_a: &[f64],
    b: &Representation,
    theta_b: &[f64],
    tol: f64,
    kappa: f64,
) -> Result<TensorPolystabilityReport> {
    let ra = max_residual(&vortex_residual(a, theta_a, kappa)?);
    let rb = max_residual(&vortex_residual(b, theta_b, kappa)?);
    if ra > tol || rb > tol {
        return Err(Error::Precondition(format!(
            "factors are not vortex solutions: residuals {ra:e} and {rb:e} exceed {tol:e}"
        )));
    }
    let t = crate::tensor_rep::tensor(a, b)?;
    let mut theta = Vec::with_capacity(theta_a.len() * theta_b.len());
    for ta in theta_a {
        for tb in theta_b {
            theta.push(ta + tb);
        }
    }
    let rt = max_residual(&vortex_residual(&t.rep, &theta, kappa)?);
    let c = 2.0 * a.norm_sq().sqrt().max(b.norm_sq().sqrt()).max(1.0);
    let bound = c * tol;
    Ok(TensorPolystabilityReport {
        residual_left: ra,
        residual_right: rb,
        tensor_residual: rt,
        bound,
        within_bound: rt <= bound,
        kappa,
    })
}
