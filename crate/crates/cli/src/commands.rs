use std::path::Path as FsPath;

use num_complex::Complex64;
use quiverforge::charvar::{self, Permutation, SymPoly};
use quiverforge::json::{RelationJson, RepresentationJson};
use quiverforge::linalg::CMatrix;
use quiverforge::moment_flow::{self, FlowConfig, FlowStatus, PolystabilityVerdict};
use quiverforge::quiver::{self, Correspondence, DimensionVector, Quiver};
use quiverforge::representation::{self, Representation, StabilityData};
use quiverforge::{segre, tensor_rep};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{CharvarCommand, Command, Failure, Op, OpsArgs, Output, RunConfig};

type Res<T> = std::result::Result<T, Failure>;

/// Tolerance for "is this a vortex solution" checks on user input.
const SOLUTION_TOL: f64 = 1e-6;
const SEGRE_TOL: f64 = 1e-9;

pub fn validate(run: &RunConfig) -> Res<()> {
    if let Some(t) = run.tol {
        if !(t > 0.0 && t.is_finite()) {
            return precondition("--tol must be positive");
        }
    }
    if let Some(s) = run.step {
        if !(s > 0.0 && s.is_finite()) {
            return precondition("--step must be positive");
        }
    }
    if run.kappa != 1.0 && run.kappa != -1.0 {
        return precondition("--kappa must be 1 or -1");
    }
    Ok(())
}

pub fn dispatch(cmd: &Command, run: &RunConfig) -> Res<Output> {
    let value = match cmd {
        Command::Euler { quiver, d, e } => {
            let q = load_quiver(quiver)?;
            let d = DimensionVector(parse_list(d)?);
            let e = match e {
                Some(e) => DimensionVector(parse_list(e)?),
                None => d.clone(),
            };
            json!({"euler_form": q.euler_form(&d, &e)?})
        }
        Command::Paths { quiver, from, to, max_len } => {
            let q = load_quiver(quiver)?;
            let paths = q.enumerate_paths(*from, *to, *max_len)?;
            let edges: Vec<&[usize]> = paths.iter().map(|p| p.edges()).collect();
            json!({"count": paths.len(), "paths": edges})
        }
        Command::TensorQuiver { left, right } => {
            let tq = quiver::tensor_quiver(&load_quiver(left)?, &load_quiver(right)?)?;
            let pairs: Vec<(usize, usize)> = (0..tq.quiver.vertex_count()).map(|v| tq.vertex_pair(v)).collect();
            json!({"quiver": tq.quiver, "vertex_pairs": pairs, "origins": tq.origins()})
        }
        Command::TensorRep { left, right } => {
            let t = tensor_rep::tensor(&load_rep(left)?, &load_rep(right)?)?;
            let relations: Vec<RelationJson> = t.relations().iter().map(RelationJson::from).collect();
            let mut v = serde_json::to_value(&t.rep)?;
            v["relations"] = serde_json::to_value(relations)?;
            v
        }
        Command::Dual { rep } => serde_json::to_value(tensor_rep::dual(&load_rep(rep)?))?,
        Command::Ops(args) => ops(args, run)?,
        Command::CheckRelations { rep, relations } => {
            let rep = load_rep(rep)?;
            let rels: Vec<RelationJson> = read_json(relations)?;
            let rels = rels
                .iter()
                .map(|r| r.resolve(rep.quiver()))
                .collect::<quiverforge::Result<Vec<_>>>()?;
            let tol = run.tol.unwrap_or(representation::DEFAULT_TOL);
            serde_json::to_value(rep.satisfies_relations(&rels, tol)?)?
        }
        Command::CheckStability { thin, rep, theta, sigma } => {
            if !thin {
                return precondition("only thin representations are supported; pass --thin");
            }
            let rep = load_rep(rep)?;
            let s = stability(theta, sigma.as_deref())?;
            let result = representation::thin_stability(&rep, &s)?;
            let mut v = json!({"verdict": result.verdict});
            if let Some(w) = result.witness {
                v["witness"] = json!(w);
            }
            v
        }
        Command::Flow { rep, theta, balance, limit } => {
            let rep = load_rep(rep)?;
            let mut theta = parse_list::<f64>(theta)?;
            if *balance {
                theta = representation::balance_theta(&theta, rep.dims())?;
            }
            let (end, report) = moment_flow::kempf_ness_flow(&rep, &theta, &flow_config(run))?;
            if let Some(path) = limit {
                let text = quiverforge::json::to_string(&end)?;
                std::fs::write(path, format!("{text}\n"))
                    .map_err(|e| Failure::Precondition(format!("{}: {e}", path.display())))?;
            }
            let converged = !matches!(report.status, FlowStatus::MaxIters | FlowStatus::Stalled);
            return Ok(Output {
                value: serde_json::to_value(report)?,
                converged,
            });
        }
        Command::Certify { rep, theta, batch } => return certify(rep.as_deref(), theta.as_deref(), batch.as_deref(), run),
        Command::VerifyTensorPolystability {
            left,
            theta_left,
            right,
            theta_right,
        } => {
            let report = moment_flow::verify_tensor_polystability(
                &load_rep(left)?,
                &parse_list::<f64>(theta_left)?,
                &load_rep(right)?,
                &parse_list::<f64>(theta_right)?,
                run.tol.unwrap_or(SOLUTION_TOL),
                run.kappa,
            )?;
            serde_json::to_value(report)?
        }
        Command::TangentDim { rep, theta } => {
            let rep = load_rep(rep)?;
            let theta = parse_list::<f64>(theta)?;
            let t = moment_flow::moduli_tangent_dim(&rep, &theta, run.kappa, run.tol.unwrap_or(SOLUTION_TOL))?;
            json!({"dimension": t.dimension, "euler_prediction": t.euler_prediction, "kappa": run.kappa})
        }
        Command::SegreCheck { rep } => {
            let check = segre::in_segre_image(&load_rep(rep)?, run.tol.unwrap_or(SEGRE_TOL))?;
            serde_json::to_value(check)?
        }
        Command::Charvar(c) => charvar_cmd(c, run)?,
    };
    Ok(Output { value, converged: true })
}

fn ops(args: &OpsArgs, run: &RunConfig) -> Res<Value> {
    let rep = args.rep.as_deref().map(load_rep).transpose()?;
    let q = match (&args.quiver, &rep) {
        (Some(path), _) => load_quiver(path)?,
        (None, Some(r)) => r.quiver().clone(),
        (None, None) => return precondition("ops needs --quiver or --rep"),
    };
    let (corr, bundle): (Correspondence, Vec<usize>) = match &args.op {
        Op::CollapseVertices { groups } => {
            let groups = groups
                .split(';')
                .filter(|g| !g.trim().is_empty())
                .map(parse_list::<usize>)
                .collect::<Res<Vec<_>>>()?;
            (quiver::collapse_vertices(&q, &groups)?, vec![])
        }
        Op::CollapseEdges { edges } => {
            let edges = parse_list::<usize>(edges)?;
            (quiver::collapse_edges(&q, &edges)?, edges)
        }
        Op::Clone { vertex: Some(v), .. } => (quiver::clone_vertex(&q, *v)?, vec![]),
        Op::Clone { edge: Some(e), .. } => (quiver::clone_edge(&q, *e)?, vec![*e]),
        Op::Delete { vertex: Some(v), .. } => (quiver::delete_vertex(&q, *v)?, vec![]),
        Op::Delete { edge: Some(e), .. } => (quiver::delete_edge(&q, *e)?, vec![*e]),
        _ => return precondition("pass --vertex or --edge"),
    };
    let mut out = json!({"correspondence": corr});
    let mut tau = args.tau;
    if let Some(rep) = &rep {
        if tau.is_none() && !bundle.is_empty() {
            tau = tensor_rep::isotropy_constant(rep, &bundle, run.tol.unwrap_or(representation::DEFAULT_TOL))?;
        }
        out["representation"] = serde_json::to_value(tensor_rep::restrict_along(rep, &corr)?)?;
    }
    if let Some(theta) = &args.theta {
        let s = stability(theta, args.sigma.as_deref())?;
        out["stability"] = serde_json::to_value(tensor_rep::transported_theta(&s, &corr, tau)?)?;
    }
    if let Some(t) = tau {
        out["tau"] = json!(t);
    }
    Ok(out)
}

#[derive(Deserialize)]
struct BatchItem {
    rep: RepresentationJson,
    theta: Vec<f64>,
}

fn certify(rep: Option<&FsPath>, theta: Option<&str>, batch: Option<&FsPath>, run: &RunConfig) -> Res<Output> {
    let cfg = flow_config(run);
    let certificate_value = |c: moment_flow::Certificate| -> Res<Value> {
        let mut v = serde_json::to_value(&c)?;
        v["kappa"] = json!(cfg.kappa);
        Ok(v)
    };
    if let Some(path) = batch {
        let items: Vec<BatchItem> = read_json(path)?;
        let base = path.parent();
        let work = || {
            items
                .into_par_iter()
                .map(|item| -> quiverforge::Result<moment_flow::Certificate> {
                    let rep = item.rep.resolve(base)?;
                    moment_flow::certify_polystable(&rep, &item.theta, &cfg)
                })
                .collect::<Vec<_>>()
        };
        let results = match threads()? {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Precondition(e.to_string()))?
                .install(work),
            None => work(),
        };
        let mut converged = true;
        let mut values = Vec::with_capacity(results.len());
        for (i, r) in results.into_iter().enumerate() {
            let c = r.map_err(|e| Failure::from(e).context(&format!("batch item {i}")))?;
            converged &= c.verdict != PolystabilityVerdict::Inconclusive;
            values.push(certificate_value(c)?);
        }
        return Ok(Output {
            value: json!({"results": values}),
            converged,
        });
    }
    let (Some(rep), Some(theta)) = (rep, theta) else {
        return precondition("certify needs --rep and --theta, or --batch");
    };
    let c = moment_flow::certify_polystable(&load_rep(rep)?, &parse_list::<f64>(theta)?, &cfg)?;
    let converged = c.verdict != PolystabilityVerdict::Inconclusive;
    Ok(Output {
        value: certificate_value(c)?,
        converged,
    })
}

#[derive(Deserialize)]
struct GridInput {
    dims: Vec<usize>,
    #[serde(alias = "pairs")]
    tuples: Vec<Vec<Complex64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatricesInput {
    List(Vec<Vec<Vec<Complex64>>>),
    Object { matrices: Vec<Vec<Vec<Complex64>>> },
}

fn charvar_cmd(c: &CharvarCommand, run: &RunConfig) -> Res<Value> {
    Ok(match c {
        CharvarCommand::Tau { n, m, sigma, sigma_prime } => {
            let s = Permutation::new(parse_list(sigma)?)?;
            let sp = Permutation::new(parse_list(sigma_prime)?)?;
            json!({"tau": charvar::tau(*n, *m, &s, &sp)?})
        }
        CharvarCommand::Phi { poly, n, m, dims } => {
            let p: SymPoly = read_json(poly)?;
            let dims = match (dims, n, m) {
                (Some(d), _, _) => parse_list::<usize>(d)?,
                (None, Some(n), Some(m)) => vec![*n, *m],
                _ => return precondition("phi needs --n and --m, or --dims"),
            };
            json!({"phi": charvar::phi_substitute_r(&p, &dims)?})
        }
        CharvarCommand::Grid { pairs } => {
            let input: GridInput = read_json(pairs)?;
            let tol = run.tol.unwrap_or(charvar::DEFAULT_GRID_TOL);
            serde_json::to_value(charvar::grid_test_r(&input.tuples, &input.dims, tol)?)?
        }
        CharvarCommand::Invariants { matrices, joint } => {
            let raw = match read_json::<MatricesInput>(matrices)? {
                MatricesInput::List(l) | MatricesInput::Object { matrices: l } => l,
            };
            let mats = raw.iter().map(|m| to_matrix(m)).collect::<Res<Vec<_>>>()?;
            let invariants = mats
                .iter()
                .map(charvar::char_poly_invariants)
                .collect::<quiverforge::Result<Vec<_>>>()?;
            let mut v = json!({"invariants": invariants});
            if *joint {
                let tol = run.tol.unwrap_or(1e-8);
                v["joint_spectrum"] = json!(charvar::joint_spectrum(&mats, tol, run.seed)?);
            }
            v
        }
    })
}

fn to_matrix(rows: &[Vec<Complex64>]) -> Res<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return precondition("matrices must be square");
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn flow_config(run: &RunConfig) -> FlowConfig {
    let d = FlowConfig::default();
    FlowConfig {
        step: run.step.unwrap_or(d.step),
        tol: run.tol.unwrap_or(d.tol),
        max_iters: run.max_iters.unwrap_or(d.max_iters),
        seed: run.seed,
        kappa: run.kappa,
        ..d
    }
}

fn threads() -> Res<Option<usize>> {
    match std::env::var("QUIVERFORGE_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => precondition("QUIVERFORGE_THREADS must be a positive integer"),
        },
    }
}

fn stability(theta: &str, sigma: Option<&str>) -> Res<StabilityData> {
    let theta = parse_list::<f64>(theta)?;
    let sigma = match sigma {
        Some(s) => parse_list::<f64>(s)?,
        None => vec![1.0; theta.len()],
    };
    Ok(StabilityData::new(sigma, theta)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &FsPath) -> Res<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Precondition(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn load_quiver(path: &FsPath) -> Res<Quiver> {
    read_json(path)
}

fn load_rep(path: &FsPath) -> Res<Representation> {
    let j: RepresentationJson = read_json(path)?;
    Ok(j.resolve(path.parent())?)
}

/// Numbers separated by whitespace or commas.
fn parse_list<T: std::str::FromStr>(s: &str) -> Res<Vec<T>> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| Failure::Precondition(format!("cannot parse {t:?} in {s:?}")))
        })
        .collect()
}

fn precondition<T>(msg: &str) -> Res<T> {
    Err(Failure::Precondition(msg.to_string()))
}

impl Failure {
    fn context(self, what: &str) -> Failure {
        match self {
            Failure::Malformed(m) => Failure::Malformed(format!("{what}: {m}")),
            Failure::Precondition(m) => Failure::Precondition(format!("{what}: {m}")),
        }
    }
}
