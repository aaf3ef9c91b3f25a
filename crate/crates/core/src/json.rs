//! JSON formats for quivers, representations and relations, and a writer
//! that prints every float with 17 significant digits.

use std::collections::BTreeMap;
use std::io;
use std::path::Path as FsPath;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::path_algebra::Relation;
use crate::quiver::{DimensionVector, Edge, Path, Quiver};
use crate::representation::Representation;

/// `{"vertices": [...], "edges": [{"id", "tail", "head"}]}`; ids must equal
/// array positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuiverJson {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl From<Quiver> for QuiverJson {
    fn from(q: Quiver) -> Self {
        QuiverJson {
            vertices: q.labels().to_vec(),
            edges: q.edges().to_vec(),
        }
    }
}

impl TryFrom<QuiverJson> for Quiver {
    type Error = Error;
    fn try_from(j: QuiverJson) -> Result<Self> {
        if let Some((pos, e)) = j.edges.iter().enumerate().find(|(i, e)| e.id != *i) {
            return Err(Error::InvalidQuiver(format!("edge at position {pos} has id {}", e.id)));
        }
        let arrows: Vec<(usize, usize)> = j.edges.iter().map(|e| (e.tail, e.head)).collect();
        Quiver::new(j.vertices, &arrows)
    }
}

/// A quiver given inline or as a path to a quiver JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuiverSource {
    Inline(QuiverJson),
    File(String),
}

/// `{"quiver", "dims", "matrices": {"<edge id>": rows of [re, im]}}`.
///
/// Matrices are row-major with shape `d_head x d_tail`; edges left out of
/// `matrices` carry the zero map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub quiver: QuiverSource,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub matrices: BTreeMap<usize, Vec<Vec<Complex64>>>,
}

impl RepresentationJson {
    /// Builds the representation, reading a quiver file relative to `base`.
    pub fn resolve(self, base: Option<&FsPath>) -> Result<Representation> {
        let q = match self.quiver {
            QuiverSource::Inline(j) => Quiver::try_from(j)?,
            QuiverSource::File(ref p) => {
                let path = match base {
                    Some(b) => b.join(p),
                    None => p.into(),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                Quiver::try_from(serde_json::from_str::<QuiverJson>(&text)?)?
            }
        };
        let dims = DimensionVector(self.dims);
        dims.check(&q)?;
        if let Some(&e) = self.matrices.keys().find(|&&e| e >= q.edge_count()) {
            return Err(Error::InvalidEdge(e));
        }
        let mut matrices = Vec::with_capacity(q.edge_count());
        for edge in q.edges() {
            let (rows, cols) = (dims[edge.head], dims[edge.tail]);
            let m = match self.matrices.get(&edge.id) {
                None => CMatrix::zeros(rows, cols),
                Some(data) => {
                    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
                        return Err(Error::DimensionMismatch(format!(
                            "edge {} needs a {rows}x{cols} matrix",
                            edge.id
                        )));
                    }
                    CMatrix::from_fn(rows, cols, |i, j| data[i][j])
                }
            };
            matrices.push(m);
        }
        Representation::new(&q, dims, matrices)
    }
}

impl From<Representation> for RepresentationJson {
    fn from(r: Representation) -> Self {
        let matrices = r
            .matrices()
            .iter()
            .enumerate()
            .map(|(e, m)| (e, (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()))
            .collect();
        RepresentationJson {
            quiver: QuiverSource::Inline(r.quiver().clone().into()),
            dims: r.dims().0.clone(),
            matrices,
        }
    }
}

impl TryFrom<RepresentationJson> for Representation {
    type Error = Error;
    fn try_from(j: RepresentationJson) -> Result<Self> {
        if let QuiverSource::File(p) = &j.quiver {
            return Err(Error::Parse(format!("quiver file {p:?} must be resolved first")));
        }
        j.resolve(None)
    }
}

/// `{"terms": [{"coeff": [re, im], "path": [edge ids, head first]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationJson {
    pub terms: Vec<RelationTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationTerm {
    pub coeff: Complex64,
    pub path: Vec<usize>,
}

impl RelationJson {
    pub fn resolve(&self, q: &Quiver) -> Result<Relation> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.coeff, Path::new(q, t.path.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Relation::new(q, terms)
    }
}

impl From<&Relation> for RelationJson {
    fn from(r: &Relation) -> Self {
        RelationJson {
            terms: r
                .terms()
                .iter()
                .map(|(c, p)| RelationTerm {
                    coeff: *c,
                    path: p.edges().to_vec(),
                })
                .collect(),
        }
    }
}

/// Shortest form of `%.17g`: 17 significant digits, trailing zeros removed.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let x: i32 = exp.parse().expect("integer exponent");
    let strip = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..17).contains(&x) {
        format!("{}e{x}", strip(mantissa))
    } else {
        strip(&format!("{:.*}", (16 - x) as usize, v))
    }
}

struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-significant-digit floats; non-finite floats become `null`.
pub fn to_string(value: &impl Serialize) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}
