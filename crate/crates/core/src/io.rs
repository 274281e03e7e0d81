//! JSON files for arrangements, certificates, codes, resolving sets and
//! search templates.
//!
//! Field elements are written as their integer indices and matrices as
//! lists of rows. A field is written as its characteristic and the moduli
//! of its tower from the bottom up, constant term first. Elapsed times are
//! written as zero so that identical runs give identical files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coding::LinearCode;
use crate::field::{Field, FieldError};
use crate::higgledy::{
    Arrangement, ArrangementError, Certificate, Method, MethodChoice, Provenance, TransversalPath, Verdict, Witness,
};
use crate::resolving::Vertex;
use crate::search::{Constraint, SearchTemplate};
use crate::space::{ProjSpace, SpaceError, Subspace};

pub const SCHEMA: &str = "hpforge/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read or write {path}: {message}")]
    File { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {0:?}")]
    Schema(String),
    #[error("invalid content: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldJson {
    pub p: u32,
    /// Moduli from the bottom of the tower up, constant term first.
    pub tower: Vec<Vec<u32>>,
}

impl FieldJson {
    pub fn of(f: &Field) -> FieldJson {
        FieldJson {
            p: f.characteristic(),
            tower: f.moduli(),
        }
    }

    pub fn build(&self) -> Result<Field, IoError> {
        let mut field: Option<Field> = None;
        for m in &self.tower {
            field = Some(Field::with_modulus(self.p, field.as_ref(), m.clone())?);
        }
        field.ok_or_else(|| IoError::Invalid("empty field tower".into()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProvenanceJson {
    pub construction: String,
    pub q: u32,
    pub seed: Option<u64>,
    pub choices: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessJson {
    /// "deficient" or "transversal".
    pub kind: String,
    pub index: u64,
    pub rows: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateJson {
    pub verdict: String,
    pub method: String,
    pub witness: Option<WitnessJson>,
    pub covered_points: u64,
    pub intersection_dims: Vec<Vec<i64>>,
    pub scanned: u64,
    pub elapsed_ms: u64,
    pub transversal_path: Option<String>,
    pub advisory_transversal: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrangementJson {
    pub schema: String,
    pub field: FieldJson,
    pub n: usize,
    pub k: i64,
    pub elements: Vec<Vec<Vec<u32>>>,
    pub provenance: Option<ProvenanceJson>,
    pub certificate: Option<CertificateJson>,
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::HigPig => "higgledy_piggledy",
        Verdict::NotHigPig => "not_higgledy_piggledy",
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::StrongBlockingScan => "strong_blocking_scan",
        Method::TransversalScan => "transversal_scan",
    }
}

fn path_name(p: TransversalPath) -> &'static str {
    match p {
        TransversalPath::Full => "full",
        TransversalPath::Pruned => "pruned",
    }
}

pub fn method_choice_name(m: MethodChoice) -> &'static str {
    match m {
        MethodChoice::Auto => "auto",
        MethodChoice::Strong => "strong",
        MethodChoice::Transversal => "transversal",
    }
}

pub fn parse_method_choice(s: &str) -> Result<MethodChoice, IoError> {
    match s {
        "auto" => Ok(MethodChoice::Auto),
        "strong" => Ok(MethodChoice::Strong),
        "transversal" => Ok(MethodChoice::Transversal),
        _ => Err(IoError::Invalid(format!("unknown method {s:?}"))),
    }
}

impl CertificateJson {
    /// `elapsed_ms` is kept only when `keep_time` is set.
    pub fn of(c: &Certificate, keep_time: bool) -> CertificateJson {
        CertificateJson {
            verdict: verdict_name(c.verdict).into(),
            method: method_name(c.method).into(),
            witness: c.witness.as_ref().map(|w| WitnessJson {
                kind: match w {
                    Witness::Deficient { .. } => "deficient",
                    Witness::Transversal { .. } => "transversal",
                }
                .into(),
                index: w.index(),
                rows: w.subspace().basis_rows(),
            }),
            covered_points: c.covered_points,
            intersection_dims: c.intersection_dims.clone(),
            scanned: c.scanned,
            elapsed_ms: if keep_time { c.elapsed_ms } else { 0 },
            transversal_path: c.transversal_path.map(|p| path_name(p).into()),
            advisory_transversal: c.advisory_transversal,
        }
    }

    pub fn build(&self, space: &ProjSpace) -> Result<Certificate, IoError> {
        let verdict = match self.verdict.as_str() {
            "higgledy_piggledy" => Verdict::HigPig,
            "not_higgledy_piggledy" => Verdict::NotHigPig,
            v => return Err(IoError::Invalid(format!("unknown verdict {v:?}"))),
        };
        let method = match self.method.as_str() {
            "strong_blocking_scan" => Method::StrongBlockingScan,
            "transversal_scan" => Method::TransversalScan,
            m => return Err(IoError::Invalid(format!("unknown method {m:?}"))),
        };
        let witness = match &self.witness {
            None => None,
            Some(w) => {
                let subspace = space.span_of_rows(&w.rows)?;
                let index = w.index;
                Some(match w.kind.as_str() {
                    "deficient" => Witness::Deficient { index, subspace },
                    "transversal" => Witness::Transversal { index, subspace },
                    k => return Err(IoError::Invalid(format!("unknown witness kind {k:?}"))),
                })
            }
        };
        let transversal_path = match self.transversal_path.as_deref() {
            None => None,
            Some("full") => Some(TransversalPath::Full),
            Some("pruned") => Some(TransversalPath::Pruned),
            Some(p) => return Err(IoError::Invalid(format!("unknown path {p:?}"))),
        };
        Ok(Certificate {
            verdict,
            method,
            witness,
            covered_points: self.covered_points,
            intersection_dims: self.intersection_dims.clone(),
            scanned: self.scanned,
            elapsed_ms: self.elapsed_ms,
            transversal_path,
            advisory_transversal: self.advisory_transversal,
        })
    }
}

fn check_schema(s: &str) -> Result<(), IoError> {
    if s == SCHEMA {
        Ok(())
    } else {
        Err(IoError::Schema(s.to_string()))
    }
}

fn subspaces(space: &ProjSpace, elements: &[Vec<Vec<u32>>]) -> Result<Vec<Subspace>, IoError> {
    elements.iter().map(|rows| Ok(space.span_of_rows(rows)?)).collect()
}

impl ArrangementJson {
    pub fn of(arr: &Arrangement, cert: Option<&Certificate>) -> ArrangementJson {
        ArrangementJson {
            schema: SCHEMA.into(),
            field: FieldJson::of(arr.space().field()),
            n: arr.n(),
            k: arr.k(),
            elements: arr.elements().iter().map(Subspace::basis_rows).collect(),
            provenance: arr.provenance.as_ref().map(|p| ProvenanceJson {
                construction: p.construction.clone(),
                q: p.q,
                seed: p.seed,
                choices: p.choices.clone(),
            }),
            certificate: cert.map(|c| CertificateJson::of(c, false)),
        }
    }

    pub fn build(&self) -> Result<(Arrangement, Option<Certificate>), IoError> {
        check_schema(&self.schema)?;
        let space = ProjSpace::new(self.n, self.field.build()?)?;
        let elements = subspaces(&space, &self.elements)?;
        if elements.iter().any(|e| e.dim() != self.k) {
            return Err(IoError::Invalid("element rows do not span a k-subspace".into()));
        }
        let mut arr = Arrangement::new(&space, self.k, elements)?;
        arr.provenance = self.provenance.as_ref().map(|p| Provenance {
            construction: p.construction.clone(),
            q: p.q,
            seed: p.seed,
            choices: p.choices.clone(),
        });
        let cert = self.certificate.as_ref().map(|c| c.build(&space)).transpose()?;
        Ok((arr, cert))
    }
}

pub fn arrangement_to_string(arr: &Arrangement, cert: Option<&Certificate>) -> String {
    serde_json::to_string_pretty(&ArrangementJson::of(arr, cert)).expect("serialisable") + "\n"
}

pub fn arrangement_from_str(s: &str) -> Result<(Arrangement, Option<Certificate>), IoError> {
    serde_json::from_str::<ArrangementJson>(s)?.build()
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|e| IoError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_arrangement(path: &Path) -> Result<(Arrangement, Option<Certificate>), IoError> {
    arrangement_from_str(&read_file(path)?)
}

pub fn write_arrangement(path: &Path, arr: &Arrangement, cert: Option<&Certificate>) -> Result<(), IoError> {
    write_file(path, &arrangement_to_string(arr, cert))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CodeJson {
    pub schema: String,
    pub field: FieldJson,
    pub q: u32,
    pub generator: Vec<Vec<u32>>,
    pub parity: Vec<Vec<u32>>,
}

impl CodeJson {
    pub fn of(code: &LinearCode) -> CodeJson {
        CodeJson {
            schema: SCHEMA.into(),
            field: FieldJson::of(code.field()),
            q: code.field().order(),
            generator: code.generator().to_vec(),
            parity: code.parity().to_vec(),
        }
    }

    /// Rebuilds the code from whichever matrix is present, preferring the
    /// generator.
    pub fn build(&self) -> Result<LinearCode, IoError> {
        check_schema(&self.schema)?;
        let f = self.field.build()?;
        let code = if !self.generator.is_empty() {
            LinearCode::from_generator(&f, self.generator.clone())
        } else {
            LinearCode::from_parity(&f, self.parity.clone())
        };
        code.map_err(|e| IoError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexJson {
    /// "point" or "hyperplane".
    pub kind: String,
    pub coords: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ResolvingJson {
    pub schema: String,
    pub field: FieldJson,
    pub n: usize,
    pub vertices: Vec<VertexJson>,
    pub candidate_size: usize,
    pub augmentations: usize,
    pub resolving: bool,
}

impl VertexJson {
    pub fn of(v: &Vertex) -> VertexJson {
        let (kind, p) = match v {
            Vertex::Point(p) => ("point", p),
            Vertex::Hyperplane(h) => ("hyperplane", h),
        };
        VertexJson {
            kind: kind.into(),
            coords: p.row(0).to_vec(),
        }
    }

    pub fn build(&self, space: &ProjSpace) -> Result<Vertex, IoError> {
        let p = space.point(&self.coords)?;
        match self.kind.as_str() {
            "point" => Ok(Vertex::Point(p)),
            "hyperplane" => Ok(Vertex::Hyperplane(p)),
            k => Err(IoError::Invalid(format!("unknown vertex kind {k:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintJson {
    PairShares { d: i64 },
    AllFromSpread { n_small: usize },
    PairwiseDisjoint,
    FixedElements { elements: Vec<Vec<Vec<u32>>> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TemplateJson {
    pub schema: String,
    pub field: FieldJson,
    pub n: usize,
    pub k: i64,
    pub cardinality: usize,
    pub constraints: Vec<ConstraintJson>,
    #[serde(default = "default_method")]
    pub method: String,
    pub budget: u64,
    pub seed: u64,
}

fn default_method() -> String {
    "auto".into()
}

impl TemplateJson {
    pub fn of(t: &SearchTemplate) -> TemplateJson {
        TemplateJson {
            schema: SCHEMA.into(),
            field: FieldJson::of(t.space.field()),
            n: t.space.dim(),
            k: t.k,
            cardinality: t.cardinality,
            constraints: t
                .constraints
                .iter()
                .map(|c| match c {
                    Constraint::PairShares(d) => ConstraintJson::PairShares { d: *d },
                    Constraint::AllFromSpread { n_small } => ConstraintJson::AllFromSpread { n_small: *n_small },
                    Constraint::PairwiseDisjoint => ConstraintJson::PairwiseDisjoint,
                    Constraint::FixedElements(v) => ConstraintJson::FixedElements {
                        elements: v.iter().map(Subspace::basis_rows).collect(),
                    },
                })
                .collect(),
            method: method_choice_name(t.method).into(),
            budget: t.budget,
            seed: t.seed,
        }
    }

    pub fn build(&self) -> Result<SearchTemplate, IoError> {
        check_schema(&self.schema)?;
        let space = ProjSpace::new(self.n, self.field.build()?)?;
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                Ok(match c {
                    ConstraintJson::PairShares { d } => Constraint::PairShares(*d),
                    ConstraintJson::AllFromSpread { n_small } => Constraint::AllFromSpread { n_small: *n_small },
                    ConstraintJson::PairwiseDisjoint => Constraint::PairwiseDisjoint,
                    ConstraintJson::FixedElements { elements } => Constraint::FixedElements(subspaces(&space, elements)?),
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(SearchTemplate {
            space,
            k: self.k,
            cardinality: self.cardinality,
            constraints,
            method: parse_method_choice(&self.method)?,
            budget: self.budget,
            seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{construct_pg3_four_lines, tetrahedron};
    use crate::higgledy::{is_higgledy_piggledy, MethodChoice};

    #[test]
    fn arrangement_round_trip() {
        let c = construct_pg3_four_lines(3).unwrap();
        let s = arrangement_to_string(&c.arrangement, Some(&c.certificate));
        let (arr, cert) = arrangement_from_str(&s).unwrap();
        assert_eq!(arr, c.arrangement);
        assert_eq!(arr.provenance, c.arrangement.provenance);
        let cert = cert.unwrap();
        assert_eq!(cert.verdict, c.certificate.verdict);
        assert_eq!(cert.elapsed_ms, 0);
        assert_eq!(is_higgledy_piggledy(&arr, MethodChoice::Auto).verdict, cert.verdict);
        assert_eq!(arrangement_to_string(&arr, Some(&cert)), s);
    }

    #[test]
    fn tower_fields_round_trip() {
        let f = Field::gf(2).unwrap().extension(2).unwrap().extension(2).unwrap();
        assert_eq!(FieldJson::of(&f).build().unwrap(), f);
        let g = Field::gf(9).unwrap();
        assert_eq!(FieldJson::of(&g).build().unwrap(), g);
    }

    #[test]
    fn failing_certificate_keeps_its_witness() {
        let s = ProjSpace::new(3, Field::gf(2).unwrap()).unwrap();
        let p = s.unit_point(0);
        let lines: Vec<Subspace> = p.subspaces_through(1).unwrap().take(3).collect();
        let arr = Arrangement::new(&s, 1, lines).unwrap();
        let cert = is_higgledy_piggledy(&arr, MethodChoice::Auto);
        let (back, c2) = arrangement_from_str(&arrangement_to_string(&arr, Some(&cert))).unwrap();
        let c2 = c2.unwrap();
        assert_eq!(c2.witness, cert.witness);
        assert!(c2.recheck(&back));
    }

    #[test]
    fn schema_is_checked() {
        let c = tetrahedron(&ProjSpace::new(2, Field::gf(2).unwrap()).unwrap()).unwrap();
        let s = arrangement_to_string(&c.arrangement, None).replace(SCHEMA, "other/9");
        assert!(matches!(arrangement_from_str(&s), Err(IoError::Schema(_))));
    }
}
