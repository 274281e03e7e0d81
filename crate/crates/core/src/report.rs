//! Closed-form bounds on minimal codes, saturating sets, covering codes and
//! resolving sets at a given q, optionally with the constructed instances
//! that realise them.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::coding::{self, code_from_parity_points, code_from_points, covering_radius, embed_and_check, is_minimal_code, CodingError};
use crate::constructions::{
    construct_pg3_four_lines, construct_pg4_six_lines, construct_pg4_six_planes, construct_pg5_eight_planes,
    construct_pg5_seven_lines, construct_pg5_seven_solids, Certified, ConstructionError,
};
use crate::field::{Field, FieldError};
use crate::resolving::{resolving_from_lines, ResolvingError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    GreaterThan,
    Equals,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::GreaterThan => ">",
            Relation::Equals => "=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Known before the constructions in this crate.
    Literature,
    /// Realised by a construction in this crate.
    Construction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: String,
    pub passed: bool,
}

/// A constructed object behind a bound, with what was verified about it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub artifact: String,
    pub size: u64,
    pub checks: Vec<Check>,
}

impl Instance {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    /// Such as "m(5,q)" or "s_{q^3}(4,2)".
    pub quantity: String,
    pub relation: Relation,
    pub formula: String,
    pub value: f64,
    /// Whether the hypotheses of the bound hold at this q.
    pub applies: bool,
    pub source: Source,
    /// For construction rows, whether the value is below every applicable
    /// literature upper bound on the same quantity.
    pub improves: Option<bool>,
    pub instance: Option<Instance>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub q: u32,
    pub rows: Vec<BoundRow>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Resolving(#[from] ResolvingError),
}

fn row(quantity: &str, relation: Relation, formula: &str, value: f64, applies: bool, source: Source) -> BoundRow {
    BoundRow {
        quantity: quantity.into(),
        relation,
        formula: formula.into(),
        value,
        applies,
        source,
        improves: None,
        instance: None,
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Every closed-form bound at `q`, which must be a prime power.
pub fn bounds_report(q: u32) -> Result<BoundsReport, FieldError> {
    Field::gf(q)?;
    use Relation::*;
    use Source::*;
    let x = q as f64;
    let e = std::f64::consts::E;
    let large = q > 36086 && !q.is_multiple_of(2) && !q.is_multiple_of(3);
    let mut rows = vec![
        row("m(5,q)", AtLeast, "4q+4", 4.0 * x + 4.0, true, Literature),
        row("m(5,q)", AtLeast, "4q+5", 4.0 * x + 5.0, q >= 9, Literature),
        row("m(5,q)", AtMost, "8q-3", 8.0 * x - 3.0, true, Literature),
        row("m(5,q)", AtMost, "7q+7", 7.0 * x + 7.0, q >= 7, Literature),
        row("m(5,q)", AtMost, "6q+6", 6.0 * x + 6.0, large, Literature),
        row("m(5,q)", Equals, "13", 13.0, q == 2, Literature),
        row("m(5,q)", AtMost, "20", 20.0, q == 3, Literature),
        row("m(5,q)", AtMost, "6q+5", 6.0 * x + 5.0, true, Construction),
        row("s_{q^4}(4,3)", GreaterThan, "4q/e+3/2", 4.0 * x / e + 1.5, true, Literature),
        row("s_{q^4}(4,3)", AtMost, "8q-3", 8.0 * x - 3.0, true, Literature),
        row("s_{q^4}(4,3)", AtMost, "7q+7", 7.0 * x + 7.0, q >= 7, Literature),
        row("s_{q^4}(4,3)", AtMost, "6q+6", 6.0 * x + 6.0, large, Literature),
        row("s_{q^4}(4,3)", AtMost, "13", 13.0, q == 2, Literature),
        row("s_{q^4}(4,3)", AtMost, "20", 20.0, q == 3, Literature),
        row("s_{q^4}(4,3)", AtMost, "6q+5", 6.0 * x + 5.0, true, Construction),
        row("l_{q^4}(5,4)", AtMost, "6q+5", 6.0 * x + 5.0, true, Construction),
        row("s_{q^3}(4,2)", GreaterThan, "3q^2/e+1", 3.0 * x * x / e + 1.0, true, Literature),
        row("s_{q^3}(4,2)", AtMost, "6q^2+3q-6", 6.0 * x * x + 3.0 * x - 6.0, true, Literature),
        row("s_{q^3}(4,2)", AtMost, "6q^2+5q+1", 6.0 * x * x + 5.0 * x + 1.0, q <= 5, Construction),
        row("s_{q^3}(4,2)", AtMost, "6q^2+5q-9", 6.0 * x * x + 5.0 * x - 9.0, q >= 7, Construction),
        row("s_{q^4}(5,3)", GreaterThan, "4q^2/e+3/2", 4.0 * x * x / e + 1.5, true, Literature),
        row("s_{q^4}(5,3)", AtMost, "4q^2+4q+4", 4.0 * x * x + 4.0 * x + 4.0, true, Literature),
        row("s_{q^4}(5,3)", AtMost, "8q^2+8q+8", 8.0 * x * x + 8.0 * x + 8.0, true, Construction),
        row("s_{q^3}(5,2)", GreaterThan, "3q^3/e+1", 3.0 * x.powi(3) / e + 1.0, true, Literature),
        row("s_{q^3}(5,2)", AtMost, "3q^3+1", 3.0 * x.powi(3) + 1.0, true, Literature),
        row(
            "s_{q^3}(5,2)",
            AtMost,
            "7q^3+7q^2-14q-14",
            7.0 * x.powi(3) + 7.0 * x * x - 14.0 * x - 14.0,
            q >= 7,
            Construction,
        ),
        row("resolving(3,q)", AtMost, "8q", 8.0 * x, true, Construction),
        row("resolving(4,q)", AtMost, "12q", 12.0 * x, large, Literature),
        row("resolving(4,q)", AtMost, "12q-2", 12.0 * x - 2.0, true, Construction),
        row("resolving(5,q)", AtMost, "14q", 14.0 * x, true, Construction),
    ];
    for n in 3..=5u32 {
        let nf = n as f64;
        rows.push(row(
            &format!("resolving({n},q)"),
            AtLeast,
            "2Nq-2N^(N-1)/(N-1)!, q large",
            2.0 * nf * x - 2.0 * nf.powi(n as i32 - 1) / factorial(n - 1),
            true,
            Literature,
        ));
    }
    for i in 0..rows.len() {
        if rows[i].source != Construction || !rows[i].applies {
            continue;
        }
        let best = rows
            .iter()
            .filter(|r| r.source == Literature && r.applies && r.quantity == rows[i].quantity)
            .filter(|r| matches!(r.relation, AtMost | Equals))
            .map(|r| r.value)
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            rows[i].improves = Some(rows[i].value < best);
        }
    }
    Ok(BoundsReport { q, rows })
}

fn check(name: &str, value: impl ToString, passed: bool) -> Check {
    Check {
        name: name.into(),
        value: value.to_string(),
        passed,
    }
}

fn size_check(c: &Certified, bound: f64) -> (u64, Check) {
    let size = c.arrangement.covered_points().len() as u64;
    (size, check("size within bound", size, size as f64 <= bound))
}

fn instance(artifact: &str, size: u64, checks: Vec<Check>) -> Option<Instance> {
    Some(Instance {
        artifact: artifact.into(),
        size,
        checks,
    })
}

/// Largest q for which constructions are attached.
pub const INSTANCE_MAX_Q: u32 = 7;

/// Largest point count of PG(N, q) for which resolving sets are checked.
const RESOLVING_MAX_POINTS: u64 = 5000;

impl BoundsReport {
    /// Builds and checks the instances behind the construction rows that
    /// can be handled at desk scale: codes and coverages for q <= 7,
    /// eight planes for q <= 5, saturation and covering radius in the
    /// extension fields only for q = 2.
    pub fn attach_instances(&mut self) -> Result<(), ReportError> {
        let q = self.q;
        if q > INSTANCE_MAX_Q {
            return Ok(());
        }
        let six_lines = construct_pg4_six_lines(q)?;
        let six_line_points = six_lines.arrangement.covered_points();
        let n_six = six_line_points.len() as u64;
        for r in self.rows.iter_mut().filter(|r| r.applies) {
            r.instance = match (r.quantity.as_str(), r.formula.as_str()) {
                ("m(5,q)", "6q+5") => {
                    let code = code_from_points(&six_line_points)?;
                    let min = is_minimal_code(&code)?;
                    instance(
                        "pg4_six_lines coverage as generator columns",
                        n_six,
                        vec![
                            check("size within bound", n_six, n_six as f64 <= r.value),
                            check("dimension", code.dimension(), code.dimension() == 5),
                            check("minimal", min.minimal, min.minimal),
                        ],
                    )
                }
                ("m(5,q)", "13") => instance(
                    "pg4_six_lines coverage",
                    n_six,
                    vec![check("at least the known minimum", n_six, n_six >= 13)],
                ),
                ("s_{q^4}(4,3)", "6q+5") if q == 2 => {
                    let (_, sat) = embed_and_check(&six_line_points, 1)?;
                    instance(
                        "pg4_six_lines coverage in PG(4,16)",
                        n_six,
                        vec![
                            check("size within bound", n_six, n_six as f64 <= r.value),
                            check("3-saturating", sat.saturated, sat.saturated),
                        ],
                    )
                }
                ("l_{q^4}(5,4)", "6q+5") if q == 2 => {
                    let ambient = Field::gf(q)?.extension(4)?;
                    let code = code_from_parity_points(&coding::embed_points(&six_line_points, &ambient)?)?;
                    let radius = covering_radius(&code)?;
                    instance(
                        "pg4_six_lines coverage as parity-check columns over GF(16)",
                        n_six,
                        vec![
                            check("size within bound", n_six, n_six as f64 <= r.value),
                            check("redundancy", code.redundancy(), code.redundancy() == 5),
                            check("covering radius", radius, radius == 4),
                        ],
                    )
                }
                ("s_{q^3}(4,2)", _) if r.source == Source::Construction => {
                    let planes = construct_pg4_six_planes(q)?;
                    let (size, within) = size_check(&planes, r.value);
                    let mut checks = vec![within];
                    if q == 2 {
                        let (_, sat) = embed_and_check(&planes.arrangement.covered_points(), 2)?;
                        checks.push(check("2-saturating in PG(4,8)", sat.saturated, sat.saturated));
                    }
                    instance("pg4_six_planes coverage", size, checks)
                }
                ("s_{q^4}(5,3)", "8q^2+8q+8") if q <= 5 => {
                    let planes = construct_pg5_eight_planes(q)?;
                    let (size, within) = size_check(&planes, r.value);
                    instance("pg5_eight_planes coverage", size, vec![within])
                }
                ("s_{q^3}(5,2)", "7q^3+7q^2-14q-14") => {
                    let solids = construct_pg5_seven_solids(q)?;
                    let (size, within) = size_check(&solids, r.value);
                    instance("pg5_seven_solids coverage", size, vec![within])
                }
                (quantity, _) if quantity.starts_with("resolving(") && r.source == Source::Construction => {
                    let n = quantity.as_bytes()[10] - b'0';
                    let points = (q as u64).pow(n as u32 + 1).saturating_sub(1) / (q as u64 - 1);
                    if points > RESOLVING_MAX_POINTS {
                        None
                    } else {
                        let lines = match n {
                            3 => construct_pg3_four_lines(q)?,
                            4 => six_lines.clone(),
                            _ => construct_pg5_seven_lines(q)?,
                        };
                        let set = resolving_from_lines(&lines.arrangement, None)?;
                        let ok = crate::resolving::is_resolving(lines.arrangement.space(), &set.vertices)?.resolving;
                        instance(
                            "punctured line points and the hyperplanes with the same coordinates",
                            set.candidate_size as u64,
                            vec![
                                check("candidate size", set.candidate_size, set.candidate_size as f64 == r.value),
                                check("augmentations", set.augmentations, set.augmentations == 0),
                                check("resolving", ok, ok),
                            ],
                        )
                    }
                }
                _ => None,
            };
        }
        Ok(())
    }

    /// Whether every attached instance passed its checks.
    pub fn instances_passed(&self) -> bool {
        self.rows.iter().filter_map(|r| r.instance.as_ref()).all(Instance::passed)
    }

    /// The construction row for `quantity` that applies at this q.
    pub fn construction_row(&self, quantity: &str) -> Option<&BoundRow> {
        self.rows
            .iter()
            .find(|r| r.quantity == quantity && r.applies && r.source == Source::Construction)
    }

    pub fn to_text(&self) -> String {
        let header = ["quantity", "bound", "formula", "source", "applies", "improves", "instance"];
        let body: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                let value = if r.value.fract() == 0.0 {
                    format!("{} {}", r.relation.symbol(), r.value)
                } else {
                    format!("{} {:.2}", r.relation.symbol(), r.value)
                };
                let inst = match &r.instance {
                    None => "-".to_string(),
                    Some(i) => {
                        let checks: Vec<String> = i.checks.iter().map(|c| format!("{}={}", c.name, c.value)).collect();
                        format!("{} [{}] {}", if i.passed() { "ok" } else { "FAIL" }, i.size, checks.join(", "))
                    }
                };
                [
                    r.quantity.clone(),
                    value,
                    r.formula.clone(),
                    match r.source {
                        Source::Literature => "literature".into(),
                        Source::Construction => "construction".into(),
                    },
                    if r.applies { "yes" } else { "no" }.into(),
                    match r.improves {
                        None => "-".into(),
                        Some(true) => "yes".into(),
                        Some(false) => "no".into(),
                    },
                    inst,
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for r in &body {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = format!("bounds at q = {}\n", self.q);
        let line = |out: &mut String, cells: &[&str]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            writeln!(out, "{}", padded.join("  ").trim_end()).unwrap();
        };
        line(&mut out, &header);
        for r in &body {
            line(&mut out, &r.iter().map(String::as_str).collect::<Vec<_>>());
        }
        out
    }
}
