use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use hpforge::coding::{
    self, code_from_parity_points, code_from_points, is_minimal_code, is_saturating, saturation_degree,
    syndrome_layers, LinearCode,
};
use hpforge::constructions::{construct_named, subline_triples_search, ConstructionError};
use hpforge::higgledy::{is_higgledy_piggledy, Arrangement, MethodChoice, Provenance};
use hpforge::io::{self, CertificateJson, CodeJson, ResolvingJson, TemplateJson, VertexJson, SCHEMA};
use hpforge::report::bounds_report;
use hpforge::resolving::{is_resolving, resolving_from_lines};
use hpforge::search::{self, SearchOutcome};
use hpforge::{Field, Subspace};
use serde_json::{json, Value};

use crate::{CodeInput, CodesCommand, Command, MethodArg};

const OK: u8 = 0;
const PROPERTY_FAILED: u8 = 1;

fn code(ok: bool) -> ExitCode {
    ExitCode::from(if ok { OK } else { PROPERTY_FAILED })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

/// Writes to `out`, or to standard output when absent.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => io::write_file(p, text).map_err(Into::into),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Verify { input, method } => verify(&input, method),
        Command::Construct {
            name,
            q,
            seed,
            n,
            m,
            out,
        } => construct(&name, q, seed, n, m, out.as_deref()),
        Command::Search { template, seed, out } => run_search(&template, seed, out.as_deref()),
        Command::Codes { command } => codes(command),
        Command::Resolve { input, check, out } => resolve(&input, check, out.as_deref()),
        Command::Report { q_list, out_dir, seed } => report(&q_list, &out_dir, seed),
    }
}

fn verify(input: &Path, method: MethodArg) -> Result<ExitCode> {
    let (arr, embedded) = io::read_arrangement(input)?;
    let choice = match method {
        MethodArg::Auto => MethodChoice::Auto,
        MethodArg::Strong => MethodChoice::Strong,
        MethodArg::Transversal => MethodChoice::Transversal,
    };
    let cert = is_higgledy_piggledy(&arr, choice);
    print!("{}", pretty(&serde_json::to_value(CertificateJson::of(&cert, false))?));
    if let Some(e) = embedded {
        if e.verdict != cert.verdict || !e.recheck(&arr) {
            eprintln!("embedded certificate does not re-verify");
            return Ok(code(false));
        }
    }
    Ok(code(cert.is_higpig()))
}

fn arrangement_text(arr: &Arrangement, cert: &hpforge::Certificate) -> String {
    io::arrangement_to_string(arr, Some(cert))
}

fn exhausted(trials: u64) -> Result<ExitCode> {
    print!("{}", pretty(&json!({ "outcome": "exhausted", "trials": trials })));
    Ok(code(false))
}

fn sublines_json(q: u32, m: u32, found: &Option<[hpforge::constructions::Subline; 3]>) -> Value {
    let sublines: Vec<Vec<Vec<u32>>> = found
        .iter()
        .flatten()
        .map(|s| s.points().iter().map(|p| p.row(0).to_vec()).collect())
        .collect();
    json!({ "schema": SCHEMA, "q": q, "m": m, "found": found.is_some(), "sublines": sublines })
}

fn construct(name: &str, q: u32, seed: Option<u64>, n: usize, m: u32, out: Option<&Path>) -> Result<ExitCode> {
    if name == "subline_triples" {
        let found = subline_triples_search(q, m)?;
        emit(out, &pretty(&sublines_json(q, m, &found)))?;
        return Ok(code(found.is_some()));
    }
    match construct_named(name, q, seed, n) {
        Ok(c) => {
            emit(out, &arrangement_text(&c.arrangement, &c.certificate))?;
            Ok(code(true))
        }
        Err(ConstructionError::SearchBudgetExhausted { trials }) => exhausted(trials),
        Err(e @ (ConstructionError::NotCertified(_) | ConstructionError::NoAdmissibleChoice(_))) => {
            eprintln!("{e}");
            Ok(code(false))
        }
        Err(e) => Err(e.into()),
    }
}

fn run_search(path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<ExitCode> {
    let parsed: TemplateJson = serde_json::from_str(&io::read_file(path)?).context("template file")?;
    let mut template = parsed.build()?;
    if let Some(s) = seed {
        template.seed = s;
    }
    template.validate()?;
    match search::run(&template)? {
        SearchOutcome::Found {
            arrangement,
            certificate,
            trial,
            ..
        } => {
            let arr = arrangement.with_provenance(Provenance {
                construction: "search".into(),
                q: template.space.q(),
                seed: Some(template.seed),
                choices: vec![trial],
            });
            emit(out, &arrangement_text(&arr, &certificate))?;
            Ok(code(certificate.is_higpig()))
        }
        SearchOutcome::Exhausted { trials } => exhausted(trials),
    }
}

fn is_code_file(v: &Value) -> bool {
    v.get("generator").is_some() || v.get("parity").is_some()
}

/// Covered points of an arrangement file, read over GF(q^extension).
fn covered_points(path: &Path, extension: u32) -> Result<(Arrangement, Vec<Subspace>)> {
    let (arr, _) = io::read_arrangement(path)?;
    let pts = arr.covered_points();
    if extension <= 1 {
        return Ok((arr, pts));
    }
    let ambient = arr.space().field().extension(extension)?;
    let embedded = coding::embed_points(&pts, &ambient)?;
    Ok((arr, embedded))
}

fn load_code(input: &CodeInput, parity: bool) -> Result<LinearCode> {
    let text = io::read_file(&input.input)?;
    let v: Value = serde_json::from_str(&text)?;
    if is_code_file(&v) {
        let c: CodeJson = serde_json::from_value(v)?;
        return Ok(c.build()?);
    }
    let (_, pts) = covered_points(&input.input, input.extension)?;
    Ok(if parity { code_from_parity_points(&pts)? } else { code_from_points(&pts)? })
}

fn codes(command: CodesCommand) -> Result<ExitCode> {
    match command {
        CodesCommand::Export { code: input, parity, out } => {
            let c = load_code(&input, parity)?;
            emit(out.as_deref(), &pretty(&serde_json::to_value(CodeJson::of(&c))?))?;
            Ok(code(true))
        }
        CodesCommand::Minimality { code: input } => {
            let c = load_code(&input, false)?;
            let m = is_minimal_code(&c)?;
            print!(
                "{}",
                pretty(&json!({
                    "length": c.len(),
                    "dimension": c.dimension(),
                    "minimal": m.minimal,
                    "codewords": m.codewords,
                    "witness": m.witness,
                }))
            );
            Ok(code(m.minimal))
        }
        CodesCommand::CoveringRadius { code: input } => {
            let c = load_code(&input, true)?;
            let layers = syndrome_layers(&c)?;
            print!(
                "{}",
                pretty(&json!({
                    "length": c.len(),
                    "redundancy": c.redundancy(),
                    "covering_radius": layers.len() - 1,
                    "layers": layers,
                }))
            );
            Ok(code(true))
        }
        CodesCommand::Saturating { input, rho, embed } => {
            let (arr, pts) = covered_points(&input, 1)?;
            if embed {
                let (embedded, sat) = coding::embed_and_check(&pts, arr.k() as usize)?;
                print!(
                    "{}",
                    pretty(&json!({
                        "ambient_q": embedded[0].space().q(),
                        "rho": arr.n() - arr.k() as usize,
                        "saturated": sat.saturated,
                        "witness": sat.witness.map(|w| w.row(0).to_vec()),
                    }))
                );
                return Ok(code(sat.saturated));
            }
            match rho {
                Some(r) => {
                    let sat = is_saturating(&pts, r)?;
                    print!(
                        "{}",
                        pretty(&json!({
                            "rho": r,
                            "saturated": sat.saturated,
                            "witness": sat.witness.map(|w| w.row(0).to_vec()),
                        }))
                    );
                    Ok(code(sat.saturated))
                }
                None => {
                    print!("{}", pretty(&json!({ "rho": saturation_degree(&pts)? })));
                    Ok(code(true))
                }
            }
        }
        CodesCommand::Bounds { q, instances, json } => {
            let mut r = bounds_report(q)?;
            if instances {
                r.attach_instances()?;
            }
            if json {
                print!("{}", pretty(&serde_json::to_value(&r)?));
            } else {
                print!("{}", r.to_text());
            }
            Ok(code(r.instances_passed()))
        }
    }
}

fn resolving_value(arr: &Arrangement, check: bool) -> Result<(Value, bool)> {
    let set = resolving_from_lines(arr, None)?;
    let resolving = if check {
        is_resolving(arr.space(), &set.vertices)?.resolving
    } else {
        true
    };
    let file = ResolvingJson {
        schema: SCHEMA.into(),
        field: io::FieldJson::of(arr.space().field()),
        n: arr.n(),
        vertices: set.vertices.iter().map(VertexJson::of).collect(),
        candidate_size: set.candidate_size,
        augmentations: set.augmentations,
        resolving,
    };
    Ok((serde_json::to_value(file)?, resolving && set.augmentations == 0))
}

fn resolve(input: &Path, check: bool, out: Option<&Path>) -> Result<ExitCode> {
    let (arr, _) = io::read_arrangement(input)?;
    let (v, ok) = resolving_value(&arr, check)?;
    emit(out, &pretty(&v))?;
    Ok(code(ok))
}

struct Row {
    q: u32,
    item: String,
    passed: bool,
    detail: String,
    file: Option<String>,
}

/// Constructions attempted at `q` by the report.
fn report_names(q: u32) -> Vec<&'static str> {
    let mut v = vec!["tetrahedron", "pg3_four_lines", "pg4_six_lines"];
    if q != 6 {
        v.push("pg4_six_planes");
    }
    if q <= 5 {
        v.push("pg5_eight_planes");
    }
    if q <= 7 {
        v.extend(["pg5_seven_lines", "seven_planes_spread"]);
    }
    if q == 7 {
        v.push("pg5_seven_solids");
    }
    v
}

fn report_construction(q: u32, name: &str, seed: Option<u64>, dir: &Path) -> Result<Row> {
    let (passed, detail, file) = match construct_named(name, q, seed, 3) {
        Ok(c) => {
            let path = dir.join(format!("{name}.json"));
            io::write_arrangement(&path, &c.arrangement, Some(&c.certificate))?;
            // Round trip: the file must read back to the same verdict.
            let (back, cert) = io::read_arrangement(&path)?;
            let again = is_higgledy_piggledy(&back, MethodChoice::Auto);
            let ok = back == c.arrangement && cert.is_some_and(|e| e.verdict == again.verdict) && again.is_higpig();
            let cov = hpforge::coverage(&back).size();
            (
                ok,
                format!("{} elements, {} points", back.len(), cov),
                Some(path.display().to_string()),
            )
        }
        Err(e) => (false, e.to_string(), None),
    };
    Ok(Row {
        q,
        item: name.into(),
        passed,
        detail,
        file,
    })
}

fn report(q_list: &[u32], out_dir: &Path, seed: Option<u64>) -> Result<ExitCode> {
    for &q in q_list {
        Field::gf(q).with_context(|| format!("q = {q}"))?;
    }
    let mut rows = Vec::new();
    for &q in q_list {
        let dir: PathBuf = out_dir.join(format!("q{q}"));
        std::fs::create_dir_all(&dir).with_context(|| dir.display().to_string())?;
        for name in report_names(q) {
            rows.push(report_construction(q, name, seed, &dir)?);
        }
        if (3..=5).contains(&q) {
            let found = subline_triples_search(q, 2)?;
            let path = dir.join("subline_triples.json");
            io::write_file(&path, &pretty(&sublines_json(q, 2, &found)))?;
            rows.push(Row {
                q,
                item: "subline_triples m=2".into(),
                passed: true,
                detail: if found.is_some() { "found" } else { "none" }.into(),
                file: Some(path.display().to_string()),
            });
        }
        if let Some(c) = rows.iter().find(|r| r.q == q && r.item == "pg4_six_lines" && r.passed) {
            let (arr, _) = io::read_arrangement(Path::new(c.file.as_deref().unwrap()))?;
            if arr.space().num_points() <= 5000 {
                let (v, ok) = resolving_value(&arr, true)?;
                let path = dir.join("resolving_pg4.json");
                io::write_file(&path, &pretty(&v))?;
                rows.push(Row {
                    q,
                    item: "resolving set from six lines".into(),
                    passed: ok,
                    detail: format!("{} vertices", v["vertices"].as_array().map_or(0, Vec::len)),
                    file: Some(path.display().to_string()),
                });
            }
        }
        let mut bounds = bounds_report(q)?;
        bounds.attach_instances()?;
        io::write_file(&dir.join("bounds.json"), &pretty(&serde_json::to_value(&bounds)?))?;
        io::write_file(&dir.join("bounds.txt"), &bounds.to_text())?;
        let checked = bounds.rows.iter().filter(|r| r.instance.is_some()).count();
        rows.push(Row {
            q,
            item: "bounds".into(),
            passed: bounds.instances_passed(),
            detail: format!("{} rows, {checked} with checked instances", bounds.rows.len()),
            file: Some(dir.join("bounds.json").display().to_string()),
        });
    }
    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "q": r.q, "item": r.item, "status": if r.passed { "pass" } else { "fail" }, "detail": r.detail, "file": r.file }))
        .collect();
    io::write_file(&out_dir.join("results.json"), &pretty(&json!({ "schema": SCHEMA, "rows": table })))?;
    let width = rows.iter().map(|r| r.item.len()).max().unwrap_or(0);
    let mut text = String::new();
    for r in &rows {
        writeln!(
            text,
            "q={:<3} {:<width$}  {}  {}",
            r.q,
            r.item,
            if r.passed { "pass" } else { "FAIL" },
            r.detail
        )?;
    }
    io::write_file(&out_dir.join("results.txt"), &text)?;
    print!("{text}");
    let all = rows.iter().all(|r| r.passed);
    if !all {
        eprintln!("some report items failed");
    }
    Ok(code(all))
}
