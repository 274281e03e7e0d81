//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hpforge::coding::{code_from_parity_points, code_from_points, embed_and_check, embed_points, is_minimal_code, syndrome_layers};
use hpforge::constructions::{
    construct_pg3_four_lines, construct_pg4_six_lines, construct_pg4_six_planes, construct_pg5_eight_planes,
    construct_pg5_seven_lines, construct_pg5_seven_solids, seven_planes_spread_search_with, subline_triples_search,
    Certified, SEARCH_BUDGET,
};
use hpforge::higgledy::{
    coverage, has_transversal, transversal_search, verify_strong_blocking, Arrangement, TransversalPath, Verdict,
};
use hpforge::report::bounds_report;
use hpforge::resolving::{is_resolving, resolving_from_lines};
use hpforge::{lower_bound, lower_bound_lines, Field, ProjSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn pg(n: usize, q: u32) -> ProjSpace {
    ProjSpace::new(n, Field::gf(q).unwrap()).unwrap()
}

fn pairwise_disjoint(arr: &Arrangement) -> bool {
    let m = coverage(arr).intersection_dims;
    (0..m.len()).all(|i| (i + 1..m.len()).all(|j| m[i][j] == -1))
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let e = t.elapsed();
    if e > limit {
        Err(format!("{what} took {e:?}, limit {limit:?}"))
    } else {
        Ok(e)
    }
}

struct Suite {
    certified: Vec<Certified>,
}

impl Suite {
    fn keep(&mut self, c: &Certified) {
        self.certified.push(c.clone());
    }

    fn four_lines(&mut self) -> Outcome {
        let t = Instant::now();
        for q in [2, 3, 4, 5, 7, 9] {
            let c = construct_pg3_four_lines(q).map_err(|e| e.to_string())?;
            ensure!(c.certificate.verdict == Verdict::HigPig, "q={q} not certified");
            ensure!(pairwise_disjoint(&c.arrangement), "q={q} lines meet");
            let size = coverage(&c.arrangement).size();
            ensure!(size == 4 * (q as u64 + 1), "q={q} coverage {size}");
            self.keep(&c);
        }
        let e = within(t, Duration::from_secs(10), "four lines")?;
        Ok(format!("q in 2,3,4,5,7,9 certified, coverage 4(q+1), {e:.2?}"))
    }

    fn six_lines(&mut self) -> Outcome {
        let mut sizes = Vec::new();
        for q in 2..=5u32 {
            let c = construct_pg4_six_lines(q).map_err(|e| e.to_string())?;
            ensure!(c.certificate.is_higpig(), "q={q} not certified");
            let cov = coverage(&c.arrangement);
            ensure!(cov.intersecting_pairs() == 1, "q={q} has {} meeting pairs", cov.intersecting_pairs());
            ensure!(cov.size() == 6 * q as u64 + 5, "q={q} coverage {}", cov.size());
            sizes.push(cov.size());
            if q == 5 {
                let t = Instant::now();
                let cert = verify_strong_blocking(&c.arrangement);
                let planes = transversal_search(&c.arrangement, 2, TransversalPath::Full).unwrap();
                let e = within(t, Duration::from_secs(60), "q=5 scans")?;
                ensure!(cert.is_higpig(), "q=5 strong scan rejects");
                ensure!(planes.witness.is_none() && planes.scanned == 20306, "q=5 plane scan {:?}", planes.scanned);
                sizes.push(planes.scanned);
                sizes.push(e.as_millis() as u64);
            }
            self.keep(&c);
        }
        Ok(format!(
            "one meeting pair, coverages {:?}, q=5 strong scan and {} plane scan in {} ms",
            &sizes[..4],
            sizes[4],
            sizes[5]
        ))
    }

    fn six_planes(&mut self) -> Outcome {
        let mut seeds = Vec::new();
        for q in [2, 3, 4, 5, 7] {
            let c = construct_pg4_six_planes(q).map_err(|e| e.to_string())?;
            ensure!(c.certificate.is_higpig(), "q={q} not certified");
            let m = coverage(&c.arrangement).intersection_dims;
            let lines = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).filter(|&(i, j)| m[i][j] >= 1).count();
            ensure!(lines >= 1, "q={q} has no pair sharing a line");
            let p = c.arrangement.provenance.clone().unwrap();
            if q <= 5 {
                ensure!(p.seed.is_some(), "q={q} search seed not recorded");
                ensure!(p.choices[0] < SEARCH_BUDGET, "q={q} over budget");
                seeds.push(format!("q={q} seed {:#x} trial {} ({lines} line-sharing pairs)", p.seed.unwrap(), p.choices[0]));
            }
            self.keep(&c);
        }
        Ok(format!("{}; q=7 by duality", seeds.join(", ")))
    }

    fn eight_planes(&mut self) -> Outcome {
        let mut notes = Vec::new();
        for (q, solids, limit) in [(2u32, 651u64, 5u64), (3, 11011, 60)] {
            let c = construct_pg5_eight_planes(q).map_err(|e| e.to_string())?;
            ensure!(c.certificate.is_higpig(), "q={q} not certified");
            ensure!(pairwise_disjoint(&c.arrangement), "q={q} planes meet");
            let size = coverage(&c.arrangement).size();
            let qq = q as u64;
            ensure!(size == 8 * (qq * qq + qq + 1), "q={q} coverage {size}");
            let t = Instant::now();
            let cert = verify_strong_blocking(&c.arrangement);
            let e = within(t, Duration::from_secs(limit), "solid scan")?;
            ensure!(cert.is_higpig(), "q={q} rejected by the solid scan");
            ensure!(cert.scanned == solids, "q={q} scanned {} solids", cert.scanned);
            notes.push(format!("q={q} coverage {size}, {solids} solids in {e:.2?}"));
            self.keep(&c);
        }
        Ok(notes.join(", "))
    }

    fn seven_lines_and_solids(&mut self) -> Outcome {
        let lines = construct_pg5_seven_lines(2).map_err(|e| e.to_string())?;
        ensure!(lines.certificate.is_higpig(), "q=2 lines not certified");
        ensure!(lines.arrangement.len() == 7 && pairwise_disjoint(&lines.arrangement), "q=2 lines meet");
        self.keep(&lines);

        let solids = construct_pg5_seven_solids(7).map_err(|e| e.to_string())?;
        ensure!(solids.certificate.is_higpig(), "q=7 solids not certified");
        let e = solids.arrangement.elements();
        let mut meets = Vec::new();
        for i in 0..7 {
            for j in i + 1..7 {
                let m = e[i].meet(&e[j]).unwrap();
                ensure!(m.dim() == 1, "solids {i},{j} meet in dimension {}", m.dim());
                meets.push(m);
            }
        }
        for a in 0..meets.len() {
            for b in a + 1..meets.len() {
                ensure!(meets[a].meet(&meets[b]).unwrap().is_empty(), "intersection lines {a},{b} meet");
            }
        }
        let t = Instant::now();
        let full = transversal_search(&solids.arrangement, 1, TransversalPath::Full).unwrap();
        let el = within(t, Duration::from_secs(600), "q=7 line scan")?;
        ensure!(full.witness.is_none(), "q=7 transversal line found");
        ensure!(full.scanned == 6_865_251, "q=7 scanned {} lines", full.scanned);
        self.keep(&solids);
        Ok(format!(
            "q=2 seven disjoint lines; q=7 solids meet pairwise in 21 disjoint lines, {} lines scanned in {el:.2?}",
            full.scanned
        ))
    }

    fn seven_planes(&mut self) -> Outcome {
        let mut trials = Vec::new();
        for q in 2..=5 {
            let c = seven_planes_spread_search_with(q, SEARCH_BUDGET, 0x7370_7265_6164)
                .map_err(|e| e.to_string())?
                .ok_or(format!("q={q} exhausted {SEARCH_BUDGET} trials"))?;
            ensure!(c.certificate.is_higpig(), "q={q} not certified");
            ensure!(pairwise_disjoint(&c.arrangement), "q={q} planes meet");
            trials.push(format!("q={q} trial {}", c.arrangement.provenance.as_ref().unwrap().choices[0]));
            self.keep(&c);
        }
        Ok(trials.join(", "))
    }

    fn subline_triples(&mut self) -> Outcome {
        let mut notes = Vec::new();
        for (q, m, expect) in [(3, 2, true), (4, 2, true), (3, 3, false)] {
            let t = Instant::now();
            let r = subline_triples_search(q, m).map_err(|e| e.to_string())?;
            let e = within(t, Duration::from_secs(300), "subline search")?;
            ensure!(r.is_some() == expect, "(q,m)=({q},{m}) found={}", r.is_some());
            if let Some([a, b, c]) = &r {
                ensure!(a.meet_size(b) == 2 && a.meet_size(c) == 2 && b.meet_size(c) == 2, "({q},{m}) bad triple");
            }
            notes.push(format!("({q},{m}) {} in {e:.2?}", if expect { "found" } else { "none" }));
        }
        Ok(notes.join(", "))
    }

    fn lower_bounds(&mut self) -> Outcome {
        for q in [7u32, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 49, 64, 81, 125, 128] {
            ensure!(lower_bound(5, 2, q).unwrap() == 7, "lower_bound(5,2,{q})");
        }
        for q in [4u32, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64, 81] {
            ensure!(lower_bound_lines(4, q).unwrap() == 6, "lower_bound_lines(4,{q})");
        }
        for c in &self.certified {
            let a = &c.arrangement;
            let (n, k, q) = (a.n() as u32, a.k() as u32, a.q());
            let lb = lower_bound(n, k, q).unwrap();
            ensure!(a.len() as u32 >= lb, "{} elements below {lb} in PG({n},{q})", a.len());
            if k == 1 {
                let ll = lower_bound_lines(n, q).unwrap();
                ensure!(a.len() as u32 >= ll, "{} lines below {ll} in PG({n},{q})", a.len());
            }
        }
        Ok(format!("both bounds exact; {} certified arrangements respect them", self.certified.len()))
    }

    fn minimal_codes(&mut self) -> Outcome {
        let mut q5 = Duration::ZERO;
        for q in 2..=5 {
            for c in [construct_pg3_four_lines(q), construct_pg4_six_lines(q)] {
                let c = c.map_err(|e| e.to_string())?;
                let pts = c.arrangement.covered_points();
                let code = code_from_points(&pts).map_err(|e| e.to_string())?;
                let t = Instant::now();
                let m = is_minimal_code(&code).map_err(|e| e.to_string())?;
                if q == 5 && c.arrangement.n() == 4 {
                    q5 = within(t, Duration::from_secs(5), "q=5 minimality")?;
                    ensure!(m.codewords == 781, "q=5 examined {} classes", m.codewords);
                }
                ensure!(m.minimal, "[{}, {}]_{q} code not minimal", code.len(), code.dimension());
                if q == 2 && c.arrangement.n() == 4 {
                    ensure!(code.len() == 17 && code.dimension() == 5, "q=2 code is not [17,5]");
                }
            }
        }
        let r = bounds_report(2).map_err(|e| e.to_string())?;
        let known = r.rows.iter().find(|x| x.quantity == "m(5,q)" && x.formula == "13" && x.applies);
        ensure!(known.is_some_and(|x| x.value == 13.0), "m(5,2)=13 row missing");
        let ours = r.construction_row("m(5,q)").ok_or("construction row missing")?;
        ensure!(ours.value == 17.0, "6q+5 at q=2 is {}", ours.value);
        Ok(format!("four-line and six-line codes minimal for q=2..5, [17,5]_2 minimal, q=5 in {q5:.2?}"))
    }

    fn saturating(&mut self) -> Outcome {
        let t = Instant::now();
        let c = construct_pg4_six_lines(2).map_err(|e| e.to_string())?;
        let pts = c.arrangement.covered_points();
        let (embedded, sat) = embed_and_check(&pts, 1).map_err(|e| e.to_string())?;
        ensure!(embedded[0].space().num_points() == 69905, "ambient has {} points", embedded[0].space().num_points());
        ensure!(sat.saturated, "not 3-saturating, witness {:?}", sat.witness);
        let ambient = Field::gf(2).unwrap().extension(4).unwrap();
        let code = code_from_parity_points(&embed_points(&pts, &ambient).unwrap()).map_err(|e| e.to_string())?;
        ensure!(code.len() == 17 && code.dimension() == 12, "code is [{}, {}]", code.len(), code.dimension());
        let layers = syndrome_layers(&code).map_err(|e| e.to_string())?;
        ensure!(layers.iter().sum::<u64>() == 1 << 20, "visited {} syndromes", layers.iter().sum::<u64>());
        ensure!(layers.len() - 1 == 4, "covering radius {}", layers.len() - 1);
        let e = within(t, Duration::from_secs(120), "saturation and radius")?;
        Ok(format!("3-saturating in PG(4,16), [17,12]_16 radius 4, layers {layers:?}, {e:.2?}"))
    }

    fn resolving(&mut self) -> Outcome {
        let cases: Vec<(String, Certified, usize)> = vec![
            ("PG(3,2)".into(), construct_pg3_four_lines(2).map_err(|e| e.to_string())?, 16),
            ("PG(3,3)".into(), construct_pg3_four_lines(3).map_err(|e| e.to_string())?, 24),
            ("PG(4,2)".into(), construct_pg4_six_lines(2).map_err(|e| e.to_string())?, 22),
            ("PG(5,2)".into(), construct_pg5_seven_lines(2).map_err(|e| e.to_string())?, 28),
        ];
        let mut notes = Vec::new();
        for (name, c, size) in cases {
            let r = resolving_from_lines(&c.arrangement, None).map_err(|e| e.to_string())?;
            ensure!(r.candidate_size == size, "{name} candidate size {}", r.candidate_size);
            ensure!(r.augmentations == 0, "{name} needed {} augmentations", r.augmentations);
            let check = is_resolving(c.arrangement.space(), &r.vertices).map_err(|e| e.to_string())?;
            ensure!(check.resolving, "{name} collision {:?}", check.collision);
            notes.push(format!("{name} {size}"));
        }
        Ok(format!("{}, no augmentations", notes.join(", ")))
    }

    fn oracle_equivalence(&mut self) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut notes = Vec::new();
        for (n, q) in [(3usize, 2u32), (3, 3), (4, 3)] {
            let space = pg(n, q);
            let (mut small, mut any, mut higpig) = (0, 0, 0);
            while small < 500 || any < 500 {
                let k = rng.gen_range(0..n as i64);
                let want_small = small < 500;
                let size = if want_small { rng.gen_range(1..=q as usize) } else { rng.gen_range(1..=q as usize + 4) };
                let mut elems = Vec::new();
                while elems.len() < size {
                    let s = space.random_subspace(k, &mut rng).unwrap();
                    if !elems.contains(&s) {
                        elems.push(s);
                    }
                }
                let arr = Arrangement::new(&space, k, elems).unwrap();
                let strong = verify_strong_blocking(&arr).is_higpig();
                let transversal = has_transversal(&arr, arr.transversal_dim());
                if !transversal {
                    ensure!(strong, "PG({n},{q}) k={k} |K|={size}: no transversal yet strong scan rejects");
                }
                if arr.len() <= q as usize {
                    ensure!(strong == !transversal, "PG({n},{q}) k={k} |K|={size}: verdicts disagree");
                }
                if strong {
                    higpig += 1;
                }
                if want_small {
                    small += 1;
                } else {
                    any += 1;
                }
            }
            notes.push(format!("PG({n},{q}) {small}+{any} ({higpig} higgledy-piggledy)"));
        }
        Ok(notes.join(", "))
    }
}

#[test]
fn acceptance_criteria() {
    let mut suite = Suite { certified: Vec::new() };
    type Criterion = fn(&mut Suite) -> Outcome;
    let criteria: [(&str, Criterion); 12] = [
        ("PG(3,q) four lines", Suite::four_lines),
        ("PG(4,q) six lines", Suite::six_lines),
        ("PG(4,q) six planes", Suite::six_planes),
        ("PG(5,q) eight planes", Suite::eight_planes),
        ("PG(5,q) seven lines and seven solids", Suite::seven_lines_and_solids),
        ("seven planes in a spread", Suite::seven_planes),
        ("subline triples", Suite::subline_triples),
        ("lower bounds", Suite::lower_bounds),
        ("minimal codes", Suite::minimal_codes),
        ("saturating sets and covering radius", Suite::saturating),
        ("resolving sets", Suite::resolving),
        ("strong scan and transversal scan agree", Suite::oracle_equivalence),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut suite)))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let line = match &outcome {
            Ok(detail) => format!("acceptance {:>2} PASS {name}: {detail}", i + 1),
            Err(reason) => {
                failed.push(i + 1);
                format!("acceptance {:>2} FAIL {name}: {reason}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
