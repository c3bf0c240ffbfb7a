//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion.
//!
//! Some sub-checks cannot hold for the published data; they are listed in
//! `KNOWN` and still reported as FAIL. The process fails when the set of
//! failing sub-checks differs from `KNOWN` in either direction.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use torfano::chow::{all_triples, Analysis};
use torfano::families::{family, family_residual_identity};
use torfano::poly::{coeff_names, Poly};
use torfano::screen::{check_rank_signature, EvaluatedMatrix, Rule};
use torfano::search::config::FindingKind;
use torfano::search::verify::{verify_case, CaseReport};
use torfano::search::{run_case, run_case_in, split_box, CaseContext, SolutionSet};

use common::{case_ids, catalog, context, oracle_inertia};

const KNOWN: &[(u8, &str)] = &[
    (3, "D7"),
    (3, "D17"),
    (3, "Z1"),
    (4, "D7 3 1 1 8"),
    (4, "D7 4 1 1 4"),
    (5, "W"),
];

struct Run {
    ctx: CaseContext,
    set: SolutionSet,
    report: CaseReport,
}

fn run_all() -> BTreeMap<String, Run> {
    case_ids()
        .into_par_iter()
        .map(|id| {
            let ctx = context(id);
            let set = run_case(&ctx).unwrap();
            let report = verify_case(&ctx, &set).unwrap();
            (id.to_string(), Run { ctx, set, report })
        })
        .collect()
}

/// Failing sub-checks, each with a key and a detail line.
type Failures = Vec<(String, String)>;

fn engine_dbp(a: &Analysis) -> Poly {
    a.double_point.to_poly(&coeff_names(a.dim()))
}

fn c1_ring_reconstruction(runs: &BTreeMap<String, Run>) -> Failures {
    let printed = [
        ("C1", "4*a^2 + 4*a*b + b^2 + 2*a*c - 19*a - 11*b - 3*c"),
        ("C2", "a^2 + 2*a*b + b^2 + 2*a*c - 10*a - 10*b - 3*c"),
    ];
    let mut out = Vec::new();
    for (id, text) in printed {
        let e = engine_dbp(&runs[id].ctx.analysis);
        let p = Poly::parse(text).unwrap();
        if !e.sub(&p).is_zero() {
            out.push((id.into(), format!("engine {} printed {}", e.display_with(&coeff_names(3)), text)));
        }
    }
    out
}

fn c2_exclusions(runs: &BTreeMap<String, Run>) -> Failures {
    let mut out = Vec::new();
    for id in ["C1", "C2", "D10", "D18"] {
        let s = &runs[id].set.solutions;
        if !s.is_empty() {
            out.push((id.into(), format!("{} solutions, first {:?}", s.len(), s[0])));
        }
    }
    let c3 = &runs["C3"];
    let want = vec![c3.ctx.canonical(&[14, -10, 0])];
    if c3.set.solutions != want {
        out.push(("C3".into(), format!("solutions {:?}", c3.set.solutions)));
    }
    let flagged: Vec<&Vec<i64>> = c3.report.survivors.iter().map(|(t, _)| t).collect();
    if flagged != vec![&want[0]] || !c3.report.passed() {
        out.push(("C3 survivor".into(), "survivor not reported as geometrically excluded".into()));
    }
    out
}

fn c3_finite_lists(runs: &BTreeMap<String, Run>) -> Failures {
    let mut out = Vec::new();
    for id in ["D7", "D17", "D14", "G4", "I9", "L13", "Q16", "Z1"] {
        let r = &runs[id].report;
        if !r.missing.is_empty() || !r.extra.is_empty() {
            let extra: Vec<&Vec<i64>> = r.extra.iter().map(|e| &e.tuple).collect();
            out.push((id.into(), format!("missing {:?} extra {:?}", r.missing, extra)));
        }
    }
    out
}

fn c4_named_rules(runs: &BTreeMap<String, Run>) -> Failures {
    let cases: [(&str, &[i64], Rule); 3] = [
        ("D7", &[3, 1, 1, 8], Rule::Vi),
        ("D7", &[4, 1, 1, 4], Rule::Vi),
        ("G4", &[3, 4, 0, 8, -2], Rule::Ii),
    ];
    let mut out = Vec::new();
    for (id, t, rule) in cases {
        let rep = runs[id].ctx.battery.report(t).unwrap();
        let failing = rep.failing();
        let witnessed = rep.verdict(rule).is_some_and(|v| v.witness.is_some());
        if failing != vec![rule] || !witnessed {
            let key = format!("{id} {}", t.iter().map(i64::to_string).collect::<Vec<_>>().join(" "));
            let names: Vec<&str> = failing.iter().map(|r| r.name()).collect();
            out.push((key, format!("fails {names:?}, expected exactly [{}]", rule.name())));
        }
    }
    out
}

fn c5_families(runs: &BTreeMap<String, Run>) -> Failures {
    let mut out = Vec::new();
    for id in ["D11", "G3", "G5", "L11", "W", "Z2", "V4"] {
        let run = &runs[id];
        let f = family(id).unwrap();
        let rep = family_residual_identity(&f.id, &run.ctx.analysis, 200).unwrap();
        let samples_ok = rep.samples >= 200 || rep.samples as u64 == 9u64.pow(f.vars.len() as u32);
        if !rep.holds() || !samples_ok {
            out.push((format!("{id} identity"), format!("{} mismatches in {} samples", rep.mismatches.len(), rep.samples)));
        }
        let r = &run.report;
        if !r.missing.is_empty() || !r.extra.is_empty() {
            out.push((id.into(), format!("{} missing, {} extra", r.missing.len(), r.extra.len())));
        }
    }
    out
}

fn c6_adjudications(runs: &BTreeMap<String, Run>) -> Failures {
    let mut out = Vec::new();
    let mut labels = BTreeSet::new();
    for run in runs.values() {
        for f in &run.report.findings {
            if f.kind == FindingKind::Adjudication {
                labels.insert(f.label.clone());
                if f.witness.is_empty() {
                    out.push((f.label.clone(), "no witness".into()));
                }
            }
        }
    }
    let want: BTreeSet<String> = ["D7-dbp", "I9-L55", "U8-list"].iter().map(|s| s.to_string()).collect();
    if labels != want {
        out.push(("labels".into(), format!("adjudications {labels:?}")));
    }
    for id in ["D7", "I9", "U8"] {
        let run = &runs[id];
        for t in &run.set.solutions {
            if let Some(r) = run.ctx.battery.first_failure(t) {
                out.push((id.into(), format!("{t:?} fails rule {}", r.name())));
            }
        }
    }
    out
}

fn c7_kernel(_: &BTreeMap<String, Run>) -> Failures {
    let mut out = Vec::new();
    for p in catalog() {
        let a = match Analysis::new(p) {
            Ok(a) => a,
            Err(e) => {
                out.push((p.id.clone(), format!("analysis failed: {e}")));
                continue;
            }
        };
        let ring = &a.ring;
        if ring.validation.betti4 as usize != a.basis.len() {
            out.push((p.id.clone(), format!("betti4 {} basis {}", ring.validation.betti4, a.basis.len())));
        }
        'outer: for m in 0..4 {
            for [k, l, n] in all_triples(p.rays) {
                let s: i64 = (0..p.rays).map(|j| ring.coords[j][m] * ring.quartic([j, k, l, n])).sum();
                if s != 0 {
                    out.push((p.id.clone(), format!("relation identity fails for m=e{} triple {k} {l} {n}", m + 1)));
                    break 'outer;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10);
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-20..=20);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        let (pos, neg, zero) = oracle_inertia(&m);
        let rank = n - zero;
        let want = (1..=4).contains(&rank) && pos == 1 && neg + 1 == rank;
        let (r, w) = check_rank_signature(&EvaluatedMatrix { entries: m }).unwrap();
        if r != rank || w.is_none() != want {
            bad += 1;
        }
    }
    if bad > 0 {
        out.push(("signature".into(), format!("{bad} of 1000 random matrices disagree with the oracle")));
    }
    out
}

fn c8_projective_space(runs: &BTreeMap<String, Run>) -> Failures {
    let run = &runs["P4"];
    let mut out = Vec::new();
    let e = engine_dbp(&run.ctx.analysis);
    if !e.sub(&Poly::parse("a^2 - 10*a").unwrap()).is_zero() {
        out.push(("polynomial".into(), e.display_with(&coeff_names(1))));
    }
    let zeros: Vec<i64> = (-100..=100).filter(|&n| run.ctx.analysis.double_point.eval(&[n]) == 0).collect();
    if zeros != vec![0, 10] {
        out.push(("zeros".into(), format!("{zeros:?}")));
    }
    if run.set.solutions != vec![vec![10]] {
        out.push(("solutions".into(), format!("{:?}", run.set.solutions)));
    }
    out
}

fn split_times(bounds: &[(i64, i64)], depth: usize) -> Vec<Vec<(i64, i64)>> {
    let mut parts = vec![bounds.to_vec()];
    for _ in 0..depth {
        parts = parts.iter().flat_map(|b| split_box(b)).collect();
    }
    parts
}

fn c9_determinism(runs: &BTreeMap<String, Run>) -> Failures {
    let mut out = Vec::new();
    for format in ["text", "json"] {
        let one = torfano::cli::run(["--threads", "1", "--format", format, "verify"]);
        let many = torfano::cli::run(["--threads", "4", "--format", format, "verify"]);
        if one.code != many.code || one.stdout != many.stdout || one.stdout.is_empty() {
            out.push((format!("verify {format}"), "1 thread and 4 threads differ".into()));
        }
    }
    let diffs: Vec<(String, String)> = runs
        .par_iter()
        .filter_map(|(id, run)| {
            let b: Vec<(i64, i64)> = run.ctx.bounds.iter().map(|&(l, h)| (l.max(-15), h.min(15))).collect();
            if b.iter().any(|(l, h)| l > h) {
                return None;
            }
            let single = run_case_in(&run.ctx, &b).unwrap();
            let parts = split_times(&b, 3).iter().map(|p| run_case_in(&run.ctx, p).unwrap()).collect();
            let merged = SolutionSet::merge(&run.ctx, parts);
            (merged.solutions != single.solutions).then(|| {
                (format!("{id} merge"), format!("{} vs {} solutions", merged.solutions.len(), single.solutions.len()))
            })
        })
        .collect();
    out.extend(diffs);
    out
}

fn main() {
    let runs = run_all();
    let criteria: [(u8, &str, fn(&BTreeMap<String, Run>) -> Failures); 9] = [
        (1, "ring reconstruction for C1 and C2", c1_ring_reconstruction),
        (2, "exclusion cases", c2_exclusions),
        (3, "finite lists", c3_finite_lists),
        (4, "named-rule exclusions", c4_named_rules),
        (5, "infinite families", c5_families),
        (6, "typo arbitration", c6_adjudications),
        (7, "kernel properties", c7_kernel),
        (8, "projective space fixture", c8_projective_space),
        (9, "determinism and partition-merge", c9_determinism),
    ];
    let mut failing = BTreeSet::new();
    for (n, name, check) in criteria {
        let fails = check(&runs);
        let mark = if fails.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {n} {mark}: {name}");
        for (key, detail) in &fails {
            let known = KNOWN.contains(&(n, key.as_str()));
            println!("    {key}: {detail}{}", if known { " (known)" } else { "" });
            failing.insert((n, key.clone()));
        }
    }
    let known: BTreeSet<(u8, String)> = KNOWN.iter().map(|&(n, k)| (n, k.to_string())).collect();
    let new: Vec<_> = failing.difference(&known).collect();
    let fixed: Vec<_> = known.difference(&failing).collect();
    if !new.is_empty() || !fixed.is_empty() {
        eprintln!("unexpected failures {new:?}; known failures that now pass {fixed:?}");
        std::process::exit(1);
    }
}
