//! Comparison of a solution set with the configured expectations.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::claims::{evaluate_claim, judge, Finding, Verdict};
use super::config::MachineStatus;
use super::{fmt_tuple, CaseContext, SolutionSet};
use crate::error::Result;
use crate::families::{expand_domain, family, family_membership, family_residual_identity};

pub const IDENTITY_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extra {
    pub tuple: Vec<i64>,
    /// First failing rule, if the tuple does not pass the battery.
    pub failing: Option<String>,
    /// Why the tuple is outside the family characterization.
    pub outside: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub status: MachineStatus,
    pub solutions: Vec<Vec<i64>>,
    pub missing: Vec<Vec<i64>>,
    pub extra: Vec<Extra>,
    /// Numeric solutions excluded by a geometric argument, with the reason.
    pub survivors: Vec<(Vec<i64>, String)>,
    pub findings: Vec<Finding>,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && self.failures.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "case {} status {} {}\n",
            self.id,
            self.status.symbol(),
            if self.passed() { "ok" } else { "MISMATCH" }
        );
        s += &format!("solutions {}\n", self.solutions.len());
        for t in &self.solutions {
            s += &format!("  {}\n", fmt_tuple(t));
        }
        for (t, why) in &self.survivors {
            s += &format!("survivor {} (numeric survivor, geometrically excluded: {why})\n", fmt_tuple(t));
        }
        for t in &self.missing {
            s += &format!("missing {}\n", fmt_tuple(t));
        }
        for e in &self.extra {
            match &e.failing {
                Some(r) => s += &format!("extra {} (fails rule {r})\n", fmt_tuple(&e.tuple)),
                None => match &e.outside {
                    Some(o) => s += &format!("extra {} ({o})\n", fmt_tuple(&e.tuple)),
                    None => s += &format!("extra {}\n", fmt_tuple(&e.tuple)),
                },
            }
        }
        for f in &self.findings {
            s += &format!("finding {}\n", f.line());
        }
        for n in &self.notes {
            s += &format!("note {n}\n");
        }
        for f in &self.failures {
            s += &format!("failure {f}\n");
        }
        s
    }
}

/// Expected tuples from the literal list and the expanded parameter list.
pub fn expected_set(ctx: &CaseContext) -> Result<Vec<Vec<i64>>> {
    let mut out = ctx.config.expected.clone();
    if !ctx.config.expected_params.is_empty() {
        let f = ctx.config.family.as_deref().and_then(family).ok_or_else(|| crate::Error::Config {
            id: ctx.config.id.clone(),
            msg: "expected-params without a family".into(),
        })?;
        for p in &ctx.config.expected_params {
            out.push(f.apply(&expand_domain(f, p)?));
        }
    }
    Ok(ctx.canonical_set(out))
}

fn outside_reason(f: &crate::families::Family, t: &[i64]) -> String {
    match f.preimage(t) {
        None => "not in the family image".into(),
        Some(x) => match f.violated(&x) {
            Some(c) => format!("family image, violates {c}"),
            None => "family image, residual nonzero".into(),
        },
    }
}

pub fn machine_status(ctx: &CaseContext, solutions: &[Vec<i64>]) -> MachineStatus {
    let survivors: BTreeSet<Vec<i64>> = ctx.config.survivors.iter().map(|s| ctx.canonical(&s.tuple)).collect();
    let infinite = ctx.config.family.as_deref().and_then(family).is_some_and(|f| !f.finite);
    if solutions.iter().all(|t| survivors.contains(t)) && !infinite {
        MachineStatus::Empty
    } else if infinite || ctx.config.has_region() {
        MachineStatus::Family
    } else {
        MachineStatus::Finite
    }
}

pub fn verify_case(ctx: &CaseContext, actual: &SolutionSet) -> Result<CaseReport> {
    let solutions = ctx.canonical_set(actual.solutions.iter().cloned());
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut findings: Vec<Finding> = Vec::new();
    for t in &solutions {
        if let Some(r) = ctx.battery.first_failure(t) {
            failures.push(format!("solution {} fails rule {r}", fmt_tuple(t)));
        }
    }
    let fam = ctx.config.family.as_deref().and_then(family);
    let infinite = fam.is_some_and(|f| !f.finite);
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    let mut survivors = Vec::new();
    let found: BTreeSet<&Vec<i64>> = solutions.iter().collect();
    if infinite {
        let f = fam.unwrap();
        for t in &solutions {
            let in_family = ctx.group.iter().any(|p| {
                let img: Vec<i64> = p.iter().map(|&i| t[i]).collect();
                family_membership(&f.id, &img).is_some()
            });
            if !in_family {
                extra.push(Extra {
                    tuple: t.clone(),
                    failing: ctx.battery.first_failure(t).map(|r| r.name().into()),
                    outside: Some(outside_reason(f, t)),
                });
            }
        }
        let (pts, _) = f.points_in_box(&ctx.bounds)?;
        let mut rejected: BTreeMap<String, usize> = BTreeMap::new();
        let mut inside = 0;
        for p in &pts {
            let t = f.apply(p);
            match ctx.battery.first_failure(&t) {
                Some(r) => *rejected.entry(r.name().to_string()).or_default() += 1,
                None => {
                    inside += 1;
                    let c = ctx.canonical(&t);
                    if !found.contains(&c) {
                        missing.push(c);
                    }
                }
            }
        }
        notes.push(format!("{} family points in the box, {inside} pass the battery", pts.len()));
        for (r, n) in rejected {
            notes.push(format!("{n} family points fail rule {r}"));
        }
        missing.sort();
        missing.dedup();
    } else {
        let expected = expected_set(ctx)?;
        let exp: BTreeSet<&Vec<i64>> = expected.iter().collect();
        let surv: BTreeMap<Vec<i64>, String> =
            ctx.config.survivors.iter().map(|s| (ctx.canonical(&s.tuple), s.note.clone())).collect();
        missing = expected.iter().filter(|t| !found.contains(t)).cloned().collect();
        for t in &solutions {
            if exp.contains(t) {
                continue;
            }
            if let Some(n) = surv.get(t) {
                survivors.push((t.clone(), n.clone()));
            } else {
                extra.push(Extra {
                    tuple: t.clone(),
                    failing: ctx.battery.first_failure(t).map(|r| r.name().into()),
                    outside: None,
                });
            }
        }
        for t in surv.keys() {
            if !found.contains(t) {
                failures.push(format!("configured survivor {} not found", fmt_tuple(t)));
            }
        }
    }
    for claim in &ctx.config.claims {
        let o = evaluate_claim(ctx, claim)?;
        match judge(ctx, claim, &o) {
            Verdict::Ok => {}
            Verdict::Finding(f) => findings.push(f),
            Verdict::Failure(m) => failures.push(m),
        }
    }
    if let Some(f) = fam {
        let rep = family_residual_identity(&f.id, &ctx.analysis, IDENTITY_SAMPLES)?;
        match (&f.flag, rep.holds()) {
            (None, true) => notes.push(format!("residual identity holds on {} samples", rep.samples)),
            (None, false) => {
                let m = &rep.mismatches[0];
                failures.push(format!(
                    "residual identity fails at {:?}: engine {} printed {} (x{})",
                    m.point, m.engine, m.printed, f.kappa
                ));
            }
            (Some((_, label)), true) => failures.push(format!("flagged family {label} satisfies its identity")),
            (Some((kind, label)), false) => {
                if !findings.iter().any(|x| &x.label == label) {
                    let m = &rep.mismatches[0];
                    findings.push(Finding {
                        case: ctx.config.id.clone(),
                        kind: *kind,
                        label: label.clone(),
                        claim: format!("DBP == {} x printed residual", f.kappa),
                        engine_form: String::new(),
                        difference: String::new(),
                        witness: f.vars.iter().cloned().zip(m.point.iter().copied()).collect(),
                        engine: Some(m.engine),
                        printed: Some(m.printed),
                    });
                }
                notes.push(format!("residual identity fails on {} of {} samples", rep.mismatches.len(), rep.samples));
            }
        }
    }
    let status = machine_status(ctx, &solutions);
    if let Some(want) = ctx.config.expect_status {
        if want != status {
            failures.push(format!("status {} but configured {}", status.name(), want.name()));
        }
    }
    Ok(CaseReport {
        id: ctx.config.id.clone(),
        status,
        solutions,
        missing,
        extra,
        survivors,
        findings,
        failures,
        notes,
    })
}
