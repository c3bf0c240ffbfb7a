//! Command-line front end.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::chow::Analysis;
use crate::error::{Error, Result};
use crate::fan::{parse_catalog, FanPresentation, DEFAULT_CATALOG, HEADER};
use crate::poly::coeff_names;
use crate::search::cases::{load, BUILTIN};
use crate::search::claims::Finding;
use crate::search::config::FindingKind;
use crate::search::verify::{verify_case, CaseReport};
use crate::search::{fmt_tuple, run_case, run_case_unpruned, CaseContext, MachineStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "torfano", about = "Abelian surface obstructions on smooth toric Fano 4-folds")]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
    /// Catalog file instead of the built-in one.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Directory of `<ID>.case` files instead of the built-in ones.
    #[arg(long, global = true)]
    pub cases: Option<PathBuf>,
    /// Multiply every box bound by this rational, e.g. `0.5` or `2/3`.
    #[arg(long, global = true)]
    pub box_scale: Option<String>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Write standard output to this file as well.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog varieties.
    List,
    /// Print the ring data of one variety.
    Show { id: String },
    /// Enumerate the admissible classes of the given cases.
    Enumerate {
        ids: Vec<String>,
        /// Screen every box point without pruning.
        #[arg(long)]
        unpruned: bool,
    },
    /// Print the rule report of one candidate.
    Explain {
        id: String,
        #[arg(allow_negative_numbers = true)]
        coeffs: Vec<i64>,
    },
    /// Enumerate and compare with the expected lists and families.
    Verify { ids: Vec<String> },
    /// Summary table of all cases.
    Report,
}

/// Result of one invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub id: String,
    pub machine_status: MachineStatus,
    pub literature_status: String,
    pub reference: String,
    pub verified: bool,
}

pub fn parse_scale(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Syntax { line: 0, msg: format!("bad box scale `{s}`") };
    let (p, q) = if let Some((p, q)) = s.split_once('/') {
        (p.trim().parse::<i64>().map_err(|_| bad())?, q.trim().parse::<i64>().map_err(|_| bad())?)
    } else if let Some((i, f)) = s.split_once('.') {
        let q = 10i64.checked_pow(f.len() as u32).ok_or_else(bad)?;
        let whole: i64 = if i.is_empty() { 0 } else { i.parse().map_err(|_| bad())? };
        let frac: i64 = if f.is_empty() { 0 } else { f.parse().map_err(|_| bad())? };
        (whole * q + frac, q)
    } else {
        (s.parse().map_err(|_| bad())?, 1)
    };
    if p <= 0 || q <= 0 {
        return Err(bad());
    }
    Ok((p, q))
}

struct Env {
    catalog: Vec<FanPresentation>,
    inv: Invocation,
    scale: Option<(i64, i64)>,
}

impl Env {
    fn pres(&self, id: &str) -> Result<&FanPresentation> {
        self.catalog.iter().find(|p| p.id == id).ok_or_else(|| Error::UnknownVariety(id.to_string()))
    }

    fn case_ids(&self, ids: &[String]) -> Result<Vec<String>> {
        if ids.is_empty() {
            return Ok(self
                .catalog
                .iter()
                .map(|p| p.id.clone())
                .filter(|id| self.inv.cases.is_some() || BUILTIN.iter().any(|(k, _)| k == id))
                .collect());
        }
        for id in ids {
            self.pres(id)?;
        }
        Ok(ids.to_vec())
    }

    fn context(&self, id: &str) -> Result<CaseContext> {
        let cfg = load(id, self.inv.cases.as_deref())?;
        CaseContext::new(self.pres(id)?, cfg, self.scale)
    }
}

fn show(pres: &FanPresentation) -> Result<String> {
    let a = Analysis::new(pres)?;
    let names = coeff_names(a.dim());
    let mut s = format!("variety {}\nrays {}\n", pres.id, pres.rays);
    for (i, v) in a.ring.coords.iter().enumerate() {
        s += &format!("  x{} = ({}, {}, {}, {})\n", i + 1, v[0], v[1], v[2], v[3]);
    }
    let v = &a.ring.validation;
    s += &format!("euler {} betti2 {} betti4 {}\n", v.euler, v.betti2, v.betti4);
    let classes: Vec<String> = a
        .partition
        .classes
        .iter()
        .map(|c| format!("{{{}}}", c.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    s += &format!("partition {}\n", classes.join(" "));
    let basis: Vec<String> = a
        .basis
        .monomials
        .iter()
        .zip(&names)
        .map(|((i, j), n)| if i == j { format!("{n}=D{}^2", i + 1) } else { format!("{n}=D{}D{}", i + 1, j + 1) })
        .collect();
    s += &format!("basis {}\n", basis.join(" "));
    s += "lambda\n";
    let cells: Vec<Vec<String>> = a
        .lambda
        .iter()
        .map(|row| row.iter().map(|f| f.to_poly(&names).display_with(&names)).collect())
        .collect();
    let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
    for row in &cells {
        let r: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        s += &format!("  {}\n", r.join("  "));
    }
    let c2: Vec<String> = a.chern2.coeffs.iter().map(|c| c.to_string()).collect();
    s += &format!("c2 {}\n", c2.join(" "));
    s += &format!("dbp {}\n", a.double_point.to_poly(&names).display_with(&names));
    Ok(s)
}

fn findings_json(f: &Finding) -> serde_json::Value {
    serde_json::to_value(f).unwrap_or_default()
}

fn case_json(r: &CaseReport) -> serde_json::Value {
    json!({
        "id": r.id,
        "status": r.status.symbol(),
        "solutions": r.solutions,
        "findings": r.findings.iter().map(findings_json).collect::<Vec<_>>(),
        "missing": r.missing,
        "extra": r.extra,
        "survivors": r.survivors,
        "failures": r.failures,
        "passed": r.passed(),
    })
}

fn verify_all(env: &Env, ids: &[String]) -> Result<Vec<CaseReport>> {
    let ctxs = ids.iter().map(|id| env.context(id)).collect::<Result<Vec<_>>>()?;
    ctxs.par_iter()
        .map(|ctx| {
            let set = run_case(ctx)?;
            verify_case(ctx, &set)
        })
        .collect()
}

fn execute(env: &Env) -> Result<Outcome> {
    let mut out = Outcome::default();
    let json = env.inv.format == Format::Json;
    match &env.inv.command {
        Command::List => {
            if json {
                let v: Vec<_> = env
                    .catalog
                    .iter()
                    .map(|p| {
                        json!({
                            "id": p.id,
                            "rays": p.rays,
                            "relations": p.relations.len(),
                            "status": p.annotation.as_ref().map(|a| a.status.symbol()),
                        })
                    })
                    .collect();
                out.stdout = serde_json::to_string_pretty(&v).unwrap_or_default() + "\n";
            } else {
                out.stdout = format!("{HEADER}\n");
                for p in &env.catalog {
                    let st = p.annotation.as_ref().map_or(String::new(), |a| format!(" {} {}", a.status.symbol(), a.citation));
                    out.stdout += &format!("{} rays {} relations {}{st}\n", p.id, p.rays, p.relations.len());
                }
            }
        }
        Command::Show { id } => {
            let p = env.pres(id)?;
            if json {
                let a = Analysis::new(p)?;
                let names = coeff_names(a.dim());
                out.stdout = serde_json::to_string_pretty(&json!({
                    "id": p.id,
                    "coords": a.ring.coords,
                    "partition": a.partition.classes.iter().map(|c| c.iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "basis": a.basis.monomials.iter().map(|(i, j)| (i + 1, j + 1)).collect::<Vec<_>>(),
                    "gram": a.basis.gram,
                    "lambda": a.lambda.iter().map(|r| r.iter().map(|f| f.coeffs.clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "c2": a.chern2.coeffs,
                    "dbp": a.double_point.to_poly(&names).display_with(&names),
                }))
                .unwrap_or_default()
                    + "\n";
            } else {
                out.stdout = show(p)?;
            }
        }
        Command::Enumerate { ids, unpruned } => {
            let ids = env.case_ids(ids)?;
            let ctxs = ids.iter().map(|id| env.context(id)).collect::<Result<Vec<_>>>()?;
            let sets = ctxs
                .par_iter()
                .map(|c| if *unpruned { run_case_unpruned(c, &c.bounds) } else { run_case(c) })
                .collect::<Result<Vec<_>>>()?;
            if json {
                out.stdout = serde_json::to_string_pretty(&sets).unwrap_or_default() + "\n";
            } else {
                out.stdout = sets.iter().map(|s| s.serialize()).collect::<Vec<_>>().join("");
            }
        }
        Command::Explain { id, coeffs } => {
            let ctx = env.context(id)?;
            let rep = ctx.battery.report(coeffs)?;
            let m = ctx.battery.evaluate(coeffs);
            if json {
                out.stdout = serde_json::to_string_pretty(&json!({"matrix": m.entries, "report": rep})).unwrap_or_default() + "\n";
            } else {
                out.stdout = format!("candidate {}\n", fmt_tuple(coeffs));
                for row in &m.entries {
                    out.stdout += &format!("  {}\n", fmt_tuple(row));
                }
                out.stdout += &rep.to_string();
                for (k, s) in ctx.battery.side.iter().enumerate() {
                    out.stdout += &format!("constraint {}: {}\n", k + 1, s.provenance);
                }
            }
        }
        Command::Verify { ids } => {
            let ids = env.case_ids(ids)?;
            let reports = verify_all(env, &ids)?;
            for r in &reports {
                if !r.passed() {
                    out.stderr += &r.render();
                }
            }
            out.code = if reports.iter().all(CaseReport::passed) { 0 } else { 1 };
            if json {
                out.stdout = serde_json::to_string_pretty(&reports.iter().map(case_json).collect::<Vec<_>>())
                    .unwrap_or_default()
                    + "\n";
            } else {
                out.stdout = format!("{HEADER}\n");
                for r in &reports {
                    out.stdout += &r.render();
                }
            }
        }
        Command::Report => {
            let ids: Vec<String> = env.catalog.iter().map(|p| p.id.clone()).collect();
            let reports = verify_all(env, &ids)?;
            let rows: Vec<SummaryRow> = reports
                .iter()
                .map(|r| {
                    let ann = env.pres(&r.id).ok().and_then(|p| p.annotation.clone());
                    SummaryRow {
                        id: r.id.clone(),
                        machine_status: r.status,
                        literature_status: ann.as_ref().map_or("?".into(), |a| a.status.symbol().to_string()),
                        reference: ann.map_or(String::new(), |a| a.citation),
                        verified: r.passed(),
                    }
                })
                .collect();
            let findings: Vec<&Finding> = reports.iter().flat_map(|r| &r.findings).collect();
            out.code = if rows.iter().all(|r| r.verified) { 0 } else { 1 };
            if json {
                let v: Vec<_> = reports
                    .iter()
                    .zip(&rows)
                    .map(|(r, row)| {
                        json!({
                            "id": r.id,
                            "status": r.status.symbol(),
                            "literature": row.literature_status,
                            "reference": row.reference,
                            "solutions": r.solutions,
                            "findings": r.findings.iter().map(findings_json).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                out.stdout = serde_json::to_string_pretty(&v).unwrap_or_default() + "\n";
            } else {
                out.stdout = format!("{HEADER}\n{:<6}{:<9}{:<12}{:<12}{}\n", "id", "machine", "literature", "reference", "verified");
                for r in &rows {
                    out.stdout += &format!(
                        "{:<6}{:<9}{:<12}{:<12}{}\n",
                        r.id,
                        r.machine_status.symbol(),
                        r.literature_status,
                        r.reference,
                        if r.verified { "yes" } else { "no" }
                    );
                }
                for kind in [FindingKind::Adjudication, FindingKind::Typo] {
                    for f in findings.iter().filter(|f| f.kind == kind) {
                        out.stdout += &format!("finding {}\n", f.line());
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Runs one invocation; `args` excludes the program name.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("torfano")).chain(args.into_iter().map(Into::into));
    let inv = match Invocation::try_parse_from(argv) {
        Ok(i) => i,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let input_error = |e: Error| Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") };
    let scale = match inv.box_scale.as_deref().map(parse_scale).transpose() {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let text = match &inv.catalog {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => return input_error(Error::Io(format!("{}: {e}", p.display()))),
        },
        None => DEFAULT_CATALOG.to_string(),
    };
    let catalog = match parse_catalog(&text) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let threads = inv.threads;
    let out_path = inv.out.clone();
    let env = Env { catalog, inv, scale };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return input_error(Error::Io(e.to_string())),
    };
    let mut outcome = match pool.install(|| execute(&env)) {
        Ok(o) => o,
        Err(e) => return input_error(e),
    };
    if let Some(p) = out_path {
        if let Err(e) = std::fs::write(&p, &outcome.stdout) {
            outcome.stderr += &format!("error: {}: {e}\n", p.display());
            outcome.code = 2;
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales() {
        assert_eq!(parse_scale("0.5").unwrap(), (5, 10));
        assert_eq!(parse_scale("2/3").unwrap(), (2, 3));
        assert_eq!(parse_scale("2").unwrap(), (2, 1));
        assert!(parse_scale("-1").is_err());
        assert!(parse_scale("x").is_err());
    }

    #[test]
    fn unknown_variety_is_input_error() {
        let o = run(["show", "X99"]);
        assert_eq!(o.code, 2);
        let o = run(["frobnicate"]);
        assert_eq!(o.code, 2);
    }

    #[test]
    fn show_c1() {
        let o = run(["show", "C1"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("dbp 4a^2+4ab+b^2+2ac-19a-11b-3c"));
    }
}
