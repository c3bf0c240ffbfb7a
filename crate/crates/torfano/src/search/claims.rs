//! Evaluation of printed formulas against the engine.

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::{Claim, FindingKind, Relation, Where};
use super::CaseContext;
use crate::error::{Error, Result};
use crate::families::{expand_domain, family, grid, Family};
use crate::poly::{coeff_names, Poly, Substitution};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimOutcome {
    pub text: String,
    pub holds: bool,
    /// Left side after expansion and substitution.
    pub engine_form: String,
    /// Left side minus right side.
    pub difference: String,
    pub witness: BTreeMap<String, i64>,
    pub engine: Option<i128>,
    pub printed: Option<i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub case: String,
    pub kind: FindingKind,
    pub label: String,
    pub claim: String,
    pub engine_form: String,
    pub difference: String,
    pub witness: BTreeMap<String, i64>,
    pub engine: Option<i128>,
    pub printed: Option<i128>,
}

impl Finding {
    pub fn new(case: &str, kind: FindingKind, label: &str, o: &ClaimOutcome) -> Finding {
        Finding {
            case: case.to_string(),
            kind,
            label: label.to_string(),
            claim: o.text.clone(),
            engine_form: o.engine_form.clone(),
            difference: o.difference.clone(),
            witness: o.witness.clone(),
            engine: o.engine,
            printed: o.printed,
        }
    }

    pub fn line(&self) -> String {
        let w: Vec<String> = self.witness.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let vals = match (self.engine, self.printed) {
            (Some(e), Some(p)) => format!(" engine {e} printed {p}"),
            _ => String::new(),
        };
        format!(
            "{} {} {}: `{}` fails at {}{}; engine form {}; difference {}",
            self.case,
            self.kind.name(),
            self.label,
            self.claim,
            w.join(","),
            vals,
            self.engine_form,
            self.difference
        )
    }
}

fn name_order(ctx: &CaseContext, fam: Option<&Family>) -> Vec<String> {
    match fam {
        Some(f) => f.vars.clone(),
        None => coeff_names(ctx.dim()),
    }
}

/// Replaces `L<i>_<j>` and `DBP` by their engine values; `i`, `j` are printed positions.
pub fn expand(ctx: &CaseContext, p: &Poly) -> Result<Poly> {
    let names = coeff_names(ctx.dim());
    let m = ctx.analysis.lambda.len();
    let mut map = BTreeMap::new();
    for v in p.variables() {
        if v == "DBP" {
            map.insert(v, ctx.analysis.double_point.to_poly(&names));
        } else if let Some(rest) = v.strip_prefix('L') {
            let Some((i, j)) = rest.split_once('_') else { continue };
            let (Ok(i), Ok(j)) = (i.parse::<usize>(), j.parse::<usize>()) else { continue };
            if i == 0 || j == 0 || i > m || j > m {
                return Err(Error::Config { id: ctx.config.id.clone(), msg: format!("`{v}` outside the {m}x{m} matrix") });
            }
            let (i, j) = (ctx.config.engine_class(i - 1)?, ctx.config.engine_class(j - 1)?);
            map.insert(v, ctx.analysis.lambda[i][j].to_poly(&names));
        }
    }
    Ok(p.substitute_all(&map))
}

fn constants(s: &Substitution) -> Option<BTreeMap<String, i64>> {
    s.steps
        .iter()
        .map(|(k, p)| Some((k.clone(), i64::try_from(p.eval(&BTreeMap::new())?).ok()?)))
        .collect()
}

pub fn evaluate_claim(ctx: &CaseContext, claim: &Claim) -> Result<ClaimOutcome> {
    let bad = |msg: String| Error::Config { id: ctx.config.id.clone(), msg: format!("line {}: {msg}", claim.line) };
    let mut lhs = expand(ctx, &Poly::parse(&claim.lhs)?)?;
    let mut rhs = expand(ctx, &Poly::parse(&claim.rhs)?)?;
    let fam = match &claim.substitution {
        Where::Family(_) => Some(
            ctx.config
                .family
                .as_deref()
                .and_then(family)
                .ok_or_else(|| bad("`where family` without a known family".into()))?,
        ),
        _ => None,
    };
    let subst: BTreeMap<String, Poly> = match &claim.substitution {
        Where::None => BTreeMap::new(),
        Where::Subst(s) => Substitution::parse(s)?.steps.into_iter().collect(),
        Where::Family(extra) => {
            let mut m = fam.unwrap().substitution();
            if let Some(e) = extra {
                m.extend(Substitution::parse(e)?.steps);
            }
            m
        }
    };
    lhs = lhs.substitute_all(&subst);
    rhs = rhs.substitute_all(&subst);
    let order = name_order(ctx, fam);
    let diff = lhs.sub(&rhs);
    let holds = match claim.relation {
        Relation::Equal => diff.is_zero(),
        Relation::Proportional => !rhs.is_zero() && lhs.ratio_to(&rhs).is_some(),
    };
    let mut out = ClaimOutcome {
        text: claim.text.clone(),
        holds,
        engine_form: lhs.display_with(&order),
        difference: diff.display_with(&order),
        witness: BTreeMap::new(),
        engine: None,
        printed: None,
    };
    if holds {
        return Ok(out);
    }
    let mut vars = lhs.variables();
    vars.extend(rhs.variables());
    vars.sort();
    vars.dedup();
    let binds_all = |w: &BTreeMap<String, i64>| vars.iter().all(|v| w.contains_key(v));
    let mut witness: Option<BTreeMap<String, i64>> = None;
    if let Some(at) = &claim.at {
        let w = constants(&Substitution::parse(at)?).ok_or_else(|| bad("`at` values must be integers".into()))?;
        if !binds_all(&w) {
            return Err(bad(format!("`at` does not bind all of {}", vars.join(","))));
        }
        witness = Some(w);
    }
    if witness.is_none() {
        let first: Option<Vec<i64>> = match fam {
            Some(f) => ctx
                .config
                .expected
                .first()
                .and_then(|t| f.preimage(t))
                .or_else(|| ctx.config.expected_params.first().and_then(|p| expand_domain(f, p).ok())),
            None => ctx.config.expected.first().cloned(),
        };
        if let Some(t) = first {
            let w: BTreeMap<String, i64> = order.iter().cloned().zip(t).collect();
            if binds_all(&w) {
                witness = Some(w);
            }
        }
    }
    if witness.is_none() {
        for p in grid(vars.len(), 729) {
            let w: BTreeMap<String, i64> = vars.iter().cloned().zip(p).collect();
            if lhs.eval(&w) != rhs.eval(&w) {
                witness = Some(w);
                break;
            }
        }
    }
    if let Some(w) = witness {
        out.engine = lhs.eval(&w);
        out.printed = rhs.eval(&w);
        out.witness = w;
    }
    Ok(out)
}

/// What a claim outcome means for verification.
pub enum Verdict {
    Ok,
    Finding(Finding),
    Failure(String),
}

pub fn judge(ctx: &CaseContext, claim: &Claim, o: &ClaimOutcome) -> Verdict {
    match (&claim.flag, o.holds) {
        (None, true) => Verdict::Ok,
        (None, false) => {
            let w: Vec<String> = o.witness.iter().map(|(k, v)| format!("{k}={v}")).collect();
            Verdict::Failure(format!(
                "claim `{}` fails at {} (engine {:?}, printed {:?}); difference {}",
                o.text,
                w.join(","),
                o.engine,
                o.printed,
                o.difference
            ))
        }
        (Some((kind, label)), false) => Verdict::Finding(Finding::new(&ctx.config.id, *kind, label, o)),
        (Some((_, label)), true) => {
            Verdict::Failure(format!("flagged claim {label} `{}` holds; expected a discrepancy", o.text))
        }
    }
}

pub fn finding_kinds() -> [FindingKind; 2] {
    [FindingKind::Adjudication, FindingKind::Typo]
}
