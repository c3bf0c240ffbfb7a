//! Case configuration files.
//!
//! ```text
//! torfano-v1
//! case D7
//! box * -40 40
//! bound a: 0 < a <= 6 from the double-point equation
//! side entry 3 4 zero-or-at-least 3 | degree of a map to P1 x P1
//! symmetry a c b d
//! expect-status finite
//! expected 3 4 1 7
//! claim L3_4 == a
//! ```

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::HEADER;
use crate::poly::{coeff_names, LinearForm, Poly, Substitution};
use crate::screen::{Allowed, SideConstraint, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MachineStatus {
    Empty,
    Finite,
    Family,
}

impl MachineStatus {
    pub fn symbol(self) -> &'static str {
        match self {
            MachineStatus::Empty => "×",
            MachineStatus::Finite => "♯",
            MachineStatus::Family => "♭",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MachineStatus::Empty => "empty",
            MachineStatus::Finite => "finite",
            MachineStatus::Family => "family",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TargetSpec {
    Entry(usize, usize),
    Coeff(String),
    Form(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideSpec {
    pub target: TargetSpec,
    pub allowed: Allowed,
    pub provenance: String,
    pub region: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Equal,
    Proportional,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Where {
    None,
    /// Coefficients replaced by the case family's map, then the optional
    /// extra substitution.
    Family(Option<String>),
    Subst(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum FindingKind {
    Adjudication,
    Typo,
}

impl FindingKind {
    pub fn name(self) -> &'static str {
        match self {
            FindingKind::Adjudication => "adjudication",
            FindingKind::Typo => "typo",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub text: String,
    pub lhs: String,
    pub rhs: String,
    pub relation: Relation,
    pub substitution: Where,
    pub at: Option<String>,
    /// Set for printed formulas known to disagree with the engine.
    pub flag: Option<(FindingKind, String)>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Survivor {
    pub tuple: Vec<i64>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseConfig {
    pub id: String,
    pub default_box: Option<(i64, i64)>,
    pub box_overrides: Vec<(String, i64, i64)>,
    pub bounds: Vec<String>,
    pub side: Vec<SideSpec>,
    pub symmetries: Vec<Vec<String>>,
    pub expect_status: Option<MachineStatus>,
    pub expected: Vec<Vec<i64>>,
    pub expected_params: Vec<Vec<i64>>,
    pub survivors: Vec<Survivor>,
    pub family: Option<String>,
    pub claims: Vec<Claim>,
    /// Engine class (0-based) at each printed class position, when they differ.
    pub order: Option<Vec<usize>>,
}

fn cfg_err(id: &str, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config { id: id.to_string(), msg: format!("line {line}: {msg}") }
}

fn ints(toks: &[&str], id: &str, line: usize) -> Result<Vec<i64>> {
    toks.iter()
        .map(|t| t.parse::<i64>().map_err(|_| cfg_err(id, line, format!("expected an integer, found `{t}`"))))
        .collect()
}

fn parse_allowed(kind: &str, n: &str, id: &str, line: usize) -> Result<Allowed> {
    let n: i64 = n.parse().map_err(|_| cfg_err(id, line, format!("bad bound `{n}`")))?;
    if n < 1 {
        return Err(cfg_err(id, line, "side constraint bound must be at least 1"));
    }
    match kind {
        "at-least" => Ok(Allowed::AtLeast(n)),
        "zero-or-at-least" => Ok(Allowed::ZeroOrAtLeast(n)),
        _ => Err(cfg_err(id, line, format!("unknown allowed set `{kind}`"))),
    }
}

fn parse_side(rest: &str, region: bool, id: &str, line: usize) -> Result<SideSpec> {
    let (body, prov) = match rest.split_once('|') {
        Some((b, p)) => (b.trim(), p.trim().to_string()),
        None => (rest.trim(), String::new()),
    };
    let toks: Vec<&str> = body.split_whitespace().collect();
    let (target, tail) = match toks.first() {
        Some(&"entry") if toks.len() == 5 => {
            let ij = ints(&toks[1..3], id, line)?;
            if ij[0] < 1 || ij[1] < 1 {
                return Err(cfg_err(id, line, "entry positions start at 1"));
            }
            (TargetSpec::Entry(ij[0] as usize - 1, ij[1] as usize - 1), &toks[3..])
        }
        Some(&"coeff") if toks.len() == 4 => (TargetSpec::Coeff(toks[1].to_string()), &toks[2..]),
        Some(&"form") if toks.len() >= 4 => {
            let k = toks.len();
            (TargetSpec::Form(toks[1..k - 2].join(" ")), &toks[k - 2..])
        }
        _ => return Err(cfg_err(id, line, "expected `entry i j`, `coeff x` or `form <expr>` and an allowed set")),
    };
    let allowed = parse_allowed(tail[0], tail[1], id, line)?;
    if region && matches!(allowed, Allowed::ZeroOrAtLeast(_)) {
        return Err(cfg_err(id, line, "a region must be of the form at-least N"));
    }
    if !region && prov.is_empty() {
        return Err(cfg_err(id, line, "side constraints need a provenance after `|`"));
    }
    Ok(SideSpec { target, allowed, provenance: prov, region })
}

fn split_last<'a>(s: &'a str, key: &str) -> (&'a str, Option<&'a str>) {
    match s.rfind(key) {
        Some(k) => (&s[..k], Some(&s[k + key.len()..])),
        None => (s, None),
    }
}

fn parse_claim(body: &str, flag: Option<(FindingKind, String)>, id: &str, line: usize) -> Result<Claim> {
    let (rest, at) = split_last(body, " at ");
    let (rest, wh) = split_last(rest, " where ");
    let substitution = match wh.map(str::trim) {
        None => Where::None,
        Some(s) if s.starts_with("family") => {
            let rest = s["family".len()..].trim_start_matches([',', ' ']).trim();
            if rest.is_empty() {
                Where::Family(None)
            } else {
                Substitution::parse(rest).map_err(|e| cfg_err(id, line, e))?;
                Where::Family(Some(rest.to_string()))
            }
        }
        Some(s) => {
            Substitution::parse(s).map_err(|e| cfg_err(id, line, e))?;
            Where::Subst(s.to_string())
        }
    };
    let (lhs, rhs, relation) = if let Some((l, r)) = rest.split_once("==") {
        (l, r, Relation::Equal)
    } else if let Some((l, r)) = rest.split_once('~') {
        (l, r, Relation::Proportional)
    } else {
        return Err(cfg_err(id, line, "a claim needs `==` or `~`"));
    };
    for side in [lhs, rhs] {
        Poly::parse(side).map_err(|e| cfg_err(id, line, e))?;
    }
    if let Some(a) = at {
        Substitution::parse(a).map_err(|e| cfg_err(id, line, e))?;
    }
    Ok(Claim {
        text: body.trim().to_string(),
        lhs: lhs.trim().to_string(),
        rhs: rhs.trim().to_string(),
        relation,
        substitution,
        at: at.map(|s| s.trim().to_string()),
        flag,
        line,
    })
}

impl CaseConfig {
    pub fn parse(text: &str) -> Result<CaseConfig> {
        let mut cfg = CaseConfig {
            id: String::new(),
            default_box: None,
            box_overrides: Vec::new(),
            bounds: Vec::new(),
            side: Vec::new(),
            symmetries: Vec::new(),
            expect_status: None,
            expected: Vec::new(),
            expected_params: Vec::new(),
            survivors: Vec::new(),
            family: None,
            claims: Vec::new(),
            order: None,
        };
        let mut header = false;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if !header {
                if content != HEADER {
                    return Err(Error::Syntax { line, msg: format!("missing `{HEADER}` header") });
                }
                header = true;
                continue;
            }
            let (kw, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            let rest = rest.trim();
            let id = cfg.id.clone();
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if kw != "case" && id.is_empty() {
                return Err(Error::Syntax { line, msg: "expected `case <ID>` first".into() });
            }
            match kw {
                "case" => {
                    if !id.is_empty() || toks.len() != 1 {
                        return Err(Error::Syntax { line, msg: "expected a single `case <ID>`".into() });
                    }
                    cfg.id = toks[0].to_string();
                }
                "box" => {
                    if toks.len() != 3 {
                        return Err(cfg_err(&id, line, "expected `box <coeff|*> <lo> <hi>`"));
                    }
                    let v = ints(&toks[1..], &id, line)?;
                    if v[0] > v[1] {
                        return Err(Error::EmptyBox);
                    }
                    if toks[0] == "*" {
                        cfg.default_box = Some((v[0], v[1]));
                    } else {
                        cfg.box_overrides.push((toks[0].to_string(), v[0], v[1]));
                    }
                }
                "bound" => cfg.bounds.push(rest.to_string()),
                "side" => cfg.side.push(parse_side(rest, false, &id, line)?),
                "region" => cfg.side.push(parse_side(rest, true, &id, line)?),
                "symmetry" => cfg.symmetries.push(toks.iter().map(|s| s.to_string()).collect()),
                "expect-status" => {
                    cfg.expect_status = Some(match rest {
                        "empty" => MachineStatus::Empty,
                        "finite" => MachineStatus::Finite,
                        "family" => MachineStatus::Family,
                        _ => return Err(cfg_err(&id, line, format!("unknown status `{rest}`"))),
                    })
                }
                "expected" => cfg.expected.push(ints(&toks, &id, line)?),
                "expected-params" => cfg.expected_params.push(ints(&toks, &id, line)?),
                "survivor" => {
                    let (t, note) = rest.split_once('|').unwrap_or((rest, ""));
                    let t: Vec<&str> = t.split_whitespace().collect();
                    cfg.survivors.push(Survivor { tuple: ints(&t, &id, line)?, note: note.trim().to_string() });
                }
                "family" => cfg.family = Some(rest.to_string()),
                "order" => {
                    let v = ints(&toks, &id, line)?;
                    let mut sorted = v.clone();
                    sorted.sort_unstable();
                    if sorted != (1..=v.len() as i64).collect::<Vec<_>>() {
                        return Err(cfg_err(&id, line, "order must be a permutation of 1..m"));
                    }
                    cfg.order = Some(v.iter().map(|&k| k as usize - 1).collect());
                }
                "claim" => cfg.claims.push(parse_claim(rest, None, &id, line)?),
                "flagged" => {
                    if toks.len() < 3 {
                        return Err(cfg_err(&id, line, "expected `flagged <kind> <label> <claim>`"));
                    }
                    let kind = match toks[0] {
                        "adjudication" => FindingKind::Adjudication,
                        "typo" => FindingKind::Typo,
                        k => return Err(cfg_err(&id, line, format!("unknown finding kind `{k}`"))),
                    };
                    let body = rest[rest.find(toks[1]).unwrap() + toks[1].len()..].trim();
                    cfg.claims.push(parse_claim(body, Some((kind, toks[1].to_string())), &id, line)?);
                }
                _ => return Err(cfg_err(&id, line, format!("unknown keyword `{kw}`"))),
            }
        }
        if cfg.id.is_empty() {
            return Err(Error::Syntax { line: 1, msg: "no `case` line".into() });
        }
        Ok(cfg)
    }

    /// Per-coefficient box, optionally scaled towards zero.
    pub fn resolve_box(&self, dim: usize, scale: Option<(i64, i64)>) -> Result<Vec<(i64, i64)>> {
        let names = coeff_names(dim);
        let mut b = vec![self.default_box.ok_or_else(|| Error::Config {
            id: self.id.clone(),
            msg: "no default `box *` line".into(),
        })?; dim];
        for (name, lo, hi) in &self.box_overrides {
            let k = names.iter().position(|n| n == name).ok_or_else(|| Error::Config {
                id: self.id.clone(),
                msg: format!("unknown coefficient `{name}` in box"),
            })?;
            b[k] = (*lo, *hi);
        }
        if let Some((p, q)) = scale {
            for (lo, hi) in b.iter_mut() {
                *lo = *lo * p / q;
                *hi = *hi * p / q;
            }
        }
        if b.iter().any(|(lo, hi)| lo > hi) {
            return Err(Error::EmptyBox);
        }
        Ok(b)
    }

    pub fn side_constraints(&self, dim: usize, classes: usize) -> Result<Vec<SideConstraint>> {
        let names = coeff_names(dim);
        let bad = |msg: String| Error::Config { id: self.id.clone(), msg };
        self.side
            .iter()
            .map(|s| {
                let target = match &s.target {
                    TargetSpec::Entry(i, j) => {
                        if *i >= classes || *j >= classes {
                            return Err(bad(format!("entry ({},{}) outside the matrix", i + 1, j + 1)));
                        }
                        Target::Entry(self.engine_class(*i)?, self.engine_class(*j)?)
                    }
                    TargetSpec::Coeff(c) => Target::Coeff(
                        names
                            .iter()
                            .position(|n| n == c)
                            .ok_or_else(|| bad(format!("unknown coefficient `{c}`")))?,
                    ),
                    TargetSpec::Form(f) => Target::Form(linear_form(f, &names).map_err(|e| bad(e.to_string()))?),
                };
                Ok(SideConstraint {
                    target,
                    allowed: s.allowed,
                    provenance: s.provenance.clone(),
                    region: s.region,
                })
            })
            .collect()
    }

    /// Symmetries as index permutations: the image of `t` is `t[perm[k]]`.
    pub fn permutations(&self, dim: usize) -> Result<Vec<Vec<usize>>> {
        let names = coeff_names(dim);
        self.symmetries
            .iter()
            .map(|s| {
                let p: Vec<usize> = s
                    .iter()
                    .map(|n| names.iter().position(|m| m == n))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::Config { id: self.id.clone(), msg: "unknown name in symmetry".into() })?;
                let mut q = p.clone();
                q.sort_unstable();
                if q != (0..dim).collect::<Vec<_>>() {
                    return Err(Error::Config { id: self.id.clone(), msg: "symmetry is not a permutation".into() });
                }
                Ok(p)
            })
            .collect()
    }

    /// Engine class index for a printed class position.
    pub fn engine_class(&self, k: usize) -> Result<usize> {
        match &self.order {
            None => Ok(k),
            Some(o) => o.get(k).copied().ok_or_else(|| Error::Config {
                id: self.id.clone(),
                msg: format!("class {} outside the order line", k + 1),
            }),
        }
    }

    pub fn has_region(&self) -> bool {
        self.side.iter().any(|s| s.region)
    }
}

/// Parses a linear expression in the named coefficients.
pub fn linear_form(text: &str, names: &[String]) -> Result<LinearForm> {
    let p = Poly::parse(text)?;
    let mut coeffs = vec![0i64; names.len()];
    let mut vals: BTreeMap<String, i64> = names.iter().map(|n| (n.clone(), 0)).collect();
    if p.degree() > 1 || p.eval(&vals) != Some(0) {
        return Err(Error::Syntax { line: 0, msg: format!("`{text}` is not a linear form") });
    }
    for (k, n) in names.iter().enumerate() {
        vals.insert(n.clone(), 1);
        coeffs[k] = p.eval(&vals).unwrap() as i64;
        vals.insert(n.clone(), 0);
    }
    Ok(LinearForm { coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    const D7: &str = "torfano-v1\ncase D7\nbox * -40 40\nbox a 0 12\nside entry 3 4 zero-or-at-least 3 | map degree\nsymmetry a c b d\nexpect-status finite\nexpected 3 4 1 7\nclaim L3_4 == a\nflagged adjudication D7-dbp DBP == 2*a^2 at a = 1\n";

    #[test]
    fn parses() {
        let c = CaseConfig::parse(D7).unwrap();
        assert_eq!(c.id, "D7");
        assert_eq!(c.resolve_box(4, None).unwrap()[0], (0, 12));
        assert_eq!(c.resolve_box(4, Some((1, 2))).unwrap()[1], (-20, 20));
        assert_eq!(c.permutations(4).unwrap(), vec![vec![0, 2, 1, 3]]);
        assert_eq!(c.claims.len(), 2);
        assert_eq!(c.claims[1].flag.as_ref().unwrap().1, "D7-dbp");
        assert_eq!(c.claims[1].at.as_deref(), Some("a = 1"));
        assert_eq!(c.claims[1].rhs, "2*a^2");
    }

    #[test]
    fn rejects() {
        assert!(CaseConfig::parse("case X\n").is_err());
        assert!(CaseConfig::parse("torfano-v1\ncase X\nbox * 3 1\n").is_err());
        assert!(CaseConfig::parse("torfano-v1\ncase X\nside coeff a at-least 0 | x\n").is_err());
        assert!(CaseConfig::parse("torfano-v1\ncase X\nside coeff a at-least 2\n").is_err());
        assert!(CaseConfig::parse("torfano-v1\ncase X\nfrobnicate\n").is_err());
    }

    #[test]
    fn linear_forms() {
        let n = coeff_names(3);
        assert_eq!(linear_form("2*a - c", &n).unwrap().coeffs, vec![2, 0, -1]);
        assert!(linear_form("a*b", &n).is_err());
    }
}
