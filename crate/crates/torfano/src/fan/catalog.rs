use std::collections::HashSet;

use super::{Annotation, FanPresentation, LiteratureStatus, PrimitiveRelation};
use crate::error::{Error, Result};

pub const DEFAULT_CATALOG: &str = include_str!("../../data/catalog.tf");

pub const HEADER: &str = "torfano-v1";

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, msg: msg.into() }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    let i: usize = tok
        .parse()
        .map_err(|_| syntax(line, format!("expected a ray index, found `{tok}`")))?;
    if i == 0 {
        return Err(syntax(line, "ray indices start at 1"));
    }
    Ok(i - 1)
}

fn parse_relation(body: &str, line: usize) -> Result<PrimitiveRelation> {
    let (l, r) = body
        .split_once('=')
        .ok_or_else(|| syntax(line, "relation needs `=`"))?;
    let lhs = l
        .split_whitespace()
        .map(|t| parse_index(t, line))
        .collect::<Result<Vec<_>>>()?;
    let mut rhs: Vec<(usize, i64)> = Vec::new();
    let r = r.trim();
    if r != "0" {
        for term in r.split('+').map(str::trim) {
            let (c, j) = match term.split_once('*') {
                Some((c, j)) => {
                    let c: i64 = c
                        .trim()
                        .parse()
                        .map_err(|_| syntax(line, format!("bad coefficient in `{term}`")))?;
                    (c, j.trim())
                }
                None => (1, term),
            };
            if c <= 0 {
                return Err(syntax(line, "rhs coefficients must be positive"));
            }
            let j = parse_index(j, line)?;
            match rhs.iter_mut().find(|(k, _)| *k == j) {
                Some(e) => e.1 += c,
                None => rhs.push((j, c)),
            }
        }
    }
    let mut seen = HashSet::new();
    if lhs.iter().any(|i| !seen.insert(*i)) {
        return Err(syntax(line, "repeated index in relation lhs"));
    }
    if !(2..=5).contains(&lhs.len()) {
        return Err(syntax(line, "relation lhs must have 2 to 5 rays"));
    }
    if rhs.iter().any(|(j, _)| lhs.contains(j)) {
        return Err(syntax(line, "relation lhs and rhs overlap"));
    }
    Ok(PrimitiveRelation { lhs, rhs })
}

fn parse_monomial(tok: &str, line: usize) -> Result<(usize, usize)> {
    let (i, j) = if let Some((i, e)) = tok.split_once('^') {
        if e != "2" {
            return Err(syntax(line, format!("basis monomial `{tok}` must be quadratic")));
        }
        (i, i)
    } else if let Some(p) = tok.split_once('*') {
        p
    } else {
        return Err(syntax(line, format!("bad basis monomial `{tok}`")));
    };
    let (i, j) = (parse_index(i, line)?, parse_index(j, line)?);
    Ok((i.min(j), i.max(j)))
}

struct Block {
    id: String,
    line: usize,
    rays: Option<usize>,
    relations: Vec<(PrimitiveRelation, usize)>,
    basis: Vec<((usize, usize), usize)>,
    annotation: Option<Annotation>,
}

fn finish(b: Block) -> Result<FanPresentation> {
    let rays = b
        .rays
        .ok_or_else(|| syntax(b.line, format!("variety {} lacks a `rays` line", b.id)))?;
    let check = |i: usize| -> Result<()> {
        if i >= rays {
            Err(Error::RayOutOfRange { index: i + 1, rays })
        } else {
            Ok(())
        }
    };
    let mut lhs_seen = HashSet::new();
    for (r, line) in &b.relations {
        for &i in &r.lhs {
            check(i)?;
        }
        for &(j, _) in &r.rhs {
            check(j)?;
        }
        if !lhs_seen.insert(r.lhs_mask()) {
            return Err(syntax(*line, "duplicate primitive collection"));
        }
    }
    for ((i, j), _) in &b.basis {
        check(*i)?;
        check(*j)?;
    }
    Ok(FanPresentation {
        id: b.id,
        rays,
        relations: b.relations.into_iter().map(|(r, _)| r).collect(),
        basis: b.basis.into_iter().map(|(m, _)| m).collect(),
        annotation: b.annotation,
    })
}

/// Parses a catalog of fan presentations. Statements may be separated by
/// newlines or semicolons; `#` starts a comment.
pub fn parse_catalog(text: &str) -> Result<Vec<FanPresentation>> {
    let mut out: Vec<FanPresentation> = Vec::new();
    let mut cur: Option<Block> = None;
    let mut header = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        for stmt in content.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if !header {
                if stmt != HEADER {
                    return Err(syntax(line, format!("missing `{HEADER}` header")));
                }
                header = true;
                continue;
            }
            let (kw, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
            let rest = rest.trim();
            if kw == "variety" {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(syntax(line, "expected `variety <ID>`"));
                }
                if let Some(b) = cur.take() {
                    out.push(finish(b)?);
                }
                if out.iter().any(|p| p.id == rest) {
                    return Err(Error::DuplicateVariety(rest.to_string()));
                }
                cur = Some(Block {
                    id: rest.to_string(),
                    line,
                    rays: None,
                    relations: Vec::new(),
                    basis: Vec::new(),
                    annotation: None,
                });
                continue;
            }
            let b = cur
                .as_mut()
                .ok_or_else(|| syntax(line, format!("`{kw}` outside a variety block")))?;
            match kw {
                "rays" => {
                    let r: usize = rest
                        .parse()
                        .map_err(|_| syntax(line, "expected `rays <count>`"))?;
                    if r < 5 || r > 31 {
                        return Err(syntax(line, "ray count must lie in 5..=31"));
                    }
                    b.rays = Some(r);
                }
                "relation" => b.relations.push((parse_relation(rest, line)?, line)),
                "basis" => {
                    for t in rest.split_whitespace() {
                        b.basis.push((parse_monomial(t, line)?, line));
                    }
                }
                "status" => {
                    let (s, cite) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    let status = match s {
                        "existing" => LiteratureStatus::Existing,
                        "excluded" => LiteratureStatus::Excluded,
                        "open" => LiteratureStatus::Open,
                        _ => return Err(syntax(line, format!("unknown status `{s}`"))),
                    };
                    b.annotation = Some(Annotation { status, citation: cite.trim().to_string() });
                }
                _ => return Err(syntax(line, format!("unknown keyword `{kw}`"))),
            }
        }
    }
    if !header {
        return Err(syntax(1, format!("missing `{HEADER}` header")));
    }
    if let Some(b) = cur.take() {
        out.push(finish(b)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c1_block() {
        let c = parse_catalog(
            "torfano-v1\nvariety C1\nrays 6\nrelation 1 2 3 = 0; relation 4 5 6 = 2*1\n",
        )
        .unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].rays, 6);
        assert_eq!(c[0].relations.len(), 2);
        assert_eq!(c[0].relations[1].rhs, vec![(0, 2)]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_catalog("torfano-v1\nvariety A\nrays 5\nrelation 1 2 =\n"),
            Err(Error::Syntax { line: 4, .. })
        ));
        assert!(matches!(
            parse_catalog("torfano-v1\nvariety A\nrays 5\nvariety A\nrays 5\n"),
            Err(Error::DuplicateVariety(_))
        ));
        assert!(matches!(
            parse_catalog("torfano-v1\nvariety A\nrays 5\nrelation 1 9 = 0\n"),
            Err(Error::RayOutOfRange { index: 9, rays: 5 })
        ));
        assert!(parse_catalog("variety A\n").is_err());
    }

    #[test]
    fn default_catalog_parses() {
        let c = parse_catalog(DEFAULT_CATALOG).unwrap();
        let v4 = c.iter().find(|p| p.id == "V4").unwrap();
        assert_eq!(v4.rays, 10);
        assert_eq!(v4.relations.len(), 25);
        let p4 = c.iter().find(|p| p.id == "P4").unwrap();
        assert_eq!((p4.rays, p4.relations.len()), (5, 1));
    }
}
