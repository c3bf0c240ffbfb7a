//! Linear forms, the double-point quadratic, and a small sparse polynomial type
//! used for printed formulas and substitutions.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficient names `a, b, c, ...` for a basis of length `n`.
pub fn coeff_names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearForm {
    pub coeffs: Vec<i64>,
}

impl LinearForm {
    pub fn zero(n: usize) -> Self {
        LinearForm { coeffs: vec![0; n] }
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[k] = 1;
        f
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, a: &[i64]) -> i64 {
        self.coeffs.iter().zip(a).map(|(c, x)| c * x).sum()
    }

    pub fn neg(&self) -> Self {
        LinearForm { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn to_poly(&self, names: &[String]) -> Poly {
        let mut p = Poly::zero();
        for (c, n) in self.coeffs.iter().zip(names) {
            p = p.add(&Poly::var(n).scale(*c as i128));
        }
        p
    }
}

/// `a -> a^T quad a - lin(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticPolynomial {
    pub quad: Vec<Vec<i64>>,
    pub lin: LinearForm,
}

impl QuadraticPolynomial {
    pub fn eval(&self, a: &[i64]) -> i64 {
        let n = a.len();
        let mut s = 0i64;
        for i in 0..n {
            for j in 0..n {
                s += self.quad[i][j] * a[i] * a[j];
            }
        }
        s - self.lin.eval(a)
    }

    pub fn to_poly(&self, names: &[String]) -> Poly {
        let n = self.lin.len();
        let mut p = self.lin.to_poly(names).scale(-1);
        for i in 0..n {
            for j in 0..n {
                if self.quad[i][j] != 0 {
                    let m = Poly::var(&names[i]).mul(&Poly::var(&names[j]));
                    p = p.add(&m.scale(self.quad[i][j] as i128));
                }
            }
        }
        p
    }
}

type Monomial = Vec<(String, u32)>;

/// Sparse multivariate integer polynomial over named variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, i128>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m: BTreeMap<String, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        *m.entry(v.clone()).or_insert(0) += e;
    }
    m.into_iter().collect()
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: i128) -> Self {
        let mut p = Poly::zero();
        if c != 0 {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(vec![(name.to_string(), 1)], 1);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut t = self.terms.clone();
        for (m, c) in &o.terms {
            let e = t.entry(m.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                t.remove(m);
            }
        }
        Poly { terms: t }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, k: i128) -> Poly {
        if k == 0 {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let mut t = BTreeMap::new();
                t.insert(mono_mul(ma, mb), ca * cb);
                out = out.add(&Poly { terms: t });
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(1), |acc, _| acc.mul(self))
    }

    /// Replaces every occurrence of `name` by `value`.
    pub fn substitute(&self, name: &str, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for (v, e) in m {
                let f = if v == name { value.pow(*e) } else { Poly::var(v).pow(*e) };
                term = term.mul(&f);
            }
            out = out.add(&term);
        }
        out
    }

    /// Replaces every listed variable at once.
    pub fn substitute_all(&self, map: &BTreeMap<String, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for (v, e) in m {
                let f = match map.get(v) {
                    Some(x) => x.pow(*e),
                    None => Poly::var(v).pow(*e),
                };
                term = term.mul(&f);
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval(&self, vals: &BTreeMap<String, i64>) -> Option<i128> {
        let mut s = 0i128;
        for (m, c) in &self.terms {
            let mut t = *c;
            for (v, e) in m {
                t *= (*vals.get(v)? as i128).pow(*e);
            }
            s += t;
        }
        Some(s)
    }

    pub fn variables(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|(n, _)| n.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    /// Content-free comparison: returns `k` with `self == k * other`, if any.
    pub fn ratio_to(&self, other: &Poly) -> Option<(i128, i128)> {
        if self.is_zero() && other.is_zero() {
            return Some((1, 1));
        }
        let (m, c) = other.terms.iter().next()?;
        let s = *self.terms.get(m)?;
        // self = (s / c) other
        if self.scale(*c) == other.scale(s) {
            let g = gcd_i128(s, *c) * c.signum();
            Some((s / g, c / g))
        } else {
            None
        }
    }

    /// Renders terms in degree-reverse-lexicographic order with respect to
    /// `order`; variables absent from `order` sort after it by name.
    pub fn display_with(&self, order: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut vars = order.to_vec();
        for v in self.variables() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let expvec = |m: &Monomial| -> Vec<u32> {
            vars.iter()
                .map(|v| m.iter().find(|(n, _)| n == v).map_or(0, |(_, e)| *e))
                .collect()
        };
        let mut terms: Vec<(&Monomial, &i128)> = self.terms.iter().collect();
        terms.sort_by(|(ma, _), (mb, _)| {
            let (ea, eb) = (expvec(ma), expvec(mb));
            let (da, db): (u32, u32) = (ea.iter().sum(), eb.iter().sum());
            db.cmp(&da).then_with(|| {
                for i in (0..ea.len()).rev() {
                    if ea[i] != eb[i] {
                        return ea[i].cmp(&eb[i]);
                    }
                }
                std::cmp::Ordering::Equal
            })
        });
        let join = if vars.iter().all(|v| v.chars().count() == 1) { "" } else { "*" };
        let mut out = String::new();
        for (i, (m, c)) in terms.iter().enumerate() {
            let c = **c;
            let body: Vec<String> = vars
                .iter()
                .filter_map(|v| {
                    let e = m.iter().find(|(n, _)| n == v)?.1;
                    Some(if e == 1 { v.clone() } else { format!("{v}^{e}") })
                })
                .collect();
            let body = body.join(join);
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let mag = c.abs();
            out.push_str(sign);
            if body.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if mag != 1 {
                    out.push_str(&mag.to_string());
                }
                out.push_str(&body);
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Poly> {
        let toks = tokenize(text)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(parse_err(format!("unexpected trailing input in `{text}`")));
        }
        Ok(e)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i128(b, a % b)
    }
}

fn parse_err(msg: String) -> Error {
    Error::Syntax { line: 0, msg }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i128),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| parse_err(format!("bad number {t}")))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(parse_err(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op('*')) = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(self.unary()?.scale(-1));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(e)) if e <= 16 => {
                    self.pos += 1;
                    return Ok(base.pow(e as u32));
                }
                _ => return Err(parse_err("exponent must be a small integer".into())),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Poly::constant(n))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(Poly::var(&v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(parse_err("missing `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(parse_err(format!("unexpected token {other:?}"))),
        }
    }
}

/// Simultaneous substitutions `var = expr`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Substitution {
    pub steps: Vec<(String, Poly)>,
}

impl Substitution {
    pub fn parse(text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (l, r) = part
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `var = expr` in `{part}`")))?;
            let l = l.trim();
            if l.is_empty() || !l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(parse_err(format!("bad substitution target `{l}`")));
            }
            steps.push((l.to_string(), Poly::parse(r)?));
        }
        Ok(Substitution { steps })
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        p.substitute_all(&self.steps.iter().cloned().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p = Poly::parse("4*a^2+4*a*b+b^2+2*a*c-19*a-11*b-3*c").unwrap();
        assert_eq!(p.display_with(&coeff_names(3)), "4a^2+4ab+b^2+2ac-19a-11b-3c");
    }

    #[test]
    fn products_expand() {
        let p = Poly::parse("(2*a-7)*(b+c)").unwrap();
        let q = Poly::parse("2*a*b+2*a*c-7*b-7*c").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn substitution() {
        let p = Poly::parse("a^2 - 10*a").unwrap();
        let s = Substitution::parse("a = n + 1").unwrap();
        assert_eq!(s.apply(&p), Poly::parse("n^2 - 8*n - 9").unwrap());
    }

    #[test]
    fn quadratic_to_poly() {
        let q = QuadraticPolynomial {
            quad: vec![vec![1]],
            lin: LinearForm { coeffs: vec![10] },
        };
        assert_eq!(q.to_poly(&coeff_names(1)).display_with(&coeff_names(1)), "a^2-10a");
        assert_eq!(q.eval(&[7]), -21);
    }

    #[test]
    fn ratio() {
        let p = Poly::parse("4*b*f - 8*b").unwrap();
        let q = Poly::parse("b*f - 2*b").unwrap();
        assert_eq!(p.ratio_to(&q), Some((4, 1)));
        assert_eq!(q.ratio_to(&Poly::parse("b").unwrap()), None);
    }
}
