//! Parametrized solution families and their closed-form characterizations.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::chow::Analysis;
use crate::error::{Error, Result};
use crate::linalg::{rank, scaled_inverse};
use crate::poly::{coeff_names, Poly, Substitution};
use crate::screen::CandidateClass;
use crate::search::config::FindingKind;
use crate::search::enumerate::{Counters, Inequality, Quadric, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Ge,
    Gt,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Condition {
    pub text: String,
    pub form: Poly,
    pub cmp: Cmp,
}

impl Condition {
    fn parse(text: &str) -> Condition {
        let (expr, cmp) = if let Some((e, _)) = text.split_once(">=") {
            (e, Cmp::Ge)
        } else if let Some((e, _)) = text.split_once("==") {
            (e, Cmp::Eq)
        } else if let Some((e, _)) = text.split_once('>') {
            (e, Cmp::Gt)
        } else {
            panic!("bad condition `{text}`")
        };
        Condition { text: text.to_string(), form: Poly::parse(expr).expect("condition parses"), cmp }
    }

    pub fn holds(&self, vals: &BTreeMap<String, i64>) -> bool {
        let v = self.form.eval(vals).expect("condition variables bound");
        match self.cmp {
            Cmp::Ge => v >= 0,
            Cmp::Gt => v > 0,
            Cmp::Eq => v == 0,
        }
    }
}

/// A family of candidate classes given by an affine map from a parameter
/// domain, cut out by a residual equation and sign conditions.
#[derive(Clone, Debug)]
pub struct Family {
    pub id: String,
    /// Coordinates of the affine domain.
    pub vars: Vec<String>,
    /// Free parameters; the remaining domain variable, if any, is solved
    /// from the residual.
    pub params: Vec<String>,
    pub map: Vec<Poly>,
    pub residual: Poly,
    /// Engine residual at the mapped point equals `kappa` times `residual`.
    pub kappa: i64,
    pub conditions: Vec<Condition>,
    pub leaf: Option<fn(&[i64]) -> bool>,
    pub flag: Option<(FindingKind, String)>,
    /// True for families that describe a finite list.
    pub finite: bool,
}

struct Spec {
    id: &'static str,
    vars: &'static str,
    params: &'static str,
    map: &'static [&'static str],
    residual: String,
    residual_where: Option<&'static str>,
    kappa: i64,
    conditions: &'static [&'static str],
    leaf: Option<fn(&[i64]) -> bool>,
    flag: Option<(FindingKind, &'static str)>,
    finite: bool,
}

impl Spec {
    fn new(id: &'static str, vars: &'static str, map: &'static [&'static str], residual: &str) -> Spec {
        Spec {
            id,
            vars,
            params: vars,
            map,
            residual: residual.to_string(),
            residual_where: None,
            kappa: 1,
            conditions: &[],
            leaf: None,
            flag: None,
            finite: true,
        }
    }

    fn build(self) -> Family {
        let names = |s: &str| s.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        let mut residual = Poly::parse(&self.residual).expect("residual parses");
        if let Some(w) = self.residual_where {
            residual = Substitution::parse(w).expect("substitution parses").apply(&residual);
        }
        Family {
            id: self.id.to_string(),
            vars: names(self.vars),
            params: names(self.params),
            map: self.map.iter().map(|e| Poly::parse(e).expect("map parses")).collect(),
            residual,
            kappa: self.kappa,
            conditions: self.conditions.iter().map(|c| Condition::parse(c)).collect(),
            leaf: self.leaf,
            flag: self.flag.map(|(k, l)| (k, l.to_string())),
            finite: self.finite,
        }
    }
}

/// Rows and columns of the V4 matrix `M` are the divisors 1, 2, 3, 4, 8.
const V4_EDGES: [(usize, usize, &str); 10] = [
    (0, 1, "q"),
    (0, 2, "u"),
    (0, 3, "x"),
    (0, 4, "z"),
    (1, 2, "r"),
    (1, 3, "v"),
    (1, 4, "y"),
    (2, 3, "s"),
    (2, 4, "w"),
    (3, 4, "t"),
];

fn v4_residual() -> String {
    let mut pairs = Vec::new();
    for (k, e) in V4_EDGES.iter().enumerate() {
        for f in &V4_EDGES[k + 1..] {
            if e.0 != f.0 && e.0 != f.1 && e.1 != f.0 && e.1 != f.1 {
                pairs.push(format!("{}*{}", e.2, f.2));
            }
        }
    }
    let sum: Vec<&str> = V4_EDGES.iter().map(|e| e.2).collect();
    format!("2*({}) - 4*({})", pairs.join("+"), sum.join("+"))
}

/// Domain order q r s t u v w x y z.
fn v4_matrix(v: &[i64]) -> Vec<Vec<i64>> {
    let idx = |n: &str| "qrstuvwxyz".find(n).unwrap();
    let mut m = vec![vec![0i64; 5]; 5];
    for (i, j, n) in V4_EDGES {
        m[i][j] = v[idx(n)];
        m[j][i] = v[idx(n)];
    }
    m
}

fn v4_leaf(v: &[i64]) -> bool {
    let m = v4_matrix(v);
    m.iter().all(|r| r.iter().any(|&x| x != 0)) && rank(&m) <= 4
}

fn build_all() -> Vec<Family> {
    let mut out = Vec::new();
    let mut s = Spec::new("D11", "b c d", &["0", "b", "c", "d"], "b^2+2*b*c-10*b-7*c-3*d");
    s.params = "b c";
    s.conditions = &["d-b-c >= 0"];
    s.finite = false;
    out.push(s);
    let mut s = Spec::new("G3", "b c e", &["0", "b", "c", "0", "e"], "2*b*c+c^2-6*b-11*c-3*e");
    s.params = "b c";
    s.conditions = &["b > 0", "c > 0", "e >= 0"];
    s.finite = false;
    out.push(s);
    let mut s = Spec::new("G5", "a d x", &["a", "d+x", "0", "d", "x-a"], "2*d*x+d^2-4*x-9*d-3*a");
    s.params = "d x";
    s.conditions = &["d > 0", "x > 0", "a-2*x >= 0"];
    s.finite = false;
    out.push(s);
    let mut s = Spec::new("L11", "b d f", &["b", "b", "0", "d", "f", "f"], "b*f-2*b-2*f-d");
    s.params = "b f";
    s.kappa = 4;
    s.conditions = &["b > 0", "f > 0", "d >= 0"];
    s.finite = false;
    out.push(s);
    let mut s = Spec::new(
        "Z2",
        "w x y z",
        &["w+2*z", "x+y+z", "0", "-y", "x+y", "0", "w+x+z", "-w-z"],
        "x^2+2*x*y+2*y*z+2*z*x-9*x-4*y-10*z-3*w",
    );
    s.conditions = &["x > 0", "y > 0", "z > 0", "w >= 0", "w+z-y >= 0", "w+2*z-2*y >= 0"];
    s.finite = false;
    out.push(s);
    let mut s = Spec::new(
        "W",
        "h t w x y",
        &[
            "h+2*t+x+w",
            "2*t+w+x+y",
            "h+x+w",
            "t",
            "t",
            "-t+w+x+y",
            "-h-t-w",
            "h",
            "h+t+w-y",
            "-h-t-x",
            "h+t+x-y",
            "-h+2*y",
        ],
        "t^2+(2*w+2*y+2*x-9)*t+2*y*(w+x)+2*w*x-7*(w+x)-4*y-3*h",
    );
    s.params = "w x y t h";
    s.conditions = &[
        "w > 0",
        "x > 0",
        "y > 0",
        "t+w > 0",
        "t+x > 0",
        "t+y > 0",
        "h >= 0",
        "h+w-x >= 0",
        "h-w+x >= 0",
        "h+x-y >= 0",
        "h-x+y >= 0",
        "h+y-w >= 0",
        "h-y+w >= 0",
        "h+w+x-2*y >= 0",
    ];
    s.finite = false;
    out.push(s);
    let mut s = Spec::new(
        "V4",
        "q r s t u v w x y z",
        &[
            "s+t+w", "t+v+y", "r-t", "s+t+v", "r+w+y", "t+x+z", "-t+u", "s+t+x", "u+w+z", "q-t", "t+v+x",
            "q+y+z", "t", "s+t+v+x", "q+r+u", "w+y+z",
        ],
        &v4_residual(),
    );
    s.conditions = &[
        "q >= 0", "r >= 0", "s >= 0", "t >= 0", "u >= 0", "v >= 0", "w >= 0", "x >= 0", "y >= 0", "z >= 0",
    ];
    s.leaf = Some(v4_leaf);
    s.finite = false;
    out.push(s);
    out.push(Spec::new(
        "Z1",
        "w x y z",
        &["w+x+y+z", "3*w+2*x+2*y+z", "3*w+x+y", "3*w+2*x", "2*y+z", "w+x", "2*y+2*z", "-y-z"],
        "(2*(x+y)+6*w-6)*z+(3*w-17)*w+(6*w-11)*(x+y)+(x+y)^2+4*x*y",
    ));
    out.push(Spec::new(
        "I9",
        "f x y",
        &["-2*f+2*y+2*x", "-2*f+2*y", "2*f", "2*f-2*y-x", "f-y", "f"],
        "-2*f*y+2*y*x+y^2-2*f*x-5*x+4*f-7*y",
    ));
    out.push(Spec::new(
        "Q16",
        "x y d",
        &["0", "x-d", "y+x-d", "d", "x-d", "y+x-d", "d", "0"],
        "(x-6)*x+(2*x-4)*(-d)+(2*x-4)*y+2*y*(-d)",
    ));
    out.push(Spec::new("C3", "a x c", &["a", "x-a", "c"], "2*a*x+x^2+2*a*c-6*a-11*x-3*c"));
    out.push(Spec::new(
        "D17",
        "a c x y",
        &["a", "x+c", "c", "y+a"],
        "(3*a-15)*a+(4*a-14)*c+(2*a-7)*x+(2*a-3)*y+2*c^2+2*c*x",
    ));
    out.push(Spec::new("G4", "x y e", &["y-e", "x-y+e", "0", "x-y-e", "e"], "-2*y^2+2*y*x-2*e*x+x^2+6*e-11*x"));
    out.push(Spec::new(
        "L13",
        "b c x f",
        &["b+c", "b", "c", "x-f", "x+2*f", "f"],
        "2*b*x+(f-4)*b+c*x+(2*f-4)*c+x^2+(f-6)*x+(f-6)*f",
    ));
    out.push(Spec::new("D18", "a b", &["a", "b", "b", "2*a"], "6*a*b-3*b^2-14*a-2*b"));
    let mut s = Spec::new(
        "U8",
        "a x y",
        &["a", "a", "a+x", "a+x", "y+x", "y+x", "0", "y", "y", "0"],
        "z^2+(2*a+2*x+2*y-6)*z+(2*a*x+2*x*y+2*y*a-4*(a+x+y))",
    );
    s.residual_where = Some("z = a - y");
    s.flag = Some((FindingKind::Adjudication, "U8-list"));
    out.push(s);
    let kappa: BTreeMap<&str, i64> = KAPPA.iter().copied().collect();
    out.into_iter()
        .map(|mut s| {
            if let Some(&k) = kappa.get(s.id) {
                s.kappa = k;
            }
            s.build()
        })
        .collect()
}

/// Scale factors between the engine residual and the printed one.
const KAPPA: &[(&str, i64)] = &[("I9", 2), ("Q16", 2), ("L13", 2)];

pub fn families() -> &'static [Family] {
    static ALL: OnceLock<Vec<Family>> = OnceLock::new();
    ALL.get_or_init(build_all)
}

pub fn family(id: &str) -> Option<&'static Family> {
    families().iter().find(|f| f.id == id)
}

fn lookup(id: &str) -> Result<&'static Family> {
    family(id).ok_or_else(|| Error::Family { case: id.to_string(), msg: "no such family".into() })
}

fn fam_err(f: &Family, msg: impl Into<String>) -> Error {
    Error::Family { case: f.id.clone(), msg: msg.into() }
}

/// `(linear part, constant)` of an affine polynomial in `vars`.
fn affine(p: &Poly, vars: &[String]) -> Option<(Vec<i64>, i64)> {
    if p.degree() > 1 {
        return None;
    }
    let mut vals: BTreeMap<String, i64> = vars.iter().map(|v| (v.clone(), 0)).collect();
    let c = p.eval(&vals)?;
    let mut lin = Vec::with_capacity(vars.len());
    for v in vars {
        vals.insert(v.clone(), 1);
        lin.push((p.eval(&vals)? - c) as i64);
        vals.insert(v.clone(), 0);
    }
    Some((lin, c as i64))
}

/// Coefficients of a polynomial of degree at most two, as a quadric scaled by 2.
fn quadric(p: &Poly, vars: &[String]) -> Option<Quadric> {
    if p.degree() > 2 {
        return None;
    }
    let n = vars.len();
    let at = |pts: &[(usize, i64)]| -> Option<i128> {
        let mut vals: BTreeMap<String, i64> = vars.iter().map(|v| (v.clone(), 0)).collect();
        for &(i, x) in pts {
            *vals.get_mut(&vars[i]).unwrap() += x;
        }
        p.eval(&vals)
    };
    let c = at(&[])?;
    let mut q = Quadric::zero(n);
    q.constant = 2 * c;
    for i in 0..n {
        let (p1, p2) = (at(&[(i, 1)])?, at(&[(i, 2)])?);
        let qii = (p2 - 2 * p1 + c) / 2;
        q.quad[i][i] = 2 * qii;
        q.lin[i] = 2 * (p1 - c - qii);
        for j in i + 1..n {
            let qij = at(&[(i, 1), (j, 1)])? - p1 - at(&[(j, 1)])? + c;
            q.quad[i][j] = qij;
            q.quad[j][i] = qij;
        }
    }
    Some(q)
}

impl Family {
    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn assignment(&self, vals: &[i64]) -> BTreeMap<String, i64> {
        self.vars.iter().cloned().zip(vals.iter().copied()).collect()
    }

    /// The coefficient tuple of a domain point.
    pub fn apply(&self, vals: &[i64]) -> Vec<i64> {
        let a = self.assignment(vals);
        self.map.iter().map(|p| p.eval(&a).expect("map variables bound") as i64).collect()
    }

    /// Coefficient names mapped to their expressions in the domain.
    pub fn substitution(&self) -> BTreeMap<String, Poly> {
        coeff_names(self.dim()).into_iter().zip(self.map.iter().cloned()).collect()
    }

    pub fn residual_at(&self, vals: &[i64]) -> i128 {
        self.residual.eval(&self.assignment(vals)).expect("residual variables bound")
    }

    /// Name of the first violated condition.
    pub fn violated(&self, vals: &[i64]) -> Option<String> {
        let a = self.assignment(vals);
        if let Some(c) = self.conditions.iter().find(|c| !c.holds(&a)) {
            return Some(c.text.clone());
        }
        match self.leaf {
            Some(f) if !f(vals) => Some("structural condition".into()),
            _ => None,
        }
    }

    fn linear_map(&self) -> (Vec<Vec<i64>>, Vec<i64>) {
        let mut m = Vec::new();
        let mut c = Vec::new();
        for p in &self.map {
            let (l, k) = affine(p, &self.vars).expect("family maps are affine");
            m.push(l);
            c.push(k);
        }
        (m, c)
    }

    /// Domain point mapping to `cand`, if one exists.
    pub fn preimage(&self, cand: &[i64]) -> Option<Vec<i64>> {
        if cand.len() != self.dim() {
            return None;
        }
        let (m, c) = self.linear_map();
        let (rows, adj, d) = self.left_inverse(&m)?;
        let v = self.vars.len();
        let mut x = Vec::with_capacity(v);
        for i in 0..v {
            let s: i128 = (0..v).map(|k| adj[i][k] as i128 * (cand[rows[k]] - c[rows[k]]) as i128).sum();
            if s % d as i128 != 0 {
                return None;
            }
            x.push((s / d as i128) as i64);
        }
        (self.apply(&x) == cand).then_some(x)
    }

    fn left_inverse(&self, m: &[Vec<i64>]) -> Option<(Vec<usize>, Vec<Vec<i64>>, i64)> {
        let v = self.vars.len();
        let mut rows: Vec<usize> = Vec::new();
        for i in 0..m.len() {
            let mut t: Vec<Vec<i64>> = rows.iter().map(|&r| m[r].clone()).collect();
            t.push(m[i].clone());
            if rank(&t) == t.len() {
                rows.push(i);
            }
            if rows.len() == v {
                break;
            }
        }
        if rows.len() < v {
            return None;
        }
        let sub: Vec<Vec<i64>> = rows.iter().map(|&r| m[r].clone()).collect();
        let (adj, d) = scaled_inverse(&sub).ok()?;
        Some((rows, adj, d))
    }

    /// Domain points whose image lies in `bounds`, satisfying the residual
    /// equation and every condition.
    pub fn points_in_box(&self, bounds: &[(i64, i64)]) -> Result<(Vec<Vec<i64>>, Counters)> {
        let (m, c) = self.linear_map();
        let (rows, adj, d) = self.left_inverse(&m).ok_or_else(|| fam_err(self, "map is not injective"))?;
        let v = self.vars.len();
        let mut lo = vec![0i64; v];
        let mut hi = vec![0i64; v];
        for i in 0..v {
            let (mut l, mut h) = (0i128, 0i128);
            for k in 0..v {
                let r = rows[k];
                let (x, y) = (
                    adj[i][k] as i128 * (bounds[r].0 - c[r]) as i128,
                    adj[i][k] as i128 * (bounds[r].1 - c[r]) as i128,
                );
                l += x.min(y);
                h += x.max(y);
            }
            lo[i] = l.div_euclid(d as i128) as i64;
            hi[i] = -((-h).div_euclid(d as i128)) as i64;
        }
        let mut ineqs = Vec::new();
        for (k, row) in m.iter().enumerate() {
            let w: Vec<i128> = row.iter().map(|&x| x as i128).collect();
            ineqs.push(Inequality { w: w.clone(), b: (bounds[k].0 - c[k]) as i128 });
            ineqs.push(Inequality { w: w.iter().map(|x| -x).collect(), b: (c[k] - bounds[k].1) as i128 });
        }
        for cond in &self.conditions {
            let (l, k) = affine(&cond.form, &self.vars).ok_or_else(|| fam_err(self, "nonlinear condition"))?;
            let w: Vec<i128> = l.iter().map(|&x| x as i128).collect();
            let b = -(k as i128);
            match cond.cmp {
                Cmp::Ge => ineqs.push(Inequality { w, b }),
                Cmp::Gt => ineqs.push(Inequality { w, b: b + 1 }),
                Cmp::Eq => {
                    ineqs.push(Inequality { w: w.iter().map(|x| -x).collect(), b: -b });
                    ineqs.push(Inequality { w, b });
                }
            }
        }
        let main = quadric(&self.residual, &self.vars).ok_or_else(|| fam_err(self, "residual is not quadratic"))?;
        let sys = System { lo, hi, ineqs, main, side: Vec::new() };
        let (pts, counters) = sys.solve(|x: &[i64], c: &mut Counters| {
            c.leaves += 1;
            if self.violated(x).is_some() || !crate_in_box(&self.apply(x), bounds) {
                c.tag("condition");
                return None;
            }
            Some(x.to_vec())
        });
        let mut pts = pts;
        pts.sort();
        Ok((pts, counters))
    }
}

fn crate_in_box(t: &[i64], bounds: &[(i64, i64)]) -> bool {
    t.iter().zip(bounds).all(|(x, (l, h))| l <= x && x <= h)
}

/// Expands public parameters to a candidate, solving the remaining domain
/// variable from the residual equation.
pub fn family_expand(id: &str, params: &[i64]) -> Result<CandidateClass> {
    let f = lookup(id)?;
    Ok(CandidateClass::new(f.apply(&expand_domain(f, params)?)))
}

pub fn expand_domain(f: &Family, params: &[i64]) -> Result<Vec<i64>> {
    if params.len() != f.params.len() {
        return Err(fam_err(f, format!("expected {} parameters, got {}", f.params.len(), params.len())));
    }
    let given: BTreeMap<String, i64> = f.params.iter().cloned().zip(params.iter().copied()).collect();
    let free: Vec<&String> = f.vars.iter().filter(|v| !given.contains_key(*v)).collect();
    let mut vals = given.clone();
    match free.as_slice() {
        [] => {}
        [x] => {
            let known: BTreeMap<String, Poly> = given.iter().map(|(k, v)| (k.clone(), Poly::constant(*v as i128))).collect();
            let r = f.residual.substitute_all(&known);
            let (lin, c) = affine(&r, &[(*x).clone()]).ok_or_else(|| fam_err(f, "residual is not linear in the solved variable"))?;
            if lin[0] == 0 || c % lin[0] != 0 {
                return Err(fam_err(f, format!("{x} = {}/{} is not an integer", -c, lin[0])));
            }
            vals.insert((*x).clone(), -c / lin[0]);
        }
        _ => return Err(fam_err(f, "more than one unsolved variable")),
    }
    let dom: Vec<i64> = f.vars.iter().map(|v| vals[v]).collect();
    if f.residual_at(&dom) != 0 {
        return Err(fam_err(f, "parameters do not satisfy the residual equation"));
    }
    if let Some(c) = f.violated(&dom) {
        return Err(fam_err(f, format!("condition `{c}` violated")));
    }
    Ok(dom)
}

/// Domain point of a family member, or `None`.
pub fn family_membership(id: &str, candidate: &[i64]) -> Option<Vec<i64>> {
    let f = family(id)?;
    let x = f.preimage(candidate)?;
    (f.residual_at(&x) == 0 && f.violated(&x).is_none()).then_some(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityMismatch {
    pub point: Vec<i64>,
    pub engine: i128,
    pub printed: i128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub samples: usize,
    pub mismatches: Vec<IdentityMismatch>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Deterministic sample points in `[-4, 4]^n`.
pub fn grid(n: usize, samples: usize) -> Vec<Vec<i64>> {
    const BASE: u64 = 9;
    let total = BASE.saturating_pow(n as u32);
    let count = (samples as u64).min(total);
    let stride = (0..)
        .map(|k| 7919u64 + 2 * k)
        .find(|s| num_integer::Integer::gcd(s, &BASE) == 1)
        .unwrap();
    (0..count)
        .map(|k| {
            let mut idx = (k * stride) % total;
            (0..n)
                .map(|_| {
                    let d = (idx % BASE) as i64 - 4;
                    idx /= BASE;
                    d
                })
                .collect()
        })
        .collect()
}

/// Compares the engine double-point residual at mapped domain points with
/// `kappa` times the printed residual.
pub fn family_residual_identity(id: &str, analysis: &Analysis, samples: usize) -> Result<IdentityReport> {
    let f = lookup(id)?;
    if analysis.dim() != f.dim() {
        return Err(fam_err(f, format!("map has {} coefficients, basis has {}", f.dim(), analysis.dim())));
    }
    let pts = grid(f.vars.len(), samples);
    let mut mismatches = Vec::new();
    for p in &pts {
        let engine = analysis.double_point.eval(&f.apply(p)) as i128;
        let printed = f.residual_at(p);
        if engine != f.kappa as i128 * printed {
            mismatches.push(IdentityMismatch { point: p.clone(), engine, printed });
        }
    }
    Ok(IdentityReport { id: id.to_string(), samples: pts.len(), mismatches })
}

/// The engine residual as a polynomial in the domain variables.
pub fn engine_residual(f: &Family, analysis: &Analysis) -> Poly {
    let names = coeff_names(analysis.dim());
    analysis.double_point.to_poly(&names).substitute_all(&f.substitution())
}
