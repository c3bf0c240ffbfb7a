//! The constraint battery applied to a single candidate class.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::inertia;
use crate::poly::{LinearForm, QuadraticPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CandidateClass {
    pub coeffs: Vec<i64>,
}

impl CandidateClass {
    pub fn new(coeffs: Vec<i64>) -> Self {
        CandidateClass { coeffs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvaluatedMatrix {
    pub entries: Vec<Vec<i64>>,
}

impl EvaluatedMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        self.entries.iter().all(|r| r.len() == n)
            && (0..n).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }
}

/// Rules in pruning order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    Side,
    Ii,
    Dp,
    I,
    Iii,
    Iv,
    V,
    Vi,
}

impl Rule {
    pub const ALL: [Rule; 8] =
        [Rule::Side, Rule::Ii, Rule::Dp, Rule::I, Rule::Iii, Rule::Iv, Rule::V, Rule::Vi];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Side => "side",
            Rule::Ii => "ii",
            Rule::Dp => "dp",
            Rule::I => "i",
            Rule::Iii => "iii",
            Rule::Iv => "iv",
            Rule::V => "v",
            Rule::Vi => "vi",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a rule failed. Matrix indices are one-based when printed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    Entry(usize, usize),
    Row(usize),
    Minor { rows: (usize, usize), cols: (usize, usize) },
    Triple(usize, usize, usize),
    Residual(i64),
    Signature { pos: usize, neg: usize, rank: usize },
    Constraint(usize),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Entry(i, j) => write!(f, "entry ({},{})", i + 1, j + 1),
            Witness::Row(i) => write!(f, "row {}", i + 1),
            Witness::Minor { rows, cols } => write!(
                f,
                "minor rows ({},{}) cols ({},{})",
                rows.0 + 1,
                rows.1 + 1,
                cols.0 + 1,
                cols.1 + 1
            ),
            Witness::Triple(i, j, k) => write!(f, "i={} j={} k={}", i + 1, j + 1, k + 1),
            Witness::Residual(r) => write!(f, "residual {r}"),
            Witness::Signature { pos, neg, rank } => write!(f, "signature ({pos},{neg}) rank {rank}"),
            Witness::Constraint(k) => write!(f, "constraint {}", k + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub rule: Rule,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleReport {
    pub verdicts: Vec<Verdict>,
    /// Rank of the evaluated matrix.
    pub rank: usize,
}

impl RuleReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(Verdict::pass)
    }

    pub fn failing(&self) -> Vec<Rule> {
        self.verdicts.iter().filter(|v| !v.pass()).map(|v| v.rule).collect()
    }

    pub fn verdict(&self, rule: Rule) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.rule == rule)
    }
}

impl fmt::Display for RuleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.verdicts {
            match &v.witness {
                None if v.rule == Rule::I => writeln!(f, "rule {}: pass (e={})", v.rule, self.rank)?,
                None => writeln!(f, "rule {}: pass", v.rule)?,
                Some(w) => writeln!(f, "rule {}: fail at {w}", v.rule)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Target {
    Entry(usize, usize),
    Coeff(usize),
    Form(LinearForm),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Allowed {
    AtLeast(i64),
    ZeroOrAtLeast(i64),
}

impl Allowed {
    pub fn contains(self, v: i64) -> bool {
        match self {
            Allowed::AtLeast(n) => v >= n,
            Allowed::ZeroOrAtLeast(n) => v == 0 || v >= n,
        }
    }

    pub fn lower(self) -> i64 {
        match self {
            Allowed::AtLeast(n) | Allowed::ZeroOrAtLeast(n) => n,
        }
    }
}

/// A numerical condition imported from a geometric argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideConstraint {
    pub target: Target,
    pub allowed: Allowed,
    pub provenance: String,
    /// Marks a hypothesis region rather than a proven restriction.
    pub region: bool,
}

impl SideConstraint {
    pub fn new(target: Target, allowed: Allowed, provenance: &str) -> Result<Self> {
        if allowed.lower() < 1 {
            return Err(Error::InvalidFan(format!("side constraint bound {} < 1", allowed.lower())));
        }
        Ok(SideConstraint { target, allowed, provenance: provenance.to_string(), region: false })
    }

    pub fn value(&self, candidate: &[i64], matrix: &EvaluatedMatrix) -> i64 {
        match &self.target {
            Target::Entry(i, j) => matrix.get(*i, *j),
            Target::Coeff(k) => candidate[*k],
            Target::Form(f) => f.eval(candidate),
        }
    }

    /// The target as a linear form in the coefficients.
    pub fn form(&self, lambda: &[Vec<LinearForm>], n: usize) -> LinearForm {
        match &self.target {
            Target::Entry(i, j) => lambda[*i][*j].clone(),
            Target::Coeff(k) => LinearForm::unit(n, *k),
            Target::Form(f) => f.clone(),
        }
    }
}

pub fn evaluate_lambda(lambda: &[Vec<LinearForm>], candidate: &[i64]) -> Result<EvaluatedMatrix> {
    let mut entries = Vec::with_capacity(lambda.len());
    for row in lambda {
        let mut r = Vec::with_capacity(row.len());
        for f in row {
            if f.len() != candidate.len() {
                return Err(Error::Dimension { expected: f.len(), found: candidate.len() });
            }
            r.push(f.eval(candidate));
        }
        entries.push(r);
    }
    Ok(EvaluatedMatrix { entries })
}

/// Rule i. Returns the rank and a witness on failure.
pub fn check_rank_signature(m: &EvaluatedMatrix) -> Result<(usize, Option<Witness>)> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let (pos, neg, zero) = inertia(&m.entries);
    let rank = m.dim() - zero;
    let ok = (1..=4).contains(&rank) && pos == 1 && neg + 1 == rank;
    Ok((rank, (!ok).then_some(Witness::Signature { pos, neg, rank })))
}

pub fn rule_ii(m: &EvaluatedMatrix) -> Option<Witness> {
    let n = m.dim();
    for i in 0..n {
        if m.get(i, i) % 2 != 0 {
            return Some(Witness::Entry(i, i));
        }
        for j in 0..n {
            if m.get(i, j) < 0 {
                return Some(Witness::Entry(i, j));
            }
        }
    }
    None
}

pub fn rule_iii(m: &EvaluatedMatrix) -> Option<Witness> {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j) == 0 && (m.get(i, i) != 0 || m.get(j, j) != 0) {
                return Some(Witness::Entry(i, j));
            }
        }
    }
    None
}

pub fn rule_iv(m: &EvaluatedMatrix) -> Option<Witness> {
    (0..m.dim()).find(|&i| m.entries[i].iter().all(|&x| x <= 0)).map(Witness::Row)
}

pub fn rule_v(m: &EvaluatedMatrix) -> Option<Witness> {
    let n = m.dim();
    for i in 0..n {
        for j in i + 1..n {
            if m.get(i, j) != 0 {
                continue;
            }
            for k in 0..n {
                for l in k + 1..n {
                    if m.get(i, k) * m.get(j, l) != m.get(i, l) * m.get(j, k) {
                        return Some(Witness::Minor { rows: (i, j), cols: (k, l) });
                    }
                }
            }
        }
    }
    None
}

pub fn rule_vi(m: &EvaluatedMatrix) -> Option<Witness> {
    let n = m.dim();
    for i in 0..n {
        if m.get(i, i) != 0 {
            continue;
        }
        for j in 0..n {
            if j == i || m.get(i, j) != 1 {
                continue;
            }
            for k in 0..n {
                if 2 * m.get(j, k) < m.get(j, j) * m.get(i, k) {
                    return Some(Witness::Triple(i, j, k));
                }
            }
        }
    }
    None
}

/// Rules ii to vi.
pub fn check_lemma11(m: &EvaluatedMatrix) -> RuleReport {
    let verdicts = vec![
        Verdict { rule: Rule::Ii, witness: rule_ii(m) },
        Verdict { rule: Rule::Iii, witness: rule_iii(m) },
        Verdict { rule: Rule::Iv, witness: rule_iv(m) },
        Verdict { rule: Rule::V, witness: rule_v(m) },
        Verdict { rule: Rule::Vi, witness: rule_vi(m) },
    ];
    RuleReport { verdicts, rank: 0 }
}

pub fn check_double_point(form: &QuadraticPolynomial, candidate: &[i64]) -> Result<i64> {
    if form.lin.len() != candidate.len() {
        return Err(Error::Dimension { expected: form.lin.len(), found: candidate.len() });
    }
    Ok(form.eval(candidate))
}

pub fn check_side_constraints(
    constraints: &[SideConstraint],
    candidate: &[i64],
    matrix: &EvaluatedMatrix,
) -> Option<Witness> {
    constraints
        .iter()
        .position(|c| !c.allowed.contains(c.value(candidate, matrix)))
        .map(Witness::Constraint)
}

/// Everything needed to screen candidates of one case.
#[derive(Clone, Debug)]
pub struct Battery {
    pub lambda: Vec<Vec<LinearForm>>,
    pub double_point: QuadraticPolynomial,
    pub side: Vec<SideConstraint>,
}

impl Battery {
    pub fn dim(&self) -> usize {
        self.double_point.lin.len()
    }

    pub fn evaluate(&self, candidate: &[i64]) -> EvaluatedMatrix {
        EvaluatedMatrix {
            entries: self
                .lambda
                .iter()
                .map(|row| row.iter().map(|f| f.eval(candidate)).collect())
                .collect(),
        }
    }

    /// First failing rule in pruning order.
    pub fn first_failure(&self, candidate: &[i64]) -> Option<Rule> {
        let m = self.evaluate(candidate);
        if check_side_constraints(&self.side, candidate, &m).is_some() {
            return Some(Rule::Side);
        }
        if rule_ii(&m).is_some() {
            return Some(Rule::Ii);
        }
        if self.double_point.eval(candidate) != 0 {
            return Some(Rule::Dp);
        }
        let (_, w) = check_rank_signature(&m).expect("lambda is symmetric");
        if w.is_some() {
            return Some(Rule::I);
        }
        if rule_iii(&m).is_some() {
            return Some(Rule::Iii);
        }
        if rule_iv(&m).is_some() {
            return Some(Rule::Iv);
        }
        if rule_v(&m).is_some() {
            return Some(Rule::V);
        }
        if rule_vi(&m).is_some() {
            return Some(Rule::Vi);
        }
        None
    }

    pub fn report(&self, candidate: &[i64]) -> Result<RuleReport> {
        if candidate.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: candidate.len() });
        }
        let m = self.evaluate(candidate);
        let (rank, wi) = check_rank_signature(&m)?;
        let residual = self.double_point.eval(candidate);
        let lemma = check_lemma11(&m);
        let mut verdicts = vec![
            Verdict { rule: Rule::Side, witness: check_side_constraints(&self.side, candidate, &m) },
            lemma.verdicts[0].clone(),
            Verdict { rule: Rule::Dp, witness: (residual != 0).then_some(Witness::Residual(residual)) },
            Verdict { rule: Rule::I, witness: wi },
        ];
        verdicts.extend(lemma.verdicts[1..].iter().cloned());
        Ok(RuleReport { verdicts, rank })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> EvaluatedMatrix {
        EvaluatedMatrix { entries: rows.iter().map(|r| r.to_vec()).collect() }
    }

    #[test]
    fn signature_examples() {
        let d = m(&[&[2, 0, 0, 0], &[0, -2, 0, 0], &[0, 0, -2, 0], &[0, 0, 0, 0]]);
        assert_eq!(check_rank_signature(&d).unwrap(), (3, None));
        let (_, w) = check_rank_signature(&m(&[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!(w, Some(Witness::Signature { pos: 2, neg: 0, rank: 2 }));
        assert_eq!(check_rank_signature(&m(&[&[0, 1], &[2, 0]])), Err(Error::NotSymmetric));
    }

    #[test]
    fn zero_matrix_fails_iv() {
        let z = m(&[&[0, 0], &[0, 0]]);
        let r = check_lemma11(&z);
        assert_eq!(r.failing(), vec![Rule::Iv]);
    }

    #[test]
    fn rule_vi_witness() {
        // L_11 = 0, L_12 = 1, 2 L_23 = 0 < L_22 L_13 = 2
        let x = m(&[&[0, 1, 1], &[1, 2, 0], &[1, 0, 0]]);
        assert_eq!(rule_vi(&x), Some(Witness::Triple(0, 1, 2)));
    }

    #[test]
    fn side_sets() {
        assert!(Allowed::ZeroOrAtLeast(3).contains(0));
        assert!(!Allowed::ZeroOrAtLeast(3).contains(2));
        assert!(!Allowed::AtLeast(6).contains(4));
        assert!(SideConstraint::new(Target::Coeff(0), Allowed::AtLeast(0), "x").is_err());
    }

    #[test]
    fn report_text() {
        let b = Battery {
            lambda: vec![vec![LinearForm { coeffs: vec![1] }]],
            double_point: QuadraticPolynomial {
                quad: vec![vec![1]],
                lin: LinearForm { coeffs: vec![10] },
            },
            side: vec![],
        };
        let r = b.report(&[7]).unwrap();
        assert_eq!(r.failing(), vec![Rule::Ii, Rule::Dp]);
        assert!(r.to_string().contains("rule dp: fail at residual -21"));
        assert_eq!(b.first_failure(&[10]), None);
    }
}
