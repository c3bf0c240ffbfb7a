//! Depth-first enumeration of integer points satisfying linear inequalities
//! and a family of quadratic equations, the last variable solved exactly.

use std::collections::BTreeMap;

use rayon::prelude::*;

/// `u^T quad u + lin . u + constant`, with `quad` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadric {
    pub quad: Vec<Vec<i128>>,
    pub lin: Vec<i128>,
    pub constant: i128,
}

impl Quadric {
    pub fn zero(n: usize) -> Self {
        Quadric { quad: vec![vec![0; n]; n], lin: vec![0; n], constant: 0 }
    }

    pub fn eval(&self, u: &[i64]) -> i128 {
        let n = u.len();
        let mut s = self.constant;
        for i in 0..n {
            let ui = u[i] as i128;
            s += self.lin[i] * ui;
            for j in 0..n {
                s += self.quad[i][j] * ui * u[j] as i128;
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0
            && self.lin.iter().all(|&x| x == 0)
            && self.quad.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// Twice the product of two linear forms, as a symmetric integer quadric.
    pub fn product(f: &[i128], g: &[i128]) -> Self {
        let n = f.len();
        let mut q = Quadric::zero(n);
        for i in 0..n {
            for j in 0..n {
                let c = f[i] * g[j];
                q.quad[i][j] += c;
            }
        }
        symmetrize(&mut q.quad);
        q
    }

    pub fn sub(&self, o: &Quadric) -> Self {
        let n = self.lin.len();
        let mut q = self.clone();
        for i in 0..n {
            q.lin[i] -= o.lin[i];
            for j in 0..n {
                q.quad[i][j] -= o.quad[i][j];
            }
        }
        q.constant -= o.constant;
        q
    }

    fn permuted(&self, order: &[usize]) -> Self {
        Quadric {
            quad: order.iter().map(|&i| order.iter().map(|&j| self.quad[i][j]).collect()).collect(),
            lin: order.iter().map(|&i| self.lin[i]).collect(),
            constant: self.constant,
        }
    }

    fn last_var(&self) -> Option<usize> {
        let n = self.lin.len();
        (0..n).rev().find(|&i| self.lin[i] != 0 || (0..n).any(|j| self.quad[i][j] != 0))
    }
}

/// Replaces `q` by `q + q^T`.
fn symmetrize(q: &mut [Vec<i128>]) {
    let n = q.len();
    for i in 0..n {
        for j in i + 1..n {
            let s = q[i][j] + q[j][i];
            q[i][j] = s;
            q[j][i] = s;
        }
        q[i][i] *= 2;
    }
}

/// `w . u >= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub w: Vec<i128>,
    pub b: i128,
}

#[derive(Clone, Debug)]
pub struct System {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub ineqs: Vec<Inequality>,
    /// Solved for the last variable and bounded by intervals.
    pub main: Quadric,
    /// Checked as soon as all their variables are fixed.
    pub side: Vec<Quadric>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub nodes: u64,
    pub leaves: u64,
    pub tags: BTreeMap<String, u64>,
}

impl Counters {
    pub fn merge(&mut self, o: &Counters) {
        self.nodes += o.nodes;
        self.leaves += o.leaves;
        for (k, v) in &o.tags {
            *self.tags.entry(k.clone()).or_insert(0) += v;
        }
    }

    pub fn tag(&mut self, k: &str) {
        *self.tags.entry(k.to_string()).or_insert(0) += 1;
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

fn isqrt(n: i128) -> i128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn span(c: i128, lo: i64, hi: i64) -> (i128, i128) {
    let (a, b) = (c * lo as i128, c * hi as i128);
    (a.min(b), a.max(b))
}

impl System {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Tightens the static bounds against the inequalities. Returns false if
    /// the system is infeasible.
    pub fn propagate(&mut self) -> bool {
        let n = self.dim();
        for _ in 0..64 {
            let mut changed = false;
            for c in &self.ineqs {
                let spans: Vec<(i128, i128)> =
                    (0..n).map(|i| span(c.w[i], self.lo[i], self.hi[i])).collect();
                let total: i128 = spans.iter().map(|s| s.1).sum();
                if total < c.b {
                    return false;
                }
                for j in 0..n {
                    if c.w[j] == 0 {
                        continue;
                    }
                    let need = c.b - (total - spans[j].1);
                    if c.w[j] > 0 {
                        let l = div_ceil(need, c.w[j]);
                        if l > self.lo[j] as i128 {
                            self.lo[j] = l.min(i64::MAX as i128) as i64;
                            changed = true;
                        }
                    } else {
                        let h = div_floor(need, c.w[j]);
                        if h < self.hi[j] as i128 {
                            self.hi[j] = h.max(i64::MIN as i128) as i64;
                            changed = true;
                        }
                    }
                    if self.lo[j] > self.hi[j] {
                        return false;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        true
    }

    fn permuted(&self, order: &[usize]) -> System {
        System {
            lo: order.iter().map(|&i| self.lo[i]).collect(),
            hi: order.iter().map(|&i| self.hi[i]).collect(),
            ineqs: self
                .ineqs
                .iter()
                .map(|c| Inequality { w: order.iter().map(|&i| c.w[i]).collect(), b: c.b })
                .collect(),
            main: self.main.permuted(order),
            side: self.side.iter().map(|q| q.permuted(order)).collect(),
        }
    }

    /// Variable order: the widest variable whose square appears in the main
    /// quadric goes last, the rest by increasing width.
    fn order(&self) -> Vec<usize> {
        let n = self.dim();
        let width = |i: usize| self.hi[i] as i128 - self.lo[i] as i128;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by_key(|&i| (width(i), i));
        let last = idx
            .iter()
            .rev()
            .copied()
            .find(|&i| self.main.quad[i][i] != 0)
            .or_else(|| idx.iter().rev().copied().find(|&i| self.main.lin[i] != 0 || (0..n).any(|j| self.main.quad[i][j] != 0)));
        if let Some(l) = last {
            idx.retain(|&i| i != l);
            idx.push(l);
        }
        idx
    }

    /// Calls `leaf` on every integer point in the bounds satisfying all
    /// inequalities and quadrics. Work is split over the first variable.
    pub fn solve<T, F>(&self, leaf: F) -> (Vec<T>, Counters)
    where
        T: Send,
        F: Fn(&[i64], &mut Counters) -> Option<T> + Sync,
    {
        let mut sys = self.clone();
        if !sys.propagate() {
            return (Vec::new(), Counters::default());
        }
        let n = sys.dim();
        let order = sys.order();
        let p = sys.permuted(&order);
        let ctx = Ctx::new(&p);
        let unpermute = |u: &[i64]| -> Vec<i64> {
            let mut out = vec![0; n];
            for (k, &i) in order.iter().enumerate() {
                out[i] = u[k];
            }
            out
        };
        let wrapped = |u: &[i64], c: &mut Counters| leaf(&unpermute(u), c);
        if n == 0 {
            let mut c = Counters::default();
            let out = if p.main.eval(&[]) == 0 { wrapped(&[], &mut c) } else { None };
            return (out.into_iter().collect(), c);
        }
        let root = State::new(&ctx);
        let firsts: Vec<i64> = match ctx.range(&root) {
            Some((l, h)) if n > 1 => (l..=h).collect(),
            _ => Vec::new(),
        };
        if n == 1 {
            let mut c = Counters::default();
            let mut out = Vec::new();
            ctx.dfs(root, &mut c, &mut out, &wrapped);
            return (out, c);
        }
        let parts: Vec<(Vec<T>, Counters)> = firsts
            .into_par_iter()
            .map(|v| {
                let mut c = Counters::default();
                let mut out = Vec::new();
                let mut s = root.clone();
                if ctx.assign(&mut s, v, &mut c) {
                    ctx.dfs(s, &mut c, &mut out, &wrapped);
                }
                (out, c)
            })
            .collect();
        let mut out = Vec::new();
        let mut total = Counters::default();
        for (o, c) in parts {
            out.extend(o);
            total.merge(&c);
        }
        (out, total)
    }
}

struct Ctx<'a> {
    sys: &'a System,
    n: usize,
    /// `rest_max[c][d]`: largest value of the constraint terms in variables `d..`.
    rest_max: Vec<Vec<i128>>,
    /// Interval of the main quadric restricted to variables `d..`.
    qspan: Vec<(i128, i128)>,
    /// Side quadrics grouped by the depth at which they become decidable.
    side_at: Vec<Vec<usize>>,
}

#[derive(Clone)]
struct State {
    depth: usize,
    u: Vec<i64>,
    partial: Vec<i128>,
    lam: Vec<i128>,
    fixed: i128,
}

impl State {
    fn new(ctx: &Ctx) -> Self {
        State {
            depth: 0,
            u: vec![0; ctx.n],
            partial: vec![0; ctx.sys.ineqs.len()],
            lam: vec![0; ctx.n],
            fixed: ctx.sys.main.constant,
        }
    }
}

impl<'a> Ctx<'a> {
    fn new(sys: &'a System) -> Self {
        let n = sys.dim();
        let rest_max = sys
            .ineqs
            .iter()
            .map(|c| {
                let mut v = vec![0i128; n + 1];
                for d in (0..n).rev() {
                    v[d] = v[d + 1] + span(c.w[d], sys.lo[d], sys.hi[d]).1;
                }
                v
            })
            .collect();
        let mut qspan = vec![(0i128, 0i128); n + 1];
        for d in (0..n).rev() {
            let (mut lo, mut hi) = qspan[d + 1];
            let q = &sys.main.quad;
            let (l, h) = (sys.lo[d] as i128, sys.hi[d] as i128);
            if q[d][d] != 0 {
                let sq_lo = if l <= 0 && h >= 0 { 0 } else { (l * l).min(h * h) };
                let sq_hi = (l * l).max(h * h);
                let (a, b) = (q[d][d] * sq_lo, q[d][d] * sq_hi);
                lo += a.min(b);
                hi += a.max(b);
            }
            for j in d + 1..n {
                let c = 2 * q[d][j];
                if c == 0 {
                    continue;
                }
                let (l2, h2) = (sys.lo[j] as i128, sys.hi[j] as i128);
                let prods = [c * l * l2, c * l * h2, c * h * l2, c * h * h2];
                lo += prods.iter().min().unwrap();
                hi += prods.iter().max().unwrap();
            }
            qspan[d] = (lo, hi);
        }
        let mut side_at = vec![Vec::new(); n];
        for (k, q) in sys.side.iter().enumerate() {
            if let Some(d) = q.last_var() {
                side_at[d].push(k);
            }
        }
        Ctx { sys, n, rest_max, qspan, side_at }
    }

    /// Feasible values of the next variable, or `None` if the node is dead.
    fn range(&self, s: &State) -> Option<(i64, i64)> {
        let d = s.depth;
        let mut lo = self.sys.lo[d] as i128;
        let mut hi = self.sys.hi[d] as i128;
        for (k, c) in self.sys.ineqs.iter().enumerate() {
            let need = c.b - s.partial[k] - self.rest_max[k][d + 1];
            let w = c.w[d];
            if w == 0 {
                if need > 0 {
                    return None;
                }
            } else if w > 0 {
                lo = lo.max(div_ceil(need, w));
            } else {
                hi = hi.min(div_floor(need, w));
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo as i64, hi as i64))
    }

    /// Interval test of the main quadric over the unassigned box.
    fn residual_possible(&self, s: &State) -> bool {
        let d = s.depth;
        let mut lo = s.fixed + self.qspan[d].0;
        let mut hi = s.fixed + self.qspan[d].1;
        for j in d..self.n {
            let c = 2 * s.lam[j] + self.sys.main.lin[j];
            let (a, b) = span(c, self.sys.lo[j], self.sys.hi[j]);
            lo += a;
            hi += b;
        }
        lo <= 0 && 0 <= hi
    }

    fn assign(&self, s: &mut State, v: i64, c: &mut Counters) -> bool {
        let d = s.depth;
        let vi = v as i128;
        s.u[d] = v;
        for (k, ineq) in self.sys.ineqs.iter().enumerate() {
            s.partial[k] += ineq.w[d] * vi;
        }
        let q = &self.sys.main.quad;
        s.fixed += (2 * s.lam[d] + q[d][d] * vi + self.sys.main.lin[d]) * vi;
        for j in 0..self.n {
            s.lam[j] += q[d][j] * vi;
        }
        s.depth += 1;
        for &k in &self.side_at[d] {
            if self.sys.side[k].eval(&s.u) != 0 {
                c.tag("minor");
                return false;
            }
        }
        true
    }

    fn dfs<T, F>(&self, s: State, c: &mut Counters, out: &mut Vec<T>, leaf: &F)
    where
        F: Fn(&[i64], &mut Counters) -> Option<T>,
    {
        c.nodes += 1;
        let Some((lo, hi)) = self.range(&s) else {
            c.tag("linear");
            return;
        };
        if !self.residual_possible(&s) {
            c.tag("residual");
            return;
        }
        let d = s.depth;
        if d + 1 == self.n {
            let a = self.sys.main.quad[d][d];
            let b = 2 * s.lam[d] + self.sys.main.lin[d];
            let k = s.fixed;
            let mut roots: Vec<i128> = Vec::new();
            if a == 0 {
                if b == 0 {
                    if k == 0 {
                        roots.extend(lo as i128..=hi as i128);
                    }
                } else if k % b == 0 {
                    roots.push(-k / b);
                }
            } else {
                let disc = b * b - 4 * a * k;
                if disc >= 0 {
                    let r = isqrt(disc);
                    if r * r == disc {
                        for num in [-b - r, -b + r] {
                            if num % (2 * a) == 0 {
                                roots.push(num / (2 * a));
                            }
                        }
                        roots.sort_unstable();
                        roots.dedup();
                    }
                }
            }
            for x in roots {
                if x < lo as i128 || x > hi as i128 {
                    continue;
                }
                let mut t = s.clone();
                if !self.assign(&mut t, x as i64, c) {
                    continue;
                }
                c.leaves += 1;
                if let Some(v) = leaf(&t.u, c) {
                    out.push(v);
                }
            }
            return;
        }
        for v in lo..=hi {
            let mut t = s.clone();
            if self.assign(&mut t, v, c) {
                self.dfs(t, c, out, leaf);
            }
        }
    }
}
