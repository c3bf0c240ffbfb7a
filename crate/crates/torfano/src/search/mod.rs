//! Box enumeration of candidate classes with constraint pruning.

pub mod cases;
pub mod claims;
pub mod config;
pub mod enumerate;
pub mod verify;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::chow::Analysis;
use crate::error::{Error, Result};
use crate::fan::HEADER;
use crate::fan::FanPresentation;
use crate::linalg::{det, integer_kernel, rank, scaled_inverse};
use crate::screen::{Allowed, Battery};
pub use config::{CaseConfig, MachineStatus};
use enumerate::{Counters, Inequality, Quadric, System};

/// A case ready to be searched: the ring data, the battery and the box.
#[derive(Clone, Debug)]
pub struct CaseContext {
    pub pres: FanPresentation,
    pub analysis: Analysis,
    pub config: CaseConfig,
    pub battery: Battery,
    pub bounds: Vec<(i64, i64)>,
    /// The symmetry group generated by the configured permutations.
    pub group: Vec<Vec<usize>>,
}

fn group_closure(gens: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
    let mut todo = vec![id];
    while let Some(p) = todo.pop() {
        for g in gens {
            let q: Vec<usize> = g.iter().map(|&i| p[i]).collect();
            if seen.insert(q.clone()) {
                todo.push(q);
            }
        }
    }
    seen.into_iter().collect()
}

impl CaseContext {
    pub fn new(pres: &FanPresentation, config: CaseConfig, scale: Option<(i64, i64)>) -> Result<Self> {
        if pres.id != config.id {
            return Err(Error::Config { id: config.id.clone(), msg: format!("catalog entry is `{}`", pres.id) });
        }
        let analysis = Analysis::new(pres)?;
        let n = analysis.dim();
        if let Some(o) = &config.order {
            if o.len() != analysis.lambda.len() {
                return Err(Error::Config {
                    id: config.id.clone(),
                    msg: format!("order lists {} classes, the partition has {}", o.len(), analysis.lambda.len()),
                });
            }
        }
        let bounds = config.resolve_box(n, scale)?;
        let side = config.side_constraints(n, analysis.lambda.len())?;
        let group = group_closure(&config.permutations(n)?, n);
        let battery = Battery { lambda: analysis.lambda.clone(), double_point: analysis.double_point.clone(), side };
        Ok(CaseContext { pres: pres.clone(), analysis, config, battery, bounds, group })
    }

    pub fn dim(&self) -> usize {
        self.analysis.dim()
    }

    /// Lexicographically largest image under the symmetry group.
    pub fn canonical(&self, t: &[i64]) -> Vec<i64> {
        self.group
            .iter()
            .map(|p| p.iter().map(|&i| t[i]).collect::<Vec<i64>>())
            .max()
            .unwrap_or_else(|| t.to_vec())
    }

    pub fn canonical_set(&self, ts: impl IntoIterator<Item = Vec<i64>>) -> Vec<Vec<i64>> {
        let set: BTreeSet<Vec<i64>> = ts.into_iter().map(|t| self.canonical(&t)).collect();
        set.into_iter().collect()
    }

    pub fn in_box(&self, t: &[i64], bounds: &[(i64, i64)]) -> bool {
        t.iter().zip(bounds).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub id: String,
    pub solutions: Vec<Vec<i64>>,
    pub stats: BTreeMap<String, u64>,
}

impl SolutionSet {
    pub fn serialize(&self) -> String {
        let mut s = format!("{HEADER}\ncase {}\n", self.id);
        for (k, v) in &self.stats {
            s += &format!("stat {k} {v}\n");
        }
        s += &format!("solutions {}\n", self.solutions.len());
        for t in &self.solutions {
            s += &fmt_tuple(t);
            s.push('\n');
        }
        s
    }

    /// Union of sets computed on disjoint sub-boxes.
    pub fn merge(ctx: &CaseContext, parts: Vec<SolutionSet>) -> SolutionSet {
        let mut stats = BTreeMap::new();
        let mut all = Vec::new();
        for p in parts {
            for (k, v) in p.stats {
                *stats.entry(k).or_insert(0) += v;
            }
            all.extend(p.solutions);
        }
        SolutionSet { id: ctx.config.id.clone(), solutions: ctx.canonical_set(all), stats }
    }
}

pub fn fmt_tuple(t: &[i64]) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn dot(f: &[i64], k: &[Vec<i64>]) -> Vec<i64> {
    let cols = k.first().map_or(0, |r| r.len());
    (0..cols).map(|j| f.iter().zip(k).map(|(a, row)| a * row[j]).sum()).collect()
}

fn form_range(f: &[i64], bounds: &[(i64, i64)]) -> (i64, i64) {
    let mut lo = 0;
    let mut hi = 0;
    for (c, (l, h)) in f.iter().zip(bounds) {
        let (x, y) = (c * l, c * h);
        lo += x.min(y);
        hi += x.max(y);
    }
    (lo, hi)
}

/// True when `p` and `q` are nonzero and point in opposite directions.
fn antiparallel(p: &[i64], q: &[i64]) -> bool {
    let Some(k) = p.iter().position(|&x| x != 0) else { return false };
    if q[k] == 0 || (p[k] > 0) == (q[k] > 0) {
        return false;
    }
    let (s, t) = (q[k].abs() as i128, p[k].abs() as i128);
    p.iter().zip(q).all(|(&x, &y)| x as i128 * s + y as i128 * t == 0)
}

/// Linear forms in the coefficients that vanish at every solution, closed
/// under the consequences of rules ii to v.
fn equality_closure(lambda: &[Vec<Vec<i64>>]) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let m = lambda.len();
    let n = lambda.first().and_then(|r| r.first()).map_or(0, |f| f.len());
    let mut eqs: Vec<Vec<i64>> = Vec::new();
    loop {
        let k = if eqs.is_empty() {
            (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
        } else {
            integer_kernel(&eqs, n)?
        };
        let r: Vec<Vec<Vec<i64>>> = lambda.iter().map(|row| row.iter().map(|f| dot(f, &k)).collect()).collect();
        let zero = |i: usize, j: usize| r[i][j].iter().all(|&x| x == 0);
        let mut add: BTreeSet<(usize, usize)> = BTreeSet::new();
        for i in 0..m {
            for j in 0..m {
                if i != j && zero(i, j) {
                    add.insert((i, i));
                    add.insert((j, j));
                    for l in 0..m {
                        if zero(i, l) {
                            add.insert((j.min(l), j.max(l)));
                        }
                    }
                }
            }
        }
        let entries: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
        for (x, &p) in entries.iter().enumerate() {
            for &q in &entries[x + 1..] {
                if antiparallel(&r[p.0][p.1], &r[q.0][q.1]) {
                    add.insert(p);
                    add.insert(q);
                }
            }
        }
        let new: Vec<Vec<i64>> = add
            .into_iter()
            .filter(|&(i, j)| !zero(i, j))
            .map(|(i, j)| lambda[i][j].clone())
            .collect();
        if new.is_empty() {
            return Ok((eqs, k));
        }
        eqs.extend(new);
    }
}

/// The change of variables `a = P u / D`, where `u` are the values of chosen
/// matrix entries.
struct Chart {
    p: Vec<Vec<i128>>,
    d: i128,
    /// Entry forms in the coefficients, one per `u` variable.
    chosen: Vec<Vec<i64>>,
}

fn choose_chart(forms: &[Vec<i64>], kernel: &[Vec<i64>], bounds: &[(i64, i64)]) -> Result<Chart> {
    let k = kernel.first().map_or(0, |r| r.len());
    let n = kernel.len();
    // candidates: distinct restricted entries, narrowest first
    let mut cand: Vec<(i64, Vec<i64>, Vec<i64>)> = Vec::new();
    let mut seen = BTreeSet::new();
    for f in forms {
        let r = dot(f, kernel);
        if r.iter().all(|&x| x == 0) || !seen.insert(r.clone()) {
            continue;
        }
        let (lo, hi) = form_range(f, bounds);
        cand.push((hi - lo.max(0), f.clone(), r));
    }
    for i in 0..n {
        let mut f = vec![0; n];
        f[i] = 1;
        let r = dot(&f, kernel);
        if seen.insert(r.clone()) {
            cand.push((i64::MAX / 4, f, r));
        }
    }
    cand.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    let mut pick: Vec<usize> = Vec::new();
    for (idx, c) in cand.iter().enumerate() {
        if pick.len() == k {
            break;
        }
        let mut rows: Vec<Vec<i64>> = pick.iter().map(|&p| cand[p].2.clone()).collect();
        rows.push(c.2.clone());
        if rank(&rows) == rows.len() {
            pick.push(idx);
        }
    }
    if pick.len() < k {
        return Err(Error::Singular);
    }
    let rows_of = |pick: &[usize]| -> Vec<Vec<i64>> { pick.iter().map(|&p| cand[p].2.clone()).collect() };
    let cost = |pick: &[usize]| -> Result<(i128, u64)> {
        let d = det(&rows_of(pick))?.abs();
        let w: u64 = pick.iter().map(|&p| cand[p].0.clamp(0, 1 << 20) as u64).sum();
        Ok((d, w))
    };
    if k > 0 {
        let mut best = cost(&pick)?;
        let mut improved = true;
        let mut rounds = 0;
        while improved && best.0 > 1 && rounds < 8 {
            improved = false;
            rounds += 1;
            for slot in 0..k {
                for idx in 0..cand.len() {
                    if pick.contains(&idx) {
                        continue;
                    }
                    let mut trial = pick.clone();
                    trial[slot] = idx;
                    let c = cost(&trial)?;
                    if c.0 != 0 && c < best {
                        best = c;
                        pick = trial;
                        improved = true;
                    }
                }
            }
        }
    }
    let g = rows_of(&pick);
    let (adj, d) = if k == 0 { (Vec::new(), 1) } else { scaled_inverse(&g)? };
    let p: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..k)
                .map(|j| (0..k).map(|l| kernel[i][l] as i128 * adj[l][j] as i128).sum())
                .collect()
        })
        .collect();
    Ok(Chart { p, d: d as i128, chosen: pick.iter().map(|&p| cand[p].1.clone()).collect() })
}

fn times_p(f: &[i64], p: &[Vec<i128>], k: usize) -> Vec<i128> {
    (0..k).map(|j| f.iter().zip(p).map(|(&c, row)| c as i128 * row[j]).sum()).collect()
}

fn build_system(ctx: &CaseContext, bounds: &[(i64, i64)], lambda: &[Vec<Vec<i64>>], chart: &Chart) -> System {
    let n = ctx.dim();
    let k = chart.chosen.len();
    let d = chart.d;
    let m = lambda.len();
    let mut lo = Vec::with_capacity(k);
    let mut hi = Vec::with_capacity(k);
    for f in &chart.chosen {
        let (l, h) = form_range(f, bounds);
        lo.push(l.max(0));
        hi.push(h);
    }
    let mut ineqs = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |w: Vec<i128>, b: i128, ineqs: &mut Vec<Inequality>| {
        if w.iter().any(|&x| x != 0) && seen.insert((w.clone(), b)) {
            ineqs.push(Inequality { w, b });
        }
    };
    for i in 0..m {
        for j in i..m {
            push(times_p(&lambda[i][j], &chart.p, k), 0, &mut ineqs);
        }
    }
    for (c, &(l, h)) in bounds.iter().enumerate() {
        let w = chart.p[c].clone();
        push(w.clone(), d * l as i128, &mut ineqs);
        push(w.iter().map(|x| -x).collect(), -d * h as i128, &mut ineqs);
    }
    for s in &ctx.battery.side {
        let f = s.form(&ctx.battery.lambda, n);
        let lower = match s.allowed {
            Allowed::AtLeast(v) => v,
            Allowed::ZeroOrAtLeast(_) => 0,
        };
        push(times_p(&f.coeffs, &chart.p, k), d * lower as i128, &mut ineqs);
    }
    let dp = &ctx.battery.double_point;
    let mut main = Quadric::zero(k);
    for x in 0..k {
        for y in 0..k {
            let mut s = 0i128;
            for i in 0..n {
                for j in 0..n {
                    s += chart.p[i][x] * dp.quad[i][j] as i128 * chart.p[j][y];
                }
            }
            main.quad[x][y] = s;
        }
    }
    main.lin = times_p(&dp.lin.coeffs, &chart.p, k).iter().map(|x| -d * x).collect();
    let mut side = Vec::new();
    let pf = |i: usize, j: usize| times_p(&lambda[i][j], &chart.p, k);
    for i in 0..m {
        for j in i + 1..m {
            if pf(i, j).iter().any(|&x| x != 0) {
                continue;
            }
            for a in 0..m {
                for b in a + 1..m {
                    let q = Quadric::product(&pf(i, a), &pf(j, b)).sub(&Quadric::product(&pf(i, b), &pf(j, a)));
                    if !q.is_zero() && !side.contains(&q) {
                        side.push(q);
                    }
                }
            }
        }
    }
    System { lo, hi, ineqs, main, side }
}

fn finish(ctx: &CaseContext, found: Vec<Vec<i64>>, c: Counters) -> SolutionSet {
    let mut stats = c.tags;
    stats.insert("nodes".into(), c.nodes);
    stats.insert("leaves".into(), c.leaves);
    SolutionSet { id: ctx.config.id.clone(), solutions: ctx.canonical_set(found), stats }
}

/// Pruned search over the configured box.
pub fn run_case(ctx: &CaseContext) -> Result<SolutionSet> {
    run_case_in(ctx, &ctx.bounds)
}

/// Pruned search over an explicit box.
pub fn run_case_in(ctx: &CaseContext, bounds: &[(i64, i64)]) -> Result<SolutionSet> {
    if bounds.len() != ctx.dim() {
        return Err(Error::Dimension { expected: ctx.dim(), found: bounds.len() });
    }
    if bounds.iter().any(|(l, h)| l > h) {
        return Err(Error::EmptyBox);
    }
    let lambda: Vec<Vec<Vec<i64>>> =
        ctx.battery.lambda.iter().map(|r| r.iter().map(|f| f.coeffs.clone()).collect()).collect();
    let (_, kernel) = equality_closure(&lambda)?;
    let forms: Vec<Vec<i64>> = lambda.iter().flatten().cloned().collect();
    let chart = choose_chart(&forms, &kernel, bounds)?;
    let sys = build_system(ctx, bounds, &lambda, &chart);
    let d = chart.d;
    let leaf = |u: &[i64], c: &mut Counters| -> Option<Vec<i64>> {
        c.leaves += 1;
        let mut a = Vec::with_capacity(ctx.dim());
        for row in &chart.p {
            let s: i128 = row.iter().zip(u).map(|(&x, &y)| x * y as i128).sum();
            if s % d != 0 {
                c.tag("congruence");
                return None;
            }
            a.push(i64::try_from(s / d).ok()?);
        }
        if !ctx.in_box(&a, bounds) {
            c.tag("box");
            return None;
        }
        match ctx.battery.first_failure(&a) {
            Some(rule) => {
                c.tag(rule.name());
                None
            }
            None => Some(a),
        }
    };
    let (found, counters) = sys.solve(leaf);
    Ok(finish(ctx, found, counters))
}

/// Screens every point of the box with the full battery.
pub fn run_case_unpruned(ctx: &CaseContext, bounds: &[(i64, i64)]) -> Result<SolutionSet> {
    if bounds.len() != ctx.dim() {
        return Err(Error::Dimension { expected: ctx.dim(), found: bounds.len() });
    }
    if bounds.iter().any(|(l, h)| l > h) {
        return Err(Error::EmptyBox);
    }
    let n = ctx.dim();
    let (l0, h0) = bounds[0];
    let parts: Vec<(Vec<Vec<i64>>, Counters)> = (l0..=h0)
        .into_par_iter()
        .map(|v| {
            let mut c = Counters::default();
            let mut out = Vec::new();
            let mut t: Vec<i64> = bounds.iter().map(|b| b.0).collect();
            t[0] = v;
            loop {
                c.leaves += 1;
                match ctx.battery.first_failure(&t) {
                    Some(rule) => c.tag(rule.name()),
                    None => out.push(t.clone()),
                }
                let mut i = n;
                loop {
                    if i == 1 {
                        return (out, c);
                    }
                    i -= 1;
                    if t[i] < bounds[i].1 {
                        t[i] += 1;
                        break;
                    }
                    t[i] = bounds[i].0;
                }
            }
        })
        .collect();
    let mut found = Vec::new();
    let mut total = Counters::default();
    for (o, c) in parts {
        found.extend(o);
        total.merge(&c);
    }
    Ok(finish(ctx, found, total))
}

/// The configured box clipped to `|coeff| <= radius`, the radius reduced
/// until the box has at most `max_points` points.
pub fn small_box(ctx: &CaseContext, radius: i64, max_points: u64) -> Vec<(i64, i64)> {
    let mut r = radius;
    loop {
        let b: Vec<(i64, i64)> = ctx.bounds.iter().map(|&(l, h)| (l.max(-r), h.min(r))).collect();
        let pts = b.iter().try_fold(1u64, |acc, (l, h)| acc.checked_mul((h - l + 1).max(0) as u64));
        if r == 0 || pts.is_some_and(|p| p <= max_points) {
            return b;
        }
        r -= 1;
    }
}

/// Splits a box into two halves along its widest coefficient.
pub fn split_box(bounds: &[(i64, i64)]) -> Vec<Vec<(i64, i64)>> {
    let Some((k, &(l, h))) = bounds.iter().enumerate().max_by_key(|(i, (l, h))| (h - l, usize::MAX - i)) else {
        return vec![bounds.to_vec()];
    };
    if l == h {
        return vec![bounds.to_vec()];
    }
    let mid = l + (h - l) / 2;
    let mut lo = bounds.to_vec();
    let mut hi = bounds.to_vec();
    lo[k] = (l, mid);
    hi[k] = (mid + 1, h);
    vec![lo, hi]
}
