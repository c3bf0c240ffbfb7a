#![allow(dead_code)]

use std::sync::OnceLock;

use torfano::chow::Analysis;
use torfano::fan::{parse_catalog, FanPresentation, DEFAULT_CATALOG};
use torfano::search::{cases, CaseContext};

pub fn catalog() -> &'static [FanPresentation] {
    static CAT: OnceLock<Vec<FanPresentation>> = OnceLock::new();
    CAT.get_or_init(|| parse_catalog(DEFAULT_CATALOG).expect("default catalog parses"))
}

pub fn pres(id: &str) -> &'static FanPresentation {
    catalog().iter().find(|p| p.id == id).unwrap_or_else(|| panic!("no variety {id}"))
}

pub fn analysis(id: &str) -> Analysis {
    Analysis::new(pres(id)).unwrap()
}

pub fn context(id: &str) -> CaseContext {
    let cfg = cases::load(id, None).unwrap();
    CaseContext::new(pres(id), cfg, None).unwrap()
}

pub fn case_ids() -> Vec<&'static str> {
    cases::BUILTIN.iter().map(|(id, _)| *id).collect()
}

/// Face counts `f_{-1}..f_3` of the complex whose non-faces are the sets
/// containing a primitive collection, by brute force over subsets.
pub fn face_counts(p: &FanPresentation) -> [u64; 5] {
    let bad: Vec<u32> = p.relations.iter().map(|r| r.lhs.iter().fold(0u32, |m, &i| m | (1 << i))).collect();
    let mut f = [0u64; 5];
    for s in 0u32..(1 << p.rays) {
        let k = s.count_ones() as usize;
        if k <= 4 && !bad.iter().any(|&b| s & b == b) {
            f[k] += 1;
        }
    }
    f
}

/// `h_2` of a simplicial 3-sphere from its face counts.
pub fn h2(f: &[u64; 5]) -> i64 {
    let f: Vec<i64> = f.iter().map(|&x| x as i64).collect();
    // h_2 = C(4,2) f_{-1} - C(3,1) f_0 + f_1
    6 * f[0] - 3 * f[1] + f[2]
}

/// Inertia `(pos, neg, zero)` from the pivots of a rational congruent
/// diagonalization.
pub fn oracle_inertia(m: &[Vec<i64>]) -> (usize, usize, usize) {
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> =
        m.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let (mut pos, mut neg) = (0, 0);
    let mut live: Vec<usize> = (0..n).collect();
    while !live.is_empty() {
        if let Some(&p) = live.iter().find(|&&i| !a[i][i].is_zero()) {
            let d = a[p][p].clone();
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            live.retain(|&i| i != p);
            for &i in &live {
                let f = &a[i][p] / &d;
                for &j in &live {
                    let v = &a[i][j] - &f * &a[p][j];
                    a[i][j] = v;
                }
            }
            continue;
        }
        let pair = live
            .iter()
            .flat_map(|&i| live.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i != j && !a[i][j].is_zero());
        let Some((i, j)) = pair else { break };
        // e_i += e_j turns the (i,i) entry into 2 a_ij.
        for k in 0..n {
            let v = &a[i][k] + &a[j][k];
            a[i][k] = v;
        }
        for k in 0..n {
            let v = &a[k][i] + &a[k][j];
            a[k][i] = v;
        }
    }
    (pos, neg, n - pos - neg)
}
