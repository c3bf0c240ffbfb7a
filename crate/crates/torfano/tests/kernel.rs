mod common;

use proptest::prelude::*;

use torfano::chow::{all_quads, ChowRing};
use torfano::fan::{parse_catalog, ray_coordinates_satisfy, solve_ray_coordinates};
use torfano::linalg::inertia;
use torfano::poly::{coeff_names, Poly};

use common::{analysis, catalog, face_counts, h2, oracle_inertia, pres};

// (id, rays, euler, betti4), from the brute-force face count oracle.
const FROZEN: &[(&str, usize, u64, i64)] = &[
    ("P4", 5, 5, 1),
    ("C1", 6, 9, 3),
    ("C2", 6, 9, 3),
    ("C3", 6, 9, 3),
    ("D7", 7, 12, 4),
    ("D10", 7, 12, 4),
    ("D11", 7, 12, 4),
    ("D14", 7, 12, 4),
    ("D17", 7, 12, 4),
    ("D18", 7, 12, 4),
    ("G3", 7, 13, 5),
    ("G4", 7, 13, 5),
    ("G5", 7, 13, 5),
    ("I9", 8, 16, 6),
    ("L11", 8, 16, 6),
    ("L13", 8, 16, 6),
    ("Q16", 9, 20, 8),
    ("U8", 10, 24, 10),
    ("V4", 10, 30, 16),
    ("W", 9, 24, 12),
    ("Z1", 8, 18, 8),
    ("Z2", 8, 18, 8),
];

#[test]
fn catalog_matches_frozen_oracle() {
    assert_eq!(catalog().len(), FROZEN.len());
    for &(id, rays, euler, betti4) in FROZEN {
        let p = pres(id);
        let f = face_counts(p);
        assert_eq!((p.rays, f[4], h2(&f)), (rays, euler, betti4), "{id} oracle");
        let a = analysis(id);
        let v = &a.ring.validation;
        assert!(v.is_smooth && v.is_complete, "{id}");
        assert_eq!(v.euler as u64, euler, "{id} euler");
        assert_eq!(v.betti4 as i64, betti4, "{id} betti4");
        assert_eq!(a.basis.len() as i64, betti4, "{id} basis");
    }
}

#[test]
fn relation_counts() {
    assert_eq!(pres("C1").relations.len(), 2);
    assert_eq!(pres("V4").rays, 10);
    assert_eq!(pres("V4").relations.len(), 25);
    assert_eq!(pres("W").relations.len(), 18);
}

#[test]
fn coordinates_satisfy_relations() {
    for p in catalog() {
        let c = solve_ray_coordinates(p).unwrap();
        assert!(ray_coordinates_satisfy(p, &c), "{}", p.id);
        for (r, rel) in p.relations.iter().enumerate() {
            for k in 0..4 {
                let lhs: i64 = rel.lhs.iter().map(|&i| c[i][k]).sum();
                let rhs: i64 = rel.rhs.iter().map(|&(j, m)| m * c[j][k]).sum();
                assert_eq!(lhs, rhs, "{} relation {r}", p.id);
            }
        }
    }
}

#[test]
fn partitions() {
    let classes = |id: &str| analysis(id).partition.classes;
    assert_eq!(classes("C1"), vec![vec![0], vec![1, 2], vec![3, 4, 5]]);
    assert_eq!(classes("V4").len(), 10);
    assert_eq!(classes("W").len(), 9);
    let l13 = classes("L13");
    for pair in [vec![1, 2], vec![3, 4], vec![5, 6]] {
        assert!(l13.contains(&pair), "{l13:?}");
    }
    assert_eq!(l13.len(), 5);
}

#[test]
fn chern_and_double_point_forms() {
    assert_eq!(analysis("C1").chern2.coeffs, vec![19, 11, 3]);
    assert_eq!(analysis("C2").chern2.coeffs, vec![10, 10, 3]);
    assert_eq!(analysis("P4").chern2.coeffs, vec![10]);
    let c3 = analysis("C3");
    let e = c3.double_point.to_poly(&coeff_names(3));
    let p = Poly::parse("3*a^2 + 4*a*b + b^2 + 2*a*c - 17*a - 11*b - 3*c").unwrap();
    assert!(e.sub(&p).is_zero());
    assert_eq!(c3.double_point.eval(&[14, -10, 0]), 0);
    assert_eq!(analysis("P4").double_point.eval(&[7]), -21);
}

#[test]
fn stanley_reisner_vanishing() {
    for p in catalog() {
        let ring = ChowRing::new(p).unwrap();
        let bad: Vec<u32> = p.minimal_nonfaces();
        for q in all_quads(p.rays) {
            let s = q.iter().fold(0u32, |m, &i| m | (1 << i));
            if bad.iter().any(|&b| s & b == b) {
                assert_eq!(ring.quartic(q), 0, "{} {q:?}", p.id);
            }
        }
    }
}

#[test]
fn w_basis_is_unimodular() {
    let a = analysis("W");
    assert_eq!(a.basis.len(), 12);
    assert_eq!(a.basis.monomials[0], (2, 2));
    assert_eq!(a.basis.monomials[1], (2, 8));
}

#[test]
fn d10_row_shape() {
    // Lambda_4* = (-a, -a+c, c, a-c, 0)
    let a = analysis("D10");
    let row: Vec<Vec<i64>> = a.lambda[3].iter().map(|f| f.coeffs.clone()).collect();
    assert_eq!(
        row,
        vec![vec![-1, 0, 0, 0], vec![-1, 0, 1, 0], vec![0, 0, 1, 0], vec![1, 0, -1, 0], vec![0, 0, 0, 0]]
    );
}

#[test]
fn bundle_variant_is_still_smooth() {
    let text = "torfano-v1\nvariety C1x\nrays 6\nrelation 1 2 3 = 0\nrelation 4 5 6 = 3*1\nbasis 3^2 3*6 6^2";
    let p = parse_catalog(text).unwrap().remove(0);
    let r = ChowRing::new(&p).unwrap();
    assert!(r.validation.is_smooth);
    assert_eq!(r.validation.euler, 9);
}

fn catalog_index() -> impl Strategy<Value = usize> {
    0..catalog().len()
}

fn symmetric(max_n: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(-bound..=bound, n * (n + 1) / 2).prop_map(move |v| {
            let mut m = vec![vec![0; n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    m[i][j] = v[k];
                    m[j][i] = v[k];
                    k += 1;
                }
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quartic_is_independent_of_cone_choice(v in catalog_index(), seed in any::<u64>(), pick in 0usize..4096) {
        let p = &catalog()[v];
        let ring = ChowRing::new(p).unwrap();
        let quads: Vec<_> = all_quads(p.rays).collect();
        let q = quads[pick % quads.len()];
        let mut state = seed;
        let mut chooser = |n: usize| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize % n
        };
        prop_assert_eq!(ring.quartic_with(q, &mut chooser), ring.quartic(q));
    }

    #[test]
    fn express_in_basis_round_trip(
        v in catalog_index(),
        i in 0usize..10,
        j in 0usize..10,
        alpha in proptest::collection::vec(-9i64..=9, 16),
    ) {
        let a = analysis(&catalog()[v].id);
        let r = a.ring.rays();
        let (i, j) = (i % r, j % r);
        let n = a.dim();
        let alpha = &alpha[..n];
        let x = a.ring.express_in_basis(&a.basis, (i, j));
        let direct: i64 = a.ring.pairing_form(&a.basis, i, j).eval(alpha);
        let via: i64 = (0..n).map(|k| (0..n).map(|l| x[k] * a.basis.gram[k][l] * alpha[l]).sum::<i64>()).sum();
        prop_assert_eq!(direct, via);
    }

    #[test]
    fn inertia_matches_congruent_diagonalization(m in symmetric(10, 20)) {
        prop_assert_eq!(inertia(&m), oracle_inertia(&m));
    }

    #[test]
    fn inertia_of_low_rank_products(rows in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 6), 1..=3)) {
        // B^T B is positive semidefinite of rank rank(B).
        let n = 6;
        let m: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| rows.iter().map(|r| r[i] * r[j]).sum()).collect())
            .collect();
        let (pos, neg, zero) = inertia(&m);
        prop_assert_eq!(neg, 0);
        prop_assert_eq!(pos, torfano::linalg::rank(&rows));
        prop_assert_eq!(pos + zero, n);
    }
}
