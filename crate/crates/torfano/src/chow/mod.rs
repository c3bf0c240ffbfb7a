//! Chow ring of a smooth complete toric 4-fold: quartic intersection numbers,
//! A^2 bases, the intersection matrix and the double-point quadratic.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{
    build_face_complex, solve_ray_coordinates, validate_variety, FaceComplex, FanPresentation,
    LatticeVector, ValidationReport,
};
use crate::linalg::{det, scaled_inverse};
use crate::poly::{LinearForm, QuadraticPolynomial};

/// Sorted 4-multiset of zero-based ray indices.
pub type Quad = [usize; 4];

pub fn sorted(mut q: Quad) -> Quad {
    q.sort_unstable();
    q
}

fn support(q: &Quad) -> u32 {
    q.iter().fold(0, |m, &i| m | (1 << i))
}

/// Exact intersection table of a validated fan.
#[derive(Clone, Debug)]
pub struct ChowRing {
    pub pres: FanPresentation,
    pub coords: Vec<LatticeVector>,
    pub complex: FaceComplex,
    pub validation: ValidationReport,
    /// Dual basis of each maximal cone: `duals[c][s]` pairs to 1 with the
    /// `s`-th ray of cone `c` and to 0 with the others.
    duals: Vec<[LatticeVector; 4]>,
    table: Vec<i64>,
}

impl ChowRing {
    pub fn new(pres: &FanPresentation) -> Result<Self> {
        let coords = solve_ray_coordinates(pres)?;
        Self::with_coords(pres, coords)
    }

    pub fn with_coords(pres: &FanPresentation, coords: Vec<LatticeVector>) -> Result<Self> {
        let complex = build_face_complex(pres);
        let validation = validate_variety(pres, &coords, &complex);
        if !validation.is_smooth || !validation.is_complete {
            return Err(Error::InvalidFan(format!("{}: {}", pres.id, validation.problems.join("; "))));
        }
        let mut duals = Vec::with_capacity(complex.maximal_cones.len());
        for &c in &complex.maximal_cones {
            let rows: Vec<Vec<i64>> = crate::fan::mask_indices(c)
                .iter()
                .map(|&i| coords[i].to_vec())
                .collect();
            let (inv, d) = scaled_inverse(&rows)?;
            debug_assert_eq!(d, 1);
            let mut ms = [[0i64; 4]; 4];
            for (s, m) in ms.iter_mut().enumerate() {
                for k in 0..4 {
                    m[k] = inv[k][s];
                }
            }
            duals.push(ms);
        }
        let mut ring = ChowRing {
            pres: pres.clone(),
            coords,
            complex,
            validation,
            duals,
            table: Vec::new(),
        };
        ring.build_table();
        Ok(ring)
    }

    pub fn rays(&self) -> usize {
        self.pres.rays
    }

    fn code(&self, q: &Quad) -> usize {
        let r = self.rays();
        ((q[0] * r + q[1]) * r + q[2]) * r + q[3]
    }

    fn build_table(&mut self) {
        let r = self.rays();
        let mut memo = HashMap::new();
        let mut table = vec![0i64; r * r * r * r];
        for q in all_quads(r) {
            let v = self.reduce(q, &mut memo, &mut |_| 0);
            table[self.code(&q)] = v;
        }
        self.table = table;
    }

    /// Intersection number `D_i D_j D_k D_l`.
    pub fn quartic(&self, q: Quad) -> i64 {
        let q = sorted(q);
        self.table[self.code(&q)]
    }

    /// Number of stored table entries (sorted multisets).
    pub fn table_len(&self) -> usize {
        all_quads(self.rays()).count()
    }

    /// Recomputes a quartic number from scratch, letting `pick` choose which
    /// of the maximal cones containing the support supplies the dual vector.
    pub fn quartic_with(&self, q: Quad, pick: &mut dyn FnMut(usize) -> usize) -> i64 {
        self.reduce(sorted(q), &mut HashMap::new(), pick)
    }

    fn reduce(&self, q: Quad, memo: &mut HashMap<Quad, i64>, pick: &mut dyn FnMut(usize) -> usize) -> i64 {
        let s = support(&q);
        if !self.complex.is_face(s) {
            return 0;
        }
        if s.count_ones() == 4 {
            return 1;
        }
        if let Some(&v) = memo.get(&q) {
            return v;
        }
        let cones: Vec<usize> = (0..self.complex.maximal_cones.len())
            .filter(|&c| self.complex.maximal_cones[c] & s == s)
            .collect();
        let c = cones[pick(cones.len()) % cones.len()];
        let mask = self.complex.maximal_cones[c];
        let i = (0..3).map(|t| q[t]).find(|&x| q.iter().filter(|&&y| y == x).count() > 1).unwrap();
        let slot = crate::fan::mask_indices(mask).iter().position(|&t| t == i).unwrap();
        let m = self.duals[c][slot];
        let pos = q.iter().position(|&x| x == i).unwrap();
        let mut total = 0i64;
        for j in 0..self.rays() {
            if mask & (1 << j) != 0 {
                continue;
            }
            let w: i64 = (0..4).map(|k| m[k] * self.coords[j][k]).sum();
            if w == 0 {
                continue;
            }
            let mut nq = q;
            nq[pos] = j;
            total -= w * self.reduce(sorted(nq), memo, pick);
        }
        memo.insert(q, total);
        total
    }

    pub fn numerical_partition(&self) -> NumericalPartition {
        let r = self.rays();
        let triples: Vec<[usize; 3]> = all_triples(r).collect();
        let sig: Vec<Vec<i64>> = (0..r)
            .map(|i| triples.iter().map(|t| self.quartic([i, t[0], t[1], t[2]])).collect())
            .collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..r {
            match classes.iter_mut().find(|c| sig[c[0]] == sig[i]) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        NumericalPartition { classes }
    }

    pub fn check_basis(&self, monomials: &[(usize, usize)]) -> Result<BasisA2> {
        let expected = self.validation.betti4 as usize;
        if monomials.len() != expected {
            return Err(Error::BasisLength { found: monomials.len(), expected });
        }
        let gram: Vec<Vec<i64>> = monomials
            .iter()
            .map(|&(i, j)| monomials.iter().map(|&(k, l)| self.quartic([i, j, k, l])).collect())
            .collect();
        let d = det(&gram)?;
        if d.abs() != 1 {
            return Err(Error::NotUnimodular(d));
        }
        let (inverse, _) = scaled_inverse(&gram)?;
        Ok(BasisA2 { monomials: monomials.to_vec(), gram, inverse })
    }

    /// Coordinates of `D_i D_j` in the basis, from the Poincare pairing.
    pub fn express_in_basis(&self, basis: &BasisA2, (i, j): (usize, usize)) -> Vec<i64> {
        let p: Vec<i64> = basis.monomials.iter().map(|&(k, l)| self.quartic([i, j, k, l])).collect();
        basis
            .inverse
            .iter()
            .map(|row| row.iter().zip(&p).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `L_ij = D_i D_j alpha` as linear forms in the basis coefficients.
    pub fn pairing_form(&self, basis: &BasisA2, i: usize, j: usize) -> LinearForm {
        LinearForm {
            coeffs: basis.monomials.iter().map(|&(k, l)| self.quartic([i, j, k, l])).collect(),
        }
    }

    pub fn full_matrix(&self, basis: &BasisA2) -> Vec<Vec<LinearForm>> {
        let r = self.rays();
        (0..r).map(|i| (0..r).map(|j| self.pairing_form(basis, i, j)).collect()).collect()
    }

    pub fn symbolic_lambda(&self, basis: &BasisA2, partition: &NumericalPartition) -> Vec<Vec<LinearForm>> {
        let reps = partition.representatives();
        reps.iter()
            .map(|&i| reps.iter().map(|&j| self.pairing_form(basis, i, j)).collect())
            .collect()
    }

    /// `c_2 . beta_k = sum_{i<j} D_i D_j beta_k`.
    pub fn chern2_form(&self, basis: &BasisA2) -> LinearForm {
        let r = self.rays();
        let coeffs = basis
            .monomials
            .iter()
            .map(|&(k, l)| {
                let mut s = 0;
                for i in 0..r {
                    for j in i + 1..r {
                        s += self.quartic([i, j, k, l]);
                    }
                }
                s
            })
            .collect();
        LinearForm { coeffs }
    }

    pub fn double_point_form(&self, basis: &BasisA2) -> QuadraticPolynomial {
        QuadraticPolynomial { quad: basis.gram.clone(), lin: self.chern2_form(basis) }
    }
}

pub fn all_quads(r: usize) -> impl Iterator<Item = Quad> {
    (0..r).flat_map(move |a| {
        (a..r).flat_map(move |b| (b..r).flat_map(move |c| (c..r).map(move |d| [a, b, c, d])))
    })
}

pub fn all_triples(r: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..r).flat_map(move |a| (a..r).flat_map(move |b| (b..r).map(move |c| [a, b, c])))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisA2 {
    pub monomials: Vec<(usize, usize)>,
    pub gram: Vec<Vec<i64>>,
    #[serde(skip)]
    inverse: Vec<Vec<i64>>,
}

impl BasisA2 {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// Numerical equivalence classes of the divisors, ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumericalPartition {
    pub classes: Vec<Vec<usize>>,
}

impl NumericalPartition {
    /// The largest index of each class stands for the class.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| *c.iter().max().unwrap()).collect()
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.classes.iter().position(|c| c.contains(&i)).unwrap()
    }
}

/// Everything derived from a fan presentation and its stored basis.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub ring: ChowRing,
    pub basis: BasisA2,
    pub partition: NumericalPartition,
    pub lambda: Vec<Vec<LinearForm>>,
    pub chern2: LinearForm,
    pub double_point: QuadraticPolynomial,
}

impl Analysis {
    pub fn new(pres: &FanPresentation) -> Result<Self> {
        let ring = ChowRing::new(pres)?;
        let basis = ring.check_basis(&pres.basis)?;
        let partition = ring.numerical_partition();
        let lambda = ring.symbolic_lambda(&basis, &partition);
        let chern2 = ring.chern2_form(&basis);
        let double_point = ring.double_point_form(&basis);
        Ok(Analysis { ring, basis, partition, lambda, chern2, double_point })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Reorders the classes so that class `k` of the result is the one
    /// containing ray `reps[k]` (zero-based).
    pub fn reorder(&mut self, reps: &[usize]) -> Result<()> {
        let k = self.partition.classes.len();
        let idx: Vec<usize> = reps.iter().map(|&i| self.partition.class_of(i)).collect();
        let mut seen = idx.clone();
        seen.sort_unstable();
        seen.dedup();
        if reps.len() != k || seen.len() != k {
            return Err(Error::Dimension { expected: k, found: reps.len() });
        }
        self.partition.classes = idx.iter().map(|&c| self.partition.classes[c].clone()).collect();
        self.lambda = self.ring.symbolic_lambda(&self.basis, &self.partition);
        Ok(())
    }
}
