//! Fans of smooth complete toric 4-folds given by their primitive relations.

mod catalog;
mod complex;
mod coords;

pub use catalog::{parse_catalog, DEFAULT_CATALOG, HEADER};
pub use complex::{build_face_complex, validate_variety, FaceComplex, ValidationReport};
pub use coords::{solve_ray_coordinates, solve_with_free_rays, ray_coordinates_satisfy};

use serde::Serialize;

/// A primitive vector of the lattice `N = Z^4`.
pub type LatticeVector = [i64; 4];

/// `sum_{i in lhs} x_i = sum_j c_j x_j`, indices zero-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveRelation {
    pub lhs: Vec<usize>,
    pub rhs: Vec<(usize, i64)>,
}

impl PrimitiveRelation {
    pub fn lhs_mask(&self) -> u32 {
        self.lhs.iter().fold(0, |m, &i| m | (1 << i))
    }

    /// Row of the relation matrix: `+1` on the lhs, `-c` on the rhs.
    pub fn row(&self, rays: usize) -> Vec<i64> {
        let mut v = vec![0; rays];
        for &i in &self.lhs {
            v[i] += 1;
        }
        for &(j, c) in &self.rhs {
            v[j] -= c;
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiteratureStatus {
    Existing,
    Excluded,
    Open,
}

impl LiteratureStatus {
    pub fn symbol(self) -> &'static str {
        match self {
            LiteratureStatus::Existing => "✓",
            LiteratureStatus::Excluded => "×",
            LiteratureStatus::Open => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub status: LiteratureStatus,
    pub citation: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanPresentation {
    pub id: String,
    pub rays: usize,
    pub relations: Vec<PrimitiveRelation>,
    /// A^2 basis monomials `D_i D_j`, zero-based with `i <= j`.
    pub basis: Vec<(usize, usize)>,
    pub annotation: Option<Annotation>,
}

impl FanPresentation {
    pub fn relation_matrix(&self) -> Vec<Vec<i64>> {
        self.relations.iter().map(|r| r.row(self.rays)).collect()
    }

    pub fn minimal_nonfaces(&self) -> Vec<u32> {
        self.relations.iter().map(|r| r.lhs_mask()).collect()
    }
}

pub(crate) fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}
