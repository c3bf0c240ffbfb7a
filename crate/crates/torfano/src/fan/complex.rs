use std::collections::HashMap;

use serde::Serialize;

use super::{mask_indices, FanPresentation, LatticeVector};
use crate::linalg::det;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceComplex {
    pub rays: usize,
    pub minimal_nonfaces: Vec<u32>,
    /// Nonempty faces as ray bitmasks, ordered lexicographically by index list.
    pub faces: Vec<u32>,
    pub maximal_cones: Vec<u32>,
    pub euler: usize,
}

impl FaceComplex {
    pub fn is_face(&self, mask: u32) -> bool {
        self.minimal_nonfaces.iter().all(|&n| n & mask != n)
    }

    pub fn is_maximal_cone(&self, mask: u32) -> bool {
        mask.count_ones() == 4 && self.is_face(mask)
    }

    pub fn face_lists(&self) -> Vec<Vec<usize>> {
        self.faces.iter().map(|&m| mask_indices(m)).collect()
    }
}

pub fn build_face_complex(pres: &FanPresentation) -> FaceComplex {
    let nonfaces = pres.minimal_nonfaces();
    let r = pres.rays;
    let mut faces: Vec<u32> = (1u32..(1 << r))
        .filter(|m| m.count_ones() <= 4 && nonfaces.iter().all(|&n| n & m != n))
        .collect();
    faces.sort_by_key(|&m| mask_indices(m));
    let maximal_cones: Vec<u32> = faces.iter().copied().filter(|m| m.count_ones() == 4).collect();
    let euler = maximal_cones.len();
    FaceComplex { rays: r, minimal_nonfaces: nonfaces, faces, maximal_cones, euler }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub is_smooth: bool,
    pub is_complete: bool,
    pub euler: usize,
    pub betti2: usize,
    pub betti4: i64,
    pub problems: Vec<String>,
}

fn cone_matrix(mask: u32, coords: &[LatticeVector]) -> Vec<Vec<i64>> {
    mask_indices(mask).iter().map(|&i| coords[i].to_vec()).collect()
}

pub fn validate_variety(
    pres: &FanPresentation,
    coords: &[LatticeVector],
    complex: &FaceComplex,
) -> ValidationReport {
    let mut problems = Vec::new();
    let mut is_smooth = true;
    for &c in &complex.maximal_cones {
        let d = det(&cone_matrix(c, coords)).unwrap_or(0);
        if d.abs() != 1 {
            is_smooth = false;
            problems.push(format!("cone {:?} has determinant {d}", one_based(c)));
        }
    }
    let mut walls: HashMap<u32, Vec<usize>> = HashMap::new();
    for (k, &c) in complex.maximal_cones.iter().enumerate() {
        for i in mask_indices(c) {
            walls.entry(c & !(1 << i)).or_default().push(k);
        }
    }
    let mut is_complete = !complex.maximal_cones.is_empty();
    for &f in complex.faces.iter().filter(|m| m.count_ones() == 3) {
        let n = walls.get(&f).map_or(0, Vec::len);
        if n != 2 {
            is_complete = false;
            problems.push(format!("3-face {:?} lies in {n} maximal cones", one_based(f)));
        }
    }
    // dual graph connectivity
    let n = complex.maximal_cones.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for cones in walls.values() {
        for w in cones.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let roots = (0..n).filter(|&i| find(&mut parent, i) == i).count();
    if roots > 1 {
        is_complete = false;
        problems.push(format!("dual graph has {roots} components"));
    }
    let betti2 = pres.rays - 4;
    ValidationReport {
        is_smooth,
        is_complete,
        euler: complex.euler,
        betti2,
        betti4: complex.euler as i64 - 2 * betti2 as i64 - 2,
        problems,
    }
}

fn one_based(mask: u32) -> Vec<usize> {
    mask_indices(mask).iter().map(|i| i + 1).collect()
}
