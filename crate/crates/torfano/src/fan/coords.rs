use super::{FanPresentation, LatticeVector};
use crate::error::{Error, Result};
use crate::linalg::{gcd_slice, rank, rational_to_i64, solve_unique};

fn subsets4(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).flat_map(move |a| {
        (a + 1..n).flat_map(move |b| {
            (b + 1..n).flat_map(move |c| (c + 1..n).map(move |d| [a, b, c, d]))
        })
    })
}

/// Solves the relations with the rays in `free` sent to the standard basis.
pub fn solve_with_free_rays(pres: &FanPresentation, free: [usize; 4]) -> Result<Vec<LatticeVector>> {
    let r = pres.rays;
    let rel = pres.relation_matrix();
    let bound: Vec<usize> = (0..r).filter(|i| !free.contains(i)).collect();
    let sub: Vec<Vec<i64>> = rel.iter().map(|row| bound.iter().map(|&j| row[j]).collect()).collect();
    let mut coords = vec![[0i64; 4]; r];
    for (k, &f) in free.iter().enumerate() {
        coords[f][k] = 1;
        let rhs: Vec<i64> = rel.iter().map(|row| -row[f]).collect();
        let sol = solve_unique(&sub, &rhs).ok_or(Error::NoUnimodularElimination)?;
        for (t, &j) in bound.iter().enumerate() {
            coords[j][k] = rational_to_i64(&sol[t]).ok_or(Error::NoUnimodularElimination)?;
        }
    }
    for (i, v) in coords.iter().enumerate() {
        if gcd_slice(v) != 1 {
            return Err(Error::ImprimitiveRay(i + 1));
        }
    }
    Ok(coords)
}

/// Integer ray generators solving every primitive relation. The free rays are
/// the lexicographically first four indices whose elimination is integral.
pub fn solve_ray_coordinates(pres: &FanPresentation) -> Result<Vec<LatticeVector>> {
    let r = pres.rays;
    let rk = rank(&pres.relation_matrix());
    if rk + 4 != r {
        return Err(Error::RelationRank { found: rk, expected: r.saturating_sub(4) });
    }
    let mut degenerate = None;
    for free in subsets4(r) {
        match solve_with_free_rays(pres, free) {
            Ok(c) => return Ok(c),
            Err(e @ Error::ImprimitiveRay(_)) => {
                degenerate.get_or_insert(e);
            }
            Err(_) => {}
        }
    }
    Err(degenerate.unwrap_or(Error::NoUnimodularElimination))
}

pub fn ray_coordinates_satisfy(pres: &FanPresentation, coords: &[LatticeVector]) -> bool {
    pres.relations.iter().all(|rel| {
        (0..4).all(|k| {
            let l: i64 = rel.lhs.iter().map(|&i| coords[i][k]).sum();
            let r: i64 = rel.rhs.iter().map(|&(j, c)| c * coords[j][k]).sum();
            l == r
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::parse_catalog;

    fn one(text: &str) -> FanPresentation {
        parse_catalog(&format!("torfano-v1\n{text}")).unwrap().remove(0)
    }

    #[test]
    fn projective_space() {
        let p = one("variety P\nrays 5\nrelation 1 2 3 4 5 = 0");
        let c = solve_ray_coordinates(&p).unwrap();
        assert_eq!(&c[..4], &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(c[4], [-1, -1, -1, -1]);
    }

    #[test]
    fn c1_solves() {
        let p = one("variety C1\nrays 6\nrelation 1 2 3 = 0\nrelation 4 5 6 = 2*1");
        let c = solve_ray_coordinates(&p).unwrap();
        assert!(ray_coordinates_satisfy(&p, &c));
    }

    #[test]
    fn degenerate_system() {
        use crate::fan::PrimitiveRelation;
        let p = FanPresentation {
            id: "X".into(),
            rays: 6,
            relations: vec![
                PrimitiveRelation { lhs: vec![0, 1], rhs: vec![] },
                PrimitiveRelation { lhs: vec![0, 1], rhs: vec![(2, 1)] },
            ],
            basis: vec![],
            annotation: None,
        };
        assert_eq!(solve_ray_coordinates(&p), Err(Error::ImprimitiveRay(3)));
    }
}
