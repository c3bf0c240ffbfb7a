//! Exact integer and rational linear algebra on small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(m: &[Vec<i64>]) -> Result<i128> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .ok_or_else(|| overflow("determinant"))?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

fn to_rational(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect()
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
pub fn rref(a: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<i64>]) -> usize {
    let mut a = to_rational(m);
    rref(&mut a).len()
}

/// Solves `a x = b` over the rationals when the solution is unique.
pub fn solve_unique(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<BigRational>> {
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, &y)| {
            r.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .chain(std::iter::once(BigRational::from_integer(y.into())))
                .collect()
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.contains(&n) {
        return None;
    }
    Some((0..n).map(|i| aug[i][n].clone()).collect())
}

pub fn rational_to_i64(x: &BigRational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// Inverse of a square integer matrix scaled by |det|: returns `(adj, d)` with
/// `m * adj = d * I` and `d > 0`.
pub fn scaled_inverse(m: &[Vec<i64>]) -> Result<(IntMatrix, i64)> {
    let n = m.len();
    let d = det(m)?;
    if d == 0 {
        return Err(Error::Singular);
    }
    let d = d.abs();
    let di = i64::try_from(d).map_err(|_| overflow("inverse"))?;
    let mut aug: Vec<Vec<BigRational>> = to_rational(m);
    for (i, row) in aug.iter_mut().enumerate() {
        for j in 0..n {
            row.push(if i == j {
                BigRational::from_integer(BigInt::from(di))
            } else {
                BigRational::zero()
            });
        }
    }
    rref(&mut aug);
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = rational_to_i64(&aug[i][n + j]).ok_or_else(|| overflow("inverse"))?;
        }
    }
    Ok((out, di))
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Column echelon form by unimodular column operations: returns `(h, u, rank)`
/// with `m * u = h`, the first `rank` columns of `h` in echelon form and the
/// remaining columns zero.
pub fn column_echelon(m: &[Vec<i64>], cols: usize) -> Result<(Vec<Vec<i128>>, Vec<Vec<i128>>, usize)> {
    let rows = m.len();
    let mut h: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut c = 0;
    for r in 0..rows {
        if c == cols {
            break;
        }
        for j in c + 1..cols {
            if h[r][j] == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(h[r][c], h[r][j]);
            let (p, q) = (h[r][c] / g, h[r][j] / g);
            // [col_c, col_j] <- [x col_c + y col_j, -q col_c + p col_j]
            let combine = |mat: &mut Vec<Vec<i128>>| -> Result<()> {
                for row in mat.iter_mut() {
                    let (a, b) = (row[c], row[j]);
                    let nc = x
                        .checked_mul(a)
                        .and_then(|s| s.checked_add(y.checked_mul(b)?))
                        .ok_or_else(|| overflow("hermite form"))?;
                    let nj = p
                        .checked_mul(b)
                        .and_then(|s| s.checked_sub(q.checked_mul(a)?))
                        .ok_or_else(|| overflow("hermite form"))?;
                    row[c] = nc;
                    row[j] = nj;
                }
                Ok(())
            };
            combine(&mut h)?;
            combine(&mut u)?;
        }
        if h[r][c] != 0 {
            if h[r][c] < 0 {
                for row in h.iter_mut().chain(u.iter_mut()) {
                    row[c] = -row[c];
                }
            }
            c += 1;
        }
    }
    Ok((h, u, c))
}

/// Basis of the integer kernel `{x : m x = 0}` as columns of the returned
/// `cols x k` matrix.
pub fn integer_kernel(m: &[Vec<i64>], cols: usize) -> Result<IntMatrix> {
    let (_, u, rank) = column_echelon(m, cols)?;
    let mut out = vec![Vec::with_capacity(cols - rank); cols];
    for (i, row) in u.iter().enumerate() {
        for &x in &row[rank..] {
            out[i].push(i64::try_from(x).map_err(|_| overflow("kernel"))?);
        }
    }
    Ok(out)
}

/// True when the rows of `m` span a saturated sublattice (all elementary
/// divisors equal one).
pub fn is_saturated(m: &[Vec<i64>], cols: usize) -> Result<bool> {
    let (h, _, rank) = column_echelon(m, cols)?;
    if rank < m.len() {
        return Ok(false);
    }
    // the square echelon block is lower triangular with nonzero diagonal
    let mut r = 0;
    for c in 0..rank {
        while h[r][c] == 0 {
            r += 1;
        }
        if h[r][c] != 1 {
            return Ok(false);
        }
        r += 1;
    }
    Ok(true)
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<IntMatrix> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s: i128 = 0;
                    for k in 0..inner {
                        s += row[k] as i128 * b[k][j] as i128;
                    }
                    i64::try_from(s).map_err(|_| overflow("matrix product"))
                })
                .collect()
        })
        .collect()
}

/// Characteristic polynomial `det(t I - m)` by Berkowitz's division-free
/// algorithm, coefficients from the leading one down to the constant term.
pub fn charpoly(m: &[Vec<i64>]) -> Vec<BigInt> {
    if let Some(c) = charpoly_i128(m) {
        return c.into_iter().map(BigInt::from).collect();
    }
    charpoly_big(m)
}

fn charpoly_i128(m: &[Vec<i64>]) -> Option<Vec<i128>> {
    let n = m.len();
    let a = |i: usize, j: usize| m[i][j] as i128;
    // coefficient vector for the leading 1x1 block
    let mut c: Vec<i128> = vec![1, -a(0, 0)];
    if n == 0 {
        return Some(vec![1]);
    }
    for k in 1..n {
        // Toeplitz column for the (k+1)x(k+1) principal block
        let r: Vec<i128> = (0..k).map(|j| a(k, j)).collect();
        let s: Vec<i128> = (0..k).map(|i| a(i, k)).collect();
        let mut col = Vec::with_capacity(k + 2);
        col.push(1i128);
        col.push(-a(k, k));
        let mut v = s.clone();
        for _ in 0..k {
            let mut rv: i128 = 0;
            for j in 0..k {
                rv = rv.checked_add(r[j].checked_mul(v[j])?)?;
            }
            col.push(rv.checked_neg()?);
            let mut nv = vec![0i128; k];
            for i in 0..k {
                let mut t: i128 = 0;
                for j in 0..k {
                    t = t.checked_add(a(i, j).checked_mul(v[j])?)?;
                }
                nv[i] = t;
            }
            v = nv;
        }
        let mut next = vec![0i128; k + 2];
        for i in 0..k + 2 {
            let mut t: i128 = 0;
            for j in 0..=i.min(k) {
                t = t.checked_add(col[i - j].checked_mul(c[j])?)?;
            }
            next[i] = t;
        }
        c = next;
    }
    Some(c)
}

fn charpoly_big(m: &[Vec<i64>]) -> Vec<BigInt> {
    let n = m.len();
    let a = |i: usize, j: usize| BigInt::from(m[i][j]);
    if n == 0 {
        return vec![BigInt::one()];
    }
    let mut c: Vec<BigInt> = vec![BigInt::one(), -a(0, 0)];
    for k in 1..n {
        let r: Vec<BigInt> = (0..k).map(|j| a(k, j)).collect();
        let mut v: Vec<BigInt> = (0..k).map(|i| a(i, k)).collect();
        let mut col = vec![BigInt::one(), -a(k, k)];
        for _ in 0..k {
            let rv: BigInt = (0..k).map(|j| &r[j] * &v[j]).sum();
            col.push(-rv);
            v = (0..k)
                .map(|i| (0..k).map(|j| a(i, j) * &v[j]).sum())
                .collect();
        }
        c = (0..k + 2)
            .map(|i| (0..=i.min(k)).map(|j| &col[i - j] * &c[j]).sum())
            .collect();
    }
    c
}

/// Number of sign changes in a coefficient sequence, zeros skipped.
pub fn sign_variations(coeffs: &[BigInt]) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for c in coeffs {
        let s = if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Inertia `(positive, negative, zero)` of a real symmetric integer matrix
/// read off its characteristic polynomial by Descartes' rule, exact because
/// every root is real.
pub fn inertia(m: &[Vec<i64>]) -> (usize, usize, usize) {
    let n = m.len();
    let c = charpoly(m);
    let zero = c.iter().rev().take_while(|x| x.is_zero()).count();
    let pos = sign_variations(&c);
    let flipped: Vec<BigInt> = c
        .iter()
        .enumerate()
        .map(|(i, x)| if (n - i) % 2 == 1 { -x } else { x.clone() })
        .collect();
    let neg = sign_variations(&flipped);
    (pos, neg, zero)
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}
