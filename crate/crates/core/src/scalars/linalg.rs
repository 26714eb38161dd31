use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Reduced row echelon form over ℚ. Returns the reduced rows (zero rows
/// dropped) and the pivot columns.
pub fn rref(rows: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot = m[r].clone();
                for (e, v) in m[i].iter_mut().zip(&pivot) {
                    *e -= &f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    rref(rows).1.len()
}

/// Whether `v` lies in the row span of `rows`.
pub fn span_contains(rows: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    let mut stacked = rows.to_vec();
    stacked.push(v.to_vec());
    rank(&stacked) == rank(rows)
}

/// Basis of the left kernel `{v ∈ ℚⁿ : vA = 0}` of an n×m matrix.
///
/// One vector per free coordinate, in increasing order: it is 1 there, 0 on
/// the other free coordinates, and determined on the pivots.
pub fn rational_kernel_basis(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let m = a[0].len();
    // vA = 0 ⟺ Aᵀvᵀ = 0
    let at: Vec<Vec<BigRational>> = (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect();
    let (red, pivots) = rref(&at);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (row, &p) in red.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    fn times(v: &[BigRational], a: &[Vec<BigRational>]) -> Vec<BigRational> {
        (0..a[0].len())
            .map(|j| v.iter().zip(a).map(|(x, row)| x * &row[j]).sum())
            .collect()
    }

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(rational_kernel_basis(&mat(&[&[1, 0], &[0, 1]])).is_empty());
    }

    #[test]
    fn column_of_ones() {
        let basis = rational_kernel_basis(&mat(&[&[1], &[1]]));
        assert_eq!(basis.len(), 1);
        assert!(span_contains(&basis, &[q(1), q(-1)]));
    }

    #[test]
    fn rank_one_square() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        let basis = rational_kernel_basis(&a);
        assert_eq!(basis, vec![vec![q(-2), q(1)]]);
        assert!(times(&basis[0], &a).iter().all(Zero::is_zero));
    }

    #[test]
    fn kernel_vectors_are_annihilated_and_maximal() {
        let a = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1], &[1, 3, 4]]);
        let basis = rational_kernel_basis(&a);
        assert_eq!(basis.len(), a.len() - rank(&a));
        for v in &basis {
            assert!(times(v, &a).iter().all(Zero::is_zero));
        }
        for i in 0..a.len() {
            let mut e = vec![q(0); a.len()];
            e[i] = q(1);
            if !span_contains(&basis, &e) {
                let mut more = basis.clone();
                more.push(e);
                assert_eq!(rank(&more), basis.len() + 1);
            }
        }
    }
}
