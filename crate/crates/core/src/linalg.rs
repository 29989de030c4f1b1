//! Exact rank and null-space computations.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
/// Returns `None` if an intermediate value overflows `i128`.
pub fn integer_rank(rows: &[Vec<i64>]) -> Option<usize> {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let height = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..width {
        if rank == height {
            break;
        }
        let Some(p) = (rank..height).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..height {
            for c in col + 1..width {
                let v = m[r][c].checked_mul(m[rank][col])?.checked_sub(m[r][col].checked_mul(m[rank][c])?)?;
                m[r][c] = v / prev;
            }
            m[r][col] = 0;
        }
        prev = m[rank][col];
        rank += 1;
    }
    Some(rank)
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let height = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..width {
        if row == height {
            break;
        }
        let Some(p) = (row..height).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Rational::one() / &m[row][col];
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (v, pv) in other.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// For a matrix of rank `width - 1`, the (unique up to scale) null vector.
pub fn null_vector(rows: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let width = rows.first()?.len();
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    if pivots.len() + 1 != width {
        return None;
    }
    let free = (0..width).find(|c| !pivots.contains(c))?;
    let mut v = vec![Rational::zero(); width];
    v[free] = Rational::one();
    for (r, &p) in pivots.iter().enumerate() {
        v[p] = -m[r][free].clone();
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn ranks_agree() {
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![1, 2, 3], vec![2, 4, 6]],
            vec![vec![2, 1, 1, 0], vec![0, 1, 0, 1], vec![0, 0, 1, 1]],
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]],
        ];
        for m in cases {
            let r: Vec<Vec<Rational>> = m.iter().map(|row| row.iter().map(|&v| int(v)).collect()).collect();
            assert_eq!(integer_rank(&m), Some(rank(&r)), "{m:?}");
        }
        assert_eq!(integer_rank(&[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]), Some(3));
        assert_eq!(integer_rank(&[vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1], vec![1, 0, 0, 1]]), Some(3));
    }

    #[test]
    fn null_vector_of_plane() {
        let rows = vec![vec![int(1), int(1), int(0)], vec![int(0), int(1), int(1)]];
        let v = null_vector(&rows).unwrap();
        assert_eq!(v, vec![int(1), int(-1), int(1)]);
        assert!(null_vector(&[vec![int(1), int(1), int(0)]]).is_none());
    }
}
