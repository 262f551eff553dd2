//! Exact Gaussian elimination over the rationals with many right-hand sides.

use num_traits::Zero;

use crate::scalar::Q;

#[derive(Clone, Debug)]
pub struct Solution {
    /// `x[unknown][rhs]`; free unknowns are set to zero.
    pub x: Vec<Vec<Q>>,
    /// Indices of unknowns not fixed by the equations.
    pub free: Vec<usize>,
    /// `(equation, rhs)` pairs where `A x != b`.
    pub residual: Vec<(usize, usize)>,
}

impl Solution {
    pub fn is_exact(&self) -> bool {
        self.residual.is_empty()
    }

    pub fn is_unique(&self) -> bool {
        self.free.is_empty()
    }
}

/// Solves `A x = B` for `x`, where `a` is `rows x cols` and `b` is `rows x k`.
pub fn solve(a: &[Vec<Q>], b: &[Vec<Q>]) -> Solution {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let k = b.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).cloned().collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::from_integer(1.into()) / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let mut x = vec![vec![Q::zero(); k]; cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols..].to_vec();
    }
    let free = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut residual = Vec::new();
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        for (j, target) in rb.iter().enumerate() {
            let lhs = ra
                .iter()
                .zip(&x)
                .filter(|(c, _)| !c.is_zero())
                .fold(Q::zero(), |acc, (c, xv)| acc + c * &xv[j]);
            if &lhs != target {
                residual.push((i, j));
            }
        }
    }
    Solution { x, free, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn solves_square_system() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let b = vec![vec![q(3), q(1)], vec![q(5), q(0)]];
        let s = solve(&a, &b);
        assert!(s.is_exact() && s.is_unique());
        assert_eq!(s.x[0][0], crate::scalar::q2(4, 5));
        assert_eq!(s.x[1][0], crate::scalar::q2(7, 5));
    }

    #[test]
    fn reports_inconsistency_and_freedom() {
        let a = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        let b = vec![vec![q(1)], vec![q(3)]];
        let s = solve(&a, &b);
        assert!(!s.is_exact());
        assert_eq!(s.free, vec![1]);
    }
}
