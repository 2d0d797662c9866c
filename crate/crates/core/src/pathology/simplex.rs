//! Fraction-free dictionary simplex for `max c·x` subject to `A x ≤ b`, `x ≥ 0`, `b ≥ 0`,
//! with integer data. Bland's rule throughout.
//!
//! Row `r` stores integers `(den, rhs, a)` for the equation
//! `den·x_{B(r)} + Σ_j a_j·x_{N(j)} = rhs`. The objective row has the same shape with `z` in
//! place of the basic variable.

use num_integer::Integer;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Row {
    den: i128,
    rhs: i128,
    coeffs: Vec<i128>,
}

impl Row {
    fn normalize(&mut self) {
        let mut g = self.den.abs();
        g = g.gcd(&self.rhs);
        for &c in &self.coeffs {
            if g == 1 {
                return;
            }
            g = g.gcd(&c);
        }
        if g > 1 {
            self.den /= g;
            self.rhs /= g;
            for c in &mut self.coeffs {
                *c /= g;
            }
        }
    }
}

/// Optimal value `num/den` and the primal solution as `(numerator, denominator)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub value: (i128, i128),
    pub x: Vec<(i128, i128)>,
    pub pivots: usize,
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::LpOverflow)
}

fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::LpOverflow)
}

/// `rows[i]` lists the variables with coefficient 1 in constraint `i`; all other coefficients are 0.
pub fn solve_01(n: usize, rows: &[Vec<usize>], rhs: &[i128], objective: &[i128]) -> Result<Solution> {
    let m = rows.len();
    let mut tableau: Vec<Row> = rows
        .iter()
        .zip(rhs)
        .map(|(vars, &b)| {
            let mut coeffs = vec![0i128; n];
            for &v in vars {
                coeffs[v] = 1;
            }
            Row { den: 1, rhs: b, coeffs }
        })
        .collect();
    let mut obj = Row {
        den: 1,
        rhs: 0,
        coeffs: objective.iter().map(|&c| -c).collect(),
    };
    // Variable ids: 0..n original, n..n+m slacks.
    let mut nonbasic: Vec<usize> = (0..n).collect();
    let mut basic: Vec<usize> = (n..n + m).collect();
    if rhs.iter().any(|&b| b < 0) {
        return Err(Error::InvalidArgument("negative right-hand side".into()));
    }
    let mut pivots = 0usize;

    loop {
        let entering = (0..n)
            .filter(|&j| obj.coeffs[j] < 0)
            .min_by_key(|&j| nonbasic[j]);
        let Some(s) = entering else { break };

        let mut leave: Option<usize> = None;
        for r in 0..m {
            let a = tableau[r].coeffs[s];
            if a <= 0 {
                continue;
            }
            leave = Some(match leave {
                None => r,
                Some(best) => {
                    let lhs = mul(tableau[r].rhs, tableau[best].coeffs[s])?;
                    let rhs_ = mul(tableau[best].rhs, a)?;
                    if lhs < rhs_ || (lhs == rhs_ && basic[r] < basic[best]) {
                        r
                    } else {
                        best
                    }
                }
            });
        }
        let Some(r) = leave else {
            return Err(Error::InfiniteBound);
        };

        let pivot = tableau[r].clone();
        let a_rs = pivot.coeffs[s];
        let eliminate = |row: &mut Row| -> Result<()> {
            let a_is = row.coeffs[s];
            if a_is == 0 {
                return Ok(());
            }
            row.den = mul(a_rs, row.den)?;
            row.rhs = sub(mul(a_rs, row.rhs)?, mul(a_is, pivot.rhs)?)?;
            for j in 0..n {
                if j == s {
                    row.coeffs[j] = -mul(a_is, pivot.den)?;
                } else {
                    row.coeffs[j] = sub(mul(a_rs, row.coeffs[j])?, mul(a_is, pivot.coeffs[j])?)?;
                }
            }
            row.normalize();
            Ok(())
        };
        for (i, row) in tableau.iter_mut().enumerate() {
            if i != r {
                eliminate(row)?;
            }
        }
        eliminate(&mut obj)?;
        {
            let row = &mut tableau[r];
            row.den = a_rs;
            row.coeffs[s] = pivot.den;
            row.normalize();
        }
        std::mem::swap(&mut basic[r], &mut nonbasic[s]);
        pivots += 1;
    }

    let mut x = vec![(0i128, 1i128); n];
    for (r, &var) in basic.iter().enumerate() {
        if var < n {
            let row = &tableau[r];
            let g = row.rhs.gcd(&row.den).max(1);
            x[var] = (row.rhs / g, row.den / g);
        }
    }
    let g = obj.rhs.gcd(&obj.den).max(1);
    Ok(Solution {
        value: (obj.rhs / g, obj.den / g),
        x,
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_constraint() {
        let s = solve_01(2, &[vec![0, 1]], &[3], &[1, 1]).unwrap();
        assert_eq!(s.value, (3, 1));
    }

    #[test]
    fn fractional_optimum() {
        // x+y ≤ 1, y+z ≤ 1, x+z ≤ 1, maximize x+y+z → 3/2.
        let rows = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        let s = solve_01(3, &rows, &[1, 1, 1], &[1, 1, 1]).unwrap();
        assert_eq!(s.value, (3, 2));
        assert!(s.x.iter().all(|&(p, q)| p * 2 == q));
    }

    #[test]
    fn unbounded_is_reported() {
        assert_eq!(solve_01(2, &[vec![0]], &[1], &[1, 1]), Err(Error::InfiniteBound));
    }

    #[test]
    fn degenerate_cycle_free() {
        let rows = vec![vec![0, 1], vec![0], vec![1], vec![0, 1]];
        let s = solve_01(2, &rows, &[0, 0, 0, 2], &[1, 1]).unwrap();
        assert_eq!(s.value, (0, 1));
    }
}
