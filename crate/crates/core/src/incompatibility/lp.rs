//! Exact feasibility of `A x = b, x >= 0` over the rationals.
//!
//! Phase I of the simplex method with one artificial variable per row and
//! Bland's anti-cycling rule. Phase I minimizes `|A x - b|_1` over `x >= 0`;
//! a positive optimum comes with a Farkas vector `z`, `A^T z >= 0`, whose
//! value `b^T z` is minus that optimum.

use num::{BigRational, One, Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub enum LpVerdict {
    Feasible(Vec<BigRational>),
    Infeasible(Vec<BigRational>),
}

/// Exact feasibility: feasible only if the phase I optimum is zero.
pub fn feasibility(a: &[Vec<BigRational>], b: &[BigRational]) -> LpVerdict {
    let p = phase_one(a, b);
    if p.residual.is_zero() {
        LpVerdict::Feasible(p.x)
    } else {
        LpVerdict::Infeasible(p.z)
    }
}

/// Optimum of phase I.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOne {
    /// Minimizer of `|A x - b|_1` over `x >= 0`.
    pub x: Vec<BigRational>,
    /// `|A x - b|_1` at `x`.
    pub residual: BigRational,
    /// Dual vector with `A^T z >= 0` and `b^T z = -residual`; all zero when
    /// the residual is zero.
    pub z: Vec<BigRational>,
}

/// Runs phase I on a dense `rows x cols` system.
pub fn phase_one(a: &[Vec<BigRational>], b: &[BigRational]) -> PhaseOne {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let flipped: Vec<bool> = b.iter().map(Signed::is_negative).collect();

    // tableau rows [A | I | b] with rows flipped so that b >= 0
    let mut rows: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let sign = if flipped[i] { -BigRational::one() } else { BigRational::one() };
            let mut row = Vec::with_capacity(width);
            row.extend(a[i].iter().map(|v| v * &sign));
            row.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
            row.push(&b[i] * &sign);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs of "minimize sum of artificials"; last entry is -objective
    let mut cost = vec![BigRational::zero(); width];
    for row in &rows {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        // ratio test, ties broken by the smallest basic index
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width - 1] / &row[enter];
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            // unbounded direction; cannot happen for a phase I bounded below by 0
            break;
        };
        pivot(&mut rows, &mut cost, r, enter);
        basis[r] = enter;
    }

    let residual = -&cost[width - 1];
    let mut x = vec![BigRational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = rows[i][width - 1].clone();
        }
    }
    let z = if residual.is_zero() {
        vec![BigRational::zero(); m]
    } else {
        // artificial k has cost 1, so its reduced cost is 1 - y_k
        (0..m)
            .map(|k| {
                let y = BigRational::one() - &cost[n + k];
                if flipped[k] {
                    y
                } else {
                    -y
                }
            })
            .collect()
    };
    PhaseOne { x, residual, z }
}

fn pivot(rows: &mut [Vec<BigRational>], cost: &mut [BigRational], r: usize, col: usize) {
    let p = rows[r][col].clone();
    for v in rows[r].iter_mut() {
        *v /= &p;
    }
    let pivot_row = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i == r || row[col].is_zero() {
            continue;
        }
        let f = row[col].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    if !cost[col].is_zero() {
        let f = cost[col].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}

/// Checks `A^T z >= 0` and `b^T z < 0` exactly.
pub fn is_farkas_certificate(a: &[Vec<BigRational>], b: &[BigRational], z: &[BigRational]) -> bool {
    let n = a.first().map_or(0, Vec::len);
    let columns_ok = (0..n).all(|j| {
        let s: BigRational = a.iter().zip(z).map(|(row, zi)| &row[j] * zi).sum();
        !s.is_negative()
    });
    let bz: BigRational = b.iter().zip(z).map(|(bi, zi)| bi * zi).sum();
    columns_ok && bz.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn rows(m: &[&[i64]]) -> Vec<Vec<BigRational>> {
        m.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect()
    }

    #[test]
    fn feasible_system() {
        // x + y = 1, x - y = 1/2
        let a = rows(&[&[1, 1], &[1, -1]]);
        let b = vec![q(1, 1), q(1, 2)];
        match feasibility(&a, &b) {
            LpVerdict::Feasible(x) => assert_eq!(x, vec![q(3, 4), q(1, 4)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_system_has_certificate() {
        // x + y = 1, x + y = 2
        let a = rows(&[&[1, 1], &[1, 1]]);
        let b = vec![q(1, 1), q(2, 1)];
        match feasibility(&a, &b) {
            LpVerdict::Infeasible(z) => assert!(is_farkas_certificate(&a, &b, &z)),
            other => panic!("{other:?}"),
        }
        // x - y = -1 with x, y >= 0 is feasible; x + y = -1 is not
        let a = rows(&[&[1, 1]]);
        let b = vec![q(-1, 1)];
        match feasibility(&a, &b) {
            LpVerdict::Infeasible(z) => assert!(is_farkas_certificate(&a, &b, &z)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(feasibility(&rows(&[&[1, -1]]), &b), LpVerdict::Feasible(_)));
    }

    #[test]
    fn phase_one_reports_the_l1_residual() {
        // x = 1 and x = 1 + 1/1000 cannot both hold; best residual 1/1000
        let a = rows(&[&[1], &[1]]);
        let b = vec![q(1, 1), q(1001, 1000)];
        let p = phase_one(&a, &b);
        assert_eq!(p.residual, q(1, 1000));
        let bz: BigRational = b.iter().zip(&p.z).map(|(bi, zi)| bi * zi).sum();
        assert_eq!(bz, -p.residual.clone());
        assert!(is_farkas_certificate(&a, &b, &p.z));
    }

    #[test]
    fn redundant_rows_are_fine() {
        let a = rows(&[&[1, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, 1, 1]]);
        let b = vec![q(1, 3), q(2, 3), q(1, 1), q(1, 1)];
        let LpVerdict::Feasible(x) = feasibility(&a, &b) else { panic!() };
        for (row, bi) in a.iter().zip(&b) {
            let s: BigRational = row.iter().zip(&x).map(|(r, v)| r * v).sum();
            assert_eq!(&s, bi);
        }
        assert!(x.iter().all(|v| !v.is_negative()));
    }
}
