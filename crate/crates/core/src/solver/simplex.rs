//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Works on `maximize c·x` subject to `a·x (≤|≥) b`, `x ≥ 0`. Free variables
//! are split by the caller.

use crate::canonical::Sense;

#[derive(Debug, Clone)]
pub(crate) struct DenseRow {
    pub coefficients: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SimplexOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
    IterationLimit,
}

const MAX_PIVOTS: usize = 100_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    pivot_tol: f64,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, e: usize, obj: &mut [f64]) {
        let p = self.rows[r][e];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[e];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[e] = 0.0;
            }
        }
        let f = obj[e];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            obj[e] = 0.0;
        }
        self.basis[r] = e;
    }

    /// Reduced costs for maximizing `cost`, given the current basis. The
    /// last entry holds minus the objective value.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        d.push(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (v, t) in d.iter_mut().zip(&self.rows[i]) {
                    *v -= cb * t;
                }
            }
        }
        d
    }

    /// One Bland step over columns `allowed`.
    fn step(&mut self, obj: &mut [f64], allowed: usize) -> Step {
        let Some(e) = (0..allowed).find(|&j| obj[j] > self.pivot_tol) else {
            return Step::Optimal;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.rows.len() {
            let a = self.rows[i][e];
            if a > self.pivot_tol {
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        let tie = (ratio - lr).abs() <= self.pivot_tol * lr.abs().max(1.0);
                        if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        match leave {
            None => Step::Unbounded,
            Some((r, _)) => {
                self.pivot(r, e, obj);
                Step::Pivoted
            }
        }
    }
}

pub(crate) fn maximize(c: &[f64], rows: &[DenseRow], pivot_tol: f64, feas_tol: f64) -> SimplexOutcome {
    let n = c.len();
    let m = rows.len();
    let n_art = rows.iter().filter(|r| (r.rhs < 0.0) != (r.sense == Sense::Ge)).count();
    let ncols = n + m + n_art;
    let mut tab = Tableau { rows: Vec::with_capacity(m), basis: Vec::with_capacity(m), ncols, pivot_tol };
    let mut art = n + m;
    for (i, r) in rows.iter().enumerate() {
        let flip = r.rhs < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        let sense = if flip { r.sense.flip() } else { r.sense };
        let mut row = vec![0.0; ncols + 1];
        for (j, a) in r.coefficients.iter().enumerate() {
            row[j] = sign * a;
        }
        row[ncols] = sign * r.rhs;
        match sense {
            Sense::Le => {
                row[n + i] = 1.0;
                tab.basis.push(n + i);
            }
            Sense::Ge => {
                row[n + i] = -1.0;
                row[art] = 1.0;
                tab.basis.push(art);
                art += 1;
            }
        }
        tab.rows.push(row);
    }

    let mut pivots = 0;
    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        cost[n + m..].iter_mut().for_each(|v| *v = -1.0);
        let mut obj = tab.reduced_costs(&cost);
        loop {
            pivots += 1;
            if pivots > MAX_PIVOTS {
                return SimplexOutcome::IterationLimit;
            }
            match tab.step(&mut obj, ncols) {
                Step::Optimal => break,
                // phase one is bounded below by zero
                Step::Unbounded => unreachable!("phase one objective is bounded"),
                Step::Pivoted => {}
            }
        }
        let infeasibility: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b >= n + m)
            .map(|(i, _)| tab.rhs(i))
            .sum();
        let scale = rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
        if infeasibility > feas_tol * scale {
            return SimplexOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= n + m
                && let Some(j) = (0..n + m).find(|&j| tab.rows[i][j].abs() > pivot_tol)
            {
                tab.pivot(i, j, &mut obj);
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    cost[..n].copy_from_slice(c);
    let mut obj = tab.reduced_costs(&cost);
    loop {
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return SimplexOutcome::IterationLimit;
        }
        match tab.step(&mut obj, n + m) {
            Step::Optimal => break,
            Step::Unbounded => return SimplexOutcome::Unbounded,
            Step::Pivoted => {}
        }
    }
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(i).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    SimplexOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(c: &[f64], sense: Sense, rhs: f64) -> DenseRow {
        DenseRow { coefficients: c.to_vec(), sense, rhs }
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y; x ≤ 4; 2y ≤ 12; 3x + 2y ≤ 18 → (2, 6), 36
        let out = maximize(
            &[3.0, 5.0],
            &[row(&[1.0, 0.0], Sense::Le, 4.0), row(&[0.0, 2.0], Sense::Le, 12.0), row(&[3.0, 2.0], Sense::Le, 18.0)],
            1e-9,
            1e-9,
        );
        match out {
            SimplexOutcome::Optimal { x, value } => {
                assert!((value - 36.0).abs() < 1e-9);
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn needs_phase_one() {
        // min x + y (max -x - y); x + y ≥ 2; x - y ≥ -1 → value -2
        let out = maximize(
            &[-1.0, -1.0],
            &[row(&[1.0, 1.0], Sense::Ge, 2.0), row(&[1.0, -1.0], Sense::Ge, -1.0)],
            1e-9,
            1e-9,
        );
        assert!(matches!(out, SimplexOutcome::Optimal { value, .. } if (value + 2.0).abs() < 1e-9));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let inf = maximize(&[1.0], &[row(&[1.0], Sense::Le, 1.0), row(&[1.0], Sense::Ge, 2.0)], 1e-9, 1e-9);
        assert_eq!(inf, SimplexOutcome::Infeasible);
        let unb = maximize(&[1.0], &[row(&[1.0], Sense::Ge, 5.0)], 1e-9, 1e-9);
        assert_eq!(unb, SimplexOutcome::Unbounded);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let out = maximize(
            &[0.75, -150.0, 1.0 / 50.0, -6.0],
            &[
                row(&[0.25, -60.0, -1.0 / 25.0, 9.0], Sense::Le, 0.0),
                row(&[0.5, -90.0, -1.0 / 50.0, 3.0], Sense::Le, 0.0),
                row(&[0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0),
            ],
            1e-9,
            1e-9,
        );
        assert!(matches!(out, SimplexOutcome::Optimal { value, .. } if (value - 0.05).abs() < 1e-9));
    }
}
