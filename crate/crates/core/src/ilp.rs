//! Exact linear and integer programming over the nonnegative orthant.
//!
//! Problems are `min c.x` subject to `A x <= b`, `x >= 0`, solved with a
//! dense two-phase simplex (Bland's rule) over rationals, and branch and bound
//! for integrality.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub nvars: usize,
    /// Rows `(a, b)` meaning `a . x <= b`.
    pub rows: Vec<(Vec<Rational>, Rational)>,
    pub objective: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Optimal { point: Vec<Rational>, value: Rational },
    Unbounded { point: Vec<Rational>, ray: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IlpOutcome {
    Infeasible,
    Optimal { point: Vec<BigInt>, value: Rational },
    /// Feasible integer point and integer recession direction of strict descent.
    Unbounded { point: Vec<BigInt>, ray: Vec<BigInt> },
    /// Node budget exhausted; the best integer point found so far, if any.
    Undecided { best: Option<(Vec<BigInt>, Rational)> },
}

impl LinearProgram {
    pub fn new(nvars: usize, objective: Vec<Rational>) -> Self {
        LinearProgram { nvars, rows: Vec::new(), objective }
    }

    pub fn push_le(&mut self, a: Vec<Rational>, b: Rational) {
        self.rows.push((a, b));
    }

    pub fn objective_at<T: Clone + Into<Rational>>(&self, x: &[T]) -> Rational {
        self.objective.iter().zip(x).fold(Rational::zero(), |acc, (c, v)| acc + c * v.clone().into())
    }

    pub fn feasible_int(&self, x: &[BigInt]) -> bool {
        x.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|(a, b)| {
                a.iter().zip(x).fold(Rational::zero(), |acc, (c, v)| acc + c * Rational::from_integer(v.clone()))
                    <= *b
            })
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, q: usize) {
        let inv = Rational::one() / &self.rows[r][q];
        for v in &mut self.rows[r] {
            *v *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][q].is_zero() {
                continue;
            }
            let f = self.rows[i][q].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = q;
    }

    fn optimize(&mut self, cost: &[Rational]) -> Step {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() {
                        d -= &cost[b] * &self.rows[i][j];
                    }
                }
                if d.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(q) = entering else { return Step::Optimal };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((k, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Step::Unbounded(q),
                Some((r, _)) => self.pivot(r, q),
            }
        }
    }

    fn point(&self, n: usize) -> Vec<Rational> {
        let mut x = alloc::vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}

pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    let n = lp.nvars;
    let m = lp.rows.len();
    let negative: Vec<usize> = (0..m).filter(|&i| lp.rows[i].1.is_negative()).collect();
    let ncols = n + m + negative.len();
    let mut t = Tableau { rows: Vec::with_capacity(m), rhs: Vec::with_capacity(m), basis: Vec::with_capacity(m), ncols };
    for (i, (a, b)) in lp.rows.iter().enumerate() {
        let mut row = alloc::vec![Rational::zero(); ncols];
        let flip = b.is_negative();
        for (k, v) in a.iter().enumerate() {
            row[k] = if flip { -v } else { v.clone() };
        }
        row[n + i] = if flip { -Rational::one() } else { Rational::one() };
        let basic = if flip {
            let art = n + m + negative.iter().position(|&k| k == i).unwrap();
            row[art] = Rational::one();
            art
        } else {
            n + i
        };
        t.rows.push(row);
        t.rhs.push(if flip { -b } else { b.clone() });
        t.basis.push(basic);
    }
    if !negative.is_empty() {
        let mut cost = alloc::vec![Rational::zero(); ncols];
        for c in &mut cost[n + m..] {
            *c = Rational::one();
        }
        t.optimize(&cost);
        let infeasibility = t
            .basis
            .iter()
            .zip(&t.rhs)
            .filter(|(&b, _)| b >= n + m)
            .fold(Rational::zero(), |acc, (_, v)| acc + v);
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                match (0..n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for row in &mut t.rows {
            row.truncate(n + m);
        }
        t.ncols = n + m;
    }
    let mut cost = alloc::vec![Rational::zero(); t.ncols];
    cost[..n].clone_from_slice(&lp.objective);
    match t.optimize(&cost) {
        Step::Optimal => {
            let point = t.point(n);
            let value = lp.objective_at(&point);
            LpOutcome::Optimal { point, value }
        }
        Step::Unbounded(q) => {
            let point = t.point(n);
            let mut ray = alloc::vec![Rational::zero(); n];
            if q < n {
                ray[q] = Rational::one();
            }
            for (i, &b) in t.basis.iter().enumerate() {
                if b < n {
                    ray[b] = -&t.rows[i][q];
                }
            }
            LpOutcome::Unbounded { point, ray }
        }
    }
}

fn integral(x: &[Rational]) -> Option<Vec<BigInt>> {
    x.iter().map(|v| v.is_integer().then(|| v.to_integer())).collect()
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

fn unit_row(n: usize, i: usize, sign: i64) -> Vec<Rational> {
    let mut row = alloc::vec![Rational::zero(); n];
    row[i] = Rational::from_integer(sign.into());
    row
}

fn branch_and_bound(lp: &LinearProgram, node_limit: usize) -> IlpOutcome {
    let mut best: Option<(Vec<BigInt>, Rational)> = None;
    let mut stack: Vec<Vec<(Vec<Rational>, Rational)>> = alloc::vec![Vec::new()];
    let mut nodes = 0usize;
    while let Some(extra) = stack.pop() {
        nodes += 1;
        if nodes > node_limit {
            return IlpOutcome::Undecided { best };
        }
        let mut sub = lp.clone();
        sub.rows.extend(extra.iter().cloned());
        match solve_lp(&sub) {
            LpOutcome::Infeasible => {}
            LpOutcome::Unbounded { .. } => return IlpOutcome::Undecided { best },
            LpOutcome::Optimal { point, value } => {
                if best.as_ref().is_some_and(|(_, v)| value >= *v) {
                    continue;
                }
                if let Some(ip) = integral(&point) {
                    best = Some((ip, value));
                    continue;
                }
                let i = point.iter().position(|v| !v.is_integer()).unwrap();
                let lo = point[i].floor();
                let hi = point[i].ceil();
                let mut up = extra.clone();
                up.push((unit_row(lp.nvars, i, -1), -hi));
                let mut down = extra;
                down.push((unit_row(lp.nvars, i, 1), lo));
                stack.push(up);
                stack.push(down);
            }
        }
    }
    match best {
        Some((point, value)) => IlpOutcome::Optimal { point, value },
        None => IlpOutcome::Infeasible,
    }
}

/// Exact integer minimization with a branch-and-bound node budget.
pub fn solve_ilp(lp: &LinearProgram, node_limit: usize) -> IlpOutcome {
    match solve_lp(lp) {
        LpOutcome::Infeasible => IlpOutcome::Infeasible,
        LpOutcome::Optimal { .. } => branch_and_bound(lp, node_limit),
        LpOutcome::Unbounded { ray, .. } => {
            let mut feas = lp.clone();
            feas.objective = alloc::vec![Rational::zero(); lp.nvars];
            match branch_and_bound(&feas, node_limit) {
                IlpOutcome::Optimal { point, .. } => {
                    IlpOutcome::Unbounded { point, ray: primitive_integer(&ray) }
                }
                IlpOutcome::Infeasible => IlpOutcome::Infeasible,
                _ => IlpOutcome::Undecided { best: None },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn row(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&k| q(k)).collect()
    }

    fn brute(lp: &LinearProgram, box_size: i64) -> Option<Rational> {
        let n = lp.nvars;
        let mut best: Option<Rational> = None;
        let total = (box_size + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let x: Vec<BigInt> = (0..n)
                .map(|_| {
                    let v = c % (box_size + 1);
                    c /= box_size + 1;
                    BigInt::from(v)
                })
                .collect();
            if lp.feasible_int(&x) {
                let xv: Vec<Rational> = x.iter().cloned().map(Rational::from_integer).collect();
                let v = lp.objective_at(&xv);
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
        best
    }

    #[test]
    fn knapsack_like() {
        let mut lp = LinearProgram::new(2, row(&[-5, -4]));
        lp.push_le(row(&[6, 4]), q(24));
        lp.push_le(row(&[1, 2]), q(6));
        match solve_lp(&lp) {
            LpOutcome::Optimal { point, value } => {
                assert_eq!(value, q(-21));
                assert_eq!(point, alloc::vec![q(3), Rational::new(3.into(), 2.into())]);
            }
            other => panic!("{other:?}"),
        }
        match solve_ilp(&lp, 1000) {
            IlpOutcome::Optimal { value, .. } => assert_eq!(Some(value), brute(&lp, 8)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, row(&[1]));
        lp.push_le(row(&[1]), q(-1));
        assert_eq!(solve_ilp(&lp, 100), IlpOutcome::Infeasible);

        // 2x = 1 has rational but no integer solutions
        let mut lp = LinearProgram::new(1, row(&[0]));
        lp.push_le(row(&[2]), q(1));
        lp.push_le(row(&[-2]), q(-1));
        assert_eq!(solve_ilp(&lp, 100), IlpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2, row(&[-1, 1]));
        lp.push_le(row(&[-1, 1]), q(-2));
        match solve_ilp(&lp, 100) {
            IlpOutcome::Unbounded { point, ray } => {
                assert!(lp.feasible_int(&point));
                let xr: Vec<Rational> = ray.iter().cloned().map(Rational::from_integer).collect();
                assert!(lp.objective_at(&xr).is_negative());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn matches_brute_force_on_small_systems() {
        let data: [(&[i64], &[(&[i64], i64)]); 4] = [
            (&[1, 1], &[(&[-1, -2], -5), (&[-3, -1], -4)]),
            (&[2, -1], &[(&[1, 1], 7), (&[-1, 3], 4), (&[1, -2], 2)]),
            (&[-1, -1, 1], &[(&[2, 3, -1], 9), (&[1, 0, 0], 4), (&[0, 1, -2], 1), (&[0, 0, 1], 5)]),
            (&[3, -2], &[(&[-2, 3], 3), (&[2, 2], 11), (&[1, -3], 0)]),
        ];
        for (obj, rows) in data {
            let mut lp = LinearProgram::new(obj.len(), row(obj));
            for (a, b) in rows {
                lp.push_le(row(a), q(*b));
            }
            let expected = brute(&lp, 12);
            match solve_ilp(&lp, 10_000) {
                IlpOutcome::Optimal { value, point } => {
                    assert!(lp.feasible_int(&point));
                    assert_eq!(Some(value), expected);
                }
                IlpOutcome::Infeasible => assert_eq!(expected, None),
                other => panic!("{other:?}"),
            }
        }
    }
}
