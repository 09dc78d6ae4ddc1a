//! Bounded-variable primal simplex on a dense tableau.
//!
//! The solver is generic over [`Scalar`]: with an exact scalar every
//! comparison is exact and the optimum is certified; with floats the
//! scalar's zero tolerance is used for pivoting and ratio tests.

use crate::error::{Error, Result};
use crate::game::{LinearConstraint, Sense};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Maximize,
    Minimize,
}

/// `opt objective · x` subject to `constraints` and `lower <= x <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    pub sense: Objective,
    pub objective: Vec<T>,
    pub constraints: Vec<LinearConstraint<T>>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> LinearProgram<T> {
    /// Maximization over the box `[0, 1]^n` with no constraints.
    pub fn unit_box(objective: Vec<T>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense: Objective::Maximize,
            objective,
            constraints: Vec::new(),
            lower: vec![T::zero(); n],
            upper: vec![T::one(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }

    /// Bound and constraint check with the scalar's zero tolerance.
    pub fn is_feasible(&self, x: &[T]) -> bool {
        let tol = T::zero_tolerance();
        x.len() == self.num_vars()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l.clone() - v.clone() <= tol && v.clone() - u.clone() <= tol)
            && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        for (what, len) in [
            ("lower bounds", self.lower.len()),
            ("upper bounds", self.upper.len()),
        ] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    context: format!("LP {what}"),
                    expected: n,
                    found: len,
                });
            }
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "LP constraint".into(),
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { point: Vec<T>, value: T },
    Infeasible,
}

impl<T> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            LpOutcome::Infeasible => None,
        }
    }

    pub fn point(&self) -> Option<&[T]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            LpOutcome::Infeasible => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub max_pivots: usize,
    /// Consecutive degenerate pivots after which Bland's rule takes over.
    pub degeneracy_threshold: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_pivots: 50_000,
            degeneracy_threshold: 50,
        }
    }
}

pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpOutcome<T>> {
    solve_lp_with(lp, SimplexOptions::default())
}

pub fn solve_lp_with<T: Scalar>(
    lp: &LinearProgram<T>,
    options: SimplexOptions,
) -> Result<LpOutcome<T>> {
    lp.validate()?;
    let n = lp.num_vars();
    let mut range = Vec::with_capacity(n);
    for (l, u) in lp.lower.iter().zip(&lp.upper) {
        let r = u.clone() - l.clone();
        if r < -T::zero_tolerance() {
            return Ok(LpOutcome::Infeasible);
        }
        range.push(r.max_of(T::zero()));
    }

    let mut tableau = Tableau::build(lp, &range);
    let mut pivots = 0usize;

    // Phase 1: drive the artificial variables to zero.
    let phase1: Vec<T> = (0..tableau.cols)
        .map(|j| {
            if tableau.is_artificial(j) {
                -T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    tableau.set_costs(&phase1);
    tableau.run(&options, &mut pivots)?;
    let infeasibility = tableau
        .basis
        .iter()
        .filter(|&&b| tableau.is_artificial(b))
        .fold(T::zero(), |acc, &b| acc + tableau.value[b].clone());
    let feas_tol = if T::EXACT {
        T::zero()
    } else {
        T::zero_tolerance() * T::from_i64(100).expect("small")
    };
    if infeasibility > feas_tol {
        return Ok(LpOutcome::Infeasible);
    }
    for j in tableau.artificial_start..tableau.cols {
        tableau.upper[j] = Some(T::zero());
    }

    // Phase 2.
    let flip = lp.sense == Objective::Minimize;
    let phase2: Vec<T> = (0..tableau.cols)
        .map(|j| {
            if j < n {
                if flip {
                    -lp.objective[j].clone()
                } else {
                    lp.objective[j].clone()
                }
            } else {
                T::zero()
            }
        })
        .collect();
    tableau.set_costs(&phase2);
    tableau.run(&options, &mut pivots)?;

    let point: Vec<T> = (0..n)
        .map(|j| {
            let y = tableau.value[j]
                .clone()
                .max_of(T::zero())
                .min_of(range[j].clone());
            lp.lower[j].clone() + y
        })
        .collect();
    let value = lp.objective_value(&point);
    Ok(LpOutcome::Optimal { point, value })
}

/// Dense tableau `B⁻¹A` with explicit variable values. All variables have
/// lower bound zero; `upper[j] = None` means unbounded above.
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    costs: Vec<T>,
    reduced: Vec<T>,
    basis: Vec<usize>,
    value: Vec<T>,
    upper: Vec<Option<T>>,
    at_upper: Vec<bool>,
    is_basic: Vec<bool>,
    cols: usize,
    artificial_start: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>, range: &[T]) -> Self {
        let n = lp.num_vars();
        let m = lp.constraints.len();
        let slack_count = lp
            .constraints
            .iter()
            .filter(|c| c.sense != Sense::Eq)
            .count();
        let artificial_start = n + slack_count;
        let cols = artificial_start + m;

        let mut rows = Vec::with_capacity(m);
        let mut value = vec![T::zero(); cols];
        let mut basis = Vec::with_capacity(m);
        let mut slack = n;
        for (r, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![T::zero(); cols];
            let shift = c
                .coeffs
                .iter()
                .zip(&lp.lower)
                .fold(T::zero(), |acc, (a, l)| acc + a.clone() * l.clone());
            let mut rhs = c.rhs.clone() - shift;
            row[..n].clone_from_slice(&c.coeffs);
            match c.sense {
                Sense::Le => {
                    row[slack] = T::one();
                    slack += 1;
                }
                Sense::Ge => {
                    row[slack] = -T::one();
                    slack += 1;
                }
                Sense::Eq => {}
            }
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                rhs = -rhs;
            }
            row[artificial_start + r] = T::one();
            value[artificial_start + r] = rhs;
            basis.push(artificial_start + r);
            rows.push(row);
        }
        let mut upper: Vec<Option<T>> = vec![None; cols];
        for j in 0..n {
            upper[j] = Some(range[j].clone());
        }
        let mut is_basic = vec![false; cols];
        for &b in &basis {
            is_basic[b] = true;
        }
        Tableau {
            rows,
            costs: vec![T::zero(); cols],
            reduced: vec![T::zero(); cols],
            basis,
            value,
            upper,
            at_upper: vec![false; cols],
            is_basic,
            cols,
            artificial_start,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.artificial_start
    }

    fn set_costs(&mut self, costs: &[T]) {
        self.costs = costs.to_vec();
        let mut reduced = costs.to_vec();
        for (r, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (d, a) in reduced.iter_mut().zip(row) {
                if !a.is_zero() {
                    *d = d.clone() - cb.clone() * a.clone();
                }
            }
        }
        self.reduced = reduced;
    }

    fn is_fixed(&self, j: usize) -> bool {
        matches!(&self.upper[j], Some(u) if u.is_negligible())
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        let tol = T::zero_tolerance();
        let mut best: Option<(usize, T)> = None;
        for j in 0..self.cols {
            if self.is_basic[j] || self.is_fixed(j) {
                continue;
            }
            let d = &self.reduced[j];
            let improving = if self.at_upper[j] {
                *d < -tol.clone()
            } else {
                *d > tol
            };
            if !improving {
                continue;
            }
            if bland {
                return Some(j);
            }
            let mag = d.abs();
            if best.as_ref().is_none_or(|(_, m)| mag > *m) {
                best = Some((j, mag));
            }
        }
        best.map(|(j, _)| j)
    }

    fn run(&mut self, options: &SimplexOptions, pivots: &mut usize) -> Result<()> {
        let tol = T::zero_tolerance();
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run >= options.degeneracy_threshold;
            let Some(q) = self.choose_entering(bland) else {
                return Ok(());
            };
            *pivots += 1;
            if *pivots > options.max_pivots {
                return Err(Error::LpStall {
                    iterations: *pivots,
                });
            }
            let increasing = !self.at_upper[q];

            // Ratio test: the entering variable's own range, then every row.
            let mut step: Option<T> = self.upper[q].clone();
            let mut leaving: Option<(usize, bool)> = None; // (row, leaves at upper)
            let mut leaving_key: Option<(T, usize)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = &row[q];
                if a.abs() <= tol {
                    continue;
                }
                // basic value moves by -g * t
                let g = if increasing { a.clone() } else { -a.clone() };
                let b = self.basis[r];
                let (limit, to_upper) = if g > T::zero() {
                    (self.value[b].clone() / g.clone(), false)
                } else {
                    match &self.upper[b] {
                        Some(u) => ((u.clone() - self.value[b].clone()) / (-g.clone()), true),
                        None => continue,
                    }
                };
                let limit = limit.max_of(T::zero());
                let better = match &step {
                    None => true,
                    Some(s) => {
                        if leaving.is_none() {
                            // Compare against a bound flip: prefer the flip on ties.
                            limit < *s
                        } else if limit.clone() < s.clone() - tol.clone() {
                            true
                        } else if (limit.clone() - s.clone()).abs() <= tol {
                            let (ref mag, idx) = *leaving_key.as_ref().expect("set with leaving");
                            if bland {
                                b < idx
                            } else {
                                g.abs() > *mag
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    step = Some(limit);
                    leaving = Some((r, to_upper));
                    leaving_key = Some((g.abs(), b));
                }
            }
            let Some(step) = step else {
                return Err(Error::LpUnbounded);
            };
            if step.abs() <= tol {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            // Move along the edge.
            let signed = if increasing {
                step.clone()
            } else {
                -step.clone()
            };
            if !step.is_zero() {
                self.value[q] = self.value[q].clone() + signed.clone();
                for (r, row) in self.rows.iter().enumerate() {
                    let a = &row[q];
                    if !a.is_zero() {
                        let b = self.basis[r];
                        self.value[b] = self.value[b].clone() - a.clone() * signed.clone();
                    }
                }
            }

            match leaving {
                None => {
                    // Bound flip.
                    self.at_upper[q] = increasing;
                    self.value[q] = if increasing {
                        self.upper[q].clone().expect("flip needs finite range")
                    } else {
                        T::zero()
                    };
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.value[out] = if to_upper {
                        self.upper[out].clone().expect("upper exists")
                    } else {
                        T::zero()
                    };
                    self.at_upper[out] = to_upper;
                    self.is_basic[out] = false;
                    self.pivot(r, q);
                    self.basis[r] = q;
                    self.is_basic[q] = true;
                    self.at_upper[q] = false;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let pivot = self.rows[r][q].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / pivot.clone();
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..self.cols)
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[q].clone();
            if factor.is_zero() {
                continue;
            }
            for &j in &nz {
                row[j] = row[j].clone() - factor.clone() * pivot_row[j].clone();
            }
            row[q] = T::zero();
        }
        let factor = self.reduced[q].clone();
        if !factor.is_zero() {
            for &j in &nz {
                self.reduced[j] = self.reduced[j].clone() - factor.clone() * pivot_row[j].clone();
            }
            self.reduced[q] = T::zero();
        }
    }
}
