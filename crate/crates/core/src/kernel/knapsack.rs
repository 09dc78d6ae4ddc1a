//! Two-criteria 0-1 knapsack by dynamic programming over capacities.

use crate::error::{Error, Result};
use crate::game::Strategy;
use crate::scalar::Scalar;

/// Default bound on `items × (capacity + 1)` table cells.
pub const KNAPSACK_CELL_CAP: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackProblem<T> {
    pub weights: Vec<u64>,
    pub capacity: u64,
    pub primary: Vec<T>,
    /// Tie-break objective among primary-optimal selections.
    pub secondary: Option<Vec<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackSolution<T> {
    pub selection: Strategy,
    pub primary_value: T,
    pub secondary_value: T,
}

pub fn solve_knapsack<T: Scalar>(p: &KnapsackProblem<T>) -> Result<KnapsackSolution<T>> {
    solve_knapsack_capped(p, KNAPSACK_CELL_CAP)
}

/// Maximizes `(primary · s, secondary · s)` lexicographically subject to
/// `weights · s <= capacity`. An item is taken only when it strictly
/// improves the pair, so zero-value items stay out.
pub fn solve_knapsack_capped<T: Scalar>(
    p: &KnapsackProblem<T>,
    cell_cap: u128,
) -> Result<KnapsackSolution<T>> {
    let n = p.weights.len();
    if p.primary.len() != n {
        return Err(Error::DimensionMismatch {
            context: "knapsack primary profits".into(),
            expected: n,
            found: p.primary.len(),
        });
    }
    if let Some(sec) = &p.secondary {
        if sec.len() != n {
            return Err(Error::DimensionMismatch {
                context: "knapsack secondary profits".into(),
                expected: n,
                found: sec.len(),
            });
        }
    }
    let total: u128 = p.weights.iter().map(|&w| u128::from(w)).sum();
    let cap = u128::from(p.capacity).min(total);
    let cells = (n as u128) * (cap + 1);
    if cells > cell_cap {
        return Err(Error::KnapsackCap {
            cells,
            cap: cell_cap,
        });
    }
    let cap = cap as usize;
    let secondary = |k: usize| p.secondary.as_ref().map_or_else(T::zero, |s| s[k].clone());

    let mut best: Vec<(T, T)> = vec![(T::zero(), T::zero()); cap + 1];
    let mut take = vec![vec![false; cap + 1]; n];
    for k in 0..n {
        let w = p.weights[k] as usize;
        if w > cap {
            continue;
        }
        let (gain, tie) = (p.primary[k].clone(), secondary(k));
        for c in (w..=cap).rev() {
            let (a, b) = &best[c - w];
            let cand = (a.clone() + gain.clone(), b.clone() + tie.clone());
            let (cur_a, cur_b) = &best[c];
            if cand.0 > *cur_a || (cand.0 == *cur_a && cand.1 > *cur_b) {
                best[c] = cand;
                take[k][c] = true;
            }
        }
    }

    let mut selection = vec![false; n];
    let mut c = cap;
    for k in (0..n).rev() {
        if take[k][c] {
            selection[k] = true;
            c -= p.weights[k] as usize;
        }
    }
    let (primary_value, secondary_value) = selection
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .fold((T::zero(), T::zero()), |(a, b), (k, _)| {
            (a + p.primary[k].clone(), b + secondary(k))
        });
    Ok(KnapsackSolution {
        selection: Strategy(selection),
        primary_value,
        secondary_value,
    })
}
