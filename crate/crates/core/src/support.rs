//! Support enumeration for finite two-player games given as payoff
//! matrices. Each candidate support pair is tested with the linear
//! feasibility system
//!
//! ```text
//! σ ≥ 0 on the support, Σ σ = 1,
//! payoff(s, σ⁻) = v  for s in the support,
//! payoff(s, σ⁻) ≤ v  for every other s,
//! ```
//!
//! which splits into one independent system per player. Candidates are
//! pruned by conditional strict dominance before any LP is solved. For
//! exact scalars the systems can first be screened in `f64`; only pairs the
//! screen accepts are solved exactly.

use crate::error::Result;
use crate::game::{LinearConstraint, Sense};
use crate::kernel::{solve_lp, LinearProgram, LpOutcome, Objective};
use crate::scalar::Scalar;

/// Row supports and support pairs the ordered search may examine before
/// [`Bimatrix::first_equilibrium`] switches to complementary pivoting.
pub const SUPPORT_PAIR_BUDGET: u64 = 10_000;

/// Payoffs `row[i][j]` of the first player and `col[i][j]` of the second
/// when they play strategies `i` and `j`.
#[derive(Clone, Debug)]
pub struct Bimatrix<T> {
    pub row: Vec<Vec<T>>,
    pub col: Vec<Vec<T>>,
}

/// Mixed strategies indexed like the matrix rows and columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportSolution<T> {
    pub row_mix: Vec<T>,
    pub col_mix: Vec<T>,
}

impl<T: Scalar> Bimatrix<T> {
    pub fn rows(&self) -> usize {
        self.row.len()
    }

    pub fn cols(&self) -> usize {
        self.row.first().map_or(0, Vec::len)
    }

    /// First equilibrium in the order: total support size, then size
    /// imbalance, then lexicographic supports. Exact scalars are screened in
    /// `f64` first; should the screen reject everything, the search is
    /// repeated without it. Once [`SUPPORT_PAIR_BUDGET`] candidate pairs
    /// have been tested without success, the equilibrium is taken from
    /// Lemke–Howson pivoting instead.
    pub fn first_equilibrium(&self) -> Result<Option<SupportSolution<T>>> {
        self.first_equilibrium_within(Some(SUPPORT_PAIR_BUDGET))
    }

    /// [`first_equilibrium`](Self::first_equilibrium) with an explicit
    /// budget; `None` never leaves the ordered search.
    pub fn first_equilibrium_within(
        &self,
        budget: Option<u64>,
    ) -> Result<Option<SupportSolution<T>>> {
        let mut found = None;
        let mut left = budget;
        if T::EXACT {
            let screen = self.to_f64();
            let done = self.search(Some(&screen), &mut left, |sol| {
                found = Some(sol);
                false
            })?;
            if found.is_some() {
                return Ok(found);
            }
            if !done {
                return self.pivoted_equilibrium();
            }
        }
        let done = self.search(None, &mut left, |sol| {
            found = Some(sol);
            false
        })?;
        if found.is_none() && !done {
            return self.pivoted_equilibrium();
        }
        Ok(found)
    }

    /// Lemke–Howson from the first row label. Exact scalars pivot in `f64`
    /// and re-solve the systems of the support pair found; exact pivoting
    /// is the fallback when rounding picked the wrong supports.
    fn pivoted_equilibrium(&self) -> Result<Option<SupportSolution<T>>> {
        if T::EXACT {
            if let Some(approx) = self.to_f64().lemke_howson(0) {
                let support = |mix: &[f64]| -> Vec<usize> {
                    (0..mix.len()).filter(|&k| mix[k] > 1e-12).collect()
                };
                let (s1, s2) = (support(&approx.row_mix), support(&approx.col_mix));
                let (m, n) = (self.rows(), self.cols());
                if let Some(col_mix) = mix_for(&self.row, &s1, &s2, m, n, false)? {
                    if let Some(row_mix) = mix_for(&self.col, &s2, &s1, n, m, true)? {
                        return Ok(Some(SupportSolution { row_mix, col_mix }));
                    }
                }
            }
        }
        Ok(self.lemke_howson(0))
    }

    /// Lemke–Howson path started by dropping `label` (rows are labels
    /// `0..m`, columns `m..m+n`), with the lexicographic ratio test so that
    /// degenerate games cannot cycle.
    pub fn lemke_howson(&self, label: usize) -> Option<SupportSolution<T>> {
        let (m, n) = (self.rows(), self.cols());
        if m == 0 || n == 0 || label >= m + n {
            return None;
        }
        // Shift both matrices to positive entries; equilibria are unchanged.
        let shifted = |a: &[Vec<T>]| -> Vec<Vec<T>> {
            let low = a
                .iter()
                .flatten()
                .fold(a[0][0].clone(), |lo, v| lo.min_of(v.clone()));
            a.iter()
                .map(|r| {
                    r.iter()
                        .map(|v| v.clone() - low.clone() + T::one())
                        .collect()
                })
                .collect()
        };
        // System 0 has rows r_i + Σ_j A_ij y_j = 1, system 1 has rows
        // s_j + Σ_i B_ij x_i = 1. Variables: x_i = i, y_j = m + j,
        // r_i = m + n + i, s_j = 2m + n + j; the label of a variable is its
        // index modulo m + n.
        let a = shifted(&self.row);
        let b = shifted(&self.col);
        let total = 2 * (m + n);
        let mut tab: [Vec<Vec<T>>; 2] = [Vec::with_capacity(m), Vec::with_capacity(n)];
        for i in 0..m {
            let mut r = vec![T::zero(); total + 1];
            for j in 0..n {
                r[m + j] = a[i][j].clone();
            }
            r[m + n + i] = T::one();
            r[total] = T::one();
            tab[0].push(r);
        }
        for j in 0..n {
            let mut r = vec![T::zero(); total + 1];
            for i in 0..m {
                r[i] = b[i][j].clone();
            }
            r[2 * m + n + j] = T::one();
            r[total] = T::one();
            tab[1].push(r);
        }
        let mut basis: [Vec<usize>; 2] =
            [(m + n..2 * m + n).collect(), (2 * m + n..total).collect()];
        let slacks = [m + n..2 * m + n, 2 * m + n..total];
        let system = |v: usize| usize::from(v < m || v >= 2 * m + n);
        let tol = T::zero_tolerance();
        let mut entering = label;
        loop {
            let sys = system(entering);
            let t = &tab[sys];
            let mut best: Option<usize> = None;
            for r in 0..t.len() {
                if t[r][entering] <= tol {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(q) => {
                        let key =
                            |row: usize, col: usize| t[row][col].clone() / t[row][entering].clone();
                        let mut verdict = None;
                        for col in std::iter::once(total).chain(slacks[sys].clone()) {
                            let (x, y) = (key(r, col), key(q, col));
                            if x != y {
                                verdict = Some(x < y);
                                break;
                            }
                        }
                        verdict.unwrap_or(false)
                    }
                };
                if better {
                    best = Some(r);
                }
            }
            let p = best?;
            let t = &mut tab[sys];
            let pivot = t[p][entering].clone();
            for v in t[p].iter_mut() {
                *v = v.clone() / pivot.clone();
            }
            let prow = t[p].clone();
            for (r, row) in t.iter_mut().enumerate() {
                if r != p && !row[entering].is_zero() {
                    let f = row[entering].clone();
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v = v.clone() - f.clone() * pv.clone();
                    }
                }
            }
            let leaving = std::mem::replace(&mut basis[sys][p], entering);
            if leaving % (m + n) == label {
                break;
            }
            entering = if leaving < m + n {
                leaving + m + n
            } else {
                leaving - m - n
            };
        }
        let mut x = vec![T::zero(); m];
        let mut y = vec![T::zero(); n];
        for (sys, rows) in basis.iter().enumerate() {
            for (r, &v) in rows.iter().enumerate() {
                let value = tab[sys][r][total].clone();
                if v < m {
                    x[v] = value;
                } else if v < m + n {
                    y[v - m] = value;
                }
            }
        }
        let normalize = |w: Vec<T>| -> Option<Vec<T>> {
            let sum = w.iter().fold(T::zero(), |acc, v| acc + v.clone());
            (sum > T::zero()).then(|| w.into_iter().map(|v| v / sum.clone()).collect())
        };
        Some(SupportSolution {
            row_mix: normalize(x)?,
            col_mix: normalize(y)?,
        })
    }

    /// Every support pair whose system is feasible contributes one solution.
    pub fn all_support_solutions(&self) -> Result<Vec<SupportSolution<T>>> {
        let mut all = Vec::new();
        self.search(None, &mut None, |sol| {
            all.push(sol);
            true
        })?;
        Ok(all)
    }

    /// Order-preserving integer replacements for the comparisons made by
    /// the dominance tests: row payoffs ranked within each column, column
    /// payoffs within each row.
    fn ranks(&self) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let (m, n) = (self.rows(), self.cols());
        let rank = |values: Vec<&T>| -> Vec<u32> {
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| {
                values[a]
                    .partial_cmp(values[b])
                    .expect("payoffs are ordered")
            });
            let mut out = vec![0u32; values.len()];
            let mut r = 0u32;
            for (pos, &idx) in order.iter().enumerate() {
                if pos > 0 && values[order[pos - 1]] < values[idx] {
                    r += 1;
                }
                out[idx] = r;
            }
            out
        };
        let mut row_rank = vec![vec![0u32; n]; m];
        for j in 0..n {
            for (i, r) in rank((0..m).map(|i| &self.row[i][j]).collect())
                .into_iter()
                .enumerate()
            {
                row_rank[i][j] = r;
            }
        }
        let col_rank = (0..m).map(|i| rank(self.col[i].iter().collect())).collect();
        (row_rank, col_rank)
    }

    fn to_f64(&self) -> Bimatrix<f64> {
        let conv = |m: &[Vec<T>]| {
            m.iter()
                .map(|r| r.iter().map(Scalar::to_f64).collect())
                .collect()
        };
        Bimatrix {
            row: conv(&self.row),
            col: conv(&self.col),
        }
    }

    fn pure_equilibrium(&self, i: usize, j: usize) -> bool {
        let a = &self.row[i][j];
        let b = &self.col[i][j];
        (0..self.rows()).all(|r| self.row[r][j] <= *a)
            && (0..self.cols()).all(|c| self.col[i][c] <= *b)
    }

    /// Calls `visit` for each solution; stops when it returns `false`.
    /// Every row support and every support pair examined costs one unit of
    /// `budget`; the result is `false` if the budget ran out first.
    fn search(
        &self,
        screen: Option<&Bimatrix<f64>>,
        budget: &mut Option<u64>,
        mut visit: impl FnMut(SupportSolution<T>) -> bool,
    ) -> Result<bool> {
        let (m, n) = (self.rows(), self.cols());
        if m == 0 || n == 0 {
            return Ok(true);
        }
        let mut exhausted = false;
        let (row_rank, col_rank) = self.ranks();
        for (x1, x2) in size_order(m, n) {
            if x1 == 1 && x2 == 1 {
                for i in 0..m {
                    for j in 0..n {
                        if self.pure_equilibrium(i, j) {
                            let mut row_mix = vec![T::zero(); m];
                            let mut col_mix = vec![T::zero(); n];
                            row_mix[i] = T::one();
                            col_mix[j] = T::one();
                            if !visit(SupportSolution { row_mix, col_mix }) {
                                return Ok(true);
                            }
                        }
                    }
                }
                continue;
            }
            for s1 in Combinations::new(m, x1) {
                if !charge(budget) {
                    return Ok(false);
                }
                let allowed: Vec<usize> = (0..n)
                    .filter(|&j| !col_dominated(&col_rank, &s1, j, n))
                    .collect();
                if allowed.len() < x2
                    || s1.iter().any(|&i| row_dominated(&row_rank, &allowed, i, m))
                {
                    continue;
                }
                // Any solution for s1 is also a mixture over all of `allowed`.
                let open = match screen {
                    Some(f) => mix_for(&f.row, &s1, &allowed, m, n, false)?.is_some(),
                    None => mix_for(&self.row, &s1, &allowed, m, n, false)?.is_some(),
                };
                if !open {
                    continue;
                }
                let go_on = pruned_combinations(
                    &allowed,
                    x2,
                    |_| Ok(true),
                    |s2| {
                        if !charge(budget) {
                            exhausted = true;
                            return Ok(false);
                        }
                        if s1.iter().any(|&i| row_dominated(&row_rank, s2, i, m)) {
                            return Ok(true);
                        }
                        if let Some(f) = screen {
                            // The side with more equalities than unknowns usually fails fast.
                            let row_side = |_: ()| passes_screen(&f.row, &s1, s2, m, n, false);
                            let col_side = |_: ()| passes_screen(&f.col, s2, &s1, n, m, true);
                            let ok = if x1 >= x2 {
                                row_side(())? && col_side(())?
                            } else {
                                col_side(())? && row_side(())?
                            };
                            if !ok {
                                return Ok(true);
                            }
                        }
                        let Some(col_mix) = mix_for(&self.row, &s1, s2, m, n, false)? else {
                            return Ok(true);
                        };
                        let Some(row_mix) = mix_for(&self.col, s2, &s1, n, m, true)? else {
                            return Ok(true);
                        };
                        Ok(visit(SupportSolution { row_mix, col_mix }))
                    },
                )?;
                if !go_on {
                    return Ok(!exhausted);
                }
            }
        }
        Ok(true)
    }
}

/// Takes one unit from a finite budget; `false` when none is left.
fn charge(budget: &mut Option<u64>) -> bool {
    match budget {
        Some(0) => false,
        Some(b) => {
            *b -= 1;
            true
        }
        None => true,
    }
}

/// Support sizes ordered by total, then imbalance, then first size.
fn size_order(m: usize, n: usize) -> Vec<(usize, usize)> {
    let mut sizes: Vec<(usize, usize)> =
        (1..=m).flat_map(|a| (1..=n).map(move |b| (a, b))).collect();
    sizes.sort_by_key(|&(a, b)| (a + b, a.abs_diff(b), a));
    sizes
}

/// Row strategy `i` is strictly dominated given opponent columns `given`.
fn row_dominated(row: &[Vec<u32>], given: &[usize], i: usize, m: usize) -> bool {
    (0..m).any(|k| k != i && given.iter().all(|&j| row[i][j] < row[k][j]))
}

/// Column strategy `j` is strictly dominated (for the column player) given rows `given`.
fn col_dominated(col: &[Vec<u32>], given: &[usize], j: usize, n: usize) -> bool {
    (0..n).any(|k| k != j && given.iter().all(|&i| col[i][j] < col[i][k]))
}

/// Solves for the opponent mixture on `opp_support` that makes every
/// strategy in `own_support` a best response among all `own_count`
/// strategies. `payoff[own][opp]`, or `payoff[opp][own]` when `transposed`.
fn mix_for<T: Scalar>(
    payoff: &[Vec<T>],
    own_support: &[usize],
    opp_support: &[usize],
    own_count: usize,
    opp_count: usize,
    transposed: bool,
) -> Result<Option<Vec<T>>> {
    let entry = |own: usize, opp: usize| -> &T {
        if transposed {
            &payoff[opp][own]
        } else {
            &payoff[own][opp]
        }
    };
    let k = opp_support.len();
    // Variables: mixture weights on the opponent support, then the value.
    let mut lo = entry(0, 0).clone();
    let mut hi = lo.clone();
    for own in 0..own_count {
        for opp in 0..opp_count {
            let v = entry(own, opp);
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
    }
    let mut constraints = Vec::with_capacity(own_count + 1);
    let mut simplex = vec![T::one(); k + 1];
    simplex[k] = T::zero();
    constraints.push(LinearConstraint::new(simplex, Sense::Eq, T::one()));
    for own in 0..own_count {
        let mut coeffs: Vec<T> = opp_support
            .iter()
            .map(|&opp| entry(own, opp).clone())
            .collect();
        coeffs.push(-T::one());
        let sense = if own_support.contains(&own) {
            Sense::Eq
        } else {
            Sense::Le
        };
        constraints.push(LinearConstraint::new(coeffs, sense, T::zero()));
    }
    let mut lower = vec![T::zero(); k + 1];
    let mut upper = vec![T::one(); k + 1];
    lower[k] = lo;
    upper[k] = hi;
    let lp = LinearProgram {
        sense: Objective::Maximize,
        objective: vec![T::zero(); k + 1],
        constraints,
        lower,
        upper,
    };
    Ok(match solve_lp(&lp)? {
        LpOutcome::Infeasible => None,
        LpOutcome::Optimal { point, .. } => {
            let mut mix = vec![T::zero(); opp_count];
            for (idx, &opp) in opp_support.iter().enumerate() {
                mix[opp] = point[idx].clone();
            }
            Some(mix)
        }
    })
}

/// Cheap floating point test of the system solved by [`mix_for`]. The
/// equalities are row reduced: an inconsistent system fails, a uniquely
/// determined one is checked directly, and only underdetermined systems
/// fall back to the simplex.
fn passes_screen(
    payoff: &[Vec<f64>],
    own_support: &[usize],
    opp_support: &[usize],
    own_count: usize,
    opp_count: usize,
    transposed: bool,
) -> Result<bool> {
    let entry = |own: usize, opp: usize| {
        if transposed {
            payoff[opp][own]
        } else {
            payoff[own][opp]
        }
    };
    let k = opp_support.len();
    let cols = k + 1;
    let mut scale = 1.0f64;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(own_support.len() + 1);
    for &own in own_support {
        let mut r: Vec<f64> = opp_support.iter().map(|&opp| entry(own, opp)).collect();
        scale = r.iter().fold(scale, |a, v| a.max(v.abs()));
        r.push(-1.0);
        r.push(0.0);
        rows.push(r);
    }
    let mut simplex = vec![1.0; k];
    simplex.extend([0.0, 1.0]);
    rows.push(simplex);
    let tol = 1e-9 * scale;

    let mut rank = 0;
    let mut pivots = Vec::with_capacity(cols);
    for c in 0..cols {
        let Some(p) =
            (rank..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs()))
        else {
            break;
        };
        if rows[p][c].abs() <= tol {
            continue;
        }
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][c] / rows[rank][c];
                if f != 0.0 {
                    for j in c..=cols {
                        rows[r][j] -= f * rows[rank][j];
                    }
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r[cols].abs() > tol) {
        return Ok(false);
    }
    if rank < cols {
        return Ok(mix_for(
            payoff,
            own_support,
            opp_support,
            own_count,
            opp_count,
            transposed,
        )?
        .is_some());
    }
    let mut x = vec![0.0; cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][cols] / rows[r][c];
    }
    if x[..k].iter().any(|&p| p < -1e-9) {
        return Ok(false);
    }
    let v = x[k];
    Ok((0..own_count)
        .filter(|i| !own_support.contains(i))
        .all(|own| {
            let u: f64 = opp_support
                .iter()
                .zip(&x)
                .map(|(&opp, p)| entry(own, opp) * p)
                .sum();
            u <= v + tol
        }))
}

/// Visits the `k`-subsets of `items` in lexicographic order, skipping every
/// subset that extends a proper prefix rejected by `keep`. Returns `false`
/// once `leaf` does.
fn pruned_combinations(
    items: &[usize],
    k: usize,
    mut keep: impl FnMut(&[usize]) -> Result<bool>,
    mut leaf: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    fn walk(
        items: &[usize],
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        keep: &mut dyn FnMut(&[usize]) -> Result<bool>,
        leaf: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        if chosen.len() == k {
            return leaf(chosen);
        }
        let last = items.len() + chosen.len() + 1 - k;
        for idx in start..last {
            chosen.push(items[idx]);
            let proceed = chosen.len() == k || keep(chosen)?;
            let go_on = !proceed || walk(items, k, idx + 1, chosen, keep, leaf)?;
            chosen.pop();
            if !go_on {
                return Ok(false);
            }
        }
        Ok(true)
    }
    walk(
        items,
        k,
        0,
        &mut Vec::with_capacity(k),
        &mut keep,
        &mut leaf,
    )
}

/// Lexicographic k-subsets of `0..n`.
pub(crate) struct Combinations {
    current: Option<Vec<usize>>,
    n: usize,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            current: (k <= n).then(|| (0..k).collect()),
            n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut advanced = false;
        for pos in (0..k).rev() {
            if next[pos] < self.n - k + pos {
                next[pos] += 1;
                for q in pos + 1..k {
                    next[q] = next[q - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        self.current = advanced.then_some(next);
        Some(out)
    }
}
