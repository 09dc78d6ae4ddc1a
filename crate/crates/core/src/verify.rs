//! Exhaustive ground truth: pure equilibria by full enumeration, mixed
//! equilibria of two-player games by support enumeration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use crate::catalog::bounded_sign_game;
use crate::error::{Error, Result};
use crate::game::{GameInstance, MixedProfile, PureProfile, Strategy};
use crate::oracle::improve;
use crate::scalar::{Rational, Scalar};
use crate::support::Bimatrix;

/// Default cap on the total number of binary variables for pure enumeration.
pub const PURE_VARIABLE_CAP: usize = 24;
/// Default cap on each player's feasible strategy count for mixed enumeration.
pub const MIXED_STRATEGY_CAP: usize = 12;
/// Probability tolerance under which two mixed profiles are the same.
pub const DEDUP_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumSet<T> {
    pub pure: Vec<PureProfile>,
    /// Empty unless the game has two players.
    pub mixed: Vec<MixedProfile<T>>,
    /// `true` when mixed equilibria were enumerated as well.
    pub complete: bool,
}

/// Feasible strategies of every player, each list in lexicographic order.
fn feasible_lists<T: Scalar>(game: &GameInstance<T>) -> Result<Vec<Vec<Strategy>>> {
    game.players()
        .iter()
        .map(|p| {
            let mut pts = p.strategies.feasible_points()?;
            pts.sort();
            Ok(pts)
        })
        .collect()
}

/// Decodes `index` in the mixed radix `sizes`, most significant first.
fn digits(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        out[k] = index % sizes[k];
        index /= sizes[k];
    }
    out
}

pub fn enumerate_pure_ne<T: Scalar>(game: &GameInstance<T>) -> Result<Vec<PureProfile>> {
    enumerate_pure_ne_capped(game, PURE_VARIABLE_CAP)
}

/// All pure Nash equilibria in lexicographic order of the joint vector.
/// For every player and every opponent combination the set of exact
/// best-response indices is tabulated first; a profile is an equilibrium
/// when every player's index is in its set.
pub fn enumerate_pure_ne_capped<T: Scalar>(
    game: &GameInstance<T>,
    cap: usize,
) -> Result<Vec<PureProfile>> {
    if game.total_vars() > cap {
        return Err(Error::EnumerationCap {
            size: game.total_vars(),
            cap,
        });
    }
    let lists = feasible_lists(game)?;
    if lists.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let n = game.num_players();
    let sizes: Vec<usize> = lists.iter().map(Vec::len).collect();
    let vectors: Vec<Vec<Vec<T>>> = lists
        .iter()
        .map(|l| l.iter().map(Strategy::to_vector).collect())
        .collect();

    let argmax: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|i| {
            let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let other_sizes: Vec<usize> = others.iter().map(|&k| sizes[k]).collect();
            let combos: usize = other_sizes.iter().product();
            if let Some(scaled) = IntegerPayoff::new(game, i) {
                return (0..combos)
                    .into_par_iter()
                    .map(|c| {
                        let picks = digits(c, &other_sizes);
                        let w = scaled.own_weights(
                            others.iter().zip(&picks).map(|(&k, &d)| (k, &lists[k][d])),
                        );
                        let values: Vec<i128> = lists[i]
                            .iter()
                            .map(|s| s.ones().map(|j| w[j]).sum())
                            .collect();
                        argmax_indices(&values)
                    })
                    .collect();
            }
            (0..combos)
                .into_par_iter()
                .map(|c| {
                    let mut points: Vec<Vec<T>> =
                        (0..n).map(|k| vec![T::zero(); game.num_vars(k)]).collect();
                    for (&k, &d) in others.iter().zip(&digits(c, &other_sizes)) {
                        points[k] = vectors[k][d].clone();
                    }
                    let form = game.affine_payoff(i, &points);
                    let values: Vec<T> =
                        lists[i].iter().map(|s| form.eval_ones(s.ones())).collect();
                    argmax_indices(&values)
                })
                .collect()
        })
        .collect();

    let total: usize = sizes.iter().product();
    let found: Vec<PureProfile> = (0..total)
        .into_par_iter()
        .filter_map(|index| {
            let d = digits(index, &sizes);
            let stable = (0..n).all(|i| {
                let (mut c, mut mult) = (0usize, 1usize);
                for k in (0..n).rev().filter(|&k| k != i) {
                    c += d[k] * mult;
                    mult *= sizes[k];
                }
                argmax[i][c].binary_search(&d[i]).is_ok()
            });
            stable.then(|| PureProfile::new((0..n).map(|k| lists[k][d[k]].clone()).collect()))
        })
        .collect();
    Ok(found)
}

/// Indices attaining the maximum of `values`.
fn argmax_indices<V: PartialOrd + Clone>(values: &[V]) -> Vec<usize> {
    let best = values
        .iter()
        .cloned()
        .reduce(|a, b| if b > a { b } else { a })
        .expect("nonempty");
    (0..values.len()).filter(|&k| values[k] == best).collect()
}

/// The part of one player's payoff that depends on its own variables,
/// scaled by a common denominator to exact integers. Only built for exact
/// scalars whose scaled coefficients stay far from overflow.
struct IntegerPayoff {
    own: Vec<i128>,
    /// Per opponent, `bilinear[k][l]` is the column multiplying its variable `l`.
    bilinear: Vec<(usize, Vec<Vec<i128>>)>,
}

impl IntegerPayoff {
    fn new<T: Scalar>(game: &GameInstance<T>, player: usize) -> Option<Self> {
        if !T::EXACT {
            return None;
        }
        let spec = &game.player(player).payoff;
        let mut all: Vec<Rational> = spec.own_linear.iter().map(Scalar::to_rational).collect();
        for q in spec.bilinear.values() {
            all.extend(q.iter().flatten().map(Scalar::to_rational));
        }
        let mut scale = BigInt::one();
        for r in &all {
            scale = scale.lcm(r.denom());
        }
        let bound = BigInt::from(1i64 << 40);
        let to_int = |v: &T| -> Option<i128> {
            let r = v.to_rational() * Rational::from_integer(scale.clone());
            let z = r.to_integer();
            (z.abs() < bound).then(|| z.to_i128()).flatten()
        };
        let own = spec
            .own_linear
            .iter()
            .map(to_int)
            .collect::<Option<Vec<_>>>()?;
        let mut bilinear = Vec::new();
        for (&k, q) in &spec.bilinear {
            let cols = game.num_vars(k);
            let by_col = (0..cols)
                .map(|l| {
                    q.iter()
                        .map(|row| to_int(&row[l]))
                        .collect::<Option<Vec<_>>>()
                })
                .collect::<Option<Vec<_>>>()?;
            bilinear.push((k, by_col));
        }
        Some(IntegerPayoff { own, bilinear })
    }

    /// Coefficients of the own variables with the opponents fixed.
    fn own_weights<'a>(&self, fixed: impl Iterator<Item = (usize, &'a Strategy)>) -> Vec<i128> {
        let mut w = self.own.clone();
        for (k, s) in fixed {
            if let Some((_, cols)) = self.bilinear.iter().find(|(o, _)| *o == k) {
                for l in s.ones() {
                    for (a, b) in w.iter_mut().zip(&cols[l]) {
                        *a += b;
                    }
                }
            }
        }
        w
    }
}

pub fn enumerate_mixed_ne_2p<T: Scalar>(game: &GameInstance<T>) -> Result<Vec<MixedProfile<T>>> {
    enumerate_mixed_ne_2p_capped(game, MIXED_STRATEGY_CAP)
}

/// Every mixed equilibrium found by some support pair, deduplicated and
/// certified by the oracle. Pure equilibria appear as singleton supports.
pub fn enumerate_mixed_ne_2p_capped<T: Scalar>(
    game: &GameInstance<T>,
    cap: usize,
) -> Result<Vec<MixedProfile<T>>> {
    if game.num_players() != 2 {
        return Err(Error::TwoPlayersOnly("mixed equilibrium enumeration"));
    }
    for i in 0..2 {
        if game.num_vars(i) > PURE_VARIABLE_CAP {
            return Err(Error::EnumerationCap {
                size: game.num_vars(i),
                cap: PURE_VARIABLE_CAP,
            });
        }
    }
    let lists = feasible_lists(game)?;
    if let Some(l) = lists.iter().find(|l| l.len() > cap) {
        return Err(Error::EnumerationCap { size: l.len(), cap });
    }
    if lists.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let mut row = Vec::with_capacity(lists[0].len());
    let mut col = Vec::with_capacity(lists[0].len());
    for x in &lists[0] {
        let (mut r, mut c) = (Vec::new(), Vec::new());
        for y in &lists[1] {
            let points = [x.to_vector(), y.to_vector()];
            r.push(game.payoff_at(0, &points));
            c.push(game.payoff_at(1, &points));
        }
        row.push(r);
        col.push(c);
    }
    let mut out: Vec<MixedProfile<T>> = Vec::new();
    for sol in (Bimatrix { row, col }).all_support_solutions()? {
        let profile = MixedProfile::new_unchecked(vec![
            lists[0].iter().cloned().zip(sol.row_mix).collect(),
            lists[1].iter().cloned().zip(sol.col_mix).collect(),
        ])
        .canonicalize();
        if out.iter().any(|p| p.approx_eq(&profile, DEDUP_TOLERANCE)) {
            continue;
        }
        if improve(game, &profile)?.is_yes() {
            out.push(profile);
        }
    }
    Ok(out)
}

pub fn equilibrium_set<T: Scalar>(game: &GameInstance<T>) -> Result<EquilibriumSet<T>> {
    let pure = enumerate_pure_ne(game)?;
    let complete = game.num_players() == 2;
    let mixed = if complete {
        enumerate_mixed_ne_2p(game)?
    } else {
        Vec::new()
    };
    Ok(EquilibriumSet {
        pure,
        mixed,
        complete,
    })
}

/// Outcome of the bounded approximation scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximationReport {
    /// Pure equilibria `(x1, x2)` of the original bounded game.
    pub original: Vec<(i64, i64)>,
    /// Pure equilibria of the game with `x1 >= 2`.
    pub approximation: Vec<(i64, i64)>,
    /// Whether the oracle rejects every approximation equilibrium on the
    /// original game.
    pub approximation_rejected: bool,
}

impl ApproximationReport {
    pub fn confirmed(&self) -> bool {
        self.original == [(1, 1)] && self.approximation == [(2, 1)] && self.approximation_rejected
    }
}

/// An equilibrium of a restricted game need not be one of the original:
/// with `x1 in [1, 4]` the only equilibrium is `(1, 1)`, while restricting
/// to `x1 >= 2` yields `(2, 1)`, which the original game rejects.
pub fn check_approximation_scenarios() -> Result<ApproximationReport> {
    use crate::scalar::Rational;
    const UPPER: i64 = 4;
    let (original, enc) = bounded_sign_game::<Rational>(UPPER, None);
    let (approx, _) = bounded_sign_game::<Rational>(UPPER, Some(2));
    let decode = |p: &PureProfile| {
        (
            enc.decode(p.strategies[0].bits()),
            if p.strategies[1].bits()[0] { 1 } else { -1 },
        )
    };
    let orig_ne = enumerate_pure_ne(&original)?;
    let approx_ne = enumerate_pure_ne(&approx)?;
    let mut rejected = !approx_ne.is_empty();
    for p in &approx_ne {
        rejected &= !improve(&original, p)?.is_yes();
    }
    Ok(ApproximationReport {
        original: orig_ne.iter().map(decode).collect(),
        approximation: approx_ne.iter().map(decode).collect(),
        approximation_rejected: rejected,
    })
}
