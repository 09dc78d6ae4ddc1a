//! Cutting-plane selection of pure equilibria. A master MILP maximizes the
//! selection function over the joint strategy space; every candidate the
//! oracle rejects is cut off by the inequalities
//! `f^i(x^i; x^-i) >= f^i(x~^i; x^-i)` for each profitable deviation `x~^i`,
//! which hold at every pure equilibrium.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::game::{GameInstance, LinearConstraint, PureProfile, Sense, Strategy};
use crate::kernel::{
    linearize_products, solve_milp, LinearProgram, MilpOutcome, MilpProblem, Objective,
};
use crate::limits::Limits;
use crate::oracle::improve;
use crate::scalar::Scalar;

/// `constant + Σ_i linear[i]·x^i + Σ_{i<j} (x^i)ᵀ bilinear[(i,j)] x^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointForm<T> {
    pub constant: T,
    pub linear: Vec<Vec<T>>,
    pub bilinear: BTreeMap<(usize, usize), Vec<Vec<T>>>,
}

impl<T: Scalar> JointForm<T> {
    pub fn zero(game: &GameInstance<T>) -> Self {
        JointForm {
            constant: T::zero(),
            linear: (0..game.num_players())
                .map(|i| vec![T::zero(); game.num_vars(i)])
                .collect(),
            bilinear: BTreeMap::new(),
        }
    }

    /// Player `i`'s payoff over the joint variables.
    pub fn payoff(game: &GameInstance<T>, i: usize) -> Self {
        let mut form = JointForm::zero(game);
        let spec = &game.player(i).payoff;
        form.constant = spec.constant.clone();
        form.linear[i] = spec.own_linear.clone();
        for (&j, e) in &spec.opp_linear {
            form.linear[j] = e.clone();
        }
        for (&j, q) in &spec.bilinear {
            form.add_bilinear(i, j, q);
        }
        form
    }

    pub fn welfare(game: &GameInstance<T>) -> Self {
        (0..game.num_players()).fold(JointForm::zero(game), |acc, i| {
            acc.plus(&JointForm::payoff(game, i))
        })
    }

    /// Adds `(x^i)ᵀ q x^j` for distinct players, stored under the ordered pair.
    fn add_bilinear(&mut self, i: usize, j: usize, q: &[Vec<T>]) {
        let (key, oriented): ((usize, usize), Vec<Vec<T>>) = if i < j {
            ((i, j), q.to_vec())
        } else {
            let cols = q.first().map_or(0, Vec::len);
            (
                (j, i),
                (0..cols)
                    .map(|l| q.iter().map(|r| r[l].clone()).collect())
                    .collect(),
            )
        };
        match self.bilinear.get_mut(&key) {
            Some(m) => {
                for (row, add) in m.iter_mut().zip(oriented) {
                    for (a, b) in row.iter_mut().zip(add) {
                        *a = a.clone() + b;
                    }
                }
            }
            None => {
                self.bilinear.insert(key, oriented);
            }
        }
    }

    pub fn plus(mut self, other: &Self) -> Self {
        self.constant = self.constant + other.constant.clone();
        for (a, b) in self.linear.iter_mut().zip(&other.linear) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = x.clone() + y.clone();
            }
        }
        for (&(i, j), q) in &other.bilinear {
            self.add_bilinear(i, j, q);
        }
        self
    }

    pub fn eval(&self, points: &[Vec<T>]) -> T {
        let mut v = self.constant.clone();
        for (c, x) in self.linear.iter().zip(points) {
            for (a, b) in c.iter().zip(x) {
                v = v + a.clone() * b.clone();
            }
        }
        for (&(i, j), q) in &self.bilinear {
            for (k, row) in q.iter().enumerate() {
                if points[i][k].is_zero() {
                    continue;
                }
                for (l, coef) in row.iter().enumerate() {
                    v = v + coef.clone() * points[i][k].clone() * points[j][l].clone();
                }
            }
        }
        v
    }

    fn check(&self, game: &GameInstance<T>) -> Result<()> {
        let n = game.num_players();
        let bad = |what: String| Err(Error::InvalidGame(format!("selection function: {what}")));
        if self.linear.len() != n || (0..n).any(|i| self.linear[i].len() != game.num_vars(i)) {
            return bad("linear terms do not match the players".into());
        }
        for (&(i, j), q) in &self.bilinear {
            if i >= j || j >= n {
                return bad(format!(
                    "bilinear block ({i}, {j}) must join distinct players in order"
                ));
            }
            if q.len() != game.num_vars(i) || q.iter().any(|r| r.len() != game.num_vars(j)) {
                return bad(format!("bilinear block ({i}, {j}) has the wrong shape"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SelectionFunction<T> {
    Welfare,
    PlayerPayoff(usize),
    Explicit(JointForm<T>),
}

impl<T: Scalar> SelectionFunction<T> {
    pub fn form(&self, game: &GameInstance<T>) -> Result<JointForm<T>> {
        match self {
            SelectionFunction::Welfare => Ok(JointForm::welfare(game)),
            SelectionFunction::PlayerPayoff(i) => {
                game.check_player(*i)?;
                Ok(JointForm::payoff(game, *i))
            }
            SelectionFunction::Explicit(f) => {
                f.check(game)?;
                Ok(f.clone())
            }
        }
    }
}

/// `f^owner(x) - f^owner(deviation; x^-owner) >= 0` as a joint form.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumCut<T> {
    pub owner: usize,
    pub deviation: Strategy,
    pub form: JointForm<T>,
}

impl<T: Scalar> EquilibriumCut<T> {
    /// Left-hand side at `profile`; nonnegative iff the cut holds there.
    pub fn slack(&self, profile: &PureProfile) -> T {
        self.form.eval(&profile.points())
    }
}

/// The opponent-only terms cancel, leaving the own-linear and bilinear
/// parts minus their values at the fixed deviation.
pub fn make_cut<T: Scalar>(
    game: &GameInstance<T>,
    player: usize,
    deviation: &Strategy,
) -> Result<EquilibriumCut<T>> {
    game.check_player(player)?;
    if !game.player(player).strategies.is_feasible(deviation)? {
        return Err(Error::InfeasibleStrategy {
            player,
            strategy: deviation.clone(),
        });
    }
    let spec = &game.player(player).payoff;
    let dev: Vec<T> = deviation.to_vector();
    let mut form = JointForm::zero(game);
    form.linear[player] = spec.own_linear.clone();
    form.constant = -spec
        .own_linear
        .iter()
        .zip(&dev)
        .fold(T::zero(), |a, (c, x)| a + c.clone() * x.clone());
    for (&j, q) in &spec.bilinear {
        form.add_bilinear(player, j, q);
        for (l, slot) in form.linear[j].iter_mut().enumerate() {
            let t = q
                .iter()
                .zip(&dev)
                .fold(T::zero(), |a, (row, x)| a + row[l].clone() * x.clone());
            *slot = slot.clone() - t;
        }
    }
    Ok(EquilibriumCut {
        owner: player,
        deviation: deviation.clone(),
        form,
    })
}

/// Column layout of the master problem: every player's block followed by
/// one product variable per linked pair of joint columns.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterLayout {
    pub offsets: Vec<usize>,
    pub dims: Vec<usize>,
    pub products: BTreeMap<(usize, usize), usize>,
}

impl MasterLayout {
    pub fn width(&self) -> usize {
        self.offsets
            .last()
            .map_or(0, |o| o + self.dims.last().copied().unwrap_or(0))
            + self.products.len()
    }

    pub fn profile_from_point<T: Scalar>(&self, point: &[T]) -> PureProfile {
        let half = T::one() / (T::one() + T::one());
        PureProfile::new(
            self.offsets
                .iter()
                .zip(&self.dims)
                .map(|(&o, &d)| Strategy((o..o + d).map(|k| point[k] > half).collect()))
                .collect(),
        )
    }

    /// The linear row of `form` over the master columns, and its constant.
    pub fn row<T: Scalar>(&self, form: &JointForm<T>) -> Result<(Vec<T>, T)> {
        let mut row = vec![T::zero(); self.width()];
        for (i, c) in form.linear.iter().enumerate() {
            for (k, v) in c.iter().enumerate() {
                row[self.offsets[i] + k] = v.clone();
            }
        }
        for (&(i, j), q) in &form.bilinear {
            for (k, r) in q.iter().enumerate() {
                for (l, v) in r.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let key = (self.offsets[i] + k, self.offsets[j] + l);
                    let z = *self
                        .products
                        .get(&key)
                        .ok_or_else(|| Error::Internal(format!("no product column for {key:?}")))?;
                    row[z] = row[z].clone() + v.clone();
                }
            }
        }
        Ok((row, form.constant.clone()))
    }
}

/// Master MILP: maximize the selection function minus its constant.
#[derive(Clone, Debug)]
pub struct Master<T> {
    pub milp: MilpProblem<T>,
    pub layout: MasterLayout,
    pub objective_constant: T,
}

impl<T: Scalar> Master<T> {
    pub fn add_cut(&mut self, cut: &EquilibriumCut<T>) -> Result<()> {
        let (row, constant) = self.layout.row(&cut.form)?;
        self.milp
            .lp
            .constraints
            .push(LinearConstraint::new(row, Sense::Ge, -constant));
        Ok(())
    }
}

fn linked_pairs<T: Scalar>(
    form: &JointForm<T>,
    offsets: &[usize],
    into: &mut BTreeSet<(usize, usize)>,
) {
    for (&(i, j), q) in &form.bilinear {
        for (k, r) in q.iter().enumerate() {
            for (l, v) in r.iter().enumerate() {
                if !v.is_zero() {
                    into.insert((offsets[i] + k, offsets[j] + l));
                }
            }
        }
    }
}

pub fn build_master_milp<T: Scalar>(
    game: &GameInstance<T>,
    h: &SelectionFunction<T>,
    cuts: &[EquilibriumCut<T>],
) -> Result<Master<T>> {
    let h = h.form(game)?;
    let n = game.num_players();
    let dims: Vec<usize> = (0..n).map(|i| game.num_vars(i)).collect();
    let mut offsets = Vec::with_capacity(n);
    let mut base = 0;
    for &d in &dims {
        offsets.push(base);
        base += d;
    }
    let mut pairs = BTreeSet::new();
    linked_pairs(&h, &offsets, &mut pairs);
    for i in 0..n {
        linked_pairs(&JointForm::payoff(game, i), &offsets, &mut pairs);
    }
    for cut in cuts {
        linked_pairs(&cut.form, &offsets, &mut pairs);
    }
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    let products: BTreeMap<(usize, usize), usize> = pairs
        .iter()
        .enumerate()
        .map(|(k, &p)| (p, base + k))
        .collect();
    let layout = MasterLayout {
        offsets,
        dims,
        products,
    };
    let width = layout.width();

    let mut constraints = Vec::new();
    for (i, p) in game.players().iter().enumerate() {
        for c in p.strategies.constraints() {
            let mut row = vec![T::zero(); width];
            for (k, v) in c.coeffs.iter().enumerate() {
                row[layout.offsets[i] + k] = v.clone();
            }
            constraints.push(LinearConstraint::new(row, c.sense, c.rhs.clone()));
        }
    }
    for mut c in linearize_products::<T>(&pairs, base).constraints {
        c.coeffs.resize(width, T::zero());
        constraints.push(c);
    }
    let (objective, objective_constant) = layout.row(&h)?;
    let milp = MilpProblem {
        lp: LinearProgram {
            sense: Objective::Maximize,
            objective,
            constraints,
            lower: vec![T::zero(); width],
            upper: vec![T::one(); width],
        },
        binary: (0..base).collect(),
    };
    let mut master = Master {
        milp,
        layout,
        objective_constant,
    };
    for cut in cuts {
        master.add_cut(cut)?;
    }
    Ok(master)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroRegretsOutcome<T> {
    /// An equilibrium maximizing the selection function over all pure equilibria.
    OptimalPureNe {
        profile: PureProfile,
        h_value: T,
        iterations: usize,
    },
    /// The cuts exclude every joint profile, so no pure equilibrium exists.
    NoPureNe { iterations: usize },
    /// `best` holds the lowest-ε candidate when tracking, else the last one.
    IterationLimit {
        best: Option<(PureProfile, T)>,
        iterations: usize,
    },
    TimeLimit {
        best: Option<(PureProfile, T)>,
        iterations: usize,
    },
}

#[derive(Clone, Debug)]
pub struct ZeroRegretsReport<T> {
    pub outcome: ZeroRegretsOutcome<T>,
    /// Every cut added, in order; for `NoPureNe` this is the certificate.
    pub cuts: Vec<EquilibriumCut<T>>,
}

pub fn solve_zero_regrets<T: Scalar>(
    game: &GameInstance<T>,
    h: &SelectionFunction<T>,
    limits: Limits,
    epsilon_track: bool,
) -> Result<ZeroRegretsReport<T>> {
    if limits.max_iterations == 0 {
        return Err(Error::InvalidGame(
            "max iterations must be at least 1".into(),
        ));
    }
    let h_form = h.form(game)?;
    let mut master = build_master_milp(game, h, &[])?;
    let mut cuts = Vec::new();
    let mut best: Option<(PureProfile, T)> = None;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let point = match solve_milp(&master.milp)? {
            MilpOutcome::Infeasible => {
                return Ok(ZeroRegretsReport {
                    outcome: ZeroRegretsOutcome::NoPureNe { iterations },
                    cuts,
                })
            }
            MilpOutcome::Optimal { point, .. } => point,
        };
        let profile = master.layout.profile_from_point(&point);
        let verdict = improve(game, &profile)?;
        if verdict.is_yes() {
            let h_value = h_form.eval(&profile.points());
            return Ok(ZeroRegretsReport {
                outcome: ZeroRegretsOutcome::OptimalPureNe {
                    profile,
                    h_value,
                    iterations,
                },
                cuts,
            });
        }
        let eps = verdict.worst_violation.clone();
        if !epsilon_track || best.as_ref().is_none_or(|(_, e)| eps < *e) {
            best = Some((profile.clone(), eps));
        }
        for (player, strategy, _) in verdict.deviations() {
            let cut = make_cut(game, player, strategy)?;
            master.add_cut(&cut)?;
            cuts.push(cut);
        }
        if limits.expired() {
            return Ok(ZeroRegretsReport {
                outcome: ZeroRegretsOutcome::TimeLimit { best, iterations },
                cuts,
            });
        }
        if iterations >= limits.max_iterations {
            return Ok(ZeroRegretsReport {
                outcome: ZeroRegretsOutcome::IterationLimit { best, iterations },
                cuts,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{knapsack_game, matching_pennies};
    use crate::scalar::{int, Rational};

    fn s(bits: &[u8]) -> Strategy {
        Strategy::from_bits(bits)
    }

    fn pure(a: &[u8], b: &[u8]) -> PureProfile {
        PureProfile::new(vec![s(a), s(b)])
    }

    #[test]
    fn welfare_master_optimum() {
        let g = knapsack_game::<Rational>();
        let m = build_master_milp(&g, &SelectionFunction::Welfare, &[]).unwrap();
        let MilpOutcome::Optimal { point, value } = solve_milp(&m.milp).unwrap() else {
            panic!("infeasible");
        };
        assert_eq!(value + m.objective_constant, int(6));
        assert_eq!(m.layout.profile_from_point(&point), pure(&[1, 0], &[0, 1]));
    }

    #[test]
    fn cut_for_second_player() {
        // 3y1 + 5y2 - 5 x1 y1 - 4 x2 y2 >= 5 - 4 x2
        let g = knapsack_game::<Rational>();
        let cut = make_cut(&g, 1, &s(&[0, 1])).unwrap();
        assert_eq!(cut.form.constant, int(-5));
        assert_eq!(cut.form.linear[1], vec![int(3), int(5)]);
        assert_eq!(cut.form.linear[0], vec![int(0), int(4)]);
        assert_eq!(
            cut.form.bilinear[&(0, 1)],
            vec![vec![int(-5), int(0)], vec![int(0), int(-4)]]
        );
    }

    #[test]
    fn cut_leaves_welfare_optimum_feasible() {
        let g = knapsack_game::<Rational>();
        let cut = make_cut(&g, 0, &s(&[0, 1])).unwrap();
        // f1((1,0);(0,1)) - f1((0,1);(0,1)) = 1 - (-1)
        assert_eq!(cut.slack(&pure(&[1, 0], &[0, 1])), int(2));
    }

    #[test]
    fn own_strategy_cut_is_tight() {
        let g = knapsack_game::<Rational>();
        let p = pure(&[1, 0], &[0, 1]);
        for i in 0..2 {
            let cut = make_cut(&g, i, &p.strategies[i]).unwrap();
            assert_eq!(cut.slack(&p), int(0));
        }
    }

    #[test]
    fn equilibria_satisfy_all_cuts() {
        let g = knapsack_game::<Rational>();
        let devs = [s(&[0, 0]), s(&[1, 0]), s(&[0, 1])];
        for ne in [pure(&[0, 1], &[1, 0]), pure(&[1, 0], &[0, 1])] {
            for i in 0..2 {
                for d in &devs {
                    assert!(make_cut(&g, i, d).unwrap().slack(&ne) >= int(0));
                }
            }
        }
    }

    #[test]
    fn infeasible_deviation_rejected() {
        let g = knapsack_game::<Rational>();
        assert!(matches!(
            make_cut(&g, 0, &s(&[1, 1])),
            Err(Error::InfeasibleStrategy { .. })
        ));
    }

    #[test]
    fn welfare_selection() {
        let g = knapsack_game::<Rational>();
        let r =
            solve_zero_regrets(&g, &SelectionFunction::Welfare, Limits::default(), true).unwrap();
        assert_eq!(
            r.outcome,
            ZeroRegretsOutcome::OptimalPureNe {
                profile: pure(&[1, 0], &[0, 1]),
                h_value: int(6),
                iterations: 1
            }
        );
        assert!(r.cuts.is_empty());
    }

    #[test]
    fn first_player_selection() {
        let g = knapsack_game::<Rational>();
        let r = solve_zero_regrets(
            &g,
            &SelectionFunction::PlayerPayoff(0),
            Limits::default(),
            true,
        )
        .unwrap();
        match r.outcome {
            ZeroRegretsOutcome::OptimalPureNe {
                profile, h_value, ..
            } => {
                assert_eq!(profile, pure(&[0, 1], &[1, 0]));
                assert_eq!(h_value, int(2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn matching_pennies_has_no_pure_equilibrium() {
        let g = matching_pennies::<Rational>();
        let r =
            solve_zero_regrets(&g, &SelectionFunction::Welfare, Limits::default(), true).unwrap();
        assert!(matches!(r.outcome, ZeroRegretsOutcome::NoPureNe { .. }));
        assert!(!r.cuts.is_empty());
    }

    #[test]
    fn iteration_limit_keeps_a_candidate() {
        let g = matching_pennies::<Rational>();
        let r = solve_zero_regrets(&g, &SelectionFunction::Welfare, Limits::iterations(1), true)
            .unwrap();
        match r.outcome {
            ZeroRegretsOutcome::IterationLimit {
                best: Some((_, eps)),
                iterations: 1,
            } => assert!(eps > int(0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_selection_is_validated() {
        let g = knapsack_game::<Rational>();
        let mut f = JointForm::zero(&g);
        f.bilinear.insert((1, 0), vec![vec![int(1); 2]; 2]);
        assert!(SelectionFunction::Explicit(f).form(&g).is_err());
    }

    #[test]
    fn joint_payoff_matches_game() {
        let g = knapsack_game::<Rational>();
        for code in 0..16u64 {
            let bits: Vec<u8> = (0..4).map(|k| (code >> k & 1) as u8).collect();
            let p = PureProfile::from_joint(&bits, &[2, 2]);
            for i in 0..2 {
                assert_eq!(
                    JointForm::payoff(&g, i).eval(&p.points()),
                    g.evaluate_pure(&p, i).unwrap()
                );
            }
        }
    }
}
