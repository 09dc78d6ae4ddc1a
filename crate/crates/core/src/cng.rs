//! Critical node game: a defender protects and an attacker targets
//! resources under knapsack budgets. Per resource the outcome is one of
//!
//! | defender `x` | attacker `α` | defender payoff | attacker payoff |
//! |---|---|---|---|
//! | 0 | 0 | `pd`     | `-γ pa`      |
//! | 0 | 1 | `δ pd`   | `pa`         |
//! | 1 | 0 | `ε pd`   | `0`          |
//! | 1 | 1 | `η pd`   | `(1 - η) pa` |
//!
//! and payoffs add over resources. Also here: the sequential variant in
//! which the defender commits first, the price of stability, and a seeded
//! instance generator.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{GameInstance, PayoffSpec, Player, PureProfile, Strategy, StrategySet};
use crate::kernel::{solve_knapsack, solve_milp, KnapsackProblem, MilpOutcome};
use crate::scalar::{Rational, Scalar};
use crate::zero_regrets::{build_master_milp, SelectionFunction};

/// Largest resource count for which the sequential game is solved by
/// enumerating defender strategies.
pub const MCNP_RESOURCE_CAP: usize = 22;

#[derive(Clone, Debug, PartialEq)]
pub struct CngInstance {
    pub pd: Vec<Rational>,
    pub pa: Vec<Rational>,
    pub d: Vec<u64>,
    pub a: Vec<u64>,
    pub defender_budget: u64,
    pub attacker_budget: u64,
    pub delta: Rational,
    pub eta: Rational,
    pub epsilon: Rational,
    pub gamma: Rational,
}

fn unit(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

impl CngInstance {
    pub fn resources(&self) -> usize {
        self.pd.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.resources();
        let bad = |m: String| Err(Error::InvalidCng(m));
        if n == 0 {
            return bad("no resources".into());
        }
        if self.pa.len() != n || self.d.len() != n || self.a.len() != n {
            return bad(format!(
                "vector lengths differ: pd {}, pa {}, d {}, a {}",
                n,
                self.pa.len(),
                self.d.len(),
                self.a.len()
            ));
        }
        if self.pd.iter().chain(&self.pa).any(|p| !p.is_positive()) {
            return bad("criticality weights must be positive".into());
        }
        if self.d.iter().chain(&self.a).any(|&c| c == 0) {
            return bad("costs must be positive".into());
        }
        if self.d.iter().chain(&self.a).any(|&c| c > i64::MAX as u64)
            || self.defender_budget > i64::MAX as u64
            || self.attacker_budget > i64::MAX as u64
        {
            return bad("costs and budgets must fit in 63 bits".into());
        }
        for (name, v) in [
            ("delta", &self.delta),
            ("eta", &self.eta),
            ("epsilon", &self.epsilon),
            ("gamma", &self.gamma),
        ] {
            if !unit(v) {
                return bad(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        if !(self.delta < self.eta && self.eta < self.epsilon) {
            return bad(format!(
                "need delta < eta < epsilon, got {} / {} / {}",
                self.delta, self.eta, self.epsilon
            ));
        }
        Ok(())
    }

    /// The simultaneous game: player 0 defends, player 1 attacks.
    pub fn to_game<T: Scalar>(&self, name: impl Into<String>) -> Result<GameInstance<T>> {
        self.validate()?;
        let n = self.resources();
        let one = Rational::one();
        let t = |r: Rational| T::from_rational(&r);
        let diag = |v: Vec<T>| -> Vec<Vec<T>> {
            v.into_iter()
                .enumerate()
                .map(|(k, x)| {
                    let mut row = vec![T::zero(); n];
                    row[k] = x;
                    row
                })
                .collect()
        };
        let scaled =
            |p: &[Rational], f: &Rational| -> Vec<T> { p.iter().map(|x| t(x * f)).collect() };
        let sum_pd: Rational = self.pd.iter().sum();
        let sum_pa: Rational = self.pa.iter().sum();
        let ints = |v: &[u64]| -> Vec<i64> { v.iter().map(|&x| x as i64).collect() };

        let defender = Player {
            strategies: StrategySet::knapsack(&ints(&self.d), self.defender_budget as i64)?,
            payoff: PayoffSpec::linear(t(sum_pd), scaled(&self.pd, &(&self.epsilon - &one)))
                .with_opp_linear(1, scaled(&self.pd, &(&self.delta - &one)))
                .with_bilinear(
                    1,
                    diag(scaled(
                        &self.pd,
                        &(&one + &self.eta - &self.epsilon - &self.delta),
                    )),
                ),
        };
        let attacker = Player {
            strategies: StrategySet::knapsack(&ints(&self.a), self.attacker_budget as i64)?,
            payoff: PayoffSpec::linear(
                t(-(&self.gamma * sum_pa)),
                scaled(&self.pa, &(&one + &self.gamma)),
            )
            .with_opp_linear(0, scaled(&self.pa, &self.gamma))
            .with_bilinear(0, diag(scaled(&self.pa, &-(&self.gamma + &self.eta)))),
        };
        GameInstance::new(name, vec![defender, attacker])
    }

    /// Payoffs of resource `k` straight from the four outcome cases.
    pub fn case_payoffs(&self, k: usize, protected: bool, attacked: bool) -> (Rational, Rational) {
        let (pd, pa) = (&self.pd[k], &self.pa[k]);
        match (protected, attacked) {
            (false, false) => (pd.clone(), -(&self.gamma * pa)),
            (false, true) => (&self.delta * pd, pa.clone()),
            (true, false) => (&self.epsilon * pd, Rational::zero()),
            (true, true) => (&self.eta * pd, (Rational::one() - &self.eta) * pa),
        }
    }

    /// `(defender, attacker)` payoffs summed over resources by cases.
    pub fn case_outcome(&self, x: &Strategy, alpha: &Strategy) -> (Rational, Rational) {
        (0..self.resources()).fold((Rational::zero(), Rational::zero()), |(fd, fa), k| {
            let (d, a) = self.case_payoffs(k, x.bits()[k], alpha.bits()[k]);
            (fd + d, fa + a)
        })
    }

    fn defender_cost(&self, x: &Strategy) -> u128 {
        x.ones().map(|k| u128::from(self.d[k])).sum()
    }

    fn attacker_cost(&self, alpha: &Strategy) -> u128 {
        alpha.ones().map(|k| u128::from(self.a[k])).sum()
    }

    /// Attacker's optimal reply to a committed defense. Among replies of
    /// equal value the follower favors (optimistic) or harms (pessimistic)
    /// the defender.
    pub fn attacker_reply(&self, x: &Strategy, tie: TieBreak) -> Result<Strategy> {
        let n = self.resources();
        let one = Rational::one();
        let mut primary = Vec::with_capacity(n);
        let mut secondary = Vec::with_capacity(n);
        for k in 0..n {
            let xk = if x.bits()[k] {
                one.clone()
            } else {
                Rational::zero()
            };
            primary.push(&self.pa[k] * (&one + &self.gamma - (&self.gamma + &self.eta) * &xk));
            let dk = &self.pd[k]
                * (&self.delta - &one + (&one + &self.eta - &self.epsilon - &self.delta) * &xk);
            secondary.push(match tie {
                TieBreak::Optimistic => dk,
                TieBreak::Pessimistic => -dk,
            });
        }
        Ok(solve_knapsack(&KnapsackProblem {
            weights: self.a.clone(),
            capacity: self.attacker_budget,
            primary,
            secondary: Some(secondary),
        })?
        .selection)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    Optimistic,
    Pessimistic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McnpSolution {
    pub defender: Strategy,
    pub attacker: Strategy,
    pub leader_value: Rational,
}

/// Sequential game: the defender commits, the attacker replies. Defender
/// strategies are enumerated depth first with budget pruning, visiting
/// `x_k = 0` before `x_k = 1`, so the lexicographically smallest strategy
/// wins ties.
pub fn solve_mcnp(c: &CngInstance, tie: TieBreak) -> Result<McnpSolution> {
    c.validate()?;
    let n = c.resources();
    if n > MCNP_RESOURCE_CAP {
        return Err(Error::EnumerationCap {
            size: n,
            cap: MCNP_RESOURCE_CAP,
        });
    }
    let mut best: Option<McnpSolution> = None;
    let mut bits = vec![false; n];
    visit(c, tie, 0, 0, &mut bits, &mut best)?;
    best.ok_or_else(|| Error::Internal("no defender strategy visited".into()))
}

fn visit(
    c: &CngInstance,
    tie: TieBreak,
    k: usize,
    spent: u64,
    bits: &mut Vec<bool>,
    best: &mut Option<McnpSolution>,
) -> Result<()> {
    if k == bits.len() {
        let x = Strategy(bits.clone());
        let alpha = c.attacker_reply(&x, tie)?;
        let (value, _) = c.case_outcome(&x, &alpha);
        if best.as_ref().is_none_or(|b| value > b.leader_value) {
            *best = Some(McnpSolution {
                defender: x,
                attacker: alpha,
                leader_value: value,
            });
        }
        return Ok(());
    }
    visit(c, tie, k + 1, spent, bits, best)?;
    if spent + c.d[k] <= c.defender_budget {
        bits[k] = true;
        visit(c, tie, k + 1, spent + c.d[k], bits, best)?;
        bits[k] = false;
    }
    Ok(())
}

/// Largest defender payoff over all jointly budget-feasible outcomes.
pub fn best_defender_outcome(c: &CngInstance) -> Result<Rational> {
    let game = c.to_game::<Rational>("cng")?;
    let master = build_master_milp(&game, &SelectionFunction::PlayerPayoff(0), &[])?;
    match solve_milp(&master.milp)? {
        MilpOutcome::Optimal { value, .. } => Ok(value + master.objective_constant),
        MilpOutcome::Infeasible => {
            Err(Error::Internal("all-zeros outcome must be feasible".into()))
        }
    }
}

/// Best defender payoff over the joint feasible outcomes divided by the
/// defender payoff at `(x, alpha)`.
pub fn price_of_stability(c: &CngInstance, x: &Strategy, alpha: &Strategy) -> Result<Rational> {
    let best = best_defender_outcome(c)?;
    price_of_stability_with(c, &best, x, alpha)
}

/// As [`price_of_stability`] with a precomputed numerator.
pub fn price_of_stability_with(
    c: &CngInstance,
    best: &Rational,
    x: &Strategy,
    alpha: &Strategy,
) -> Result<Rational> {
    c.validate()?;
    let n = c.resources();
    if x.len() != n || alpha.len() != n {
        return Err(Error::DimensionMismatch {
            context: "price of stability solution".into(),
            expected: n,
            found: if x.len() != n { x.len() } else { alpha.len() },
        });
    }
    if c.defender_cost(x) > u128::from(c.defender_budget) {
        return Err(Error::InfeasibleStrategy {
            player: 0,
            strategy: x.clone(),
        });
    }
    if c.attacker_cost(alpha) > u128::from(c.attacker_budget) {
        return Err(Error::InfeasibleStrategy {
            player: 1,
            strategy: alpha.clone(),
        });
    }
    let (value, _) = c.case_outcome(x, alpha);
    if !value.is_positive() {
        return Err(Error::NonPositiveDenominator(value.to_string()));
    }
    Ok(best / value)
}

/// Convenience for profiles of the simultaneous game.
pub fn price_of_stability_of(c: &CngInstance, profile: &PureProfile) -> Result<Rational> {
    price_of_stability(c, &profile.strategies[0], &profile.strategies[1])
}

/// Parameter ranges of the instance generator.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorProfile {
    /// Inclusive integer range of `pd` and `pa`.
    pub criticality: (u64, u64),
    /// Inclusive integer range of `d` and `a`.
    pub cost: (u64, u64),
    /// Budget fractions; each budget is `ceil(ρ · total cost)`.
    pub budget_fractions: Vec<Rational>,
    /// `δ, η, ε` are drawn from `{0, 1/grid, ..., 1}`.
    pub factor_grid: u64,
    /// `γ` is drawn from `{0, 1/grid, ..., gamma_max}`.
    pub gamma_max: Rational,
}

impl Default for GeneratorProfile {
    fn default() -> Self {
        let r = |n: i64, d: i64| Rational::from_ratio(n, d);
        GeneratorProfile {
            criticality: (1, 100),
            cost: (1, 25),
            budget_fractions: vec![r(3, 10), r(9, 20), r(3, 5)],
            factor_grid: 100,
            gamma_max: r(3, 10),
        }
    }
}

impl GeneratorProfile {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidCng(format!("generator: {m}")));
        if self.criticality.0 == 0 || self.criticality.0 > self.criticality.1 {
            return bad("criticality range must be positive and ordered");
        }
        if self.cost.0 == 0 || self.cost.0 > self.cost.1 {
            return bad("cost range must be positive and ordered");
        }
        if self.budget_fractions.is_empty() || self.budget_fractions.iter().any(|r| !unit(r)) {
            return bad("budget fractions must be nonempty and within [0, 1]");
        }
        if self.factor_grid < 2 {
            return bad("factor grid needs at least three points");
        }
        if !unit(&self.gamma_max) {
            return bad("gamma maximum must be within [0, 1]");
        }
        Ok(())
    }
}

/// Seeded stream for instance `index` of the given size.
fn instance_rng(seed: u64, size: usize, index: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(size as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(index as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn ceil_fraction(r: &Rational, total: u64) -> u64 {
    let v = r * Rational::from_integer(total.into());
    v.numer()
        .div_ceil(v.denom())
        .to_u64()
        .expect("budget fits u64")
}

pub fn generate_instance(
    size: usize,
    seed: u64,
    index: usize,
    profile: &GeneratorProfile,
) -> Result<CngInstance> {
    profile.validate()?;
    if size == 0 {
        return Err(Error::InvalidCng("generator: size must be positive".into()));
    }
    let mut rng = instance_rng(seed, size, index);
    let (cl, ch) = profile.criticality;
    let (wl, wh) = profile.cost;
    let int = |v: u64| Rational::from_integer(v.into());
    let pd: Vec<Rational> = (0..size).map(|_| int(rng.gen_range(cl..=ch))).collect();
    let pa: Vec<Rational> = (0..size).map(|_| int(rng.gen_range(cl..=ch))).collect();
    let d: Vec<u64> = (0..size).map(|_| rng.gen_range(wl..=wh)).collect();
    let a: Vec<u64> = (0..size).map(|_| rng.gen_range(wl..=wh)).collect();
    let fractions = &profile.budget_fractions;
    let rho_d = &fractions[rng.gen_range(0..fractions.len())];
    let rho_a = &fractions[rng.gen_range(0..fractions.len())];
    let grid = profile.factor_grid;
    let mut factors = loop {
        let mut k: [u64; 3] = [
            rng.gen_range(0..=grid),
            rng.gen_range(0..=grid),
            rng.gen_range(0..=grid),
        ];
        k.sort_unstable();
        if k[0] < k[1] && k[1] < k[2] {
            break k;
        }
    }
    .map(|k| Rational::new(k.into(), grid.into()));
    let gamma_steps = (&profile.gamma_max * Rational::from_integer(grid.into()))
        .floor()
        .to_integer();
    let gamma_k = rng.gen_range(0..=gamma_steps.to_u64().expect("small"));
    let epsilon = std::mem::take(&mut factors[2]);
    let eta = std::mem::take(&mut factors[1]);
    let delta = std::mem::take(&mut factors[0]);
    let instance = CngInstance {
        defender_budget: ceil_fraction(rho_d, d.iter().sum()),
        attacker_budget: ceil_fraction(rho_a, a.iter().sum()),
        pd,
        pa,
        d,
        a,
        delta,
        eta,
        epsilon,
        gamma: Rational::new(gamma_k.into(), grid.into()),
    };
    instance.validate()?;
    Ok(instance)
}

/// `count` instances of `size` resources, each determined by
/// `(seed, size, index)` alone.
pub fn generate_instances(
    size: usize,
    count: usize,
    seed: u64,
    profile: &GeneratorProfile,
) -> Result<Vec<CngInstance>> {
    (0..count)
        .map(|index| generate_instance(size, seed, index, profile))
        .collect()
}
