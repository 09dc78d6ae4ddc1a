//! Branch and bound over binary variables.
//!
//! Node relaxations are solved in `f64`. An integral relaxation point is
//! rounded and then certified in the problem's own scalar: binaries are
//! fixed and the remaining continuous part is re-solved with the exact
//! simplex, so the reported point and value never carry float noise.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::lp::{solve_lp, LinearProgram, LpOutcome, Objective};
use crate::game::LinearConstraint;

#[derive(Clone, Debug, PartialEq)]
pub struct MilpProblem<T> {
    pub lp: LinearProgram<T>,
    /// Indices of variables restricted to {0, 1}.
    pub binary: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MilpOutcome<T> {
    Optimal { point: Vec<T>, value: T },
    Infeasible,
}

impl<T> MilpOutcome<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            MilpOutcome::Optimal { value, .. } => Some(value),
            MilpOutcome::Infeasible => None,
        }
    }

    pub fn point(&self) -> Option<&[T]> {
        match self {
            MilpOutcome::Optimal { point, .. } => Some(point),
            MilpOutcome::Infeasible => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MilpOptions {
    pub node_limit: usize,
    pub integrality_tolerance: f64,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions {
            node_limit: 500_000,
            integrality_tolerance: 1e-9,
        }
    }
}

/// One explored node: its relaxation bound in maximization sense
/// (`None` when the relaxation was infeasible).
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub bound: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct MilpReport<T> {
    pub outcome: MilpOutcome<T>,
    pub nodes: Vec<NodeRecord>,
}

pub fn solve_milp<T: Scalar>(p: &MilpProblem<T>) -> Result<MilpOutcome<T>> {
    Ok(solve_milp_traced(p, MilpOptions::default())?.outcome)
}

struct OpenNode {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    estimate: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

pub fn solve_milp_traced<T: Scalar>(
    p: &MilpProblem<T>,
    options: MilpOptions,
) -> Result<MilpReport<T>> {
    let n = p.lp.num_vars();
    for &b in &p.binary {
        if b >= n {
            return Err(Error::DimensionMismatch {
                context: "binary index".into(),
                expected: n,
                found: b,
            });
        }
        if p.lp.lower[b] < T::zero() || p.lp.upper[b] > T::one() {
            return Err(Error::InvalidGame(format!(
                "binary variable {b} has bounds outside [0, 1]"
            )));
        }
    }
    let mut is_binary = vec![false; n];
    for &b in &p.binary {
        is_binary[b] = true;
    }
    let all_binary = is_binary.iter().all(|&b| b);
    let maximize = p.lp.sense == Objective::Maximize;
    let to_max = |v: f64| if maximize { v } else { -v };

    let float_lp = LinearProgram::<f64> {
        sense: p.lp.sense,
        objective: p.lp.objective.iter().map(Scalar::to_f64).collect(),
        constraints: p
            .lp
            .constraints
            .iter()
            .map(|c| {
                LinearConstraint::new(
                    c.coeffs.iter().map(Scalar::to_f64).collect(),
                    c.sense,
                    c.rhs.to_f64(),
                )
            })
            .collect(),
        lower: p.lp.lower.iter().map(Scalar::to_f64).collect(),
        upper: p.lp.upper.iter().map(Scalar::to_f64).collect(),
    };

    let mut incumbent: Option<(Vec<T>, T)> = None;
    let mut nodes = Vec::new();
    let mut next_id = 1usize;
    let mut open = vec![OpenNode {
        id: 0,
        parent: None,
        depth: 0,
        estimate: f64::INFINITY,
        lower: float_lp.lower.clone(),
        upper: float_lp.upper.clone(),
    }];

    while !open.is_empty() {
        if nodes.len() >= options.node_limit {
            return Err(Error::NodeLimit {
                limit: options.node_limit,
                incumbent: incumbent.map(|(x, _)| x.iter().map(Scalar::to_f64).collect()),
            });
        }
        let pick = select_node(&open);
        let node = open.swap_remove(pick);

        let mut relaxation = float_lp.clone();
        relaxation.lower = node.lower.clone();
        relaxation.upper = node.upper.clone();
        let (x, value) = match solve_lp(&relaxation)? {
            LpOutcome::Infeasible => {
                nodes.push(NodeRecord {
                    id: node.id,
                    parent: node.parent,
                    depth: node.depth,
                    bound: None,
                });
                continue;
            }
            LpOutcome::Optimal { point, value } => (point, to_max(value)),
        };
        nodes.push(NodeRecord {
            id: node.id,
            parent: node.parent,
            depth: node.depth,
            bound: Some(value),
        });

        if let Some((_, inc)) = &incumbent {
            let inc = to_max(inc.to_f64());
            if value <= inc + 1e-9 * inc.abs().max(1.0) {
                continue;
            }
        }

        let mut branch: Option<(usize, f64)> = None;
        for &b in &p.binary {
            let frac = (x[b] - x[b].round()).abs();
            if frac > options.integrality_tolerance && branch.is_none_or(|(_, f)| frac > f) {
                branch = Some((b, frac));
            }
        }

        match branch {
            None => {
                let rounded: Vec<f64> = (0..n)
                    .map(|j| if is_binary[j] { x[j].round() } else { x[j] })
                    .collect();
                if let Some((point, exact)) = certify(p, &is_binary, all_binary, &rounded)? {
                    let better = match &incumbent {
                        None => true,
                        Some((_, inc)) => {
                            if maximize {
                                exact > *inc
                            } else {
                                exact < *inc
                            }
                        }
                    };
                    if better {
                        incumbent = Some((point, exact));
                    }
                }
            }
            Some((b, _)) => {
                let first = if x[b] >= 0.5 { 1.0 } else { 0.0 };
                for val in [first, 1.0 - first] {
                    let mut lower = node.lower.clone();
                    let mut upper = node.upper.clone();
                    lower[b] = val;
                    upper[b] = val;
                    open.push(OpenNode {
                        id: next_id,
                        parent: Some(node.id),
                        depth: node.depth + 1,
                        estimate: value,
                        lower,
                        upper,
                    });
                    next_id += 1;
                }
            }
        }
    }

    let outcome = match incumbent {
        Some((point, value)) => MilpOutcome::Optimal { point, value },
        None => MilpOutcome::Infeasible,
    };
    Ok(MilpReport { outcome, nodes })
}

/// Deepest node first; among equally deep nodes the best parent bound,
/// then the oldest.
fn select_node(open: &[OpenNode]) -> usize {
    let mut best = 0;
    for (k, node) in open.iter().enumerate().skip(1) {
        let cur = &open[best];
        let better = node.depth > cur.depth
            || (node.depth == cur.depth
                && (node.estimate > cur.estimate
                    || (node.estimate == cur.estimate && node.id < cur.id)));
        if better {
            best = k;
        }
    }
    best
}

/// Exact feasibility and value of a rounded relaxation point.
fn certify<T: Scalar>(
    p: &MilpProblem<T>,
    is_binary: &[bool],
    all_binary: bool,
    rounded: &[f64],
) -> Result<Option<(Vec<T>, T)>> {
    if all_binary {
        let point: Vec<T> = rounded
            .iter()
            .map(|&v| if v > 0.5 { T::one() } else { T::zero() })
            .collect();
        if !p.lp.is_feasible(&point) {
            return Ok(None);
        }
        let value = p.lp.objective_value(&point);
        return Ok(Some((point, value)));
    }
    let mut fixed = p.lp.clone();
    for (j, &bin) in is_binary.iter().enumerate() {
        if bin {
            let v = if rounded[j] > 0.5 {
                T::one()
            } else {
                T::zero()
            };
            fixed.lower[j] = v.clone();
            fixed.upper[j] = v;
        }
    }
    Ok(match solve_lp(&fixed)? {
        LpOutcome::Optimal { point, value } => Some((point, value)),
        LpOutcome::Infeasible => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Sense;
    use crate::scalar::{int, ratio, Rational};

    fn knapsack_milp() -> MilpProblem<Rational> {
        let mut lp = LinearProgram::unit_box(vec![int(1), int(2)]);
        lp.constraints.push(LinearConstraint::new(
            vec![int(3), int(4)],
            Sense::Le,
            int(5),
        ));
        MilpProblem {
            lp,
            binary: vec![0, 1],
        }
    }

    #[test]
    fn small_knapsack() {
        let out = solve_milp(&knapsack_milp()).unwrap();
        assert_eq!(out.point().unwrap(), &[ratio(0, 1), ratio(1, 1)]);
        assert_eq!(out.value(), Some(&ratio(2, 1)));
    }

    #[test]
    fn contradictory_is_infeasible() {
        let mut lp = LinearProgram::<Rational>::unit_box(vec![int(0)]);
        lp.constraints
            .push(LinearConstraint::new(vec![int(1)], Sense::Ge, int(1)));
        lp.constraints
            .push(LinearConstraint::new(vec![int(1)], Sense::Le, int(0)));
        let out = solve_milp(&MilpProblem {
            lp,
            binary: vec![0],
        })
        .unwrap();
        assert_eq!(out, MilpOutcome::Infeasible);
    }

    #[test]
    fn node_limit_reports_incumbent() {
        // Odd-capacity parity problem: the relaxation stays fractional for a while.
        let k = 7;
        let mut lp = LinearProgram::<Rational>::unit_box(vec![int(1); k]);
        lp.constraints
            .push(LinearConstraint::new(vec![int(2); k], Sense::Le, int(7)));
        let p = MilpProblem {
            lp,
            binary: (0..k).collect(),
        };
        let err = solve_milp_traced(
            &p,
            MilpOptions {
                node_limit: 2,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NodeLimit { limit: 2, .. }));
        let full = solve_milp(&p).unwrap();
        assert_eq!(full.value(), Some(&int(3)));
    }

    #[test]
    fn rejects_non_binary_bounds() {
        let mut p = knapsack_milp();
        p.lp.upper[0] = int(2);
        assert!(solve_milp(&p).is_err());
    }

    #[test]
    fn minimization_and_continuous_part() {
        // min -x - y + z, z >= x + y - 1, z continuous in [0, 1], x, y binary
        let lp = LinearProgram::<Rational> {
            sense: Objective::Minimize,
            objective: vec![int(-1), int(-1), int(1)],
            constraints: vec![LinearConstraint::new(
                vec![int(1), int(1), int(-1)],
                Sense::Le,
                int(1),
            )],
            lower: vec![int(0); 3],
            upper: vec![int(1); 3],
        };
        let out = solve_milp(&MilpProblem {
            lp,
            binary: vec![0, 1],
        })
        .unwrap();
        assert_eq!(out.value(), Some(&int(-1)));
    }
}
