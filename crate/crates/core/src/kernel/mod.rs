//! Mathematical-programming kernel: simplex LP, binary branch and bound,
//! product linearization, and a lexicographic knapsack DP.

mod knapsack;
mod linearize;
mod lp;
mod milp;

pub use knapsack::{
    solve_knapsack, solve_knapsack_capped, KnapsackProblem, KnapsackSolution, KNAPSACK_CELL_CAP,
};
pub use linearize::{linearize_products, Linearization};
pub use lp::{solve_lp, solve_lp_with, LinearProgram, LpOutcome, Objective, SimplexOptions};
pub use milp::{
    solve_milp, solve_milp_traced, MilpOptions, MilpOutcome, MilpProblem, MilpReport, NodeRecord,
};
