use crate::game::{LinearConstraint, Sense};
use crate::scalar::Scalar;

/// Auxiliary variables and constraints replacing products of binaries.
#[derive(Clone, Debug, PartialEq)]
pub struct Linearization<T> {
    /// `aux[k]` stands for `x[pairs[k].0] * x[pairs[k].1]`.
    pub aux: Vec<usize>,
    pub constraints: Vec<LinearConstraint<T>>,
}

/// For every pair `(j, k)` introduces `z = x_j x_k` through
/// `z <= x_j`, `z <= x_k`, `z >= x_j + x_k - 1`. The auxiliary variables are
/// numbered from `first_aux`; coefficient vectors span
/// `first_aux + pairs.len()` columns. Callers bound each `z` to `[0, 1]`.
pub fn linearize_products<T: Scalar>(
    pairs: &[(usize, usize)],
    first_aux: usize,
) -> Linearization<T> {
    let width = first_aux + pairs.len();
    let mut constraints = Vec::with_capacity(3 * pairs.len());
    let mut aux = Vec::with_capacity(pairs.len());
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let z = first_aux + k;
        aux.push(z);
        for x in [a, b] {
            let mut row = vec![T::zero(); width];
            row[z] = T::one();
            row[x] = -T::one();
            constraints.push(LinearConstraint::new(row, Sense::Le, T::zero()));
        }
        let mut row = vec![T::zero(); width];
        row[z] = T::one();
        row[a] = row[a].clone() - T::one();
        row[b] = row[b].clone() - T::one();
        constraints.push(LinearConstraint::new(row, Sense::Ge, -T::one()));
    }
    Linearization { aux, constraints }
}
