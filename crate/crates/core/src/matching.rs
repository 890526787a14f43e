//! Circle metric and estimate-to-truth matching.

use crate::error::{PronyError, Result};
use crate::model::PronyModel;
use crate::scalar::{modulus, Real};

/// Largest `K` for which [`match_estimates`] searches all permutations.
pub const EXHAUSTIVE_MATCH_LIMIT: usize = 8;

/// Distance between two angles on the circle, `min_n |x - y + 2πn|`.
pub fn circle_distance<T: Real>(x: T, y: T) -> T {
    let two_pi = T::two_pi();
    // Reducing |x - y| keeps the result exactly symmetric.
    let r = (x - y).abs() % two_pi;
    r.min(two_pi - r)
}

/// Result of matching an estimated model against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport<T: Real = f64> {
    /// `assignment[i]` is the estimated node matched to true node `i`.
    pub assignment: Vec<usize>,
    /// Circle distance between matched node arguments, per true node.
    pub node_errors: Vec<T>,
    /// `|c̃_{ℓ} - c_{ℓ}|` per true node and coefficient.
    pub coefficient_errors: Vec<Vec<T>>,
}

impl<T: Real> MatchReport<T> {
    pub fn max_node_error(&self) -> T {
        self.node_errors.iter().fold(T::zero(), |a, &b| a.max(b))
    }

    pub fn max_coefficient_error(&self) -> T {
        self.coefficient_errors.iter().flatten().fold(T::zero(), |a, &b| a.max(b))
    }

    pub fn is_identity(&self) -> bool {
        self.assignment.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// Pairs estimated nodes with true nodes so that the total circle distance
/// of node arguments is minimal, then reports per-node and per-coefficient
/// errors under that pairing.
///
/// Only nodes of equal multiplicity may be paired. Up to
/// [`EXHAUSTIVE_MATCH_LIMIT`] nodes the search is exhaustive; beyond that a
/// greedy nearest-pair assignment is used.
pub fn match_estimates<T: Real>(estimated: &PronyModel<T>, truth: &PronyModel<T>) -> Result<MatchReport<T>> {
    let k = truth.node_count();
    if estimated.node_count() != k {
        return Err(PronyError::StructureMismatch(format!(
            "estimate has {} nodes, truth has {k}",
            estimated.node_count()
        )));
    }
    let mut est_mult = estimated.multiplicities();
    let mut true_mult = truth.multiplicities();
    let (est_l, true_l) = (est_mult.clone(), true_mult.clone());
    est_mult.sort_unstable();
    true_mult.sort_unstable();
    if est_mult != true_mult {
        return Err(PronyError::StructureMismatch("multiplicities differ".into()));
    }

    let est_args = estimated.node_args();
    let true_args = truth.node_args();
    let cost = |i: usize, j: usize| circle_distance(true_args[i], est_args[j]);

    let assignment = min_cost_assignment(k, &cost, &|i: usize, j: usize| true_l[i] == est_l[j]);

    let node_errors = (0..k).map(|i| cost(i, assignment[i])).collect();
    let coefficient_errors = (0..k)
        .map(|i| {
            truth.coefficients()[i]
                .iter()
                .zip(&estimated.coefficients()[assignment[i]])
                .map(|(&a, &b)| modulus(a - b))
                .collect()
        })
        .collect();
    Ok(MatchReport { assignment, node_errors, coefficient_errors })
}

/// Assignment `i ↦ assignment[i]` minimizing `Σ cost(i, assignment[i])` over
/// permitted pairs; exhaustive up to [`EXHAUSTIVE_MATCH_LIMIT`], greedy beyond.
/// Ties resolve to the lexicographically first permutation.
pub(crate) fn min_cost_assignment<T: Real>(
    k: usize,
    cost: &impl Fn(usize, usize) -> T,
    allowed: &impl Fn(usize, usize) -> bool,
) -> Vec<usize> {
    if k <= EXHAUSTIVE_MATCH_LIMIT {
        let mut search = Search { k, cost, allowed, used: vec![false; k], current: Vec::with_capacity(k), best: None };
        search.run(T::zero());
        if let Some((_, a)) = search.best {
            return a;
        }
    }
    greedy(k, cost, allowed)
}

struct Search<'a, T, C, A> {
    k: usize,
    cost: &'a C,
    allowed: &'a A,
    used: Vec<bool>,
    current: Vec<usize>,
    best: Option<(T, Vec<usize>)>,
}

impl<T: Real, C: Fn(usize, usize) -> T, A: Fn(usize, usize) -> bool> Search<'_, T, C, A> {
    fn run(&mut self, acc: T) {
        if let Some((b, _)) = &self.best {
            if acc >= *b {
                return;
            }
        }
        let i = self.current.len();
        if i == self.k {
            self.best = Some((acc, self.current.clone()));
            return;
        }
        for j in 0..self.k {
            if self.used[j] || !(self.allowed)(i, j) {
                continue;
            }
            self.used[j] = true;
            self.current.push(j);
            self.run(acc + (self.cost)(i, j));
            self.current.pop();
            self.used[j] = false;
        }
    }
}

fn greedy<T: Real>(k: usize, cost: &impl Fn(usize, usize) -> T, allowed: &impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut pairs: Vec<(T, usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| allowed(i, j))
        .map(|(i, j)| (cost(i, j), i, j))
        .collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut assignment = vec![usize::MAX; k];
    let mut taken = vec![false; k];
    for (_, i, j) in pairs {
        if assignment[i] == usize::MAX && !taken[j] {
            assignment[i] = j;
            taken[j] = true;
        }
    }
    assignment
}
