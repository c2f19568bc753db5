//! Approximation scheme for the weighted multiple-choice multidimensional
//! knapsack against a unit-capacity knapsack.
//!
//! The scheme guesses the set of heaviest chosen incarnations (up to
//! `q = min(n, ceil(D / epsilon))` of them), fixes the guess in the LP
//! relaxation, solves for an optimal *basic* solution, rounds it down, and
//! keeps the best selection over all guesses. Basic solutions matter: they
//! have at most `D` non-integral item variables, so rounding loses at most
//! `D` incarnations, each no heavier than the lightest guessed one. The
//! returned value is at least `opt / (1 + epsilon)`.
//!
//! Bin types are ignored here; callers with real bins rescale sizes by the
//! target bin's capacities first (see `cover::separate`).

use crate::model::{Item, KnapsackSelection};
use crate::simplex::{self, LpProblem, RowOp, Sense};
use crate::{FEAS_TOL, INT_TOL};

/// A guessed set of items with one incarnation chosen for each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guess {
    /// Ascending item indices, at most `q` of them.
    pub items: Vec<usize>,
    /// Chosen incarnation per guessed item, parallel to `items`.
    pub incarnations: Vec<usize>,
}

impl Guess {
    pub fn empty() -> Self {
        Guess {
            items: Vec::new(),
            incarnations: Vec::new(),
        }
    }
}

/// Streams every guess `(G, g)` with `|G| <= q` exactly once, ordered
/// lexicographically by item set and then by incarnation map.
pub struct GuessEnumerator<'a> {
    items: &'a [Item],
    q: usize,
    size: usize,
    combo: Vec<usize>,
    incs: Vec<usize>,
    exhausted: bool,
}

/// Enumerates guesses over `items` with cardinality at most `q`.
pub fn enumerate_guesses(items: &[Item], q: usize) -> GuessEnumerator<'_> {
    GuessEnumerator {
        items,
        q,
        size: 0,
        combo: Vec::new(),
        incs: Vec::new(),
        exhausted: false,
    }
}

impl GuessEnumerator<'_> {
    /// Moves `combo` to the next size-`size` combination in lexicographic
    /// order; false when exhausted.
    fn next_combination(&mut self) -> bool {
        let n = self.items.len();
        let k = self.size;
        let mut pos = k;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            if self.combo[pos] < n - (k - pos) {
                self.combo[pos] += 1;
                for p in pos + 1..k {
                    self.combo[p] = self.combo[p - 1] + 1;
                }
                return true;
            }
        }
    }

    /// Advances the incarnation odometer (last position fastest); false on
    /// wrap-around.
    fn next_incarnations(&mut self) -> bool {
        for pos in (0..self.size).rev() {
            let limit = self.items[self.combo[pos]].incarnations.len();
            if self.incs[pos] + 1 < limit {
                self.incs[pos] += 1;
                for p in pos + 1..self.size {
                    self.incs[p] = 0;
                }
                return true;
            }
        }
        false
    }

    fn start_size(&mut self, size: usize) -> bool {
        let n = self.items.len();
        if size > self.q || size > n {
            return false;
        }
        self.size = size;
        self.combo = (0..size).collect();
        self.incs = vec![0; size];
        true
    }
}

impl Iterator for GuessEnumerator<'_> {
    type Item = Guess;

    fn next(&mut self) -> Option<Guess> {
        if self.exhausted {
            return None;
        }
        let guess = Guess {
            items: self.combo.clone(),
            incarnations: self.incs.clone(),
        };
        // Advance for the next call.
        if !self.next_incarnations() {
            if self.next_combination() {
                self.incs.iter_mut().for_each(|v| *v = 0);
            } else {
                let next = self.size + 1;
                if !self.start_size(next) {
                    self.exhausted = true;
                }
            }
        }
        Some(guess)
    }
}

/// The LP left after fixing a guess: residual capacities, the still-free
/// variables, and the guess's minimum weight (incarnations heavier than it
/// are fixed to zero).
#[derive(Clone, Debug)]
pub struct RestrictedMmkLp {
    pub residual: Vec<f64>,
    pub free_vars: Vec<(usize, usize)>,
    pub min_guess_weight: f64,
    pub guess_value: f64,
}

/// Builds the restricted LP data for a guess, or `None` when the guess
/// already overfills some dimension.
pub fn build_restricted_lp(
    dimension: usize,
    items: &[Item],
    guess: &Guess,
) -> Option<RestrictedMmkLp> {
    let mut residual = vec![1.0; dimension];
    let mut min_guess_weight = f64::INFINITY;
    let mut guess_value = 0.0;
    for (&i, &j) in guess.items.iter().zip(&guess.incarnations) {
        let inc = &items[i].incarnations[j];
        for (d, &a) in inc.sizes.iter().enumerate() {
            residual[d] -= a;
        }
        min_guess_weight = min_guess_weight.min(inc.weight);
        guess_value += inc.weight;
    }
    for r in residual.iter_mut() {
        if *r < -FEAS_TOL {
            return None;
        }
        if *r < 0.0 {
            *r = 0.0;
        }
    }
    let mut free_vars = Vec::new();
    let mut guessed = vec![false; items.len()];
    for &i in &guess.items {
        guessed[i] = true;
    }
    for (i, item) in items.iter().enumerate() {
        if guessed[i] {
            continue;
        }
        for (j, inc) in item.incarnations.iter().enumerate() {
            if inc.weight > min_guess_weight {
                continue;
            }
            free_vars.push((i, j));
        }
    }
    Some(RestrictedMmkLp {
        residual,
        free_vars,
        min_guess_weight,
        guess_value,
    })
}

fn solve_restricted(items: &[Item], lp: &RestrictedMmkLp) -> simplex::LpSolution {
    let nv = lp.free_vars.len();
    let objective: Vec<f64> = lp
        .free_vars
        .iter()
        .map(|&(i, j)| items[i].incarnations[j].weight)
        .collect();
    let mut problem = LpProblem::new(Sense::Maximize, objective);
    for (d, &cap) in lp.residual.iter().enumerate() {
        let coeffs: Vec<f64> = lp
            .free_vars
            .iter()
            .map(|&(i, j)| items[i].incarnations[j].sizes[d])
            .collect();
        problem.add_row(coeffs, RowOp::Le, cap);
    }
    // One choice row per item that still has free variables.
    let mut row_items: Vec<usize> = lp.free_vars.iter().map(|&(i, _)| i).collect();
    row_items.dedup();
    for &ri in &row_items {
        let coeffs: Vec<f64> = lp
            .free_vars
            .iter()
            .map(|&(i, _)| if i == ri { 1.0 } else { 0.0 })
            .collect();
        problem.add_row(coeffs, RowOp::Le, 1.0);
    }
    debug_assert!(nv == 0 || !problem.rows.is_empty());
    simplex::solve(&problem).expect("restricted knapsack LP is feasible and bounded")
}

/// Floors a basic LP solution into a selection: free variables at value at
/// least `1 - INT_TOL` are kept alongside the guess-fixed incarnations.
pub fn round_down(
    items: &[Item],
    lp: &RestrictedMmkLp,
    solution: &simplex::LpSolution,
    guess: &Guess,
) -> KnapsackSelection {
    let mut chosen: Vec<(usize, usize)> = guess
        .items
        .iter()
        .cloned()
        .zip(guess.incarnations.iter().cloned())
        .collect();
    let mut value = lp.guess_value;
    for (var, &(i, j)) in lp.free_vars.iter().enumerate() {
        if solution.values[var] >= 1.0 - INT_TOL {
            chosen.push((i, j));
            value += items[i].incarnations[j].weight;
        }
    }
    chosen.sort_unstable();
    KnapsackSelection { chosen, value }
}

/// Diagnostics from a [`solve_mmk_report`] run.
#[derive(Clone, Debug)]
pub struct MmkReport {
    pub selection: KnapsackSelection,
    /// Guesses whose residual capacities were nonnegative.
    pub accepted_guesses: usize,
    /// Largest count, over all accepted guesses, of items holding a
    /// non-integral variable in the basic optimal solution. A fractional
    /// item occupies at least two positive variables of its choice row, so
    /// this never exceeds the dimension; rounding therefore loses at most
    /// `D` items.
    pub max_fractional_items: usize,
}

/// Runs the scheme and reports per-run diagnostics alongside the selection.
pub fn solve_mmk_report(dimension: usize, items: &[Item], epsilon: f64) -> MmkReport {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let n = items.len();
    let q = n.min((dimension as f64 / epsilon).ceil() as usize);

    let mut best: Option<KnapsackSelection> = None;
    let mut accepted = 0usize;
    let mut max_fractional = 0usize;
    for guess in enumerate_guesses(items, q) {
        let lp = match build_restricted_lp(dimension, items, &guess) {
            Some(lp) => lp,
            None => continue,
        };
        accepted += 1;
        let selection = if lp.free_vars.is_empty() {
            round_down(
                items,
                &lp,
                &simplex::LpSolution {
                    values: Vec::new(),
                    objective: 0.0,
                    duals: Vec::new(),
                    basis: Vec::new(),
                    num_structural: 0,
                },
                &guess,
            )
        } else {
            let solution = solve_restricted(items, &lp);
            let mut fractional_items: Vec<usize> = lp
                .free_vars
                .iter()
                .zip(&solution.values)
                .filter(|(_, &v)| v > INT_TOL && v < 1.0 - INT_TOL)
                .map(|(&(i, _), _)| i)
                .collect();
            fractional_items.dedup();
            max_fractional = max_fractional.max(fractional_items.len());
            round_down(items, &lp, &solution, &guess)
        };
        if best.as_ref().is_none_or(|b| selection.value > b.value) {
            best = Some(selection);
        }
    }
    MmkReport {
        selection: best.unwrap_or_else(KnapsackSelection::empty),
        accepted_guesses: accepted,
        max_fractional_items: max_fractional,
    }
}

/// Maximum-weight selection of at most one incarnation per item subject to
/// unit capacity per dimension; the value is at least `opt / (1 + epsilon)`.
pub fn solve_mmk(dimension: usize, items: &[Item], epsilon: f64) -> KnapsackSelection {
    solve_mmk_report(dimension, items, epsilon).selection
}
