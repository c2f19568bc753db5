//! Covering LP relaxation of the packing problem, solved by column
//! generation.
//!
//! A column is one feasible bin load: a bin type together with a compatible
//! set of items and their incarnation assignment, at the bin type's weight.
//! The restricted master minimizes total column cost subject to covering
//! every item; pricing asks, per bin type, for an item set whose dual profit
//! exceeds the type's weight, which is exactly a weighted knapsack instance
//! over sizes rescaled by the type's capacities. Generation stops when the
//! (approximate) pricing oracle finds no violated column, so the master value
//! is within a factor `1 + epsilon` of the true relaxation optimum.

use std::collections::HashSet;

use crate::first_fit::compute_selectors;
use crate::mmk::solve_mmk;
use crate::model::{Incarnation, Instance, Item};
use crate::simplex::{self, LpProblem, RowOp, Sense};
use crate::{SolveError, FEAS_TOL, LP_TOL};

/// One variable of the covering program: a bin type plus an incarnation
/// assignment for a compatible item set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    pub bin_type: usize,
    /// `(item, incarnation)` pairs, ascending by item; each item at most
    /// once.
    pub entries: Vec<(usize, usize)>,
}

impl Column {
    pub fn cost(&self, inst: &Instance) -> f64 {
        inst.bin_types[self.bin_type].weight
    }

    pub fn covers(&self, item: usize) -> bool {
        self.entries.iter().any(|&(i, _)| i == item)
    }

    /// Checks the compatibility invariant against raw instance data.
    pub fn is_compatible(&self, inst: &Instance) -> bool {
        let caps = &inst.bin_types[self.bin_type].capacities;
        (0..inst.dimension).all(|d| {
            let load: f64 = self
                .entries
                .iter()
                .map(|&(i, j)| inst.items[i].incarnations[j].sizes[d])
                .sum();
            load <= caps[d] + FEAS_TOL
        })
    }
}

/// Solution of the covering LP over the generated columns.
#[derive(Clone, Debug)]
pub struct CoverLpSolution {
    pub columns: Vec<Column>,
    /// Fractional value per column, aligned with `columns`.
    pub x: Vec<f64>,
    /// Master objective; at most `1 + epsilon` times the true relaxation
    /// optimum and never below it (up to LP tolerance).
    pub value: f64,
    /// Per-item row prices from the final master solve.
    pub duals: Vec<f64>,
    /// Approximation parameter used by the pricing oracle.
    pub epsilon: f64,
    /// Master objective after each solve; nonincreasing, ending at `value`.
    pub master_trace: Vec<f64>,
}

impl CoverLpSolution {
    /// Indices of columns with positive fractional value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&c| self.x[c] > LP_TOL)
            .collect()
    }
}

/// One singleton column per item using its selector pair, so the master is
/// primal-feasible from the first iteration.
pub fn initial_columns(inst: &Instance) -> Result<Vec<Column>, SolveError> {
    let selectors = compute_selectors(inst)?;
    Ok(selectors
        .iter()
        .enumerate()
        .map(|(i, s)| Column {
            bin_type: s.bin_type,
            entries: vec![(i, s.incarnation)],
        })
        .collect())
}

/// Searches for a column whose dual profit exceeds its cost: for each bin
/// type the incarnation sizes are rescaled by the capacities and a knapsack
/// is solved with per-item profit `y_i`. Returns the most violated column,
/// or `None` when every type's optimum stays within `w_t * (1 + LP_TOL)`.
pub fn separate(inst: &Instance, y: &[f64], epsilon: f64) -> Option<Column> {
    let mut best: Option<(f64, Column)> = None;
    for t in 0..inst.bin_types.len() {
        let caps = &inst.bin_types[t].capacities;
        let weight = inst.bin_types[t].weight;

        // Knapsack view: items with positive profit and at least one
        // incarnation that fits this type.
        let mut index_map: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut kitems: Vec<Item> = Vec::new();
        for (i, item) in inst.items.iter().enumerate() {
            if y[i] <= 0.0 {
                continue;
            }
            let mut alts = Vec::new();
            let mut incs = Vec::new();
            for (j, inc) in item.incarnations.iter().enumerate() {
                if inst.incarnation_fits(i, j, t) {
                    alts.push(j);
                    incs.push(Incarnation::weighted(
                        inc.sizes.iter().zip(caps).map(|(a, b)| a / b).collect(),
                        y[i],
                    ));
                }
            }
            if !incs.is_empty() {
                index_map.push((i, alts));
                kitems.push(Item::new(incs));
            }
        }
        if kitems.is_empty() {
            continue;
        }

        let sel = solve_mmk(inst.dimension, &kitems, epsilon);
        let mut entries: Vec<(usize, usize)> = sel
            .chosen
            .iter()
            .map(|&(ki, kj)| {
                let (orig, ref alts) = index_map[ki];
                (orig, alts[kj])
            })
            .collect();
        entries.sort_unstable();

        // Integrality tolerance in the knapsack rounding can overfill a
        // dimension by a hair; shed the cheapest entries until compatible.
        let mut column = Column {
            bin_type: t,
            entries,
        };
        while !column.is_compatible(inst) {
            let drop = column
                .entries
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| y[a.0].total_cmp(&y[b.0]))
                .map(|(pos, _)| pos)
                .expect("incompatible column cannot be empty");
            column.entries.remove(drop);
        }

        let profit: f64 = column.entries.iter().map(|&(i, _)| y[i]).sum();
        if profit > weight * (1.0 + LP_TOL) {
            let violation = profit - weight;
            if best.as_ref().is_none_or(|(v, _)| violation > *v) {
                best = Some((violation, column));
            }
        }
    }
    best.map(|(_, c)| c)
}

fn solve_master(inst: &Instance, columns: &[Column]) -> Result<simplex::LpSolution, SolveError> {
    let objective: Vec<f64> = columns.iter().map(|c| c.cost(inst)).collect();
    let mut problem = LpProblem::new(Sense::Minimize, objective);
    for i in 0..inst.items.len() {
        let coeffs: Vec<f64> = columns
            .iter()
            .map(|c| if c.covers(i) { 1.0 } else { 0.0 })
            .collect();
        problem.add_row(coeffs, RowOp::Ge, 1.0);
    }
    Ok(simplex::solve(&problem)?)
}

/// Solves the covering relaxation by alternating restricted-master solves
/// with the pricing oracle until no violated column remains.
pub fn solve_cover_lp(inst: &Instance, epsilon: f64) -> Result<CoverLpSolution, SolveError> {
    let n = inst.items.len();
    if n == 0 {
        return Ok(CoverLpSolution {
            columns: Vec::new(),
            x: Vec::new(),
            value: 0.0,
            duals: Vec::new(),
            epsilon,
            master_trace: Vec::new(),
        });
    }

    let mut columns = initial_columns(inst)?;
    let mut seen: HashSet<(usize, Vec<(usize, usize)>)> = columns
        .iter()
        .map(|c| (c.bin_type, c.entries.clone()))
        .collect();

    let limit = 50 * n * inst.bin_types.len();
    let mut added = 0usize;
    let mut master_trace = Vec::new();
    loop {
        let master = solve_master(inst, &columns)?;
        master_trace.push(master.objective);
        let duals: Vec<f64> = master.duals.iter().map(|&y| y.max(0.0)).collect();

        let candidate = separate(inst, &duals, epsilon);
        let fresh = match candidate {
            Some(col) if seen.insert((col.bin_type, col.entries.clone())) => Some(col),
            // A repeated column means the violation is numerical noise at
            // threshold scale; the certificate still holds.
            _ => None,
        };
        match fresh {
            Some(col) => {
                columns.push(col);
                added += 1;
                if added > limit {
                    return Err(SolveError::IterationLimit);
                }
            }
            None => {
                return Ok(CoverLpSolution {
                    columns,
                    x: master.values,
                    value: master.objective,
                    duals,
                    epsilon,
                    master_trace,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::BinType;

    #[test]
    fn initial_columns_are_selector_singletons() {
        let inst = fixtures::e1();
        let cols = initial_columns(&inst).unwrap();
        assert_eq!(cols.len(), 3);
        assert_eq!(
            cols[0],
            Column {
                bin_type: 0,
                entries: vec![(0, 1)]
            }
        );
        for col in &cols {
            assert!(col.is_compatible(&inst));
        }

        let empty = Instance::new(1, vec![], vec![BinType::new(vec![1.0])]);
        assert!(initial_columns(&empty).unwrap().is_empty());
    }

    #[test]
    fn separation_finds_the_violated_pair() {
        // Two items of size 0.5 against a unit type: duals 0.7 + 0.7 > 1.
        let inst = Instance::new(
            1,
            vec![
                Item::new(vec![Incarnation::new(vec![0.5])]),
                Item::new(vec![Incarnation::new(vec![0.5])]),
            ],
            vec![BinType::new(vec![1.0])],
        );
        // Exhaustive reference over the four subsets: {0,1} is the best
        // violated set with profit 1.4.
        let y = [0.7, 0.7];
        let mut best_profit = 0.0f64;
        for mask in 0..4u32 {
            let mut load = 0.0;
            let mut profit = 0.0;
            for (i, &yi) in y.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    load += 0.5;
                    profit += yi;
                }
            }
            if load <= 1.0 {
                best_profit = best_profit.max(profit);
            }
        }
        assert!((best_profit - 1.4).abs() < 1e-12);

        let col = separate(&inst, &y, 0.1).expect("violated column exists");
        assert_eq!(col.entries, vec![(0, 0), (1, 0)]);
        assert!(col.is_compatible(&inst));

        // Zero duals: no positive-profit set can beat a positive weight.
        assert!(separate(&inst, &[0.0, 0.0], 0.1).is_none());
    }

    #[test]
    fn separation_none_when_singletons_price_out() {
        // Sizes above 0.5 pairwise exclude each other; duals equal to the
        // type weight leave nothing violated.
        let inst = Instance::new(
            1,
            vec![
                Item::new(vec![Incarnation::new(vec![0.6])]),
                Item::new(vec![Incarnation::new(vec![0.7])]),
            ],
            vec![BinType::new(vec![1.0])],
        );
        assert!(separate(&inst, &[1.0, 1.0], 0.1).is_none());
    }

    #[test]
    fn single_item_cover_lp_is_the_cheapest_fit() {
        let inst = Instance::new(
            1,
            vec![Item::new(vec![Incarnation::new(vec![0.4])])],
            vec![
                BinType::weighted(vec![1.0], 3.0),
                BinType::weighted(vec![1.0], 2.0),
            ],
        );
        let sol = solve_cover_lp(&inst, 0.1).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn four_halves_cover_lp() {
        let inst = fixtures::four_halves();
        let sol = solve_cover_lp(&inst, 0.1).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-6, "value {}", sol.value);
        // Covering constraints hold over the fractional solution.
        for i in 0..4 {
            let covered: f64 = sol
                .columns
                .iter()
                .zip(&sol.x)
                .filter(|(c, _)| c.covers(i))
                .map(|(_, &x)| x)
                .sum();
            assert!(covered >= 1.0 - LP_TOL);
        }
        for col in &sol.columns {
            assert!(col.is_compatible(&inst));
        }
    }

    #[test]
    fn two_family_cover_lp_uses_both_types() {
        let inst = fixtures::two_family();
        let sol = solve_cover_lp(&inst, 0.1).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-6, "value {}", sol.value);
        let support = sol.support();
        let types: HashSet<usize> = support.iter().map(|&c| sol.columns[c].bin_type).collect();
        assert_eq!(types.len(), 2, "support spans both bin types: {support:?}");
    }

    #[test]
    fn master_objective_never_increases() {
        for inst in [
            fixtures::four_halves(),
            fixtures::two_family(),
            fixtures::e1(),
        ] {
            let sol = solve_cover_lp(&inst, 0.1).unwrap();
            assert!(!sol.master_trace.is_empty());
            for pair in sol.master_trace.windows(2) {
                assert!(
                    pair[1] <= pair[0] + LP_TOL * (1.0 + pair[0].abs()),
                    "master rose from {} to {}",
                    pair[0],
                    pair[1]
                );
            }
            assert_eq!(*sol.master_trace.last().unwrap(), sol.value);
        }
    }

    #[test]
    fn empty_instance_cover_lp() {
        let inst = Instance::new(1, vec![], vec![BinType::new(vec![1.0])]);
        let sol = solve_cover_lp(&inst, 0.1).unwrap();
        assert_eq!(sol.value, 0.0);
        assert!(sol.columns.is_empty());
    }

    #[test]
    fn duals_are_approximately_feasible() {
        let inst = fixtures::e1();
        let sol = solve_cover_lp(&inst, 0.1).unwrap();
        // Over generated columns the duals never exceed the column cost
        // beyond tolerance (exact feasibility over present columns).
        for col in &sol.columns {
            let profit: f64 = col.entries.iter().map(|&(i, _)| sol.duals[i]).sum();
            assert!(
                profit <= col.cost(&inst) + 1e-6,
                "column {col:?} priced at {profit} above cost {}",
                col.cost(&inst)
            );
        }
    }
}
