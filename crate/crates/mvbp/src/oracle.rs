//! Exact brute-force references for desk-scale verification.
//!
//! These solvers enumerate exhaustively (with safe pruning that cannot cut
//! off an optimum) and refuse instances whose search space exceeds a
//! configured budget. A budget failure is an error, never a silent
//! approximation.

use std::time::Instant;

use crate::model::{Instance, Item, KnapsackSelection, PackedBin, Packing};
use crate::simplex::{self, LpProblem, RowOp, Sense};
use crate::FEAS_TOL;

/// Search-space limits for the exact solvers.
#[derive(Clone, Debug)]
pub struct OracleBudget {
    /// Maximum product of per-item choice counts for the knapsack search.
    pub max_mmk_choices: u128,
    /// Maximum search nodes for the bin-packing search.
    pub max_mvbp_nodes: u64,
    /// Maximum enumerated columns for the full covering LP.
    pub max_lp_columns: usize,
    /// Optional wall-clock limit shared by the searches.
    pub time_limit: Option<std::time::Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_mmk_choices: 10_000_000,
            max_mvbp_nodes: 10_000_000,
            max_lp_columns: 1_000_000,
            time_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    BudgetExceeded,
    /// Some item cannot be packed at all.
    Infeasible,
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::BudgetExceeded => write!(f, "search space exceeds the oracle budget"),
            OracleError::Infeasible => write!(f, "instance admits no complete packing"),
        }
    }
}

impl std::error::Error for OracleError {}

struct Deadline {
    start: Instant,
    limit: Option<std::time::Duration>,
    ticks: u64,
}

impl Deadline {
    fn new(limit: Option<std::time::Duration>) -> Self {
        Deadline {
            start: Instant::now(),
            limit,
            ticks: 0,
        }
    }

    fn check(&mut self) -> Result<(), OracleError> {
        if let Some(limit) = self.limit {
            self.ticks += 1;
            if self.ticks.is_multiple_of(4096) && self.start.elapsed() > limit {
                return Err(OracleError::BudgetExceeded);
            }
        }
        Ok(())
    }
}

/// Exact weighted knapsack optimum over `(m + 1)^n` incarnation choices
/// against unit capacity per dimension. Infeasible branches are cut early;
/// the empty selection is always available.
pub fn exact_mmk_items(
    dimension: usize,
    items: &[Item],
    budget: &OracleBudget,
) -> Result<KnapsackSelection, OracleError> {
    let mut space: u128 = 1;
    for item in items {
        space = space.saturating_mul(item.incarnations.len() as u128 + 1);
        if space > budget.max_mmk_choices {
            return Err(OracleError::BudgetExceeded);
        }
    }

    // Largest achievable weight from the suffix starting at each item.
    let mut suffix_best = vec![0.0; items.len() + 1];
    for i in (0..items.len()).rev() {
        let best_inc = items[i]
            .incarnations
            .iter()
            .map(|inc| inc.weight)
            .fold(0.0, f64::max);
        suffix_best[i] = suffix_best[i + 1] + best_inc;
    }

    struct Search<'a> {
        items: &'a [Item],
        suffix_best: Vec<f64>,
        load: Vec<f64>,
        chosen: Vec<(usize, usize)>,
        best: KnapsackSelection,
        deadline: Deadline,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize, value: f64) -> Result<(), OracleError> {
            self.deadline.check()?;
            if i == self.items.len() {
                if value > self.best.value {
                    self.best = KnapsackSelection {
                        chosen: self.chosen.clone(),
                        value,
                    };
                }
                return Ok(());
            }
            if value + self.suffix_best[i] <= self.best.value {
                return Ok(());
            }
            for j in 0..self.items[i].incarnations.len() {
                let sizes = &self.items[i].incarnations[j].sizes;
                if sizes
                    .iter()
                    .zip(&self.load)
                    .all(|(a, l)| l + a <= 1.0 + FEAS_TOL)
                {
                    for (d, &a) in sizes.iter().enumerate() {
                        self.load[d] += a;
                    }
                    self.chosen.push((i, j));
                    self.run(i + 1, value + self.items[i].incarnations[j].weight)?;
                    self.chosen.pop();
                    for (d, &a) in sizes.iter().enumerate() {
                        self.load[d] -= a;
                    }
                }
            }
            self.run(i + 1, value)
        }
    }

    let mut search = Search {
        items,
        suffix_best,
        load: vec![0.0; dimension],
        chosen: Vec::new(),
        best: KnapsackSelection::empty(),
        deadline: Deadline::new(budget.time_limit),
    };
    search.run(0, 0.0)?;
    Ok(search.best)
}

/// Knapsack oracle over an instance; bin types are ignored, the capacity is
/// 1 per dimension.
pub fn exact_mmk(inst: &Instance, budget: &OracleBudget) -> Result<KnapsackSelection, OracleError> {
    exact_mmk_items(inst.dimension, &inst.items, budget)
}

struct OpenBin {
    bin_type: usize,
    assignments: Vec<(usize, usize)>,
    residual: Vec<f64>,
}

struct MvbpSearch<'a> {
    inst: &'a Instance,
    bins: Vec<OpenBin>,
    cost: f64,
    best_cost: f64,
    best: Option<Packing>,
    nodes: u64,
    max_nodes: u64,
    deadline: Deadline,
}

impl MvbpSearch<'_> {
    fn snapshot(&self) -> Packing {
        Packing {
            bins: self
                .bins
                .iter()
                .map(|b| PackedBin {
                    bin_type: b.bin_type,
                    assignments: b.assignments.clone(),
                })
                .collect(),
        }
    }

    fn place(&mut self, bin: usize, item: usize, inc: usize) -> bool {
        let sizes = &self.inst.items[item].incarnations[inc].sizes;
        if !sizes
            .iter()
            .zip(&self.bins[bin].residual)
            .all(|(a, r)| *a <= r + FEAS_TOL)
        {
            return false;
        }
        for (d, &a) in sizes.iter().enumerate() {
            self.bins[bin].residual[d] -= a;
        }
        self.bins[bin].assignments.push((item, inc));
        true
    }

    fn unplace(&mut self, bin: usize, item: usize, inc: usize) {
        let sizes = &self.inst.items[item].incarnations[inc].sizes;
        for (d, &a) in sizes.iter().enumerate() {
            self.bins[bin].residual[d] += a;
        }
        self.bins[bin].assignments.pop();
    }

    fn run(&mut self, item: usize) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(OracleError::BudgetExceeded);
        }
        self.deadline.check()?;
        if self.cost >= self.best_cost {
            return Ok(());
        }
        if item == self.inst.items.len() {
            // cost < best_cost held above.
            self.best_cost = self.cost;
            self.best = Some(self.snapshot());
            return Ok(());
        }

        let m = self.inst.items[item].incarnations.len();

        // Existing bins, skipping those whose (type, residual) duplicates an
        // earlier bin: placements there are symmetric.
        for b in 0..self.bins.len() {
            let duplicate = (0..b).any(|b2| {
                self.bins[b2].bin_type == self.bins[b].bin_type
                    && self.bins[b2].residual == self.bins[b].residual
            });
            if duplicate {
                continue;
            }
            for j in 0..m {
                if self.place(b, item, j) {
                    self.run(item + 1)?;
                    self.unplace(b, item, j);
                }
            }
        }

        // New bin of each type. Bins are opened in item order, so bins of
        // equal type are canonically ordered by their first item.
        for t in 0..self.inst.bin_types.len() {
            let weight = self.inst.bin_types[t].weight;
            if self.cost + weight >= self.best_cost {
                continue;
            }
            let mut any = false;
            for j in 0..m {
                if self.inst.incarnation_fits(item, j, t) {
                    if !any {
                        self.bins.push(OpenBin {
                            bin_type: t,
                            assignments: Vec::new(),
                            residual: self.inst.bin_types[t].capacities.clone(),
                        });
                        self.cost += weight;
                        any = true;
                    }
                    let b = self.bins.len() - 1;
                    let placed = self.place(b, item, j);
                    debug_assert!(placed);
                    self.run(item + 1)?;
                    self.unplace(b, item, j);
                }
            }
            if any {
                self.bins.pop();
                self.cost -= weight;
            }
        }
        Ok(())
    }
}

/// Exact minimum-cost packing by exhaustive search over item placements with
/// symmetry pruning and cost-based branch-and-bound.
pub fn exact_mvbp(inst: &Instance, budget: &OracleBudget) -> Result<(Packing, f64), OracleError> {
    // Cheap feasibility screen plus an initial incumbent: every item alone in
    // its cheapest fitting bin type.
    let mut incumbent_bins = Vec::new();
    let mut incumbent_cost = 0.0;
    for i in 0..inst.items.len() {
        let mut best: Option<(f64, usize, usize)> = None;
        for j in 0..inst.items[i].incarnations.len() {
            for t in 0..inst.bin_types.len() {
                if inst.incarnation_fits(i, j, t) {
                    let w = inst.bin_types[t].weight;
                    if best.is_none_or(|(bw, _, _)| w < bw) {
                        best = Some((w, t, j));
                    }
                }
            }
        }
        let (w, t, j) = best.ok_or(OracleError::Infeasible)?;
        incumbent_cost += w;
        incumbent_bins.push(PackedBin {
            bin_type: t,
            assignments: vec![(i, j)],
        });
    }

    let mut search = MvbpSearch {
        inst,
        bins: Vec::new(),
        cost: 0.0,
        // Strictly above the incumbent so the search may rediscover it.
        best_cost: incumbent_cost + 1e-12 * (1.0 + incumbent_cost) + FEAS_TOL,
        best: Some(Packing {
            bins: incumbent_bins,
        }),
        nodes: 0,
        max_nodes: budget.max_mvbp_nodes,
        deadline: Deadline::new(budget.time_limit),
    };
    search.run(0)?;
    let packing = search.best.expect("incumbent always present");
    let cost = crate::model::packing_cost(inst, &packing);
    Ok((packing, cost))
}

/// Enumerates every column (bin type, compatible item set, incarnation
/// assignment) of the covering program. Nonempty columns only.
pub fn enumerate_all_columns(
    inst: &Instance,
    budget: &OracleBudget,
) -> Result<Vec<crate::cover::Column>, OracleError> {
    let mut columns = Vec::new();
    for t in 0..inst.bin_types.len() {
        let mut residual = inst.bin_types[t].capacities.clone();
        let mut entries: Vec<(usize, usize)> = Vec::new();
        extend_columns(
            inst,
            t,
            0,
            &mut residual,
            &mut entries,
            &mut columns,
            budget,
        )?;
    }
    Ok(columns)
}

fn extend_columns(
    inst: &Instance,
    t: usize,
    item: usize,
    residual: &mut Vec<f64>,
    entries: &mut Vec<(usize, usize)>,
    columns: &mut Vec<crate::cover::Column>,
    budget: &OracleBudget,
) -> Result<(), OracleError> {
    if item == inst.items.len() {
        if !entries.is_empty() {
            if columns.len() >= budget.max_lp_columns {
                return Err(OracleError::BudgetExceeded);
            }
            columns.push(crate::cover::Column {
                bin_type: t,
                entries: entries.clone(),
            });
        }
        return Ok(());
    }
    // Leave the item out.
    extend_columns(inst, t, item + 1, residual, entries, columns, budget)?;
    // Or put one of its incarnations in, capacity permitting.
    for j in 0..inst.items[item].incarnations.len() {
        let fits = inst.items[item].incarnations[j]
            .sizes
            .iter()
            .zip(residual.iter())
            .all(|(a, r)| *a <= r + FEAS_TOL);
        if fits {
            for (d, &a) in inst.items[item].incarnations[j].sizes.iter().enumerate() {
                residual[d] -= a;
            }
            entries.push((item, j));
            extend_columns(inst, t, item + 1, residual, entries, columns, budget)?;
            entries.pop();
            for (d, &a) in inst.items[item].incarnations[j].sizes.iter().enumerate() {
                residual[d] += a;
            }
        }
    }
    Ok(())
}

/// Value of the covering LP relaxation over the full column universe,
/// solved in one LP. Reference for the column-generation solver.
pub fn exact_cover_lp(inst: &Instance, budget: &OracleBudget) -> Result<f64, OracleError> {
    let n = inst.items.len();
    if n == 0 {
        return Ok(0.0);
    }
    let columns = enumerate_all_columns(inst, budget)?;
    let objective: Vec<f64> = columns
        .iter()
        .map(|c| inst.bin_types[c.bin_type].weight)
        .collect();
    let mut problem = LpProblem::new(Sense::Minimize, objective);
    for i in 0..n {
        let coeffs: Vec<f64> = columns
            .iter()
            .map(|c| {
                if c.entries.iter().any(|&(ci, _)| ci == i) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        problem.add_row(coeffs, RowOp::Ge, 1.0);
    }
    match simplex::solve(&problem) {
        Ok(solution) => Ok(solution.objective),
        Err(simplex::LpError::Infeasible) => Err(OracleError::Infeasible),
        Err(e) => panic!("full-universe covering LP failed: {e}"),
    }
}
