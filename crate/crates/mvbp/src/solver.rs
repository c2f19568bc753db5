//! End-to-end packing solver: covering LP, greedy phase over the fractional
//! support, and the First-Fit residual packer.
//!
//! The greedy phase repeatedly buys the support column with the best covered
//! dual mass per unit weight until the bought weight reaches
//! `ln(2D) * opt*` (or everything is covered); the leftover items are packed
//! by the dual-oblivious First-Fit packer. Every run checks the proved cost
//! bound `(ln 2D + 1) opt* + sum_t w_t + w_max` and reports it alongside the
//! packing. A guessing wrapper iterates over the `2^T - 1` nonempty bin-type
//! subsets and keeps the cheapest solution.

use crate::cover::{solve_cover_lp, CoverLpSolution};
use crate::first_fit::{compute_selectors, effective_load_duals, pack_subset};
use crate::model::{packing_cost, Instance, PackedBin, Packing};
use crate::{SolveError, LP_TOL};

/// One greedy pick, recorded for bound audits.
#[derive(Clone, Debug)]
pub struct GreedyStep {
    /// Index into the cover solution's column list.
    pub column: usize,
    /// Column weight bought at this step.
    pub column_weight: f64,
    /// Accumulated weight after the pick.
    pub weight_after: f64,
    /// Dual mass of the still-uncovered items after the pick.
    pub residual_dual_mass: f64,
}

/// Outcome of the greedy phase.
#[derive(Clone, Debug)]
pub struct GreedyState {
    /// Picked column indices in pick order (a column may repeat).
    pub picks: Vec<usize>,
    /// Total weight of picked columns.
    pub weight: f64,
    /// Items left uncovered, ascending.
    pub remaining: Vec<usize>,
    pub trace: Vec<GreedyStep>,
}

/// Buys support columns by covered-profit rate until the accumulated weight
/// reaches `ln(rho) * opt*` or no item remains uncovered. The rate of a
/// column is `sum_{i in S and C} y_i / w_C`, compared exactly by
/// cross-multiplication; ties keep the lowest column index. Columns covering
/// nothing new are never bought.
pub fn greedy_phase(
    inst: &Instance,
    cover: &CoverLpSolution,
    y: &[f64],
    rho: f64,
) -> Result<GreedyState, SolveError> {
    let n = inst.items.len();
    let support = cover.support();
    let threshold = rho.ln() * cover.value;

    let mut covered = vec![false; n];
    let mut uncovered = n;
    let mut weight = 0.0;
    let mut picks = Vec::new();
    let mut trace = Vec::new();

    while weight < threshold && uncovered > 0 {
        let mut best: Option<(usize, f64, f64)> = None; // (column, mass, weight)
        for &c in &support {
            let col = &cover.columns[c];
            let mut mass = 0.0;
            let mut fresh = false;
            for &(i, _) in &col.entries {
                if !covered[i] {
                    fresh = true;
                    mass += y[i];
                }
            }
            if !fresh {
                continue;
            }
            let w = col.cost(inst);
            let better = match best {
                None => true,
                Some((_, bm, bw)) => mass * bw > bm * w,
            };
            if better {
                best = Some((c, mass, w));
            }
        }
        let (c, _, w) = best.ok_or(SolveError::EmptySupport)?;
        for &(i, _) in &cover.columns[c].entries {
            if !covered[i] {
                covered[i] = true;
                uncovered -= 1;
            }
        }
        weight += w;
        picks.push(c);
        let residual_dual_mass: f64 = (0..n).filter(|&i| !covered[i]).map(|i| y[i]).sum();
        trace.push(GreedyStep {
            column: c,
            column_weight: w,
            weight_after: weight,
            residual_dual_mass,
        });
    }

    let remaining: Vec<usize> = (0..n).filter(|&i| !covered[i]).collect();
    Ok(GreedyState {
        picks,
        weight,
        remaining,
        trace,
    })
}

/// A solved instance with its audit fields.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub packing: Packing,
    /// Actual packing cost (empty greedy bins are dropped, so this can be
    /// below `greedy_weight + residual_cost`).
    pub cost: f64,
    /// Covering LP value, the lower bound `opt*`.
    pub lp_value: f64,
    /// Weight bought by the greedy phase.
    pub greedy_weight: f64,
    /// Cost of the residual First-Fit packing.
    pub residual_cost: f64,
    /// Right-hand side of the applicable cost bound.
    pub bound: f64,
    pub bound_ok: bool,
    /// Original bin-type indices available to this run.
    pub chosen_types: Vec<usize>,
    /// Number of restricted solves performed (1 unless wrapped).
    pub subsolves: usize,
    /// True when the wrapper fell back to a single unrestricted solve
    /// because the instance has too many bin types.
    pub wrapped_fallback: bool,
}

fn bound_holds(cost: f64, bound: f64) -> bool {
    cost <= bound + 1e-6 * (1.0 + bound.abs())
}

/// Runs the full pipeline on a weighted instance. The report's packing
/// covers every item, passes the feasibility checker, and satisfies
/// `cost <= (ln 2D + 1) opt* + sum_t w_t + w_max`.
pub fn solve_weighted(inst: &Instance, epsilon: f64) -> Result<SolveReport, SolveError> {
    let dimension = inst.dimension as f64;
    let cover = solve_cover_lp(inst, epsilon)?;
    let selectors = compute_selectors(inst)?;
    let y = effective_load_duals(&selectors, inst.dimension);
    let rho = 2.0 * dimension;
    let greedy = greedy_phase(inst, &cover, &y, rho)?;

    // One bin per picked column; items covered by an earlier pick are shed,
    // and a fully shed column opens no bin.
    let mut covered = vec![false; inst.items.len()];
    let mut bins = Vec::new();
    for &c in &greedy.picks {
        let col = &cover.columns[c];
        let assignments: Vec<(usize, usize)> = col
            .entries
            .iter()
            .filter(|&&(i, _)| !covered[i])
            .cloned()
            .collect();
        for &(i, _) in &assignments {
            covered[i] = true;
        }
        if !assignments.is_empty() {
            bins.push(PackedBin {
                bin_type: col.bin_type,
                assignments,
            });
        }
    }

    let residual_packing = pack_subset(inst, &selectors, &greedy.remaining)?;
    let residual_cost = packing_cost(inst, &residual_packing);
    bins.extend(residual_packing.bins);

    let packing = Packing { bins };
    let cost = packing_cost(inst, &packing);
    let bound = ((2.0 * dimension).ln() + 1.0) * cover.value
        + inst.total_type_weight()
        + inst.max_type_weight();

    Ok(SolveReport {
        bound_ok: bound_holds(cost, bound),
        packing,
        cost,
        lp_value: cover.value,
        greedy_weight: greedy.weight,
        residual_cost,
        bound,
        chosen_types: (0..inst.bin_types.len()).collect(),
        subsolves: 1,
        wrapped_fallback: false,
    })
}

/// [`solve_weighted`] restricted to unit-weight bin types; the bound
/// specializes to `(ln 2D + 1) opt* + T + 1` bins.
pub fn solve_unweighted(inst: &Instance, epsilon: f64) -> Result<SolveReport, SolveError> {
    if !inst.is_unweighted() {
        return Err(SolveError::NotUnweighted);
    }
    let mut report = solve_weighted(inst, epsilon)?;
    report.bound = ((2.0 * inst.dimension as f64).ln() + 1.0) * report.lp_value
        + inst.bin_types.len() as f64
        + 1.0;
    report.bound_ok = bound_holds(report.cost, report.bound);
    Ok(report)
}

/// Bin-type subset limit for the guessing wrapper; beyond it the wrapper
/// falls back to a single unrestricted solve and flags the report.
pub const WRAPPER_MAX_TYPES: usize = 20;

/// Guessing wrapper: solves the instance restricted to every nonempty
/// bin-type subset (skipping subsets some item cannot fit into) and returns
/// the cheapest report, with bin types renumbered back to the input.
pub fn solve_weighted_wrapped(inst: &Instance, epsilon: f64) -> Result<SolveReport, SolveError> {
    let t = inst.bin_types.len();
    if t == 0 || t > WRAPPER_MAX_TYPES {
        let mut report = solve_weighted(inst, epsilon)?;
        report.wrapped_fallback = t > WRAPPER_MAX_TYPES;
        return Ok(report);
    }

    let mut best: Option<SolveReport> = None;
    let mut subsolves = 0usize;
    for mask in 1u32..(1u32 << t) {
        let selected: Vec<usize> = (0..t).filter(|&i| mask & (1 << i) != 0).collect();
        let restricted = Instance::new(
            inst.dimension,
            inst.items.clone(),
            selected
                .iter()
                .map(|&i| inst.bin_types[i].clone())
                .collect(),
        );
        let all_fit = (0..restricted.items.len()).all(|i| restricted.item_fits_somewhere(i));
        if !all_fit {
            continue;
        }
        let mut report = solve_weighted(&restricted, epsilon)?;
        subsolves += 1;
        for bin in report.packing.bins.iter_mut() {
            bin.bin_type = selected[bin.bin_type];
        }
        report.chosen_types = selected;
        if best.as_ref().is_none_or(|b| report.cost < b.cost) {
            best = Some(report);
        }
    }
    match best {
        Some(mut report) => {
            report.subsolves = subsolves;
            Ok(report)
        }
        None => {
            // The full set is one of the masks, so nothing was feasible:
            // some item fits nowhere at all.
            let offender = (0..inst.items.len())
                .find(|&i| !inst.item_fits_somewhere(i))
                .unwrap_or(0);
            Err(SolveError::InfeasibleItem(offender))
        }
    }
}

/// Audit helper: residual dual mass after each greedy pick stays below the
/// product-form decay `prod_q (1 - w_q / opt*) * sum_i y_i` (clamped at 0).
pub fn check_greedy_decay(state: &GreedyState, y: &[f64], opt_star: f64) -> bool {
    if opt_star <= 0.0 {
        return state.trace.is_empty();
    }
    let total: f64 = y.iter().sum();
    let mut product = 1.0f64;
    for step in &state.trace {
        product *= 1.0 - step.column_weight / opt_star;
        let cap = product.max(0.0) * total;
        if step.residual_dual_mass > cap + LP_TOL * (1.0 + total) {
            return false;
        }
    }
    true
}
