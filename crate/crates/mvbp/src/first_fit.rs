//! First-Fit packing and the load-based item selectors built on it.
//!
//! For every item the selector picks the (incarnation, bin type) pair that
//! minimizes `w_t * max_d a_ijd / b_td` among pairs that fit, together with
//! the dimension attaining that maximum. Packing each bin-type class with
//! scalar First-Fit on those maximal load fractions yields a packing that is
//! feasible in the full vector sense, and the per-item values
//! `effective_load / D` form a feasible dual vector for the covering
//! relaxation: the cost of packing any item subset `S` this way is at most
//! `2D * sum_{i in S} y_i + sum_t w_t`.

use crate::model::{Instance, PackedBin, Packing};
use crate::{SolveError, FEAS_TOL};

/// View of the load fractions `a_ijd / b_td`. Entries are finite because
/// capacities are validated to be positive.
#[derive(Clone, Copy, Debug)]
pub struct LoadTable<'a> {
    inst: &'a Instance,
}

impl<'a> LoadTable<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        LoadTable { inst }
    }

    /// Fraction of dimension `d` of bin type `t` consumed by incarnation `j`
    /// of item `i`.
    pub fn load(&self, item: usize, inc: usize, bin_type: usize, d: usize) -> f64 {
        self.inst.items[item].incarnations[inc].sizes[d]
            / self.inst.bin_types[bin_type].capacities[d]
    }

    /// Largest load over dimensions, with the first attaining dimension.
    pub fn max_load(&self, item: usize, inc: usize, bin_type: usize) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut best_d = 0;
        for d in 0..self.inst.dimension {
            let l = self.load(item, inc, bin_type, d);
            if l > best {
                best = l;
                best_d = d;
            }
        }
        (best, best_d)
    }
}

/// The chosen incarnation, bin type, and critical dimension of one item.
#[derive(Clone, Debug, PartialEq)]
pub struct ItemSelector {
    /// `w_t * max_d load(i, j, t, d)` minimized over fitting pairs `(j, t)`.
    pub effective_load: f64,
    pub incarnation: usize,
    pub bin_type: usize,
    pub dimension: usize,
}

/// Computes the selector table. Ties are broken towards the lowest
/// incarnation index, then the lowest bin-type index, then the lowest
/// dimension. Pairs whose maximal load exceeds 1 cannot be packed and are
/// excluded; an item with no fitting pair is reported as infeasible.
pub fn compute_selectors(inst: &Instance) -> Result<Vec<ItemSelector>, SolveError> {
    let loads = LoadTable::new(inst);
    let mut out = Vec::with_capacity(inst.items.len());
    for i in 0..inst.items.len() {
        let mut best: Option<ItemSelector> = None;
        for j in 0..inst.items[i].incarnations.len() {
            for t in 0..inst.bin_types.len() {
                let (max_load, d) = loads.max_load(i, j, t);
                if max_load > 1.0 + FEAS_TOL {
                    continue;
                }
                let value = inst.bin_types[t].weight * max_load;
                if best.as_ref().is_none_or(|b| value < b.effective_load) {
                    best = Some(ItemSelector {
                        effective_load: value,
                        incarnation: j,
                        bin_type: t,
                        dimension: d,
                    });
                }
            }
        }
        out.push(best.ok_or(SolveError::InfeasibleItem(i))?);
    }
    Ok(out)
}

/// Scalar First-Fit against unit capacity: scan items in the given order and
/// place each into the lowest-indexed bin with room, opening a new rightmost
/// bin when none fits. Returns the bins as lists of input indices. In every
/// output (and every prefix of the scan) at most one bin is half-full or
/// less.
pub fn first_fit(sizes: &[f64]) -> Result<Vec<Vec<usize>>, SolveError> {
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut loads: Vec<f64> = Vec::new();
    for (i, &size) in sizes.iter().enumerate() {
        if size > 1.0 + FEAS_TOL {
            return Err(SolveError::ItemTooLarge(i));
        }
        match loads.iter().position(|&l| l + size <= 1.0 + FEAS_TOL) {
            Some(b) => {
                bins[b].push(i);
                loads[b] += size;
            }
            None => {
                bins.push(vec![i]);
                loads.push(size);
            }
        }
    }
    Ok(bins)
}

/// Packs a subset of items using their selectors: the subset is split into
/// one class per chosen bin type and each class is First-Fit packed on the
/// scalar sizes `load(i, j(i), t(i), d(i))`. Items are scanned in the order
/// given. The result is feasible in the vector sense because the critical
/// dimension carries the incarnation's largest load.
pub fn pack_subset(
    inst: &Instance,
    selectors: &[ItemSelector],
    items: &[usize],
) -> Result<Packing, SolveError> {
    let loads = LoadTable::new(inst);
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); inst.bin_types.len()];
    for &i in items {
        classes[selectors[i].bin_type].push(i);
    }
    let mut bins = Vec::new();
    for (t, class) in classes.iter().enumerate() {
        if class.is_empty() {
            continue;
        }
        let sizes: Vec<f64> = class
            .iter()
            .map(|&i| {
                let s = &selectors[i];
                loads.load(i, s.incarnation, t, s.dimension)
            })
            .collect();
        for bin in first_fit(&sizes)? {
            bins.push(PackedBin {
                bin_type: t,
                assignments: bin
                    .iter()
                    .map(|&k| (class[k], selectors[class[k]].incarnation))
                    .collect(),
            });
        }
    }
    Ok(Packing { bins })
}

/// Packs the whole instance with [`pack_subset`] over all items in ascending
/// index order.
pub fn appr_pack(inst: &Instance) -> Result<Packing, SolveError> {
    let selectors = compute_selectors(inst)?;
    let items: Vec<usize> = (0..inst.items.len()).collect();
    pack_subset(inst, &selectors, &items)
}

/// The dual vector `y_i = effective_load_i / D` certified by the packer:
/// for every compatible set `C` of bin type `t`, `sum_{i in C} y_i <= w_t`.
pub fn effective_load_duals(selectors: &[ItemSelector], dimension: usize) -> Vec<f64> {
    debug_assert!(dimension > 0);
    selectors
        .iter()
        .map(|s| s.effective_load / dimension as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{check_packing, packing_cost, BinType, Incarnation, Instance, Item};

    /// At most one nonempty bin at or below half load, checked for the run
    /// and for every prefix of the scan (First-Fit is online, so the state
    /// after k items equals the run on the first k items).
    fn assert_half_full_invariant(sizes: &[f64]) {
        for k in 0..=sizes.len() {
            let bins = first_fit(&sizes[..k]).unwrap();
            let light = bins
                .iter()
                .filter(|bin| bin.iter().map(|&i| sizes[i]).sum::<f64>() <= 0.5)
                .count();
            assert!(light <= 1, "prefix {k}: {light} bins at or below half load");
        }
    }

    #[test]
    fn first_fit_hand_simulation() {
        let bins = first_fit(&[0.6, 0.6, 0.4, 0.4]).unwrap();
        assert_eq!(bins, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn first_fit_exact_fit_and_empty() {
        assert_eq!(first_fit(&[0.5, 0.5]).unwrap(), vec![vec![0, 1]]);
        assert!(first_fit(&[]).unwrap().is_empty());
    }

    #[test]
    fn first_fit_rejects_oversized() {
        assert_eq!(first_fit(&[0.2, 1.5]), Err(SolveError::ItemTooLarge(1)));
    }

    #[test]
    fn half_full_invariant_on_fixed_lists() {
        assert_half_full_invariant(&[0.6, 0.6, 0.4, 0.4]);
        assert_half_full_invariant(&[0.3, 0.3, 0.3, 0.3, 0.9, 0.1]);
        assert_half_full_invariant(&[0.5, 0.5, 0.5]);
    }

    #[test]
    fn e1_selector_matches_exhaustive_evaluation() {
        let inst = fixtures::e1();
        let selectors = compute_selectors(&inst).unwrap();

        // Independent evaluation of all (incarnation, type) pairs of item 0.
        let loads = LoadTable::new(&inst);
        let mut candidates = Vec::new();
        for j in 0..2 {
            for t in 0..2 {
                let (ml, _) = loads.max_load(0, j, t);
                candidates.push((inst.bin_types[t].weight * ml, j, t));
            }
        }
        let best = candidates
            .iter()
            .cloned()
            .fold(f64::INFINITY, |acc, (v, _, _)| acc.min(v));
        assert!((best - 0.4).abs() < 1e-12);

        let s = &selectors[0];
        assert!((s.effective_load - 0.4).abs() < 1e-12);
        assert_eq!((s.incarnation, s.bin_type, s.dimension), (1, 0, 1));
    }

    #[test]
    fn single_candidate_selector() {
        let inst = Instance::new(
            1,
            vec![Item::new(vec![Incarnation::new(vec![0.7])])],
            vec![BinType::new(vec![1.0])],
        );
        let s = &compute_selectors(&inst).unwrap()[0];
        assert!((s.effective_load - 0.7).abs() < 1e-12);
        assert_eq!((s.incarnation, s.bin_type, s.dimension), (0, 0, 0));
    }

    #[test]
    fn zero_size_item_has_zero_effective_load() {
        let inst = Instance::new(
            2,
            vec![Item::new(vec![Incarnation::new(vec![0.0, 0.0])])],
            vec![BinType::new(vec![1.0, 1.0])],
        );
        assert_eq!(compute_selectors(&inst).unwrap()[0].effective_load, 0.0);
    }

    #[test]
    fn unpackable_item_is_infeasible() {
        let inst = Instance::new(
            1,
            vec![Item::new(vec![Incarnation::new(vec![2.0])])],
            vec![BinType::new(vec![1.0])],
        );
        assert_eq!(compute_selectors(&inst), Err(SolveError::InfeasibleItem(0)));
    }

    #[test]
    fn selector_skips_non_fitting_cheap_pair() {
        // Type 0 looks cheaper per load but the item does not fit in it.
        let inst = Instance::new(
            1,
            vec![Item::new(vec![Incarnation::new(vec![2.0])])],
            vec![
                BinType::weighted(vec![1.0], 0.1),
                BinType::weighted(vec![4.0], 10.0),
            ],
        );
        let s = &compute_selectors(&inst).unwrap()[0];
        assert_eq!(s.bin_type, 1);
    }

    #[test]
    fn e1_duals_and_packing_bound() {
        let inst = fixtures::e1();
        let selectors = compute_selectors(&inst).unwrap();
        let y = effective_load_duals(&selectors, inst.dimension);
        assert!((y[0] - 0.2).abs() < 1e-12);

        let packing = appr_pack(&inst).unwrap();
        let check = check_packing(&inst, &packing);
        assert!(check.is_feasible(), "{:?}", check.violations);
        let cost = packing_cost(&inst, &packing);
        let bound = 2.0 * inst.dimension as f64 * y.iter().sum::<f64>() + inst.total_type_weight();
        assert!(cost <= bound + 1e-9, "{cost} > {bound}");
    }

    #[test]
    fn single_item_opens_one_bin_of_its_type() {
        let inst = Instance::new(
            1,
            vec![Item::new(vec![Incarnation::new(vec![0.3])])],
            vec![
                BinType::weighted(vec![1.0], 2.0),
                BinType::weighted(vec![1.0], 1.0),
            ],
        );
        let selectors = compute_selectors(&inst).unwrap();
        assert_eq!(selectors[0].bin_type, 1);
        let packing = appr_pack(&inst).unwrap();
        assert_eq!(packing.bins.len(), 1);
        assert_eq!(packing.bins[0].bin_type, 1);
    }

    #[test]
    fn tiny_items_share_one_bin() {
        let n = 8;
        let inst = Instance::new(
            1,
            (0..n)
                .map(|_| Item::new(vec![Incarnation::new(vec![1.0 / (2.0 * n as f64)])]))
                .collect(),
            vec![BinType::new(vec![1.0])],
        );
        let packing = appr_pack(&inst).unwrap();
        assert_eq!(packing.bins.len(), 1);
    }

    #[test]
    fn observation_one_shape_in_one_dimension() {
        // D = 1, single unit bin type: y_i is the item size and
        // FF(S) <= 2 sum y + 1 for sampled subsets.
        let sizes = [0.3, 0.7, 0.2, 0.5, 0.4, 0.6];
        let inst = Instance::new(
            1,
            sizes
                .iter()
                .map(|&s| Item::new(vec![Incarnation::new(vec![s])]))
                .collect(),
            vec![BinType::new(vec![1.0])],
        );
        let selectors = compute_selectors(&inst).unwrap();
        let y = effective_load_duals(&selectors, 1);
        for (i, &s) in sizes.iter().enumerate() {
            assert!((y[i] - s).abs() < 1e-12);
        }
        for mask in 0..(1u32 << sizes.len()) {
            let subset: Vec<usize> = (0..sizes.len()).filter(|i| mask & (1 << i) != 0).collect();
            let packing = pack_subset(&inst, &selectors, &subset).unwrap();
            let cost = packing_cost(&inst, &packing);
            let dual_mass: f64 = subset.iter().map(|&i| y[i]).sum();
            assert!(cost <= 2.0 * dual_mass + 1.0 + 1e-9);
        }
    }
}
