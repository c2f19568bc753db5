//! Domain types for multiple-choice packing instances and their solutions.
//!
//! An [`Instance`] couples a set of items, each offered in one of several
//! D-dimensional incarnations, with a set of bin types. The same type doubles
//! as a knapsack instance when `bin_types` is empty: the knapsack has unit
//! capacity in every dimension.
//!
//! All types are immutable values after construction; every operation here is
//! a pure function, so instances can be shared freely across threads.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::FEAS_TOL;

fn default_weight() -> f64 {
    1.0
}

/// One selectable realization of an item: a size per dimension plus a weight
/// (profit) used by the knapsack objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Incarnation {
    pub sizes: Vec<f64>,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

impl Incarnation {
    /// Unit-weight incarnation.
    pub fn new(sizes: Vec<f64>) -> Self {
        Incarnation { sizes, weight: 1.0 }
    }

    pub fn weighted(sizes: Vec<f64>, weight: f64) -> Self {
        Incarnation { sizes, weight }
    }
}

/// An item is a nonempty list of alternative incarnations; a solution picks at
/// most one of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub incarnations: Vec<Incarnation>,
}

impl Item {
    pub fn new(incarnations: Vec<Incarnation>) -> Self {
        Item { incarnations }
    }
}

/// A bin blueprint: per-dimension capacities and an opening cost. Unlimited
/// copies may be opened.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinType {
    pub capacities: Vec<f64>,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

impl BinType {
    /// Unit-weight bin type.
    pub fn new(capacities: Vec<f64>) -> Self {
        BinType {
            capacities,
            weight: 1.0,
        }
    }

    pub fn weighted(capacities: Vec<f64>, weight: f64) -> Self {
        BinType { capacities, weight }
    }
}

/// A full problem instance. `bin_types` is empty for pure knapsack instances,
/// which are packed against an implicit unit-capacity knapsack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub dimension: usize,
    pub items: Vec<Item>,
    pub bin_types: Vec<BinType>,
}

impl Instance {
    pub fn new(dimension: usize, items: Vec<Item>, bin_types: Vec<BinType>) -> Self {
        Instance {
            dimension,
            items,
            bin_types,
        }
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_bin_types(&self) -> usize {
        self.bin_types.len()
    }

    /// Largest incarnation count over all items (the parameter `m`).
    pub fn max_incarnations(&self) -> usize {
        self.items
            .iter()
            .map(|it| it.incarnations.len())
            .max()
            .unwrap_or(0)
    }

    /// Sum of bin-type weights.
    pub fn total_type_weight(&self) -> f64 {
        self.bin_types.iter().fold(0.0, |acc, t| acc + t.weight)
    }

    /// Largest bin-type weight, or 0 when there are no bin types.
    pub fn max_type_weight(&self) -> f64 {
        self.bin_types.iter().map(|t| t.weight).fold(0.0, f64::max)
    }

    /// True when every bin type has weight exactly 1.
    pub fn is_unweighted(&self) -> bool {
        self.bin_types.iter().all(|t| t.weight == 1.0)
    }

    /// Does incarnation `inc` of item `item` fit alone in bin type `t`?
    pub fn incarnation_fits(&self, item: usize, inc: usize, t: usize) -> bool {
        let sizes = &self.items[item].incarnations[inc].sizes;
        let caps = &self.bin_types[t].capacities;
        sizes.iter().zip(caps).all(|(a, b)| *a <= b + FEAS_TOL)
    }

    /// Does item `item` have any incarnation that fits alone in any bin type?
    pub fn item_fits_somewhere(&self, item: usize) -> bool {
        (0..self.items[item].incarnations.len())
            .any(|j| (0..self.bin_types.len()).any(|t| self.incarnation_fits(item, j, t)))
    }
}

/// One opened bin: its type and the (item, incarnation) pairs assigned to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackedBin {
    pub bin_type: usize,
    pub assignments: Vec<(usize, usize)>,
}

/// A multiset of opened bins. A complete packing assigns every item exactly
/// once; partial packings appear only as intermediate algorithm state.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Packing {
    pub bins: Vec<PackedBin>,
}

impl Packing {
    pub fn empty() -> Self {
        Packing { bins: Vec::new() }
    }
}

/// A knapsack solution: chosen (item, incarnation) pairs and their total
/// weight.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnapsackSelection {
    pub chosen: Vec<(usize, usize)>,
    pub value: f64,
}

impl KnapsackSelection {
    pub fn empty() -> Self {
        KnapsackSelection {
            chosen: Vec::new(),
            value: 0.0,
        }
    }
}

/// A violation of the instance type invariants, naming the offending index
/// and field.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    ZeroDimension,
    SizeLength {
        item: usize,
        incarnation: usize,
        len: usize,
        dimension: usize,
    },
    NegativeSize {
        item: usize,
        incarnation: usize,
        dim: usize,
        value: f64,
    },
    NegativeItemWeight {
        item: usize,
        incarnation: usize,
        value: f64,
    },
    NoIncarnations {
        item: usize,
    },
    CapacityLength {
        bin_type: usize,
        len: usize,
        dimension: usize,
    },
    NonPositiveCapacity {
        bin_type: usize,
        dim: usize,
        value: f64,
    },
    NegativeTypeWeight {
        bin_type: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "dimension must be positive"),
            Violation::SizeLength { item, incarnation, len, dimension } => write!(
                f,
                "item {item} incarnation {incarnation}: sizes has {len} entries, expected {dimension}"
            ),
            Violation::NegativeSize { item, incarnation, dim, value } => write!(
                f,
                "item {item} incarnation {incarnation}: size {value} in dimension {dim} is negative"
            ),
            Violation::NegativeItemWeight { item, incarnation, value } => {
                write!(f, "item {item} incarnation {incarnation}: weight {value} is negative")
            }
            Violation::NoIncarnations { item } => {
                write!(f, "item {item}: no incarnations")
            }
            Violation::CapacityLength { bin_type, len, dimension } => write!(
                f,
                "bin type {bin_type}: capacities has {len} entries, expected {dimension}"
            ),
            Violation::NonPositiveCapacity { bin_type, dim, value } => write!(
                f,
                "bin type {bin_type}: capacity {value} in dimension {dim} is not positive"
            ),
            Violation::NegativeTypeWeight { bin_type, value } => {
                write!(f, "bin type {bin_type}: weight {value} is negative")
            }
        }
    }
}

/// Checks every type invariant and returns one entry per violation. An empty
/// result means the instance is well-formed.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if inst.dimension == 0 {
        out.push(Violation::ZeroDimension);
    }
    for (i, item) in inst.items.iter().enumerate() {
        if item.incarnations.is_empty() {
            out.push(Violation::NoIncarnations { item: i });
        }
        for (j, inc) in item.incarnations.iter().enumerate() {
            if inc.sizes.len() != inst.dimension {
                out.push(Violation::SizeLength {
                    item: i,
                    incarnation: j,
                    len: inc.sizes.len(),
                    dimension: inst.dimension,
                });
            }
            for (d, &a) in inc.sizes.iter().enumerate() {
                if a < 0.0 || !a.is_finite() {
                    out.push(Violation::NegativeSize {
                        item: i,
                        incarnation: j,
                        dim: d,
                        value: a,
                    });
                }
            }
            if inc.weight < 0.0 || !inc.weight.is_finite() {
                out.push(Violation::NegativeItemWeight {
                    item: i,
                    incarnation: j,
                    value: inc.weight,
                });
            }
        }
    }
    for (t, bt) in inst.bin_types.iter().enumerate() {
        if bt.capacities.len() != inst.dimension {
            out.push(Violation::CapacityLength {
                bin_type: t,
                len: bt.capacities.len(),
                dimension: inst.dimension,
            });
        }
        for (d, &b) in bt.capacities.iter().enumerate() {
            if b <= 0.0 || !b.is_finite() {
                out.push(Violation::NonPositiveCapacity {
                    bin_type: t,
                    dim: d,
                    value: b,
                });
            }
        }
        if bt.weight < 0.0 || !bt.weight.is_finite() {
            out.push(Violation::NegativeTypeWeight {
                bin_type: t,
                value: bt.weight,
            });
        }
    }
    out
}

/// A violation found while checking a packing against an instance.
#[derive(Clone, Debug, PartialEq)]
pub enum PackingViolation {
    BinTypeOutOfRange {
        bin: usize,
        bin_type: usize,
    },
    ItemOutOfRange {
        bin: usize,
        item: usize,
    },
    IncarnationOutOfRange {
        bin: usize,
        item: usize,
        incarnation: usize,
    },
    ItemUnassigned {
        item: usize,
    },
    ItemRepeated {
        item: usize,
    },
    CapacityExceeded {
        bin: usize,
        dim: usize,
        load: f64,
        capacity: f64,
    },
}

impl fmt::Display for PackingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PackingViolation::BinTypeOutOfRange { bin, bin_type } => {
                write!(f, "bin {bin}: bin type {bin_type} out of range")
            }
            PackingViolation::ItemOutOfRange { bin, item } => {
                write!(f, "bin {bin}: item {item} out of range")
            }
            PackingViolation::IncarnationOutOfRange {
                bin,
                item,
                incarnation,
            } => {
                write!(
                    f,
                    "bin {bin}: item {item} incarnation {incarnation} out of range"
                )
            }
            PackingViolation::ItemUnassigned { item } => write!(f, "item {item} unassigned"),
            PackingViolation::ItemRepeated { item } => {
                write!(f, "item {item} assigned more than once")
            }
            PackingViolation::CapacityExceeded {
                bin,
                dim,
                load,
                capacity,
            } => {
                write!(
                    f,
                    "bin {bin}: dimension {dim} load {load} exceeds capacity {capacity}"
                )
            }
        }
    }
}

/// Result of [`check_packing`]: violations plus per-bin, per-dimension slack
/// (capacity minus load) for every bin whose type index was valid.
#[derive(Clone, Debug)]
pub struct PackingCheck {
    pub violations: Vec<PackingViolation>,
    pub bin_slacks: Vec<Vec<f64>>,
}

impl PackingCheck {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies a packing: every item assigned exactly once, all indices in
/// range, and no bin over capacity in any dimension. Capacity comparisons
/// allow an absolute slack of [`FEAS_TOL`].
pub fn check_packing(inst: &Instance, packing: &Packing) -> PackingCheck {
    let mut violations = Vec::new();
    let mut bin_slacks = Vec::with_capacity(packing.bins.len());
    let mut seen = vec![0usize; inst.items.len()];

    for (b, bin) in packing.bins.iter().enumerate() {
        let bt = match inst.bin_types.get(bin.bin_type) {
            Some(bt) => bt,
            None => {
                violations.push(PackingViolation::BinTypeOutOfRange {
                    bin: b,
                    bin_type: bin.bin_type,
                });
                // Still count item occurrences so coverage errors are reported once.
                for &(i, _) in &bin.assignments {
                    if i < seen.len() {
                        seen[i] += 1;
                    }
                }
                bin_slacks.push(Vec::new());
                continue;
            }
        };
        let mut load = vec![0.0; inst.dimension];
        for &(i, j) in &bin.assignments {
            let item = match inst.items.get(i) {
                Some(item) => item,
                None => {
                    violations.push(PackingViolation::ItemOutOfRange { bin: b, item: i });
                    continue;
                }
            };
            seen[i] += 1;
            let inc = match item.incarnations.get(j) {
                Some(inc) => inc,
                None => {
                    violations.push(PackingViolation::IncarnationOutOfRange {
                        bin: b,
                        item: i,
                        incarnation: j,
                    });
                    continue;
                }
            };
            for (d, &a) in inc.sizes.iter().enumerate() {
                load[d] += a;
            }
        }
        let mut slacks = Vec::with_capacity(inst.dimension);
        for (d, (&l, &cap)) in load.iter().zip(&bt.capacities).enumerate() {
            slacks.push(cap - l);
            if l > cap + FEAS_TOL {
                violations.push(PackingViolation::CapacityExceeded {
                    bin: b,
                    dim: d,
                    load: l,
                    capacity: cap,
                });
            }
        }
        bin_slacks.push(slacks);
    }

    for (i, &count) in seen.iter().enumerate() {
        if count == 0 {
            violations.push(PackingViolation::ItemUnassigned { item: i });
        } else if count > 1 {
            violations.push(PackingViolation::ItemRepeated { item: i });
        }
    }

    PackingCheck {
        violations,
        bin_slacks,
    }
}

/// Sum of opened bins' type weights; equals the bin count when all weights
/// are 1. The packing must reference valid bin types.
pub fn packing_cost(inst: &Instance, packing: &Packing) -> f64 {
    packing
        .bins
        .iter()
        .fold(0.0, |acc, b| acc + inst.bin_types[b.bin_type].weight)
}

/// A violation found while checking a knapsack selection.
#[derive(Clone, Debug, PartialEq)]
pub enum SelectionViolation {
    ItemOutOfRange { item: usize },
    IncarnationOutOfRange { item: usize, incarnation: usize },
    ItemRepeated { item: usize },
    CapacityExceeded { dim: usize, load: f64 },
    ValueMismatch { stated: f64, actual: f64 },
}

impl fmt::Display for SelectionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionViolation::ItemOutOfRange { item } => write!(f, "item {item} out of range"),
            SelectionViolation::IncarnationOutOfRange { item, incarnation } => {
                write!(f, "item {item} incarnation {incarnation} out of range")
            }
            SelectionViolation::ItemRepeated { item } => {
                write!(f, "item {item} chosen more than once")
            }
            SelectionViolation::CapacityExceeded { dim, load } => {
                write!(f, "dimension {dim} load {load} exceeds 1")
            }
            SelectionViolation::ValueMismatch { stated, actual } => {
                write!(
                    f,
                    "stated value {stated} does not match chosen weight {actual}"
                )
            }
        }
    }
}

/// Verifies a knapsack selection against the unit-capacity knapsack: at most
/// one incarnation per item and per-dimension load at most 1 within `tol`.
pub fn check_selection(
    inst: &Instance,
    sel: &KnapsackSelection,
    tol: f64,
) -> Vec<SelectionViolation> {
    let mut out = Vec::new();
    let mut seen = vec![false; inst.items.len()];
    let mut load = vec![0.0; inst.dimension];
    let mut value = 0.0;
    for &(i, j) in &sel.chosen {
        let item = match inst.items.get(i) {
            Some(item) => item,
            None => {
                out.push(SelectionViolation::ItemOutOfRange { item: i });
                continue;
            }
        };
        if seen[i] {
            out.push(SelectionViolation::ItemRepeated { item: i });
        }
        seen[i] = true;
        let inc = match item.incarnations.get(j) {
            Some(inc) => inc,
            None => {
                out.push(SelectionViolation::IncarnationOutOfRange {
                    item: i,
                    incarnation: j,
                });
                continue;
            }
        };
        for (d, &a) in inc.sizes.iter().enumerate() {
            load[d] += a;
        }
        value += inc.weight;
    }
    for (d, &l) in load.iter().enumerate() {
        if l > 1.0 + tol {
            out.push(SelectionViolation::CapacityExceeded { dim: d, load: l });
        }
    }
    if (value - sel.value).abs() > tol * (1.0 + value.abs()) {
        out.push(SelectionViolation::ValueMismatch {
            stated: sel.value,
            actual: value,
        });
    }
    out
}
