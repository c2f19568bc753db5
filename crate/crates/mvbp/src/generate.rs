//! Seeded random instance generation.
//!
//! The same seed and parameters always produce the same instance, so
//! generated fixtures are reproducible byte for byte.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{BinType, Incarnation, Instance, Item};

fn unit_range() -> (f64, f64) {
    (1.0, 1.0)
}

/// Parameters for [`generate`]. Sizes, weights, and capacities are drawn
/// uniformly from the given closed ranges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    pub items: usize,
    /// Upper bound on incarnations per item; each item draws between 1 and
    /// this many.
    pub max_incarnations: usize,
    pub dimension: usize,
    /// Number of bin types; 0 generates a pure knapsack instance.
    pub bin_types: usize,
    pub size_range: (f64, f64),
    /// Applied to incarnation weights and bin-type weights alike.
    #[serde(default = "unit_range")]
    pub weight_range: (f64, f64),
    #[serde(default = "unit_range")]
    pub capacity_range: (f64, f64),
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            items: 4,
            max_incarnations: 2,
            dimension: 1,
            bin_types: 1,
            size_range: (0.1, 0.6),
            weight_range: (1.0, 1.0),
            capacity_range: (1.0, 1.0),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GenerateError {
    InvalidParams(String),
    /// Item resampling could not produce an incarnation that fits any bin
    /// type.
    Unsatisfiable,
}

impl std::fmt::Display for GenerateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenerateError::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            GenerateError::Unsatisfiable => {
                write!(f, "could not generate incarnations that fit any bin type")
            }
        }
    }
}

impl std::error::Error for GenerateError {}

fn check_range(name: &str, (lo, hi): (f64, f64), min: f64) -> Result<(), GenerateError> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo < min {
        return Err(GenerateError::InvalidParams(format!(
            "{name} range ({lo}, {hi}) must satisfy {min} <= lo <= hi"
        )));
    }
    Ok(())
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

const RESAMPLE_LIMIT: usize = 10_000;

/// Generates a deterministic instance. Every incarnation is resampled until
/// it fits alone in at least one bin type (the unit knapsack when there are
/// no bin types).
pub fn generate(params: &GeneratorParams) -> Result<Instance, GenerateError> {
    if params.dimension == 0 {
        return Err(GenerateError::InvalidParams(
            "dimension must be positive".into(),
        ));
    }
    if params.max_incarnations == 0 {
        return Err(GenerateError::InvalidParams(
            "max_incarnations must be positive".into(),
        ));
    }
    check_range("size", params.size_range, 0.0)?;
    check_range("weight", params.weight_range, 0.0)?;
    check_range("capacity", params.capacity_range, f64::MIN_POSITIVE)?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let bin_types: Vec<BinType> = (0..params.bin_types)
        .map(|_| {
            let capacities = (0..params.dimension)
                .map(|_| sample(&mut rng, params.capacity_range))
                .collect();
            let weight = sample(&mut rng, params.weight_range);
            BinType { capacities, weight }
        })
        .collect();

    let fits = |sizes: &[f64]| -> bool {
        if bin_types.is_empty() {
            sizes.iter().all(|&a| a <= 1.0)
        } else {
            bin_types
                .iter()
                .any(|bt| sizes.iter().zip(&bt.capacities).all(|(a, b)| a <= b))
        }
    };

    let mut items = Vec::with_capacity(params.items);
    for _ in 0..params.items {
        let count = rng.gen_range(1..=params.max_incarnations);
        let mut incarnations = Vec::with_capacity(count);
        for _ in 0..count {
            let mut attempts = 0;
            let sizes = loop {
                let sizes: Vec<f64> = (0..params.dimension)
                    .map(|_| sample(&mut rng, params.size_range))
                    .collect();
                if fits(&sizes) {
                    break sizes;
                }
                attempts += 1;
                if attempts >= RESAMPLE_LIMIT {
                    return Err(GenerateError::Unsatisfiable);
                }
            };
            let weight = sample(&mut rng, params.weight_range);
            incarnations.push(Incarnation { sizes, weight });
        }
        items.push(Item::new(incarnations));
    }

    Ok(Instance::new(params.dimension, items, bin_types))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn same_seed_same_instance() {
        let params = GeneratorParams {
            items: 6,
            max_incarnations: 3,
            dimension: 2,
            bin_types: 2,
            size_range: (0.05, 0.8),
            weight_range: (0.5, 2.0),
            capacity_range: (0.8, 1.2),
            seed: 42,
        };
        let a = generate(&params).unwrap();
        let b = generate(&params).unwrap();
        assert_eq!(a, b);
        assert!(validate_instance(&a).is_empty());
        for i in 0..a.items.len() {
            assert!(a.item_fits_somewhere(i));
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut params = GeneratorParams::default();
        let a = generate(&params).unwrap();
        params.seed = 1;
        let b = generate(&params).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn empty_item_list_is_valid() {
        let params = GeneratorParams {
            items: 0,
            ..Default::default()
        };
        let inst = generate(&params).unwrap();
        assert!(inst.items.is_empty());
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn bad_params_are_rejected() {
        let params = GeneratorParams {
            dimension: 0,
            ..Default::default()
        };
        assert!(matches!(
            generate(&params),
            Err(GenerateError::InvalidParams(_))
        ));

        let params = GeneratorParams {
            size_range: (0.5, 0.2),
            ..Default::default()
        };
        assert!(matches!(
            generate(&params),
            Err(GenerateError::InvalidParams(_))
        ));
    }

    #[test]
    fn oversized_sizes_are_unsatisfiable() {
        let params = GeneratorParams {
            size_range: (2.0, 3.0),
            capacity_range: (1.0, 1.0),
            ..Default::default()
        };
        assert_eq!(generate(&params), Err(GenerateError::Unsatisfiable));
    }

    #[test]
    fn knapsack_instances_fit_the_unit_capacity() {
        let params = GeneratorParams {
            bin_types: 0,
            items: 5,
            size_range: (0.2, 0.9),
            ..Default::default()
        };
        let inst = generate(&params).unwrap();
        assert!(inst.bin_types.is_empty());
        for item in &inst.items {
            for inc in &item.incarnations {
                assert!(inc.sizes.iter().all(|&a| a <= 1.0));
            }
        }
    }
}
