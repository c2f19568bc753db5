//! Small named instances shared by the test suites.

use crate::model::{BinType, Incarnation, Instance, Item};

/// Two-dimensional weighted instance with a multiple-choice item.
///
/// Bin types: `(1, 1)` at weight 1 and `(0.5, 0.5)` at weight 0.5. Item 0 has
/// incarnations `(0.5, 0.2)` and `(0.3, 0.4)`; its best effective load is 0.4
/// via incarnation 1 in type 0.
pub fn e1() -> Instance {
    Instance::new(
        2,
        vec![
            Item::new(vec![
                Incarnation::new(vec![0.5, 0.2]),
                Incarnation::new(vec![0.3, 0.4]),
            ]),
            Item::new(vec![Incarnation::new(vec![0.4, 0.4])]),
            Item::new(vec![
                Incarnation::new(vec![0.2, 0.1]),
                Incarnation::new(vec![0.15, 0.3]),
            ]),
        ],
        vec![
            BinType::weighted(vec![1.0, 1.0], 1.0),
            BinType::weighted(vec![0.5, 0.5], 0.5),
        ],
    )
}

/// Four items of size 0.5 against a single unit bin type; the optimum is two
/// bins and the LP relaxation value is 2.
pub fn four_halves() -> Instance {
    Instance::new(
        1,
        (0..4)
            .map(|_| Item::new(vec![Incarnation::new(vec![0.5])]))
            .collect(),
        vec![BinType::new(vec![1.0])],
    )
}

/// Two item families and two bin types: family A fits together only in type
/// 0, family B only in type 1, so any single-type solution is far from the
/// two-bin optimum.
pub fn two_family() -> Instance {
    Instance::new(
        2,
        vec![
            Item::new(vec![Incarnation::new(vec![0.5, 1.0])]),
            Item::new(vec![Incarnation::new(vec![0.5, 1.0])]),
            Item::new(vec![Incarnation::new(vec![1.0, 0.5])]),
            Item::new(vec![Incarnation::new(vec![1.0, 0.5])]),
        ],
        vec![BinType::new(vec![1.0, 2.0]), BinType::new(vec![2.0, 1.0])],
    )
}

/// Three items of size 0.51: no two fit together, so the LP relaxation value
/// already equals the integer optimum of 3.
pub fn gap_three() -> Instance {
    Instance::new(
        1,
        (0..3)
            .map(|_| Item::new(vec![Incarnation::new(vec![0.51])]))
            .collect(),
        vec![BinType::new(vec![1.0])],
    )
}

/// Instance where the type-subset guessing wrapper strictly beats the plain
/// solver: the large type 1 looks cheap per unit of load, so the residual
/// packer opens it for a single leftover item at weight 5, while restricting
/// to type 0 packs everything at unit weight.
pub fn wrapper_adversarial() -> Instance {
    Instance::new(
        1,
        (0..4)
            .map(|_| Item::new(vec![Incarnation::new(vec![1.0])]))
            .collect(),
        vec![
            BinType::weighted(vec![1.0], 1.0),
            BinType::weighted(vec![10.0], 5.0),
        ],
    )
}
