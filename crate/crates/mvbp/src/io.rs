//! JSON file formats for instances, packings, and selections.
//!
//! Instances are stored as
//! `{dimension, items: [{incarnations: [{sizes: [...], weight}]}],
//! bin_types: [{capacities: [...], weight}], metadata?}` with unknown fields
//! rejected. Serialization round-trips exactly: parsing a serialized
//! instance reproduces it bit for bit.

use serde::{Deserialize, Serialize};

use crate::generate::GeneratorParams;
use crate::model::{BinType, Instance, Item, KnapsackSelection, Packing};

/// Provenance of a generated instance, carried alongside the data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorParams>,
}

/// An instance plus optional metadata, as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dimension: usize,
    pub items: Vec<Item>,
    pub bin_types: Vec<BinType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl InstanceFile {
    pub fn new(inst: Instance) -> Self {
        InstanceFile {
            dimension: inst.dimension,
            items: inst.items,
            bin_types: inst.bin_types,
            metadata: None,
        }
    }

    pub fn with_metadata(inst: Instance, metadata: Metadata) -> Self {
        InstanceFile {
            metadata: Some(metadata),
            ..InstanceFile::new(inst)
        }
    }

    pub fn instance(&self) -> Instance {
        Instance::new(self.dimension, self.items.clone(), self.bin_types.clone())
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    s.push('\n');
    s
}

pub fn instance_to_json(file: &InstanceFile) -> String {
    pretty(file)
}

pub fn instance_from_json(s: &str) -> Result<InstanceFile, serde_json::Error> {
    serde_json::from_str(s)
}

pub fn packing_to_json(packing: &Packing) -> String {
    pretty(packing)
}

pub fn packing_from_json(s: &str) -> Result<Packing, serde_json::Error> {
    serde_json::from_str(s)
}

pub fn selection_to_json(selection: &KnapsackSelection) -> String {
    pretty(selection)
}

pub fn selection_from_json(s: &str) -> Result<KnapsackSelection, serde_json::Error> {
    serde_json::from_str(s)
}
