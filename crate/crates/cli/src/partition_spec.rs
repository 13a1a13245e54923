//! The partition JSON document: named groups of feature names.

use std::collections::BTreeMap;
use std::path::Path;

use partls::Partition;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

/// On-disk partition description. Groups are keyed by name; indices are
/// assigned in sorted name order so runs are reproducible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub groups: BTreeMap<String, Vec<String>>,
}

/// A spec resolved against a concrete feature ordering.
pub struct BoundPartition {
    pub partition: Partition,
    /// Group name of index k.
    pub group_names: Vec<String>,
}

impl PartitionSpec {
    pub fn load(path: &Path) -> Result<PartitionSpec, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let spec: PartitionSpec = serde_json::from_str(&text)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        Ok(spec)
    }

    pub fn save(&self, path: &Path) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        Ok(())
    }

    /// Checks that the named groups cover every dataset feature exactly
    /// once and builds the index-based partition.
    pub fn bind(&self, feature_names: &[String]) -> Result<BoundPartition, Failure> {
        if self.groups.is_empty() {
            return Err(Failure::input("partition has no groups"));
        }
        let mut assignment: Vec<Option<&str>> = vec![None; feature_names.len()];
        let index_of = |name: &str| feature_names.iter().position(|f| f == name);

        let mut group_names = Vec::with_capacity(self.groups.len());
        let mut groups = Vec::with_capacity(self.groups.len());
        for (name, members) in &self.groups {
            if members.is_empty() {
                return Err(Failure::input(format!("group '{name}' is empty")));
            }
            let mut indices = Vec::with_capacity(members.len());
            for feature in members {
                let Some(idx) = index_of(feature) else {
                    return Err(Failure::input(format!(
                        "group '{name}' references unknown feature '{feature}'"
                    )));
                };
                if let Some(previous) = assignment[idx] {
                    return Err(Failure::input(format!(
                        "feature '{feature}' appears in groups '{previous}' and '{name}'"
                    )));
                }
                assignment[idx] = Some(name);
                indices.push(idx);
            }
            group_names.push(name.clone());
            groups.push(indices);
        }
        let missing: Vec<&str> = feature_names
            .iter()
            .zip(assignment.iter())
            .filter(|(_, a)| a.is_none())
            .map(|(f, _)| f.as_str())
            .collect();
        if !missing.is_empty() {
            return Err(Failure::input(format!(
                "features not covered by any group: {}",
                missing.join(", ")
            )));
        }

        let partition = Partition::from_groups(groups, feature_names.len())?;
        Ok(BoundPartition { partition, group_names })
    }
}

/// Group names `g01..` zero-padded to a uniform width, so that sorted name
/// order matches generation order.
pub fn numbered_group_names(count: usize) -> Vec<String> {
    let width = count.to_string().len();
    (1..=count).map(|i| format!("g{i:0width$}")).collect()
}

/// Feature names `f001..` zero-padded like [`numbered_group_names`].
pub fn numbered_feature_names(count: usize) -> Vec<String> {
    let width = count.to_string().len();
    (1..=count).map(|i| format!("f{i:0width$}")).collect()
}

/// Builds the partition document for groups whose groups and features carry
/// the given names.
pub fn spec_from_partition(
    partition: &Partition,
    group_names: &[String],
    feature_names: &[String],
) -> PartitionSpec {
    let mut groups = BTreeMap::new();
    for (k, members) in partition.groups().enumerate() {
        groups.insert(
            group_names[k].clone(),
            members.iter().map(|&m| feature_names[m].clone()).collect(),
        );
    }
    PartitionSpec { groups }
}
