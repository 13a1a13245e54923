//! Shared fixtures for the solver benchmarks.

use partls::instances::{gen_random, SubsetSumInstance};
use partls::{Dataset, Partition};

/// A mid-size random instance: realizable targets, three groups.
pub fn random_instance(rows: usize, features: usize, groups: usize) -> (Dataset, Partition) {
    let (data, partition, _) =
        gen_random(rows, features, groups, 2024, 0.05).expect("valid dimensions");
    (data, partition)
}

/// The subset-sum reduction instance used in the solver tests.
pub fn subset_sum_instance(values: &[u64]) -> (Dataset, Partition) {
    let inst = SubsetSumInstance::new(values.to_vec(), 1.0).expect("valid instance");
    partls::instances::gen_subset_sum(&inst)
}
