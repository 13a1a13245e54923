//! The gen command: writes instances as CSV + partition JSON pairs that
//! round-trip losslessly through the loaders.

use partls::instances::{gen_random, gen_subset_sum, SubsetSumInstance};

use crate::dataset::{load_dataset, write_dataset};
use crate::failure::Failure;
use crate::main_args::GenCommand;
use crate::partition_spec::{
    numbered_feature_names, numbered_group_names, spec_from_partition, PartitionSpec,
};

pub fn run_gen(command: &GenCommand) -> Result<(), Failure> {
    match command {
        GenCommand::SubsetSum { values, rho, data, partition } => {
            let inst = SubsetSumInstance::new(values.clone(), *rho)?;
            let (dataset, part) = gen_subset_sum(&inst);
            let feature_names = numbered_feature_names(dataset.num_features());
            let group_names = numbered_group_names(part.num_groups());
            write_dataset(data, &dataset, &feature_names, "y")?;
            spec_from_partition(&part, &group_names, &feature_names).save(partition)?;
        }
        GenCommand::Random { rows, cols, groups, seed, noise, data, partition } => {
            let (dataset, part, _) = gen_random(*rows, *cols, *groups, *seed, *noise)?;
            let feature_names = numbered_feature_names(dataset.num_features());
            let group_names = numbered_group_names(part.num_groups());
            write_dataset(data, &dataset, &feature_names, "y")?;
            spec_from_partition(&part, &group_names, &feature_names).save(partition)?;
        }
        GenCommand::Blocks { data, target, block_size, partition } => {
            if *block_size == 0 {
                return Err(Failure::input("block size must be at least 1"));
            }
            let loaded = load_dataset(data, target)?;
            let features = loaded.feature_names;
            // Consecutive blocks of `block_size`; a short remainder merges
            // into the last block.
            let full_blocks = (features.len() / block_size).max(1);
            let group_names = numbered_group_names(full_blocks);
            let mut groups = std::collections::BTreeMap::new();
            for (b, name) in group_names.iter().enumerate() {
                let start = b * block_size;
                let end = if b + 1 == full_blocks { features.len() } else { start + block_size };
                groups.insert(name.clone(), features[start..end.min(features.len())].to_vec());
            }
            PartitionSpec { groups }.save(partition)?;
        }
    }
    Ok(())
}
