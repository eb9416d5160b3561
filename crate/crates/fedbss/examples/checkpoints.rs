//! Saving and restoring model parameters.
//!
//! Trains a short run, writes the final global parameters to a checkpoint
//! file, reads them back, and shows that the restored model is bit-exact:
//! it produces the same test accuracy the run ended with.
//!
//! ```text
//! cargo run --example checkpoints
//! ```

use fedbss::data::{gaussian_mixture_split, partition, PartitionSpec};
use fedbss::federation::{evaluate_accuracy, run_experiment, Algorithm, FederationConfig};
use fedbss::nn::{checkpoint, Architecture, Model, SgdConfig};

fn main() -> fedbss::Result<()> {
    let (train, test) = gaussian_mixture_split(4, 100, 30, 6, 0.7, 99)?;
    let partitions = partition(&train, &PartitionSpec::dirichlet(5, 1.0, 99))?;
    let arch = Architecture::mlp(train.feature_shape(), 24, train.num_classes())?;
    let config = FederationConfig {
        n_clients: 5,
        participation: 1.0,
        rounds_warmup: 8,
        rounds_progressive: 0,
        local_epochs: 2,
        batch_size: 16,
        optimizer: SgdConfig::plain(0.1),
        algorithm: Algorithm::FedAvg,
        weighted_aggregation: false,
        seed: 99,
    };
    let record = run_experiment(&config, &arch, &train, &partitions, &test, &mut ())?;
    let final_accuracy = record.reports.last().expect("at least one round").test_accuracy;

    let path = std::env::temp_dir().join("fedbss_example_checkpoint.pv");
    checkpoint::write_params(&path, &record.final_params)?;
    println!("wrote {} ({} parameters)", path.display(), record.final_params.total_len());

    let restored = checkpoint::read_params(&path, &arch)?;
    assert!(restored.bit_identical(&record.final_params));
    let model = Model::from_params(arch, restored)?;
    let accuracy = evaluate_accuracy(&model, &test)?;
    println!("restored model accuracy {accuracy:.4} (run ended at {final_accuracy:.4})");

    std::fs::remove_file(&path)?;
    Ok(())
}
