//! Paired-seed comparison of the three local-training algorithms on one
//! Non-IID benchmark with 30% label noise.
//!
//! Every algorithm sees the same data, partition, initial parameters, and
//! client sampling per seed, so the summary differences are attributable
//! to the algorithms themselves.
//!
//! ```text
//! cargo run --release --example compare_algorithms
//! ```

use fedbss::cli::{experiment_summary, render_table};
use fedbss::data::{gaussian_mixture_split, inject_label_noise, partition, PartitionSpec};
use fedbss::federation::{run_experiment, Algorithm, FederationConfig};
use fedbss::nn::{Architecture, SgdConfig};
use fedbss::selection::SelectionVariant;

fn main() -> fedbss::Result<()> {
    let seeds = [1u64, 2, 3];
    let algorithms = [
        ("fedavg", Algorithm::FedAvg),
        ("fedprox", Algorithm::FedProx { mu: 0.01 }),
        ("fedbss", Algorithm::FedBss { variant: SelectionVariant::Cosine }),
    ];

    let mut summaries = Vec::new();
    for (name, algorithm) in algorithms {
        let mut histories = Vec::new();
        for &seed in &seeds {
            let (train, test) = gaussian_mixture_split(8, 150, 40, 12, 1.0, seed)?;
            let train = inject_label_noise(&train, 0.3, seed)?;
            let partitions = partition(&train, &PartitionSpec::dirichlet(10, 0.1, seed))?;
            let arch = Architecture::mlp(train.feature_shape(), 48, train.num_classes())?;
            let config = FederationConfig {
                n_clients: 10,
                participation: 0.4,
                rounds_warmup: 5,
                rounds_progressive: 15,
                local_epochs: 4,
                batch_size: 32,
                optimizer: SgdConfig::plain(0.1),
                algorithm,
                weighted_aggregation: false,
                seed,
            };
            let record = run_experiment(&config, &arch, &train, &partitions, &test, &mut ())?;
            histories.push((seed, record.reports));
        }
        summaries.push(experiment_summary(name, name, &histories)?);
    }

    println!("{}", render_table(&summaries));
    Ok(())
}
