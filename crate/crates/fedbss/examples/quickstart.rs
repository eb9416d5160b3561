//! Smallest end-to-end run: synthetic data, a Non-IID partition, and a
//! short federated experiment with bias-aware sample selection.
//!
//! ```text
//! cargo run --example quickstart
//! ```

use fedbss::data::{gaussian_mixture_split, partition, PartitionSpec};
use fedbss::federation::{run_experiment, Algorithm, FederationConfig};
use fedbss::nn::{Architecture, SgdConfig};
use fedbss::selection::SelectionVariant;

fn main() -> fedbss::Result<()> {
    // A 5-class Gaussian mixture: 400 training samples, 100 held out.
    let (train, test) = gaussian_mixture_split(5, 80, 20, 8, 0.8, 42)?;

    // Split across 8 clients with strong label skew (Dirichlet, alpha 0.1).
    let spec = PartitionSpec::dirichlet(8, 0.1, 42);
    let partitions = partition(&train, &spec)?;

    let arch = Architecture::mlp(train.feature_shape(), 32, train.num_classes())?;
    let config = FederationConfig {
        n_clients: 8,
        participation: 0.5,
        rounds_warmup: 4,
        rounds_progressive: 8,
        local_epochs: 3,
        batch_size: 16,
        optimizer: SgdConfig::plain(0.1),
        algorithm: Algorithm::FedBss { variant: SelectionVariant::Cosine },
        weighted_aggregation: false,
        seed: 42,
    };

    let record = run_experiment(&config, &arch, &train, &partitions, &test, &mut ())?;

    println!("round  stage        accuracy  train-loss  selected");
    for report in &record.reports {
        let split = report
            .mean_split_fraction
            .map(|f| format!("{:.0}%", f * 100.0))
            .unwrap_or_else(|| "all".into());
        println!(
            "{:>5}  {:<11}  {:>8.4}  {:>10.4}  {:>8}",
            report.round,
            format!("{:?}", report.stage).to_lowercase(),
            report.test_accuracy,
            report.mean_train_loss,
            split,
        );
    }
    println!(
        "\nlast-{} mean accuracy: {:.4} ± {:.4}",
        record.summary.window, record.summary.mean_last_accuracy, record.summary.std_last_accuracy
    );
    Ok(())
}
