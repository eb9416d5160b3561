//! Loading real image data from IDX files (the MNIST container format).
//!
//! Pass the four standard files and a quick softmax-regression sanity fit
//! runs on a subset; without arguments the example prints usage and exits.
//!
//! ```text
//! cargo run --release --example mnist_idx -- \
//!     train-images-idx3-ubyte train-labels-idx1-ubyte \
//!     t10k-images-idx3-ubyte t10k-labels-idx1-ubyte
//! ```

use std::path::Path;

use fedbss::data::{load_idx, partition, PartitionSpec};
use fedbss::federation::{run_experiment, Algorithm, FederationConfig};
use fedbss::nn::{Architecture, SgdConfig};

fn main() -> fedbss::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [train_images, train_labels, test_images, test_labels] = args.as_slice() else {
        eprintln!("usage: mnist_idx <train-images> <train-labels> <test-images> <test-labels>");
        eprintln!("downloads: any MNIST-format dataset (MNIST, Fashion-MNIST, KMNIST, ...)");
        return Ok(());
    };

    let train = load_idx(Path::new(train_images), Path::new(train_labels))?;
    let test = load_idx(Path::new(test_images), Path::new(test_labels))?;
    println!(
        "train: {} samples of shape {:?}, {} classes; test: {} samples",
        train.len(),
        train.feature_shape(),
        train.num_classes(),
        test.len()
    );
    println!("train label histogram: {:?}", train.label_histogram(&(0..train.len()).collect::<Vec<_>>()));

    // A quick federated softmax-regression fit over heavily skewed clients.
    // Real accuracy needs the CNN and many more rounds; this is a wiring
    // check that finishes in seconds.
    let partitions = partition(&train, &PartitionSpec::shards(10, 2, 5))?;
    let arch = Architecture::softmax_regression(train.feature_shape(), train.num_classes())?;
    let config = FederationConfig {
        n_clients: 10,
        participation: 0.5,
        rounds_warmup: 5,
        rounds_progressive: 0,
        local_epochs: 1,
        batch_size: 64,
        optimizer: SgdConfig::plain(0.05),
        algorithm: Algorithm::FedAvg,
        weighted_aggregation: false,
        seed: 5,
    };
    let record = run_experiment(&config, &arch, &train, &partitions, &test, &mut ())?;
    for report in &record.reports {
        println!("round {:>2}: accuracy {:.4}", report.round, report.test_accuracy);
    }
    Ok(())
}
