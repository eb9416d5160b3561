//! Streaming metrics with a custom observer.
//!
//! [`RoundObserver`] hands over each round's report the moment the round
//! finishes — and, on request, every participant's raw score table. This
//! example prints reports as JSON lines and tracks how many samples each
//! progressive round classified as biased.
//!
//! ```text
//! cargo run --example metrics_stream
//! ```

use fedbss::data::{gaussian_mixture_split, partition, PartitionSpec};
use fedbss::federation::{run_experiment, Algorithm, FederationConfig, RoundObserver, RoundReport};
use fedbss::nn::{Architecture, SgdConfig};
use fedbss::selection::{SampleScoreTable, SelectionVariant};

#[derive(Default)]
struct JsonLines {
    biased_seen: usize,
}

impl RoundObserver for JsonLines {
    fn on_round(&mut self, report: &RoundReport) -> fedbss::Result<()> {
        let line = serde_json::to_string(report)
            .map_err(|e| fedbss::Error::Report(e.to_string()))?;
        println!("{line}");
        Ok(())
    }

    fn wants_scores(&self) -> bool {
        true
    }

    fn on_scores(&mut self, _round: usize, _client: usize, table: &SampleScoreTable) -> fedbss::Result<()> {
        self.biased_seen += table.biased().len();
        Ok(())
    }
}

fn main() -> fedbss::Result<()> {
    let (train, test) = gaussian_mixture_split(4, 90, 25, 8, 0.9, 31)?;
    let partitions = partition(&train, &PartitionSpec::dirichlet(6, 0.2, 31))?;
    let arch = Architecture::mlp(train.feature_shape(), 24, train.num_classes())?;
    let config = FederationConfig {
        n_clients: 6,
        participation: 0.5,
        rounds_warmup: 3,
        rounds_progressive: 7,
        local_epochs: 3,
        batch_size: 16,
        optimizer: SgdConfig::plain(0.1),
        algorithm: Algorithm::FedBss { variant: SelectionVariant::Cosine },
        weighted_aggregation: false,
        seed: 31,
    };

    let mut observer = JsonLines::default();
    run_experiment(&config, &arch, &train, &partitions, &test, &mut observer)?;
    println!("\nscore tables flagged {} biased samples across all progressive rounds", observer.biased_seen);
    Ok(())
}
