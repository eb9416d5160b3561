//! Inside one client's selection round: scores, the split point, and the
//! progressive per-epoch training sets.
//!
//! Samples are scored by the *global* model's loss and prediction
//! uncertainty, sorted by loss, and split where uncertainty peaks: the
//! low-loss head is "unbiased" (safe to train on), the tail "biased".
//! Each local epoch then admits the unbiased head plus a growing
//! lowest-loss slice of the tail.
//!
//! ```text
//! cargo run --example sample_selection
//! ```

use fedbss::data::{gaussian_mixture, partition, PartitionSpec};
use fedbss::federation::{local_train_plain, LocalContext};
use fedbss::nn::{Architecture, Model, SgdConfig};
use fedbss::selection::{score_samples, strategy_variant, SelectionVariant};

fn main() -> fedbss::Result<()> {
    let data = gaussian_mixture(4, 50, 6, 1.0, 3)?;
    let partitions = partition(&data, &PartitionSpec::dirichlet(8, 0.3, 3))?;
    let arch = Architecture::mlp(data.feature_shape(), 16, data.num_classes())?;

    // Warm the model a little so the scores aren't pure noise: one plain
    // local pass over client 0 stands in for a few warmup rounds.
    let init = Model::<f32>::init(arch.clone(), 3).into_params();
    let warm = local_train_plain(
        &init,
        &LocalContext {
            data: &data,
            partition: &partitions[0],
            arch: &arch,
            round: 1,
            seed: 3,
            epochs: 3,
            batch_size: 8,
            optimizer: SgdConfig::plain(0.1),
            collect_scores: false,
            collect_trace: false,
        },
    )?;

    // Score a different client — one holding enough samples to make the
    // table worth reading — with the warmed "global" model.
    let client = partitions[1..]
        .iter()
        .find(|p| p.indices.len() >= 12)
        .expect("some client holds at least 12 samples");
    let model = Model::from_params(arch, warm.params)?;
    let table = score_samples(&model, &data, &client.indices)?;

    println!("client {} score table (sorted by loss):", client.client_id);
    println!("  pos  sample   loss    uncertainty");
    for (pos, entry) in table.entries().iter().enumerate() {
        let marker = if pos == table.split_pos() { "  <- split point" } else { "" };
        println!(
            "  {pos:>3}  {:>6}  {:>6.3}  {:>6.3}{marker}",
            entry.sample, entry.loss, entry.uncertainty
        );
    }
    println!(
        "  unbiased: {} samples, biased: {} samples\n",
        table.unbiased().len(),
        table.biased().len()
    );

    let epochs = 5;
    println!("samples admitted per epoch (of {} total):", table.len());
    println!("  epoch  filter  linear  cosine");
    for e in 1..=epochs {
        let counts: Vec<usize> = [SelectionVariant::Filter, SelectionVariant::Linear, SelectionVariant::Cosine]
            .iter()
            .map(|&v| strategy_variant(&table, e, epochs, v).map(|s| s.indices.len()))
            .collect::<fedbss::Result<_>>()?;
        println!("  {e:>5}  {:>6}  {:>6}  {:>6}", counts[0], counts[1], counts[2]);
    }
    Ok(())
}
