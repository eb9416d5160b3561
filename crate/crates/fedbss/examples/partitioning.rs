//! How the two partition schemes shape per-client label distributions.
//!
//! Dirichlet partitioning draws per-class client proportions from
//! Dir(alpha): small alpha concentrates each class on few clients, large
//! alpha approaches a uniform split. Shards partitioning sorts by label and
//! deals out contiguous shards — the classic extreme-skew setup.
//!
//! ```text
//! cargo run --example partitioning
//! ```

use fedbss::data::{gaussian_mixture, partition, ClientPartition, Dataset, PartitionSpec};

fn print_histograms(title: &str, data: &Dataset, partitions: &[ClientPartition]) {
    println!("{title}");
    for part in partitions {
        let hist = data.label_histogram(&part.indices);
        let cells: Vec<String> = hist.iter().map(|c| format!("{c:>4}")).collect();
        println!("  client {}: [{}]  ({} samples)", part.client_id, cells.join(" "), part.indices.len());
    }
    println!();
}

fn main() -> fedbss::Result<()> {
    // 6 classes, 120 samples each; features don't matter here.
    let data = gaussian_mixture(6, 120, 4, 0.5, 7)?;

    for alpha in [0.1, 1.0, 100.0] {
        let spec = PartitionSpec::dirichlet(6, alpha, 7);
        let partitions = partition(&data, &spec)?;
        print_histograms(&format!("dirichlet alpha={alpha} (columns = classes 0..5)"), &data, &partitions);
    }

    let spec = PartitionSpec::shards(6, 2, 7);
    let partitions = partition(&data, &spec)?;
    print_histograms("shards, 2 per client (each client sees at most 2 labels)", &data, &partitions);

    Ok(())
}
