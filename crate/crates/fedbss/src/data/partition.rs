//! Non-IID partitioning of a dataset across simulated clients.
//!
//! Two label-skew schemes:
//!
//! * **Dirichlet** — for every class, a proportion vector over clients is
//!   drawn from `Dir(α·1)` and the class's (shuffled) samples are split
//!   contiguously in those proportions. Small α concentrates each class on
//!   few clients; large α approaches a uniform split.
//! * **Shards** — samples are sorted by label, cut into `n_clients ·
//!   shards_per_client` contiguous shards, and each client receives
//!   `shards_per_client` shards at random. With few shards per client this
//!   is the extreme form of skew (a client sees at most that many labels).
//!
//! Both schemes always produce a true partition: client index sets are
//! pairwise disjoint, union to the full dataset, and each client holds at
//! least one sample. Client index lists are sorted ascending, which is the
//! canonical per-client sample order the trainers rely on.

use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;

use crate::data::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{stream, StreamKind};

/// How to split samples across clients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionScheme {
    /// Per-class proportions drawn from a symmetric Dirichlet.
    Dirichlet {
        /// Concentration parameter; must be positive. Smaller is more skewed.
        alpha: f64,
    },
    /// Label-sorted shards dealt out randomly.
    Shards {
        /// Shards per client; must be at least 1.
        per_client: usize,
    },
}

/// Full partitioning request: scheme, client count, and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSpec {
    /// The splitting scheme.
    pub scheme: PartitionScheme,
    /// Number of clients; must be at least 1.
    pub n_clients: usize,
    /// Seed for the partitioning randomness.
    pub seed: u64,
}

impl PartitionSpec {
    /// Dirichlet spec.
    pub fn dirichlet(n_clients: usize, alpha: f64, seed: u64) -> Self {
        PartitionSpec {
            scheme: PartitionScheme::Dirichlet { alpha },
            n_clients,
            seed,
        }
    }

    /// Shards spec.
    pub fn shards(n_clients: usize, per_client: usize, seed: u64) -> Self {
        PartitionSpec {
            scheme: PartitionScheme::Shards { per_client },
            n_clients,
            seed,
        }
    }

    /// Validates parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if self.n_clients == 0 {
            return Err(Error::Config("n_clients must be at least 1".into()));
        }
        match self.scheme {
            PartitionScheme::Dirichlet { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(Error::Config(format!(
                        "dirichlet_alpha must be positive and finite, got {alpha}"
                    )));
                }
            }
            PartitionScheme::Shards { per_client } => {
                if per_client == 0 {
                    return Err(Error::Config("shards_per_client must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// One client's slice of the dataset: sample indices into the parent,
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientPartition {
    /// Position of this client in the federation (0-based).
    pub client_id: usize,
    /// Indices into the parent dataset; unique and sorted ascending.
    pub indices: Vec<usize>,
}

/// Splits `dataset` according to `spec`, dispatching on the scheme.
pub fn partition(dataset: &Dataset, spec: &PartitionSpec) -> Result<Vec<ClientPartition>> {
    match spec.scheme {
        PartitionScheme::Dirichlet { .. } => partition_dirichlet(dataset, spec),
        PartitionScheme::Shards { .. } => partition_shards(dataset, spec),
    }
}

/// Checks the partition property: client index sets are pairwise disjoint
/// and union exactly to `0..dataset_len`.
pub fn verify_partition(dataset_len: usize, partitions: &[ClientPartition]) -> Result<()> {
    let mut seen = vec![false; dataset_len];
    let mut count = 0usize;
    for p in partitions {
        for &i in &p.indices {
            if i >= dataset_len {
                return Err(Error::PartitionInfeasible(format!(
                    "client {} refers to sample {i} beyond dataset of {dataset_len}",
                    p.client_id
                )));
            }
            if seen[i] {
                return Err(Error::PartitionInfeasible(format!(
                    "sample {i} is assigned to more than one client"
                )));
            }
            seen[i] = true;
            count += 1;
        }
    }
    if count != dataset_len {
        return Err(Error::PartitionInfeasible(format!(
            "{count} of {dataset_len} samples assigned"
        )));
    }
    Ok(())
}

/// Draws a proportion vector from `Dir(α·1_n)` via normalized Gamma draws.
///
/// If all Gamma draws underflow to zero (possible for very small α), the
/// entire mass is placed on one random client — the limiting behaviour of a
/// vanishing concentration parameter.
fn dirichlet_proportions(rng: &mut ChaCha8Rng, alpha: f64, n: usize) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha validated positive");
    let mut draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = draws.iter().sum();
    if sum <= f64::MIN_POSITIVE {
        let lucky = rng.random_range(0..n);
        draws.iter_mut().for_each(|v| *v = 0.0);
        draws[lucky] = 1.0;
        return draws;
    }
    draws.iter_mut().for_each(|v| *v /= sum);
    draws
}

/// Splits `total` items in the given proportions using the largest-remainder
/// method: each part gets `floor(p_i · total)`, and the leftover units go to
/// the parts with the largest fractional remainders (ties to the lower
/// index).
fn largest_remainder(proportions: &[f64], total: usize) -> Vec<usize> {
    let mut counts = Vec::with_capacity(proportions.len());
    let mut fracs = Vec::with_capacity(proportions.len());
    let mut assigned = 0usize;
    for (i, &p) in proportions.iter().enumerate() {
        let raw = p * total as f64;
        let base = raw.floor() as usize;
        counts.push(base);
        fracs.push((raw - base as f64, i));
        assigned += base;
    }
    let mut residue = total.saturating_sub(assigned);
    fracs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite fractions").then(a.1.cmp(&b.1)));
    for &(_, i) in &fracs {
        if residue == 0 {
            break;
        }
        counts[i] += 1;
        residue -= 1;
    }
    counts
}

/// Dirichlet label-skew partitioning. See the module docs for the scheme.
///
/// Guarantees every client at least one sample: proportions are re-sampled
/// up to 100 times, after which single samples are moved from the largest
/// client to each remaining empty one.
pub fn partition_dirichlet(dataset: &Dataset, spec: &PartitionSpec) -> Result<Vec<ClientPartition>> {
    spec.validate()?;
    let alpha = match spec.scheme {
        PartitionScheme::Dirichlet { alpha } => alpha,
        PartitionScheme::Shards { .. } => {
            return Err(Error::Config("partition_dirichlet called with a shards spec".into()));
        }
    };
    let n = spec.n_clients;
    if dataset.len() < n {
        return Err(Error::PartitionInfeasible(format!(
            "{} samples cannot cover {n} clients",
            dataset.len()
        )));
    }

    // Per-class index pools in ascending order.
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.num_classes()];
    for (i, &label) in dataset.labels().iter().enumerate() {
        by_class[label].push(i);
    }

    let mut rng = stream(spec.seed, StreamKind::Partition, &[]);
    const MAX_ATTEMPTS: usize = 100;
    let mut lists: Vec<Vec<usize>> = Vec::new();
    for _attempt in 0..MAX_ATTEMPTS {
        lists = vec![Vec::new(); n];
        for pool in &by_class {
            if pool.is_empty() {
                continue;
            }
            let mut shuffled = pool.clone();
            shuffled.shuffle(&mut rng);
            let proportions = dirichlet_proportions(&mut rng, alpha, n);
            let counts = largest_remainder(&proportions, shuffled.len());
            let mut offset = 0;
            for (client, &count) in counts.iter().enumerate() {
                lists[client].extend_from_slice(&shuffled[offset..offset + count]);
                offset += count;
            }
        }
        if lists.iter().all(|l| !l.is_empty()) {
            break;
        }
    }

    // Deterministic fix-up for pathological draws: donate one sample from
    // the currently largest client to each empty one.
    while let Some(empty) = lists.iter().position(|l| l.is_empty()) {
        let largest = lists
            .iter()
            .enumerate()
            .max_by(|(ai, a), (bi, b)| a.len().cmp(&b.len()).then(bi.cmp(ai)))
            .map(|(i, _)| i)
            .expect("at least one client");
        let moved = lists[largest].pop().expect("largest client is non-empty");
        lists[empty].push(moved);
    }

    Ok(finish(lists))
}

/// Shards partitioning. See the module docs for the scheme.
pub fn partition_shards(dataset: &Dataset, spec: &PartitionSpec) -> Result<Vec<ClientPartition>> {
    spec.validate()?;
    let per_client = match spec.scheme {
        PartitionScheme::Shards { per_client } => per_client,
        PartitionScheme::Dirichlet { .. } => {
            return Err(Error::Config("partition_shards called with a dirichlet spec".into()));
        }
    };
    let n = spec.n_clients;
    let shards_total = n * per_client;
    let shard_size = dataset.len() / shards_total;
    if shard_size == 0 {
        return Err(Error::PartitionInfeasible(format!(
            "{} samples cannot fill {n} clients x {per_client} shards",
            dataset.len()
        )));
    }

    // Stable sort keeps equal labels in ascending index order.
    let mut sorted: Vec<usize> = (0..dataset.len()).collect();
    sorted.sort_by_key(|&i| dataset.label(i));

    let mut order: Vec<usize> = (0..shards_total).collect();
    let mut rng = stream(spec.seed, StreamKind::Partition, &[]);
    order.shuffle(&mut rng);

    let shard_range = |shard: usize| -> std::ops::Range<usize> {
        let start = shard * shard_size;
        // The division remainder rides along in the final shard.
        let end = if shard + 1 == shards_total {
            dataset.len()
        } else {
            start + shard_size
        };
        start..end
    };

    let lists = (0..n)
        .map(|client| {
            order[client * per_client..(client + 1) * per_client]
                .iter()
                .flat_map(|&shard| sorted[shard_range(shard)].iter().copied())
                .collect()
        })
        .collect();
    Ok(finish(lists))
}

fn finish(lists: Vec<Vec<usize>>) -> Vec<ClientPartition> {
    lists
        .into_iter()
        .enumerate()
        .map(|(client_id, mut indices)| {
            indices.sort_unstable();
            ClientPartition { client_id, indices }
        })
        .collect()
}
