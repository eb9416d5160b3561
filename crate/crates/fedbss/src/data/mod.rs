//! Datasets: loading, synthesis, Non-IID partitioning, and label noise.
//!
//! The [`Dataset`] type is immutable and index-addressed; partitions and
//! training-set selections refer to it by sample index instead of copying.
//! Sources are IDX file pairs ([`load_idx`]) or a seeded synthetic Gaussian
//! mixture ([`gaussian_mixture`]). Partitioning supports the two standard
//! label-skew schemes (Dirichlet and shards), and [`inject_label_noise`]
//! produces symmetrically corrupted copies for noisy-label experiments.

pub mod dataset;
pub mod idx;
pub mod noise;
pub mod partition;
pub mod synth;

pub use dataset::Dataset;
pub use idx::load_idx;
pub use noise::inject_label_noise;
pub use partition::{
    partition, partition_dirichlet, partition_shards, verify_partition, ClientPartition,
    PartitionScheme, PartitionSpec,
};
pub use synth::{gaussian_mixture, gaussian_mixture_split};
