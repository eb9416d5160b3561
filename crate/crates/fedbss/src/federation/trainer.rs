//! Local client trainers: plain SGD, proximal SGD, and bias-aware selection.
//!
//! All three trainers share one epoch runner: copy the broadcast global
//! parameters, then per epoch pick a sample list, shuffle it with the
//! client's own seed stream, and take mini-batch SGD steps. They differ only
//! in how the per-epoch list is chosen (all samples vs. the progressive
//! selection) and whether a proximal pull toward the global parameters is
//! added to each gradient.
//!
//! Two bit-exactness guarantees matter downstream and shape the code:
//!
//! * Selection that admits *every* sample builds the same index list in the
//!   same (canonical partition) order as the plain trainer, so the shuffled
//!   batches — and therefore the arithmetic — are identical.
//! * A proximal coefficient of exactly zero skips the penalty term entirely
//!   instead of adding a zero vector, keeping the instruction stream
//!   identical to plain training.

use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::data::{ClientPartition, Dataset};
use crate::error::{Error, Result};
use crate::nn::{Architecture, Model, OptimizerState, ParamVector, SgdConfig};
use crate::rng::{stream, StreamKind};
use crate::selection::{score_samples, strategy_variant, SampleScoreTable, SelectionVariant};

/// Everything a local trainer needs besides the global parameters.
///
/// Borrowed, not owned: many clients train in parallel against the same
/// dataset and architecture.
#[derive(Debug, Clone, Copy)]
pub struct LocalContext<'a> {
    /// The full training dataset (clients read only their own indices).
    pub data: &'a Dataset,
    /// This client's partition; `indices` is the canonical sample order.
    pub partition: &'a ClientPartition,
    /// Network architecture shared by all parties.
    pub arch: &'a Architecture,
    /// Current federation round (1-based); keys the shuffle streams.
    pub round: usize,
    /// Master experiment seed.
    pub seed: u64,
    /// Local epochs to run.
    pub epochs: usize,
    /// Mini-batch size.
    pub batch_size: usize,
    /// Optimizer hyper-parameters (state is created fresh per call).
    pub optimizer: SgdConfig<f32>,
    /// When true, the FedBSS trainer returns its score table.
    pub collect_scores: bool,
    /// When true, the trainer returns each epoch's sample order.
    pub collect_trace: bool,
}

impl LocalContext<'_> {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("local training needs at least 1 epoch".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.partition.indices.is_empty() {
            return Err(Error::Config(format!(
                "client {} has no samples",
                self.partition.client_id
            )));
        }
        self.optimizer.validate()
    }
}

/// Sizes of the frozen biased/unbiased split for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSummary {
    /// Samples at or below the classification point.
    pub unbiased: usize,
    /// All samples the client holds.
    pub total: usize,
}

impl SplitSummary {
    /// Fraction of the client's samples classified as unbiased.
    pub fn unbiased_fraction(&self) -> f64 {
        self.unbiased as f64 / self.total as f64
    }
}

/// Result of one client's local training for one round.
#[derive(Debug, Clone)]
pub struct LocalOutcome {
    /// Final local parameters after all epochs.
    pub params: ParamVector<f32>,
    /// Mean per-sample training loss across every step this round.
    pub mean_loss: f64,
    /// Mean per-sample training loss per epoch, in epoch order.
    pub epoch_losses: Vec<f64>,
    /// Number of samples the client holds.
    pub samples: usize,
    /// The biased/unbiased split, when the trainer computed one.
    pub split: Option<SplitSummary>,
    /// The round's score table, when requested via `collect_scores`.
    pub scores: Option<SampleScoreTable>,
    /// Per-epoch sample order actually trained on, when requested via
    /// `collect_trace`.
    pub epoch_trace: Option<Vec<Vec<usize>>>,
}

/// Runs the shared epoch loop. `select` returns the epoch's sample list in
/// canonical partition order; `prox` optionally adds `mu * (local - global)`
/// to each gradient.
fn run_epochs(
    model: &mut Model<f32>,
    ctx: &LocalContext,
    mut select: impl FnMut(usize) -> Result<Vec<usize>>,
    prox: Option<(f32, &ParamVector<f32>)>,
) -> Result<(f64, Vec<f64>, Option<Vec<Vec<usize>>>)> {
    let mut opt = OptimizerState::new(model.params(), ctx.optimizer)?;
    let mut loss_sum = 0.0f64;
    let mut loss_count = 0usize;
    let mut epoch_losses = Vec::with_capacity(ctx.epochs);
    let mut trace = ctx.collect_trace.then(Vec::new);

    for epoch in 1..=ctx.epochs {
        let mut selected = select(epoch)?;
        if selected.is_empty() {
            return Err(Error::Config(format!(
                "client {} selected no samples for epoch {epoch}",
                ctx.partition.client_id
            )));
        }
        let mut rng = stream(
            ctx.seed,
            StreamKind::Shuffle,
            &[ctx.round as u64, ctx.partition.client_id as u64, epoch as u64],
        );
        selected.shuffle(&mut rng);
        if let Some(t) = trace.as_mut() {
            t.push(selected.clone());
        }

        let mut epoch_sum = 0.0f64;
        for batch_ids in selected.chunks(ctx.batch_size) {
            let (batch, labels) = ctx.data.gather(batch_ids);
            let backprop = model.backward(&batch, &labels)?;
            let mut grad = backprop.grad;
            if let Some((mu, global)) = prox {
                grad.add_scaled_diff(mu, model.params(), global)?;
            }
            opt.step(model.params_mut(), &grad)?;
            epoch_sum += backprop.mean_loss * batch_ids.len() as f64;
        }
        epoch_losses.push(epoch_sum / selected.len() as f64);
        loss_sum += epoch_sum;
        loss_count += selected.len();
    }
    Ok((loss_sum / loss_count as f64, epoch_losses, trace))
}

/// Plain local SGD over all client samples, every epoch.
pub fn local_train_plain(global: &ParamVector<f32>, ctx: &LocalContext) -> Result<LocalOutcome> {
    ctx.validate()?;
    let mut model = Model::from_params(ctx.arch.clone(), global.clone())?;
    let (mean_loss, epoch_losses, epoch_trace) =
        run_epochs(&mut model, ctx, |_| Ok(ctx.partition.indices.clone()), None)?;
    Ok(LocalOutcome {
        params: model.into_params(),
        mean_loss,
        epoch_losses,
        samples: ctx.partition.indices.len(),
        split: None,
        scores: None,
        epoch_trace,
    })
}

/// Plain local SGD plus the proximal gradient term `mu * (local - global)`.
///
/// With `mu == 0` this is exactly [`local_train_plain`], bit for bit: the
/// penalty branch is skipped rather than evaluated with a zero coefficient.
pub fn local_train_fedprox(
    global: &ParamVector<f32>,
    mu: f64,
    ctx: &LocalContext,
) -> Result<LocalOutcome> {
    ctx.validate()?;
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::Config(format!(
            "fedprox mu must be non-negative and finite, got {mu}"
        )));
    }
    let mut model = Model::from_params(ctx.arch.clone(), global.clone())?;
    let prox = (mu != 0.0).then_some((mu as f32, global));
    let (mean_loss, epoch_losses, epoch_trace) =
        run_epochs(&mut model, ctx, |_| Ok(ctx.partition.indices.clone()), prox)?;
    Ok(LocalOutcome {
        params: model.into_params(),
        mean_loss,
        epoch_losses,
        samples: ctx.partition.indices.len(),
        split: None,
        scores: None,
        epoch_trace,
    })
}

/// Bias-aware local training: score once with the received global model,
/// then train each epoch on the progressively grown selection.
///
/// The epoch's selected set is materialized by filtering the client's
/// canonical index list by membership, so an epoch that admits every sample
/// trains on exactly the list the plain trainer would use — same order, same
/// shuffle, same arithmetic.
pub fn local_train_fedbss(
    global: &ParamVector<f32>,
    variant: SelectionVariant,
    ctx: &LocalContext,
) -> Result<LocalOutcome> {
    ctx.validate()?;
    let mut model = Model::from_params(ctx.arch.clone(), global.clone())?;
    let table = score_samples(&model, ctx.data, &ctx.partition.indices)?;
    let split = SplitSummary {
        unbiased: table.unbiased().len(),
        total: table.len(),
    };

    let epochs = ctx.epochs;
    let (mean_loss, epoch_losses, epoch_trace) = run_epochs(
        &mut model,
        ctx,
        |epoch| {
            let set = strategy_variant(&table, epoch, epochs, variant)?;
            let members: HashSet<usize> = set.indices.into_iter().collect();
            Ok(ctx
                .partition
                .indices
                .iter()
                .copied()
                .filter(|i| members.contains(i))
                .collect())
        },
        None,
    )?;
    Ok(LocalOutcome {
        params: model.into_params(),
        mean_loss,
        epoch_losses,
        samples: ctx.partition.indices.len(),
        split: Some(split),
        scores: ctx.collect_scores.then_some(table),
        epoch_trace,
    })
}
