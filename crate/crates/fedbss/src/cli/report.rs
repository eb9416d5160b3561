//! Final-accuracy summaries: per-seed and pooled statistics, plus the
//! aligned comparison table.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::federation::{summarize, RoundReport};
use crate::util::mean_and_sample_std;

/// Last-rounds accuracy statistics for one seed's run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedStats {
    /// The run's seed.
    pub seed: u64,
    /// Rounds the run executed.
    pub rounds: usize,
    /// Final rounds the statistics cover.
    pub window: usize,
    /// True when the run was shorter than the usual 10-round window.
    pub partial_window: bool,
    /// Mean test accuracy over the window.
    pub mean: f64,
    /// Sample standard deviation (N−1) over the window.
    pub std: f64,
}

/// One experiment's statistics across all of its seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    /// Label identifying the experiment (config name).
    pub name: String,
    /// Algorithm the experiment ran.
    pub algorithm: String,
    /// Per-seed statistics, in config order.
    pub seeds: Vec<SeedStats>,
    /// Mean of the per-seed means.
    pub pooled_mean: f64,
    /// Sample standard deviation of the per-seed means; zero for a single
    /// seed.
    pub pooled_std: f64,
}

/// Computes per-seed and pooled statistics for one experiment.
///
/// Each history is the full round-report list of one seed's run. A history
/// shorter than 10 rounds is summarized over all of its rounds and flagged
/// via [`SeedStats::partial_window`]; an empty history is an error.
pub fn experiment_summary(
    name: &str,
    algorithm: &str,
    histories: &[(u64, Vec<RoundReport>)],
) -> Result<ExperimentSummary> {
    if histories.is_empty() {
        return Err(Error::Report(format!("{name}: no histories to summarize")));
    }
    let mut seeds = Vec::with_capacity(histories.len());
    for (seed, reports) in histories {
        if reports.is_empty() {
            return Err(Error::Report(format!("{name}: seed {seed} has an empty history")));
        }
        let s = summarize(reports);
        seeds.push(SeedStats {
            seed: *seed,
            rounds: s.rounds,
            window: s.window,
            partial_window: s.window < 10,
            mean: s.mean_last_accuracy,
            std: s.std_last_accuracy,
        });
    }
    let means: Vec<f64> = seeds.iter().map(|s| s.mean).collect();
    let (pooled_mean, pooled_std) = mean_and_sample_std(&means);
    Ok(ExperimentSummary {
        name: name.to_string(),
        algorithm: algorithm.to_string(),
        seeds,
        pooled_mean,
        pooled_std,
    })
}

/// Writes one experiment's summary as pretty JSON.
pub fn emit_report(path: &Path, summary: &ExperimentSummary) -> Result<()> {
    let json = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::Report(e.to_string()))?;
    fs::write(path, json + "\n")?;
    Ok(())
}

/// Renders experiment summaries as an aligned text table:
/// one row per experiment, accuracy as `mean ± std` over seeds.
pub fn render_table(summaries: &[ExperimentSummary]) -> String {
    let mut rows = vec![(
        "experiment".to_string(),
        "algorithm".to_string(),
        "seeds".to_string(),
        "last-10 accuracy".to_string(),
    )];
    for s in summaries {
        rows.push((
            s.name.clone(),
            s.algorithm.clone(),
            s.seeds.len().to_string(),
            format!("{:.4} ± {:.4}", s.pooled_mean, s.pooled_std),
        ));
    }
    let width = |f: fn(&(String, String, String, String)) -> &String| {
        rows.iter().map(|r| f(r).len()).max().unwrap_or(0)
    };
    let (w0, w1, w2) = (width(|r| &r.0), width(|r| &r.1), width(|r| &r.2));
    let mut out = String::new();
    for (i, (name, algo, seeds, acc)) in rows.iter().enumerate() {
        out.push_str(&format!("{name:<w0$}  {algo:<w1$}  {seeds:>w2$}  {acc}\n"));
        if i == 0 {
            let dashes = |w: usize| "-".repeat(w);
            out.push_str(&format!(
                "{}  {}  {}  {}\n",
                dashes(w0),
                dashes(w1),
                dashes(w2),
                dashes(rows[0].3.len())
            ));
        }
    }
    out
}
