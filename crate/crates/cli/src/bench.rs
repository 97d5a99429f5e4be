//! Side-by-side timing of the two engines on one input.

use std::fmt;

use psls::{dice, lbf_run, run, ContourSpec, LbfParams, Params, RunResult, ScalarField};

use crate::error::CliResult;

pub const PLATFORM_NOTE: &str = "note: absolute seconds depend on hardware and platform; \
only the ordering and ratio of the two methods are meaningful";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodStats {
    pub iterations: usize,
    /// Sum over iterations of the fastest time seen for that iteration
    /// across repeats.
    pub total_seconds: f64,
    /// Fastest single run, end to end.
    pub best_run_seconds: f64,
    pub seconds_per_iteration: f64,
    pub total_convolutions: u64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub ours: MethodStats,
    pub lbf: MethodStats,
    /// Dice between the two final masks.
    pub agreement: f64,
    pub repeats: usize,
    pub ours_result: RunResult,
    pub lbf_result: RunResult,
}

impl BenchReport {
    /// `lbf / ours` total time.
    pub fn time_ratio(&self) -> f64 {
        self.lbf.total_seconds / self.ours.total_seconds
    }
}

/// Per-iteration step times (ms) of repeated identical runs.
#[derive(Debug, Default)]
struct Timings {
    per_iter: Vec<f64>,
    best_run: f64,
}

impl Timings {
    fn add(&mut self, r: &RunResult) {
        if self.per_iter.is_empty() {
            self.per_iter = r.metrics.iter().map(|m| m.wall_ms).collect();
            self.best_run = r.total_seconds;
            return;
        }
        for (t, m) in self.per_iter.iter_mut().zip(&r.metrics) {
            *t = t.min(m.wall_ms);
        }
        self.best_run = self.best_run.min(r.total_seconds);
    }

    fn stats(&self, r: &RunResult) -> MethodStats {
        let total = self.per_iter.iter().sum::<f64>() / 1e3;
        MethodStats {
            iterations: r.iterations,
            total_seconds: total,
            best_run_seconds: self.best_run,
            seconds_per_iteration: if r.iterations == 0 {
                0.0
            } else {
                total / r.iterations as f64
            },
            total_convolutions: r.total_convolutions,
        }
    }
}

/// Runs both methods `repeats` times, alternating. Runs are deterministic,
/// so only timings differ between repeats; each iteration is charged the
/// fastest time it took in any repeat, which filters out scheduler noise
/// while keeping real per-iteration variation.
pub fn benchmark(
    image: &ScalarField,
    spec: &ContourSpec,
    params: &Params,
    lp: &LbfParams,
    repeats: usize,
) -> CliResult<BenchReport> {
    let repeats = repeats.max(1);
    let (mut t_ours, mut t_lbf) = (Timings::default(), Timings::default());
    let mut ours = run(image, spec, params)?;
    t_ours.add(&ours);
    let mut lbf = lbf_run(image, spec, params, lp)?;
    t_lbf.add(&lbf);
    for _ in 1..repeats {
        ours = run(image, spec, params)?;
        t_ours.add(&ours);
        lbf = lbf_run(image, spec, params, lp)?;
        t_lbf.add(&lbf);
    }
    Ok(BenchReport {
        ours: t_ours.stats(&ours),
        lbf: t_lbf.stats(&lbf),
        agreement: dice(&ours.mask, &lbf.mask)?,
        repeats,
        ours_result: ours,
        lbf_result: lbf,
    })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<6} {:>10} {:>10} {:>10} {:>12} {:>13}",
            "method", "iterations", "total_s", "best_run_s", "s_per_iter", "convolutions"
        )?;
        for (name, s) in [("ours", &self.ours), ("lbf", &self.lbf)] {
            writeln!(
                f,
                "{:<6} {:>10} {:>10.4} {:>10.4} {:>12.3e} {:>13}",
                name,
                s.iterations,
                s.total_seconds,
                s.best_run_seconds,
                s.seconds_per_iteration,
                s.total_convolutions
            )?;
        }
        writeln!(f, "time ratio lbf/ours: {:.3}", self.time_ratio())?;
        writeln!(f, "dice(ours, lbf): {:.4}", self.agreement)?;
        writeln!(
            f,
            "{} alternating runs per method; total_s charges each iteration its fastest time",
            self.repeats
        )?;
        write!(f, "{PLATFORM_NOTE}")
    }
}
