use rayon::prelude::*;

use super::estimators::Estimator;
use super::rng::SeededRng;
use super::sampling::sample_counts;
use crate::error::{Error, Result};
use crate::estimation::{ancilla_qfi_closed, qcrb_variance, single_probe_qfi_closed};
use crate::strategies::{closed_form_distribution, StrategyConfig};

/// Repeated-acquisition phase estimation at one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub strategy: StrategyConfig,
    /// Events per acquisition.
    pub events_per_rep: u64,
    pub repetitions: usize,
    pub seed: u64,
    pub estimator: Estimator,
}

impl ExperimentConfig {
    pub const DEFAULT_EVENTS: u64 = 2000;
    pub const DEFAULT_REPETITIONS: usize = 50;
    pub const DEFAULT_SEED: u64 = 42;

    /// 50 acquisitions of 2000 events, inversion estimator.
    pub fn new(strategy: StrategyConfig) -> Self {
        Self {
            strategy,
            events_per_rep: Self::DEFAULT_EVENTS,
            repetitions: Self::DEFAULT_REPETITIONS,
            seed: Self::DEFAULT_SEED,
            estimator: Estimator::Inversion,
        }
    }

    pub fn with_events(self, events_per_rep: u64) -> Self {
        Self {
            events_per_rep,
            ..self
        }
    }

    pub fn with_repetitions(self, repetitions: usize) -> Self {
        Self {
            repetitions,
            ..self
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_estimator(self, estimator: Estimator) -> Self {
        Self { estimator, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.events_per_rep < 1 {
            return Err(Error::Invalid {
                what: "events per repetition",
                reason: "must be at least 1".into(),
            });
        }
        if self.repetitions < 2 {
            return Err(Error::Invalid {
                what: "repetitions",
                reason: format!(
                    "{} < 2; a sample variance needs two estimates",
                    self.repetitions
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// One phase estimate per repetition, in repetition order.
    pub estimates: Vec<f64>,
    /// Unbiased (n - 1) sample variance of the estimates, rad².
    pub sample_variance: f64,
    pub sd: f64,
    pub mean_events: f64,
    /// `sample_variance × events_per_rep`; compare with `1/F`.
    pub normalized_variance: f64,
    /// `1/(N F)` with the closed-form QFI of the strategy, rad².
    pub qcrb_reference: f64,
}

impl ExperimentResult {
    pub fn mean_estimate(&self) -> f64 {
        self.estimates.iter().sum::<f64>() / self.estimates.len() as f64
    }

    /// Approximate standard error of `sd`, `sd / sqrt(2(n - 1))`.
    pub fn sd_stderr(&self) -> f64 {
        self.sd / (2.0 * (self.estimates.len() as f64 - 1.0)).sqrt()
    }
}

/// Unbiased sample variance; summation runs in slice order.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_at(cfg, 0)
}

/// Runs `cfg` using the RNG streams of sweep point `point`.
///
/// Every repetition has its own stream derived from `(seed, point, rep)`, and
/// results are collected in repetition order, so the output does not depend
/// on the number of worker threads.
pub fn run_experiment_at(cfg: &ExperimentConfig, point: u64) -> Result<ExperimentResult> {
    cfg.validate()?;
    let qcrb_reference = qcrb_variance(cfg.strategy.qfi()?, cfg.events_per_rep)?;
    let dist = closed_form_distribution(&cfg.strategy)?;

    let estimates = (0..cfg.repetitions as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = SeededRng::for_task(cfg.seed, point, rep);
            let counts = sample_counts(&dist, cfg.events_per_rep, &mut rng);
            cfg.estimator.estimate(&counts, &cfg.strategy)
        })
        .collect::<Result<Vec<f64>>>()?;

    let variance = sample_variance(&estimates);
    Ok(ExperimentResult {
        estimates,
        sample_variance: variance,
        sd: variance.sqrt(),
        mean_events: cfg.events_per_rep as f64,
        normalized_variance: variance * cfg.events_per_rep as f64,
        qcrb_reference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub sd_single_theory: f64,
    pub sd_ancilla_theory: f64,
    /// Simulated SD of the base configuration's strategy.
    pub sd_simulated: f64,
    pub sd_sim_stderr: f64,
    /// Simulated single-probe SD and its standard error, when requested.
    pub single_simulated: Option<(f64, f64)>,
}

/// Theory and simulated phase SD as a function of the damping rate.
///
/// Point `i` of the simulated strategy uses RNG streams `(seed, i, ·)`; the
/// optional single-probe runs use `(seed, etas.len() + i, ·)`.
pub fn sweep_noise(
    etas: &[f64],
    base: &ExperimentConfig,
    include_single_probe: bool,
) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let n = base.events_per_rep;
    let offset = etas.len() as u64;
    etas.par_iter()
        .enumerate()
        .map(|(i, &eta)| {
            let strategy = base.strategy.with_eta(eta)?;
            let sd_single_theory = qcrb_variance(single_probe_qfi_closed(eta)?, n)?.sqrt();
            let sd_ancilla_theory =
                qcrb_variance(ancilla_qfi_closed(eta, base.strategy.v)?, n)?.sqrt();
            let sim = run_experiment_at(&ExperimentConfig { strategy, ..*base }, i as u64)?;
            let single_simulated = if include_single_probe {
                let single = StrategyConfig::single_probe(eta, base.strategy.phi)?;
                let r = run_experiment_at(
                    &ExperimentConfig {
                        strategy: single,
                        ..*base
                    },
                    offset + i as u64,
                )?;
                Some((r.sd, r.sd_stderr()))
            } else {
                None
            };
            Ok(SweepRow {
                eta,
                sd_single_theory,
                sd_ancilla_theory,
                sd_simulated: sim.sd,
                sd_sim_stderr: sim.sd_stderr(),
                single_simulated,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub events: u64,
    pub normalized_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    /// `1/F`, the asymptotic value of the normalized variance.
    pub target: f64,
    pub points: Vec<ConvergencePoint>,
}

impl ConvergenceStudy {
    /// Smallest grid value from which every normalized variance is within
    /// `rel_tol` of the target.
    pub fn asymptotic_from(&self, rel_tol: f64) -> Option<u64> {
        let mut from = None;
        for p in self.points.iter().rev() {
            if ((p.normalized_variance - self.target) / self.target).abs() <= rel_tol {
                from = Some(p.events);
            } else {
                break;
            }
        }
        from
    }
}

/// Normalized variance against the number of events per acquisition.
pub fn convergence_study(cfg: &ExperimentConfig, event_grid: &[u64]) -> Result<ConvergenceStudy> {
    if event_grid.is_empty() || event_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid {
            what: "event grid",
            reason: "must be non-empty and strictly ascending".into(),
        });
    }
    let target = 1.0 / nonzero_qfi(&cfg.strategy)?;
    let points = event_grid
        .par_iter()
        .enumerate()
        .map(|(i, &events)| {
            let r = run_experiment_at(&cfg.with_events(events), i as u64)?;
            Ok(ConvergencePoint {
                events,
                normalized_variance: r.normalized_variance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceStudy { target, points })
}

fn nonzero_qfi(strategy: &StrategyConfig) -> Result<f64> {
    let f = strategy.qfi()?.value();
    if f > 0.0 {
        Ok(f)
    } else {
        Err(Error::UnboundedVariance)
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<R, F>(threads: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Invalid {
            what: "thread pool",
            reason: e.to_string(),
        })?;
    Ok(pool.install(f))
}
