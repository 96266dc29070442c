//! Parallel trajectory simulation and statistical estimators.
//!
//! Trials are independent: trial i draws from the stream (master_seed, i),
//! so results are bit-identical for any thread count. With the `parallel`
//! feature (default) trials run on the rayon pool; without it the same
//! code runs sequentially. Per-trial outputs are collected in trial order
//! and reduced sequentially, keeping floating-point sums reproducible.

use crate::error::{Error, Result};
use crate::exact::ode_solution_end;
use crate::models::{
    run, run_pair_counts, run_symbol_counts, run_symbol_counts_observed, run_word, ModelSpec,
    RngStream, Rule,
};
use crate::word::SymbolCounts;

/// Largest horizon for which plug-in entropy estimation is accepted
/// without an explicit override (the support grows like 2^horizon).
pub const PLUGIN_HORIZON_GUIDELINE: usize = 16;

/// What each trial records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecordMode {
    /// Materialize the final word.
    FinalWord,
    /// Track only symbol / cyclic-pair counters (O(1) memory per step).
    #[default]
    RunningCounts,
    /// Materialize the word and keep the full step log.
    FullHistory,
}

/// Trial count, horizon, and RNG seed for a batch of simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: usize,
    pub horizon: usize,
    pub master_seed: u64,
    pub record_mode: RecordMode,
}

impl SimConfig {
    pub fn new(trials: usize, horizon: usize, master_seed: u64) -> Result<Self> {
        if trials < 1 {
            return Err(Error::Domain {
                argument: "trials",
                value: trials as f64,
                domain: "integers >= 1",
            });
        }
        if horizon < 1 {
            return Err(Error::Domain {
                argument: "horizon",
                value: horizon as f64,
                domain: "integers >= 1",
            });
        }
        Ok(SimConfig {
            trials,
            horizon,
            master_seed,
            record_mode: RecordMode::default(),
        })
    }

    pub fn with_record_mode(mut self, mode: RecordMode) -> Self {
        self.record_mode = mode;
        self
    }
}

/// Sample mean with its across-trial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub mean: f64,
    pub standard_error: f64,
    pub trials: usize,
}

impl EstimateResult {
    /// Mean and standard error of a sample; trials = 1 reports error 0.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let standard_error = if n > 1 {
            let var =
                samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        EstimateResult {
            mean,
            standard_error,
            trials: n,
        }
    }
}

/// Maps trial indices through `f`, in parallel when the `parallel`
/// feature is on. Output order is always trial order.
fn map_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials as u64).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials as u64).map(f).collect()
    }
}

/// Zero-frequency of the final word, one value per trial.
pub fn sample_symbol_freqs(spec: &ModelSpec, config: &SimConfig) -> Result<Vec<f64>> {
    let spec = spec.clone();
    let horizon = config.horizon;
    let mode = config.record_mode;
    let master = config.master_seed;
    Ok(map_trials(config.trials, move |trial| {
        let mut rng = RngStream::new(master, trial);
        match mode {
            RecordMode::RunningCounts => {
                run_symbol_counts(&spec, horizon, &mut rng).freq_zero()
            }
            RecordMode::FinalWord => run_word(&spec, horizon, &mut rng)
                .expect("seed is nonempty")
                .freq(false)
                .expect("word is nonempty"),
            RecordMode::FullHistory => {
                let (word, _history) = run(&spec, horizon, &mut rng).expect("seed is nonempty");
                word.freq(false).expect("word is nonempty")
            }
        }
    }))
}

/// Mean zero-frequency at the horizon, with standard error; the target of
/// the almost-sure limit delta1/(delta0+delta1) under noisy end or
/// interspersed duplication.
pub fn estimate_symbol_freq(spec: &ModelSpec, config: &SimConfig) -> Result<EstimateResult> {
    Ok(EstimateResult::from_samples(&sample_symbol_freqs(
        spec, config,
    )?))
}

/// Cyclic pair frequencies (00, 01, 10, 11) of the final word, one vector
/// per trial. Tandem rule only.
pub fn sample_pair_freqs(spec: &ModelSpec, config: &SimConfig) -> Result<Vec<[f64; 4]>> {
    if spec.rule != Rule::Tandem {
        return Err(Error::RuleMismatch {
            expected: Rule::Tandem,
            got: spec.rule,
        });
    }
    if spec.noise.is_degenerate() {
        return Err(Error::DegenerateNoise);
    }
    let spec = spec.clone();
    let horizon = config.horizon;
    let mode = config.record_mode;
    let master = config.master_seed;
    Ok(map_trials(config.trials, move |trial| {
        let mut rng = RngStream::new(master, trial);
        match mode {
            RecordMode::RunningCounts => run_pair_counts(&spec, horizon, &mut rng)
                .expect("rule checked above")
                .freqs(),
            RecordMode::FinalWord | RecordMode::FullHistory => {
                let word = run_word(&spec, horizon, &mut rng).expect("seed is nonempty");
                crate::word::PairCounts::of(&word)
                    .expect("word is nonempty")
                    .freqs()
            }
        }
    }))
}

/// Mean cyclic pair frequencies at the horizon, with standard errors; the
/// targets are the limiting pair frequencies of noisy tandem duplication.
pub fn estimate_pair_freqs(spec: &ModelSpec, config: &SimConfig) -> Result<[EstimateResult; 4]> {
    let samples = sample_pair_freqs(spec, config)?;
    Ok(std::array::from_fn(|i| {
        let component: Vec<f64> = samples.iter().map(|s| s[i]).collect();
        EstimateResult::from_samples(&component)
    }))
}

/// Plug-in entropy of the pooled empirical distribution of the final word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluginEntropy {
    pub bits: f64,
    pub trials: usize,
    /// Plug-in estimation underestimates the true entropy; kept on the
    /// result so reports never present it as exact.
    pub downward_biased: bool,
}

/// Plug-in entropy of S(n) over pooled trials, in bits.
///
/// The support grows like 2^n, so horizons beyond
/// [`PLUGIN_HORIZON_GUIDELINE`] are rejected unless `allow_large_support`
/// is set.
pub fn estimate_entropy_plugin(
    spec: &ModelSpec,
    config: &SimConfig,
    allow_large_support: bool,
) -> Result<PluginEntropy> {
    if config.horizon > PLUGIN_HORIZON_GUIDELINE && !allow_large_support {
        return Err(Error::SupportTooLarge {
            horizon: config.horizon,
            max: PLUGIN_HORIZON_GUIDELINE,
        });
    }
    if spec.seed.len() + config.horizon > 64 {
        return Err(Error::SupportTooLarge {
            horizon: config.horizon,
            max: 64 - spec.seed.len(),
        });
    }
    let spec_clone = spec.clone();
    let horizon = config.horizon;
    let master = config.master_seed;
    let words = map_trials(config.trials, move |trial| {
        let mut rng = RngStream::new(master, trial);
        run_word(&spec_clone, horizon, &mut rng)
            .expect("seed is nonempty")
            .to_packed()
            .expect("length checked above")
    });
    let mut counts = std::collections::BTreeMap::new();
    for key in words {
        *counts.entry(key).or_insert(0u64) += 1;
    }
    let n = config.trials as f64;
    let bits = counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    Ok(PluginEntropy {
        bits,
        trials: config.trials,
        downward_biased: true,
    })
}

/// One checkpoint of the empirical-vs-drift comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeComparison {
    pub step: usize,
    pub mean_freq: f64,
    pub ode_freq: f64,
}

/// Compares the mean zero-frequency along end-duplication trajectories
/// with the closed-form drift solution, sampled at `checkpoints` evenly
/// spaced steps. The drift clock advances by 1/(m + t0 + t1) at step m,
/// matching the step sizes of the frequency recursion.
pub fn trajectory_vs_ode(
    spec: &ModelSpec,
    config: &SimConfig,
    checkpoints: usize,
) -> Result<Vec<OdeComparison>> {
    if spec.rule != Rule::End {
        return Err(Error::RuleMismatch {
            expected: Rule::End,
            got: spec.rule,
        });
    }
    if spec.noise.is_degenerate() {
        return Err(Error::DegenerateNoise);
    }
    let n = config.horizon;
    let checkpoints = checkpoints.max(2).min(n + 1);
    let steps: Vec<usize> = (0..checkpoints)
        .map(|i| i * n / (checkpoints - 1))
        .collect();

    let spec_clone = spec.clone();
    let steps_clone = steps.clone();
    let master = config.master_seed;
    let per_trial: Vec<Vec<f64>> = map_trials(config.trials, move |trial| {
        let mut rng = RngStream::new(master, trial);
        let mut freqs = Vec::with_capacity(steps_clone.len());
        let mut next = 0;
        run_symbol_counts_observed(&spec_clone, n, &mut rng, |step, counts: SymbolCounts| {
            while next < steps_clone.len() && steps_clone[next] == step {
                freqs.push(counts.freq_zero());
                next += 1;
            }
        });
        freqs
    });

    // drift clock: t_k = sum_{m=1..k} 1/(m + t0 + t1)
    let seed_len = spec.seed.len();
    let mut clock = Vec::with_capacity(n + 1);
    clock.push(0.0);
    for m in 1..=n {
        clock.push(clock[m - 1] + 1.0 / (m + seed_len) as f64);
    }

    let trials = config.trials as f64;
    steps
        .iter()
        .enumerate()
        .map(|(idx, &step)| {
            let mean = per_trial.iter().map(|t| t[idx]).sum::<f64>() / trials;
            Ok(OdeComparison {
                step,
                mean_freq: mean,
                ode_freq: ode_solution_end(clock[step], &spec.noise, &spec.seed)?,
            })
        })
        .collect()
}

/// Empirical conditional entropy of the signature process at order `k`:
/// each trial draws k+2 uniform reals, forming one (k+1)-bit signature
/// block. The estimate is the mean over 16 batches of the batch plug-in
/// conditional entropies, with the across-batch standard error.
pub fn estimate_signature_conditional(
    k: usize,
    trials: usize,
    master_seed: u64,
) -> Result<EstimateResult> {
    if k < 1 || k > 20 {
        return Err(Error::Domain {
            argument: "k",
            value: k as f64,
            domain: "[1, 20]",
        });
    }
    let cells = 1usize << (k + 1);
    let batches = 16usize;
    let per_batch = (trials / batches).max(1);

    let batch_entropy = |batch: u64| -> f64 {
        let mut joint = vec![0u64; cells];
        let mut rng = RngStream::new(master_seed, batch);
        for _ in 0..per_batch {
            let mut block = 0usize;
            let mut prev = rng.uniform();
            for bit in 0..k + 1 {
                let next = rng.uniform();
                if prev < next {
                    block |= 1 << bit;
                }
                prev = next;
            }
            joint[block] += 1;
        }
        // H(block k+1) - H(block k), blocks pooled within the batch
        let n = per_batch as f64;
        let entropy = |counts: &[u64]| -> f64 {
            counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let p = c as f64 / n;
                    -p * p.log2()
                })
                .sum::<f64>()
        };
        let mut marginal = vec![0u64; cells / 2];
        for (block, &c) in joint.iter().enumerate() {
            marginal[block & (cells / 2 - 1)] += c;
        }
        entropy(&joint) - entropy(&marginal)
    };

    let samples = map_trials(batches, batch_entropy);
    Ok(EstimateResult::from_samples(&samples))
}

/// Empirical law of a 3-bit signature block (the joint distribution of
/// three consecutive ascent/descent indicators), one estimate per cell in
/// big-endian order 000..111.
pub fn estimate_signature_block3(trials: usize, master_seed: u64) -> [EstimateResult; 8] {
    let batches = 16usize;
    let per_batch = (trials / batches).max(1);
    let batch_freqs = |batch: u64| -> [f64; 8] {
        let mut counts = [0u64; 8];
        let mut rng = RngStream::new(master_seed, batch);
        for _ in 0..per_batch {
            let x: [f64; 4] = std::array::from_fn(|_| rng.uniform());
            let mut block = 0usize;
            for i in 0..3 {
                block <<= 1;
                if x[i] < x[i + 1] {
                    block |= 1;
                }
            }
            counts[block] += 1;
        }
        counts.map(|c| c as f64 / per_batch as f64)
    };
    let samples = map_trials(batches, batch_freqs);
    std::array::from_fn(|cell| {
        let component: Vec<f64> = samples.iter().map(|s| s[cell]).collect();
        EstimateResult::from_samples(&component)
    })
}
