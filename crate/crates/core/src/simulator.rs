//! Monte Carlo random-coding experiments: keyed random codebooks, additive
//! noise, and information-density threshold decoding.
//!
//! Codewords are never stored for the experiment itself. The codeword for
//! `(key, message)` is regenerated on demand from a stream seeded by
//! `derive_seed(derive_seed(codebook_seed, key), message)`, which is exactly
//! what [`generate_codebook`] materializes. This keeps message sets of size
//! `e^(c sqrt(n))` tractable.
//!
//! The decoder scans messages in index order and returns the first whose
//! information density exceeds `ln|M| + n^(1/4)`. Simulation scans the
//! `scan_window` lowest indices below the sent message, then the sent
//! message itself; the remaining impostors each exceed the threshold with
//! probability at most `e^-(ln|M| + τ)`, so together they add at most
//! `e^-τ` to the error rate, which `feinstein_bound` accounts for.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::input::{synthesize_input, InputLaw};
use crate::noise::NoiseModel;
use crate::numerics::rng::derive_seed;
use crate::numerics::{make_rng, RandomStream};
use crate::tilt::{gamma_achievability, make_tilted, TiltedNoise, DEFAULT_CHI};

/// Largest number of stored codeword entries (`|M| |K| n`).
pub const CODEBOOK_ENTRY_LIMIT: u128 = 1 << 26;
pub const DEFAULT_SCAN_WINDOW: u64 = 16;
const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodebookSpec {
    pub n: usize,
    pub num_messages: u64,
    pub num_keys: u64,
    pub seed: u64,
}

/// The codeword for `(key, message)` of the virtual codebook seeded by `seed`.
pub fn codeword(law: &InputLaw, n: usize, seed: u64, key: u64, message: u64) -> Vec<f64> {
    let mut rng = make_rng(derive_seed(derive_seed(seed, key), message));
    law.sample(&mut rng, n)
}

/// A stored codebook, key-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub spec: CodebookSpec,
    words: Vec<f64>,
}

impl Codebook {
    pub fn codeword(&self, key: u64, message: u64) -> &[f64] {
        assert!(key < self.spec.num_keys && message < self.spec.num_messages);
        let n = self.spec.n;
        let start = ((key * self.spec.num_messages + message) as usize) * n;
        &self.words[start..start + n]
    }

    pub fn len(&self) -> usize {
        (self.spec.num_keys * self.spec.num_messages) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn generate_codebook(spec: CodebookSpec, law: &InputLaw) -> Result<Codebook> {
    if spec.n == 0 || spec.num_messages == 0 || spec.num_keys == 0 {
        return Err(Error::Domain(
            "codebook sizes must all be at least 1".into(),
        ));
    }
    let entries = spec.num_messages as u128 * spec.num_keys as u128 * spec.n as u128;
    if entries > CODEBOOK_ENTRY_LIMIT {
        return Err(Error::CodebookTooLarge {
            entries,
            limit: CODEBOOK_ENTRY_LIMIT,
        });
    }
    let mut words = Vec::with_capacity(entries as usize);
    for key in 0..spec.num_keys {
        for message in 0..spec.num_messages {
            words.extend(codeword(law, spec.n, spec.seed, key, message));
        }
    }
    Ok(Codebook { spec, words })
}

/// `y = x + z` with `z` drawn i.i.d. from `model`.
pub fn transmit(codeword: &[f64], model: &NoiseModel, rng: &mut RandomStream) -> Vec<f64> {
    codeword.iter().map(|x| x + model.sample_one(rng)).collect()
}

/// `y = x + z` with `z` supplied by `noise`.
pub fn transmit_with_noise<F: FnMut() -> f64>(codeword: &[f64], mut noise: F) -> Vec<f64> {
    codeword.iter().map(|x| x + noise()).collect()
}

/// `Σ ln p(y_i - x_i) - ln p̃(y_i)`; `-inf` when some `y_i - x_i` is off the
/// noise support.
///
/// Panics if the lengths differ.
pub fn information_density(x: &[f64], y: &[f64], model: &NoiseModel, tilted: &TiltedNoise) -> f64 {
    assert_eq!(x.len(), y.len(), "codeword and output lengths differ");
    let mut sum = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let lp = model.log_pdf(yi - xi);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        sum += lp - tilted.log_pdf(yi);
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecodeOutcome {
    Decoded(u64),
    Erasure,
}

/// First message of the key's slice whose information density exceeds `threshold`.
pub fn threshold_decode(
    y: &[f64],
    codebook: &Codebook,
    key: u64,
    threshold: f64,
    model: &NoiseModel,
    tilted: &TiltedNoise,
) -> DecodeOutcome {
    (0..codebook.spec.num_messages)
        .find(|&m| information_density(codebook.codeword(key, m), y, model, tilted) > threshold)
        .map_or(DecodeOutcome::Erasure, DecodeOutcome::Decoded)
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub model: NoiseModel,
    pub delta: f64,
    pub n: usize,
    /// `ln|M|` as a fraction of `L sqrt(n Δ)`.
    pub rate_fraction: f64,
    pub trials: u64,
    pub seed: u64,
    pub chi: f64,
    pub scan_window: u64,
}

impl ExperimentSpec {
    pub fn new(
        model: NoiseModel,
        delta: f64,
        n: usize,
        rate_fraction: f64,
        trials: u64,
        seed: u64,
    ) -> Self {
        Self {
            model,
            delta,
            n,
            rate_fraction,
            trials,
            seed,
            chi: DEFAULT_CHI,
            scan_window: DEFAULT_SCAN_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub model: NoiseModel,
    pub n: usize,
    pub delta_budget: f64,
    pub chi: f64,
    pub gamma: f64,
    pub rate_fraction: f64,
    /// `ln|M|` in nats.
    pub msg_nats: f64,
    /// `ln|M| / n`, nats per channel use.
    pub rate: f64,
    /// `n^(1/4)`.
    pub tau: f64,
    /// `ln|M| + τ`.
    pub threshold: f64,
    pub scan_window: u64,
    pub trials: u64,
    pub seed: u64,
    pub errors: u64,
    pub error_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Fraction of trials whose sent codeword stayed at or below the threshold.
    pub miss_rate: f64,
    /// `miss_rate + e^-τ`.
    pub feinstein_bound: f64,
    /// Sample mean of `i / sqrt(n)` for the sent codeword.
    pub info_density_mean: f64,
    /// Sample variance of `i / sqrt(n)`.
    pub info_density_var: f64,
    /// Standard error of `info_density_mean`.
    pub info_density_se: f64,
    /// `sqrt(n) (h(Z̃) - h(Z))`.
    pub expected_info_density_mean: f64,
    /// `n (h(Z̃) - h(Z))`.
    pub analytic_mutual_info: f64,
    /// `n D(P̃ ‖ P)`.
    pub covert_divergence: f64,
    pub covert: bool,
}

struct TrialOutcome {
    info_density: f64,
    miss: bool,
    error: bool,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<SimulationReport> {
    let model = spec.model.validate()?;
    if spec.n == 0 || spec.trials == 0 {
        return Err(Error::Domain("n and trials must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&spec.rate_fraction) {
        return Err(Error::Domain(format!(
            "rate_fraction must lie in [0, 1), got {}",
            spec.rate_fraction
        )));
    }
    let n = spec.n;
    let nf = n as f64;
    let gamma = gamma_achievability(&model, spec.delta, n as u64, spec.chi)?;
    let law = synthesize_input(&model, gamma)?;
    let tilted = make_tilted(&model, gamma)?;

    let var = model.log_pdf_variance().value;
    let msg_nats = spec.rate_fraction * (2.0 * var).sqrt() * (nf * spec.delta).sqrt();
    let num_messages = if msg_nats >= 64.0 * std::f64::consts::LN_2 {
        u64::MAX
    } else {
        (msg_nats.exp().floor() as u64).max(1)
    };
    let tau = nf.powf(0.25);
    let threshold = msg_nats + tau;
    let codebook_seed = derive_seed(spec.seed, u64::MAX);

    let run_trial = |trial: u64| -> TrialOutcome {
        let mut rng = make_rng(derive_seed(spec.seed, trial));
        let key = rng.next_u64();
        let message = if num_messages == 1 {
            0
        } else {
            rng.random_range(0..num_messages)
        };
        let x = codeword(&law, n, codebook_seed, key, message);
        let y = transmit(&x, &model, &mut rng);
        let info_density = information_density(&x, &y, &model, &tilted);
        let impostor_hit = (0..message.min(spec.scan_window)).any(|j| {
            let xj = codeword(&law, n, codebook_seed, key, j);
            information_density(&xj, &y, &model, &tilted) > threshold
        });
        let miss = info_density <= threshold;
        TrialOutcome {
            info_density,
            miss,
            error: impostor_hit || miss,
        }
    };
    // Ordered collection keeps the aggregate bit-identical for any thread count.
    let outcomes: Vec<TrialOutcome> = (0..spec.trials).into_par_iter().map(run_trial).collect();

    let trials = spec.trials as f64;
    let errors = outcomes.iter().filter(|o| o.error).count() as u64;
    let misses = outcomes.iter().filter(|o| o.miss).count() as f64;
    let normalized: Vec<f64> = outcomes
        .iter()
        .map(|o| o.info_density / nf.sqrt())
        .collect();
    let mean = normalized.iter().sum::<f64>() / trials;
    let var_i = if spec.trials > 1 {
        normalized
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (trials - 1.0)
    } else {
        0.0
    };
    let (ci_lo, ci_hi) = wilson_interval(errors, spec.trials);
    let gap = tilted.entropy_gap();
    let covert_divergence = nf * tilted.kl_to_base();

    Ok(SimulationReport {
        model,
        n,
        delta_budget: spec.delta,
        chi: spec.chi,
        gamma,
        rate_fraction: spec.rate_fraction,
        msg_nats,
        rate: msg_nats / nf,
        tau,
        threshold,
        scan_window: spec.scan_window,
        trials: spec.trials,
        seed: spec.seed,
        errors,
        error_rate: errors as f64 / trials,
        ci_lo,
        ci_hi,
        miss_rate: misses / trials,
        feinstein_bound: misses / trials + (-tau).exp(),
        info_density_mean: mean,
        info_density_var: var_i,
        info_density_se: (var_i / trials).sqrt(),
        expected_info_density_mean: nf.sqrt() * gap,
        analytic_mutual_info: nf * gap,
        covert_divergence,
        covert: covert_divergence <= spec.delta,
    })
}

/// Runs one experiment per blocklength with the same seed.
pub fn sweep(base: &ExperimentSpec, ns: &[usize]) -> Result<Vec<SimulationReport>> {
    ns.iter()
        .map(|&n| run_experiment(&ExperimentSpec { n, ..*base }))
        .collect()
}

pub const SWEEP_CSV_HEADER: &str =
    "n,gamma,rate,error_rate,ci_lo,ci_hi,idensity_mean,idensity_var,covert_div";

pub fn sweep_csv(reports: &[SimulationReport]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.gamma,
            r.rate,
            r.error_rate,
            r.ci_lo,
            r.ci_hi,
            r.info_density_mean,
            r.info_density_var,
            r.covert_divergence
        ));
    }
    out
}
