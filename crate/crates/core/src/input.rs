//! Input laws whose sum with the noise has the tilted law, plus the
//! characteristic-function and Kolmogorov-Smirnov checks of that property.

use num_complex::Complex64;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::numerics::{make_rng, RandomStream};
use crate::tilt::make_tilted;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputKind {
    /// Centered normal input.
    GaussianInput { variance: f64 },
    /// Point mass at zero mixed with an exponential of the given rate.
    MixturePointMassExponential { mass_at_zero: f64, rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputLaw {
    #[serde(flatten)]
    pub kind: InputKind,
    pub gamma: f64,
}

/// Input law for the tilt `gamma` of a Gaussian or exponential noise model.
pub fn synthesize_input(model: &NoiseModel, gamma: f64) -> Result<InputLaw> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Domain(format!(
            "tilt gamma must lie in [0, 1), got {gamma}"
        )));
    }
    let kind = match *model {
        NoiseModel::Gaussian { sigma } => InputKind::GaussianInput {
            variance: sigma * sigma * gamma / (1.0 - gamma),
        },
        NoiseModel::Exponential { lambda } => InputKind::MixturePointMassExponential {
            mass_at_zero: 1.0 - gamma,
            rate: (1.0 - gamma) * lambda,
        },
        other => {
            return Err(Error::NotSynthesizable {
                family: other.family_name(),
            })
        }
    };
    Ok(InputLaw { kind, gamma })
}

impl InputLaw {
    pub fn sample_one(&self, rng: &mut RandomStream) -> f64 {
        match self.kind {
            InputKind::GaussianInput { variance } => {
                let n: f64 = StandardNormal.sample(rng);
                variance.sqrt() * n
            }
            InputKind::MixturePointMassExponential { mass_at_zero, rate } => {
                if rng.uniform() < mass_at_zero {
                    0.0
                } else {
                    let e: f64 = Exp1.sample(rng);
                    e / rate
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut RandomStream, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    pub fn charfn(&self, t: f64) -> Complex64 {
        match self.kind {
            InputKind::GaussianInput { variance } => {
                Complex64::new((-0.5 * variance * t * t).exp(), 0.0)
            }
            InputKind::MixturePointMassExponential { mass_at_zero, rate } => {
                mass_at_zero
                    + (1.0 - mass_at_zero) * Complex64::new(rate, 0.0) / Complex64::new(rate, -t)
            }
        }
    }

    /// `P(|X| > x)` for `x >= 0`.
    pub fn tail_probability(&self, x: f64) -> f64 {
        match self.kind {
            InputKind::GaussianInput { variance } => {
                if variance == 0.0 {
                    0.0
                } else {
                    libm::erfc(x / (2.0 * variance).sqrt())
                }
            }
            InputKind::MixturePointMassExponential { mass_at_zero, rate } => {
                (1.0 - mass_at_zero) * (-rate * x).exp()
            }
        }
    }

    /// The atom at zero, if any, as `(position, mass)`.
    pub fn atom(&self) -> Option<(f64, f64)> {
        match self.kind {
            InputKind::GaussianInput { variance: 0.0 } => Some((0.0, 1.0)),
            InputKind::GaussianInput { .. } => None,
            InputKind::MixturePointMassExponential { mass_at_zero, .. } => {
                Some((0.0, mass_at_zero))
            }
        }
    }

    /// The absolutely continuous part as a (sub-probability) noise model with its weight.
    pub fn continuous_part(&self) -> Option<(NoiseModel, f64)> {
        match self.kind {
            InputKind::GaussianInput { variance } if variance > 0.0 => Some((
                NoiseModel::Gaussian {
                    sigma: variance.sqrt(),
                },
                1.0,
            )),
            InputKind::MixturePointMassExponential { mass_at_zero, rate } if mass_at_zero < 1.0 => {
                Some((NoiseModel::Exponential { lambda: rate }, 1.0 - mass_at_zero))
            }
            _ => None,
        }
    }
}

pub fn sample_input(law: &InputLaw, rng: &mut RandomStream, count: usize) -> Vec<f64> {
    law.sample(rng, count)
}

/// 201 points evenly spaced on `[-10, 10]`.
pub fn default_t_grid() -> Vec<f64> {
    (0..201).map(|i| -10.0 + 0.1 * i as f64).collect()
}

/// `max_t |φ_Z̃(t) - φ_Z(t) φ_X(t)|` over the grid.
pub fn charfn_factorization_residual(
    model: &NoiseModel,
    law: &InputLaw,
    gamma: f64,
    t_grid: &[f64],
) -> Result<f64> {
    let tilted = make_tilted(model, gamma)?.tilted;
    let mut worst = 0.0f64;
    for &t in t_grid {
        let lhs = tilted.charfn(t)?;
        let rhs = model.charfn(t)? * law.charfn(t);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic. Sorts `samples`.
pub fn ks_statistic<F>(samples: &mut [f64], cdf: F) -> f64
where
    F: Fn(f64) -> f64,
{
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Asymptotic critical value `sqrt(-ln(α/2)/2) / sqrt(N)`.
pub fn ks_critical_value(count: usize, significance: f64) -> f64 {
    (-0.5 * (0.5 * significance).ln()).sqrt() / (count as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub critical: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Draws `X + Z` with `X` from the synthesized input and compares the
/// empirical CDF with the tilted law.
pub fn ks_check_synthesized(
    model: &NoiseModel,
    gamma: f64,
    samples: usize,
    significance: f64,
    seed: u64,
) -> Result<KsReport> {
    let law = synthesize_input(model, gamma)?;
    let tilted = make_tilted(model, gamma)?.tilted;
    let mut rng = make_rng(seed);
    let mut sums: Vec<f64> = (0..samples)
        .map(|_| law.sample_one(&mut rng) + model.sample_one(&mut rng))
        .collect();
    let statistic = ks_statistic(&mut sums, |y| tilted.cdf(y).expect("closed-form cdf"));
    let critical = ks_critical_value(samples, significance);
    Ok(KsReport {
        statistic,
        critical,
        samples,
        passed: statistic < critical,
    })
}
