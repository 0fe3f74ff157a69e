//! The cumulant function `Ψ(ρ) = ln E[(p(Y|X)/p(Y))^ρ]`, the channel
//! resolvability bound, and sufficient key lengths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::input::{synthesize_input, InputLaw};
use crate::noise::NoiseModel;
use crate::tilt::{gamma_achievability, log_alpha, make_tilted, TiltedNoise, DEFAULT_CHI};

pub const RHO_GRID_POINTS: usize = 40;
pub const RHO_GRID_MAX: f64 = 0.9;
/// Default exponent of the message-length slack `ξ_n = n^0.4`.
pub const DEFAULT_XI_EXPONENT: f64 = 0.4;

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("rho must lie in (0, 1], got {rho}")))
    }
}

/// Closed-form `Ψ(ρ)` for the synthesized input of Gaussian or exponential noise.
pub fn psi(model: &NoiseModel, gamma: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Domain(format!(
            "tilt gamma must lie in [0, 1), got {gamma}"
        )));
    }
    match model {
        NoiseModel::Gaussian { .. } => {
            if rho * rho * gamma >= 1.0 {
                return Err(Error::Divergence(format!(
                    "rho² gamma = {} >= 1",
                    rho * rho * gamma
                )));
            }
            Ok(-0.5 * rho * (-gamma).ln_1p() - 0.5 * (-rho * rho * gamma).ln_1p())
        }
        NoiseModel::Exponential { .. } => {
            if (1.0 - gamma) * (1.0 - rho) <= 0.0 && gamma > 0.0 {
                return Err(Error::Divergence(format!(
                    "(1 - gamma)(1 - rho) = {} <= 0",
                    (1.0 - gamma) * (1.0 - rho)
                )));
            }
            if gamma == 0.0 {
                return Ok(0.0);
            }
            // (1-γ)^-ρ / (1+ργ) · (1 - γ + γ/(1-ρ))
            Ok(-rho * (-gamma).ln_1p() - (rho * gamma).ln_1p()
                + (gamma * rho / (1.0 - rho)).ln_1p())
        }
        other => Err(Error::NotSynthesizable {
            family: other.family_name(),
        }),
    }
}

/// `Ψ(ρ)` by two-dimensional quadrature over the synthesized input and the noise.
pub fn psi_quadrature(model: &NoiseModel, gamma: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let law = synthesize_input(model, gamma)?;
    let tilted = make_tilted(model, gamma)?;
    Ok(psi_expectation(model, &law, &tilted, rho)?.ln())
}

fn psi_expectation(
    model: &NoiseModel,
    law: &InputLaw,
    tilted: &TiltedNoise,
    rho: f64,
) -> Result<f64> {
    let inner = |x: f64| -> Result<f64> {
        model.expect(
            |z, lp| (rho * (lp - tilted.log_pdf(x + z))).exp(),
            1e-14,
            1e-12,
        )
    };
    let mut total = 0.0;
    if let Some((at, mass)) = law.atom() {
        total += mass * inner(at)?;
    }
    if let Some((density, weight)) = law.continuous_part() {
        let outer = density.expect(|x, _| inner(x).unwrap_or(f64::NAN), 1e-13, 1e-11)?;
        total += weight * outer;
    }
    Ok(total)
}

/// Upper estimate `ρ ln b + ln ∫ p̃^(1-ρ)` valid for any noise with density bounded by `b`.
pub fn psi_upper_bound(model: &NoiseModel, gamma: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let b = model.max_density().ok_or_else(|| {
        Error::Domain(format!("{} has an unbounded density", model.family_name()))
    })?;
    let tilted = make_tilted(model, gamma)?.tilted;
    if rho == 1.0 {
        return Ok(b.ln());
    }
    Ok(rho * b.ln() - log_alpha(&tilted, rho)?)
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `(1/ρ) ln(1 + exp(-ρ (key + msg) + n ψ))`.
pub fn resolvability_bound(psi_value: f64, key_nats: f64, msg_nats: f64, n: u64, rho: f64) -> f64 {
    softplus(-rho * (key_nats + msg_nats) + n as f64 * psi_value) / rho
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeySchedule {
    /// Bounded-density estimate of Ψ; linear key growth.
    GeneralOn,
    /// Exact Ψ for Gaussian or exponential noise; sub-square-root key growth.
    SubSqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyLengthReport {
    pub n: u64,
    pub rho: f64,
    pub gamma: f64,
    pub psi_value: f64,
    pub resolvability_bound: f64,
    pub key_nats: f64,
    pub msg_nats: f64,
    pub target_leak: f64,
    pub xi: f64,
    pub schedule: KeySchedule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyLengthOptions {
    pub chi: f64,
    /// `ξ_n = n^xi_exponent`.
    pub xi_exponent: f64,
}

impl Default for KeyLengthOptions {
    fn default() -> Self {
        Self {
            chi: DEFAULT_CHI,
            xi_exponent: DEFAULT_XI_EXPONENT,
        }
    }
}

/// `RHO_GRID_POINTS` log-spaced points on `[n^-1/2, 0.9]`.
pub fn rho_grid(n: u64) -> Vec<f64> {
    let lo = (n as f64).powf(-0.5).min(RHO_GRID_MAX);
    let (a, b) = (lo.ln(), RHO_GRID_MAX.ln());
    (0..RHO_GRID_POINTS)
        .map(|i| (a + (b - a) * i as f64 / (RHO_GRID_POINTS - 1) as f64).exp())
        .collect()
}

/// Key length needed at one `ρ` for the bound to meet `target_leak`.
fn key_at(psi_value: f64, msg_nats: f64, n: u64, rho: f64, target_leak: f64) -> f64 {
    // (1/ρ) ln(1 + e^x) <= T  <=>  x <= ln(e^(ρT) - 1)
    let room = (rho * target_leak).exp_m1().ln();
    ((n as f64 * psi_value - room) / rho - msg_nats).max(0.0)
}

struct KeyProblem {
    gamma: f64,
    msg_nats: f64,
    xi: f64,
}

fn key_problem(
    model: &NoiseModel,
    delta: f64,
    n: u64,
    target_leak: f64,
    schedule: KeySchedule,
    options: KeyLengthOptions,
) -> Result<KeyProblem> {
    if target_leak.is_nan() || target_leak <= 0.0 {
        return Err(Error::Domain(format!(
            "target leak must be > 0, got {target_leak}"
        )));
    }
    if schedule == KeySchedule::SubSqrt
        && !matches!(
            model,
            NoiseModel::Gaussian { .. } | NoiseModel::Exponential { .. }
        )
    {
        return Err(Error::NotSynthesizable {
            family: model.family_name(),
        });
    }
    let gamma = gamma_achievability(model, delta, n, options.chi)?;
    let nf = n as f64;
    let l = (2.0 * model.log_pdf_variance().value).sqrt();
    let xi = nf.powf(options.xi_exponent);
    Ok(KeyProblem {
        gamma,
        msg_nats: (l * (nf * delta).sqrt() - xi).max(0.0),
        xi,
    })
}

fn report_at(
    model: &NoiseModel,
    problem: &KeyProblem,
    n: u64,
    target_leak: f64,
    schedule: KeySchedule,
    rho: f64,
) -> Result<KeyLengthReport> {
    let psi_value = match schedule {
        KeySchedule::SubSqrt => psi(model, problem.gamma, rho)?,
        KeySchedule::GeneralOn => psi_upper_bound(model, problem.gamma, rho)?,
    };
    let key_nats = key_at(psi_value, problem.msg_nats, n, rho, target_leak);
    if !key_nats.is_finite() {
        return Err(Error::Infeasible(format!(
            "no finite key meets the target at rho = {rho}"
        )));
    }
    Ok(KeyLengthReport {
        n,
        rho,
        gamma: problem.gamma,
        psi_value,
        resolvability_bound: resolvability_bound(psi_value, key_nats, problem.msg_nats, n, rho),
        key_nats,
        msg_nats: problem.msg_nats,
        target_leak,
        xi: problem.xi,
        schedule,
    })
}

/// Key needed at a fixed `ρ` for the resolvability bound to meet `target_leak`.
pub fn key_length_at_rho(
    model: &NoiseModel,
    delta: f64,
    n: u64,
    target_leak: f64,
    schedule: KeySchedule,
    rho: f64,
    options: KeyLengthOptions,
) -> Result<KeyLengthReport> {
    check_rho(rho)?;
    let problem = key_problem(model, delta, n, target_leak, schedule, options)?;
    report_at(model, &problem, n, target_leak, schedule, rho)
}

/// Smallest key over the ρ grid such that the resolvability bound is at most `target_leak`,
/// with `ln|M| = L sqrt(nΔ) - ξ_n` and the achievability tilt.
pub fn sufficient_key_length(
    model: &NoiseModel,
    delta: f64,
    n: u64,
    target_leak: f64,
    schedule: KeySchedule,
    options: KeyLengthOptions,
) -> Result<KeyLengthReport> {
    let problem = key_problem(model, delta, n, target_leak, schedule, options)?;
    let mut best: Option<KeyLengthReport> = None;
    for rho in rho_grid(n) {
        let Ok(r) = report_at(model, &problem, n, target_leak, schedule, rho) else {
            continue;
        };
        if best.is_none_or(|b| r.key_nats < b.key_nats) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no rho in [{}, {RHO_GRID_MAX}] gives a finite key for n = {n}",
            rho_grid(n)[0]
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_rng;

    #[test]
    fn zero_tilt_gives_zero() {
        for rho in [0.1, 0.5, 0.9] {
            assert_eq!(
                psi(&NoiseModel::gaussian(1.0).unwrap(), 0.0, rho).unwrap(),
                0.0
            );
            assert_eq!(
                psi(&NoiseModel::exponential(1.0).unwrap(), 0.0, rho).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn gaussian_closed_form_value() {
        let v = psi(&NoiseModel::gaussian(1.0).unwrap(), 0.1, 0.5).unwrap();
        let expected = (0.9f64.powf(-0.25) / 0.975f64.sqrt()).ln();
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn gaussian_matches_monte_carlo() {
        let model = NoiseModel::gaussian(1.0).unwrap();
        let (gamma, rho) = (0.1, 0.5);
        let law = synthesize_input(&model, gamma).unwrap();
        let tilted = make_tilted(&model, gamma).unwrap();
        let mut rng = make_rng(21);
        let n = 1_000_000;
        let vals: Vec<f64> = (0..n)
            .map(|_| {
                let x = law.sample_one(&mut rng);
                let z = model.sample_one(&mut rng);
                (rho * (model.log_pdf(z) - tilted.log_pdf(x + z))).exp()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        let expected = psi(&model, gamma, rho).unwrap().exp();
        assert!((mean - expected).abs() < 4.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for model in [
            NoiseModel::gaussian(1.0).unwrap(),
            NoiseModel::exponential(1.0).unwrap(),
        ] {
            for gamma in [0.05, 0.1] {
                for rho in [0.25, 0.5] {
                    let c = psi(&model, gamma, rho).unwrap();
                    let q = psi_quadrature(&model, gamma, rho).unwrap();
                    assert!(
                        (c - q).abs() < 1e-5,
                        "{model} γ={gamma} ρ={rho}: {c} vs {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn exponential_is_scale_free() {
        let a = psi(&NoiseModel::exponential(1.0).unwrap(), 0.1, 0.25).unwrap();
        let q = psi_quadrature(&NoiseModel::exponential(3.0).unwrap(), 0.1, 0.25).unwrap();
        assert!((a - q).abs() < 1e-8);
    }

    #[test]
    fn divergence_conditions() {
        let e = NoiseModel::exponential(1.0).unwrap();
        assert!(matches!(psi(&e, 0.1, 1.0), Err(Error::Divergence(_))));
        assert!(psi(&e, 0.1, 0.0).is_err());
        assert!(matches!(
            psi(&NoiseModel::laplace(1.0).unwrap(), 0.1, 0.5),
            Err(Error::NotSynthesizable { .. })
        ));
    }

    #[test]
    fn vanishes_with_tilt() {
        for model in [
            NoiseModel::gaussian(1.0).unwrap(),
            NoiseModel::exponential(1.0).unwrap(),
        ] {
            let vals: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&g| psi(&model, g, 0.5).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
            assert!(vals[3] < 1e-3);
        }
    }

    #[test]
    fn exponential_leading_order() {
        let e = NoiseModel::exponential(1.0).unwrap();
        for rho in [0.25, 0.5] {
            let err = |g: f64| (psi(&e, g, rho).unwrap() / (g * rho / (1.0 - rho)) - 1.0).abs();
            assert!(err(1e-3) <= 0.5 * err(1e-2));
        }
    }

    #[test]
    fn upper_bound_dominates_exact() {
        for model in [
            NoiseModel::gaussian(1.0).unwrap(),
            NoiseModel::exponential(1.0).unwrap(),
        ] {
            for rho in [0.1, 0.5, 0.9] {
                assert!(
                    psi_upper_bound(&model, 0.05, rho).unwrap() >= psi(&model, 0.05, rho).unwrap()
                );
            }
        }
        assert!(psi_upper_bound(
            &NoiseModel::generalized_gamma(0.5, 1.0, 0.5).unwrap(),
            0.05,
            0.5
        )
        .is_err());
    }

    #[test]
    fn bound_examples() {
        assert!((resolvability_bound(0.0, 0.0, 0.0, 10, 0.5) - 2f64.ln() / 0.5).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for k in [1.0, 10.0, 100.0, 1000.0] {
            let b = resolvability_bound(0.0, k, 0.0, 10, 0.5);
            assert!(b < 2f64.ln() / 0.5 && b < last);
            last = b;
        }
        assert!(last < 1e-100);
        assert!(resolvability_bound(10.0, 0.0, 0.0, 1000, 0.5).is_finite());
    }

    #[test]
    fn bound_monotonicity_grid() {
        for psi_v in [0.0, 0.001, 0.01] {
            for k in [0.0, 5.0, 50.0] {
                let b = resolvability_bound(psi_v, k, 10.0, 1000, 0.3);
                assert!(resolvability_bound(psi_v, k + 1.0, 10.0, 1000, 0.3) < b);
                assert!(resolvability_bound(psi_v + 1e-3, k, 10.0, 1000, 0.3) > b);
            }
        }
    }

    fn schedule_bound(n: u64) -> (f64, f64) {
        let model = NoiseModel::gaussian(1.0).unwrap();
        let delta = 1.0;
        let nf = n as f64;
        let gamma = gamma_achievability(&model, delta, n, DEFAULT_CHI).unwrap();
        let rho = nf.powf(-0.25);
        let xi = nf.powf(0.4);
        let key = rho * (delta * nf).sqrt() + 2.0 * xi;
        let bound = resolvability_bound(
            psi(&model, gamma, rho).unwrap(),
            key,
            (delta * nf).sqrt(),
            n,
            rho,
        );
        (bound, (-rho * xi).exp() / rho)
    }

    #[test]
    fn sub_sqrt_schedule_bound() {
        let (b4, coarse4) = schedule_bound(10_000);
        assert!((b4 - 2.170_265_7e-3).abs() < 1e-9, "{b4}");
        assert!(b4 < coarse4);
        let (b5, coarse5) = schedule_bound(100_000);
        assert!(b5 < 1e-3 && b5 < coarse5, "{b5}");
        assert!(schedule_bound(1_000_000).0 < b5);
    }

    #[test]
    fn key_length_shrinks_relative_to_sqrt_n() {
        for model in [
            NoiseModel::gaussian(1.0).unwrap(),
            NoiseModel::exponential(1.0).unwrap(),
        ] {
            let per_root = |n: u64| {
                let r = sufficient_key_length(
                    &model,
                    1.0,
                    n,
                    1e-3,
                    KeySchedule::SubSqrt,
                    KeyLengthOptions::default(),
                )
                .unwrap();
                assert!(r.resolvability_bound <= 1e-3 * (1.0 + 1e-9), "{r:?}");
                r.key_nats / (n as f64).sqrt()
            };
            let a = per_root(10_000);
            let b = per_root(1_000_000);
            assert!(b < a, "{model}: {a} -> {b}");
        }
    }

    #[test]
    fn infinite_target_needs_no_key() {
        let r = sufficient_key_length(
            &NoiseModel::exponential(1.0).unwrap(),
            1.0,
            10_000,
            f64::INFINITY,
            KeySchedule::SubSqrt,
            KeyLengthOptions::default(),
        )
        .unwrap();
        assert_eq!(r.key_nats, 0.0);
    }

    #[test]
    fn general_schedule_is_linear_in_n() {
        let model = NoiseModel::laplace(1.0).unwrap();
        for n in [10_000u64, 100_000] {
            let r = sufficient_key_length(
                &model,
                1.0,
                n,
                1e-3,
                KeySchedule::GeneralOn,
                KeyLengthOptions::default(),
            )
            .unwrap();
            let per_letter = r.key_nats / n as f64;
            assert!(per_letter > 0.5 && per_letter < 2.0, "{r:?}");
        }
        assert!(sufficient_key_length(
            &model,
            1.0,
            10_000,
            1e-3,
            KeySchedule::SubSqrt,
            KeyLengthOptions::default()
        )
        .is_err());
    }

    #[test]
    fn fixed_rho_agrees_with_grid_optimum() {
        let model = NoiseModel::exponential(1.0).unwrap();
        let opts = KeyLengthOptions::default();
        let best =
            sufficient_key_length(&model, 1.0, 10_000, 1e-3, KeySchedule::SubSqrt, opts).unwrap();
        let at = key_length_at_rho(
            &model,
            1.0,
            10_000,
            1e-3,
            KeySchedule::SubSqrt,
            best.rho,
            opts,
        )
        .unwrap();
        assert_eq!(best, at);
        let other =
            key_length_at_rho(&model, 1.0, 10_000, 1e-3, KeySchedule::SubSqrt, 0.5, opts).unwrap();
        assert!(other.key_nats >= best.key_nats);
    }

    #[test]
    fn rho_grid_shape() {
        let g = rho_grid(10_000);
        assert_eq!(g.len(), RHO_GRID_POINTS);
        assert!((g[0] - 0.01).abs() < 1e-15);
        assert!((g[RHO_GRID_POINTS - 1] - 0.9).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
