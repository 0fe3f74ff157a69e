//! The square-root scaling constant `L = sqrt(2 Var[ln p(Z)])` and the
//! generalized-gamma moment algebra behind it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{ggamma_log_pdf_variance, NoiseModel};
use crate::numerics::special::{digamma_pos, ln_gamma_pos, trigamma_pos};

/// Radicands down to this value are treated as rounding noise around zero.
const RADICAND_FLOOR: f64 = -1e-12;

/// Why (or whether) the upper bound is also the exact constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExactnessBasis {
    ExactGaussian,
    ExactExponential,
    /// Generalized Gaussian with `p <= 1`, Laplace included.
    ExactGeneralizedGaussianPLe1,
    UpperBoundOnly,
    DegenerateZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingResult {
    #[serde(rename = "L_upper")]
    pub l_upper: f64,
    #[serde(rename = "L_exact")]
    pub l_exact: Option<f64>,
    #[serde(rename = "exactness_basis")]
    pub basis: ExactnessBasis,
    pub log_pdf_variance: f64,
}

fn sqrt_clamped(radicand: f64) -> Result<f64> {
    if radicand.is_nan() || radicand < RADICAND_FLOOR {
        return Err(Error::Domain(format!("negative radicand {radicand}")));
    }
    Ok(radicand.max(0.0).sqrt())
}

pub fn scaling_constant(model: &NoiseModel) -> Result<ScalingResult> {
    let model = model.validate()?;
    let var = model.log_pdf_variance();
    if var.degenerate {
        return Ok(ScalingResult {
            l_upper: 0.0,
            l_exact: Some(0.0),
            basis: ExactnessBasis::DegenerateZero,
            log_pdf_variance: 0.0,
        });
    }
    let l_upper = sqrt_clamped(2.0 * var.value)?;
    let basis = match model {
        NoiseModel::Gaussian { .. } => ExactnessBasis::ExactGaussian,
        NoiseModel::Exponential { .. } => ExactnessBasis::ExactExponential,
        NoiseModel::Laplace { .. } => ExactnessBasis::ExactGeneralizedGaussianPLe1,
        NoiseModel::GeneralizedGaussian { p, .. } if p <= 1.0 => {
            ExactnessBasis::ExactGeneralizedGaussianPLe1
        }
        _ => ExactnessBasis::UpperBoundOnly,
    };
    Ok(ScalingResult {
        l_upper,
        l_exact: (basis != ExactnessBasis::UpperBoundOnly).then_some(l_upper),
        basis,
        log_pdf_variance: var.value,
    })
}

/// `sqrt(2 Var[ln p(Z)])` with the variance taken from quadrature.
pub fn scaling_upper_quadrature(model: &NoiseModel) -> Result<f64> {
    sqrt_clamped(2.0 * model.log_pdf_variance_quadrature()?)
}

/// `sqrt(2/p)`.
pub fn gg_scaling_upper(p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be finite and > 0, got {p}")));
    }
    Ok((2.0 / p).sqrt())
}

/// `sqrt(2 ((r - 1/β)² ψ'(r) - r + 2/β))`.
pub fn ggamma_scaling_upper(r: f64, beta: f64) -> Result<f64> {
    if !(r > 0.0 && beta > 0.0 && r.is_finite() && beta.is_finite()) {
        return Err(Error::Domain(format!(
            "r and beta must be > 0, got r={r}, beta={beta}"
        )));
    }
    sqrt_clamped(2.0 * ggamma_log_pdf_variance(r, beta))
}

/// Closed-form moments of `Z ~ GGamma(r, σ, β)`, with `W = (Z/σ)^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GGammaMoments {
    /// `E[ln Z]`
    pub e_ln_z: f64,
    /// `E[(ln Z)²]`
    pub e_ln_z_sq: f64,
    /// `E[W]`
    pub e_zb: f64,
    /// `E[W²]`
    pub e_z2b: f64,
    /// `E[W ln Z]`
    pub e_lnz_zb: f64,
}

pub fn ggamma_moments(r: f64, sigma: f64, beta: f64) -> Result<GGammaMoments> {
    NoiseModel::generalized_gamma(r, sigma, beta)?;
    let psi = digamma_pos(r);
    let psi1 = trigamma_pos(r);
    let ls = sigma.ln();
    Ok(GGammaMoments {
        e_ln_z: psi / beta + ls,
        e_ln_z_sq: psi1 / (beta * beta)
            + psi * psi / (beta * beta)
            + 2.0 * ls * psi / beta
            + ls * ls,
        e_zb: r,
        e_z2b: (r + 1.0) * r,
        e_lnz_zb: r / beta * psi + 1.0 / beta + r * ls,
    })
}

/// `E[(ln p(Z))²]` assembled from [`ggamma_moments`].
pub fn ggamma_log_pdf_second_moment(r: f64, sigma: f64, beta: f64) -> Result<f64> {
    let m = ggamma_moments(r, sigma, beta)?;
    // ln p = c + a ln z - W
    let c = beta.ln() - ln_gamma_pos(r) - beta * r * sigma.ln();
    let a = beta * r - 1.0;
    Ok(
        c * c + a * a * m.e_ln_z_sq + m.e_z2b + 2.0 * a * c * m.e_ln_z
            - 2.0 * c * m.e_zb
            - 2.0 * a * m.e_lnz_zb,
    )
}
