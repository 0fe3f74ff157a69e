//! Additive-noise families: log-densities, samplers, closed-form statistics
//! and the integrability conditions behind the scaling results.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_log_scale, integrate_pieces};
use crate::numerics::special::{digamma_pos, ln_gamma_pos, trigamma_pos};
use crate::numerics::{Interval, QuadratureResult, RandomStream};

/// Tolerances used when a closed form is cross-checked by quadrature.
pub const FINE_ABS_TOL: f64 = 1e-13;
pub const FINE_REL_TOL: f64 = 1e-12;

/// Default exponent for the integrability conditions.
pub const DEFAULT_ZETA: f64 = 0.5;

/// A parametric noise law. Construct through the checked constructors or
/// [`NoiseModel::validate`]; all shape and scale parameters are positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Gaussian {
        sigma: f64,
    },
    Exponential {
        lambda: f64,
    },
    Laplace {
        scale: f64,
    },
    /// Density `c_p / sigma * exp(-|z|^p / (2 sigma^p))`.
    GeneralizedGaussian {
        p: f64,
        sigma: f64,
    },
    /// Density `beta / (Gamma(r) sigma^(beta r)) z^(beta r - 1) exp(-(z/sigma)^beta)` on `z > 0`.
    GeneralizedGamma {
        r: f64,
        sigma: f64,
        beta: f64,
    },
    /// Uniform on a single finite interval.
    Uniform {
        lo: f64,
        hi: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

/// Normalizing constant of the generalized Gaussian density.
pub fn gg_constant(p: f64) -> f64 {
    (p.ln() - (p + 1.0) / p * std::f64::consts::LN_2 - ln_gamma_pos(1.0 / p)).exp()
}

fn ln_gg_constant(p: f64) -> f64 {
    p.ln() - (p + 1.0) / p * std::f64::consts::LN_2 - ln_gamma_pos(1.0 / p)
}

impl NoiseModel {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::Gaussian { sigma }.validate()
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::Exponential { lambda }.validate()
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        Self::Laplace { scale }.validate()
    }

    pub fn generalized_gaussian(p: f64, sigma: f64) -> Result<Self> {
        Self::GeneralizedGaussian { p, sigma }.validate()
    }

    pub fn generalized_gamma(r: f64, sigma: f64, beta: f64) -> Result<Self> {
        Self::GeneralizedGamma { r, sigma, beta }.validate()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::Uniform { lo, hi }.validate()
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            Self::Gaussian { sigma } => positive("sigma", sigma)?,
            Self::Exponential { lambda } => positive("lambda", lambda)?,
            Self::Laplace { scale } => positive("scale", scale)?,
            Self::GeneralizedGaussian { p, sigma } => {
                positive("p", p)?;
                positive("sigma", sigma)?;
            }
            Self::GeneralizedGamma { r, sigma, beta } => {
                positive("r", r)?;
                positive("sigma", sigma)?;
                positive("beta", beta)?;
            }
            Self::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidModel(format!(
                        "uniform support needs finite lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(self)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::Exponential { .. } => "exponential",
            Self::Laplace { .. } => "laplace",
            Self::GeneralizedGaussian { .. } => "gg",
            Self::GeneralizedGamma { .. } => "ggamma",
            Self::Uniform { .. } => "uniform",
        }
    }

    pub fn support(&self) -> Interval {
        match *self {
            Self::Gaussian { .. } | Self::Laplace { .. } | Self::GeneralizedGaussian { .. } => {
                Interval::real_line()
            }
            Self::Exponential { .. } | Self::GeneralizedGamma { .. } => Interval::half_line(0.0),
            Self::Uniform { lo, hi } => Interval {
                lower: lo,
                upper: hi,
            },
        }
    }

    pub fn is_degenerate_uniform(&self) -> bool {
        matches!(self, Self::Uniform { .. })
    }

    /// `ln p_Z(z)`, or `-inf` off the support.
    pub fn log_pdf(&self, z: f64) -> f64 {
        match *self {
            Self::Gaussian { sigma } => {
                let u = z / sigma;
                -0.5 * u * u - sigma.ln() - 0.5 * (2.0 * PI).ln()
            }
            Self::Exponential { lambda } => {
                if z < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    lambda.ln() - lambda * z
                }
            }
            Self::Laplace { scale } => -(2.0 * scale).ln() - z.abs() / scale,
            Self::GeneralizedGaussian { p, sigma } => {
                ln_gg_constant(p) - sigma.ln() - 0.5 * (z.abs() / sigma).powf(p)
            }
            Self::GeneralizedGamma { r, sigma, beta } => {
                if z < 0.0 {
                    return f64::NEG_INFINITY;
                }
                let shape = beta * r - 1.0;
                let log_z_term = if shape == 0.0 {
                    0.0
                } else if z == 0.0 {
                    if shape > 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    f64::INFINITY
                } else {
                    shape * z.ln()
                };
                beta.ln() - ln_gamma_pos(r) - beta * r * sigma.ln() + log_z_term
                    - (z / sigma).powf(beta)
            }
            Self::Uniform { lo, hi } => {
                if z < lo || z > hi {
                    f64::NEG_INFINITY
                } else {
                    -(hi - lo).ln()
                }
            }
        }
    }

    pub fn pdf(&self, z: f64) -> f64 {
        self.log_pdf(z).exp()
    }

    /// Supremum of the density, if bounded.
    pub fn max_density(&self) -> Option<f64> {
        match *self {
            Self::Gaussian { sigma } => Some(1.0 / ((2.0 * PI).sqrt() * sigma)),
            Self::Exponential { lambda } => Some(lambda),
            Self::Laplace { scale } => Some(0.5 / scale),
            Self::GeneralizedGaussian { p, sigma } => Some(gg_constant(p) / sigma),
            Self::GeneralizedGamma { r, sigma, beta } => {
                let shape = beta * r - 1.0;
                if shape < 0.0 {
                    None
                } else if shape == 0.0 {
                    Some(self.pdf(0.0))
                } else {
                    // mode at sigma (r - 1/beta)^(1/beta)
                    Some(self.pdf(sigma * (r - 1.0 / beta).powf(1.0 / beta)))
                }
            }
            Self::Uniform { lo, hi } => Some(1.0 / (hi - lo)),
        }
    }

    /// Scale used to standardize quadrature.
    fn scale(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma }
            | Self::GeneralizedGaussian { sigma, .. }
            | Self::GeneralizedGamma { sigma, .. } => sigma,
            Self::Exponential { lambda } => 1.0 / lambda,
            Self::Laplace { scale } => scale,
            Self::Uniform { lo, hi } => hi - lo,
        }
    }

    /// Integrates an arbitrary `f` over the support, split at the natural
    /// break points of the family.
    pub fn integrate<F>(&self, f: F, abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> f64,
    {
        let s = self.scale();
        match *self {
            Self::Gaussian { .. } | Self::Laplace { .. } | Self::GeneralizedGaussian { .. } => {
                integrate_pieces(
                    |u| s * f(s * u),
                    &[f64::NEG_INFINITY, -1.0, 0.0, 1.0, f64::INFINITY],
                    abs_tol,
                    rel_tol,
                )
            }
            Self::Exponential { .. } => integrate_pieces(
                |u| s * f(s * u),
                &[0.0, 1.0, f64::INFINITY],
                abs_tol,
                rel_tol,
            ),
            Self::GeneralizedGamma { .. } => integrate_log_scale(f, s, abs_tol, rel_tol),
            Self::Uniform { lo, hi } => integrate_pieces(f, &[lo, hi], abs_tol, rel_tol),
        }
    }

    /// `E[g(Z, ln p_Z(Z))]` by quadrature. Points where the density vanishes
    /// contribute zero.
    pub fn expect<G>(&self, g: G, abs_tol: f64, rel_tol: f64) -> Result<f64>
    where
        G: Fn(f64, f64) -> f64,
    {
        self.integrate(
            |z| {
                let lp = self.log_pdf(z);
                let p = lp.exp();
                if p == 0.0 || lp == f64::NEG_INFINITY {
                    0.0
                } else {
                    p * g(z, lp)
                }
            },
            abs_tol,
            rel_tol,
        )?
        .require()
    }

    pub fn sample_one(&self, rng: &mut RandomStream) -> f64 {
        match *self {
            Self::Gaussian { sigma } => {
                let n: f64 = StandardNormal.sample(rng);
                sigma * n
            }
            Self::Exponential { lambda } => {
                let e: f64 = Exp1.sample(rng);
                e / lambda
            }
            Self::Laplace { scale } => {
                let e: f64 = Exp1.sample(rng);
                if rng.uniform() < 0.5 {
                    -scale * e
                } else {
                    scale * e
                }
            }
            Self::GeneralizedGaussian { p, sigma } => {
                // |Z|^p / (2 sigma^p) ~ Gamma(1/p, 1)
                let g: f64 = Gamma::new(1.0 / p, 1.0).expect("valid shape").sample(rng);
                let mag = sigma * (2.0 * g).powf(1.0 / p);
                if rng.uniform() < 0.5 {
                    -mag
                } else {
                    mag
                }
            }
            Self::GeneralizedGamma { r, sigma, beta } => {
                let g: f64 = Gamma::new(r, 1.0).expect("valid shape").sample(rng);
                sigma * g.powf(1.0 / beta)
            }
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform(),
        }
    }

    pub fn sample(&self, rng: &mut RandomStream, count: usize) -> Vec<f64> {
        match *self {
            // Reuse one gamma sampler rather than rebuilding it per draw.
            Self::GeneralizedGaussian { p, sigma } => {
                let gamma = Gamma::new(1.0 / p, 1.0).expect("valid shape");
                (0..count)
                    .map(|_| {
                        let g: f64 = gamma.sample(rng);
                        let mag = sigma * (2.0 * g).powf(1.0 / p);
                        if rng.uniform() < 0.5 {
                            -mag
                        } else {
                            mag
                        }
                    })
                    .collect()
            }
            Self::GeneralizedGamma { r, sigma, beta } => {
                let gamma = Gamma::new(r, 1.0).expect("valid shape");
                (0..count)
                    .map(|_| {
                        let g: f64 = gamma.sample(rng);
                        sigma * g.powf(1.0 / beta)
                    })
                    .collect()
            }
            _ => (0..count).map(|_| self.sample_one(rng)).collect(),
        }
    }

    /// Closed-form `Var[ln p_Z(Z)]`.
    pub fn log_pdf_variance(&self) -> LogPdfVariance {
        let value = match *self {
            Self::Gaussian { .. } => 0.5,
            Self::Exponential { .. } | Self::Laplace { .. } => 1.0,
            Self::GeneralizedGaussian { p, .. } => 1.0 / p,
            Self::GeneralizedGamma { r, beta, .. } => ggamma_log_pdf_variance(r, beta),
            Self::Uniform { .. } => 0.0,
        };
        LogPdfVariance {
            value,
            degenerate: self.is_degenerate_uniform(),
        }
    }

    /// `Var[ln p_Z(Z)]` by direct quadrature of the first two moments.
    pub fn log_pdf_variance_quadrature(&self) -> Result<f64> {
        let m1 = self.expect(|_, lp| lp, FINE_ABS_TOL, FINE_REL_TOL)?;
        let m2 = self.expect(|_, lp| (lp - m1) * (lp - m1), FINE_ABS_TOL, FINE_REL_TOL)?;
        Ok(m2)
    }

    /// Closed-form differential entropy in nats.
    pub fn differential_entropy(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma } => 0.5 * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln(),
            Self::Exponential { lambda } => 1.0 - lambda.ln(),
            Self::Laplace { scale } => 1.0 + (2.0 * scale).ln(),
            Self::GeneralizedGaussian { p, sigma } => sigma.ln() - ln_gg_constant(p) + 1.0 / p,
            Self::GeneralizedGamma { r, sigma, beta } => {
                ln_gamma_pos(r) + sigma.ln() - beta.ln() + r + (1.0 / beta - r) * digamma_pos(r)
            }
            Self::Uniform { lo, hi } => (hi - lo).ln(),
        }
    }

    /// `-E[ln p_Z(Z)]` by quadrature.
    pub fn differential_entropy_quadrature(&self) -> Result<f64> {
        Ok(-self.expect(|_, lp| lp, FINE_ABS_TOL, FINE_REL_TOL)?)
    }

    /// Cumulative distribution function, where a closed form is at hand.
    pub fn cdf(&self, z: f64) -> Option<f64> {
        match *self {
            Self::Gaussian { sigma } => Some(0.5 * libm::erfc(-z / (sigma * SQRT_2))),
            Self::Exponential { lambda } => Some(if z <= 0.0 {
                0.0
            } else {
                -(-lambda * z).exp_m1()
            }),
            Self::Laplace { scale } => Some(if z < 0.0 {
                0.5 * (z / scale).exp()
            } else {
                1.0 - 0.5 * (-z / scale).exp()
            }),
            Self::Uniform { lo, hi } => Some(((z - lo) / (hi - lo)).clamp(0.0, 1.0)),
            Self::GeneralizedGaussian { .. } | Self::GeneralizedGamma { .. } => None,
        }
    }

    /// Characteristic function `E[exp(i t Z)]`. Closed form where available,
    /// otherwise quadrature of the cosine and sine parts.
    pub fn charfn(&self, t: f64) -> Result<Complex64> {
        Ok(match *self {
            Self::Gaussian { sigma } => Complex64::new((-0.5 * sigma * sigma * t * t).exp(), 0.0),
            Self::Exponential { lambda } => {
                Complex64::new(lambda, 0.0) / Complex64::new(lambda, -t)
            }
            Self::Laplace { scale } => Complex64::new(1.0 / (1.0 + scale * scale * t * t), 0.0),
            Self::Uniform { lo, hi } => {
                if t == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    let num = Complex64::new(0.0, t * hi).exp() - Complex64::new(0.0, t * lo).exp();
                    num / Complex64::new(0.0, t * (hi - lo))
                }
            }
            Self::GeneralizedGaussian { .. } | Self::GeneralizedGamma { .. } => {
                self.charfn_quadrature(t)?
            }
        })
    }

    pub fn charfn_quadrature(&self, t: f64) -> Result<Complex64> {
        let re = self.expect(|z, _| (t * z).cos(), 1e-12, 1e-10)?;
        let im = self.expect(|z, _| (t * z).sin(), 1e-12, 1e-10)?;
        Ok(Complex64::new(re, im))
    }

    /// Parameters as `(name, value)` pairs, in canonical order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::Gaussian { sigma } => vec![("sigma", sigma)],
            Self::Exponential { lambda } => vec![("lambda", lambda)],
            Self::Laplace { scale } => vec![("scale", scale)],
            Self::GeneralizedGaussian { p, sigma } => vec![("p", p), ("sigma", sigma)],
            Self::GeneralizedGamma { r, sigma, beta } => {
                vec![("r", r), ("sigma", sigma), ("beta", beta)]
            }
            Self::Uniform { lo, hi } => vec![("lo", lo), ("hi", hi)],
        }
    }

    /// Builds a model from a family name and named parameters. Unknown or
    /// missing parameters are rejected.
    pub fn from_params(family: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let expected: &[&str] = match family {
            "gaussian" => &["sigma"],
            "exponential" => &["lambda"],
            "laplace" => &["scale"],
            "gg" => &["p", "sigma"],
            "ggamma" => &["r", "sigma", "beta"],
            "uniform" => &["lo", "hi"],
            other => return Err(Error::InvalidModel(format!("unknown family '{other}'"))),
        };
        if let Some(extra) = params.keys().find(|k| !expected.contains(&k.as_str())) {
            return Err(Error::InvalidModel(format!(
                "unknown parameter '{extra}' for family '{family}'"
            )));
        }
        let get = |name: &str| {
            params.get(name).copied().ok_or_else(|| {
                Error::InvalidModel(format!("missing parameter '{name}' for family '{family}'"))
            })
        };
        match family {
            "gaussian" => Self::gaussian(get("sigma")?),
            "exponential" => Self::exponential(get("lambda")?),
            "laplace" => Self::laplace(get("scale")?),
            "gg" => Self::generalized_gaussian(get("p")?, get("sigma")?),
            "ggamma" => Self::generalized_gamma(get("r")?, get("sigma")?, get("beta")?),
            _ => Self::uniform(get("lo")?, get("hi")?),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family_name())?;
        for (i, (name, value)) in self.params().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}={value}")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSpec {
    family: String,
    params: BTreeMap<String, f64>,
}

impl Serialize for NoiseModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ModelSpec {
            family: self.family_name().to_string(),
            params: self
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NoiseModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = ModelSpec::deserialize(deserializer)?;
        NoiseModel::from_params(&spec.family, &spec.params).map_err(serde::de::Error::custom)
    }
}

/// `Var[ln p_Z(Z)]` with its degenerate-case flag (uniform noise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogPdfVariance {
    pub value: f64,
    pub degenerate: bool,
}

/// `(r - 1/beta)^2 psi'(r) - r + 2/beta`.
pub fn ggamma_log_pdf_variance(r: f64, beta: f64) -> f64 {
    let d = r - 1.0 / beta;
    d * d * trigamma_pos(r) - r + 2.0 / beta
}

/// Anything with a log-density that can be integrated over its support.
pub trait Density {
    fn log_density(&self, z: f64) -> f64;
    fn integrate_support(
        &self,
        f: &dyn Fn(f64) -> f64,
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<QuadratureResult>;
}

impl Density for NoiseModel {
    fn log_density(&self, z: f64) -> f64 {
        self.log_pdf(z)
    }

    fn integrate_support(
        &self,
        f: &dyn Fn(f64) -> f64,
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<QuadratureResult> {
        self.integrate(f, abs_tol, rel_tol)
    }
}

/// The three integrals `∫ p (ln p)^4`, `∫ p^ζ`, `∫ p^ζ (ln p)^4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub zeta: f64,
    pub integral_plain_log4: f64,
    pub integral_zeta: f64,
    pub integral_zeta_log4: f64,
    pub all_finite: bool,
    /// Names of the integrals that failed to converge.
    pub divergent: Vec<&'static str>,
    /// `sup_ν ∫ p^ν |ln p|^k` spot checks for `k = 0..=4`, `ν ∈ {ζ, (1+ζ)/2, 1}`.
    pub uniform_bound_spot_checks: Vec<f64>,
}

pub fn integrability_check(model: &NoiseModel, zeta: f64) -> Result<IntegrabilityReport> {
    integrability_check_density(model, zeta)
}

/// Evaluates the integrability conditions for any density. A term whose
/// quadrature fails to converge (or is infinite) is reported as divergent.
pub fn integrability_check_density<D: Density + ?Sized>(
    density: &D,
    zeta: f64,
) -> Result<IntegrabilityReport> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::Domain(format!(
            "zeta must lie in (0, 1), got {zeta}"
        )));
    }
    let term = |nu: f64, k: i32| -> Result<QuadratureResult> {
        density.integrate_support(
            &|z| {
                let lp = density.log_density(z);
                if lp == f64::NEG_INFINITY {
                    return 0.0;
                }
                let w = (nu * lp).exp();
                if w == 0.0 {
                    0.0
                } else {
                    w * lp.abs().powi(k)
                }
            },
            1e-10,
            1e-8,
        )
    };
    let finite = |r: &QuadratureResult| r.converged && r.value.is_finite();

    let plain = term(1.0, 4)?;
    let zeta_only = term(zeta, 0)?;
    let zeta_log4 = term(zeta, 4)?;
    let mut divergent = Vec::new();
    if !finite(&plain) {
        divergent.push("integral_plain_log4");
    }
    if !finite(&zeta_only) {
        divergent.push("integral_zeta");
    }
    if !finite(&zeta_log4) {
        divergent.push("integral_zeta_log4");
    }

    let mut spot = Vec::new();
    if divergent.is_empty() {
        for k in 0..=4 {
            let mut worst = 0.0f64;
            for nu in [zeta, 0.5 * (1.0 + zeta), 1.0] {
                let r = term(nu, k)?;
                worst = worst.max(if finite(&r) { r.value } else { f64::INFINITY });
            }
            spot.push(worst);
        }
    }

    Ok(IntegrabilityReport {
        zeta,
        integral_plain_log4: plain.value,
        integral_zeta: zeta_only.value,
        integral_zeta_log4: zeta_log4.value,
        all_finite: divergent.is_empty(),
        divergent,
        uniform_bound_spot_checks: spot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_rng;

    pub(crate) fn catalog() -> Vec<NoiseModel> {
        vec![
            NoiseModel::gaussian(1.0).unwrap(),
            NoiseModel::gaussian(0.5).unwrap(),
            NoiseModel::gaussian(2.0).unwrap(),
            NoiseModel::exponential(1.0).unwrap(),
            NoiseModel::exponential(0.5).unwrap(),
            NoiseModel::exponential(3.0).unwrap(),
            NoiseModel::laplace(1.0).unwrap(),
            NoiseModel::laplace(0.3).unwrap(),
            NoiseModel::laplace(2.5).unwrap(),
            NoiseModel::generalized_gaussian(0.5, 1.0).unwrap(),
            NoiseModel::generalized_gaussian(1.0, 2.0).unwrap(),
            NoiseModel::generalized_gaussian(4.0, 0.7).unwrap(),
            NoiseModel::generalized_gamma(2.0, 1.0, 1.0).unwrap(),
            NoiseModel::generalized_gamma(0.5, 1.0, 0.5).unwrap(),
            NoiseModel::generalized_gamma(3.0, 2.0, 1.5).unwrap(),
            NoiseModel::generalized_gamma(0.7, 1.3, 2.0).unwrap(),
            NoiseModel::uniform(0.0, 1.0).unwrap(),
            NoiseModel::uniform(-1.0, 3.0).unwrap(),
        ]
    }

    #[test]
    fn log_pdf_examples() {
        assert_eq!(NoiseModel::exponential(1.0).unwrap().log_pdf(0.0), 0.0);
        let g = NoiseModel::gaussian(1.0).unwrap().log_pdf(0.0);
        assert!((g + 0.918_938_533_204_672_7).abs() < 1e-15);
        let gg = NoiseModel::generalized_gamma(2.0, 1.0, 1.0)
            .unwrap()
            .log_pdf(1.0);
        assert!((gg + 1.0).abs() < 1e-14);
        assert_eq!(
            NoiseModel::exponential(1.0).unwrap().log_pdf(-0.1),
            f64::NEG_INFINITY
        );
        assert_eq!(
            NoiseModel::uniform(0.0, 1.0).unwrap().log_pdf(1.5),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn gg_with_p_two_is_gaussian() {
        let gg = NoiseModel::generalized_gaussian(2.0, 1.3).unwrap();
        let g = NoiseModel::gaussian(1.3).unwrap();
        for z in [-2.0, -0.1, 0.0, 0.7, 3.0] {
            assert!((gg.log_pdf(z) - g.log_pdf(z)).abs() < 1e-13);
        }
        assert!((gg_constant(2.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn densities_integrate_to_one() {
        for m in catalog() {
            let r = m.integrate(|z| m.pdf(z), 1e-12, 1e-12).unwrap();
            assert!(r.converged, "{m}");
            assert!((r.value - 1.0).abs() < 1e-8, "{m}: {}", r.value);
        }
    }

    #[test]
    fn closed_form_variance_matches_quadrature() {
        for m in catalog() {
            let closed = m.log_pdf_variance().value;
            let quad = m.log_pdf_variance_quadrature().unwrap();
            assert!((closed - quad).abs() < 1e-6, "{m}: {closed} vs {quad}");
        }
    }

    #[test]
    fn closed_form_entropy_matches_quadrature() {
        for m in catalog() {
            let closed = m.differential_entropy();
            let quad = m.differential_entropy_quadrature().unwrap();
            assert!((closed - quad).abs() < 1e-6, "{m}: {closed} vs {quad}");
        }
    }

    #[test]
    fn variance_examples() {
        assert_eq!(
            NoiseModel::exponential(1.0)
                .unwrap()
                .log_pdf_variance()
                .value,
            1.0
        );
        assert_eq!(
            NoiseModel::generalized_gaussian(2.0, 1.0)
                .unwrap()
                .log_pdf_variance()
                .value,
            0.5
        );
        let v = NoiseModel::generalized_gamma(1.0, 1.0, 1.0)
            .unwrap()
            .log_pdf_variance()
            .value;
        assert!((v - 1.0).abs() < 1e-15);
        let u = NoiseModel::uniform(0.0, 1.0).unwrap().log_pdf_variance();
        assert_eq!(u.value, 0.0);
        assert!(u.degenerate);
    }

    #[test]
    fn gg_variance_is_scale_free() {
        for p in [0.5, 1.0, 2.0, 4.0] {
            let base = NoiseModel::generalized_gaussian(p, 1.0)
                .unwrap()
                .log_pdf_variance()
                .value;
            for sigma in [0.5, 2.0] {
                let v = NoiseModel::generalized_gaussian(p, sigma)
                    .unwrap()
                    .log_pdf_variance()
                    .value;
                assert!((v - base).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn entropy_examples() {
        let g = NoiseModel::gaussian(1.0).unwrap().differential_entropy();
        assert!((g - 1.418_938_533_204_672_7).abs() < 1e-14);
        assert_eq!(
            NoiseModel::exponential(1.0).unwrap().differential_entropy(),
            1.0
        );
        let gg = NoiseModel::generalized_gamma(2.0, 1.0, 1.0).unwrap();
        let expected = 2.0 - digamma_pos(2.0);
        assert!((gg.differential_entropy() - expected).abs() < 1e-14);
        assert!((gg.differential_entropy_quadrature().unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn sampler_moments() {
        let mut rng = make_rng(11);
        let xs = NoiseModel::exponential(2.0)
            .unwrap()
            .sample(&mut rng, 1_000_000);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.0015, "{mean}");

        let ys = NoiseModel::gaussian(1.0)
            .unwrap()
            .sample(&mut rng, 1_000_000);
        let m = ys.iter().sum::<f64>() / ys.len() as f64;
        let var = ys.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / (ys.len() - 1) as f64;
        assert!((var - 1.0).abs() < 0.005, "{var}");

        assert!(NoiseModel::laplace(1.0)
            .unwrap()
            .sample(&mut rng, 0)
            .is_empty());
    }

    #[test]
    fn sampled_log_pdf_moments_within_four_standard_errors() {
        let mut rng = make_rng(5);
        let n = 1_000_000;
        for m in catalog() {
            let lps: Vec<f64> = m
                .sample(&mut rng, n)
                .into_iter()
                .map(|z| m.log_pdf(z))
                .collect();
            let mean = lps.iter().sum::<f64>() / n as f64;
            let centered: Vec<f64> = lps.iter().map(|l| (l - mean) * (l - mean)).collect();
            let var = centered.iter().sum::<f64>() / (n - 1) as f64;
            let h = m.differential_entropy();
            let v = m.log_pdf_variance().value;
            if m.is_degenerate_uniform() {
                assert!((mean + h).abs() < 1e-9 && var < 1e-18);
                continue;
            }
            let se_mean = (v / n as f64).sqrt();
            assert!(
                (mean + h).abs() < 4.0 * se_mean,
                "{m}: mean {mean} vs {}",
                -h
            );
            let var_of_sq =
                centered.iter().map(|c| (c - var) * (c - var)).sum::<f64>() / (n - 1) as f64;
            let se_var = (var_of_sq / n as f64).sqrt();
            assert!((var - v).abs() < 4.0 * se_var, "{m}: var {var} vs {v}");
        }
    }

    #[test]
    fn integrability_of_catalog() {
        for m in [
            NoiseModel::exponential(1.0).unwrap(),
            NoiseModel::gaussian(1.0).unwrap(),
            NoiseModel::generalized_gaussian(0.5, 1.0).unwrap(),
            NoiseModel::generalized_gamma(0.5, 1.0, 0.5).unwrap(),
        ] {
            let r = integrability_check(&m, DEFAULT_ZETA).unwrap();
            assert!(r.all_finite, "{m}: {r:?}");
            assert_eq!(r.uniform_bound_spot_checks.len(), 5);
            assert!(r.uniform_bound_spot_checks.iter().all(|v| v.is_finite()));
        }
        // ∫ e^{-z/2} z^4 dz = 2^5 * 4!
        let r = integrability_check(&NoiseModel::exponential(1.0).unwrap(), 0.5).unwrap();
        assert!((r.integral_zeta_log4 - 768.0).abs() < 1e-6);
        assert!((r.integral_zeta - 2.0).abs() < 1e-9);
        assert!((r.integral_plain_log4 - 24.0).abs() < 1e-8);
    }

    /// Standard Cauchy: `∫ p^ζ` diverges for every ζ ≤ 1/2.
    struct Cauchy;

    impl Density for Cauchy {
        fn log_density(&self, z: f64) -> f64 {
            -(PI * (1.0 + z * z)).ln()
        }

        fn integrate_support(
            &self,
            f: &dyn Fn(f64) -> f64,
            abs_tol: f64,
            rel_tol: f64,
        ) -> Result<QuadratureResult> {
            crate::numerics::integrate(f, Interval::real_line(), abs_tol, rel_tol)
        }
    }

    #[test]
    fn heavy_tail_fails_integrability() {
        let r = integrability_check_density(&Cauchy, 0.4).unwrap();
        assert!(!r.all_finite);
        assert!(r.divergent.contains(&"integral_zeta"));
        assert!(r.divergent.contains(&"integral_zeta_log4"));
        assert!(!r.divergent.contains(&"integral_plain_log4"));
    }

    #[test]
    fn zeta_out_of_range() {
        let m = NoiseModel::gaussian(1.0).unwrap();
        assert!(integrability_check(&m, 0.0).is_err());
        assert!(integrability_check(&m, 1.0).is_err());
    }

    #[test]
    fn degenerate_flag() {
        assert!(NoiseModel::uniform(0.0, 1.0)
            .unwrap()
            .is_degenerate_uniform());
        assert!(!NoiseModel::exponential(1.0)
            .unwrap()
            .is_degenerate_uniform());
        assert!(!NoiseModel::gaussian(1.0).unwrap().is_degenerate_uniform());
    }

    #[test]
    fn json_shape_and_validation() {
        let m = NoiseModel::generalized_gamma(2.0, 1.0, 0.5).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"family":"ggamma","params":{"beta":0.5,"r":2.0,"sigma":1.0}}"#
        );
        let back: NoiseModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<NoiseModel>(
            r#"{"family":"gaussian","params":{"sigma":-1}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<NoiseModel>(
            r#"{"family":"gaussian","params":{"sigma":1,"mu":0}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<NoiseModel>(r#"{"family":"cauchy","params":{}}"#).is_err());
        assert!(serde_json::from_str::<NoiseModel>(
            r#"{"family":"gaussian","params":{"sigma":1},"x":1}"#
        )
        .is_err());
    }

    #[test]
    fn numeric_charfn_matches_closed_form() {
        let laplace = NoiseModel::laplace(0.8).unwrap();
        let as_gg = NoiseModel::generalized_gaussian(1.0, 0.4).unwrap();
        for t in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            let a = laplace.charfn(t).unwrap();
            let b = as_gg.charfn_quadrature(t).unwrap();
            assert!((a - b).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn max_density_bounds_pdf() {
        for m in catalog() {
            let Some(b) = m.max_density() else { continue };
            let mut rng = make_rng(1);
            for z in m.sample(&mut rng, 2000) {
                assert!(m.pdf(z) <= b * (1.0 + 1e-12), "{m}");
            }
        }
        assert!(NoiseModel::generalized_gamma(0.5, 1.0, 0.5)
            .unwrap()
            .max_density()
            .is_none());
    }
}
