//! Globally adaptive Gauss-Kronrod (10/21) quadrature.
//!
//! Infinite endpoints are removed by the substitutions `z = a + t/(1-t)` and
//! `z = b - t/(1-t)` on `t in [0, 1)`; a doubly infinite interval is split at
//! the origin first. Subintervals are bisected in order of decreasing error
//! estimate until the total estimate meets the requested tolerance or the
//! subdivision budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const MAX_SUBDIVISIONS: usize = 4000;

/// Integration domain. Either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::Domain(format!(
                "interval requires lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn real_line() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn half_line(lower: f64) -> Self {
        Self {
            lower,
            upper: f64::INFINITY,
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.lower && z <= self.upper
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub converged: bool,
}

impl QuadratureResult {
    /// Turns a non-converged result into an error carrying the partial value.
    pub fn require(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::QuadratureNotConverged {
                value: self.value,
                abs_error: self.abs_error_estimate,
            })
        }
    }

    fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            converged: self.converged && other.converged,
        }
    }
}

// Kronrod abscissae (positive half, descending) and weights; every other
// abscissa starting at index 1 is a 10-point Gauss node.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_557_013_548_210,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        scaled = res_asc * (200.0 * scaled / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 21-point Kronrod evaluation on `[a, b]`. `g` maps the working variable
/// to the integrand value and the abscissa reported on NaN.
fn gk21<G>(g: &G, a: f64, b: f64) -> Result<(f64, f64)>
where
    G: Fn(f64) -> (f64, f64),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let (v, at) = g(x);
        if v.is_nan() {
            Err(Error::NanIntegrand { abscissa: at })
        } else {
            Ok(v)
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let fa = eval(center - dx)?;
        let fb = eval(center + dx)?;
        f1[j] = fa;
        f2[j] = fb;
        res_k += WGK[j] * (fa + fb);
        res_abs += WGK[j] * (fa.abs() + fb.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (fa + fb);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = res_k * half;
    let err = rescale_error(
        (res_k - res_g) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    Ok((value, err))
}

fn adaptive<G>(g: G, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    G: Fn(f64) -> (f64, f64),
{
    let (value, error) = gk21(&g, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut resolution_limited = false;

    for _ in 0..MAX_SUBDIVISIONS {
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let resolution = 1e3 * f64::EPSILON * worst.a.abs().max(worst.b.abs());
        if !(mid > worst.a && mid < worst.b) || worst.b - worst.a <= resolution {
            // Still the worst segment at the floating-point resolution limit:
            // the integrand is not resolvable here (typically divergent).
            resolution_limited = true;
            frozen_value += worst.value;
            frozen_err += worst.error;
            continue;
        }
        let (v1, e1) = gk21(&g, worst.a, mid)?;
        let (v2, e2) = gk21(&g, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum to shed the drift of the running totals.
    let value = heap.iter().map(|s| s.value).sum::<f64>() + frozen_value;
    let abs_error_estimate = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    let converged = !resolution_limited && abs_error_estimate <= abs_tol.max(rel_tol * value.abs());
    Ok(QuadratureResult {
        value,
        abs_error_estimate,
        converged,
    })
}

/// Integrates `f` over `domain`.
///
/// Returns an error if the integrand produces NaN; a non-converged result is
/// returned with `converged == false` and the partial value.
pub fn integrate<F>(f: F, domain: Interval, abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(abs_tol > 0.0 && rel_tol > 0.0) {
        return Err(Error::Domain(
            "quadrature tolerances must be positive".into(),
        ));
    }
    let Interval { lower, upper } = domain;
    if lower.is_nan() || upper.is_nan() || lower >= upper {
        return Err(Error::Domain(format!("empty interval [{lower}, {upper}]")));
    }
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => adaptive(|x| (f(x), x), lower, upper, abs_tol, rel_tol),
        (true, false) => to_infinity(&f, lower, 1.0, abs_tol, rel_tol),
        (false, true) => to_infinity(&f, upper, -1.0, abs_tol, rel_tol),
        (false, false) => {
            let left = to_infinity(&f, 0.0, -1.0, 0.5 * abs_tol, rel_tol)?;
            let right = to_infinity(&f, 0.0, 1.0, 0.5 * abs_tol, rel_tol)?;
            Ok(left.combine(right))
        }
    }
}

/// Integral from `anchor` towards `direction * inf` through `z = anchor ± t/(1-t)`.
fn to_infinity(
    f: &dyn Fn(f64) -> f64,
    anchor: f64,
    direction: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    adaptive(
        |t| {
            let s = 1.0 - t;
            if s <= 0.0 {
                return (0.0, direction * f64::INFINITY);
            }
            let z = anchor + direction * t / s;
            (f(z) / (s * s), z)
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// Integrates over consecutive pieces `[b0, b1], [b1, b2], ...` and sums.
pub fn integrate_pieces<F>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    let mut acc = QuadratureResult {
        value: 0.0,
        abs_error_estimate: 0.0,
        converged: true,
    };
    for w in breaks.windows(2) {
        let part = integrate(
            &f,
            Interval {
                lower: w[0],
                upper: w[1],
            },
            abs_tol / pieces,
            rel_tol,
        )?;
        acc = acc.combine(part);
    }
    Ok(acc)
}

/// Integrates `g` over `(0, inf)` through `z = e^s`, which turns algebraic
/// singularities at the origin into exponentially decaying tails.
pub fn integrate_log_scale<F>(
    g: F,
    pivot: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    let shift = pivot.ln();
    let h = |s: f64| {
        let z = (s + shift).exp();
        if z == 0.0 || !z.is_finite() {
            return 0.0;
        }
        g(z) * z
    };
    integrate(h, Interval::real_line(), abs_tol, rel_tol)
}
