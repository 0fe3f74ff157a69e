//! Log-gamma, digamma and trigamma on the positive half-line.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

// B_{2k} / (2k) for the digamma tail.
const DIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];
// B_{2k} for the trigamma tail.
const TRIGAMMA_ASYMP: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

fn check_domain(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} requires a finite x > 0, got {x}"
        )))
    }
}

pub fn log_gamma(x: f64) -> Result<f64> {
    check_domain("log_gamma", x)?;
    Ok(ln_gamma_pos(x))
}

pub fn digamma(x: f64) -> Result<f64> {
    check_domain("digamma", x)?;
    Ok(digamma_pos(x))
}

pub fn trigamma(x: f64) -> Result<f64> {
    check_domain("trigamma", x)?;
    Ok(trigamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (x + 0.5) * t.ln() - t + acc.ln()
}

pub(crate) fn digamma_pos(x: f64) -> f64 {
    let mut result = 0.0;
    let mut xx = x;
    while xx < 10.0 {
        result -= 1.0 / xx;
        xx += 1.0;
    }
    result += xx.ln() - 0.5 / xx;
    let inv2 = 1.0 / (xx * xx);
    let mut term = inv2;
    for c in DIGAMMA_ASYMP {
        result -= c * term;
        term *= inv2;
    }
    result
}

pub(crate) fn trigamma_pos(x: f64) -> f64 {
    let mut result = 0.0;
    let mut xx = x;
    while xx < 10.0 {
        result += 1.0 / (xx * xx);
        xx += 1.0;
    }
    let inv = 1.0 / xx;
    let inv2 = inv * inv;
    result += inv + 0.5 * inv2;
    let mut term = inv2 * inv;
    for b in TRIGAMMA_ASYMP {
        result += b * term;
        term *= inv2;
    }
    result
}
