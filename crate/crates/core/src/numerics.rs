//! Log-gamma, beta densities and a quadrature check on conjugate posterior means.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::BetaHyper;

const LANCZOS_G: f64 = 7.0;

// Lanczos coefficients for g = 7, n = 9 (as published with the GNU Scientific Library).
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
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

/// Natural log of the gamma function for `x > 0`.
///
/// Lanczos approximation for `x ≥ 0.5`, reflection formula below that.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::Domain { what: "ln_gamma argument", value: x });
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1−x) = π / sin(πx), and sin(πx) > 0 on (0, 0.5)
        return PI.ln() - (PI * x).sin().ln() - ln_gamma_positive(1.0 - x);
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// Beta density at `theta`, evaluated in log space.
pub fn beta_pdf(theta: f64, hyper: BetaHyper) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain { what: "beta density argument", value: theta });
    }
    let (a, b) = (hyper.a(), hyper.b());
    let log_density = (a - 1.0) * theta.ln() + (b - 1.0) * (-theta).ln_1p() - ln_beta(a, b)?;
    Ok(log_density.exp())
}

/// A beta density sampled on an open grid, ready for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub hyper: BetaHyper,
    pub points: Vec<(f64, f64)>,
}

impl DensityCurve {
    /// Trapezoidal integral over the span of the grid.
    pub fn integral(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum()
    }

    /// Grid point with the largest density.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.points.iter().copied().reduce(|best, p| if p.1 > best.1 { p } else { best })
    }
}

pub const MIN_CURVE_POINTS: usize = 16;

/// Evaluates the density at `θ_i = i / (grid_points + 1)`, `i = 1..=grid_points`.
///
/// Endpoints are excluded, since the density diverges there when a shape is below 1.
pub fn density_curve(hyper: BetaHyper, grid_points: usize) -> Result<DensityCurve> {
    if grid_points < MIN_CURVE_POINTS {
        return Err(Error::GridTooSmall { min: MIN_CURVE_POINTS, found: grid_points });
    }
    let step = 1.0 / (grid_points + 1) as f64;
    let points = (1..=grid_points)
        .map(|i| {
            let theta = i as f64 * step;
            beta_pdf(theta, hyper).map(|d| (theta, d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityCurve { hyper, points })
}

pub const MIN_ORACLE_POINTS: usize = 1000;

/// Posterior mean of `θ` under a `Beta(a, b)` prior after `count` successes in
/// `total` trials, by direct numerical integration of likelihood × prior.
///
/// This never uses the conjugate update; it integrates
/// `θ^c (1−θ)^(n−c) · θ^(a−1) (1−θ)^(b−1)` with and without an extra factor of
/// `θ` and takes the ratio. The trapezoidal rule runs on an open grid in `u`,
/// where `logit θ = k · logit u`. For `k` large enough the transformed integrand
/// vanishes smoothly at both ends of `(0, 1)`, so shapes below 1 do not
/// leave unresolved mass at the endpoints.
pub fn posterior_mean_oracle(
    prior: BetaHyper,
    count: u64,
    total: u64,
    grid_points: usize,
) -> Result<f64> {
    if count > total {
        return Err(Error::InconsistentCount { count, total });
    }
    if grid_points < MIN_ORACLE_POINTS {
        return Err(Error::GridTooSmall { min: MIN_ORACLE_POINTS, found: grid_points });
    }
    // exponents of θ and 1−θ in the unnormalized posterior after the change of variable
    let alpha = count as f64 + prior.a();
    let beta = (total - count) as f64 + prior.b();
    let k = (4.0 / alpha.min(beta)).max(1.0);

    let step = 1.0 / (grid_points + 1) as f64;
    let mut log_den = Vec::with_capacity(grid_points);
    let mut log_theta = Vec::with_capacity(grid_points);
    for i in 1..=grid_points {
        let u = i as f64 * step;
        let x = k * (u.ln() - (-u).ln_1p());
        // ln θ and ln(1−θ) for θ = 1 / (1 + e^(−x)), computed without cancellation
        let ln_t = -softplus(-x);
        let ln_1mt = -softplus(x);
        // dθ/du = k θ (1−θ) / (u (1−u))
        let jac = k.ln() + ln_t + ln_1mt - u.ln() - (-u).ln_1p();
        log_den.push((alpha - 1.0) * ln_t + (beta - 1.0) * ln_1mt + jac);
        log_theta.push(ln_t);
    }
    let peak = log_den.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (num, den) = log_den.iter().zip(&log_theta).fold((0.0, 0.0), |(num, den), (ld, lt)| {
        let w = (ld - peak).exp();
        (num + w * lt.exp(), den + w)
    });
    // both integrands vanish at u = 0 and u = 1, so the trapezoid rule is
    // the plain sum of interior values; the common step cancels in the ratio
    Ok(num / den)
}

/// `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}
