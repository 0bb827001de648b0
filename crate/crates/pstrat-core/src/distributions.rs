//! Marginal input distributions and inverse-CDF transform sampling.
//!
//! Sampling designs are constructed in the unit hypercube and mapped to
//! physical space coordinate-wise through [`MarginalDistribution::inverse_cdf`],
//! so stratification bounds are always probability bounds.

use crate::error::{Error, Result};
use alloc::format;

const SQRT_2: f64 = core::f64::consts::SQRT_2;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A one-dimensional input distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum MarginalDistribution {
    Uniform { lower: f64, upper: f64 },
    Normal { mean: f64, std_dev: f64 },
    Lognormal { mu_log: f64, sigma_log: f64 },
}

impl MarginalDistribution {
    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() || lower >= upper {
            return Err(Error::Domain(format!(
                "uniform bounds must be finite with lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(MarginalDistribution::Uniform { lower, upper })
    }

    pub fn normal(mean: f64, std_dev: f64) -> Result<Self> {
        if !mean.is_finite() || !std_dev.is_finite() || std_dev <= 0.0 {
            return Err(Error::Domain(format!(
                "normal requires finite mean and std_dev > 0, got ({mean}, {std_dev})"
            )));
        }
        Ok(MarginalDistribution::Normal { mean, std_dev })
    }

    pub fn lognormal(mu_log: f64, sigma_log: f64) -> Result<Self> {
        if !mu_log.is_finite() || !sigma_log.is_finite() || sigma_log <= 0.0 {
            return Err(Error::Domain(format!(
                "lognormal requires finite log-mean and log-std > 0, got ({mu_log}, {sigma_log})"
            )));
        }
        Ok(MarginalDistribution::Lognormal { mu_log, sigma_log })
    }

    /// Build a lognormal from its physical mean and coefficient of variation
    /// (stddev divided by mean): `sigma_log^2 = ln(1 + cov^2)` and
    /// `mu_log = ln(mean) - sigma_log^2 / 2`.
    pub fn lognormal_from_mean_cov(mean: f64, cov: f64) -> Result<Self> {
        if !(mean > 0.0) || !mean.is_finite() {
            return Err(Error::Domain(format!("lognormal mean must be positive, got {mean}")));
        }
        if !(cov > 0.0) || !cov.is_finite() {
            return Err(Error::Domain(format!("lognormal cov must be positive, got {cov}")));
        }
        let sigma2 = libm::log1p(cov * cov);
        let mu = libm::log(mean) - 0.5 * sigma2;
        Self::lognormal(mu, libm::sqrt(sigma2))
    }

    /// Cumulative distribution function. `x` must lie in the support.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain("cdf argument is NaN".into()));
        }
        match *self {
            MarginalDistribution::Uniform { lower, upper } => {
                if x < lower || x > upper {
                    Err(Error::Domain(format!("{x} outside uniform support [{lower}, {upper}]")))
                } else {
                    Ok((x - lower) / (upper - lower))
                }
            }
            MarginalDistribution::Normal { mean, std_dev } => {
                Ok(standard_normal_cdf((x - mean) / std_dev))
            }
            MarginalDistribution::Lognormal { mu_log, sigma_log } => {
                if x <= 0.0 {
                    Err(Error::Domain(format!("{x} outside lognormal support (0, inf)")))
                } else {
                    Ok(standard_normal_cdf((libm::log(x) - mu_log) / sigma_log))
                }
            }
        }
    }

    /// Quantile function, defined on the open interval 0 < u < 1.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("inverse_cdf requires 0 < u < 1, got {u}")));
        }
        Ok(match *self {
            MarginalDistribution::Uniform { lower, upper } => lower + u * (upper - lower),
            MarginalDistribution::Normal { mean, std_dev } => {
                mean + std_dev * standard_normal_quantile(u)
            }
            MarginalDistribution::Lognormal { mu_log, sigma_log } => {
                libm::exp(mu_log + sigma_log * standard_normal_quantile(u))
            }
        })
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m1 = self.raw_moment(1);
        self.raw_moment(2) - m1 * m1
    }

    /// Raw moment E[X^r] for r in 1..=4. Exposed for closed-form expectations
    /// of polynomial responses.
    pub fn raw_moment(&self, r: u32) -> f64 {
        assert!((1..=4).contains(&r), "raw moments implemented for r = 1..=4");
        match *self {
            MarginalDistribution::Uniform { lower, upper } => {
                // (b^{r+1} - a^{r+1}) / ((r+1)(b-a))
                let mut num = 0.0;
                for k in 0..=r {
                    num += libm::pow(lower, k as f64) * libm::pow(upper, (r - k) as f64);
                }
                num / (r + 1) as f64
            }
            MarginalDistribution::Normal { mean: m, std_dev } => {
                let v = std_dev * std_dev;
                match r {
                    1 => m,
                    2 => m * m + v,
                    3 => m * m * m + 3.0 * m * v,
                    _ => m * m * m * m + 6.0 * m * m * v + 3.0 * v * v,
                }
            }
            MarginalDistribution::Lognormal { mu_log, sigma_log } => {
                let rf = r as f64;
                libm::exp(rf * mu_log + 0.5 * rf * rf * sigma_log * sigma_log)
            }
        }
    }

    /// Support endpoints; infinite endpoints mark unbounded tails.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            MarginalDistribution::Uniform { lower, upper } => (lower, upper),
            MarginalDistribution::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            MarginalDistribution::Lognormal { .. } => (0.0, f64::INFINITY),
        }
    }
}

pub(crate) fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

fn standard_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * z * z)
}

/// Standard normal quantile: rational approximation refined with one Newton
/// step against the erfc-based CDF. Absolute error below 1e-9 for
/// u in [1e-12, 1 - 1e-12].
pub(crate) fn standard_normal_quantile(u: f64) -> f64 {
    // fold onto the lower half: 1 - u is exact for u >= 0.5, and the
    // erfc-based CDF is relative-accurate only toward the lower tail
    if u > 0.5 {
        return -standard_normal_quantile(1.0 - u);
    }
    let x = rational_quantile_approx(u);
    let err = standard_normal_cdf(x) - u;
    x - err / standard_normal_pdf(x)
}

// Coefficients of the rational approximation (relative error < 1.15e-9).
const QA: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const QB: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const QC: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const QD: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

fn rational_quantile_approx(u: f64) -> f64 {
    if u < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(u));
        (((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    } else if u <= 1.0 - P_LOW {
        let q = u - 0.5;
        let r = q * q;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    } else {
        let q = libm::sqrt(-2.0 * libm::log(1.0 - u));
        -(((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    }
}
