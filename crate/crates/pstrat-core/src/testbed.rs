//! Benchmark transformations with closed-form reference means.
//!
//! The catalogue spans the landscape the sampling designs are judged on:
//! purely additive responses (where marginal stratification filters all
//! variance), a zero-mean product (nothing but interactions), tunable
//! second-order polynomials, two classic high-dimensional functions, and a
//! six-variable plate buckling strength formula.

use crate::distributions::MarginalDistribution;
use crate::error::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
use libm::sqrt;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "id", rename_all = "snake_case"))]
pub enum TestFunction {
    /// (2/N) sum X_i
    Additive { dim: usize },
    /// prod X_i
    Product { dim: usize },
    /// X1^2 + X2^2 + c X1 X2
    QuadraticInteraction { c: f64 },
    /// sum alpha_k X_k^2 + sum beta_k X_{2k-1} X_{2k} + sum gamma_k X_k
    Polynomial2 {
        dim: usize,
        #[cfg_attr(feature = "serde", serde(default))]
        alpha: Vec<f64>,
        #[cfg_attr(feature = "serde", serde(default))]
        beta: Vec<f64>,
        #[cfg_attr(feature = "serde", serde(default))]
        gamma: Vec<f64>,
    },
    /// sum_{i<K} [100 (x_i^2 - x_{i+1})^2 + (x_i - 1)^2]
    Rosenbrock { dim: usize },
    /// sum_i (sum_{j<=i} x_j)^2
    Schwefel12 { dim: usize },
    /// Carlsen ultimate-strength factor phi(b, t, sigma0, E, delta0, eta)
    PlateBuckling,
}

impl TestFunction {
    pub fn additive(dim: usize) -> Result<Self> {
        positive_dim(dim)?;
        Ok(TestFunction::Additive { dim })
    }

    pub fn product(dim: usize) -> Result<Self> {
        positive_dim(dim)?;
        Ok(TestFunction::Product { dim })
    }

    pub fn quadratic_interaction(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Domain("interaction coefficient must be finite".into()));
        }
        Ok(TestFunction::QuadraticInteraction { c })
    }

    /// The declared dimension must cover every term: dim >= max(|alpha|,
    /// 2|beta|, |gamma|). Variables beyond the highest term index are inert.
    pub fn polynomial2(dim: usize, alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        positive_dim(dim)?;
        let needed = alpha.len().max(2 * beta.len()).max(gamma.len());
        if dim < needed {
            return Err(Error::Domain(format!(
                "polynomial terms need {needed} variables but dim is {dim}"
            )));
        }
        if alpha.iter().chain(&beta).chain(&gamma).any(|v| !v.is_finite()) {
            return Err(Error::Domain("polynomial coefficients must be finite".into()));
        }
        Ok(TestFunction::Polynomial2 { dim, alpha, beta, gamma })
    }

    pub fn rosenbrock(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain("rosenbrock needs at least 2 variables".into()));
        }
        Ok(TestFunction::Rosenbrock { dim })
    }

    pub fn schwefel12(dim: usize) -> Result<Self> {
        positive_dim(dim)?;
        Ok(TestFunction::Schwefel12 { dim })
    }

    pub fn id(&self) -> &'static str {
        match self {
            TestFunction::Additive { .. } => "additive",
            TestFunction::Product { .. } => "product",
            TestFunction::QuadraticInteraction { .. } => "quadratic_interaction",
            TestFunction::Polynomial2 { .. } => "polynomial2",
            TestFunction::Rosenbrock { .. } => "rosenbrock",
            TestFunction::Schwefel12 { .. } => "schwefel12",
            TestFunction::PlateBuckling => "plate_buckling",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Additive { dim }
            | TestFunction::Product { dim }
            | TestFunction::Polynomial2 { dim, .. }
            | TestFunction::Rosenbrock { dim }
            | TestFunction::Schwefel12 { dim } => *dim,
            TestFunction::QuadraticInteraction { .. } => 2,
            TestFunction::PlateBuckling => 6,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { declared: x.len(), expected: self.dim() });
        }
        match self {
            TestFunction::Additive { dim } => {
                let s: f64 = x.iter().sum();
                Ok(2.0 / *dim as f64 * s)
            }
            TestFunction::Product { .. } => Ok(x.iter().product()),
            TestFunction::QuadraticInteraction { c } => {
                Ok(x[0] * x[0] + x[1] * x[1] + c * x[0] * x[1])
            }
            TestFunction::Polynomial2 { alpha, beta, gamma, .. } => {
                let mut y = 0.0;
                for (k, &a) in alpha.iter().enumerate() {
                    y += a * x[k] * x[k];
                }
                for (k, &b) in beta.iter().enumerate() {
                    y += b * x[2 * k] * x[2 * k + 1];
                }
                for (k, &g) in gamma.iter().enumerate() {
                    y += g * x[k];
                }
                Ok(y)
            }
            TestFunction::Rosenbrock { dim } => {
                let mut y = 0.0;
                for i in 0..dim - 1 {
                    let a = x[i] * x[i] - x[i + 1];
                    let b = x[i] - 1.0;
                    y += 100.0 * a * a + b * b;
                }
                Ok(y)
            }
            TestFunction::Schwefel12 { .. } => {
                let mut prefix = 0.0;
                let mut y = 0.0;
                for &v in x {
                    prefix += v;
                    y += prefix * prefix;
                }
                Ok(y)
            }
            TestFunction::PlateBuckling => {
                let (b, t, sigma0, e) = (x[0], x[1], x[2], x[3]);
                let (delta0, eta) = (x[4], x[5]);
                for (name, v) in [("b", b), ("t", t), ("sigma0", sigma0), ("E", e)] {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::Domain(format!(
                            "plate parameter {name} must be positive and finite, got {v}"
                        )));
                    }
                }
                let lambda = b / t * sqrt(sigma0 / e);
                Ok((2.1 / lambda - 0.9 / (lambda * lambda))
                    * (1.0 - 0.75 * delta0 / lambda)
                    * (1.0 - 2.0 * eta * t / b))
            }
        }
    }

    /// Exact expectation under independent marginals, where one exists.
    /// Everything here is a polynomial in the inputs, so the mean follows
    /// from raw moments up to order four; the plate factor is a rational
    /// function with no closed-form mean.
    pub fn true_mean(&self, marginals: &[MarginalDistribution]) -> Result<Option<f64>> {
        if marginals.len() != self.dim() {
            return Err(Error::DimensionMismatch { declared: marginals.len(), expected: self.dim() });
        }
        let m1 = |j: usize| marginals[j].raw_moment(1);
        let m2 = |j: usize| marginals[j].raw_moment(2);
        match self {
            TestFunction::Additive { dim } => {
                let s: f64 = (0..*dim).map(m1).sum();
                Ok(Some(2.0 / *dim as f64 * s))
            }
            TestFunction::Product { dim } => Ok(Some((0..*dim).map(m1).product())),
            TestFunction::QuadraticInteraction { c } => {
                Ok(Some(m2(0) + m2(1) + c * m1(0) * m1(1)))
            }
            TestFunction::Polynomial2 { alpha, beta, gamma, .. } => {
                let mut y = 0.0;
                for (k, &a) in alpha.iter().enumerate() {
                    y += a * m2(k);
                }
                for (k, &b) in beta.iter().enumerate() {
                    y += b * m1(2 * k) * m1(2 * k + 1);
                }
                for (k, &g) in gamma.iter().enumerate() {
                    y += g * m1(k);
                }
                Ok(Some(y))
            }
            TestFunction::Rosenbrock { dim } => {
                // E[100 (X_i^2 - X_{i+1})^2 + (X_i - 1)^2]
                //   = 100 (m4_i - 2 m2_i m1_{i+1} + m2_{i+1}) + m2_i - 2 m1_i + 1
                let mut y = 0.0;
                for i in 0..*dim - 1 {
                    let m4i = marginals[i].raw_moment(4);
                    y += 100.0 * (m4i - 2.0 * m2(i) * m1(i + 1) + m2(i + 1));
                    y += m2(i) - 2.0 * m1(i) + 1.0;
                }
                Ok(Some(y))
            }
            TestFunction::Schwefel12 { dim } => {
                // E[(sum_{j<=i} X_j)^2] = sum_{j<=i} var_j + (sum_{j<=i} mean_j)^2
                let mut var_prefix = 0.0;
                let mut mean_prefix = 0.0;
                let mut y = 0.0;
                for j in 0..*dim {
                    var_prefix += marginals[j].variance();
                    mean_prefix += m1(j);
                    y += var_prefix + mean_prefix * mean_prefix;
                }
                Ok(Some(y))
            }
            TestFunction::PlateBuckling => Ok(None),
        }
    }
}

fn positive_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    Ok(())
}

/// The two symmetric unit-variance input families used with
/// [`TestFunction::QuadraticInteraction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SymmetricMarginal {
    Normal01,
    UniformSym,
}

impl SymmetricMarginal {
    pub fn distribution(&self) -> MarginalDistribution {
        match self {
            SymmetricMarginal::Normal01 => MarginalDistribution::normal(0.0, 1.0).unwrap(),
            SymmetricMarginal::UniformSym => {
                let r = sqrt(3.0);
                MarginalDistribution::uniform(-r, r).unwrap()
            }
        }
    }
}

/// Closed-form Sobol split for the quadratic interaction function: returns
/// (total main-effect share, interaction share S12).
///
/// With zero-mean unit-variance symmetric inputs, Var(c X1 X2) = c^2 while
/// the two square terms contribute Var(X^2) each: 2 for a standard normal,
/// 4/5 for uniform on (-sqrt(3), sqrt(3)).
pub fn quadratic_interaction_sobol(c: f64, kind: SymmetricMarginal) -> (f64, f64) {
    let main_var = match kind {
        SymmetricMarginal::Normal01 => 4.0,
        SymmetricMarginal::UniformSym => 8.0 / 5.0,
    };
    let s12 = c * c / (main_var + c * c);
    (1.0 - s12, s12)
}

/// The six plate-buckling input marginals in evaluation order
/// (b, t, sigma0, E, delta0, eta). Means carry the bias multipliers on the
/// nominal design values; COV is stddev/mean.
pub fn plate_buckling_marginals() -> Vec<MarginalDistribution> {
    let normal_cov = |mean: f64, cov: f64| MarginalDistribution::normal(mean, cov * mean).unwrap();
    alloc::vec![
        normal_cov(0.992 * 24.0, 0.028),
        MarginalDistribution::lognormal_from_mean_cov(1.05 * 0.5, 0.044).unwrap(),
        MarginalDistribution::lognormal_from_mean_cov(1.3 * 34.0, 0.1235).unwrap(),
        normal_cov(0.987 * 29_000.0, 0.076),
        normal_cov(0.35, 0.05),
        normal_cov(5.25, 0.07),
    ]
}

/// Nominal plate design point (b, t, sigma0, E, delta0, eta).
pub const PLATE_NOMINAL: [f64; 6] = [24.0, 0.5, 34.0, 29_000.0, 0.35, 5.25];

/// Preset polynomial cases: fixed square/linear term counts with a sweepable
/// number of interaction terms, all coefficients 1, dimension 100 (padded
/// with inert variables where the terms need fewer).
pub fn polynomial2_case(case: u32, k_i: usize) -> Result<TestFunction> {
    let (k_n2, k_n1) = match case {
        1 => (100, 100),
        2 => (100, 0),
        3 => (0, 100),
        4 => (0, 0),
        other => {
            return Err(Error::Domain(format!("polynomial case must be 1..=4, got {other}")));
        }
    };
    let dim = 100usize.max(2 * k_i);
    TestFunction::polynomial2(
        dim,
        alloc::vec![1.0; k_n2],
        alloc::vec![1.0; k_i],
        alloc::vec![1.0; k_n1],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::design_rng;
    use rand::Rng;

    fn uniform01(dim: usize) -> Vec<MarginalDistribution> {
        (0..dim).map(|_| MarginalDistribution::uniform(0.0, 1.0).unwrap()).collect()
    }

    fn normals(dim: usize, mean: f64) -> Vec<MarginalDistribution> {
        (0..dim).map(|_| MarginalDistribution::normal(mean, 1.0).unwrap()).collect()
    }

    #[test]
    fn point_evaluations() {
        let f = TestFunction::additive(2).unwrap();
        assert_eq!(f.evaluate(&[1.0, 1.0]).unwrap(), 2.0);

        let f = TestFunction::rosenbrock(7).unwrap();
        assert_eq!(f.evaluate(&[1.0; 7]).unwrap(), 0.0);

        let f = TestFunction::schwefel12(3).unwrap();
        assert_eq!(f.evaluate(&[1.0, 1.0, 1.0]).unwrap(), 14.0);

        let f = TestFunction::quadratic_interaction(1.0).unwrap();
        assert_eq!(f.evaluate(&[1.0, 1.0]).unwrap(), 3.0);

        let f = TestFunction::product(3).unwrap();
        assert_eq!(f.evaluate(&[2.0, 3.0, 0.5]).unwrap(), 3.0);
    }

    #[test]
    fn plate_nominal_value() {
        let phi = TestFunction::PlateBuckling.evaluate(&PLATE_NOMINAL).unwrap();
        assert!((phi - 0.6201).abs() < 1e-4);
        // frozen reference from an independent high-precision evaluation
        assert!((phi - 0.620_067_748_474_589_57).abs() < 1e-12);
    }

    #[test]
    fn plate_rejects_bad_domain() {
        let f = TestFunction::PlateBuckling;
        for k in 0..4 {
            let mut x = PLATE_NOMINAL;
            x[k] = 0.0;
            assert!(matches!(f.evaluate(&x), Err(Error::Domain(_))), "index {k}");
            x[k] = -1.0;
            assert!(f.evaluate(&x).is_err());
        }
        // delta0 and eta are unconstrained
        let mut x = PLATE_NOMINAL;
        x[4] = -0.1;
        x[5] = 0.0;
        assert!(f.evaluate(&x).is_ok());
    }

    #[test]
    fn arity_is_enforced() {
        let f = TestFunction::additive(3).unwrap();
        assert!(matches!(
            f.evaluate(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { declared: 2, expected: 3 })
        ));
        assert!(f.true_mean(&uniform01(2)).is_err());
    }

    #[test]
    fn true_means_match_references() {
        let f = TestFunction::additive(5).unwrap();
        assert!((f.true_mean(&uniform01(5)).unwrap().unwrap() - 1.0).abs() < 1e-12);

        let r = sqrt(3.0);
        let sym: Vec<_> =
            (0..2).map(|_| MarginalDistribution::uniform(-r, r).unwrap()).collect();
        let f = TestFunction::product(2).unwrap();
        assert!(f.true_mean(&sym).unwrap().unwrap().abs() < 1e-12);

        let f = TestFunction::rosenbrock(100).unwrap();
        assert!((f.true_mean(&uniform01(100)).unwrap().unwrap() - 2013.0).abs() < 1e-9);

        let f = TestFunction::schwefel12(100).unwrap();
        assert!((f.true_mean(&normals(100, 0.0)).unwrap().unwrap() - 5050.0).abs() < 1e-9);
        assert!((f.true_mean(&normals(100, 1.0)).unwrap().unwrap() - 343_400.0).abs() < 1e-6);

        let f = TestFunction::quadratic_interaction(1.0).unwrap();
        assert!((f.true_mean(&normals(2, 0.0)).unwrap().unwrap() - 2.0).abs() < 1e-12);

        let f = polynomial2_case(1, 5).unwrap();
        assert!((f.true_mean(&normals(100, 0.0)).unwrap().unwrap() - 100.0).abs() < 1e-12);
        assert!((f.true_mean(&normals(100, 1.0)).unwrap().unwrap() - 305.0).abs() < 1e-12);

        assert_eq!(
            TestFunction::PlateBuckling.true_mean(&plate_buckling_marginals()).unwrap(),
            None
        );
    }

    #[test]
    fn polynomial_without_interactions_is_additive() {
        let alpha = alloc::vec![1.0, 2.0, 3.0];
        let gamma = alloc::vec![0.5, 0.0, 1.5, 2.0];
        let f = TestFunction::polynomial2(4, alpha.clone(), alloc::vec![], gamma.clone()).unwrap();
        let mut rng = design_rng(5);
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            // same accumulation order as evaluate(), so equality is exact
            let mut parts = 0.0;
            for (k, &a) in alpha.iter().enumerate() {
                parts += a * x[k] * x[k];
            }
            for (k, &g) in gamma.iter().enumerate() {
                parts += g * x[k];
            }
            assert_eq!(f.evaluate(&x).unwrap(), parts);
        }
    }

    #[test]
    fn polynomial_case_presets() {
        let f = polynomial2_case(4, 50).unwrap();
        assert_eq!(f.dim(), 100);
        match &f {
            TestFunction::Polynomial2 { alpha, beta, gamma, .. } => {
                assert!(alpha.is_empty());
                assert_eq!(beta.len(), 50);
                assert!(gamma.is_empty());
            }
            _ => unreachable!(),
        }
        assert!(polynomial2_case(5, 0).is_err());
        // term counts must fit the declared dimension
        assert!(TestFunction::polynomial2(3, alloc::vec![1.0; 4], alloc::vec![], alloc::vec![]).is_err());
        assert!(TestFunction::polynomial2(3, alloc::vec![], alloc::vec![1.0; 2], alloc::vec![]).is_err());
    }

    #[test]
    fn sobol_closed_forms() {
        for kind in [SymmetricMarginal::Normal01, SymmetricMarginal::UniformSym] {
            let (main, s12) = quadratic_interaction_sobol(0.0, kind);
            assert_eq!(s12, 0.0);
            assert_eq!(main, 1.0);
        }
        let (main, s12) = quadratic_interaction_sobol(1.0, SymmetricMarginal::Normal01);
        assert!((s12 - 0.2).abs() < 1e-15);
        assert!((main - 0.8).abs() < 1e-15);
        let (_, s12) = quadratic_interaction_sobol(1.0, SymmetricMarginal::UniformSym);
        assert!((s12 - 0.384_615_384_615_384_64).abs() < 1e-15);
        // interaction share grows monotonically with c
        let mut last = 0.0;
        for i in 1..50 {
            let c = i as f64 * 0.2;
            let (_, s12) = quadratic_interaction_sobol(c, SymmetricMarginal::Normal01);
            assert!(s12 > last);
            last = s12;
        }
    }

    #[test]
    fn plate_marginal_table() {
        let m = plate_buckling_marginals();
        assert_eq!(m.len(), 6);
        assert!((m[0].mean() - 23.808).abs() < 1e-12);
        assert!((m[0].variance().sqrt() - 0.028 * 23.808).abs() < 1e-12);
        // lognormals reproduce the requested mean and cov
        assert!((m[1].mean() - 0.525).abs() < 1e-9);
        assert!((m[1].variance().sqrt() / m[1].mean() - 0.044).abs() < 1e-9);
        assert!((m[2].mean() - 44.2).abs() < 1e-9);
        assert!((m[2].variance().sqrt() / m[2].mean() - 0.1235).abs() < 1e-9);
        assert!((m[3].mean() - 28_623.0).abs() < 1e-9);
        assert!((m[4].mean() - 0.35).abs() < 1e-15);
        assert!((m[5].mean() - 5.25).abs() < 1e-15);
    }

    #[test]
    fn plate_is_monotone_decreasing_in_imperfections() {
        // random points in the +-5 sigma box around the table means
        let m = plate_buckling_marginals();
        let bounds: Vec<(f64, f64)> = m
            .iter()
            .map(|d| {
                let (mu, sd) = (d.mean(), d.variance().sqrt());
                (mu - 5.0 * sd, mu + 5.0 * sd)
            })
            .collect();
        let f = TestFunction::PlateBuckling;
        let mut rng = design_rng(90);
        for _ in 0..10_000 {
            let x: Vec<f64> =
                bounds.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect();
            let base = f.evaluate(&x).unwrap();
            let mut bumped = x.clone();
            bumped[4] += 1e-4;
            assert!(f.evaluate(&bumped).unwrap() < base);
            let mut bumped = x.clone();
            bumped[5] += 1e-4;
            assert!(f.evaluate(&bumped).unwrap() < base);
        }
    }

    #[test]
    fn srs_means_converge_to_references() {
        // streaming SRS: 10^6 iid evaluations per function, mean within
        // 4 standard errors of the closed-form expectation
        use crate::rng::replication_rng;
        let cases: Vec<(TestFunction, Vec<MarginalDistribution>)> = alloc::vec![
            (TestFunction::additive(5).unwrap(), uniform01(5)),
            (
                TestFunction::product(2).unwrap(),
                (0..2)
                    .map(|_| MarginalDistribution::uniform(-sqrt(3.0), sqrt(3.0)).unwrap())
                    .collect(),
            ),
            (TestFunction::quadratic_interaction(1.0).unwrap(), normals(2, 0.0)),
            (polynomial2_case(2, 10).unwrap(), normals(100, 1.0)),
            (TestFunction::rosenbrock(100).unwrap(), uniform01(100)),
            (TestFunction::schwefel12(100).unwrap(), normals(100, 0.0)),
        ];
        for (case_idx, (f, marginals)) in cases.iter().enumerate() {
            let truth = f.true_mean(marginals).unwrap().unwrap();
            let mut rng = replication_rng(1000 + case_idx as u64, 0);
            let n = 1_000_000usize;
            let mut mean = 0.0;
            let mut m2 = 0.0;
            let mut x = alloc::vec![0.0; f.dim()];
            for i in 0..n {
                for (j, m) in marginals.iter().enumerate() {
                    x[j] = m.inverse_cdf(crate::rng::open01(&mut rng)).unwrap();
                }
                let y = f.evaluate(&x).unwrap();
                let d = y - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (y - mean);
            }
            let se = (m2 / (n as f64 - 1.0) / n as f64).sqrt();
            assert!(
                (mean - truth).abs() < 4.0 * se,
                "{}: mean {mean} vs {truth} (se {se})",
                f.id()
            );
        }
    }
}
