//! Estimators over sample sets, replication studies, and the statistical
//! machinery used to compare designs: bootstrap errors, closed-form variance
//! diagnostics (`variance`), and Monte Carlo Sobol indices (`sobol`).

pub mod sobol;
pub mod variance;

use crate::design_spec::DesignSpec;
use crate::designs::{generate_replication, SampleSet};
use crate::distributions::MarginalDistribution;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, DOMAIN_BOOTSTRAP};
use crate::testbed::TestFunction;
use alloc::format;
use alloc::vec::Vec;
use rand::Rng;

/// What to estimate from the transformed samples y = h(x).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum EstimatorKind {
    /// Weighted sample mean.
    Mean,
    /// Weighted raw moment of order r; Moment(1) equals Mean exactly.
    Moment { r: u32 },
    /// Weighted empirical CDF evaluated at each threshold.
    Ecdf { thresholds: Vec<f64> },
}

impl EstimatorKind {
    /// Number of values the estimator produces.
    pub fn arity(&self) -> usize {
        match self {
            EstimatorKind::Mean | EstimatorKind::Moment { .. } => 1,
            EstimatorKind::Ecdf { thresholds } => thresholds.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    pub kind: EstimatorKind,
    pub values: Vec<f64>,
    pub n: usize,
}

impl EstimatorResult {
    /// The single value of a scalar estimator.
    pub fn value(&self) -> f64 {
        self.values[0]
    }
}

fn powi(y: f64, r: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..r {
        acc *= y;
    }
    acc
}

/// Weighted estimator T = sum_l w_l g(h(x_l)).
pub fn estimate(samples: &SampleSet, f: &TestFunction, kind: &EstimatorKind) -> Result<EstimatorResult> {
    if samples.is_empty() {
        return Err(Error::Domain("estimate needs a nonempty sample set".into()));
    }
    let wsum: f64 = samples.weights.iter().sum();
    if (wsum - 1.0).abs() > 1e-9 {
        return Err(Error::WeightContract { sum: wsum });
    }
    let n = samples.len();
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        y.push(f.evaluate(samples.points.row(i))?);
    }
    let values = match kind {
        EstimatorKind::Mean => {
            alloc::vec![weighted_sum(&samples.weights, &y, |v| v)]
        }
        EstimatorKind::Moment { r } => {
            alloc::vec![weighted_sum(&samples.weights, &y, |v| powi(v, *r))]
        }
        EstimatorKind::Ecdf { thresholds } => thresholds
            .iter()
            .map(|&t| weighted_sum(&samples.weights, &y, |v| if v <= t { 1.0 } else { 0.0 }))
            .collect(),
    };
    Ok(EstimatorResult { kind: kind.clone(), values, n })
}

fn weighted_sum(w: &[f64], y: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    w.iter().zip(y).map(|(&wl, &yl)| wl * g(yl)).sum()
}

/// Distribution of a scalar estimator over independent replications.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    pub estimates: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
    pub replications: usize,
    pub base_seed: u64,
}

/// Two-pass summary of replication estimates. The accumulation order is
/// fixed by the estimate index, so the result is identical however the
/// replications were scheduled.
pub fn summarize(estimates: Vec<f64>, base_seed: u64) -> Result<ReplicationSummary> {
    let r = estimates.len();
    if r < 2 {
        return Err(Error::Domain(format!("need at least 2 replications, got {r}")));
    }
    let mean = estimates.iter().sum::<f64>() / r as f64;
    let variance =
        estimates.iter().map(|&e| (e - mean) * (e - mean)).sum::<f64>() / (r as f64 - 1.0);
    Ok(ReplicationSummary {
        mean,
        variance,
        std_dev: libm::sqrt(variance),
        replications: r,
        base_seed,
        estimates,
    })
}

/// One replication's scalar estimate: replication `r` of the design under
/// `base_seed`. This is the unit of work a parallel runner schedules; the
/// value depends only on (spec, marginals, f, kind, base_seed, r).
pub fn replication_estimate(
    spec: &DesignSpec,
    marginals: &[MarginalDistribution],
    f: &TestFunction,
    kind: &EstimatorKind,
    base_seed: u64,
    replication: u64,
) -> Result<f64> {
    if kind.arity() != 1 {
        return Err(Error::Domain(format!(
            "replication studies need a scalar estimator; this one yields {} values",
            kind.arity()
        )));
    }
    let mut seeded = spec.clone();
    seeded.seed = base_seed;
    let set = generate_replication(&seeded, marginals, replication)?;
    Ok(estimate(&set, f, kind)?.value())
}

/// Run R independent replications sequentially and summarize the estimator
/// distribution.
pub fn replicate_study(
    spec: &DesignSpec,
    marginals: &[MarginalDistribution],
    f: &TestFunction,
    kind: &EstimatorKind,
    replications: usize,
    base_seed: u64,
) -> Result<ReplicationSummary> {
    if replications < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 replications, got {replications}"
        )));
    }
    let mut estimates = Vec::with_capacity(replications);
    for r in 0..replications {
        estimates.push(replication_estimate(spec, marginals, f, kind, base_seed, r as u64)?);
    }
    summarize(estimates, base_seed)
}

/// Bootstrap standard error of the standard deviation of `estimates`:
/// resample with replacement, recompute the sample standard deviation, and
/// return the spread of those replicas.
pub fn bootstrap_std_error_of_std(estimates: &[f64], resamples: usize, seed: u64) -> Result<f64> {
    let r = estimates.len();
    if r < 2 || resamples < 2 {
        return Err(Error::Domain("bootstrap needs >= 2 estimates and >= 2 resamples".into()));
    }
    let mut rng = stream_rng(seed, DOMAIN_BOOTSTRAP, 0);
    let mut stds = Vec::with_capacity(resamples);
    let mut draw = alloc::vec![0.0; r];
    for _ in 0..resamples {
        for slot in draw.iter_mut() {
            *slot = estimates[rng.random_range(0..r)];
        }
        let mean = draw.iter().sum::<f64>() / r as f64;
        let var = draw.iter().map(|&e| (e - mean) * (e - mean)).sum::<f64>() / (r as f64 - 1.0);
        stds.push(libm::sqrt(var));
    }
    let mean = stds.iter().sum::<f64>() / resamples as f64;
    let var =
        stds.iter().map(|&s| (s - mean) * (s - mean)).sum::<f64>() / (resamples as f64 - 1.0);
    Ok(libm::sqrt(var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design_spec::Method;
    use crate::designs;
    use crate::matrix::{IndexMatrix, Matrix};

    fn uniform01(dim: usize) -> Vec<MarginalDistribution> {
        (0..dim).map(|_| MarginalDistribution::uniform(0.0, 1.0).unwrap()).collect()
    }

    /// h(x) = x: a one-variable polynomial with a single unit linear term.
    fn identity() -> TestFunction {
        TestFunction::polynomial2(1, alloc::vec![], alloc::vec![], alloc::vec![1.0]).unwrap()
    }

    fn hand_built_set(xs: &[f64], weights: Vec<f64>) -> SampleSet {
        let n = xs.len();
        let mut points = Matrix::zeros(n, 1);
        for (i, &x) in xs.iter().enumerate() {
            points.set(i, 0, x);
        }
        SampleSet {
            unit_points: points.clone(),
            points,
            weights,
            cell_coords: IndexMatrix::zeros(0, 0),
            spec: DesignSpec::simple(Method::Srs, 1, n, 0),
        }
    }

    #[test]
    fn weighted_mean_basic() {
        // Additive(1) doubles x, so y = (1, 2, 3)
        let set = hand_built_set(&[0.5, 1.0, 1.5], alloc::vec![1.0 / 3.0; 3]);
        let f = TestFunction::additive(1).unwrap();
        let r = estimate(&set, &f, &EstimatorKind::Mean).unwrap();
        assert!((r.value() - 2.0).abs() < 1e-12);
        assert_eq!(r.n, 3);
    }

    #[test]
    fn moment_zero_is_exactly_one() {
        // g(y) = y^0 = 1 makes the estimator the weight sum: constant
        // functions are estimated exactly by any design
        let set = designs::lhs(2, 16, &uniform01(2), 3).unwrap();
        let f = TestFunction::additive(2).unwrap();
        let r = estimate(&set, &f, &EstimatorKind::Moment { r: 0 }).unwrap();
        assert_eq!(r.value(), 1.0);
    }

    #[test]
    fn constant_function_estimated_exactly() {
        let zero = TestFunction::polynomial2(2, alloc::vec![], alloc::vec![], alloc::vec![]).unwrap();
        let set = designs::srs(2, 50, &uniform01(2), 1).unwrap();
        let r = estimate(&set, &zero, &EstimatorKind::Mean).unwrap();
        assert_eq!(r.value(), 0.0);
    }

    #[test]
    fn mean_equals_first_moment() {
        let set = designs::pss(4, "2^2", 16, &uniform01(4), 8).unwrap();
        let f = TestFunction::product(4).unwrap();
        let a = estimate(&set, &f, &EstimatorKind::Mean).unwrap();
        let b = estimate(&set, &f, &EstimatorKind::Moment { r: 1 }).unwrap();
        assert_eq!(a.value(), b.value());
    }

    #[test]
    fn ecdf_saturates_and_orders() {
        let set = designs::srs(1, 64, &uniform01(1), 5).unwrap();
        let f = identity();
        let ys: Vec<f64> = (0..64).map(|i| set.points.get(i, 0)).collect();
        let max = ys.iter().cloned().fold(f64::MIN, f64::max);
        let min = ys.iter().cloned().fold(f64::MAX, f64::min);
        let kind = EstimatorKind::Ecdf {
            thresholds: alloc::vec![min - 0.1, 0.25, 0.5, 0.75, max],
        };
        let r = estimate(&set, &f, &kind).unwrap();
        assert_eq!(r.values.len(), 5);
        assert_eq!(r.values[0], 0.0);
        assert!((r.values[4] - 1.0).abs() < 1e-12);
        for w in r.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn weight_contract_is_enforced() {
        let set = hand_built_set(&[0.1, 0.9], alloc::vec![0.7, 0.7]);
        let f = identity();
        match estimate(&set, &f, &EstimatorKind::Mean) {
            Err(Error::WeightContract { sum }) => assert!((sum - 1.4).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let empty = hand_built_set(&[], alloc::vec![]);
        assert!(estimate(&empty, &f, &EstimatorKind::Mean).is_err());
    }

    #[test]
    fn srs_estimator_variance_matches_theory() {
        // mean of U(0,1) from n=100: Var = (1/12)/100 = 1/1200
        let spec = DesignSpec::simple(Method::Srs, 1, 100, 0);
        let s = replicate_study(&spec, &uniform01(1), &identity(), &EstimatorKind::Mean, 10_000, 42)
            .unwrap();
        let expected = 1.0 / 1200.0;
        assert!(
            (s.variance - expected).abs() < 0.1 * expected,
            "variance {} vs {expected}",
            s.variance
        );
        assert!((s.mean - 0.5).abs() < 4.0 * s.std_dev / (s.replications as f64).sqrt());
    }

    #[test]
    fn lhs_crushes_additive_variance() {
        let f = TestFunction::additive(5).unwrap();
        let marg = uniform01(5);
        let srs = replicate_study(
            &DesignSpec::simple(Method::Srs, 5, 64, 0),
            &marg,
            &f,
            &EstimatorKind::Mean,
            2000,
            7,
        )
        .unwrap();
        let lhs = replicate_study(
            &DesignSpec::simple(Method::Lhs, 5, 64, 0),
            &marg,
            &f,
            &EstimatorKind::Mean,
            2000,
            7,
        )
        .unwrap();
        assert!(
            lhs.variance < 1e-3 * srs.variance,
            "ratio {}",
            lhs.variance / srs.variance
        );
    }

    #[test]
    fn ss_beats_lhs_on_pure_interaction() {
        // zero-mean product function: marginal filtering does nothing, true
        // stratification of the joint space is what helps
        let f = TestFunction::product(2).unwrap();
        let r = libm::sqrt(3.0);
        let marg: Vec<_> = (0..2).map(|_| MarginalDistribution::uniform(-r, r).unwrap()).collect();
        let mut ss_spec = DesignSpec::simple(Method::Ss, 2, 625, 0);
        ss_spec.subspaces.push(crate::design_spec::SubspaceSpec {
            variables: alloc::vec![0, 1],
            counts_per_dim: alloc::vec![25, 25],
            latinize: false,
        });
        let ss = replicate_study(&ss_spec, &marg, &f, &EstimatorKind::Mean, 2000, 3).unwrap();
        let lhs = replicate_study(
            &DesignSpec::simple(Method::Lhs, 2, 625, 0),
            &marg,
            &f,
            &EstimatorKind::Mean,
            2000,
            3,
        )
        .unwrap();
        assert!(ss.variance < 0.1 * lhs.variance, "ratio {}", ss.variance / lhs.variance);
    }

    #[test]
    fn replication_study_is_deterministic() {
        let spec = DesignSpec::from_notation(Method::Lpss, 4, 16, "2^2", 5).unwrap();
        let f = TestFunction::product(4).unwrap();
        let marg = uniform01(4);
        let a = replicate_study(&spec, &marg, &f, &EstimatorKind::Mean, 50, 11).unwrap();
        let b = replicate_study(&spec, &marg, &f, &EstimatorKind::Mean, 50, 11).unwrap();
        assert_eq!(a.estimates, b.estimates);
        assert_eq!(a.std_dev, b.std_dev);
        // the spec's own seed is overridden by the study's base seed
        let mut reseeded = spec.clone();
        reseeded.seed = 999;
        let c = replicate_study(&reseeded, &marg, &f, &EstimatorKind::Mean, 50, 11).unwrap();
        assert_eq!(a.estimates, c.estimates);
        // and replication r matches the sequential study entry
        let e3 = replication_estimate(&spec, &marg, &f, &EstimatorKind::Mean, 11, 3).unwrap();
        assert_eq!(a.estimates[3], e3);
    }

    #[test]
    fn replication_preconditions() {
        let spec = DesignSpec::simple(Method::Srs, 1, 8, 0);
        let f = identity();
        let err =
            replicate_study(&spec, &uniform01(1), &f, &EstimatorKind::Mean, 1, 0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let grid = EstimatorKind::Ecdf { thresholds: alloc::vec![0.2, 0.4] };
        let err = replicate_study(&spec, &uniform01(1), &f, &grid, 10, 0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        // a single-threshold ECDF is a legitimate scalar estimator
        let one = EstimatorKind::Ecdf { thresholds: alloc::vec![0.5] };
        let s = replicate_study(&spec, &uniform01(1), &f, &one, 200, 0).unwrap();
        assert!((s.mean - 0.5).abs() < 0.1);
    }

    #[test]
    fn summary_invariants() {
        let s = summarize(alloc::vec![1.0, 2.0, 3.0, 4.0], 9).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!(s.variance >= 0.0);
        assert_eq!(s.std_dev, libm::sqrt(s.variance));
        assert_eq!(s.replications, 4);
        assert_eq!(s.base_seed, 9);
        assert!(summarize(alloc::vec![1.0], 0).is_err());
    }

    #[test]
    fn bootstrap_scale_is_sensible() {
        // R standard normal estimates: SE of the sample std is about
        // 1/sqrt(2R); the bootstrap should land in that neighborhood
        let normal = MarginalDistribution::normal(0.0, 1.0).unwrap();
        let mut rng = crate::rng::design_rng(55);
        let estimates: Vec<f64> = (0..400)
            .map(|_| normal.inverse_cdf(crate::rng::open01(&mut rng)).unwrap())
            .collect();
        let se = bootstrap_std_error_of_std(&estimates, 500, 1).unwrap();
        let theory = 1.0 / libm::sqrt(2.0 * 400.0);
        assert!(se > 0.5 * theory && se < 2.0 * theory, "se {se} vs {theory}");
        // deterministic under a fixed seed
        let se2 = bootstrap_std_error_of_std(&estimates, 500, 1).unwrap();
        assert_eq!(se, se2);
        assert!(bootstrap_std_error_of_std(&[1.0], 10, 0).is_err());
    }
}
