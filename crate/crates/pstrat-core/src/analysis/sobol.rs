//! Monte Carlo Sobol sensitivity indices by double-loop conditional
//! expectation.
//!
//! For a conditioning set A the inner loop averages Y over the remaining
//! variables at a fixed outer draw of X_A; the variance of those inner means
//! estimates V_A = Var(E[Y | X_A]) after subtracting the leftover inner
//! noise mean(s_k^2)/n_inner. Indices are normalized by the total variance
//! pooled over every evaluation. First order reports S_i = V_i / V_T; a pair
//! reports the closed second-order index (V_ij - V_i - V_j) / V_T together
//! with the raw V_ij / V_T.

use crate::distributions::MarginalDistribution;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream, DOMAIN_SOBOL};
use crate::testbed::TestFunction;
use alloc::format;
use alloc::vec::Vec;
use libm::sqrt;

/// Which index to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SobolTarget {
    /// First-order index of one variable.
    First(usize),
    /// Closed second-order index of a variable pair.
    Pair(usize, usize),
}

/// An index estimate with its between-group standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolEstimate {
    pub index: f64,
    /// For a pair target, the raw (unclosed) ratio V_ij / V_T.
    pub raw_pair_index: Option<f64>,
    pub std_error: f64,
}

/// Number of outer-loop groups behind every reported standard error.
pub const GROUPS: usize = 10;

/// Estimate a Sobol index with roughly `budget` model evaluations per
/// conditional-variance loop (one loop for a first-order target, three for
/// a pair). The standard error comes from splitting the outer loop into
/// ten groups.
pub fn sobol_indices(
    f: &TestFunction,
    marginals: &[MarginalDistribution],
    target: SobolTarget,
    budget: usize,
    seed: u64,
) -> Result<SobolEstimate> {
    let dim = marginals.len();
    if f.dim() != dim {
        return Err(Error::DimensionMismatch { declared: dim, expected: f.dim() });
    }
    if budget < 1000 {
        return Err(Error::Domain(format!("budget must be at least 1000, got {budget}")));
    }
    match target {
        SobolTarget::First(i) if i >= dim => {
            return Err(Error::Domain(format!("variable index {i} out of range for {dim} inputs")));
        }
        SobolTarget::Pair(i, j) if i >= dim || j >= dim => {
            return Err(Error::Domain(format!(
                "variable pair ({i}, {j}) out of range for {dim} inputs"
            )));
        }
        SobolTarget::Pair(i, j) if i == j => {
            return Err(Error::Domain(format!("pair indices must differ, got ({i}, {j})")));
        }
        _ => {}
    }

    let mut rng = stream_rng(seed, DOMAIN_SOBOL, 0);
    let mut total = Welford::new();

    match target {
        SobolTarget::First(i) => {
            let loop_i = conditional_loop(f, marginals, &[i], budget, &mut rng, &mut total)?;
            let v_t = positive_total(&total)?;
            let per_group: Vec<f64> = loop_i.group_variances().iter().map(|v| v / v_t).collect();
            Ok(SobolEstimate {
                index: loop_i.variance() / v_t,
                raw_pair_index: None,
                std_error: group_std_error(&per_group),
            })
        }
        SobolTarget::Pair(i, j) => {
            let loop_i = conditional_loop(f, marginals, &[i], budget, &mut rng, &mut total)?;
            let loop_j = conditional_loop(f, marginals, &[j], budget, &mut rng, &mut total)?;
            let loop_ij = conditional_loop(f, marginals, &[i, j], budget, &mut rng, &mut total)?;
            let v_t = positive_total(&total)?;
            let gi = loop_i.group_variances();
            let gj = loop_j.group_variances();
            let gij = loop_ij.group_variances();
            let per_group: Vec<f64> =
                (0..GROUPS).map(|g| (gij[g] - gi[g] - gj[g]) / v_t).collect();
            Ok(SobolEstimate {
                index: (loop_ij.variance() - loop_i.variance() - loop_j.variance()) / v_t,
                raw_pair_index: Some(loop_ij.variance() / v_t),
                std_error: group_std_error(&per_group),
            })
        }
    }
}

fn positive_total(total: &Welford) -> Result<f64> {
    let v_t = total.variance();
    if v_t > 0.0 {
        Ok(v_t)
    } else {
        Err(Error::Domain("total variance is zero; indices are undefined".into()))
    }
}

fn group_std_error(values: &[f64]) -> f64 {
    let g = values.len() as f64;
    let mean = values.iter().sum::<f64>() / g;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (g - 1.0);
    sqrt(var / g)
}

/// One double loop conditioning on `cond`. Every evaluation also feeds the
/// pooled total-variance accumulator.
///
/// The inner loop is kept small (most of the noise in the corrected
/// estimator comes from too few outer draws, not from inner residue), and
/// collapses to a single evaluation when `cond` covers every variable, in
/// which case the inner expectation is the evaluation itself.
fn conditional_loop(
    f: &TestFunction,
    marginals: &[MarginalDistribution],
    cond: &[usize],
    budget: usize,
    rng: &mut Stream,
    total: &mut Welford,
) -> Result<LoopStats> {
    let dim = marginals.len();
    let n_inner = if cond.len() == dim { 1 } else { isqrt(budget / 100).max(8) };
    let n_outer = (budget / n_inner).max(2 * GROUPS);
    let mut x = alloc::vec![0.0; dim];
    let mut stats = LoopStats::new();
    for k in 0..n_outer {
        for &v in cond {
            x[v] = marginals[v].inverse_cdf(crate::rng::open01(rng))?;
        }
        let mut inner = Welford::new();
        for _ in 0..n_inner {
            for v in 0..dim {
                if !cond.contains(&v) {
                    x[v] = marginals[v].inverse_cdf(crate::rng::open01(rng))?;
                }
            }
            let y = f.evaluate(&x)?;
            inner.push(y);
            total.push(y);
        }
        stats.push(k % GROUPS, inner.mean, inner.variance(), n_inner);
    }
    Ok(stats)
}

/// Streaming mean and variance.
struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn new() -> Self {
        Welford { count: 0, mean: 0.0, m2: 0.0 }
    }

    fn push(&mut self, y: f64) {
        self.count += 1;
        let d = y - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (y - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count as f64 - 1.0)
        }
    }
}

/// Outer-loop statistics of one conditional-variance loop, overall and per
/// group.
struct LoopStats {
    all: Welford,
    all_s2: f64,
    groups: Vec<Welford>,
    group_s2: Vec<f64>,
    n_inner: usize,
}

impl LoopStats {
    fn new() -> Self {
        LoopStats {
            all: Welford::new(),
            all_s2: 0.0,
            groups: (0..GROUPS).map(|_| Welford::new()).collect(),
            group_s2: alloc::vec![0.0; GROUPS],
            n_inner: 0,
        }
    }

    fn push(&mut self, group: usize, inner_mean: f64, inner_var: f64, n_inner: usize) {
        self.all.push(inner_mean);
        self.all_s2 += inner_var;
        self.groups[group].push(inner_mean);
        self.group_s2[group] += inner_var;
        self.n_inner = n_inner;
    }

    /// Bias-corrected conditional variance: the spread of the inner means
    /// overstates V_A by the residual inner noise, which is subtracted.
    fn variance(&self) -> f64 {
        self.all.variance() - self.all_s2 / self.all.count as f64 / self.n_inner as f64
    }

    fn group_variances(&self) -> Vec<f64> {
        (0..GROUPS)
            .map(|g| {
                let w = &self.groups[g];
                w.variance() - self.group_s2[g] / w.count as f64 / self.n_inner as f64
            })
            .collect()
    }
}

fn isqrt(x: usize) -> usize {
    let mut r = sqrt(x as f64) as usize;
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    while r * r > x {
        r -= 1;
    }
    r
}
