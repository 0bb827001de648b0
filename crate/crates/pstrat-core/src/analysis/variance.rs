//! Closed-form variance diagnostics for stratified and partially stratified
//! mean estimators.
//!
//! Both formulas reduce the estimator variance to conditional cell means:
//! true stratification subtracts the between-stratum spread,
//!
//! ```text
//! Var[T_S] = Var[T_R] - (1/n) sum_k p_k (mu_k - tau)^2
//! ```
//!
//! while a partially stratified design adds the covariance over admissible
//! cell pairs (cells sharing no subspace stratum index),
//!
//! ```text
//! Var[T_P] = Var[T_R]
//!          + ((n-1)/n) * (1 / (n^Ns (n-1)^Ns)) * sum_R (mu_i - tau)(mu_j - tau)
//! ```
//!
//! Cell means come from per-cell Gauss-Legendre quadrature or conditional
//! Monte Carlo; both run in probability space through the inverse CDFs.

use crate::design_spec::{validate_design, DesignSpec, Method};
use crate::distributions::MarginalDistribution;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, DOMAIN_CELLS};
use crate::strata::{conditional_uniform, tensor_stratify, StrataGrid, Stratum};
use crate::testbed::TestFunction;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use libm::cos;

/// How conditional cell means are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellBudget {
    /// Tensor Gauss-Legendre quadrature of the given order per panel, with
    /// panels graded toward the tails for unbounded marginals.
    Quadrature { order: usize },
    /// Conditional Monte Carlo with a per-cell sample budget; each cell
    /// draws from its own RNG stream of `seed`.
    MonteCarlo { per_cell: usize, seed: u64 },
}

impl Default for CellBudget {
    fn default() -> Self {
        CellBudget::MonteCarlo { per_cell: 10_000, seed: 0 }
    }
}

/// Per-cell means and the admissible-pair covariance sum backing a
/// partially stratified variance value.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDiagnostics {
    pub cell_means: Vec<f64>,
    pub tau: f64,
    pub pair_cov_sum: f64,
}

/// Theoretical variance of the stratified mean estimator with proportional
/// allocation: n must be a multiple of the stratum count.
pub fn ss_variance_formula(
    f: &TestFunction,
    marginals: &[MarginalDistribution],
    grid: &StrataGrid,
    n: usize,
    budget: &CellBudget,
) -> Result<f64> {
    check_arity(f, marginals)?;
    if marginals.len() != grid.dim() {
        return Err(Error::DimensionMismatch { declared: grid.dim(), expected: marginals.len() });
    }
    if n == 0 || n % grid.len() != 0 {
        return Err(Error::Domain(format!(
            "proportional allocation needs the stratum count {} to divide n = {n}",
            grid.len()
        )));
    }
    let m = grid.len();
    let mut mu = Vec::with_capacity(m);
    let mut raw2 = Vec::with_capacity(m);
    for k in 0..m {
        let s = grid.stratum(k);
        let (a, b) = cell_moments(f, marginals, &s.lower, &s.upper, budget, k as u64)?;
        mu.push(a);
        raw2.push(b);
    }
    let p: Vec<f64> = (0..m).map(|k| grid.stratum(k).probability).collect();
    let tau: f64 = p.iter().zip(&mu).map(|(&pk, &mk)| pk * mk).sum();
    let eh2: f64 = p.iter().zip(&raw2).map(|(&pk, &rk)| pk * rk).sum();
    let var_h = eh2 - tau * tau;
    let nf = n as f64;

    // the stated formula, and an algebraically equivalent second route
    // through the within-stratum variances; both must agree
    let between: f64 = p.iter().zip(&mu).map(|(&pk, &mk)| pk * (mk - tau) * (mk - tau)).sum();
    let direct = var_h / nf - between / nf;
    let within: f64 = p
        .iter()
        .zip(&mu)
        .zip(&raw2)
        .map(|((&pk, &mk), &rk)| pk * (rk - mk * mk))
        .sum::<f64>()
        / nf;
    let scale = (var_h / nf).abs().max(1e-12);
    if (direct - within).abs() > 1e-6 * scale {
        return Err(Error::Domain(format!(
            "stratified variance routes disagree: {direct} vs {within}"
        )));
    }
    Ok(direct)
}

/// Theoretical variance of the partially stratified mean estimator, for
/// layouts where every subspace carries exactly n strata of probability 1/n
/// (one sample per stratum). Returns the variance and the cell diagnostics.
pub fn pss_variance_formula(
    f: &TestFunction,
    marginals: &[MarginalDistribution],
    spec: &DesignSpec,
    budget: &CellBudget,
) -> Result<(f64, CellDiagnostics)> {
    check_arity(f, marginals)?;
    let spec = validate_design(spec)?;
    if spec.method == Method::Srs {
        return Err(Error::Domain("the cell decomposition needs at least one subspace".into()));
    }
    if marginals.len() != spec.dim {
        return Err(Error::DimensionMismatch { declared: marginals.len(), expected: spec.dim });
    }
    let n = spec.n;
    if n < 2 {
        return Err(Error::Domain("need n >= 2 samples".into()));
    }
    let n_s = spec.subspaces.len();
    let mut grids = Vec::with_capacity(n_s);
    for sub in &spec.subspaces {
        let strata: usize = sub.counts_per_dim.iter().product();
        if strata != n {
            return Err(Error::Domain(format!(
                "the derivation needs every subspace to carry exactly n = {n} strata, found {strata}"
            )));
        }
        grids.push(tensor_stratify(sub.dim(), &sub.counts_per_dim)?);
    }

    const CELL_LIMIT: usize = 1_000_000;
    let cells = n
        .checked_pow(n_s as u32)
        .filter(|&c| c <= CELL_LIMIT)
        .ok_or(Error::CellGuard {
            cells: saturating_pow(n, n_s) as u64,
            limit: CELL_LIMIT as u64,
        })?;

    // enumerate the n^Ns cells: per-subspace stratum indices as base-n digits
    let mut cell_means = Vec::with_capacity(cells);
    let mut raw2_sum = 0.0;
    let mut coords = alloc::vec![0u32; n_s];
    let mut lower = alloc::vec![0.0; spec.dim];
    let mut upper = alloc::vec![0.0; spec.dim];
    let mut coord_table: Vec<u32> = Vec::with_capacity(cells * n_s);
    for cell in 0..cells {
        let mut rest = cell;
        for s in (0..n_s).rev() {
            coords[s] = (rest % n) as u32;
            rest /= n;
        }
        for (s, sub) in spec.subspaces.iter().enumerate() {
            let stratum = grids[s].stratum(coords[s] as usize);
            for (c, &v) in sub.variables.iter().enumerate() {
                lower[v] = stratum.lower[c];
                upper[v] = stratum.upper[c];
            }
        }
        let (mu, r2) = cell_moments(f, marginals, &lower, &upper, budget, cell as u64)?;
        cell_means.push(mu);
        raw2_sum += r2;
        coord_table.extend_from_slice(&coords);
    }

    let mf = cells as f64;
    let tau = cell_means.iter().sum::<f64>() / mf;
    let eh2 = raw2_sum / mf;
    let var_h = eh2 - tau * tau;
    let centered: Vec<f64> = cell_means.iter().map(|&m| m - tau).collect();

    let pair_cov_sum = admissible_pair_sum(&centered, &coord_table, n_s, n)?;

    let nf = n as f64;
    let pairs = powi_f64(nf, n_s) * powi_f64(nf - 1.0, n_s);
    let value = var_h / nf + (nf - 1.0) / nf * pair_cov_sum / pairs;
    Ok((value, CellDiagnostics { cell_means, tau, pair_cov_sum }))
}

/// Latin hypercube variance: the cell decomposition with one 1-D subspace
/// per variable.
pub fn lhs_variance_formula(
    f: &TestFunction,
    marginals: &[MarginalDistribution],
    n: usize,
    budget: &CellBudget,
) -> Result<f64> {
    let spec = DesignSpec::simple(Method::Lhs, marginals.len(), n, 0);
    pss_variance_formula(f, marginals, &spec, budget).map(|(v, _)| v)
}

/// Variance of the plain Monte Carlo mean estimator, Var[h]/n, from a
/// single full-space integration pass.
pub fn mean_estimator_variance(
    f: &TestFunction,
    marginals: &[MarginalDistribution],
    n: usize,
    budget: &CellBudget,
) -> Result<f64> {
    check_arity(f, marginals)?;
    if n == 0 {
        return Err(Error::Domain("need n >= 1 samples".into()));
    }
    let dim = marginals.len();
    let lower = alloc::vec![0.0; dim];
    let upper = alloc::vec![1.0; dim];
    let (tau, raw2) = cell_moments(f, marginals, &lower, &upper, budget, 0)?;
    Ok((raw2 - tau * tau) / n as f64)
}

fn check_arity(f: &TestFunction, marginals: &[MarginalDistribution]) -> Result<()> {
    if f.dim() != marginals.len() {
        return Err(Error::DimensionMismatch { declared: marginals.len(), expected: f.dim() });
    }
    Ok(())
}

fn saturating_pow(base: usize, exp: usize) -> usize {
    let mut acc = 1usize;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

fn powi_f64(base: f64, exp: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Covariance sum over admissible ordered cell pairs: pairs that differ in
/// the stratum index of every subspace. Small problems take a literal
/// double loop (which also verifies the pair-count identity); larger ones
/// use inclusion-exclusion over coordinate-agreement patterns. When both
/// run they must agree.
fn admissible_pair_sum(centered: &[f64], coords: &[u32], n_s: usize, n: usize) -> Result<f64> {
    let m = centered.len();
    let loop_value = if m <= 3163 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..m {
            'pair: for j in 0..m {
                if i == j {
                    continue;
                }
                for s in 0..n_s {
                    if coords[i * n_s + s] == coords[j * n_s + s] {
                        continue 'pair;
                    }
                }
                sum += centered[i] * centered[j];
                count += 1;
            }
        }
        let expected = saturating_pow(n, n_s) * saturating_pow(n - 1, n_s);
        if count != expected {
            return Err(Error::Domain(format!(
                "admissible pair count {count} does not match n^Ns (n-1)^Ns = {expected}"
            )));
        }
        Some(sum)
    } else {
        None
    };

    // inclusion-exclusion: sum over subsets A of subspace slots forced to
    // agree, with sign (-1)^|A|; the diagonal cancels exactly for n_s >= 1
    let mut ie = 0.0;
    let mut key = Vec::with_capacity(n_s);
    for mask in 0u32..(1u32 << n_s) {
        let mut groups: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (i, &c) in centered.iter().enumerate() {
            key.clear();
            for s in 0..n_s {
                if mask & (1 << s) != 0 {
                    key.push(coords[i * n_s + s]);
                }
            }
            *groups.entry(key.clone()).or_insert(0.0) += c;
        }
        let t: f64 = groups.values().map(|&g| g * g).sum();
        if mask.count_ones() % 2 == 0 {
            ie += t;
        } else {
            ie -= t;
        }
    }

    match loop_value {
        Some(lv) => {
            let scale = lv.abs().max(ie.abs()).max(1e-9);
            if (lv - ie).abs() > 1e-6 * scale {
                return Err(Error::Domain(format!(
                    "pair-sum routes disagree: loop {lv} vs inclusion-exclusion {ie}"
                )));
            }
            Ok(lv)
        }
        None => Ok(ie),
    }
}

/// Conditional first and second raw moments of h over one probability-space
/// box.
fn cell_moments(
    f: &TestFunction,
    marginals: &[MarginalDistribution],
    lower: &[f64],
    upper: &[f64],
    budget: &CellBudget,
    cell_index: u64,
) -> Result<(f64, f64)> {
    match *budget {
        CellBudget::Quadrature { order } => quadrature_moments(f, marginals, lower, upper, order),
        CellBudget::MonteCarlo { per_cell, seed } => {
            if per_cell == 0 {
                return Err(Error::Domain("Monte Carlo cell budget must be positive".into()));
            }
            let mut rng = stream_rng(seed, DOMAIN_CELLS, cell_index);
            let stratum = Stratum {
                lower: lower.to_vec(),
                upper: upper.to_vec(),
                probability: lower.iter().zip(upper).map(|(&l, &u)| u - l).product(),
            };
            let dim = marginals.len();
            let mut x = alloc::vec![0.0; dim];
            let mut shift = 0.0;
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for i in 0..per_cell {
                let u = conditional_uniform(&stratum, &mut rng);
                for j in 0..dim {
                    x[j] = marginals[j].inverse_cdf(u[j])?;
                }
                let y = f.evaluate(&x)?;
                if i == 0 {
                    shift = y;
                }
                let d = y - shift;
                s1 += d;
                s2 += d * d;
            }
            let mf = per_cell as f64;
            let mean = shift + s1 / mf;
            // E[y^2] = E[(y-s)^2] + 2 s E[y] - s^2
            let raw2 = s2 / mf + 2.0 * shift * mean - shift * shift;
            Ok((mean, raw2))
        }
    }
}

fn quadrature_moments(
    f: &TestFunction,
    marginals: &[MarginalDistribution],
    lower: &[f64],
    upper: &[f64],
    order: usize,
) -> Result<(f64, f64)> {
    if order == 0 {
        return Err(Error::Domain("quadrature order must be positive".into()));
    }
    let dim = marginals.len();
    let (nodes, weights) = gauss_legendre(order);
    // per-dimension nodes in u-space with their physical preimages
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut ws: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut total_nodes = 1usize;
    for j in 0..dim {
        let graded = !matches!(marginals[j], MarginalDistribution::Uniform { .. });
        let panels = panel_edges(lower[j], upper[j], graded);
        let mut xj = Vec::with_capacity(panels.len() * order);
        let mut wj = Vec::with_capacity(panels.len() * order);
        for &(a, b) in &panels {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (t, wt) in nodes.iter().zip(&weights) {
                let u = mid + half * t;
                xj.push(marginals[j].inverse_cdf(u)?);
                wj.push(half * wt);
            }
        }
        total_nodes = total_nodes.saturating_mul(xj.len());
        xs.push(xj);
        ws.push(wj);
    }
    if total_nodes > 100_000_000 {
        return Err(Error::Domain(format!(
            "quadrature grid of {total_nodes} nodes is too large; lower the order or use Monte Carlo"
        )));
    }

    let mut idx = alloc::vec![0usize; dim];
    let mut x = alloc::vec![0.0; dim];
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut wsum = 0.0;
    loop {
        let mut w = 1.0;
        for j in 0..dim {
            w *= ws[j][idx[j]];
            x[j] = xs[j][idx[j]];
        }
        let y = f.evaluate(&x)?;
        s1 += w * y;
        s2 += w * y * y;
        wsum += w;
        // odometer over the tensor grid
        let mut j = dim;
        loop {
            if j == 0 {
                return Ok((s1 / wsum, s2 / wsum));
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < xs[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Split a u-space interval into quadrature panels. Graded intervals get
/// geometrically spaced breakpoints toward 0 and 1, where non-uniform
/// quantiles steepen; the extreme edges are clamped away from the exact
/// endpoints, where unbounded quantiles diverge.
fn panel_edges(lo: f64, hi: f64, graded: bool) -> Vec<(f64, f64)> {
    if !graded {
        return alloc::vec![(lo, hi)];
    }
    const EPS: f64 = 1e-13;
    let a = lo.max(EPS);
    let b = hi.min(1.0 - EPS);
    let mut edges = alloc::vec![a];
    let mut p = 1.0;
    for _ in 1..=12 {
        p *= 0.1;
        if p > a && p < b {
            edges.push(p);
        }
    }
    let mut q = 1.0;
    for _ in 1..=12 {
        q *= 0.1;
        let r = 1.0 - q;
        if r > a && r < b {
            edges.push(r);
        }
    }
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Gauss-Legendre nodes and weights on (-1, 1), by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; order];
    let mut w = alloc::vec![0.0; order];
    let m = (order + 1) / 2;
    for i in 0..m {
        let mut z = cos(core::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5));
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..order {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = order as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{replicate_study, EstimatorKind};
    use crate::design_spec::SubspaceSpec;
    use libm::sqrt;

    fn uniform01(dim: usize) -> Vec<MarginalDistribution> {
        (0..dim).map(|_| MarginalDistribution::uniform(0.0, 1.0).unwrap()).collect()
    }

    fn uniform_sym(dim: usize) -> Vec<MarginalDistribution> {
        let r = sqrt(3.0);
        (0..dim).map(|_| MarginalDistribution::uniform(-r, r).unwrap()).collect()
    }

    fn identity() -> TestFunction {
        TestFunction::polynomial2(1, alloc::vec![], alloc::vec![], alloc::vec![1.0]).unwrap()
    }

    const QUAD: CellBudget = CellBudget::Quadrature { order: 16 };

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        // order m integrates degree 2m-1 exactly: try x^8 with order 5 on [0,1]
        let (x, w) = gauss_legendre(5);
        let integral: f64 = x
            .iter()
            .zip(&w)
            .map(|(&t, &wt)| {
                let u: f64 = 0.5 + 0.5 * t;
                0.5 * wt * u.powi(8)
            })
            .sum();
        assert!((integral - 1.0 / 9.0).abs() < 1e-14);
        let wsum: f64 = w.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-13);
    }

    #[test]
    fn quadrature_handles_unbounded_tails() {
        // E[X | u < 0.5] for X ~ N(0,1) is -2 phi(0) = -sqrt(2/pi)
        let marg = alloc::vec![MarginalDistribution::normal(0.0, 1.0).unwrap()];
        let f = identity();
        let (mu, raw2) = cell_moments(&f, &marg, &[0.0], &[0.5], &QUAD, 0).unwrap();
        let expected = -sqrt(2.0 / core::f64::consts::PI);
        assert!((mu - expected).abs() < 1e-9, "mu {mu} vs {expected}");
        // E[X^2 | X < 0] = 1 by symmetry
        assert!((raw2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ss_formula_simple_split() {
        // Y = X on U(0,1), two strata, n = 2: 1/24 - (1/2)(1/16+1/16)/1 ... = 1/96
        let grid = tensor_stratify(1, &[2]).unwrap();
        let v = ss_variance_formula(&identity(), &uniform01(1), &grid, 2, &QUAD).unwrap();
        assert!((v - 1.0 / 96.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn ss_formula_constant_is_zero() {
        let zero = TestFunction::polynomial2(2, alloc::vec![], alloc::vec![], alloc::vec![]).unwrap();
        let grid = tensor_stratify(2, &[3, 3]).unwrap();
        let v = ss_variance_formula(&zero, &uniform01(2), &grid, 9, &QUAD).unwrap();
        assert!(v.abs() < 1e-15);
        let (v, d) = pss_variance_formula(
            &zero,
            &uniform01(2),
            &DesignSpec::simple(Method::Lhs, 2, 4, 0),
            &QUAD,
        )
        .unwrap();
        assert!(v.abs() < 1e-15);
        assert!(d.pair_cov_sum.abs() < 1e-15);
    }

    #[test]
    fn ss_never_increases_variance() {
        let f = TestFunction::product(2).unwrap();
        let marg = uniform_sym(2);
        let var_tr = mean_estimator_variance(&f, &marg, 25, &QUAD).unwrap();
        for counts in [[5usize, 5], [25, 1], [1, 25]] {
            let grid = tensor_stratify(2, &counts).unwrap();
            let v = ss_variance_formula(&f, &marg, &grid, 25, &QUAD).unwrap();
            assert!(v <= var_tr + 1e-12, "counts {counts:?}: {v} vs {var_tr}");
        }
    }

    #[test]
    fn ss_formula_matches_replications() {
        // Product on U(-sqrt3, sqrt3)^2, [5,5] strata, n = 25
        let f = TestFunction::product(2).unwrap();
        let marg = uniform_sym(2);
        let grid = tensor_stratify(2, &[5, 5]).unwrap();
        let v = ss_variance_formula(&f, &marg, &grid, 25, &QUAD).unwrap();
        let mut spec = DesignSpec::simple(Method::Ss, 2, 25, 0);
        spec.subspaces.push(SubspaceSpec {
            variables: alloc::vec![0, 1],
            counts_per_dim: alloc::vec![5, 5],
            latinize: false,
        });
        let s = replicate_study(&spec, &marg, &f, &EstimatorKind::Mean, 100_000, 17).unwrap();
        assert!(
            (v - s.variance).abs() < 0.05 * s.variance,
            "formula {v} vs empirical {}",
            s.variance
        );
    }

    #[test]
    fn ss_monte_carlo_budget_agrees_with_quadrature() {
        let f = TestFunction::product(2).unwrap();
        let marg = uniform_sym(2);
        let grid = tensor_stratify(2, &[5, 5]).unwrap();
        let q = ss_variance_formula(&f, &marg, &grid, 25, &QUAD).unwrap();
        let mc = ss_variance_formula(
            &f,
            &marg,
            &grid,
            25,
            &CellBudget::MonteCarlo { per_cell: 200_000, seed: 4 },
        )
        .unwrap();
        assert!((q - mc).abs() < 0.02 * q.abs().max(1e-6), "quad {q} vs mc {mc}");
    }

    #[test]
    fn lhs_formula_reproduces_hand_enumeration() {
        // Y = X1 + X2 on U(0,1)^2 at n = 2: cells {0.5, 1, 1, 1.5}, tau 1,
        // admissible covariance sum -0.5, variance exactly 1/48
        let f = TestFunction::additive(2).unwrap(); // (2/2)(X1+X2) = X1+X2
        let marg = uniform01(2);
        let spec = DesignSpec::simple(Method::Lhs, 2, 2, 0);
        let (v, d) = pss_variance_formula(&f, &marg, &spec, &QUAD).unwrap();
        assert!((v - 1.0 / 48.0).abs() < 1e-12, "{v}");
        assert!((d.tau - 1.0).abs() < 1e-12);
        assert!((d.pair_cov_sum + 0.5).abs() < 1e-12);
        let mut means = d.cell_means.clone();
        means.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in means.iter().zip([0.5, 1.0, 1.0, 1.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let delegated = lhs_variance_formula(&f, &marg, 2, &QUAD).unwrap();
        assert_eq!(delegated, v);
    }

    #[test]
    fn lhs_zero_mean_product_gets_no_reduction() {
        // with symmetric zero-mean inputs the product function's admissible
        // covariance sum is positive: LHS is strictly worse than plain MC
        let f = TestFunction::product(2).unwrap();
        let marg = uniform_sym(2);
        let v = lhs_variance_formula(&f, &marg, 5, &QUAD).unwrap();
        let var_tr = 1.0 / 5.0; // Var(X1 X2) = 1 at n = 5
        assert!(v >= var_tr - 1e-9, "{v}");
        // frozen hand enumeration: 1/5 + (4/5) * (sum m^2)^2 / 400 = 0.24608
        assert!((v - 0.24608).abs() < 1e-9, "{v}");
    }

    #[test]
    fn lhs_reduces_monotone_functions() {
        // Y = X1 X2 on U(0,1)^2 is monotone in each coordinate: variance
        // must come out below plain MC; frozen exact enumeration value
        let f = TestFunction::product(2).unwrap();
        let marg = uniform01(2);
        let v = lhs_variance_formula(&f, &marg, 3, &QUAD).unwrap();
        let var_tr = 7.0 / 432.0; // Var(X1 X2)/3 = (1/9 - 1/16)/3
        assert!(v < var_tr, "{v} vs {var_tr}");
        assert!((v - 0.004_772_519_433_013_26).abs() < 1e-9, "{v}");
    }

    #[test]
    fn pss_formula_matches_replications() {
        // two 2-D subspaces with 3 strata each (counts [3,1]) at n = 3
        let f = TestFunction::product(4).unwrap();
        let marg = uniform01(4);
        let mut spec = DesignSpec::from_notation(Method::Pss, 4, 3, "2^2", 0).unwrap();
        for sub in &mut spec.subspaces {
            sub.counts_per_dim = alloc::vec![3, 1];
        }
        let (v, _) = pss_variance_formula(&f, &marg, &spec, &QUAD).unwrap();
        let s = replicate_study(&spec, &marg, &f, &EstimatorKind::Mean, 100_000, 23).unwrap();
        assert!(
            (v - s.variance).abs() < 0.05 * s.variance,
            "formula {v} vs empirical {}",
            s.variance
        );
    }

    #[test]
    fn pair_sum_routes_agree_on_random_cells() {
        // force both branches over a 4^3 = 64 cell layout with fabricated
        // means; the loop branch internally checks inclusion-exclusion
        let n = 4usize;
        let n_s = 3usize;
        let cells = n.pow(n_s as u32);
        let mut rng = crate::rng::design_rng(8);
        use rand::Rng;
        let centered_raw: Vec<f64> = (0..cells).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = centered_raw.iter().sum::<f64>() / cells as f64;
        let centered: Vec<f64> = centered_raw.iter().map(|&v| v - mean).collect();
        let mut coords = Vec::with_capacity(cells * n_s);
        for cell in 0..cells {
            let mut rest = cell;
            let mut digits = alloc::vec![0u32; n_s];
            for s in (0..n_s).rev() {
                digits[s] = (rest % n) as u32;
                rest /= n;
            }
            coords.extend_from_slice(&digits);
        }
        // the double loop verifies the count identity and the agreement with
        // inclusion-exclusion internally; any mismatch is an error
        let v = admissible_pair_sum(&centered, &coords, n_s, n).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn cell_guard_trips() {
        // 2^21 one-dimensional subspaces worth of cells exceeds the guard
        let f = TestFunction::additive(21).unwrap();
        let marg = uniform01(21);
        match lhs_variance_formula(&f, &marg, 2, &QUAD) {
            Err(Error::CellGuard { cells, limit }) => {
                assert_eq!(cells, 1 << 21);
                assert_eq!(limit, 1_000_000);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn formula_preconditions() {
        let f = TestFunction::product(4).unwrap();
        let marg = uniform01(4);
        // subspaces with q > 1 violate the one-sample-per-stratum setting
        let spec = DesignSpec::from_notation(Method::Pss, 4, 16, "2^2", 0).unwrap();
        let mut narrow = spec.clone();
        for sub in &mut narrow.subspaces {
            sub.counts_per_dim = alloc::vec![2, 2];
        }
        assert!(pss_variance_formula(&f, &marg, &narrow, &QUAD).is_err());
        // SRS has no cells
        let srs = DesignSpec::simple(Method::Srs, 4, 8, 0);
        assert!(pss_variance_formula(&f, &marg, &srs, &QUAD).is_err());
        // allocation must be proportional
        let grid = tensor_stratify(1, &[3]).unwrap();
        assert!(ss_variance_formula(&identity(), &uniform01(1), &grid, 10, &QUAD).is_err());
    }
}
