//! Sample-set generators for the whole SS <-> LHS spectrum.
//!
//! Every design is built in the unit hypercube first and pushed through the
//! marginal inverse CDFs afterwards. Rows are stratum-major for the first
//! subspace; every further subspace is joined to the first by an independent
//! uniform row permutation, which is what makes a design "partially"
//! stratified: projections keep their stratification while the joint pairing
//! is random.

use crate::design_spec::{validate_design, DesignSpec, Method, SubspaceSpec};
use crate::distributions::MarginalDistribution;
use crate::error::{Error, Result};
use crate::matrix::{IndexMatrix, Matrix};
use crate::rng::{open01, replication_rng, Stream};
use crate::strata::{conditional_uniform, tensor_stratify};
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng;

/// How many fresh restarts the randomized LSS search is allowed before the
/// constructive fallback takes over.
const LSS_RESTARTS: u32 = 1000;

/// A generated design: physical points, their unit-hypercube preimages,
/// estimator weights, and per-subspace stratum membership.
#[derive(Debug, Clone)]
pub struct SampleSet {
    /// n x N physical realizations.
    pub points: Matrix,
    /// n x N unit-hypercube coordinates, each in (0, 1).
    pub unit_points: Matrix,
    /// Estimator weights, one per sample; always 1/n for these designs.
    pub weights: Vec<f64>,
    /// n x S flat stratum indices, one column per subspace; 0 x 0 for SRS.
    pub cell_coords: IndexMatrix,
    /// The validated spec that produced this set.
    pub spec: DesignSpec,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }
}

/// Generate replication 0 of a design.
pub fn generate(spec: &DesignSpec, marginals: &[MarginalDistribution]) -> Result<SampleSet> {
    generate_replication(spec, marginals, 0)
}

/// Generate one replication of a design. Replications share the spec seed
/// but draw from disjoint RNG streams, so any subset can be produced
/// independently and in any order.
pub fn generate_replication(
    spec: &DesignSpec,
    marginals: &[MarginalDistribution],
    replication: u64,
) -> Result<SampleSet> {
    let spec = validate_design(spec)?;
    if marginals.len() != spec.dim {
        return Err(Error::DimensionMismatch { declared: marginals.len(), expected: spec.dim });
    }
    let mut rng = replication_rng(spec.seed, replication);
    let (unit_points, cell_coords) = build_unit_points(&spec, &mut rng)?;

    let n = spec.n;
    let mut points = Matrix::zeros(n, spec.dim);
    for i in 0..n {
        for (j, m) in marginals.iter().enumerate() {
            points.set(i, j, m.inverse_cdf(unit_points.get(i, j))?);
        }
    }
    let weights = alloc::vec![1.0 / n as f64; n];
    Ok(SampleSet { points, unit_points, weights, cell_coords, spec })
}

/// Simple random sampling.
pub fn srs(dim: usize, n: usize, marginals: &[MarginalDistribution], seed: u64) -> Result<SampleSet> {
    generate(&DesignSpec::simple(Method::Srs, dim, n, seed), marginals)
}

/// True stratified sampling on the full space. Empty `counts` asks for the
/// default grid (n = m^dim).
pub fn stratified(
    dim: usize,
    counts: &[usize],
    n: usize,
    marginals: &[MarginalDistribution],
    seed: u64,
) -> Result<SampleSet> {
    generate(&full_space_spec(Method::Ss, dim, counts, n, seed), marginals)
}

/// Latin hypercube sampling.
pub fn lhs(dim: usize, n: usize, marginals: &[MarginalDistribution], seed: u64) -> Result<SampleSet> {
    generate(&DesignSpec::simple(Method::Lhs, dim, n, seed), marginals)
}

/// Latinized stratified sampling on the full space: simultaneously a valid
/// stratified design and a valid Latin hypercube.
pub fn lss(
    dim: usize,
    counts: &[usize],
    n: usize,
    marginals: &[MarginalDistribution],
    seed: u64,
) -> Result<SampleSet> {
    generate(&full_space_spec(Method::Lss, dim, counts, n, seed), marginals)
}

/// Partially stratified sampling with the subspace layout given in notation
/// form, e.g. `"2^50"` or `"4 1^2"`. Strata counts take the defaults.
pub fn pss(
    dim: usize,
    notation: &str,
    n: usize,
    marginals: &[MarginalDistribution],
    seed: u64,
) -> Result<SampleSet> {
    generate(&DesignSpec::from_notation(Method::Pss, dim, n, notation, seed)?, marginals)
}

/// PSS whose subspace designs are latinized (LSS on each subspace).
pub fn lpss(
    dim: usize,
    notation: &str,
    n: usize,
    marginals: &[MarginalDistribution],
    seed: u64,
) -> Result<SampleSet> {
    generate(&DesignSpec::from_notation(Method::Lpss, dim, n, notation, seed)?, marginals)
}

fn full_space_spec(method: Method, dim: usize, counts: &[usize], n: usize, seed: u64) -> DesignSpec {
    let mut spec = DesignSpec::simple(method, dim, n, seed);
    if !counts.is_empty() {
        spec.subspaces.push(SubspaceSpec {
            variables: (0..dim).collect(),
            counts_per_dim: counts.to_vec(),
            latinize: method == Method::Lss,
        });
    }
    spec
}

/// Unit-space construction. The spec must already be validated.
fn build_unit_points(spec: &DesignSpec, rng: &mut Stream) -> Result<(Matrix, IndexMatrix)> {
    let (n, dim) = (spec.n, spec.dim);
    match spec.method {
        Method::Srs => {
            let mut unit = Matrix::zeros(n, dim);
            for i in 0..n {
                for j in 0..dim {
                    unit.set(i, j, open01(rng));
                }
            }
            Ok((unit, IndexMatrix::zeros(0, 0)))
        }
        Method::Lhs => {
            let mut unit = Matrix::zeros(n, dim);
            let mut cells = IndexMatrix::zeros(n, dim);
            let mut bins: Vec<usize> = (0..n).collect();
            for j in 0..dim {
                bins.shuffle(rng);
                for i in 0..n {
                    unit.set(i, j, bin_draw(rng, bins[i], n));
                    cells.set(i, j, bins[i] as u32);
                }
            }
            Ok((unit, cells))
        }
        _ => {
            let mut unit = Matrix::zeros(n, dim);
            let mut cells = IndexMatrix::zeros(n, spec.subspaces.len());
            let mut order: Vec<usize> = (0..n).collect();
            for (s, sub) in spec.subspaces.iter().enumerate() {
                let block = if sub.latinize {
                    lss_block(&sub.counts_per_dim, n, rng)?
                } else {
                    ss_block(&sub.counts_per_dim, n, rng)?
                };
                if s > 0 {
                    order.shuffle(rng);
                }
                for i in 0..n {
                    let r = if s == 0 { i } else { order[i] };
                    for (c, &v) in sub.variables.iter().enumerate() {
                        unit.set(i, v, block.rows.get(r, c));
                    }
                    cells.set(i, s, block.cells[r]);
                }
            }
            Ok((unit, cells))
        }
    }
}

/// One subspace design in its own unit cube, stratum-major row order.
struct SubspaceBlock {
    rows: Matrix,
    cells: Vec<u32>,
}

/// Plain stratified block: q = n/M conditional-uniform draws per stratum.
fn ss_block(counts: &[usize], n: usize, rng: &mut Stream) -> Result<SubspaceBlock> {
    let d = counts.len();
    let grid = tensor_stratify(d, counts)?;
    let m = grid.len();
    let q = n / m;
    debug_assert_eq!(q * m, n);
    let mut rows = Matrix::zeros(n, d);
    let mut cells = Vec::with_capacity(n);
    for k in 0..m {
        for t in 0..q {
            let point = conditional_uniform(grid.stratum(k), rng);
            rows.row_mut(k * q + t).copy_from_slice(&point);
            cells.push(k as u32);
        }
    }
    Ok(SubspaceBlock { rows, cells })
}

/// Latinized stratified block: a design that fills every stratum with
/// exactly q = n/M samples while every one of the n marginal bins per
/// dimension holds exactly one sample.
///
/// Primary path: draw ungrouped Latin hypercube marginals, then walk the
/// strata and randomly pick, per dimension and without replacement, a
/// marginal point lying inside the stratum. For tensor grids whose stratum
/// edges align with bin edges the pools never run dry, but the selection is
/// randomized, so a bounded restart loop guards against deadlock; if all
/// restarts are exhausted a deterministic block-dealing construction takes
/// over.
fn lss_block(counts: &[usize], n: usize, rng: &mut Stream) -> Result<SubspaceBlock> {
    for _ in 0..LSS_RESTARTS {
        if let Some(block) = lss_attempt(counts, n, rng) {
            if verify_lss(&block, counts, n) {
                return Ok(block);
            }
            return Err(Error::LssConstruction { retries: 0 });
        }
    }
    let block = lss_constructive(counts, n, rng);
    if verify_lss(&block, counts, n) {
        Ok(block)
    } else {
        Err(Error::LssConstruction { retries: LSS_RESTARTS })
    }
}

/// One randomized selection pass; `None` signals a deadlocked pool.
fn lss_attempt(counts: &[usize], n: usize, rng: &mut Stream) -> Option<SubspaceBlock> {
    let d = counts.len();
    let m: usize = counts.iter().product();
    let q = n / m;

    // ungrouped LHS marginals: one point per bin per dimension
    let positions: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..n).map(|b| bin_draw(rng, b, n)).collect())
        .collect();

    // unused bins per dimension, partitioned by stratum slab
    let mut pools: Vec<Vec<Vec<usize>>> = counts
        .iter()
        .map(|&c| {
            let per = n / c;
            (0..c).map(|s| (s * per..(s + 1) * per).collect()).collect()
        })
        .collect();

    let mut rows = Matrix::zeros(n, d);
    let mut cells = Vec::with_capacity(n);
    for k in 0..m {
        let coords = decode_coords(k, counts);
        for t in 0..q {
            let row = k * q + t;
            for j in 0..d {
                let pool = &mut pools[j][coords[j]];
                if pool.is_empty() {
                    return None;
                }
                let pick = rng.random_range(0..pool.len());
                let bin = pool.swap_remove(pick);
                rows.set(row, j, positions[j][bin]);
            }
            cells.push(k as u32);
        }
    }
    Some(SubspaceBlock { rows, cells })
}

/// Deterministic fallback: slab s of dimension j contains n/c_j bins; deal
/// them in blocks of q to the strata sharing that slab, ordered by stratum
/// rank, then shuffle each stratum's bins among its q samples for every
/// dimension beyond the first.
fn lss_constructive(counts: &[usize], n: usize, rng: &mut Stream) -> SubspaceBlock {
    let d = counts.len();
    let m: usize = counts.iter().product();
    let q = n / m;
    let positions: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..n).map(|b| bin_draw(rng, b, n)).collect())
        .collect();

    let mut rows = Matrix::zeros(n, d);
    let mut cells = Vec::with_capacity(n);
    let mut deal: Vec<usize> = (0..q).collect();
    for k in 0..m {
        let coords = decode_coords(k, counts);
        for j in 0..d {
            let per = n / counts[j];
            // rank of this stratum among those sharing slab coords[j]:
            // lexicographic index of its coordinates with dimension j removed
            let mut rank = 0usize;
            for l in 0..d {
                if l != j {
                    rank = rank * counts[l] + coords[l];
                }
            }
            let base = coords[j] * per + rank * q;
            if j == 0 {
                for (t, item) in deal.iter_mut().enumerate() {
                    *item = t;
                }
            } else {
                deal.shuffle(rng);
            }
            for t in 0..q {
                rows.set(k * q + t, j, positions[j][base + deal[t]]);
            }
        }
        for _ in 0..q {
            cells.push(k as u32);
        }
    }
    SubspaceBlock { rows, cells }
}

fn decode_coords(mut k: usize, counts: &[usize]) -> Vec<usize> {
    let mut coords = alloc::vec![0usize; counts.len()];
    for j in (0..counts.len()).rev() {
        coords[j] = k % counts[j];
        k /= counts[j];
    }
    coords
}

/// Exact structural check: every marginal bin holds one sample and every
/// stratum holds exactly n/M samples in the right place.
fn verify_lss(block: &SubspaceBlock, counts: &[usize], n: usize) -> bool {
    let d = counts.len();
    let m: usize = counts.iter().product();
    let q = n / m;
    // marginal LHS: one sample strictly inside each bin
    for j in 0..d {
        let mut col: Vec<f64> = (0..n).map(|i| block.rows.get(i, j)).collect();
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (b, &v) in col.iter().enumerate() {
            if !(v > b as f64 / n as f64 && v < (b + 1) as f64 / n as f64) {
                return false;
            }
        }
    }
    // stratification: locate each row in the tensor grid
    let grid = match tensor_stratify(d, counts) {
        Ok(g) => g,
        Err(_) => return false,
    };
    let mut per_stratum = alloc::vec![0usize; m];
    for i in 0..n {
        match grid.locate(block.rows.row(i)) {
            Some(k) if k as u32 == block.cells[i] => per_stratum[k] += 1,
            _ => return false,
        }
    }
    per_stratum.iter().all(|&c| c == q)
}

/// Uniform draw from the strict interior of marginal bin `b` out of `n`.
fn bin_draw<R: Rng + ?Sized>(rng: &mut R, bin: usize, n: usize) -> f64 {
    let lo = bin as f64 / n as f64;
    let hi = (bin + 1) as f64 / n as f64;
    loop {
        // rounding can land on either edge; edge hits belong to the
        // neighboring bin under the half-open convention, so redraw
        let x = (bin as f64 + open01(rng)) / n as f64;
        if x > lo && x < hi {
            return x;
        }
    }
}
