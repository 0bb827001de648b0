//! Tensor-product stratification of the unit hypercube in probability space.

use crate::error::{Error, Result};
use crate::rng::open01;
use alloc::format;
use alloc::vec::Vec;
use rand::Rng;

/// One half-open box [lower, upper) of the unit hypercube. Boxes touching
/// the upper boundary are closed at 1 so the strata cover all of [0, 1]^N.
#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Probability mass, equal to the box volume.
    pub probability: f64,
}

impl Stratum {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        if point.len() != self.dim() {
            return false;
        }
        point.iter().zip(&self.lower).zip(&self.upper).all(|((&x, &l), &u)| {
            x >= l && (x < u || (u == 1.0 && x == 1.0))
        })
    }

    /// Map per-dimension draws from (0, 1) into the box.
    pub fn map_unit(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .map(|((&r, &l), &u)| l + r * (u - l))
            .collect()
    }
}

/// Equal-probability tensor grid of strata in lexicographic index order
/// (the first dimension varies slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct StrataGrid {
    dim: usize,
    counts: Vec<usize>,
    strata: Vec<Stratum>,
}

/// Split [0, 1]^dim into `counts[0] * counts[1] * ...` equal-probability
/// boxes.
pub fn tensor_stratify(dim: usize, counts: &[usize]) -> Result<StrataGrid> {
    if counts.len() != dim {
        return Err(Error::InvalidDesign(format!(
            "counts vector has {} entries for a {dim}-dimensional space",
            counts.len()
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidDesign("dimension must be at least 1".into()));
    }
    if let Some(pos) = counts.iter().position(|&c| c == 0) {
        return Err(Error::InvalidDesign(format!("stratum count in dimension {pos} is zero")));
    }
    let total: usize = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).ok_or_else(
        || Error::InvalidDesign("stratum count product overflows".into()),
    )?;
    let probability = 1.0 / total as f64;
    let mut strata = Vec::with_capacity(total);
    let mut index = alloc::vec![0usize; dim];
    loop {
        let mut lower = Vec::with_capacity(dim);
        let mut upper = Vec::with_capacity(dim);
        for j in 0..dim {
            lower.push(index[j] as f64 / counts[j] as f64);
            upper.push((index[j] + 1) as f64 / counts[j] as f64);
        }
        strata.push(Stratum { lower, upper, probability });
        // lexicographic increment, last dimension fastest
        let mut j = dim;
        loop {
            if j == 0 {
                return Ok(StrataGrid { dim, counts: counts.to_vec(), strata });
            }
            j -= 1;
            index[j] += 1;
            if index[j] < counts[j] {
                break;
            }
            index[j] = 0;
        }
    }
}

impl StrataGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn stratum(&self, k: usize) -> &Stratum {
        &self.strata[k]
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// Flat lexicographic index of the stratum containing `point`, if any.
    pub fn locate(&self, point: &[f64]) -> Option<usize> {
        if point.len() != self.dim {
            return None;
        }
        let mut flat = 0usize;
        for (j, &x) in point.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return None;
            }
            let c = self.counts[j];
            let mut idx = (x * c as f64) as usize;
            if idx >= c {
                idx = c - 1; // x == 1.0 belongs to the last box
            }
            flat = flat * c + idx;
        }
        Some(flat)
    }
}

/// Draw a point uniformly from a stratum.
pub fn conditional_uniform<R: Rng + ?Sized>(s: &Stratum, rng: &mut R) -> Vec<f64> {
    (0..s.dim())
        .map(|j| {
            let (l, u) = (s.lower[j], s.upper[j]);
            loop {
                // l + r*(u-l) can round onto the open upper edge (or onto 1.0
                // in the top stratum); such draws land in the wrong stratum
                // under the half-open convention, so redraw
                let x = l + open01(rng) * (u - l);
                if x < u && x > 0.0 {
                    break x;
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_quarters() {
        let g = tensor_stratify(1, &[4]).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.stratum(0).lower, alloc::vec![0.0]);
        assert_eq!(g.stratum(0).upper, alloc::vec![0.25]);
        assert_eq!(g.stratum(3).lower, alloc::vec![0.75]);
        assert_eq!(g.stratum(3).upper, alloc::vec![1.0]);
        for s in g.strata() {
            assert_eq!(s.probability, 0.25);
        }
    }

    #[test]
    fn quadrants_are_lexicographic() {
        let g = tensor_stratify(2, &[2, 2]).unwrap();
        assert_eq!(g.len(), 4);
        // order: (0,0), (0,1), (1,0), (1,1) over (dim0, dim1)
        assert_eq!(g.stratum(1).lower, alloc::vec![0.0, 0.5]);
        assert_eq!(g.stratum(2).lower, alloc::vec![0.5, 0.0]);
        assert_eq!(g.stratum(3).lower, alloc::vec![0.5, 0.5]);
    }

    #[test]
    fn probabilities_sum_to_one() {
        for counts in [&[7usize, 3, 2][..], &[5, 5, 5], &[1, 12, 4]] {
            let g = tensor_stratify(counts.len(), counts).unwrap();
            let sum: f64 = g.strata().iter().map(|s| s.probability).sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for s in g.strata() {
                let vol: f64 =
                    s.lower.iter().zip(&s.upper).map(|(&l, &u)| u - l).product();
                assert!((vol - s.probability).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn every_point_in_exactly_one_stratum() {
        use rand::Rng;
        let g = tensor_stratify(3, &[4, 3, 5]).unwrap();
        let mut rng = crate::rng::design_rng(5);
        for _ in 0..10_000 {
            let p: alloc::vec::Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let hits = g.strata().iter().filter(|s| s.contains(&p)).count();
            assert_eq!(hits, 1, "point {p:?}");
            let k = g.locate(&p).unwrap();
            assert!(g.stratum(k).contains(&p));
        }
        // boundary point at the closed top corner
        let top = alloc::vec![1.0, 1.0, 1.0];
        assert_eq!(g.strata().iter().filter(|s| s.contains(&top)).count(), 1);
    }

    #[test]
    fn map_unit_midpoint_example() {
        let g = tensor_stratify(1, &[4]).unwrap();
        // second quarter [0.25, 0.5): draw 0.5 lands at 0.375
        let p = g.stratum(1).map_unit(&[0.5]);
        assert_eq!(p, alloc::vec![0.375]);
    }

    #[test]
    fn conditional_draws_stay_inside() {
        let g = tensor_stratify(2, &[3, 3]).unwrap();
        let mut rng = crate::rng::design_rng(6);
        for k in 0..g.len() {
            for _ in 0..1000 {
                let p = conditional_uniform(g.stratum(k), &mut rng);
                assert!(g.stratum(k).contains(&p));
            }
        }
    }

    #[test]
    fn conditional_uniformity_chi_square() {
        // 1e5 draws from one 2-D stratum, 10x10 probe bins; chi-square
        // critical value at level 0.001 for df=99 is 148.23.
        let g = tensor_stratify(2, &[4, 4]).unwrap();
        let s = g.stratum(5); // interior box [0.25,0.5) x [0.25,0.5)
        let mut rng = crate::rng::design_rng(7);
        let bins = 10usize;
        let mut counts = alloc::vec![0u32; bins * bins];
        let n = 100_000;
        for _ in 0..n {
            let p = conditional_uniform(s, &mut rng);
            let bx = (((p[0] - s.lower[0]) / (s.upper[0] - s.lower[0])) * bins as f64) as usize;
            let by = (((p[1] - s.lower[1]) / (s.upper[1] - s.lower[1])) * bins as f64) as usize;
            counts[bx.min(bins - 1) * bins + by.min(bins - 1)] += 1;
        }
        let expect = n as f64 / (bins * bins) as f64;
        let stat: f64 = counts
            .iter()
            .map(|&o| {
                let d = o as f64 - expect;
                d * d / expect
            })
            .sum();
        assert!(stat < 148.23, "chi-square statistic {stat} exceeds 0.001 critical value");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(tensor_stratify(2, &[4]).is_err());
        assert!(tensor_stratify(2, &[4, 0]).is_err());
        assert!(tensor_stratify(0, &[]).is_err());
    }
}
