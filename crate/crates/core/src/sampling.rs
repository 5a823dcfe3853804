//! Seeded random instance families.
//!
//! Everything is driven by `ChaCha8Rng`, so a seed fixes the whole sequence
//! on every platform.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::poly::RootMultiset;
use crate::spectral::WeightedRootGraph;
use crate::vandermonde::ConfluentSpec;
use crate::{Error, Result};

/// Distinct Gaussian-integer roots in `[−coord, coord]²` and a random
/// weighted graph on them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceFamily {
    pub r_min: usize,
    pub r_max: usize,
    pub w_max: u32,
    pub coord: i32,
    /// Probability of each possible edge.
    pub edge_probability: f64,
}

impl Default for InstanceFamily {
    fn default() -> Self {
        Self {
            r_min: 2,
            r_max: 6,
            w_max: 6,
            coord: 4,
            edge_probability: 0.5,
        }
    }
}

impl InstanceFamily {
    pub fn validate(&self) -> Result<()> {
        let side = (2 * self.coord as i64 + 1).pow(2);
        if self.r_min == 0 || self.r_min > self.r_max {
            return Err(Error::InvalidInput(format!(
                "need 1 ≤ r_min ≤ r_max, got {}..{}",
                self.r_min, self.r_max
            )));
        }
        if self.coord < 0 || (self.r_max as i64) > side {
            return Err(Error::InvalidInput("root grid too small for r_max".into()));
        }
        if self.w_max == 0 {
            return Err(Error::InvalidInput("w_max must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return Err(Error::InvalidInput("edge probability outside [0, 1]".into()));
        }
        Ok(())
    }
}

/// Draws one instance. For `r ≥ 2` at least one edge is present.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    family: &InstanceFamily,
) -> Result<(RootMultiset, WeightedRootGraph)> {
    family.validate()?;
    let r = rng.gen_range(family.r_min..=family.r_max);
    let c = family.coord;
    let mut grid: Vec<(i32, i32)> = (-c..=c).flat_map(|x| (-c..=c).map(move |y| (x, y))).collect();
    let (picked, _) = grid.partial_shuffle(rng, r);
    let roots = picked
        .iter()
        .map(|&(x, y)| Complex64::new(x as f64, y as f64))
        .collect();
    let rm = RootMultiset::simple(roots)?;

    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let mut edges = Vec::new();
    for &(i, j) in &pairs {
        if rng.gen_bool(family.edge_probability) {
            edges.push((i, j, rng.gen_range(1..=family.w_max)));
        }
    }
    if edges.is_empty() && !pairs.is_empty() {
        let (i, j) = pairs[rng.gen_range(0..pairs.len())];
        edges.push((i, j, rng.gen_range(1..=family.w_max)));
    }
    let g = WeightedRootGraph::new(r, edges)?;
    Ok((rm, g))
}

/// `count` instances from one seed.
pub fn instances(
    seed: u64,
    count: usize,
    family: &InstanceFamily,
) -> Result<Vec<(RootMultiset, WeightedRootGraph)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, family)).collect()
}

/// Random confluent spec with `n ≤ n_max`: complex nodes in the disk of
/// radius `radius`, pairwise at least `min_gap` apart.
pub fn random_confluent_spec<R: Rng>(
    rng: &mut R,
    n_max: usize,
    radius: f64,
    min_gap: f64,
) -> Result<ConfluentSpec> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be positive".into()));
    }
    let n = rng.gen_range(1..=n_max);
    let mut mus = Vec::new();
    let mut left = n;
    while left > 0 {
        let m = rng.gen_range(1..=left.min(4));
        mus.push(m as u32);
        left -= m;
    }
    let mut betas: Vec<Complex64> = Vec::with_capacity(mus.len());
    while betas.len() < mus.len() {
        let z = Complex64::from_polar(
            radius * rng.gen::<f64>().sqrt(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        if betas.iter().all(|b| (b - z).norm() >= min_gap) {
            betas.push(z);
        }
    }
    ConfluentSpec::new(betas, mus)
}
