//! Seeded binomial random subsets, two-round exposure and concentration
//! helpers.
//!
//! Every sample is a pure function of `(seed, stream)`: the generator is
//! ChaCha8 keyed by the seed with the stream id selecting an independent
//! keystream, so trials can run on any worker in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VdwError};
use crate::subset::GroundSubset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSeed {
    pub seed: u64,
    pub stream: u64,
}

const SECOND_ROUND_TAG: u64 = 0x5345_434f_4e44_5244;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl RandomSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Same stream under a different key; used for separate sampling rounds.
    pub fn derive(&self, tag: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(tag)),
            stream: self.stream,
        }
    }

    pub fn with_stream(&self, stream: u64) -> Self {
        Self {
            seed: self.seed,
            stream,
        }
    }
}

/// `p = c * n^(-1/(k-1))`, computed once from `(c, n, k)`.
pub fn threshold_probability(n: usize, k: usize, c: f64) -> f64 {
    c * (n as f64).powf(-1.0 / (k as f64 - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub p: f64,
    pub epsilon: Option<f64>,
}

impl SampleConfig {
    pub fn new(n: usize, k: usize, c: f64, epsilon: Option<f64>) -> Result<Self> {
        if k < 3 {
            return Err(VdwError::Param(format!("k must be at least 3, got {k}")));
        }
        if n == 0 {
            return Err(VdwError::Param("n must be at least 1".into()));
        }
        let p = threshold_probability(n, k, c);
        check_probability(p)?;
        if let Some(e) = epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return Err(VdwError::Param(format!("epsilon {e} outside (0, 1]")));
            }
        }
        Ok(Self {
            n,
            k,
            c,
            p,
            epsilon,
        })
    }

    pub fn second_round_probability(&self) -> Option<f64> {
        self.epsilon.map(|e| e * self.p)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(VdwError::Param(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// `Z_{n,p}`: each residue kept independently with probability `p`.
pub fn sample_binomial_subset(n: usize, p: f64, seed: RandomSeed) -> Result<GroundSubset> {
    check_probability(p)?;
    let mut rng = seed.rng();
    let mut out = GroundSubset::empty(n);
    for v in 0..n as u32 {
        if rng.gen::<f64>() < p {
            out.insert(v);
        }
    }
    Ok(out)
}

/// `Z ∪ Z_{n,q}` with the fresh sample keyed separately from `seed`.
pub fn second_round(z: &GroundSubset, q: f64, seed: RandomSeed) -> Result<GroundSubset> {
    let fresh = sample_binomial_subset(z.modulus(), q, seed.derive(SECOND_ROUND_TAG))?;
    z.union(&fresh)
}

/// `2 exp(-t^2 / (2 (EX + t/3)))`.
pub fn chernoff_tail(expectation: f64, t: f64) -> Result<f64> {
    if expectation < 0.0 || t <= 0.0 {
        return Err(VdwError::Param(format!(
            "need expectation >= 0 and t > 0, got ({expectation}, {t})"
        )));
    }
    Ok(2.0 * (-t * t / (2.0 * (expectation + t / 3.0))).exp())
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(VdwError::Param("wilson interval needs trials >= 1".into()));
    }
    if successes > trials {
        return Err(VdwError::Param(format!(
            "{successes} successes > {trials} trials"
        )));
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    Ok((lo.min(phat), hi.max(phat)))
}
