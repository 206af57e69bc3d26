//! Monte Carlo orchestration: threshold sweeps and their estimates, the
//! two-round and translate rates, lemma verification campaigns and run
//! configuration.

pub mod campaigns;
pub mod config;
pub mod estimate;
pub mod sweep;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cyclic::ApFamily;
use crate::error::{Result, VdwError};
use crate::ramsey::{interacting_translates, is_ramsey};
use crate::random::{
    sample_binomial_subset, second_round, threshold_probability, wilson_interval, RandomSeed,
};
use crate::subset::GroundSubset;

pub use campaigns::{verify_lemma, CampaignCheck, CampaignReport, CAMPAIGNS};
pub use config::HarnessConfig;
pub use estimate::{estimate_threshold, LogisticFit, ThresholdEstimate};
pub use sweep::{sweep_threshold, GridPoint, SweepOptions, SweepSpec, SweepTable, TrialRecord};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson: (f64, f64),
}

impl RateReport {
    fn new(successes: u64, trials: u64) -> Result<Self> {
        Ok(Self {
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            wilson: wilson_interval(successes, trials, sweep::WILSON_Z)?,
        })
    }
}

/// Fraction of fresh samples `Z_{n, eps p}` with `Z ∪ Z_{n, eps p}` Ramsey,
/// where `p = c n^{-1/(k-1)}`. Trial `t` uses stream `t` of `seed`.
pub fn second_round_extension_rate<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    epsilon: f64,
    c: f64,
    trials: u64,
    fam: &F,
    seed: RandomSeed,
) -> Result<RateReport> {
    if trials == 0 {
        return Err(VdwError::Param("trials must be at least 1".into()));
    }
    if epsilon < 0.0 {
        return Err(VdwError::Param(format!("epsilon {epsilon} < 0")));
    }
    let q = epsilon * threshold_probability(z.modulus(), fam.k(), c);
    if q > 1.0 {
        return Err(VdwError::Param(format!("second round probability {q} > 1")));
    }
    if is_ramsey(z, fam)? {
        return Err(VdwError::Precondition("Z -> (k-AP)_2 already".into()));
    }
    let mut hits = 0;
    for t in 0..trials {
        let u = second_round(z, q, seed.with_stream(t))?;
        hits += u64::from(is_ramsey(&u, fam)?);
    }
    RateReport::new(hits, trials)
}

/// `|{x : Z ∪ (B+x) -> (k-AP)_2}| / n`.
pub fn translate_interaction_rate<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    fam: &F,
) -> Result<f64> {
    let x = interacting_translates(z, b, fam)?;
    Ok(x.len() as f64 / z.modulus() as f64)
}

/// `core_count * exp(-eta^2 p n / 4)`.
pub fn union_bound_report(core_count: f64, n: usize, p: f64, eta: f64) -> f64 {
    if core_count == 0.0 {
        return 0.0;
    }
    core_count * (-eta * eta * p * n as f64 / 4.0).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractingTriple {
    pub z: GroundSubset,
    pub b: GroundSubset,
    pub x: GroundSubset,
    pub attempts: usize,
}

/// Random search for `(Z, B, X)` with `Z`, `B` not Ramsey and `X` the
/// nonempty set of interacting translates. `Z` has density `density`; `B`
/// has between 1 and `max_b` members.
pub fn find_interacting_triple<F: ApFamily + ?Sized>(
    fam: &F,
    density: f64,
    max_b: usize,
    attempts: usize,
    seed: RandomSeed,
) -> Result<Option<InteractingTriple>> {
    let n = fam.n();
    if max_b == 0 || max_b > n {
        return Err(VdwError::Param(format!(
            "|B| bound {max_b} outside 1..={n}"
        )));
    }
    for a in 0..attempts {
        let s = seed.with_stream(a as u64);
        let z = sample_binomial_subset(n, density, s)?;
        if is_ramsey(&z, fam)? {
            continue;
        }
        let mut rng = s.derive(1).rng();
        let size = rng.gen_range(1..=max_b);
        let b =
            GroundSubset::from_members(n, sample(&mut rng, n, size).into_iter().map(|v| v as u32))?;
        if is_ramsey(&b, fam)? {
            continue;
        }
        let x = interacting_translates(&z, &b, fam)?;
        if !x.is_empty() {
            return Ok(Some(InteractingTriple {
                z,
                b,
                x,
                attempts: a + 1,
            }));
        }
    }
    Ok(None)
}
