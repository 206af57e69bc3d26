//! Crossing points of the arrow probability from a monotone logistic fit
//! in `ln c`, with parametric bootstrap intervals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VdwError};
use crate::harness::sweep::GridPoint;
use crate::random::RandomSeed;

pub const DEFAULT_BOOTSTRAP: usize = 200;

/// Ridge on the slope; keeps separated (step) data finite.
const SLOPE_RIDGE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
}

impl LogisticFit {
    pub fn mu(&self, c: f64) -> f64 {
        1.0 / (1.0 + (-(self.intercept + self.slope * c.ln())).exp())
    }

    /// `c` with `mu(c) = q`; `None` unless the fit is increasing.
    pub fn crossing(&self, q: f64) -> Option<f64> {
        (self.slope > 0.0).then(|| (((q / (1.0 - q)).ln() - self.intercept) / self.slope).exp())
    }
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

fn objective(x: &[f64], n: &[f64], s: &[f64], a: f64, b: f64) -> f64 {
    x.iter()
        .zip(n)
        .zip(s)
        .map(|((&x, &n), &s)| {
            let eta = a + b * x;
            s * eta - n * softplus(eta)
        })
        .sum::<f64>()
        - 0.5 * SLOPE_RIDGE * b * b
}

/// Penalized binomial maximum likelihood by damped Newton steps. `None`
/// when all trials agree (no crossing information).
pub fn fit_logistic(log_c: &[f64], trials: &[u64], successes: &[u64]) -> Option<LogisticFit> {
    let n: Vec<f64> = trials.iter().map(|&t| t as f64).collect();
    let s: Vec<f64> = successes.iter().map(|&t| t as f64).collect();
    let (tn, ts): (f64, f64) = (n.iter().sum(), s.iter().sum());
    if ts == 0.0 || ts == tn {
        return None;
    }
    let mut a = (ts / (tn - ts)).ln();
    let mut b = 0.0;
    let mut f = objective(log_c, &n, &s, a, b);
    for _ in 0..500 {
        let (mut ga, mut gb, mut haa, mut hab, mut hbb) =
            (0.0, -SLOPE_RIDGE * b, 0.0, 0.0, SLOPE_RIDGE);
        for ((&x, &ni), &si) in log_c.iter().zip(&n).zip(&s) {
            let mu = 1.0 / (1.0 + (-(a + b * x)).exp());
            let r = si - ni * mu;
            let w = ni * mu * (1.0 - mu);
            ga += r;
            gb += r * x;
            haa += w;
            hab += w * x;
            hbb += w * x * x;
        }
        let det = haa * hbb - hab * hab;
        if det <= 0.0 {
            break;
        }
        let da = (hbb * ga - hab * gb) / det;
        let db = (haa * gb - hab * ga) / det;
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-12 {
            let g = objective(log_c, &n, &s, a + t * da, b + t * db);
            if g >= f {
                a += t * da;
                b += t * db;
                improved = g - f > 1e-13;
                f = g;
                break;
            }
            t *= 0.5;
        }
        if !improved || (da.abs() + db.abs()) * t < 1e-10 {
            break;
        }
    }
    Some(LogisticFit {
        intercept: a,
        slope: b,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub n: usize,
    pub c_half: Option<f64>,
    pub c_lo: Option<f64>,
    pub c_hi: Option<f64>,
    pub c_half_ci: Option<(f64, f64)>,
    pub c_lo_ci: Option<(f64, f64)>,
    pub c_hi_ci: Option<(f64, f64)>,
    /// `c_hi / c_lo`.
    pub window: Option<f64>,
    /// The fitted curve does not cross 1/2 inside the grid, or cannot be fit.
    pub outside_grid: bool,
    pub fit: Option<LogisticFit>,
    /// `(c, wilson_lo, wilson_hi)` per grid point.
    pub wilson: Vec<(f64, f64, f64)>,
}

fn crossings(fit: &LogisticFit) -> Option<[f64; 3]> {
    Some([fit.crossing(0.1)?, fit.crossing(0.5)?, fit.crossing(0.9)?])
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos - pos.floor());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

/// Per-`n` threshold estimate from one size's grid points.
pub fn estimate_one(
    points: &[GridPoint],
    bootstrap: usize,
    seed: RandomSeed,
) -> Result<ThresholdEstimate> {
    let n = points
        .first()
        .ok_or_else(|| VdwError::Param("no grid points".into()))?
        .n;
    if points.iter().any(|p| p.n != n) {
        return Err(VdwError::Param("points from several n".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.c.total_cmp(&b.c));
    let x: Vec<f64> = pts.iter().map(|p| p.c.ln()).collect();
    let tr: Vec<u64> = pts.iter().map(|p| p.trials).collect();
    let su: Vec<u64> = pts.iter().map(|p| p.successes).collect();
    let (cmin, cmax) = (pts[0].c, pts[pts.len() - 1].c);
    let wilson = pts
        .iter()
        .map(|p| (p.c, p.wilson_lo, p.wilson_hi))
        .collect();
    let fit = fit_logistic(&x, &tr, &su);
    let cs = fit.as_ref().and_then(crossings);
    let inside = cs.is_some_and(|c| c[1] >= cmin && c[1] <= cmax);
    if !inside {
        return Ok(ThresholdEstimate {
            n,
            c_half: None,
            c_lo: None,
            c_hi: None,
            c_half_ci: None,
            c_lo_ci: None,
            c_hi_ci: None,
            window: None,
            outside_grid: true,
            fit,
            wilson,
        });
    }
    let cs = cs.unwrap();
    let mut rng = seed.rng();
    let mut reps: [Vec<f64>; 3] = Default::default();
    for _ in 0..bootstrap {
        let sim: Vec<u64> = tr
            .iter()
            .zip(&su)
            .map(|(&t, &s)| {
                let q = s as f64 / t as f64;
                (0..t).filter(|_| rng.gen::<f64>() < q).count() as u64
            })
            .collect();
        if let Some(c) = fit_logistic(&x, &tr, &sim).as_ref().and_then(crossings) {
            for i in 0..3 {
                reps[i].push(c[i]);
            }
        }
    }
    let ci = |v: &mut Vec<f64>| -> Option<(f64, f64)> {
        if v.len() * 2 < bootstrap.max(1) {
            return None;
        }
        v.sort_by(f64::total_cmp);
        Some((percentile(v, 0.025), percentile(v, 0.975)))
    };
    let [mut r0, mut r1, mut r2] = reps;
    Ok(ThresholdEstimate {
        n,
        c_half: Some(cs[1]),
        c_lo: Some(cs[0]),
        c_hi: Some(cs[2]),
        c_lo_ci: ci(&mut r0),
        c_half_ci: ci(&mut r1),
        c_hi_ci: ci(&mut r2),
        window: Some(cs[2] / cs[0]),
        outside_grid: false,
        fit,
        wilson,
    })
}

/// One estimate per distinct `n`, in order of first appearance.
pub fn estimate_threshold(
    points: &[GridPoint],
    bootstrap: usize,
    seed: RandomSeed,
) -> Result<Vec<ThresholdEstimate>> {
    let mut ns: Vec<usize> = Vec::new();
    for p in points {
        if !ns.contains(&p.n) {
            ns.push(p.n);
        }
    }
    ns.into_iter()
        .map(|n| {
            let sub: Vec<GridPoint> = points.iter().filter(|p| p.n == n).cloned().collect();
            estimate_one(&sub, bootstrap, seed.derive(n as u64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sweep::{log_grid, WILSON_Z};
    use crate::random::wilson_interval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point(c: f64, trials: u64, successes: u64) -> GridPoint {
        let (lo, hi) = wilson_interval(successes, trials, WILSON_Z).unwrap();
        GridPoint {
            n: 100,
            c,
            p: 0.1,
            trials,
            successes,
            mu: successes as f64 / trials as f64,
            wilson_lo: lo,
            wilson_hi: hi,
            second_round_successes: None,
            mean_size: 0.0,
            mean_wall_micros: 0.0,
        }
    }

    #[test]
    fn step_data_crosses_at_the_step() {
        let grid = log_grid(0.3, 5.0, 15).unwrap();
        let pts: Vec<GridPoint> = grid
            .iter()
            .enumerate()
            .map(|(i, &c)| point(c, 200, if i >= 8 { 200 } else { 0 }))
            .collect();
        let e = estimate_one(&pts, 50, RandomSeed::new(1, 0)).unwrap();
        let h = e.c_half.unwrap();
        assert!(h > grid[7] && h < grid[8], "{h}");
        assert!(e.c_lo.unwrap() <= h && h <= e.c_hi.unwrap());
    }

    #[test]
    fn recovers_known_midpoint() {
        let truth = LogisticFit {
            intercept: -4.0 * 1.5f64.ln(),
            slope: 4.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = log_grid(0.3, 5.0, 15).unwrap();
        let pts: Vec<GridPoint> = grid
            .iter()
            .map(|&c| {
                let q = truth.mu(c);
                point(
                    c,
                    200,
                    (0..200).filter(|_| rng.gen::<f64>() < q).count() as u64,
                )
            })
            .collect();
        let e = estimate_one(&pts, 200, RandomSeed::new(2, 0)).unwrap();
        let (lo, hi) = e.c_half_ci.unwrap();
        assert!(lo <= 1.5 && 1.5 <= hi, "{lo} {hi}");
        assert!((e.c_half.unwrap() - 1.5).abs() < 0.15);
        let expect_window = (2.0 * 9f64.ln() / 4.0).exp();
        assert!((e.window.unwrap() / expect_window - 1.0).abs() < 0.3);
    }

    #[test]
    fn all_zero_is_outside_grid() {
        let pts: Vec<GridPoint> = log_grid(0.3, 5.0, 5)
            .unwrap()
            .iter()
            .map(|&c| point(c, 10, 0))
            .collect();
        let e = estimate_one(&pts, 10, RandomSeed::new(1, 0)).unwrap();
        assert!(e.outside_grid);
        assert!(e.c_half.is_none());
    }

    #[test]
    fn crossing_beyond_grid_is_flagged() {
        let pts: Vec<GridPoint> = [1.0, 2.0, 3.0]
            .iter()
            .zip([1u64, 3, 8])
            .map(|(&c, s)| point(c, 100, s))
            .collect();
        let e = estimate_one(&pts, 10, RandomSeed::new(1, 0)).unwrap();
        assert!(e.outside_grid);
        assert!(e.fit.is_some());
    }

    #[test]
    fn grouped_by_n() {
        let mut pts: Vec<GridPoint> = [0.5, 1.0, 2.0]
            .iter()
            .zip([10, 100, 190])
            .map(|(&c, s)| point(c, 200, s))
            .collect();
        let mut other = pts.clone();
        for p in &mut other {
            p.n = 200;
        }
        pts.extend(other);
        let es = estimate_threshold(&pts, 20, RandomSeed::new(1, 0)).unwrap();
        assert_eq!(es.iter().map(|e| e.n).collect::<Vec<_>>(), vec![100, 200]);
    }
}
