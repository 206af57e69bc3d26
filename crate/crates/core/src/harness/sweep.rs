//! Threshold sweeps over a `(n, c)` grid with per-trial replay and a
//! resumable on-disk checkpoint.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclic::{ApFamily, ApSpace};
use crate::error::{Result, VdwError};
use crate::ramsey::find_ap_free_colouring;
use crate::random::{
    sample_binomial_subset, second_round, wilson_interval, RandomSeed, SampleConfig,
};

/// z-score of the 95% Wilson intervals.
pub const WILSON_Z: f64 = 1.96;

pub const DEFAULT_TRIALS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub k: usize,
    pub ns: Vec<usize>,
    pub cs: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: Option<f64>,
}

/// `count` values from `lo` to `hi`, equally spaced in `ln c`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(VdwError::Param(format!("bad grid [{lo}, {hi}] x {count}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else if i == 0 {
                lo
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(VdwError::Param("trials must be at least 1".into()));
        }
        if self.ns.is_empty() || self.cs.is_empty() {
            return Err(VdwError::Param("empty n list or c grid".into()));
        }
        if self.cs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(VdwError::Param("c grid must be strictly increasing".into()));
        }
        for &n in &self.ns {
            for &c in &self.cs {
                SampleConfig::new(n, self.k, c, self.epsilon)?;
                if let Some(e) = self.epsilon {
                    let q = e * SampleConfig::new(n, self.k, c, None)?.p;
                    if q > 1.0 {
                        return Err(VdwError::Param(format!("second round probability {q} > 1")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Seed of trial `t` at grid point `(n, cs[ci])`.
    pub fn trial_seed(&self, n: usize, ci: usize, t: usize) -> RandomSeed {
        RandomSeed::new(self.seed, 0)
            .derive(n as u64)
            .with_stream(((ci as u64) << 32) | t as u64)
    }
}

/// One CSV row per trial. `second_round_arrow` is empty without `epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub k: usize,
    pub c_index: usize,
    pub trial: usize,
    pub c: f64,
    pub p: f64,
    pub seed: u64,
    pub stream: u64,
    pub size: usize,
    pub arrow: bool,
    pub second_round_arrow: Option<bool>,
    pub nodes: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub wall_micros: u64,
}

impl TrialRecord {
    fn key(&self) -> (usize, usize, usize) {
        (self.n, self.c_index, self.trial)
    }
}

/// Samples `Z_{n,p}` (and the optional second round) and decides the arrow
/// property. Pure in its arguments apart from the timing field.
#[allow(clippy::too_many_arguments)]
pub fn run_trial<F: ApFamily + ?Sized>(
    n: usize,
    c_index: usize,
    trial: usize,
    c: f64,
    epsilon: Option<f64>,
    seed: RandomSeed,
    fam: &F,
) -> Result<TrialRecord> {
    let cfg = SampleConfig::new(n, fam.k(), c, epsilon)?;
    let t0 = Instant::now();
    let z = sample_binomial_subset(n, cfg.p, seed)?;
    let (col, stats) = find_ap_free_colouring(&z, fam)?;
    let arrow = col.is_none();
    let second_round_arrow = match cfg.second_round_probability() {
        None => None,
        Some(_) if arrow => Some(true),
        Some(q) => {
            let u = second_round(&z, q, seed)?;
            Some(find_ap_free_colouring(&u, fam)?.0.is_none())
        }
    };
    Ok(TrialRecord {
        n,
        k: fam.k(),
        c_index,
        trial,
        c,
        p: cfg.p,
        seed: seed.seed,
        stream: seed.stream,
        size: z.len(),
        arrow,
        second_round_arrow,
        nodes: stats.nodes,
        propagations: stats.propagations,
        conflicts: stats.conflicts,
        wall_micros: t0.elapsed().as_micros() as u64,
    })
}

/// Recomputes the verdict of a stored record.
pub fn replay_trial(spec: &SweepSpec, rec: &TrialRecord) -> Result<TrialRecord> {
    let fam = ApSpace::new(rec.n, spec.k)?;
    run_trial(
        rec.n,
        rec.c_index,
        rec.trial,
        rec.c,
        spec.epsilon,
        RandomSeed::new(rec.seed, rec.stream),
        &fam,
    )
}

/// One CSV row per grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub mu: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub second_round_successes: Option<u64>,
    pub mean_size: f64,
    pub mean_wall_micros: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub points: Vec<GridPoint>,
    pub records: Vec<TrialRecord>,
    pub complete: bool,
}

impl SweepTable {
    pub fn points_for(&self, n: usize) -> Vec<GridPoint> {
        self.points.iter().filter(|p| p.n == n).cloned().collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Directory for `trials.csv`, `points.csv` and `manifest.json`.
    pub out_dir: Option<PathBuf>,
    /// Stop after computing this many new grid points (simulated interruption).
    pub stop_after_points: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    spec: SweepSpec,
    complete: bool,
    points: usize,
    records: usize,
    wall_seconds: f64,
    files: Vec<String>,
}

const TRIALS_FILE: &str = "trials.csv";
const POINTS_FILE: &str = "points.csv";
const MANIFEST_FILE: &str = "manifest.json";

fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.deserialize() {
        match rec {
            Ok(x) => out.push(x),
            // a torn final row from an interrupted append
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(_) => break,
        }
    }
    Ok(out)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = csv::Writer::from_path(&tmp)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn summarize(spec: &SweepSpec, records: &[TrialRecord]) -> Result<Vec<GridPoint>> {
    let mut by: BTreeMap<(usize, usize), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        by.entry((r.n, r.c_index)).or_default().push(r);
    }
    let order = |n: usize| spec.ns.iter().position(|&m| m == n).unwrap_or(usize::MAX);
    let mut keys: Vec<(usize, usize)> = by.keys().copied().collect();
    keys.sort_by_key(|&(n, ci)| (order(n), ci));
    keys.into_iter()
        .map(|key| {
            let rs = &by[&key];
            let trials = rs.len() as u64;
            let successes = rs.iter().filter(|r| r.arrow).count() as u64;
            let (lo, hi) = wilson_interval(successes, trials, WILSON_Z)?;
            Ok(GridPoint {
                n: key.0,
                c: rs[0].c,
                p: rs[0].p,
                trials,
                successes,
                mu: successes as f64 / trials as f64,
                wilson_lo: lo,
                wilson_hi: hi,
                second_round_successes: spec.epsilon.map(|_| {
                    rs.iter()
                        .filter(|r| r.second_round_arrow == Some(true))
                        .count() as u64
                }),
                mean_size: rs.iter().map(|r| r.size as f64).sum::<f64>() / trials as f64,
                mean_wall_micros: rs.iter().map(|r| r.wall_micros as f64).sum::<f64>()
                    / trials as f64,
            })
        })
        .collect()
}

/// Runs every `(n, c, trial)` of the spec not already present in the
/// checkpoint, appending finished grid points to `trials.csv` as they
/// complete, and writes `points.csv` and `manifest.json` at the end.
pub fn sweep_threshold(spec: &SweepSpec, opts: &SweepOptions) -> Result<SweepTable> {
    spec.validate()?;
    let t0 = Instant::now();
    let mut records: Vec<TrialRecord> = Vec::new();
    let mut writer = None;
    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir)?;
        let manifest = dir.join(MANIFEST_FILE);
        if manifest.exists() {
            let m: Manifest = serde_json::from_reader(File::open(&manifest)?)?;
            if &m.spec != spec {
                return Err(VdwError::Precondition(format!(
                    "{} belongs to a different sweep spec",
                    dir.display()
                )));
            }
        }
        let trials = dir.join(TRIALS_FILE);
        if trials.exists() {
            records = read_records(&trials)?;
            // drop anything after a torn row
            write_csv(&trials, &records)?;
        }
        write_manifest(dir, spec, false, 0, records.len(), 0.0)?;
        let f = OpenOptions::new().create(true).append(true).open(&trials)?;
        let header = f.metadata()?.len() == 0;
        writer = Some(
            csv::WriterBuilder::new()
                .has_headers(header)
                .from_writer(BufWriter::new(f)),
        );
    }
    let done: HashSet<(usize, usize, usize)> = records.iter().map(|r| r.key()).collect();
    let mut computed = 0usize;
    let mut complete = true;
    'outer: for &n in &spec.ns {
        let fam = ApSpace::new(n, spec.k)?;
        for (ci, &c) in spec.cs.iter().enumerate() {
            let todo: Vec<usize> = (0..spec.trials)
                .filter(|&t| !done.contains(&(n, ci, t)))
                .collect();
            if todo.is_empty() {
                continue;
            }
            if opts.stop_after_points.is_some_and(|s| computed >= s) {
                complete = false;
                break 'outer;
            }
            let fresh: Vec<TrialRecord> = todo
                .par_iter()
                .map(|&t| run_trial(n, ci, t, c, spec.epsilon, spec.trial_seed(n, ci, t), &fam))
                .collect::<Result<_>>()?;
            if let Some(w) = writer.as_mut() {
                for r in &fresh {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
            records.extend(fresh);
            computed += 1;
        }
    }
    drop(writer);
    let order = |n: usize| spec.ns.iter().position(|&m| m == n).unwrap_or(usize::MAX);
    records.sort_by_key(|r| (order(r.n), r.c_index, r.trial));
    let points = summarize(spec, &records)?;
    if let Some(dir) = &opts.out_dir {
        write_csv(&dir.join(TRIALS_FILE), &records)?;
        write_csv(&dir.join(POINTS_FILE), &points)?;
        write_manifest(
            dir,
            spec,
            complete,
            points.len(),
            records.len(),
            t0.elapsed().as_secs_f64(),
        )?;
    }
    Ok(SweepTable {
        spec: spec.clone(),
        points,
        records,
        complete,
    })
}

fn write_manifest(
    dir: &Path,
    spec: &SweepSpec,
    complete: bool,
    points: usize,
    records: usize,
    wall: f64,
) -> Result<()> {
    let m = Manifest {
        spec: spec.clone(),
        complete,
        points,
        records,
        wall_seconds: wall,
        files: vec![TRIALS_FILE.into(), POINTS_FILE.into()],
    };
    let tmp = dir.join("manifest.tmp");
    serde_json::to_writer_pretty(File::create(&tmp)?, &m)?;
    fs::rename(tmp, dir.join(MANIFEST_FILE))?;
    Ok(())
}

/// Pairs of grid points `c_i < c_j` (same `n`) where `mu` drops by more
/// than the Wilson intervals allow.
pub fn monotonicity_violations(points: &[GridPoint]) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a.n == b.n && a.c < b.c && b.wilson_hi < a.wilson_lo {
                out.push((a.n, a.c, b.c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramsey::brute_force_is_ramsey;
    use crate::random::threshold_probability;

    fn spec(ns: Vec<usize>, cs: Vec<f64>, trials: usize) -> SweepSpec {
        SweepSpec {
            k: 3,
            ns,
            cs,
            trials,
            seed: 11,
            epsilon: None,
        }
    }

    #[test]
    fn grid_and_validation() {
        let g = log_grid(0.3, 5.0, 15).unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!((g[0], g[14]), (0.3, 5.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(spec(vec![100], vec![1.0, 0.5], 3).validate().is_err());
        assert!(spec(vec![100], vec![1.0], 0).validate().is_err());
        assert!(spec(vec![100], vec![20.0], 1).validate().is_err());
    }

    #[test]
    fn low_density_never_arrows() {
        let t = sweep_threshold(
            &spec(vec![500], vec![0.05, 0.1], 20),
            &SweepOptions::default(),
        )
        .unwrap();
        assert!(t.points.iter().all(|p| p.successes == 0));
        assert!(t.complete);
    }

    #[test]
    fn dense_small_n_matches_brute_force() {
        // p >= 0.9 at n = 50
        let c = 0.9 / threshold_probability(50, 3, 1.0);
        let s = spec(vec![50], vec![c], 12);
        let t = sweep_threshold(&s, &SweepOptions::default()).unwrap();
        let fam = ApSpace::new(50, 3).unwrap();
        for r in &t.records {
            let z = sample_binomial_subset(50, r.p, RandomSeed::new(r.seed, r.stream)).unwrap();
            assert_eq!(z.len(), r.size);
            if z.len() <= 30 {
                assert_eq!(brute_force_is_ramsey(&z, &fam).unwrap(), r.arrow);
            }
        }
        assert!(t.points[0].mu > 0.9);
    }

    #[test]
    fn records_replay() {
        let s = spec(vec![300], vec![1.5, 3.0], 6);
        let t = sweep_threshold(&s, &SweepOptions::default()).unwrap();
        for r in &t.records {
            let again = replay_trial(&s, r).unwrap();
            assert_eq!(
                (again.arrow, again.size, again.nodes),
                (r.arrow, r.size, r.nodes)
            );
        }
    }

    #[test]
    fn resumed_sweep_equals_uninterrupted() {
        let s = spec(vec![200, 300], vec![0.8, 1.6, 3.2], 5);
        let dir = tempfile::tempdir().unwrap();
        let opts = SweepOptions {
            out_dir: Some(dir.path().to_path_buf()),
            stop_after_points: Some(2),
        };
        let partial = sweep_threshold(&s, &opts).unwrap();
        assert!(!partial.complete);
        assert_eq!(partial.points.len(), 2);
        let resumed = sweep_threshold(
            &s,
            &SweepOptions {
                out_dir: Some(dir.path().to_path_buf()),
                stop_after_points: None,
            },
        )
        .unwrap();
        let fresh = sweep_threshold(&s, &SweepOptions::default()).unwrap();
        assert!(resumed.complete);
        let strip = |rs: &[TrialRecord]| -> Vec<(usize, usize, usize, bool, usize, u64)> {
            rs.iter()
                .map(|r| (r.n, r.c_index, r.trial, r.arrow, r.size, r.nodes))
                .collect()
        };
        assert_eq!(strip(&resumed.records), strip(&fresh.records));
        assert_eq!(
            resumed
                .points
                .iter()
                .map(|p| p.successes)
                .collect::<Vec<_>>(),
            fresh.points.iter().map(|p| p.successes).collect::<Vec<_>>()
        );
        let on_disk = read_records(&dir.path().join(TRIALS_FILE)).unwrap();
        assert_eq!(strip(&on_disk), strip(&fresh.records));
        let other = spec(vec![200], vec![1.0], 2);
        assert!(sweep_threshold(
            &other,
            &SweepOptions {
                out_dir: Some(dir.path().to_path_buf()),
                stop_after_points: None
            }
        )
        .is_err());
    }

    #[test]
    fn second_round_column() {
        let mut s = spec(vec![200], vec![2.0], 5);
        s.epsilon = Some(0.5);
        let t = sweep_threshold(&s, &SweepOptions::default()).unwrap();
        for r in &t.records {
            let sr = r.second_round_arrow.unwrap();
            assert!(sr || !r.arrow);
        }
        assert!(t.points[0].second_round_successes.unwrap() >= t.points[0].successes);
    }

    #[test]
    fn monotonicity_flags_clear_drop() {
        let mk = |c: f64, s: u64| {
            let (lo, hi) = wilson_interval(s, 100, WILSON_Z).unwrap();
            GridPoint {
                n: 1,
                c,
                p: 0.1,
                trials: 100,
                successes: s,
                mu: s as f64 / 100.0,
                wilson_lo: lo,
                wilson_hi: hi,
                second_round_successes: None,
                mean_size: 0.0,
                mean_wall_micros: 0.0,
            }
        };
        assert!(monotonicity_violations(&[mk(1.0, 10), mk(2.0, 12), mk(3.0, 60)]).is_empty());
        assert_eq!(
            monotonicity_violations(&[mk(1.0, 90), mk(2.0, 10)]).len(),
            1
        );
    }
}
