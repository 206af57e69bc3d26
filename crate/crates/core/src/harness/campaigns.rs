//! Verification campaigns. Each campaign has fixed default
//! parameters, overridable through the run configuration, and one or more
//! pass/fail checks of the form "holds in at least a fraction of trials".

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{
    count_t1_t2_guarded, dense_subset_ap_floor, janson_bound, matching_bound_check,
    peeling_sparse_subset,
};
use crate::containers::{
    brute_force_hitting_sets, cores_from_containers, corrupt_certificate, verify_certificate,
    CoreParams, UniformHypergraph,
};
use crate::cyclic::{ApFamily, ApSpace, Edge};
use crate::error::{Result, VdwError};
use crate::focus::{
    ap_degree_profile, bad_elements, build_focus_hypergraph, degree_stats, edge_profile,
    extract_consistent_subfamily, focus_completion_set, focus_edge, is_index_consistent,
    regular_part, ExtractOptions, ResidueOrder,
};
use crate::harness::config::HarnessConfig;
use crate::harness::find_interacting_triple;
use crate::random::{sample_binomial_subset, threshold_probability, RandomSeed};
use crate::subset::GroundSubset;

pub const CAMPAIGNS: &[&str] = &[
    "vojta",
    "degree",
    "badset",
    "goodtriple",
    "corefocus",
    "matching",
    "janson",
    "containers",
    "apfloor",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignCheck {
    pub name: String,
    pub satisfied: usize,
    pub trials: usize,
    /// Smallest passing `satisfied`.
    pub required: usize,
    pub pass: bool,
}

impl CampaignCheck {
    pub fn new(name: &str, satisfied: usize, trials: usize, fraction: f64) -> Self {
        let required = (fraction * trials as f64 - 1e-9).ceil() as usize;
        Self {
            name: name.to_string(),
            satisfied,
            trials,
            required,
            pass: satisfied >= required,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignReport {
    pub campaign: String,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub checks: Vec<CampaignCheck>,
    pub passed: bool,
    pub rows: Vec<Value>,
    pub wall_seconds: f64,
}

struct Params<'a> {
    cfg: &'a HarnessConfig,
    used: BTreeMap<String, f64>,
}

impl<'a> Params<'a> {
    fn f(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.cfg.get_or(key, default)?;
        self.used.insert(key.to_string(), v);
        Ok(v)
    }

    fn u(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = self.cfg.get_or(key, default)?;
        self.used.insert(key.to_string(), v as f64);
        Ok(v)
    }
}

/// Runs campaign `id` with parameters from `cfg` (seed included).
pub fn verify_lemma(id: &str, cfg: &HarnessConfig) -> Result<CampaignReport> {
    let seed = cfg.seed()?;
    let mut p = Params {
        cfg,
        used: BTreeMap::new(),
    };
    let t0 = Instant::now();
    let root = RandomSeed::new(seed, 0).derive(fnv(id));
    let (checks, rows) = match id {
        "vojta" => vojta(&mut p, root)?,
        "degree" => degree(&mut p, root, false)?,
        "badset" => degree(&mut p, root, true)?,
        "goodtriple" => goodtriple(&mut p, root)?,
        "corefocus" => corefocus(&mut p, root)?,
        "matching" => matching(&mut p, root)?,
        "janson" => janson(&mut p, root)?,
        "containers" => containers(&mut p, root)?,
        "apfloor" => apfloor(&mut p, root)?,
        other => {
            return Err(VdwError::Param(format!(
                "unknown campaign {other:?}; expected one of {}",
                CAMPAIGNS.join(", ")
            )))
        }
    };
    Ok(CampaignReport {
        campaign: id.to_string(),
        seed,
        params: p.used,
        passed: checks.iter().all(|c| c.pass),
        checks,
        rows,
        wall_seconds: t0.elapsed().as_secs_f64(),
    })
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

type Outcome = (Vec<CampaignCheck>, Vec<Value>);

fn random_subset(n: usize, size: usize, seed: RandomSeed) -> Result<GroundSubset> {
    let mut rng = seed.rng();
    GroundSubset::from_members(n, sample(&mut rng, n, size).into_iter().map(|v| v as u32))
}

/// Loose-cycle / loose-path configurations on at most `ln n` vertices.
fn vojta(p: &mut Params, root: RandomSeed) -> Result<Outcome> {
    let n = p.u("n", 10_000)?;
    let k = p.u("k", 3)?;
    let c = p.f("c", 1.0)?;
    let trials = p.u("trials", 100)?;
    let frac = p.f("fraction", 0.95)?;
    let default_ell = ((n as f64).ln() / (k as f64 - 1.0)).floor().max(3.0) as usize;
    let ell_max = p.u("ell_max", default_ell)?;
    let guard = p.u("guard", 400)?;
    let fam = ApSpace::new(n, k)?;
    let prob = threshold_probability(n, k, c);
    let rows: Vec<Value> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Value> {
            let z = sample_binomial_subset(n, prob, root.with_stream(t as u64))?;
            let cc = count_t1_t2_guarded(&z, &fam, ell_max, guard, 4)?;
            Ok(json!({"trial": t, "size": z.len(), "x1": cc.x1, "x2": cc.x2, "witnesses": cc.witnesses}))
        })
        .collect::<Result<_>>()?;
    let zero = rows.iter().filter(|r| r["x1"] == 0 && r["x2"] == 0).count();
    Ok((
        vec![CampaignCheck::new("t1_t2_absent", zero, trials, frac)],
        rows,
    ))
}

/// Bad set and degree statistics of `H(Z, B, Z/nZ ∖ Y)`; with `fact_only`
/// just the `|Y| < p n ln n` check.
fn degree(p: &mut Params, root: RandomSeed, fact_only: bool) -> Result<Outcome> {
    let n = p.u("n", if fact_only { 4000 } else { 5000 })?;
    let k = p.u("k", 3)?;
    let big_k = p.u("K", 4)?;
    let c = p.f("c", 1.0)?;
    let trials = p.u("trials", 100)?;
    let frac = p.f("fraction", 0.95)?;
    let fam = ApSpace::new(n, k)?;
    let prob = threshold_probability(n, k, c);
    let nf = n as f64;
    let ln = nf.ln();
    let y_bound = if fact_only {
        prob * nf * ln
    } else {
        nf.powf(1.0 - 1.0 / (k as f64 - 1.0)) * ln
    };
    let d1_bound = 10.0 * (k as f64).powi(3) * big_k as f64 * prob.powi(k as i32 - 2) * nf;
    let d2_bound = 8.0 * ln;
    let mut rows = Vec::with_capacity(trials);
    for t in 0..trials {
        let s = root.with_stream(t as u64);
        let z = sample_binomial_subset(n, prob, s)?;
        let b = random_subset(n, big_k, s.derive(2))?;
        let bad = bad_elements(&z, &b, &fam)?;
        let y = bad.y.len();
        let (two, shared) = bad
            .witnesses
            .iter()
            .fold((0, 0), |(a, b), w| match w.witness {
                crate::focus::BadWitness::TwoInTranslate { .. } => (a + 1, b),
                crate::focus::BadWitness::SharedCompletion { .. } => (a, b + 1),
            });
        let mut row = json!({"trial": t, "size": z.len(), "b": b.to_vec(), "y": y,
            "y_two_in_translate": two, "y_shared_completion": shared});
        if !fact_only {
            let h = build_focus_hypergraph(&z, &b, &bad.y.complement(), &fam)?;
            let st = degree_stats(&h);
            row["v"] = json!(st.v);
            row["edges"] = json!(st.e);
            row["delta1"] = json!(st.delta1);
            row["delta2"] = json!(st.delta2);
        }
        rows.push(row);
    }
    let count = |f: &dyn Fn(&Value) -> bool| rows.iter().filter(|r| f(r)).count();
    let y_ok = if fact_only {
        count(&|r| (r["y"].as_u64().unwrap() as f64) < y_bound)
    } else {
        count(&|r| r["y"].as_u64().unwrap() as f64 <= y_bound)
    };
    let mut checks = vec![CampaignCheck::new(
        if fact_only {
            "y_below_pn_ln_n"
        } else {
            "y_size"
        },
        y_ok,
        trials,
        frac,
    )];
    if !fact_only {
        let pn = prob * nf;
        let v_ok = count(&|r| {
            let v = r["v"].as_u64().unwrap() as f64;
            v >= pn / 2.0 && v <= 2.0 * pn
        });
        checks.push(CampaignCheck::new("v_range", v_ok, trials, frac));
        checks.push(CampaignCheck::new(
            "delta1",
            count(&|r| r["delta1"].as_u64().unwrap() as f64 <= d1_bound),
            trials,
            frac,
        ));
        checks.push(CampaignCheck::new(
            "delta2",
            count(&|r| r["delta2"].as_u64().unwrap() as f64 <= d2_bound),
            trials,
            frac,
        ));
    }
    p.used.insert("y_bound".into(), y_bound);
    if !fact_only {
        p.used.insert("delta1_bound".into(), d1_bound);
        p.used.insert("delta2_bound".into(), d2_bound);
    }
    Ok((checks, rows))
}

/// Edge `M(Z, B+x)` in index order.
fn ordered_edge<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    x: u32,
    fam: &F,
) -> Result<Vec<u32>> {
    let mut e = focus_edge(z, &b.translate(x), fam)?.to_vec();
    ResidueOrder::natural().sort(&mut e);
    Ok(e)
}

/// Profile extraction on search-built interacting triples, re-checked
/// edge by edge. Triples keep being drawn until `trials` of them leave a
/// nonempty `X'` or `attempts` draws are spent. With `remove_bad = 1` the
/// bad set is removed from `X` first; at toy sizes that usually empties it.
fn goodtriple(p: &mut Params, root: RandomSeed) -> Result<Outcome> {
    let n = p.u("n", 24)?;
    let k = p.u("k", 3)?;
    let trials = p.u("trials", 20)?;
    let attempts = p.u("attempts", 400)?;
    let density = p.f("density", 0.45)?;
    let max_b = p.u("max_b", 3)?;
    let c = p.f("c", 1.0)?;
    let remove_bad = p.u("remove_bad", 0)? != 0;
    let fam = ApSpace::new(n, k)?;
    let order = ResidueOrder::natural();
    let mut rows = Vec::new();
    let mut ok = 0;
    let mut found = 0;
    for t in 0..attempts {
        if found == trials {
            break;
        }
        let s = root.derive(t as u64);
        let Some(tri) = find_interacting_triple(&fam, density, max_b, 500, s)? else {
            continue;
        };
        let bad = bad_elements(&tri.z, &tri.b, &fam)?;
        let x1 = if remove_bad {
            tri.x.difference(&bad.y)?
        } else {
            tri.x.clone()
        };
        let x2 = regular_part(&tri.z, &tri.b, &x1, &fam)?;
        let opts = ExtractOptions {
            seed: s.derive(3),
            c: Some(c),
            ..Default::default()
        };
        let sub = extract_consistent_subfamily(&tri.z, &tri.b, &x2, &order, &fam, &opts)?;
        if sub.x_prime.is_empty() {
            continue;
        }
        found += 1;
        let mut profiles = Vec::new();
        let mut edges = Vec::new();
        for x in sub.x_prime.iter() {
            let e = ordered_edge(&tri.z, &tri.b, x, &fam)?;
            if e.is_empty() {
                continue;
            }
            profiles.push(edge_profile(&tri.z, &tri.b, x, &order, &fam)?.map);
            edges.push(e);
        }
        let consistent = sub.x_prime.is_subset(&x2)
            && profiles.windows(2).all(|w| w[0] == w[1])
            && is_index_consistent(&edges);
        ok += usize::from(consistent);
        rows.push(json!({"attempt": t, "b": tri.b.len(), "x": tri.x.len(), "bad": bad.y.intersection_len(&tri.x),
            "regular": x2.len(), "x_prime": sub.x_prime.len(), "method": sub.method,
            "length": sub.profile.as_ref().map(|p| p.len()),
            "classes": sub.profile_classes, "consistent": consistent,
            "alpha_prime_target": sub.targets.map(|g| g.alpha_prime)}));
    }
    Ok((
        vec![
            CampaignCheck::new("found", found, trials, 1.0),
            CampaignCheck::new("index_consistent", ok, found, 1.0),
        ],
        rows,
    ))
}

/// Removes, one at a time, the member of `S` whose removal empties the
/// fewest points of `F(S)` until `size` remain. Ties go to the member
/// carrying the most completions, then to the smallest residue.
pub fn greedy_completion_minimizer<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    size: usize,
    fam: &F,
) -> Result<GroundSubset> {
    let mut s = z.clone();
    let mut deg = ap_degree_profile(&s, fam)?.deg;
    while s.len() > size {
        let mut best: Option<((usize, std::cmp::Reverse<u32>), u32, HashMap<u32, u32>)> = None;
        for v in s.iter() {
            let contrib = removal_contribution(&s, v, fam);
            let loss = contrib
                .iter()
                .filter(|(&x, &c)| deg[x as usize] == c)
                .count();
            let key = (loss, std::cmp::Reverse(contrib.values().sum::<u32>()));
            if best.as_ref().is_none_or(|b| key < b.0) {
                best = Some((key, v, contrib));
            }
        }
        let (_, v, contrib) = best.expect("nonempty");
        for (x, c) in contrib {
            deg[x as usize] -= c;
        }
        s.remove(v);
    }
    Ok(s)
}

/// The `size` members of `Z` spanning the shortest cyclic arc.
pub fn tightest_window(z: &GroundSubset, size: usize) -> Result<GroundSubset> {
    let m = z.to_vec();
    let n = z.modulus() as u64;
    if size == 0 || size >= m.len() {
        return GroundSubset::from_members(z.modulus(), m.into_iter().take(size));
    }
    let span = |i: usize| {
        let j = (i + size - 1) % m.len();
        (m[j] as u64 + n - m[i] as u64) % n
    };
    let start = (0..m.len()).min_by_key(|&i| (span(i), i)).unwrap();
    GroundSubset::from_members(z.modulus(), (0..size).map(|t| m[(start + t) % m.len()]))
}

/// Smallest `F(S)` over the completion greedy, the AP-degree greedy and
/// the tightest window; returns the subset and the winning strategy.
pub fn adversarial_completion_subset<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    size: usize,
    fam: &F,
) -> Result<(GroundSubset, &'static str)> {
    let candidates = [
        (
            "completion_greedy",
            greedy_completion_minimizer(z, size, fam)?,
        ),
        ("degree_greedy", peeling_sparse_subset(z, size, fam)?),
        ("window", tightest_window(z, size)?),
    ];
    let mut best: Option<(usize, GroundSubset, &'static str)> = None;
    for (name, s) in candidates {
        let f = focus_completion_set(&s, fam)?.len();
        if best.as_ref().is_none_or(|b| f < b.0) {
            best = Some((f, s, name));
        }
    }
    let (_, s, name) = best.unwrap();
    Ok((s, name))
}

/// For each `x`, the number of k-APs `e ∋ v` with `x ∈ e ∖ {v}` and
/// `e ∖ {x} ⊆ S`: the part of `deg(x)` that needs `v ∈ S`.
fn removal_contribution<F: ApFamily + ?Sized>(
    s: &GroundSubset,
    v: u32,
    fam: &F,
) -> HashMap<u32, u32> {
    let mut out: HashMap<u32, u32> = HashMap::new();
    for w in s.iter().filter(|&w| w != v) {
        for e in fam.aps_through_pair(v, w) {
            // visit each edge from the smallest other member of S
            let first = e.iter().copied().find(|&u| u != v && s.contains(u));
            if first != Some(w) {
                continue;
            }
            for &x in e.iter().filter(|&&x| x != v) {
                if e.iter().all(|&u| u == x || s.contains(u)) {
                    *out.entry(x).or_default() += 1;
                }
            }
        }
    }
    out
}

/// `|F(S)| >= delta n` for an adversarial `S ⊆ Z` of size `ceil(gamma |Z|)`.
fn corefocus(p: &mut Params, root: RandomSeed) -> Result<Outcome> {
    let n = p.u("n", 2000)?;
    let k = p.u("k", 3)?;
    let c = p.f("c", 2.0)?;
    let trials = p.u("trials", 100)?;
    let gamma = p.f("gamma", 0.25)?;
    let delta = p.f("delta", 0.01)?;
    let frac = p.f("fraction", 0.95)?;
    let fam = ApSpace::new(n, k)?;
    let prob = threshold_probability(n, k, c);
    let rows: Vec<Value> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Value> {
            let z = sample_binomial_subset(n, prob, root.with_stream(t as u64))?;
            let size = ((gamma * z.len() as f64) - 1e-9).ceil() as usize;
            let (s, strategy) = adversarial_completion_subset(&z, size, &fam)?;
            let prof = ap_degree_profile(&s, &fam)?;
            Ok(json!({"trial": t, "size": z.len(), "s": s.len(), "f": prof.support, "strategy": strategy,
                "deg_sum": prof.sum, "w": prof.w}))
        })
        .collect::<Result<_>>()?;
    let ok = rows
        .iter()
        .filter(|r| r["f"].as_u64().unwrap() as f64 >= delta * n as f64)
        .count();
    Ok((
        vec![CampaignCheck::new("f_at_least_delta_n", ok, trials, frac)],
        rows,
    ))
}

/// Union of `d` random perfect matchings on `0..n` (`n` even), so every
/// degree is at most `d`.
pub fn random_matching_union<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<UniformHypergraph> {
    if !n.is_multiple_of(2) {
        return Err(VdwError::Param(format!("n = {n} must be even")));
    }
    let mut edges: Vec<Vec<u32>> = Vec::new();
    for _ in 0..d {
        let perm = sample(rng, n, n).into_vec();
        for pair in perm.chunks(2) {
            let mut e = vec![pair[0] as u32, pair[1] as u32];
            e.sort_unstable();
            edges.push(e);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    UniformHypergraph::new(n, 2, edges)
}

fn matching(p: &mut Params, root: RandomSeed) -> Result<Outcome> {
    let n = p.u("n", 2000)?;
    let d = p.u("D", 10)?;
    let k = p.u("k", 3)?;
    let c = p.f("c", 1.0)?;
    let trials = p.u("trials", 1000)?;
    let frac = p.f("fraction", 0.99)?;
    let prob = threshold_probability(n, k, c);
    let rows: Vec<Value> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Value> {
            let s = root.with_stream(t as u64);
            let f = random_matching_union(n, d, &mut s.derive(4).rng())?;
            let u = sample_binomial_subset(n, prob, s)?;
            let r = matching_bound_check(&f, &u, d, prob)?;
            Ok(
                json!({"trial": t, "edges": f.e(), "inside": r.edges_inside, "bound": r.bound,
                "holds": r.holds, "matchings": r.matchings}),
            )
        })
        .collect::<Result<_>>()?;
    let ok = rows.iter().filter(|r| r["holds"] == true).count();
    Ok((
        vec![CampaignCheck::new("matching_bound", ok, trials, frac)],
        rows,
    ))
}

/// One Janson configuration: the k-APs inside a random half of `Z/nZ`,
/// with `p` tuned so that `EX = target`.
pub fn janson_configuration(
    n: usize,
    k: usize,
    target: f64,
    seed: RandomSeed,
) -> Result<(Vec<Edge>, f64)> {
    let fam = ApSpace::new(n, k)?;
    let c = random_subset(n, n / 2, seed)?;
    let edges = fam.aps_within(&c)?;
    if edges.is_empty() {
        return Err(VdwError::Refused(format!(
            "no k-APs inside the target set at n = {n}"
        )));
    }
    let p = (target / edges.len() as f64).powf(1.0 / k as f64);
    Ok((edges, p))
}

/// Monte Carlo `Pr(X = 0)` for `X` = number of targets inside `Z_{n,p}`.
pub fn empirical_zero_probability(
    n: usize,
    targets: &[Edge],
    p: f64,
    trials: usize,
    seed: RandomSeed,
) -> Result<f64> {
    let zeros: usize = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<usize> {
            let z = sample_binomial_subset(n, p, seed.with_stream(t as u64))?;
            Ok(usize::from(!targets.iter().any(|e| z.contains_all(e))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(zeros as f64 / trials as f64)
}

fn janson(p: &mut Params, root: RandomSeed) -> Result<Outcome> {
    let configs = p.u("configs", 20)?;
    let k = p.u("k", 3)?;
    let trials = p.u("trials", 10_000)?;
    let n_min = p.u("n_min", 60)?;
    let n_max = p.u("n_max", 300)?;
    let ex_min = p.f("ex_min", 1.0)?;
    let ex_max = p.f("ex_max", 10.0)?;
    let mut rows = Vec::new();
    let mut ok = 0;
    for i in 0..configs {
        let frac = if configs > 1 {
            i as f64 / (configs - 1) as f64
        } else {
            0.0
        };
        let n = n_min + ((n_max - n_min) as f64 * frac).round() as usize;
        let target = ex_min + (ex_max - ex_min) * frac;
        let s = root.with_stream(i as u64);
        let (edges, prob) = janson_configuration(n, k, target, s)?;
        let rep = janson_bound(&edges, prob)?;
        let phat = empirical_zero_probability(n, &edges, prob, trials, s.derive(5))?;
        let se = (phat * (1.0 - phat) / trials as f64).sqrt();
        let holds = phat <= rep.bound + 3.0 * se;
        ok += usize::from(holds);
        rows.push(
            json!({"config": i, "n": n, "targets": edges.len(), "p": prob, "ex": rep.ex,
            "delta": rep.delta, "bound": rep.bound, "empirical": phat, "se": se, "holds": holds}),
        );
    }
    Ok((
        vec![CampaignCheck::new("janson_bound", ok, configs, 1.0)],
        rows,
    ))
}

fn containers(p: &mut Params, root: RandomSeed) -> Result<Outcome> {
    let instances = p.u("instances", 200)?;
    let m_min = p.u("m_min", 6)?;
    let m_max = p.u("m_max", 15)?;
    let k = p.u("k", 3)?;
    let q_min = p.f("q_min", 0.05)?;
    let q_max = p.f("q_max", 0.35)?;
    let rows: Vec<Value> = (0..instances)
        .into_par_iter()
        .map(|i| -> Result<Value> {
            let mut rng = root.with_stream(i as u64).rng();
            let h = loop {
                let m = rng.gen_range(m_min..=m_max);
                let h = UniformHypergraph::random(m, 3, rng.gen_range(q_min..=q_max), &mut rng)?;
                if h.e() > 0 {
                    break h;
                }
            };
            let fam = cores_from_containers(&h, &CoreParams::from_instance(&h, k))?;
            let rep = verify_certificate(&h, &fam.certificate)?;
            let control = match corrupt_certificate(&fam.certificate) {
                Some(bad) => Some(!verify_certificate(&h, &bad)?.passed),
                None => None,
            };
            let covered = brute_force_hitting_sets(&h, true)?
                .iter()
                .all(|t| fam.cores.iter().any(|c| t.contains_all(c)));
            Ok(
                json!({"instance": i, "m": h.m(), "e": h.e(), "certificate": rep.passed,
                "checked": rep.checked, "control_fails": control, "cores": fam.cores.len(),
                "covered": covered, "hypotheses": fam.hypotheses.all(), "min_core": fam.min_core,
                "beta": fam.beta, "large": fam.all_large(), "c_prime": fam.c_prime}),
            )
        })
        .collect::<Result<_>>()?;
    let count = |key: &str| rows.iter().filter(|r| r[key] == true).count();
    let controls: Vec<&Value> = rows
        .iter()
        .filter(|r| !r["control_fails"].is_null())
        .collect();
    let with_hyp: Vec<&Value> = rows.iter().filter(|r| r["hypotheses"] == true).collect();
    let checks = vec![
        CampaignCheck::new("certificate", count("certificate"), instances, 1.0),
        CampaignCheck::new(
            "negative_control",
            controls
                .iter()
                .filter(|r| r["control_fails"] == true)
                .count(),
            controls.len().max(1),
            1.0,
        ),
        CampaignCheck::new("cores_cover_hitting_sets", count("covered"), instances, 1.0),
        CampaignCheck::new(
            "cores_large",
            with_hyp.iter().filter(|r| r["large"] == true).count(),
            with_hyp.len(),
            1.0,
        ),
    ];
    Ok((checks, rows))
}

fn apfloor(p: &mut Params, root: RandomSeed) -> Result<Outcome> {
    let n = p.u("n", 2000)?;
    let k = p.u("k", 3)?;
    let c = p.f("c", 2.0)?;
    let gamma = p.f("gamma", 0.5)?;
    let trials = p.u("trials", 50)?;
    let subsets = p.u("subsets", 20)?;
    let fam = ApSpace::new(n, k)?;
    let prob = threshold_probability(n, k, c);
    let rows: Vec<Value> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Value> {
            let s = root.with_stream(t as u64);
            let z = sample_binomial_subset(n, prob, s)?;
            let r = dense_subset_ap_floor(&z, gamma, &fam, prob, subsets, s.derive(6))?;
            Ok(json!({"trial": t, "size": z.len(), "min": r.min, "greedy": r.greedy, "peeling": r.peeling,
                "random_min": r.random_min, "normalized": r.normalized}))
        })
        .collect::<Result<_>>()?;
    let ok = rows
        .iter()
        .filter(|r| r["min"].as_u64().unwrap() > 0)
        .count();
    Ok((
        vec![CampaignCheck::new("positive_floor", ok, trials, 1.0)],
        rows,
    ))
}
