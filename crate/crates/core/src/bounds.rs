//! Counting and probability bounds: forbidden loose-cycle and loose-path
//! configurations, their first moments, Janson's inequality, the matching
//! decomposition bound and dense-subset AP floors.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::containers::UniformHypergraph;
use crate::cyclic::{ApFamily, ApSpace, Edge};
use crate::error::{check_modulus, Result, VdwError};
use crate::random::RandomSeed;
use crate::subset::GroundSubset;

/// Default cap on `|Z|` for the exhaustive configuration search.
pub const CONFIG_GUARD: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfigKind {
    /// Loose cycle `e_1..e_l` plus `e_0` meeting it in `2..k-1` vertices.
    CycleWithChord,
    /// Loose path `e_1..e_l` plus another edge `e_0` inside its vertex set.
    NonInducedPath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigWitness {
    pub kind: ConfigKind,
    /// `e_1..e_l` in cycle or path order.
    pub chain: Vec<Vec<u32>>,
    pub extra: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigCount {
    pub x1: u64,
    pub x2: u64,
    pub ell_max: usize,
    pub witnesses: Vec<ConfigWitness>,
}

struct Local {
    edges: Vec<Edge>,
    incident: HashMap<u32, Vec<u32>>,
}

impl Local {
    fn new(edges: Vec<Edge>) -> Self {
        let mut incident: HashMap<u32, Vec<u32>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                incident.entry(v).or_default().push(i as u32);
            }
        }
        Self { edges, incident }
    }

    fn at(&self, v: u32) -> &[u32] {
        self.incident.get(&v).map(|x| x.as_slice()).unwrap_or(&[])
    }
}

fn meet(a: &[u32], b: &[u32]) -> usize {
    a.iter().filter(|v| b.contains(v)).count()
}

/// Extends `chain` by edges meeting the last one in exactly one vertex and
/// every earlier one in none (the first one may be skipped for cycles).
fn grow(g: &Local, chain: &mut Vec<u32>, target: usize, visit: &mut dyn FnMut(&[u32])) {
    if chain.len() == target {
        visit(chain);
        return;
    }
    let last = *chain.last().unwrap();
    let mut cands: Vec<u32> = g.edges[last as usize]
        .iter()
        .flat_map(|&v| g.at(v).iter().copied())
        .filter(|&e| e != last)
        .collect();
    cands.sort_unstable();
    cands.dedup();
    for e in cands {
        if chain.contains(&e) {
            continue;
        }
        let ee = &g.edges[e as usize];
        if meet(ee, &g.edges[last as usize]) != 1 {
            continue;
        }
        let n = chain.len();
        if chain[..n - 1]
            .iter()
            .any(|&f| meet(ee, &g.edges[f as usize]) != 0)
        {
            // earlier edges must be disjoint, except the first when closing a cycle
            if !(n + 1 == target && n >= 2 && closes(g, chain, e)) {
                continue;
            }
        }
        chain.push(e);
        grow(g, chain, target, visit);
        chain.pop();
    }
}

/// Used only at the last step of a cycle: `e` meets `e_1` once and the
/// middle edges not at all.
fn closes(g: &Local, chain: &[u32], e: u32) -> bool {
    let ee = &g.edges[e as usize];
    meet(ee, &g.edges[chain[0] as usize]) == 1
        && chain[1..chain.len() - 1]
            .iter()
            .all(|&f| meet(ee, &g.edges[f as usize]) == 0)
}

fn vertex_set(g: &Local, chain: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = chain
        .iter()
        .flat_map(|&e| g.edges[e as usize].iter().copied())
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn chain_pattern_ok(chain: &[Vec<u32>], cyclic: bool) -> bool {
    let l = chain.len();
    for i in 0..l {
        for j in i + 1..l {
            let adjacent = j == i + 1 || (cyclic && i == 0 && j == l - 1);
            let want = usize::from(adjacent);
            if meet(&chain[i], &chain[j]) != want {
                return false;
            }
        }
    }
    true
}

/// Re-checks a witness from scratch: every edge is a k-AP inside `z`, the
/// pairwise intersection sizes follow the pattern, and `e_0` sits as
/// required.
pub fn validate_config_witness(z: &GroundSubset, space: &ApSpace, w: &ConfigWitness) -> bool {
    let k = space.k();
    let all_aps = w
        .chain
        .iter()
        .chain(std::iter::once(&w.extra))
        .all(|e| space.is_ap(e) && z.contains_all(e));
    if !all_aps || w.chain.contains(&w.extra) {
        return false;
    }
    let mut verts: Vec<u32> = w.chain.iter().flatten().copied().collect();
    verts.sort_unstable();
    verts.dedup();
    let l = w.chain.len();
    let inside = meet(&w.extra, &verts);
    match w.kind {
        ConfigKind::CycleWithChord => {
            l >= 3
                && chain_pattern_ok(&w.chain, true)
                && verts.len() == (k - 1) * l
                && (2..k).contains(&inside)
        }
        ConfigKind::NonInducedPath => l >= 2 && chain_pattern_ok(&w.chain, false) && inside == k,
    }
}

/// Counts copies of both forbidden configuration types among the k-APs of
/// `z`, for chain lengths up to `ell_max`. A copy is a distinct set of
/// edges `{e_0, .., e_l}` admitting the pattern.
pub fn count_t1_t2<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    fam: &F,
    ell_max: usize,
) -> Result<ConfigCount> {
    count_t1_t2_guarded(z, fam, ell_max, CONFIG_GUARD, 16)
}

pub fn count_t1_t2_guarded<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    fam: &F,
    ell_max: usize,
    guard: usize,
    max_witnesses: usize,
) -> Result<ConfigCount> {
    check_modulus(fam.n(), z.modulus())?;
    if z.len() > guard {
        return Err(VdwError::Guard {
            what: "|Z|",
            actual: z.len(),
            limit: guard,
        });
    }
    let k = fam.k();
    let g = Local::new(fam.aps_within(z)?);
    let mut t1: HashSet<Vec<u32>> = HashSet::new();
    let mut t2: HashSet<Vec<u32>> = HashSet::new();
    let mut witnesses = Vec::new();
    let record = |set: &mut HashSet<Vec<u32>>,
                  kind,
                  chain: &[u32],
                  e0: u32,
                  witnesses: &mut Vec<ConfigWitness>| {
        let mut ids: Vec<u32> = chain.to_vec();
        ids.push(e0);
        ids.sort_unstable();
        if set.insert(ids) && witnesses.len() < max_witnesses {
            witnesses.push(ConfigWitness {
                kind,
                chain: chain
                    .iter()
                    .map(|&e| g.edges[e as usize].to_vec())
                    .collect(),
                extra: g.edges[e0 as usize].to_vec(),
            });
        }
    };
    for start in 0..g.edges.len() as u32 {
        for l in 2..=ell_max {
            let mut chain = vec![start];
            let mut found: Vec<Vec<u32>> = Vec::new();
            grow(&g, &mut chain, l, &mut |c| found.push(c.to_vec()));
            for c in found {
                let verts = vertex_set(&g, &c);
                let cyclic =
                    l >= 3 && meet(&g.edges[c[0] as usize], &g.edges[c[l - 1] as usize]) == 1;
                let mut near: Vec<u32> = verts
                    .iter()
                    .flat_map(|&v| g.at(v).iter().copied())
                    .collect();
                near.sort_unstable();
                near.dedup();
                if cyclic {
                    // one orientation from the smallest edge
                    if c[0] != *c.iter().min().unwrap() || c[1] > c[l - 1] {
                        continue;
                    }
                    if verts.len() != (k - 1) * l {
                        continue;
                    }
                    for &e0 in &near {
                        let inside = meet(&g.edges[e0 as usize], &verts);
                        if (2..k).contains(&inside) {
                            record(&mut t1, ConfigKind::CycleWithChord, &c, e0, &mut witnesses);
                        }
                    }
                } else {
                    if c[0] > c[l - 1] {
                        continue;
                    }
                    for &e0 in &near {
                        if !c.contains(&e0) && meet(&g.edges[e0 as usize], &verts) == k {
                            record(&mut t2, ConfigKind::NonInducedPath, &c, e0, &mut witnesses);
                        }
                    }
                }
            }
        }
    }
    Ok(ConfigCount {
        x1: t1.len() as u64,
        x2: t2.len() as u64,
        ell_max,
        witnesses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureExpectation {
    /// Loose cycles (or paths) of length `l` in the full AP hypergraph.
    pub count: u128,
    pub vertices: usize,
    pub expectation: f64,
    /// `expectation / envelope`, the constant hidden in the order bound.
    pub envelope_constant: f64,
}

/// Refuse exact counts whose search would visit more nodes than this.
pub const STRUCTURE_WORK_LIMIT: f64 = 2e9;

fn ordered_chains_through_zero(space: &ApSpace, ell: usize, cyclic: bool) -> Result<u128> {
    let n = space.n();
    let k = space.k();
    let deg = space.aps_through(0).len() as f64;
    let work = deg * (k as f64 * deg).powi(ell as i32 - 1);
    if work > STRUCTURE_WORK_LIMIT {
        return Err(VdwError::Refused(format!(
            "exact count for n = {n}, k = {k}, l = {ell} needs about {work:.2e} steps"
        )));
    }
    let mut total: u128 = 0;
    let by_vertex = |v: u32| space.aps_through(v);
    fn rec(
        chain: &mut Vec<Edge>,
        ell: usize,
        cyclic: bool,
        by_vertex: &dyn Fn(u32) -> Vec<Edge>,
        total: &mut u128,
    ) {
        let n = chain.len();
        if n == ell {
            if !cyclic || (meet(&chain[0], &chain[n - 1]) == 1 && is_full_cycle(chain)) {
                *total += 1;
            }
            return;
        }
        let last = chain[n - 1].clone();
        let mut cands: Vec<Edge> = last.iter().flat_map(|&v| by_vertex(v)).collect();
        cands.sort_unstable();
        cands.dedup();
        for e in cands {
            if chain.contains(&e) || meet(&e, &last) != 1 {
                continue;
            }
            let closing = cyclic && n + 1 == ell && n >= 2;
            let ok = chain[..n - 1].iter().enumerate().all(|(i, f)| {
                let m = meet(&e, f);
                if closing && i == 0 {
                    m == 1
                } else {
                    m == 0
                }
            });
            if ok {
                chain.push(e);
                rec(chain, ell, cyclic, by_vertex, total);
                chain.pop();
            }
        }
    }
    for e1 in space.aps_through(0) {
        let mut chain = vec![e1];
        rec(&mut chain, ell, cyclic, &by_vertex, &mut total);
    }
    Ok(total)
}

fn is_full_cycle(chain: &[Edge]) -> bool {
    let k = chain[0].len();
    let mut v: Vec<u32> = chain.iter().flatten().copied().collect();
    v.sort_unstable();
    v.dedup();
    v.len() == (k - 1) * chain.len()
}

/// Exact number of loose cycles of length `ell >= 3` in the k-AP
/// hypergraph of `Z/nZ`, via translation symmetry.
pub fn count_loose_cycles(n: usize, k: usize, ell: usize) -> Result<u128> {
    if ell < 3 {
        return Err(VdwError::Param(format!("cycles need l >= 3, got {ell}")));
    }
    let space = ApSpace::new(n, k)?;
    if k > n {
        return Ok(0);
    }
    let through = ordered_chains_through_zero(&space, ell, true)?;
    // sum over all starting edges = (n / k) * (sum over starting edges at 0),
    // and each cycle has 2l orderings
    let all = through * n as u128;
    debug_assert_eq!(all % (k as u128 * 2 * ell as u128), 0);
    Ok(all / (k as u128 * 2 * ell as u128))
}

/// Exact number of loose paths of length `ell >= 1`.
pub fn count_loose_paths(n: usize, k: usize, ell: usize) -> Result<u128> {
    if ell < 1 {
        return Err(VdwError::Param("paths need l >= 1".into()));
    }
    let space = ApSpace::new(n, k)?;
    if k > n {
        return Ok(0);
    }
    let through = ordered_chains_through_zero(&space, ell, false)?;
    let orderings = if ell == 1 { 1 } else { 2 };
    let all = through * n as u128;
    debug_assert_eq!(all % (k as u128 * orderings), 0);
    Ok(all / (k as u128 * orderings))
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(VdwError::Param(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// `E Y_l` for loose cycles in `Z_{n,p}`, with the constant relative to
/// `p^{(k-1)l} n^l`.
pub fn expected_loose_cycles(
    n: usize,
    p: f64,
    k: usize,
    ell: usize,
) -> Result<StructureExpectation> {
    check_p(p)?;
    let count = count_loose_cycles(n, k, ell)?;
    let vertices = (k - 1) * ell;
    let expectation = count as f64 * p.powi(vertices as i32);
    let envelope = p.powi(vertices as i32) * (n as f64).powi(ell as i32);
    Ok(StructureExpectation {
        count,
        vertices,
        expectation,
        envelope_constant: if envelope > 0.0 {
            expectation / envelope
        } else {
            0.0
        },
    })
}

/// `E Y'_l` for loose paths, with the constant relative to
/// `p^k n^2 p^{(k-1)(l-1)} n^{l-1}`.
pub fn expected_loose_paths(
    n: usize,
    p: f64,
    k: usize,
    ell: usize,
) -> Result<StructureExpectation> {
    check_p(p)?;
    let count = count_loose_paths(n, k, ell)?;
    let vertices = (k - 1) * ell + 1;
    let expectation = count as f64 * p.powi(vertices as i32);
    let envelope = p.powi(vertices as i32) * (n as f64).powi(ell as i32 + 1);
    Ok(StructureExpectation {
        count,
        vertices,
        expectation,
        envelope_constant: if envelope > 0.0 {
            expectation / envelope
        } else {
            0.0
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JansonReport {
    pub ex: f64,
    pub delta: f64,
    pub bound: f64,
}

/// `Pr(X = 0) <= exp(-EX^2 / (2 Delta))`, with `Delta` summed over ordered
/// pairs of intersecting targets, the diagonal included.
pub fn janson_bound(targets: &[Edge], p: f64) -> Result<JansonReport> {
    check_p(p)?;
    let mut sorted: Vec<Edge> = targets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let ex: f64 = sorted.iter().map(|a| p.powi(a.len() as i32)).sum();
    let mut incident: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, a) in sorted.iter().enumerate() {
        for &v in a {
            incident.entry(v).or_default().push(i);
        }
    }
    let mut delta = 0.0;
    let mut seen: Vec<usize> = Vec::new();
    let mut mark = vec![usize::MAX; sorted.len()];
    for (i, a) in sorted.iter().enumerate() {
        seen.clear();
        for &v in a {
            for &j in &incident[&v] {
                if mark[j] != i {
                    mark[j] = i;
                    seen.push(j);
                }
            }
        }
        for &j in &seen {
            let union = a.len() + sorted[j].len() - meet(a, &sorted[j]);
            delta += p.powi(union as i32);
        }
    }
    let bound = if ex == 0.0 {
        1.0
    } else {
        (-ex * ex / (2.0 * delta)).exp()
    };
    Ok(JansonReport { ex, delta, bound })
}

/// `p^{2k-1} n^3 + p^{k+1} k^2 n^2`.
pub fn janson_delta_envelope(n: usize, p: f64, k: usize) -> f64 {
    let n = n as f64;
    p.powi(2 * k as i32 - 1) * n.powi(3) + p.powi(k as i32 + 1) * (k * k) as f64 * n * n
}

/// Splits the edges into matchings by greedy colouring of the line graph,
/// in edge order; returns the colour of each edge.
pub fn greedy_matchings(f: &UniformHypergraph) -> Vec<u32> {
    let mut used: Vec<Vec<u32>> = vec![Vec::new(); f.m()];
    let mut colours = Vec::with_capacity(f.e());
    for e in f.edges() {
        let mut c = 0u32;
        while e.iter().any(|&v| used[v as usize].contains(&c)) {
            c += 1;
        }
        for &v in e {
            used[v as usize].push(c);
        }
        colours.push(c);
    }
    colours
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub edges_inside: usize,
    /// `5 D (p^l n / l + ln n)`.
    pub bound: f64,
    pub holds: bool,
    pub matchings: usize,
    pub largest_matching: usize,
    /// Largest number of edges of one matching inside `U`.
    pub largest_inside: usize,
}

pub fn matching_bound_check(
    f: &UniformHypergraph,
    u: &GroundSubset,
    d: usize,
    p: f64,
) -> Result<MatchingReport> {
    check_p(p)?;
    check_modulus(f.m(), u.modulus())?;
    let delta = f.max_t_degree(1);
    if delta > d {
        return Err(VdwError::Precondition(format!(
            "max degree {delta} exceeds D = {d}"
        )));
    }
    let colours = greedy_matchings(f);
    let matchings = colours.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut sizes = vec![0usize; matchings];
    let mut inside = vec![0usize; matchings];
    let mut edges_inside = 0;
    for (e, &c) in f.edges().iter().zip(&colours) {
        sizes[c as usize] += 1;
        if u.contains_all(e) {
            inside[c as usize] += 1;
            edges_inside += 1;
        }
    }
    let n = f.m() as f64;
    let l = f.ell() as f64;
    let bound = 5.0 * d as f64 * (p.powf(l) * n / l + n.ln());
    Ok(MatchingReport {
        edges_inside,
        bound,
        holds: edges_inside as f64 <= bound,
        matchings,
        largest_matching: sizes.into_iter().max().unwrap_or(0),
        largest_inside: inside.into_iter().max().unwrap_or(0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApFloorReport {
    pub subset_size: usize,
    pub random_min: u64,
    /// Drop the members of highest AP-degree in `Z`, degrees computed once.
    pub greedy: u64,
    /// Diagnostic only, not part of `min`: degrees recomputed after every drop.
    pub peeling: u64,
    pub min: u64,
    /// `min / (p^k n^2)`.
    pub normalized: f64,
    /// `ceil(gamma |Z|) < k`: no AP can fit.
    pub too_small: bool,
}

/// Keep the `size` members of `Z` lying in the fewest k-APs of `Z`
/// (larger residue dropped first on ties).
pub fn greedy_sparse_subset<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    size: usize,
    fam: &F,
) -> Result<GroundSubset> {
    check_modulus(fam.n(), z.modulus())?;
    let mut deg: HashMap<u32, usize> = z.iter().map(|v| (v, 0)).collect();
    for e in fam.aps_within(z)? {
        for v in e.iter() {
            *deg.get_mut(v).unwrap() += 1;
        }
    }
    let mut order = z.to_vec();
    order.sort_by_key(|v| (deg[v], *v));
    GroundSubset::from_members(z.modulus(), order.into_iter().take(size))
}

/// Repeatedly drop the member lying in the most k-APs of what remains
/// (smallest residue on ties) until `size` remain.
pub fn peeling_sparse_subset<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    size: usize,
    fam: &F,
) -> Result<GroundSubset> {
    check_modulus(fam.n(), z.modulus())?;
    let mut cur = z.clone();
    let edges = fam.aps_within(z)?;
    let mut alive = vec![true; edges.len()];
    let mut deg: HashMap<u32, usize> = z.iter().map(|v| (v, 0)).collect();
    let mut by_vertex: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        for &v in e {
            *deg.get_mut(&v).unwrap() += 1;
            by_vertex.entry(v).or_default().push(i);
        }
    }
    while cur.len() > size {
        let v = cur
            .iter()
            .max_by_key(|v| (deg[v], std::cmp::Reverse(*v)))
            .unwrap();
        cur.remove(v);
        for &i in by_vertex.get(&v).map(|x| x.as_slice()).unwrap_or(&[]) {
            if alive[i] {
                alive[i] = false;
                for &w in &edges[i] {
                    *deg.get_mut(&w).unwrap() -= 1;
                }
            }
        }
    }
    Ok(cur)
}

/// Smallest number of k-APs found inside subsets `S ⊆ Z` of size
/// `ceil(gamma |Z|)`: `trials` uniform subsets plus the greedy one.
pub fn dense_subset_ap_floor<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    gamma: f64,
    fam: &F,
    p: f64,
    trials: usize,
    seed: RandomSeed,
) -> Result<ApFloorReport> {
    check_modulus(fam.n(), z.modulus())?;
    if z.is_empty() {
        return Err(VdwError::Param("Z must be nonempty".into()));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(VdwError::Param(format!("gamma = {gamma} outside (0, 1]")));
    }
    let size = ((gamma * z.len() as f64) - 1e-9).ceil() as usize;
    let n = z.modulus() as f64;
    let norm = p.powi(fam.k() as i32) * n * n;
    if size < fam.k() {
        return Ok(ApFloorReport {
            subset_size: size,
            random_min: 0,
            greedy: 0,
            peeling: 0,
            min: 0,
            normalized: 0.0,
            too_small: true,
        });
    }
    let members = z.to_vec();
    let mut rng = seed.rng();
    let mut random_min = u64::MAX;
    for _ in 0..trials {
        let pick: Vec<u32> = members.choose_multiple(&mut rng, size).copied().collect();
        let s = GroundSubset::from_members(z.modulus(), pick)?;
        random_min = random_min.min(fam.aps_within(&s)?.len() as u64);
    }
    let greedy = fam.aps_within(&greedy_sparse_subset(z, size, fam)?)?.len() as u64;
    let peeling = fam.aps_within(&peeling_sparse_subset(z, size, fam)?)?.len() as u64;
    let min = random_min.min(greedy);
    Ok(ApFloorReport {
        subset_size: size,
        random_min: if trials == 0 { greedy } else { random_min },
        greedy,
        peeling,
        min,
        normalized: if norm > 0.0 { min as f64 / norm } else { 0.0 },
        too_small: false,
    })
}
