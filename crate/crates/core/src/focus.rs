//! Focusing, the hypergraph `H(Z, B, X)`, bad translates, regularity,
//! profiles, index consistency, activated sets and focus-completion sets.
//!
//! Throughout, `B = {b_1 < .. < b_K}` is labelled by natural residue order
//! and profiles store the zero-based label `j` of `b_j`. Edge members are
//! indexed by a [`ResidueOrder`], natural by default.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclic::{ApFamily, Edge};
use crate::error::{check_modulus, Result, VdwError};
use crate::ramsey::TwoColouring;
use crate::random::RandomSeed;
use crate::subset::GroundSubset;

/// A total order on `Z/nZ`, given by the rank of each residue.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueOrder {
    rank: Option<Vec<u32>>,
}

impl ResidueOrder {
    pub fn natural() -> Self {
        Self { rank: None }
    }

    /// `sequence` lists every residue of `Z/nZ` once, smallest first.
    pub fn from_sequence(n: usize, sequence: &[u32]) -> Result<Self> {
        if sequence.len() != n {
            return Err(VdwError::Param(format!(
                "order lists {} residues, expected {n}",
                sequence.len()
            )));
        }
        let mut rank = vec![u32::MAX; n];
        for (r, &v) in sequence.iter().enumerate() {
            if v as usize >= n || rank[v as usize] != u32::MAX {
                return Err(VdwError::Param(format!(
                    "order is not a permutation (at {v})"
                )));
            }
            rank[v as usize] = r as u32;
        }
        Ok(Self { rank: Some(rank) })
    }

    #[inline]
    pub fn rank(&self, v: u32) -> u32 {
        match &self.rank {
            None => v,
            Some(r) => r[v as usize],
        }
    }

    pub fn sort(&self, xs: &mut [u32]) {
        xs.sort_unstable_by_key(|&v| self.rank(v));
    }

    fn check(&self, n: usize) -> Result<()> {
        match &self.rank {
            Some(r) if r.len() != n => Err(VdwError::ModulusMismatch {
                expected: n,
                found: r.len(),
            }),
            _ => Ok(()),
        }
    }
}

/// APs inside `A ∪ Bx` that meet both `A` and `Bx` in distinct points,
/// together with the focusing relations `(a, b)` they induce.
struct FocusTable {
    aps: Vec<Edge>,
    pairs: Vec<(u32, u32)>,
}

fn focus_table<F: ApFamily + ?Sized>(a: &GroundSubset, bx: &GroundSubset, fam: &F) -> FocusTable {
    let inside = |v: u32| a.contains(v) || bx.contains(v);
    let mut aps: Vec<Edge> = Vec::new();
    for b in bx.iter() {
        for z in a.iter() {
            if z == b {
                continue;
            }
            for e in fam.aps_through_pair(z, b) {
                if e.iter().all(|&v| inside(v)) {
                    aps.push(e);
                }
            }
        }
    }
    aps.sort_unstable();
    aps.dedup();
    let mut pairs = Vec::new();
    for e in &aps {
        for &z in e.iter().filter(|&&v| a.contains(v)) {
            for &b in e.iter().filter(|&&v| bx.contains(v)) {
                if z != b {
                    pairs.push((z, b));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    FocusTable { aps, pairs }
}

impl FocusTable {
    fn members(&self) -> Vec<u32> {
        let mut m: Vec<u32> = self.pairs.iter().map(|p| p.0).collect();
        m.dedup();
        m
    }

    /// First `z` focusing on two distinct elements, with both targets.
    fn irregularity(&self) -> Option<(u32, u32, u32)> {
        self.pairs
            .windows(2)
            .find(|w| w[0].0 == w[1].0)
            .map(|w| (w[0].0, w[0].1, w[1].1))
    }

    fn target(&self, z: u32) -> Option<u32> {
        let i = self.pairs.partition_point(|p| p.0 < z);
        self.pairs.get(i).filter(|p| p.0 == z).map(|p| p.1)
    }
}

/// `a` focuses on `b`: some k-AP contains `a` and `b` and has its other
/// `k-2` members in `A ∪ B`.
pub fn focuses_on<F: ApFamily + ?Sized>(
    a: u32,
    b: u32,
    set_a: &GroundSubset,
    set_b: &GroundSubset,
    fam: &F,
) -> Result<bool> {
    check_modulus(set_a.modulus(), set_b.modulus())?;
    check_modulus(fam.n(), set_a.modulus())?;
    if !set_a.contains(a) {
        return Err(VdwError::Precondition(format!("{a} is not in A")));
    }
    if !set_b.contains(b) {
        return Err(VdwError::Precondition(format!("{b} is not in B")));
    }
    Ok(fam.aps_through_pair(a, b).iter().any(|e| {
        e.iter()
            .all(|&v| v == a || v == b || set_a.contains(v) || set_b.contains(v))
    }))
}

/// `M(A, B)`: members of `A` focusing on some member of `B`.
pub fn focus_edge<F: ApFamily + ?Sized>(
    a: &GroundSubset,
    b: &GroundSubset,
    fam: &F,
) -> Result<GroundSubset> {
    check_modulus(a.modulus(), b.modulus())?;
    check_modulus(fam.n(), a.modulus())?;
    GroundSubset::from_members(a.modulus(), focus_table(a, b, fam).members())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusEdge {
    pub x: u32,
    /// `M(Z, B+x)` in natural residue order.
    pub members: Vec<u32>,
}

impl FocusEdge {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `H(Z, B, X)`: one edge `M(Z, B+x)` per `x`, empty edges kept.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FocusHypergraph {
    pub z: GroundSubset,
    pub b: GroundSubset,
    pub edges: Vec<FocusEdge>,
}

impl FocusHypergraph {
    pub fn nonempty_edges(&self) -> impl Iterator<Item = &FocusEdge> {
        self.edges.iter().filter(|e| !e.is_empty())
    }

    pub fn empty_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_empty()).count()
    }

    pub fn edge(&self, x: u32) -> Option<&FocusEdge> {
        self.edges
            .binary_search_by_key(&x, |e| e.x)
            .ok()
            .map(|i| &self.edges[i])
    }

    /// Common size of all nonempty edges, if there is one.
    pub fn uniformity(&self) -> Option<usize> {
        let mut sizes = self.nonempty_edges().map(|e| e.members.len());
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }
}

fn check_triple<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    x: &GroundSubset,
    fam: &F,
) -> Result<()> {
    check_modulus(z.modulus(), b.modulus())?;
    check_modulus(z.modulus(), x.modulus())?;
    check_modulus(fam.n(), z.modulus())
}

pub fn build_focus_hypergraph<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    x: &GroundSubset,
    fam: &F,
) -> Result<FocusHypergraph> {
    check_triple(z, b, x, fam)?;
    let xs = x.to_vec();
    let edges = xs
        .par_iter()
        .map(|&t| FocusEdge {
            x: t,
            members: focus_table(z, &b.translate(t), fam).members(),
        })
        .collect();
    Ok(FocusHypergraph {
        z: z.clone(),
        b: b.clone(),
        edges,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub v: usize,
    /// Nonempty edges, counted once per `x`.
    pub e: usize,
    pub empty_edges: usize,
    pub delta1: usize,
    pub delta2: usize,
}

/// Vertex count, edge count, maximum degree and maximum pair codegree.
/// Edges are counted per index `x`, so equal sets from different `x` both
/// contribute.
pub fn degree_stats(h: &FocusHypergraph) -> DegreeStats {
    let mut deg: HashMap<u32, usize> = HashMap::new();
    let mut codeg: HashMap<(u32, u32), usize> = HashMap::new();
    for e in h.nonempty_edges() {
        for (i, &u) in e.members.iter().enumerate() {
            *deg.entry(u).or_default() += 1;
            for &w in &e.members[i + 1..] {
                *codeg.entry((u, w)).or_default() += 1;
            }
        }
    }
    DegreeStats {
        v: h.z.len(),
        e: h.nonempty_edges().count(),
        empty_edges: h.empty_edge_count(),
        delta1: deg.values().copied().max().unwrap_or(0),
        delta2: codeg.values().copied().max().unwrap_or(0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PSets {
    /// All `(k-2)`-sets `P` with `P ∪ {z, b}` a k-AP for some `b ∈ B`.
    pub all: Vec<Edge>,
    /// Members of `all` disjoint from `B`.
    pub disjoint: Vec<Edge>,
    /// Members of `all` meeting `B`.
    pub meeting: Vec<Edge>,
}

/// `P(z, B)` split into `P_0` and `P_1`.
pub fn p_sets<F: ApFamily + ?Sized>(z: u32, b: &GroundSubset, fam: &F) -> Result<PSets> {
    check_modulus(fam.n(), b.modulus())?;
    if b.contains(z) {
        return Err(VdwError::Precondition(format!("{z} lies in B")));
    }
    let mut all: Vec<Edge> = Vec::new();
    for bb in b.iter() {
        for e in fam.aps_through_pair(z, bb) {
            all.push(e.iter().copied().filter(|&v| v != z && v != bb).collect());
        }
    }
    all.sort_unstable();
    all.dedup();
    let (meeting, disjoint): (Vec<Edge>, Vec<Edge>) = all
        .iter()
        .cloned()
        .partition(|p| p.iter().any(|&v| b.contains(v)));
    Ok(PSets {
        all,
        disjoint,
        meeting,
    })
}

/// `|{P ∈ P(z, B, Z/nZ) : a ∈ P}|`, where `P(z, B, Z/nZ)` is the union of
/// `P(z, B+x)` over all `x` with `z ∉ B+x`.
pub fn completions_through<F: ApFamily + ?Sized>(
    z: u32,
    a: u32,
    b: &GroundSubset,
    fam: &F,
) -> Result<usize> {
    check_modulus(fam.n(), b.modulus())?;
    let n = b.modulus() as u32;
    let labels = b.to_vec();
    let mut found: Vec<Edge> = Vec::new();
    for e in fam.aps_through_pair(z, a) {
        for &bb in e.iter().filter(|&&v| v != z && v != a) {
            let usable = labels.iter().any(|&bj| {
                let x = (bb + n - bj) % n;
                !b.contains((z + n - x) % n)
            });
            if usable {
                found.push(e.iter().copied().filter(|&v| v != z && v != bb).collect());
            }
        }
    }
    found.sort_unstable();
    found.dedup();
    Ok(found.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BadWitness {
    /// A k-AP inside `A ∪ (B+x)` with at least two members in `B+x` and
    /// the member `z` in `A ∖ (B+x)`.
    TwoInTranslate { ap: Vec<u32>, z: u32 },
    /// Two distinct k-APs inside `A ∪ (B+x)`, each with exactly one member
    /// in `B+x`, whose parts outside `B+x` share `shared`.
    SharedCompletion {
        first: Vec<u32>,
        second: Vec<u32>,
        shared: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadEntry {
    pub x: u32,
    pub witness: BadWitness,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BadSetReport {
    pub y: GroundSubset,
    pub witnesses: Vec<BadEntry>,
}

fn bad_witness(a: &GroundSubset, bx: &GroundSubset, table: &FocusTable) -> Option<BadWitness> {
    for e in &table.aps {
        let in_b = e.iter().filter(|&&v| bx.contains(v)).count();
        if in_b >= 2 {
            if let Some(&z) = e.iter().find(|&&v| !bx.contains(v)) {
                debug_assert!(a.contains(z));
                return Some(BadWitness::TwoInTranslate { ap: e.to_vec(), z });
            }
        }
    }
    let mut owner: HashMap<u32, usize> = HashMap::new();
    for (i, e) in table.aps.iter().enumerate() {
        if e.iter().filter(|&&v| bx.contains(v)).count() != 1 {
            continue;
        }
        for &v in e.iter().filter(|&&v| !bx.contains(v)) {
            if let Some(&j) = owner.get(&v) {
                return Some(BadWitness::SharedCompletion {
                    first: table.aps[j].to_vec(),
                    second: e.to_vec(),
                    shared: v,
                });
            }
        }
        for &v in e.iter().filter(|&&v| !bx.contains(v)) {
            owner.insert(v, i);
        }
    }
    None
}

/// Every `x ∈ Z/nZ` that is bad with respect to `A` and `B`, with one
/// witness each.
pub fn bad_elements<F: ApFamily + ?Sized>(
    a: &GroundSubset,
    b: &GroundSubset,
    fam: &F,
) -> Result<BadSetReport> {
    check_modulus(a.modulus(), b.modulus())?;
    check_modulus(fam.n(), a.modulus())?;
    let n = a.modulus();
    let witnesses: Vec<BadEntry> = (0..n as u32)
        .into_par_iter()
        .filter_map(|x| {
            let bx = b.translate(x);
            let table = focus_table(a, &bx, fam);
            bad_witness(a, &bx, &table).map(|witness| BadEntry { x, witness })
        })
        .collect();
    let y = GroundSubset::from_members(n, witnesses.iter().map(|w| w.x))?;
    Ok(BadSetReport { y, witnesses })
}

/// Checks a witness from scratch against the definitions.
pub fn replay_bad_witness<F: ApFamily + ?Sized>(
    a: &GroundSubset,
    b: &GroundSubset,
    entry: &BadEntry,
    fam: &F,
) -> bool {
    let space = fam.space();
    let bx = b.translate(entry.x);
    let inside = |e: &[u32]| e.iter().all(|&v| a.contains(v) || bx.contains(v));
    let in_b = |e: &[u32]| e.iter().filter(|&&v| bx.contains(v)).count();
    match &entry.witness {
        BadWitness::TwoInTranslate { ap, z } => {
            space.is_ap(ap)
                && inside(ap)
                && in_b(ap) >= 2
                && ap.contains(z)
                && a.contains(*z)
                && !bx.contains(*z)
        }
        BadWitness::SharedCompletion {
            first,
            second,
            shared,
        } => {
            let (mut s1, mut s2) = (first.clone(), second.clone());
            s1.sort_unstable();
            s2.sort_unstable();
            s1 != s2
                && space.is_ap(first)
                && space.is_ap(second)
                && inside(first)
                && inside(second)
                && in_b(first) == 1
                && in_b(second) == 1
                && first.contains(shared)
                && second.contains(shared)
                && !bx.contains(*shared)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Irregularity {
    pub x: u32,
    pub z: u32,
    pub first: u32,
    pub second: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub violation: Option<Irregularity>,
}

/// `(Z, B, X)` is regular when no `z` focuses on two members of any `B+x`.
pub fn is_regular<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    x: &GroundSubset,
    fam: &F,
) -> Result<RegularityReport> {
    check_triple(z, b, x, fam)?;
    let xs = x.to_vec();
    let violation = xs
        .par_iter()
        .map(|&t| {
            focus_table(z, &b.translate(t), fam)
                .irregularity()
                .map(|(zz, first, second)| Irregularity {
                    x: t,
                    z: zz,
                    first,
                    second,
                })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next();
    Ok(RegularityReport {
        regular: violation.is_none(),
        violation,
    })
}

/// The translates `x ∈ X` at which no `z` focuses on two members of `B+x`.
pub fn regular_part<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    x: &GroundSubset,
    fam: &F,
) -> Result<GroundSubset> {
    check_triple(z, b, x, fam)?;
    let xs = x.to_vec();
    let keep: Vec<u32> = xs
        .par_iter()
        .filter(|&&t| {
            focus_table(z, &b.translate(t), fam)
                .irregularity()
                .is_none()
        })
        .copied()
        .collect();
    GroundSubset::from_members(z.modulus(), keep)
}

/// Which label each indexed edge member focuses on: `map[i] = j` when the
/// `i`-th member focuses on `b_j + x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Profile {
    pub map: Vec<u32>,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// The edge `M(Z, B+x)` in index order, and its profile.
fn indexed_edge<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    labels: &[u32],
    x: u32,
    order: &ResidueOrder,
    fam: &F,
) -> Result<(Vec<u32>, Profile)> {
    let n = z.modulus() as u32;
    let table = focus_table(z, &b.translate(x), fam);
    if let Some((zz, first, second)) = table.irregularity() {
        return Err(VdwError::Precondition(format!(
            "{zz} focuses on both {first} and {second} at x = {x}"
        )));
    }
    let mut members = table.members();
    order.sort(&mut members);
    let map = members
        .iter()
        .map(|&m| {
            let target = table.target(m).expect("member has a target");
            let pre = (target + n - x % n) % n;
            labels.binary_search(&pre).expect("target lies in B + x") as u32
        })
        .collect();
    Ok((members, Profile { map }))
}

pub fn edge_profile<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    x: u32,
    order: &ResidueOrder,
    fam: &F,
) -> Result<Profile> {
    check_modulus(z.modulus(), b.modulus())?;
    check_modulus(fam.n(), z.modulus())?;
    order.check(z.modulus())?;
    Ok(indexed_edge(z, b, &b.to_vec(), x, order, fam)?.1)
}

/// Each vertex sits at one index across all listed edges.
pub fn is_index_consistent(edges: &[Vec<u32>]) -> bool {
    let mut seen: HashMap<u32, usize> = HashMap::new();
    for e in edges {
        for (i, &v) in e.iter().enumerate() {
            if *seen.entry(v).or_insert(i) != i {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtractionMethod {
    Empty,
    AlreadyConsistent,
    MajorityIndex,
    RandomPartition,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodTripleTargets {
    pub alpha: f64,
    /// `L = 20 c^{k-1} k^2 / alpha`.
    pub max_length: f64,
    /// `alpha / (2 (L K)^L)`.
    pub alpha_prime: f64,
}

pub fn good_triple_targets(c: f64, k: usize, big_k: usize, alpha: f64) -> GoodTripleTargets {
    let max_length = 20.0 * c.powi(k as i32 - 1) * (k * k) as f64 / alpha;
    let alpha_prime = alpha / (2.0 * (max_length * big_k as f64).powf(max_length));
    GoodTripleTargets {
        alpha,
        max_length,
        alpha_prime,
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub retries: usize,
    pub seed: RandomSeed,
    /// Density constant used only for reporting the length and size targets.
    pub c: Option<f64>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            retries: 200,
            seed: RandomSeed::new(0, 0),
            c: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConsistentSubfamily {
    pub x_prime: GroundSubset,
    pub profile: Option<Profile>,
    pub method: ExtractionMethod,
    pub empty_edges: usize,
    pub profile_classes: usize,
    /// Size of the profile class `X'` was drawn from.
    pub class_size: usize,
    /// Survival probability of one edge under a random partition, `l^-l`.
    pub survival_probability: f64,
    pub targets: Option<GoodTripleTargets>,
}

fn best_in_class(
    class: &[(u32, Vec<u32>)],
    len: usize,
    retries: usize,
    seed: RandomSeed,
) -> (Vec<u32>, ExtractionMethod) {
    let edges: Vec<Vec<u32>> = class.iter().map(|c| c.1.clone()).collect();
    if is_index_consistent(&edges) {
        return (
            class.iter().map(|c| c.0).collect(),
            ExtractionMethod::AlreadyConsistent,
        );
    }
    let mut counts: HashMap<u32, Vec<u32>> = HashMap::new();
    for e in &edges {
        for (i, &v) in e.iter().enumerate() {
            counts.entry(v).or_insert_with(|| vec![0; len])[i] += 1;
        }
    }
    let majority: HashMap<u32, usize> = counts
        .iter()
        .map(|(&v, c)| {
            let best = (0..len)
                .max_by_key(|&i| (c[i], std::cmp::Reverse(i)))
                .unwrap();
            (v, best)
        })
        .collect();
    let survivors = |class_of: &dyn Fn(u32) -> usize| -> Vec<u32> {
        class
            .iter()
            .filter(|(_, e)| e.iter().enumerate().all(|(i, &v)| class_of(v) == i))
            .map(|c| c.0)
            .collect()
    };
    let mut best = survivors(&|v| majority[&v]);
    let mut method = ExtractionMethod::MajorityIndex;
    let mut vertices: Vec<u32> = counts.keys().copied().collect();
    vertices.sort_unstable();
    let mut rng = seed.rng();
    for _ in 0..retries {
        let part: HashMap<u32, usize> = vertices
            .iter()
            .map(|&v| (v, rng.gen_range(0..len)))
            .collect();
        let got = survivors(&|v| part[&v]);
        if got.len() > best.len() {
            best = got;
            method = ExtractionMethod::RandomPartition;
        }
    }
    (best, method)
}

/// Largest found `X' ⊆ X` on which all edges share one profile and every
/// vertex keeps one index. Profile classes are formed exhaustively; inside
/// a class that is not already consistent, the majority-index assignment
/// competes with `retries` random partitions into `l` classes.
pub fn extract_consistent_subfamily<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    x: &GroundSubset,
    order: &ResidueOrder,
    fam: &F,
    opts: &ExtractOptions,
) -> Result<ConsistentSubfamily> {
    check_triple(z, b, x, fam)?;
    order.check(z.modulus())?;
    let n = z.modulus();
    let targets = opts
        .c
        .filter(|_| !x.is_empty())
        .map(|c| good_triple_targets(c, fam.k(), b.len(), x.len() as f64 / n as f64));
    let labels = b.to_vec();
    let xs = x.to_vec();
    let indexed: Vec<(u32, Vec<u32>, Profile)> = xs
        .par_iter()
        .map(|&t| indexed_edge(z, b, &labels, t, order, fam).map(|(m, p)| (t, m, p)))
        .collect::<Result<_>>()?;
    let empty_edges = indexed.iter().filter(|e| e.1.is_empty()).count();
    let mut classes: HashMap<Profile, Vec<(u32, Vec<u32>)>> = HashMap::new();
    for (t, m, p) in indexed.into_iter().filter(|e| !e.1.is_empty()) {
        classes.entry(p).or_default().push((t, m));
    }
    let profile_classes = classes.len();
    let mut ordered: Vec<(Profile, Vec<(u32, Vec<u32>)>)> = classes.into_iter().collect();
    ordered.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(&b.0)));

    let mut best: Option<(Vec<u32>, Profile, ExtractionMethod, usize)> = None;
    for (i, (profile, class)) in ordered.iter().enumerate() {
        if best.as_ref().is_some_and(|b| b.0.len() >= class.len()) {
            break;
        }
        let (got, method) = best_in_class(
            class,
            profile.len(),
            opts.retries,
            opts.seed.derive(i as u64),
        );
        if best.as_ref().is_none_or(|b| got.len() > b.0.len()) {
            best = Some((got, profile.clone(), method, class.len()));
        }
    }
    Ok(match best {
        None => ConsistentSubfamily {
            x_prime: GroundSubset::empty(n),
            profile: None,
            method: ExtractionMethod::Empty,
            empty_edges,
            profile_classes,
            class_size: 0,
            survival_probability: 1.0,
            targets,
        },
        Some((got, profile, method, class_size)) => {
            let l = profile.len() as f64;
            ConsistentSubfamily {
                x_prime: GroundSubset::from_members(n, got)?,
                survival_probability: l.powf(-l),
                profile: Some(profile),
                method,
                empty_edges,
                profile_classes,
                class_size,
                targets,
            }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activation {
    pub z: u32,
    pub x: u32,
    /// The member of `B+x` that `z` focuses on with matching colour.
    pub b: u32,
    /// Label of `b - x` in `B`.
    pub label: u32,
    /// Index of `z` in `M(Z, B+x)`.
    pub index: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActivationRecord {
    pub activated: GroundSubset,
    pub evidence: Vec<Activation>,
}

/// Vertices `z ∈ M(Z, B+x)` focusing on some `b ∈ B+x` with
/// `phi(z) = sigma_x(b)`, over all `x ∈ X`.
#[allow(clippy::too_many_arguments)]
pub fn activated_set<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    x: &GroundSubset,
    sigma: &TwoColouring,
    phi: &TwoColouring,
    order: &ResidueOrder,
    fam: &F,
) -> Result<ActivationRecord> {
    check_triple(z, b, x, fam)?;
    order.check(z.modulus())?;
    if sigma.domain() != b || !sigma.is_ap_free(fam)? {
        return Err(VdwError::Precondition(
            "sigma must be a k-AP-free colouring of B".into(),
        ));
    }
    if phi.domain() != z || !phi.is_ap_free(fam)? {
        return Err(VdwError::Precondition(
            "phi must be a k-AP-free colouring of Z".into(),
        ));
    }
    let n = z.modulus() as u32;
    let labels = b.to_vec();
    let xs = x.to_vec();
    let per_x: Vec<Vec<Activation>> = xs
        .par_iter()
        .map(|&t| {
            let table = focus_table(z, &b.translate(t), fam);
            let mut members = table.members();
            order.sort(&mut members);
            let mut out = Vec::new();
            for &(zz, bb) in &table.pairs {
                let pre = (bb + n - t % n) % n;
                if phi.colour(zz) == sigma.colour(pre) {
                    let index = members.iter().position(|&m| m == zz).expect("member") as u32;
                    let label = labels.binary_search(&pre).expect("label") as u32;
                    out.push(Activation {
                        z: zz,
                        x: t,
                        b: bb,
                        label,
                        index,
                    });
                }
            }
            out
        })
        .collect();
    let evidence: Vec<Activation> = per_x.into_iter().flatten().collect();
    let activated = GroundSubset::from_members(z.modulus(), evidence.iter().map(|a| a.z))?;
    Ok(ActivationRecord {
        activated,
        evidence,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApDegreeProfile {
    /// `deg[z]`: k-APs `e ∋ z` with `e ∖ {z} ⊆ S`.
    pub deg: Vec<u32>,
    pub sum: u64,
    /// `sum_z C(deg(z), 2)`.
    pub w: u64,
    pub support: usize,
}

pub fn ap_degree_profile<F: ApFamily + ?Sized>(
    s: &GroundSubset,
    fam: &F,
) -> Result<ApDegreeProfile> {
    check_modulus(fam.n(), s.modulus())?;
    let n = s.modulus();
    let members = s.to_vec();
    let mut deg = vec![0u32; n];
    for (i, &u) in members.iter().enumerate() {
        for &w in &members[i + 1..] {
            for e in fam.aps_through_pair(u, w) {
                let in_s: Vec<u32> = e.iter().copied().filter(|&v| s.contains(v)).collect();
                // visit each edge once, from its two smallest members in S
                if in_s[0] != u || in_s[1] != w {
                    continue;
                }
                match e.len() - in_s.len() {
                    0 => e.iter().for_each(|&v| deg[v as usize] += 1),
                    1 => {
                        let out = e.iter().find(|&&v| !s.contains(v)).unwrap();
                        deg[*out as usize] += 1;
                    }
                    _ => {}
                }
            }
        }
    }
    let sum = deg.iter().map(|&d| d as u64).sum();
    let w = deg
        .iter()
        .map(|&d| d as u64 * (d as u64).saturating_sub(1) / 2)
        .sum();
    let support = deg.iter().filter(|&&d| d > 0).count();
    Ok(ApDegreeProfile {
        deg,
        sum,
        w,
        support,
    })
}

/// `F(S)`: residues completing some `k-1` members of `S` to a k-AP.
pub fn focus_completion_set<F: ApFamily + ?Sized>(
    s: &GroundSubset,
    fam: &F,
) -> Result<GroundSubset> {
    let prof = ap_degree_profile(s, fam)?;
    GroundSubset::from_members(
        s.modulus(),
        (0..s.modulus() as u32).filter(|&v| prof.deg[v as usize] > 0),
    )
}
