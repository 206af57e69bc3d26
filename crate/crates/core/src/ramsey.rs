//! Deciding `A -> (k-AP)_2` and enumerating k-AP-free 2-colourings.
//!
//! The search reduces the instance first: a vertex lying in at most one
//! surviving edge can always be coloured last (opposite to the rest of its
//! edge), so such vertices are peeled off repeatedly. What remains is split
//! into connected components, each solved by backtracking with unit
//! propagation (an edge with `k-1` members of one colour and one uncoloured
//! member forces the opposite colour). Branching picks the uncoloured vertex
//! in the most not-yet-bichromatic edges, smallest id on ties, red first.
//! In each component the smallest vertex is fixed to red, since swapping
//! colours preserves k-AP-freeness.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclic::{ApFamily, Edge};
use crate::error::{check_modulus, Result, VdwError};
use crate::subset::GroundSubset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Colour {
    Red,
    Blue,
}

impl Colour {
    pub fn flip(self) -> Self {
        match self {
            Colour::Red => Colour::Blue,
            Colour::Blue => Colour::Red,
        }
    }
}

/// A red/blue assignment on `domain`; the blue members are stored, every
/// other domain member is red.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoColouring {
    domain: GroundSubset,
    blue: GroundSubset,
}

impl TwoColouring {
    pub fn new(domain: GroundSubset, blue: GroundSubset) -> Result<Self> {
        check_modulus(domain.modulus(), blue.modulus())?;
        if !blue.is_subset(&domain) {
            return Err(VdwError::Param(
                "blue set must lie inside the domain".into(),
            ));
        }
        Ok(Self { domain, blue })
    }

    pub fn all_red(domain: GroundSubset) -> Self {
        let blue = GroundSubset::empty(domain.modulus());
        Self { domain, blue }
    }

    pub fn domain(&self) -> &GroundSubset {
        &self.domain
    }

    pub fn blue(&self) -> &GroundSubset {
        &self.blue
    }

    pub fn red(&self) -> GroundSubset {
        self.domain.difference(&self.blue).expect("same modulus")
    }

    pub fn colour(&self, v: u32) -> Option<Colour> {
        if !self.domain.contains(v) {
            None
        } else if self.blue.contains(v) {
            Some(Colour::Blue)
        } else {
            Some(Colour::Red)
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            blue: self.red(),
        }
    }

    /// First catalog edge inside the domain whose members share one colour.
    pub fn monochromatic_edge<F: ApFamily + ?Sized>(&self, fam: &F) -> Result<Option<Edge>> {
        Ok(fam.aps_within(&self.domain)?.into_iter().find(|e| {
            let blues = e.iter().filter(|&&v| self.blue.contains(v)).count();
            blues == 0 || blues == e.len()
        }))
    }

    pub fn is_ap_free<F: ApFamily + ?Sized>(&self, fam: &F) -> Result<bool> {
        Ok(self.monochromatic_edge(fam)?.is_none())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub propagations: u64,
    pub conflicts: u64,
    #[serde(with = "micros")]
    pub wall_time: Duration,
}

mod micros {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_micros(u64::deserialize(d)?))
    }
}

impl SearchStats {
    fn absorb(&mut self, o: &SearchStats) {
        self.nodes += o.nodes;
        self.propagations += o.propagations;
        self.conflicts += o.conflicts;
    }
}

const UNSET: i8 = -1;
const RED: i8 = 0;
const BLUE: i8 = 1;

/// Edges of `H_{A,k}` relabelled to `0..|A|`.
struct LocalHypergraph {
    members: Vec<u32>,
    k: usize,
    edges: Vec<u32>,
}

impl LocalHypergraph {
    fn build<F: ApFamily + ?Sized>(a: &GroundSubset, fam: &F) -> Result<Self> {
        check_modulus(fam.n(), a.modulus())?;
        let members = a.to_vec();
        let mut local = vec![u32::MAX; a.modulus()];
        for (i, &v) in members.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let k = fam.k();
        let mut edges = Vec::new();
        for e in fam.aps_within(a)? {
            edges.extend(e.iter().map(|&v| local[v as usize]));
        }
        Ok(Self { members, k, edges })
    }

    fn num_vertices(&self) -> usize {
        self.members.len()
    }

    fn num_edges(&self) -> usize {
        self.edges.len() / self.k
    }

    fn edge(&self, e: usize) -> &[u32] {
        &self.edges[e * self.k..(e + 1) * self.k]
    }
}

/// CSR incidence: `offsets[v]..offsets[v+1]` indexes `ids`.
struct Incidence {
    offsets: Vec<u32>,
    ids: Vec<u32>,
}

impl Incidence {
    fn new(m: usize, k: usize, edges: &[u32]) -> Self {
        let mut offsets = vec![0u32; m + 1];
        for &v in edges {
            offsets[v as usize + 1] += 1;
        }
        for i in 0..m {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut ids = vec![0u32; edges.len()];
        for (pos, &v) in edges.iter().enumerate() {
            let slot = &mut fill[v as usize];
            ids[*slot as usize] = (pos / k) as u32;
            *slot += 1;
        }
        Self { offsets, ids }
    }

    #[inline]
    fn of(&self, v: usize) -> &[u32] {
        &self.ids[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

struct Level {
    trail_pos: usize,
    var: u32,
    flipped: bool,
}

/// Backtracking 2-colouring search over one k-uniform hypergraph.
struct Search {
    k: usize,
    edges: Vec<u32>,
    inc: Incidence,
    colour: Vec<i8>,
    counts: Vec<[u16; 2]>,
    active: Vec<u32>,
    trail: Vec<u32>,
    levels: Vec<Level>,
    queue: Vec<(u32, i8)>,
    stats: SearchStats,
}

impl Search {
    fn new(m: usize, k: usize, edges: Vec<u32>) -> Self {
        let inc = Incidence::new(m, k, &edges);
        let active = (0..m).map(|v| inc.of(v).len() as u32).collect();
        let ne = edges.len() / k;
        Self {
            k,
            edges,
            inc,
            colour: vec![UNSET; m],
            counts: vec![[0, 0]; ne],
            active,
            trail: Vec::with_capacity(m),
            levels: Vec::new(),
            queue: Vec::new(),
            stats: SearchStats::default(),
        }
    }

    #[inline]
    fn edge(&self, e: usize) -> &[u32] {
        &self.edges[e * self.k..(e + 1) * self.k]
    }

    /// Colours `v`; returns false if some edge became monochromatic.
    fn assign(&mut self, v: u32, c: i8) -> bool {
        self.colour[v as usize] = c;
        self.trail.push(v);
        let o = (1 - c) as usize;
        let c = c as usize;
        let k = self.k as u16;
        let mut ok = true;
        let (lo, hi) = (
            self.inc.offsets[v as usize] as usize,
            self.inc.offsets[v as usize + 1] as usize,
        );
        for idx in lo..hi {
            let e = self.inc.ids[idx] as usize;
            let cnt = &mut self.counts[e];
            cnt[c] += 1;
            let (same, other) = (cnt[c], cnt[o]);
            if same == 1 && other > 0 {
                for i in 0..self.k {
                    let w = self.edges[e * self.k + i];
                    self.active[w as usize] -= 1;
                }
            }
            if same == k {
                ok = false;
            } else if ok && same == k - 1 && other == 0 {
                let u = self
                    .edge(e)
                    .iter()
                    .copied()
                    .find(|&w| self.colour[w as usize] == UNSET);
                if let Some(u) = u {
                    self.queue.push((u, o as i8));
                }
            }
        }
        ok
    }

    fn unassign(&mut self, v: u32) {
        let c = self.colour[v as usize] as usize;
        let o = 1 - c;
        let (lo, hi) = (
            self.inc.offsets[v as usize] as usize,
            self.inc.offsets[v as usize + 1] as usize,
        );
        for idx in lo..hi {
            let e = self.inc.ids[idx] as usize;
            let cnt = self.counts[e];
            if cnt[c] == 1 && cnt[o] > 0 {
                for i in 0..self.k {
                    let w = self.edges[e * self.k + i];
                    self.active[w as usize] += 1;
                }
            }
            self.counts[e][c] -= 1;
        }
        self.colour[v as usize] = UNSET;
    }

    fn propagate(&mut self) -> bool {
        while let Some((v, c)) = self.queue.pop() {
            let cur = self.colour[v as usize];
            if cur == c {
                continue;
            }
            if cur != UNSET {
                self.queue.clear();
                return false;
            }
            self.stats.propagations += 1;
            if !self.assign(v, c) {
                self.queue.clear();
                return false;
            }
        }
        true
    }

    fn pick(&self) -> Option<u32> {
        let mut best: Option<(u32, u32)> = None;
        for (v, &c) in self.colour.iter().enumerate() {
            if c == UNSET {
                let a = self.active[v];
                if best.is_none_or(|(_, ba)| a > ba) {
                    best = Some((v as u32, a));
                }
            }
        }
        best.map(|(v, _)| v)
    }

    fn undo_to(&mut self, pos: usize) {
        while self.trail.len() > pos {
            let v = self.trail.pop().expect("nonempty trail");
            self.unassign(v);
        }
    }

    fn backtrack(&mut self) -> bool {
        while let Some(lv) = self.levels.pop() {
            self.undo_to(lv.trail_pos);
            if !lv.flipped {
                self.levels.push(Level {
                    flipped: true,
                    ..lv
                });
                self.queue.push((lv.var, BLUE));
                return true;
            }
        }
        false
    }

    /// Runs the search; `on_solution` returns false to stop. Returns whether
    /// any solution was seen.
    fn run(&mut self, mut on_solution: impl FnMut(&[i8]) -> bool) -> bool {
        self.stats.nodes += 1;
        let mut found = false;
        loop {
            if self.propagate() {
                match self.pick() {
                    None => {
                        found = true;
                        if !on_solution(&self.colour) || !self.backtrack() {
                            return found;
                        }
                    }
                    Some(v) => {
                        self.stats.nodes += 1;
                        self.levels.push(Level {
                            trail_pos: self.trail.len(),
                            var: v,
                            flipped: false,
                        });
                        self.queue.push((v, RED));
                    }
                }
            } else {
                self.stats.conflicts += 1;
                if !self.backtrack() {
                    return found;
                }
            }
        }
    }
}

/// Peels vertices of degree at most one; returns the removal order with each
/// vertex's last surviving edge, plus the alive flags of edges.
fn peel(m: usize, k: usize, edges: &[u32]) -> (Vec<(u32, Option<u32>)>, Vec<bool>) {
    let inc = Incidence::new(m, k, edges);
    let ne = edges.len() / k;
    let mut edge_alive = vec![true; ne];
    let mut deg: Vec<u32> = (0..m).map(|v| inc.of(v).len() as u32).collect();
    let mut removed = vec![false; m];
    let mut stack: Vec<u32> = (0..m as u32).filter(|&v| deg[v as usize] <= 1).collect();
    let mut order = Vec::new();
    while let Some(v) = stack.pop() {
        if removed[v as usize] || deg[v as usize] > 1 {
            continue;
        }
        removed[v as usize] = true;
        let last = inc
            .of(v as usize)
            .iter()
            .copied()
            .find(|&e| edge_alive[e as usize]);
        if let Some(e) = last {
            edge_alive[e as usize] = false;
            for &w in &edges[e as usize * k..(e as usize + 1) * k] {
                deg[w as usize] -= 1;
                if !removed[w as usize] && deg[w as usize] <= 1 {
                    stack.push(w);
                }
            }
        }
        order.push((v, last));
    }
    (order, edge_alive)
}

fn components(
    m: usize,
    k: usize,
    edges: &[u32],
    alive: &[bool],
    in_core: &[bool],
) -> Vec<Vec<u32>> {
    let mut parent: Vec<u32> = (0..m as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    for (e, _) in alive.iter().enumerate().filter(|(_, &a)| a) {
        let vs = &edges[e * k..(e + 1) * k];
        let r0 = find(&mut parent, vs[0]);
        for &w in &vs[1..] {
            let r = find(&mut parent, w);
            if r != r0 {
                parent[r as usize] = r0;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    for v in 0..m as u32 {
        if in_core[v as usize] {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
    }
    let mut out: Vec<Vec<u32>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// Returns a colouring of `a` with no monochromatic k-AP inside `a`, if one
/// exists. Deterministic in `a`.
pub fn find_ap_free_colouring<F: ApFamily + ?Sized>(
    a: &GroundSubset,
    fam: &F,
) -> Result<(Option<TwoColouring>, SearchStats)> {
    let t0 = Instant::now();
    let hg = LocalHypergraph::build(a, fam)?;
    let m = hg.num_vertices();
    let k = hg.k;
    let mut stats = SearchStats {
        nodes: 1,
        ..Default::default()
    };
    let mut colour = vec![UNSET; m];

    let (order, alive) = peel(m, k, &hg.edges);
    let mut in_core = vec![true; m];
    for &(v, _) in &order {
        in_core[v as usize] = false;
    }
    for comp in components(m, k, &hg.edges, &alive, &in_core) {
        let mut local = vec![u32::MAX; m];
        for (i, &v) in comp.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let mut sub_edges = Vec::new();
        for e in (0..hg.num_edges()).filter(|&e| alive[e]) {
            let vs = hg.edge(e);
            if local[vs[0] as usize] != u32::MAX {
                sub_edges.extend(vs.iter().map(|&v| local[v as usize]));
            }
        }
        let mut search = Search::new(comp.len(), k, sub_edges);
        search.queue.push((0, RED));
        let mut solution = None;
        search.run(|c| {
            solution = Some(c.to_vec());
            false
        });
        stats.absorb(&search.stats);
        match solution {
            Some(sol) => {
                for (i, &v) in comp.iter().enumerate() {
                    colour[v as usize] = sol[i];
                }
            }
            None => {
                stats.wall_time = t0.elapsed();
                return Ok((None, stats));
            }
        }
    }
    for &(v, last) in order.iter().rev() {
        let c = match last {
            None => RED,
            Some(e) => {
                let others: Vec<i8> = hg
                    .edge(e as usize)
                    .iter()
                    .filter(|&&w| w != v)
                    .map(|&w| colour[w as usize])
                    .collect();
                debug_assert!(others.iter().all(|&c| c != UNSET));
                if others.iter().all(|&c| c == others[0]) {
                    1 - others[0]
                } else {
                    RED
                }
            }
        };
        colour[v as usize] = c;
    }
    let blue = GroundSubset::from_members(
        a.modulus(),
        hg.members
            .iter()
            .zip(&colour)
            .filter(|(_, &c)| c == BLUE)
            .map(|(&v, _)| v),
    )?;
    stats.wall_time = t0.elapsed();
    Ok((Some(TwoColouring::new(a.clone(), blue)?), stats))
}

/// `A -> (k-AP)_2`: every 2-colouring of `A` has a monochromatic k-AP.
pub fn is_ramsey<F: ApFamily + ?Sized>(a: &GroundSubset, fam: &F) -> Result<bool> {
    Ok(find_ap_free_colouring(a, fam)?.0.is_none())
}

pub const BRUTE_FORCE_LIMIT: usize = 30;

/// Exhaustive scan of all `2^|A|` colourings.
pub fn brute_force_is_ramsey<F: ApFamily + ?Sized>(a: &GroundSubset, fam: &F) -> Result<bool> {
    if a.len() > BRUTE_FORCE_LIMIT {
        return Err(VdwError::Guard {
            what: "|A|",
            actual: a.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let hg = LocalHypergraph::build(a, fam)?;
    let masks: Vec<u32> = (0..hg.num_edges())
        .map(|e| hg.edge(e).iter().fold(0u32, |acc, &v| acc | (1 << v)))
        .collect();
    let total: u64 = 1u64 << hg.num_vertices();
    for col in 0..total {
        let col = col as u32;
        if masks.iter().all(|&m| m & col != 0 && m & !col != 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColouringEnumeration {
    pub colourings: Vec<TwoColouring>,
    pub truncated: bool,
}

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// All k-AP-free colourings of `a` (no symmetry breaking), at most `cap`.
pub fn enumerate_ap_free_colourings<F: ApFamily + ?Sized>(
    a: &GroundSubset,
    fam: &F,
    cap: usize,
) -> Result<ColouringEnumeration> {
    let hg = LocalHypergraph::build(a, fam)?;
    let mut search = Search::new(hg.num_vertices(), hg.k, hg.edges.clone());
    let mut raw: Vec<Vec<i8>> = Vec::new();
    let mut truncated = false;
    search.run(|c| {
        if raw.len() == cap {
            truncated = true;
            return false;
        }
        raw.push(c.to_vec());
        true
    });
    let colourings = raw
        .into_iter()
        .map(|c| {
            let blue = GroundSubset::from_members(
                a.modulus(),
                hg.members
                    .iter()
                    .zip(&c)
                    .filter(|(_, &x)| x == BLUE)
                    .map(|(&v, _)| v),
            )?;
            TwoColouring::new(a.clone(), blue)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ColouringEnumeration {
        colourings,
        truncated,
    })
}

/// `Z -/->`, `B -/->`, and `Z ∪ B ->`.
pub fn is_interacting_pair<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    fam: &F,
) -> Result<bool> {
    if is_ramsey(z, fam)? || is_ramsey(b, fam)? {
        return Ok(false);
    }
    is_ramsey(&z.union(b)?, fam)
}

/// `{x : Z ∪ (B+x) -> (k-AP)_2}` for `Z`, `B` that are not Ramsey themselves.
pub fn interacting_translates<F: ApFamily + ?Sized>(
    z: &GroundSubset,
    b: &GroundSubset,
    fam: &F,
) -> Result<GroundSubset> {
    check_modulus(z.modulus(), b.modulus())?;
    check_modulus(fam.n(), z.modulus())?;
    if is_ramsey(z, fam)? {
        return Err(VdwError::Precondition("Z -> (k-AP)_2".into()));
    }
    if is_ramsey(b, fam)? {
        return Err(VdwError::Precondition("B -> (k-AP)_2".into()));
    }
    let n = z.modulus();
    let hits: Vec<u32> = (0..n as u32)
        .into_par_iter()
        .map(|x| -> Result<Option<u32>> {
            let u = z.union(&b.translate(x))?;
            Ok(is_ramsey(&u, fam)?.then_some(x))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    GroundSubset::from_members(n, hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::enumerate_aps;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(n: usize, xs: &[u32]) -> GroundSubset {
        GroundSubset::from_members(n, xs.iter().copied()).unwrap()
    }

    fn random_subset(rng: &mut ChaCha8Rng, n: usize, p: f64) -> GroundSubset {
        GroundSubset::from_members(n, (0..n as u32).filter(|_| rng.gen::<f64>() < p)).unwrap()
    }

    #[test]
    fn empty_set_has_empty_colouring() {
        let c = enumerate_aps(9, 3).unwrap();
        let (col, stats) = find_ap_free_colouring(&GroundSubset::empty(9), &c).unwrap();
        assert!(col.unwrap().domain().is_empty());
        assert!(stats.nodes >= 1);
        assert!(!is_ramsey(&GroundSubset::empty(9), &c).unwrap());
        assert!(!brute_force_is_ramsey(&GroundSubset::empty(9), &c).unwrap());
    }

    #[test]
    fn single_edge_is_colourable() {
        let c = enumerate_aps(9, 3).unwrap();
        let a = set(9, &[0, 1, 2]);
        let col = find_ap_free_colouring(&a, &c).unwrap().0.unwrap();
        assert!(col.is_ap_free(&c).unwrap());
        assert!(!is_ramsey(&a, &c).unwrap());
        assert!(!brute_force_is_ramsey(&a, &c).unwrap());
    }

    #[test]
    fn full_z9_is_ramsey() {
        let c = enumerate_aps(9, 3).unwrap();
        let a = GroundSubset::full(9);
        assert!(find_ap_free_colouring(&a, &c).unwrap().0.is_none());
        assert!(is_ramsey(&a, &c).unwrap());
        assert!(brute_force_is_ramsey(&a, &c).unwrap());
    }

    #[test]
    fn brute_force_guard() {
        let c = crate::cyclic::ApSpace::new(40, 3).unwrap();
        assert!(matches!(
            brute_force_is_ramsey(&GroundSubset::full(40), &c),
            Err(VdwError::Guard { .. })
        ));
    }

    #[test]
    fn enumeration_counts() {
        let c = enumerate_aps(9, 3).unwrap();
        let e = enumerate_ap_free_colourings(&GroundSubset::empty(9), &c, 10).unwrap();
        assert_eq!(e.colourings.len(), 1);
        let e = enumerate_ap_free_colourings(&set(9, &[0]), &c, 10).unwrap();
        assert_eq!(e.colourings.len(), 2);
        let e = enumerate_ap_free_colourings(&set(9, &[0, 1, 2]), &c, 10).unwrap();
        assert_eq!(e.colourings.len(), 6);
        assert!(!e.truncated);
        let e = enumerate_ap_free_colourings(&set(9, &[0, 1, 2]), &c, 4).unwrap();
        assert_eq!(e.colourings.len(), 4);
        assert!(e.truncated);
        let e = enumerate_ap_free_colourings(&set(9, &[0, 1, 2]), &c, 6).unwrap();
        assert!(!e.truncated);
    }

    #[test]
    fn enumeration_matches_exhaustive_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = enumerate_aps(14, 3).unwrap();
        for _ in 0..30 {
            let a = random_subset(&mut rng, 14, 0.6);
            let members = a.to_vec();
            let edges = c.aps_within(&a).unwrap();
            let mut count = 0;
            for mask in 0u32..(1 << members.len()) {
                let blue = |v: u32| mask >> members.iter().position(|&m| m == v).unwrap() & 1;
                if edges.iter().all(|e| {
                    let s: u32 = e.iter().map(|&v| blue(v)).sum();
                    s != 0 && s as usize != e.len()
                }) {
                    count += 1;
                }
            }
            let en = enumerate_ap_free_colourings(&a, &c, 1 << 20).unwrap();
            assert_eq!(en.colourings.len(), count);
            for col in &en.colourings {
                assert!(col.is_ap_free(&c).unwrap());
            }
        }
    }

    #[test]
    fn decider_matches_oracle_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, k) in [(18, 3), (20, 4), (16, 3)] {
            let c = enumerate_aps(n, k).unwrap();
            for i in 0..150 {
                let p = 0.2 + 0.5 * (i as f64 / 150.0);
                let a = random_subset(&mut rng, n, p);
                let (col, _) = find_ap_free_colouring(&a, &c).unwrap();
                assert_eq!(
                    col.is_none(),
                    brute_force_is_ramsey(&a, &c).unwrap(),
                    "{a:?}"
                );
                if let Some(col) = col {
                    assert!(col.is_ap_free(&c).unwrap());
                }
            }
        }
    }

    #[test]
    fn monotone_and_translation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = enumerate_aps(20, 3).unwrap();
        for _ in 0..100 {
            let a = random_subset(&mut rng, 20, 0.4);
            let extra = random_subset(&mut rng, 20, 0.3);
            let big = a.union(&extra).unwrap();
            if is_ramsey(&a, &c).unwrap() {
                assert!(is_ramsey(&big, &c).unwrap());
            }
            let x = rng.gen_range(0..20);
            assert_eq!(
                is_ramsey(&a, &c).unwrap(),
                is_ramsey(&a.translate(x), &c).unwrap()
            );
        }
    }

    #[test]
    fn interacting_pair_definition() {
        let c = enumerate_aps(9, 3).unwrap();
        let e = GroundSubset::empty(9);
        assert!(!is_interacting_pair(&e, &e, &c).unwrap());
        let z = GroundSubset::full(9).difference(&set(9, &[0])).unwrap();
        let b = set(9, &[0]);
        let expect = !brute_force_is_ramsey(&z, &c).unwrap()
            && !brute_force_is_ramsey(&b, &c).unwrap()
            && brute_force_is_ramsey(&GroundSubset::full(9), &c).unwrap();
        assert_eq!(is_interacting_pair(&z, &b, &c).unwrap(), expect);
        // a Ramsey Z is never interacting
        assert!(!is_interacting_pair(&GroundSubset::full(9), &b, &c).unwrap());
    }

    #[test]
    fn interacting_translates_checks() {
        let c = enumerate_aps(12, 3).unwrap();
        let z = set(12, &[0, 1, 3, 4, 6, 9]);
        let b = set(12, &[2, 5, 7]);
        let xs = interacting_translates(&z, &b, &c).unwrap();
        for x in 0..12u32 {
            let expect = brute_force_is_ramsey(&z.union(&b.translate(x)).unwrap(), &c).unwrap();
            assert_eq!(xs.contains(x), expect, "x={x}");
        }
        // B -> B + y shifts X* by -y
        let y = 5;
        let shifted = interacting_translates(&z, &b.translate(y), &c).unwrap();
        assert_eq!(shifted, xs.translate(12 - y));
        assert!(interacting_translates(&z, &GroundSubset::empty(12), &c)
            .unwrap()
            .is_empty());
        assert!(matches!(
            interacting_translates(&GroundSubset::full(12), &b, &c),
            Err(VdwError::Precondition(_))
        ));
    }
}
