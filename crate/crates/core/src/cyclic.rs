//! Arithmetic in `Z/nZ` and the hypergraph of k-term arithmetic progressions.
//!
//! An edge is the *set* of `k` pairwise distinct residues
//! `{a, a+d, .., a+(k-1)d}`; differences whose additive order is below `k`
//! produce repeated residues and are discarded. Edges are stored with their
//! residues sorted ascending.

use std::io::Write;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{check_modulus, Result, VdwError};
use crate::subset::GroundSubset;

/// Sorted k-element residue set.
pub type Edge = SmallVec<[u32; 8]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicIndex {
    value: u32,
    modulus: u32,
}

impl CyclicIndex {
    pub fn new(value: i64, modulus: u32) -> Result<Self> {
        if modulus == 0 {
            return Err(VdwError::Param("modulus must be at least 1".into()));
        }
        Ok(Self {
            value: value.rem_euclid(modulus as i64) as u32,
            modulus,
        })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn scale(self, t: i64) -> Self {
        let m = self.modulus as i64;
        Self {
            value: ((self.value as i64 * t.rem_euclid(m)) % m) as u32,
            modulus: self.modulus,
        }
    }

    /// Additive order of this residue.
    pub fn order(self) -> u32 {
        self.modulus / gcd(self.value as u64, self.modulus as u64) as u32
    }

    pub fn neg(self) -> Self {
        Self {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Add for CyclicIndex {
    type Output = CyclicIndex;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let m = self.modulus as u64;
        Self {
            value: ((self.value as u64 + rhs.value as u64) % m) as u32,
            modulus: self.modulus,
        }
    }
}

impl Sub for CyclicIndex {
    type Output = CyclicIndex;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.neg()
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m))
}

/// A k-term progression stored in its canonical representation: the
/// lexicographically smallest `(start, diff)` that generates the same set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArithmeticProgression {
    elements: Vec<u32>,
    start: u32,
    diff: u32,
    modulus: u32,
}

impl ArithmeticProgression {
    pub fn new(start: i64, diff: i64, k: usize, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(VdwError::Param("modulus must be at least 1".into()));
        }
        let d = CyclicIndex::new(diff, n)?;
        if d.value() == 0 {
            return Err(VdwError::Param("difference must be nonzero".into()));
        }
        if (d.order() as usize) < k {
            return Err(VdwError::Param(format!(
                "difference {} has order {} < k = {k}; elements repeat",
                d.value(),
                d.order()
            )));
        }
        let s = CyclicIndex::new(start, n)?;
        let mut set: Vec<u32> = (0..k).map(|t| (s + d.scale(t as i64)).value()).collect();
        set.sort_unstable();
        let (start, diff) = canonical_rep(&set, n);
        let elements = (0..k as u64)
            .map(|t| ((start as u64 + t * diff as u64) % n as u64) as u32)
            .collect();
        Ok(Self {
            elements,
            start,
            diff,
            modulus: n,
        })
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn diff(&self) -> u32 {
        self.diff
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_set(&self) -> Edge {
        let mut e: Edge = self.elements.iter().copied().collect();
        e.sort_unstable();
        e
    }
}

fn canonical_rep(sorted: &[u32], n: u32) -> (u32, u32) {
    let k = sorted.len();
    let mut best: Option<(u32, u32)> = None;
    for &s in sorted {
        for &e in sorted {
            if e == s {
                continue;
            }
            let d = (e + n - s) % n;
            let mut gen: SmallVec<[u32; 8]> = (0..k as u64)
                .map(|t| ((s as u64 + t * d as u64) % n as u64) as u32)
                .collect();
            gen.sort_unstable();
            if gen.as_slice() == sorted && best.is_none_or(|b| (s, d) < b) {
                best = Some((s, d));
            }
        }
    }
    best.expect("set is an arithmetic progression")
}

/// The implicit family of all k-APs of `Z/nZ`, answered arithmetically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApSpace {
    n: usize,
    k: usize,
}

impl ApSpace {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(VdwError::Param("n must be at least 1".into()));
        }
        if k < 3 {
            return Err(VdwError::Param(format!("k must be at least 3, got {k}")));
        }
        if n > u32::MAX as usize / 2 {
            return Err(VdwError::Param(format!("n = {n} too large")));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// All k-AP sets containing both `a` and `b` (deduplicated, sorted).
    pub fn aps_through_pair(&self, a: u32, b: u32) -> SmallVec<[Edge; 16]> {
        let mut found: SmallVec<[Edge; 16]> = SmallVec::new();
        let n = self.n as i64;
        let k = self.k;
        if a == b || k > self.n {
            return found;
        }
        let delta = (b as i64 - a as i64).rem_euclid(n);
        for i in 0..k - 1 {
            for j in i + 1..k {
                let m = (j - i) as i64;
                let g = gcd(m as u64, n as u64) as i64;
                if delta % g != 0 {
                    continue;
                }
                let ng = n / g;
                let inv = mod_inverse((m / g).rem_euclid(ng), ng).expect("coprime");
                let d0 = ((delta / g) % ng * inv) % ng;
                for t in 0..g {
                    let d = d0 + t * ng;
                    if d == 0 || n / (gcd(d as u64, n as u64) as i64) < k as i64 {
                        continue;
                    }
                    let s = (a as i64 - i as i64 * d).rem_euclid(n);
                    let mut e: Edge = (0..k as i64).map(|t| ((s + t * d) % n) as u32).collect();
                    e.sort_unstable();
                    if !found.contains(&e) {
                        found.push(e);
                    }
                }
            }
        }
        found
    }

    /// All k-AP sets through `v`.
    pub fn aps_through(&self, v: u32) -> Vec<Edge> {
        let n = self.n as u64;
        let k = self.k;
        let mut out: Vec<Edge> = Vec::new();
        if k > self.n {
            return out;
        }
        for d in 1..n {
            if ((n / gcd(d, n)) as usize) < k {
                continue;
            }
            // d and n-d give the same sets; keep d <= n-d.
            if d > n - d {
                continue;
            }
            for pos in 0..k as u64 {
                let s = (v as u64 + n - (pos * d) % n) % n;
                let mut e: Edge = (0..k as u64).map(|t| ((s + t * d) % n) as u32).collect();
                e.sort_unstable();
                out.push(e);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_ap(&self, set: &[u32]) -> bool {
        if set.len() != self.k || set.iter().any(|&x| x as usize >= self.n) {
            return false;
        }
        let mut sorted: Edge = set.iter().copied().collect();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.k {
            return false;
        }
        self.aps_through_pair(sorted[0], sorted[1]).contains(&sorted)
    }

    /// Edges of `H_{A,k}`: every k-AP fully contained in `a`.
    pub fn aps_within(&self, a: &GroundSubset) -> Result<Vec<Edge>> {
        check_modulus(self.n, a.modulus())?;
        let members = a.to_vec();
        let mut out = Vec::new();
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                for e in self.aps_through_pair(x, y) {
                    // emit each edge once, from its two smallest residues
                    if e[0] == x && e[1] == y && a.contains_all(&e[2..]) {
                        out.push(e);
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Anything that answers k-AP queries over `Z/nZ`.
pub trait ApFamily: Sync {
    fn space(&self) -> ApSpace;

    fn n(&self) -> usize {
        self.space().n()
    }

    fn k(&self) -> usize {
        self.space().k()
    }

    fn aps_through_pair(&self, a: u32, b: u32) -> SmallVec<[Edge; 16]> {
        self.space().aps_through_pair(a, b)
    }

    fn aps_within(&self, a: &GroundSubset) -> Result<Vec<Edge>> {
        self.space().aps_within(a)
    }
}

impl ApFamily for ApSpace {
    fn space(&self) -> ApSpace {
        *self
    }
}

/// The explicit k-uniform hypergraph of all k-APs of `Z/nZ` with a
/// per-vertex incidence index.
#[derive(Clone, Debug)]
pub struct ApCatalog {
    space: ApSpace,
    edges: Vec<Edge>,
    incidence: Vec<Vec<u32>>,
}

/// Enumerates every k-AP set of `Z/nZ` exactly once.
pub fn enumerate_aps(n: usize, k: usize) -> Result<ApCatalog> {
    let space = ApSpace::new(n, k)?;
    let mut edges: Vec<Edge> = Vec::new();
    if k <= n {
        let nn = n as u64;
        for d in 1..=nn / 2 {
            if ((nn / gcd(d, nn)) as usize) < k {
                continue;
            }
            for s in 0..nn {
                let mut e: Edge = (0..k as u64).map(|t| ((s + t * d) % nn) as u32).collect();
                e.sort_unstable();
                edges.push(e);
            }
        }
        edges.sort_unstable();
        edges.dedup();
    }
    let mut incidence = vec![Vec::new(); n];
    for (id, e) in edges.iter().enumerate() {
        for &v in e {
            incidence[v as usize].push(id as u32);
        }
    }
    Ok(ApCatalog {
        space,
        edges,
        incidence,
    })
}

impl ApCatalog {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Ids of edges through `v`.
    pub fn incident(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn edge(&self, id: u32) -> &Edge {
        &self.edges[id as usize]
    }

    /// Position of an edge in the catalog, if present.
    pub fn edge_id(&self, e: &[u32]) -> Option<u32> {
        self.edges
            .binary_search_by(|x| x.as_slice().cmp(e))
            .ok()
            .map(|i| i as u32)
    }

    /// One sorted JSON array per line.
    pub fn write_json_lines<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.edges {
            serde_json::to_writer(&mut w, e.as_slice())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

impl ApFamily for ApCatalog {
    fn space(&self) -> ApSpace {
        self.space
    }

    /// Filters the explicit edge list by containment.
    fn aps_within(&self, a: &GroundSubset) -> Result<Vec<Edge>> {
        check_modulus(self.space.n(), a.modulus())?;
        Ok(self
            .edges
            .iter()
            .filter(|e| a.contains_all(e))
            .cloned()
            .collect())
    }
}

/// `{a + x mod n : a in A}`.
pub fn translate(a: &GroundSubset, x: CyclicIndex) -> Result<GroundSubset> {
    check_modulus(a.modulus(), x.modulus() as usize)?;
    Ok(a.translate(x.value()))
}
