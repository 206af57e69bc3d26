//! Uniform hypergraphs, a fingerprint/container construction for their
//! independent sets, and the core families derived from it.
//!
//! The container procedure is a max-degree scythe. Starting from the full
//! vertex set `A` and an empty fingerprint `S`, it repeatedly takes the
//! vertex `v ∈ A` of largest degree among edges inside `A ∪ S` (smallest id
//! on ties). If `v ∈ I` it joins `S` and every `w ∈ A` completing an edge
//! with `S` is pruned; otherwise `v` is discarded. The run stops once `A`
//! leaves the family `F = {A : |A| >= m/2, e(H[A]) >= e(H)/2}` and at least
//! `margin` vertices lie outside `A ∪ S`, or when `A` is empty. Every
//! decision depends only on `S`, so replaying the run with `S` in place of
//! `I` reproduces the final `A`, which is the container `f(S)`.

use std::collections::HashMap;
use std::io::BufRead;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VdwError};
use crate::subset::GroundSubset;

/// Largest vertex count handled by the mask-based routines.
pub const MASK_LIMIT: usize = 64;
/// Largest vertex count for exhaustive enumeration of independent or
/// hitting sets.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformHypergraph {
    m: usize,
    ell: usize,
    edges: Vec<Vec<u32>>,
}

impl UniformHypergraph {
    /// Edges are sorted internally; duplicates and wrong sizes are errors.
    pub fn new(m: usize, ell: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        if ell == 0 {
            return Err(VdwError::Param("uniformity must be at least 1".into()));
        }
        let mut out = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.len() != ell {
                return Err(VdwError::Param(format!("edge {e:?} is not of size {ell}")));
            }
            if let Some(&v) = e.iter().find(|&&v| v as usize >= m) {
                return Err(VdwError::Param(format!("vertex {v} outside 0..{m}")));
            }
            out.push(e);
        }
        out.sort_unstable();
        let before = out.len();
        out.dedup();
        if out.len() != before {
            return Err(VdwError::Param("duplicate edges".into()));
        }
        Ok(Self { m, ell, edges: out })
    }

    /// Each `ell`-subset of `0..m` kept independently with probability `q`.
    pub fn random<R: Rng>(m: usize, ell: usize, q: f64, rng: &mut R) -> Result<Self> {
        let mut edges = Vec::new();
        let mut cur: Vec<u32> = (0..ell as u32).collect();
        if ell <= m {
            loop {
                if rng.gen::<f64>() < q {
                    edges.push(cur.clone());
                }
                // next combination in lexicographic order
                let mut i = ell;
                while i > 0 && cur[i - 1] as usize == m - ell + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                cur[i - 1] += 1;
                for j in i..ell {
                    cur[j] = cur[j - 1] + 1;
                }
            }
        }
        Self::new(m, ell, edges)
    }

    /// One JSON array of vertex ids per line; `m` is one past the largest id
    /// unless given.
    pub fn read_json_lines<R: BufRead>(reader: R, m: Option<usize>) -> Result<Self> {
        let mut edges: Vec<Vec<u32>> = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            edges.push(serde_json::from_str(&line)?);
        }
        let ell = edges.first().map(|e| e.len()).unwrap_or(1);
        let m = m.unwrap_or_else(|| {
            edges
                .iter()
                .flatten()
                .map(|&v| v as usize + 1)
                .max()
                .unwrap_or(0)
        });
        Self::new(m, ell, edges)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.m];
        for e in &self.edges {
            for &v in e {
                d[v as usize] += 1;
            }
        }
        d
    }

    /// `Δ_t`: the largest number of edges containing a common `t`-set.
    pub fn max_t_degree(&self, t: usize) -> usize {
        if t == 0 {
            return self.e();
        }
        if t > self.ell {
            return 0;
        }
        if t == 1 {
            return self.degrees().into_iter().max().unwrap_or(0);
        }
        let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
        for e in &self.edges {
            for_each_subset(e, t, &mut |s| *counts.entry(s.to_vec()).or_default() += 1);
        }
        counts.into_values().max().unwrap_or(0)
    }

    /// Edges fully inside `set`.
    pub fn edges_within(&self, set: &GroundSubset) -> usize {
        self.edges.iter().filter(|e| set.contains_all(e)).count()
    }

    fn masks(&self) -> Result<Masked> {
        if self.m > MASK_LIMIT {
            return Err(VdwError::Guard {
                what: "vertex count",
                actual: self.m,
                limit: MASK_LIMIT,
            });
        }
        let edges: Vec<u64> = self
            .edges
            .iter()
            .map(|e| e.iter().fold(0u64, |acc, &v| acc | (1 << v)))
            .collect();
        Ok(Masked { m: self.m, edges })
    }
}

fn for_each_subset(items: &[u32], t: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(items: &[u32], t: usize, start: usize, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if cur.len() == t {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, t, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, t, 0, &mut Vec::with_capacity(t), f);
}

struct Masked {
    m: usize,
    edges: Vec<u64>,
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

fn mask_to_vec(mask: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut w = mask;
    while w != 0 {
        out.push(w.trailing_zeros());
        w &= w - 1;
    }
    out
}

fn vec_to_mask(v: &[u32]) -> u64 {
    v.iter().fold(0u64, |acc, &x| acc | (1 << x))
}

impl Masked {
    fn edges_within(&self, set: u64) -> usize {
        self.edges.iter().filter(|&&e| e & !set == 0).count()
    }

    fn is_independent(&self, set: u64) -> bool {
        self.edges.iter().all(|&e| e & !set != 0)
    }

    fn outside_family(&self, set: u64) -> bool {
        2 * (set.count_ones() as usize) < self.m || 2 * self.edges_within(set) < self.edges.len()
    }

    /// The scythe run; returns `(S, A)` at the stopping point.
    fn scythe(&self, margin: usize, member: impl Fn(u32) -> bool) -> (u64, u64) {
        let mut a = full_mask(self.m);
        let mut s = 0u64;
        let mut deg = vec![0u32; self.m];
        let done = |a: u64, s: u64| {
            a == 0 || (self.outside_family(a) && (a | s).count_ones() as usize + margin <= self.m)
        };
        while !done(a, s) {
            deg.iter_mut().for_each(|d| *d = 0);
            let alive = a | s;
            for &e in &self.edges {
                if e & !alive == 0 {
                    let mut w = e & a;
                    while w != 0 {
                        deg[w.trailing_zeros() as usize] += 1;
                        w &= w - 1;
                    }
                }
            }
            let mut best = u32::MAX;
            let mut w = a;
            while w != 0 {
                let v = w.trailing_zeros();
                w &= w - 1;
                if best == u32::MAX || deg[v as usize] > deg[best as usize] {
                    best = v;
                }
            }
            let bit = 1u64 << best;
            a &= !bit;
            if member(best) {
                s |= bit;
                for &e in &self.edges {
                    let rest = e & !s;
                    if rest.count_ones() == 1 {
                        a &= !rest;
                    }
                }
            }
        }
        (s, a)
    }

    /// Independent sets, in increasing mask order.
    fn independent_sets(&self) -> Vec<u64> {
        let mut by_top: Vec<Vec<u64>> = vec![Vec::new(); self.m];
        for &e in &self.edges {
            by_top[63 - e.leading_zeros() as usize].push(e);
        }
        let mut out = Vec::new();
        fn rec(v: usize, mask: u64, m: usize, by_top: &[Vec<u64>], out: &mut Vec<u64>) {
            if v == m {
                out.push(mask);
                return;
            }
            rec(v + 1, mask, m, by_top, out);
            let with = mask | (1 << v);
            if by_top[v].iter().all(|&e| e & !with != 0) {
                rec(v + 1, with, m, by_top, out);
            }
        }
        rec(0, 0, self.m, &by_top, &mut out);
        out.sort_unstable();
        out
    }
}

fn exhaustive_guard(h: &UniformHypergraph) -> Result<()> {
    if h.m() > EXHAUSTIVE_LIMIT {
        return Err(VdwError::Guard {
            what: "vertex count",
            actual: h.m(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    Ok(())
}

/// `g(I)` for one independent set (any `m <= 64`).
pub fn fingerprint(
    h: &UniformHypergraph,
    independent: &GroundSubset,
    margin: usize,
) -> Result<GroundSubset> {
    let mk = h.masks()?;
    let i = vec_to_mask(&independent.to_vec());
    if !mk.is_independent(i) {
        return Err(VdwError::Precondition("set is not independent".into()));
    }
    if h.e() == 0 {
        return Ok(GroundSubset::empty(h.m()));
    }
    let (s, _) = mk.scythe(margin, |v| i >> v & 1 == 1);
    GroundSubset::from_members(h.m(), mask_to_vec(s))
}

/// `f(S)`: the container reconstructed from a fingerprint alone.
pub fn container_of(
    h: &UniformHypergraph,
    fp: &GroundSubset,
    margin: usize,
) -> Result<GroundSubset> {
    let mk = h.masks()?;
    if h.e() == 0 {
        return Ok(GroundSubset::full(h.m()));
    }
    let s = vec_to_mask(&fp.to_vec());
    let (_, a) = mk.scythe(margin, |v| s >> v & 1 == 1);
    GroundSubset::from_members(h.m(), mask_to_vec(a))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeCondition {
    pub t: usize,
    pub delta_t: usize,
    /// `c p^{t-1} e(H) / v(H)`.
    pub bound: f64,
    pub ok: bool,
}

pub fn degree_conditions(h: &UniformHypergraph, p: f64, c: f64) -> Vec<DegreeCondition> {
    let avg = if h.m() == 0 {
        0.0
    } else {
        h.e() as f64 / h.m() as f64
    };
    (1..=h.ell())
        .map(|t| {
            let delta_t = h.max_t_degree(t);
            let bound = c * p.powi(t as i32 - 1) * avg;
            DegreeCondition {
                t,
                delta_t,
                bound,
                ok: delta_t as f64 <= bound * (1.0 + 1e-12),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub set: Vec<u32>,
    pub container: Vec<u32>,
    /// `f(S)` has fewer than `m/2` vertices or spans fewer than `e(H)/2`
    /// edges.
    pub outside_family: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContainerCertificate {
    pub m: usize,
    pub ell: usize,
    pub p: f64,
    pub c: f64,
    /// Smallest constant with `|g(I)| <= c' p v(H)` on every enumerated `I`.
    pub c_prime: f64,
    pub max_fingerprint: usize,
    pub edgeless: bool,
    pub margin: usize,
    pub degree_conditions: Vec<DegreeCondition>,
    pub conforming: bool,
    pub fingerprints: Vec<Fingerprint>,
    /// `(I, index of g(I))` as vertex masks, sorted by mask.
    pub assignments: Vec<(u64, u32)>,
}

impl ContainerCertificate {
    pub fn g(&self, independent: u64) -> Option<&Fingerprint> {
        let i = self
            .assignments
            .binary_search_by_key(&independent, |a| a.0)
            .ok()?;
        self.fingerprints.get(self.assignments[i].1 as usize)
    }

    pub fn containers_outside_family(&self) -> usize {
        self.fingerprints
            .iter()
            .filter(|f| f.outside_family)
            .count()
    }
}

/// Certificate over every independent set of `h` (`m <= 20`).
pub fn build_containers(h: &UniformHypergraph, p: f64, c: f64) -> Result<ContainerCertificate> {
    build_containers_with_margin(h, p, c, 0)
}

/// As [`build_containers`], but each run also leaves at least `margin`
/// vertices outside `S ∪ f(S)` whenever the independent set allows it.
pub fn build_containers_with_margin(
    h: &UniformHypergraph,
    p: f64,
    c: f64,
    margin: usize,
) -> Result<ContainerCertificate> {
    exhaustive_guard(h)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(VdwError::Param(format!("p = {p} outside (0, 1]")));
    }
    let mk = h.masks()?;
    let degree_conditions = degree_conditions(h, p, c);
    let conforming = degree_conditions.iter().all(|d| d.ok);
    let edgeless = h.e() == 0;
    let mut index: HashMap<u64, u32> = HashMap::new();
    let mut fingerprints = Vec::new();
    let mut assignments = Vec::new();
    for i in mk.independent_sets() {
        let s = if edgeless {
            0
        } else {
            mk.scythe(margin, |v| i >> v & 1 == 1).0
        };
        let id = *index.entry(s).or_insert_with(|| {
            let a = if edgeless {
                full_mask(h.m())
            } else {
                mk.scythe(margin, |v| s >> v & 1 == 1).1
            };
            fingerprints.push(Fingerprint {
                set: mask_to_vec(s),
                container: mask_to_vec(a),
                outside_family: mk.outside_family(a),
            });
            (fingerprints.len() - 1) as u32
        });
        assignments.push((i, id));
    }
    let max_fingerprint = fingerprints.iter().map(|f| f.set.len()).max().unwrap_or(0);
    let c_prime = if h.m() == 0 {
        0.0
    } else {
        max_fingerprint as f64 / (p * h.m() as f64)
    };
    Ok(ContainerCertificate {
        m: h.m(),
        ell: h.ell(),
        p,
        c,
        c_prime,
        max_fingerprint,
        edgeless,
        margin,
        degree_conditions,
        conforming,
        fingerprints,
        assignments,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateViolation {
    pub independent_set: Vec<u32>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateReport {
    pub passed: bool,
    pub checked: usize,
    pub containers_outside_family: usize,
    pub counterexample: Option<CertificateViolation>,
}

/// Checks `g(I) ⊆ I`, `I ∖ g(I) ⊆ f(g(I))` and the fingerprint size bound
/// on every independent set, enumerated afresh.
pub fn verify_certificate(
    h: &UniformHypergraph,
    cert: &ContainerCertificate,
) -> Result<CertificateReport> {
    exhaustive_guard(h)?;
    if cert.m != h.m() {
        return Err(VdwError::ModulusMismatch {
            expected: h.m(),
            found: cert.m,
        });
    }
    let mk = h.masks()?;
    let limit = cert.c_prime * cert.p * h.m() as f64 + 1e-9;
    let mut checked = 0;
    let fail = |i: u64, reason: &str, checked: usize| CertificateReport {
        passed: false,
        checked,
        containers_outside_family: cert.containers_outside_family(),
        counterexample: Some(CertificateViolation {
            independent_set: mask_to_vec(i),
            reason: reason.into(),
        }),
    };
    for i in mk.independent_sets() {
        checked += 1;
        let Some(fp) = cert.g(i) else {
            return Ok(fail(i, "no fingerprint assigned", checked));
        };
        let s = vec_to_mask(&fp.set);
        let f = vec_to_mask(&fp.container);
        if s & !i != 0 {
            return Ok(fail(i, "g(I) is not contained in I", checked));
        }
        if (i & !s) & !f != 0 {
            return Ok(fail(i, "I minus g(I) escapes f(g(I))", checked));
        }
        if fp.set.len() as f64 > limit {
            return Ok(fail(i, "fingerprint exceeds c' p v(H)", checked));
        }
    }
    Ok(CertificateReport {
        passed: true,
        checked,
        containers_outside_family: cert.containers_outside_family(),
        counterexample: None,
    })
}

/// Negative control: removes from one container a vertex it must hold.
/// `None` if every assigned independent set equals its fingerprint.
pub fn corrupt_certificate(cert: &ContainerCertificate) -> Option<ContainerCertificate> {
    let mut out = cert.clone();
    let &(i, id) = cert.assignments.iter().find(|(i, id)| {
        let fp = &cert.fingerprints[*id as usize];
        (i & !vec_to_mask(&fp.set)) != 0
    })?;
    let fp = &mut out.fingerprints[id as usize];
    let drop = mask_to_vec(i & !vec_to_mask(&fp.set))[0];
    fp.container.retain(|&v| v != drop);
    Some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreParams {
    pub k: usize,
    pub ell: usize,
    pub c0: f64,
    pub c1: f64,
}

impl CoreParams {
    /// The smallest `C0` and `C1` for which `h` meets the edge-count and
    /// degree hypotheses.
    pub fn from_instance(h: &UniformHypergraph, k: usize) -> Self {
        let m = h.m() as f64;
        let a = 1.0 / (k as f64 - 2.0);
        let c0 = h.e() as f64 / m.powf(1.0 + a);
        let d1 = h.max_t_degree(1) as f64 / m.powf(a);
        let d2 = if m > 1.0 {
            h.max_t_degree(2) as f64 / m.ln()
        } else {
            0.0
        };
        Self {
            k,
            ell: h.ell(),
            c0,
            c1: d1.max(d2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreHypotheses {
    pub edges_ok: bool,
    pub delta1_ok: bool,
    pub delta2_ok: bool,
}

impl CoreHypotheses {
    pub fn all(&self) -> bool {
        self.edges_ok && self.delta1_ok && self.delta2_ok
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoreFamily {
    pub cores: Vec<Vec<u32>>,
    pub m: usize,
    /// `min{1/4, C0 / (4 C1)}`.
    pub beta: f64,
    pub c_prime: f64,
    /// `1 - 1/((k-2)(l-1))`.
    pub t: f64,
    /// `m^{-1/((k-2)(l-1))}`.
    pub p: f64,
    /// `sum_{i=1}^{C' m^t} C(m, i)`.
    pub budget: f64,
    pub within_budget: bool,
    pub min_core: usize,
    pub hypotheses: CoreHypotheses,
    pub edgeless: bool,
    pub certificate: ContainerCertificate,
}

impl CoreFamily {
    pub fn all_large(&self) -> bool {
        self.min_core as f64 >= self.beta * self.m as f64 - 1e-9
    }
}

fn binomial(m: usize, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, j| acc * (m - j) as f64 / (j + 1) as f64)
}

/// Cores are the complements of `S ∪ f(S)` over the fingerprints in the
/// image of `g`.
pub fn cores_from_containers(h: &UniformHypergraph, params: &CoreParams) -> Result<CoreFamily> {
    let CoreParams { k, ell, c0, c1 } = *params;
    if ell < 2 {
        return Err(VdwError::Param(format!("l must be at least 2, got {ell}")));
    }
    if k < 3 {
        return Err(VdwError::Param(format!("k must be at least 3, got {k}")));
    }
    if !(c0 > 0.0) || !(c1 > 0.0) {
        return Err(VdwError::Param(format!(
            "need C0, C1 > 0, got ({c0}, {c1})"
        )));
    }
    if h.ell() != ell {
        return Err(VdwError::Param(format!(
            "hypergraph is {}-uniform, expected {ell}",
            h.ell()
        )));
    }
    let m = h.m();
    let mf = m as f64;
    let denom = (k as f64 - 2.0) * (ell as f64 - 1.0);
    let p = mf.powf(-1.0 / denom);
    let t = 1.0 - 1.0 / denom;
    let c = 1.0f64.max(c1 / c0);
    let beta = 0.25f64.min(c0 / (4.0 * c1));
    let margin = (beta * mf - 1e-9).ceil().max(0.0) as usize;
    let certificate = build_containers_with_margin(h, p, c, margin)?;
    let full = full_mask(m);
    let mut cores: Vec<Vec<u32>> = certificate
        .fingerprints
        .iter()
        .map(|f| mask_to_vec(full & !(vec_to_mask(&f.set) | vec_to_mask(&f.container))))
        .collect();
    cores.sort_unstable();
    cores.dedup();
    let top = (certificate.c_prime * mf.powf(t)).floor() as usize;
    let budget: f64 = (1..=top.min(m)).map(|i| binomial(m, i)).sum();
    let a = 1.0 / (k as f64 - 2.0);
    let hypotheses = CoreHypotheses {
        edges_ok: h.e() as f64 >= c0 * mf.powf(1.0 + a) * (1.0 - 1e-12),
        delta1_ok: h.max_t_degree(1) as f64 <= c1 * mf.powf(a) * (1.0 + 1e-12),
        delta2_ok: h.max_t_degree(2) as f64 <= c1 * mf.ln() * (1.0 + 1e-12),
    };
    let min_core = cores.iter().map(|c| c.len()).min().unwrap_or(0);
    Ok(CoreFamily {
        within_budget: cores.len() as f64 <= budget,
        m,
        beta,
        c_prime: certificate.c_prime,
        t,
        p,
        budget,
        min_core,
        hypotheses,
        edgeless: certificate.edgeless,
        cores,
        certificate,
    })
}

/// All hitting sets of `h`, or only the inclusion-minimal ones (`m <= 20`).
pub fn brute_force_hitting_sets(h: &UniformHypergraph, minimal: bool) -> Result<Vec<GroundSubset>> {
    exhaustive_guard(h)?;
    let mk = h.masks()?;
    let hits = |t: u64| mk.edges.iter().all(|&e| e & t != 0);
    let mut out = Vec::new();
    for t in 0..=full_mask(h.m()) {
        if !hits(t) {
            continue;
        }
        if minimal && mask_to_vec(t).iter().any(|&v| hits(t & !(1 << v))) {
            continue;
        }
        out.push(GroundSubset::from_members(h.m(), mask_to_vec(t))?);
    }
    Ok(out)
}

/// All independent sets of `h` (`m <= 20`).
pub fn independent_sets(h: &UniformHypergraph) -> Result<Vec<GroundSubset>> {
    exhaustive_guard(h)?;
    h.masks()?
        .independent_sets()
        .into_iter()
        .map(|i| GroundSubset::from_members(h.m(), mask_to_vec(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hg(m: usize, ell: usize, edges: &[&[u32]]) -> UniformHypergraph {
        UniformHypergraph::new(m, ell, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert!(UniformHypergraph::new(3, 2, vec![vec![0, 1, 2]]).is_err());
        assert!(UniformHypergraph::new(3, 2, vec![vec![0, 5]]).is_err());
        assert!(UniformHypergraph::new(3, 2, vec![vec![0, 1], vec![1, 0]]).is_err());
    }

    #[test]
    fn t_degrees() {
        let h = hg(5, 3, &[&[0, 1, 2], &[0, 1, 3], &[0, 3, 4]]);
        assert_eq!(h.max_t_degree(1), 3);
        assert_eq!(h.max_t_degree(2), 2);
        assert_eq!(h.max_t_degree(3), 1);
        assert_eq!(h.max_t_degree(4), 0);
    }

    #[test]
    fn random_hypergraph_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            UniformHypergraph::random(6, 3, 1.0, &mut rng).unwrap().e(),
            20
        );
        assert_eq!(
            UniformHypergraph::random(6, 3, 0.0, &mut rng).unwrap().e(),
            0
        );
        assert_eq!(
            UniformHypergraph::random(2, 3, 1.0, &mut rng).unwrap().e(),
            0
        );
    }

    #[test]
    fn json_lines_roundtrip() {
        let h =
            UniformHypergraph::read_json_lines("[0,1,2]\n[1,2,4]\n\n".as_bytes(), None).unwrap();
        assert_eq!((h.m(), h.ell(), h.e()), (5, 3, 2));
    }

    #[test]
    fn edgeless_single_container() {
        let h = hg(4, 2, &[]);
        let cert = build_containers(&h, 0.5, 1.0).unwrap();
        assert!(cert.edgeless);
        assert_eq!(cert.fingerprints.len(), 1);
        assert!(cert.fingerprints[0].set.is_empty());
        assert_eq!(cert.fingerprints[0].container, vec![0, 1, 2, 3]);
        assert_eq!(cert.assignments.len(), 16);
        assert!(verify_certificate(&h, &cert).unwrap().passed);
    }

    #[test]
    fn single_pair_edge() {
        let h = hg(3, 2, &[&[0, 1]]);
        assert_eq!(independent_sets(&h).unwrap().len(), 6);
        let cert = build_containers(&h, 0.5, 1.0).unwrap();
        let rep = verify_certificate(&h, &cert).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.checked, 6);
    }

    #[test]
    fn random_certificates_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = rng.gen_range(5..=12);
            let h = UniformHypergraph::random(m, 3, rng.gen_range(0.05..0.5), &mut rng).unwrap();
            let cert = build_containers(&h, 0.3, 1.0).unwrap();
            let rep = verify_certificate(&h, &cert).unwrap();
            assert!(rep.passed, "{:?}", rep.counterexample);
            for f in &cert.fingerprints {
                let s = GroundSubset::from_members(m, f.set.iter().copied()).unwrap();
                assert_eq!(container_of(&h, &s, 0).unwrap().to_vec(), f.container);
            }
        }
    }

    #[test]
    fn corrupted_certificate_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = UniformHypergraph::random(10, 3, 0.2, &mut rng).unwrap();
        let cert = build_containers(&h, 0.3, 1.0).unwrap();
        let bad = corrupt_certificate(&cert).unwrap();
        let rep = verify_certificate(&h, &bad).unwrap();
        assert!(!rep.passed);
        assert!(rep.counterexample.is_some());
    }

    #[test]
    fn single_edge_cores_cover() {
        let h = hg(5, 3, &[&[0, 2, 4]]);
        let fam = cores_from_containers(&h, &CoreParams::from_instance(&h, 3)).unwrap();
        for t in brute_force_hitting_sets(&h, false).unwrap() {
            assert!(fam.cores.iter().any(|c| t.contains_all(c)));
        }
    }

    #[test]
    fn cores_cover_random_hitting_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let m = rng.gen_range(5..=12);
            let h = UniformHypergraph::random(m, 3, rng.gen_range(0.1..0.6), &mut rng).unwrap();
            if h.e() == 0 {
                continue;
            }
            let fam = cores_from_containers(&h, &CoreParams::from_instance(&h, 3)).unwrap();
            assert!(fam.hypotheses.all());
            for t in brute_force_hitting_sets(&h, false).unwrap() {
                assert!(fam.cores.iter().any(|c| t.contains_all(c)));
            }
        }
    }

    #[test]
    fn core_parameter_errors() {
        let h = hg(4, 2, &[&[0, 1]]);
        let bad = CoreParams {
            k: 3,
            ell: 1,
            c0: 1.0,
            c1: 1.0,
        };
        assert!(cores_from_containers(&h, &bad).is_err());
        let bad = CoreParams {
            k: 3,
            ell: 2,
            c0: 0.0,
            c1: 1.0,
        };
        assert!(cores_from_containers(&h, &bad).is_err());
    }

    #[test]
    fn hitting_set_examples() {
        let h = hg(3, 2, &[]);
        assert_eq!(brute_force_hitting_sets(&h, false).unwrap().len(), 8);
        let min = brute_force_hitting_sets(&h, true).unwrap();
        assert_eq!(min.len(), 1);
        assert!(min[0].is_empty());
        let h = hg(3, 2, &[&[0, 2]]);
        let min: Vec<Vec<u32>> = brute_force_hitting_sets(&h, true)
            .unwrap()
            .iter()
            .map(|s| s.to_vec())
            .collect();
        assert_eq!(min, vec![vec![0], vec![2]]);
    }

    proptest! {
        #[test]
        fn hitting_independent_duality(m in 1usize..=12, q in 0.0f64..0.6, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = UniformHypergraph::random(m, 3, q, &mut rng).unwrap();
            let hits = brute_force_hitting_sets(&h, false).unwrap();
            let indep = independent_sets(&h).unwrap();
            prop_assert_eq!(hits.len(), indep.len());
            for t in &hits {
                prop_assert!(indep.contains(&t.complement()));
            }
        }

        #[test]
        fn fingerprint_inside_independent_set(m in 3usize..=12, q in 0.05f64..0.6, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = UniformHypergraph::random(m, 3, q, &mut rng).unwrap();
            for i in independent_sets(&h).unwrap() {
                let margin = (seed % 4) as usize;
                let s = fingerprint(&h, &i, margin).unwrap();
                prop_assert!(s.is_subset(&i));
                let f = container_of(&h, &s, margin).unwrap();
                prop_assert!(i.difference(&s).unwrap().is_subset(&f));
            }
        }
    }
}
