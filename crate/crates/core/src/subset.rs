//! Bit-vector subsets of `Z/nZ` (or of any vertex range `0..n`).

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_modulus, Result, VdwError};

/// A subset of `{0, .., n-1}` stored as a packed bit-vector with a cached
/// cardinality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroundSubset {
    n: usize,
    words: Vec<u64>,
    len: usize,
}

impl GroundSubset {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(64)],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            let hi = (lo + 64).min(n);
            *w = if hi - lo == 64 {
                u64::MAX
            } else {
                (1u64 << (hi - lo)) - 1
            };
        }
        s.len = n;
        s
    }

    /// Builds a subset from residues; every value must lie in `0..n`.
    pub fn from_members<I>(n: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = u32>,
    {
        let mut s = Self::empty(n);
        for m in members {
            if (m as usize) >= n {
                return Err(VdwError::Param(format!("element {m} outside 0..{n}")));
            }
            s.insert(m);
        }
        Ok(s)
    }

    /// Like [`from_members`](Self::from_members) but reduces every value mod n.
    pub fn from_residues<I>(n: usize, members: I) -> Self
    where
        I: IntoIterator<Item = i64>,
    {
        let mut s = Self::empty(n);
        for m in members {
            s.insert(m.rem_euclid(n as i64) as u32);
        }
        s
    }

    #[inline]
    pub fn modulus(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        let v = v as usize;
        v < self.n && (self.words[v >> 6] >> (v & 63)) & 1 == 1
    }

    /// Returns true if the element was newly inserted.
    pub fn insert(&mut self, v: u32) -> bool {
        let i = v as usize;
        assert!(i < self.n, "element {i} outside 0..{}", self.n);
        let w = &mut self.words[i >> 6];
        let bit = 1u64 << (i & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
            true
        } else {
            false
        }
    }

    /// Returns true if the element was present.
    pub fn remove(&mut self, v: u32) -> bool {
        let i = v as usize;
        if i >= self.n {
            return false;
        }
        let w = &mut self.words[i >> 6];
        let bit = 1u64 << (i & 63);
        if *w & bit != 0 {
            *w &= !bit;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros();
                    w &= w - 1;
                    Some((i as u32) * 64 + t)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<u32> {
        self.iter().next()
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        check_modulus(self.n, other.n)?;
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        Ok(Self {
            n: self.n,
            words,
            len,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let full = Self::full(self.n);
        full.difference(self).expect("same modulus")
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & b == 0)
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// True if every listed element is a member.
    pub fn contains_all(&self, elems: &[u32]) -> bool {
        elems.iter().all(|&e| self.contains(e))
    }

    /// `{a + x mod n : a in self}`.
    pub fn translate(&self, x: u32) -> Self {
        let n = self.n as u64;
        let mut out = Self::empty(self.n);
        if self.n == 0 {
            return out;
        }
        let x = x as u64 % n;
        for a in self.iter() {
            out.insert(((a as u64 + x) % n) as u32);
        }
        out
    }
}

impl fmt::Debug for GroundSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroundSubset(n={}, ", self.n)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct SubsetRepr {
    n: usize,
    members: Vec<u32>,
}

impl Serialize for GroundSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubsetRepr {
            n: self.n,
            members: self.to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroundSubset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SubsetRepr::deserialize(d)?;
        GroundSubset::from_members(r.n, r.members).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_and_empty() {
        for n in [0, 1, 63, 64, 65, 130] {
            assert_eq!(GroundSubset::full(n).len(), n);
            assert_eq!(GroundSubset::full(n).iter().count(), n);
            assert!(GroundSubset::empty(n).is_empty());
        }
    }

    #[test]
    fn translate_examples() {
        let a = GroundSubset::from_members(9, [0, 1]).unwrap();
        assert_eq!(a.translate(0), a);
        assert_eq!(a.translate(8).to_vec(), vec![0, 8]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(GroundSubset::from_members(5, [5]).is_err());
    }

    #[test]
    fn mismatched_union_errors() {
        let a = GroundSubset::empty(5);
        let b = GroundSubset::empty(6);
        assert!(matches!(a.union(&b), Err(VdwError::ModulusMismatch { .. })));
    }

    proptest! {
        #[test]
        fn cardinality_matches_popcount(n in 1usize..200, xs in proptest::collection::vec(0u32..200, 0..80), rm in proptest::collection::vec(0u32..200, 0..40)) {
            let mut s = GroundSubset::from_residues(n, xs.iter().map(|&x| x as i64));
            for r in rm { s.remove(r % n as u32); }
            prop_assert_eq!(s.len(), s.iter().count());
        }

        #[test]
        fn translate_inverse(n in 1usize..150, xs in proptest::collection::vec(0i64..1000, 0..60), x in 0u32..150) {
            let a = GroundSubset::from_residues(n, xs);
            let x = x % n as u32;
            let b = a.translate(x);
            prop_assert_eq!(b.len(), a.len());
            prop_assert_eq!(b.translate((n as u32 - x) % n as u32), a);
        }
    }
}
