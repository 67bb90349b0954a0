use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

/// A set of flags, stored as a fixed-length bitset over flag indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagSet {
    len: usize,
    words: Vec<u64>,
}

impl FlagSet {
    pub fn new(len: usize) -> Self {
        FlagSet { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut s = Self::new(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn from_fn(len: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut s = Self::new(len);
        for i in 0..len {
            if pred(i) {
                s.insert(i);
            }
        }
        s
    }

    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }

    /// Number of flags of the ambient geometry (not the cardinality).
    #[inline]
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.len, "flag index {i} out of range");
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.words[w] & b == 0;
        self.words[w] |= b;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let present = self.words[w] & b != 0;
        self.words[w] &= !b;
        present
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn union(&self, other: &FlagSet) -> FlagSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &FlagSet) -> FlagSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &FlagSet) -> FlagSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> FlagSet {
        let mut s = FlagSet { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &FlagSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn zip(&self, other: &FlagSet, op: impl Fn(u64, u64) -> u64) -> FlagSet {
        assert_eq!(self.len, other.len, "flag sets over different geometries");
        FlagSet { len: self.len, words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect() }
    }
}

impl fmt::Debug for FlagSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Serializes as the sorted list of member indices.
impl Serialize for FlagSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.count()))?;
        for i in self.iter() {
            seq.serialize_element(&i)?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        let mut s = FlagSet::new(70);
        assert!(s.is_empty());
        assert!(s.insert(3));
        assert!(!s.insert(3));
        s.insert(69);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 69]);
        assert_eq!(s.complement().count(), 68);
        assert!(FlagSet::full(70).is_full());
        assert_eq!(serde_json::to_string(&s).unwrap(), "[3,69]");
    }

    proptest! {
        #[test]
        fn set_algebra(a in proptest::collection::btree_set(0usize..130, 0..60),
                       b in proptest::collection::btree_set(0usize..130, 0..60)) {
            let sa = FlagSet::from_indices(130, a.iter().copied());
            let sb = FlagSet::from_indices(130, b.iter().copied());
            prop_assert_eq!(sa.union(&sb).iter().collect::<Vec<_>>(), a.union(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(sa.intersection(&sb).iter().collect::<Vec<_>>(), a.intersection(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(sa.difference(&sb).count(), a.difference(&b).count());
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.complement().complement(), sa.clone());
            prop_assert_eq!(sa.count() + sa.complement().count(), 130);
        }
    }
}
