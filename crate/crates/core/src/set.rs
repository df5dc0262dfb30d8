//! Dense element sets over a ground set `0..n` with `n <= 64`.

use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input, Result};

pub type Element = usize;

/// Largest supported ground-set size.
pub const MAX_ELEMENTS: usize = 64;

/// The ground set `{0, .., size - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    size: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size > MAX_ELEMENTS {
            return input(format!(
                "ground set of size {size} exceeds the supported maximum of {MAX_ELEMENTS}"
            ));
        }
        Ok(GroundSet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::full(self.size)
    }

    pub fn contains(&self, e: Element) -> bool {
        e < self.size
    }
}

/// A subset of a ground set, stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        ElementSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `{0, .., n - 1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS, "ground set size {n} out of range");
        if n == MAX_ELEMENTS {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(e: Element) -> Self {
        assert!(e < MAX_ELEMENTS, "element {e} out of range");
        ElementSet(1 << e)
    }

    /// Builds a set from a list, rejecting out-of-range and repeated elements.
    pub fn try_from_slice(elements: &[Element], ground: GroundSet) -> Result<Self> {
        let mut set = ElementSet::EMPTY;
        for &e in elements {
            if !ground.contains(e) {
                return input(format!(
                    "element {e} is outside the ground set 0..{}",
                    ground.size()
                ));
            }
            if set.contains(e) {
                return input(format!("element {e} is listed twice"));
            }
            set.insert(e);
        }
        Ok(set)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: Element) -> bool {
        e < MAX_ELEMENTS && self.0 & (1 << e) != 0
    }

    pub fn insert(&mut self, e: Element) {
        assert!(e < MAX_ELEMENTS, "element {e} out of range");
        self.0 |= 1 << e;
    }

    pub fn remove(&mut self, e: Element) {
        if e < MAX_ELEMENTS {
            self.0 &= !(1 << e);
        }
    }

    /// `X + e`.
    #[must_use]
    pub fn with(mut self, e: Element) -> Self {
        self.insert(e);
        self
    }

    /// `X - e`.
    #[must_use]
    pub fn without(mut self, e: Element) -> Self {
        self.remove(e);
        self
    }

    pub fn is_subset(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: ElementSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn min(self) -> Option<Element> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as Element)
    }

    /// Largest element plus one, or zero for the empty set.
    pub fn span(self) -> usize {
        MAX_ELEMENTS - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<Element> {
        self.iter().collect()
    }

    /// All subsets of `self`, in increasing order of their bitmask.
    pub fn subsets(self) -> Subsets {
        Subsets {
            universe: self.0,
            next: Some(0),
        }
    }

    /// All `k`-element subsets of `self`, in colexicographic order.
    pub fn subsets_of_size(self, k: usize) -> SubsetsOfSize {
        let members = self.to_vec();
        let state = (k <= members.len()).then(|| (0..k).collect());
        SubsetsOfSize { members, state }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<Element> for ElementSet {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        let mut set = ElementSet::EMPTY;
        for e in iter {
            set.insert(e);
        }
        set
    }
}

impl<const N: usize> From<[Element; N]> for ElementSet {
    fn from(elements: [Element; N]) -> Self {
        elements.into_iter().collect()
    }
}

impl IntoIterator for ElementSet {
    type Item = Element;
    type IntoIter = Elements;

    fn into_iter(self) -> Elements {
        self.iter()
    }
}

impl BitOr for ElementSet {
    type Output = ElementSet;
    fn bitor(self, rhs: ElementSet) -> ElementSet {
        ElementSet(self.0 | rhs.0)
    }
}

impl BitAnd for ElementSet {
    type Output = ElementSet;
    fn bitand(self, rhs: ElementSet) -> ElementSet {
        ElementSet(self.0 & rhs.0)
    }
}

impl BitXor for ElementSet {
    type Output = ElementSet;
    fn bitxor(self, rhs: ElementSet) -> ElementSet {
        ElementSet(self.0 ^ rhs.0)
    }
}

impl Sub for ElementSet {
    type Output = ElementSet;
    fn sub(self, rhs: ElementSet) -> ElementSet {
        ElementSet(self.0 & !rhs.0)
    }
}

impl Not for ElementSet {
    type Output = ElementSet;
    fn not(self) -> ElementSet {
        ElementSet(!self.0)
    }
}

impl Serialize for ElementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let elements = Vec::<Element>::deserialize(deserializer)?;
        let mut set = ElementSet::EMPTY;
        for e in elements {
            if e >= MAX_ELEMENTS {
                return Err(serde::de::Error::custom(format!("element {e} out of range")));
            }
            if set.contains(e) {
                return Err(serde::de::Error::custom(format!("element {e} repeated")));
            }
            set.insert(e);
        }
        Ok(set)
    }
}

/// Ascending iterator over the members of an [`ElementSet`].
#[derive(Debug, Clone)]
pub struct Elements(u64);

impl Iterator for Elements {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as Element;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

impl DoubleEndedIterator for Elements {
    fn next_back(&mut self) -> Option<Element> {
        if self.0 == 0 {
            return None;
        }
        let e = 63 - self.0.leading_zeros() as Element;
        self.0 &= !(1 << e);
        Some(e)
    }
}

#[derive(Debug, Clone)]
pub struct Subsets {
    universe: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        let current = self.next?;
        // standard submask successor: (s - u) & u walks submasks upward
        self.next = (current != self.universe)
            .then(|| current.wrapping_sub(self.universe) & self.universe);
        Some(ElementSet(current))
    }
}

#[derive(Debug, Clone)]
pub struct SubsetsOfSize {
    members: Vec<Element>,
    state: Option<Vec<usize>>,
}

impl Iterator for SubsetsOfSize {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        let idx = self.state.as_mut()?;
        let out = idx.iter().map(|&i| self.members[i]).collect();
        // advance the index combination (lexicographic over positions)
        let n = self.members.len();
        let k = idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.state = None;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_algebra() {
        let a = ElementSet::from([0, 1, 3]);
        let b = ElementSet::from([1, 2, 3]);
        assert_eq!(a | b, ElementSet::from([0, 1, 2, 3]));
        assert_eq!(a & b, ElementSet::from([1, 3]));
        assert_eq!(a - b, ElementSet::from([0]));
        assert_eq!(a ^ b, ElementSet::from([0, 2]));
        assert_eq!(a.with(5).without(0), ElementSet::from([1, 3, 5]));
        assert_eq!(a.to_string(), "{0,1,3}");
        assert_eq!(a.min(), Some(0));
        assert_eq!(ElementSet::EMPTY.min(), None);
        assert_eq!(a.span(), 4);
        assert_eq!(a.iter().rev().collect::<Vec<_>>(), vec![3, 1, 0]);
    }

    #[test]
    fn from_slice_rejects_bad_input() {
        let g = GroundSet::new(4).unwrap();
        assert!(ElementSet::try_from_slice(&[0, 4], g).is_err());
        assert!(ElementSet::try_from_slice(&[1, 1], g).is_err());
        assert_eq!(
            ElementSet::try_from_slice(&[2, 0], g).unwrap(),
            ElementSet::from([0, 2])
        );
        assert!(GroundSet::new(65).is_err());
    }

    #[test]
    fn subset_enumeration_counts() {
        let s = ElementSet::from([1, 4, 6, 7, 9]);
        assert_eq!(s.subsets().count(), 32);
        assert!(s.subsets().all(|x| x.is_subset(s)));
        for k in 0..=6 {
            let subsets: Vec<_> = s.subsets_of_size(k).collect();
            let expected = s.subsets().filter(|x| x.len() == k).count();
            assert_eq!(subsets.len(), expected, "k = {k}");
            assert!(subsets.iter().all(|x| x.len() == k && x.is_subset(s)));
        }
        assert_eq!(ElementSet::EMPTY.subsets().count(), 1);
        assert_eq!(ElementSet::EMPTY.subsets_of_size(0).count(), 1);
    }

    #[test]
    fn serde_round_trip() {
        let a = ElementSet::from([0, 5, 2]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[0,2,5]");
        assert_eq!(serde_json::from_str::<ElementSet>(&json).unwrap(), a);
        assert!(serde_json::from_str::<ElementSet>("[1,1]").is_err());
    }

    proptest! {
        #[test]
        fn cardinality_matches_distinct_members(v in proptest::collection::vec(0usize..64, 0..40)) {
            let set: ElementSet = v.iter().copied().collect();
            let mut dedup = v.clone();
            dedup.sort_unstable();
            dedup.dedup();
            prop_assert_eq!(set.len(), dedup.len());
            prop_assert_eq!(set.to_vec(), dedup);
        }
    }
}
