use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ground set an [`ActionSet`] can address.
pub const MAX_ELEMENTS: usize = 128;

/// A subset of the ground set `{0, .., n-1}` stored as a bitmask.
///
/// The derived ordering compares the masks as unsigned integers; that is the
/// "lexicographically smallest bitmask" used by every deterministic tie-break
/// in this crate.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionSet(u128);

impl ActionSet {
    pub const EMPTY: ActionSet = ActionSet(0);

    pub fn from_bits(bits: u128) -> Self {
        ActionSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS, "ground set of {n} exceeds {MAX_ELEMENTS}");
        if n == MAX_ELEMENTS {
            ActionSet(u128::MAX)
        } else {
            ActionSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        ActionSet(1u128 << i)
    }

    pub fn try_from_indices(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = ActionSet::EMPTY;
        for i in indices {
            if i >= MAX_ELEMENTS {
                return Err(Error::InvalidParameter(format!(
                    "element {i} outside the addressable range"
                )));
            }
            set.insert(i);
        }
        Ok(set)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_ELEMENTS && (self.0 >> i) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u128 << i);
    }

    pub fn with(self, i: usize) -> Self {
        ActionSet(self.0 | (1u128 << i))
    }

    pub fn without(self, i: usize) -> Self {
        ActionSet(self.0 & !(1u128 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        ActionSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ActionSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ActionSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset(self, other: Self) -> bool {
        self.is_subset(other) && self != other
    }

    /// True iff every element is below `n`.
    pub fn within(self, n: usize) -> bool {
        self.is_subset(ActionSet::full(n))
    }

    /// Elements in increasing order.
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn to_hex(self) -> String {
        format!("{:#x}", self.0)
    }
}

pub struct Elements(u128);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

impl FromIterator<usize> for ActionSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ActionSet::EMPTY;
        for i in iter {
            set.insert(i);
        }
        set
    }
}

impl fmt::Debug for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for ActionSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ActionSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(d)?;
        ActionSet::try_from_indices(indices).map_err(serde::de::Error::custom)
    }
}
