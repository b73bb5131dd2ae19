//! Strata: subsets of x-variable indices, stored as bitmasks.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum chart dimension supported by the bitmask representation.
pub const MAX_VARS: usize = 64;

/// A set Λ of x-variable indices. The empty set is the generic stratum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", from = "Vec<usize>")]
pub struct Stratum(pub u64);

impl Stratum {
    pub const EMPTY: Stratum = Stratum(0);

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut m = 0u64;
        for i in it {
            assert!(i < MAX_VARS, "variable index {i} out of range");
            m |= 1 << i;
        }
        Stratum(m)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_VARS && self.0 >> i & 1 == 1
    }

    pub fn insert(self, i: usize) -> Self {
        Stratum(self.0 | 1 << i)
    }

    pub fn remove(self, i: usize) -> Self {
        Stratum(self.0 & !(1 << i))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, o: Stratum) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn union(self, o: Stratum) -> Self {
        Stratum(self.0 | o.0)
    }

    pub fn intersection(self, o: Stratum) -> Self {
        Stratum(self.0 & o.0)
    }

    pub fn minus(self, o: Stratum) -> Self {
        Stratum(self.0 & !o.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_VARS).filter(move |&i| self.contains(i))
    }

    /// All subsets of `self`, ordered by size then by bitmask.
    pub fn subsets(self) -> Vec<Stratum> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut s = 0u64;
        loop {
            out.push(Stratum(s));
            if s == self.0 {
                break;
            }
            s = (s.wrapping_sub(self.0)) & self.0;
        }
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }

    /// Applies a variable permutation `perm[i] = σ(i)`.
    pub fn permute(self, perm: &[usize]) -> Self {
        Stratum::from_indices(self.iter().map(|i| perm[i]))
    }
}

impl From<Vec<usize>> for Stratum {
    fn from(v: Vec<usize>) -> Self {
        Stratum::from_indices(v)
    }
}

impl From<Stratum> for Vec<usize> {
    fn from(s: Stratum) -> Self {
        s.iter().collect()
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// An upward-closed family of strata, stored as its antichain of minimal members.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumFamily {
    pub minimal_strata: Vec<Stratum>,
}

impl StratumFamily {
    /// Reduces an arbitrary collection to its minimal antichain.
    pub fn from_members<I: IntoIterator<Item = Stratum>>(it: I) -> Self {
        let mut v: Vec<Stratum> = it.into_iter().collect();
        v.sort_by_key(|s| (s.len(), s.0));
        v.dedup();
        let mut mins: Vec<Stratum> = Vec::new();
        for s in v {
            if !mins.iter().any(|m| m.is_subset(s)) {
                mins.push(s);
            }
        }
        StratumFamily { minimal_strata: mins }
    }

    pub fn is_empty(&self) -> bool {
        self.minimal_strata.is_empty()
    }

    pub fn contains(&self, s: Stratum) -> bool {
        self.minimal_strata.iter().any(|m| m.is_subset(s))
    }

    /// Indices common to every minimal stratum.
    pub fn common(&self) -> Stratum {
        self.minimal_strata
            .iter()
            .fold(Stratum(u64::MAX), |acc, m| acc.intersection(*m))
    }
}
