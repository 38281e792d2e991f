//! Subsets of subsystem labels.
//!
//! Labels are 1-based (`1..=n`). Internally a subset is a bitmask with bit
//! `i - 1` set for label `i`, which is also how per-subset terms are keyed in
//! serialized reports.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest subsystem count representable in a mask.
pub const MAX_SUBSYSTEMS: usize = 32;

/// A nonempty set of 1-based subsystem labels, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsetSpec {
    labels: Vec<usize>,
}

impl SubsetSpec {
    pub fn new(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut sorted = labels.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateLabel(w[0]));
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&l| l == 0 || l > MAX_SUBSYSTEMS) {
            return Err(Error::LabelOutOfRange {
                label: bad,
                n: MAX_SUBSYSTEMS,
            });
        }
        Ok(Self { labels: sorted })
    }

    /// `[n] = {1, ..., n}`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(&(1..=n).collect::<Vec<_>>())
    }

    /// Parses a comma-separated label list such as `1,2,3`.
    pub fn parse(text: &str) -> Result<Self> {
        let labels = text
            .split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad subsystem label '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&labels)
    }

    pub fn from_mask(mask: u32) -> Result<Self> {
        let labels: Vec<usize> = (0..MAX_SUBSYSTEMS)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| i + 1)
            .collect();
        Self::new(&labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn mask(&self) -> u32 {
        self.labels.iter().fold(0, |m, &l| m | (1 << (l - 1)))
    }

    /// Checks every label against a system of `n` subsystems.
    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.labels.iter().find(|&&l| l > n) {
            Some(&label) => Err(Error::LabelOutOfRange { label, n }),
            None => Ok(()),
        }
    }

    pub fn is_disjoint(&self, other: &SubsetSpec) -> bool {
        self.mask() & other.mask() == 0
    }

    pub fn union(&self, other: &SubsetSpec) -> SubsetSpec {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        labels.sort_unstable();
        labels.dedup();
        SubsetSpec { labels }
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl TryFrom<Vec<usize>> for SubsetSpec {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<SubsetSpec> for Vec<usize> {
    fn from(s: SubsetSpec) -> Self {
        s.labels
    }
}

/// Iterates the power set of `mask` in binary-counting order over its set
/// bits (lowest label varies fastest), starting with the empty set.
pub fn power_set(mask: u32) -> impl Iterator<Item = u32> {
    let bits: Vec<u32> = (0..32).filter(|i| mask & (1 << i) != 0).collect();
    let count = 1u64 << bits.len();
    (0..count).map(move |k| {
        bits.iter()
            .enumerate()
            .filter(|(j, _)| k & (1 << j) != 0)
            .fold(0u32, |m, (_, &b)| m | (1 << b))
    })
}

/// Renders a mask as the lowercase hex key used in serialized reports.
pub fn mask_key(mask: u32) -> String {
    format!("{mask:#x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_duplicates() {
        assert_eq!(SubsetSpec::new(&[]), Err(Error::EmptySubset));
        assert_eq!(SubsetSpec::new(&[2, 1, 2]), Err(Error::DuplicateLabel(2)));
        assert!(matches!(
            SubsetSpec::new(&[0]),
            Err(Error::LabelOutOfRange { label: 0, .. })
        ));
    }

    #[test]
    fn sorts_and_masks() {
        let s = SubsetSpec::new(&[3, 1]).unwrap();
        assert_eq!(s.labels(), &[1, 3]);
        assert_eq!(s.mask(), 0b101);
        assert_eq!(s.to_string(), "1,3");
        assert_eq!(SubsetSpec::from_mask(0b101).unwrap(), s);
        assert!(s.check_range(3).is_ok());
        assert!(s.check_range(2).is_err());
    }

    #[test]
    fn parse_list() {
        let s = SubsetSpec::parse("1, 2,4").unwrap();
        assert_eq!(s.labels(), &[1, 2, 4]);
        assert!(SubsetSpec::parse("1,x").is_err());
    }

    #[test]
    fn power_set_order() {
        let subsets: Vec<u32> = power_set(0b1010).collect();
        assert_eq!(subsets, vec![0b0000, 0b0010, 0b1000, 0b1010]);
        assert_eq!(power_set(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(power_set(0b111).count(), 8);
    }
}
