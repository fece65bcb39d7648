//! Ground sets of base arms and subsets of them.
//!
//! Arms are indexed from 0 internally. Textual renderings (`Display`,
//! [`ArmSet::parse`]) use 1-based labels so that `{5,6,7,8}` names the last
//! four arms of an eight-arm ground set; the CSV bitmask keeps bit `i` for
//! internal arm `i`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set representable by the bitmask-backed [`ArmSet`].
pub const MAX_ARMS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ARMS {
            return Err(Error::GroundSetSize { n, max: MAX_ARMS });
        }
        Ok(Self { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut ground = Self::new(labels.len())?;
        ground.labels = Some(labels);
        Ok(ground)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The label of arm `i`, falling back to its 1-based index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    pub fn full(&self) -> ArmSet {
        if self.n == MAX_ARMS {
            ArmSet(u64::MAX)
        } else {
            ArmSet((1u64 << self.n) - 1)
        }
    }

    pub fn check_arm(&self, i: usize) -> Result<usize> {
        if i < self.n {
            Ok(i)
        } else {
            Err(Error::ArmOutOfRange {
                index: i,
                n: self.n,
            })
        }
    }

    pub fn check(&self, s: ArmSet) -> Result<ArmSet> {
        if s.0 & !self.full().0 == 0 {
            Ok(s)
        } else {
            Err(Error::ArmOutOfRange {
                index: 63 - s.0.leading_zeros() as usize,
                n: self.n,
            })
        }
    }

    /// Builds a set from 0-based arm indices, rejecting any index `>= n`.
    pub fn subset<I: IntoIterator<Item = usize>>(&self, arms: I) -> Result<ArmSet> {
        arms.into_iter()
            .try_fold(ArmSet::EMPTY, |s, i| self.check_arm(i).map(|i| s.with(i)))
    }

    pub fn complement(&self, s: ArmSet) -> ArmSet {
        ArmSet(!s.0 & self.full().0)
    }

    /// All `2^n` subsets in bitmask order. Only sensible for small `n`.
    pub fn subsets(&self) -> impl Iterator<Item = ArmSet> {
        let full = self.full().0;
        (0..=full).map(ArmSet)
    }
}

/// A subset of the ground set, stored as a bitmask (bit `i` set iff arm `i`
/// is a member). Value type: every operation returns a new set.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct ArmSet(u64);

impl ArmSet {
    pub const EMPTY: ArmSet = ArmSet(0);

    pub const fn from_mask(mask: u64) -> Self {
        ArmSet(mask)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub fn with(self, i: usize) -> Self {
        assert!(i < MAX_ARMS, "arm index {i} out of range");
        ArmSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        assert!(i < MAX_ARMS, "arm index {i} out of range");
        ArmSet(self.0 & !(1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_ARMS && self.0 & (1 << i) != 0
    }

    pub fn union(self, other: ArmSet) -> Self {
        ArmSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ArmSet) -> Self {
        ArmSet(self.0 & other.0)
    }

    pub fn difference(self, other: ArmSet) -> Self {
        ArmSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ArmSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Parses `{5,6,7,8}` style text with 1-based labels. Braces are optional
    /// and `{}` is the empty set.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::ArmSetSyntax(text.to_string());
        let inner = text.trim();
        let inner = inner
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(inner)
            .trim();
        if inner.is_empty() {
            return Ok(ArmSet::EMPTY);
        }
        inner.split(',').try_fold(ArmSet::EMPTY, |s, tok| {
            let label: usize = tok.trim().parse().map_err(|_| bad())?;
            if label == 0 || label > MAX_ARMS {
                return Err(bad());
            }
            Ok(s.with(label - 1))
        })
    }
}

impl fmt::Display for ArmSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl FromStr for ArmSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ArmSet::parse(s)
    }
}

/// Subset-order comparison used for deterministic tie-breaking: smaller
/// cardinality first, then the lexicographically smaller sorted index list.
pub fn cmp_small_then_lex(a: ArmSet, b: ArmSet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn singleton_union() {
        assert_eq!(ArmSet::EMPTY.with(1), ArmSet::from_mask(0b10));
    }

    #[test]
    fn removal() {
        let g = GroundSet::new(2).unwrap();
        let s = g.subset([0, 1]).unwrap();
        assert_eq!(s.without(0), g.subset([1]).unwrap());
    }

    #[test]
    fn full_complement_is_empty() {
        let g = GroundSet::new(2).unwrap();
        assert_eq!(g.complement(g.subset([0, 1]).unwrap()), ArmSet::EMPTY);
        assert_eq!(g.complement(ArmSet::EMPTY), g.full());
    }

    #[test]
    fn out_of_range_rejected() {
        let g = GroundSet::new(3).unwrap();
        assert!(matches!(
            g.subset([0, 3]),
            Err(Error::ArmOutOfRange { index: 3, n: 3 })
        ));
        assert!(g.check(ArmSet::from_mask(0b1000)).is_err());
        assert!(g.check(ArmSet::from_mask(0b111)).is_ok());
    }

    #[test]
    fn ground_set_bounds() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(65).is_err());
        assert_eq!(GroundSet::new(64).unwrap().full().mask(), u64::MAX);
        assert!(GroundSet::with_labels(vec!["a".into(), "b".into()]).is_ok());
    }

    #[test]
    fn render_and_parse() {
        let g = GroundSet::new(8).unwrap();
        let s = g.subset([4, 5, 6, 7]).unwrap();
        assert_eq!(s.to_string(), "{5,6,7,8}");
        assert_eq!(s.mask(), 240);
        assert_eq!(ArmSet::parse("{5,6,7,8}").unwrap(), s);
        assert_eq!(ArmSet::parse(" 8, 5,6 ,7 ").unwrap(), s);
        assert_eq!(ArmSet::parse("{}").unwrap(), ArmSet::EMPTY);
        assert_eq!(ArmSet::EMPTY.to_string(), "{}");
        assert!(ArmSet::parse("{0}").is_err());
        assert!(ArmSet::parse("{a}").is_err());
    }

    #[test]
    fn enumeration_count() {
        for n in 1..=10 {
            let g = GroundSet::new(n).unwrap();
            let all: std::collections::HashSet<_> = g.subsets().collect();
            assert_eq!(all.len(), 1 << n);
            assert!(all.iter().all(|s| g.check(*s).is_ok()));
        }
    }

    #[test]
    fn tie_break_order() {
        let a = ArmSet::parse("{2}").unwrap();
        let b = ArmSet::parse("{1,2}").unwrap();
        let c = ArmSet::parse("{1,3}").unwrap();
        assert!(cmp_small_then_lex(a, b).is_lt());
        assert!(cmp_small_then_lex(b, c).is_lt());
        assert!(cmp_small_then_lex(ArmSet::parse("{1}").unwrap(), a).is_lt());
    }

    proptest! {
        #[test]
        fn union_remove_contains(mask in any::<u64>(), i in 0usize..64) {
            let s = ArmSet::from_mask(mask);
            prop_assert!(s.with(i).contains(i));
            prop_assert!(!s.without(i).contains(i));
            prop_assert_eq!(s.with(i).with(i), s.with(i));
            prop_assert_eq!(s.without(i).without(i), s.without(i));
            prop_assert_eq!(ArmSet::parse(&s.to_string()).unwrap(), s);
        }
    }
}
