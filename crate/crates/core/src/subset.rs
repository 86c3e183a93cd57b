//! Finite subsets of ℕ and the universes they are drawn from.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A finite subset of ℕ = {1, 2, ...} stored as a strictly increasing tuple.
/// `s.at(i)` is `s(i)` with 1-based `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct FinSubset(Vec<u32>);

impl TryFrom<Vec<u32>> for FinSubset {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        FinSubset::new(v)
    }
}

impl From<FinSubset> for Vec<u32> {
    fn from(s: FinSubset) -> Vec<u32> {
        s.0
    }
}

impl FinSubset {
    pub fn new(elems: Vec<u32>) -> Result<Self> {
        if elems.first() == Some(&0) {
            return invalid(format!("{elems:?}: elements must be positive integers"));
        }
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("{elems:?} is not strictly increasing"));
        }
        Ok(FinSubset(elems))
    }

    /// Caller guarantees the invariant.
    pub(crate) fn from_sorted(elems: Vec<u32>) -> Self {
        debug_assert!(FinSubset::new(elems.clone()).is_ok(), "{elems:?}");
        FinSubset(elems)
    }

    pub fn empty() -> Self {
        FinSubset(Vec::new())
    }

    pub fn singleton(m: u32) -> Self {
        assert!(m > 0);
        FinSubset(vec![m])
    }

    pub fn elems(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s(i)`, 1-based. Panics when out of range.
    pub fn at(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    pub fn min(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains(&self, m: u32) -> bool {
        self.0.binary_search(&m).is_ok()
    }

    /// `self < other` as blocks: `max self < min other`. Empty sets precede
    /// and follow everything.
    pub fn precedes(&self, other: &FinSubset) -> bool {
        match (self.max(), other.min()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        }
    }

    /// `s|j`, the first `j` elements.
    pub fn prefix(&self, j: usize) -> FinSubset {
        FinSubset(self.0[..j.min(self.0.len())].to_vec())
    }

    /// `t ∖ {max t}`.
    pub fn without_max(&self) -> FinSubset {
        let mut v = self.0.clone();
        v.pop();
        FinSubset(v)
    }

    /// `s(F) = (s(i))_{i∈F}` for 1-based positions `F`.
    pub fn select(&self, positions: &[usize]) -> Result<FinSubset> {
        let mut out = Vec::with_capacity(positions.len());
        for &p in positions {
            if p == 0 || p > self.len() {
                return invalid(format!("position {p} out of range for {self}"));
            }
            out.push(self.0[p - 1]);
        }
        FinSubset::new(out)
    }

    /// Adds `by` to every element.
    pub fn shift(&self, by: u32) -> FinSubset {
        FinSubset(self.0.iter().map(|&x| x + by).collect())
    }

    pub fn union(&self, other: &FinSubset) -> FinSubset {
        let mut v: Vec<u32> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        FinSubset(v)
    }

    /// Is `self` an initial segment of `other`?
    pub fn is_initial_segment_of(&self, other: &FinSubset) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for FinSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// An infinite or finite subset `M` of ℕ, listed increasingly as
/// `M(1) < M(2) < ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Universe {
    /// `{1, ..., n}`.
    Horizon { n: u32 },
    Explicit { elems: Vec<u32> },
    Naturals,
    /// `{start, start + step, ...}`.
    Progression { start: u32, step: u32 },
}

impl Universe {
    pub fn horizon(n: u32) -> Self {
        Universe::Horizon { n }
    }

    pub fn explicit(elems: Vec<u32>) -> Result<Self> {
        FinSubset::new(elems.clone())?;
        Ok(Universe::Explicit { elems })
    }

    pub fn evens() -> Self {
        Universe::Progression { start: 2, step: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Universe::Explicit { elems } => FinSubset::new(elems.clone()).map(|_| ()),
            Universe::Progression { start, step } if *start == 0 || *step == 0 => {
                invalid("progression needs positive start and step")
            }
            _ => Ok(()),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Universe::Horizon { .. } | Universe::Explicit { .. })
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            Universe::Horizon { n } => Some(*n as usize),
            Universe::Explicit { elems } => Some(elems.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn contains(&self, m: u32) -> bool {
        match self {
            Universe::Horizon { n } => m >= 1 && m <= *n,
            Universe::Explicit { elems } => elems.binary_search(&m).is_ok(),
            Universe::Naturals => m >= 1,
            Universe::Progression { start, step } => m >= *start && (m - start).is_multiple_of(*step),
        }
    }

    /// `M(i)`, 1-based.
    pub fn element(&self, i: usize) -> Option<u32> {
        if i == 0 {
            return None;
        }
        let i0 = (i - 1) as u64;
        let v = match self {
            Universe::Horizon { n } => (i <= *n as usize).then_some(i as u64),
            Universe::Explicit { elems } => elems.get(i - 1).map(|&x| x as u64),
            Universe::Naturals => Some(i as u64),
            Universe::Progression { start, step } => Some(*start as u64 + i0 * *step as u64),
        }?;
        u32::try_from(v).ok()
    }

    /// Position `i` with `M(i) = m`.
    pub fn position(&self, m: u32) -> Option<usize> {
        if !self.contains(m) {
            return None;
        }
        Some(match self {
            Universe::Horizon { .. } | Universe::Naturals => m as usize,
            Universe::Explicit { elems } => elems.binary_search(&m).ok()? + 1,
            Universe::Progression { start, step } => ((m - start) / step) as usize + 1,
        })
    }

    /// Least element of `M` strictly greater than `m`.
    pub fn next_after(&self, m: u32) -> Option<u32> {
        match self {
            Universe::Horizon { n } => (m < *n).then_some(m + 1),
            Universe::Explicit { elems } => {
                let i = elems.partition_point(|&x| x <= m);
                elems.get(i).copied()
            }
            Universe::Naturals => m.checked_add(1),
            Universe::Progression { start, step } => {
                if m < *start {
                    Some(*start)
                } else {
                    let k = (m - start) / step + 1;
                    start.checked_add(k.checked_mul(*step)?)
                }
            }
        }
    }

    /// Elements of `M` that are `<= bound`.
    pub fn elements_upto(&self, bound: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut i = 1;
        while let Some(m) = self.element(i) {
            if m > bound {
                break;
            }
            out.push(m);
            i += 1;
        }
        out
    }

    /// `M|n`, the first `n` elements.
    pub fn first_n(&self, n: usize) -> Result<Vec<u32>> {
        (1..=n)
            .map(|i| {
                self.element(i)
                    .ok_or_else(|| Error::InvalidInput(format!("universe has fewer than {n} elements")))
            })
            .collect()
    }

    /// All elements of a finite universe.
    pub fn elements(&self) -> Result<Vec<u32>> {
        match self {
            Universe::Horizon { n } => Ok((1..=*n).collect()),
            Universe::Explicit { elems } => Ok(elems.clone()),
            _ => invalid("operation needs a finite universe"),
        }
    }

    pub fn contains_set(&self, s: &FinSubset) -> bool {
        s.elems().iter().all(|&m| self.contains(m))
    }
}

/// Accepts `N`, `evens`, `1..n`, `a+bi` (a progression), a JSON array of
/// elements or the JSON object form.
impl std::str::FromStr for Universe {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::InvalidInput(format!("cannot read universe {t:?} (try N, evens, 1..n, 2+3i or [1,4,9])"));
        let u = match t {
            "N" | "naturals" => Universe::Naturals,
            "evens" => Universe::evens(),
            _ if t.starts_with('[') => Universe::explicit(serde_json::from_str(t).map_err(|_| bad())?)?,
            _ if t.starts_with('{') => serde_json::from_str(t).map_err(|e| Error::InvalidInput(e.to_string()))?,
            _ if t.starts_with("1..") => Universe::horizon(t[3..].parse().map_err(|_| bad())?),
            _ => {
                let (a, b) = t.strip_suffix('i').and_then(|r| r.split_once('+')).ok_or_else(bad)?;
                Universe::Progression { start: a.parse().map_err(|_| bad())?, step: b.parse().map_err(|_| bad())? }
            }
        };
        u.validate()?;
        Ok(u)
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Universe::Horizon { n } => write!(f, "{{1..{n}}}"),
            Universe::Explicit { elems } => write!(f, "{}", FinSubset(elems.clone())),
            Universe::Naturals => write!(f, "N"),
            Universe::Progression { start, step } => write!(f, "{{{start}+{step}i}}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finsubset_validation() {
        assert!(FinSubset::new(vec![1, 3]).is_ok());
        assert!(FinSubset::new(vec![3, 3]).is_err());
        assert!(FinSubset::new(vec![0, 3]).is_err());
        assert!(FinSubset::new(vec![]).unwrap().is_empty());
        let s = FinSubset::new(vec![2, 5, 9]).unwrap();
        assert_eq!(s.at(2), 5);
        assert_eq!(s.prefix(2).elems(), &[2, 5]);
        assert_eq!(s.select(&[1, 3]).unwrap().elems(), &[2, 9]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[2,5,9]");
        assert!(serde_json::from_str::<FinSubset>("[3,2]").is_err());
    }

    #[test]
    fn universe_accessors() {
        let e = Universe::evens();
        assert_eq!(e.element(3), Some(6));
        assert_eq!(e.position(6), Some(3));
        assert_eq!(e.next_after(4), Some(6));
        assert_eq!(e.next_after(5), Some(6));
        assert!(!e.contains(5));
        assert_eq!("evens".parse::<Universe>().unwrap(), e);
        assert_eq!("2+2i".parse::<Universe>().unwrap(), e);
        assert_eq!("1..7".parse::<Universe>().unwrap(), Universe::horizon(7));
        assert_eq!("[1,4,9]".parse::<Universe>().unwrap().element(2), Some(4));
        assert!("[4,1]".parse::<Universe>().is_err());
        assert!("odds".parse::<Universe>().is_err());
        let x = Universe::explicit(vec![2, 5, 9]).unwrap();
        assert_eq!(x.next_after(5), Some(9));
        assert_eq!(x.next_after(9), None);
        assert_eq!(Universe::horizon(4).elements().unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(Universe::Naturals.first_n(3).unwrap(), vec![1, 2, 3]);
    }
}
