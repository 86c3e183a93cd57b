//! Finitely supported vectors with exact rational entries.
//!
//! Indices are finite subsets: vectors of `c00(ℕ)` use singletons `{n}`,
//! vectors over `[ℕ]^{k+1}` use `(k+1)`-sets.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::num::{fmt_rational, rational_from_json, Rational};
use crate::subset::FinSubset;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVec {
    entries: BTreeMap<FinSubset, Rational>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec::default()
    }

    pub fn unit(s: FinSubset) -> Self {
        let mut v = SparseVec::zero();
        v.entries.insert(s, Rational::from_integer(1.into()));
        v
    }

    /// `e_n` in `c00(ℕ)`.
    pub fn unit_nat(n: u32) -> Self {
        SparseVec::unit(FinSubset::singleton(n))
    }

    /// Sums duplicate indices; rejects mixed arities and empty indices.
    pub fn from_entries<I: IntoIterator<Item = (FinSubset, Rational)>>(it: I) -> Result<Self> {
        let mut v = SparseVec::zero();
        let mut arity = None;
        for (s, a) in it {
            if s.is_empty() {
                return invalid("vector index must be a nonempty set");
            }
            match arity {
                None => arity = Some(s.len()),
                Some(k) if k != s.len() => {
                    return invalid(format!("mixed index arities {k} and {}", s.len()))
                }
                _ => {}
            }
            v.add_entry(s, a);
        }
        Ok(v)
    }

    pub fn from_nat<I: IntoIterator<Item = (u32, Rational)>>(it: I) -> Self {
        let mut v = SparseVec::zero();
        for (n, a) in it {
            v.add_entry(FinSubset::singleton(n), a);
        }
        v
    }

    pub fn add_entry(&mut self, s: FinSubset, a: Rational) {
        if a.is_zero() {
            return;
        }
        let remove = {
            let e = self.entries.entry(s.clone()).or_insert_with(Rational::zero);
            *e += a;
            e.is_zero()
        };
        if remove {
            self.entries.remove(&s);
        }
    }

    pub fn get(&self, s: &FinSubset) -> Rational {
        self.entries.get(s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn arity(&self) -> Option<usize> {
        self.entries.keys().next().map(|s| s.len())
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorted support.
    pub fn support(&self) -> Vec<FinSubset> {
        self.entries.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FinSubset, &Rational)> {
        self.entries.iter()
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        for (s, a) in &other.entries {
            out.add_entry(s.clone(), a.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        for (s, a) in &other.entries {
            out.add_entry(s.clone(), -a.clone());
        }
        out
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (s, a) in &other.entries {
            self.add_entry(s.clone(), c * a);
        }
    }

    pub fn scale(&self, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zero();
        }
        SparseVec { entries: self.entries.iter().map(|(s, a)| (s.clone(), a * c)).collect() }
    }

    /// Multiplies the entry at each index by `-1` when `flip` says so.
    pub fn sign_flip(&self, flip: impl Fn(&FinSubset) -> bool) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(s, a)| (s.clone(), if flip(s) { -a.clone() } else { a.clone() }))
                .collect(),
        }
    }

    pub fn abs(&self) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|(s, a)| (s.clone(), a.abs())).collect() }
    }

    pub fn restrict(&self, keep: impl Fn(&FinSubset) -> bool) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().filter(|(s, _)| keep(s)).map(|(s, a)| (s.clone(), a.clone())).collect(),
        }
    }

    /// `I(x)` for the interval `I = [lo, hi]` of ℕ (vectors over ℕ only).
    pub fn restrict_interval(&self, lo: u32, hi: u32) -> SparseVec {
        self.restrict(|s| {
            let n = s.at(1);
            lo <= n && n <= hi
        })
    }

    pub fn l1(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |acc, a| acc + a.abs())
    }

    pub fn linf(&self) -> Rational {
        self.entries.values().map(|a| a.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn l2_squared(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |acc, a| acc + a * a)
    }

    /// Coordinates of a vector over ℕ, increasing.
    pub fn nat_support(&self) -> Result<Vec<u32>> {
        self.entries
            .keys()
            .map(|s| if s.len() == 1 { Ok(s.at(1)) } else { invalid("expected a vector over N") })
            .collect()
    }

    /// Hull `[min supp, max supp]` of a vector over ℕ.
    pub fn nat_hull(&self) -> Option<(u32, u32)> {
        let lo = self.entries.keys().next()?.at(1);
        let hi = self.entries.keys().next_back()?.at(1);
        Some((lo, hi))
    }

    /// `supp(self) < supp(other)` for vectors over ℕ.
    pub fn support_precedes(&self, other: &SparseVec) -> bool {
        match (self.nat_hull(), other.nat_hull()) {
            (Some((_, a)), Some((b, _))) => a < b,
            _ => true,
        }
    }

    pub fn supports_disjoint(&self, other: &SparseVec) -> bool {
        self.entries.keys().all(|s| !other.entries.contains_key(s))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|(s, a)| json!({"index": s.elems(), "value": fmt_rational(a)}))
                .collect(),
        )
    }

    /// Accepts `[{"index":[..],"value":v}, ...]` or the compact
    /// `[[[..], v], ...]`; values are numbers or rational strings.
    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::InvalidInput("vector must be a JSON array".into()))?;
        let mut entries = Vec::with_capacity(arr.len());
        for item in arr {
            let (idx, val) = match item {
                Value::Object(o) => (
                    o.get("index").ok_or_else(|| Error::InvalidInput("entry without index".into()))?,
                    o.get("value").ok_or_else(|| Error::InvalidInput("entry without value".into()))?,
                ),
                Value::Array(p) if p.len() == 2 => (&p[0], &p[1]),
                _ => return invalid(format!("bad vector entry {item}")),
            };
            let idx: Vec<u32> = match idx {
                Value::Number(_) => vec![serde_json::from_value(idx.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?],
                _ => serde_json::from_value(idx.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?,
            };
            entries.push((FinSubset::new(idx)?, rational_from_json(val)?));
        }
        SparseVec::from_entries(entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_entries_are_dropped() {
        let mut v = SparseVec::unit(s(&[1, 3]));
        v.add_entry(s(&[1, 3]), int(-1));
        assert!(v.is_zero());
        let w = SparseVec::from_nat([(1, int(1)), (2, int(-1))]);
        assert_eq!(w.l1(), int(2));
        assert_eq!(w.linf(), int(1));
        assert_eq!(w.sub(&w), SparseVec::zero());
    }

    #[test]
    fn json_round_trip() {
        let v = SparseVec::from_json(&serde_json::json!([[[1, 3], 1], [[2, 4], "1/2"]])).unwrap();
        assert_eq!(v.get(&s(&[2, 4])), rat(1, 2));
        assert_eq!(SparseVec::from_json(&v.to_json()).unwrap(), v);
        assert!(SparseVec::from_json(&serde_json::json!([[[1, 3], 1], [[2], 1]])).is_err());
    }
}
