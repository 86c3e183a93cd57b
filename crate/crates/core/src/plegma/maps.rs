//! Maps between `[M]^{k1}` and `[ℕ]^{k2}` given by finite tables.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{enumerate_plegma, is_plegma, is_plegma_pair, plegma_from_flat};
use crate::combin::combinations;
use crate::error::{invalid, Result};
use crate::search::first_subuniverse;
use crate::subset::{FinSubset, Universe};

/// A finite table `[M]^{k1} → [ℕ]^{k2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetMap {
    pub k1: usize,
    pub k2: usize,
    table: BTreeMap<FinSubset, FinSubset>,
}

impl SetMap {
    pub fn from_table(k1: usize, k2: usize, table: BTreeMap<FinSubset, FinSubset>) -> Result<Self> {
        if k1 == 0 || k2 == 0 {
            return invalid("map arities must be positive");
        }
        for (s, v) in &table {
            if s.len() != k1 || v.len() != k2 {
                return invalid(format!("table entry {s} -> {v} does not have arities ({k1},{k2})"));
            }
        }
        Ok(SetMap { k1, k2, table })
    }

    /// Tabulates `f` on all of `[elems]^{k1}`.
    pub fn from_fn(elems: &[u32], k1: usize, k2: usize, f: impl Fn(&FinSubset) -> FinSubset) -> Result<Self> {
        let table = combinations(elems, k1)
            .map(|c| {
                let s = FinSubset::from_sorted(c);
                let v = f(&s);
                (s, v)
            })
            .collect();
        SetMap::from_table(k1, k2, table)
    }

    pub fn get(&self, s: &FinSubset) -> Option<&FinSubset> {
        self.table.get(s)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    fn image(&self, s: &FinSubset) -> Result<&FinSubset> {
        self.table.get(s).map_or_else(|| invalid(format!("partial table: no value at {s}")), Ok)
    }

    fn check_total(&self, elems: &[u32]) -> Result<()> {
        for c in combinations(elems, self.k1) {
            self.image(&FinSubset::from_sorted(c))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preservation {
    Preserving,
    /// A plegma family whose image is not plegma.
    Violation(Vec<FinSubset>),
}

/// Checks that the image of every plegma `l`-tuple, `2 <= l <= max_l`, is
/// plegma. `max_l = 2` already decides the question for all `l`, by the
/// pairwise characterization.
pub fn is_plegma_preserving(map: &SetMap, domain: &Universe, max_l: usize) -> Result<Preservation> {
    let elems = domain.elements()?;
    map.check_total(&elems)?;
    for l in 2..=max_l.max(2) {
        for t in enumerate_plegma(domain, map.k1, l)? {
            let images: Vec<FinSubset> =
                t.members().iter().map(|s| map.image(s).cloned()).collect::<Result<_>>()?;
            if !is_plegma(&images)? {
                return Ok(Preservation::Violation(t.into_members()));
            }
        }
    }
    Ok(Preservation::Preserving)
}

/// Lexicographically first `L ⊆ M` with `|L| = target` on which no plegma
/// pair of `[L]^{k1}` has its image plegma in either order. `None` means no
/// such `L` exists inside this finite table.
pub fn find_nonpreserving_witness(map: &SetMap, domain: &Universe, target: usize) -> Result<Option<Vec<u32>>> {
    if map.k1 >= map.k2 {
        return invalid(format!("need k1 < k2, got k1 = {}, k2 = {}", map.k1, map.k2));
    }
    let elems = domain.elements()?;
    map.check_total(&elems)?;
    let k1 = map.k1;
    let accept = |flat: &[u32]| {
        let t = plegma_from_flat(&FinSubset::from_sorted(flat.to_vec()), k1, 2).expect("flat of size 2k1");
        let (a, b) = (map.image(t.member(1)).unwrap(), map.image(t.member(2)).unwrap());
        !is_plegma_pair(a, b) && !is_plegma_pair(b, a)
    };
    Ok(first_subuniverse(&elems, 2 * k1, target, accept))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn preserving_examples() {
        let elems: Vec<u32> = (1..=6).collect();
        let u = Universe::horizon(6);
        let first = SetMap::from_fn(&elems, 2, 1, |x| x.prefix(1)).unwrap();
        assert_eq!(is_plegma_preserving(&first, &u, 3).unwrap(), Preservation::Preserving);
        let last = SetMap::from_fn(&elems, 2, 1, |x| x.select(&[2]).unwrap()).unwrap();
        assert_eq!(is_plegma_preserving(&last, &u, 2).unwrap(), Preservation::Preserving);
        let constant = SetMap::from_fn(&elems, 2, 2, |_| s(&[1, 2])).unwrap();
        match is_plegma_preserving(&constant, &u, 2).unwrap() {
            Preservation::Violation(v) => assert!(is_plegma(&v).unwrap()),
            other => panic!("{other:?}"),
        }
        let partial = SetMap::from_fn(&elems[..4], 2, 1, |x| x.prefix(1)).unwrap();
        assert!(is_plegma_preserving(&partial, &u, 2).is_err());
    }

    #[test]
    fn witness_examples() {
        let elems: Vec<u32> = (1..=12).collect();
        let u = Universe::horizon(12);
        let phi = SetMap::from_fn(&elems, 2, 3, |x| s(&[x.at(1), x.at(2), x.at(2) + 1])).unwrap();
        let l = find_nonpreserving_witness(&phi, &u, 4).unwrap().unwrap();
        assert_eq!(l.len(), 4);
        let constant = SetMap::from_fn(&elems, 2, 3, |_| s(&[1, 2, 3])).unwrap();
        assert_eq!(find_nonpreserving_witness(&constant, &u, 12).unwrap().unwrap(), elems);
        let same = SetMap::from_fn(&elems, 2, 2, |x| x.clone()).unwrap();
        assert!(find_nonpreserving_witness(&same, &u, 4).is_err());
    }
}
