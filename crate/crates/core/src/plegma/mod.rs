//! Plegma families.
//!
//! A sequence `(s_j)_{j=1}^l` of `k`-subsets of ℕ is plegma when
//! `s_1(i) < ... < s_l(i)` for every coordinate `i` and `s_l(i) < s_1(i+1)`
//! for `i < k`. The union of the members (the *flat*) determines the family,
//! which gives a bijection between plegma `l`-tuples in `[M]^k` and `[M]^{kl}`.

mod maps;
mod path;
mod plegmatic;

pub use maps::{find_nonpreserving_witness, is_plegma_preserving, Preservation, SetMap};
pub use path::{
    enumerate_paths_upto, is_skipped, plegma_distance, plegma_path_between, plegma_successors, Distance,
};
pub use plegmatic::{
    is_plegmatic, is_schreier_plegmatic, is_weakly_plegmatic_path, schreier_greedy, schreier_exhaustive,
    Feasibility,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combin::{binomial, combinations};
use crate::error::{invalid, Error, Result};
use crate::subset::{FinSubset, Universe};

/// A validated plegma family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<FinSubset>", into = "Vec<FinSubset>")]
pub struct PlegmaTuple {
    members: Vec<FinSubset>,
}

impl TryFrom<Vec<FinSubset>> for PlegmaTuple {
    type Error = Error;
    fn try_from(v: Vec<FinSubset>) -> Result<Self> {
        PlegmaTuple::new(v)
    }
}

impl From<PlegmaTuple> for Vec<FinSubset> {
    fn from(t: PlegmaTuple) -> Self {
        t.members
    }
}

impl PlegmaTuple {
    pub fn new(members: Vec<FinSubset>) -> Result<Self> {
        if members.is_empty() {
            return invalid("a plegma tuple needs at least one member");
        }
        if !is_plegma(&members)? {
            let shown: Vec<String> = members.iter().map(|s| s.to_string()).collect();
            return invalid(format!("[{}] is not a plegma family", shown.join(",")));
        }
        Ok(PlegmaTuple { members })
    }

    pub fn members(&self) -> &[FinSubset] {
        &self.members
    }

    pub fn into_members(self) -> Vec<FinSubset> {
        self.members
    }

    pub fn k(&self) -> usize {
        self.members[0].len()
    }

    pub fn l(&self) -> usize {
        self.members.len()
    }

    /// `s_j`, 1-based.
    pub fn member(&self, j: usize) -> &FinSubset {
        &self.members[j - 1]
    }
}

impl fmt::Display for PlegmaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, s) in self.members.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// Common cardinality of a family; errors on empty members or mixed sizes.
fn common_k(family: &[FinSubset]) -> Result<usize> {
    let k = family.first().map_or(1, |s| s.len());
    if k == 0 {
        return invalid("plegma members must be nonempty");
    }
    if let Some(s) = family.iter().find(|s| s.len() != k) {
        return invalid(format!("mixed cardinalities: {} has size {}, expected {k}", s, s.len()));
    }
    Ok(k)
}

fn conditions_hold(family: &[FinSubset], k: usize) -> bool {
    let l = family.len();
    if l == 0 {
        return true;
    }
    for w in family.windows(2) {
        if (0..k).any(|i| w[0].elems()[i] >= w[1].elems()[i]) {
            return false;
        }
    }
    (0..k.saturating_sub(1)).all(|i| family[l - 1].elems()[i] < family[0].elems()[i + 1])
}

/// True iff the family satisfies both plegma conditions. An empty list is
/// vacuously plegma.
pub fn is_plegma(family: &[FinSubset]) -> Result<bool> {
    let k = common_k(family)?;
    Ok(conditions_hold(family, k))
}

/// `(a, b)` is a plegma pair; both must have the same size.
pub fn is_plegma_pair(a: &FinSubset, b: &FinSubset) -> bool {
    a.len() == b.len() && !a.is_empty() && conditions_hold(&[a.clone(), b.clone()], a.len())
}

/// Can `cand` be appended to a plegma chain with first member `first` and last
/// member `last`? By the pairwise characterization these two comparisons
/// suffice.
pub fn extends_chain(first: &FinSubset, last: &FinSubset, cand: &FinSubset) -> bool {
    let (f, l, c) = (first.elems(), last.elems(), cand.elems());
    let k = c.len();
    (0..k).all(|i| l[i] < c[i]) && (0..k - 1).all(|i| c[i] < f[i + 1])
}

/// `s_j(i) = F((i-1)l + j)`.
pub fn plegma_from_flat(flat: &FinSubset, k: usize, l: usize) -> Result<PlegmaTuple> {
    if k == 0 || l == 0 {
        return invalid("k and l must be positive");
    }
    if flat.len() != k * l {
        return invalid(format!("flat {flat} has size {}, expected k*l = {}", flat.len(), k * l));
    }
    let f = flat.elems();
    let members =
        (0..l).map(|j| FinSubset::from_sorted((0..k).map(|i| f[i * l + j]).collect())).collect();
    Ok(PlegmaTuple { members })
}

pub fn flat_from_plegma(t: &PlegmaTuple) -> FinSubset {
    let mut v: Vec<u32> = t.members.iter().flat_map(|s| s.elems().iter().copied()).collect();
    v.sort_unstable();
    FinSubset::from_sorted(v)
}

/// Outcome of applying the alternative index rule `F((i-1)k + j)` to a flat.
#[derive(Clone, Debug, Serialize)]
pub struct AlternativeFormulaReport {
    /// 1-based flat positions the rule reads, one row per member.
    pub positions: Vec<Vec<usize>>,
    /// Every flat position read exactly once.
    pub injective: bool,
    /// Rows that fit in the flat form a plegma family equal to ours.
    pub agrees: bool,
}

/// Evaluates the index rule `s_j(i) = F((i-1)k + j)`, which coincides with
/// ours exactly when `k = l`.
pub fn alternative_formula(flat: &FinSubset, k: usize, l: usize) -> Result<AlternativeFormulaReport> {
    if flat.len() != k * l || k == 0 || l == 0 {
        return invalid(format!("flat {flat} has size {}, expected k*l = {}", flat.len(), k * l));
    }
    let positions: Vec<Vec<usize>> = (1..=l).map(|j| (1..=k).map(|i| (i - 1) * k + j).collect()).collect();
    let mut seen = vec![0usize; k * l + 1];
    let mut in_range = true;
    for p in positions.iter().flatten() {
        if *p > k * l {
            in_range = false;
        } else {
            seen[*p] += 1;
        }
    }
    let injective = in_range && seen[1..].iter().all(|&c| c == 1);
    let agrees = injective && {
        let ours = plegma_from_flat(flat, k, l)?;
        positions
            .iter()
            .zip(ours.members())
            .all(|(row, s)| row.iter().map(|&p| flat.at(p)).eq(s.elems().iter().copied()))
    };
    Ok(AlternativeFormulaReport { positions, injective, agrees })
}

/// All plegma `l`-tuples in `[M]^k`, lexicographic in their flats.
pub fn enumerate_plegma(universe: &Universe, k: usize, l: usize) -> Result<impl Iterator<Item = PlegmaTuple>> {
    if k == 0 || l == 0 {
        return invalid("k and l must be positive");
    }
    let elems = universe.elements()?;
    Ok(PlegmaIter { elems, k, l, pos: None, done: false })
}

/// Owning lexicographic iterator over flats.
struct PlegmaIter {
    elems: Vec<u32>,
    k: usize,
    l: usize,
    pos: Option<Vec<usize>>,
    done: bool,
}

impl Iterator for PlegmaIter {
    type Item = PlegmaTuple;

    fn next(&mut self) -> Option<PlegmaTuple> {
        let r = self.k * self.l;
        let n = self.elems.len();
        if self.done || r > n {
            return None;
        }
        match &mut self.pos {
            None => self.pos = Some((0..r).collect()),
            Some(idx) => {
                let mut i = r;
                loop {
                    if i == 0 {
                        self.done = true;
                        return None;
                    }
                    i -= 1;
                    if idx[i] < n - r + i {
                        idx[i] += 1;
                        for j in i + 1..r {
                            idx[j] = idx[j - 1] + 1;
                        }
                        break;
                    }
                }
            }
        }
        let idx = self.pos.as_ref().unwrap();
        let flat = FinSubset::from_sorted(idx.iter().map(|&i| self.elems[i]).collect());
        plegma_from_flat(&flat, self.k, self.l).ok()
    }
}

/// `C(n, kl)`.
pub fn count_plegma(n: usize, k: usize, l: usize) -> u128 {
    binomial(n as u64, (k * l) as u64)
}

/// Plegma `l`-tuples in `[elems]^k` as flats, for callers that want slices.
pub fn plegma_flats(elems: &[u32], k: usize, l: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
    combinations(elems, k * l)
}

/// Members at `indices`, projected to coordinates `coords` (both 1-based).
pub fn restrict(t: &PlegmaTuple, coords: &FinSubset, indices: &FinSubset) -> Result<PlegmaTuple> {
    if coords.is_empty() || indices.is_empty() {
        return invalid("restrict needs nonempty selectors");
    }
    if coords.max().unwrap() as usize > t.k() {
        return invalid(format!("coordinate selector {coords} exceeds k = {}", t.k()));
    }
    if indices.max().unwrap() as usize > t.l() {
        return invalid(format!("index selector {indices} exceeds l = {}", t.l()));
    }
    let cs: Vec<usize> = coords.elems().iter().map(|&c| c as usize).collect();
    let members = indices
        .elems()
        .iter()
        .map(|&j| t.member(j as usize).select(&cs))
        .collect::<Result<Vec<_>>>()?;
    PlegmaTuple::new(members)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn is_plegma_examples() {
        assert!(is_plegma(&[s(&[1, 3]), s(&[2, 4])]).unwrap());
        assert!(!is_plegma(&[s(&[1, 4]), s(&[2, 3])]).unwrap());
        assert!(is_plegma(&[s(&[5, 9])]).unwrap());
        assert!(is_plegma(&[s(&[1, 3]), s(&[2])]).is_err());
        assert!(is_plegma(&[s(&[2]), s(&[5]), s(&[7])]).unwrap());
        assert!(!is_plegma(&[s(&[5]), s(&[2])]).unwrap());
    }

    #[test]
    fn flat_examples() {
        let t = plegma_from_flat(&s(&[1, 2, 3, 4]), 2, 2).unwrap();
        assert_eq!(t.members(), &[s(&[1, 3]), s(&[2, 4])]);
        let t = plegma_from_flat(&s(&[2, 5, 7, 9]), 2, 2).unwrap();
        assert_eq!(t.members(), &[s(&[2, 7]), s(&[5, 9])]);
        let t = plegma_from_flat(&s(&[1, 2, 3]), 3, 1).unwrap();
        assert_eq!(t.members(), &[s(&[1, 2, 3])]);
        assert_eq!(flat_from_plegma(&t), s(&[1, 2, 3]));
        assert!(plegma_from_flat(&s(&[1, 2, 3]), 2, 2).is_err());
    }

    #[test]
    fn alternative_rule_breaks_when_l_differs_from_k() {
        let r = alternative_formula(&s(&[1, 2, 3, 4, 5, 6]), 2, 3).unwrap();
        assert!(!r.injective);
        let r = alternative_formula(&s(&[1, 2, 3, 4]), 2, 2).unwrap();
        assert!(r.injective && r.agrees);
    }

    #[test]
    fn enumerate_examples() {
        let all: Vec<_> = enumerate_plegma(&Universe::horizon(5), 2, 2).unwrap().collect();
        assert_eq!(all.len(), 5);
        let four: Vec<_> = enumerate_plegma(&Universe::horizon(4), 2, 2).unwrap().collect();
        assert_eq!(four.len(), 1);
        assert_eq!(four[0].members(), &[s(&[1, 3]), s(&[2, 4])]);
        assert_eq!(enumerate_plegma(&Universe::horizon(3), 2, 2).unwrap().count(), 0);
        assert!(enumerate_plegma(&Universe::Naturals, 2, 2).is_err());
    }

    #[test]
    fn restrict_examples() {
        let t = PlegmaTuple::new(vec![s(&[1, 4]), s(&[2, 5])]).unwrap();
        assert_eq!(restrict(&t, &s(&[2]), &s(&[1, 2])).unwrap().members(), &[s(&[4]), s(&[5])]);
        assert_eq!(restrict(&t, &s(&[1]), &s(&[1])).unwrap().members(), &[s(&[1])]);
        let u = PlegmaTuple::new(vec![s(&[1, 3]), s(&[2, 4])]).unwrap();
        assert_eq!(restrict(&u, &s(&[1, 2]), &s(&[2])).unwrap().members(), &[s(&[2, 4])]);
        assert!(restrict(&u, &s(&[3]), &s(&[1])).is_err());
        assert!(restrict(&u, &s(&[1]), &s(&[3])).is_err());
    }

    #[test]
    fn json_shape() {
        let t = PlegmaTuple::new(vec![s(&[1, 3]), s(&[2, 4])]).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), "[[1,3],[2,4]]");
        assert!(serde_json::from_str::<PlegmaTuple>("[[1,4],[2,3]]").is_err());
    }
}
