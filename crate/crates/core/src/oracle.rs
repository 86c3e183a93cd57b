//! Slow reference computations written straight from the definitions. They
//! share no code with the fast paths they are compared against.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::combin::combinations;
use crate::num::Rational;
use crate::subset::FinSubset;
use crate::vector::SparseVec;

/// Conditions (i) and (ii) checked literally on a list of equal-size sets.
pub fn plegma_by_definition(family: &[FinSubset]) -> bool {
    let rows: Vec<&[u32]> = family.iter().map(|s| s.elems()).collect();
    rows_are_plegma(&rows)
}

fn rows_are_plegma(rows: &[&[u32]]) -> bool {
    let Some(first) = rows.first() else { return false };
    let k = first.len();
    let l = rows.len();
    if k == 0 || rows.iter().any(|s| s.len() != k) {
        return false;
    }
    for i in 0..k {
        for j in 0..l - 1 {
            if rows[j][i] >= rows[j + 1][i] {
                return false;
            }
        }
    }
    for i in 0..k - 1 {
        if rows[l - 1][i] >= rows[0][i + 1] {
            return false;
        }
    }
    true
}

/// Every ordered `l`-tuple of `k`-subsets of `{1..n}` passing the definition.
pub fn plegma_census(n: usize, k: usize, l: usize) -> Vec<Vec<FinSubset>> {
    let elems: Vec<u32> = (1..=n as u32).collect();
    let sets: Vec<Vec<u32>> = combinations(&elems, k).collect();
    let total = sets.len();
    (0..total)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let mut idx = vec![0usize; l];
            idx[0] = first;
            let mut rows: Vec<&[u32]> = vec![&sets[first]; l];
            loop {
                for (r, &i) in rows.iter_mut().zip(&idx) {
                    *r = &sets[i];
                }
                if rows_are_plegma(&rows) {
                    found.push(rows.iter().map(|r| FinSubset::from_sorted(r.to_vec())).collect());
                }
                let mut p = l;
                loop {
                    p -= 1;
                    if p == 0 {
                        return found;
                    }
                    idx[p] += 1;
                    if idx[p] < total {
                        break;
                    }
                    idx[p] = 0;
                }
            }
        })
        .collect()
}

/// Blocks `F_1 < ... < F_{k+1}` of one size, each a column plus at most
/// `max_pad` integers, with `|F_1| <= min F_1`. Every candidate block is
/// listed; a chain exists iff, block by block, some candidate starts above
/// the least reachable maximum of the previous block.
pub fn schreier_feasible_by_padding(family: &[FinSubset], max_pad: usize) -> bool {
    let kk = family[0].len();
    let cols: Vec<Vec<u32>> = (0..kk)
        .map(|i| {
            let mut c: Vec<u32> = family.iter().map(|s| s.elems()[i]).collect();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    let top = cols.iter().flatten().copied().max().unwrap() + max_pad as u32 + 1;
    let widest = cols.iter().map(Vec::len).max().unwrap();
    let narrowest = cols.iter().map(Vec::len).min().unwrap();
    for m in widest..=narrowest + max_pad {
        let mut reach = 0u32;
        let mut ok = true;
        for (i, col) in cols.iter().enumerate() {
            let free: Vec<u32> = (1..=top).filter(|x| !col.contains(x)).collect();
            let mut best: Option<u32> = None;
            for pad in combinations(&free, m - col.len()) {
                let mut f: Vec<u32> = col.iter().copied().chain(pad).collect();
                f.sort_unstable();
                let valid = f[0] > reach && (i > 0 || f.len() as u32 <= f[0]);
                if valid {
                    let mx = *f.last().unwrap();
                    best = Some(best.map_or(mx, |b: u32| b.min(mx)));
                }
            }
            match best {
                Some(b) => reach = b,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return true;
        }
    }
    false
}

/// Squared Schreier plegmatic norm: the largest `Σ_i (ℓ¹ mass of block i)²`
/// over all set partitions of the support into feasible blocks, found by
/// listing every partition.
pub fn schreier_norm_squared(x: &SparseVec, max_pad: usize, cache: &mut HashMap<Vec<FinSubset>, bool>) -> Rational {
    let pts: Vec<(FinSubset, Rational)> = x.iter().map(|(s, a)| (s.clone(), a.abs())).collect();
    let n = pts.len();
    if n == 0 {
        return Rational::zero();
    }
    let mut best = Rational::zero();
    let mut label = vec![0usize; n];
    // restricted growth strings
    loop {
        let blocks = label.iter().max().unwrap() + 1;
        let mut total = Rational::zero();
        let mut feasible = true;
        for b in 0..blocks {
            let members: Vec<FinSubset> = (0..n).filter(|&i| label[i] == b).map(|i| pts[i].0.clone()).collect();
            let ok = *cache.entry(members.clone()).or_insert_with(|| schreier_feasible_by_padding(&members, max_pad));
            if !ok {
                feasible = false;
                break;
            }
            let mass: Rational = (0..n).filter(|&i| label[i] == b).map(|i| pts[i].1.clone()).sum();
            total += &mass * &mass;
        }
        if feasible && total > best {
            best = total;
        }
        let mut p = n;
        loop {
            if p == 1 {
                return best;
            }
            p -= 1;
            let cap = label[..p].iter().max().unwrap() + 1;
            if label[p] < cap {
                label[p] += 1;
                for q in label.iter_mut().skip(p + 1) {
                    *q = 0;
                }
                break;
            }
        }
    }
}

/// `max(max_k |Σ_{j<=k} a_j|, max_k |Σ_{j>=k} a_j|)`.
pub fn summing_formula(a: &[Rational]) -> Rational {
    let mut best = Rational::zero();
    let mut acc = Rational::zero();
    for c in a {
        acc += c;
        best = best.max(acc.abs());
    }
    acc = Rational::zero();
    for c in a.iter().rev() {
        acc += c;
        best = best.max(acc.abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn definition_examples() {
        assert!(plegma_by_definition(&[s(&[1, 3]), s(&[2, 4])]));
        assert!(!plegma_by_definition(&[s(&[1, 2]), s(&[3, 4])]));
        assert_eq!(plegma_census(4, 2, 2).len(), 1);
        assert_eq!(plegma_census(5, 1, 3).len(), 10);
    }

    #[test]
    fn padding_examples() {
        assert!(schreier_feasible_by_padding(&[s(&[2, 4]), s(&[3, 5])], 4));
        assert!(!schreier_feasible_by_padding(&[s(&[1, 3]), s(&[2, 4])], 4));
        assert!(schreier_feasible_by_padding(&[s(&[1, 2])], 0));
        // columns {3} and {4, 5, 6}: F_1 must grow to three elements below 4
        assert!(!schreier_feasible_by_padding(&[s(&[3, 4]), s(&[3, 5]), s(&[3, 6])], 4));
        assert!(schreier_feasible_by_padding(&[s(&[3, 7]), s(&[3, 8])], 4));
    }

    #[test]
    fn partition_examples() {
        let mut cache = HashMap::new();
        let x = SparseVec::from_entries([(s(&[1, 3]), int(1)), (s(&[2, 4]), int(1))]).unwrap();
        assert_eq!(schreier_norm_squared(&x, 4, &mut cache), int(2));
        let y = SparseVec::from_entries([(s(&[2, 4]), int(1)), (s(&[3, 5]), int(-1))]).unwrap();
        assert_eq!(schreier_norm_squared(&y, 4, &mut cache), int(4));
    }

    #[test]
    fn summing_examples() {
        assert_eq!(summing_formula(&[int(1), int(-1)]), int(1));
        assert_eq!(summing_formula(&[int(1), int(1), int(-3)]), int(3));
        assert_eq!(summing_formula(&[int(1), int(2), int(-2)]), int(3));
    }
}
