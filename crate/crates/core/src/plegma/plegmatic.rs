//! Plegmatic and Schreier plegmatic families of `(k+1)`-sets.
//!
//! `P ⊆ [ℕ]^{k+1}` is plegmatic when there are blocks `F_1 < ... < F_{k+1}`
//! of a common size with `P ⊆ F_1 × ... × F_{k+1}`; Schreier plegmatic adds
//! `|F_1| <= min F_1`. Only the coordinate columns `C_i = {s(i) : s ∈ P}`
//! matter, and the common size can always be taken to be `c = max |C_i|`:
//! dropping padding from larger blocks keeps every constraint.

use serde::Serialize;

use crate::combin::combinations;
use crate::error::{invalid, Result};
use crate::subset::FinSubset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// `(F_1, ..., F_{k+1})` when feasible.
    pub witness: Option<Vec<FinSubset>>,
    /// Integers added to the columns, summed over blocks.
    pub padding: usize,
}

impl Feasibility {
    fn no() -> Self {
        Feasibility { feasible: false, witness: None, padding: 0 }
    }
}

fn columns(p: &[FinSubset]) -> Result<Vec<Vec<u32>>> {
    let Some(first) = p.first() else {
        return invalid("family must be nonempty");
    };
    let kk = first.len();
    if kk == 0 || p.iter().any(|s| s.len() != kk) {
        return invalid("family members must be nonempty sets of one common size");
    }
    Ok((0..kk)
        .map(|i| {
            let mut c: Vec<u32> = p.iter().map(|s| s.elems()[i]).collect();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect())
}

fn separated(cols: &[Vec<u32>]) -> bool {
    cols.windows(2).all(|w| w[0].last() < w[1].first())
}

/// Right-to-left greedy placement. Each block spends its own internal gaps
/// first, then what the block to its right left over of the shared gap, and
/// only then the upper end of the gap to its left; the last block can always
/// pad upward. Taking as little as possible from the left gap is optimal by
/// an exchange argument, so this decides feasibility exactly.
pub fn schreier_greedy(p: &[FinSubset], schreier: bool) -> Result<Feasibility> {
    let cols = columns(p)?;
    if !separated(&cols) {
        return Ok(Feasibility::no());
    }
    let kk = cols.len();
    let c = cols.iter().map(|v| v.len()).max().unwrap();
    let lb = if schreier { c as u32 } else { 1 };
    if cols[0][0] < lb {
        return Ok(Feasibility::no());
    }
    let mut extra: Vec<Vec<u32>> = vec![Vec::new(); kk];
    // lowest element of the gap right of block i already used by block i+1
    let mut right_used_from: Vec<u32> = cols.iter().skip(1).map(|v| v[0]).chain([u32::MAX]).collect();
    for i in (0..kk).rev() {
        let col = &cols[i];
        let mut need = c - col.len();
        let (lo, hi) = (col[0], *col.last().unwrap());
        let mut x = lo;
        while need > 0 && x < hi {
            if col.binary_search(&x).is_err() {
                extra[i].push(x);
                need -= 1;
            }
            x += 1;
        }
        let mut y = hi + 1;
        while need > 0 && y < right_used_from[i] {
            extra[i].push(y);
            need -= 1;
            y += 1;
        }
        let floor = if i == 0 { lb } else { *cols[i - 1].last().unwrap() + 1 };
        let mut z = lo;
        while need > 0 && z > floor {
            z -= 1;
            extra[i].push(z);
            need -= 1;
        }
        if need > 0 {
            return Ok(Feasibility::no());
        }
        if i > 0 {
            right_used_from[i - 1] = z;
        }
    }
    let padding = extra.iter().map(|e| e.len()).sum();
    let witness = cols
        .iter()
        .zip(extra)
        .map(|(col, e)| {
            let mut v: Vec<u32> = col.iter().copied().chain(e).collect();
            v.sort_unstable();
            FinSubset::from_sorted(v)
        })
        .collect();
    Ok(Feasibility { feasible: true, witness: Some(witness), padding })
}

/// Exhaustive search over padding placements with at most `max_pad` added
/// integers per block, over every common size the budget allows.
pub fn schreier_exhaustive(p: &[FinSubset], max_pad: usize, schreier: bool) -> Result<Feasibility> {
    let cols = columns(p)?;
    let kk = cols.len();
    let c = cols.iter().map(|v| v.len()).max().unwrap();
    let min_col = cols.iter().map(|v| v.len()).min().unwrap();

    fn go(cols: &[Vec<u32>], i: usize, m: usize, prev_max: u32, schreier: bool, acc: &mut Vec<FinSubset>) -> bool {
        if i == cols.len() {
            return true;
        }
        let col = &cols[i];
        let need = m - col.len();
        let upper = match cols.get(i + 1) {
            Some(next) => next[0],
            None => col.last().unwrap() + m as u32 + 1,
        };
        let lower = if i == 0 { 1 } else { prev_max + 1 };
        if col[0] < lower {
            return false;
        }
        let cand: Vec<u32> = (lower..upper).filter(|x| col.binary_search(x).is_err()).collect();
        for pad in combinations(&cand, need) {
            let mut f: Vec<u32> = col.iter().copied().chain(pad).collect();
            f.sort_unstable();
            if i == 0 && schreier && (f[0] as usize) < m {
                continue;
            }
            if i > 0 && f[0] <= prev_max {
                continue;
            }
            let fmax = *f.last().unwrap();
            acc.push(FinSubset::from_sorted(f));
            if go(cols, i + 1, m, fmax, schreier, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }

    for m in c..=min_col + max_pad {
        let mut acc = Vec::with_capacity(kk);
        if go(&cols, 0, m, 0, schreier, &mut acc) {
            let padding = acc.iter().map(|f| f.len()).sum::<usize>() - cols.iter().map(|v| v.len()).sum::<usize>();
            return Ok(Feasibility { feasible: true, witness: Some(acc), padding });
        }
    }
    Ok(Feasibility::no())
}

/// Exact decision with witness. `max_pad = None` allows enough padding to
/// reach the common size `max |C_i|`; a smaller budget answers the bounded
/// question. The greedy placement is run alongside and must agree whenever
/// the budget is large enough for it to matter.
pub fn is_schreier_plegmatic(p: &[FinSubset], max_pad: Option<usize>) -> Result<Feasibility> {
    let cols = columns(p)?;
    let needed = cols.iter().map(|v| v.len()).max().unwrap() - cols.iter().map(|v| v.len()).min().unwrap();
    let budget = max_pad.unwrap_or(needed);
    let exhaustive = schreier_exhaustive(p, budget, true)?;
    let greedy = schreier_greedy(p, true)?;
    if budget >= needed && greedy.feasible != exhaustive.feasible {
        return invalid(format!("internal disagreement between greedy and exhaustive feasibility on {p:?}"));
    }
    Ok(exhaustive)
}

/// Plegmatic without the Schreier condition.
pub fn is_plegmatic(p: &[FinSubset]) -> Result<bool> {
    Ok(schreier_greedy(p, false)?.feasible)
}

/// Every member of each `G_{i+1}` forms a plegmatic pair with some member of
/// `G_i`.
pub fn is_weakly_plegmatic_path(g: &[Vec<FinSubset>]) -> Result<bool> {
    let kk = g.iter().flatten().next().map(|s| s.len());
    if let Some(kk) = kk {
        if kk == 0 || g.iter().flatten().any(|s| s.len() != kk) {
            return invalid("all members must be nonempty of one common size");
        }
    }
    for w in g.windows(2) {
        for s2 in &w[1] {
            let mut ok = false;
            for s1 in &w[0] {
                if is_plegmatic(&[s1.clone(), s2.clone()])? {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn schreier_examples() {
        let f = is_schreier_plegmatic(&[s(&[2, 4]), s(&[3, 5])], None).unwrap();
        assert!(f.feasible);
        assert_eq!(f.witness.unwrap(), vec![s(&[2, 3]), s(&[4, 5])]);
        assert!(!is_schreier_plegmatic(&[s(&[1, 3]), s(&[2, 4])], Some(4)).unwrap().feasible);
        let f = is_schreier_plegmatic(&[s(&[1, 2])], None).unwrap();
        assert_eq!(f.witness.unwrap(), vec![s(&[1]), s(&[2])]);
    }

    #[test]
    fn greedy_pads_where_needed() {
        // columns {3,5} and {9}: F_2 needs one more element, taken above 9
        let f = schreier_greedy(&[s(&[3, 9]), s(&[5, 9])], true).unwrap();
        assert!(f.feasible);
        assert_eq!(f.padding, 1);
        // columns {4} {5,6}: F_1 must grow downward to {3,4}
        let f = schreier_greedy(&[s(&[4, 5]), s(&[4, 6])], true).unwrap();
        assert_eq!(f.witness.unwrap(), vec![s(&[3, 4]), s(&[5, 6])]);
        // columns {3} {4,5,6}: F_1 = {1,2,3} has min 1 < 3
        assert!(!schreier_greedy(&[s(&[3, 4]), s(&[3, 6]), s(&[3, 5])], true).unwrap().feasible);
        assert!(schreier_greedy(&[s(&[3, 4]), s(&[3, 6]), s(&[3, 5])], false).unwrap().feasible);
        assert!(!schreier_greedy(&[s(&[2, 3]), s(&[2, 5]), s(&[2, 4])], false).unwrap().feasible);
    }

    #[test]
    fn weakly_plegmatic_examples() {
        assert!(is_weakly_plegmatic_path(&[vec![s(&[2, 5])], vec![s(&[3, 6])]]).unwrap());
        assert!(!is_weakly_plegmatic_path(&[vec![s(&[1, 2])], vec![s(&[2, 3])]]).unwrap());
        assert!(is_weakly_plegmatic_path(&[vec![s(&[1, 2])]]).unwrap());
    }
}
