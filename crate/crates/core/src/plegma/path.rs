//! Skipped sets, plegma paths and distances in the plegma graph.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::is_plegma_pair;
use crate::error::{invalid, Result};
use crate::subset::{FinSubset, Universe};

/// Some element of `M` lies strictly between each pair of consecutive
/// elements of `s`.
pub fn is_skipped(s: &FinSubset, m: &Universe) -> Result<bool> {
    if !m.contains_set(s) {
        return invalid(format!("{s} is not a subset of {m}"));
    }
    Ok(s.elems().windows(2).all(|w| m.next_after(w[0]).is_some_and(|x| x < w[1])))
}

/// The path `(s_0, ..., s_k)` from `s` to `t` built from the interleavings
/// `s̃, t̃ ∈ [M]^{2k-1}` with `s̃(2i-1) = s(i)`; each even slot takes the
/// least element of `M` after `s(i)`.
pub fn plegma_path_between(s: &FinSubset, t: &FinSubset, m: &Universe) -> Result<Vec<FinSubset>> {
    let k = s.len();
    if k == 0 || t.len() != k {
        return invalid(format!("{s} and {t} must be nonempty of equal size"));
    }
    if !s.precedes(t) {
        return invalid(format!("need {s} < {t} (max s < min t)"));
    }
    if !is_skipped(s, m)? {
        return invalid(format!("{s} is not skipped in {m}"));
    }
    if !is_skipped(t, m)? {
        return invalid(format!("{t} is not skipped in {m}"));
    }
    let interleave = |x: &FinSubset| -> Vec<u32> {
        let mut v = Vec::with_capacity(2 * k - 1);
        for i in 0..k {
            v.push(x.elems()[i]);
            if i + 1 < k {
                v.push(m.next_after(x.elems()[i]).expect("skipped set has a successor"));
            }
        }
        v
    };
    let (st, tt) = (interleave(s), interleave(t));
    // 1-based: s_j = {s̃(2i-1+j): i ≤ k-j} ∪ {t̃(2i-1+k-j): i ≤ j}
    let path = (0..=k)
        .map(|j| {
            let mut v: Vec<u32> = (1..=k - j).map(|i| st[2 * i - 2 + j]).collect();
            v.extend((1..=j).map(|i| tt[2 * i - 2 + k - j]));
            FinSubset::from_sorted(v)
        })
        .collect::<Vec<_>>();
    debug_assert!(path.windows(2).all(|w| is_plegma_pair(&w[0], &w[1])));
    Ok(path)
}

/// All `u ∈ [elems]^k` with `(s, u)` a plegma pair, lexicographically.
pub fn plegma_successors(s: &FinSubset, elems: &[u32]) -> Vec<FinSubset> {
    let k = s.len();
    let ranges: Vec<Vec<u32>> = (0..k)
        .map(|i| {
            let lo = s.elems()[i];
            let hi = if i + 1 < k { s.elems()[i + 1] } else { u32::MAX };
            elems.iter().copied().filter(|&x| lo < x && x < hi).collect()
        })
        .collect();
    if ranges.iter().any(|r| r.is_empty()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        out.push(FinSubset::from_sorted((0..k).map(|i| ranges[i][idx[i]]).collect()));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < ranges[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Reachable(usize),
    Unreachable,
}

/// Breadth-first distance from `s` to `t` in the directed graph on
/// `[universe]^k` whose edges are the plegma pairs.
pub fn plegma_distance(s: &FinSubset, t: &FinSubset, universe: &Universe) -> Result<Distance> {
    let elems = universe.elements()?;
    if s.is_empty() || s.len() != t.len() {
        return invalid("s and t must be nonempty of equal size");
    }
    if !universe.contains_set(s) || !universe.contains_set(t) {
        return invalid("s and t must lie in the universe");
    }
    if s == t {
        return Ok(Distance::Reachable(0));
    }
    let mut dist: HashMap<FinSubset, usize> = HashMap::from([(s.clone(), 0)]);
    let mut queue = VecDeque::from([s.clone()]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for v in plegma_successors(&u, &elems) {
            if dist.contains_key(&v) {
                continue;
            }
            if &v == t {
                return Ok(Distance::Reachable(d + 1));
            }
            dist.insert(v.clone(), d + 1);
            queue.push_back(v);
        }
    }
    Ok(Distance::Unreachable)
}

/// Depth-first enumeration of every plegma path from `s` with at most
/// `max_len` edges. The visitor sees each path; returning `false` stops the
/// walk. Returns the number of paths visited.
pub fn enumerate_paths_upto(
    s: &FinSubset,
    elems: &[u32],
    max_len: usize,
    visit: &mut dyn FnMut(&[FinSubset]) -> bool,
) -> u64 {
    fn go(path: &mut Vec<FinSubset>, elems: &[u32], max_len: usize, visit: &mut dyn FnMut(&[FinSubset]) -> bool, n: &mut u64) -> bool {
        *n += 1;
        if !visit(path) {
            return false;
        }
        if path.len() > max_len {
            return true;
        }
        for v in plegma_successors(path.last().unwrap(), elems) {
            path.push(v);
            let go_on = go(path, elems, max_len, visit, n);
            path.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    let mut n = 0;
    go(&mut vec![s.clone()], elems, max_len, visit, &mut n);
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn skipped_examples() {
        assert!(is_skipped(&s(&[2, 6]), &Universe::evens()).unwrap());
        assert!(!is_skipped(&s(&[2, 4]), &Universe::evens()).unwrap());
        assert!(is_skipped(&s(&[4]), &Universe::evens()).unwrap());
        assert!(is_skipped(&s(&[3, 4]), &Universe::evens()).is_err());
    }

    #[test]
    fn path_examples() {
        let p = plegma_path_between(&s(&[1, 3]), &s(&[5, 7]), &Universe::Naturals).unwrap();
        assert_eq!(p, vec![s(&[1, 3]), s(&[2, 6]), s(&[5, 7])]);
        let p = plegma_path_between(&s(&[2]), &s(&[7]), &Universe::Naturals).unwrap();
        assert_eq!(p, vec![s(&[2]), s(&[7])]);
        let p = plegma_path_between(&s(&[1, 3, 5]), &s(&[7, 9, 11]), &Universe::Naturals).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.windows(2).all(|w| is_plegma_pair(&w[0], &w[1])));
        assert!(plegma_path_between(&s(&[1, 2]), &s(&[5, 7]), &Universe::Naturals).is_err());
        assert!(plegma_path_between(&s(&[5, 7]), &s(&[1, 3]), &Universe::Naturals).is_err());
        let p = plegma_path_between(&s(&[2, 6]), &s(&[10, 14]), &Universe::evens()).unwrap();
        assert!(p.iter().all(|x| x.elems().iter().all(|m| m % 2 == 0)));
    }

    #[test]
    fn distance_examples() {
        let u = Universe::horizon(7);
        assert_eq!(plegma_distance(&s(&[1, 3]), &s(&[5, 7]), &u).unwrap(), Distance::Reachable(2));
        assert_eq!(plegma_distance(&s(&[1, 3]), &s(&[1, 3]), &u).unwrap(), Distance::Reachable(0));
        let u = Universe::horizon(11);
        assert_eq!(plegma_distance(&s(&[1, 3, 5]), &s(&[7, 9, 11]), &u).unwrap(), Distance::Reachable(3));
        assert_eq!(plegma_distance(&s(&[5, 7]), &s(&[1, 3]), &u).unwrap(), Distance::Unreachable);
    }

    #[test]
    fn successors_are_plegma_pairs() {
        let elems: Vec<u32> = (1..=9).collect();
        let succ = plegma_successors(&s(&[2, 5]), &elems);
        assert_eq!(succ.len(), 2 * 4);
        assert!(succ.iter().all(|u| is_plegma_pair(&s(&[2, 5]), u)));
    }
}
