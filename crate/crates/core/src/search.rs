//! Hereditary sub-universe search.
//!
//! Given a predicate on `r`-subsets of a finite ground set, find `L` such that
//! every `r`-subset of `L` satisfies it. Plegma statements reduce to this form
//! through the flat bijection, since a plegma `l`-tuple of `k`-sets is the same
//! thing as a `kl`-subset.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::combin::combinations;

pub struct Outcome {
    pub best: Vec<u32>,
    /// False when the node budget ran out before the search space was exhausted.
    pub complete: bool,
}

struct Search<'a, F: Fn(&[u32]) -> bool> {
    ground: &'a [u32],
    arity: usize,
    accept: F,
    cache: RefCell<HashMap<Vec<u32>, bool>>,
    nodes: u64,
    budget: u64,
}

impl<F: Fn(&[u32]) -> bool> Search<'_, F> {
    fn flat_ok(&self, flat: &[u32]) -> bool {
        if let Some(&b) = self.cache.borrow().get(flat) {
            return b;
        }
        let b = (self.accept)(flat);
        self.cache.borrow_mut().insert(flat.to_vec(), b);
        b
    }

    /// Every new `arity`-subset containing `m` (the new maximum) must pass.
    fn can_add(&self, chosen: &[u32], m: u32) -> bool {
        if self.arity == 0 || chosen.len() + 1 < self.arity {
            return true;
        }
        let mut flat = Vec::with_capacity(self.arity);
        for c in combinations(chosen, self.arity - 1) {
            flat.clear();
            flat.extend_from_slice(&c);
            flat.push(m);
            if !self.flat_ok(&flat) {
                return false;
            }
        }
        true
    }

    fn first(&mut self, chosen: &mut Vec<u32>, next: usize, target: usize) -> bool {
        if chosen.len() == target {
            return true;
        }
        if chosen.len() + (self.ground.len() - next) < target {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        for i in next..self.ground.len() {
            if chosen.len() + (self.ground.len() - i) < target {
                break;
            }
            let m = self.ground[i];
            if self.can_add(chosen, m) {
                chosen.push(m);
                if self.first(chosen, i + 1, target) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    fn largest(&mut self, chosen: &mut Vec<u32>, next: usize, best: &mut Vec<u32>) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return;
        }
        for i in next..self.ground.len() {
            if chosen.len() + (self.ground.len() - i) <= best.len() {
                break;
            }
            let m = self.ground[i];
            if self.can_add(chosen, m) {
                chosen.push(m);
                self.largest(chosen, i + 1, best);
                chosen.pop();
            }
        }
    }
}

pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Lexicographically first `target`-subset of `ground` all of whose
/// `arity`-subsets are accepted.
pub fn first_subuniverse<F: Fn(&[u32]) -> bool>(
    ground: &[u32],
    arity: usize,
    target: usize,
    accept: F,
) -> Option<Vec<u32>> {
    let mut s = Search { ground, arity, accept, cache: RefCell::new(HashMap::new()), nodes: 0, budget: DEFAULT_BUDGET };
    let mut chosen = Vec::new();
    s.first(&mut chosen, 0, target).then_some(chosen)
}

/// A largest such subset (branch and bound).
pub fn largest_subuniverse<F: Fn(&[u32]) -> bool>(ground: &[u32], arity: usize, accept: F) -> Outcome {
    let mut s = Search { ground, arity, accept, cache: RefCell::new(HashMap::new()), nodes: 0, budget: DEFAULT_BUDGET };
    let mut chosen = Vec::new();
    let mut best = Vec::new();
    s.largest(&mut chosen, 0, &mut best);
    Outcome { best, complete: s.nodes <= s.budget }
}

/// Checks every `arity`-subset of `set` directly.
pub fn all_subsets_accepted<F: Fn(&[u32]) -> bool>(set: &[u32], arity: usize, accept: F) -> bool {
    combinations(set, arity).all(|c| accept(&c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_sums_even() {
        let ground: Vec<u32> = (1..=8).collect();
        let l = first_subuniverse(&ground, 2, 3, |p| (p[0] + p[1]) % 2 == 0).unwrap();
        assert_eq!(l, vec![1, 3, 5]);
        let big = largest_subuniverse(&ground, 2, |p| (p[0] + p[1]) % 2 == 0);
        assert_eq!(big.best.len(), 4);
        assert!(all_subsets_accepted(&big.best, 2, |p| (p[0] + p[1]) % 2 == 0));
    }
}
