//! Binomials and lexicographic combinations.

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::Rng;

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

pub fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// All `r`-subsets of `items` (given increasing) in lexicographic order.
pub struct Combinations<'a> {
    items: &'a [u32],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Combinations<'a> {
    pub fn new(items: &'a [u32], r: usize) -> Self {
        Combinations { items, idx: (0..r).collect(), done: r > items.len() }
    }
}

impl Iterator for Combinations<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.items[i]).collect();
        let n = self.items.len();
        let r = self.idx.len();
        let mut i = r;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < n - r + i {
                self.idx[i] += 1;
                for j in i + 1..r {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn combinations(items: &[u32], r: usize) -> Combinations<'_> {
    Combinations::new(items, r)
}

/// Uniform random `r`-subset of `items`, increasing.
pub fn random_combination<R: Rng + ?Sized>(rng: &mut R, items: &[u32], r: usize) -> Vec<u32> {
    let mut idx = sample(rng, items.len(), r).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomials() {
        let items: Vec<u32> = (1..=7).collect();
        for r in 0..=8 {
            assert_eq!(combinations(&items, r).count() as u128, binomial(7, r as u64));
        }
        let c: Vec<_> = combinations(&[1, 2, 3], 2).collect();
        assert_eq!(c, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(binomial_big(36, 2), BigInt::from(630));
    }
}
