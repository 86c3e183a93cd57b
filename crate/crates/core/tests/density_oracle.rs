//! Brute-force check of the frozen k = 2, l = 2 density thresholds. Every
//! subfamily of [{1..n}]^2 is tried; the plegma test is the interleaving
//! a(1) < b(1) < a(2) < b(2) written out directly.

use plegma_lab::acceptance::FROZEN_K2_L2;
use plegma_lab::num::rat;
use plegma_lab::ramsey::{density_threshold_scan, largest_plegma_free, ThresholdRule};
use plegma_lab::Rational;

fn pairs(n: u32) -> Vec<(u32, u32)> {
    (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect()
}

fn brute_largest_free(n: u32) -> usize {
    let sets = pairs(n);
    let m = sets.len();
    let mut conflict = vec![0u32; m];
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            if a.0 < b.0 && b.0 < a.1 && a.1 < b.1 {
                conflict[i] |= 1 << j;
                conflict[j] |= 1 << i;
            }
        }
    }
    (0u32..1 << m)
        .filter(|&mask| (0..m).all(|i| mask & (1 << i) == 0 || mask & conflict[i] == 0))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn thresholds(free: &[usize], delta: &Rational) -> (usize, usize) {
    let mut forcing = None;
    let mut strict = None;
    for (i, &f) in free.iter().enumerate() {
        let n = i as i64 + 1;
        let total = rat(n * (n - 1) / 2, 1);
        if total == rat(0, 1) {
            continue;
        }
        let dt = delta * total;
        let f = rat(f as i64, 1);
        if forcing.is_none() && dt >= &f + rat(1, 1) {
            forcing = Some(n as usize);
        }
        if strict.is_none() && f < dt {
            strict = Some(n as usize);
        }
    }
    (forcing.expect("forcing threshold within n <= 6"), strict.expect("strict threshold within n <= 6"))
}

#[test]
fn largest_free_matches_brute_force() {
    for n in 1..=6u32 {
        let lib = largest_plegma_free(n as usize, 2, 2, usize::MAX).unwrap();
        assert!(lib.exact);
        assert_eq!(lib.size, brute_largest_free(n), "n = {n}");
    }
}

#[test]
fn frozen_thresholds_match_brute_force() {
    let free: Vec<usize> = (1..=6).map(brute_largest_free).collect();
    for &(num, den, forcing, strict) in &FROZEN_K2_L2 {
        let delta = rat(num, den);
        assert_eq!(thresholds(&free, &delta), (forcing, strict), "delta = {num}/{den}");
        let scan = density_threshold_scan(2, 2, &delta, 8, ThresholdRule::Forcing).unwrap();
        assert_eq!(scan.threshold_n, Some(forcing));
        assert_eq!(scan.strict_threshold_n, Some(strict));
    }
}
