use std::cmp::Ordering;
use std::collections::BTreeSet;

use plegma_lab::norms::{w_functional_eval, SchreierMode, SchreierPlegmatic};
use plegma_lab::num::rat;
use plegma_lab::plegma::{
    flat_from_plegma, is_plegma, is_plegma_pair, plegma_distance, plegma_from_flat, plegma_path_between, restrict,
    schreier_exhaustive, schreier_greedy, Distance,
};
use plegma_lab::{FinSubset, SparseVec, Universe};
use proptest::prelude::*;

fn set(v: Vec<u32>) -> FinSubset {
    FinSubset::new(v).unwrap()
}

/// A strictly increasing k-set inside {1..n}.
fn kset(k: usize, n: u32) -> impl Strategy<Value = FinSubset> {
    proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), k).prop_map(set)
}

fn family(k: usize, l: usize, n: u32) -> impl Strategy<Value = Vec<FinSubset>> {
    proptest::collection::vec(kset(k, n), l)
}

fn by_definition(f: &[FinSubset]) -> bool {
    let k = f[0].len();
    let mut seq = Vec::new();
    for i in 0..k {
        for s in f {
            seq.push(s.elems()[i]);
        }
    }
    seq.windows(2).all(|w| w[0] < w[1])
}

fn sparse(entries: Vec<(FinSubset, i64)>) -> SparseVec {
    let mut seen = BTreeSet::new();
    let mut kept: Vec<_> = entries.into_iter().filter(|(s, _)| seen.insert(s.clone())).map(|(s, a)| (s, rat(a, 1))).collect();
    kept.sort_by(|a, b| a.0.cmp(&b.0));
    SparseVec::from_entries(kept).unwrap()
}

fn vec2(n: u32, max: usize) -> impl Strategy<Value = SparseVec> {
    proptest::collection::vec((kset(2, n), (-4i64..=4).prop_filter("nonzero", |a| *a != 0)), 1..=max).prop_map(sparse)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn plegma_is_pairwise(k in 1usize..=3, l in 2usize..=4, seed in family(3, 4, 14)) {
        let f: Vec<FinSubset> = seed.iter().take(l).map(|s| s.prefix(k)).collect();
        let pairwise = (0..l).all(|i| (i + 1..l).all(|j| is_plegma_pair(&f[i], &f[j])));
        prop_assert_eq!(is_plegma(&f).unwrap(), by_definition(&f));
        prop_assert_eq!(is_plegma(&f).unwrap(), pairwise);
    }

    #[test]
    fn flat_round_trip(k in 1usize..=3, l in 1usize..=3, flat in proptest::sample::subsequence((1u32..=20).collect::<Vec<_>>(), 9)) {
        let flat = set(flat[..k * l].to_vec());
        let t = plegma_from_flat(&flat, k, l).unwrap();
        prop_assert!(by_definition(t.members()));
        prop_assert_eq!(flat_from_plegma(&t), flat);
    }

    #[test]
    fn restriction_stays_plegma(
        flat in proptest::sample::subsequence((1u32..=20).collect::<Vec<_>>(), 12),
        coords in proptest::sample::subsequence(vec![1u32, 2, 3], 1..=3),
        indices in proptest::sample::subsequence(vec![1u32, 2, 3, 4], 1..=4),
    ) {
        let t = plegma_from_flat(&set(flat), 3, 4).unwrap();
        let r = restrict(&t, &set(coords.clone()), &set(indices.clone())).unwrap();
        prop_assert!(by_definition(r.members()));
        prop_assert_eq!(r.k(), coords.len());
        prop_assert_eq!(r.l(), indices.len());
    }

    #[test]
    fn greedy_feasibility_matches_exhaustive(f in proptest::collection::vec(kset(2, 12), 1..=4), schreier in any::<bool>()) {
        let g = schreier_greedy(&f, schreier).unwrap();
        let e = schreier_exhaustive(&f, 4, schreier).unwrap();
        prop_assert_eq!(g.feasible, e.feasible);
    }

    #[test]
    fn schreier_norm_sign_invariant(x in vec2(9, 5), flips in proptest::collection::vec(any::<bool>(), 5)) {
        let eng = SchreierPlegmatic::new(1, SchreierMode::Exact);
        let support = x.support();
        let fx = x.sign_flip(|s| flips[support.binary_search(s).unwrap() % flips.len()]);
        let (a, b) = (eng.evaluate(&x).unwrap().value, eng.evaluate(&fx).unwrap().value);
        prop_assert_eq!(a.exact_cmp(&b), Some(Ordering::Equal));
    }

    #[test]
    fn certificate_attains_norm(x in vec2(9, 6)) {
        let ev = SchreierPlegmatic::new(1, SchreierMode::Exact).evaluate(&x).unwrap();
        let fv = w_functional_eval(&ev.certificate, &x).unwrap();
        prop_assert_eq!(fv.cmp_norm(&ev.value), Ordering::Equal);
        let greedy = SchreierPlegmatic::new(1, SchreierMode::Greedy).evaluate(&x).unwrap();
        prop_assert!(greedy.lower.to_f64() <= ev.value.to_f64() + 1e-12);
        prop_assert!(ev.value.to_f64() <= greedy.upper.to_f64() + 1e-12);
    }

    #[test]
    fn path_distance_is_k(k in 1usize..=3, gaps in proptest::collection::vec(2u32..=3, 6), start in 1u32..=3, jump in 1u32..=3) {
        let mut elems = vec![start];
        for g in &gaps[..2 * k - 1] {
            elems.push(elems.last().unwrap() + g);
        }
        let s = set(elems[..k].to_vec());
        let t = set(elems[k..2 * k].iter().map(|x| x + jump).collect());
        let path = plegma_path_between(&s, &t, &Universe::Naturals).unwrap();
        prop_assert_eq!(path.len(), k + 1);
        let horizon = Universe::horizon(*t.elems().last().unwrap());
        prop_assert_eq!(plegma_distance(&s, &t, &horizon).unwrap(), Distance::Reachable(k));
    }
}
