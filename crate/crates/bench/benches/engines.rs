use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use plegma_lab::norms::{NormEngine, SchreierMode, SchreierPlegmatic, Tsirelson, TsirelsonConfig};
use plegma_lab::num::rat;
use plegma_lab::plegma::enumerate_plegma;
use plegma_lab::ramsey::largest_plegma_free;
use plegma_lab::sm::cesaro_scan;
use plegma_lab::zoo::from_spec;
use plegma_lab::{FinSubset, SparseVec, Universe};
use serde_json::json;

/// `n` pairs `(i, i + n)` with alternating signs.
fn pairs(n: u32) -> SparseVec {
    SparseVec::from_entries((1..=n).map(|i| {
        (FinSubset::new(vec![i, i + n]).unwrap(), rat(if i % 2 == 0 { -1 } else { 1 }, i as i64 % 3 + 1))
    }))
    .unwrap()
}

fn plegma(c: &mut Criterion) {
    c.bench_function("enumerate k=2 l=3 n=14", |b| {
        b.iter(|| enumerate_plegma(&Universe::horizon(14), 2, 3).unwrap().count())
    });
    c.bench_function("largest free family n=6 k=2 l=2", |b| b.iter(|| largest_plegma_free(6, 2, 2, usize::MAX).unwrap().size));
}

fn schreier(c: &mut Criterion) {
    let mut g = c.benchmark_group("schreier plegmatic k=1");
    g.sample_size(10);
    for n in [6u32, 9, 12] {
        let x = pairs(n);
        g.bench_with_input(BenchmarkId::new("exact", n), &x, |b, x| {
            b.iter(|| SchreierPlegmatic::new(1, SchreierMode::Exact).evaluate(x).unwrap().value)
        });
    }
    for n in [12u32, 40] {
        let x = pairs(n);
        g.bench_with_input(BenchmarkId::new("greedy", n), &x, |b, x| {
            b.iter(|| SchreierPlegmatic::new(1, SchreierMode::Greedy).evaluate(x).unwrap().lower)
        });
    }
    g.finish();
}

fn tsirelson(c: &mut Criterion) {
    let eng = Tsirelson::new(TsirelsonConfig::desk()).unwrap();
    let x = SparseVec::from_nat((1..=24).map(|i| (i, rat(1, i as i64))));
    c.bench_function("tsirelson desk, 24 points", |b| b.iter(|| eng.eval(&x).unwrap()));
}

fn cesaro(c: &mut Criterion) {
    let g = from_spec(&json!({"name": "xk_basis", "k": 1})).unwrap();
    let mut grp = c.benchmark_group("cesaro");
    grp.sample_size(10);
    grp.bench_function("xk_basis n=1..8 with functionals", |b| {
        b.iter(|| cesaro_scan(&g, &Universe::Naturals, &(1..=8).collect::<Vec<_>>(), true).unwrap().rows.len())
    });
    grp.finish();
}

criterion_group!(benches, plegma, schreier, tsirelson, cesaro);
criterion_main!(benches);
