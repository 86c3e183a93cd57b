//! Empirical `k`-spreading models: values `‖Σ a_j x_{s_j}‖` over plegma
//! tuples `(s_j)` with `s_1(1) >= M(l)`, stabilisation by thinning, `ℓ¹`
//! constants, splitting and `k`-Cesàro summability.

mod cesaro;
mod checks;

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::combin::{combinations, random_combination};
use crate::error::{invalid, Result};
use crate::num::{fmt_rational, NormValue, Rational};
use crate::plegma::{enumerate_plegma, plegma_from_flat, PlegmaTuple};
use crate::subset::{FinSubset, Universe};
use crate::vector::SparseVec;
use crate::zoo::KSeqGen;

pub use cesaro::{cesaro_limit, cesaro_mean, cesaro_scan, paper_functional, CesaroRow, CesaroTrace};
pub use checks::{
    composition_check, sign_flip_check, splitting_check, zero_sum_check, CompositionReport, SignFlipReport, SplitReport,
    ZeroSumReport,
};

pub const DEFAULT_RESOLUTION: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    /// `samples` uniform draws (with replacement) from the admissible flats.
    Sampled { seed: u64, samples: usize },
}

/// Nonzero tuples in `{-1, -1+1/q, ..., 1}^m`, lexicographic in the numerators.
pub fn coefficient_grid(m: usize, q: u32) -> Vec<Vec<Rational>> {
    let q = q.max(1) as i64;
    let steps: Vec<i64> = (-q..=q).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        if idx.iter().any(|&i| steps[i] != 0) {
            out.push(idx.iter().map(|&i| Rational::new(steps[i].into(), q.into())).collect());
        }
        let mut p = m;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < steps.len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// `a = b/q` for integer `b` with `Σ|b_i| = q`.
pub fn l1_sphere_grid(m: usize, q: u32) -> Vec<Vec<Rational>> {
    coefficient_grid(m, q)
        .into_iter()
        .filter(|a| a.iter().map(|x| x.abs()).sum::<Rational>() == Rational::one())
        .collect()
}

/// The plegma `m`-tuples of `[M]^k` with entries in `[M(l), horizon]`.
pub fn admissible_tuples(
    k: usize,
    universe: &Universe,
    l: usize,
    m: usize,
    horizon: u32,
    mode: Mode,
) -> Result<(Option<u32>, Vec<PlegmaTuple>)> {
    if m == 0 || m > l {
        return invalid(format!("need 1 <= m <= l, got m={m}, l={l}"));
    }
    let Some(threshold) = universe.element(l) else {
        return Ok((None, Vec::new()));
    };
    let elems: Vec<u32> = universe.elements_upto(horizon).into_iter().filter(|&e| e >= threshold).collect();
    let tuples = match mode {
        Mode::Exhaustive => enumerate_plegma(&Universe::explicit(elems)?, k, m)?.collect(),
        Mode::Sampled { seed, samples } => {
            if elems.len() < k * m {
                Vec::new()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..samples)
                    .map(|_| plegma_from_flat(&FinSubset::from_sorted(random_combination(&mut rng, &elems, k * m)), k, m))
                    .collect::<Result<_>>()?
            }
        }
    };
    Ok((Some(threshold), tuples))
}

#[derive(Clone, Debug)]
pub struct CoeffStats {
    pub coeffs: Vec<Rational>,
    pub min: NormValue,
    pub max: NormValue,
    pub mean: f64,
    pub count: usize,
}

impl CoeffStats {
    pub fn width(&self) -> f64 {
        self.max.to_f64() - self.min.to_f64()
    }

    /// `min == max`, decided exactly when the values allow it.
    pub fn is_flat(&self) -> bool {
        match self.min.exact_cmp(&self.max) {
            Some(o) => o == Ordering::Equal,
            None => self.width() == 0.0,
        }
    }

    pub fn midpoint(&self) -> f64 {
        (self.min.to_f64() + self.max.to_f64()) / 2.0
    }
}

fn coeff_label(a: &[Rational]) -> String {
    a.iter().map(fmt_rational).collect::<Vec<_>>().join(";")
}

#[derive(Clone, Debug)]
pub struct SMEstimate {
    pub generator: Value,
    pub l: usize,
    pub m: usize,
    pub horizon: u32,
    /// `M(l)`; `None` when the universe has fewer than `l` elements.
    pub threshold: Option<u32>,
    pub tuples: usize,
    pub rows: Vec<CoeffStats>,
}

impl SMEstimate {
    /// No admissible tuple exists within the horizon.
    pub fn is_empty(&self) -> bool {
        self.tuples == 0
    }

    pub fn max_width(&self) -> f64 {
        self.rows.iter().map(CoeffStats::width).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["l", "m", "coeffs", "min", "max", "mean", "count", "width"]).unwrap();
        for r in &self.rows {
            w.write_record([
                self.l.to_string(),
                self.m.to_string(),
                coeff_label(&r.coeffs),
                r.min.to_string(),
                r.max.to_string(),
                format!("{:.12}", r.mean),
                r.count.to_string(),
                format!("{:.12}", r.width()),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "generator": self.generator,
            "l": self.l,
            "m": self.m,
            "horizon": self.horizon,
            "threshold": self.threshold,
            "tuples": self.tuples,
            "empty": self.is_empty(),
            "rows": self.rows.iter().map(|r| json!({
                "coeffs": r.coeffs.iter().map(fmt_rational).collect::<Vec<_>>(),
                "min": r.min.to_json(),
                "max": r.max.to_json(),
                "mean": r.mean,
                "count": r.count,
                "width": r.width(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The member vectors of each tuple, computed once.
pub(crate) fn member_vectors(g: &KSeqGen, tuples: &[PlegmaTuple]) -> Result<Vec<Vec<SparseVec>>> {
    tuples.iter().map(|t| t.members().iter().map(|s| g.vec(s)).collect()).collect()
}

pub(crate) fn combine(vecs: &[SparseVec], a: &[Rational]) -> SparseVec {
    let mut out = SparseVec::zero();
    for (v, c) in vecs.iter().zip(a) {
        if !c.is_zero() {
            out.add_scaled(c, v);
        }
    }
    out
}

/// Statistics of `‖Σ a_j v_j‖` for each coefficient tuple; coefficient tuples
/// are processed in parallel, tuples in order, so results are deterministic.
pub(crate) fn stats_over(g: &KSeqGen, vecs: &[Vec<SparseVec>], coeffs: &[Vec<Rational>]) -> Result<Vec<CoeffStats>> {
    coeffs
        .par_iter()
        .map(|a| {
            let mut min: Option<NormValue> = None;
            let mut max: Option<NormValue> = None;
            let mut sum = 0.0;
            for members in vecs {
                let v = g.norm(&combine(members, a))?;
                sum += v.to_f64();
                if min.as_ref().is_none_or(|m| v.cmp_value(m) == Ordering::Less) {
                    min = Some(v.clone());
                }
                if max.as_ref().is_none_or(|m| v.cmp_value(m) == Ordering::Greater) {
                    max = Some(v);
                }
            }
            Ok(CoeffStats {
                coeffs: a.clone(),
                min: min.unwrap_or_else(NormValue::zero),
                max: max.unwrap_or_else(NormValue::zero),
                mean: if vecs.is_empty() { 0.0 } else { sum / vecs.len() as f64 },
                count: vecs.len(),
            })
        })
        .collect()
}

fn check_coeffs(m: usize, coeffs: &[Vec<Rational>]) -> Result<()> {
    let one = Rational::one();
    for a in coeffs {
        if a.len() != m {
            return invalid(format!("coefficient tuple of length {} where m = {m}", a.len()));
        }
        if a.iter().any(|x| x.abs() > one) {
            return invalid("coefficients must lie in [-1,1]");
        }
    }
    Ok(())
}

/// Values of `‖Σ_{j<=m} a_j x_{s_j}‖` over plegma `m`-tuples in `[M]^k` with
/// `s_1(1) >= M(l)` and entries up to `horizon`.
pub fn empirical_sm(
    g: &KSeqGen,
    universe: &Universe,
    l: usize,
    m: usize,
    coeffs: &[Vec<Rational>],
    horizon: u32,
    mode: Mode,
) -> Result<SMEstimate> {
    check_coeffs(m, coeffs)?;
    let (threshold, tuples) = admissible_tuples(g.k, universe, l, m, horizon, mode)?;
    let vecs = member_vectors(g, &tuples)?;
    let rows = if tuples.is_empty() { Vec::new() } else { stats_over(g, &vecs, coeffs)? };
    Ok(SMEstimate { generator: g.describe(), l, m, horizon, threshold, tuples: tuples.len(), rows })
}

#[derive(Clone, Debug)]
pub struct TableRow {
    pub l: usize,
    pub stats: CoeffStats,
}

#[derive(Clone, Debug)]
pub struct StabilizeResult {
    pub universe: Vec<u32>,
    /// `M(l) = L(p_l)` with `p_1 = 1`, `p_{l+1} = p_l + l`.
    pub sparsified: Vec<u32>,
    pub table: Vec<TableRow>,
    /// Per `l`: the width target was met.
    pub stabilized: Vec<bool>,
    pub removed: Vec<u32>,
    pub resolution: u32,
}

impl StabilizeResult {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["l", "m", "coeffs", "min", "max", "midpoint", "width", "count"]).unwrap();
        for r in &self.table {
            w.write_record([
                r.l.to_string(),
                r.stats.coeffs.len().to_string(),
                coeff_label(&r.stats.coeffs),
                r.stats.min.to_string(),
                r.stats.max.to_string(),
                format!("{:.12}", r.stats.midpoint()),
                format!("{:.12}", r.stats.width()),
                r.stats.count.to_string(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "universe": self.universe,
            "sparsified": self.sparsified,
            "stabilized": self.stabilized,
            "removed": self.removed,
            "resolution": self.resolution,
            "rows": self.table.len(),
        })
    }
}

struct NetBlock {
    flats: Vec<Vec<u32>>,
    /// `values[c][t]`.
    values: Vec<Vec<f64>>,
}

fn widest(blocks: &[NetBlock], keep: &dyn Fn(u32) -> bool, threshold: u32) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for b in blocks {
        let live: Vec<usize> =
            (0..b.flats.len()).filter(|&t| b.flats[t][0] >= threshold && b.flats[t].iter().all(|&e| keep(e))).collect();
        if live.is_empty() {
            return None;
        }
        for row in &b.values {
            let (lo, hi) = live.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(row[t]), hi.max(row[t])));
            worst = worst.max(hi - lo);
        }
    }
    Some(worst)
}

/// Thins `universe ∩ [1, horizon]` until, for each `l <= target_l`, every
/// coefficient tuple of the `1/q`-net with `m <= l` has empirical width at
/// most `δ_l`, removing at each step the element whose removal leaves the
/// smallest maximal width.
pub fn sm_stabilize(
    g: &KSeqGen,
    universe: &Universe,
    delta: &[f64],
    target_l: usize,
    horizon: u32,
    q: u32,
) -> Result<StabilizeResult> {
    if delta.len() < target_l || delta.iter().any(|d| !(*d >= 0.0)) || delta.windows(2).any(|w| w[1] > w[0]) {
        return invalid("δ schedule must be nonnegative, nonincreasing and cover every l");
    }
    let mut cur = universe.elements_upto(horizon);
    let mut removed = Vec::new();
    let mut stabilized = Vec::new();
    for l in 1..=target_l {
        let elems = Universe::explicit(cur.clone())?;
        let mut blocks = Vec::new();
        for m in 1..=l {
            let coeffs = coefficient_grid(m, q);
            let flats: Vec<Vec<u32>> = combinations(&cur, g.k * m).collect();
            let tuples: Vec<PlegmaTuple> = enumerate_plegma(&elems, g.k, m)?.collect();
            let vecs = member_vectors(g, &tuples)?;
            let values = coeffs
                .par_iter()
                .map(|a| vecs.iter().map(|mv| g.norm(&combine(mv, a)).map(|v| v.to_f64())).collect::<Result<Vec<f64>>>())
                .collect::<Result<Vec<_>>>()?;
            blocks.push(NetBlock { flats, values });
        }
        let mut ok = false;
        loop {
            let Some(&threshold) = cur.get(l - 1) else { break };
            let set: std::collections::BTreeSet<u32> = cur.iter().copied().collect();
            match widest(&blocks, &|e| set.contains(&e), threshold) {
                None => break,
                Some(w) if w <= delta[l - 1] => {
                    ok = true;
                    break;
                }
                Some(_) => {}
            }
            let mut best: Option<(f64, usize)> = None;
            for (i, &e) in cur.iter().enumerate() {
                let rest: Vec<u32> = cur.iter().copied().filter(|&x| x != e).collect();
                let Some(&thr) = rest.get(l - 1) else { continue };
                let rs: std::collections::BTreeSet<u32> = rest.iter().copied().collect();
                if let Some(w) = widest(&blocks, &|x| rs.contains(&x), thr) {
                    if best.is_none_or(|(bw, _)| w < bw) {
                        best = Some((w, i));
                    }
                }
            }
            match best {
                Some((_, i)) => removed.push(cur.remove(i)),
                None => break,
            }
        }
        stabilized.push(ok);
    }
    let final_u = Universe::explicit(cur.clone())?;
    let mut table = Vec::new();
    for l in 1..=target_l {
        for m in 1..=l {
            let (_, tuples) = admissible_tuples(g.k, &final_u, l, m, horizon, Mode::Exhaustive)?;
            if tuples.is_empty() {
                continue;
            }
            let vecs = member_vectors(g, &tuples)?;
            for stats in stats_over(g, &vecs, &coefficient_grid(m, q))? {
                table.push(TableRow { l, stats });
            }
        }
    }
    let mut sparsified = Vec::new();
    let mut p = 1usize;
    let mut l = 1usize;
    while p <= cur.len() {
        sparsified.push(cur[p - 1]);
        p += l;
        l += 1;
    }
    Ok(StabilizeResult { universe: cur, sparsified, table, stabilized, removed, resolution: q })
}

#[derive(Clone, Debug)]
pub struct L1Constant {
    pub l: usize,
    pub q: u32,
    /// Smallest empirical value over the grid; an upper estimate of the
    /// best lower `ℓ¹` constant at this `l` and horizon.
    pub c: NormValue,
    pub argmin: Vec<Rational>,
    pub grid_points: usize,
    pub tuples: usize,
}

impl L1Constant {
    pub fn to_json(&self) -> Value {
        json!({
            "l": self.l,
            "q": self.q,
            "c": self.c.to_json(),
            "argmin": self.argmin.iter().map(fmt_rational).collect::<Vec<_>>(),
            "grid_points": self.grid_points,
            "tuples": self.tuples,
        })
    }
}

/// `min_a min_{tuples} ‖Σ a_j x_{s_j}‖` over `a = b/q`, `b ∈ ℤ^l`, `Σ|b_j| = q`.
pub fn l1_constant(g: &KSeqGen, universe: &Universe, l: usize, q: u32, horizon: u32, mode: Mode) -> Result<L1Constant> {
    let grid = l1_sphere_grid(l, q);
    let est = empirical_sm(g, universe, l, l, &grid, horizon, mode)?;
    if est.is_empty() {
        return invalid(format!("no admissible plegma {l}-tuple up to horizon {horizon}"));
    }
    let best = est.rows.iter().min_by(|a, b| a.min.cmp_value(&b.min)).expect("grid is nonempty");
    Ok(L1Constant { l, q, c: best.min.clone(), argmin: best.coeffs.clone(), grid_points: grid.len(), tuples: est.tuples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::Exponent;
    use crate::num::{int, rat};
    use crate::zoo::{lp_basis, summing_2seq, xk_basis};

    #[test]
    fn grids() {
        assert_eq!(coefficient_grid(1, 2).len(), 4);
        assert_eq!(coefficient_grid(2, 4).len(), 80);
        let g = l1_sphere_grid(2, 2);
        assert_eq!(g.len(), 8);
        assert!(g.iter().all(|a| a.iter().map(|x| x.abs()).sum::<Rational>() == Rational::one()));
    }

    #[test]
    fn summing_difference() {
        let est = empirical_sm(&summing_2seq(), &Universe::Naturals, 3, 2, &[vec![int(1), int(-1)]], 12, Mode::Exhaustive).unwrap();
        assert!(est.tuples > 0);
        assert_eq!(est.rows[0].min, NormValue::Exact(int(1)));
        assert!(est.rows[0].is_flat());
    }

    #[test]
    fn basis_pair() {
        let est = empirical_sm(&xk_basis(1), &Universe::Naturals, 2, 2, &[vec![int(1), int(1)]], 8, Mode::Exhaustive).unwrap();
        assert_eq!((est.rows[0].min.clone(), est.rows[0].max.clone()), (NormValue::Exact(int(2)), NormValue::Exact(int(2))));
        let sampled = empirical_sm(
            &xk_basis(1),
            &Universe::Naturals,
            2,
            2,
            &[vec![int(1), int(1)]],
            8,
            Mode::Sampled { seed: 7, samples: 10 },
        )
        .unwrap();
        assert_eq!(sampled.tuples, 10);
        assert!(empirical_sm(&xk_basis(1), &Universe::horizon(3), 2, 2, &[vec![int(1), int(1)]], 3, Mode::Exhaustive)
            .unwrap()
            .is_empty());
        assert!(est.to_csv().starts_with("l,m,coeffs,min,max,mean,count,width"));
    }

    #[test]
    fn l1_constants() {
        let c = l1_constant(&xk_basis(1), &Universe::Naturals, 3, 2, 9, Mode::Exhaustive).unwrap();
        assert_eq!(c.c, NormValue::Exact(int(1)));
        let c0 = l1_constant(&lp_basis(Exponent::Inf), &Universe::Naturals, 2, 4, 6, Mode::Exhaustive).unwrap();
        assert_eq!(c0.c, NormValue::Exact(rat(1, 2)));
    }

    #[test]
    fn stabilize_basis() {
        let r = sm_stabilize(&xk_basis(1), &Universe::Naturals, &[0.0, 0.0, 0.0], 3, 9, 1).unwrap();
        assert!(r.stabilized.iter().all(|&b| b));
        let row = r.table.iter().find(|t| t.l == 3 && t.stats.coeffs == vec![int(1), int(1), int(1)]).unwrap();
        assert_eq!(row.stats.min, NormValue::Exact(int(3)));
        assert!(row.stats.is_flat());
        assert_eq!(r.sparsified[..3], [r.universe[0], r.universe[1], r.universe[3]]);
    }
}
