//! Finite Ramsey-type searches over plegma families.
//!
//! Everything here is exhaustive with pruning; a result that claims a
//! property carries the data needed to re-check it independently.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::combin::{binomial, combinations};
use crate::error::{invalid, Result};
use crate::num::{fmt_rational, to_f64, Rational};
use crate::plegma::{enumerate_plegma, extends_chain, is_plegma_pair, plegma_from_flat, PlegmaTuple};
use crate::search::{first_subuniverse, largest_subuniverse};
use crate::subset::{FinSubset, Universe};

/// A finite coloring of `Plm_l([M]^k)`, stored by flats.
#[derive(Clone, Debug)]
pub struct Coloring {
    pub k: usize,
    pub l: usize,
    universe: Vec<u32>,
    table: BTreeMap<Vec<u32>, u32>,
}

impl Coloring {
    pub fn from_fn(universe: &Universe, k: usize, l: usize, f: impl Fn(&PlegmaTuple) -> u32) -> Result<Self> {
        let elems = universe.elements()?;
        let table = enumerate_plegma(universe, k, l)?
            .map(|t| {
                let c = f(&t);
                (crate::plegma::flat_from_plegma(&t).elems().to_vec(), c)
            })
            .collect();
        Ok(Coloring { k, l, universe: elems, table })
    }

    pub fn universe(&self) -> &[u32] {
        &self.universe
    }

    pub fn palette(&self) -> Vec<u32> {
        self.table.values().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn color_of_flat(&self, flat: &[u32]) -> Option<u32> {
        self.table.get(flat).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Monochromatic {
    pub universe: Vec<u32>,
    pub color: u32,
}

/// `L ⊆ M` with `|L| = target` and `c` constant on `Plm_l([L]^k)`; the
/// lexicographically least such `L` over all colors, or over `color` alone.
pub fn monochromatize(c: &Coloring, target: usize, color: Option<u32>) -> Result<Option<Monochromatic>> {
    let r = c.k * c.l;
    if target < r {
        return invalid(format!("target size {target} is below k*l = {r}"));
    }
    let colors = match color {
        Some(x) => vec![x],
        None => c.palette(),
    };
    let mut best: Option<Monochromatic> = None;
    for col in colors {
        let found = first_subuniverse(&c.universe, r, target, |flat| c.color_of_flat(flat) == Some(col));
        if let Some(u) = found {
            if best.as_ref().is_none_or(|b| u < b.universe) {
                best = Some(Monochromatic { universe: u, color: col });
            }
        }
    }
    Ok(best)
}

/// Re-checks a monochromatic claim by enumerating `Plm_l([L]^k)`.
pub fn verify_monochromatic(c: &Coloring, m: &Monochromatic) -> Result<bool> {
    let u = Universe::explicit(m.universe.clone())?;
    for t in enumerate_plegma(&u, c.k, c.l)? {
        if c.color_of_flat(crate::plegma::flat_from_plegma(&t).elems()) != Some(m.color) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finite labelling `[M]^k → labels`.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub k: usize,
    universe: Vec<u32>,
    table: BTreeMap<FinSubset, u64>,
}

impl Labeling {
    pub fn from_fn(universe: &Universe, k: usize, f: impl Fn(&FinSubset) -> u64) -> Result<Self> {
        if k == 0 {
            return invalid("k must be positive");
        }
        let elems = universe.elements()?;
        let table = combinations(&elems, k)
            .map(|c| {
                let s = FinSubset::from_sorted(c);
                let v = f(&s);
                (s, v)
            })
            .collect();
        Ok(Labeling { k, universe: elems, table })
    }

    pub fn label(&self, s: &FinSubset) -> u64 {
        self.table[s]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "alternative", rename_all = "snake_case")]
pub enum Dichotomy {
    /// The labelling is constant on `[L]^k`.
    Constant { universe: Vec<u32>, label: u64 },
    /// Plegma pairs in `[L]^k` receive distinct labels.
    Injective { universe: Vec<u32> },
    /// Neither alternative has a set large enough to contain a plegma pair.
    NotFound,
}

/// The constant-or-injective dichotomy on a finite table: the larger of the
/// two best sub-universes, preferring the constant alternative on ties.
pub fn dichotomy_search(phi: &Labeling) -> Result<Dichotomy> {
    let k = phi.k;
    let labels: BTreeSet<u64> = phi.table.values().copied().collect();
    let mut constant: Option<(Vec<u32>, u64)> = None;
    for lab in labels {
        let out = largest_subuniverse(&phi.universe, k, |flat| {
            phi.table[&FinSubset::from_sorted(flat.to_vec())] == lab
        });
        if constant.as_ref().is_none_or(|(u, _)| out.best.len() > u.len()) {
            constant = Some((out.best, lab));
        }
    }
    let injective = largest_subuniverse(&phi.universe, 2 * k, |flat| {
        let t = plegma_from_flat(&FinSubset::from_sorted(flat.to_vec()), k, 2).expect("flat");
        phi.label(t.member(1)) != phi.label(t.member(2))
    })
    .best;
    let (cu, lab) = constant.unwrap_or((Vec::new(), 0));
    if cu.len() < 2 * k && injective.len() < 2 * k {
        return Ok(Dichotomy::NotFound);
    }
    Ok(if cu.len() >= injective.len() {
        Dichotomy::Constant { universe: cu, label: lab }
    } else {
        Dichotomy::Injective { universe: injective }
    })
}

/// Independent re-check of a dichotomy certificate over every plegma pair
/// (and every set, for the constant alternative).
pub fn verify_dichotomy(phi: &Labeling, d: &Dichotomy) -> Result<bool> {
    match d {
        Dichotomy::NotFound => Ok(true),
        Dichotomy::Constant { universe, label } => {
            Ok(combinations(universe, phi.k).all(|c| phi.label(&FinSubset::from_sorted(c)) == *label))
        }
        Dichotomy::Injective { universe } => {
            let u = Universe::explicit(universe.clone())?;
            Ok(enumerate_plegma(&u, phi.k, 2)?.all(|t| phi.label(t.member(1)) != phi.label(t.member(2))))
        }
    }
}

/// A plegma `l`-tuple inside `a`, searching chains in lexicographic order.
pub fn find_plegma_in_subset(a: &[FinSubset], l: usize) -> Result<Option<PlegmaTuple>> {
    if l == 0 {
        return invalid("l must be positive");
    }
    let Some(k) = a.first().map(|s| s.len()) else {
        return Ok(None);
    };
    if k == 0 || a.iter().any(|s| s.len() != k) {
        return invalid("members of A must be nonempty sets of one common size");
    }
    let mut sorted: Vec<FinSubset> = a.to_vec();
    sorted.sort();
    sorted.dedup();

    fn extend(sorted: &[FinSubset], chain: &mut Vec<usize>, l: usize) -> bool {
        if chain.len() == l {
            return true;
        }
        let last = *chain.last().unwrap();
        for j in last + 1..sorted.len() {
            // members of a plegma chain increase in the first coordinate
            if sorted[j].at(1) <= sorted[last].at(1) {
                continue;
            }
            if extends_chain(&sorted[chain[0]], &sorted[last], &sorted[j]) {
                chain.push(j);
                if extend(sorted, chain, l) {
                    return true;
                }
                chain.pop();
            }
        }
        false
    }

    for i in 0..sorted.len() {
        let mut chain = vec![i];
        if extend(&sorted, &mut chain, l) {
            let members = chain.into_iter().map(|j| sorted[j].clone()).collect();
            return Ok(Some(PlegmaTuple::new(members)?));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlegmaFree {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub size: usize,
    pub witness: Vec<FinSubset>,
    /// False: `size` is only a lower bound from the greedy heuristic.
    pub exact: bool,
}

/// Default number of `k`-sets above which only the heuristic runs.
pub const FREE_EXACT_LIMIT: usize = 36;

/// Maximum size of `A ⊆ [{1..n}]^k` without a plegma `l`-tuple.
///
/// Branch and bound over the sets in lexicographic order, which orders
/// them by first coordinate; since members of a plegma tuple increase in
/// every coordinate, a newly included set can only be the last member of a
/// forbidden tuple, so only chains ending at it are checked. The bound is the
/// number of later sets still compatible with the current choice. Worst case
/// is exponential in `C(n,k)`; instances beyond `exact_limit` sets get the
/// greedy lower bound instead.
pub fn largest_plegma_free(n: usize, k: usize, l: usize, exact_limit: usize) -> Result<PlegmaFree> {
    if k == 0 || l == 0 {
        return invalid("k and l must be positive");
    }
    let elems: Vec<u32> = (1..=n as u32).collect();
    let verts: Vec<FinSubset> = combinations(&elems, k).map(FinSubset::from_sorted).collect();
    if l == 1 {
        return Ok(PlegmaFree { n, k, l, size: 0, witness: Vec::new(), exact: true });
    }
    let closes = |chosen: &[usize], v: usize| -> bool {
        // is there a chain of l-1 chosen sets forming a plegma l-tuple with v last?
        fn go(verts: &[FinSubset], chosen: &[usize], chain: &mut Vec<usize>, v: usize, need: usize) -> bool {
            if chain.len() == need {
                let first = &verts[chain[0]];
                let last = &verts[*chain.last().unwrap()];
                return extends_chain(first, last, &verts[v]);
            }
            let start = chain.last().map_or(0, |&c| c + 1);
            for &c in chosen.iter().filter(|&&c| c >= start) {
                let ok = match chain.first() {
                    None => is_plegma_pair(&verts[c], &verts[v]),
                    Some(&f) => extends_chain(&verts[f], &verts[*chain.last().unwrap()], &verts[c]),
                };
                if ok {
                    chain.push(c);
                    if go(verts, chosen, chain, v, need) {
                        return true;
                    }
                    chain.pop();
                }
            }
            false
        }
        go(&verts, chosen, &mut Vec::new(), v, l - 1)
    };

    if verts.len() > exact_limit {
        let mut chosen = Vec::new();
        for v in 0..verts.len() {
            if !closes(&chosen, v) {
                chosen.push(v);
            }
        }
        let witness = chosen.iter().map(|&i| verts[i].clone()).collect();
        return Ok(PlegmaFree { n, k, l, size: chosen.len(), witness, exact: false });
    }

    fn bb(
        v: usize,
        verts_len: usize,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
        closes: &dyn Fn(&[usize], usize) -> bool,
    ) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        if v == verts_len {
            return;
        }
        let open = (v..verts_len).filter(|&w| !closes(chosen, w)).count();
        if chosen.len() + open <= best.len() {
            return;
        }
        if !closes(chosen, v) {
            chosen.push(v);
            bb(v + 1, verts_len, chosen, best, closes);
            chosen.pop();
        }
        bb(v + 1, verts_len, chosen, best, closes);
    }
    let mut best = Vec::new();
    bb(0, verts.len(), &mut Vec::new(), &mut best, &closes);
    let witness = best.iter().map(|&i| verts[i].clone()).collect();
    Ok(PlegmaFree { n, k, l, size: best.len(), witness, exact: true })
}

/// How a density threshold is read off the scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// `δ·C(n,k) >= largest_free + 1`: the density bound itself reaches the
    /// least size that forces a plegma tuple. For `k = 1` this is `⌈l/δ⌉`.
    Forcing,
    /// `largest_free < δ·C(n,k)`: every set of integer size at least
    /// `δ·C(n,k)` contains a plegma tuple. For `k = 1` this is
    /// `⌊(l-1)/δ⌋ + 1`.
    Strict,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub n: usize,
    pub total: u128,
    pub largest_free: usize,
    pub exact: bool,
    #[serde(skip)]
    pub delta_total: Rational,
    pub forcing: bool,
    pub strict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityScanResult {
    pub k: usize,
    pub l: usize,
    #[serde(skip)]
    pub delta: Rational,
    pub rule: ThresholdRule,
    pub threshold_n: Option<usize>,
    pub strict_threshold_n: Option<usize>,
    pub rows: Vec<DensityRow>,
    /// A largest plegma-free family at `threshold_n - 1`.
    pub counterexample: Option<Vec<FinSubset>>,
}

impl DensityScanResult {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "binomial", "largest_free", "delta_times_binomial", "exact"]).unwrap();
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.total.to_string(),
                r.largest_free.to_string(),
                fmt_rational(&r.delta_total),
                r.exact.to_string(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "l": self.l,
            "delta": fmt_rational(&self.delta),
            "rule": self.rule,
            "threshold_n": self.threshold_n,
            "strict_threshold_n": self.strict_threshold_n,
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "C(n,k)": r.total.to_string(),
                "largest_free": r.largest_free,
                "delta*C(n,k)": fmt_rational(&r.delta_total),
                "delta*C(n,k)_f64": to_f64(&r.delta_total),
                "exact": r.exact,
            })).collect::<Vec<_>>(),
            "counterexample": self.counterexample,
        })
    }
}

/// Scans `n = 1..=n_max` for the least `n` meeting the threshold rule.
/// Rows stop one step after both thresholds are known.
pub fn density_threshold_scan(
    k: usize,
    l: usize,
    delta: &Rational,
    n_max: usize,
    rule: ThresholdRule,
) -> Result<DensityScanResult> {
    if delta <= &Rational::zero() || delta > &Rational::from_integer(1.into()) {
        return invalid("delta must lie in (0, 1]");
    }
    let mut rows = Vec::new();
    let mut forcing_n = None;
    let mut strict_n = None;
    let mut witnesses: Vec<Vec<FinSubset>> = Vec::new();
    for n in 1..=n_max {
        let free = largest_plegma_free(n, k, l, FREE_EXACT_LIMIT)?;
        let total = binomial(n as u64, k as u64);
        let delta_total = delta * Rational::from_integer(total.into());
        let lf = Rational::from_integer(free.size.into());
        let forcing = total > 0 && free.exact && delta_total >= &lf + Rational::from_integer(1.into());
        let strict = total > 0 && free.exact && lf < delta_total;
        if forcing && forcing_n.is_none() {
            forcing_n = Some(n);
        }
        if strict && strict_n.is_none() {
            strict_n = Some(n);
        }
        witnesses.push(free.witness.clone());
        rows.push(DensityRow { n, total, largest_free: free.size, exact: free.exact, delta_total, forcing, strict });
        if forcing_n.is_some() && strict_n.is_some() {
            break;
        }
    }
    let threshold_n = match rule {
        ThresholdRule::Forcing => forcing_n,
        ThresholdRule::Strict => strict_n,
    };
    let counterexample = threshold_n.filter(|&n| n >= 2).map(|n| witnesses[n - 2].clone());
    Ok(DensityScanResult {
        k,
        l,
        delta: delta.clone(),
        rule,
        threshold_n,
        strict_threshold_n: strict_n,
        rows,
        counterexample,
    })
}

/// `⌈l/δ⌉`.
pub fn ceil_l_over_delta(l: usize, delta: &Rational) -> usize {
    let q = Rational::from_integer(l.into()) / delta;
    q.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn monochromatize_examples() {
        let c = Coloring::from_fn(&Universe::horizon(8), 1, 2, |t| (t.member(1).at(1) + t.member(2).at(1)) % 2).unwrap();
        let m = monochromatize(&c, 3, None).unwrap().unwrap();
        assert_eq!(m.universe, vec![1, 3, 5]);
        assert!(verify_monochromatic(&c, &m).unwrap());
        let c = Coloring::from_fn(&Universe::horizon(10), 2, 2, |t| t.member(1).at(1) % 2).unwrap();
        let m = monochromatize(&c, 4, None).unwrap().unwrap();
        assert!(verify_monochromatic(&c, &m).unwrap());
        let c = Coloring::from_fn(&Universe::horizon(6), 2, 2, |_| 7).unwrap();
        assert_eq!(monochromatize(&c, 6, None).unwrap().unwrap().universe.len(), 6);
        assert!(monochromatize(&c, 3, None).is_err());
    }

    #[test]
    fn dichotomy_examples() {
        let u = Universe::horizon(8);
        let constant = Labeling::from_fn(&u, 2, |_| 3).unwrap();
        let d = dichotomy_search(&constant).unwrap();
        assert_eq!(d, Dichotomy::Constant { universe: (1..=8).collect(), label: 3 });
        let id = Labeling::from_fn(&u, 2, |s| (s.at(1) * 100 + s.at(2)) as u64).unwrap();
        let d = dichotomy_search(&id).unwrap();
        assert_eq!(d, Dichotomy::Injective { universe: (1..=8).collect() });
        let first = Labeling::from_fn(&u, 2, |s| s.at(1) as u64).unwrap();
        let d = dichotomy_search(&first).unwrap();
        assert_eq!(d, Dichotomy::Injective { universe: (1..=8).collect() });
        assert!(verify_dichotomy(&first, &d).unwrap());
    }

    #[test]
    fn find_examples() {
        let a = [s(&[1, 3]), s(&[2, 4]), s(&[1, 4])];
        assert_eq!(find_plegma_in_subset(&a, 2).unwrap().unwrap().members(), &[s(&[1, 3]), s(&[2, 4])]);
        assert!(find_plegma_in_subset(&[s(&[1, 2]), s(&[2, 3])], 2).unwrap().is_none());
        assert_eq!(find_plegma_in_subset(&a, 1).unwrap().unwrap().l(), 1);
    }

    #[test]
    fn free_examples() {
        assert_eq!(largest_plegma_free(4, 2, 2, FREE_EXACT_LIMIT).unwrap().size, 5);
        assert_eq!(largest_plegma_free(3, 2, 2, FREE_EXACT_LIMIT).unwrap().size, 3);
        assert_eq!(largest_plegma_free(5, 1, 2, FREE_EXACT_LIMIT).unwrap().size, 1);
        let h = largest_plegma_free(9, 2, 2, 10).unwrap();
        assert!(!h.exact);
    }

    #[test]
    fn density_examples() {
        let r = density_threshold_scan(1, 3, &rat(1, 2), 20, ThresholdRule::Forcing).unwrap();
        assert_eq!(r.threshold_n, Some(6));
        assert_eq!(r.strict_threshold_n, Some(5));
        let r = density_threshold_scan(1, 2, &rat(1, 1), 20, ThresholdRule::Forcing).unwrap();
        assert_eq!(r.threshold_n, Some(2));
        assert!(r.to_csv().starts_with("n,binomial,largest_free,delta_times_binomial"));
        assert!(density_threshold_scan(1, 2, &rat(3, 2), 5, ThresholdRule::Forcing).is_err());
    }
}
