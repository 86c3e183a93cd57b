//! Finite tree representations `t ↦ φ̂(t)` over `[M]^{<=k}` and their
//! canonical tree decompositions.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::combin::combinations;
use crate::error::{invalid, Error, Result};
use crate::norms::NormEngine;
use crate::num::{fmt_rational, pow2_inv, rat, NormValue, Rational};
use crate::plegma::{enumerate_plegma, plegma_from_flat};
use crate::search::{first_subuniverse, largest_subuniverse};
use crate::subset::{FinSubset, Universe};
use crate::vector::SparseVec;

fn all_nodes(universe: &[u32], k: usize) -> Vec<FinSubset> {
    let mut out = vec![FinSubset::empty()];
    for j in 1..=k.min(universe.len()) {
        out.extend(combinations(universe, j).map(FinSubset::from_sorted));
    }
    out
}

fn node_map_json(m: &BTreeMap<FinSubset, SparseVec>) -> Value {
    Value::Array(m.iter().map(|(t, v)| json!({"node": t.elems(), "vector": v.to_json()})).collect())
}

/// Reads `[{"node": [..], "vector": [..]}, ..]`.
pub fn node_map_from_json(v: &Value) -> Result<BTreeMap<FinSubset, SparseVec>> {
    let mut out = BTreeMap::new();
    for e in v.as_array().ok_or_else(|| Error::InvalidInput("nodes must be an array".into()))? {
        let node: Vec<u32> = serde_json::from_value(e.get("node").cloned().unwrap_or(Value::Null))
            .map_err(|err| Error::InvalidInput(format!("bad node: {err}")))?;
        let vec = SparseVec::from_json(e.get("vector").ok_or_else(|| Error::InvalidInput("node without vector".into()))?)?;
        out.insert(FinSubset::new(node)?, vec);
    }
    Ok(out)
}

/// `φ̂ : [M]^{<=k} → c00(ℕ)` on a finite universe.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMap {
    pub k: usize,
    pub universe: Vec<u32>,
    pub nodes: BTreeMap<FinSubset, SparseVec>,
}

impl TreeMap {
    pub fn from_fn(k: usize, universe: Vec<u32>, f: impl Fn(&FinSubset) -> SparseVec) -> Result<Self> {
        Universe::explicit(universe.clone())?;
        let nodes = all_nodes(&universe, k).into_iter().map(|t| {
            let v = f(&t);
            (t, v)
        });
        let tm = TreeMap { k, universe, nodes: nodes.collect() };
        tm.validate()?;
        Ok(tm)
    }

    /// Totality on `[M]^{<=k}` and vectors over ℕ.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return invalid("tree depth k must be positive");
        }
        for t in all_nodes(&self.universe, self.k) {
            match self.nodes.get(&t) {
                None => return invalid(format!("tree map is missing node {t}")),
                Some(v) if v.arity().is_some_and(|a| a != 1) => {
                    return invalid(format!("node {t} holds a vector not indexed by ℕ"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn get(&self, t: &FinSubset) -> Result<&SparseVec> {
        self.nodes.get(t).ok_or_else(|| Error::InvalidInput(format!("no node {t}")))
    }

    pub fn leaves(&self) -> Vec<FinSubset> {
        combinations(&self.universe, self.k).map(FinSubset::from_sorted).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({"k": self.k, "universe": self.universe, "nodes": node_map_json(&self.nodes)})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput("tree map needs k".into()))? as usize;
        let universe: Vec<u32> = serde_json::from_value(v.get("universe").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::InvalidInput(format!("bad universe: {e}")))?;
        let nodes = node_map_from_json(v.get("nodes").unwrap_or(&Value::Null))?;
        let tm = TreeMap { k, universe, nodes };
        tm.validate()?;
        Ok(tm)
    }
}

/// `w_∅ = φ̂(∅)` and `w_t = φ̂(t) - φ̂(t ∖ {max t})`.
pub fn tree_differences(phi: &TreeMap) -> Result<BTreeMap<FinSubset, SparseVec>> {
    phi.validate()?;
    Ok(phi
        .nodes
        .iter()
        .map(|(t, v)| {
            let w = if t.is_empty() { v.clone() } else { v.sub(&phi.nodes[&t.without_max()]) };
            (t.clone(), w)
        })
        .collect())
}

/// A decreasing null sequence `(ε_n)`.
#[derive(Clone, Debug, PartialEq)]
pub enum EpsSchedule {
    /// `ε_n = 2^{-n}`.
    Pow2,
    /// Explicit values; the last one repeats.
    List(Vec<Rational>),
}

impl EpsSchedule {
    pub fn eps(&self, n: usize) -> Rational {
        match self {
            EpsSchedule::Pow2 => pow2_inv(n as u32),
            EpsSchedule::List(v) => v[(n.max(1) - 1).min(v.len() - 1)].clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let EpsSchedule::List(v) = self {
            if v.is_empty() || v.iter().any(|e| *e <= Rational::from_integer(0.into())) {
                return invalid("ε schedule must be nonempty and positive");
            }
            if v.windows(2).any(|w| w[1] > w[0]) {
                return invalid("ε schedule must be decreasing");
            }
        }
        Ok(())
    }
}

/// `(y_t)_{t ∈ [L]^{<=k}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalTreeDecomposition {
    pub k: usize,
    pub universe: Vec<u32>,
    pub y: BTreeMap<FinSubset, SparseVec>,
}

impl CanonicalTreeDecomposition {
    fn node(&self, s: &FinSubset, j: usize) -> &SparseVec {
        &self.y[&s.prefix(j)]
    }

    /// `Σ_{j<=k} y_{s|j}`.
    pub fn sum(&self, s: &FinSubset) -> SparseVec {
        let mut x = SparseVec::zero();
        for j in 0..=self.k {
            x = x.add(self.node(s, j));
        }
        x
    }

    pub fn to_json(&self) -> Value {
        json!({"k": self.k, "universe": self.universe, "y": node_map_json(&self.y)})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| Error::InvalidInput("decomposition needs k".into()))? as usize;
        let universe: Vec<u32> = serde_json::from_value(v.get("universe").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::InvalidInput(format!("bad universe: {e}")))?;
        let y = node_map_from_json(v.get("y").unwrap_or(&Value::Null))?;
        for t in all_nodes(&universe, k) {
            if !y.contains_key(&t) {
                return invalid(format!("decomposition is missing node {t}"));
            }
        }
        Ok(CanonicalTreeDecomposition { k, universe, y })
    }
}

/// One leaf of the extraction with its achieved approximation.
#[derive(Clone, Debug)]
pub struct LeafBound {
    pub s: FinSubset,
    /// `‖x_s - x̃_s‖`.
    pub error: NormValue,
    /// `ε_n` with `min s = L(n)`.
    pub eps: Rational,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub decomposition: CanonicalTreeDecomposition,
    pub x_tilde: BTreeMap<FinSubset, SparseVec>,
    /// `I_t` for every nonempty node of `[M]^{<=k}`; `None` when `y_t = 0`.
    pub intervals: BTreeMap<FinSubset, Option<(u32, u32)>>,
    pub bounds: Vec<LeafBound>,
    pub after_branch_thinning: Vec<u32>,
    pub after_pair_thinning: Vec<u32>,
    /// The requested size was reached and every leaf bound holds.
    pub complete: bool,
}

impl Extraction {
    pub fn universe(&self) -> &[u32] {
        &self.decomposition.universe
    }

    pub fn to_json(&self) -> Value {
        json!({
            "universe": self.decomposition.universe,
            "complete": self.complete,
            "after_branch_thinning": self.after_branch_thinning,
            "after_pair_thinning": self.after_pair_thinning,
            "intervals": self.intervals.iter().map(|(t, i)| json!({"node": t.elems(), "interval": i.map(|(a, b)| vec![a, b])})).collect::<Vec<_>>(),
            "bounds": self.bounds.iter().map(|b| json!({
                "s": b.s.elems(), "error": b.error.to_json(), "eps": fmt_rational(&b.eps), "ok": b.ok
            })).collect::<Vec<_>>(),
            "decomposition": self.decomposition.to_json(),
            "x_tilde": node_map_json(&self.x_tilde),
        })
    }
}

/// Shortest (then leftmost) interval `I` with `‖I^c(w)‖ < thr`.
fn capture_interval(w: &SparseVec, thr: &Rational, eng: &dyn NormEngine) -> Result<Option<(u32, u32)>> {
    if eng.eval(w)?.lt_rational(thr) {
        return Ok(None);
    }
    let pts: Vec<u32> = w.iter().map(|(s, _)| s.at(1)).collect();
    let mut cands: Vec<(u32, u32)> = Vec::new();
    for a in 0..pts.len() {
        for b in a..pts.len() {
            cands.push((pts[a], pts[b]));
        }
    }
    cands.sort_by_key(|&(lo, hi)| (hi - lo, lo));
    for (lo, hi) in cands {
        let outside = w.restrict(|s| s.at(1) < lo || s.at(1) > hi);
        if eng.eval(&outside)?.lt_rational(thr) {
            return Ok(Some((lo, hi)));
        }
    }
    unreachable!("the full hull leaves nothing outside")
}

fn precedes(a: &SparseVec, b: &SparseVec) -> bool {
    a.support_precedes(b)
}

/// Condition (iii) on one leaf.
fn branch_ok(y: &BTreeMap<FinSubset, SparseVec>, s: &FinSubset, k: usize) -> bool {
    (1..=k).all(|j1| (j1 + 1..=k).all(|j2| precedes(&y[&s.prefix(j1)], &y[&s.prefix(j2)])))
}

/// The first failing condition among (iv), (v) for a plegma pair.
fn pair_violation(y: &BTreeMap<FinSubset, SparseVec>, s1: &FinSubset, s2: &FinSubset, k: usize) -> Option<String> {
    for j1 in 1..=k {
        for j2 in j1..=k {
            if !precedes(&y[&s1.prefix(j1)], &y[&s2.prefix(j2)]) {
                return Some(format!("(iv) fails for plegma pair ({s1},{s2}) at j1={j1}, j2={j2}"));
            }
            if j1 < j2 && !precedes(&y[&s2.prefix(j1)], &y[&s1.prefix(j2)]) {
                return Some(format!("(v) fails for plegma pair ({s1},{s2}) at j1={j1}, j2={j2}"));
            }
        }
    }
    None
}

fn split_pair(u: &[u32], k: usize) -> (FinSubset, FinSubset) {
    let t = plegma_from_flat(&FinSubset::from_sorted(u.to_vec()), k, 2).expect("flat of a plegma pair");
    (t.members()[0].clone(), t.members()[1].clone())
}

/// Truncates each difference `w_t` to an interval capturing all but
/// `ε_n / k` of it (`M(n) = max t`), then thins the universe until the
/// truncated family is a canonical tree decomposition of
/// `x̃_s = Σ_{t ⊑ s} y_t`. The ambient engine must be 1-unconditional.
///
/// `target` asks for `|L| >= target`; without it the largest `L` found by the
/// two thinning stages is kept.
pub fn canonical_tree_extract(phi: &TreeMap, eng: &dyn NormEngine, eps: &EpsSchedule, target: Option<usize>) -> Result<Extraction> {
    if !eng.is_unconditional() {
        return Err(Error::InvalidConfig(format!("engine {} is not 1-unconditional", eng.name())));
    }
    eps.validate()?;
    let k = phi.k;
    let w = tree_differences(phi)?;
    let kq = Rational::from_integer((k as i64).into());
    let mut y = BTreeMap::new();
    let mut intervals = BTreeMap::new();
    for (t, wt) in &w {
        if t.is_empty() {
            y.insert(t.clone(), wt.clone());
            continue;
        }
        let n = phi.universe.iter().position(|&m| m == t.max().unwrap()).unwrap() + 1;
        let thr = eps.eps(n) / &kq;
        let iv = capture_interval(wt, &thr, eng)?;
        let yt = match iv {
            Some((lo, hi)) => wt.restrict_interval(lo, hi),
            None => SparseVec::zero(),
        };
        intervals.insert(t.clone(), iv);
        y.insert(t.clone(), yt);
    }

    let branch = |s: &[u32]| branch_ok(&y, &FinSubset::from_sorted(s.to_vec()), k);
    let stage1 = largest_subuniverse(&phi.universe, k, branch);
    let pair = |u: &[u32]| {
        let (s1, s2) = split_pair(u, k);
        pair_violation(&y, &s1, &s2, k).is_none()
    };
    let stage2 = largest_subuniverse(&stage1.best, 2 * k, pair);
    let mut universe = stage2.best.clone();
    let mut reached = target.is_none_or(|t| universe.len() >= t);
    if let Some(t) = target.filter(|_| !reached) {
        let joint = |u: &[u32]| {
            if u.len() == k {
                return branch(u);
            }
            pair(u) && combinations(u, k).all(|s| branch(&s))
        };
        let arity = if t >= 2 * k { 2 * k } else { k };
        if let Some(found) = first_subuniverse(&phi.universe, arity, t, joint) {
            universe = found;
            reached = true;
        }
    }

    let nodes = all_nodes(&universe, k);
    let dy: BTreeMap<FinSubset, SparseVec> = nodes.iter().map(|t| (t.clone(), y[t].clone())).collect();
    let decomposition = CanonicalTreeDecomposition { k, universe: universe.clone(), y: dy };
    let mut x_tilde = BTreeMap::new();
    let mut bounds = Vec::new();
    for s in combinations(&universe, k).map(FinSubset::from_sorted) {
        let xt = decomposition.sum(&s);
        let n = universe.iter().position(|&m| m == s.at(1)).unwrap() + 1;
        let e = eps.eps(n);
        let error = eng.eval(&phi.nodes[&s].sub(&xt))?;
        let ok = error.lt_rational(&e);
        bounds.push(LeafBound { s: s.clone(), error, eps: e, ok });
        x_tilde.insert(s, xt);
    }
    let complete = reached && stage1.complete && stage2.complete && bounds.iter().all(|b| b.ok);
    Ok(Extraction {
        decomposition,
        x_tilde,
        intervals,
        bounds,
        after_branch_thinning: stage1.best,
        after_pair_thinning: stage2.best,
        complete,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtdReport {
    pub ok: bool,
    pub violation: Option<String>,
    pub leaves: usize,
    pub pairs: usize,
}

impl CtdReport {
    pub fn to_json(&self) -> Value {
        json!({"ok": self.ok, "violation": self.violation, "leaves": self.leaves, "pairs": self.pairs})
    }
}

/// Exhaustive check of conditions (i)-(v) on `[L]^k`, together with the
/// disjointness of `x_s - y_∅` along plegma pairs.
pub fn verify_ctd(d: &CanonicalTreeDecomposition, x: &BTreeMap<FinSubset, SparseVec>) -> Result<CtdReport> {
    let k = d.k;
    let fail = |msg: String, leaves, pairs| Ok(CtdReport { ok: false, violation: Some(msg), leaves, pairs });
    for t in all_nodes(&d.universe, k) {
        if !d.y.contains_key(&t) {
            return invalid(format!("decomposition is missing node {t}"));
        }
    }
    let leaves: Vec<FinSubset> = combinations(&d.universe, k).map(FinSubset::from_sorted).collect();
    for s in &leaves {
        let xs = x.get(s).ok_or_else(|| Error::InvalidInput(format!("no vector for leaf {s}")))?;
        if *xs != d.sum(s) {
            return fail(format!("(i) fails at {s}"), leaves.len(), 0);
        }
        if !branch_ok(&d.y, s, k) {
            return fail(format!("(iii) fails at {s}"), leaves.len(), 0);
        }
    }
    let y0 = &d.y[&FinSubset::empty()];
    let mut pairs = 0;
    for t in enumerate_plegma(&Universe::explicit(d.universe.clone())?, k, 2)? {
        let (s1, s2) = (&t.members()[0], &t.members()[1]);
        pairs += 1;
        if let Some(v) = pair_violation(&d.y, s1, s2, k) {
            return fail(v, leaves.len(), pairs);
        }
        if !x[s1].sub(y0).supports_disjoint(&x[s2].sub(y0)) {
            return fail(format!("x - y_∅ is not disjointly supported on ({s1},{s2})"), leaves.len(), pairs);
        }
    }
    Ok(CtdReport { ok: true, violation: None, leaves: leaves.len(), pairs })
}

/// For every plegma `n`-tuple in `[L]^k` and level `j`, with `I` the interval
/// spanned by the supports of `y_{s_1|j}, ..., y_{s_n|j}`:
/// `I(x_{s_i} - y_∅) = y_{s_i|j}`. Returns the number of identities checked
/// and the first failure.
pub fn trocan_interval_check(d: &CanonicalTreeDecomposition, x: &BTreeMap<FinSubset, SparseVec>) -> Result<(usize, Option<String>)> {
    let k = d.k;
    let y0 = &d.y[&FinSubset::empty()];
    let u = Universe::explicit(d.universe.clone())?;
    let mut checked = 0;
    for n in 1..=d.universe.len() / k {
        for t in enumerate_plegma(&u, k, n)? {
            for j in 1..=k {
                let hull = t.members().iter().filter_map(|s| d.node(s, j).nat_hull()).fold(None, |acc: Option<(u32, u32)>, (a, b)| {
                    Some(match acc {
                        None => (a, b),
                        Some((lo, hi)) => (lo.min(a), hi.max(b)),
                    })
                });
                for s in t.members() {
                    let xs = x.get(s).ok_or_else(|| Error::InvalidInput(format!("no vector for leaf {s}")))?.sub(y0);
                    let restricted = match hull {
                        Some((lo, hi)) => xs.restrict_interval(lo, hi),
                        None => SparseVec::zero(),
                    };
                    checked += 1;
                    if restricted != *d.node(s, j) {
                        return Ok((checked, Some(format!("interval identity fails for {s} at level {j} in tuple {t}"))));
                    }
                }
            }
        }
    }
    Ok((checked, None))
}

/// `ε_n` values as strings, for reports.
pub fn eps_table(eps: &EpsSchedule, upto: usize) -> Vec<String> {
    (1..=upto).map(|n| fmt_rational(&eps.eps(n))).collect()
}

/// Pseudo-random tree whose differences are humps with geometric tails, placed
/// past `40 max t`. If `bad` is set, the full-height nodes ending in `bad` put
/// their hump at the start instead, so extraction must drop that element.
pub fn sample_tree(seed: u64, k: usize, universe: Vec<u32>, bad: Option<u32>) -> Result<TreeMap> {
    let diff = move |t: &FinSubset| -> SparseVec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t.elems().iter().fold(0x9e37u64, |h, &e| h.wrapping_mul(131).wrapping_add(e as u64)));
        if t.is_empty() {
            return SparseVec::from_nat([(1, rat(rng.random_range(-4..=4), 4)), (2, rat(rng.random_range(1..=4), 4))]);
        }
        let m = t.max().unwrap();
        let base = if Some(m) == bad && t.len() == k { 5 } else { 40 * m + 10 * t.len() as u32 };
        let width = rng.random_range(1..=3u32);
        let mut entries: Vec<(u32, Rational)> =
            (0..width).map(|r| (base + r, rat(rng.random_range(1..=6) * if rng.random_bool(0.5) { 1 } else { -1 }, 2))).collect();
        let tail = rng.random_range(3..=9u32);
        let c = rat(rng.random_range(1..=3), 1);
        entries.extend((1..=tail).map(|r| (base + width + r - 1, &c * pow2_inv(r))));
        SparseVec::from_nat(entries)
    };
    TreeMap::from_fn(k, universe, |t| (0..=t.len()).fold(SparseVec::zero(), |acc, j| acc.add(&diff(&t.prefix(j)))))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{Exponent, LpNorm};
    use crate::num::int;

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    fn l1() -> LpNorm {
        LpNorm::new(Exponent::One)
    }

    #[test]
    fn differences_telescope() {
        let phi = TreeMap::from_fn(2, (1..=5).collect(), |t| SparseVec::from_nat(t.elems().iter().map(|&m| (m, int(1))))).unwrap();
        let w = tree_differences(&phi).unwrap();
        assert_eq!(w[&s(&[3])], SparseVec::unit_nat(3));
        assert_eq!(w[&s(&[3, 4])], SparseVec::unit_nat(4));
        let mut total = SparseVec::zero();
        for u in [FinSubset::empty(), s(&[2]), s(&[2, 5])] {
            total = total.add(&w[&u]);
        }
        assert_eq!(total, phi.nodes[&s(&[2, 5])]);
        assert_eq!(TreeMap::from_json(&phi.to_json()).unwrap(), phi);
    }

    #[test]
    fn block_tree_needs_no_thinning() {
        let phi = TreeMap::from_fn(2, (1..=6).collect(), |t| SparseVec::from_nat(t.elems().iter().map(|&m| (m, int(1))))).unwrap();
        let ex = canonical_tree_extract(&phi, &l1(), &EpsSchedule::Pow2, None).unwrap();
        assert_eq!(ex.universe(), &[1, 2, 3, 4, 5, 6]);
        assert!(ex.complete);
        for leaf in phi.leaves() {
            assert_eq!(ex.x_tilde[&leaf], phi.nodes[&leaf]);
        }
        let rep = verify_ctd(&ex.decomposition, &ex.x_tilde).unwrap();
        assert!(rep.ok, "{:?}", rep.violation);
        assert_eq!(trocan_interval_check(&ex.decomposition, &ex.x_tilde).unwrap().1, None);
    }

    #[test]
    fn root_vector_and_shift() {
        let phi = TreeMap::from_fn(1, (1..=6).collect(), |t| {
            let mut v = SparseVec::unit_nat(1);
            if let Some(m) = t.max() {
                v.add_entry(FinSubset::singleton(m + 1), int(1));
            }
            v
        })
        .unwrap();
        let ex = canonical_tree_extract(&phi, &l1(), &EpsSchedule::Pow2, None).unwrap();
        assert_eq!(ex.decomposition.y[&FinSubset::empty()], SparseVec::unit_nat(1));
        assert_eq!(ex.decomposition.y[&s(&[4])], SparseVec::unit_nat(5));
        assert!(verify_ctd(&ex.decomposition, &ex.x_tilde).unwrap().ok);
    }

    #[test]
    fn geometric_tail_is_cut() {
        // w_{m} = e_{10m} + Σ_r 2^{-r} e_{10m+r}
        let phi = TreeMap::from_fn(1, (1..=5).collect(), |t| match t.max() {
            None => SparseVec::zero(),
            Some(m) => SparseVec::from_nat((0..8u32).map(|r| (10 * m + r, pow2_inv(r)))),
        })
        .unwrap();
        let ex = canonical_tree_extract(&phi, &l1(), &EpsSchedule::Pow2, None).unwrap();
        assert!(ex.complete);
        for b in &ex.bounds {
            let tail = phi.nodes[&b.s].sub(&ex.x_tilde[&b.s]).l1();
            assert_eq!(b.error, NormValue::Exact(tail.clone()));
            assert!(tail < b.eps);
        }
    }

    #[test]
    fn thinning_removes_bad_element() {
        // the node ending in 4 is placed before everything else
        let phi = TreeMap::from_fn(2, (1..=7).collect(), |t| {
            let mut v = SparseVec::zero();
            for (j, &m) in t.elems().iter().enumerate() {
                let pos = if m == 4 && j == 1 { 1 } else { 20 * m + 5 * j as u32 };
                v.add_entry(FinSubset::singleton(pos), int(1));
            }
            v
        })
        .unwrap();
        let ex = canonical_tree_extract(&phi, &l1(), &EpsSchedule::Pow2, Some(5)).unwrap();
        assert_eq!(ex.universe(), &[1, 2, 3, 5, 6, 7]);
        assert!(ex.complete);
        assert!(verify_ctd(&ex.decomposition, &ex.x_tilde).unwrap().ok);
    }

    #[test]
    fn detects_condition_v() {
        let mut y = BTreeMap::new();
        for t in all_nodes(&[1, 2, 3, 4], 2) {
            let v = match t.len() {
                0 => SparseVec::zero(),
                1 => SparseVec::unit_nat(10 * t.at(1)),
                _ => SparseVec::unit_nat(10 * t.at(1) + 1),
            };
            y.insert(t, v);
        }
        let d = CanonicalTreeDecomposition { k: 2, universe: vec![1, 2, 3, 4], y };
        let x: BTreeMap<_, _> = combinations(&[1, 2, 3, 4], 2).map(|c| {
            let s = FinSubset::from_sorted(c);
            let v = d.sum(&s);
            (s, v)
        }).collect();
        let rep = verify_ctd(&d, &x).unwrap();
        assert!(!rep.ok);
        assert!(rep.violation.unwrap().starts_with("(v)"));
    }
}
