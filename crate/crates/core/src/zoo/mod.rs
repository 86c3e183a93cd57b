//! Concrete `k`-sequences `s ↦ x_s` and the operations building new ones.

mod tree;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::norms::{EngineConfig, ExampleNorm, Exponent, LpNorm, NormEngine, SchreierMode, SchreierPlegmatic};
use crate::num::{fmt_rational, rational_from_json, NormValue, Rational};
use crate::plegma::{is_plegma, PlegmaTuple};
use crate::subset::{FinSubset, Universe};
use crate::vector::SparseVec;

pub use tree::{
    canonical_tree_extract, tree_differences, trocan_interval_check, verify_ctd, CanonicalTreeDecomposition, CtdReport,
    eps_table, node_map_from_json, sample_tree, EpsSchedule, Extraction, LeafBound, TreeMap,
};

pub type VecFn = Arc<dyn Fn(&FinSubset) -> SparseVec + Send + Sync>;

/// A `k`-sequence in the space normed by `ambient`, evaluated lazily.
#[derive(Clone)]
pub struct KSeqGen {
    pub name: String,
    pub params: Value,
    pub k: usize,
    pub ambient: Arc<dyn NormEngine>,
    f: VecFn,
}

impl fmt::Debug for KSeqGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KSeqGen").field("name", &self.name).field("k", &self.k).field("params", &self.params).finish()
    }
}

impl KSeqGen {
    pub fn new(name: impl Into<String>, params: Value, k: usize, ambient: Arc<dyn NormEngine>, f: VecFn) -> Self {
        KSeqGen { name: name.into(), params, k, ambient, f }
    }

    /// Same vectors measured by another norm.
    pub fn with_ambient(&self, ambient: Arc<dyn NormEngine>) -> Self {
        KSeqGen { ambient, ..self.clone() }
    }

    pub fn vec(&self, s: &FinSubset) -> Result<SparseVec> {
        if s.len() != self.k {
            return invalid(format!("{} is indexed by {}-sets, got {s}", self.name, self.k));
        }
        Ok((self.f)(s))
    }

    pub fn norm(&self, x: &SparseVec) -> Result<NormValue> {
        self.ambient.eval(x)
    }

    /// `Σ a_j x_{s_j}`.
    pub fn combination(&self, tuple: &[FinSubset], coeffs: &[Rational]) -> Result<SparseVec> {
        if tuple.len() != coeffs.len() {
            return invalid("coefficient count differs from tuple length");
        }
        let mut out = SparseVec::zero();
        for (s, a) in tuple.iter().zip(coeffs) {
            out.add_scaled(a, &self.vec(s)?);
        }
        Ok(out)
    }

    pub fn eval_combination(&self, tuple: &[FinSubset], coeffs: &[Rational]) -> Result<NormValue> {
        self.norm(&self.combination(tuple, coeffs)?)
    }

    /// Largest ambient norm over `sample`, an empirical boundedness constant.
    pub fn bound_on(&self, sample: &[FinSubset]) -> Result<NormValue> {
        let mut best = NormValue::zero();
        for s in sample {
            let v = self.norm(&self.vec(s)?)?;
            if v.cmp_value(&best).is_gt() {
                best = v;
            }
        }
        Ok(best)
    }

    pub fn describe(&self) -> Value {
        json!({"name": self.name, "k": self.k, "params": self.params, "ambient": self.ambient.params()})
    }
}

fn lp(p: Exponent) -> Arc<dyn NormEngine> {
    Arc::new(LpNorm::new(p))
}

/// `s ↦ e_s` over `[ℕ]^k` in the space normed by `space`.
pub fn basis_seq(k: usize, space: Arc<dyn NormEngine>) -> KSeqGen {
    KSeqGen::new("basis", json!({"k": k}), k, space, Arc::new(|s: &FinSubset| SparseVec::unit(s.clone())))
}

/// The unit vector basis of the Schreier plegmatic space over `[ℕ]^{k+1}`.
pub fn xk_basis(k: usize) -> KSeqGen {
    let mut g = basis_seq(k + 1, Arc::new(SchreierPlegmatic::new(k, SchreierMode::Exact)));
    g.name = "xk_basis".into();
    g.params = json!({"k": k});
    g
}

/// `n ↦ e_{(n, n+1, ..., n+k)}` in the Schreier plegmatic space over
/// `[ℕ]^{k+1}`. No two of these fit in one plegmatic family, so the sequence
/// is isometric to the `ℓ²` basis.
pub fn xk_diagonal(k: usize) -> KSeqGen {
    KSeqGen::new(
        "xk_diagonal",
        json!({"k": k}),
        1,
        Arc::new(SchreierPlegmatic::new(k, SchreierMode::Exact)),
        Arc::new(move |s: &FinSubset| {
            let n = s.at(1);
            SparseVec::unit(FinSubset::from_sorted((0..=k as u32).map(|i| n + i).collect()))
        }),
    )
}

/// The unit vector basis of the space with the plegma-sup norm over `ℓ¹`.
pub fn example_basis(k: usize) -> Result<KSeqGen> {
    let eng = ExampleNorm::new(k, lp(Exponent::One))?;
    let mut g = basis_seq(k + 1, Arc::new(eng));
    g.name = "example_basis".into();
    g.params = json!({"k": k});
    Ok(g)
}

/// `x_s = Σ_{n=min s}^{max s} e_n` in `c₀`.
pub fn summing_2seq() -> KSeqGen {
    KSeqGen::new(
        "summing",
        json!({}),
        2,
        lp(Exponent::Inf),
        Arc::new(|s: &FinSubset| SparseVec::from_nat((s.at(1)..=s.at(2)).map(|n| (n, Rational::one())))),
    )
}

pub type RowFn = Arc<dyn Fn(u32, u32) -> Rational + Send + Sync>;

/// `x_s` is row `s(1)` of `base` truncated after coordinate `s(2)`, in `c₀`.
pub fn c0_truncation_2seq(label: &str, base: RowFn) -> KSeqGen {
    KSeqGen::new(
        "c0_truncation",
        json!({"rows": label}),
        2,
        lp(Exponent::Inf),
        Arc::new(move |s: &FinSubset| SparseVec::from_nat((1..=s.at(2)).map(|m| (m, base(s.at(1), m))))),
    )
}

/// Rows `e_n(m) = δ_{nm}`.
pub fn c0_unit_rows() -> RowFn {
    Arc::new(|n, m| if n == m { Rational::one() } else { Rational::zero() })
}

/// Rows `e_n(m) = 1` for `m >= n`.
pub fn summing_rows() -> RowFn {
    Arc::new(|n, m| if m >= n { Rational::one() } else { Rational::zero() })
}

/// `n ↦ e_n` normed by `ℓ^p`.
pub fn lp_basis(p: Exponent) -> KSeqGen {
    let mut g = basis_seq(1, lp(p));
    g.name = format!("l{}_basis", p.label());
    g.params = json!({"p": p.label()});
    g
}

pub fn constant_seq(k: usize, v: SparseVec, ambient: Arc<dyn NormEngine>) -> KSeqGen {
    let params = json!({"value": v.to_json()});
    KSeqGen::new("constant", params, k, ambient, Arc::new(move |_: &FinSubset| v.clone()))
}

/// `x_s = w_{s|k1}`.
pub fn lift_seq(w: &KSeqGen, k2: usize) -> Result<KSeqGen> {
    if k2 <= w.k {
        return invalid(format!("lift needs k2 > k1 = {}", w.k));
    }
    let inner = w.clone();
    let k1 = w.k;
    Ok(KSeqGen::new(
        "lift",
        json!({"of": w.describe(), "k": k2}),
        k2,
        w.ambient.clone(),
        Arc::new(move |s: &FinSubset| (inner.f)(&s.prefix(k1))),
    ))
}

/// The composed `(k+d)`-sequence: for `v = t ∪ s` with `|t| = d` and `t < s`,
/// `z_v = Σ_j a^t_{F_t(j)} x_{s + (j-1)}` where `y_t = Σ_j a^t_{F_t(j)} e_{F_t(j)}`.
/// `y` is a `d`-sequence over `ℕ`-indexed vectors.
pub fn compose_seq(x: &KSeqGen, y: &KSeqGen) -> KSeqGen {
    let (k, d) = (x.k, y.k);
    let (xi, yi) = (x.clone(), y.clone());
    KSeqGen::new(
        "compose",
        json!({"x": x.describe(), "y": y.describe()}),
        k + d,
        x.ambient.clone(),
        Arc::new(move |v: &FinSubset| {
            let t = v.prefix(d);
            let s = FinSubset::from_sorted(v.elems()[d..].to_vec());
            let mut z = SparseVec::zero();
            for (j, (_, a)) in (yi.f)(&t).iter().enumerate() {
                z.add_scaled(a, &(xi.f)(&s.shift(j as u32)));
            }
            z
        }),
    )
}

/// How the images of a plegma pair sit relative to each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockCheck {
    Ok,
    /// `supp x_{s1}` does not lie before `supp x_{s2}`.
    NotBlock(FinSubset, FinSubset),
    NotDisjoint(FinSubset, FinSubset),
}

/// Checks the images of `pairs` (plegma pairs) for plegma blockness, or only
/// for disjointness when `block` is false.
pub fn validate_plegma_block(g: &KSeqGen, pairs: &[(FinSubset, FinSubset)], block: bool) -> Result<BlockCheck> {
    for (s1, s2) in pairs {
        if !is_plegma(&[s1.clone(), s2.clone()])? {
            return invalid(format!("({s1},{s2}) is not a plegma pair"));
        }
        let (a, b) = (g.vec(s1)?, g.vec(s2)?);
        if block && !a.support_precedes(&b) {
            return Ok(BlockCheck::NotBlock(s1.clone(), s2.clone()));
        }
        if !a.supports_disjoint(&b) {
            return Ok(BlockCheck::NotDisjoint(s1.clone(), s2.clone()));
        }
    }
    Ok(BlockCheck::Ok)
}

/// Parameters of the almost isometric `ℓ¹` renorming.
#[derive(Clone, Debug)]
pub struct RenormParams {
    pub b: Vec<Rational>,
    pub c: Rational,
    pub eps_prime: Rational,
    /// Target `ε` with `(c-ε')/(c+2ε') >= 1-ε`.
    pub eps: Rational,
    pub universe: Universe,
}

/// The tuples `t_i^s = (M(p·s(j) + i - 1))_j`, `i = 1..p`.
pub fn l1_renorm_inner(p: usize, universe: &Universe, s: &FinSubset) -> Result<Vec<FinSubset>> {
    (1..=p)
        .map(|i| {
            let elems: Option<Vec<u32>> =
                s.elems().iter().map(|&n| universe.element(p * n as usize + i - 1)).collect();
            match elems {
                Some(e) => FinSubset::new(e),
                None => Err(Error::InvalidInput(format!("universe too short for index {s}"))),
            }
        })
        .collect()
}

/// `y_s = Σ_i b_i x_{t_i^s} / (c + 2ε')`.
pub fn l1_renorm(x: &KSeqGen, prm: &RenormParams) -> Result<KSeqGen> {
    let one = Rational::one();
    let l1: Rational = prm.b.iter().map(|b| b.abs()).sum();
    if prm.b.is_empty() || l1 != one {
        return invalid("coefficients b must satisfy Σ|b_i| = 1");
    }
    if prm.b.iter().any(|b| b.abs() > one) {
        return invalid("coefficients b must lie in [-1,1]");
    }
    if !(prm.eps_prime.is_positive() && prm.eps_prime < prm.c) {
        return invalid("need 0 < ε' < c");
    }
    let denom = &prm.c + &prm.eps_prime * Rational::from_integer(2.into());
    if (&prm.c - &prm.eps_prime) / &denom < &one - &prm.eps {
        return invalid(format!(
            "(c-ε')/(c+2ε') = {} is below 1-ε = {}",
            fmt_rational(&((&prm.c - &prm.eps_prime) / &denom)),
            fmt_rational(&(&one - &prm.eps))
        ));
    }
    prm.universe.validate()?;
    let p = prm.b.len();
    let (xi, b, u) = (x.clone(), prm.b.clone(), prm.universe.clone());
    let scale = one / denom;
    let params = json!({
        "of": x.describe(),
        "b": prm.b.iter().map(fmt_rational).collect::<Vec<_>>(),
        "c": fmt_rational(&prm.c),
        "eps_prime": fmt_rational(&prm.eps_prime),
        "eps": fmt_rational(&prm.eps),
        "universe": prm.universe.to_string(),
    });
    Ok(KSeqGen::new(
        "l1_renorm",
        params,
        x.k,
        x.ambient.clone(),
        Arc::new(move |s: &FinSubset| {
            let mut y = SparseVec::zero();
            // an index beyond a finite universe maps to zero
            if let Ok(ts) = l1_renorm_inner(p, &u, s) {
                for (t, bi) in ts.iter().zip(&b) {
                    y.add_scaled(&(bi * &scale), &(xi.f)(t));
                }
            }
            y
        }),
    ))
}

/// Names accepted by [`from_spec`].
pub const REGISTRY: &[&str] = &[
    "xk_basis",
    "xk_diagonal",
    "example_basis",
    "summing",
    "c0_trunc_unit",
    "c0_trunc_summing",
    "c0_basis",
    "l1_basis",
    "l2_basis",
    "constant",
    "basis",
];

fn get_usize(v: &Value, key: &str, default: Option<usize>) -> Result<usize> {
    match v.get(key) {
        Some(x) => x.as_u64().map(|n| n as usize).ok_or_else(|| Error::InvalidConfig(format!("{key} must be an integer"))),
        None => default.ok_or_else(|| Error::InvalidConfig(format!("missing {key}"))),
    }
}

/// Builds a generator from `{"name": ..., params}`.
pub fn from_spec(spec: &Value) -> Result<KSeqGen> {
    let name = spec.get("name").and_then(Value::as_str).ok_or_else(|| Error::InvalidConfig("generator needs a name".into()))?;
    Ok(match name {
        "xk_basis" => xk_basis(get_usize(spec, "k", Some(1))?),
        "xk_diagonal" => xk_diagonal(get_usize(spec, "k", Some(1))?),
        "example_basis" => example_basis(get_usize(spec, "k", Some(1))?)?,
        "summing" => summing_2seq(),
        "c0_trunc_unit" => c0_truncation_2seq("unit", c0_unit_rows()),
        "c0_trunc_summing" => c0_truncation_2seq("summing", summing_rows()),
        "c0_basis" => lp_basis(Exponent::Inf),
        "l1_basis" => lp_basis(Exponent::One),
        "l2_basis" => lp_basis(Exponent::Two),
        "basis" => {
            let eng = EngineConfig::from_json(spec.get("engine").ok_or_else(|| Error::InvalidConfig("basis needs an engine".into()))?)?;
            basis_seq(get_usize(spec, "k", None)?, eng.build()?)
        }
        "constant" => {
            let v = SparseVec::from_json(spec.get("value").ok_or_else(|| Error::InvalidConfig("constant needs a value".into()))?)?;
            let eng = match spec.get("engine") {
                Some(e) => EngineConfig::from_json(e)?.build()?,
                None => lp(Exponent::Inf),
            };
            constant_seq(get_usize(spec, "k", Some(1))?, v, eng)
        }
        other => {
            return Err(Error::InvalidConfig(format!("unknown generator {other:?}; known: {}", REGISTRY.join(", "))))
        }
    })
}

/// A plegma tuple's image combination, checked for validity first.
pub fn tuple_combination(g: &KSeqGen, t: &PlegmaTuple, coeffs: &[Rational]) -> Result<SparseVec> {
    g.combination(t.members(), coeffs)
}

/// Reads a rational list from JSON.
pub fn rationals_from_json(v: &Value) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput("expected an array of numbers".into()))?
        .iter()
        .map(rational_from_json)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn basic_generators() {
        let g = xk_basis(1);
        assert_eq!(g.vec(&s(&[1, 2])).unwrap(), SparseVec::unit(s(&[1, 2])));
        assert_eq!(g.norm(&g.vec(&s(&[1, 2])).unwrap()).unwrap(), NormValue::Exact(int(1)));
        let sum = summing_2seq();
        assert_eq!(sum.vec(&s(&[2, 5])).unwrap(), SparseVec::from_nat((2..=5).map(|n| (n, int(1)))));
        assert!(sum.vec(&s(&[3])).is_err());
        let d = sum.combination(&[s(&[1, 3]), s(&[2, 4])], &[int(1), int(-1)]).unwrap();
        assert_eq!(d, SparseVec::from_nat([(1, int(1)), (4, int(-1))]));
        assert_eq!(sum.norm(&d).unwrap(), NormValue::Exact(int(1)));
    }

    #[test]
    fn truncations() {
        let u = c0_truncation_2seq("unit", c0_unit_rows());
        assert_eq!(u.vec(&s(&[2, 5])).unwrap(), SparseVec::unit_nat(2));
        let t = c0_truncation_2seq("summing", summing_rows());
        assert_eq!(t.vec(&s(&[2, 4])).unwrap(), SparseVec::from_nat((2..=4).map(|n| (n, int(1)))));
    }

    #[test]
    fn lift_and_compose() {
        let w = lp_basis(Exponent::One);
        let x = lift_seq(&w, 2).unwrap();
        assert_eq!(x.vec(&s(&[3, 7])).unwrap(), SparseVec::unit_nat(3));
        assert!(lift_seq(&w, 1).is_err());
        let y = KSeqGen::new(
            "pairs",
            json!({}),
            1,
            lp(Exponent::One),
            Arc::new(|t: &FinSubset| SparseVec::from_nat([(2 * t.at(1) - 1, int(1)), (2 * t.at(1), int(1))])),
        );
        let z = compose_seq(&w, &y);
        assert_eq!(z.vec(&s(&[2, 5])).unwrap(), SparseVec::from_nat([(5, int(1)), (6, int(1))]));
        let one = KSeqGen::new("one", json!({}), 1, lp(Exponent::One), Arc::new(|t: &FinSubset| SparseVec::unit_nat(t.at(1))));
        assert_eq!(compose_seq(&w, &one).vec(&s(&[2, 9])).unwrap(), SparseVec::unit_nat(9));
        let zero = KSeqGen::new("zero", json!({}), 1, lp(Exponent::One), Arc::new(|_: &FinSubset| SparseVec::zero()));
        assert!(compose_seq(&w, &zero).vec(&s(&[2, 9])).unwrap().is_zero());
    }

    #[test]
    fn renorm() {
        let prm = RenormParams { b: vec![int(1)], c: int(1), eps_prime: rat(1, 20), eps: rat(1, 5), universe: Universe::Naturals };
        let y = l1_renorm(&xk_basis(1), &prm).unwrap();
        let v = y.norm(&y.vec(&s(&[1, 2])).unwrap()).unwrap();
        assert_eq!(v, NormValue::Exact(rat(10, 11)));
        let bad = RenormParams { eps: rat(1, 100), ..prm.clone() };
        assert!(l1_renorm(&xk_basis(1), &bad).is_err());
        let inner = l1_renorm_inner(3, &Universe::Naturals, &s(&[2, 5])).unwrap();
        assert!(is_plegma(&inner).unwrap());
        let half = RenormParams { b: vec![rat(1, 2), rat(-1, 2)], ..prm };
        let y = l1_renorm(&xk_basis(1), &half).unwrap();
        let pairs = vec![(s(&[1, 3]), s(&[2, 4])), (s(&[2, 5]), s(&[4, 6]))];
        assert_eq!(validate_plegma_block(&y, &pairs, false).unwrap(), BlockCheck::Ok);
    }

    #[test]
    fn registry() {
        for name in REGISTRY {
            let spec = match *name {
                "basis" => json!({"name": "basis", "k": 2, "engine": {"engine": "lp", "p": "1"}}),
                "constant" => json!({"name": "constant", "value": [{"index": [1], "value": "1"}]}),
                n => json!({"name": n}),
            };
            assert!(!from_spec(&spec).unwrap().name.is_empty());
        }
        assert!(from_spec(&json!({"name": "nope"})).is_err());
    }
}
