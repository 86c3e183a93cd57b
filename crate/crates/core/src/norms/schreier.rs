//! The Schreier plegmatic norm on `c00([ℕ]^{k+1})`,
//! `‖x‖² = sup Σ_i ‖P_i x‖_1²` over pairwise disjoint Schreier plegmatic
//! families `P_i`, and its norming set `W`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::NormEngine;
use crate::error::{invalid, Error, Result};
use crate::num::{fmt_rational, rational_from_json, to_f64, NormValue, Rational};
use crate::plegma::schreier_greedy;
use crate::subset::FinSubset;
use crate::vector::SparseVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchreierMode {
    Exact,
    Greedy,
}

pub const DEFAULT_EXACT_BOUND: usize = 12;

#[derive(Clone, Debug)]
pub struct SchreierPlegmatic {
    /// Indices are `(k+1)`-sets.
    pub k: usize,
    pub mode: SchreierMode,
    pub bound: usize,
}

#[derive(Clone, Debug)]
pub struct SchreierEvaluation {
    pub value: NormValue,
    pub lower: NormValue,
    pub upper: NormValue,
    /// The families realising `lower`.
    pub partition: Vec<Vec<FinSubset>>,
    /// Blocks `(F_1, ..., F_{k+1})` witnessing each family.
    pub blocks: Vec<Vec<FinSubset>>,
    pub max_padding: usize,
    pub certificate: WFunctional,
    pub exact: bool,
}

impl SchreierEvaluation {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_json(),
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "exact": self.exact,
            "partition": self.partition,
            "blocks": self.blocks,
            "max_padding": self.max_padding,
            "certificate": self.certificate.to_json(),
        })
    }
}

impl SchreierPlegmatic {
    pub fn new(k: usize, mode: SchreierMode) -> Self {
        SchreierPlegmatic { k, mode, bound: DEFAULT_EXACT_BOUND }
    }

    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = bound;
        self
    }

    fn entries(&self, x: &SparseVec) -> Result<Vec<(FinSubset, Rational)>> {
        if let Some(a) = x.arity() {
            if a != self.k + 1 {
                return invalid(format!("expected indices of size {}, got {a}", self.k + 1));
            }
        }
        Ok(x.iter().map(|(s, a)| (s.clone(), a.clone())).collect())
    }

    pub fn evaluate(&self, x: &SparseVec) -> Result<SchreierEvaluation> {
        let entries = self.entries(x)?;
        match self.mode {
            SchreierMode::Exact => {
                if entries.len() > self.bound {
                    return Err(Error::ScaleRefusal(format!(
                        "support has {} points, exact bound is {}; use mode greedy for certified bounds",
                        entries.len(),
                        self.bound
                    )));
                }
                Ok(self.exact(&entries))
            }
            SchreierMode::Greedy => Ok(self.greedy(&entries, x)),
        }
    }

    fn finish(&self, entries: &[(FinSubset, Rational)], parts: Vec<Vec<usize>>, upper: NormValue, exact: bool) -> SchreierEvaluation {
        let mut partition = Vec::new();
        let mut blocks = Vec::new();
        let mut atoms = Vec::new();
        let mut total = Rational::zero();
        let mut max_padding = 0;
        for part in parts {
            let fam: Vec<FinSubset> = part.iter().map(|&i| entries[i].0.clone()).collect();
            let feas = schreier_greedy(&fam, true).expect("nonempty family");
            debug_assert!(feas.feasible);
            max_padding = max_padding.max(feas.padding);
            let mass = part.iter().fold(Rational::zero(), |acc, &i| acc + entries[i].1.abs());
            total += &mass * &mass;
            atoms.push(WAtom {
                weight: mass,
                family: part.iter().map(|&i| (entries[i].0.clone(), if entries[i].1.is_negative() { -1 } else { 1 })).collect(),
            });
            blocks.push(feas.witness.unwrap_or_default());
            partition.push(fam);
        }
        let lower = NormValue::sqrt_of(total.clone());
        let normalizer = if total.is_zero() { Rational::one() } else { total };
        SchreierEvaluation {
            value: if exact { lower.clone() } else { NormValue::Approx { value: lower.to_f64(), error: upper.to_f64() - lower.to_f64() } },
            lower,
            upper,
            partition,
            blocks,
            max_padding,
            certificate: WFunctional { k: self.k, atoms, normalizer },
            exact,
        }
    }

    /// Subset dynamic programme over the support: `best(S)` is the largest
    /// `Σ mass(T_i)²` over partitions of `S` into Schreier plegmatic families,
    /// where the family holding the least element of `S` is chosen first.
    /// `O(3^n)` steps for `n` support points.
    fn exact(&self, entries: &[(FinSubset, Rational)]) -> SchreierEvaluation {
        let n = entries.len();
        if n == 0 {
            return self.finish(entries, Vec::new(), NormValue::zero(), true);
        }
        // integer masses over a common denominator
        let denom = entries.iter().fold(BigInt::one(), |acc, (_, a)| num_integer::lcm(acc, a.denom().clone()));
        let ints: Vec<BigInt> = entries.iter().map(|(_, a)| (a.abs() * Rational::from_integer(denom.clone())).to_integer()).collect();
        let full = (1usize << n) - 1;
        let mut feasible = vec![false; full + 1];
        let mut mass = vec![BigInt::zero(); full + 1];
        for mask in 1..=full {
            let low = mask.trailing_zeros() as usize;
            mass[mask] = &mass[mask & (mask - 1)] + &ints[low];
            let fam: Vec<FinSubset> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| entries[i].0.clone()).collect();
            feasible[mask] = schreier_greedy(&fam, true).map(|f| f.feasible).unwrap_or(false);
        }
        let mut best = vec![BigInt::zero(); full + 1];
        let mut choice = vec![0usize; full + 1];
        for set in 1..=full {
            let low = set & set.wrapping_neg();
            let rest = set ^ low;
            // submasks of `rest`, each joined with the low bit
            let mut sub = rest;
            let mut b: Option<BigInt> = None;
            let mut arg = 0;
            loop {
                let t = sub | low;
                if feasible[t] {
                    let val = &mass[t] * &mass[t] + &best[set ^ t];
                    if b.as_ref().is_none_or(|bb| val > *bb) {
                        b = Some(val);
                        arg = t;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            best[set] = b.expect("singletons are always feasible");
            choice[set] = arg;
        }
        let mut parts = Vec::new();
        let mut set = full;
        while set != 0 {
            let t = choice[set];
            parts.push((0..n).filter(|i| t >> i & 1 == 1).collect());
            set ^= t;
        }
        let upper = NormValue::sqrt_of(Rational::new(best[full].clone(), &denom * &denom));
        self.finish(entries, parts, upper, true)
    }

    /// First-fit by decreasing modulus; certified lower bound, upper bound `‖x‖_1`.
    fn greedy(&self, entries: &[(FinSubset, Rational)], x: &SparseVec) -> SchreierEvaluation {
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| entries[b].1.abs().cmp(&entries[a].1.abs()).then(a.cmp(&b)));
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for i in order {
            let mut placed = false;
            for part in parts.iter_mut() {
                let mut fam: Vec<FinSubset> = part.iter().map(|&j| entries[j].0.clone()).collect();
                fam.push(entries[i].0.clone());
                if schreier_greedy(&fam, true).map(|f| f.feasible).unwrap_or(false) {
                    part.push(i);
                    placed = true;
                    break;
                }
            }
            if !placed {
                parts.push(vec![i]);
            }
        }
        for p in parts.iter_mut() {
            p.sort_unstable();
        }
        self.finish(entries, parts, NormValue::Exact(x.l1()), false)
    }
}

impl NormEngine for SchreierPlegmatic {
    fn name(&self) -> &str {
        "schreier_plegmatic"
    }

    fn params(&self) -> Value {
        json!({"engine": "schreier_plegmatic", "k": self.k, "mode": self.mode, "bound": self.bound})
    }

    fn eval(&self, x: &SparseVec) -> Result<NormValue> {
        Ok(self.evaluate(x)?.value)
    }

    fn is_unconditional(&self) -> bool {
        true
    }

    fn bounds(&self, x: &SparseVec) -> Result<(NormValue, NormValue)> {
        let ev = match self.evaluate(x) {
            Err(Error::ScaleRefusal(_)) => SchreierPlegmatic { mode: SchreierMode::Greedy, ..self.clone() }.evaluate(x)?,
            other => other?,
        };
        Ok((ev.lower, ev.upper))
    }

    fn certify(&self, x: &SparseVec) -> Result<Option<Value>> {
        Ok(Some(self.evaluate(x)?.to_json()))
    }
}

/// One term `λ_i f_i` of a functional in `W`, with `λ_i = weight / sqrt(normalizer)`
/// and `f_i = Σ_{s∈P_i} sign(s)·e*_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WAtom {
    pub weight: Rational,
    pub family: Vec<(FinSubset, i8)>,
}

/// `Σ_i λ_i f_i` with disjoint Schreier plegmatic families and `Σ λ_i² <= 1`.
/// Weights are stored as rationals over a common `sqrt(normalizer)` so that
/// values like `1/√2` stay exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WFunctional {
    pub k: usize,
    pub atoms: Vec<WAtom>,
    pub normalizer: Rational,
}

/// `numerator / sqrt(normalizer)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalValue {
    pub numerator: Rational,
    pub normalizer: Rational,
}

impl FunctionalValue {
    pub fn to_f64(&self) -> f64 {
        to_f64(&self.numerator) / to_f64(&self.normalizer).sqrt()
    }

    /// The value as a norm value when nonnegative.
    pub fn as_norm_value(&self) -> Option<NormValue> {
        if self.numerator.is_negative() {
            return None;
        }
        Some(NormValue::sqrt_of(&self.numerator * &self.numerator / &self.normalizer))
    }

    /// Exact comparison with a norm value.
    pub fn cmp_norm(&self, v: &NormValue) -> Ordering {
        if self.numerator.is_negative() {
            return Ordering::Less;
        }
        self.as_norm_value().unwrap().cmp_value(v)
    }

    pub fn to_json(&self) -> Value {
        json!({"numerator": fmt_rational(&self.numerator), "normalizer": fmt_rational(&self.normalizer), "value": self.to_f64()})
    }
}

impl WFunctional {
    pub fn zero(k: usize) -> Self {
        WFunctional { k, atoms: Vec::new(), normalizer: Rational::one() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidFunctional(m));
        if !self.normalizer.is_positive() {
            return bad("normalizer must be positive".into());
        }
        let mut seen = BTreeSet::new();
        let mut sq = Rational::zero();
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.family.is_empty() {
                return bad(format!("atom {i} has an empty family"));
            }
            for (s, sign) in &atom.family {
                if s.len() != self.k + 1 {
                    return bad(format!("index {s} in atom {i} is not a {}-set", self.k + 1));
                }
                if *sign != 1 && *sign != -1 {
                    return bad(format!("sign {sign} in atom {i} is not ±1"));
                }
                if !seen.insert(s.clone()) {
                    return bad(format!("families overlap at {s}"));
                }
            }
            let fam: Vec<FinSubset> = atom.family.iter().map(|(s, _)| s.clone()).collect();
            if !schreier_greedy(&fam, true)?.feasible {
                return bad(format!("family of atom {i} is not Schreier plegmatic"));
            }
            sq += &atom.weight * &atom.weight;
        }
        if sq > self.normalizer {
            return bad(format!(
                "sum of squared coefficients is {} > 1",
                fmt_rational(&(sq / &self.normalizer))
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "normalizer": fmt_rational(&self.normalizer),
            "atoms": self.atoms.iter().map(|a| json!({
                "weight": fmt_rational(&a.weight),
                "family": a.family.iter().map(|(s, g)| json!([s.elems(), g])).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidFunctional(m.to_string());
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| bad("missing k"))? as usize;
        let normalizer = match v.get("normalizer") {
            Some(n) => rational_from_json(n)?,
            None => Rational::one(),
        };
        let mut atoms = Vec::new();
        for a in v.get("atoms").and_then(Value::as_array).ok_or_else(|| bad("missing atoms"))? {
            let weight = rational_from_json(a.get("weight").ok_or_else(|| bad("atom without weight"))?)?;
            let mut family = Vec::new();
            for e in a.get("family").and_then(Value::as_array).ok_or_else(|| bad("atom without family"))? {
                let (idx, sign) = match e {
                    Value::Array(p) if p.len() == 2 => (&p[0], p[1].as_i64().ok_or_else(|| bad("bad sign"))?),
                    Value::Array(_) => (e, 1),
                    _ => return Err(bad("bad family entry")),
                };
                let idx: Vec<u32> = serde_json::from_value(idx.clone()).map_err(|e| bad(&e.to_string()))?;
                family.push((FinSubset::new(idx)?, sign as i8));
            }
            atoms.push(WAtom { weight, family });
        }
        Ok(WFunctional { k, atoms, normalizer })
    }
}

/// `f(x)`; the functional is validated first.
pub fn w_functional_eval(f: &WFunctional, x: &SparseVec) -> Result<FunctionalValue> {
    f.validate()?;
    let mut num = Rational::zero();
    for atom in &f.atoms {
        let mut inner = Rational::zero();
        for (s, sign) in &atom.family {
            let v = x.get(s);
            if *sign < 0 {
                inner -= v;
            } else {
                inner += v;
            }
        }
        num += &atom.weight * inner;
    }
    Ok(FunctionalValue { numerator: num, normalizer: f.normalizer.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn s(v: &[u32]) -> FinSubset {
        FinSubset::new(v.to_vec()).unwrap()
    }

    fn e(v: &[u32]) -> SparseVec {
        SparseVec::unit(s(v))
    }

    #[test]
    fn norm_examples() {
        let eng = SchreierPlegmatic::new(1, SchreierMode::Exact);
        assert_eq!(eng.eval(&e(&[2, 4]).add(&e(&[3, 5]))).unwrap(), NormValue::Exact(int(2)));
        assert_eq!(eng.eval(&e(&[1, 3]).add(&e(&[2, 4]))).unwrap(), NormValue::Sqrt(int(2)));
        assert_eq!(eng.eval(&e(&[1, 2])).unwrap(), NormValue::Exact(int(1)));
        let y = e(&[1, 2]).add(&e(&[1, 3])).add(&e(&[2, 3])).scale(&rat(1, 3));
        assert_eq!(eng.eval(&y).unwrap(), NormValue::Sqrt(rat(1, 3)));
    }

    #[test]
    fn certificate_attains() {
        let eng = SchreierPlegmatic::new(1, SchreierMode::Exact);
        let x = e(&[1, 3]).add(&e(&[2, 4])).sub(&e(&[5, 9]).scale(&rat(1, 2)));
        let ev = eng.evaluate(&x).unwrap();
        let f = w_functional_eval(&ev.certificate, &x).unwrap();
        assert_eq!(f.as_norm_value().unwrap().exact_cmp(&ev.value), Some(Ordering::Equal));
    }

    #[test]
    fn refusal_and_greedy() {
        let mut x = SparseVec::zero();
        for a in 1..=4u32 {
            for b in a + 1..=a + 4 {
                x.add_entry(s(&[a, b]), int(1));
            }
        }
        let eng = SchreierPlegmatic::new(1, SchreierMode::Exact);
        assert!(matches!(eng.eval(&x), Err(Error::ScaleRefusal(_))));
        let g = SchreierPlegmatic::new(1, SchreierMode::Greedy).evaluate(&x).unwrap();
        assert!(g.lower.cmp_value(&g.upper) != Ordering::Greater);
    }

    #[test]
    fn functional_examples() {
        let y = e(&[1, 2]).add(&e(&[1, 3])).add(&e(&[2, 3])).scale(&rat(1, 3));
        let f = WFunctional { k: 1, atoms: vec![WAtom { weight: int(1), family: vec![(s(&[2, 3]), 1)] }], normalizer: int(1) };
        assert_eq!(w_functional_eval(&f, &y).unwrap().numerator, rat(1, 3));
        let x = e(&[1, 3]).add(&e(&[2, 4]));
        let g = WFunctional {
            k: 1,
            atoms: vec![
                WAtom { weight: int(1), family: vec![(s(&[1, 3]), 1)] },
                WAtom { weight: int(1), family: vec![(s(&[2, 4]), 1)] },
            ],
            normalizer: int(2),
        };
        assert_eq!(w_functional_eval(&g, &x).unwrap().as_norm_value().unwrap(), NormValue::Sqrt(int(2)));
        assert_eq!(w_functional_eval(&WFunctional::zero(1), &x).unwrap().numerator, int(0));
        let overlap = WFunctional {
            k: 1,
            atoms: vec![
                WAtom { weight: int(1), family: vec![(s(&[1, 3]), 1)] },
                WAtom { weight: int(1), family: vec![(s(&[1, 3]), 1)] },
            ],
            normalizer: int(2),
        };
        assert!(matches!(w_functional_eval(&overlap, &x), Err(Error::InvalidFunctional(_))));
        let heavy = WFunctional { k: 1, atoms: vec![WAtom { weight: int(2), family: vec![(s(&[1, 3]), 1)] }], normalizer: int(1) };
        assert!(heavy.validate().is_err());
        assert_eq!(WFunctional::from_json(&g.to_json()).unwrap(), g);
    }
}
