//! `k`-Cesàro means `C(n,k)^{-1} Σ_{s ∈ [M|n]^k} x_s`.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::combin::{binomial_big, combinations};
use crate::error::{invalid, Result};
use crate::norms::{w_functional_eval, WAtom, WFunctional};
use crate::num::{fmt_rational, NormValue, Rational};
use crate::subset::{FinSubset, Universe};
use crate::vector::SparseVec;
use crate::zoo::KSeqGen;

pub fn cesaro_mean(g: &KSeqGen, universe: &Universe, n: usize) -> Result<SparseVec> {
    if n < g.k {
        return invalid(format!("need n >= k = {}, got {n}", g.k));
    }
    let elems = universe.first_n(n)?;
    let mut sum = SparseVec::zero();
    for c in combinations(&elems, g.k) {
        sum = sum.add(&g.vec(&FinSubset::from_sorted(c))?);
    }
    Ok(sum.scale(&Rational::new(BigInt::one(), binomial_big(n as u64, g.k as u64))))
}

/// `f_n = Σ_{s ∈ F_1 × ... × F_K} e*_s` with `F_i = {M(in+1), ..., M((i+1)n)}`.
pub fn paper_functional(arity: usize, universe: &Universe, n: usize) -> Result<WFunctional> {
    if arity == 0 || n == 0 {
        return invalid("arity and n must be positive");
    }
    let blocks: Option<Vec<Vec<u32>>> =
        (1..=arity).map(|i| ((i * n + 1)..=((i + 1) * n)).map(|p| universe.element(p)).collect()).collect();
    let Some(blocks) = blocks else {
        return invalid("universe too short for the functional");
    };
    let mut family = Vec::new();
    let mut idx = vec![0usize; arity];
    loop {
        family.push((FinSubset::from_sorted((0..arity).map(|i| blocks[i][idx[i]]).collect()), 1i8));
        let mut p = arity;
        loop {
            if p == 0 {
                return Ok(WFunctional { k: arity - 1, atoms: vec![WAtom { weight: Rational::one(), family }], normalizer: Rational::one() });
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < n {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// `K! / (K+1)^K`, the limit of `n^K / C((K+1)n, K)`.
pub fn cesaro_limit(arity: usize) -> Rational {
    let fact: BigInt = (1..=arity as u64).map(BigInt::from).product();
    Rational::new(fact, BigInt::from(arity as u64 + 1).pow(arity as u32))
}

#[derive(Clone, Debug)]
pub struct CesaroRow {
    pub n: usize,
    /// Size of the initial segment averaged over.
    pub segment: usize,
    pub support: usize,
    pub lower: NormValue,
    pub upper: NormValue,
    pub functional: Option<Rational>,
    pub analytic: Option<Rational>,
}

impl CesaroRow {
    pub fn exact_norm(&self) -> Option<&NormValue> {
        (self.lower.exact_cmp(&self.upper) == Some(std::cmp::Ordering::Equal)).then_some(&self.lower)
    }
}

#[derive(Clone, Debug)]
pub struct CesaroTrace {
    pub generator: Value,
    pub universe: String,
    pub rows: Vec<CesaroRow>,
}

impl CesaroTrace {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "segment", "support", "norm_lower", "norm_upper", "functional", "analytic"]).unwrap();
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.segment.to_string(),
                r.support.to_string(),
                r.lower.to_string(),
                r.upper.to_string(),
                r.functional.as_ref().map(fmt_rational).unwrap_or_default(),
                r.analytic.as_ref().map(fmt_rational).unwrap_or_default(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "generator": self.generator,
            "universe": self.universe,
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "segment": r.segment,
                "support": r.support,
                "lower": r.lower.to_json(),
                "upper": r.upper.to_json(),
                "functional": r.functional.as_ref().map(fmt_rational),
                "analytic": r.analytic.as_ref().map(fmt_rational),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Norm bounds of the Cesàro means for each `n`. With `paper` set, the mean
/// at `n` is taken over `[M|(K+1)n]^K` and paired with the functional `f_n`
/// together with the closed form `n^K / C((K+1)n, K)`.
pub fn cesaro_scan(g: &KSeqGen, universe: &Universe, ns: &[usize], paper: bool) -> Result<CesaroTrace> {
    let arity = g.k;
    let mut rows = Vec::new();
    for &n in ns {
        let segment = if paper { (arity + 1) * n } else { n };
        let y = cesaro_mean(g, universe, segment)?;
        let (lower, upper) = g.ambient.bounds(&y)?;
        let (functional, analytic) = if paper {
            let f = paper_functional(arity, universe, n)?;
            let v = w_functional_eval(&f, &y)?;
            debug_assert!(v.normalizer.is_one());
            let analytic = Rational::new(BigInt::from(n as u64).pow(arity as u32), binomial_big(segment as u64, arity as u64));
            (Some(v.numerator), Some(analytic))
        } else {
            (None, None)
        };
        rows.push(CesaroRow { n, segment, support: y.nnz(), lower, upper, functional, analytic });
    }
    Ok(CesaroTrace { generator: g.describe(), universe: universe.to_string(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::Exponent;
    use crate::num::{int, rat};
    use crate::zoo::{lp_basis, xk_basis};

    #[test]
    fn mean_of_basis() {
        let y = cesaro_mean(&xk_basis(1), &Universe::Naturals, 3).unwrap();
        assert_eq!(y.nnz(), 3);
        assert_eq!(y.l1(), int(1));
        let v = xk_basis(1).norm(&y).unwrap();
        assert_eq!(v, NormValue::Sqrt(rat(1, 3)));
        let c = cesaro_mean(&lp_basis(Exponent::One), &Universe::Naturals, 4).unwrap();
        assert_eq!(c, SparseVec::from_nat((1..=4).map(|i| (i, rat(1, 4)))));
        assert!(cesaro_mean(&xk_basis(1), &Universe::Naturals, 1).is_err());
    }

    #[test]
    fn paper_values() {
        let t = cesaro_scan(&xk_basis(1), &Universe::Naturals, &[1, 2, 3], true).unwrap();
        for r in &t.rows {
            assert_eq!(r.functional, r.analytic);
        }
        assert_eq!(t.rows[0].functional, Some(rat(1, 3)));
        assert_eq!(cesaro_limit(2), rat(2, 9));
        assert!(t.to_csv().lines().count() == 4);
    }
}
