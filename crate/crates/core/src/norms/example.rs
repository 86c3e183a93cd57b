//! The plegma-sup norm on `c00([ℕ]^{k+1})`:
//! `‖x‖ = sup ‖Σ_i x(s_i) e_i‖_base` over plegma tuples `(s_i)_{i=1}^l`
//! with `s_1(1) >= l`.
//!
//! For a 1-unconditional, spreading base, members with zero coefficient
//! never help, so the sup runs over plegma chains inside `supp(x)`. Other
//! bases are refused; [`ExampleNorm::lower_bound`] gives the restricted sup,
//! which is still a lower bound.

use std::cmp::Ordering;
use std::sync::Arc;

use serde_json::{json, Value};

use super::NormEngine;
use crate::error::{invalid, Error, Result};
use crate::num::{NormValue, Rational};
use crate::plegma::extends_chain;
use crate::subset::FinSubset;
use crate::vector::SparseVec;

#[derive(Clone)]
pub struct ExampleNorm {
    /// Indices are `(k+1)`-sets.
    pub k: usize,
    base: Arc<dyn NormEngine>,
}

impl ExampleNorm {
    pub fn new(k: usize, base: Arc<dyn NormEngine>) -> Result<Self> {
        if !base.is_unconditional_spreading() {
            return Err(Error::InvalidConfig(format!(
                "base engine {} is not 1-unconditional and spreading; exact mode refused (use the lower bound)",
                base.name()
            )));
        }
        Ok(ExampleNorm { k, base })
    }

    /// No check on the base.
    pub fn lower_bound_only(k: usize, base: Arc<dyn NormEngine>) -> Self {
        ExampleNorm { k, base }
    }

    fn sup_over_chains(&self, x: &SparseVec) -> Result<(NormValue, Vec<FinSubset>)> {
        if let Some(a) = x.arity() {
            if a != self.k + 1 {
                return invalid(format!("expected indices of size {}, got {a}", self.k + 1));
            }
        }
        let entries: Vec<(FinSubset, Rational)> = x.iter().map(|(s, a)| (s.clone(), a.clone())).collect();
        let mut best = (NormValue::zero(), Vec::new());
        let mut chain: Vec<usize> = Vec::new();
        self.walk(&entries, &mut chain, &mut best)?;
        let tuple = best.1.iter().map(|&i: &usize| entries[i].0.clone()).collect();
        Ok((best.0, tuple))
    }

    fn walk(
        &self,
        entries: &[(FinSubset, Rational)],
        chain: &mut Vec<usize>,
        best: &mut (NormValue, Vec<usize>),
    ) -> Result<()> {
        if !chain.is_empty() {
            let coeffs = SparseVec::from_nat(chain.iter().enumerate().map(|(i, &c)| (i as u32 + 1, entries[c].1.clone())));
            let v = self.base.eval(&coeffs)?;
            if v.cmp_value(&best.0) == Ordering::Greater {
                *best = (v, chain.clone());
            }
        }
        for j in 0..entries.len() {
            let cand = &entries[j].0;
            let l = chain.len() + 1;
            let ok = match chain.first() {
                None => cand.at(1) as usize >= 1,
                Some(&f) => {
                    let first = &entries[f].0;
                    j > *chain.last().unwrap()
                        && (first.at(1) as usize) >= l
                        && extends_chain(first, &entries[*chain.last().unwrap()].0, cand)
                }
            };
            if ok {
                chain.push(j);
                self.walk(entries, chain, best)?;
                chain.pop();
            }
        }
        Ok(())
    }

    /// The sup over chains inside the support, for any base.
    pub fn lower_bound(&self, x: &SparseVec) -> Result<NormValue> {
        Ok(self.sup_over_chains(x)?.0)
    }

    /// The norm and a plegma tuple attaining it.
    pub fn eval_with_witness(&self, x: &SparseVec) -> Result<(NormValue, Vec<FinSubset>)> {
        self.sup_over_chains(x)
    }
}

impl NormEngine for ExampleNorm {
    fn name(&self) -> &str {
        "example"
    }

    fn params(&self) -> Value {
        json!({"engine": "example", "k": self.k, "base": self.base.params()})
    }

    fn eval(&self, x: &SparseVec) -> Result<NormValue> {
        Ok(self.sup_over_chains(x)?.0)
    }

    fn is_unconditional(&self) -> bool {
        true
    }

    fn certify(&self, x: &SparseVec) -> Result<Option<Value>> {
        let (v, tuple) = self.sup_over_chains(x)?;
        Ok(Some(json!({"plegma_tuple": tuple, "value": v.to_json()})))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lp::{Exponent, LpNorm};
    use crate::num::int;

    fn e(v: &[u32]) -> SparseVec {
        SparseVec::unit(FinSubset::new(v.to_vec()).unwrap())
    }

    #[test]
    fn example_values() {
        let n = ExampleNorm::new(1, Arc::new(LpNorm::new(Exponent::One))).unwrap();
        assert_eq!(n.eval(&e(&[2, 4]).add(&e(&[3, 5]))).unwrap(), NormValue::Exact(int(2)));
        assert_eq!(n.eval(&e(&[1, 3]).add(&e(&[2, 4]))).unwrap(), NormValue::Exact(int(1)));
        assert_eq!(n.eval(&e(&[7, 9])).unwrap(), NormValue::Exact(int(1)));
        assert_eq!(n.eval(&SparseVec::zero()).unwrap(), NormValue::zero());
    }
}
