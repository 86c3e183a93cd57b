//! `ℓ^p` and `c₀` norms on any index domain.

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::NormEngine;
use crate::error::{invalid, Result};
use crate::num::{to_f64, NormValue};
use crate::vector::SparseVec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    One,
    Two,
    Inf,
    /// Any other `p > 1`; evaluated in floating point.
    Real(f64),
}

impl Exponent {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Exponent::One),
            "2" => Ok(Exponent::Two),
            "inf" | "infinity" | "∞" | "c0" => Ok(Exponent::Inf),
            other => match other.parse::<f64>() {
                Ok(1.0) => Ok(Exponent::One),
                Ok(2.0) => Ok(Exponent::Two),
                Ok(p) if p > 1.0 && p.is_finite() => Ok(Exponent::Real(p)),
                _ => invalid(format!("p must be a real >= 1 or inf, got {other:?}")),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            Exponent::One => "1".into(),
            Exponent::Two => "2".into(),
            Exponent::Inf => "inf".into(),
            Exponent::Real(p) => p.to_string(),
        }
    }
}

pub fn lp_eval(p: Exponent, x: &SparseVec) -> NormValue {
    match p {
        Exponent::One => NormValue::Exact(x.l1()),
        Exponent::Two => NormValue::sqrt_of(x.l2_squared()),
        Exponent::Inf => NormValue::Exact(x.linf()),
        Exponent::Real(p) => {
            let s: f64 = x.iter().map(|(_, a)| to_f64(a).abs().powf(p)).sum();
            let v = s.powf(1.0 / p);
            NormValue::Approx { value: v, error: v * 1e-14 * (x.nnz().to_f64().unwrap_or(1.0) + 1.0) }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpNorm {
    pub p: Exponent,
}

impl LpNorm {
    pub fn new(p: Exponent) -> Self {
        LpNorm { p }
    }
}

impl NormEngine for LpNorm {
    fn name(&self) -> &str {
        "lp"
    }

    fn params(&self) -> Value {
        json!({"engine": "lp", "p": self.p.label()})
    }

    fn eval(&self, x: &SparseVec) -> Result<NormValue> {
        Ok(lp_eval(self.p, x))
    }

    fn is_unconditional(&self) -> bool {
        true
    }

    fn is_unconditional_spreading(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    #[test]
    fn lp_examples() {
        let x = SparseVec::from_nat([(1, int(1)), (2, int(-1))]);
        assert_eq!(lp_eval(Exponent::One, &x), NormValue::Exact(int(2)));
        let y = SparseVec::from_nat([(5, int(3))]);
        assert_eq!(lp_eval(Exponent::Inf, &y), NormValue::Exact(int(3)));
        let z = SparseVec::from_nat([(1, int(1)), (2, int(1))]);
        assert_eq!(lp_eval(Exponent::Two, &z), NormValue::Sqrt(int(2)));
        let w = lp_eval(Exponent::Real(3.0), &z);
        assert!((w.to_f64() - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(Exponent::parse("0.5").is_err());
    }
}
