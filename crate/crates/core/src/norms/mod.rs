//! Norm engines on finitely supported vectors.

mod example;
mod lp;
mod schreier;
mod tsirelson;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::num::NormValue;
use crate::vector::SparseVec;

pub use example::ExampleNorm;
pub use lp::{lp_eval, Exponent, LpNorm};
pub use schreier::{
    w_functional_eval, FunctionalValue, SchreierEvaluation, SchreierMode, SchreierPlegmatic, WAtom, WFunctional,
    DEFAULT_EXACT_BOUND,
};
pub use tsirelson::{Tsirelson, TsirelsonConfig, TsirelsonValue};

/// A seminorm on `c00` over some index domain. Engines are immutable and
/// evaluation is pure.
pub trait NormEngine: Send + Sync {
    fn name(&self) -> &str;

    fn params(&self) -> Value;

    fn eval(&self, x: &SparseVec) -> Result<NormValue>;

    /// Changing signs of coefficients never changes the value.
    fn is_unconditional(&self) -> bool {
        false
    }

    /// 1-unconditional and spreading with respect to the unit vectors.
    fn is_unconditional_spreading(&self) -> bool {
        false
    }

    /// Certified `(lower, upper)` bounds; engines that refuse exact evaluation
    /// at scale may still answer here.
    fn bounds(&self, x: &SparseVec) -> Result<(NormValue, NormValue)> {
        let v = self.eval(x)?;
        Ok((v.clone(), v))
    }

    /// A dual witness for the reported value, when the engine has one.
    fn certify(&self, _x: &SparseVec) -> Result<Option<Value>> {
        Ok(None)
    }
}

fn default_p() -> String {
    "1".into()
}

fn default_mode() -> SchreierMode {
    SchreierMode::Exact
}

fn default_bound() -> usize {
    DEFAULT_EXACT_BOUND
}

/// JSON engine selection, e.g. `{"engine":"schreier_plegmatic","k":1,"mode":"exact"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum EngineConfig {
    Lp {
        #[serde(default = "default_p")]
        p: String,
    },
    Example {
        k: usize,
        base: Box<EngineConfig>,
        #[serde(default)]
        lower_bound_only: bool,
    },
    Tsirelson {
        #[serde(default)]
        preset: Option<String>,
        #[serde(default)]
        config: Option<TsirelsonConfig>,
    },
    SchreierPlegmatic {
        k: usize,
        #[serde(default = "default_mode")]
        mode: SchreierMode,
        #[serde(default = "default_bound")]
        bound: usize,
    },
}

impl EngineConfig {
    pub fn from_json(v: &Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn build(&self) -> Result<Arc<dyn NormEngine>> {
        Ok(match self {
            EngineConfig::Lp { p } => Arc::new(LpNorm { p: Exponent::parse(p)? }),
            EngineConfig::Example { k, base, lower_bound_only } => {
                let base = base.build()?;
                if *lower_bound_only {
                    Arc::new(ExampleNorm::lower_bound_only(*k, base))
                } else {
                    Arc::new(ExampleNorm::new(*k, base)?)
                }
            }
            EngineConfig::Tsirelson { preset, config } => {
                let cfg = match (preset, config) {
                    (_, Some(c)) => c.clone(),
                    (Some(p), None) => TsirelsonConfig::preset(p)?,
                    (None, None) => TsirelsonConfig::desk(),
                };
                Arc::new(Tsirelson::new(cfg)?)
            }
            EngineConfig::SchreierPlegmatic { k, mode, bound } => {
                Arc::new(SchreierPlegmatic::new(*k, *mode).with_bound(*bound))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn build_from_json() {
        let e = EngineConfig::from_json(&json!({"engine": "schreier_plegmatic", "k": 1, "mode": "exact"})).unwrap();
        assert_eq!(e.build().unwrap().name(), "schreier_plegmatic");
        let e = EngineConfig::from_json(&json!({"engine": "example", "k": 1, "base": {"engine": "lp", "p": "1"}})).unwrap();
        assert_eq!(e.build().unwrap().name(), "example");
        let e = EngineConfig::from_json(&json!({"engine": "tsirelson", "preset": "paper"})).unwrap();
        assert_eq!(e.build().unwrap().name(), "tsirelson");
        assert!(EngineConfig::from_json(&json!({"engine": "nope"})).is_err());
    }
}
