//! Parsing of command-line values. Structured values are JSON text, or
//! `@path` to read the JSON from a file.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use clap::Args;
use plegma_lab::norms::{EngineConfig, DEFAULT_EXACT_BOUND};
use plegma_lab::num::parse_rational;
use plegma_lab::zoo::{from_spec, rationals_from_json, KSeqGen};
use plegma_lab::{Error, FinSubset, Rational, Result, SparseVec, Universe};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::Format;

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub fn json(text: &str) -> Result<Value> {
    let owned;
    let body = match text.strip_prefix('@') {
        Some(path) => {
            owned = std::fs::read_to_string(path).map_err(|e| bad(format!("reading {path}: {e}")))?;
            owned.as_str()
        }
        None => text,
    };
    serde_json::from_str(body).map_err(|e| bad(format!("malformed JSON {text:?}: {e}")))
}

fn is_json(text: &str) -> bool {
    text.starts_with(['{', '[', '@'])
}

pub fn set(text: &str) -> Result<FinSubset> {
    serde_json::from_value(json(text)?).map_err(|e| bad(format!("{text:?} is not a finite set: {e}")))
}

pub fn family(text: &str) -> Result<Vec<FinSubset>> {
    serde_json::from_value(json(text)?).map_err(|e| bad(format!("{text:?} is not a list of finite sets: {e}")))
}

pub fn vector(text: &str) -> Result<SparseVec> {
    SparseVec::from_json(&json(text)?)
}

pub fn universe(text: &str) -> Result<Universe> {
    text.parse()
}

pub fn rational(text: &str) -> Result<Rational> {
    parse_rational(text)
}

/// `[a, b, c]` as JSON, or `a,b,c`.
pub fn rationals(text: &str) -> Result<Vec<Rational>> {
    if is_json(text) {
        rationals_from_json(&json(text)?)
    } else {
        text.split(',').map(parse_rational).collect()
    }
}

/// `1,2,3`, `[1,2,3]` or `1 2 3`.
pub fn list<T: FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    text.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split([',', ' '])
        .filter(|p| !p.is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|e| bad(format!("bad list entry {p:?}: {e}"))))
        .collect()
}

/// Norm engine selection.
#[derive(Args, Debug, Serialize)]
pub struct EngineArgs {
    /// lp, l1, l2, c0, schreier_plegmatic, tsirelson, example, or a JSON engine config.
    #[arg(long)]
    pub engine: String,
    /// Index sets have size k+1 (schreier_plegmatic, example).
    #[arg(long)]
    pub k: Option<usize>,
    /// Exponent for lp: 1, 2, inf or a real > 1.
    #[arg(long)]
    pub p: Option<String>,
    /// exact or greedy (schreier_plegmatic).
    #[arg(long)]
    pub mode: Option<String>,
    /// Largest support evaluated exactly (schreier_plegmatic).
    #[arg(long)]
    pub bound: Option<usize>,
    /// desk or paper (tsirelson).
    #[arg(long)]
    pub preset: Option<String>,
    /// Base engine of the example norm: a name or JSON config (default c0).
    #[arg(long)]
    pub base: Option<String>,
    /// Example norm over a base that is not unconditional and spreading.
    #[arg(long)]
    pub lower_bound_only: bool,
}

impl EngineArgs {
    pub fn config(&self) -> Result<EngineConfig> {
        engine_config(&self.engine, self)
    }
}

fn engine_config(name: &str, a: &EngineArgs) -> Result<EngineConfig> {
    let need_k = || a.k.ok_or_else(|| Error::InvalidConfig(format!("engine {name} needs --k")));
    let v = match name {
        _ if is_json(name) => json(name)?,
        "lp" => json!({"engine": "lp", "p": a.p.clone().unwrap_or_else(|| "1".into())}),
        "l1" => json!({"engine": "lp", "p": "1"}),
        "l2" => json!({"engine": "lp", "p": "2"}),
        "c0" | "linf" => json!({"engine": "lp", "p": "inf"}),
        "schreier_plegmatic" | "schreier" => json!({
            "engine": "schreier_plegmatic",
            "k": need_k()?,
            "mode": a.mode.clone().unwrap_or_else(|| "exact".into()),
            "bound": a.bound.unwrap_or(DEFAULT_EXACT_BOUND),
        }),
        "tsirelson" => json!({"engine": "tsirelson", "preset": a.preset.clone().unwrap_or_else(|| "desk".into())}),
        "example" => {
            let base_name = a.base.as_deref().unwrap_or("c0");
            let base = engine_config(base_name, &EngineArgs { p: a.p.clone(), ..EngineArgs::named(base_name) })?;
            json!({"engine": "example", "k": need_k()?, "base": base, "lower_bound_only": a.lower_bound_only})
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown engine {other:?} (lp, l1, l2, c0, schreier_plegmatic, tsirelson, example or JSON)"
            )))
        }
    };
    EngineConfig::from_json(&v)
}

impl EngineArgs {
    /// Defaults for every option.
    pub fn named(engine: &str) -> Self {
        EngineArgs {
            engine: engine.into(),
            k: None,
            p: None,
            mode: None,
            bound: None,
            preset: None,
            base: None,
            lower_bound_only: false,
        }
    }
}

/// Size of the index sets an engine reads.
pub fn engine_arity(cfg: &EngineConfig) -> usize {
    match cfg {
        EngineConfig::SchreierPlegmatic { k, .. } | EngineConfig::Example { k, .. } => k + 1,
        _ => 1,
    }
}

/// A named generator with arity `k`, or a JSON generator spec.
pub fn generator(text: &str, k: usize) -> Result<KSeqGen> {
    let spec = if is_json(text) { json(text)? } else { json!({"name": text, "k": k}) };
    from_spec(&spec)
}

/// Turns `{"command": "sm cesaro", "args": {...}}` into an argument vector.
pub fn config_argv(path: &Path, out: Option<&Path>, format: Format) -> anyhow::Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("reading {}: {e}", path.display())))?;
    let cfg: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    let obj = cfg.as_object().ok_or_else(|| Error::InvalidConfig("config must be a JSON object".into()))?;
    let known = ["command", "args", "out", "format", "seed"];
    if let Some(k) = obj.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::InvalidConfig(format!("unknown config key {k:?} (expected {})", known.join(", "))).into());
    }
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidConfig("config needs a \"command\" string".into()))?;
    if command.split_whitespace().next() == Some("run") {
        return Err(Error::InvalidConfig("run configs cannot nest".into()).into());
    }
    let mut argv: Vec<OsString> = vec!["plegma-lab".into()];
    argv.extend(command.split_whitespace().map(OsString::from));
    let mut args = match obj.get("args") {
        None => serde_json::Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(Error::InvalidConfig("\"args\" must be an object".into()).into()),
    };
    if let Some(seed) = obj.get("seed") {
        args.insert("seed".into(), seed.clone());
    }
    for (key, val) in &args {
        let flag = format!("--{}", key.replace('_', "-"));
        match val {
            Value::Bool(true) => argv.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => argv.extend([flag.into(), s.into()]),
            other => argv.extend([flag.into(), other.to_string().into()]),
        }
    }
    match (out, obj.get("out").and_then(Value::as_str)) {
        (Some(dir), _) => argv.extend(["--out".into(), dir.as_os_str().to_owned()]),
        (None, Some(dir)) => argv.extend(["--out".into(), dir.into()]),
        (None, None) => {}
    }
    let fmt = match (format, obj.get("format").and_then(Value::as_str)) {
        (Format::Text, Some(f)) => f.to_string(),
        (f, _) => serde_json::to_value(f)?.as_str().unwrap_or("text").to_string(),
    };
    argv.extend(["--format".into(), fmt.into()]);
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_sets() {
        assert_eq!(list::<usize>("[1, 3,5]").unwrap(), vec![1, 3, 5]);
        assert_eq!(list::<usize>("2 4").unwrap(), vec![2, 4]);
        assert!(list::<usize>("1,x").is_err());
        assert_eq!(set("[2,5]").unwrap().elems(), &[2, 5]);
        assert!(set("[5,2]").is_err());
        assert_eq!(rationals("1/2,-1/2").unwrap().len(), 2);
    }

    #[test]
    fn engine_names() {
        let mut a = EngineArgs::named("schreier_plegmatic");
        assert!(matches!(a.config(), Err(Error::InvalidConfig(_))));
        a.k = Some(1);
        assert_eq!(engine_arity(&a.config().unwrap()), 2);
        a.engine = "example".into();
        assert!(a.config().unwrap().build().is_ok());
        a.engine = "nope".into();
        assert!(a.config().is_err());
    }
}
