use std::fmt::Write as _;

use plegma_lab::acceptance;
use plegma_lab::norms::{EngineConfig, TsirelsonConfig};
use plegma_lab::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::input;
use crate::output::Report;

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    /// Reduced instance sizes; finishes in about a second.
    #[arg(long)]
    quick: bool,
    /// Criterion ids to run, e.g. 1,3,6.
    #[arg(long)]
    only: Option<String>,
    /// Also validate an engine config (JSON or @file) before the suite.
    #[arg(long)]
    engine_config: Option<String>,
}

/// `Err` with the reason when a config fails validation.
fn validate(text: &str) -> Result<String, String> {
    let v = input::json(text).map_err(|e| e.to_string())?;
    let cfg = EngineConfig::from_json(&v).map_err(|e| e.to_string())?;
    if let EngineConfig::Tsirelson { preset, config } = &cfg {
        let tc = match (config, preset) {
            (Some(c), _) => c.clone(),
            (None, Some(p)) => TsirelsonConfig::preset(p).map_err(|e| e.to_string())?,
            (None, None) => TsirelsonConfig::desk(),
        };
        tc.validate().map_err(|e| e.to_string())?;
    }
    cfg.build().map(|e| format!("{} accepted", e.name())).map_err(|e| e.to_string())
}

pub fn run(a: &Args) -> anyhow::Result<Report> {
    let mut text = String::new();
    let mut out = json!({"quick": a.quick});
    let mut config_ok = true;
    if let Some(c) = &a.engine_config {
        let res = validate(c);
        config_ok = res.is_ok();
        let (tag, msg) = match &res {
            Ok(m) => ("PASS", m.clone()),
            Err(m) => ("FAIL", format!("validation failed: {m}")),
        };
        let _ = writeln!(text, "[{tag}] config: {msg}");
        out["config"] = json!({"pass": config_ok, "detail": msg});
    }
    let ids = match &a.only {
        Some(list) => input::list::<u32>(list)?,
        None => acceptance::ids(),
    };
    let mut results = Vec::new();
    for id in ids {
        let r = acceptance::run(id, a.quick)
            .ok_or_else(|| Error::InvalidInput(format!("no criterion {id}; known ids {:?}", acceptance::ids())))?;
        let _ = writeln!(text, "{r}");
        results.push(r);
    }
    let passed = results.iter().filter(|r| r.pass).count();
    let _ = write!(text, "{passed} of {} criteria pass{}", results.len(), if a.quick { " (quick sizes)" } else { "" });
    out["criteria"] = Value::Array(results.iter().map(|r| r.to_json()).collect());
    out["passed"] = json!(passed);
    let status = if !config_ok {
        2
    } else if passed < results.len() {
        1
    } else {
        0
    };
    Ok(Report::new(out, text).status(status))
}
