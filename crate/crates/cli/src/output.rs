//! Result emission: stdout in one format, plus optional artifact files.

use std::fs;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use plegma_lab::Error;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Report {
    pub json: Value,
    pub csv: Option<String>,
    pub text: String,
    pub warnings: Vec<String>,
    pub status: u8,
}

impl Report {
    pub fn new(json: Value, text: impl Into<String>) -> Self {
        Report { json, text: text.into(), ..Default::default() }
    }

    pub fn csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn warn(mut self, w: Option<String>) -> Self {
        self.warnings.extend(w);
        self
    }

    pub fn status(mut self, status: u8) -> Self {
        self.status = status;
        self
    }
}

/// Prints the report and writes artifacts; returns the exit status.
pub fn emit(r: &Report, name: &str, args: &impl Serialize, format: Format, out: Option<&Path>) -> anyhow::Result<u8> {
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let json_text = serde_json::to_string_pretty(&r.json)? + "\n";
    match format {
        Format::Text => {
            print!("{}", r.text);
            if !r.text.ends_with('\n') {
                println!();
            }
        }
        Format::Json => print!("{json_text}"),
        Format::Csv => match &r.csv {
            Some(c) => print!("{c}"),
            None => return Err(Error::InvalidInput(format!("`{name}` has no tabular output; use --format json")).into()),
        },
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut outputs = vec!["result.json"];
        fs::write(dir.join("result.json"), &json_text)?;
        if let Some(c) = &r.csv {
            fs::write(dir.join("result.csv"), c)?;
            outputs.push("result.csv");
        }
        let manifest = json!({
            "tool": "plegma-lab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": name,
            "args": args,
            "status": r.status,
            "warnings": r.warnings,
            "outputs": outputs,
        });
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    }
    Ok(r.status)
}
