use std::cmp::Ordering;
use std::fmt::Write as _;

use clap::{Args, Subcommand};
use plegma_lab::combin::random_combination;
use plegma_lab::norms::{w_functional_eval, EngineConfig, SchreierPlegmatic, TsirelsonConfig, WFunctional};
use plegma_lab::num::{fmt_rational, rat};
use plegma_lab::{Error, FinSubset, NormValue, Result, SparseVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{self, EngineArgs};
use crate::output::Report;

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Cmd {
    /// Evaluates a norm on a finitely supported vector, with its witness.
    Eval(EvalArgs),
    /// Dual certificate for the value, or the value of a given functional.
    Certify(CertifyArgs),
    /// Validates an engine config and checks unit vectors, sign invariance,
    /// homogeneity, the triangle inequality and certificates on random vectors.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    engine: EngineArgs,
    /// Vector as JSON: [[[1,3],1],[[2,4],-1/2]] or [{"index":[..],"value":..}].
    #[arg(long)]
    vec: String,
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    vec: String,
    /// A norming functional {"k":..,"normalizer":..,"atoms":[{"weight":..,"family":[[[..],±1],..]}]}.
    #[arg(long)]
    functional: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct SelfcheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    engine: EngineArgs,
    /// Random vectors are supported in {1..horizon}.
    #[arg(long, default_value_t = 12)]
    horizon: u32,
    #[arg(long, default_value_t = 25)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

pub fn run(cmd: &Cmd) -> anyhow::Result<Report> {
    Ok(match cmd {
        Cmd::Eval(a) => eval(a)?,
        Cmd::Certify(a) => certify(a)?,
        Cmd::Selfcheck(a) => selfcheck(a)?,
    })
}

fn tsirelson_config(cfg: &EngineConfig) -> Result<Option<TsirelsonConfig>> {
    Ok(match cfg {
        EngineConfig::Tsirelson { config: Some(c), .. } => Some(c.clone()),
        EngineConfig::Tsirelson { preset: Some(p), .. } => Some(TsirelsonConfig::preset(p)?),
        EngineConfig::Tsirelson { .. } => Some(TsirelsonConfig::desk()),
        _ => None,
    })
}

fn warning(cfg: &EngineConfig) -> Result<Option<String>> {
    Ok(tsirelson_config(cfg)?.and_then(|c| c.relaxed_warning()))
}

fn witness_text(w: &Value) -> String {
    let mut text = String::new();
    if let Some(parts) = w.get("partition").and_then(Value::as_array) {
        let shown: Vec<String> = parts.iter().map(family_text).collect();
        let _ = write!(text, "\npartition: {}", shown.join(" "));
    }
    if let Some(t) = w.get("plegma_tuple") {
        let _ = write!(text, "\nattained on plegma tuple {}", family_text(t));
    }
    if let Some(lb) = w.get("lower_bound").and_then(Value::as_f64) {
        let _ = write!(text, "\nnorming-set lower bound: {lb:.12}");
    }
    text
}

fn family_text(v: &Value) -> String {
    let sets: Vec<String> = v
        .as_array()
        .map(|a| a.iter().map(|s| serde_json::to_string(s).unwrap_or_default()).collect())
        .unwrap_or_default();
    format!("{{{}}}", sets.join(", "))
}

fn eval(a: &EvalArgs) -> Result<Report> {
    let cfg = a.engine.config()?;
    let eng = cfg.build()?;
    let x = input::vector(&a.vec)?;
    let value = eng.eval(&x)?;
    let (lo, hi) = eng.bounds(&x)?;
    let witness = eng.certify(&x)?;
    let mut text = format!("{value}");
    if !value.is_exact() || lo != hi {
        let _ = write!(text, "\nbounds: [{:.12}, {:.12}]", lo.to_f64(), hi.to_f64());
    }
    if let Some(w) = &witness {
        text.push_str(&witness_text(w));
    }
    let out = json!({
        "engine": eng.params(),
        "vector": x.to_json(),
        "value": value.to_json(),
        "lower": lo.to_json(),
        "upper": hi.to_json(),
        "witness": witness,
    });
    Ok(Report::new(out, text).warn(warning(&cfg)?))
}

fn certify(a: &CertifyArgs) -> Result<Report> {
    let cfg = a.engine.config()?;
    let eng = cfg.build()?;
    let x = input::vector(&a.vec)?;
    let value = eng.eval(&x)?;
    let Some(f) = &a.functional else {
        let cert = eng.certify(&x)?.ok_or_else(|| Error::InvalidInput(format!("engine {} has no certificates", eng.name())))?;
        let text = format!("{value}{}", witness_text(&cert));
        return Ok(Report::new(json!({"engine": eng.params(), "value": value.to_json(), "certificate": cert}), text)
            .warn(warning(&cfg)?));
    };
    let f = WFunctional::from_json(&input::json(f)?)?;
    let fv = w_functional_eval(&f, &x)?;
    let attains = fv.cmp_norm(&value) == Ordering::Equal;
    let text = format!(
        "f(x) = {}/sqrt({}) = {:.12}; norm {value}; {}",
        fmt_rational(&fv.numerator),
        fmt_rational(&fv.normalizer),
        fv.to_f64(),
        if attains { "f attains the norm" } else { "f does not attain the norm" }
    );
    Ok(Report::new(json!({"value": value.to_json(), "functional_value": fv.to_json(), "attains": attains}), text))
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn random_vec(rng: &mut ChaCha8Rng, arity: usize, horizon: u32, max_nnz: usize) -> Result<SparseVec> {
    let elems: Vec<u32> = (1..=horizon.max(arity as u32)).collect();
    let nnz = rng.random_range(1..=max_nnz);
    let mut entries = Vec::new();
    for _ in 0..nnz {
        let s = FinSubset::new(random_combination(rng, &elems, arity))?;
        let mut num = rng.random_range(-6..=6i64);
        if num == 0 {
            num = 1;
        }
        entries.push((s, rat(num, rng.random_range(1..=3))));
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries.dedup_by(|a, b| a.0 == b.0);
    SparseVec::from_entries(entries)
}

fn close(a: &NormValue, b: &NormValue) -> bool {
    match a.exact_cmp(b) {
        Some(o) => o == Ordering::Equal,
        None => (a.to_f64() - b.to_f64()).abs() <= err(a) + err(b) + 1e-9 * (1.0 + a.to_f64().abs()),
    }
}

fn err(v: &NormValue) -> f64 {
    match v {
        NormValue::Approx { error, .. } => *error,
        _ => 0.0,
    }
}

fn selfcheck(a: &SelfcheckArgs) -> Result<Report> {
    let cfg = a.engine.config()?;
    let mut checks = Vec::new();
    if let Some(tc) = tsirelson_config(&cfg)? {
        let v = tc.violations();
        let ok = tc.validate().is_ok();
        checks.push(Check {
            name: "config",
            pass: ok,
            detail: if v.is_empty() {
                format!("sum of 1/m_j = {:.6}", tc.reciprocal_sum())
            } else {
                format!("{}{}", v.join("; "), if ok { " (relaxed)" } else { "" })
            },
        });
        if !ok {
            return Err(Error::InvalidConfig(format!("validation failed: {}", v.join("; "))));
        }
    }
    let eng = cfg.build()?;
    let arity = input::engine_arity(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);

    let elems: Vec<u32> = (1..=a.horizon.max(arity as u32)).collect();
    let mut bad_unit = None;
    for _ in 0..a.samples {
        let s = FinSubset::new(random_combination(&mut rng, &elems, arity))?;
        let v = eng.eval(&SparseVec::unit(s.clone()))?;
        if !close(&v, &NormValue::Exact(rat(1, 1))) {
            bad_unit = Some(format!("||e_{s}|| = {v}"));
            break;
        }
    }
    checks.push(Check { name: "unit vectors", pass: bad_unit.is_none(), detail: bad_unit.unwrap_or_else(|| format!("{} sampled, all 1", a.samples)) });

    let max_nnz = 5;
    let (mut sign, mut homog, mut tri) = (None, None, None);
    for _ in 0..a.samples {
        let x = random_vec(&mut rng, arity, a.horizon, max_nnz)?;
        let y = random_vec(&mut rng, arity, a.horizon, max_nnz)?;
        let flips: Vec<bool> = x.iter().map(|_| rng.random_bool(0.5)).collect();
        let support = x.support();
        let fx = x.sign_flip(|s| flips[support.binary_search(s).unwrap_or(0)]);
        let (nx, ny, nf) = (eng.eval(&x)?, eng.eval(&y)?, eng.eval(&fx)?);
        if eng.is_unconditional() && sign.is_none() && !close(&nx, &nf) {
            sign = Some(format!("{nx} vs {nf} after flipping signs"));
        }
        let two = rat(-2, 1);
        if homog.is_none() && !close(&eng.eval(&x.scale(&two))?, &nx.scale(&two)) {
            homog = Some("||-2x|| != 2||x||".to_string());
        }
        let nxy = eng.eval(&x.add(&y))?;
        if tri.is_none() && nxy.to_f64() - err(&nxy) > nx.to_f64() + ny.to_f64() + err(&nx) + err(&ny) + 1e-9 {
            tri = Some(format!("||x+y|| = {nxy} > {nx} + {ny}"));
        }
    }
    if eng.is_unconditional() {
        checks.push(Check { name: "sign invariance", pass: sign.is_none(), detail: sign.unwrap_or_else(|| "exact on all samples".into()) });
    }
    checks.push(Check { name: "homogeneity", pass: homog.is_none(), detail: homog.unwrap_or_else(|| "exact on all samples".into()) });
    checks.push(Check { name: "triangle inequality", pass: tri.is_none(), detail: tri.unwrap_or_else(|| "holds on all samples".into()) });

    if let EngineConfig::SchreierPlegmatic { k, mode, bound } = &cfg {
        let sp = SchreierPlegmatic::new(*k, *mode).with_bound(*bound);
        let mut bad = None;
        for _ in 0..a.samples {
            let x = random_vec(&mut rng, arity, a.horizon, max_nnz)?;
            let ev = sp.evaluate(&x)?;
            let fv = w_functional_eval(&ev.certificate, &x)?;
            if fv.cmp_norm(&ev.lower) != Ordering::Equal {
                bad = Some(format!("certificate gives {:.12}, lower value {}", fv.to_f64(), ev.lower));
                break;
            }
        }
        checks.push(Check { name: "certificates", pass: bad.is_none(), detail: bad.unwrap_or_else(|| "every certificate attains its value".into()) });
    }

    let pass = checks.iter().all(|c| c.pass);
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(text, "[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let rows: Vec<Value> = checks.iter().map(|c| json!({"check": c.name, "pass": c.pass, "detail": c.detail})).collect();
    Ok(Report::new(json!({"engine": eng.params(), "pass": pass, "checks": rows}), text)
        .warn(warning(&cfg)?)
        .status(if pass { 0 } else { 1 }))
}
