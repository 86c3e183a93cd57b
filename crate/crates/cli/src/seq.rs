use std::fmt::Write as _;

use clap::{Args, Subcommand};
use plegma_lab::combin::combinations;
use plegma_lab::zoo::{
    canonical_tree_extract, compose_seq, l1_renorm, l1_renorm_inner, node_map_from_json, sample_tree,
    trocan_interval_check, verify_ctd, CanonicalTreeDecomposition, EpsSchedule, KSeqGen, RenormParams, TreeMap,
};
use plegma_lab::{Error, FinSubset, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{self, EngineArgs};
use crate::output::Report;

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Cmd {
    /// Vectors x_s of a named k-sequence.
    Gen(GenArgs),
    /// The composed (k+d)-sequence z of a k-sequence x and a d-sequence y.
    Compose(ComposeArgs),
    /// The almost isometric l1 renorming y_s = Σ b_i x_{t_i^s} / (c + 2ε').
    Renorm(RenormArgs),
    /// Canonical tree decomposition extracted from a finite tree map.
    CtdExtract(CtdExtractArgs),
    /// Re-checks a canonical tree decomposition against its leaf vectors.
    CtdVerify(CtdVerifyArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    /// xk_basis, xk_diagonal, example_basis, summing, c0_trunc_unit, c0_trunc_summing,
    /// c0_basis, l1_basis, l2_basis, or a JSON spec {"name":..,..}.
    #[arg(long)]
    gen: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// A single index set; otherwise every k-subset of the first n elements of the universe.
    #[arg(long)]
    s: Option<String>,
    #[arg(long, default_value = "N")]
    universe: String,
    #[arg(long, default_value_t = 5)]
    n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ComposeArgs {
    /// The k-sequence x (name or JSON spec).
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 1)]
    kx: usize,
    /// The d-sequence y of vectors over N (name or JSON spec).
    #[arg(long)]
    y: String,
    #[arg(long, default_value_t = 1)]
    ky: usize,
    /// A single index set of size k+d; otherwise every such subset of the first n elements.
    #[arg(long)]
    v: Option<String>,
    #[arg(long, default_value = "N")]
    universe: String,
    #[arg(long, default_value_t = 5)]
    n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct RenormArgs {
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Coefficients b with Σ|b_i| = 1, e.g. 1/2,1/2.
    #[arg(long)]
    b: String,
    #[arg(long)]
    c: String,
    #[arg(long)]
    eps_prime: String,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value = "N")]
    universe: String,
    /// The index set s.
    #[arg(long)]
    s: String,
}

#[derive(Args, Debug, Serialize)]
pub struct CtdExtractArgs {
    /// Tree map {"k":..,"universe":[..],"nodes":[{"node":[..],"vector":[..]},..]} as JSON or @file.
    #[arg(long, conflicts_with = "sample_seed", required_unless_present = "sample_seed")]
    tree: Option<String>,
    /// Use a pseudo-random sample tree instead.
    #[arg(long)]
    sample_seed: Option<u64>,
    /// Depth of the sample tree.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// The sample tree lives on {1..n}.
    #[arg(long, default_value_t = 7)]
    n: u32,
    /// Sample tree element whose leaves break the interval structure.
    #[arg(long)]
    bad: Option<u32>,
    /// Norm used for the approximations (name or JSON config).
    #[arg(long, default_value = "l1")]
    engine: String,
    /// pow2 for ε_n = 2^-n, or a decreasing list such as 1/2,1/4,1/8.
    #[arg(long, default_value = "pow2")]
    eps: String,
    /// Stop once the universe has this many elements.
    #[arg(long)]
    target: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct CtdVerifyArgs {
    /// JSON with "decomposition" and leaf vectors "x_tilde" (the output of ctd-extract) or "x".
    #[arg(long)]
    input: String,
}

pub fn run(cmd: &Cmd) -> anyhow::Result<Report> {
    Ok(match cmd {
        Cmd::Gen(a) => gen(a)?,
        Cmd::Compose(a) => compose(a)?,
        Cmd::Renorm(a) => renorm(a)?,
        Cmd::CtdExtract(a) => ctd_extract(a)?,
        Cmd::CtdVerify(a) => ctd_verify(a)?,
    })
}

fn index_sets(single: Option<&str>, universe: &str, n: usize, k: usize) -> Result<Vec<FinSubset>> {
    match single {
        Some(s) => Ok(vec![input::set(s)?]),
        None => {
            let elems = input::universe(universe)?.first_n(n)?;
            combinations(&elems, k).map(FinSubset::new).collect()
        }
    }
}

fn listing(g: &KSeqGen, sets: &[FinSubset]) -> Result<Report> {
    let mut csv = csv::Writer::from_writer(Vec::new());
    let mut text = String::new();
    let mut rows = Vec::new();
    let ioe = |e: csv::Error| Error::InvalidInput(e.to_string());
    csv.write_record(["index", "vector", "norm"]).map_err(ioe)?;
    for s in sets {
        let v = g.vec(s)?;
        let norm = g.norm(&v)?;
        let vj = v.to_json();
        csv.write_record([serde_json::to_string(s).unwrap(), vj.to_string(), norm.to_f64().to_string()]).map_err(ioe)?;
        let _ = writeln!(text, "{s}: {}  norm {norm}", compact(&vj));
        rows.push(json!({"index": s, "vector": vj, "norm": norm.to_json()}));
    }
    let bytes = csv.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(Report::new(json!({"generator": g.describe(), "rows": rows}), text).csv(String::from_utf8(bytes).unwrap_or_default()))
}

/// `{[1,3]: 1, [2,4]: -1/2}`
fn compact(v: &Value) -> String {
    let parts: Vec<String> = v
        .as_array()
        .map(|a| {
            a.iter()
                .map(|e| format!("{}: {}", e["index"], e["value"].as_str().unwrap_or_default()))
                .collect()
        })
        .unwrap_or_default();
    format!("{{{}}}", parts.join(", "))
}

fn gen(a: &GenArgs) -> Result<Report> {
    let g = input::generator(&a.gen, a.k)?;
    listing(&g, &index_sets(a.s.as_deref(), &a.universe, a.n, g.k)?)
}

fn compose(a: &ComposeArgs) -> Result<Report> {
    let x = input::generator(&a.x, a.kx)?;
    let y = input::generator(&a.y, a.ky)?;
    if y.k == 0 {
        return Err(Error::InvalidInput("y must be indexed by nonempty sets".into()));
    }
    let z = compose_seq(&x, &y);
    listing(&z, &index_sets(a.v.as_deref(), &a.universe, a.n, z.k)?)
}

fn renorm(a: &RenormArgs) -> Result<Report> {
    let x = input::generator(&a.x, a.k)?;
    let prm = RenormParams {
        b: input::rationals(&a.b)?,
        c: input::rational(&a.c)?,
        eps_prime: input::rational(&a.eps_prime)?,
        eps: input::rational(&a.eps)?,
        universe: input::universe(&a.universe)?,
    };
    let s = input::set(&a.s)?;
    let inner = l1_renorm_inner(prm.b.len(), &prm.universe, &s)?;
    let y = l1_renorm(&x, &prm)?;
    let mut rep = listing(&y, std::slice::from_ref(&s))?;
    let shown: Vec<String> = inner.iter().map(|t| t.to_string()).collect();
    rep.text.push_str(&format!("built from x at {}", shown.join(", ")));
    rep.json["inner"] = json!(inner);
    Ok(rep)
}

fn eps_schedule(text: &str) -> Result<EpsSchedule> {
    let e = if text == "pow2" { EpsSchedule::Pow2 } else { EpsSchedule::List(input::rationals(text)?) };
    e.validate()?;
    Ok(e)
}

fn ctd_extract(a: &CtdExtractArgs) -> Result<Report> {
    let phi = match (&a.tree, a.sample_seed) {
        (Some(t), _) => TreeMap::from_json(&input::json(t)?)?,
        (None, Some(seed)) => sample_tree(seed, a.k, (1..=a.n).collect(), a.bad)?,
        (None, None) => return Err(Error::InvalidInput("give --tree or --sample-seed".into())),
    };
    let eng = EngineArgs::named(&a.engine).config()?.build()?;
    let eps = eps_schedule(&a.eps)?;
    let ex = canonical_tree_extract(&phi, eng.as_ref(), &eps, a.target)?;
    let rep = verify_ctd(&ex.decomposition, &ex.x_tilde)?;
    let (identities, interval_violation) = trocan_interval_check(&ex.decomposition, &ex.x_tilde)?;
    let held = ex.bounds.iter().filter(|b| b.ok).count();
    let mut text = format!(
        "universe {:?} -> {:?} -> {:?}\n{} of {} leaf bounds hold; complete: {}\nverify: {}",
        phi.universe,
        ex.after_branch_thinning,
        ex.after_pair_thinning,
        held,
        ex.bounds.len(),
        ex.complete,
        if rep.ok { format!("ok ({} leaves, {} plegma pairs)", rep.leaves, rep.pairs) } else { rep.violation.clone().unwrap_or_default() }
    );
    match &interval_violation {
        None => {
            let _ = write!(text, "\ninterval restrictions: {identities} identities exact");
        }
        Some(v) => {
            let _ = write!(text, "\ninterval restrictions fail: {v}");
        }
    }
    let mut out = ex.to_json();
    out["tree"] = phi.to_json();
    out["verify"] = rep.to_json();
    out["interval_check"] = json!({"checked": identities, "violation": interval_violation});
    Ok(Report::new(out, text))
}

fn ctd_verify(a: &CtdVerifyArgs) -> Result<Report> {
    let v = input::json(&a.input)?;
    let d = CanonicalTreeDecomposition::from_json(v.get("decomposition").ok_or_else(|| Error::InvalidInput("input has no \"decomposition\"".into()))?)?;
    let x = node_map_from_json(
        v.get("x_tilde").or_else(|| v.get("x")).ok_or_else(|| Error::InvalidInput("input has no \"x_tilde\" or \"x\"".into()))?,
    )?;
    let rep = verify_ctd(&d, &x)?;
    let (identities, interval_violation) = trocan_interval_check(&d, &x)?;
    let pass = rep.ok && interval_violation.is_none();
    let text = format!(
        "{}; interval restrictions: {}",
        if rep.ok { format!("canonical tree decomposition ok ({} leaves, {} plegma pairs)", rep.leaves, rep.pairs) } else { format!("not canonical: {}", rep.violation.clone().unwrap_or_default()) },
        interval_violation.clone().unwrap_or_else(|| format!("{identities} identities exact"))
    );
    Ok(Report::new(json!({"verify": rep.to_json(), "interval_check": {"checked": identities, "violation": interval_violation}, "pass": pass}), text)
        .status(if pass { 0 } else { 1 }))
}
