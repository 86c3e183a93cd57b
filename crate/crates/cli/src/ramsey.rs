use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Subcommand, ValueEnum};
use plegma_lab::num::fmt_rational;
use plegma_lab::plegma::{flat_from_plegma, PlegmaTuple};
use plegma_lab::ramsey::{
    density_threshold_scan, dichotomy_search, find_plegma_in_subset, largest_plegma_free, monochromatize,
    verify_dichotomy, verify_monochromatic, Coloring, Dichotomy, Labeling, ThresholdRule, FREE_EXACT_LIMIT,
};
use plegma_lab::{Error, FinSubset, Result};
use serde::Serialize;
use serde_json::json;

use crate::input;
use crate::output::Report;

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Cmd {
    /// Largest-first search for L with a coloring of plegma l-tuples constant on [L]^k.
    Mono(MonoArgs),
    /// Constant-or-injective dichotomy for a labelling of [M]^k.
    Dichotomy(DichotomyArgs),
    /// Finds a plegma l-tuple inside a given family of k-sets.
    Find(FindArgs),
    /// Largest family in [{1..n}]^k without a plegma l-tuple.
    Free(FreeArgs),
    /// Least n at which density delta forces a plegma l-tuple in [{1..n}]^k.
    Density(DensityArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct MonoArgs {
    /// const, sum-mod:p, first-mod:p, gap-mod:p, or a JSON table [[flat,color],..].
    #[arg(long)]
    coloring: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Finite universe M.
    #[arg(long, default_value = "1..10")]
    universe: String,
    /// Size of L.
    #[arg(long)]
    target: usize,
    /// Restrict to one color.
    #[arg(long)]
    color: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct DichotomyArgs {
    /// const, injective, coord:i, sum, min, max, sum-mod:p, or a JSON table [[set,label],..].
    #[arg(long)]
    labeling: String,
    #[arg(long)]
    k: usize,
    /// Finite universe M.
    #[arg(long, default_value = "1..10")]
    universe: String,
}

#[derive(Args, Debug, Serialize)]
pub struct FindArgs {
    /// The family A as JSON, e.g. [[1,3],[2,4],[5,6]].
    #[arg(long)]
    sets: String,
    #[arg(long)]
    l: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct FreeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Above this many k-sets only the greedy lower bound runs.
    #[arg(long, default_value_t = FREE_EXACT_LIMIT)]
    exact_limit: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// delta*C(n,k) reaches largest_free + 1.
    Forcing,
    /// largest_free < delta*C(n,k).
    Strict,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Density in (0,1], e.g. 1/2 or 0.8.
    #[arg(long)]
    delta: String,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, value_enum, default_value_t = Rule::Forcing)]
    rule: Rule,
}

pub fn run(cmd: &Cmd) -> anyhow::Result<Report> {
    Ok(match cmd {
        Cmd::Mono(a) => mono(a)?,
        Cmd::Dichotomy(a) => dichotomy(a)?,
        Cmd::Find(a) => find(a)?,
        Cmd::Free(a) => free(a)?,
        Cmd::Density(a) => density(a)?,
    })
}

fn rule_arg(rule: &str) -> Result<(&str, Option<u64>)> {
    match rule.split_once(':') {
        None => Ok((rule, None)),
        Some((name, p)) => {
            let p: u64 = p.parse().map_err(|_| Error::InvalidInput(format!("{name}:p needs a positive integer, got {p:?}")))?;
            if p == 0 {
                return Err(Error::InvalidInput(format!("{name}:p needs a positive integer")));
            }
            Ok((name, Some(p)))
        }
    }
}

fn need(p: Option<u64>, name: &str) -> Result<u64> {
    p.ok_or_else(|| Error::InvalidInput(format!("rule {name} needs a parameter, e.g. {name}:2")))
}

fn coloring(rule: &str, a: &MonoArgs) -> Result<Coloring> {
    let u = input::universe(&a.universe)?;
    if rule.starts_with(['[', '@']) {
        let pairs: Vec<(Vec<u32>, u32)> = serde_json::from_value(input::json(rule)?)
            .map_err(|e| Error::InvalidInput(format!("coloring table must be [[flat,color],..]: {e}")))?;
        let table: BTreeMap<Vec<u32>, u32> = pairs.into_iter().collect();
        let missing = RefCell::new(None);
        let c = Coloring::from_fn(&u, a.k, a.l, |t| {
            let flat = flat_from_plegma(t).elems().to_vec();
            table.get(&flat).copied().unwrap_or_else(|| {
                missing.borrow_mut().get_or_insert(flat);
                0
            })
        })?;
        if let Some(f) = missing.into_inner() {
            return Err(Error::InvalidInput(format!("coloring table has no color for flat {f:?}")));
        }
        return Ok(c);
    }
    let (name, p) = rule_arg(rule)?;
    let f: Box<dyn Fn(&PlegmaTuple) -> u32> = match name {
        "const" => Box::new(|_| 0),
        "sum-mod" => {
            let p = need(p, name)?;
            Box::new(move |t| (flat_from_plegma(t).elems().iter().map(|&x| x as u64).sum::<u64>() % p) as u32)
        }
        "first-mod" => {
            let p = need(p, name)?;
            Box::new(move |t| (t.member(1).at(1) as u64 % p) as u32)
        }
        "gap-mod" => {
            let p = need(p, name)?;
            Box::new(move |t| ((t.member(t.l()).at(1) - t.member(1).at(1)) as u64 % p) as u32)
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown coloring {other:?} (const, sum-mod:p, first-mod:p, gap-mod:p or a JSON table)"
            )))
        }
    };
    Coloring::from_fn(&u, a.k, a.l, f)
}

fn mono(a: &MonoArgs) -> Result<Report> {
    let c = coloring(&a.coloring, a)?;
    let found = monochromatize(&c, a.target, a.color)?;
    let verified = match &found {
        Some(m) => verify_monochromatic(&c, m)?,
        None => false,
    };
    let text = match &found {
        Some(m) => format!(
            "L = {} has color {} on every plegma {}-tuple of [L]^{} (verified: {verified})",
            FinSubset::new(m.universe.clone())?,
            m.color,
            a.l,
            a.k
        ),
        None => format!("no {}-subset of M is monochromatic", a.target),
    };
    Ok(Report::new(json!({"palette": c.palette(), "result": found, "verified": verified}), text))
}

fn labeling(rule: &str, a: &DichotomyArgs) -> Result<Labeling> {
    let u = input::universe(&a.universe)?;
    if rule.starts_with(['[', '@']) {
        let pairs: Vec<(FinSubset, u64)> = serde_json::from_value(input::json(rule)?)
            .map_err(|e| Error::InvalidInput(format!("labelling table must be [[set,label],..]: {e}")))?;
        let table: BTreeMap<FinSubset, u64> = pairs.into_iter().collect();
        let missing = RefCell::new(None);
        let lab = Labeling::from_fn(&u, a.k, |s| {
            table.get(s).copied().unwrap_or_else(|| {
                missing.borrow_mut().get_or_insert(s.clone());
                0
            })
        })?;
        if let Some(s) = missing.into_inner() {
            return Err(Error::InvalidInput(format!("labelling table has no label for {s}")));
        }
        return Ok(lab);
    }
    let (name, p) = rule_arg(rule)?;
    let k = a.k;
    let f: Box<dyn Fn(&FinSubset) -> u64> = match name {
        "const" => Box::new(|_| 0),
        "injective" => Box::new(|s| s.elems().iter().fold(0u64, |h, &x| h.wrapping_mul(1 << 20).wrapping_add(x as u64))),
        "coord" => {
            let i = need(p, name)? as usize;
            if i > k {
                return Err(Error::InvalidInput(format!("coord:{i} exceeds k = {k}")));
            }
            Box::new(move |s| s.at(i) as u64)
        }
        "sum" => Box::new(|s| s.elems().iter().map(|&x| x as u64).sum()),
        "min" => Box::new(|s| s.min().unwrap_or(0) as u64),
        "max" => Box::new(|s| s.max().unwrap_or(0) as u64),
        "sum-mod" => {
            let p = need(p, name)?;
            Box::new(move |s| s.elems().iter().map(|&x| x as u64).sum::<u64>() % p)
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown labelling {other:?} (const, injective, coord:i, sum, min, max, sum-mod:p or a JSON table)"
            )))
        }
    };
    Labeling::from_fn(&u, a.k, f)
}

fn dichotomy(a: &DichotomyArgs) -> Result<Report> {
    let lab = labeling(&a.labeling, a)?;
    let d = dichotomy_search(&lab)?;
    let verified = verify_dichotomy(&lab, &d)?;
    let text = match &d {
        Dichotomy::Constant { universe, label } => {
            format!("constant {label} on [{}]^{} (verified: {verified})", FinSubset::new(universe.clone())?, a.k)
        }
        Dichotomy::Injective { universe } => format!(
            "plegma pairs of [{}]^{} get distinct labels (verified: {verified})",
            FinSubset::new(universe.clone())?,
            a.k
        ),
        Dichotomy::NotFound => "neither alternative holds on a set carrying a plegma pair".into(),
    };
    Ok(Report::new(json!({"dichotomy": d, "verified": verified}), text))
}

fn find(a: &FindArgs) -> Result<Report> {
    let sets = input::family(&a.sets)?;
    let t = find_plegma_in_subset(&sets, a.l)?;
    let text = match &t {
        Some(t) => format!("plegma {}-tuple {t}", a.l),
        None => format!("no plegma {}-tuple among {} sets", a.l, sets.len()),
    };
    Ok(Report::new(json!({"l": a.l, "tuple": t}), text))
}

fn free(a: &FreeArgs) -> Result<Report> {
    let r = largest_plegma_free(a.n, a.k, a.l, a.exact_limit)?;
    let mut text = format!(
        "{} {} sets in [{{1..{}}}]^{} contain no plegma {}-tuple",
        if r.exact { "largest family:" } else { "greedy family (lower bound):" },
        r.size,
        a.n,
        a.k,
        a.l
    );
    let shown: Vec<String> = r.witness.iter().map(|s| s.to_string()).collect();
    let _ = write!(text, "\nwitness: {}", shown.join(" "));
    if !r.exact {
        text.push_str("\n(greedy lower bound; raise --exact-limit for the exact value)");
    }
    Ok(Report::new(serde_json::to_value(&r).map_err(|e| Error::InvalidInput(e.to_string()))?, text))
}

fn density(a: &DensityArgs) -> Result<Report> {
    let delta = input::rational(&a.delta)?;
    let rule = match a.rule {
        Rule::Forcing => ThresholdRule::Forcing,
        Rule::Strict => ThresholdRule::Strict,
    };
    let r = density_threshold_scan(a.k, a.l, &delta, a.n_max, rule)?;
    let show = |n: Option<usize>| n.map_or_else(|| format!("not reached by n = {}", a.n_max), |n| n.to_string());
    let mut text = format!(
        "k = {}, l = {}, delta = {}: forcing threshold n = {}, strict threshold n = {}\n",
        a.k,
        a.l,
        fmt_rational(&delta),
        show(r.threshold_n),
        show(r.strict_threshold_n)
    );
    text.push_str(&r.to_csv());
    if r.rows.iter().any(|row| !row.exact) {
        text.push_str("some rows are greedy lower bounds only\n");
    }
    Ok(Report::new(r.to_json(), text).csv(r.to_csv()))
}
