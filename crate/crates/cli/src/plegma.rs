use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Subcommand};
use plegma_lab::plegma::{
    alternative_formula, count_plegma, enumerate_plegma, find_nonpreserving_witness, flat_from_plegma, is_plegma,
    is_plegma_preserving, is_skipped, plegma_distance, plegma_from_flat, plegma_path_between, Distance, Preservation,
    SetMap,
};
use plegma_lab::{Error, FinSubset, Result, Universe};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input;
use crate::output::Report;

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Cmd {
    /// Decides whether a family is plegma, or splits a flat set into its plegma tuple.
    Check(CheckArgs),
    /// Lists every plegma l-tuple of k-subsets of a finite universe.
    Enumerate(EnumerateArgs),
    /// The plegma path of length k between two skipped sets s < t.
    Path(PathArgs),
    /// Shortest plegma path length from s to t inside a finite universe.
    Distance(DistanceArgs),
    /// Tests a map [M]^k1 -> [N]^k2 for plegma preservation.
    Preserve(PreserveArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    /// Family as JSON, e.g. [[1,3],[2,4]].
    #[arg(long, conflicts_with = "flat", required_unless_present = "flat")]
    family: Option<String>,
    /// Flat set of size k*l, e.g. [1,2,3,4].
    #[arg(long, requires_all = ["k", "l"])]
    flat: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// Also apply the alternative index rule s_j(i) = F((i-1)k+j) and report whether it agrees.
    #[arg(long)]
    paper_formula: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    /// Universe {1..n}.
    #[arg(long, conflicts_with = "universe", required_unless_present = "universe")]
    n: Option<u32>,
    /// Finite universe: 1..n, [a,b,..] or {"kind":..}.
    #[arg(long)]
    universe: Option<String>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Print at most this many tuples (the count is always complete).
    #[arg(long)]
    limit: Option<usize>,
    /// Compare every flat with the alternative index rule s_j(i) = F((i-1)k+j).
    #[arg(long)]
    paper_formula: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PathArgs {
    #[arg(long)]
    s: String,
    #[arg(long)]
    t: String,
    /// Universe M: N, evens, 1..n, a+bi or [..].
    #[arg(long, default_value = "N")]
    universe: String,
}

#[derive(Args, Debug, Serialize)]
pub struct DistanceArgs {
    #[arg(long)]
    s: String,
    #[arg(long)]
    t: String,
    /// Finite universe; default {1..max(s ∪ t)}.
    #[arg(long)]
    universe: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct PreserveArgs {
    /// prefix:j, select:i,j,.., successor, shift:c, const:[..], or a JSON table [[from,to],..].
    #[arg(long)]
    map: String,
    /// Arity k1 of the domain sets.
    #[arg(long)]
    k: usize,
    /// Finite domain universe.
    #[arg(long, default_value = "1..8")]
    universe: String,
    /// Checks plegma l-tuples for 2 <= l <= max-l.
    #[arg(long, default_value_t = 2)]
    max_l: usize,
    /// For k1 < k2: search a subset of this size on which no plegma pair maps to a plegma pair.
    #[arg(long)]
    witness: Option<usize>,
}

pub fn run(cmd: &Cmd) -> anyhow::Result<Report> {
    Ok(match cmd {
        Cmd::Check(a) => check(a)?,
        Cmd::Enumerate(a) => enumerate(a)?,
        Cmd::Path(a) => path(a)?,
        Cmd::Distance(a) => distance(a)?,
        Cmd::Preserve(a) => preserve(a)?,
    })
}

fn show(f: &[FinSubset]) -> String {
    let parts: Vec<String> = f.iter().map(|s| s.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// First failing plegma condition, 1-based.
fn first_violation(f: &[FinSubset]) -> Option<String> {
    let k = f[0].len();
    for (j, w) in f.windows(2).enumerate() {
        if let Some(i) = (0..k).find(|&i| w[0].elems()[i] >= w[1].elems()[i]) {
            return Some(format!("s_{}({}) = {} is not below s_{}({}) = {}", j + 1, i + 1, w[0].elems()[i], j + 2, i + 1, w[1].elems()[i]));
        }
    }
    let l = f.len();
    (0..k.saturating_sub(1)).find(|&i| f[l - 1].elems()[i] >= f[0].elems()[i + 1]).map(|i| {
        format!("s_{l}({}) = {} is not below s_1({}) = {}", i + 1, f[l - 1].elems()[i], i + 2, f[0].elems()[i + 1])
    })
}

fn check(a: &CheckArgs) -> Result<Report> {
    if let Some(fam) = &a.family {
        let f = input::family(fam)?;
        if f.is_empty() {
            return Err(Error::InvalidInput("family must be nonempty".into()));
        }
        let ok = is_plegma(&f)?;
        let why = if ok { None } else { first_violation(&f) };
        let text = match &why {
            None => format!("{} is plegma (k = {}, l = {})", show(&f), f[0].len(), f.len()),
            Some(w) => format!("{} is not plegma: {w}", show(&f)),
        };
        return Ok(Report::new(json!({"family": f, "plegma": ok, "k": f[0].len(), "l": f.len(), "violation": why}), text));
    }
    let flat = input::set(a.flat.as_deref().unwrap_or_default())?;
    let (k, l) = (a.k.unwrap_or_default(), a.l.unwrap_or_default());
    let t = plegma_from_flat(&flat, k, l)?;
    let mut out = json!({"flat": flat, "k": k, "l": l, "tuple": t});
    let mut text = format!("{flat} -> {t}");
    if a.paper_formula {
        let rep = alternative_formula(&flat, k, l)?;
        let _ = write!(text, "\nalternative rule positions {:?}: {}", rep.positions, agreement_text(rep.injective, rep.agrees));
        out["alternative_formula"] = serde_json::to_value(&rep).unwrap_or(Value::Null);
    }
    Ok(Report::new(out, text))
}

fn agreement_text(injective: bool, agrees: bool) -> &'static str {
    match (injective, agrees) {
        (_, true) => "agrees",
        (true, false) => "a valid split of the flat but a different tuple",
        (false, _) => "does not read every flat position exactly once",
    }
}

fn finite_universe(n: Option<u32>, u: Option<&str>) -> Result<Universe> {
    match (n, u) {
        (Some(n), _) => Ok(Universe::horizon(n)),
        (None, Some(u)) => input::universe(u),
        (None, None) => Err(Error::InvalidInput("give --n or --universe".into())),
    }
}

fn enumerate(a: &EnumerateArgs) -> Result<Report> {
    let u = finite_universe(a.n, a.universe.as_deref())?;
    let size = u.elements()?.len();
    let mut rows = Vec::new();
    let mut count = 0u128;
    let mut agree = 0u128;
    let mut csv = csv::Writer::from_writer(Vec::new());
    let alt = a.paper_formula && a.k * a.l > 0;
    let mut header = vec!["index", "flat", "tuple"];
    if alt {
        header.push("alternative_agrees");
    }
    csv.write_record(&header).map_err(io)?;
    for t in enumerate_plegma(&u, a.k, a.l)? {
        count += 1;
        let flat = flat_from_plegma(&t);
        let agrees = if alt { Some(alternative_formula(&flat, a.k, a.l)?.agrees) } else { None };
        agree += u128::from(agrees == Some(true));
        if a.limit.is_none_or(|m| rows.len() < m) {
            let mut rec = vec![count.to_string(), serde_json::to_string(&flat).unwrap(), t.to_string()];
            rec.extend(agrees.map(|x| x.to_string()));
            csv.write_record(&rec).map_err(io)?;
            rows.push(json!({"index": count, "flat": flat, "tuple": t, "alternative_agrees": agrees}));
        }
    }
    let expected = count_plegma(size, a.k, a.l);
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(text, "{}", serde_json::to_string(&r["tuple"]).unwrap());
    }
    let _ = write!(text, "{count} plegma {}-tuples in [{u}]^{} (C({size},{}) = {expected})", a.l, a.k, a.k * a.l);
    let mut out = json!({
        "universe": u, "k": a.k, "l": a.l, "count": count.to_string(),
        "binomial": expected.to_string(), "rows": rows,
    });
    if alt {
        let rep = alternative_formula(&FinSubset::new((1..=(a.k * a.l) as u32).collect())?, a.k, a.l)?;
        out["alternative_formula"] = json!({"positions": rep.positions, "injective": rep.injective, "agreeing_tuples": agree.to_string()});
        let _ = write!(
            text,
            "\nalternative rule s_j(i) = F((i-1)k+j): {agree} of {count} tuples agree{}",
            if a.k == a.l { "" } else { " (the rules differ whenever k != l)" }
        );
    }
    let bytes = csv.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(Report::new(out, text).csv(String::from_utf8(bytes).unwrap_or_default()))
}

fn io(e: csv::Error) -> Error {
    Error::InvalidInput(e.to_string())
}

fn path(a: &PathArgs) -> Result<Report> {
    let (s, t, m) = (input::set(&a.s)?, input::set(&a.t)?, input::universe(&a.universe)?);
    let p = plegma_path_between(&s, &t, &m)?;
    let text = format!("{} (length {})", show(&p), p.len() - 1);
    Ok(Report::new(
        json!({"s": s, "t": t, "universe": m, "skipped": [is_skipped(&s, &m)?, is_skipped(&t, &m)?], "path": p, "length": p.len() - 1}),
        text,
    ))
}

fn distance(a: &DistanceArgs) -> Result<Report> {
    let (s, t) = (input::set(&a.s)?, input::set(&a.t)?);
    let u = match &a.universe {
        Some(u) => input::universe(u)?,
        None => Universe::horizon(FinSubset::max(&s).max(FinSubset::max(&t)).unwrap_or(1)),
    };
    let d = plegma_distance(&s, &t, &u)?;
    let text = match d {
        Distance::Reachable(n) => format!("d({s}, {t}) = {n} in [{u}]^{}", s.len()),
        Distance::Unreachable => format!("{t} is not reachable from {s} in [{u}]^{}", s.len()),
    };
    Ok(Report::new(json!({"s": s, "t": t, "universe": u, "distance": d}), text))
}

/// A named rule or a JSON table, tabulated on `[elems]^k`.
fn build_map(rule: &str, elems: &[u32], k: usize) -> Result<SetMap> {
    let bad = |m: String| Error::InvalidInput(m);
    if rule.starts_with(['[', '@']) {
        let v = input::json(rule)?;
        let pairs: Vec<(FinSubset, FinSubset)> =
            serde_json::from_value(v).map_err(|e| bad(format!("map table must be [[from,to],..]: {e}")))?;
        let k2 = pairs.first().map_or(1, |p| p.1.len());
        return SetMap::from_table(k, k2, pairs.into_iter().collect::<BTreeMap<_, _>>());
    }
    let (name, arg) = rule.split_once(':').unwrap_or((rule, ""));
    match name {
        "prefix" => {
            let j: usize = arg.parse().map_err(|_| bad(format!("prefix:j needs an integer, got {arg:?}")))?;
            if j == 0 || j > k {
                return Err(bad(format!("prefix length {j} out of range 1..={k}")));
            }
            SetMap::from_fn(elems, k, j, |s| s.prefix(j))
        }
        "select" => {
            let pos = input::list::<usize>(arg)?;
            if pos.is_empty() || pos.iter().any(|&p| p == 0 || p > k) || pos.windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad(format!("select positions must increase within 1..={k}")));
            }
            SetMap::from_fn(elems, k, pos.len(), |s| s.select(&pos).expect("positions checked"))
        }
        "successor" => SetMap::from_fn(elems, k, k + 1, |s| s.union(&FinSubset::singleton(s.max().unwrap() + 1))),
        "shift" => {
            let c: u32 = arg.parse().map_err(|_| bad(format!("shift:c needs an integer, got {arg:?}")))?;
            SetMap::from_fn(elems, k, k, |s| s.shift(c))
        }
        "const" => {
            let v = input::set(arg)?;
            if v.is_empty() {
                return Err(bad("const needs a nonempty set".into()));
            }
            SetMap::from_fn(elems, k, v.len(), |_| v.clone())
        }
        other => Err(bad(format!("unknown map rule {other:?} (prefix:j, select:.., successor, shift:c, const:[..] or a JSON table)"))),
    }
}

fn preserve(a: &PreserveArgs) -> Result<Report> {
    let u = input::universe(&a.universe)?;
    let elems = u.elements()?;
    let map = build_map(&a.map, &elems, a.k)?;
    let res = is_plegma_preserving(&map, &u, a.max_l)?;
    let mut out = json!({"map": a.map, "k1": map.k1, "k2": map.k2, "universe": u, "max_l": a.max_l.max(2)});
    let mut text = match &res {
        Preservation::Preserving => format!("plegma preserving on [{u}]^{} (checked l = 2..={})", a.k, a.max_l.max(2)),
        Preservation::Violation(f) => {
            let image: Vec<FinSubset> = f.iter().map(|s| map.get(s).cloned().unwrap_or_else(FinSubset::empty)).collect();
            out["violation_image"] = json!(image);
            format!("not plegma preserving: {} maps to {}", show(f), show(&image))
        }
    };
    out["preserving"] = json!(res == Preservation::Preserving);
    if let Preservation::Violation(f) = &res {
        out["violation"] = json!(f);
    }
    if let Some(target) = a.witness {
        let w = find_nonpreserving_witness(&map, &u, target)?;
        let _ = write!(
            text,
            "\n{}",
            match &w {
                Some(l) => format!("no plegma pair of [{}]^{} maps to a plegma pair", FinSubset::new(l.clone())?, a.k),
                None => format!("no {target}-subset avoids plegma images"),
            }
        );
        out["witness"] = json!(w);
        out["witness_target"] = json!(target);
    }
    Ok(Report::new(out, text))
}
