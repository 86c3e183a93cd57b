use std::fmt::Write as _;

use clap::{Args, Subcommand, ValueEnum};
use plegma_lab::num::fmt_rational;
use plegma_lab::sm::{cesaro_limit, cesaro_scan, coefficient_grid, empirical_sm, l1_constant, sm_stabilize, splitting_check, Mode};
use plegma_lab::zoo::rationals_from_json;
use plegma_lab::{Error, Result, Universe};
use serde::Serialize;
use serde_json::json;

use crate::input;
use crate::output::Report;

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Cmd {
    /// Values of ||Σ a_j x_{s_j}|| over admissible plegma m-tuples, per coefficient tuple.
    Estimate(EstimateArgs),
    /// Thins the universe until the empirical values stabilise within a δ schedule.
    Stabilize(StabilizeArgs),
    /// Empirical lower l1 constant on the grid Σ|a_j| = 1.
    L1(L1Args),
    /// l1 constants of x = x1 + x2 and the triangle inequality on every tuple.
    Split(SplitArgs),
    /// Norms of Cesàro means, with the norming functionals f_n when requested.
    Cesaro(CesaroArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Generator name or JSON spec.
    #[arg(long)]
    gen: String,
    /// Parameter k of named generators.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// M: N, evens, 1..n, a+bi or [..].
    #[arg(long, default_value = "N")]
    universe: String,
}

#[derive(Args, Debug, Serialize)]
pub struct Sampling {
    /// Largest element used by any tuple.
    #[arg(long, default_value_t = 16)]
    horizon: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draws in sampled mode.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

impl Sampling {
    fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::Exhaustive => Mode::Exhaustive,
            ModeArg::Sampled => Mode::Sampled { seed: self.seed, samples: self.samples },
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    sampling: Sampling,
    /// Tuples start at or after M(l).
    #[arg(long)]
    l: usize,
    /// Tuple length; default l.
    #[arg(long)]
    m: Option<usize>,
    /// Grid resolution: coefficients in {-1, -1+1/q, ..., 1}.
    #[arg(long, default_value_t = 4)]
    q: u32,
    /// Explicit coefficient tuples as JSON, e.g. [[1,1],[1,-1]].
    #[arg(long)]
    coeffs: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct StabilizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    /// Nonincreasing width targets δ_1, δ_2, ...
    #[arg(long)]
    delta: String,
    #[arg(long)]
    target_l: usize,
    #[arg(long, default_value_t = 16)]
    horizon: u32,
    #[arg(long, default_value_t = 2)]
    q: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct L1Args {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    sampling: Sampling,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct SplitArgs {
    #[arg(long)]
    x: String,
    #[arg(long)]
    x1: String,
    #[arg(long)]
    x2: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value = "N")]
    universe: String,
    #[command(flatten)]
    #[serde(flatten)]
    sampling: Sampling,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Functionals {
    /// Means over [M|(k+1)n]^k paired with the functionals f_n and their closed form.
    Paper,
    /// Means over [M|n]^k, norm bounds only.
    None,
}

#[derive(Args, Debug, Serialize)]
pub struct CesaroArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
    /// Runs n = 1..=n-max.
    #[arg(long, conflicts_with = "ns", required_unless_present = "ns")]
    n_max: Option<usize>,
    /// Explicit list of n.
    #[arg(long)]
    ns: Option<String>,
    #[arg(long, value_enum, default_value_t = Functionals::None)]
    functionals: Functionals,
}

pub fn run(cmd: &Cmd) -> anyhow::Result<Report> {
    Ok(match cmd {
        Cmd::Estimate(a) => estimate(a)?,
        Cmd::Stabilize(a) => stabilize(a)?,
        Cmd::L1(a) => l1(a)?,
        Cmd::Split(a) => split(a)?,
        Cmd::Cesaro(a) => cesaro(a)?,
    })
}

fn setup(c: &Common) -> Result<(plegma_lab::zoo::KSeqGen, Universe)> {
    Ok((input::generator(&c.gen, c.k)?, input::universe(&c.universe)?))
}

fn estimate(a: &EstimateArgs) -> Result<Report> {
    let (g, u) = setup(&a.common)?;
    let m = a.m.unwrap_or(a.l);
    let coeffs = match &a.coeffs {
        Some(c) => input::json(c)?
            .as_array()
            .ok_or_else(|| Error::InvalidInput("coeffs must be a list of tuples".into()))?
            .iter()
            .map(rationals_from_json)
            .collect::<Result<Vec<_>>>()?,
        None => coefficient_grid(m, a.q),
    };
    let est = empirical_sm(&g, &u, a.l, m, &coeffs, a.sampling.horizon, a.sampling.mode())?;
    let mut text = format!(
        "{} admissible plegma {m}-tuples (s_1(1) >= {}), {} coefficient tuples, max width {:.6}\n",
        est.tuples,
        est.threshold.map_or_else(|| "-".into(), |t| t.to_string()),
        est.rows.len(),
        est.max_width()
    );
    if est.is_empty() {
        let _ = writeln!(text, "no admissible tuple up to horizon {}; raise --horizon", a.sampling.horizon);
    }
    text.push_str(&est.to_csv());
    Ok(Report::new(est.to_json(), text).csv(est.to_csv()))
}

fn stabilize(a: &StabilizeArgs) -> Result<Report> {
    let (g, u) = setup(&a.common)?;
    let delta: Vec<f64> = input::rationals(&a.delta)?.iter().map(plegma_lab::num::to_f64).collect();
    let r = sm_stabilize(&g, &u, &delta, a.target_l, a.horizon, a.q)?;
    let mut text = format!(
        "kept {:?}\nremoved {:?}\nsparsified {:?}\nstabilized per l: {:?}\n",
        r.universe, r.removed, r.sparsified, r.stabilized
    );
    text.push_str(&r.to_csv());
    Ok(Report::new(r.to_json(), text).csv(r.to_csv()))
}

fn l1(a: &L1Args) -> Result<Report> {
    let (g, u) = setup(&a.common)?;
    let c = l1_constant(&g, &u, a.l, a.q, a.sampling.horizon, a.sampling.mode())?;
    let argmin: Vec<String> = c.argmin.iter().map(fmt_rational).collect();
    let text = format!(
        "l = {}: min ||Σ a_j x_(s_j)|| over Σ|a_j| = 1 is {} at a = ({}); {} grid points, {} tuples",
        c.l,
        c.c,
        argmin.join(", "),
        c.grid_points,
        c.tuples
    );
    Ok(Report::new(c.to_json(), text))
}

fn split(a: &SplitArgs) -> Result<Report> {
    let u = input::universe(&a.universe)?;
    let (x, x1, x2) = (input::generator(&a.x, a.k)?, input::generator(&a.x1, a.k)?, input::generator(&a.x2, a.k)?);
    let r = splitting_check(&x, &x1, &x2, &u, a.l, a.q, a.sampling.horizon, a.sampling.mode())?;
    let text = format!(
        "c(x) = {}, c(x1) = {}, c(x2) = {}, max ||Σ a x2|| = {}\nc(x1) >= c(x) - max: {:.12}\ntriangle inequality: {} of {} violated; consistent: {}",
        r.c_x, r.c_x1, r.c_x2, r.max_x2, r.lower_bound_x1, r.sd_violations, r.sd_checked, r.consistent
    );
    Ok(Report::new(r.to_json(), text).status(if r.consistent { 0 } else { 1 }))
}

fn cesaro(a: &CesaroArgs) -> Result<Report> {
    let (g, u) = setup(&a.common)?;
    let ns: Vec<usize> = match (a.n_max, &a.ns) {
        (Some(n), _) => (1..=n).collect(),
        (None, Some(list)) => input::list(list)?,
        (None, None) => return Err(Error::InvalidInput("give --n-max or --ns".into())),
    };
    let paper = matches!(a.functionals, Functionals::Paper);
    let t = cesaro_scan(&g, &u, &ns, paper)?;
    let mut text = String::new();
    for r in &t.rows {
        let norm = match r.exact_norm() {
            Some(v) => v.to_string(),
            None => format!("[{:.9}, {:.9}]", r.lower.to_f64(), r.upper.to_f64()),
        };
        let _ = write!(text, "n = {:>3}  segment {:>3}  support {:>5}  norm {norm}", r.n, r.segment, r.support);
        if let (Some(f), Some(an)) = (&r.functional, &r.analytic) {
            let _ = write!(text, "  f_n = {}  closed form {}  {}", fmt_rational(f), fmt_rational(an), if f == an { "equal" } else { "DIFFERENT" });
        }
        text.push('\n');
    }
    let mut out = t.to_json();
    if paper {
        let lim = cesaro_limit(g.k);
        let _ = write!(text, "limit of the closed form: {}", fmt_rational(&lim));
        out["limit"] = json!(fmt_rational(&lim));
    }
    Ok(Report::new(out, text).csv(t.to_csv()))
}
