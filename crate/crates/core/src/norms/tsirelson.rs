//! The implicitly defined mixed Tsirelson-type norm on `c00(ℕ)`,
//! `‖x‖ = max{‖x‖_∞, (Σ_j ‖x‖_j²)^{1/2}}` with
//! `‖x‖_j = sup (1/m_j) Σ_{q≤n_j} ‖E_q x‖` over `E_1 < ... < E_{n_j}`.
//!
//! The basis is 1-unconditional, so the `E_q` may be taken to be intervals of
//! the support covering it. Splitting a piece never lowers the sum, so for an
//! interval of `L` points `‖x‖_j` uses exactly `min(n_j, L)` pieces, and for
//! `n_j >= L` it is `‖x‖_ℓ¹ / m_j`. Every piece is a proper sub-interval once
//! `n_j >= 2`, which turns the implicit definition into a recursion on
//! interval length. Square roots make the values irrational, so they are
//! computed in `f64`; the reported error covers the unknown part of `Σ 1/m_j²`
//! beyond the configured prefix.

use std::collections::HashMap;
use std::cell::Cell;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::NormEngine;
use crate::error::{invalid, Error, Result};
use crate::num::{to_f64, NormValue};
use crate::vector::SparseVec;

/// Work limit for one evaluation, counted in partition DP transitions.
pub const DEFAULT_WORK_LIMIT: u64 = 400_000_000;

fn ser_u128s<S: Serializer>(v: &[u128], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
}

fn de_u128s<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<u128>, D::Error> {
    let raw: Vec<Value> = Vec::deserialize(d)?;
    raw.into_iter()
        .map(|v| match v {
            Value::Number(n) => n.as_u64().map(u128::from).ok_or_else(|| serde::de::Error::custom("expected a positive integer")),
            Value::String(s) => s.trim().parse::<u128>().map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("expected an integer")),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TsirelsonConfig {
    pub label: String,
    #[serde(serialize_with = "ser_u128s", deserialize_with = "de_u128s")]
    pub m: Vec<u128>,
    #[serde(serialize_with = "ser_u128s", deserialize_with = "de_u128s")]
    pub n: Vec<u128>,
    /// Beyond the prefix, `m_{J+i} = m_J · r^i`; without it only bounds on the
    /// tail of `Σ 1/m_j²` are known.
    #[serde(default)]
    pub continuation_ratio: Option<u128>,
    #[serde(default = "default_tol")]
    pub tail_tolerance: f64,
    /// Accept `Σ 1/m_j > 0.1`.
    #[serde(default)]
    pub relaxed: bool,
}

fn default_tol() -> f64 {
    1e-9
}

impl TsirelsonConfig {
    /// `m_j = 10^j`, `n = (10², 10⁴, 10⁷, 10¹¹, 10¹⁶, 10²²)`, continued by ratio 10.
    /// Here `Σ 1/m_j = 1/9`, so the preset is marked relaxed.
    pub fn desk() -> Self {
        TsirelsonConfig {
            label: "desk".into(),
            m: (1..=6).map(|j| 10u128.pow(j)).collect(),
            n: [2u32, 4, 7, 11, 16, 22].iter().map(|&e| 10u128.pow(e)).collect(),
            continuation_ratio: Some(10),
            tail_tolerance: default_tol(),
            relaxed: true,
        }
    }

    /// `m_j = 100^j`, `n_j = 100^{j(j+1)/2}` for `j <= 5`, continued by ratio 100.
    pub fn paper() -> Self {
        TsirelsonConfig {
            label: "paper".into(),
            m: (1..=5).map(|j| 100u128.pow(j)).collect(),
            n: (1..=5u32).map(|j| 100u128.pow(j * (j + 1) / 2)).collect(),
            continuation_ratio: Some(100),
            tail_tolerance: default_tol(),
            relaxed: false,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk()),
            "paper" => Ok(Self::paper()),
            other => Err(Error::InvalidConfig(format!("unknown preset {other:?} (expected desk or paper)"))),
        }
    }

    /// `Σ_j 1/m_j` including the geometric continuation, if any.
    pub fn reciprocal_sum(&self) -> f64 {
        let prefix: f64 = self.m.iter().map(|&m| 1.0 / m as f64).sum();
        match (self.continuation_ratio, self.m.last()) {
            (Some(r), Some(&mj)) => prefix + 1.0 / (mj as f64 * (r as f64 - 1.0)),
            _ => prefix,
        }
    }

    /// Problems with the configuration, `relaxed` aside.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.m.is_empty() || self.m.len() != self.n.len() {
            out.push("m and n must be nonempty and of equal length".into());
            return out;
        }
        if self.m[0] < 2 {
            out.push("m_1 must be at least 2".into());
        }
        if self.n[0] < 2 {
            out.push("n_1 must be at least 2".into());
        }
        for j in 1..self.m.len() {
            if self.m[j] <= self.m[j - 1] {
                out.push(format!("m is not strictly increasing at j={}", j + 1));
            }
            if self.n[j] <= self.n[j - 1] {
                out.push(format!("n is not strictly increasing at j={}", j + 1));
            }
        }
        for j in 0..self.m.len() - 1 {
            if self.m[j].checked_mul(self.n[j]).is_none_or(|p| p >= self.n[j + 1]) {
                out.push(format!("n_{0}/n_{1} < 1/m_{0} fails", j + 1, j + 2));
            }
        }
        if let Some(r) = self.continuation_ratio {
            if r < 2 {
                out.push("continuation ratio must be at least 2".into());
            }
        }
        if !(self.tail_tolerance > 0.0) {
            out.push("tail_tolerance must be positive".into());
        }
        let s = self.reciprocal_sum();
        if s > 0.1 + 1e-15 {
            out.push(format!("sum of 1/m_j is {s:.6} > 0.1"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v: Vec<String> = self
            .violations()
            .into_iter()
            .filter(|m| !(self.relaxed && m.starts_with("sum of 1/m_j")))
            .collect();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v.join("; ")))
        }
    }

    /// The reciprocal-sum condition fails but `relaxed` is set.
    pub fn relaxed_warning(&self) -> Option<String> {
        let s = self.reciprocal_sum();
        (self.relaxed && s > 0.1 + 1e-15).then(|| format!("preset {:?}: sum of 1/m_j is {s:.6} > 0.1, accepted as relaxed", self.label))
    }
}

#[derive(Clone, Debug)]
pub struct Tsirelson {
    cfg: TsirelsonConfig,
    m: Vec<f64>,
    /// `Σ_{i>=j} 1/m_i²` over the prefix plus the low and high tail.
    suffix_lo: Vec<f64>,
    suffix_hi: Vec<f64>,
    pub work_limit: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TsirelsonValue {
    pub lo: f64,
    pub hi: f64,
}

impl TsirelsonValue {
    pub fn value(&self) -> f64 {
        self.hi
    }

    pub fn error(&self) -> f64 {
        self.hi - self.lo
    }
}

struct Geometry<'a> {
    vals: Vec<f64>,
    prefix: Vec<f64>,
    table: Vec<Vec<f64>>,
    suffix: &'a [f64],
    eng: &'a Tsirelson,
    work: Cell<u64>,
}

impl<'a> Geometry<'a> {
    fn new(eng: &'a Tsirelson, vals: Vec<f64>, suffix: &'a [f64]) -> Self {
        let mut prefix = vec![0.0; vals.len() + 1];
        for (i, v) in vals.iter().enumerate() {
            prefix[i + 1] = prefix[i] + v;
        }
        let mut table = vec![vals.clone()];
        let mut w = 1;
        while 2 * w <= vals.len() {
            let prev = table.last().unwrap();
            let next: Vec<f64> = (0..=vals.len() - 2 * w).map(|i| prev[i].max(prev[i + w])).collect();
            table.push(next);
            w *= 2;
        }
        Geometry { vals, prefix, table, suffix, eng, work: Cell::new(0) }
    }

    fn sup(&self, a: usize, b: usize) -> f64 {
        let lvl = (usize::BITS - 1 - (b - a).leading_zeros()) as usize;
        self.table[lvl][a].max(self.table[lvl][b - (1 << lvl)])
    }

    fn l1(&self, a: usize, b: usize) -> f64 {
        if b - a == 1 {
            self.vals[a]
        } else {
            self.prefix[b] - self.prefix[a]
        }
    }

    /// Index of the least `j` with `n_j >= len`.
    fn cut(&self, len: usize) -> usize {
        self.eng.cfg.n.iter().position(|&n| n >= len as u128).unwrap_or(self.eng.cfg.n.len())
    }

    /// Largest `Σ piece(E_q)` over partitions of `[a,b)` into exactly `p` intervals.
    fn partition_max(&self, a: usize, b: usize, p: usize, piece: &mut dyn FnMut(usize, usize) -> Result<f64>) -> Result<f64> {
        let len = b - a;
        let maxw = len - p + 1;
        let steps = (p as u64) * (len as u64) * (maxw as u64);
        let done = self.work.get() + steps;
        if done > self.eng.work_limit {
            return Err(Error::ScaleRefusal(format!(
                "partition search exceeds the work limit of {} steps; use the certified bounds instead",
                self.eng.work_limit
            )));
        }
        self.work.set(done);
        let mut prev = vec![f64::NEG_INFINITY; len + 1];
        prev[0] = 0.0;
        for q in 1..=p {
            let mut cur = vec![f64::NEG_INFINITY; len + 1];
            for i in q..=len - (p - q) {
                let mut best = f64::NEG_INFINITY;
                for w in 1..=maxw.min(i - (q - 1)) {
                    let base = prev[i - w];
                    if base == f64::NEG_INFINITY {
                        continue;
                    }
                    let cand = base + piece(a + i - w, a + i)?;
                    if cand > best {
                        best = cand;
                    }
                }
                cur[i] = best;
            }
            prev = cur;
        }
        Ok(prev[len])
    }

    /// One application of the defining formula on `[a,b)`, with `piece` giving
    /// the values of proper sub-intervals.
    fn combine(&self, a: usize, b: usize, piece: &mut dyn FnMut(usize, usize) -> Result<f64>) -> Result<f64> {
        let len = b - a;
        let sup = self.sup(a, b);
        if len == 1 {
            return Ok(sup);
        }
        let l1 = self.l1(a, b);
        let cut = self.cut(len);
        if cut == self.eng.cfg.n.len() {
            return Err(Error::ScaleRefusal(format!(
                "support of {len} points exceeds n_J = {}",
                self.eng.cfg.n.last().unwrap()
            )));
        }
        let mut s = 0.0;
        for j in 0..cut {
            let p = self.eng.cfg.n[j] as usize;
            let pj = self.partition_max(a, b, p, piece)?;
            let t = pj / self.eng.m[j];
            s += t * t;
        }
        s += l1 * l1 * self.suffix[cut];
        Ok(sup.max(s.sqrt()))
    }

    fn value(&self, memo: &mut HashMap<(usize, usize), f64>, a: usize, b: usize) -> Result<f64> {
        if b - a <= 1 || (b - a) as u128 <= self.eng.cfg.n[0] {
            return self.combine(a, b, &mut |_, _| unreachable!("short intervals need no partition"));
        }
        if let Some(&v) = memo.get(&(a, b)) {
            return Ok(v);
        }
        let v = self.combine(a, b, &mut |c, d| self.value(memo, c, d))?;
        memo.insert((a, b), v);
        Ok(v)
    }
}

impl Tsirelson {
    pub fn new(cfg: TsirelsonConfig) -> Result<Self> {
        cfg.validate()?;
        let m: Vec<f64> = cfg.m.iter().map(|&x| x as f64).collect();
        let inv2: Vec<f64> = m.iter().map(|x| 1.0 / (x * x)).collect();
        let mj = *m.last().unwrap();
        let (tail_lo, tail_hi) = match cfg.continuation_ratio {
            Some(r) => {
                let t = 1.0 / (mj * mj * ((r * r) as f64 - 1.0));
                (t, t)
            }
            None => {
                let b = (0.1 - m.iter().map(|x| 1.0 / x).sum::<f64>()).max(0.0);
                (0.0, (b * b).min(b / mj))
            }
        };
        let build = |tail: f64| {
            let mut suf = vec![tail; inv2.len() + 1];
            for j in (0..inv2.len()).rev() {
                suf[j] = suf[j + 1] + inv2[j];
            }
            suf
        };
        Ok(Tsirelson { suffix_lo: build(tail_lo), suffix_hi: build(tail_hi), m, cfg, work_limit: DEFAULT_WORK_LIMIT })
    }

    pub fn config(&self) -> &TsirelsonConfig {
        &self.cfg
    }

    /// `(Σ_j 1/m_j²)^{1/2}`, upper estimate.
    pub fn rho_hi(&self) -> f64 {
        self.suffix_hi[0].sqrt()
    }

    fn magnitudes(&self, x: &SparseVec) -> Result<Vec<f64>> {
        if x.arity().is_some_and(|a| a != 1) {
            return invalid("the Tsirelson-type norm acts on vectors indexed by ℕ");
        }
        Ok(x.iter().map(|(_, a)| to_f64(a).abs()).collect())
    }

    fn run(&self, vals: &[f64], suffix: &[f64]) -> Result<f64> {
        if vals.is_empty() {
            return Ok(0.0);
        }
        let geo = Geometry::new(self, vals.to_vec(), suffix);
        let mut memo = HashMap::new();
        geo.value(&mut memo, 0, vals.len())
    }

    pub fn evaluate(&self, x: &SparseVec) -> Result<TsirelsonValue> {
        let vals = self.magnitudes(x)?;
        let lo = self.run(&vals, &self.suffix_lo)?;
        let hi = if self.suffix_hi == self.suffix_lo { lo } else { self.run(&vals, &self.suffix_hi)? };
        Ok(TsirelsonValue { lo, hi })
    }

    /// `‖x‖_j` for `1 <= j <= J`, using the upper tail.
    pub fn seminorm(&self, j: usize, x: &SparseVec) -> Result<f64> {
        if j == 0 || j > self.m.len() {
            return invalid(format!("j must lie in 1..={}", self.m.len()));
        }
        let vals = self.magnitudes(x)?;
        if vals.is_empty() {
            return Ok(0.0);
        }
        let geo = Geometry::new(self, vals.clone(), &self.suffix_hi);
        let len = vals.len();
        let p = self.cfg.n[j - 1];
        let pj = if p >= len as u128 {
            geo.l1(0, len)
        } else {
            let mut memo = HashMap::new();
            geo.partition_max(0, len, p as usize, &mut |c, d| geo.value(&mut memo, c, d))?
        };
        Ok(pj / self.m[j - 1])
    }

    /// `‖x‖_j <= min(‖x‖_ℓ¹, min(n_j, |supp x|)·‖x‖_∞ + ρ·‖x‖_ℓ¹) / m_j`,
    /// from `‖y‖ <= ‖y‖_∞ + ρ‖y‖_ℓ¹`. Works at any support size.
    pub fn seminorm_upper_bound(&self, j: usize, x: &SparseVec) -> Result<f64> {
        if j == 0 || j > self.m.len() {
            return invalid(format!("j must lie in 1..={}", self.m.len()));
        }
        let vals = self.magnitudes(x)?;
        let l1: f64 = vals.iter().sum();
        let sup = vals.iter().cloned().fold(0.0, f64::max);
        let pieces = (self.cfg.n[j - 1].min(vals.len() as u128)) as f64;
        Ok(l1.min(pieces * sup + self.rho_hi() * l1) / self.m[j - 1])
    }

    /// `max(‖x‖_∞, (Σ_j (S_j/m_j)²)^{1/2})` with `S_j` the sum of the `n_j`
    /// largest moduli: the singletons of those entries are admissible pieces.
    pub fn certificate_lower_bound(&self, x: &SparseVec) -> Result<f64> {
        let mut vals = self.magnitudes(x)?;
        vals.sort_by(|a, b| b.total_cmp(a));
        let sup = vals.first().copied().unwrap_or(0.0);
        let mut s = 0.0;
        for (j, &n) in self.cfg.n.iter().enumerate() {
            let take = n.min(vals.len() as u128) as usize;
            let sj: f64 = vals[..take].iter().sum();
            s += (sj / self.m[j]).powi(2);
        }
        Ok(sup.max(s.sqrt()))
    }

    /// Values at `supp x` of the iterates `v_0 = ‖·‖_∞`,
    /// `v_{t+1} = max{‖·‖_∞, (Σ_j ‖·‖_j²)^{1/2}}` with `‖·‖_j` computed from
    /// `v_t`, run over all sub-intervals until nothing changes.
    pub fn fixed_point_trace(&self, x: &SparseVec) -> Result<Vec<f64>> {
        let vals = self.magnitudes(x)?;
        let len = vals.len();
        if len == 0 {
            return Ok(vec![0.0]);
        }
        let geo = Geometry::new(self, vals, &self.suffix_hi);
        let mut table: Vec<Vec<f64>> = (0..len).map(|a| (0..=len).map(|b| if b > a { geo.sup(a, b) } else { 0.0 }).collect()).collect();
        let mut trace = vec![table[0][len]];
        loop {
            let mut next = table.clone();
            for a in 0..len {
                for b in a + 1..=len {
                    next[a][b] = geo.combine(a, b, &mut |c, d| Ok(table[c][d]))?;
                }
            }
            let stable = next == table;
            table = next;
            if stable {
                break;
            }
            trace.push(table[0][len]);
        }
        Ok(trace)
    }
}

impl NormEngine for Tsirelson {
    fn name(&self) -> &str {
        "tsirelson"
    }

    fn params(&self) -> Value {
        let mut v = serde_json::to_value(&self.cfg).unwrap_or(Value::Null);
        if let Value::Object(ref mut o) = v {
            o.insert("engine".into(), json!("tsirelson"));
            if let Some(w) = self.cfg.relaxed_warning() {
                o.insert("warning".into(), json!(w));
            }
        }
        v
    }

    fn eval(&self, x: &SparseVec) -> Result<NormValue> {
        let v = self.evaluate(x)?;
        Ok(NormValue::Approx { value: v.value(), error: v.error() })
    }

    fn is_unconditional(&self) -> bool {
        true
    }

    fn certify(&self, x: &SparseVec) -> Result<Option<Value>> {
        let v = self.evaluate(x)?;
        Ok(Some(json!({
            "lower_bound": self.certificate_lower_bound(x)?,
            "value": v.value(),
            "error": v.error(),
            "seminorms": (1..=self.m.len()).map(|j| self.seminorm(j, x).ok()).collect::<Vec<_>>(),
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn small() -> Tsirelson {
        Tsirelson::new(TsirelsonConfig {
            label: "small".into(),
            m: vec![10, 100, 1000],
            n: vec![2, 21, 2101],
            continuation_ratio: Some(10),
            tail_tolerance: 1e-9,
            relaxed: true,
        })
        .unwrap()
    }

    #[test]
    fn presets_validate() {
        assert!(TsirelsonConfig::desk().validate().is_ok());
        assert!(TsirelsonConfig::desk().relaxed_warning().is_some());
        assert!(TsirelsonConfig::paper().validate().is_ok());
        let mut bad = TsirelsonConfig::desk();
        bad.relaxed = false;
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let mut bad = TsirelsonConfig::paper();
        bad.n[2] = bad.n[1] + 1;
        assert!(bad.validate().is_err());
        let round: TsirelsonConfig = serde_json::from_value(serde_json::to_value(TsirelsonConfig::paper()).unwrap()).unwrap();
        assert_eq!(round, TsirelsonConfig::paper());
    }

    #[test]
    fn unit_vectors() {
        let t = Tsirelson::new(TsirelsonConfig::desk()).unwrap();
        let v = t.evaluate(&SparseVec::unit_nat(7)).unwrap();
        assert_eq!((v.lo, v.hi), (1.0, 1.0));
        let v = t.evaluate(&SparseVec::from_nat([(3, rat(-5, 2))])).unwrap();
        assert_eq!(v.value(), 2.5);
    }

    #[test]
    fn flat_sum_lower_bound() {
        let t = Tsirelson::new(TsirelsonConfig::desk()).unwrap();
        let x = SparseVec::from_nat((1..=100).map(|q| (q, int(1))));
        let v = t.evaluate(&x).unwrap().value();
        assert!(v >= 10.0);
        assert!(v >= t.certificate_lower_bound(&x).unwrap());
    }

    #[test]
    fn fixed_point_agrees() {
        let t = small();
        let x = SparseVec::from_nat((1..=9).map(|q| (q * 2, rat(q as i64 % 4 + 1, 3))));
        let trace = t.fixed_point_trace(&x).unwrap();
        assert!(trace.windows(2).all(|w| w[0] <= w[1]));
        assert!(trace.len() <= x.nnz());
        assert_eq!(*trace.last().unwrap(), t.evaluate(&x).unwrap().value());
        assert_eq!(t.seminorm(3, &x).unwrap(), to_f64(&x.l1()) / 1000.0);
        assert!(t.seminorm(1, &x).unwrap() <= t.seminorm_upper_bound(1, &x).unwrap());
    }

    #[test]
    fn open_tail_reports_error() {
        let t = Tsirelson::new(TsirelsonConfig {
            label: "open".into(),
            m: vec![20, 400],
            n: vec![50, 30000],
            continuation_ratio: None,
            tail_tolerance: 1e-9,
            relaxed: false,
        })
        .unwrap();
        let x = SparseVec::from_nat((1..=40).map(|q| (q, int(1))));
        let v = t.evaluate(&x).unwrap();
        assert!(v.lo <= v.hi && v.error() > 0.0);
    }
}
