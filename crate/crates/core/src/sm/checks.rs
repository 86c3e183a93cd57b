//! Splitting, zero-sum, sign-flip and composition checks on empirical values.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::{admissible_tuples, coefficient_grid, combine, l1_sphere_grid, member_vectors, Mode};
use crate::combin::combinations;
use crate::error::{invalid, Error, Result};
use crate::norms::NormEngine;
use crate::num::{NormValue, Rational};
use crate::subset::{FinSubset, Universe};
use crate::vector::SparseVec;
use crate::zoo::{compose_seq, KSeqGen};

fn same_value(a: &NormValue, b: &NormValue) -> bool {
    match a.exact_cmp(b) {
        Some(o) => o == Ordering::Equal,
        None => a.to_f64() == b.to_f64(),
    }
}

fn min_value<'a>(it: impl Iterator<Item = &'a NormValue>) -> Option<NormValue> {
    it.fold(None, |acc: Option<NormValue>, v| match acc {
        Some(m) if m.cmp_value(v) != Ordering::Greater => Some(m),
        _ => Some(v.clone()),
    })
}

#[derive(Clone, Debug)]
pub struct SplitReport {
    pub c_x: NormValue,
    pub c_x1: NormValue,
    pub c_x2: NormValue,
    /// Largest `‖Σ a_j x2_{s_j}‖` over the grid.
    pub max_x2: NormValue,
    /// `c(x) - max_x2`, which `c(x1)` must dominate by the triangle inequality.
    pub lower_bound_x1: f64,
    pub sd_checked: usize,
    pub sd_violations: usize,
    pub consistent: bool,
}

impl SplitReport {
    pub fn to_json(&self) -> Value {
        json!({
            "c_x": self.c_x.to_json(),
            "c_x1": self.c_x1.to_json(),
            "c_x2": self.c_x2.to_json(),
            "max_x2": self.max_x2.to_json(),
            "lower_bound_x1": self.lower_bound_x1,
            "sd_checked": self.sd_checked,
            "sd_violations": self.sd_violations,
            "consistent": self.consistent,
        })
    }
}

/// For `x_s = x1_s + x2_s`: `ℓ¹` constants of the three sequences on the
/// grid `Σ|a_j| = 1` and the inequality `‖Σ a x‖ <= ‖Σ a x1‖ + ‖Σ a x2‖`
/// on every admissible tuple.
pub fn splitting_check(
    x: &KSeqGen,
    x1: &KSeqGen,
    x2: &KSeqGen,
    universe: &Universe,
    l: usize,
    q: u32,
    horizon: u32,
    mode: Mode,
) -> Result<SplitReport> {
    if x.k != x1.k || x.k != x2.k {
        return invalid("the three sequences must have the same arity");
    }
    let (_, tuples) = admissible_tuples(x.k, universe, l, l, horizon, mode)?;
    if tuples.is_empty() {
        return invalid(format!("no admissible plegma {l}-tuple up to horizon {horizon}"));
    }
    let leaves: BTreeSet<FinSubset> = tuples.iter().flat_map(|t| t.members().iter().cloned()).collect();
    for s in &leaves {
        if x.vec(s)? != x1.vec(s)?.add(&x2.vec(s)?) {
            return Err(Error::InvalidInput(format!("x_s differs from x1_s + x2_s at s = {s}")));
        }
    }
    let grid = l1_sphere_grid(l, q);
    let (v, v1, v2) = (member_vectors(x, &tuples)?, member_vectors(x1, &tuples)?, member_vectors(x2, &tuples)?);
    let mut vals = (Vec::new(), Vec::new(), Vec::new());
    let mut violations = 0;
    let mut checked = 0;
    for a in &grid {
        for t in 0..tuples.len() {
            let n = x.norm(&combine(&v[t], a))?;
            let n1 = x1.norm(&combine(&v1[t], a))?;
            let n2 = x2.norm(&combine(&v2[t], a))?;
            checked += 1;
            let sum_exact = match (n1.as_rational(), n2.as_rational()) {
                (Some(p), Some(r)) => Some(NormValue::Exact(p + r)),
                _ => None,
            };
            let bad = match sum_exact {
                Some(s) => n.cmp_value(&s) == Ordering::Greater,
                None => n.to_f64() > n1.to_f64() + n2.to_f64() + 1e-12,
            };
            if bad {
                violations += 1;
            }
            vals.0.push(n);
            vals.1.push(n1);
            vals.2.push(n2);
        }
    }
    let c_x = min_value(vals.0.iter()).unwrap();
    let c_x1 = min_value(vals.1.iter()).unwrap();
    let c_x2 = min_value(vals.2.iter()).unwrap();
    let max_x2 = vals.2.iter().fold(NormValue::zero(), |m, v| if v.cmp_value(&m) == Ordering::Greater { v.clone() } else { m });
    let lower_bound_x1 = c_x.to_f64() - max_x2.to_f64();
    let consistent = violations == 0 && c_x1.to_f64() >= lower_bound_x1 - 1e-12;
    Ok(SplitReport { c_x, c_x1, c_x2, max_x2, lower_bound_x1, sd_checked: checked, sd_violations: violations, consistent })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroSumReport {
    pub checked: usize,
    pub mismatches: usize,
}

/// For `x'_s = x_s - v`: on coefficient tuples with `Σ a_j = 0`, the values of
/// `x` and `x'` agree on every admissible tuple.
pub fn zero_sum_check(
    x: &KSeqGen,
    v: &SparseVec,
    universe: &Universe,
    l: usize,
    m: usize,
    q: u32,
    horizon: u32,
) -> Result<ZeroSumReport> {
    let (_, tuples) = admissible_tuples(x.k, universe, l, m, horizon, Mode::Exhaustive)?;
    let grid: Vec<Vec<Rational>> = coefficient_grid(m, q).into_iter().filter(|a| a.iter().sum::<Rational>().is_zero()).collect();
    let vecs = member_vectors(x, &tuples)?;
    let shifted: Vec<Vec<SparseVec>> = vecs.iter().map(|mv| mv.iter().map(|u| u.sub(v)).collect()).collect();
    let mut rep = ZeroSumReport { checked: 0, mismatches: 0 };
    for a in &grid {
        for t in 0..tuples.len() {
            rep.checked += 1;
            if !same_value(&x.norm(&combine(&vecs[t], a))?, &x.norm(&combine(&shifted[t], a))?) {
                rep.mismatches += 1;
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignFlipReport {
    pub checked: usize,
    pub mismatches: usize,
    /// Images of distinct tuple members had disjoint supports throughout.
    pub disjoint: bool,
}

/// Compares `‖Σ a_j x_{s_j}‖` with `‖Σ |a_j| x_{s_j}‖` on every admissible
/// tuple and grid point.
pub fn sign_flip_check(x: &KSeqGen, universe: &Universe, l: usize, m: usize, q: u32, horizon: u32) -> Result<SignFlipReport> {
    let (_, tuples) = admissible_tuples(x.k, universe, l, m, horizon, Mode::Exhaustive)?;
    let vecs = member_vectors(x, &tuples)?;
    let disjoint = vecs.iter().all(|mv| (0..mv.len()).all(|i| (i + 1..mv.len()).all(|j| mv[i].supports_disjoint(&mv[j]))));
    let grid = coefficient_grid(m, q);
    let mut rep = SignFlipReport { checked: 0, mismatches: 0, disjoint };
    for a in grid.iter().filter(|a| a.iter().any(|c| c.is_negative())) {
        let abs: Vec<Rational> = a.iter().map(|c| c.abs()).collect();
        for mv in &vecs {
            rep.checked += 1;
            if !same_value(&x.norm(&combine(mv, a))?, &x.norm(&combine(mv, &abs))?) {
                rep.mismatches += 1;
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct CompositionReport {
    /// Basis constant of `(e_n)` measured on the grid.
    pub basis_constant: f64,
    /// `sup ‖y_t‖`.
    pub k_sup: f64,
    /// Largest empirical width of `x` and `y` at the lengths involved.
    pub delta_tilde: f64,
    /// `(1 + 2CK) δ̃_l`.
    pub tolerance: f64,
    pub max_deviation: f64,
    pub checked: usize,
    pub exact_matches: usize,
    pub ok: bool,
}

impl CompositionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "basis_constant": self.basis_constant,
            "k_sup": self.k_sup,
            "delta_tilde": self.delta_tilde,
            "tolerance": self.tolerance,
            "max_deviation": self.max_deviation,
            "checked": self.checked,
            "exact_matches": self.exact_matches,
            "ok": self.ok,
        })
    }
}

fn width_over(g: &KSeqGen, universe: &Universe, l: usize, m: usize, q: u32, horizon: u32) -> Result<f64> {
    let est = super::empirical_sm(g, universe, l, m, &coefficient_grid(m, q), horizon, Mode::Exhaustive)?;
    Ok(est.max_width())
}

/// Compares the empirical values of the composed `(k+d)`-sequence `z` with the
/// values `‖Σ a_i y_{t_i}‖` in the space of the spreading model of `x`,
/// normed by `e_norm`, where `t_i` are the first `d` entries of `v_i`.
pub fn composition_check(
    x: &KSeqGen,
    y: &KSeqGen,
    e_norm: Arc<dyn NormEngine>,
    universe: &Universe,
    l: usize,
    q: u32,
    horizon: u32,
) -> Result<CompositionReport> {
    let (k, d) = (x.k, y.k);
    let grid = coefficient_grid(l, q);
    let e_eval = |v: &SparseVec| e_norm.eval(v);

    let mut c: f64 = 1.0;
    for a in &grid {
        let full = e_eval(&SparseVec::from_nat(a.iter().enumerate().map(|(i, c)| (i as u32 + 1, c.clone()))))?.to_f64();
        if full == 0.0 {
            continue;
        }
        for p in 1..l {
            let part = e_eval(&SparseVec::from_nat(a[..p].iter().enumerate().map(|(i, c)| (i as u32 + 1, c.clone()))))?.to_f64();
            c = c.max(part / full);
        }
    }

    let elems = universe.elements_upto(horizon);
    let mut k_sup: f64 = 0.0;
    let mut max_support = 1;
    for t in combinations(&elems, d) {
        let yt = y.vec(&FinSubset::from_sorted(t))?;
        max_support = max_support.max(yt.nnz());
        k_sup = k_sup.max(e_eval(&yt)?.to_f64());
    }

    let y_with_e = y.with_ambient(e_norm.clone());
    let mut delta = width_over(&y_with_e, universe, l, l, q, horizon)?;
    let xl = (l * max_support).min(elems.len() / k.max(1));
    if xl >= 1 {
        // long combinations of x are probed on the coarse grid, just past M(xl)
        let xq = if xl > 4 { 1 } else { q.min(2) };
        delta = delta.max(width_over(x, &Universe::Naturals, xl, xl, xq, 2 * xl as u32 + 2)?);
    }
    let tolerance = (1.0 + 2.0 * c * k_sup) * delta;

    let z = compose_seq(x, y);
    let (_, tuples) = admissible_tuples(k + d, universe, l, l, horizon, Mode::Exhaustive)?;
    let zv = member_vectors(&z, &tuples)?;
    let yv: Vec<Vec<SparseVec>> = tuples
        .iter()
        .map(|t| t.members().iter().map(|v| y.vec(&v.prefix(d))).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut rep = CompositionReport {
        basis_constant: c,
        k_sup,
        delta_tilde: delta,
        tolerance,
        max_deviation: 0.0,
        checked: 0,
        exact_matches: 0,
        ok: true,
    };
    for a in &grid {
        for t in 0..tuples.len() {
            let vz = z.norm(&combine(&zv[t], a))?;
            let vy = e_eval(&combine(&yv[t], a))?;
            rep.checked += 1;
            let exact = vz.exact_cmp(&vy) == Some(Ordering::Equal);
            if exact {
                rep.exact_matches += 1;
                continue;
            }
            let dev = (vz.to_f64() - vy.to_f64()).abs();
            rep.max_deviation = rep.max_deviation.max(dev);
            if tolerance == 0.0 || dev > tolerance {
                rep.ok = false;
            }
        }
    }
    if tuples.is_empty() {
        rep.ok = false;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{Exponent, LpNorm};
    use crate::num::int;
    use crate::zoo::{constant_seq, lp_basis, xk_basis, xk_diagonal};

    #[test]
    fn split_with_zero() {
        let x = xk_basis(1);
        let zero = constant_seq(2, SparseVec::zero(), x.ambient.clone());
        let r = splitting_check(&x, &x, &zero, &Universe::Naturals, 2, 2, 7, Mode::Exhaustive).unwrap();
        assert_eq!(r.c_x1, NormValue::Exact(int(1)));
        assert_eq!(r.c_x, r.c_x1);
        assert!(r.consistent);
    }

    #[test]
    fn zero_sum_and_flips() {
        let x = lp_basis(Exponent::Inf);
        let v = SparseVec::from_nat([(1, int(3)), (2, int(-1))]);
        assert_eq!(zero_sum_check(&x, &v, &Universe::Naturals, 3, 3, 2, 8).unwrap().mismatches, 0);
        let f = sign_flip_check(&xk_basis(1), &Universe::Naturals, 2, 2, 2, 7).unwrap();
        assert!(f.disjoint && f.checked > 0 && f.mismatches == 0);
    }

    #[test]
    fn composition_desk_case() {
        let y = KSeqGen::new(
            "pairs",
            json!({}),
            1,
            Arc::new(LpNorm::new(Exponent::Two)),
            Arc::new(|t: &FinSubset| SparseVec::from_nat([(2 * t.at(1) - 1, int(1)), (2 * t.at(1), int(1))])),
        );
        let r = composition_check(&xk_diagonal(1), &y, Arc::new(LpNorm::new(Exponent::Two)), &Universe::evens(), 2, 1, 12).unwrap();
        assert!(r.ok, "{r:?}");
        assert_eq!(r.exact_matches, r.checked);
        assert_eq!(r.delta_tilde, 0.0);
    }
}
