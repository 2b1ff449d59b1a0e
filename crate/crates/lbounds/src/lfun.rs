//! `|L(1+it, chi)|` with certified radius, by two independent routes.
//!
//! Route one decomposes L into Hurwitz zeta values at rational shifts,
//! `L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)`, and drives the
//! Euler-Maclaurin evaluator with a per-shift radius budget. Route two sums
//! the Dirichlet series to N and bounds the tail by Abel partial summation
//! through the character partial sums, `|tail| <= |A(N)|/N + q |s| / (2N)`.
//! Both radii are rigorous, so enclosures from the two routes must overlap;
//! `cross_check` turns that into a verdict.

use crate::ball::{ErrorBoundedComplex, ROUNDING_INFLATION};
use crate::characters::{enumerate_characters, DirichletCharacter, RootOfUnity, UnitGroupStructure};
use crate::hurwitz::{choose_truncation_with_order, hurwitz_zeta_em, EmConfig};
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Expansion order used by the Hurwitz route; higher than the minimal k = 1
/// purely for speed, with the same radius contract.
const DEFAULT_EM_ORDER: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    HurwitzDecomposition,
    PartialSummation,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::HurwitzDecomposition => "hurwitz",
            Method::PartialSummation => "psum",
        }
    }
}

/// One evaluated point `L(1+it, chi)` with its enclosure.
#[derive(Debug, Clone)]
pub struct LPoint {
    pub q: u64,
    pub chi: DirichletCharacter,
    pub t: f64,
    pub value: ErrorBoundedComplex,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

fn check_chi_t(chi: &DirichletCharacter, t: f64) -> Result<()> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter(chi.modulus()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} not > 0")));
    }
    Ok(())
}

/// `x^{-s}` for real x > 0 with a relative rounding bound.
fn power_neg(x: f64, s: Complex64) -> (Complex64, f64) {
    let lx = x.ln();
    let value = (-s * lx).exp();
    (value, ROUNDING_INFLATION * (2.0 + (s.im * lx).abs()))
}

/// Shared worker: the Hurwitz shifts `zeta(s, a/q)` for every unit a, each
/// within `per_shift_radius`.
fn hurwitz_shifts(
    group: &UnitGroupStructure,
    s: Complex64,
    order: u32,
    per_shift_radius: f64,
) -> Result<Vec<(u64, ErrorBoundedComplex)>> {
    let q = group.modulus;
    group
        .units()
        .map(|a| {
            let c = a as f64 / q as f64;
            let n = choose_truncation_with_order(s, c, order, per_shift_radius)?;
            let z = hurwitz_zeta_em(s, c, &EmConfig::with_order(n, order))?;
            Ok((a, z))
        })
        .collect()
}

fn combine_shifts(
    chi: &DirichletCharacter,
    t: f64,
    shifts: &[(u64, ErrorBoundedComplex)],
) -> LPoint {
    let q = chi.modulus();
    let s = Complex64::new(1.0, t);
    let mut acc = ErrorBoundedComplex::zero();
    for &(a, z) in shifts {
        acc = acc.add(z.mul(chi.eval(a).to_ball()));
    }
    // q^{-s} has modulus exactly 1/q on the 1-line
    let (qs, rel) = power_neg(q as f64, s);
    let value = acc
        .scale_with_modulus(qs, 1.0 / q as f64)
        .widen(rel * acc.abs_upper() / q as f64);
    LPoint {
        q,
        chi: chi.clone(),
        t,
        value,
        method: Method::HurwitzDecomposition,
    }
}

/// Hurwitz-decomposition route at a caller-chosen total radius budget.
pub fn l_eval_hurwitz(chi: &DirichletCharacter, t: f64, target_radius: f64) -> Result<LPoint> {
    check_chi_t(chi, t)?;
    if !(target_radius > 0.0) {
        return Err(Error::Domain("target radius must be positive".into()));
    }
    let group = chi.structure();
    let phi = group.totient();
    let per_shift = target_radius / phi as f64;
    let shifts = hurwitz_shifts(group, Complex64::new(1.0, t), DEFAULT_EM_ORDER, per_shift)?;
    Ok(combine_shifts(chi, t, &shifts))
}

/// All non-principal characters mod q at once; the phi(q) Hurwitz shifts are
/// evaluated once and shared, since they do not depend on the character.
pub fn l_eval_hurwitz_all(
    group: &Arc<UnitGroupStructure>,
    t: f64,
    target_radius: f64,
) -> Result<Vec<LPoint>> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} not > 0")));
    }
    if !(target_radius > 0.0) {
        return Err(Error::Domain("target radius must be positive".into()));
    }
    let per_shift = target_radius / group.totient() as f64;
    let shifts = hurwitz_shifts(group, Complex64::new(1.0, t), DEFAULT_EM_ORDER, per_shift)?;
    Ok(enumerate_characters(group, false)
        .iter()
        .map(|chi| combine_shifts(chi, t, &shifts))
        .collect())
}

/// Partial-summation route: midpoint is the N-term Dirichlet series, radius
/// is `|A(N)|/N + q sqrt(1+t^2) / (2N)` plus accumulated rounding. The first
/// tail piece vanishes exactly when N is a multiple of q.
pub fn l_eval_partial_sum(chi: &DirichletCharacter, t: f64, n: u64) -> Result<LPoint> {
    check_chi_t(chi, t)?;
    if n < 1 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let q = chi.modulus();
    let s = Complex64::new(1.0, t);
    let (mut sum_re, mut comp_re) = (0.0f64, 0.0f64);
    let (mut sum_im, mut comp_im) = (0.0f64, 0.0f64);
    let mut rounding = 0.0f64;
    for i in 1..=n {
        let root = chi.eval(i);
        if root.is_zero() {
            continue;
        }
        let (p, rel) = power_neg(i as f64, s);
        let term = root.to_complex() * p;
        let mag = p.norm();
        rounding += (rel + RootOfUnity::CONVERSION_RADIUS + 3.0 * ROUNDING_INFLATION) * mag;
        let y = term.re - comp_re;
        let tt = sum_re + y;
        comp_re = (tt - sum_re) - y;
        sum_re = tt;
        let y = term.im - comp_im;
        let tt = sum_im + y;
        comp_im = (tt - sum_im) - y;
        sum_im = tt;
    }
    let mid = Complex64::new(sum_re, sum_im);
    let s_abs = (1.0 + t * t).sqrt() * (1.0 + 4.0 * f64::EPSILON);
    let nf = n as f64;
    let tail = chi.partial_sum_abs_upper(n)? / nf + q as f64 * s_abs / (2.0 * nf);
    let radius = tail + rounding + 2.0 * ROUNDING_INFLATION * mid.norm();
    Ok(LPoint {
        q,
        chi: chi.clone(),
        t,
        value: ErrorBoundedComplex::new(mid, radius),
        method: Method::PartialSummation,
    })
}

/// Compare two enclosures of the same point. Two rigorous enclosures of one
/// value must overlap; a gap means a bug in one of the radii.
pub fn cross_check(p1: &LPoint, p2: &LPoint) -> Result<Verdict> {
    if p1.q != p2.q || p1.chi != p2.chi || p1.t != p2.t {
        return Err(Error::MismatchedPoints(format!(
            "(q={}, chi={:?}, t={}) vs (q={}, chi={:?}, t={})",
            p1.q,
            p1.chi.exponents(),
            p1.t,
            p2.q,
            p2.chi.exponents(),
            p2.t
        )));
    }
    if !p1.value.radius.is_finite() || !p2.value.radius.is_finite() {
        return Ok(Verdict::Inconclusive);
    }
    if p1.value.overlaps(&p2.value) {
        Ok(Verdict::Consistent)
    } else {
        Ok(Verdict::Inconsistent)
    }
}
