//! Verification sweeps: evaluate `|L(1+it, chi)|` over a (q, chi, t) grid,
//! compare against the closed-form bounds, and persist a deterministic CSV
//! report. Grid points are evaluated by a rayon pool of configurable size;
//! rows are sorted before writing so the output is byte-identical for any
//! worker count.

use crate::bounds;
use crate::characters::{build_unit_group, enumerate_characters};
use crate::lfun::{self, LPoint, Method};
use crate::{Error, Result};
use rayon::prelude::*;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy)]
pub struct TGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl TGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| match self.spacing {
                Spacing::Linear => self.start + (self.stop - self.start) * i as f64 / n,
                Spacing::Log => {
                    (self.start.ln() + (self.stop.ln() - self.start.ln()) * i as f64 / n).exp()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluatorChoice {
    Hurwitz,
    PartialSum,
    Both,
}

impl EvaluatorChoice {
    fn methods(&self) -> &'static [Method] {
        match self {
            EvaluatorChoice::Hurwitz => &[Method::HurwitzDecomposition],
            EvaluatorChoice::PartialSum => &[Method::PartialSummation],
            EvaluatorChoice::Both => &[Method::HurwitzDecomposition, Method::PartialSummation],
        }
    }
}

/// Which closed-form bounds a sweep checks. `Lemma` is the bound on |L|
/// implied directly by the Hurwitz-zeta lemma for t > 50:
/// `(phi(q)/q) log t + sum_{(a,q)=1} 1/a` (slightly sharper than theorem 1,
/// which relaxes the coprime sum to `log q + gamma`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundKind {
    Theorem1,
    Theorem2,
    Corollary,
    Lemma,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Theorem1 => "theorem1",
            BoundKind::Theorem2 => "theorem2",
            BoundKind::Corollary => "corollary",
            BoundKind::Lemma => "lemma",
        }
    }

    fn applicable(&self, t: f64) -> bool {
        match self {
            BoundKind::Theorem1 | BoundKind::Lemma => t > 50.0,
            BoundKind::Theorem2 | BoundKind::Corollary => t > 0.0,
        }
    }

    fn value(&self, q: u64, t: f64) -> Result<f64> {
        match self {
            BoundKind::Theorem1 => bounds::theorem1_bound(q, t),
            BoundKind::Theorem2 => bounds::theorem2_bound(q, t),
            BoundKind::Corollary => bounds::corollary_bound(q, t),
            BoundKind::Lemma => {
                let phi = crate::characters::totient(q) as f64;
                let (sum, _) = bounds::coprime_reciprocal_sum(q)?;
                Ok(phi / q as f64 * t.ln() + sum)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub q_min: u64,
    pub q_max: u64,
    pub t_grid: TGrid,
    pub target_radius: f64,
    pub evaluator: EvaluatorChoice,
    pub bounds_checked: Vec<BoundKind>,
    pub output_path: Option<PathBuf>,
    pub parallelism: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_min < 3 {
            return Err(Error::Config(format!("q_min = {} must be >= 3", self.q_min)));
        }
        if self.q_max < self.q_min {
            return Err(Error::Config("q_max < q_min".into()));
        }
        if !(self.t_grid.start > 0.0) {
            return Err(Error::Config("t grid must start above 0".into()));
        }
        if self.t_grid.stop < self.t_grid.start || self.t_grid.count == 0 {
            return Err(Error::Config("bad t grid".into()));
        }
        if !(self.target_radius > 0.0) {
            return Err(Error::Config("target_radius must be positive".into()));
        }
        if self.bounds_checked.is_empty() {
            return Err(Error::Config("no bounds selected".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be >= 1".into()));
        }
        Ok(())
    }

    /// Parse the flat `key = value` config document (UTF-8, '#' comments).
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig {
            q_min: 3,
            q_max: 10,
            t_grid: TGrid {
                start: 1e-3,
                stop: 1e3,
                count: 40,
                spacing: Spacing::Log,
            },
            target_radius: 1e-6,
            evaluator: EvaluatorChoice::Hurwitz,
            bounds_checked: vec![BoundKind::Theorem1, BoundKind::Theorem2, BoundKind::Corollary],
            output_path: None,
            parallelism: 1,
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {}: bad {what}: {value}", lineno + 1));
            match key {
                "q_min" => cfg.q_min = value.parse().map_err(|_| bad("q_min"))?,
                "q_max" => cfg.q_max = value.parse().map_err(|_| bad("q_max"))?,
                "t_start" => cfg.t_grid.start = value.parse().map_err(|_| bad("t_start"))?,
                "t_stop" => cfg.t_grid.stop = value.parse().map_err(|_| bad("t_stop"))?,
                "t_count" => cfg.t_grid.count = value.parse().map_err(|_| bad("t_count"))?,
                "t_spacing" => {
                    cfg.t_grid.spacing = match value {
                        "linear" => Spacing::Linear,
                        "log" => Spacing::Log,
                        _ => return Err(bad("t_spacing")),
                    }
                }
                "target_radius" => {
                    cfg.target_radius = value.parse().map_err(|_| bad("target_radius"))?
                }
                "evaluator" => {
                    cfg.evaluator = match value {
                        "hurwitz" => EvaluatorChoice::Hurwitz,
                        "partial_sum" | "psum" => EvaluatorChoice::PartialSum,
                        "both" => EvaluatorChoice::Both,
                        _ => return Err(bad("evaluator")),
                    }
                }
                "bounds" => {
                    let mut kinds = Vec::new();
                    for piece in value.split(',') {
                        kinds.push(match piece.trim() {
                            "theorem1" => BoundKind::Theorem1,
                            "theorem2" => BoundKind::Theorem2,
                            "corollary" => BoundKind::Corollary,
                            "lemma" => BoundKind::Lemma,
                            _ => return Err(bad("bounds")),
                        });
                    }
                    cfg.bounds_checked = kinds;
                }
                "output_path" => cfg.output_path = Some(PathBuf::from(value)),
                "parallelism" => cfg.parallelism = value.parse().map_err(|_| bad("parallelism"))?,
                _ => return Err(Error::Config(format!("line {}: unknown key {key}", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowVerdict {
    Pass,
    Fail,
    Inconclusive,
}

impl RowVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowVerdict::Pass => "PASS",
            RowVerdict::Fail => "FAIL",
            RowVerdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// One verification outcome: a (q, chi, t, method) evaluation against one
/// bound.
#[derive(Debug, Clone)]
pub struct BoundReportRow {
    pub q: u64,
    pub chi_index: u64,
    pub chi_exponents: String,
    pub t: f64,
    pub method: Method,
    pub l_abs_mid: f64,
    pub l_abs_radius: f64,
    pub bound: BoundKind,
    pub bound_value: f64,
    pub margin: f64,
    pub verdict: RowVerdict,
}

#[derive(Debug, Clone, Default)]
pub struct SweepSummary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub min_margin: f64,
    pub min_margin_at: String,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<BoundReportRow>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else if self.summary.inconclusive > 0 {
            2
        } else {
            0
        }
    }
}

fn exponents_label(exps: &[u64]) -> String {
    exps.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Fixed 17-significant-digit formatting shared by every CSV field.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.16e}", x)
    }
}

fn rows_for_point(cfg: &SweepConfig, point: &LPoint) -> Vec<BoundReportRow> {
    let mut out = Vec::new();
    for &bound in &cfg.bounds_checked {
        if !bound.applicable(point.t) {
            continue;
        }
        let bound_value = match bound.value(point.q, point.t) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let upper = point.value.abs_upper();
        let lower = point.value.abs_lower();
        let verdict = if upper < bound_value {
            RowVerdict::Pass
        } else if lower > bound_value {
            RowVerdict::Fail
        } else {
            RowVerdict::Inconclusive
        };
        out.push(BoundReportRow {
            q: point.q,
            chi_index: point.chi.index(),
            chi_exponents: exponents_label(point.chi.exponents()),
            t: point.t,
            method: point.method,
            l_abs_mid: point.value.mid.norm(),
            l_abs_radius: point.value.radius,
            bound,
            bound_value,
            margin: bound_value - upper,
            verdict,
        });
    }
    out
}

/// Inconclusive placeholder rows for a grid point whose evaluation failed
/// (e.g. unreachable target radius).
fn rows_for_failure(cfg: &SweepConfig, q: u64, chi_index: u64, exps: &[u64], t: f64, method: Method) -> Vec<BoundReportRow> {
    cfg.bounds_checked
        .iter()
        .filter(|b| b.applicable(t))
        .filter_map(|&bound| {
            let bound_value = bound.value(q, t).ok()?;
            Some(BoundReportRow {
                q,
                chi_index,
                chi_exponents: exponents_label(exps),
                t,
                method,
                l_abs_mid: f64::NAN,
                l_abs_radius: f64::INFINITY,
                bound,
                bound_value,
                margin: f64::NAN,
                verdict: RowVerdict::Inconclusive,
            })
        })
        .collect()
}

/// Partial-summation truncation for a target radius: the tail is below
/// `q (1 + |s|) / (2N)`, rounded up to a multiple of q (so the `|A(N)|/N`
/// piece vanishes exactly), capped so sweeps stay finite.
pub fn psum_truncation(q: u64, t: f64, target: f64) -> u64 {
    const CAP: u64 = 10_000_000;
    let s_abs = (1.0 + t * t).sqrt();
    let n = (q as f64 * (1.0 + s_abs) / (2.0 * target)).ceil() as u64;
    let n = n.clamp(q, CAP);
    n.div_ceil(q) * q
}

fn sweep_point(cfg: &SweepConfig, q: u64, t: f64) -> Vec<BoundReportRow> {
    let group = build_unit_group(q);
    let chars = enumerate_characters(&group, false);
    let mut rows = Vec::new();
    for &method in cfg.evaluator.methods() {
        match method {
            Method::HurwitzDecomposition => match lfun::l_eval_hurwitz_all(&group, t, cfg.target_radius) {
                Ok(points) => {
                    for p in &points {
                        rows.extend(rows_for_point(cfg, p));
                    }
                }
                Err(_) => {
                    for chi in &chars {
                        rows.extend(rows_for_failure(cfg, q, chi.index(), chi.exponents(), t, method));
                    }
                }
            },
            Method::PartialSummation => {
                let n = psum_truncation(q, t, cfg.target_radius);
                for chi in &chars {
                    match lfun::l_eval_partial_sum(chi, t, n) {
                        Ok(p) => rows.extend(rows_for_point(cfg, &p)),
                        Err(_) => rows.extend(rows_for_failure(
                            cfg,
                            q,
                            chi.index(),
                            chi.exponents(),
                            t,
                            method,
                        )),
                    }
                }
            }
        }
    }
    rows
}

/// Run the sweep: one row per (q, non-principal chi, t, method, applicable
/// bound), sorted canonically, with PASS/FAIL/INCONCLUSIVE tallies and the
/// slimmest margin.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let ts = cfg.t_grid.points();
    let tasks: Vec<(u64, f64)> = (cfg.q_min..=cfg.q_max)
        .flat_map(|q| ts.iter().map(move |&t| (q, t)))
        .collect();
    let mut rows: Vec<BoundReportRow> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(q, t)| sweep_point(cfg, q, t))
            .reduce(Vec::new, |mut a, b| {
                a.extend(b);
                a
            })
    });
    rows.sort_by(|a, b| {
        (a.q, a.chi_index)
            .cmp(&(b.q, b.chi_index))
            .then(a.t.total_cmp(&b.t))
            .then(a.method.as_str().cmp(b.method.as_str()))
            .then(a.bound.cmp(&b.bound))
    });

    let mut summary = SweepSummary {
        min_margin: f64::INFINITY,
        ..Default::default()
    };
    for row in &rows {
        match row.verdict {
            RowVerdict::Pass => summary.pass += 1,
            RowVerdict::Fail => summary.fail += 1,
            RowVerdict::Inconclusive => summary.inconclusive += 1,
        }
        if row.margin < summary.min_margin {
            summary.min_margin = row.margin;
            summary.min_margin_at = format!(
                "q={} chi={} t={} method={} bound={}",
                row.q,
                row.chi_exponents,
                row.t,
                row.method.as_str(),
                row.bound.name()
            );
        }
    }
    Ok(SweepReport { rows, summary })
}

pub fn csv_string(report: &SweepReport) -> String {
    let mut out = String::from(
        "q,chi_exponents,t,method,l_abs_mid,l_abs_radius,bound_name,bound_value,margin,verdict\n",
    );
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.q,
            r.chi_exponents,
            fmt_float(r.t),
            r.method.as_str(),
            fmt_float(r.l_abs_mid),
            fmt_float(r.l_abs_radius),
            r.bound.name(),
            fmt_float(r.bound_value),
            fmt_float(r.margin),
            r.verdict.as_str()
        ));
    }
    out
}

pub fn write_csv(report: &SweepReport, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(csv_string(report).as_bytes())?;
    Ok(())
}

/// Identity / regression checks over small moduli: multiplication theorem,
/// half-shift identity, orthogonality, and cross-evaluator agreement.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn run_identities(q_max: u64) -> Result<Vec<IdentityCheck>> {
    use crate::hurwitz::hurwitz_zeta_auto;
    use num_complex::Complex64;
    if q_max < 2 {
        return Err(Error::Config("q_max must be >= 2".into()));
    }
    let mut checks = Vec::new();
    let s_list = [
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(1.0, 30.0),
    ];

    // multiplication theorem: sum_a zeta(s, a/q) = q^s zeta(s)
    for q in [2u64, 3, 5, 7].iter().filter(|&&q| q <= q_max) {
        for &s in &s_list {
            let mut lhs = crate::ball::ErrorBoundedComplex::zero();
            for a in 1..=*q {
                lhs = lhs.add(hurwitz_zeta_auto(s, a as f64 / *q as f64, 3, 1e-9)?);
            }
            let z1 = hurwitz_zeta_auto(s, 1.0, 3, 1e-9)?;
            let qs = (s * (*q as f64).ln()).exp();
            let rhs = z1.scale(qs).widen(1e-11 * qs.norm());
            let ok = lhs.overlaps(&rhs);
            checks.push(IdentityCheck {
                name: format!("multiplication q={q} s={s}"),
                passed: ok,
                detail: format!("lhs={lhs} rhs={rhs}"),
            });
        }
    }

    // half-shift identity: zeta(s, 1/2) = (2^s - 1) zeta(s)
    for &s in &s_list {
        let lhs = hurwitz_zeta_auto(s, 0.5, 3, 1e-9)?;
        let z1 = hurwitz_zeta_auto(s, 1.0, 3, 1e-9)?;
        let factor = (s * std::f64::consts::LN_2).exp() - 1.0;
        let rhs = z1.scale(factor).widen(1e-11 * (factor.norm() + 1.0));
        checks.push(IdentityCheck {
            name: format!("half-shift s={s}"),
            passed: lhs.overlaps(&rhs),
            detail: format!("lhs={lhs} rhs={rhs}"),
        });
    }

    // orthogonality of every non-principal character
    for q in 3..=q_max {
        let mut worst = 0.0f64;
        for chi in crate::characters::enumerate_characters_mod(q, false) {
            let sum: Complex64 = (1..=q).map(|a| chi.eval(a).to_complex()).sum();
            worst = worst.max(sum.norm());
        }
        checks.push(IdentityCheck {
            name: format!("orthogonality q={q}"),
            passed: worst < 1e-12,
            detail: format!("max |sum| = {worst:e}"),
        });
    }

    // cross-evaluator agreement on small moduli
    for q in 3..=q_max.min(12) {
        let group = build_unit_group(q);
        for &t in &[0.5, 5.0, 55.0] {
            let hs = lfun::l_eval_hurwitz_all(&group, t, 1e-8)?;
            for h in &hs {
                let n = psum_truncation(q, t, 1e-4);
                let p = lfun::l_eval_partial_sum(&h.chi, t, n)?;
                let verdict = lfun::cross_check(h, &p)?;
                checks.push(IdentityCheck {
                    name: format!("cross-evaluator q={q} chi={} t={t}", exponents_label(h.chi.exponents())),
                    passed: verdict == lfun::Verdict::Consistent,
                    detail: format!("hurwitz={} psum={}", h.value, p.value),
                });
            }
        }
    }

    Ok(checks)
}
