//! Machine certification that a residual function is negative on a region.
//!
//! The region is covered by adaptive bisection. On each cell, every additive
//! term of the residual is bounded above by its value at a cell corner; the
//! corner choice is justified by per-axis monotonicity, which is established
//! from the sign of the term's explicitly coded derivative sampled over the
//! cell, never assumed. All upper-bound arithmetic runs in upward-rounded
//! mode (8-ulp inflation per operation). Unbounded directions are closed by
//! tail records that take each term's supremum from its boundary value and
//! its coded limit.

use crate::bounds::{backlund_terms, partial_summation_terms, ResidualTerm};
use crate::{Error, Result};

const UPWARD_INFLATION: f64 = 8.0 * f64::EPSILON;

#[inline]
fn up(x: f64) -> f64 {
    x + UPWARD_INFLATION * x.abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualKind {
    Backlund { m: f64 },
    PartialSummation { m: f64, b: f64 },
}

impl ResidualKind {
    fn terms(&self) -> Vec<ResidualTerm> {
        match *self {
            ResidualKind::Backlund { m } => backlund_terms(m),
            ResidualKind::PartialSummation { m, b } => partial_summation_terms(m, b),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ResidualKind::Backlund { m } => format!("backlund m={m}"),
            ResidualKind::PartialSummation { m, b } => format!("partial-summation m={m} b={b}"),
        }
    }

    pub fn eval(&self, q: f64, t: f64) -> Result<f64> {
        match *self {
            ResidualKind::Backlund { m } => crate::bounds::backlund_residual(t, m),
            ResidualKind::PartialSummation { m, b } => {
                crate::bounds::partial_summation_residual(q, t, m, b)
            }
        }
    }
}

/// A rectangle in (q, t) space; 1-D residuals carry no q interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub q: Option<(f64, f64)>,
    pub t: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSpec {
    pub kind: ResidualKind,
    pub region: Region,
}

impl ResidualSpec {
    /// Validate that the region sits inside the residual's domain (the
    /// singular denominators stay positive on its closure).
    pub fn validate(&self) -> Result<()> {
        let (t_lo, t_hi) = self.region.t;
        if !(t_lo < t_hi) || !t_lo.is_finite() || !t_hi.is_finite() {
            return Err(Error::Domain(format!("bad t interval [{t_lo}, {t_hi}]")));
        }
        match self.kind {
            ResidualKind::Backlund { m } => {
                if self.region.q.is_some() {
                    return Err(Error::Domain("backlund residual has no q axis".into()));
                }
                if !(t_lo > m) {
                    return Err(Error::Domain(format!("backlund needs t_min > m = {m}")));
                }
            }
            ResidualKind::PartialSummation { m, b } => {
                let (q_lo, q_hi) = self
                    .region
                    .q
                    .ok_or_else(|| Error::Domain("partial-summation residual needs a q interval".into()))?;
                if !(q_lo < q_hi) || !(q_lo > 0.0) {
                    return Err(Error::Domain(format!("bad q interval [{q_lo}, {q_hi}]")));
                }
                if !(t_lo >= 0.0) {
                    return Err(Error::Domain("t_min must be >= 0".into()));
                }
                // denominator at the worst (smallest) corner
                if !(2.0 * q_lo * (t_lo + b) > 2.0 * m) {
                    return Err(Error::Domain(format!(
                        "region touches the singular set: 2q(t+b) <= 2m at q={q_lo}, t={t_lo}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertStatus {
    Certified,
    Failed,
    EvidenceOnly,
}

/// One certified cell: region bounds plus the strictly negative upper bound
/// established on it.
#[derive(Debug, Clone, Copy)]
pub struct CertifiedCell {
    pub q: Option<(f64, f64)>,
    pub t: (f64, f64),
    pub upper: f64,
}

/// Tail record: a supremum bound valid on an unbounded direction.
#[derive(Debug, Clone)]
pub struct TailRecord {
    pub description: String,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct ResidualCertificate {
    pub spec: ResidualSpec,
    pub cells: Vec<CertifiedCell>,
    pub tails: Vec<TailRecord>,
    pub status: CertStatus,
    /// Offending cell when status is Failed (upper bound that stayed >= 0 at
    /// minimum width).
    pub failure: Option<CertifiedCell>,
}

impl ResidualCertificate {
    /// Largest certified upper bound, i.e. the slimmest margin across cells
    /// and tails (negative iff certified).
    pub fn min_margin(&self) -> Option<f64> {
        self.cells
            .iter()
            .map(|c| c.upper)
            .chain(self.tails.iter().map(|t| t.bound))
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
    }

    /// Structured text serialization; one record per cell so third parties
    /// can re-check each upper bound independently.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("certificate: residual-negativity\n");
        out.push_str(&format!("residual: {}\n", self.spec.kind.label()));
        if let Some((ql, qh)) = self.spec.region.q {
            out.push_str(&format!("region-q: [{:e}, {:e}]\n", ql, qh));
        }
        out.push_str(&format!(
            "region-t: [{:e}, {:e}]\n",
            self.spec.region.t.0, self.spec.region.t.1
        ));
        out.push_str("rounding: upward (8-ulp inflation per operation)\n");
        let status = match self.status {
            CertStatus::Certified => "certified",
            CertStatus::Failed => "failed",
            CertStatus::EvidenceOnly => "evidence-only",
        };
        out.push_str(&format!("status: {status}\n"));
        if let Some(m) = self.min_margin() {
            out.push_str(&format!("min-margin: {:e}\n", m));
        }
        out.push_str(&format!("cells: {}\n", self.cells.len()));
        for c in &self.cells {
            match c.q {
                Some((ql, qh)) => out.push_str(&format!(
                    "cell: q=[{:e},{:e}] t=[{:e},{:e}] upper={:e}\n",
                    ql, qh, c.t.0, c.t.1, c.upper
                )),
                None => out.push_str(&format!(
                    "cell: t=[{:e},{:e}] upper={:e}\n",
                    c.t.0, c.t.1, c.upper
                )),
            }
        }
        for t in &self.tails {
            out.push_str(&format!("tail: {} bound={:e}\n", t.description, t.bound));
        }
        if let Some(f) = &self.failure {
            match f.q {
                Some((ql, qh)) => out.push_str(&format!(
                    "failure: q=[{:e},{:e}] t=[{:e},{:e}] upper={:e}\n",
                    ql, qh, f.t.0, f.t.1, f.upper
                )),
                None => out.push_str(&format!(
                    "failure: t=[{:e},{:e}] upper={:e}\n",
                    f.t.0, f.t.1, f.upper
                )),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    q: Option<(f64, f64)>,
    t: (f64, f64),
}

/// Monotone-model upper bound for one term on a cell: the maximum of the
/// term over the cell corners, valid when the term is monotone along each
/// axis for each fixed value of the other. Returns `None` when the sampled
/// derivative signs contradict that model.
fn term_cell_upper(term: &ResidualTerm, cell: &Cell) -> Option<f64> {
    let (t_lo, t_hi) = cell.t;
    let t_samples = [t_lo, 0.5 * (t_lo + t_hi), t_hi];
    let q_samples: Vec<f64> = match cell.q {
        Some((q_lo, q_hi)) => vec![q_lo, 0.5 * (q_lo + q_hi), q_hi],
        None => vec![f64::NAN],
    };
    // along t, for each fixed q, the derivative must not change strict sign
    for &q in &q_samples {
        let signs: Vec<f64> = t_samples.iter().map(|&t| (term.dt)(q, t)).collect();
        if signs.iter().any(|&d| d > 0.0) && signs.iter().any(|&d| d < 0.0) {
            return None;
        }
    }
    // along q, for each fixed t
    if cell.q.is_some() {
        for &t in &t_samples {
            let signs: Vec<f64> = q_samples.iter().map(|&q| (term.dq)(q, t)).collect();
            if signs.iter().any(|&d| d > 0.0) && signs.iter().any(|&d| d < 0.0) {
                return None;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    for &q in match cell.q {
        Some(_) => &q_samples[0..3],
        None => &q_samples[0..1],
    } {
        for &t in &[t_lo, t_hi] {
            // corners only; midpoints of q_samples are harmless extras
            best = best.max(up((term.value)(q, t)));
        }
    }
    Some(best)
}

fn cell_upper(terms: &[ResidualTerm], cell: &Cell) -> Option<f64> {
    let mut acc = 0.0;
    for term in terms {
        acc = up(acc + term_cell_upper(term, cell)?);
    }
    Some(acc)
}

/// Dense-grid negativity sampling, used only when monotonicity is
/// inconclusive; yields evidence, not a certificate.
fn cell_sample_negative(kind: &ResidualKind, cell: &Cell) -> bool {
    let n = 16;
    for i in 0..=n {
        let t = cell.t.0 + (cell.t.1 - cell.t.0) * i as f64 / n as f64;
        match cell.q {
            Some((ql, qh)) => {
                for j in 0..=n {
                    let q = ql + (qh - ql) * j as f64 / n as f64;
                    if kind.eval(q, t.max(1e-300)).map_or(true, |v| v >= 0.0) {
                        return false;
                    }
                }
            }
            None => {
                if kind.eval(f64::NAN, t).map_or(true, |v| v >= 0.0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Tail supremum for the direction(s) beyond the region: per term, the max of
/// its boundary values and coded limits (covers either monotone direction on
/// the tail), summed upward.
fn tail_bound(terms: &[ResidualTerm], candidates: &[(f64, f64)], limits: &[f64]) -> f64
where
{
    let mut acc = 0.0;
    for (i, term) in terms.iter().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for &(q, t) in candidates {
            best = best.max(up((term.value)(q, t)));
        }
        let lim = limits[i];
        if lim.is_finite() {
            best = best.max(up(lim));
        }
        acc = up(acc + best);
    }
    acc
}

/// Certify that the residual named by `spec` is strictly negative on its
/// region, with tail records beyond the region's upper limits. Splitting
/// stops when a cell's width drops below `subdivision_tolerance` in every
/// axis; a nonnegative upper bound at minimum width fails the certificate.
pub fn certify_residual_negative(
    spec: &ResidualSpec,
    subdivision_tolerance: f64,
) -> Result<ResidualCertificate> {
    spec.validate()?;
    if !(subdivision_tolerance > 0.0) {
        return Err(Error::Domain("subdivision tolerance must be positive".into()));
    }
    let terms = spec.kind.terms();
    let mut cells: Vec<CertifiedCell> = Vec::new();
    let mut tails: Vec<TailRecord> = Vec::new();
    let mut status = CertStatus::Certified;
    let mut failure = None;

    let mut stack = vec![Cell {
        q: spec.region.q,
        t: spec.region.t,
    }];
    while let Some(cell) = stack.pop() {
        let upper = cell_upper(&terms, &cell);
        match upper {
            Some(u) if u < 0.0 => {
                cells.push(CertifiedCell {
                    q: cell.q,
                    t: cell.t,
                    upper: u,
                });
                continue;
            }
            _ => {}
        }
        let t_width = cell.t.1 - cell.t.0;
        let q_width = cell.q.map_or(0.0, |(lo, hi)| hi - lo);
        if t_width <= subdivision_tolerance && q_width <= subdivision_tolerance {
            match upper {
                Some(u) => {
                    // minimum width, still nonnegative: a genuine failure
                    status = CertStatus::Failed;
                    failure = Some(CertifiedCell {
                        q: cell.q,
                        t: cell.t,
                        upper: u,
                    });
                    break;
                }
                None => {
                    // monotonicity inconclusive at minimum width: fall back
                    // to grid sampling, downgrading the certificate
                    if cell_sample_negative(&spec.kind, &cell) {
                        status = CertStatus::EvidenceOnly;
                        cells.push(CertifiedCell {
                            q: cell.q,
                            t: cell.t,
                            upper: f64::NAN,
                        });
                    } else {
                        status = CertStatus::Failed;
                        failure = Some(CertifiedCell {
                            q: cell.q,
                            t: cell.t,
                            upper: f64::NAN,
                        });
                        break;
                    }
                }
            }
            continue;
        }
        // split the wider axis
        if q_width > t_width {
            let (lo, hi) = cell.q.unwrap();
            let mid = 0.5 * (lo + hi);
            stack.push(Cell {
                q: Some((lo, mid)),
                t: cell.t,
            });
            stack.push(Cell {
                q: Some((mid, hi)),
                t: cell.t,
            });
        } else {
            let mid = 0.5 * (cell.t.0 + cell.t.1);
            stack.push(Cell {
                q: cell.q,
                t: (cell.t.0, mid),
            });
            stack.push(Cell {
                q: cell.q,
                t: (mid, cell.t.1),
            });
        }
    }

    // tail records for the unbounded directions
    if status != CertStatus::Failed {
        let (t_lo, t_hi) = spec.region.t;
        let limits_t: Vec<f64> = match spec.region.q {
            Some((q_lo, q_hi)) => terms
                .iter()
                .map(|term| (term.limit_t)(q_lo).max((term.limit_t)(q_hi)))
                .collect(),
            None => terms.iter().map(|term| (term.limit_t)(f64::NAN)).collect(),
        };
        let t_tail_corners: Vec<(f64, f64)> = match spec.region.q {
            Some((q_lo, q_hi)) => vec![(q_lo, t_hi), (q_hi, t_hi)],
            None => vec![(f64::NAN, t_hi)],
        };
        let bt = tail_bound(&terms, &t_tail_corners, &limits_t);
        tails.push(TailRecord {
            description: format!("t > {:e}", t_hi),
            bound: bt,
        });
        if bt >= 0.0 {
            status = CertStatus::Failed;
        }

        if let Some((_, q_hi)) = spec.region.q {
            let limits_q: Vec<f64> = terms
                .iter()
                .map(|term| (term.limit_q)(t_lo).max((term.limit_q)(t_hi)))
                .collect();
            let bq = tail_bound(
                &terms,
                &[(q_hi, t_lo), (q_hi, t_hi)],
                &limits_q,
            );
            tails.push(TailRecord {
                description: format!("q > {:e}, t in [{:e}, {:e}]", q_hi, t_lo, t_hi),
                bound: bq,
            });
            if bq >= 0.0 {
                status = CertStatus::Failed;
            }
            // joint tail: beyond both limits
            let limits_joint: Vec<f64> = terms
                .iter()
                .enumerate()
                .map(|(i, term)| limits_t[i].max((term.limit_q)(t_hi)))
                .collect();
            let bj = tail_bound(&terms, &[(q_hi, t_hi)], &limits_joint);
            tails.push(TailRecord {
                description: format!("q > {:e}, t > {:e}", q_hi, t_hi),
                bound: bj,
            });
            if bj >= 0.0 {
                status = CertStatus::Failed;
            }
        }
    }

    Ok(ResidualCertificate {
        spec: spec.clone(),
        cells,
        tails,
        status,
        failure,
    })
}
