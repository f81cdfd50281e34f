//! Sign changes of P(e^{iθ}) + εP(e^{−iθ}) on the standard interlacing
//! intervals.

use serde::{Deserialize, Serialize};

use crate::specialpoly::RealPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    /// ε = +1: Σ a_j cos jθ.
    Cosine,
    /// ε = −1: Σ a_j sin jθ.
    Sine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalCheck {
    pub lo: f64,
    pub hi: f64,
    /// Certain sign changes seen on the grid.
    pub sign_changes: usize,
    /// Grid points where the sign could not be decided.
    pub undecided: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigReport {
    pub kind: TrigKind,
    pub degree: usize,
    pub intervals: Vec<IntervalCheck>,
    /// The sine case always vanishes at θ = 0 (and θ = π).
    pub zero_at_origin: bool,
    /// Index of the first interval without exactly one sign change.
    pub failing: Option<usize>,
}

impl TrigReport {
    pub fn passed(&self) -> bool {
        self.failing.is_none()
    }

    /// Zero angles in (0, π) implied by the report: one per interval.
    pub fn interval_of(&self, theta: f64) -> Option<usize> {
        self.intervals.iter().position(|iv| iv.lo < theta && theta < iv.hi)
    }
}

fn eval(a: &[f64], rad: &[f64], kind: TrigKind, th: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut e = 0.0;
    for (j, (&c, &r)) in a.iter().zip(rad).enumerate() {
        let t = match kind {
            TrigKind::Cosine => (j as f64 * th).cos(),
            TrigKind::Sine => (j as f64 * th).sin(),
        };
        v += c * t;
        e += r + c.abs() * 8.0 * f64::EPSILON;
    }
    (v, e)
}

/// `grid` samples per interval.
#[allow(non_snake_case)]
pub fn trig_sign_changes(P: &RealPolynomial, eps: i8, grid: usize) -> TrigReport {
    let n = P.degree();
    let a = P.mids_f64();
    let rad: Vec<f64> = P.coeffs.iter().map(|c| c.rad_f64()).collect();
    let pi = std::f64::consts::PI;
    let den = (2 * n + 1) as f64;
    let (kind, bounds): (TrigKind, Vec<(f64, f64)>) = if eps > 0 {
        (
            TrigKind::Cosine,
            (1..=n).map(|j| ((2 * j - 1) as f64 * pi / den, (2 * j + 1) as f64 * pi / den)).collect(),
        )
    } else {
        (
            TrigKind::Sine,
            (1..n).map(|j| (2.0 * j as f64 * pi / den, 2.0 * (j + 1) as f64 * pi / den)).collect(),
        )
    };
    let grid = grid.max(2);
    let mut intervals = Vec::with_capacity(bounds.len());
    let mut failing = None;
    for (idx, &(lo, hi)) in bounds.iter().enumerate() {
        let mut last: Option<bool> = None;
        let mut changes = 0;
        let mut undecided = 0;
        for k in 0..=grid {
            let th = lo + (hi - lo) * k as f64 / grid as f64;
            let (v, e) = eval(&a, &rad, kind, th);
            if v.abs() <= e {
                undecided += 1;
                continue;
            }
            let s = v > 0.0;
            if let Some(l) = last {
                if l != s {
                    changes += 1;
                }
            }
            last = Some(s);
        }
        if changes != 1 && failing.is_none() {
            failing = Some(idx);
        }
        intervals.push(IntervalCheck {
            lo,
            hi,
            sign_changes: changes,
            undecided,
        });
    }
    TrigReport {
        kind,
        degree: n,
        intervals,
        zero_at_origin: kind == TrigKind::Sine,
        failing,
    }
}
