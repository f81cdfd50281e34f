//! Unit-circle classification of roots and the star discrepancy of angles.

use serde::{Deserialize, Serialize};

use super::roots::RootBall;

/// Smallest annulus half-width |ln|z|| accepted as "on the circle".
pub const ON_CIRCLE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStatus {
    On,
    Off,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitCircleReport {
    pub roots: Vec<RootBall>,
    pub status: Vec<RootStatus>,
    pub moduli_deviation: Vec<f64>,
    /// Angles in [0, 2π) of the on-circle roots, sorted.
    pub angles: Vec<f64>,
    pub on_circle_count: usize,
    pub off_circle_count: usize,
    pub indeterminate_count: usize,
    /// Star discrepancy of the on-circle angles; `None` with no such roots.
    pub discrepancy: Option<f64>,
}

impl UnitCircleReport {
    pub fn all_on_circle(&self) -> bool {
        self.on_circle_count == self.roots.len()
    }
}

/// D* of points in [0, 1): max_i max(i/n − u_(i), u_(i) − (i−1)/n).
pub fn star_discrepancy(points: &[f64]) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    let mut u = points.to_vec();
    u.sort_by(|a, b| a.total_cmp(b));
    let n = u.len() as f64;
    let d = u
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    Some(d)
}

fn classify(r: &RootBall, tol_floor: f64) -> (RootStatus, f64) {
    let z = r.z();
    let m = z.norm();
    let dev = m.ln().abs();
    let rel = if m > 0.0 { r.radius / m } else { f64::INFINITY };
    let tol = tol_floor.max(rel);
    let st = if dev <= tol {
        RootStatus::On
    } else if dev - rel > tol {
        RootStatus::Off
    } else {
        RootStatus::Indeterminate
    };
    (st, dev)
}

pub fn circle_report(roots: &[RootBall]) -> UnitCircleReport {
    circle_report_with(roots, ON_CIRCLE_TOL)
}

pub fn circle_report_with(roots: &[RootBall], tol_floor: f64) -> UnitCircleReport {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut status = Vec::with_capacity(roots.len());
    let mut dev = Vec::with_capacity(roots.len());
    let mut angles = Vec::new();
    for r in roots {
        let (s, d) = classify(r, tol_floor);
        if s == RootStatus::On {
            angles.push(r.z().arg().rem_euclid(two_pi));
        }
        status.push(s);
        dev.push(d);
    }
    angles.sort_by(|a, b| a.total_cmp(b));
    let count = |k: RootStatus| status.iter().filter(|&&s| s == k).count();
    let unit: Vec<f64> = angles.iter().map(|a| a / two_pi).collect();
    UnitCircleReport {
        roots: roots.to_vec(),
        on_circle_count: count(RootStatus::On),
        off_circle_count: count(RootStatus::Off),
        indeterminate_count: count(RootStatus::Indeterminate),
        status,
        moduli_deviation: dev,
        discrepancy: star_discrepancy(&unit),
        angles,
    }
}
