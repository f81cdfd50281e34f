//! Zeros of F_{d,N} inside circles |z| = r by argument tracking.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialpoly::approximant::{eval_f_f64, ApproximantSeries};

const INITIAL_POINTS: usize = 1024;
const MAX_DEPTH: u32 = 48;
/// Relative width of the annulus checked around the contour.
const CERT_DELTA: f64 = 1e-9;
const RETRY_ETA: [f64; 3] = [1e-6, 1e-5, 1e-4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscCount {
    pub d: u32,
    pub conductor: u64,
    pub count: usize,
    pub radius: f64,
    pub certified: bool,
}

fn value(series: &ApproximantSeries, r: f64, theta: f64) -> Result<Option<Complex64>> {
    let (v, err) = eval_f_f64(series, Complex64::from_polar(r, theta))?;
    Ok((v.norm() > 2.0 * err).then_some(v))
}

fn segment(
    series: &ApproximantSeries,
    r: f64,
    (a, fa): (f64, Complex64),
    (b, fb): (f64, Complex64),
    depth: u32,
) -> Result<Option<f64>> {
    let step = (fb / fa).arg();
    if step.abs() < std::f64::consts::FRAC_PI_2 {
        return Ok(Some(step));
    }
    if depth >= MAX_DEPTH {
        return Ok(None);
    }
    let mid = 0.5 * (a + b);
    let Some(fm) = value(series, r, mid)? else {
        return Ok(None);
    };
    let Some(left) = segment(series, r, (a, fa), (mid, fm), depth + 1)? else {
        return Ok(None);
    };
    let Some(right) = segment(series, r, (mid, fm), (b, fb), depth + 1)? else {
        return Ok(None);
    };
    Ok(Some(left + right))
}

/// Winding number of F around |z| = r, or `None` when the contour passes
/// too close to a zero to track the phase.
pub fn winding_number(series: &ApproximantSeries, r: f64) -> Result<Option<i64>> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut pts = Vec::with_capacity(INITIAL_POINTS + 1);
    for k in 0..=INITIAL_POINTS {
        let th = two_pi * k as f64 / INITIAL_POINTS as f64;
        let Some(v) = value(series, r, th)? else {
            return Ok(None);
        };
        pts.push((th, v));
    }
    let mut total = 0.0;
    for w in pts.windows(2) {
        match segment(series, r, w[0], w[1], 0)? {
            Some(s) => total += s,
            None => return Ok(None),
        }
    }
    let turns = total / two_pi;
    let n = turns.round();
    if (turns - n).abs() > 0.1 / two_pi || n < 0.0 {
        return Ok(None);
    }
    Ok(Some(n as i64))
}

/// Count at r, certified when the counts at r(1 ± δ) agree.
fn certified_count(series: &ApproximantSeries, r: f64) -> Result<Option<usize>> {
    let Some(c) = winding_number(series, r)? else {
        return Ok(None);
    };
    let lo = winding_number(series, r * (1.0 - CERT_DELTA))?;
    let hi = winding_number(series, r * (1.0 + CERT_DELTA))?;
    Ok((lo == Some(c) && hi == Some(c)).then_some(c as usize))
}

/// c_{d,N}(r), the number of zeros of F_{d,N} in |z| < r.
pub fn count_disc_zeros(series: &ApproximantSeries, r: f64) -> Result<DiscCount> {
    if !(0.5..=2.0).contains(&r) {
        return Err(Error::InvalidData(format!("radius {r} outside [0.5, 2]")));
    }
    let need = r * (1.0 + 2.0 * RETRY_ETA[2]);
    let s = if series.radius >= need {
        series.clone()
    } else {
        ApproximantSeries::new(series.d, series.conductor, need, series.tail.max(1e-30))?
    };
    let mk = |count, radius| DiscCount {
        d: s.d,
        conductor: s.conductor,
        count,
        radius,
        certified: true,
    };
    if let Some(c) = certified_count(&s, r)? {
        return Ok(mk(c, r));
    }
    for eta in RETRY_ETA {
        for rr in [r * (1.0 + eta), r * (1.0 - eta)] {
            if let Some(c) = certified_count(&s, rr)? {
                return Ok(mk(c, rr));
            }
        }
    }
    Err(Error::CannotCertify(format!(
        "F_{{{},{}}} has a zero too close to |z| = {r}",
        s.d, s.conductor
    )))
}

/// c_{d,N} over 1 ≤ N ≤ n_max as runs: `runs[i] = (first N, count)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscTable {
    pub d: u32,
    pub radius: f64,
    pub n_max: u64,
    pub runs: Vec<(u64, usize)>,
}

impl DiscTable {
    /// The N at which the count changes.
    pub fn transitions(&self) -> Vec<u64> {
        self.runs.iter().skip(1).map(|r| r.0).collect()
    }

    pub fn count_at(&self, n: u64) -> Option<usize> {
        self.runs.iter().rev().find(|r| r.0 <= n).map(|r| r.1)
    }
}

fn count_at(d: u32, n: u64, r: f64) -> Result<usize> {
    let s = ApproximantSeries::new(d, n, r * 1.001, 1e-14)?;
    Ok(count_disc_zeros(&s, r)?.count)
}

/// Uses that the zeros of F_{d,N} scale like √N, so the count does not
/// increase with N; transitions are located by bisection.
pub fn disc_transitions(d: u32, n_max: u64, r: f64) -> Result<DiscTable> {
    let mut runs = vec![(1u64, count_at(d, 1, r)?)];
    let mut lo = 1u64;
    loop {
        let cur = runs.last().expect("nonempty").1;
        if cur == 0 || lo >= n_max {
            break;
        }
        // galloping search for some N with a smaller count
        let mut step = 1u64;
        let mut hi = lo;
        let mut found = None;
        while hi < n_max {
            hi = (lo + step).min(n_max);
            let c = count_at(d, hi, r)?;
            if c < cur {
                found = Some(hi);
                break;
            }
            lo = hi;
            step *= 2;
        }
        let Some(mut hi) = found else { break };
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if count_at(d, mid, r)? < cur {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        runs.push((hi, count_at(d, hi, r)?));
        lo = hi;
    }
    Ok(DiscTable {
        d,
        radius: r,
        n_max,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_has_no_zeros() {
        for n in [1u64, 5, 100, 10_000] {
            let s = ApproximantSeries::new(2, n, 1.01, 1e-14).unwrap();
            let c = count_disc_zeros(&s, 1.0).unwrap();
            assert_eq!(c.count, 0);
            assert!(c.certified);
        }
    }

    #[test]
    fn bessel_edge() {
        let c = |n| count_disc_zeros(&ApproximantSeries::new(4, n, 1.01, 1e-14).unwrap(), 1.0).unwrap().count;
        assert_eq!(c(745), 1);
        assert_eq!(c(746), 0);
        assert_eq!(c(1), 4);
    }

    #[test]
    fn radius_precondition() {
        let s = ApproximantSeries::new(4, 10, 3.0, 1e-14).unwrap();
        assert!(count_disc_zeros(&s, 2.5).is_err());
    }
}
