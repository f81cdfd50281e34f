//! The series F_{d,N}(z) = Σ_j ((2π)^{d/2} z/√N)^j / (j!)^{d/2}, its
//! truncations, and the decomposition of Q(z) around z^m T(1/z).

use num_complex::Complex64;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::build::{build_Q_poly, l_ratios, t_coeff};
use super::RealPolynomial;
use crate::error::{Error, Result};
use crate::lfunc::{LFunctionData, SpecialValues};
use crate::mp::{self, Cplx};
use crate::special;

pub const MAX_TERMS: usize = 100_000;

/// F_{d,N} truncated after `terms` terms, valid on |z| ≤ radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximantSeries {
    pub d: u32,
    pub conductor: u64,
    pub radius: f64,
    pub terms: usize,
    /// Majorant of the discarded terms on |z| = radius.
    pub tail: f64,
}

fn ln_factorial(j: usize) -> f64 {
    special::ln_gamma_f64(Complex64::new(j as f64 + 1.0, 0.0)).re
}

impl ApproximantSeries {
    pub fn new(d: u32, conductor: u64, radius: f64, target: f64) -> Result<Self> {
        if d < 2 || d % 2 == 1 {
            return Err(Error::InvalidData(format!("degree {d} must be even and positive")));
        }
        if conductor == 0 {
            return Err(Error::InvalidData("conductor must be positive".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() || !(target > 0.0) {
            return Err(Error::InvalidData(format!("bad radius {radius} or target {target}")));
        }
        let half = d as f64 / 2.0;
        let lx = (Self::scale_of(d, conductor) * radius).ln();
        for j in 1..MAX_TERMS {
            // terms j, j+1, ... decrease geometrically with ratio at most rho
            let ln_rho = lx - half * ((j + 1) as f64).ln();
            if ln_rho > -std::f64::consts::LN_2 {
                continue;
            }
            let ln_tail = j as f64 * lx - half * ln_factorial(j) - (1.0 - ln_rho.exp()).ln();
            if ln_tail <= target.ln() {
                return Ok(ApproximantSeries {
                    d,
                    conductor,
                    radius,
                    terms: j,
                    tail: ln_tail.exp(),
                });
            }
        }
        Err(Error::TailBudget(format!(
            "F_{{{d},{conductor}}} at radius {radius} needs more than {MAX_TERMS} terms"
        )))
    }

    fn scale_of(d: u32, conductor: u64) -> f64 {
        (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0) / (conductor as f64).sqrt()
    }

    /// (2π)^{d/2}/√N.
    pub fn scale(&self) -> f64 {
        Self::scale_of(self.d, self.conductor)
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if r > self.radius * (1.0 + 1e-12) {
            return Err(Error::TailBudget(format!(
                "|z| = {r} exceeds the certified radius {}",
                self.radius
            )));
        }
        Ok(())
    }
}

/// F_{d,N}(z) with the tail majorant plus a rounding estimate.
pub fn eval_f(series: &ApproximantSeries, z: &Cplx, prec: u32) -> Result<(Cplx, f64)> {
    series.check_radius(z.abs().to_f64())?;
    let d = series.d;
    let base = Float::with_val(prec, mp::two_pi(prec).pow(d)).sqrt() / Float::with_val(prec, series.conductor).sqrt();
    let x = z.scale(&base);
    let half = d / 2;
    let mut term = Cplx::from_f64(prec, 1.0, 0.0);
    let mut acc = term.clone();
    let mut mag = 1.0;
    for j in 1..series.terms {
        let div = Float::with_val(prec, Float::with_val(prec, j).pow(half));
        term = term.mul(&x);
        term = Cplx::new(Float::with_val(prec, &term.re / &div), Float::with_val(prec, &term.im / &div));
        acc = &acc + &term;
        mag += term.abs().to_f64();
    }
    let rounding = mag * series.terms as f64 * 2f64.powi(2 - prec as i32);
    Ok((acc, series.tail + rounding))
}

/// Double-precision evaluation for contour tracking.
pub fn eval_f_f64(series: &ApproximantSeries, z: Complex64) -> Result<(Complex64, f64)> {
    series.check_radius(z.norm())?;
    let x = z * series.scale();
    let half = series.d as i32 / 2;
    let mut term = Complex64::new(1.0, 0.0);
    let mut acc = term;
    let mut mag = 1.0;
    for j in 1..series.terms {
        term = term * x / (j as f64).powi(half);
        acc += term;
        mag += term.norm();
    }
    let rounding = mag * (series.terms as f64 + 2.0) * 4.0 * f64::EPSILON;
    Ok((acc, series.tail + rounding))
}

/// T_{m,d,N}(z) = Σ_{j=0}^m t_j z^j.
pub fn partial_sum_t(m: u32, d: u32, conductor: u64, prec: u32) -> RealPolynomial {
    RealPolynomial::new((0..=m).map(|j| t_coeff(d, conductor, j, prec)).collect())
}

/// 2^{2−m}(ζ(3/2)^d − 1) F_{d,N}(2).
pub fn s_bound_main(d: u32, conductor: u64, m: u32, prec: u32) -> Result<f64> {
    let z = special::zeta(&Float::with_val(prec, 1.5), prec)?;
    let zd = Float::with_val(prec, z.pow(d)) - 1u32;
    let series = ApproximantSeries::new(d, conductor, 2.0, 1e-30)?;
    let (f2, tail) = eval_f(&series, &Cplx::from_f64(prec, 2.0, 0.0), prec)?;
    let f2 = Float::with_val(prec, &f2.re + tail);
    let mut out = Float::with_val(prec, &zd * &f2);
    let shift = 2 - m as i32;
    if shift >= 0 {
        out <<= shift as u32;
    } else {
        out >>= (-shift) as u32;
    }
    Ok(out.to_f64())
}

/// Bound for |S| + |central term| on the unit circle; needs m ≥ 2.
pub fn s_tail_bound(data: &LFunctionData, ratios: &[mp::Ball], prec: u32) -> Result<f64> {
    let m = data.m();
    if m < 2 {
        return Err(Error::InvalidData(format!("the S bound needs m >= 2, got m = {m}")));
    }
    if ratios.len() != m as usize + 1 {
        return Err(Error::InvalidData(format!("expected {} L-ratios, got {}", m + 1, ratios.len())));
    }
    let main = s_bound_main(data.degree, data.conductor, m, prec)?;
    let tm = t_coeff(data.degree, data.conductor, m, prec);
    let central = 0.5 * (&tm * &ratios[m as usize]).abs_upper().to_f64();
    Ok(main + central)
}

/// Samples of Q(z) = (z^m T(1/z) − t_m) + S(z) + central on the circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QDecomposition {
    pub points: usize,
    pub max_residual: f64,
    pub s_sup: f64,
    pub s_bound: f64,
    pub central: f64,
    /// t_m, counted by z^m T(1/z) but absent from Q.
    pub boundary_term: f64,
    /// min over the samples of |T(z)|, less a between-sample allowance.
    pub main_min: f64,
    /// |Q − z^m T(1/z)| < |z^m T(1/z)| on the circle, so both have the same
    /// number of zeros in the unit disc.
    pub rouche: bool,
}

pub fn q_decomposition(
    data: &LFunctionData,
    vals: &SpecialValues,
    points: usize,
    prec: u32,
) -> Result<QDecomposition> {
    let m = data.m();
    let q = build_Q_poly(data, vals, prec)?;
    let t = partial_sum_t(m, data.degree, data.conductor, prec);
    let ratios = l_ratios(data, vals, prec)?;
    let tm = t.coeffs[m as usize].clone();
    let central = (&tm * &ratios[m as usize]).scale(&Float::with_val(prec, 0.5));
    // S(z) = Σ_{j<m} t_j (r_j − 1) z^{m−j}
    let mut s_coeffs = vec![mp::Ball::zero(prec); m as usize + 1];
    let one = mp::Ball::exact(Float::with_val(prec, 1));
    for j in 0..m as usize {
        s_coeffs[m as usize - j] = &t.coeffs[j] * &(&ratios[j] - &one);
    }
    let s_poly = RealPolynomial::new(s_coeffs);
    // z^m T(1/z) as a polynomial
    let rev = RealPolynomial::new(t.coeffs.iter().rev().cloned().collect());
    let s_bound = if m >= 2 {
        s_tail_bound(data, &ratios, prec)?
    } else {
        f64::INFINITY
    };
    let tp = mp::two_pi(prec);
    let mut out = QDecomposition {
        points,
        max_residual: 0.0,
        s_sup: 0.0,
        s_bound,
        central: central.mid_f64(),
        boundary_term: tm.mid_f64(),
        main_min: f64::INFINITY,
        rouche: false,
    };
    for k in 0..points {
        let th = Float::with_val(prec, &tp * k as u32) / points as u32;
        let z = Cplx::new(Float::with_val(prec, th.cos_ref()), Float::with_val(prec, th.sin_ref()));
        let (qv, _) = q.eval(&z);
        let (mv, _) = rev.eval(&z);
        let (sv, _) = s_poly.eval(&z);
        let mut r = &(&qv - &mv) - &sv;
        r.re += &tm.mid;
        r.re -= &central.mid;
        out.max_residual = out.max_residual.max(r.abs().to_f64());
        out.s_sup = out.s_sup.max(sv.abs().to_f64());
        out.main_min = out.main_min.min(mv.abs().to_f64());
    }
    // |d/dθ T(e^{iθ})| ≤ Σ j t_j bounds the change between samples
    let lip: f64 = t.coeffs.iter().enumerate().map(|(j, c)| j as f64 * c.mid_f64().abs()).sum();
    out.main_min -= lip * std::f64::consts::PI / points as f64;
    // s_bound already contains the central term
    out.rouche = s_bound.is_finite() && s_bound + out.boundary_term.abs() < out.main_min;
    Ok(out)
}
