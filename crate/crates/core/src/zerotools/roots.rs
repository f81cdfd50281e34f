//! Simultaneous (Aberth) iteration in multiprecision from companion-matrix
//! seeds, with Weierstrass inclusion radii.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::Cplx;
use crate::specialpoly::RealPolynomial;

/// A root estimate with a radius of a disc believed to contain a root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootBall {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

impl RootBall {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Working bits; 0 picks max(128, coefficient precision + 32).
    pub bits: u32,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { bits: 0, max_iter: 600 }
    }
}

fn companion_seeds(c: &[f64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    // the unbounded default can spin for a long time on defective matrices
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-14, 200 * n)?;
    let ev = schur.complex_eigenvalues();
    let out: Vec<Complex64> = ev.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    out.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(out)
}

fn circle_seeds(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let r = (c[0].abs().max(f64::MIN_POSITIVE) / c[n].abs()).powf(1.0 / n as f64);
    let r = if r.is_finite() && r > 0.0 { r } else { 1.0 };
    (0..n)
        .map(|k| Complex64::from_polar(r, (2.0 * std::f64::consts::PI * k as f64 + 0.4) / n as f64))
        .collect()
}

/// Spreads coincident seeds so the Aberth correction is defined.
fn separate(seeds: &mut [Complex64]) {
    let n = seeds.len();
    for i in 0..n {
        for j in 0..i {
            if (seeds[i] - seeds[j]).norm() < 1e-10 * (1.0 + seeds[i].norm()) {
                seeds[i] += Complex64::from_polar(1e-6 * (1.0 + seeds[i].norm()), 0.7 + i as f64);
            }
        }
    }
}

/// Taylor coefficients of p at z, constant term first.
fn taylor_at(c: &[Float], z: &Cplx, prec: u32) -> Vec<Cplx> {
    let mut t: Vec<Cplx> = c.iter().map(|a| Cplx::real(Float::with_val(prec, a))).collect();
    let n = t.len() - 1;
    for k in 0..n {
        for i in (k..n).rev() {
            let v = &t[i] + &t[i + 1].mul(z);
            t[i] = v;
        }
    }
    t
}

fn horner(c: &[Float], z: &Cplx, prec: u32) -> (Cplx, Cplx) {
    let mut p = Cplx::zero(prec);
    let mut dp = Cplx::zero(prec);
    for a in c.iter().rev() {
        dp = &dp.mul(z) + &p;
        p = p.mul(z);
        p.re += a;
    }
    (p, dp)
}

pub fn poly_roots(p: &RealPolynomial) -> Result<Vec<RootBall>> {
    poly_roots_with(p, RootOptions::default())
}

pub fn poly_roots_with(p: &RealPolynomial, opts: RootOptions) -> Result<Vec<RootBall>> {
    if p.degenerate {
        return Err(Error::Degenerate("leading coefficient is not bounded away from zero".into()));
    }
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = if opts.bits == 0 { (p.prec() + 32).max(128) } else { opts.bits };
    let coeffs: Vec<Float> = p.coeffs.iter().map(|c| Float::with_val(prec, &c.mid)).collect();
    let cf: Vec<f64> = p.mids_f64();
    let mut seeds = if cf.iter().all(|v| v.is_finite()) {
        companion_seeds(&cf).unwrap_or_else(|| circle_seeds(&cf))
    } else {
        circle_seeds(&cf)
    };
    separate(&mut seeds);
    let mut z: Vec<Cplx> = seeds.iter().map(|s| Cplx::from_f64(prec, s.re, s.im)).collect();
    let tol = 2f64.powi(20 - prec as i32);
    let mags: Vec<f64> = cf.iter().map(|c| c.abs()).collect();
    let noise = |r: f64| mags.iter().rev().fold(0.0, |acc, c| acc * r + c) * (n as f64 + 2.0) * 2f64.powi(4 - prec as i32);
    // a root whose residual is at rounding level cannot be improved; this
    // is what stops the iteration at clustered or multiple roots
    let mut done = vec![false; n];
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (pv, dv) = horner(&coeffs, &z[k], prec);
            if pv.is_zero() || pv.abs().to_f64() <= noise(z[k].abs().to_f64()) {
                done[k] = true;
                continue;
            }
            let ratio = pv.div(&dv);
            let mut sum = Cplx::zero(prec);
            for j in 0..n {
                if j != k {
                    sum = &sum + &(&z[k] - &z[j]).recip();
                }
            }
            let mut den = ratio.mul(&sum);
            den.re = Float::with_val(prec, 1) - &den.re;
            den.im = -den.im;
            let w = ratio.div(&den);
            let wr = w.abs().to_f64();
            let zr = z[k].abs().to_f64();
            if wr.is_finite() {
                z[k] = &z[k] - &w;
                max_step = max_step.max(wr / zr.max(1e-300).max(1.0));
            }
        }
        if max_step < tol || done.iter().all(|d| *d) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootNonConvergence { iterations: opts.max_iter });
    }
    // inclusion radius n|W_k| with W_k = p(z_k)/(a_n ∏_{j≠k}(z_k − z_j)),
    // where p(z_k) is enlarged by the coefficient radii
    let lead = Float::with_val(prec, &coeffs[n]);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (pv, _) = horner(&coeffs, &z[k], prec);
        let r = z[k].abs().to_f64();
        let mut perr = 0.0;
        let mut mag = 0.0;
        for c in p.coeffs.iter().rev() {
            perr = perr * r + c.rad_f64();
            mag = mag * r + c.mid_f64().abs();
        }
        let pabs = pv.abs().to_f64() + perr + mag * (n as f64 + 2.0) * 2f64.powi(2 - prec as i32);
        let mut prod = Cplx::from_f64(prec, 1.0, 0.0);
        for j in 0..n {
            if j != k {
                prod = prod.mul(&(&z[k] - &z[j]));
            }
        }
        let den = Float::with_val(prec, prod.abs() * lead.clone().abs()).to_f64();
        let weierstrass = if den > 0.0 { n as f64 * pabs / den } else { f64::INFINITY };
        // some root lies within (C(n,k)|p(z)|/|c_k|)^{1/k} of z for every k,
        // c_k the Taylor coefficients at z; this stays finite at clusters
        let taylor = taylor_at(&coeffs, &z[k], prec);
        let mut binom = 1.0;
        let mut cluster = f64::INFINITY;
        for (j, c) in taylor.iter().enumerate().skip(1) {
            binom = binom * (n - j + 1) as f64 / j as f64;
            let ck = c.abs().to_f64();
            if ck > 0.0 {
                cluster = cluster.min((binom * pabs / ck).powf(1.0 / j as f64));
            }
        }
        let radius = weierstrass.min(cluster);
        let zc = z[k].to_c64();
        out.push(RootBall { re: zc.re, im: zc.im, radius });
    }
    out.sort_by(|a, b| {
        a.z().arg().partial_cmp(&b.z().arg()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}
