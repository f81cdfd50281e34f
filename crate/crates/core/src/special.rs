//! Special functions at working precision: Bernoulli numbers, the complex
//! log-gamma function (Stirling series after an upward shift) and the
//! Riemann zeta function on the real axis (Euler–Maclaurin).

use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::mp::Cplx;

static BERNOULLI: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();

/// Bernoulli number B_n (B_1 = -1/2).
pub fn bernoulli(n: usize) -> Rational {
    let cache = BERNOULLI.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut b = cache.lock().expect("bernoulli cache poisoned");
    while b.len() <= n {
        let m = b.len();
        if m > 1 && m % 2 == 1 {
            b.push(Rational::new());
            continue;
        }
        // sum_{j<m} C(m+1, j) B_j + (m+1) B_m = 0
        let mut acc = Rational::new();
        for (j, bj) in b.iter().enumerate() {
            if *bj == 0 {
                continue;
            }
            let c = Integer::from(Integer::binomial_u((m + 1) as u32, j as u32));
            acc += Rational::from(bj * &c);
        }
        acc /= (m + 1) as u32;
        b.push(-acc);
    }
    b[n].clone()
}

/// A logarithm of Γ(z) for z not a nonpositive integer.
///
/// The imaginary part is the analytic continuation obtained by summing
/// principal logarithms along the upward shift, so it can differ from the
/// principal branch of log Γ by a multiple of 2π.
pub fn ln_gamma(z: &Cplx, prec: u32) -> Result<Cplx> {
    let work = prec + 16;
    let mut z = Cplx::new(Float::with_val(work, &z.re), Float::with_val(work, &z.im));
    if z.im.is_zero() && z.re <= 0 && z.re.is_integer() {
        return Err(Error::PoleOfGamma {
            nu: 0,
            at: z.re.to_string(),
        });
    }
    let r0 = 0.12 * work as f64 + 4.0;
    let mut shift_log = Cplx::zero(work);
    // Γ(z) = Γ(z + r) / (z (z+1) ... (z+r-1))
    while z.re.to_f64() < r0 || z.abs().to_f64() < r0 {
        shift_log = &shift_log + &z.ln();
        z.re += 1u32;
        if z.re.to_f64() > r0 + 1.0 && z.abs().to_f64() >= r0 {
            break;
        }
    }
    let ln_z = z.ln();
    let half = Float::with_val(work, 0.5);
    let zm = Cplx::new(Float::with_val(work, &z.re - &half), z.im.clone());
    let mut acc = &zm.mul(&ln_z) - &z;
    let ln2pi = (crate::mp::two_pi(work)).ln() * &half;
    acc.re += &ln2pi;

    let inv = z.recip();
    let inv2 = inv.mul(&inv);
    let mut pow = inv.clone();
    let eps = Float::with_val(work, 1) >> (work + 4);
    let scale = acc.abs().max(&Float::with_val(work, 1));
    for k in 1..400usize {
        let b = bernoulli(2 * k);
        let denom = (2 * k * (2 * k - 1)) as u32;
        let coef = Float::with_val(work, &b) / denom;
        let term = pow.scale(&coef);
        let mag = term.abs();
        acc = &acc + &term;
        if mag < Float::with_val(work, &eps * &scale) {
            let out = &acc - &shift_log;
            return Ok(Cplx::new(
                Float::with_val(prec, &out.re),
                Float::with_val(prec, &out.im),
            ));
        }
        pow = pow.mul(&inv2);
    }
    Err(Error::NonconvergentQuadrature(
        "Stirling series for log-gamma did not reach working precision".into(),
    ))
}

/// Γ(z) at working precision.
pub fn gamma(z: &Cplx, prec: u32) -> Result<Cplx> {
    Ok(ln_gamma(z, prec)?.exp())
}

const STIRLING_F64: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Double-precision log-gamma used for error and cost estimates.
pub fn ln_gamma_f64(mut z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_F64 {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// Riemann zeta at a real argument s > 1, by Euler–Maclaurin summation.
pub fn zeta(s: &Float, prec: u32) -> Result<Float> {
    if *s <= 1 {
        return Err(Error::InvalidData(format!(
            "zeta is only evaluated for real s > 1, got {}",
            s.to_f64()
        )));
    }
    let work = prec + 16;
    let s = Float::with_val(work, s);
    let n_cut: u32 = (work / 4 + 10).max(16);
    let mut sum = Float::new(work);
    for n in 1..n_cut {
        let t = Float::with_val(work, n).pow(&Float::with_val(work, -&s));
        sum += t;
    }
    let big_n = Float::with_val(work, n_cut);
    let n_pow_s = Float::with_val(work, (&big_n).pow(&Float::with_val(work, -&s)));
    // N^{1-s}/(s-1) + N^{-s}/2
    let s_minus_1 = Float::with_val(work, &s - 1u32);
    sum += Float::with_val(work, &n_pow_s * &big_n) / &s_minus_1;
    sum += Float::with_val(work, &n_pow_s / 2u32);

    let eps = Float::with_val(work, 1) >> (work + 2);
    // rising factorial s (s+1) ... (s+2k-2) times N^{-s-2k+1}
    let mut rising = s.clone();
    let mut npow = Float::with_val(work, &n_pow_s / &big_n);
    let n2 = Float::with_val(work, &big_n * &big_n);
    let mut fact = Integer::from(2);
    for k in 1..300u32 {
        let b = Float::with_val(work, &bernoulli(2 * k as usize));
        let mut term = Float::with_val(work, &b * &rising);
        term *= &npow;
        term /= Float::with_val(work, &fact);
        let small = Float::with_val(work, term.abs_ref()) < Float::with_val(work, &eps * &sum);
        sum += &term;
        if small {
            return Ok(Float::with_val(prec, sum));
        }
        rising *= Float::with_val(work, &s + (2 * k - 1));
        rising *= Float::with_val(work, &s + 2 * k);
        npow /= &n2;
        fact *= (2 * k + 1) * (2 * k + 2);
    }
    Err(Error::NonconvergentQuadrature(
        "Euler-Maclaurin zeta did not converge".into(),
    ))
}

pub fn zeta_f64(s: f64, prec: u32) -> Result<Float> {
    zeta(&Float::with_val(prec, s), prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), 1);
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli(13), 0);
    }

    #[test]
    fn ln_gamma_matches_mpfr_on_real_axis() {
        for &x in &[0.5, 1.0, 2.5, 7.25, 31.0, 100.5] {
            let ours = ln_gamma(&Cplx::from_f64(192, x, 0.0), 192).unwrap();
            let (mpfr, _) = Float::with_val(192, x).ln_abs_gamma();
            let d = Float::with_val(192, &ours.re - &mpfr).abs();
            assert!(d < 1e-52, "x={x} diff={}", d.to_f64());
            assert!(ours.im.clone().abs() < 1e-52);
        }
    }

    #[test]
    fn ln_gamma_satisfies_recurrence_off_axis() {
        let z = Cplx::from_f64(160, 0.75, 13.5);
        let z1 = Cplx::from_f64(160, 1.75, 13.5);
        let lhs = gamma(&z1, 160).unwrap();
        let rhs = z.mul(&gamma(&z, 160).unwrap());
        let rel = Float::with_val(160, (&lhs - &rhs).abs() / lhs.abs());
        assert!(rel < 1e-44);
    }

    #[test]
    fn ln_gamma_reflection_identity() {
        // Γ(z)Γ(1-z) = π / sin(πz) at z = 1/2 + 3i
        let z = Cplx::from_f64(128, 0.5, 3.0);
        let w = Cplx::from_f64(128, 0.5, -3.0);
        let prod = gamma(&z, 128).unwrap().mul(&gamma(&w, 128).unwrap());
        // sin(π(1/2+3i)) = cosh(3π)
        let pi = crate::mp::pi(128);
        let expected = Float::with_val(128, &pi / Float::with_val(128, &pi * 3u32).cosh());
        let d = Float::with_val(128, &prod.re - &expected).abs() / &expected;
        assert!(d < 1e-35);
    }

    #[test]
    fn ln_gamma_pole_rejected() {
        assert!(ln_gamma(&Cplx::from_f64(128, -2.0, 0.0), 128).is_err());
    }

    #[test]
    fn f64_ln_gamma_close_to_multiprecision() {
        let z = Complex64::new(2.3, -7.9);
        let a = ln_gamma_f64(z);
        let b = ln_gamma(&Cplx::from_f64(128, 2.3, -7.9), 128).unwrap().to_c64();
        assert!((a.re - b.re).abs() < 1e-12);
        let dim = (a.im - b.im) / (2.0 * std::f64::consts::PI);
        assert!((dim - dim.round()).abs() < 1e-12);
    }

    #[test]
    fn zeta_matches_mpfr() {
        for &s in &[1.5, 2.0, 2.5, 3.5, 10.0, 40.5, 999.5] {
            let ours = zeta_f64(s, 200).unwrap();
            let mpfr = Float::with_val(200, s).zeta();
            let d = Float::with_val(200, &ours - &mpfr).abs();
            assert!(d < 1e-55, "s={s}");
        }
        let z2 = zeta_f64(2.0, 128).unwrap();
        let pi = crate::mp::pi(128);
        let d = Float::with_val(128, z2 - Float::with_val(128, &pi * &pi) / 6u32).abs();
        assert!(d < 1e-36);
    }

    #[test]
    fn zeta_rejects_s_at_most_one() {
        assert!(zeta_f64(1.0, 64).is_err());
        assert!(zeta_f64(0.5, 64).is_err());
    }
}
