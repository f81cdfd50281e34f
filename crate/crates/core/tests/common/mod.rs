//! Test-side oracles, written independently of the library code paths
//! they check.
#![allow(dead_code)]

use periodpoly::lfunc::{LFunctionData, SpecialValues};
use periodpoly::mp::Ball;
use periodpoly::specialpoly::RealPolynomial;
use rand::Rng;
use periodpoly::mp::Cplx;
use periodpoly::lfunc::gamma_completed;
use periodpoly::special::zeta;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// J_0(x) by its power series at `prec` bits.
pub fn bessel_j0(x: &Float, prec: u32) -> Float {
    let q = Float::with_val(prec, x * x) / 4u32;
    let mut term = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1);
    for k in 1..400u32 {
        term *= &q;
        term /= k * k;
        term = -term;
        sum += &term;
        if term.clone().abs() < Float::with_val(prec, 1e-60) {
            break;
        }
    }
    sum
}

/// First `count` positive zeros of J_0, by sign scan and bisection.
pub fn bessel_j0_zeros(count: usize) -> Vec<f64> {
    let prec = 256;
    let mut out = Vec::new();
    let step = 0.05;
    let mut a = 0.1f64;
    let mut fa = bessel_j0(&Float::with_val(prec, a), prec);
    while out.len() < count {
        let b = a + step;
        let fb = bessel_j0(&Float::with_val(prec, b), prec);
        if fa.is_sign_negative() != fb.is_sign_negative() {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = bessel_j0(&Float::with_val(prec, mid), prec);
                if fm.is_sign_negative() == fa.is_sign_negative() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    out
}

/// Zeros of Σ (2π)^{2k} z^k / (k!)^2 N^{k/2} = I_0(4π N^{-1/4} √z) in the
/// unit disc: z_k = −j_k² √N / (16π²).
pub fn bessel_disc_count(n: u64, zeros: &[f64]) -> usize {
    let c = 16.0 * std::f64::consts::PI * std::f64::consts::PI;
    zeros.iter().filter(|j| *j * *j * (n as f64).sqrt() < c).count()
}

/// Coefficients of num(z) / den(z) up to degree `count − 1` by schoolbook
/// long division; den[0] must be ±1.
pub fn long_division(num: &[Float], den: &[i64], count: usize, prec: u32) -> Vec<Float> {
    assert!(den[0].abs() == 1);
    let mut rem: Vec<Float> = (0..count + den.len())
        .map(|i| num.get(i).cloned().unwrap_or_else(|| Float::new(prec)))
        .collect();
    let mut q = Vec::with_capacity(count);
    for k in 0..count {
        let c = Float::with_val(prec, &rem[k] / den[0]);
        for (j, d) in den.iter().enumerate() {
            let t = Float::with_val(prec, &c * *d);
            rem[k + j] -= t;
        }
        q.push(c);
    }
    q
}

/// (1 − z)^k as integer coefficients.
pub fn one_minus_z_pow(k: usize) -> Vec<i64> {
    (0..=k)
        .map(|i| {
            let b = Integer::from(Integer::binomial_u(k as u32, i as u32)).to_i64().unwrap();
            if i % 2 == 0 { b } else { -b }
        })
        .collect()
}

/// Z(s) from the closed expansion H(x) = Σ_i u_i C(x − i + e, e) in exact
/// rational arithmetic.
pub fn rv_direct(u: &[Rational]) -> Vec<Rational> {
    let e = u.len() - 1;
    let mut h = vec![Rational::new(); e + 1];
    let fact = Integer::from(Integer::factorial(e as u32));
    for (i, ui) in u.iter().enumerate() {
        // ∏_{t=1}^{e} (x + t − i)
        let mut poly = vec![Rational::from(1)];
        for t in 1..=e {
            let shift = Rational::from(t as i64 - i as i64);
            let mut next = vec![Rational::new(); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] += c;
                next[k] += Rational::from(c * &shift);
            }
            poly = next;
        }
        for (k, c) in poly.iter().enumerate() {
            h[k] += Rational::from(c * ui) / &fact;
        }
    }
    // Z(s) = H(−s)
    h.into_iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 1 { -c } else { c })
        .collect()
}

fn mul_poly(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    out
}

/// A real polynomial with every root on the unit circle and U(1) ≠ 0:
/// a product of z² − 2cz + 1 with dyadic c ∈ (−1, 1), times z + 1 when
/// the degree is odd.
pub fn random_circle_poly<R: Rng>(rng: &mut R, degree: usize) -> Vec<Rational> {
    let mut p = vec![Rational::from(1)];
    for _ in 0..degree / 2 {
        let k: i64 = rng.random_range(-1023..=1023);
        let c = Rational::from((k, 1024));
        let quad = [Rational::from(1), Rational::from(-2 * c), Rational::from(1)];
        p = mul_poly(&p, &quad);
    }
    if degree % 2 == 1 {
        p = mul_poly(&p, &[Rational::from(1), Rational::from(1)]);
    }
    let lead: i64 = rng.random_range(1..=9);
    p.into_iter().map(|c| c * lead).collect()
}

pub fn rational_poly(c: &[Rational], prec: u32) -> RealPolynomial {
    RealPolynomial::new(c.iter().map(|r| Ball::exact(Float::with_val(prec, r))).collect())
}

/// A weight-w dataset with the given Hodge numbers and an empty
/// coefficient list, for tests that only need the values.
pub fn synthetic(hodge: &[u32], weight: u32, conductor: u64, eps: i8, values: &[f64], prec: u32) -> (LFunctionData, SpecialValues) {
    let degree = 2 * hodge.iter().sum::<u32>();
    let data = LFunctionData::new(degree, weight, conductor, hodge.to_vec(), eps, vec![Rational::from(1)], "synthetic")
        .expect("synthetic data");
    let vals = SpecialValues::from_values(
        weight,
        eps,
        values.iter().map(|v| Ball::exact(Float::with_val(prec, *v))).collect(),
    )
    .expect("values");
    (data, vals)
}

/// Λ(s) = N^{s/2} L_∞(s) ζ(s − w/2)^d for s > m, mirrored with ε = +1.
pub fn zeta_power(hodge: &[u32], weight: u32, conductor: u64, prec: u32) -> periodpoly::Result<(LFunctionData, SpecialValues)> {
    let degree = 2 * hodge.iter().sum::<u32>();
    let data = LFunctionData::new(degree, weight, conductor, hodge.to_vec(), 1, vec![Rational::from(1)], "zeta power")?;
    let m = data.m() as i64;
    let mut vals = vec![Ball::zero(prec); weight as usize];
    for s in m + 1..=weight as i64 {
        let sc = Cplx::from_f64(prec, s as f64, 0.0);
        let g = gamma_completed(&sc, &data, prec)?;
        let arg = s as f64 - weight as f64 / 2.0;
        let z = if arg == 0.5 {
            // ζ(1/2); the library only evaluates ζ for s > 1
            Float::with_val(prec, Float::parse("-1.46035450880958681288949915251529801246722933101258").unwrap())
        } else {
            zeta(&Float::with_val(prec, arg), prec)?
        };
        let nf = Float::with_val(prec, conductor).pow(Float::with_val(prec, s as f64 / 2.0));
        let v = Float::with_val(prec, z.pow(degree)) * &g.re * &nf;
        let b = Ball::with_f64_rad(v.clone(), v.to_f64().abs() * 1e-40);
        vals[(s - 1) as usize] = b.clone();
        vals[(weight as i64 - s) as usize] = b;
    }
    let sv = SpecialValues::from_values(weight, 1, vals)?;
    Ok((data, sv))
}

