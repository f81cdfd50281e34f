//! Direct Dirichlet series in the region of absolute convergence.

use rug::{Float, Integer};

use super::LFunctionData;
use crate::error::{Error, Result};
use crate::mp::{Cplx, Precision};

/// Smallest prime factor for 0..=n (entries 0 and 1 are 0).
pub fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// τ_d(n), the number of ordered factorizations of n into d factors.
pub fn tau(d: u32, mut n: u64) -> u64 {
    let mut out = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0u32;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out *= Integer::from(Integer::binomial_u(e + d - 1, d - 1))
                .to_u64()
                .unwrap_or(u64::MAX);
        }
        p += 1;
    }
    if n > 1 {
        out *= d as u64;
    }
    out
}

/// τ_d(n) for 0 ≤ n ≤ x (index 0 unused).
pub fn tau_table(d: u32, x: usize) -> Vec<u64> {
    let spf = spf_sieve(x);
    let mut t = vec![0u64; x + 1];
    if x >= 1 {
        t[1] = 1;
    }
    for n in 2..=x {
        let p = spf[n] as usize;
        let mut e = 0u32;
        let mut r = n;
        while r % p == 0 {
            r /= p;
            e += 1;
        }
        let local = Integer::from(Integer::binomial_u(e + d - 1, d - 1))
            .to_u64()
            .unwrap_or(u64::MAX);
        t[n] = t[r].saturating_mul(local);
    }
    t
}

/// log of an upper bound for Σ_{n > x} τ_d(n) n^{-α}, α > 1.
///
/// Uses Σ_{n ≤ t} τ_d(n) ≤ t (1 + ln t)^{d-1} and partial summation.
pub fn ln_divisor_tail_bound(d: u32, x: f64, alpha: f64) -> f64 {
    assert!(alpha > 1.0, "tail bound needs alpha > 1");
    let beta = alpha - 1.0;
    let y = x.max(1.0).ln();
    // ∫_y^∞ (1+u)^{d-1} e^{-βu} du = e^{-βy} Σ_k (d-1)!/(d-1-k)! (1+y)^{d-1-k} / β^{k+1}
    let mut terms = Vec::with_capacity(d as usize);
    let mut falling = 0f64; // log of (d-1)!/(d-1-k)!
    for k in 0..d {
        if k > 0 {
            falling += ((d - k) as f64).ln();
        }
        let e = (d - 1 - k) as f64;
        terms.push(falling + e * (1.0 + y).ln() - (k as f64 + 1.0) * beta.ln());
    }
    let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().map(|t| (t - mx).exp()).sum();
    alpha.ln() - beta * y + mx + s.ln()
}

pub fn divisor_tail_bound(d: u32, x: f64, alpha: f64) -> f64 {
    ln_divisor_tail_bound(d, x, alpha).exp()
}

/// Σ_{n ≤ X} λ(n) n^{-s}.
pub fn dirichlet_partial_sum(coeffs: &[Float], s: &Cplx, prec: u32) -> Cplx {
    let mut acc = Cplx::zero(prec);
    let neg_s = -s.clone();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let ln_n = Float::with_val(prec, i + 1).ln();
        let t = neg_s.scale(&ln_n).exp().scale(c);
        acc = &acc + &t;
    }
    acc
}

/// Partial sum with the GRC tail bound Σ_{n>X} τ_d(n) n^{w/2 - Re s}.
pub fn dirichlet_l(s: &Cplx, data: &LFunctionData, prec: &Precision) -> Result<(Cplx, f64)> {
    prec.validate()?;
    data.validate()?;
    let wp = prec.working_bits();
    let alpha = s.re.to_f64() - data.weight as f64 / 2.0;
    if alpha <= 1.0 {
        return Err(Error::OutsideConvergence(format!(
            "Re(s) = {} must exceed w/2 + 1 = {}",
            s.re.to_f64(),
            data.weight as f64 / 2.0 + 1.0
        )));
    }
    let x = data.coeff_limit();
    let tail = divisor_tail_bound(data.degree, x as f64, alpha);
    if !(tail <= prec.target_abs_error) {
        let mut need = x.max(2) as f64;
        while divisor_tail_bound(data.degree, need, alpha) > prec.target_abs_error && need < 1e18 {
            need *= 2.0;
        }
        return Err(Error::InsufficientCoefficients {
            required: need as usize,
            available: x,
        });
    }
    let coeffs = data.coefficients_float(wp);
    let v = dirichlet_partial_sum(&coeffs, s, wp);
    let rounding = x as f64 * 2f64.powi(-(wp as i32));
    Ok((Cplx::new(Float::with_val(prec.mantissa_bits, &v.re), Float::with_val(prec.mantissa_bits, &v.im)), tail + rounding))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_small() {
        assert_eq!(tau(2, 12), 6);
        assert_eq!(tau(4, 2), 4);
        assert_eq!(tau(3, 8), 10);
        let t = tau_table(4, 100);
        for n in 1..=100u64 {
            assert_eq!(t[n as usize], tau(4, n), "n={n}");
        }
    }

    #[test]
    fn tau_table_matches_convolution() {
        // τ_3 = τ_2 * 1
        let t2 = tau_table(2, 200);
        let t3 = tau_table(3, 200);
        for n in 1..=200usize {
            let s: u64 = (1..=n).filter(|k| n % k == 0).map(|k| t2[k]).sum();
            assert_eq!(t3[n], s);
        }
    }

    #[test]
    fn tail_bound_dominates_actual_tail() {
        for &(d, alpha) in &[(1u32, 2.0), (2, 1.5), (4, 2.5), (6, 3.0)] {
            let x = 50usize;
            let t = tau_table(d, 200_000);
            let actual: f64 = (x + 1..=200_000).map(|n| t[n] as f64 * (n as f64).powf(-alpha)).sum();
            let b = divisor_tail_bound(d, x as f64, alpha);
            assert!(b >= actual, "d={d} alpha={alpha}: {b} < {actual}");
        }
    }

    #[test]
    fn zeta_surrogate() {
        let coeffs: Vec<Float> = (0..20_000).map(|_| Float::with_val(128, 1)).collect();
        let s = Cplx::from_f64(128, 2.0, 0.0);
        let v = dirichlet_partial_sum(&coeffs, &s, 128);
        let tail = divisor_tail_bound(1, 20_000.0, 2.0);
        let pi = crate::mp::pi(128);
        let exact = Float::with_val(128, &pi * &pi) / 6u32;
        let d = Float::with_val(128, &v.re - &exact).abs().to_f64();
        assert!(d <= tail && d > 0.0);
        assert!(tail < 2e-4);
    }
}
