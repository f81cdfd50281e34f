//! p(z), P(z) and the normalized Q(z) from completed special values.

use rug::ops::Pow;
use rug::{Float, Integer};

use super::RealPolynomial;
use crate::error::{Error, Result};
use crate::lfunc::{l_value, LFunctionData, SpecialValues};
use crate::mp::{self, Ball, Cplx, RADIUS_PREC};

fn binom(n: u32, k: i64) -> Integer {
    if k < 0 || k > n as i64 {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k as u32))
}

/// ∏_ν C(2m−ν, m−|m−j|)^{h_ν}, the weight of Λ(2m+1−j) in p.
pub fn binomial_weight_p(hodge: &[u32], m: u32, j: u32) -> Integer {
    let k = m as i64 - (m as i64 - j as i64).abs();
    hodge
        .iter()
        .enumerate()
        .fold(Integer::from(1), |acc, (nu, &h)| acc * binom(2 * m - nu as u32, k).pow(h))
}

/// ∏_ν C(2m−ν, m−j)^{h_ν}, the weight of Λ(m+1+j) in P.
#[allow(non_snake_case)]
pub fn binomial_weight_P(hodge: &[u32], m: u32, j: u32) -> Integer {
    let k = m as i64 - j as i64;
    hodge
        .iter()
        .enumerate()
        .fold(Integer::from(1), |acc, (nu, &h)| acc * binom(2 * m - nu as u32, k).pow(h))
}

/// Λ(s), replaced by an exact zero (keeping the radius) at the centre when
/// ε = −1.
fn lambda(vals: &SpecialValues, s: i64) -> Result<Ball> {
    let b = vals.get(s)?.clone();
    if vals.root_number < 0 && s == vals.m() as i64 + 1 {
        return Ok(Ball::new(Float::new(b.prec()), b.rad));
    }
    Ok(b)
}

fn check_shapes(data: &LFunctionData, vals: &SpecialValues) -> Result<()> {
    if vals.weight != data.weight {
        return Err(Error::InvalidData(format!(
            "special values for weight {} do not match weight {}",
            vals.weight, data.weight
        )));
    }
    if vals.root_number != data.root_number {
        return Err(Error::InvalidData("root numbers of data and values differ".into()));
    }
    Ok(())
}

/// p(z) = Σ_j [∏_ν C(2m−ν, m−|m−j|)^{h_ν}] Λ(2m+1−j) z^j, degree 2m.
pub fn build_p_poly(data: &LFunctionData, vals: &SpecialValues) -> Result<RealPolynomial> {
    check_shapes(data, vals)?;
    let m = data.m();
    let coeffs: Result<Vec<Ball>> = (0..=2 * m)
        .map(|j| {
            let l = lambda(vals, (2 * m + 1 - j) as i64)?;
            Ok(l.scale_int(&binomial_weight_p(&data.hodge, m, j)))
        })
        .collect();
    Ok(RealPolynomial::new(coeffs?))
}

/// P(z) with constant term ½[∏C(2m−ν, m)^{h_ν}]Λ(m+1) and z^j coefficient
/// [∏C(2m−ν, m−j)^{h_ν}]Λ(m+1+j), degree m.
#[allow(non_snake_case)]
pub fn build_P_poly(data: &LFunctionData, vals: &SpecialValues) -> Result<RealPolynomial> {
    check_shapes(data, vals)?;
    let m = data.m();
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    for j in 0..=m {
        let l = lambda(vals, (m + 1 + j) as i64)?;
        let mut c = l.scale_int(&binomial_weight_P(&data.hodge, m, j));
        if j == 0 {
            c = c.scale(&Float::with_val(c.prec(), 0.5));
        }
        coeffs.push(c);
    }
    Ok(RealPolynomial::new(coeffs))
}

/// r_j = L(2m+1−j)/L(2m+1) for j = 0..=m, with r_0 = 1 exactly.
pub fn l_ratios(data: &LFunctionData, vals: &SpecialValues, prec: u32) -> Result<Vec<Ball>> {
    let m = data.m() as i64;
    let top = l_value(2 * m + 1, data, vals, prec)?;
    let mut out = vec![Ball::exact(Float::with_val(prec, 1))];
    for j in 1..=m {
        let s = 2 * m + 1 - j;
        let l = if data.root_number < 0 && s == m + 1 {
            let c = l_value(s, data, vals, prec)?;
            Ball::new(Float::new(prec), c.rad)
        } else {
            l_value(s, data, vals, prec)?
        };
        out.push(l.div(&top)?);
    }
    Ok(out)
}

/// t_j = ((2π)^{d/2}/√N)^j / (j!)^{d/2}.
pub fn t_coeff(d: u32, conductor: u64, j: u32, prec: u32) -> Ball {
    let base = Float::with_val(prec, mp::two_pi(prec).pow(d)).sqrt() / Float::with_val(prec, conductor).sqrt();
    let num = Float::with_val(prec, base.pow(j));
    let fact = Integer::from(Integer::factorial(j)).pow(d / 2);
    let v = Float::with_val(prec, &num / &fact);
    let rad = Float::with_val(RADIUS_PREC, v.abs_ref()) * Float::with_val(RADIUS_PREC, (j as f64 + 3.0) * 2f64.powi(2 - prec as i32));
    Ball::new(v, rad)
}

/// Q(z): z^{m−j} coefficient t_j r_j for j < m, constant term ½ t_m r_m.
#[allow(non_snake_case)]
pub fn build_Q_poly(data: &LFunctionData, vals: &SpecialValues, prec: u32) -> Result<RealPolynomial> {
    check_shapes(data, vals)?;
    let m = data.m();
    let r = l_ratios(data, vals, prec)?;
    let mut c = vec![Ball::zero(prec); m as usize + 1];
    c[m as usize] = Ball::exact(Float::with_val(prec, 1));
    for j in 1..m {
        c[(m - j) as usize] = &t_coeff(data.degree, data.conductor, j, prec) * &r[j as usize];
    }
    let central = &t_coeff(data.degree, data.conductor, m, prec) * &r[m as usize];
    c[0] = central.scale(&Float::with_val(prec, 0.5));
    Ok(RealPolynomial::new(c))
}

/// K with P = K·Q:
/// K = ∏((2m−ν)!)^{h_ν} (√N/(2π)^{d/2})^{2m+1} L(2m+1) · 2^{d/2}(2π)^{Σ ν h_ν}.
pub fn pq_scale_factor(data: &LFunctionData, vals: &SpecialValues, prec: u32) -> Result<Ball> {
    let m = data.m();
    let d = data.degree;
    let mut fact = Integer::from(1);
    let mut nu_sum = 0u32;
    for (nu, &h) in data.hodge.iter().enumerate() {
        fact *= Integer::from(Integer::factorial(2 * m - nu as u32)).pow(h);
        nu_sum += nu as u32 * h;
    }
    let two_pi = mp::two_pi(prec);
    let ratio = Float::with_val(prec, data.conductor).sqrt() / Float::with_val(prec, two_pi.clone().pow(d)).sqrt();
    let mut k = Float::with_val(prec, ratio.pow(2 * m + 1)) * &fact;
    k *= Float::with_val(prec, 2u32).pow(d / 2);
    k *= Float::with_val(prec, two_pi.pow(nu_sum));
    let top = l_value((2 * m + 1) as i64, data, vals, prec)?;
    Ok(top.scale(&k))
}

/// Pointwise comparison of two sides of a polynomial identity.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IdentityCheck {
    pub max_residual: f64,
    pub max_bound: f64,
    /// Residual within its bound at every sample.
    pub holds: bool,
}

fn circle_points(n: usize, prec: u32) -> Vec<Cplx> {
    let tp = mp::two_pi(prec);
    (0..n)
        .map(|k| {
            let th = Float::with_val(prec, &tp * k as u32) / n as u32;
            Cplx::new(Float::with_val(prec, th.cos_ref()), Float::with_val(prec, th.sin_ref()))
        })
        .collect()
}

/// p(z) against ε z^m (P(z) + ε P(1/z)) at n points of the unit circle.
#[allow(non_snake_case)]
pub fn reconstruction_residual(p: &RealPolynomial, P: &RealPolynomial, eps: i8, n: usize) -> IdentityCheck {
    let prec = p.prec().max(P.prec());
    let m = P.degree() as u32;
    let mut out = IdentityCheck {
        max_residual: 0.0,
        max_bound: 0.0,
        holds: true,
    };
    for z in circle_points(n, prec) {
        let (lhs, e1) = p.eval(&z);
        let (a, e2) = P.eval(&z);
        let (b, e3) = P.eval(&z.conj());
        let inner = if eps > 0 { &a + &b } else { &a - &b };
        let mut rhs = z.powu(m).mul(&inner);
        if eps < 0 {
            rhs = -rhs;
        }
        let res = (&lhs - &rhs).abs().to_f64();
        let bound = e1 + e2 + e3 + 2f64.powi(8 - prec as i32) * (1.0 + lhs.abs().to_f64());
        out.max_residual = out.max_residual.max(res);
        out.max_bound = out.max_bound.max(bound);
        out.holds &= res <= bound;
    }
    out
}

/// P(z) against K·Q(z) at n points of the unit circle.
#[allow(non_snake_case)]
pub fn pq_scaling_residual(P: &RealPolynomial, Q: &RealPolynomial, k: &Ball, n: usize) -> IdentityCheck {
    let prec = P.prec().max(Q.prec());
    let mut out = IdentityCheck {
        max_residual: 0.0,
        max_bound: 0.0,
        holds: true,
    };
    let kf = k.mid.to_f64().abs();
    for z in circle_points(n, prec) {
        let (a, e1) = P.eval(&z);
        let (q, e2) = Q.eval(&z);
        let b = q.scale(&k.mid);
        let res = (&a - &b).abs().to_f64();
        let bound = e1 + kf * e2 + k.rad_f64() * q.abs().to_f64() + 2f64.powi(8 - prec as i32) * (1.0 + a.abs().to_f64());
        out.max_residual = out.max_residual.max(res);
        out.max_bound = out.max_bound.max(bound);
        out.holds &= res <= bound;
    }
    out
}
