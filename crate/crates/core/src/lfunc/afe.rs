//! Completed values Λ(s) by a two-sided smoothed approximate functional
//! equation.
//!
//! With γ(z) = N^{z/2} L_∞(z) and the kernel
//!
//! ```text
//! W_s(x) = (1/2πi) ∫_{(c)} γ(s+u) x^{-(s+u)} du/u
//! ```
//!
//! one has, for any balance A > 0,
//!
//! ```text
//! Λ(s) = A^{-s} Σ λ(n) W_s(n/A) + ε A^{w+1-s} Σ λ(n) W_{w+1-s}(nA).
//! ```
//!
//! The kernel never divides by L_∞(s), so it is well defined at integers
//! where L_∞ has poles. Each W is a trapezoid sum on the line Re(u) = c,
//! evaluated for all x at once by a Clenshaw recurrence in the phase h·ln x.

use rug::{Assign, Float};

use super::dirichlet::ln_divisor_tail_bound;
use super::{ln_abs_gamma_factor_f64, ln_gamma_factor, LFunctionData, SpecialValues};
use crate::error::{Error, Result};
use crate::mp::{self, Ball, Cplx, Precision};

/// Balance parameter used for the values left of the centre, so that the
/// functional equation between the two halves is a genuine check.
pub const ALT_BALANCE: f64 = 1.1;

const STRIP: f64 = 1.0;
const SAFETY: f64 = 2.0;
const MAX_NODES: usize = 200_000;

/// Cost and truncation data of one evaluation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AfeStats {
    pub coeffs_used: usize,
    pub nodes: usize,
    pub step: f64,
}

#[derive(Debug)]
struct SidePlan {
    c: f64,
    h: f64,
    nodes: usize,
    x_max: usize,
    err: f64,
}

/// log ∫_{-∞}^{∞} |γ(σ+it)| / |c'+it| dt, as a left Riemann sum of the
/// decreasing integrand on t ≥ 0 (an upper bound up to f64 rounding).
fn ln_j(data: &LFunctionData, sigma: f64, cp: f64) -> f64 {
    let f = |t: f64| ln_abs_gamma_factor_f64(data, sigma, t) - 0.5 * (cp * cp + t * t).ln();
    let l0 = f(0.0);
    let mut t = 0.0;
    let mut lt = l0;
    let mut step = 0.05 * sigma.sqrt().max(1.0);
    let mut acc = 0.0;
    for _ in 0..100_000 {
        acc += (lt - l0).exp() * step;
        let t1 = t + step;
        let l1 = f(t1);
        if l1 < l0 - 90.0 {
            // exponential tail beyond t1 with slope at least the current one
            let slope = ((lt - l1) / step).max(1e-3);
            acc += (l1 - l0).exp() / slope;
            break;
        }
        let slope = ((lt - l1) / step).abs();
        step = (0.2 / slope.max(0.05)).min(2.0 * step).clamp(0.01, 5.0);
        t = t1;
        lt = l1;
    }
    l0 + (2.0 * acc).ln()
}

fn ln_sum_exp(v: &[f64]) -> f64 {
    let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
}

/// ln Σ_{n ≤ x} |λ(n)| (n b)^{-σ}.
fn ln_weighted_sum(abs_coeffs: &[f64], x: usize, ln_b: f64, sigma: f64) -> f64 {
    let terms: Vec<f64> = abs_coeffs[..x]
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > 0.0)
        .map(|(i, a)| a.ln() - sigma * (((i + 1) as f64).ln() + ln_b))
        .collect();
    ln_sum_exp(&terms)
}

/// Caches ln J(σ', σ' - s) on the grid σ' = s + 0.5 (k + 1) used to bound
/// the kernel beyond the truncation point.
struct TailBound<'a> {
    data: &'a LFunctionData,
    s: f64,
    ln_b: f64,
    grid: Vec<Option<f64>>,
}

impl<'a> TailBound<'a> {
    fn sigma(&self, k: usize) -> f64 {
        let base = self.s.max(self.data.weight as f64 / 2.0 + 1.0) + 0.5;
        base + 0.5 * k as f64
    }

    fn ln_j_at(&mut self, k: usize) -> f64 {
        if self.grid.len() <= k {
            self.grid.resize(k + 1, None);
        }
        if let Some(v) = self.grid[k] {
            return v;
        }
        let sg = self.sigma(k);
        let v = ln_j(self.data, sg, sg - self.s);
        self.grid[k] = Some(v);
        v
    }

    /// ln of a bound for Σ_{n > x} |λ(n)| |W_s(n b)|.
    fn ln_tail(&mut self, x: f64) -> f64 {
        let half_w = self.data.weight as f64 / 2.0;
        let mut best = f64::INFINITY;
        let mut since_best = 0;
        for k in 0..2000 {
            let sg = self.sigma(k);
            let v = self.ln_j_at(k) - (2.0 * std::f64::consts::PI).ln() - sg * self.ln_b
                + ln_divisor_tail_bound(self.data.degree, x, sg - half_w);
            if v < best {
                best = v;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best > 8 {
                    break;
                }
            }
        }
        best
    }
}

fn plan_side(
    data: &LFunctionData,
    s: f64,
    ln_b: f64,
    budget: f64,
    abs_coeffs: &[f64],
    work_bits: u32,
) -> Result<SidePlan> {
    let w = data.weight as f64;
    let m = data.m() as f64;
    let ln_part = (budget / 4.0).ln();
    let c = (w / 2.0 + 1.0 - s).max(0.0) + 1.5;
    let a = STRIP.min(0.9 * c).min(0.9 * (s + c - m));

    // coefficient truncation
    let available = abs_coeffs.len();
    let mut tail = TailBound {
        data,
        s,
        ln_b,
        grid: Vec::new(),
    };
    let tail_at_avail = tail.ln_tail(available as f64);
    if tail_at_avail > ln_part {
        let mut need = (available.max(2)) as f64;
        while tail.ln_tail(need) > ln_part && need < 1e15 {
            need *= 2.0;
        }
        return Err(Error::InsufficientCoefficients {
            required: need as usize,
            available,
        });
    }
    let (mut lo, mut hi) = (1usize, available);
    if tail.ln_tail(1.0) <= ln_part {
        hi = 1;
    }
    while hi > lo + 1 && (hi - lo) as f64 > 0.01 * hi as f64 {
        let mid = lo + (hi - lo) / 2;
        if tail.ln_tail(mid as f64) <= ln_part {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let x_max = hi;
    let e_tail = tail.ln_tail(x_max as f64).exp();

    // quadrature step from the aliasing bound on the lines Re u = c ± a
    let mut ln_m = f64::NEG_INFINITY;
    for sign in [-1.0, 1.0] {
        let cp = c + sign * a;
        let sg = s + cp;
        let v = ln_j(data, sg, cp) + ln_weighted_sum(abs_coeffs, x_max, ln_b, sg);
        ln_m = ln_m.max(v);
    }
    let ln_q = ln_m - std::f64::consts::PI.ln() - ln_part;
    let ln_1q = if ln_q > 30.0 { ln_q } else { ln_q.exp().ln_1p() };
    let h = (2.0 * std::f64::consts::PI * a / ln_1q.max(1e-3)).min(1.0);
    let e_alias = (ln_m - std::f64::consts::PI.ln()).exp() / ((2.0 * std::f64::consts::PI * a / h).exp() - 1.0);

    // number of nodes from the decay of γ along the contour
    let ln_s0 = ln_weighted_sum(abs_coeffs, x_max, ln_b, s + c);
    let mut g = Vec::new();
    let g0 = ln_abs_gamma_factor_f64(data, s + c, 0.0) - c.ln();
    for k in 0..MAX_NODES {
        let t = k as f64 * h;
        let v = ln_abs_gamma_factor_f64(data, s + c, t) - 0.5 * (c * c + t * t).ln();
        g.push(v);
        if v < g0 - 400.0 && k > 4 {
            break;
        }
    }
    if g.len() == MAX_NODES {
        return Err(Error::NonconvergentQuadrature(format!(
            "kernel at s = {s} needs more than {MAX_NODES} nodes"
        )));
    }
    let pref = (h / std::f64::consts::PI).ln() + ln_s0;
    let mut suffix = vec![f64::NEG_INFINITY; g.len() + 1];
    for k in (0..g.len()).rev() {
        suffix[k] = ln_sum_exp(&[suffix[k + 1], g[k]]);
    }
    let mut nodes = g.len() - 1;
    for k in 1..g.len() {
        if pref + suffix[k + 1] <= ln_part {
            nodes = k;
            break;
        }
    }
    let e_trunc = (pref + suffix[nodes + 1]).exp();
    let ln_abs_sum = suffix[0];
    let kk = (nodes + 1) as f64;
    let e_round = (4.0 * kk * kk + x_max as f64).ln() - work_bits as f64 * std::f64::consts::LN_2
        + pref
        + ln_abs_sum;
    let err = e_tail + e_alias + e_trunc + e_round.exp();
    Ok(SidePlan {
        c,
        h,
        nodes,
        x_max,
        err,
    })
}

fn guard_bits(nodes: usize) -> u32 {
    2 * (usize::BITS - nodes.leading_zeros()) + 8
}

/// Σ_{n ≤ X} λ(n) W_s(n b) at `wp` bits.
fn eval_side(
    data: &LFunctionData,
    s: &Float,
    ln_b: &Float,
    plan: &SidePlan,
    coeffs: &[Float],
    wp: u32,
) -> Result<Float> {
    let c = Float::with_val(wp, plan.c);
    let h = Float::with_val(wp, plan.h);
    let sc = Float::with_val(wp, s + &c);
    let mut re = Vec::with_capacity(plan.nodes + 1);
    let mut im = Vec::with_capacity(plan.nodes + 1);
    for k in 0..=plan.nodes {
        let t = Float::with_val(wp, &h * k as u32);
        let z = Cplx::new(sc.clone(), t.clone());
        let lg = ln_gamma_factor(&z, data, wp)?;
        let gk = lg.exp().div(&Cplx::new(c.clone(), t));
        re.push(gk.re);
        im.push(gk.im);
    }
    let two_pi = mp::two_pi(wp);
    let pref = Float::with_val(wp, &h / &two_pi);

    let mut acc = Float::new(wp);
    let mut ya1 = Float::new(wp);
    let mut ya2 = Float::new(wp);
    let mut yb1 = Float::new(wp);
    let mut yb2 = Float::new(wp);
    let mut tmp = Float::new(wp);
    let mut alpha = Float::new(wp);
    let mut lnx = Float::new(wp);
    let mut phi = Float::new(wp);
    for (i, lam) in coeffs.iter().enumerate().take(plan.x_max) {
        if lam.is_zero() {
            continue;
        }
        lnx.assign((i + 1) as u32);
        lnx.ln_mut();
        lnx += ln_b;
        phi.assign(&h * &lnx);
        let (sin_phi, cos_phi) = phi.clone().sin_cos(Float::new(wp));
        alpha.assign(&cos_phi * 2u32);

        ya1.assign(0);
        ya2.assign(0);
        yb1.assign(0);
        yb2.assign(0);
        for k in (1..=plan.nodes).rev() {
            tmp.assign(&alpha * &ya1);
            tmp -= &ya2;
            tmp += &re[k];
            std::mem::swap(&mut ya2, &mut ya1);
            std::mem::swap(&mut ya1, &mut tmp);

            tmp.assign(&alpha * &yb1);
            tmp -= &yb2;
            tmp += &im[k];
            std::mem::swap(&mut yb2, &mut yb1);
            std::mem::swap(&mut yb1, &mut tmp);
        }
        // Σ a_k cos kφ = y1 cos φ − y2, Σ b_k sin kφ = y1 sin φ
        let mut inner = Float::with_val(wp, &ya1 * &cos_phi);
        inner -= &ya2;
        inner += Float::with_val(wp, &yb1 * &sin_phi);
        inner *= 2u32;
        inner += &re[0];

        let mut scale = Float::with_val(wp, &sc * &lnx);
        scale = -scale;
        scale.exp_mut();
        inner *= &scale;
        inner *= lam;
        acc += &inner;
    }
    acc *= &pref;
    Ok(acc)
}

/// Λ(s) at a real point s with balance parameter A, returning the value
/// with its error radius and the cost data.
pub fn completed_lambda_detailed(
    s: &Float,
    balance: &Float,
    data: &LFunctionData,
    prec: &Precision,
) -> Result<(Ball, AfeStats)> {
    prec.validate()?;
    data.validate()?;
    if *balance <= 0 {
        return Err(Error::InvalidData("balance parameter must be positive".into()));
    }
    let bits = prec.working_bits();
    let w1 = Float::with_val(bits, data.weight + 1);
    let s1 = Float::with_val(bits, s);
    let s2 = Float::with_val(bits, &w1 - &s1);
    let ln_a = Float::with_val(bits, balance).ln();
    let ln_a64 = ln_a.to_f64();
    let s1f = s1.to_f64();
    let s2f = s2.to_f64();
    let pre1 = (-s1f * ln_a64).exp();
    let pre2 = (s2f * ln_a64).exp();
    let abs_coeffs: Vec<f64> = data.coefficients.iter().map(|c| c.to_f64().abs()).collect();
    let target = prec.target_abs_error / SAFETY;
    let symmetric = s1 == s2 && ln_a.is_zero();

    let plan1 = plan_side(data, s1f, -ln_a64, target / (2.0 * pre1), &abs_coeffs, bits + 16)?;
    let plan2 = if symmetric {
        None
    } else {
        Some(plan_side(data, s2f, ln_a64, target / (2.0 * pre2), &abs_coeffs, bits + 16)?)
    };
    let x_used = plan1.x_max.max(plan2.as_ref().map_or(0, |p| p.x_max));
    let nodes = plan1.nodes.max(plan2.as_ref().map_or(0, |p| p.nodes));
    let wp = bits + guard_bits(nodes);
    let coeffs: Vec<Float> = data.coefficients[..x_used]
        .iter()
        .map(|c| Float::with_val(wp, c))
        .collect();
    let eps = data.root_number as i32;

    let neg_ln_a = Float::with_val(wp, -&ln_a);
    let v1 = eval_side(data, &s1, &neg_ln_a, &plan1, &coeffs, wp)?;
    let (value, err) = match &plan2 {
        None => {
            let v = Float::with_val(wp, &v1 * (1 + eps));
            (v, SAFETY * 2.0 * plan1.err)
        }
        Some(p2) => {
            let v2 = eval_side(data, &s2, &Float::with_val(wp, &ln_a), p2, &coeffs, wp)?;
            let a1 = Float::with_val(wp, &s1 * &neg_ln_a).exp();
            let a2 = Float::with_val(wp, &s2 * &ln_a).exp();
            let mut v = Float::with_val(wp, &v1 * &a1);
            let t = Float::with_val(wp, &v2 * &a2) * eps;
            v += t;
            (v, SAFETY * (pre1 * plan1.err + pre2 * p2.err))
        }
    };
    let stats = AfeStats {
        coeffs_used: x_used,
        nodes,
        step: plan1.h,
    };
    Ok((
        Ball::with_f64_rad(Float::with_val(prec.mantissa_bits, &value), err),
        stats,
    ))
}

/// Λ(s) at a real point with an explicit balance parameter.
pub fn completed_lambda_at(
    s: &Float,
    balance: &Float,
    data: &LFunctionData,
    prec: &Precision,
) -> Result<Ball> {
    completed_lambda_detailed(s, balance, data, prec).map(|r| r.0)
}

fn default_balance(s: i64, data: &LFunctionData, bits: u32) -> Float {
    if s > data.m() as i64 {
        Float::with_val(bits, 1)
    } else {
        Float::with_val(bits, ALT_BALANCE)
    }
}

/// Λ(s) for an integer s in [1, w]. Values left of the centre use the
/// alternative balance parameter.
pub fn completed_lambda(s: i64, data: &LFunctionData, prec: &Precision) -> Result<Ball> {
    if s < 1 || s > data.weight as i64 {
        return Err(Error::MissingSpecialValue(s));
    }
    let bits = prec.working_bits();
    let sf = Float::with_val(bits, s);
    completed_lambda_at(&sf, &default_balance(s, data, bits), data, prec)
}

/// Λ(m+1) with the alternative balance parameter.
pub fn central_recomputation(data: &LFunctionData, prec: &Precision) -> Result<Ball> {
    let bits = prec.working_bits();
    let centre = Float::with_val(bits, data.m() + 1);
    completed_lambda_at(&centre, &Float::with_val(bits, ALT_BALANCE), data, prec)
}

/// All values Λ(1..w), the central value and its recomputation with the
/// alternative balance.
pub fn completed_values(data: &LFunctionData, prec: &Precision) -> Result<SpecialValues> {
    let mut values = Vec::with_capacity(data.weight as usize);
    for s in 1..=data.weight as i64 {
        values.push(completed_lambda(s, data, prec)?);
    }
    let alt = central_recomputation(data, prec)?;
    let central = values[data.m() as usize].clone();
    Ok(SpecialValues {
        weight: data.weight,
        root_number: data.root_number,
        values,
        central,
        central_alt: Some(alt),
    })
}
