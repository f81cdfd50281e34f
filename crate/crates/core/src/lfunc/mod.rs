//! L-function data, archimedean factors and completed special values.

pub mod afe;
pub mod coeff_file;
pub mod dirichlet;
pub mod hypothesis;

use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::mp::{self, Ball, Cplx};
use crate::special;

pub use afe::{central_recomputation, completed_lambda, completed_lambda_at, completed_values, ALT_BALANCE};
pub use dirichlet::{spf_sieve, dirichlet_l, dirichlet_partial_sum, divisor_tail_bound, tau};
pub use hypothesis::{verify_hypothesis, Violation};

/// Self-dual L-function of odd motivic weight `w = 2m + 1`.
///
/// `coefficients[n - 1]` holds λ(n) exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct LFunctionData {
    pub degree: u32,
    pub weight: u32,
    pub conductor: u64,
    pub hodge: Vec<u32>,
    pub b_plus: u32,
    pub b_minus: u32,
    pub root_number: i8,
    pub coefficients: Vec<Rational>,
    pub label: String,
}

impl LFunctionData {
    /// Builds and validates the structural invariants. GRC is not enforced
    /// here; see [`LFunctionData::grc_violations`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        degree: u32,
        weight: u32,
        conductor: u64,
        hodge: Vec<u32>,
        root_number: i8,
        coefficients: Vec<Rational>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let data = LFunctionData {
            degree,
            weight,
            conductor,
            hodge,
            b_plus: 0,
            b_minus: 0,
            root_number,
            coefficients,
            label: label.into(),
        };
        data.validate()?;
        Ok(data)
    }

    pub fn m(&self) -> u32 {
        (self.weight - 1) / 2
    }

    pub fn coeff_limit(&self) -> usize {
        self.coefficients.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidData(msg));
        if self.weight < 3 || self.weight % 2 == 0 {
            return bad(format!("weight must be odd and at least 3, got {}", self.weight));
        }
        if self.b_plus != 0 || self.b_minus != 0 {
            return bad("odd weight requires b+ = b- = 0".into());
        }
        let m = self.m() as usize;
        if self.hodge.len() != m + 1 {
            return bad(format!(
                "expected {} Hodge numbers h_0..h_{m}, got {}",
                m + 1,
                self.hodge.len()
            ));
        }
        let sum: u32 = self.hodge.iter().sum();
        if sum == 0 {
            return bad("all Hodge numbers are zero".into());
        }
        if self.degree == 0 || self.degree % 2 == 1 || self.degree != 2 * sum {
            return bad(format!(
                "degree {} does not equal 2 * sum(h) = {}",
                self.degree,
                2 * sum
            ));
        }
        if self.root_number != 1 && self.root_number != -1 {
            return bad(format!("root number must be +1 or -1, got {}", self.root_number));
        }
        if self.conductor == 0 {
            return bad("conductor must be positive".into());
        }
        match self.coefficients.first() {
            None => return bad("no Dirichlet coefficients".into()),
            Some(c) if *c != 1 => return bad(format!("lambda(1) must be 1, got {c}")),
            _ => {}
        }
        Ok(())
    }

    /// Indices n with |λ(n)| > τ_d(n) n^{w/2}, checked exactly as
    /// λ(n)^2 > τ_d(n)^2 n^w.
    pub fn grc_violations(&self) -> Vec<usize> {
        let taus = dirichlet::tau_table(self.degree, self.coeff_limit());
        let mut out = Vec::new();
        for (i, lam) in self.coefficients.iter().enumerate() {
            let n = i + 1;
            let lhs = Rational::from(lam * lam);
            let bound = Integer::from(taus[n]).square() * Integer::from(n).pow(self.weight);
            if lhs > bound {
                out.push(n);
            }
        }
        out
    }

    /// (λ(n))_{n ≤ X} as floats.
    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.to_f64()).collect()
    }

    pub fn coefficients_float(&self, prec: u32) -> Vec<Float> {
        self.coefficients.iter().map(|c| Float::with_val(prec, c)).collect()
    }
}

fn ln_gamma_r(z: &Cplx, prec: u32) -> Result<Cplx> {
    // Γ_R(z) = π^{-z/2} Γ(z/2)
    let half = Float::with_val(prec, 0.5);
    let zh = z.scale(&half);
    let lg = special::ln_gamma(&zh, prec)?;
    let lpi = mp::pi(prec).ln();
    Ok(&lg - &zh.scale(&lpi))
}

fn ln_gamma_c(z: &Cplx, prec: u32) -> Result<Cplx> {
    // Γ_C(z) = 2 (2π)^{-z} Γ(z)
    let lg = special::ln_gamma(z, prec)?;
    let l2pi = mp::two_pi(prec).ln();
    let mut out = &lg - &z.scale(&l2pi);
    out.re += Float::with_val(prec, 2).ln();
    Ok(out)
}

/// log L_∞(s) as analytic continuation along the upward shifts; the branch
/// of the imaginary part is irrelevant after exponentiation.
pub fn ln_gamma_completed(s: &Cplx, data: &LFunctionData, prec: u32) -> Result<Cplx> {
    let mut acc = Cplx::zero(prec);
    for (nu, &h) in data.hodge.iter().enumerate() {
        if h == 0 {
            continue;
        }
        let mut z = s.clone();
        z.re -= nu as u32;
        if z.im.is_zero() && z.re <= 0 && z.re.is_integer() {
            return Err(Error::PoleOfGamma {
                nu,
                at: mp::to_decimal(&s.re),
            });
        }
        let lz = ln_gamma_c(&z, prec)?;
        acc = &acc + &lz.scale(&Float::with_val(prec, h));
    }
    if data.b_plus > 0 || data.b_minus > 0 {
        let wh = Float::with_val(prec, data.weight) / 2u32;
        for (count, shift) in [(data.b_plus, 0u32), (data.b_minus, 1u32)] {
            if count == 0 {
                continue;
            }
            let mut z = s.clone();
            z.re -= &wh;
            z.re += shift;
            let lz = ln_gamma_r(&z, prec)?;
            acc = &acc + &lz.scale(&Float::with_val(prec, count));
        }
    }
    Ok(acc)
}

/// L_∞(s) = ∏_ν Γ_C(s − ν)^{h_ν}.
pub fn gamma_completed(s: &Cplx, data: &LFunctionData, prec: u32) -> Result<Cplx> {
    data.validate()?;
    Ok(ln_gamma_completed(s, data, prec)?.exp())
}

/// log of N^{z/2} L_∞(z), the full archimedean-plus-conductor factor.
pub(crate) fn ln_gamma_factor(z: &Cplx, data: &LFunctionData, prec: u32) -> Result<Cplx> {
    let mut acc = ln_gamma_completed(z, data, prec)?;
    let ln_n = Float::with_val(prec, data.conductor).ln();
    let half = z.scale(&ln_n);
    acc.re += Float::with_val(prec, &half.re / 2u32);
    acc.im += Float::with_val(prec, &half.im / 2u32);
    Ok(acc)
}

/// log |N^{z/2} L_∞(z)| in double precision, for error and cost estimates.
pub(crate) fn ln_abs_gamma_factor_f64(data: &LFunctionData, sigma: f64, t: f64) -> f64 {
    let l2pi = (2.0 * std::f64::consts::PI).ln();
    let mut acc = 0.5 * sigma * (data.conductor as f64).ln();
    for (nu, &h) in data.hodge.iter().enumerate() {
        if h == 0 {
            continue;
        }
        let z = Complex64::new(sigma - nu as f64, t);
        let lg = special::ln_gamma_f64(z).re;
        acc += h as f64 * (std::f64::consts::LN_2 - z.re * l2pi + lg);
    }
    acc
}

/// Completed values Λ(1), …, Λ(w) with error radii.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialValues {
    pub weight: u32,
    pub root_number: i8,
    /// `values[s - 1]` is Λ(s).
    pub values: Vec<Ball>,
    pub central: Ball,
    /// Central value recomputed with a different balance parameter.
    pub central_alt: Option<Ball>,
}

impl SpecialValues {
    /// Wraps externally supplied values; the central entry is taken from
    /// the list.
    pub fn from_values(weight: u32, root_number: i8, values: Vec<Ball>) -> Result<Self> {
        if values.len() != weight as usize {
            return Err(Error::InvalidData(format!(
                "expected {weight} special values, got {}",
                values.len()
            )));
        }
        let central = values[((weight - 1) / 2) as usize].clone();
        Ok(SpecialValues {
            weight,
            root_number,
            values,
            central,
            central_alt: None,
        })
    }

    pub fn m(&self) -> u32 {
        (self.weight - 1) / 2
    }

    pub fn get(&self, s: i64) -> Result<&Ball> {
        if s < 1 || s > self.weight as i64 {
            return Err(Error::MissingSpecialValue(s));
        }
        Ok(&self.values[(s - 1) as usize])
    }

    /// Multiplies every value (and radius) by a positive constant.
    pub fn scaled(&self, k: &Float) -> SpecialValues {
        SpecialValues {
            weight: self.weight,
            root_number: self.root_number,
            values: self.values.iter().map(|b| b.scale(k)).collect(),
            central: self.central.scale(k),
            central_alt: self.central_alt.as_ref().map(|b| b.scale(k)),
        }
    }
}

/// L(s) = Λ(s) / (N^{s/2} L_∞(s)) for integers s > m where L_∞ is finite.
pub fn l_value(s: i64, data: &LFunctionData, vals: &SpecialValues, prec: u32) -> Result<Ball> {
    if s <= data.m() as i64 {
        return Err(Error::PoleOfGamma {
            nu: data.m() as usize,
            at: s.to_string(),
        });
    }
    let lam = vals.get(s)?;
    let z = Cplx::from_f64(prec, s as f64, 0.0);
    let lg = ln_gamma_factor(&z, data, prec)?;
    let inv = Float::with_val(prec, -&lg.re).exp();
    Ok(lam.scale(&inv))
}

/// (ζ(1+a)/ζ(1+b))^d, the bound for L(m+3/2+a)/L(m+3/2+b).
pub fn zeta_ratio_bound(a: f64, b: f64, d: u32, prec: u32) -> Result<Float> {
    if !(a > 0.0 && b > a) || !b.is_finite() {
        return Err(Error::InvalidData(format!(
            "zeta_ratio_bound needs 0 < a < b, got a={a}, b={b}"
        )));
    }
    let za = special::zeta_f64(1.0 + a, prec)?;
    let zb = special::zeta_f64(1.0 + b, prec)?;
    let r = Float::with_val(prec, za / zb);
    Ok(Float::with_val(prec, rug::ops::Pow::pow(&r, d)))
}
