//! Generating polynomials of completed special values and their
//! large-weight approximants.

pub mod approximant;
pub mod build;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{Ball, Cplx, DecimalPair, RADIUS_PREC};

pub use approximant::{
    eval_f, eval_f_f64, partial_sum_t, q_decomposition, s_bound_main, s_tail_bound,
    ApproximantSeries, QDecomposition,
};
pub use build::{
    binomial_weight_P, binomial_weight_p, build_P_poly, build_Q_poly, build_p_poly, l_ratios,
    pq_scale_factor, pq_scaling_residual, reconstruction_residual, t_coeff, IdentityCheck,
};

/// Real polynomial with ball coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPolynomial {
    pub coeffs: Vec<Ball>,
    /// The leading coefficient is not bounded away from zero.
    pub degenerate: bool,
}

impl RealPolynomial {
    pub fn new(coeffs: Vec<Ball>) -> Self {
        let degenerate = coeffs.last().is_none_or(|c| !c.is_nonzero());
        RealPolynomial { coeffs, degenerate }
    }

    pub fn from_f64(prec: u32, c: &[f64]) -> Self {
        RealPolynomial::new(c.iter().map(|&v| Ball::exact(Float::with_val(prec, v))).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec()).max().unwrap_or(64)
    }

    pub fn mids_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.mid_f64()).collect()
    }

    /// Largest coefficient radius.
    pub fn max_rad(&self) -> f64 {
        self.coeffs.iter().map(|c| c.rad_f64()).fold(0.0, f64::max)
    }

    /// Value at z with a bound on the effect of the coefficient radii and
    /// of rounding.
    pub fn eval(&self, z: &Cplx) -> (Cplx, f64) {
        let prec = self.prec().max(z.prec());
        let mut acc = Cplx::zero(prec);
        let r = z.abs().to_f64();
        let mut err = 0.0;
        let mut mag = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z);
            acc.re += &c.mid;
            err = err * r + c.rad_f64();
            mag = mag * r + c.mid_f64().abs();
        }
        let rounding = mag * (self.coeffs.len() as f64 + 1.0) * 2f64.powi(1 - prec as i32);
        (acc, err + rounding)
    }

    pub fn eval_f64(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.mid_f64())
    }

    /// Derivative, radii scaled along.
    pub fn derivative(&self) -> RealPolynomial {
        let c: Vec<Ball> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(&Float::with_val(RADIUS_PREC, j)))
            .collect();
        RealPolynomial::new(c)
    }

    /// Whether coeff(j) = ε·coeff(deg − j) holds within the radii.
    pub fn is_self_reciprocal(&self, eps: i8) -> bool {
        let n = self.degree();
        (0..=n).all(|j| {
            let other = if eps > 0 {
                self.coeffs[n - j].clone()
            } else {
                self.coeffs[n - j].neg()
            };
            self.coeffs[j].overlaps(&other, 0.0)
        })
    }

    /// Exact division by (1 − z) or (1 − z^2) style factors: divides by
    /// `divisor` (ascending coefficients, constant term ±1) and returns the
    /// quotient. The remainder must vanish within the accumulated radii.
    pub fn divide_exact(&self, divisor: &[i64]) -> Result<RealPolynomial> {
        let k = divisor.len() - 1;
        if k == 0 || divisor[k] == 0 {
            return Err(Error::Deflation("divisor must have positive degree".into()));
        }
        if self.degree() < k {
            return Err(Error::Deflation("dividend degree below divisor degree".into()));
        }
        let lead = divisor[k] as f64;
        let prec = self.prec();
        let mut rem: Vec<Ball> = self.coeffs.clone();
        let qdeg = self.degree() - k;
        let mut quot = vec![Ball::zero(prec); qdeg + 1];
        for i in (0..=qdeg).rev() {
            let q = rem[i + k].scale(&Float::with_val(prec, 1.0 / lead));
            for (t, &dv) in divisor.iter().enumerate() {
                if dv != 0 {
                    let sub = q.scale(&Float::with_val(prec, dv));
                    rem[i + t] = &rem[i + t] - &sub;
                }
            }
            quot[i] = q;
        }
        let scale: f64 = self.coeffs.iter().map(|c| c.mid_f64().abs()).fold(0.0, f64::max);
        let slack = scale * 2f64.powi(8 - prec as i32);
        for r in rem.iter().take(k) {
            if r.mid_f64().abs() > r.rad_f64() + slack {
                return Err(Error::Deflation(format!(
                    "remainder {:e} exceeds its bound {:e}",
                    r.mid_f64(),
                    r.rad_f64() + slack
                )));
            }
        }
        // the discarded remainder is folded into the quotient radii
        let spill: f64 = rem.iter().take(k).map(|r| r.abs_upper().to_f64()).sum();
        let spill = Float::with_val(RADIUS_PREC, spill);
        for q in quot.iter_mut() {
            q.add_rad(&spill);
        }
        Ok(RealPolynomial::new(quot))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<DecimalPair> = self.coeffs.iter().map(DecimalPair::from).collect();
        serde_json::to_value(pairs).expect("decimal pairs serialize")
    }

    pub fn from_json(v: &serde_json::Value, prec: u32) -> Result<Self> {
        let pairs: Vec<DecimalPair> = serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidData(format!("polynomial json: {e}")))?;
        let coeffs: Result<Vec<Ball>> = pairs.iter().map(|p| p.to_ball(prec)).collect();
        Ok(RealPolynomial::new(coeffs?))
    }
}

/// Serializable summary of a polynomial, used in reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySummary {
    pub degree: usize,
    pub degenerate: bool,
    pub coeffs: Vec<DecimalPair>,
}

impl From<&RealPolynomial> for PolySummary {
    fn from(p: &RealPolynomial) -> Self {
        PolySummary {
            degree: p.degree(),
            degenerate: p.degenerate,
            coeffs: p.coeffs.iter().map(DecimalPair::from).collect(),
        }
    }
}
