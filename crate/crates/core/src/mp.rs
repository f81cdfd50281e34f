//! Multiprecision building blocks: a complex type over MPFR floats and a
//! midpoint-radius `Ball` used for first-order error accounting.
//!
//! The error radii are accumulated worst-case but the arithmetic is not
//! rigorous ball arithmetic: rounding of the radius itself is not directed
//! and transcendental functions only contribute an ulp-level estimate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Precision for the error radii carried next to every value.
pub const RADIUS_PREC: u32 = 64;

/// Working precision and absolute accuracy target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    pub mantissa_bits: u32,
    pub target_abs_error: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            mantissa_bits: 192,
            target_abs_error: 1e-25,
        }
    }
}

impl Precision {
    pub fn new(mantissa_bits: u32, target_abs_error: f64) -> Result<Self> {
        let p = Precision {
            mantissa_bits,
            target_abs_error,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mantissa_bits < 64 {
            return Err(Error::InvalidPrecision(format!(
                "mantissa_bits must be at least 64, got {}",
                self.mantissa_bits
            )));
        }
        if !(self.target_abs_error > 0.0) || !self.target_abs_error.is_finite() {
            return Err(Error::InvalidPrecision(format!(
                "target_abs_error must be positive and finite, got {}",
                self.target_abs_error
            )));
        }
        Ok(())
    }

    /// Same bit count, different accuracy target.
    pub fn with_target(self, target_abs_error: f64) -> Self {
        Precision {
            target_abs_error,
            ..self
        }
    }

    /// Working bits including guard bits used inside kernels.
    pub fn working_bits(&self) -> u32 {
        self.mantissa_bits + 24
    }

    /// Unit roundoff 2^{1-bits}.
    pub fn unit_roundoff(&self) -> f64 {
        2f64.powi(1 - self.mantissa_bits as i32)
    }
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn two_pi(prec: u32) -> Float {
    let mut p = pi(prec);
    p *= 2u32;
    p
}

pub fn float(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn from_integer(prec: u32, v: &Integer) -> Float {
    Float::with_val(prec, v)
}

pub fn from_rational(prec: u32, v: &Rational) -> Float {
    Float::with_val(prec, v)
}

/// Shortest decimal string that reparses to the same binary value.
pub fn to_decimal(x: &Float) -> String {
    x.to_string_radix(10, None)
}

pub fn parse_decimal(prec: u32, s: &str) -> Result<Float> {
    Float::parse(s)
        .map(|p| Float::with_val(prec, p))
        .map_err(|e| Error::Parse {
            line: 0,
            message: format!("bad decimal '{s}': {e}"),
        })
}

/// Exact conversion of a finite float to a rational.
pub fn float_to_rational(x: &Float) -> Option<Rational> {
    x.to_rational()
}

/// Complex number with MPFR components.
#[derive(Clone, Debug, PartialEq)]
pub struct Cplx {
    pub re: Float,
    pub im: Float,
}

impl Cplx {
    pub fn new(re: Float, im: Float) -> Self {
        Cplx { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Cplx::new(Float::new(prec), Float::new(prec))
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Cplx::new(Float::with_val(prec, re), Float::with_val(prec, im))
    }

    pub fn real(x: Float) -> Self {
        let p = x.prec();
        Cplx::new(x, Float::new(p))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), self.re.clone().mul_add(&self.re, &Float::with_val(self.prec(), &self.im * &self.im)))
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    pub fn conj(&self) -> Self {
        Cplx::new(self.re.clone(), -self.im.clone())
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        Cplx::new(Float::with_val(p, &self.re * k), Float::with_val(p, &self.im * k))
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let d = self.norm_sqr();
        Cplx::new(Float::with_val(p, &self.re / &d), -Float::with_val(p, &self.im / &d))
    }

    pub fn div(&self, other: &Cplx) -> Self {
        self.mul(&other.recip())
    }

    pub fn mul(&self, o: &Cplx) -> Self {
        let p = self.prec().max(o.prec());
        let ac = Float::with_val(p, &self.re * &o.re);
        let bd = Float::with_val(p, &self.im * &o.im);
        let ad = Float::with_val(p, &self.re * &o.im);
        let bc = Float::with_val(p, &self.im * &o.re);
        Cplx::new(ac - bd, ad + bc)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Cplx::new(c * &m, s * &m)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Cplx::new(self.abs().ln(), self.arg())
    }

    /// Integer power by repeated squaring.
    pub fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cplx::from_f64(self.prec(), 1.0, 0.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Add for &Cplx {
    type Output = Cplx;
    fn add(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        Cplx::new(Float::with_val(p, &self.re + &o.re), Float::with_val(p, &self.im + &o.im))
    }
}

impl Sub for &Cplx {
    type Output = Cplx;
    fn sub(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        Cplx::new(Float::with_val(p, &self.re - &o.re), Float::with_val(p, &self.im - &o.im))
    }
}

impl Neg for Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx::new(-self.re, -self.im)
    }
}

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re.to_f64(), self.im.to_f64())
    }
}

/// A value with an absolute error radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub mid: Float,
    pub rad: Float,
}

fn ulp_of(x: &Float) -> Float {
    let mut r = Float::with_val(RADIUS_PREC, x.abs_ref());
    r >>= x.prec().saturating_sub(1);
    r
}

impl Ball {
    pub fn new(mid: Float, rad: Float) -> Self {
        let rad = Float::with_val(RADIUS_PREC, rad.abs());
        Ball { mid, rad }
    }

    pub fn exact(mid: Float) -> Self {
        Ball {
            mid,
            rad: Float::new(RADIUS_PREC),
        }
    }

    pub fn with_f64_rad(mid: Float, rad: f64) -> Self {
        Ball::new(mid, Float::with_val(RADIUS_PREC, rad))
    }

    pub fn zero(prec: u32) -> Self {
        Ball::exact(Float::new(prec))
    }

    pub fn from_integer(prec: u32, v: &Integer) -> Self {
        let mid = Float::with_val(prec, v);
        let exact = mid == *v;
        let mut b = Ball::exact(mid);
        if !exact {
            b.rad = ulp_of(&b.mid);
        }
        b
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// True when the ball excludes zero.
    pub fn is_nonzero(&self) -> bool {
        Float::with_val(RADIUS_PREC, self.mid.abs_ref()) > self.rad
    }

    /// `|self - other| <= rad(self) + rad(other) + slack`.
    pub fn overlaps(&self, other: &Ball, slack: f64) -> bool {
        let d = Float::with_val(self.prec().max(other.prec()), &self.mid - &other.mid).abs();
        let tol = Float::with_val(RADIUS_PREC, &self.rad + &other.rad) + slack;
        d <= tol
    }

    pub fn add_rad(&mut self, r: &Float) {
        self.rad += r;
    }

    pub fn scale_int(&self, k: &Integer) -> Ball {
        let p = self.prec();
        let mid = Float::with_val(p, &self.mid * k);
        let mut rad = Float::with_val(RADIUS_PREC, &self.rad * Float::with_val(RADIUS_PREC, k).abs());
        rad += ulp_of(&mid);
        Ball { mid, rad }
    }

    pub fn scale(&self, k: &Float) -> Ball {
        let p = self.prec();
        let mid = Float::with_val(p, &self.mid * k);
        let mut rad = Float::with_val(RADIUS_PREC, &self.rad * Float::with_val(RADIUS_PREC, k.abs_ref()));
        rad += ulp_of(&mid);
        Ball { mid, rad }
    }

    pub fn div(&self, o: &Ball) -> Result<Ball> {
        if !o.is_nonzero() {
            return Err(Error::DivisionByZero("ball divisor contains zero".into()));
        }
        let p = self.prec().max(o.prec());
        let mid = Float::with_val(p, &self.mid / &o.mid);
        // |a/b - a0/b0| <= (ra + |a0/b0| rb) / (|b0| - rb)
        let am = Float::with_val(RADIUS_PREC, mid.abs_ref());
        let num = Float::with_val(RADIUS_PREC, &am * &o.rad) + &self.rad;
        let den = Float::with_val(RADIUS_PREC, o.mid.abs_ref()) - &o.rad;
        let mut rad = num / den;
        rad += ulp_of(&mid);
        Ok(Ball { mid, rad })
    }

    pub fn powu(&self, e: u32) -> Ball {
        let mut acc = Ball::exact(Float::with_val(self.prec(), 1));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn abs_upper(&self) -> Float {
        Float::with_val(RADIUS_PREC, self.mid.abs_ref()) + &self.rad
    }

    pub fn to_rational_exact(&self) -> Option<Rational> {
        if self.is_exact() {
            float_to_rational(&self.mid)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: -self.mid.clone(),
            rad: self.rad.clone(),
        }
    }
}

impl Add for &Ball {
    type Output = Ball;
    fn add(self, o: &Ball) -> Ball {
        let p = self.prec().max(o.prec());
        let mid = Float::with_val(p, &self.mid + &o.mid);
        let mut rad = Float::with_val(RADIUS_PREC, &self.rad + &o.rad);
        if !(self.mid.is_zero() || o.mid.is_zero()) {
            rad += ulp_of(&mid);
        }
        Ball { mid, rad }
    }
}

impl Sub for &Ball {
    type Output = Ball;
    fn sub(self, o: &Ball) -> Ball {
        self + &o.neg()
    }
}

impl Mul for &Ball {
    type Output = Ball;
    fn mul(self, o: &Ball) -> Ball {
        let p = self.prec().max(o.prec());
        let mid = Float::with_val(p, &self.mid * &o.mid);
        let a = Float::with_val(RADIUS_PREC, self.mid.abs_ref());
        let b = Float::with_val(RADIUS_PREC, o.mid.abs_ref());
        let mut rad = Float::with_val(RADIUS_PREC, &a * &o.rad);
        rad += Float::with_val(RADIUS_PREC, &b * &self.rad);
        rad += Float::with_val(RADIUS_PREC, &self.rad * &o.rad);
        rad += ulp_of(&mid);
        Ball { mid, rad }
    }
}

/// Decimal-string pair used by every JSON serialization of balls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalPair(pub String, pub String);

impl From<&Ball> for DecimalPair {
    fn from(b: &Ball) -> Self {
        DecimalPair(to_decimal(&b.mid), to_decimal(&b.rad))
    }
}

impl DecimalPair {
    pub fn to_ball(&self, prec: u32) -> Result<Ball> {
        Ok(Ball::new(parse_decimal(prec, &self.0)?, parse_decimal(RADIUS_PREC, &self.1)?))
    }
}

/// Float raised to a float power (real, positive base).
pub fn powf(base: &Float, e: &Float) -> Float {
    Float::with_val(base.prec(), base.pow(e))
}
