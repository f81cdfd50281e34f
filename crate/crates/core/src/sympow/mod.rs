//! L-function data for odd symmetric powers of rational elliptic curves.

pub mod curve;

use std::collections::HashMap;

use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Integer, Rational};

pub use curve::{ap_count, count_points, is_prime, CurveSpec, DEFAULT_COUNT_BOUND};

use crate::error::{Error, Result};
use crate::lfunc::{spf_sieve, LFunctionData};

/// Frobenius data at p for a weight-k form: a_p and the unit-circle α_p.
#[derive(Clone, Debug, PartialEq)]
pub struct SatakePair {
    pub p: u64,
    pub a_p: i64,
    pub weight: u32,
    pub alpha: Complex64,
}

impl SatakePair {
    /// Fails unless a_p^2 ≤ 4 p^{k-1}.
    pub fn new(p: u64, a_p: i64, weight: u32) -> Result<Self> {
        if weight < 2 {
            return Err(Error::InvalidData(format!("form weight {weight} < 2")));
        }
        let q = Integer::from(p).pow(weight - 1);
        if Integer::from(a_p).square() > Integer::from(4 * &q) {
            return Err(Error::InvalidData(format!(
                "a_{p} = {a_p} violates the Ramanujan bound"
            )));
        }
        let t = a_p as f64 / (2.0 * (p as f64).powf((weight - 1) as f64 / 2.0));
        let theta = t.clamp(-1.0, 1.0).acos();
        Ok(SatakePair {
            p,
            a_p,
            weight,
            alpha: Complex64::from_polar(1.0, theta),
        })
    }

    pub fn beta(&self) -> Complex64 {
        self.alpha.conj()
    }

    /// p^{k-1}.
    pub fn q(&self) -> Integer {
        Integer::from(self.p).pow(self.weight - 1)
    }
}

/// Denominator of the local factor of Sym^n as coefficients in X = p^{-s},
/// constant term first.
pub fn sym_local_factor(n: u32, sat: &SatakePair, bad: bool) -> Vec<Integer> {
    if bad {
        return vec![Integer::from(1), -Integer::from(sat.a_p).pow(n)];
    }
    let a = Integer::from(sat.a_p);
    let q = sat.q();
    let deg = n as usize + 1;
    // s_r = A^r + B^r for the roots of x^2 - a x + q
    let mut s = vec![Integer::from(2), a.clone()];
    for r in 2..=deg {
        let v = Integer::from(&a * &s[r - 1]) - Integer::from(&q * &s[r - 2]);
        s.push(v);
    }
    // power sums of {A^j B^{n-j}}: complete homogeneous h_n(A^r, B^r)
    let mut qr = Integer::from(1);
    let mut power = vec![Integer::new()];
    for r in 1..=deg {
        qr *= &q;
        let (mut h0, mut h1) = (Integer::from(1), s[r].clone());
        for _ in 1..n {
            let h2 = Integer::from(&s[r] * &h1) - Integer::from(&qr * &h0);
            h0 = h1;
            h1 = h2;
        }
        power.push(if n == 0 { h0 } else { h1 });
    }
    // Newton identities give the elementary symmetric functions
    let mut e = vec![Integer::from(1)];
    for k in 1..=deg {
        let mut acc = Integer::new();
        for i in 1..=k {
            let t = Integer::from(&e[k - i] * &power[i]);
            if i % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        e.push(acc / k as u32);
    }
    e.into_iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 1 { -v } else { v })
        .collect()
}

/// Coefficients of 1/Q(X) up to X^max_deg.
pub fn reciprocal_series(q: &[Integer], max_deg: usize) -> Vec<Integer> {
    let mut out = vec![Integer::from(1)];
    for r in 1..=max_deg {
        let mut acc = Integer::new();
        for i in 1..q.len().min(r + 1) {
            acc -= Integer::from(&q[i] * &out[r - i]);
        }
        out.push(acc);
    }
    out
}

/// λ(1..=x) for Sym^n of the curve, index 0 holding λ(1).
pub fn sym_dirichlet_coeffs(curve: &CurveSpec, n: u32, x: usize) -> Result<Vec<Integer>> {
    sym_dirichlet_coeffs_bounded(curve, n, x, DEFAULT_COUNT_BOUND)
}

pub fn sym_dirichlet_coeffs_bounded(
    curve: &CurveSpec,
    n: u32,
    x: usize,
    bound: u64,
) -> Result<Vec<Integer>> {
    let mut lam = vec![Integer::new(); x + 1];
    if x == 0 {
        return Ok(Vec::new());
    }
    lam[1] = Integer::from(1);
    let spf = spf_sieve(x);
    for p in 2..=x {
        if spf[p] as usize != p {
            continue;
        }
        let ap = ap_count(curve, p as u64, bound)?;
        let sat = SatakePair::new(p as u64, ap, 2)?;
        let q = sym_local_factor(n, &sat, curve.is_bad(p as u64));
        let mut max_r = 0;
        let mut pk = 1usize;
        while pk <= x / p {
            pk *= p;
            max_r += 1;
        }
        let series = reciprocal_series(&q, max_r);
        let mut pk = 1usize;
        for v in series.into_iter().skip(1) {
            pk *= p;
            lam[pk] = v;
        }
    }
    for k in 2..=x {
        let p = spf[k] as usize;
        let mut pe = 1;
        let mut r = k;
        while r % p == 0 {
            r /= p;
            pe *= p;
        }
        if r != 1 {
            let v = Integer::from(&lam[pe] * &lam[r]);
            lam[k] = v;
        }
    }
    lam.remove(0);
    Ok(lam)
}

/// h_ν = 1 for ν ∈ {0, k−1, 2(k−1), ...} up to m = (w−1)/2.
pub fn sym_hodge(n: u32, k: u32) -> Vec<u32> {
    let w = n * (k - 1);
    let m = (w - 1) / 2;
    (0..=m).map(|nu| u32::from(nu % (k - 1) == 0)).collect()
}

pub fn sym_label(curve: &CurveSpec, n: u32) -> String {
    format!("{}.sym{n}", curve.label)
}

pub fn sym_lfunction_data(curve: &CurveSpec, n: u32, x: usize, eps: i8) -> Result<LFunctionData> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidData(format!("symmetric power {n} must be odd and at least 3")));
    }
    curve.validate()?;
    let conductor = curve
        .conductor
        .checked_pow(n)
        .ok_or_else(|| Error::InvalidData(format!("conductor {}^{n} overflows", curve.conductor)))?;
    let coeffs = sym_dirichlet_coeffs(curve, n, x)?;
    let data = LFunctionData::new(
        n + 1,
        n,
        conductor,
        sym_hodge(n, 2),
        eps,
        coeffs.into_iter().map(Rational::from).collect(),
        sym_label(curve, n),
    )?;
    Ok(data)
}

/// ε(Sym^n E) for a semistable curve and odd n: ε_∞ = ∏_ν i^{n−2ν+1}
/// times ε_p = −a_p at each prime of multiplicative reduction.
pub fn sym_root_number(curve: &CurveSpec, n: u32) -> Result<i8> {
    if n % 2 == 0 {
        return Err(Error::InvalidData(format!("symmetric power {n} must be odd")));
    }
    let mut quarter_turns = 0u32;
    for nu in 0..=(n - 1) / 2 {
        quarter_turns += n - 2 * nu + 1;
    }
    // n odd makes every exponent even, so ε_∞ = ±1
    let mut eps: i8 = if quarter_turns % 4 == 0 { 1 } else { -1 };
    for p in curve::prime_factors(Integer::from(curve.conductor)) {
        let p = p.to_u64().expect("prime below the conductor");
        if curve.conductor % (p * p) == 0 {
            return Err(Error::InvalidCurve(format!(
                "{}: additive reduction at {p}; supply the root number explicitly",
                curve.label
            )));
        }
        let ap = ap_count(curve, p, DEFAULT_COUNT_BOUND)?;
        eps *= -(ap as i8);
    }
    Ok(eps)
}

/// Root numbers keyed by (curve label, n); lines `label n eps`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpsTable {
    map: HashMap<(String, u32), i8>,
}

impl EpsTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse { line: i + 1, message: m };
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(err(format!("expected 'label n eps', got '{line}'")));
            }
            let n: u32 = t[1].parse().map_err(|_| err(format!("bad power '{}'", t[1])))?;
            let e: i8 = t[2].parse().map_err(|_| err(format!("bad sign '{}'", t[2])))?;
            if e != 1 && e != -1 {
                return Err(err(format!("sign must be +1 or -1, got {e}")));
            }
            if map.insert((t[0].to_string(), n), e).is_some() {
                return Err(err(format!("duplicate entry for {} {n}", t[0])));
            }
        }
        Ok(EpsTable { map })
    }

    pub fn get(&self, label: &str, n: u32) -> Option<i8> {
        self.map.get(&(label.to_string(), n)).copied()
    }

    pub fn insert(&mut self, label: &str, n: u32, eps: i8) {
        self.map.insert((label.to_string(), n), eps);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Curves bundled with the crate, with their own root numbers.
pub const BUNDLED_CURVES: &str = include_str!("../../data/curves.txt");
pub const BUNDLED_EPS: &str = include_str!("../../data/eps.txt");

pub fn bundled_curves() -> Vec<CurveSpec> {
    BUNDLED_CURVES
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| CurveSpec::parse_line(l).expect("bundled curve is valid"))
        .collect()
}

pub fn bundled_curve(label: &str) -> Option<CurveSpec> {
    bundled_curves().into_iter().find(|c| c.label == label)
}

pub fn bundled_eps() -> EpsTable {
    EpsTable::parse(BUNDLED_EPS).expect("bundled eps table is valid")
}
