//! Sufficient conditions for all zeros of p(z) to lie on the unit circle.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunc::{LFunctionData, SpecialValues};
use crate::mp;
use crate::special;
use crate::specialpoly::{build_P_poly, q_decomposition};

const ZETA_BITS: u32 = 128;

fn a_cache() -> &'static Mutex<HashMap<u32, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn zeta_ratio_sq(j: u32) -> Result<Float> {
    let a = special::zeta(&Float::with_val(ZETA_BITS, j as f64 + 0.5), ZETA_BITS)?;
    let b = special::zeta(&Float::with_val(ZETA_BITS, j as f64 + 1.5), ZETA_BITS)?;
    let r = Float::with_val(ZETA_BITS, a / b);
    Ok(Float::with_val(ZETA_BITS, r.square_ref()))
}

/// A_m = max_{1≤j≤m−1} (2π/(m−j)) (ζ(j+1/2)/ζ(j+3/2))^2.
pub fn compute_a_m(m: u32) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidData(format!("A_m needs m >= 2, got {m}")));
    }
    if let Some(&v) = a_cache().lock().expect("cache lock").get(&m) {
        return Ok(v);
    }
    let two_pi = mp::two_pi(ZETA_BITS);
    let mut best = Float::new(ZETA_BITS);
    for j in 1..m {
        let t = Float::with_val(ZETA_BITS, &two_pi * zeta_ratio_sq(j)?) / (m - j);
        if t > best {
            best = t;
        }
    }
    let v = best.to_f64();
    a_cache().lock().expect("cache lock").insert(m, v);
    Ok(v)
}

/// 2 m^{h_m} ≥ (1 + 1/m)^{h_0}, compared as 2 m^{h_m + h_0} ≥ (m+1)^{h_0}.
pub fn hodge_condition_for(m: u32, h0: u32, hm: u32) -> bool {
    let lhs = Integer::from(2) * Integer::from(m).pow(hm + h0);
    lhs >= Integer::from(m + 1).pow(h0)
}

pub fn hodge_condition(data: &LFunctionData) -> bool {
    let m = data.m();
    hodge_condition_for(m, data.hodge[0], data.hodge[m as usize])
}

/// Relative margin 1 − lhs/rhs of one coefficient inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    /// j for the chain inequality, 0 for the one involving the centre.
    pub j: u32,
    pub value: f64,
    pub error: f64,
    /// Strict inequality required.
    pub strict: bool,
}

impl Margin {
    pub fn holds(&self) -> bool {
        if self.strict {
            self.value > self.error
        } else {
            self.value >= -self.error
        }
    }
}

/// Margins of c_j < c_{j+1} (1 ≤ j ≤ m−1) and c_0 ≤ c_1 for the
/// coefficients c_j of P. The chain inequality at j is equivalent to
/// (m−j)^{−d/2} L(m+j+1) < (N/(2π)^d)^{1/2} L(m+j+2).
pub fn coefficient_inequalities(data: &LFunctionData, vals: &SpecialValues) -> Result<Vec<Margin>> {
    let m = data.m();
    if m < 2 {
        return Err(Error::InvalidData(format!("coefficient inequalities need m >= 2, got {m}")));
    }
    let p = build_P_poly(data, vals)?;
    let margin = |j: usize, strict: bool| -> Result<Margin> {
        let r = p.coeffs[j].div(&p.coeffs[j + 1]).map_err(|_| {
            Error::DivisionByZero(format!("coefficient {} of P contains zero", j + 1))
        })?;
        Ok(Margin {
            j: j as u32,
            value: 1.0 - r.mid_f64(),
            error: r.rad_f64(),
            strict,
        })
    };
    let mut out = Vec::with_capacity(m as usize);
    for j in 1..m as usize {
        out.push(margin(j, true)?);
    }
    out.push(margin(0, false)?);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateCase {
    M1,
    LargeN,
    /// Informational: the Q/T comparison holds on the circle.
    LargeM,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub case: GateCase,
    pub a_m: Option<f64>,
    pub n_threshold: Option<f64>,
    pub hodge_condition: Option<bool>,
    pub inequality_margins: Vec<Margin>,
    pub margins_positive: Option<bool>,
    pub notes: Vec<String>,
}

/// Finite exceptions in the symmetric-power corollary: (k, n, smallest N
/// covered). Other (k, n) need N ≥ 13.
pub const COROLLARY_EXCEPTIONS: &[(u32, u32, u64)] = &[(2, 5, 46), (2, 7, 17), (4, 3, 17)];
pub const COROLLARY_MIN_LEVEL: u64 = 13;

/// Whether the corollary's level bound covers Sym^n of a weight-k form of
/// level N. Reporting only.
pub fn corollary_covers(k: u32, n: u32, level: u64) -> bool {
    let min = COROLLARY_EXCEPTIONS
        .iter()
        .find(|e| e.0 == k && e.1 == n)
        .map_or(COROLLARY_MIN_LEVEL, |e| e.2);
    level >= min
}

pub fn theorem_gate(data: &LFunctionData, vals: &SpecialValues) -> Result<GateReport> {
    let m = data.m();
    let mut rep = GateReport {
        case: GateCase::None,
        a_m: None,
        n_threshold: None,
        hodge_condition: None,
        inequality_margins: Vec::new(),
        margins_positive: None,
        notes: Vec::new(),
    };
    if m == 1 {
        if data.hodge[0] <= 1 {
            rep.case = GateCase::M1;
            rep.notes.push("m = 1 with h_0 <= 1".into());
        } else {
            rep.notes.push(format!("m = 1 but h_0 = {} > 1", data.hodge[0]));
        }
        return Ok(rep);
    }
    let a = compute_a_m(m)?;
    let thr = a.powi(data.degree as i32);
    let hc = hodge_condition(data);
    rep.a_m = Some(a);
    rep.n_threshold = Some(thr);
    rep.hodge_condition = Some(hc);
    rep.inequality_margins = coefficient_inequalities(data, vals)?;
    let all = rep.inequality_margins.iter().all(Margin::holds);
    rep.margins_positive = Some(all);
    if hc && (data.conductor as f64) > thr {
        rep.case = GateCase::LargeN;
        rep.notes.push(format!("N = {} > A_{m}^{} = {thr:.6e}", data.conductor, data.degree));
        return Ok(rep);
    }
    if !hc {
        rep.notes.push("Hodge condition fails".into());
    }
    if (data.conductor as f64) <= thr {
        rep.notes.push(format!("N = {} <= A_{m}^{} = {thr:.6e}; direct verification needed", data.conductor, data.degree));
    }
    if all {
        rep.notes.push("all coefficient inequalities hold for these values".into());
    }
    match q_decomposition(data, vals, 256, vals.central.prec()) {
        Ok(q) if q.rouche => {
            rep.case = GateCase::LargeM;
            rep.notes.push("Q and z^m T(1/z) have the same number of zeros in the disc".into());
        }
        Ok(_) => rep.notes.push("S bound too weak for the large-m comparison".into()),
        Err(e) => rep.notes.push(format!("large-m comparison unavailable: {e}")),
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_m_values() {
        let a2 = compute_a_m(2).unwrap();
        assert!(a2 > 23.80 && a2 <= 23.83, "{a2}");
        let a3 = compute_a_m(3).unwrap();
        assert!(a3 > 11.90 && a3 <= 11.92, "{a3}");
        assert!(compute_a_m(1).is_err());
    }

    #[test]
    fn hodge_examples() {
        assert!(hodge_condition_for(2, 1, 1));
        // h_m = 0: 2 ≥ (1 + 1/m)^{h_0} fails once h_0 > ln 2 / ln(1 + 1/m)
        assert!(hodge_condition_for(3, 2, 0));
        assert!(!hodge_condition_for(3, 3, 0));
        for m in 2..40 {
            assert!(hodge_condition_for(m, 1, 1));
        }
    }

    #[test]
    fn exceptions() {
        assert!(!corollary_covers(2, 5, 43));
        assert!(corollary_covers(2, 5, 46));
        assert!(!corollary_covers(2, 7, 15));
        assert!(corollary_covers(2, 3, 13));
        assert!(!corollary_covers(2, 3, 11));
    }
}
