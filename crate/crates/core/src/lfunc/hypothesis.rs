//! Checks of the standing assumptions on a dataset and its special values.

use std::fmt;

use rug::Float;
use serde::Serialize;

use super::{LFunctionData, SpecialValues};
use crate::mp::Ball;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Structural { message: String },
    Grc { n: usize },
    FunctionalEquation { s: i64, residual: f64, bound: f64 },
    CentralNegative { value: f64, bound: f64 },
    CentralNonzero { value: f64, bound: f64 },
    CentralInconsistent { value: f64, alt: f64, bound: f64 },
    Monotonicity { s: i64, lower: f64, upper: f64 },
    OddChain { j: i64, lower: f64, upper: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structural { message } => write!(f, "structural: {message}"),
            Violation::Grc { n } => write!(f, "GRC bound fails at n = {n}"),
            Violation::FunctionalEquation { s, residual, bound } => {
                write!(f, "functional equation at s = {s}: residual {residual:e} > {bound:e}")
            }
            Violation::CentralNegative { value, bound } => {
                write!(f, "central value {value:e} below -{bound:e}")
            }
            Violation::CentralNonzero { value, bound } => {
                write!(f, "odd sign but central value {value:e} exceeds {bound:e}")
            }
            Violation::CentralInconsistent { value, alt, bound } => {
                write!(f, "central value {value:e} and recomputation {alt:e} differ by more than {bound:e}")
            }
            Violation::Monotonicity { s, lower, upper } => {
                write!(f, "Λ({s}) = {lower:e} exceeds Λ({}) = {upper:e}", s + 1)
            }
            Violation::OddChain { j, lower, upper } => {
                write!(f, "odd chain fails at j = {j}: {lower:e} > {upper:e}")
            }
        }
    }
}

fn slack(a: &Ball, b: &Ball) -> f64 {
    let scale = a.mid_f64().abs().max(b.mid_f64().abs());
    scale * 2f64.powi(-(a.prec().min(b.prec()) as i32 - 4))
}

/// `a ≤ b` within the combined radii.
fn le_within(a: &Ball, b: &Ball) -> bool {
    let d = Float::with_val(a.prec().max(b.prec()), &a.mid - &b.mid).to_f64();
    d <= a.rad_f64() + b.rad_f64() + slack(a, b)
}

/// Returns every failed assumption; empty means all checks pass.
pub fn verify_hypothesis(data: &LFunctionData, vals: &SpecialValues) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Err(e) = data.validate() {
        out.push(Violation::Structural {
            message: e.to_string(),
        });
        return out;
    }
    if vals.weight != data.weight || vals.values.len() != data.weight as usize {
        out.push(Violation::Structural {
            message: "special values do not match the weight".into(),
        });
        return out;
    }
    for n in data.grc_violations() {
        out.push(Violation::Grc { n });
    }
    let w = data.weight as i64;
    let m = data.m() as i64;
    let eps = data.root_number as i32;
    let v = |s: i64| &vals.values[(s - 1) as usize];

    for s in 1..=m {
        let a = v(s);
        let b = v(w + 1 - s).scale(&Float::with_val(b_prec(a), eps));
        let residual = Float::with_val(a.prec(), &a.mid - &b.mid).abs().to_f64();
        let bound = a.rad_f64() + b.rad_f64() + slack(a, &b);
        if residual > bound {
            out.push(Violation::FunctionalEquation { s, residual, bound });
        }
    }

    let c = &vals.central;
    if let Some(alt) = &vals.central_alt {
        if !c.overlaps(alt, slack(c, alt)) {
            out.push(Violation::CentralInconsistent {
                value: c.mid_f64(),
                alt: alt.mid_f64(),
                bound: c.rad_f64() + alt.rad_f64(),
            });
        }
    }
    if c.mid_f64() < -c.rad_f64() {
        out.push(Violation::CentralNegative {
            value: c.mid_f64(),
            bound: c.rad_f64(),
        });
    }

    if eps == 1 {
        for s in m + 1..w {
            if !le_within(v(s), v(s + 1)) {
                out.push(Violation::Monotonicity {
                    s,
                    lower: v(s).mid_f64(),
                    upper: v(s + 1).mid_f64(),
                });
            }
        }
    } else {
        if c.mid_f64().abs() > c.rad_f64() {
            out.push(Violation::CentralNonzero {
                value: c.mid_f64(),
                bound: c.rad_f64(),
            });
        }
        if v(m + 2).mid_f64() < -v(m + 2).rad_f64() {
            out.push(Violation::Monotonicity {
                s: m + 1,
                lower: 0.0,
                upper: v(m + 2).mid_f64(),
            });
        }
        // Λ(m+1+j)/j nondecreasing in j
        for j in 1..m {
            let p = v(m + 1 + j).mid.prec();
            let lo = v(m + 1 + j).scale(&Float::with_val(p, j + 1));
            let hi = v(m + 2 + j).scale(&Float::with_val(p, j));
            if !le_within(&lo, &hi) {
                out.push(Violation::OddChain {
                    j,
                    lower: v(m + 1 + j).mid_f64() / j as f64,
                    upper: v(m + 2 + j).mid_f64() / (j + 1) as f64,
                });
            }
        }
    }
    out
}

fn b_prec(a: &Ball) -> u32 {
    a.prec()
}
