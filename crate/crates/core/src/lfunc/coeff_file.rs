//! Text format for L-function data.
//!
//! ```text
//! # comments start with '#'
//! version=1
//! label=11a1.sym3
//! degree=4
//! weight=3
//! conductor=1331
//! hodge=1,1
//! eps=1
//! 1 1
//! 2 0
//! 3 -12
//! ```
//!
//! Header lines are `key=value`; `version`, `label`, `bplus` and `bminus`
//! are optional. Coefficient lines are `n value` with n = 1, 2, 3, ... in
//! order; values are integers, decimals (optionally with an exponent) or
//! fractions `p/q`, and are stored exactly.

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::LFunctionData;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Exact value of a decimal or fraction literal.
pub fn parse_exact(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: Integer = p.trim().parse().ok()?;
        let q: Integer = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational::from((p, q)));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: Integer = if digits.is_empty() {
        Integer::new()
    } else {
        digits.parse().ok()?
    };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = Integer::from(10);
    Some(if scale >= 0 {
        Rational::from(num * ten.pow(scale as u32))
    } else {
        Rational::from((num, ten.pow((-scale) as u32)))
    })
}

/// Decimal string when the denominator is of the form 2^a 5^b, else `p/q`.
pub fn format_exact(r: &Rational) -> String {
    let den = r.denom().clone();
    if den == 1 {
        return r.numer().to_string();
    }
    let mut d = den.clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while d.is_divisible_u(2) {
        d /= 2u32;
        twos += 1;
    }
    while d.is_divisible_u(5) {
        d /= 5u32;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let k = twos.max(fives);
    let scaled = Integer::from(r.numer() * Integer::from(10).pow(k)) / &den;
    let neg = scaled < 0;
    let mut digits = scaled.abs().to_string();
    while digits.len() <= k as usize {
        digits.insert(0, '0');
    }
    let split = digits.len() - k as usize;
    let mut out = format!("{}.{}", &digits[..split], &digits[split..]);
    if neg {
        out.insert(0, '-');
    }
    out
}

#[derive(Default)]
struct Header {
    version: Option<u32>,
    degree: Option<u32>,
    weight: Option<u32>,
    conductor: Option<u64>,
    hodge: Option<Vec<u32>>,
    eps: Option<i8>,
    label: Option<String>,
    bplus: u32,
    bminus: u32,
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| perr(line, format!("bad value '{}' for {key}", v.trim())))
}

pub fn parse_coeff_file(text: &str) -> Result<LFunctionData> {
    let mut h = Header::default();
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut first_coeff_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            if !coeffs.is_empty() {
                return Err(perr(ln, "header line after coefficient data"));
            }
            let key = k.trim();
            match key {
                "version" => {
                    let ver: u32 = num(ln, key, v)?;
                    if ver != FORMAT_VERSION {
                        return Err(perr(ln, format!("unsupported format version {ver}")));
                    }
                    h.version = Some(ver);
                }
                "degree" => h.degree = Some(num(ln, key, v)?),
                "weight" => h.weight = Some(num(ln, key, v)?),
                "conductor" => h.conductor = Some(num(ln, key, v)?),
                "hodge" => {
                    let list: Result<Vec<u32>> = v.split(',').map(|x| num(ln, key, x)).collect();
                    h.hodge = Some(list?);
                }
                "eps" => {
                    let e: i8 = num(ln, key, v)?;
                    if e != 1 && e != -1 {
                        return Err(perr(ln, format!("eps must be +1 or -1, got {e}")));
                    }
                    h.eps = Some(e);
                }
                "label" => h.label = Some(v.trim().to_string()),
                "bplus" => h.bplus = num(ln, key, v)?,
                "bminus" => h.bminus = num(ln, key, v)?,
                _ => return Err(perr(ln, format!("unknown header key '{key}'"))),
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(ns), Some(vs), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(perr(ln, "expected 'n value' or 'key=value'"));
        };
        let n: usize = ns
            .parse()
            .map_err(|_| perr(ln, format!("bad index '{ns}'")))?;
        let expected = coeffs.len() + 1;
        if n < expected {
            return Err(perr(ln, format!("duplicate or out-of-order index {n}")));
        }
        if n > expected {
            return Err(perr(ln, format!("gap: expected index {expected}, found {n}")));
        }
        let val = parse_exact(vs).ok_or_else(|| perr(ln, format!("bad coefficient '{vs}'")))?;
        if coeffs.is_empty() {
            first_coeff_line = ln;
        }
        coeffs.push(val);
    }
    let missing = |k: &str| perr(first_coeff_line, format!("missing header '{k}'"));
    let data = LFunctionData {
        degree: h.degree.ok_or_else(|| missing("degree"))?,
        weight: h.weight.ok_or_else(|| missing("weight"))?,
        conductor: h.conductor.ok_or_else(|| missing("conductor"))?,
        hodge: h.hodge.ok_or_else(|| missing("hodge"))?,
        b_plus: h.bplus,
        b_minus: h.bminus,
        root_number: h.eps.ok_or_else(|| missing("eps"))?,
        coefficients: coeffs,
        label: h.label.unwrap_or_default(),
    };
    let _ = h.version;
    data.validate()?;
    Ok(data)
}

pub fn write_coeff_file(data: &LFunctionData) -> String {
    let mut out = String::new();
    out.push_str(&format!("version={FORMAT_VERSION}\n"));
    if !data.label.is_empty() {
        out.push_str(&format!("label={}\n", data.label));
    }
    out.push_str(&format!("degree={}\n", data.degree));
    out.push_str(&format!("weight={}\n", data.weight));
    out.push_str(&format!("conductor={}\n", data.conductor));
    let hodge: Vec<String> = data.hodge.iter().map(|h| h.to_string()).collect();
    out.push_str(&format!("hodge={}\n", hodge.join(",")));
    out.push_str(&format!("eps={}\n", data.root_number));
    if data.b_plus != 0 {
        out.push_str(&format!("bplus={}\n", data.b_plus));
    }
    if data.b_minus != 0 {
        out.push_str(&format!("bminus={}\n", data.b_minus));
    }
    for (i, c) in data.coefficients.iter().enumerate() {
        out.push_str(&format!("{} {}\n", i + 1, format_exact(c)));
    }
    out
}
