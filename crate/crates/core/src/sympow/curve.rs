//! Rational elliptic curves in long Weierstrass form and naive point counts.

use rug::Integer;

use crate::error::{Error, Result};

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` with conductor `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub a: [i64; 5],
    pub conductor: u64,
    pub label: String,
    pub cm: bool,
}

/// Default largest prime for naive counting.
pub const DEFAULT_COUNT_BOUND: u64 = 10_000_000;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: Integer) -> Vec<Integer> {
    let mut out = Vec::new();
    n.abs_mut();
    let mut p = Integer::from(2);
    while Integer::from(&p * &p) <= n {
        if n.is_divisible(&p) {
            out.push(p.clone());
            while n.is_divisible(&p) {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl CurveSpec {
    pub fn new(a: [i64; 5], conductor: u64, label: impl Into<String>) -> Result<Self> {
        let c = CurveSpec {
            a,
            conductor,
            label: label.into(),
            cm: false,
        };
        c.validate()?;
        Ok(c)
    }

    /// One line `a1 a2 a3 a4 a6 N label`, optionally followed by `cm`.
    pub fn parse_line(line: &str) -> Result<Self> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 7 || toks.len() > 8 {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected 'a1 a2 a3 a4 a6 N label', got '{}'", line.trim()),
            });
        }
        let mut a = [0i64; 5];
        for (i, t) in toks[..5].iter().enumerate() {
            a[i] = t.parse().map_err(|_| Error::Parse {
                line: 1,
                message: format!("bad coefficient a{} = '{t}'", [1, 2, 3, 4, 6][i]),
            })?;
        }
        let conductor = toks[5].parse().map_err(|_| Error::Parse {
            line: 1,
            message: format!("bad conductor '{}'", toks[5]),
        })?;
        let cm = match toks.get(7) {
            None => false,
            Some(&"cm") => true,
            Some(t) => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected trailing token '{t}'"),
                })
            }
        };
        let c = CurveSpec {
            a,
            conductor,
            label: toks[6].to_string(),
            cm,
        };
        c.validate()?;
        Ok(c)
    }

    /// Reads the first non-comment line of a curve file.
    pub fn parse_file(text: &str) -> Result<Self> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            return CurveSpec::parse_line(line).map_err(|e| match e {
                Error::Parse { message, .. } => Error::Parse { line: i + 1, message },
                other => other,
            });
        }
        Err(Error::Parse {
            line: 0,
            message: "no curve line found".into(),
        })
    }

    pub fn to_line(&self) -> String {
        let [a1, a2, a3, a4, a6] = self.a;
        format!("{a1} {a2} {a3} {a4} {a6} {} {}", self.conductor, self.label)
    }

    /// (b2, b4, b6, b8).
    pub fn b_invariants(&self) -> [Integer; 4] {
        let [a1, a2, a3, a4, a6] = self.a.map(Integer::from);
        let b2 = Integer::from(&a1 * &a1) + Integer::from(4 * &a2);
        let b4 = Integer::from(2 * &a4) + Integer::from(&a1 * &a3);
        let b6 = Integer::from(&a3 * &a3) + Integer::from(4 * &a6);
        let b8 = Integer::from(&a1 * &a1) * &a6 + Integer::from(4 * &a2) * &a6
            - Integer::from(&a1 * &a3) * &a4
            + Integer::from(&a2 * &a3) * &a3
            - Integer::from(&a4 * &a4);
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> Integer {
        let [b2, b4, b6, b8] = self.b_invariants();
        let t1 = Integer::from(&b2 * &b2) * &b8;
        let t2 = Integer::from(&b4 * &b4) * &b4 * 8u32;
        let t3 = Integer::from(&b6 * &b6) * 27u32;
        let t4 = Integer::from(&b2 * &b4) * &b6 * 9u32;
        -t1 - t2 - t3 + t4
    }

    /// Nonzero discriminant, squarefree conductor whose primes are exactly
    /// the primes of the discriminant, and no CM flag.
    pub fn validate(&self) -> Result<()> {
        if self.cm {
            return Err(Error::InvalidCurve(format!("{}: CM curves are not supported", self.label)));
        }
        let disc = self.discriminant();
        if disc == 0 {
            return Err(Error::InvalidCurve(format!("{}: singular model", self.label)));
        }
        if self.conductor == 0 || !is_squarefree(self.conductor) {
            return Err(Error::InvalidCurve(format!(
                "{}: conductor {} is not squarefree",
                self.label, self.conductor
            )));
        }
        let dp = prime_factors(disc);
        let np = prime_factors(Integer::from(self.conductor));
        if dp != np {
            return Err(Error::InvalidCurve(format!(
                "{}: primes of the discriminant {:?} differ from those of the conductor {:?}",
                self.label,
                dp.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                np.iter().map(|p| p.to_string()).collect::<Vec<_>>()
            )));
        }
        Ok(())
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.conductor % p == 0
    }
}

fn rem(a: &Integer, p: u64) -> u64 {
    let r = Integer::from(a % p);
    let r = if r < 0 { r + p } else { r };
    r.to_u64().expect("residue fits")
}

/// Number of affine solutions plus the point at infinity, by enumeration.
pub fn count_points(curve: &CurveSpec, p: u64) -> u64 {
    if p == 2 {
        let a: Vec<u64> = curve.a.iter().map(|&v| v.rem_euclid(2) as u64).collect();
        let mut n = 1;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = y * y + a[0] * x * y + a[2] * y;
                let rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
                if (lhs + rhs) % 2 == 0 {
                    n += 1;
                }
            }
        }
        return n;
    }
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    let [b2, b4, b6, _] = curve.b_invariants();
    let (b2, b4, b6) = (rem(&b2, p), rem(&Integer::from(2 * b4), p), rem(&b6, p));
    let mut square = vec![false; p as usize];
    for y in 0..=p / 2 {
        square[((y * y) % p) as usize] = true;
    }
    let mut n = 1u64;
    for x in 0..p {
        let f = (((4 * x % p + b2) % p * x % p + b4) % p * x % p + b6) % p;
        if f == 0 {
            n += 1;
        } else if square[f as usize] {
            n += 2;
        }
    }
    n
}

/// a_p = p + 1 − #E(F_p). At primes of multiplicative reduction this gives
/// +1 (split) or −1 (nonsplit).
pub fn ap_count(curve: &CurveSpec, p: u64, bound: u64) -> Result<i64> {
    if p > bound {
        return Err(Error::CountingBound { p, bound });
    }
    if !is_prime(p) {
        return Err(Error::InvalidData(format!("{p} is not prime")));
    }
    Ok(p as i64 + 1 - count_points(curve, p) as i64)
}
