//! Closed edge cocycles with values `ln(r) + s`, `r > 0` and `s` rational.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational};
use crate::matrix::Matrix;
use crate::simplicial::complex::SimplicialComplex;

/// `ln(log) + linear` with `log > 0`. The weight `exp(-value)` is rational
/// exactly when `linear = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogRational {
    pub log: BigRational,
    pub linear: BigRational,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LogRational {
    pub fn zero() -> Self {
        Self {
            log: BigRational::one(),
            linear: BigRational::zero(),
        }
    }

    pub fn rational(value: BigRational) -> Self {
        Self {
            log: BigRational::one(),
            linear: value,
        }
    }

    /// `ln(r)`; panics unless `r > 0`.
    pub fn ln(r: BigRational) -> Self {
        assert!(r.is_positive(), "logarithm of a nonpositive rational");
        Self {
            log: r,
            linear: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log.is_one() && self.linear.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            log: &self.log * &rhs.log,
            linear: &self.linear + &rhs.linear,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            log: self.log.recip(),
            linear: -self.linear.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// `n * self`.
    pub fn times(&self, n: i64) -> Self {
        let mut log = BigRational::one();
        let base = if n >= 0 { self.log.clone() } else { self.log.recip() };
        for _ in 0..n.unsigned_abs() {
            log *= &base;
        }
        Self {
            log,
            linear: &self.linear * int(n),
        }
    }

    pub fn to_f64(&self) -> f64 {
        ln_rational(&self.log) + self.linear.to_f64().unwrap_or(f64::NAN)
    }

    /// `exp(-value)` when it is rational.
    pub fn exact_weight(&self) -> Option<BigRational> {
        self.linear.is_zero().then(|| self.log.recip())
    }

    pub fn weight(&self) -> f64 {
        (-self.to_f64()).exp()
    }

    /// Parses `s`, `ln(r)`, `-ln(r)` or `ln(r)+s` / `ln(r)-s` with rational `r > 0`, `s`.
    pub fn parse(token: &str) -> Option<Self> {
        let t = token.trim();
        if let Some(pos) = t.find("ln(") {
            let close = t[pos..].find(')')? + pos;
            let sign = match &t[..pos] {
                "" | "+" => 1,
                "-" => -1,
                _ => return None,
            };
            let r = parse_rational(&t[pos + 3..close])?;
            if !r.is_positive() {
                return None;
            }
            let rest = t[close + 1..].trim();
            let linear = if rest.is_empty() {
                BigRational::zero()
            } else if let Some(s) = rest.strip_prefix('+') {
                parse_rational(s)?
            } else if rest.starts_with('-') {
                parse_rational(rest)?
            } else {
                return None;
            };
            let log = if sign < 0 { r.recip() } else { r };
            return Some(Self { log, linear });
        }
        parse_rational(t).map(Self::rational)
    }
}

fn ln_rational(r: &BigRational) -> f64 {
    let ln_big = |n: &BigInt| -> f64 {
        let bits = n.bits();
        if bits < 1000 {
            n.to_f64().unwrap_or(f64::NAN).ln()
        } else {
            let shift = bits - 900;
            (n >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_big(r.numer()) - ln_big(r.denom())
}

impl fmt::Display for LogRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.log.is_one(), self.linear.is_zero()) {
            (true, _) => write!(f, "{}", format_rational(&self.linear)),
            (false, true) => write!(f, "ln({})", format_rational(&self.log)),
            (false, false) => {
                let s = format_rational(&self.linear);
                if self.linear.is_negative() {
                    write!(f, "ln({}){}", format_rational(&self.log), s)
                } else {
                    write!(f, "ln({})+{}", format_rational(&self.log), s)
                }
            }
        }
    }
}

/// Values on oriented edges `(a, b)`, `a < b`; the reversed edge carries the negative.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCocycle {
    values: BTreeMap<(usize, usize), LogRational>,
}

impl EdgeCocycle {
    pub fn new() -> Self {
        Self {
            values: BTreeMap::new(),
        }
    }

    pub fn zero(complex: &SimplicialComplex) -> Self {
        let mut c = Self::new();
        for e in complex.edges() {
            c.set(e[0], e[1], LogRational::zero());
        }
        c
    }

    /// `theta_ab = p(b) - p(a)`.
    pub fn coboundary(complex: &SimplicialComplex, p: &[LogRational]) -> Self {
        Self::zero(complex).vertex_gauge(p)
    }

    pub fn set(&mut self, a: usize, b: usize, value: LogRational) {
        if a < b {
            self.values.insert((a, b), value);
        } else {
            self.values.insert((b, a), value.neg());
        }
    }

    /// Value on the oriented edge `a -> b`.
    pub fn get(&self, a: usize, b: usize) -> Option<LogRational> {
        if a < b {
            self.values.get(&(a, b)).cloned()
        } else {
            self.values.get(&(b, a)).map(LogRational::neg)
        }
    }

    pub fn values(&self) -> impl Iterator<Item = (&(usize, usize), &LogRational)> {
        self.values.iter()
    }

    /// True when every weight `exp(-theta_e)` is rational.
    pub fn has_exact_weights(&self) -> bool {
        self.values.values().all(|v| v.linear.is_zero())
    }

    /// `theta'_ab = theta_ab + p(b) - p(a)`.
    pub fn vertex_gauge(&self, p: &[LogRational]) -> Self {
        let values = self
            .values
            .iter()
            .map(|(&(a, b), v)| ((a, b), v.add(&p[b]).sub(&p[a])))
            .collect();
        Self { values }
    }

    /// Every edge has a value, no value sits off the complex, and every
    /// triangle `(a, b, c)` has `theta_ab + theta_bc - theta_ac = 0`.
    pub fn check(&self, complex: &SimplicialComplex) -> Result<()> {
        for &(a, b) in self.values.keys() {
            if complex.face_index(&[a, b]).is_none() {
                return Err(Error::UnknownEdge(a, b));
            }
        }
        for e in complex.edges() {
            if !self.values.contains_key(&(e[0], e[1])) {
                return Err(Error::MissingEdge(e[0], e[1]));
            }
        }
        for t in complex.faces(2) {
            let (a, b, c) = (t[0], t[1], t[2]);
            let defect = self.values[&(a, b)]
                .add(&self.values[&(b, c)])
                .sub(&self.values[&(a, c)]);
            if !defect.is_zero() {
                return Err(Error::CocycleNotClosed {
                    triangle: [a, b, c],
                    defect: defect.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Lines `a b value`, one per edge with `a < b`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| Error::Parse {
                line: n + 1,
                message: message.to_string(),
            };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(err("expected `a b value`"));
            }
            let a: usize = parts[0].parse().map_err(|_| err("bad vertex"))?;
            let b: usize = parts[1].parse().map_err(|_| err("bad vertex"))?;
            if a == b {
                return Err(err("loop edge"));
            }
            let v = LogRational::parse(parts[2]).ok_or_else(|| err("bad cocycle value"))?;
            c.set(a, b, v);
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        self.values
            .iter()
            .map(|(&(a, b), v)| format!("{a} {b} {v}\n"))
            .collect()
    }

    /// Random closed cocycle with rational weights: an integer cocycle times
    /// `ln(r)` for a random base `r`, plus the coboundary of a random positive
    /// rational vertex potential.
    pub fn random_rational(complex: &SimplicialComplex, rng: &mut ChaCha8Rng) -> Self {
        let basis = integer_cocycle_basis(complex);
        let bases = [
            int(2),
            int(3),
            BigRational::new(3.into(), 2.into()),
            BigRational::new(5.into(), 4.into()),
        ];
        let r = bases[rng.random_range(0..bases.len())].clone();
        let mut z = vec![0i64; complex.edges().len()];
        for v in &basis {
            let coeff = rng.random_range(-2i64..=2);
            for (zi, vi) in z.iter_mut().zip(v) {
                *zi += coeff * vi;
            }
        }
        let mut c = Self::new();
        for (e, &ze) in complex.edges().iter().zip(&z) {
            c.set(e[0], e[1], LogRational::ln(r.clone()).times(ze));
        }
        let p: Vec<LogRational> = (0..complex.vertex_count())
            .map(|_| {
                let n = rng.random_range(1i64..=5);
                let d = rng.random_range(1i64..=5);
                LogRational::ln(BigRational::new(n.into(), d.into()))
            })
            .collect();
        c.vertex_gauge(&p)
    }
}

impl Default for EdgeCocycle {
    fn default() -> Self {
        Self::new()
    }
}

/// Integer vectors spanning the kernel of the untwisted `delta^1` over the rationals.
pub fn integer_cocycle_basis(complex: &SimplicialComplex) -> Vec<Vec<i64>> {
    let edges = complex.edges();
    let tris = complex.faces(2);
    if tris.is_empty() {
        return (0..edges.len())
            .map(|i| (0..edges.len()).map(|j| i64::from(i == j)).collect())
            .collect();
    }
    let mut m = Matrix::<BigRational>::zeros(tris.len(), edges.len());
    for (r, t) in tris.iter().enumerate() {
        let (a, b, c) = (t[0], t[1], t[2]);
        for (e, sign) in [([a, b], 1), ([b, c], 1), ([a, c], -1)] {
            let col = complex.face_index(&e).expect("edge of a triangle");
            m[(r, col)] = int(sign);
        }
    }
    m.kernel_basis()
        .into_iter()
        .map(|v| {
            let lcm = v
                .iter()
                .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
            v.iter()
                .map(|x| {
                    (x * BigRational::from_integer(lcm.clone()))
                        .to_integer()
                        .to_i64()
                        .expect("small entries")
                })
                .collect()
        })
        .collect()
}
