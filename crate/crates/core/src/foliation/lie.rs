//! Left-invariant metrics on Lie groups from structure constants, in exact arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, Field};
use crate::foliation::curvature::CurvatureReport;
use crate::geometry::{pairs, CurvatureTensor};

/// Structure constants `c^k_{ij}` (`[e_i, e_j] = sum_k c^k_{ij} e_k`) in an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraModel {
    dim: usize,
    constants: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LieAlgebraModel {
    pub fn new(dim: usize, constants: Vec<BigRational>) -> Result<Self> {
        if dim == 0 || dim > crate::exterior::MAX_FRAME_DIM {
            return Err(Error::InvalidFrameDimension(dim));
        }
        if constants.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                actual: constants.len(),
            });
        }
        let model = Self { dim, constants };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if model.c(i, j, k) != &-model.c(j, i, k).clone() {
                        return Err(Error::NotAntisymmetric(i, j, k));
                    }
                }
            }
        }
        if let Some((i, j, k)) = model.jacobi_violation() {
            return Err(Error::JacobiViolation(i, j, k));
        }
        Ok(model)
    }

    /// `o(3)` with `[e_1, e_2] = e_3`, `[e_2, e_3] = e_1`, `[e_3, e_1] = e_2`.
    pub fn so3() -> Self {
        let mut c = vec![rat(0); 27];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[(i * 3 + j) * 3 + k] = rat(1);
            c[(j * 3 + i) * 3 + k] = rat(-1);
        }
        Self::new(3, c).expect("o(3) is a Lie algebra")
    }

    pub fn abelian(dim: usize) -> Result<Self> {
        Self::new(dim, vec![rat(0); dim * dim * dim])
    }

    /// Multiplies every structure constant by `factor`.
    pub fn scaled(&self, factor: &BigRational) -> Self {
        Self {
            dim: self.dim,
            constants: self.constants.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &BigRational {
        &self.constants[(i * self.dim + j) * self.dim + k]
    }

    fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = rat(0);
                        for m in 0..n {
                            s += self.c(i, j, m) * self.c(m, k, l);
                            s += self.c(j, k, m) * self.c(m, i, l);
                            s += self.c(k, i, m) * self.c(m, j, l);
                        }
                        if !Zero::is_zero(&s) {
                            return Some((i, j, k));
                        }
                    }
                }
            }
        }
        None
    }

    /// True when `ad` is skew, i.e. the metric is bi-invariant.
    pub fn is_biinvariant(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.c(i, j, k) == &-self.c(i, k, j).clone())))
    }

    /// Levi-Civita coefficients from the Koszul formula:
    /// `Gamma_{ij}^k = (c^k_{ij} - c^i_{jk} + c^j_{ki}) / 2`.
    pub fn christoffel(&self) -> Vec<BigRational> {
        let n = self.dim;
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let mut g = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    g.push((self.c(i, j, k) - self.c(j, k, i) + self.c(k, i, j)) * &half);
                }
            }
        }
        g
    }

    pub fn curvature_tensor(&self) -> CurvatureTensor<BigRational> {
        CurvatureTensor::from_christoffel(self.dim, &self.christoffel())
    }

    /// `|[e_i, e_j]|^2 / 4`, the sectional curvature of a bi-invariant metric.
    pub fn bracket_formula(&self, i: usize, j: usize) -> BigRational {
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        (0..self.dim)
            .map(|k| self.c(i, j, k) * self.c(i, j, k))
            .sum::<BigRational>()
            * quarter
    }

    /// Sectional curvatures (exact) and the curvature operator spectrum.
    /// For bi-invariant metrics the Koszul route is cross-checked against the bracket formula.
    pub fn biinvariant_curvature(&self) -> Result<CurvatureReport> {
        let r = self.curvature_tensor();
        if self.is_biinvariant() {
            for (i, j) in pairs(self.dim) {
                let koszul = r.sectional(i, j);
                let formula = self.bracket_formula(i, j);
                if koszul != formula {
                    return Err(Error::InvalidModel(format!(
                        "sectional curvature ({i}, {j}): Koszul {} but bracket formula {}",
                        format_rational(&koszul),
                        format_rational(&formula)
                    )));
                }
            }
        }
        Ok(CurvatureReport::from_tensor(&r, |k| Some(format_rational(k))))
    }

    /// Lines `i j k value` giving `c^k_{ij}` with 0-based indices; the entry for
    /// `(j, i, k)` is implied. An optional `dim N` line fixes the dimension.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut dim = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |message: &str| Error::Parse {
                line: n + 1,
                message: message.to_string(),
            };
            if parts[0] == "dim" {
                let d = parts.get(1).and_then(|s| s.parse::<usize>().ok());
                dim = Some(d.ok_or_else(|| parse_err("expected `dim N`"))?);
                continue;
            }
            if parts.len() != 4 {
                return Err(parse_err("expected `i j k value`"));
            }
            let idx: Vec<usize> = parts[..3]
                .iter()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err("bad index"))?;
            let value = parse_rational(parts[3]).ok_or_else(|| parse_err("bad rational value"))?;
            entries.push((n + 1, idx[0], idx[1], idx[2], value));
        }
        let dim = dim.unwrap_or_else(|| entries.iter().map(|e| e.1.max(e.2).max(e.3) + 1).max().unwrap_or(0));
        let mut c: Vec<Option<BigRational>> = vec![None; dim * dim * dim];
        for (line, i, j, k, v) in entries {
            if i.max(j).max(k) >= dim {
                return Err(Error::Parse {
                    line,
                    message: "index exceeds dimension".into(),
                });
            }
            for (a, b, val) in [(i, j, v.clone()), (j, i, -v)] {
                let slot = &mut c[(a * dim + b) * dim + k];
                match slot {
                    Some(existing) if *existing != val => return Err(Error::NotAntisymmetric(a, b, k)),
                    _ => *slot = Some(val),
                }
            }
        }
        Self::new(dim, c.into_iter().map(|v| v.unwrap_or_else(|| rat(0))).collect())
    }

    pub fn to_text(&self) -> String {
        let n = self.dim;
        let mut out = format!("dim {n}\n");
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.c(i, j, k);
                    if !Zero::is_zero(v) {
                        out.push_str(&format!("{i} {j} {k} {}\n", format_rational(v)));
                    }
                }
            }
        }
        out
    }

    /// Largest absolute structure constant, for reporting.
    pub fn max_constant(&self) -> f64 {
        self.constants.iter().map(|c| c.abs().magnitude()).fold(0.0, f64::max)
    }
}
