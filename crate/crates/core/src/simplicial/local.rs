//! Twisted coboundaries of a rank-one local system and their cohomology.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::json;

use crate::error::Result;
use crate::field::Field;
use crate::matrix::Matrix;
use crate::report::BettiReport;
use crate::simplicial::cocycle::EdgeCocycle;
use crate::simplicial::complex::SimplicialComplex;

/// Edge weights `rho_e = exp(-theta_e)`, exact when every weight is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalSystem {
    Exact(BTreeMap<(usize, usize), BigRational>),
    Float(BTreeMap<(usize, usize), f64>),
}

impl LocalSystem {
    /// Validates the cocycle, then takes exact weights when possible.
    pub fn from_cocycle(complex: &SimplicialComplex, theta: &EdgeCocycle) -> Result<Self> {
        theta.check(complex)?;
        if theta.has_exact_weights() {
            Ok(Self::Exact(
                theta
                    .values()
                    .map(|(&e, v)| (e, v.exact_weight().expect("exact weight")))
                    .collect(),
            ))
        } else {
            Ok(Self::float_from(complex, theta)?)
        }
    }

    /// Floating weights regardless of exactness.
    pub fn float_from(complex: &SimplicialComplex, theta: &EdgeCocycle) -> Result<Self> {
        theta.check(complex)?;
        Ok(Self::Float(theta.values().map(|(&e, v)| (e, v.weight())).collect()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }

    /// Largest `|rho_ab rho_bc - rho_ac|` over triangles (0 in exact mode when compatible).
    pub fn compatibility_defect(&self, complex: &SimplicialComplex) -> f64 {
        let mut worst: f64 = 0.0;
        for t in complex.faces(2) {
            let (ab, bc, ac) = ((t[0], t[1]), (t[1], t[2]), (t[0], t[2]));
            let d = match self {
                Self::Exact(w) => {
                    if &w[&ab] * &w[&bc] == w[&ac] {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
                Self::Float(w) => (w[&ab] * w[&bc] - w[&ac]).abs(),
            };
            worst = worst.max(d);
        }
        worst
    }
}

/// Matrix of `d_rho : C^k -> C^{k+1}` in the basis of sorted faces.
#[derive(Clone, Debug, PartialEq)]
pub enum Coboundary {
    Exact(Matrix<BigRational>),
    Float(DMatrix<f64>),
}

impl Coboundary {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Self::Exact(m) => m.shape(),
            Self::Float(m) => m.shape(),
        }
    }

    /// Exact rank, or the count of singular values above `tol * max(largest, 1)`.
    pub fn rank(&self, tol: f64) -> usize {
        match self {
            Self::Exact(m) => m.rank(),
            Self::Float(m) => {
                if m.is_empty() {
                    return 0;
                }
                let s = m.clone().singular_values();
                let threshold = tol * s.max().max(1.0);
                s.iter().filter(|&&x| x >= threshold).count()
            }
        }
    }

    /// Largest entry of `next * self`; exactly 0 when the product vanishes in exact mode.
    pub fn compose_max_abs(&self, next: &Self) -> f64 {
        match (self, next) {
            (Self::Exact(a), Self::Exact(b)) => (b * a).max_abs(),
            (Self::Float(a), Self::Float(b)) => (b * a).amax(),
            _ => panic!("mixed exact and floating coboundaries"),
        }
    }

    /// `c -> d_rho c` as a dense floating matrix.
    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            Self::Exact(m) => DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)].to_complex().re),
            Self::Float(m) => m.clone(),
        }
    }
}

/// `(d_rho c)(v_0..v_{k+1}) = rho_{v_0 v_1} c(v_1..v_{k+1}) + sum_{i >= 1} (-1)^i c(v_0..^v_i..v_{k+1})`.
pub fn twisted_coboundary(complex: &SimplicialComplex, rho: &LocalSystem, k: usize) -> Coboundary {
    let rows = complex.faces(k + 1);
    let cols = complex.faces(k).len();
    let mut entries: Vec<(usize, usize, usize, i64)> = Vec::new();
    for (r, s) in rows.iter().enumerate() {
        for i in 0..s.len() {
            let face: Vec<usize> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            let c = complex.face_index(&face).expect("faces are closed under subsets");
            let sign = if i % 2 == 0 { 1 } else { -1 };
            entries.push((r, c, i, sign));
        }
    }
    match rho {
        LocalSystem::Exact(w) => {
            let mut m = Matrix::<BigRational>::zeros(rows.len(), cols);
            for (r, c, i, sign) in entries {
                let s = &rows[r];
                let v = if i == 0 {
                    w[&(s[0], s[1])].clone()
                } else {
                    BigRational::from_integer(sign.into())
                };
                m[(r, c)] = v;
            }
            Coboundary::Exact(m)
        }
        LocalSystem::Float(w) => {
            let mut m = DMatrix::<f64>::zeros(rows.len(), cols);
            for (r, c, i, sign) in entries {
                let s = &rows[r];
                m[(r, c)] = if i == 0 { w[&(s[0], s[1])] } else { sign as f64 };
            }
            Coboundary::Float(m)
        }
    }
}

/// Coboundaries of the constant system `rho = 1`.
pub fn untwisted_coboundary(complex: &SimplicialComplex, k: usize) -> Coboundary {
    let w = complex
        .edges()
        .iter()
        .map(|e| ((e[0], e[1]), <BigRational as One>::one()))
        .collect();
    twisted_coboundary(complex, &LocalSystem::Exact(w), k)
}

/// Largest entry of `d_rho^{k+1} d_rho^k` over all degrees.
pub fn coboundary_square(complex: &SimplicialComplex, rho: &LocalSystem) -> f64 {
    let top = complex.dim();
    (0..top.saturating_sub(1))
        .map(|k| twisted_coboundary(complex, rho, k).compose_max_abs(&twisted_coboundary(complex, rho, k + 1)))
        .fold(0.0, f64::max)
}

/// `dim H^k = dim C^k - rank d^k - rank d^{k-1}` for every degree.
pub fn twisted_betti(complex: &SimplicialComplex, theta: &EdgeCocycle, rank_tol: f64) -> Result<BettiReport> {
    let rho = LocalSystem::from_cocycle(complex, theta)?;
    Ok(betti_for(complex, theta, &rho, rank_tol))
}

pub fn betti_for(complex: &SimplicialComplex, theta: &EdgeCocycle, rho: &LocalSystem, rank_tol: f64) -> BettiReport {
    let top = complex.dim();
    let ranks: Vec<usize> = (0..top)
        .into_par_iter()
        .map(|k| twisted_coboundary(complex, rho, k).rank(rank_tol))
        .collect();
    let f = complex.f_vector();
    let dims: Vec<usize> = (0..=top)
        .map(|k| {
            let out = if k < top { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            f[k] - out - inc
        })
        .collect();
    let mut report = BettiReport::new("simplicial", dims, if rho.is_exact() { 0.0 } else { rank_tol });
    report.model = json!({ "f_vector": f, "vertices": complex.vertex_count() });
    report.twist = json!(theta.to_text().lines().collect::<Vec<_>>());
    report.expected_euler = Some(complex.euler_characteristic());
    report.notes.push(if rho.is_exact() {
        "exact rational arithmetic".to_string()
    } else {
        format!("floating weights, rank tolerance {rank_tol:e}")
    });
    report.finalize();
    report
}

/// `sum (-1)^k dim H^k` equals the Euler characteristic of the complex.
pub fn euler_check(report: &BettiReport) -> bool {
    report.euler_check()
}

/// True when the exact system has the trivial weight on every edge.
pub fn is_trivial(rho: &LocalSystem) -> bool {
    match rho {
        LocalSystem::Exact(w) => w.values().all(One::is_one),
        LocalSystem::Float(w) => w.values().all(|&x| x == 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::cocycle::LogRational;
    use num_bigint::BigInt;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn circle() -> SimplicialComplex {
        SimplicialComplex::build(vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn trivial_weights_give_classical_coboundary() {
        let c = SimplicialComplex::build(vec![vec![0, 1, 2]]).unwrap();
        let d0 = untwisted_coboundary(&c, 0).to_f64();
        let expected = DMatrix::from_row_slice(3, 3, &[-1.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 1.0]);
        assert_eq!(d0, expected);
    }

    #[test]
    fn circle_with_holonomy() {
        let c = circle();
        let mut theta = EdgeCocycle::zero(&c);
        theta.set(0, 1, LogRational::ln(int(2)));
        let rho = LocalSystem::from_cocycle(&c, &theta).unwrap();
        assert!(rho.is_exact());
        let d = twisted_coboundary(&c, &rho, 0);
        assert_eq!(d.rank(0.0), 3);
        assert!((d.to_f64().determinant().abs() - 0.5).abs() < 1e-15);
        assert_eq!(twisted_betti(&c, &theta, 1e-10).unwrap().dims, vec![0, 0]);
        assert_eq!(
            twisted_betti(&c, &EdgeCocycle::zero(&c), 1e-10).unwrap().dims,
            vec![1, 1]
        );
    }

    #[test]
    fn float_and_exact_agree() {
        let c = circle();
        let mut theta = EdgeCocycle::zero(&c);
        theta.set(1, 2, LogRational::rational(BigRational::new(1.into(), 3.into())));
        let rho = LocalSystem::from_cocycle(&c, &theta).unwrap();
        assert!(!rho.is_exact());
        assert_eq!(twisted_betti(&c, &theta, 1e-10).unwrap().dims, vec![0, 0]);
        assert!(is_trivial(
            &LocalSystem::from_cocycle(&c, &EdgeCocycle::zero(&c)).unwrap()
        ));
    }
}
