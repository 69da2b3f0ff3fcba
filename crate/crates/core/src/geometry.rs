//! Homogeneous transverse geometry described by an orthonormal frame with
//! constant connection coefficients.
//!
//! `christoffel[i][j][k]` is the `e_k` component of `nabla_{e_i} e_j`. Frame
//! vectors act on Fourier modes through a constant matrix: `e_i` applied to
//! `exp(2 pi i k.x)` gives `2 pi i (D k)_i exp(2 pi i k.x)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exterior::{clifford_operator, derivation_operator, unit, FormBasis, GradedOperator};
use crate::field::Field;
use crate::fourier::TrigPoly;
use crate::matrix::Matrix;

/// `R[i][j][l][m]`: the `e_m` component of `R(e_i, e_j) e_l`, flattened.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor<T> {
    q: usize,
    data: Vec<T>,
}

impl<T: Field> CurvatureTensor<T> {
    /// `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z` for constant coefficients.
    pub fn from_christoffel(q: usize, gamma: &[T]) -> Self {
        let g = |i: usize, j: usize, k: usize| &gamma[(i * q + j) * q + k];
        let mut data = vec![T::zero(); q * q * q * q];
        for i in 0..q {
            for j in 0..q {
                let bracket: Vec<T> = (0..q).map(|p| g(i, j, p).clone() - g(j, i, p).clone()).collect();
                for l in 0..q {
                    for m in 0..q {
                        let mut acc = T::zero();
                        for p in 0..q {
                            acc = acc + g(j, l, p).clone() * g(i, p, m).clone();
                            acc = acc - g(i, l, p).clone() * g(j, p, m).clone();
                            acc = acc - bracket[p].clone() * g(p, l, m).clone();
                        }
                        data[((i * q + j) * q + l) * q + m] = acc;
                    }
                }
            }
        }
        Self { q, data }
    }

    pub fn dim(&self) -> usize {
        self.q
    }

    pub fn get(&self, i: usize, j: usize, l: usize, m: usize) -> &T {
        &self.data[((i * self.q + j) * self.q + l) * self.q + m]
    }

    /// `K(e_i, e_j) = g(R(e_i, e_j) e_j, e_i)`.
    pub fn sectional(&self, i: usize, j: usize) -> T {
        self.get(i, j, j, i).clone()
    }

    /// Curvature operator on `Lambda^2` in the basis `e_i ^ e_j`, `i < j`:
    /// entry `((ij), (kl)) = g(R(e_i, e_j) e_l, e_k)`.
    pub fn operator_matrix(&self) -> Matrix<T> {
        let pairs = pairs(self.q);
        Matrix::from_fn(pairs.len(), pairs.len(), |r, c| {
            let ((i, j), (k, l)) = (pairs[r], pairs[c]);
            self.get(i, j, l, k).clone()
        })
    }

    /// `R(e_i, e_j)` acting on forms as a derivation.
    pub fn on_forms(&self, basis: &FormBasis, i: usize, j: usize) -> GradedOperator<T> {
        // On covectors R acts by minus the transpose of its vector action.
        let image = Matrix::from_fn(self.q, self.q, |l, m| -self.get(i, j, l, m).clone());
        derivation_operator(&image, basis).expect("shape matches frame")
    }

    /// The curvature endomorphism `sum_{i<j} e_i . e_j . R(e_i, e_j)` of the Weitzenbock formula.
    pub fn weitzenbock_term(&self, basis: &FormBasis) -> GradedOperator<T> {
        let mut total = GradedOperator::zero(basis);
        for (i, j) in pairs(self.q) {
            let ci = clifford_operator(&unit::<T>(self.q, i), basis).unwrap();
            let cj = clifford_operator(&unit::<T>(self.q, j), basis).unwrap();
            total = total.add(&ci.compose(&cj).compose(&self.on_forms(basis, i, j)));
        }
        total
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }
}

pub fn pairs(q: usize) -> Vec<(usize, usize)> {
    (0..q).flat_map(|i| (i + 1..q).map(move |j| (i, j))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameGeometry {
    frame_dim: usize,
    mode_dim: usize,
    derivative: Vec<Vec<f64>>,
    christoffel: Vec<f64>,
    mean_curvature: Vec<f64>,
}

impl FrameGeometry {
    pub fn new(derivative: Vec<Vec<f64>>, christoffel: Vec<f64>, mean_curvature: Vec<f64>) -> Result<Self> {
        let q = derivative.len();
        if q == 0 || q > crate::exterior::MAX_FRAME_DIM {
            return Err(Error::InvalidFrameDimension(q));
        }
        let m = derivative[0].len();
        if derivative.iter().any(|row| row.len() != m) || m == 0 {
            return Err(Error::InvalidModel("ragged derivative matrix".into()));
        }
        for (expected, actual) in [(q * q * q, christoffel.len()), (q, mean_curvature.len())] {
            if expected != actual {
                return Err(Error::DimensionMismatch { expected, actual });
            }
        }
        let geom = Self {
            frame_dim: q,
            mode_dim: m,
            derivative,
            christoffel,
            mean_curvature,
        };
        for i in 0..q {
            for j in 0..q {
                for k in 0..q {
                    if (geom.gamma(i, j, k) + geom.gamma(i, k, j)).abs() > 1e-12 {
                        return Err(Error::InvalidModel(format!(
                            "connection is not metric at ({i}, {j}, {k})"
                        )));
                    }
                }
                // Bracket of two frame fields must act on functions as the commutator, which is 0.
                let b = geom.bracket(i, j);
                for c in 0..m {
                    let s: f64 = (0..q).map(|p| b[p] * geom.derivative[p][c]).sum();
                    if s.abs() > 1e-12 {
                        return Err(Error::InvalidModel(format!(
                            "bracket [e_{i}, e_{j}] differentiates basic functions"
                        )));
                    }
                }
            }
        }
        Ok(geom)
    }

    /// Coordinate frame on the flat torus `T^q`.
    pub fn flat_torus(q: usize) -> Result<Self> {
        let derivative = (0..q).map(|i| unit::<f64>(q, i)).collect();
        Self::new(derivative, vec![0.0; q * q * q], vec![0.0; q])
    }

    pub fn frame_dim(&self) -> usize {
        self.frame_dim
    }

    pub fn mode_dim(&self) -> usize {
        self.mode_dim
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> f64 {
        let q = self.frame_dim;
        self.christoffel[(i * q + j) * q + k]
    }

    pub fn christoffel(&self) -> &[f64] {
        &self.christoffel
    }

    pub fn mean_curvature(&self) -> &[f64] {
        &self.mean_curvature
    }

    pub fn derivative_row(&self, i: usize) -> &[f64] {
        &self.derivative[i]
    }

    /// `(D k)_i`, the frequency seen by `e_i` on mode `k`.
    pub fn frequency(&self, i: usize, mode: &[i32]) -> f64 {
        self.derivative[i].iter().zip(mode).map(|(d, &k)| d * k as f64).sum()
    }

    /// Smallest singular value of `D`; converts a frame frequency bound into a mode bound.
    pub fn derivative_floor(&self) -> f64 {
        let d = DMatrix::from_fn(self.frame_dim, self.mode_dim, |i, j| self.derivative[i][j]);
        d.singular_values().min()
    }

    /// `e_i f` for a function given by its Fourier series.
    pub fn differentiate(&self, i: usize, f: &TrigPoly) -> TrigPoly {
        f.derivative(&self.derivative[i])
    }

    pub fn bracket(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.frame_dim)
            .map(|k| self.gamma(i, j, k) - self.gamma(j, i, k))
            .collect()
    }

    /// `div e_i = sum_j g(nabla_{e_j} e_i, e_j)`.
    pub fn divergence(&self, i: usize) -> f64 {
        (0..self.frame_dim).map(|j| self.gamma(j, i, j)).sum()
    }

    /// `nabla_{e_i}` on covectors: entry `(j, m)` is the `e^j` component of `nabla_{e_i} e^m`.
    pub fn coframe_connection(&self, i: usize) -> Matrix<f64> {
        Matrix::from_fn(self.frame_dim, self.frame_dim, |j, m| -self.gamma(i, j, m))
    }

    pub fn curvature(&self) -> CurvatureTensor<f64> {
        CurvatureTensor::from_christoffel(self.frame_dim, &self.christoffel)
    }

    /// Frame components of `nabla_{e_i} v` for a field with frame components `v`.
    pub fn covariant_derivative(&self, i: usize, v: &[TrigPoly]) -> Vec<TrigPoly> {
        (0..self.frame_dim)
            .map(|j| {
                let mut out = self.differentiate(i, &v[j]);
                for (k, vk) in v.iter().enumerate() {
                    let g = self.gamma(i, k, j);
                    if g != 0.0 {
                        out = out.add(&vk.scale(Complex64::new(g, 0.0)));
                    }
                }
                out
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn flat_torus_has_no_curvature() {
        let g = FrameGeometry::flat_torus(3).unwrap();
        assert_eq!(g.curvature().max_abs(), 0.0);
        assert_eq!(g.divergence(1), 0.0);
        assert_eq!(g.frequency(2, &[1, -2, 5]), 5.0);
    }

    #[test]
    fn rejects_non_metric_connection() {
        let mut gamma = vec![0.0; 8];
        gamma[1] = 1.0; // nabla_{e_0} e_0 = e_1 without the compensating term
        let d = vec![vec![1.0], vec![0.0]];
        assert!(FrameGeometry::new(d, gamma, vec![0.0; 2]).is_err());
    }

    #[test]
    fn round_sphere_frame_has_ricci_term_on_one_forms() {
        // Left-invariant orthonormal frame of SU(2) with [e_i, e_j] = e_k:
        // sectional curvature 1/4, Ricci 1/2.
        let q = 3;
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let mut gamma = vec![BigRational::from_i64(0); 27];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            gamma[(i * q + j) * q + k] = half.clone();
            gamma[(j * q + i) * q + k] = -half.clone();
        }
        let r = CurvatureTensor::from_christoffel(q, &gamma);
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        assert_eq!(r.sectional(0, 1), quarter);
        let basis = FormBasis::new(3).unwrap();
        let w = r.weitzenbock_term(&basis);
        let expected = Matrix::identity(3).scale(&half);
        assert_eq!(w.block(1, 1).unwrap(), &expected);
        assert!(w.block(0, 0).is_none_or(Matrix::is_zero));
    }
}
