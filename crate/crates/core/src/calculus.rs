//! Twisted operators on a homogeneous frame geometry, assembled as mode-block operators.
//!
//! With twist `theta` and mean curvature `kappa`, the shifted connection is
//! `nabla~_v = nabla_v - eta(v)` where `eta = kappa / 2 + theta`. Then
//!
//! * `d~ = d - eta ^ = sum_i e^i ^ nabla~_{e_i}`
//! * `delta~ = -sum_i iota_{e_i} nabla~_{e_i} - 2 iota_theta`
//! * `D~ = d~ + delta~ = sum_i e_i . nabla~_{e_i} - 2 iota_theta`
//! * `Delta~ = d~ delta~ + delta~ d~`
//!
//! Harmonic forms of `Delta~` for twist `theta` compute the cohomology of
//! `d - (kappa / 2 + theta) ^`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{clifford_operator, derivation_operator, interior_operator, unit, wedge_operator, FormBasis};
use crate::fourier::{ModeBox, TrigPoly};
use crate::geometry::FrameGeometry;
use crate::operator::ModeBlockOperator;
use crate::report::SpectrumEntry;

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;
/// Slack added to the coercivity radius.
pub const COERCIVITY_MARGIN: f64 = 1.0;
/// Largest tolerated Fourier mass of `exp(+-f)` outside the truncation box.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// A closed one-form `theta = theta_bar + df`: constant frame components plus an exact part.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistClass {
    pub constant: Vec<f64>,
    pub potential: TrigPoly,
}

impl TwistClass {
    pub fn new(constant: Vec<f64>, potential: TrigPoly) -> Self {
        Self { constant, potential }
    }

    pub fn constant(constant: Vec<f64>, mode_dim: usize) -> Self {
        Self::new(constant, TrigPoly::zero(mode_dim))
    }

    pub fn zero(frame_dim: usize, mode_dim: usize) -> Self {
        Self::constant(vec![0.0; frame_dim], mode_dim)
    }

    pub fn with_potential(mut self, f: TrigPoly) -> Self {
        self.potential = self.potential.add(&f);
        self
    }

    pub fn has_potential(&self) -> bool {
        !self.potential.is_constant()
    }

    pub fn norm_squared(&self) -> f64 {
        self.constant.iter().map(|c| c * c).sum()
    }
}

/// Per-degree harmonic dimensions with the spectral data behind them.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicSummary {
    pub dims: Vec<usize>,
    pub spectra: Vec<SpectrumEntry>,
    /// Smallest singular value of `(d~, delta~)` over every block and degree.
    pub min_singular: f64,
    /// Per degree: largest singular value counted as zero (0 when none).
    pub largest_kernel_singular: Vec<f64>,
    /// Per degree: smallest singular value counted as nonzero.
    pub smallest_nonzero_singular: Vec<f64>,
    pub radius: usize,
    pub required_radius: f64,
}

pub struct TwistedCalculus {
    geom: FrameGeometry,
    basis: FormBasis,
    twist: TwistClass,
    theta: Vec<TrigPoly>,
    eta: Vec<TrigPoly>,
    band: usize,
    wedge: Vec<DMatrix<Complex64>>,
    interior: Vec<DMatrix<Complex64>>,
    clifford: Vec<DMatrix<Complex64>>,
    connection: Vec<DMatrix<Complex64>>,
    curvature_term: DMatrix<Complex64>,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl TwistedCalculus {
    pub fn new(geom: FrameGeometry, twist: TwistClass) -> Result<Self> {
        let q = geom.frame_dim();
        let m = geom.mode_dim();
        if twist.constant.len() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                actual: twist.constant.len(),
            });
        }
        if twist.potential.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: twist.potential.dim(),
            });
        }
        if !twist.potential.is_real(1e-12) {
            return Err(Error::InvalidModel("potential is not real valued".into()));
        }
        let basis = FormBasis::new(q)?;
        let full = |op: crate::exterior::GradedOperator<f64>| op.to_dmatrix(&basis);
        let wedge = (0..q)
            .map(|i| full(wedge_operator(&unit(q, i), &basis).unwrap()))
            .collect();
        let interior = (0..q)
            .map(|i| full(interior_operator(&unit(q, i), &basis).unwrap()))
            .collect();
        let clifford = (0..q)
            .map(|i| full(clifford_operator(&unit(q, i), &basis).unwrap()))
            .collect();
        let connection = (0..q)
            .map(|i| full(derivation_operator(&geom.coframe_connection(i), &basis).unwrap()))
            .collect();
        let curvature_term = full(geom.curvature().weitzenbock_term(&basis));
        let theta: Vec<TrigPoly> = (0..q)
            .map(|i| TrigPoly::constant(m, twist.constant[i]).add(&geom.differentiate(i, &twist.potential)))
            .collect();
        let eta = theta
            .iter()
            .zip(geom.mean_curvature())
            .map(|(t, k)| t.add(&TrigPoly::constant(m, 0.5 * k)))
            .collect();
        let band = twist.potential.bandwidth();
        let calc = Self {
            geom,
            basis,
            twist,
            theta,
            eta,
            band,
            wedge,
            interior,
            clifford,
            connection,
            curvature_term,
        };
        let residual = calc.constant_part_defect();
        if residual > 1e-12 {
            return Err(Error::TwistNotClosed { residual });
        }
        Ok(calc)
    }

    /// `|d theta_bar|` for the constant part (the exact part is closed by construction).
    fn constant_part_defect(&self) -> f64 {
        let n = self.basis.total_dim();
        let mut v = DVector::zeros(n);
        for (i, c) in self.twist.constant.iter().enumerate() {
            v[self.basis.offset(1) + i] = real(*c);
        }
        let mut dv = DVector::zeros(n);
        for i in 0..self.q() {
            dv += &self.wedge[i] * (&self.connection[i] * &v);
        }
        dv.norm()
    }

    pub fn geometry(&self) -> &FrameGeometry {
        &self.geom
    }

    pub fn basis(&self) -> &FormBasis {
        &self.basis
    }

    pub fn twist(&self) -> &TwistClass {
        &self.twist
    }

    /// Frame components of `theta`.
    pub fn theta(&self) -> &[TrigPoly] {
        &self.theta
    }

    /// Modes one application of a first-order operator can shift by.
    pub fn bandwidth(&self) -> usize {
        self.band
    }

    pub fn q(&self) -> usize {
        self.geom.frame_dim()
    }

    pub fn width(&self) -> usize {
        self.basis.total_dim()
    }

    pub fn space(&self, radius: usize) -> ModeBox {
        ModeBox::new(self.geom.mode_dim(), radius)
    }

    pub fn wedge_matrix(&self, i: usize) -> &DMatrix<Complex64> {
        &self.wedge[i]
    }

    pub fn interior_matrix(&self, i: usize) -> &DMatrix<Complex64> {
        &self.interior[i]
    }

    pub fn clifford_matrix(&self, i: usize) -> &DMatrix<Complex64> {
        &self.clifford[i]
    }

    pub fn curvature_matrix(&self) -> &DMatrix<Complex64> {
        &self.curvature_term
    }

    pub fn pointwise(&self, radius: usize, m: &DMatrix<Complex64>) -> ModeBlockOperator {
        ModeBlockOperator::pointwise(self.space(radius), m)
    }

    pub fn identity(&self, radius: usize) -> ModeBlockOperator {
        ModeBlockOperator::identity(self.space(radius), self.width())
    }

    pub fn multiply(&self, radius: usize, f: &TrigPoly, m: &DMatrix<Complex64>) -> ModeBlockOperator {
        ModeBlockOperator::multiplication(self.space(radius), f, m)
    }

    fn sum(&self, radius: usize, terms: impl IntoIterator<Item = ModeBlockOperator>) -> ModeBlockOperator {
        let zero = ModeBlockOperator::zero(self.space(radius), self.space(radius), self.width(), self.width());
        terms.into_iter().fold(zero, |acc, t| acc.add(&t))
    }

    /// `e_i` acting on coefficients.
    pub fn frame_derivative(&self, i: usize, radius: usize) -> ModeBlockOperator {
        let n = self.width();
        ModeBlockOperator::diagonal(self.space(radius), n, n, |k| {
            let w = self.geom.frequency(i, k);
            (w != 0.0).then(|| DMatrix::identity(n, n) * Complex64::new(0.0, 2.0 * std::f64::consts::PI * w))
        })
    }

    /// Untwisted `nabla_{e_i}` on forms.
    pub fn nabla(&self, i: usize, radius: usize) -> ModeBlockOperator {
        self.frame_derivative(i, radius)
            .add(&self.pointwise(radius, &self.connection[i]))
    }

    /// `nabla~_{e_i} = nabla_{e_i} - eta(e_i)`.
    pub fn nabla_tilde(&self, i: usize, radius: usize) -> ModeBlockOperator {
        let id = DMatrix::identity(self.width(), self.width());
        self.nabla(i, radius).sub(&self.multiply(radius, &self.eta[i], &id))
    }

    /// `nabla~_v` for a constant frame vector `v`.
    pub fn nabla_tilde_along(&self, v: &[f64], radius: usize) -> ModeBlockOperator {
        self.sum(
            radius,
            v.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, c)| self.nabla_tilde(i, radius).scale(real(*c))),
        )
    }

    /// Formal adjoint `-nabla~_{e_i} - div e_i - 2 theta(e_i)`.
    pub fn nabla_tilde_adjoint(&self, i: usize, radius: usize) -> ModeBlockOperator {
        let id = DMatrix::identity(self.width(), self.width());
        let div = self.pointwise(radius, &(id.clone() * real(self.geom.divergence(i))));
        let two_theta = self.multiply(radius, &self.theta[i], &(id * real(2.0)));
        self.nabla_tilde(i, radius).scale(real(-1.0)).sub(&div).sub(&two_theta)
    }

    /// `sum_i f_i M_i` for frame-component functions `f` and pointwise matrices `M`.
    fn field_sum(&self, radius: usize, f: &[TrigPoly], m: &[DMatrix<Complex64>]) -> ModeBlockOperator {
        self.sum(
            radius,
            f.iter()
                .zip(m)
                .filter(|(fi, _)| !fi.is_zero())
                .map(|(fi, mi)| self.multiply(radius, fi, mi)),
        )
    }

    /// `iota_v` for a field with frame components `v`.
    pub fn interior_field(&self, v: &[TrigPoly], radius: usize) -> ModeBlockOperator {
        self.field_sum(radius, v, &self.interior)
    }

    /// Untwisted exterior derivative `sum_i e^i ^ nabla_{e_i}`.
    pub fn d_untwisted(&self, radius: usize) -> ModeBlockOperator {
        self.sum(
            radius,
            (0..self.q()).map(|i| self.pointwise(radius, &self.wedge[i]).compose(&self.nabla(i, radius))),
        )
    }

    /// `d - eta ^`.
    pub fn twisted_d(&self, radius: usize) -> ModeBlockOperator {
        self.d_untwisted(radius)
            .sub(&self.field_sum(radius, &self.eta, &self.wedge))
    }

    /// `sum_i e^i ^ nabla~_{e_i}`, assembled from the shifted connection.
    pub fn twisted_d_frame(&self, radius: usize) -> ModeBlockOperator {
        let r = radius + self.band;
        self.sum(
            radius,
            (0..self.q()).map(|i| self.pointwise(r, &self.wedge[i]).compose(&self.nabla_tilde(i, radius))),
        )
    }

    /// `-sum_i iota_{e_i} nabla~_{e_i} - 2 iota_theta`.
    pub fn twisted_delta(&self, radius: usize) -> ModeBlockOperator {
        let r = radius + self.band;
        let first = self.sum(
            radius,
            (0..self.q()).map(|i| {
                self.pointwise(r, &self.interior[i])
                    .compose(&self.nabla_tilde(i, radius))
            }),
        );
        first
            .add(&self.interior_field(&self.theta, radius).scale(real(2.0)))
            .scale(real(-1.0))
    }

    pub fn laplacian(&self, radius: usize) -> ModeBlockOperator {
        let r = radius + self.band;
        let d = self.twisted_d(radius);
        let delta = self.twisted_delta(radius);
        self.twisted_d(r)
            .compose(&delta)
            .add(&self.twisted_delta(r).compose(&d))
    }

    /// `d~ + delta~`.
    pub fn dirac(&self, radius: usize) -> ModeBlockOperator {
        self.twisted_d(radius).add(&self.twisted_delta(radius))
    }

    /// `sum_i e_i . nabla~_{e_i} - 2 iota_theta`.
    pub fn dirac_clifford(&self, radius: usize) -> ModeBlockOperator {
        let r = radius + self.band;
        let first = self.sum(
            radius,
            (0..self.q()).map(|i| {
                self.pointwise(r, &self.clifford[i])
                    .compose(&self.nabla_tilde(i, radius))
            }),
        );
        first.sub(&self.interior_field(&self.theta, radius).scale(real(2.0)))
    }

    /// `sum_i nabla~*_{e_i} nabla~_{e_i}`.
    pub fn rough_laplacian(&self, radius: usize) -> ModeBlockOperator {
        let r = radius + self.band;
        self.sum(
            radius,
            (0..self.q()).map(|i| self.nabla_tilde_adjoint(i, r).compose(&self.nabla_tilde(i, radius))),
        )
    }

    /// Frame components `h[i][j]` of `nabla_{e_i} theta^sharp` along `e_j`.
    pub fn theta_hessian(&self) -> Vec<Vec<TrigPoly>> {
        (0..self.q())
            .map(|i| self.geom.covariant_derivative(i, &self.theta))
            .collect()
    }

    /// `-2 sum_i e_i . iota_{nabla_{e_i} theta^sharp}`.
    pub fn hessian_term(&self, radius: usize) -> ModeBlockOperator {
        let h = self.theta_hessian();
        let mut terms = Vec::new();
        for (i, row) in h.iter().enumerate() {
            for (j, hij) in row.iter().enumerate() {
                if hij.is_zero() {
                    continue;
                }
                let m = &self.clifford[i] * &self.interior[j] * real(-2.0);
                terms.push(self.multiply(radius, hij, &m));
            }
        }
        self.sum(radius, terms)
    }

    pub fn curvature_term(&self, radius: usize) -> ModeBlockOperator {
        self.pointwise(radius, &self.curvature_term)
    }

    /// Right-hand side of the Weitzenbock formula.
    pub fn weitzenbock_rhs(&self, radius: usize) -> ModeBlockOperator {
        self.rough_laplacian(radius)
            .add(&self.hessian_term(radius))
            .add(&self.curvature_term(radius))
    }

    /// Curvature `[nabla'_i, nabla'_j] - nabla'_{[e_i, e_j]}` of `nabla' = nabla - gamma`
    /// for a one-form with frame components `gamma`, as an operator on the box.
    pub fn shifted_curvature(&self, gamma: &[TrigPoly], i: usize, j: usize, radius: usize) -> ModeBlockOperator {
        let id = DMatrix::identity(self.width(), self.width());
        let b = gamma.iter().map(TrigPoly::bandwidth).max().unwrap_or(0);
        let conn = |k: usize, r: usize| self.nabla(k, r).sub(&self.multiply(r, &gamma[k], &id));
        let first = conn(i, radius + b).compose(&conn(j, radius));
        let second = conn(j, radius + b).compose(&conn(i, radius));
        let bracket = self.geom.bracket(i, j);
        let third = self.sum(
            radius,
            bracket
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(k, c)| conn(k, radius).scale(real(*c))),
        );
        first.sub(&second).sub(&third)
    }

    /// Untwisted `nabla_v` for a field with frame components `v`.
    pub fn covariant_along(&self, v: &[TrigPoly], radius: usize) -> ModeBlockOperator {
        let id = DMatrix::identity(self.width(), self.width());
        self.sum(
            radius,
            v.iter()
                .enumerate()
                .filter(|(_, vi)| !vi.is_zero())
                .map(|(i, vi)| self.multiply(radius, vi, &id).compose(&self.nabla(i, radius))),
        )
    }

    /// `d iota_v + iota_v d`, untwisted.
    pub fn lie_derivative(&self, v: &[TrigPoly], radius: usize) -> ModeBlockOperator {
        let b = v.iter().map(TrigPoly::bandwidth).max().unwrap_or(0);
        let iv = self.interior_field(v, radius);
        let d = self.d_untwisted(radius);
        self.d_untwisted(radius + b)
            .compose(&iv)
            .add(&self.interior_field(v, radius).compose(&d))
    }

    /// `sum_{i,j} (nabla_{e_i} v)_j e^i ^ iota_{e_j}`.
    pub fn lie_minus_covariant(&self, v: &[TrigPoly], radius: usize) -> ModeBlockOperator {
        let mut terms = Vec::new();
        for i in 0..self.q() {
            for (j, c) in self.geom.covariant_derivative(i, v).iter().enumerate() {
                if !c.is_zero() {
                    terms.push(self.multiply(radius, c, &(&self.wedge[i] * &self.interior[j])));
                }
            }
        }
        self.sum(radius, terms)
    }

    /// Bochner endomorphism `-2 (L_theta - nabla_theta) + R`, so that
    /// `<Delta~ a, a> = sum |nabla~ a|^2 + <beta a, a>`.
    pub fn bochner_operator(&self, radius: usize) -> ModeBlockOperator {
        self.lie_minus_covariant(&self.theta, radius)
            .scale(real(-2.0))
            .add(&self.curvature_term(radius))
    }

    /// The same endomorphism evaluated at a point of the torus of modes.
    pub fn bochner_at(&self, x: &[f64]) -> DMatrix<Complex64> {
        let mut out = self.curvature_term.clone();
        for i in 0..self.q() {
            for (j, c) in self.geom.covariant_derivative(i, &self.theta).iter().enumerate() {
                let value = c.evaluate(x);
                if value.norm() != 0.0 {
                    out -= &self.wedge[i] * &self.interior[j] * (value * 2.0);
                }
            }
        }
        out
    }

    /// Radius beyond which no mode can carry kernel, and below which the
    /// exponentials of the potential still carry mass above [`TAIL_TOLERANCE`].
    pub fn required_radius(&self) -> f64 {
        let id_norm = |p: &TrigPoly| p.l1_norm();
        let mut zero_order: f64 = 0.0;
        for i in 0..self.q() {
            zero_order += id_norm(&self.eta[i]) + 2.0 * id_norm(&self.theta[i]);
            zero_order += crate::operator::spectral_norm(&self.connection[i]);
        }
        let coercive = (zero_order + COERCIVITY_MARGIN) / (2.0 * std::f64::consts::PI * self.geom.derivative_floor());
        coercive.max(self.potential_tail_radius() as f64)
    }

    fn potential_tail_radius(&self) -> usize {
        let f = &self.twist.potential;
        if f.is_constant() {
            return 0;
        }
        let keep = (6 * f.bandwidth()).max(24);
        let (plus, _) = f.exp(keep, keep);
        let (minus, _) = f.scale(real(-1.0)).exp(keep, keep);
        (1..=keep)
            .find(|&k| plus.tail_mass(k) < TAIL_TOLERANCE && minus.tail_mass(k) < TAIL_TOLERANCE)
            .unwrap_or(keep + 1)
    }

    /// Kernel dimensions of `Delta~` per degree on the box of the given radius.
    ///
    /// A value is counted as zero when it is below `rank_tol * max(largest, 1)`,
    /// the largest singular value being taken per mode block (or over the
    /// whole operator when modes couple).
    pub fn harmonic_dims(&self, radius: usize, rank_tol: f64) -> Result<HarmonicSummary> {
        let required = self.required_radius();
        if (radius as f64) < required {
            return Err(Error::CutoffInsufficient {
                cutoff: radius,
                radius: required,
            });
        }
        let q = self.q();
        let d = self.twisted_d(radius);
        let delta = self.twisted_delta(radius);
        let mut summary = HarmonicSummary {
            dims: vec![0; q + 1],
            spectra: Vec::new(),
            min_singular: f64::INFINITY,
            largest_kernel_singular: vec![0.0; q + 1],
            smallest_nonzero_singular: vec![f64::INFINITY; q + 1],
            radius,
            required_radius: required,
        };
        for p in 0..=q {
            let up = (p < q).then(|| d.graded(&self.basis, p + 1, p));
            let down = (p > 0).then(|| delta.graded(&self.basis, p - 1, p));
            let parts: Vec<&ModeBlockOperator> = up.iter().chain(down.iter()).collect();
            let blocks: Vec<(Option<Vec<i32>>, DMatrix<Complex64>)> = if d.is_block_diagonal() {
                let space = self.space(radius);
                space
                    .modes()
                    .map(|k| {
                        let cols = self.basis.dim(p);
                        let rows: usize = parts.iter().map(|o| o.target_width()).sum();
                        let mut m = DMatrix::zeros(rows, cols);
                        let mut r0 = 0;
                        for o in &parts {
                            if let Some(b) = o.block(&k, &k) {
                                m.view_mut((r0, 0), b.shape()).copy_from(b);
                            }
                            r0 += o.target_width();
                        }
                        (Some(k), m)
                    })
                    .collect()
            } else {
                let cols = parts[0].source_len();
                let rows: usize = parts.iter().map(|o| o.target_len()).sum();
                let mut m = DMatrix::zeros(rows, cols);
                let mut r0 = 0;
                for o in &parts {
                    let dense = o.to_dense();
                    m.view_mut((r0, 0), dense.shape()).copy_from(&dense);
                    r0 += dense.nrows();
                }
                vec![(None, m)]
            };
            let results: Vec<(Option<Vec<i32>>, Vec<f64>)> = blocks
                .into_par_iter()
                .map(|(k, m)| {
                    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
                    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    (k, s)
                })
                .collect();
            for (k, s) in results {
                let largest = s.last().copied().unwrap_or(0.0);
                let threshold = rank_tol * largest.max(1.0);
                for (index, &sigma) in s.iter().enumerate() {
                    summary.min_singular = summary.min_singular.min(sigma);
                    if sigma < threshold {
                        summary.dims[p] += 1;
                        summary.largest_kernel_singular[p] = summary.largest_kernel_singular[p].max(sigma);
                    } else {
                        summary.smallest_nonzero_singular[p] = summary.smallest_nonzero_singular[p].min(sigma);
                    }
                    summary.spectra.push(SpectrumEntry {
                        mode: k.clone(),
                        degree: p,
                        index,
                        eigenvalue: sigma * sigma,
                    });
                }
            }
        }
        Ok(summary)
    }

    /// Seeded random element of the box, optionally restricted to one degree.
    pub fn random_form(&self, radius: usize, degree: Option<usize>, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
        let n = self.width();
        let space = self.space(radius);
        let range = degree.map(|p| self.basis.degree_range(p)).unwrap_or(0..n);
        let mut v = DVector::zeros(space.len() * n);
        for m in 0..space.len() {
            for c in range.clone() {
                v[m * n + c] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        v
    }

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }
}

/// `<u, v>` for vectors on possibly different boxes of the same operator family.
pub fn inner(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    v.dotc(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(q: usize, theta: Vec<f64>) -> TwistedCalculus {
        TwistedCalculus::new(FrameGeometry::flat_torus(q).unwrap(), TwistClass::constant(theta, q)).unwrap()
    }

    #[test]
    fn twisted_d_on_constant_function() {
        let c = torus(2, vec![1.0, 0.0]);
        let d = c.twisted_d(1);
        let block = d.block(&[0, 0], &[0, 0]).unwrap();
        // column of the constant function 1: -dx^1
        assert!((block[(1, 0)] - real(-1.0)).norm() < 1e-15);
        assert!(block[(2, 0)].norm() < 1e-15);
    }

    #[test]
    fn fourier_derivative_on_mode() {
        let c = torus(2, vec![0.0, 0.0]);
        let d = c.twisted_d(1);
        let block = d.block(&[1, 0], &[1, 0]).unwrap();
        assert!((block[(1, 0)] - Complex64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-14);
    }

    #[test]
    fn laplacian_on_constants_is_theta_squared() {
        let c = torus(2, vec![0.8, 0.0]);
        let lap = c.laplacian(1);
        let b = lap.block(&[0, 0], &[0, 0]).unwrap();
        assert!((b[(0, 0)] - real(0.64)).norm() < 1e-14);
    }

    #[test]
    fn cutoff_below_radius_is_rejected() {
        let c = torus(2, vec![40.0, 0.0]);
        assert!(matches!(
            c.harmonic_dims(1, 1e-8),
            Err(Error::CutoffInsufficient { .. })
        ));
    }

    #[test]
    fn non_closed_constant_part_is_rejected() {
        // On a frame with de^1 != 0 a constant e^1 component is not closed.
        let mu = 0.5;
        let mut gamma = vec![0.0; 8];
        gamma[(1 * 2 + 1) * 2] = mu;
        gamma[(1 * 2) * 2 + 1] = -mu;
        let g = FrameGeometry::new(vec![vec![1.0], vec![0.0]], gamma, vec![-mu, 0.0]).unwrap();
        let err = TwistedCalculus::new(g, TwistClass::constant(vec![0.0, 1.0], 1));
        assert!(matches!(err, Err(Error::TwistNotClosed { .. })));
    }
}
