//! Basic complex of the suspension flow of a hyperbolic toral automorphism.
//!
//! The transverse frame is `e_0 = d/dt` plus one field per contracted or
//! expanded direction, `e_j` with dilation rate `mu_j`, so that
//! `de^j = -mu_j dt ^ e^j`. Basic functions depend on `t` alone. The leaves
//! dilate at rate `nu` and the mean curvature form is `kappa = nu dt`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{HarmonicSummary, TwistClass, TwistedCalculus};
use crate::error::{Error, Result};
use crate::foliation::curvature::{twist_invariance, CurvatureReport, TwistResidual};
use crate::fourier::TrigPoly;
use crate::geometry::FrameGeometry;
use crate::operator::ModeBlockOperator;
use crate::report::ScanPoint;

/// Tolerance on `sum mu_j + nu` for the volume to be preserved.
pub const UNIMODULAR_TOLERANCE: f64 = 1e-12;
/// Allowed gap between the adjoint-derived and the stored mean curvature.
pub const MEAN_CURVATURE_TOLERANCE: f64 = 1e-10;
/// Fourier cutoff of the adjoint cross-check.
pub const CROSS_CHECK_CUTOFF: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingTorusModel {
    pub rates: Vec<f64>,
    pub leaf_rate: f64,
    pub cutoff: usize,
    #[serde(default)]
    pub matrix: Option<[[i64; 2]; 2]>,
}

/// A closed basic one-form `gamma = c dt + df(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasicTwist {
    pub c: f64,
    pub potential: TrigPoly,
}

impl BasicTwist {
    pub fn new(c: f64) -> Self {
        Self {
            c,
            potential: TrigPoly::zero(1),
        }
    }

    pub fn with_potential(mut self, f: TrigPoly) -> Self {
        self.potential = self.potential.add(&f);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvatureForm {
    /// Coefficient of `dt`.
    pub kappa_t: f64,
    /// The coefficient that makes the coderivative formula equal the L2 adjoint of `d`.
    pub adjoint_value: f64,
    /// Operator norm of the remaining difference once `adjoint_value` is used.
    pub residual: f64,
}

impl MappingTorusModel {
    pub fn from_rates(rates: Vec<f64>, leaf_rate: f64, cutoff: usize) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidFrameDimension(1));
        }
        if cutoff == 0 {
            return Err(Error::InvalidModel("cutoff must be at least 1".into()));
        }
        let defect = rates.iter().sum::<f64>() + leaf_rate;
        if defect.abs() > UNIMODULAR_TOLERANCE {
            return Err(Error::NonUnimodular(defect));
        }
        Ok(Self {
            rates,
            leaf_rate,
            cutoff,
            matrix: None,
        })
    }

    /// Suspension of `A` in `SL(2, Z)` with `tr A > 2`. The flow runs along the
    /// contracting eigendirection; the expanding one is transverse.
    pub fn from_matrix(a: [[i64; 2]; 2], cutoff: usize) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det != 1 {
            return Err(Error::DeterminantNotOne(det));
        }
        let tr = a[0][0] + a[1][1];
        if tr <= 2 {
            return Err(Error::TraceTooSmall(tr));
        }
        let (l1, _) = eigenvalues(tr);
        let mu = l1.ln();
        let mut model = Self::from_rates(vec![mu], -mu, cutoff)?;
        model.matrix = Some(a);
        Ok(model)
    }

    /// Transverse codimension: `t` plus one direction per rate.
    pub fn codimension(&self) -> usize {
        self.rates.len() + 1
    }

    pub fn geometry(&self) -> FrameGeometry {
        let q = self.codimension();
        let mut gamma = vec![0.0; q * q * q];
        for (j, &mu) in self.rates.iter().enumerate() {
            let j = j + 1;
            gamma[(j * q + j) * q] = mu;
            gamma[(j * q) * q + j] = -mu;
        }
        let derivative = (0..q).map(|i| vec![if i == 0 { 1.0 } else { 0.0 }]).collect();
        let mut kappa = vec![0.0; q];
        kappa[0] = self.leaf_rate;
        FrameGeometry::new(derivative, gamma, kappa).expect("mapping torus frame is valid")
    }

    /// The twist `theta` whose shifted Laplacian computes the cohomology of `d - gamma ^`.
    pub fn twist_for(&self, gamma: &BasicTwist) -> TwistClass {
        let mut constant = vec![0.0; self.codimension()];
        constant[0] = gamma.c - 0.5 * self.leaf_rate;
        TwistClass::new(constant, gamma.potential.clone())
    }

    /// Calculus with the twist taken literally, `nabla~ = nabla - (kappa / 2 + theta)`.
    pub fn calculus(&self, theta: &BasicTwist) -> Result<TwistedCalculus> {
        let mut constant = vec![0.0; self.codimension()];
        constant[0] = theta.c;
        TwistedCalculus::new(self.geometry(), TwistClass::new(constant, theta.potential.clone()))
    }

    pub fn eigenvalues(&self) -> Option<(f64, f64)> {
        self.matrix.map(|a| eigenvalues(a[0][0] + a[1][1]))
    }

    /// `kappa_t`, cross-checked against the L2 adjoint of the basic derivative.
    pub fn mean_curvature(&self) -> Result<MeanCurvatureForm> {
        let calc = TwistedCalculus::new(self.geometry(), TwistClass::zero(self.codimension(), 1))?;
        let r = CROSS_CHECK_CUTOFF.max(self.cutoff);
        let adjoint = calc.d_untwisted(r).adjoint();
        // -sum iota_i nabla_i, the part of the formula not involving kappa
        let mut base = ModeBlockOperator::zero(calc.space(r), calc.space(r), calc.width(), calc.width());
        for i in 0..calc.q() {
            let term = calc.pointwise(r, calc.interior_matrix(i)).compose(&calc.nabla(i, r));
            base = base.sub(&term);
        }
        let gap = adjoint.sub(&base).to_dense();
        let j = calc.pointwise(r, calc.interior_matrix(0)).to_dense();
        let fitted = frobenius(&gap, &j) / frobenius(&j, &j);
        let residual = crate::operator::spectral_norm(&(gap - j * Complex64::new(fitted, 0.0)));
        if (fitted - self.leaf_rate).abs() > MEAN_CURVATURE_TOLERANCE || residual > MEAN_CURVATURE_TOLERANCE {
            return Err(Error::ConventionMismatch {
                adjoint: fitted,
                formula: self.leaf_rate,
            });
        }
        Ok(MeanCurvatureForm {
            kappa_t: self.leaf_rate,
            adjoint_value: fitted,
            residual,
        })
    }

    /// Dimensions of the cohomology of `d_b - gamma ^`.
    pub fn basic_twisted_betti(&self, gamma: &BasicTwist, rank_tol: f64) -> Result<HarmonicSummary> {
        let calc = TwistedCalculus::new(self.geometry(), self.twist_for(gamma))?;
        calc.harmonic_dims(self.cutoff, rank_tol)
    }

    /// Sectional curvatures and curvature operator of the transverse metric, with
    /// `|R^gamma - R|` recorded for each `gamma = c dt`.
    pub fn transverse_curvature(&self, twists: &[f64]) -> Result<CurvatureReport> {
        let geom = self.geometry();
        let mut report = CurvatureReport::from_geometry(&geom);
        let radius = self.cutoff.min(4);
        for &c in twists {
            let mut gamma = vec![TrigPoly::zero(1); self.codimension()];
            gamma[0] = TrigPoly::constant(1, c);
            report.twist_residuals.push(TwistResidual {
                c,
                residual: twist_invariance(&geom, &gamma, radius)?,
            });
        }
        Ok(report)
    }

    /// The default grid with the leaf rate inserted, so the class of `kappa` is sampled.
    pub fn scan_grid(&self) -> Vec<f64> {
        let mut grid = default_scan_grid();
        if !grid.iter().any(|&c| (c - self.leaf_rate).abs() < 1e-12) {
            grid.push(self.leaf_rate);
        }
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid
    }

    /// Top-degree dimension for `gamma = c dt` over the given values; a point is
    /// flagged when the top group does not vanish.
    pub fn top_degree_scan(&self, values: &[f64], rank_tol: f64) -> Result<Vec<ScanPoint>> {
        let q = self.codimension();
        values
            .par_iter()
            .map(|&c| {
                let dims = self.basic_twisted_betti(&BasicTwist::new(c), rank_tol)?.dims;
                Ok(ScanPoint {
                    parameter: c,
                    flagged: dims[q] > 0,
                    dims,
                })
            })
            .collect()
    }
}

fn frobenius(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// Roots `(l1, l2)`, `l1 > 1 > l2`, of `x^2 - tr x + 1`.
pub fn eigenvalues(trace: i64) -> (f64, f64) {
    let t = trace as f64;
    let l1 = (t + (t * t - 4.0).sqrt()) / 2.0;
    (l1, 1.0 / l1)
}

/// The default scan grid: 21 evenly spaced points on `[-2, 2]`.
pub fn default_scan_grid() -> Vec<f64> {
    (0..=20).map(|i| (i as f64 - 10.0) / 5.0).collect()
}
