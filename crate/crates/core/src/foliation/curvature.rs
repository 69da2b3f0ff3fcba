//! Curvature summaries, the twist-independence check and the positivity gate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::{TwistClass, TwistedCalculus};
use crate::error::Result;
use crate::field::Field;
use crate::fourier::TrigPoly;
use crate::geometry::{pairs, CurvatureTensor, FrameGeometry};
use crate::report::GateRecord;

/// Tolerance below which a curvature eigenvalue counts as zero in the gate.
pub const GATE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionalEntry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
    /// Exact value as `p/q` when the computation was rational.
    #[serde(default)]
    pub exact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistResidual {
    pub c: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub dim: usize,
    pub sectional: Vec<SectionalEntry>,
    /// Eigenvalues of the curvature operator on two-forms, ascending.
    pub operator_eigenvalues: Vec<f64>,
    #[serde(default)]
    pub twist_residuals: Vec<TwistResidual>,
}

impl CurvatureReport {
    pub fn from_tensor<T: Field>(r: &CurvatureTensor<T>, exact: impl Fn(&T) -> Option<String>) -> Self {
        let q = r.dim();
        let sectional = pairs(q)
            .into_iter()
            .map(|(i, j)| {
                let k = r.sectional(i, j);
                SectionalEntry {
                    i,
                    j,
                    value: k.to_complex().re,
                    exact: exact(&k),
                }
            })
            .collect();
        let op = r.operator_matrix();
        let m = DMatrix::from_fn(op.rows(), op.cols(), |a, b| op[(a, b)].to_complex().re);
        let sym = (&m + m.transpose()) * 0.5;
        let mut operator_eigenvalues: Vec<f64> = if sym.is_empty() {
            Vec::new()
        } else {
            sym.symmetric_eigenvalues().iter().copied().collect()
        };
        operator_eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self {
            dim: q,
            sectional,
            operator_eigenvalues,
            twist_residuals: Vec::new(),
        }
    }

    pub fn from_geometry(g: &FrameGeometry) -> Self {
        Self::from_tensor(&g.curvature(), |_| None)
    }

    pub fn sectional(&self, i: usize, j: usize) -> Option<f64> {
        let (i, j) = (i.min(j), i.max(j));
        self.sectional.iter().find(|e| e.i == i && e.j == j).map(|e| e.value)
    }
}

/// Largest `|R^gamma(e_i, e_j) - R(e_i, e_j)|` over frame pairs, where `R^gamma`
/// is the curvature of `nabla - gamma` assembled as an operator on the box.
pub fn twist_invariance(geom: &FrameGeometry, gamma: &[TrigPoly], radius: usize) -> Result<f64> {
    let q = geom.frame_dim();
    let calc = TwistedCalculus::new(geom.clone(), TwistClass::zero(q, geom.mode_dim()))?;
    let r = geom.curvature();
    let mut worst: f64 = 0.0;
    for (i, j) in pairs(q) {
        let untwisted: DMatrix<Complex64> = r.on_forms(calc.basis(), i, j).to_dmatrix(calc.basis());
        let shifted = calc.shifted_curvature(gamma, i, j, radius);
        worst = worst.max(shifted.sub(&calc.pointwise(radius, &untwisted)).norm());
    }
    Ok(worst)
}

/// Nonnegative curvature operator that is positive somewhere forces the
/// intermediate twisted basic groups to vanish for every closed twist.
pub fn positivity_gate(report: &CurvatureReport) -> GateRecord {
    let min = report.operator_eigenvalues.first().copied().unwrap_or(0.0);
    let max = report.operator_eigenvalues.last().copied().unwrap_or(0.0);
    let verdict = min >= -GATE_TOLERANCE && max > GATE_TOLERANCE;
    let detail = if verdict {
        format!(
            "curvature operator nonnegative and positive: twisted basic cohomology vanishes in degrees 1..={}; no transverse l.c.s. structure",
            report.dim.saturating_sub(1)
        )
    } else if min < -GATE_TOLERANCE {
        "curvature operator has a negative eigenvalue".to_string()
    } else {
        "curvature operator vanishes identically".to_string()
    };
    GateRecord::new("positivity", verdict, detail)
        .with_value("min_eigenvalue", min)
        .with_value("max_eigenvalue", max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::MappingTorusModel;

    #[test]
    fn flat_torus_gate_is_false() {
        let r = CurvatureReport::from_geometry(&FrameGeometry::flat_torus(3).unwrap());
        assert!(!positivity_gate(&r).verdict);
        assert!(r.operator_eigenvalues.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn mapping_torus_is_negatively_curved() {
        let m = MappingTorusModel::from_matrix([[2, 1], [1, 1]], 4).unwrap();
        let r = CurvatureReport::from_geometry(&m.geometry());
        let mu = m.rates[0];
        assert!((r.sectional(0, 1).unwrap() + mu * mu).abs() < 1e-14);
        assert!(!positivity_gate(&r).verdict);
        let gamma = [TrigPoly::constant(1, -3.0), TrigPoly::zero(1)];
        assert!(twist_invariance(&m.geometry(), &gamma, 3).unwrap() < 1e-12);
    }
}
