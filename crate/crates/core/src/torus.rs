//! Flat tori `T^q = R^q / Z^q` with the coordinate coframe.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::calculus::{HarmonicSummary, TwistClass, TwistedCalculus, DEFAULT_RANK_TOLERANCE};
use crate::error::{Error, Result};
use crate::exterior::{wedge_matrix, FormBasis};
use crate::fourier::{ModeBox, TrigPoly};
use crate::geometry::FrameGeometry;
use crate::operator::ModeBlockOperator;
use crate::report::BettiReport;

/// Target tail mass when truncating `exp(+-f)` for gauge and conformal products.
pub const EXP_TAIL_TOLERANCE: f64 = 1e-14;
/// Tail mass above which a gauge product is reported as under-padded.
pub const PADDING_WARNING: f64 = 1e-10;
/// Largest tolerated `|d_theta omega|` in the l.c.s. check.
pub const LCS_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusModel {
    pub dim: usize,
    pub cutoff: usize,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
}

fn default_rank_tol() -> f64 {
    DEFAULT_RANK_TOLERANCE
}

/// A form field `e^{-f} alpha` on the widened box, with the truncation it suffered.
#[derive(Clone, Debug)]
pub struct GaugeProduct {
    pub form: DVector<Complex64>,
    pub space: ModeBox,
    pub tail_mass: f64,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcsResult {
    pub residual: f64,
    pub closed: bool,
    /// Smallest `|det omega|` over the sample grid.
    pub min_determinant: f64,
    pub nondegenerate: bool,
    pub passed: bool,
}

/// `exp(f)` kept on the smallest box whose outside mass is below `tol`.
pub fn exp_series(f: &TrigPoly, tol: f64) -> (TrigPoly, f64) {
    if f.is_constant() {
        let c = f.coefficient(&vec![0; f.dim()]);
        let mut p = TrigPoly::zero(f.dim());
        p.add_term(vec![0; f.dim()], c.exp());
        return (p, 0.0);
    }
    let keep = (8 * f.bandwidth()).max(32);
    let (full, _) = f.exp(keep, keep);
    let radius = (1..=keep).find(|&k| full.tail_mass(k) < tol).unwrap_or(keep);
    let tail = full.tail_mass(radius);
    (full.truncate(radius), tail)
}

impl TorusModel {
    pub fn new(dim: usize, cutoff: usize) -> Result<Self> {
        FormBasis::new(dim)?;
        if cutoff == 0 {
            return Err(Error::InvalidModel("cutoff must be at least 1".into()));
        }
        Ok(Self {
            dim,
            cutoff,
            rank_tol: DEFAULT_RANK_TOLERANCE,
        })
    }

    pub fn with_rank_tol(mut self, tol: f64) -> Self {
        self.rank_tol = tol;
        self
    }

    pub fn geometry(&self) -> FrameGeometry {
        FrameGeometry::flat_torus(self.dim).expect("dimension validated")
    }

    /// `theta = sum_j c_j dx^j + df`.
    pub fn twist(&self, constant: &[f64], potential: Option<TrigPoly>) -> TwistClass {
        let t = TwistClass::constant(constant.to_vec(), self.dim);
        match potential {
            Some(f) => t.with_potential(f),
            None => t,
        }
    }

    pub fn calculus(&self, theta: &TwistClass) -> Result<TwistedCalculus> {
        TwistedCalculus::new(self.geometry(), theta.clone())
    }

    pub fn harmonic_summary(&self, theta: &TwistClass) -> Result<HarmonicSummary> {
        self.calculus(theta)?.harmonic_dims(self.cutoff, self.rank_tol)
    }

    pub fn harmonic_dims(&self, theta: &TwistClass) -> Result<BettiReport> {
        let s = self.harmonic_summary(theta)?;
        let mut report = BettiReport::new("torus", s.dims.clone(), self.rank_tol);
        report.model = json!({ "dim": self.dim, "cutoff": self.cutoff });
        report.twist = twist_json(theta);
        report.expected_euler = Some(0);
        report.spectra = s.spectra;
        report.notes.push(format!(
            "cutoff {} against required radius {:.4}; smallest singular value {:.6e}",
            s.radius, s.required_radius, s.min_singular
        ));
        report.finalize();
        Ok(report)
    }

    /// `e^{-f} alpha` for `alpha` on the box of the given radius.
    pub fn gauge_transform(&self, alpha: &DVector<Complex64>, radius: usize, f: &TrigPoly) -> GaugeProduct {
        let width = 1 << self.dim;
        let space = ModeBox::new(self.dim, radius);
        if f.is_constant() && f.is_zero() {
            return GaugeProduct {
                form: alpha.clone(),
                space,
                tail_mass: 0.0,
                warning: None,
            };
        }
        let (e, tail) = exp_series(&f.scale(Complex64::new(-1.0, 0.0)), EXP_TAIL_TOLERANCE);
        let op = ModeBlockOperator::multiplication(space, &e, &DMatrix::identity(width, width));
        let warning = (tail > PADDING_WARNING)
            .then(|| format!("exp(-f) truncated with tail mass {tail:.3e}; enlarge the padding"));
        GaugeProduct {
            form: op.apply(alpha),
            space: op.target(),
            tail_mass: tail,
            warning,
        }
    }

    /// Operator norm of `d_theta o e^{-f} - e^{-f} o d_{theta + df}` on the box of the
    /// given radius, each side carried on a box large enough to hold it.
    pub fn intertwining_residual(&self, theta: &TwistClass, f: &TrigPoly, radius: usize) -> Result<f64> {
        let width = 1 << self.dim;
        let base = self.calculus(theta)?;
        let shifted = self.calculus(&theta.clone().with_potential(f.clone()))?;
        let (e, _) = exp_series(&f.scale(Complex64::new(-1.0, 0.0)), EXP_TAIL_TOLERANCE);
        let id = DMatrix::identity(width, width);
        let space = ModeBox::new(self.dim, radius);
        let mult = ModeBlockOperator::multiplication(space, &e, &id);
        let left = base.twisted_d(mult.target().radius).compose(&mult);
        let d_shifted = shifted.twisted_d(radius);
        let right = ModeBlockOperator::multiplication(d_shifted.target(), &e, &id).compose(&d_shifted);
        Ok(left.sub(&right).norm())
    }

    /// Checks `d omega - theta ^ omega = 0` and pointwise nondegeneracy of the
    /// two-form with coefficient fields `omega` (one per basis two-form).
    pub fn lcs_check(&self, omega: &[TrigPoly], theta: &TwistClass, grid: usize) -> Result<LcsResult> {
        let q = self.dim;
        if q < 4 || q % 2 == 1 {
            return Err(Error::InvalidModel(format!(
                "l.c.s. check needs an even dimension >= 4, got {q}"
            )));
        }
        let basis = FormBasis::new(q)?;
        if omega.len() != basis.dim(2) {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(2),
                actual: omega.len(),
            });
        }
        if theta.constant.len() != q || theta.potential.dim() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                actual: theta.constant.len(),
            });
        }
        // d_theta omega = sum_j dx^j ^ (d_j omega - theta_j omega), on the coefficient series
        let mut out = vec![TrigPoly::zero(q); basis.dim(3)];
        for j in 0..q {
            let dir = unit_dir(q, j);
            let theta_j = TrigPoly::constant(q, theta.constant[j]).add(&theta.potential.derivative(&dir));
            let w = wedge_matrix(&unit_dir(q, j), &basis, 2)?.matrix;
            for (src, p) in omega.iter().enumerate() {
                let term = p.derivative(&dir).sub(&p.mul(&theta_j));
                for (row, slot) in out.iter_mut().enumerate() {
                    let sign = w[(row, src)];
                    if sign != 0.0 {
                        *slot = slot.add(&term.scale(Complex64::new(sign, 0.0)));
                    }
                }
            }
        }
        let residual = out
            .iter()
            .flat_map(|p| p.terms().map(|(_, c)| c.norm_sqr()).collect::<Vec<_>>())
            .fold(0.0, |a, b| a + b)
            .sqrt();

        let mut min_det = f64::INFINITY;
        let subsets = basis.subsets(2).to_vec();
        for x in crate::identities::sample_points(q, grid) {
            let mut m = DMatrix::<f64>::zeros(q, q);
            for (idx, s) in subsets.iter().enumerate() {
                let w = omega[idx].evaluate(&x).re;
                m[(s[0], s[1])] += w;
                m[(s[1], s[0])] -= w;
            }
            min_det = min_det.min(m.determinant().abs());
        }
        let closed = residual <= LCS_TOLERANCE;
        let nondegenerate = min_det > 1e-12;
        Ok(LcsResult {
            residual,
            closed,
            min_determinant: min_det,
            nondegenerate,
            passed: closed && nondegenerate,
        })
    }

    /// `dx^1 ^ dx^2 + dx^3 ^ dx^4 + ...` as coefficient fields.
    pub fn standard_symplectic(&self) -> Result<Vec<TrigPoly>> {
        let basis = FormBasis::new(self.dim)?;
        Ok(basis
            .subsets(2)
            .iter()
            .map(|s| {
                let on = s[0] % 2 == 0 && s[1] == s[0] + 1;
                TrigPoly::constant(self.dim, if on { 1.0 } else { 0.0 })
            })
            .collect())
    }

    /// `e^f omega` for the given coefficient fields.
    pub fn conformal(&self, omega: &[TrigPoly], f: &TrigPoly) -> Vec<TrigPoly> {
        let (e, _) = exp_series(f, EXP_TAIL_TOLERANCE);
        omega.iter().map(|w| w.mul(&e)).collect()
    }
}

fn unit_dir(q: usize, j: usize) -> Vec<f64> {
    (0..q).map(|i| if i == j { 1.0 } else { 0.0 }).collect()
}

pub fn twist_json(theta: &TwistClass) -> serde_json::Value {
    let potential: Vec<serde_json::Value> = theta
        .potential
        .terms()
        .map(|(k, c)| json!({ "mode": k, "re": c.re, "im": c.im }))
        .collect();
    json!({ "constant": theta.constant, "potential": potential })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_twisted_dims() {
        let t = TorusModel::new(2, 4).unwrap();
        assert_eq!(
            t.harmonic_dims(&t.twist(&[0.0, 0.0], None)).unwrap().dims,
            vec![1, 2, 1]
        );
        assert_eq!(
            t.harmonic_dims(&t.twist(&[1.0, 0.0], None)).unwrap().dims,
            vec![0, 0, 0]
        );
    }

    #[test]
    fn cutoff_below_radius_is_rejected() {
        let t = TorusModel::new(2, 1).unwrap();
        let theta = t.twist(&[20.0, 0.0], None);
        assert!(matches!(t.harmonic_dims(&theta), Err(Error::CutoffInsufficient { .. })));
    }

    #[test]
    fn gauge_with_zero_potential_is_identity() {
        let t = TorusModel::new(2, 2).unwrap();
        let c = t.calculus(&t.twist(&[0.0, 0.0], None)).unwrap();
        let a = c.random_form(2, None, &mut TwistedCalculus::rng(1));
        let g = t.gauge_transform(&a, 2, &TrigPoly::zero(2));
        assert_eq!(g.form, a);
        assert!(g.warning.is_none());
    }

    #[test]
    fn intertwining_holds() {
        let t = TorusModel::new(2, 2).unwrap();
        let f = TrigPoly::sin(&[0, 1], 0.4).add(&TrigPoly::cos(&[1, 1], 0.2));
        let r = t.intertwining_residual(&t.twist(&[1.0, 0.0], None), &f, 2).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn lcs_examples() {
        let t = TorusModel::new(4, 1).unwrap();
        let omega = t.standard_symplectic().unwrap();
        let zero = t.twist(&[0.0; 4], None);
        assert!(t.lcs_check(&omega, &zero, 4).unwrap().passed);
        let f = TrigPoly::sin(&[1, 0, 0, 0], 0.3);
        let scaled = t.conformal(&omega, &f);
        let df = TwistClass::zero(4, 4).with_potential(f);
        assert!(t.lcs_check(&scaled, &df, 4).unwrap().passed);
        let bad = t.lcs_check(&omega, &t.twist(&[1.0, 0.0, 0.0, 0.0], None), 4).unwrap();
        assert!(!bad.passed && bad.nondegenerate && bad.residual > 0.5);
        assert!(TorusModel::new(3, 1)
            .unwrap()
            .lcs_check(&[], &TwistClass::zero(3, 3), 2)
            .is_err());
    }
}
