//! Residuals of the operator identities, each side assembled independently.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::calculus::{inner, TwistedCalculus};
use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::operator::{embed, ModeBlockOperator};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `|d~ d~|`.
pub fn d_squared(c: &TwistedCalculus, radius: usize) -> f64 {
    c.twisted_d(radius + c.bandwidth()).compose(&c.twisted_d(radius)).norm()
}

/// `|delta~ delta~|`.
pub fn delta_squared(c: &TwistedCalculus, radius: usize) -> f64 {
    c.twisted_delta(radius + c.bandwidth())
        .compose(&c.twisted_delta(radius))
        .norm()
}

/// `|(d~ on V_r)^* - P_r delta~|`: the formula for `delta~` against the true adjoint.
pub fn adjointness(c: &TwistedCalculus, radius: usize) -> f64 {
    let d = c.twisted_d(radius);
    let delta = c.twisted_delta(d.target().radius).restrict_target(radius);
    d.adjoint().sub(&delta).norm()
}

/// Largest `|<d~ a, b> - <a, delta~ b>|` over seeded random pairs, relative to `|a| |b|`.
pub fn adjointness_pairs(c: &TwistedCalculus, radius: usize, pairs: usize, seed: u64) -> f64 {
    let mut rng = TwistedCalculus::rng(seed);
    let d = c.twisted_d(radius);
    let outer = d.target().radius;
    let delta = c.twisted_delta(outer);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let a = c.random_form(radius, None, &mut rng);
        let b = c.random_form(outer, None, &mut rng);
        let lhs = inner(&d.apply(&a), &b);
        let db = delta.apply(&b);
        let a_big = embed(&a, d.source(), delta.target(), c.width());
        let rhs = inner(&a_big, &db);
        worst = worst.max((lhs - rhs).norm() / (a.norm() * b.norm()));
    }
    worst
}

/// `d - eta ^` against `sum e^i ^ nabla~_i`.
pub fn d_assemblies(c: &TwistedCalculus, radius: usize) -> f64 {
    c.twisted_d(radius).sub(&c.twisted_d_frame(radius)).norm()
}

/// `|D~^2 - Delta~|`.
pub fn dirac_square(c: &TwistedCalculus, radius: usize) -> f64 {
    let dirac = c.dirac(radius);
    c.dirac(radius + c.bandwidth())
        .compose(&dirac)
        .sub(&c.laplacian(radius))
        .norm()
}

/// Clifford assembly of `D~` against `d~ + delta~`.
pub fn dirac_assemblies(c: &TwistedCalculus, radius: usize) -> f64 {
    c.dirac(radius).sub(&c.dirac_clifford(radius)).norm()
}

/// `|Delta~ - (sum nabla~* nabla~ - 2 sum e_i . iota_{nabla_i theta} + R)|`.
pub fn weitzenbock(c: &TwistedCalculus, radius: usize) -> f64 {
    c.laplacian(radius).sub(&c.weitzenbock_rhs(radius)).norm()
}

fn nabla_vw(c: &TwistedCalculus, v: &[f64], w: &[f64]) -> Vec<f64> {
    let g = c.geometry();
    let q = c.q();
    (0..q)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..q {
                for j in 0..q {
                    s += v[i] * w[j] * g.gamma(i, j, k);
                }
            }
            s
        })
        .collect()
}

fn combine(c: &TwistedCalculus, w: &[f64], mats: impl Fn(usize) -> DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = c.width();
    w.iter()
        .enumerate()
        .fold(DMatrix::zeros(n, n), |acc, (i, wi)| acc + mats(i) * real(*wi))
}

/// `|nabla~_v (w . a) - (nabla_v w) . a - w . nabla~_v a|` for constant frame fields.
pub fn leibniz(c: &TwistedCalculus, radius: usize, v: &[f64], w: &[f64]) -> f64 {
    let r = radius + c.bandwidth();
    let cw = combine(c, w, |i| c.clifford_matrix(i).clone());
    let cnw = combine(c, &nabla_vw(c, v, w), |i| c.clifford_matrix(i).clone());
    let lhs = c.nabla_tilde_along(v, radius).compose(&c.pointwise(radius, &cw));
    let rhs = c
        .pointwise(radius, &cnw)
        .add(&c.pointwise(r, &cw).compose(&c.nabla_tilde_along(v, radius)));
    lhs.sub(&rhs).norm()
}

/// `|iota_w nabla~_v - nabla~_v iota_w + iota_{nabla_v w}|` for constant frame fields.
pub fn interior_nabla(c: &TwistedCalculus, radius: usize, v: &[f64], w: &[f64]) -> f64 {
    let r = radius + c.bandwidth();
    let iw = combine(c, w, |i| c.interior_matrix(i).clone());
    let inw = combine(c, &nabla_vw(c, v, w), |i| c.interior_matrix(i).clone());
    let lhs = c.pointwise(r, &iw).compose(&c.nabla_tilde_along(v, radius));
    let rhs = c
        .nabla_tilde_along(v, radius)
        .compose(&c.pointwise(radius, &iw))
        .sub(&c.pointwise(radius, &inw));
    lhs.sub(&rhs).norm()
}

/// `|L_v - nabla_v - sum e^i ^ iota_{nabla_i v}|` for `v = theta^sharp`.
pub fn lie_derivative_formula(c: &TwistedCalculus, radius: usize) -> f64 {
    let v = c.theta().to_vec();
    let lie = c.lie_derivative(&v, radius);
    lie.sub(&c.covariant_along(&v, radius))
        .sub(&c.lie_minus_covariant(&v, radius))
        .norm()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CartanResiduals {
    /// `|d~ iota_theta + iota_theta d~ - (nabla_theta - eta(theta))|`.
    pub cartan: f64,
    /// `|nabla~_theta d~ - d~ nabla~_theta|`.
    pub commute_d: f64,
    /// `|nabla~_theta delta~ - delta~ nabla~_theta|`.
    pub commute_delta: f64,
    /// `|theta|^2`, the scalar in the Cartan formula when `kappa = 0`.
    pub theta_norm_squared: f64,
    /// `eta(theta) = kappa(theta) / 2 + |theta|^2`.
    pub eta_theta: f64,
}

/// The Cartan formula and both commutation relations for a parallel twist.
pub fn cartan(c: &TwistedCalculus, radius: usize) -> Result<CartanResiduals> {
    if c.twist().has_potential() {
        return Err(Error::NotParallel {
            residual: c.twist().potential.l1_norm(),
        });
    }
    let hess = c
        .theta_hessian()
        .iter()
        .flatten()
        .map(TrigPoly::l1_norm)
        .fold(0.0, f64::max);
    if hess > 1e-12 {
        return Err(Error::NotParallel { residual: hess });
    }
    let theta = c.twist().constant.clone();
    let kappa = c.geometry().mean_curvature();
    let theta_norm_squared: f64 = theta.iter().map(|t| t * t).sum();
    let eta_theta = theta_norm_squared + 0.5 * kappa.iter().zip(&theta).map(|(k, t)| k * t).sum::<f64>();
    let n = c.width();
    let it = c.pointwise(radius, &combine(c, &theta, |i| c.interior_matrix(i).clone()));
    let d = c.twisted_d(radius);
    let delta = c.twisted_delta(radius);
    let lhs = d.compose(&it).add(&it.compose(&d));
    let nabla_theta = (0..c.q()).fold(
        ModeBlockOperator::zero(c.space(radius), c.space(radius), n, n),
        |acc, i| acc.add(&c.nabla(i, radius).scale(real(theta[i]))),
    );
    let rhs = nabla_theta.sub(&c.identity(radius).scale(real(eta_theta)));
    let nt = c.nabla_tilde_along(&theta, radius);
    Ok(CartanResiduals {
        cartan: lhs.sub(&rhs).norm(),
        commute_d: nt.compose(&d).sub(&d.compose(&nt)).norm(),
        commute_delta: nt.compose(&delta).sub(&delta.compose(&nt)).norm(),
        theta_norm_squared,
        eta_theta,
    })
}

/// Smallest eigenvalue of the Laplacian compressed to the box.
pub fn laplacian_min_eigenvalue(c: &TwistedCalculus, radius: usize) -> f64 {
    let lap = c.laplacian(radius).restrict_target(radius);
    let hermitian_min = |m: &DMatrix<Complex64>| {
        let h = (m + m.adjoint()) * real(0.5);
        h.symmetric_eigenvalues().min()
    };
    if lap.is_block_diagonal() {
        lap.blocks()
            .map(|(_, m)| hermitian_min(m))
            .fold(f64::INFINITY, f64::min)
    } else {
        hermitian_min(&lap.to_dense())
    }
}

/// Largest deviation from Hermitian symmetry of the compressed Laplacian.
pub fn laplacian_asymmetry(c: &TwistedCalculus, radius: usize) -> f64 {
    let lap = c.laplacian(radius).restrict_target(radius);
    lap.sub(&lap.adjoint()).norm()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BochnerResult {
    /// Largest `|<Delta~ a, a> - sum |nabla~_i a|^2 - <beta a, a>| / max(1, |<Delta~ a, a>|)`.
    pub residual: f64,
    /// Per degree `1..q-1`: smallest eigenvalue of `beta` over the sample points.
    pub min_eigenvalues: Vec<f64>,
    /// Per degree `1..q-1`: largest eigenvalue of `beta` over the sample points.
    pub max_eigenvalues: Vec<f64>,
    /// `beta >= 0` everywhere and positive definite at some sample point, in every intermediate degree.
    pub vanishing_verdict: bool,
    pub samples: usize,
}

pub const BOCHNER_TOLERANCE: f64 = 1e-12;

/// The Bochner integral identity on seeded random forms, and the spectrum of `beta`.
pub fn bochner(c: &TwistedCalculus, radius: usize, forms: usize, seed: u64, grid: usize) -> BochnerResult {
    let mut rng = TwistedCalculus::rng(seed);
    let lap = c.laplacian(radius);
    let beta = c.bochner_operator(radius);
    let nablas: Vec<ModeBlockOperator> = (0..c.q()).map(|i| c.nabla_tilde(i, radius)).collect();
    let mut residual: f64 = 0.0;
    for _ in 0..forms {
        let a = c.random_form(radius, None, &mut rng);
        let at = |op: &ModeBlockOperator| -> Complex64 {
            let image = op.apply(&a);
            inner(&image, &embed(&a, op.source(), op.target(), c.width()))
        };
        let lhs = at(&lap);
        let grad: f64 = nablas.iter().map(|op| op.apply(&a).norm_squared()).sum();
        let rhs = real(grad) + at(&beta);
        residual = residual.max((lhs - rhs).norm() / lhs.norm().max(1.0));
    }

    let q = c.q();
    let basis = c.basis();
    let points = sample_points(
        c.geometry().mode_dim(),
        if c.twist().has_potential() { grid } else { 1 },
    );
    let mut min_eigenvalues = vec![f64::INFINITY; q.saturating_sub(1)];
    let mut max_eigenvalues = vec![f64::NEG_INFINITY; q.saturating_sub(1)];
    let mut positive_somewhere = vec![false; q.saturating_sub(1)];
    for x in &points {
        let b = c.bochner_at(x);
        for p in 1..q {
            let range = basis.degree_range(p);
            let block = b
                .view((range.start, range.start), (range.len(), range.len()))
                .into_owned();
            let h = (&block + block.adjoint()) * real(0.5);
            let eig = h.symmetric_eigenvalues();
            min_eigenvalues[p - 1] = min_eigenvalues[p - 1].min(eig.min());
            max_eigenvalues[p - 1] = max_eigenvalues[p - 1].max(eig.max());
            positive_somewhere[p - 1] |= eig.min() > BOCHNER_TOLERANCE;
        }
    }
    let vanishing_verdict =
        q > 1 && min_eigenvalues.iter().all(|&m| m >= -BOCHNER_TOLERANCE) && positive_somewhere.iter().all(|&p| p);
    BochnerResult {
        residual,
        min_eigenvalues,
        max_eigenvalues,
        vanishing_verdict,
        samples: points.len(),
    }
}

/// Regular grid with `per_axis` points per coordinate on the unit cube.
pub fn sample_points(dim: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let per_axis = per_axis.max(1);
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let x = (idx % per_axis) as f64 / per_axis as f64;
                    idx /= per_axis;
                    x
                })
                .collect()
        })
        .collect()
}

/// Components of one form in the orthogonal splitting `Im d~ + Im delta~ + ker Delta~`.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeParts {
    pub exact: DVector<Complex64>,
    pub coexact: DVector<Complex64>,
    pub harmonic: DVector<Complex64>,
    /// `|a - (exact + coexact + harmonic)|`.
    pub reconstruction: f64,
    /// Largest absolute pairwise inner product of the three parts.
    pub orthogonality: f64,
}

fn column_space_projector(m: &DMatrix<Complex64>, rank_tol: f64) -> DMatrix<Complex64> {
    let n = m.nrows();
    if m.ncols() == 0 {
        return DMatrix::zeros(n, n);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let largest = svd.singular_values.max();
    let threshold = rank_tol * largest.max(1.0);
    let mut p = DMatrix::zeros(n, n);
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s >= threshold {
            let col = u.column(j);
            p += col * col.adjoint();
        }
    }
    p
}

/// Orthogonal decomposition of a degree-`p` form supported on the box.
/// Requires a constant twist, so that every mode decouples.
pub fn hodge_decompose(
    c: &TwistedCalculus,
    radius: usize,
    degree: usize,
    form: &DVector<Complex64>,
    rank_tol: f64,
) -> Result<HodgeParts> {
    if c.twist().has_potential() {
        return Err(Error::Unsupported(
            "Hodge decomposition needs a constant twist (modes must decouple)".into(),
        ));
    }
    let q = c.q();
    if degree > q {
        return Err(Error::DegreeOutOfRange { degree, frame_dim: q });
    }
    let basis = c.basis();
    let width = basis.dim(degree);
    let space = c.space(radius);
    if form.len() != space.len() * width {
        return Err(Error::DimensionMismatch {
            expected: space.len() * width,
            actual: form.len(),
        });
    }
    let d = c.twisted_d(radius);
    let delta = c.twisted_delta(radius);
    let lap = c.laplacian(radius);
    let d_in = (degree > 0).then(|| d.graded(basis, degree, degree - 1));
    let delta_in = (degree < q).then(|| delta.graded(basis, degree, degree + 1));
    let lap_pp = lap.graded(basis, degree, degree);
    let mut exact = DVector::zeros(form.len());
    let mut coexact = DVector::zeros(form.len());
    let mut harmonic = DVector::zeros(form.len());
    for (i, k) in space.modes().enumerate() {
        let a = form.rows(i * width, width).into_owned();
        let block = |op: &Option<ModeBlockOperator>, cols: usize| {
            op.as_ref()
                .and_then(|o| o.block(&k, &k).cloned())
                .unwrap_or_else(|| DMatrix::zeros(width, cols))
        };
        let pe = column_space_projector(&block(&d_in, basis.dim(degree.saturating_sub(1))), rank_tol);
        let pc = column_space_projector(&block(&delta_in, basis.dim((degree + 1).min(q))), rank_tol);
        let l = lap_pp
            .block(&k, &k)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(width, width));
        let eig = ((&l + l.adjoint()) * real(0.5)).symmetric_eigen();
        let largest = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut ph = DMatrix::zeros(width, width);
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda.abs() < rank_tol * largest.max(1.0) {
                let col = eig.eigenvectors.column(j);
                ph += col * col.adjoint();
            }
        }
        exact.rows_mut(i * width, width).copy_from(&(&pe * &a));
        coexact.rows_mut(i * width, width).copy_from(&(&pc * &a));
        harmonic.rows_mut(i * width, width).copy_from(&(&ph * &a));
    }
    let reconstruction = (form - &exact - &coexact - &harmonic).norm();
    let orthogonality = [
        exact.dotc(&coexact).norm(),
        exact.dotc(&harmonic).norm(),
        coexact.dotc(&harmonic).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(HodgeParts {
        exact,
        coexact,
        harmonic,
        reconstruction,
        orthogonality,
    })
}
