//! Pointwise exterior algebra over an orthonormal coframe `e^1..e^q`.
//!
//! Basis elements of degree `k` are strictly increasing index tuples in
//! lexicographic order. Every sign in the crate comes from the insertion
//! parity used by [`wedge_matrix`]: inserting `e^j` into `e^I` costs
//! `(-1)^{#{i in I : i < j}}`.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

pub const MAX_FRAME_DIM: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormBasis {
    frame_dim: usize,
    degree_bases: Vec<Vec<Vec<usize>>>,
    masks: Vec<Vec<u32>>,
    /// `(degree, index)` for each subset bitmask.
    lookup: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

impl FormBasis {
    pub fn new(frame_dim: usize) -> Result<Self> {
        if frame_dim == 0 || frame_dim > MAX_FRAME_DIM {
            return Err(Error::InvalidFrameDimension(frame_dim));
        }
        let mut degree_bases = Vec::with_capacity(frame_dim + 1);
        let mut masks = Vec::with_capacity(frame_dim + 1);
        let mut lookup = vec![(0, 0); 1 << frame_dim];
        let mut offsets = Vec::with_capacity(frame_dim + 2);
        let mut offset = 0;
        for k in 0..=frame_dim {
            let subsets: Vec<Vec<usize>> = (0..frame_dim).combinations(k).collect();
            let ms: Vec<u32> = subsets
                .iter()
                .map(|s| s.iter().fold(0u32, |m, &i| m | (1 << i)))
                .collect();
            for (idx, &m) in ms.iter().enumerate() {
                lookup[m as usize] = (k, idx);
            }
            offsets.push(offset);
            offset += subsets.len();
            degree_bases.push(subsets);
            masks.push(ms);
        }
        offsets.push(offset);
        Ok(Self {
            frame_dim,
            degree_bases,
            masks,
            lookup,
            offsets,
        })
    }

    pub fn frame_dim(&self) -> usize {
        self.frame_dim
    }

    /// `binomial(q, k)`.
    pub fn dim(&self, degree: usize) -> usize {
        self.degree_bases.get(degree).map_or(0, Vec::len)
    }

    /// `2^q`.
    pub fn total_dim(&self) -> usize {
        1 << self.frame_dim
    }

    pub fn subsets(&self, degree: usize) -> &[Vec<usize>] {
        &self.degree_bases[degree]
    }

    pub fn mask(&self, degree: usize, index: usize) -> u32 {
        self.masks[degree][index]
    }

    /// `(degree, index)` of a subset given as a bitmask.
    pub fn locate(&self, mask: u32) -> (usize, usize) {
        self.lookup[mask as usize]
    }

    /// Position of the first degree-`k` element in the degree-ordered full algebra.
    pub fn offset(&self, degree: usize) -> usize {
        self.offsets[degree]
    }

    pub fn degree_range(&self, degree: usize) -> std::ops::Range<usize> {
        self.offsets[degree]..self.offsets[degree + 1]
    }

    /// Index in the full algebra of a subset mask.
    pub fn global_index(&self, mask: u32) -> usize {
        let (k, i) = self.locate(mask);
        self.offsets[k] + i
    }

    /// Degree of the full-algebra index `g`.
    pub fn degree_of(&self, global: usize) -> usize {
        (0..=self.frame_dim)
            .find(|&k| self.degree_range(k).contains(&global))
            .expect("index inside the algebra")
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.frame_dim {
            return Err(Error::DegreeOutOfRange {
                degree,
                frame_dim: self.frame_dim,
            });
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.frame_dim {
            return Err(Error::DimensionMismatch {
                expected: self.frame_dim,
                actual: len,
            });
        }
        Ok(())
    }
}

/// Sign picked up when `e^j` moves past the members of `mask` below `j`.
fn insertion_sign(mask: u32, j: usize) -> bool {
    (mask & ((1u32 << j) - 1)).count_ones() % 2 == 1
}

/// A homogeneous form at a point, in the basis of its degree.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedVector<T> {
    degree: usize,
    coefficients: Vec<T>,
}

impl<T: Field> GradedVector<T> {
    pub fn new(basis: &FormBasis, degree: usize, coefficients: Vec<T>) -> Result<Self> {
        basis.check_degree(degree)?;
        if coefficients.len() != basis.dim(degree) {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(degree),
                actual: coefficients.len(),
            });
        }
        Ok(Self { degree, coefficients })
    }

    /// The basis element `e^{i_1} ^ ... ^ e^{i_k}` for sorted `indices`.
    pub fn basis_element(basis: &FormBasis, indices: &[usize]) -> Result<Self> {
        let mask = indices.iter().fold(0u32, |m, &i| m | (1 << i));
        if mask.count_ones() as usize != indices.len() || indices.iter().any(|&i| i >= basis.frame_dim) {
            return Err(Error::InvalidModel(format!("bad index tuple {indices:?}")));
        }
        let (degree, index) = basis.locate(mask);
        let mut coefficients = vec![T::zero(); basis.dim(degree)];
        coefficients[index] = T::one();
        Ok(Self { degree, coefficients })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }
}

/// A linear map between two fixed degrees of the pointwise algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseOperator<T> {
    pub source_degree: usize,
    pub target_degree: usize,
    pub matrix: Matrix<T>,
}

impl<T: Field> PointwiseOperator<T> {
    pub fn apply(&self, v: &GradedVector<T>) -> Result<GradedVector<T>> {
        if v.degree != self.source_degree {
            return Err(Error::DimensionMismatch {
                expected: self.source_degree,
                actual: v.degree,
            });
        }
        Ok(GradedVector {
            degree: self.target_degree,
            coefficients: self.matrix.apply(&v.coefficients),
        })
    }

    pub fn identity(basis: &FormBasis, degree: usize) -> Self {
        Self {
            source_degree: degree,
            target_degree: degree,
            matrix: Matrix::identity(basis.dim(degree)),
        }
    }
}

fn wedge_unchecked<T: Field>(c: &[T], basis: &FormBasis, k: usize) -> Matrix<T> {
    let mut m = Matrix::<T>::zeros(basis.dim(k + 1), basis.dim(k));
    for (col, &mask) in basis.masks[k].iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() || mask & (1 << j) != 0 {
                continue;
            }
            let (_, row) = basis.locate(mask | (1 << j));
            let term = if insertion_sign(mask, j) {
                -cj.clone()
            } else {
                cj.clone()
            };
            m[(row, col)] = m[(row, col)].clone() + term;
        }
    }
    m
}

fn interior_unchecked<T: Field>(v: &[T], basis: &FormBasis, k: usize) -> Matrix<T> {
    let mut m = Matrix::<T>::zeros(basis.dim(k - 1), basis.dim(k));
    for (col, &mask) in basis.masks[k].iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() || mask & (1 << j) == 0 {
                continue;
            }
            let (_, row) = basis.locate(mask & !(1 << j));
            let term = if insertion_sign(mask, j) {
                -vj.clone()
            } else {
                vj.clone()
            };
            m[(row, col)] = m[(row, col)].clone() + term;
        }
    }
    m
}

/// Matrix of `alpha -> c ^ alpha` from degree `k` to `k + 1`.
pub fn wedge_matrix<T: Field>(c: &[T], basis: &FormBasis, k: usize) -> Result<PointwiseOperator<T>> {
    basis.check_len(c.len())?;
    if k >= basis.frame_dim {
        return Err(Error::DegreeOutOfRange {
            degree: k,
            frame_dim: basis.frame_dim,
        });
    }
    Ok(PointwiseOperator {
        source_degree: k,
        target_degree: k + 1,
        matrix: wedge_unchecked(c, basis, k),
    })
}

/// Matrix of the contraction `alpha -> iota_v alpha` from degree `k` to `k - 1`.
pub fn interior_matrix<T: Field>(v: &[T], basis: &FormBasis, k: usize) -> Result<PointwiseOperator<T>> {
    basis.check_len(v.len())?;
    if k == 0 || k > basis.frame_dim {
        return Err(Error::DegreeOutOfRange {
            degree: k,
            frame_dim: basis.frame_dim,
        });
    }
    Ok(PointwiseOperator {
        source_degree: k,
        target_degree: k - 1,
        matrix: interior_unchecked(v, basis, k),
    })
}

/// The two graded components of Clifford multiplication `v . alpha = v^flat ^ alpha - iota_v alpha`
/// on a degree-`k` form. Either side is absent at the ends of the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordBlocks<T> {
    pub raise: Option<PointwiseOperator<T>>,
    pub lower: Option<PointwiseOperator<T>>,
}

pub fn clifford_matrix<T: Field>(v: &[T], basis: &FormBasis, k: usize) -> Result<CliffordBlocks<T>> {
    basis.check_len(v.len())?;
    basis.check_degree(k)?;
    let raise = (k < basis.frame_dim).then(|| PointwiseOperator {
        source_degree: k,
        target_degree: k + 1,
        matrix: wedge_unchecked(v, basis, k),
    });
    let lower = (k > 0).then(|| PointwiseOperator {
        source_degree: k,
        target_degree: k - 1,
        matrix: -&interior_unchecked(v, basis, k),
    });
    Ok(CliffordBlocks { raise, lower })
}

/// Adjoint with respect to the orthonormal-basis inner product.
pub fn adjoint<T: Field>(op: &PointwiseOperator<T>) -> PointwiseOperator<T> {
    PointwiseOperator {
        source_degree: op.target_degree,
        target_degree: op.source_degree,
        matrix: op.matrix.adjoint(),
    }
}

/// An operator on the whole algebra, kept as blocks keyed by `(target, source)` degree.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedOperator<T> {
    frame_dim: usize,
    blocks: BTreeMap<(usize, usize), Matrix<T>>,
}

impl<T: Field> GradedOperator<T> {
    pub fn zero(basis: &FormBasis) -> Self {
        Self {
            frame_dim: basis.frame_dim,
            blocks: BTreeMap::new(),
        }
    }

    pub fn identity(basis: &FormBasis) -> Self {
        let mut op = Self::zero(basis);
        for k in 0..=basis.frame_dim {
            op.insert(PointwiseOperator::identity(basis, k));
        }
        op
    }

    /// Adds `op` into the block it addresses.
    pub fn insert(&mut self, op: PointwiseOperator<T>) {
        let key = (op.target_degree, op.source_degree);
        match self.blocks.get_mut(&key) {
            Some(existing) => *existing = &*existing + &op.matrix,
            None => {
                self.blocks.insert(key, op.matrix);
            }
        }
    }

    pub fn block(&self, target: usize, source: usize) -> Option<&Matrix<T>> {
        self.blocks.get(&(target, source))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &Matrix<T>)> {
        self.blocks.iter()
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        let mut out = Self {
            frame_dim: self.frame_dim,
            blocks: BTreeMap::new(),
        };
        for (&(t, m), a) in &self.blocks {
            for (&(m2, s), b) in &rhs.blocks {
                if m == m2 {
                    out.insert(PointwiseOperator {
                        source_degree: s,
                        target_degree: t,
                        matrix: a * b,
                    });
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&(t, s), m) in &rhs.blocks {
            out.insert(PointwiseOperator {
                source_degree: s,
                target_degree: t,
                matrix: m.clone(),
            });
        }
        out
    }

    pub fn scale(&self, factor: &T) -> Self {
        Self {
            frame_dim: self.frame_dim,
            blocks: self.blocks.iter().map(|(k, m)| (*k, m.scale(factor))).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-T::one()))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            frame_dim: self.frame_dim,
            blocks: self.blocks.iter().map(|(&(t, s), m)| ((s, t), m.adjoint())).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.values().map(Matrix::max_abs).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    /// Flattened `2^q x 2^q` matrix in the degree-ordered basis.
    pub fn to_full(&self, basis: &FormBasis) -> Matrix<T> {
        let n = basis.total_dim();
        let mut full = Matrix::zeros(n, n);
        for (&(t, s), m) in &self.blocks {
            let (r0, c0) = (basis.offset(t), basis.offset(s));
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    full[(r0 + r, c0 + c)] = m[(r, c)].clone();
                }
            }
        }
        full
    }

    pub fn to_dmatrix(&self, basis: &FormBasis) -> DMatrix<Complex64> {
        self.to_full(basis).to_complex_dmatrix()
    }
}

/// `c ^ .` on every degree.
pub fn wedge_operator<T: Field>(c: &[T], basis: &FormBasis) -> Result<GradedOperator<T>> {
    basis.check_len(c.len())?;
    let mut op = GradedOperator::zero(basis);
    for k in 0..basis.frame_dim {
        op.insert(PointwiseOperator {
            source_degree: k,
            target_degree: k + 1,
            matrix: wedge_unchecked(c, basis, k),
        });
    }
    Ok(op)
}

/// `iota_v` on every degree.
pub fn interior_operator<T: Field>(v: &[T], basis: &FormBasis) -> Result<GradedOperator<T>> {
    basis.check_len(v.len())?;
    let mut op = GradedOperator::zero(basis);
    for k in 1..=basis.frame_dim {
        op.insert(PointwiseOperator {
            source_degree: k,
            target_degree: k - 1,
            matrix: interior_unchecked(v, basis, k),
        });
    }
    Ok(op)
}

/// Clifford multiplication by `v` on every degree.
pub fn clifford_operator<T: Field>(v: &[T], basis: &FormBasis) -> Result<GradedOperator<T>> {
    Ok(wedge_operator(v, basis)?.sub(&interior_operator(v, basis)?))
}

/// Extension of a coframe endomorphism to a derivation of the algebra.
///
/// `image[j][k]` is the coefficient of `e^j` in the image of `e^k`; the
/// extension is `sum_{j,k} image[j][k] e^j ^ iota_{e_k}`.
pub fn derivation_operator<T: Field>(image: &Matrix<T>, basis: &FormBasis) -> Result<GradedOperator<T>> {
    let q = basis.frame_dim;
    if image.shape() != (q, q) {
        return Err(Error::DimensionMismatch {
            expected: q,
            actual: image.rows(),
        });
    }
    let mut op = GradedOperator::zero(basis);
    for k in 1..=q {
        let mut m = Matrix::zeros(basis.dim(k), basis.dim(k));
        for j in 0..q {
            for l in 0..q {
                let a = &image[(j, l)];
                if a.is_zero() {
                    continue;
                }
                let mut ej = vec![T::zero(); q];
                ej[j] = a.clone();
                let mut el = vec![T::zero(); q];
                el[l] = T::one();
                let term = &wedge_unchecked(&ej, basis, k - 1) * &interior_unchecked(&el, basis, k);
                m = &m + &term;
            }
        }
        op.insert(PointwiseOperator {
            source_degree: k,
            target_degree: k,
            matrix: m,
        });
    }
    Ok(op)
}

/// Frame covector `e^j` (or vector `e_j`) as a coefficient list.
pub fn unit<T: Field>(q: usize, j: usize) -> Vec<T> {
    (0..q).map(|i| if i == j { T::one() } else { T::zero() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn basis(n: usize) -> FormBasis {
        FormBasis::new(n).unwrap()
    }

    #[test]
    fn basis_sizes_are_binomial() {
        let b = basis(4);
        let dims: Vec<usize> = (0..=4).map(|k| b.dim(k)).collect();
        assert_eq!(dims, vec![1, 4, 6, 4, 1]);
        assert_eq!(b.total_dim(), 16);
        assert_eq!(b.subsets(2)[0], vec![0, 1]);
        assert_eq!(b.subsets(2)[5], vec![2, 3]);
        assert!(FormBasis::new(0).is_err());
    }

    #[test]
    fn wedge_examples() {
        let b = basis(2);
        let e1 = unit::<f64>(2, 0);
        let w0 = wedge_matrix(&e1, &b, 0).unwrap();
        assert_eq!(w0.matrix.column(0), vec![1.0, 0.0]);
        let w1 = wedge_matrix(&e1, &b, 1).unwrap();
        // e1 ^ e1 = 0, e1 ^ e2 = +e12
        assert_eq!(w1.matrix.column(0), vec![0.0]);
        assert_eq!(w1.matrix.column(1), vec![1.0]);
        assert!(matches!(wedge_matrix(&e1, &b, 2), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn interior_examples() {
        let b = basis(2);
        let e1 = unit::<f64>(2, 0);
        let i1 = interior_matrix(&e1, &b, 1).unwrap();
        assert_eq!(i1.matrix.column(0), vec![1.0]);
        assert_eq!(i1.matrix.column(1), vec![0.0]);
        let i2 = interior_matrix(&e1, &b, 2).unwrap();
        assert_eq!(i2.matrix.column(0), vec![0.0, 1.0]);
        assert!(interior_matrix(&e1, &b, 0).is_err());
    }

    #[test]
    fn clifford_examples() {
        let b = basis(2);
        let e1 = unit::<f64>(2, 0);
        let c0 = clifford_matrix(&e1, &b, 0).unwrap();
        assert!(c0.lower.is_none());
        assert_eq!(c0.raise.unwrap().matrix.column(0), vec![1.0, 0.0]);
        let c1 = clifford_matrix(&e1, &b, 1).unwrap();
        assert_eq!(c1.lower.unwrap().matrix.column(0), vec![-1.0]);
        let full = clifford_operator(&e1, &b).unwrap();
        let sq = full.compose(&full);
        assert!(sq.add(&GradedOperator::identity(&b)).is_zero());
    }

    #[test]
    fn adjoint_of_wedge_is_interior() {
        for n in 1..=4 {
            let b = basis(n);
            for j in 0..n {
                let e = unit::<BigRational>(n, j);
                for k in 0..n {
                    let w = wedge_matrix(&e, &b, k).unwrap();
                    let i = interior_matrix(&e, &b, k + 1).unwrap();
                    assert_eq!(adjoint(&w), i, "q={n} j={j} k={k}");
                }
            }
        }
        let id = PointwiseOperator::<f64>::identity(&basis(3), 1);
        assert_eq!(adjoint(&id), id);
    }

    fn rational_vec(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
        proptest::collection::vec(-6i64..=6, n).prop_map(|v| v.into_iter().map(q).collect())
    }

    fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
        a.iter().zip(b).fold(q(0), |acc, (x, y)| acc + x * y)
    }

    proptest! {
        #[test]
        fn squares_of_wedge_and_interior_vanish(n in 1usize..=5, seed in rational_vec(5)) {
            let b = basis(n);
            let c = &seed[..n];
            let w = wedge_operator(c, &b).unwrap();
            let i = interior_operator(c, &b).unwrap();
            prop_assert!(w.compose(&w).is_zero());
            prop_assert!(i.compose(&i).is_zero());
        }

        #[test]
        fn clifford_anticommutator_is_metric(n in 1usize..=5, v in rational_vec(5), w in rational_vec(5)) {
            let b = basis(n);
            let (v, w) = (&v[..n], &w[..n]);
            let cv = clifford_operator(v, &b).unwrap();
            let cw = clifford_operator(w, &b).unwrap();
            let anti = cv.compose(&cw).add(&cw.compose(&cv));
            let expected = GradedOperator::identity(&b).scale(&(q(-2) * dot(v, w)));
            prop_assert!(anti.sub(&expected).is_zero());
        }

        #[test]
        fn interior_of_clifford_product(n in 1usize..=5, v in rational_vec(5), w in rational_vec(5)) {
            // iota_w (v . a) = g(w, v) a - v . (iota_w a)
            let b = basis(n);
            let (v, w) = (&v[..n], &w[..n]);
            let cv = clifford_operator(v, &b).unwrap();
            let iw = interior_operator(w, &b).unwrap();
            let lhs = iw.compose(&cv);
            let rhs = GradedOperator::identity(&b).scale(&dot(w, v)).sub(&cv.compose(&iw));
            prop_assert!(lhs.sub(&rhs).is_zero());
        }

        #[test]
        fn floating_anticommutator_within_tolerance(n in 1usize..=4, v in proptest::collection::vec(-1.0f64..1.0, 4), w in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let b = basis(n);
            let (v, w) = (&v[..n], &w[..n]);
            let cv = clifford_operator(v, &b).unwrap();
            let cw = clifford_operator(w, &b).unwrap();
            let g: f64 = v.iter().zip(w).map(|(a, c)| a * c).sum();
            let anti = cv.compose(&cw).add(&cw.compose(&cv));
            let residual = anti.sub(&GradedOperator::identity(&b).scale(&(-2.0 * g))).max_abs();
            prop_assert!(residual <= 1e-13);
        }

        #[test]
        fn adjoint_is_an_involution(rows in 1usize..5, cols in 1usize..5, entries in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 25)) {
            let m = Matrix::from_fn(rows, cols, |r, c| {
                let (re, im) = entries[r * 5 + c];
                Complex64::new(re, im)
            });
            let op = PointwiseOperator { source_degree: 1, target_degree: 2, matrix: m };
            prop_assert_eq!(adjoint(&adjoint(&op)), op);
        }
    }

    #[test]
    fn derivation_of_identity_counts_degree() {
        let b = basis(3);
        let id = derivation_operator(&Matrix::<BigRational>::identity(3), &b).unwrap();
        for k in 1..=3 {
            let blk = id.block(k, k).unwrap();
            assert_eq!(*blk, Matrix::identity(b.dim(k)).scale(&q(k as i64)));
        }
    }
}
