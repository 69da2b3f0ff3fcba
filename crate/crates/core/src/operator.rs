//! Linear operators on truncated spaces of form-valued Fourier series.
//!
//! A vector lives on a [`ModeBox`] with `width` components per mode, laid out
//! mode-major. An operator maps the source box into a (possibly larger) target
//! box and is stored as dense blocks keyed by `(target mode, source mode)`.
//! Multiplication by a trigonometric polynomial widens the target box instead
//! of truncating, so compositions are exact restrictions of the infinite
//! operators.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::exterior::FormBasis;
use crate::fourier::{ModeBox, TrigPoly};

#[derive(Clone, Debug, PartialEq)]
pub struct ModeBlockOperator {
    src: ModeBox,
    tgt: ModeBox,
    src_width: usize,
    tgt_width: usize,
    blocks: BTreeMap<(usize, usize), DMatrix<Complex64>>,
}

impl ModeBlockOperator {
    pub fn zero(src: ModeBox, tgt: ModeBox, tgt_width: usize, src_width: usize) -> Self {
        assert_eq!(src.dim, tgt.dim, "mode dimensions differ");
        Self {
            src,
            tgt,
            src_width,
            tgt_width,
            blocks: BTreeMap::new(),
        }
    }

    /// Block-diagonal operator with block `f(k)` on mode `k`.
    pub fn diagonal(
        space: ModeBox,
        tgt_width: usize,
        src_width: usize,
        f: impl Fn(&[i32]) -> Option<DMatrix<Complex64>> + Sync,
    ) -> Self {
        let blocks = (0..space.len())
            .into_par_iter()
            .filter_map(|i| f(&space.mode(i)).map(|m| ((i, i), m)))
            .collect::<Vec<_>>();
        let mut op = Self::zero(space, space, tgt_width, src_width);
        for (key, m) in blocks {
            assert_eq!(m.shape(), (tgt_width, src_width), "block shape");
            op.blocks.insert(key, m);
        }
        op
    }

    pub fn pointwise(space: ModeBox, matrix: &DMatrix<Complex64>) -> Self {
        Self::diagonal(space, matrix.nrows(), matrix.ncols(), |_| Some(matrix.clone()))
    }

    pub fn identity(space: ModeBox, width: usize) -> Self {
        Self::pointwise(space, &DMatrix::identity(width, width))
    }

    /// `alpha -> f * (matrix alpha)` for a trigonometric polynomial `f`.
    pub fn multiplication(space: ModeBox, f: &TrigPoly, matrix: &DMatrix<Complex64>) -> Self {
        let tgt = space.grow(f.bandwidth());
        let mut op = Self::zero(space, tgt, matrix.nrows(), matrix.ncols());
        for (s, k) in space.modes().enumerate() {
            for (j, c) in f.terms() {
                let shifted: Vec<i32> = k.iter().zip(j).map(|(a, b)| a + b).collect();
                let t = tgt.index(&shifted).expect("target box covers the shift");
                op.accumulate(t, s, matrix * *c);
            }
        }
        op
    }

    fn accumulate(&mut self, t: usize, s: usize, m: DMatrix<Complex64>) {
        match self.blocks.get_mut(&(t, s)) {
            Some(b) => *b += m,
            None => {
                self.blocks.insert((t, s), m);
            }
        }
    }

    pub fn source(&self) -> ModeBox {
        self.src
    }

    pub fn target(&self) -> ModeBox {
        self.tgt
    }

    pub fn source_width(&self) -> usize {
        self.src_width
    }

    pub fn target_width(&self) -> usize {
        self.tgt_width
    }

    pub fn source_len(&self) -> usize {
        self.src.len() * self.src_width
    }

    pub fn target_len(&self) -> usize {
        self.tgt.len() * self.tgt_width
    }

    /// Modes a single block can move by; 0 for block-diagonal operators.
    pub fn bandwidth(&self) -> usize {
        self.blocks
            .keys()
            .map(|&(t, s)| {
                let (a, b) = (self.tgt.mode(t), self.src.mode(s));
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| (x - y).unsigned_abs() as usize)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_block_diagonal(&self) -> bool {
        self.bandwidth() == 0
    }

    /// Block from source mode `s` to target mode `t`, if stored.
    pub fn block(&self, target_mode: &[i32], source_mode: &[i32]) -> Option<&DMatrix<Complex64>> {
        let t = self.tgt.index(target_mode)?;
        let s = self.src.index(source_mode)?;
        self.blocks.get(&(t, s))
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((Vec<i32>, Vec<i32>), &DMatrix<Complex64>)> {
        self.blocks
            .iter()
            .map(|(&(t, s), m)| ((self.tgt.mode(t), self.src.mode(s)), m))
    }

    /// `self o rhs`. The source box of `self` must contain the target box of `rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert!(
            self.src.radius >= rhs.tgt.radius,
            "composition would truncate: source radius {} < target radius {}",
            self.src.radius,
            rhs.tgt.radius
        );
        assert_eq!(self.src_width, rhs.tgt_width, "inner widths differ");
        let mut by_source: BTreeMap<usize, Vec<(usize, &DMatrix<Complex64>)>> = BTreeMap::new();
        for (&(t, s), m) in &self.blocks {
            by_source.entry(s).or_default().push((t, m));
        }
        let mut out = Self::zero(rhs.src, self.tgt, self.tgt_width, rhs.src_width);
        for (&(t, s), b) in &rhs.blocks {
            let mid = self.src.index(&rhs.tgt.mode(t)).expect("box containment");
            if let Some(list) = by_source.get(&mid) {
                for &(t2, a) in list {
                    out.accumulate(t2, s, a * b);
                }
            }
        }
        out
    }

    /// Same operator viewed with a larger target box.
    pub fn extend_target(&self, radius: usize) -> Self {
        assert!(radius >= self.tgt.radius, "extend_target cannot shrink");
        let tgt = ModeBox::new(self.tgt.dim, radius);
        let blocks = self
            .blocks
            .iter()
            .map(|(&(t, s), m)| ((tgt.index(&self.tgt.mode(t)).unwrap(), s), m.clone()))
            .collect();
        Self {
            tgt,
            blocks,
            ..*self.shallow()
        }
    }

    /// Orthogonal projection of the output onto a smaller target box.
    pub fn restrict_target(&self, radius: usize) -> Self {
        let tgt = ModeBox::new(self.tgt.dim, radius);
        let blocks = self
            .blocks
            .iter()
            .filter_map(|(&(t, s), m)| tgt.index(&self.tgt.mode(t)).map(|i| ((i, s), m.clone())))
            .collect();
        Self {
            tgt,
            blocks,
            ..*self.shallow()
        }
    }

    /// Restriction to the forms supported on a smaller source box.
    pub fn restrict_source(&self, radius: usize) -> Self {
        let src = ModeBox::new(self.src.dim, radius);
        let blocks = self
            .blocks
            .iter()
            .filter_map(|(&(t, s), m)| src.index(&self.src.mode(s)).map(|i| ((t, i), m.clone())))
            .collect();
        Self {
            src,
            blocks,
            ..*self.shallow()
        }
    }

    fn shallow(&self) -> Box<Self> {
        Box::new(Self {
            blocks: BTreeMap::new(),
            ..*self
        })
    }

    fn aligned(&self, rhs: &Self) -> (Self, Self) {
        assert_eq!(self.src, rhs.src, "source boxes differ");
        assert_eq!(
            (self.tgt_width, self.src_width),
            (rhs.tgt_width, rhs.src_width),
            "widths differ"
        );
        let r = self.tgt.radius.max(rhs.tgt.radius);
        (self.extend_target(r), rhs.extend_target(r))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (mut a, b) = self.aligned(rhs);
        for ((t, s), m) in b.blocks {
            a.accumulate(t, s, m);
        }
        a
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for m in out.blocks.values_mut() {
            *m *= factor;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self {
            src: self.tgt,
            tgt: self.src,
            src_width: self.tgt_width,
            tgt_width: self.src_width,
            blocks: self.blocks.iter().map(|(&(t, s), m)| ((s, t), m.adjoint())).collect(),
        }
    }

    /// Component mapping degree `source` to degree `target` in the degree-ordered algebra.
    pub fn graded(&self, basis: &FormBasis, target: usize, source: usize) -> Self {
        assert_eq!(self.tgt_width, basis.total_dim(), "operator is not on the full algebra");
        let (tr, sr) = (basis.degree_range(target), basis.degree_range(source));
        let blocks = self
            .blocks
            .iter()
            .map(|(&k, m)| {
                let sub = m.view((tr.start, sr.start), (tr.len(), sr.len())).into_owned();
                (k, sub)
            })
            .collect();
        Self {
            src: self.src,
            tgt: self.tgt,
            src_width: sr.len(),
            tgt_width: tr.len(),
            blocks,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .values()
            .flat_map(|m| m.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    /// Spectral norm; exact for block-diagonal operators, otherwise the Schur
    /// bound `sqrt(max row sum * max column sum)`, which is never smaller.
    pub fn norm(&self) -> f64 {
        if self.is_block_diagonal() {
            return self
                .blocks
                .values()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|m| spectral_norm(m))
                .reduce(|| 0.0, f64::max);
        }
        let mut rows = vec![0.0; self.target_len()];
        let mut cols = vec![0.0; self.source_len()];
        for (&(t, s), m) in &self.blocks {
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    let a = m[(r, c)].norm();
                    rows[t * self.tgt_width + r] += a;
                    cols[s * self.src_width + c] += a;
                }
            }
        }
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        (max(&rows) * max(&cols)).sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.target_len(), self.source_len());
        for (&(t, s), m) in &self.blocks {
            out.view_mut((t * self.tgt_width, s * self.src_width), m.shape())
                .copy_from(m);
        }
        out
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        assert_eq!(v.len(), self.source_len(), "vector length");
        let mut out = DVector::zeros(self.target_len());
        for (&(t, s), m) in &self.blocks {
            let x = v.rows(s * self.src_width, self.src_width);
            let mut y = out.rows_mut(t * self.tgt_width, self.tgt_width);
            y += m * x;
        }
        out
    }
}

pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Reindexes a vector from one box onto a larger one, padding with zeros.
pub fn embed(v: &DVector<Complex64>, from: ModeBox, to: ModeBox, width: usize) -> DVector<Complex64> {
    let mut out = DVector::zeros(to.len() * width);
    for (i, k) in from.modes().enumerate() {
        let j = to.index(&k).expect("target box contains source box");
        out.rows_mut(j * width, width).copy_from(&v.rows(i * width, width));
    }
    out
}
