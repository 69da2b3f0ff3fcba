//! Fourier modes on `T^m = R^m / Z^m` and finite trigonometric polynomials.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Mode = Vec<i32>;

/// The cube of modes `{k in Z^m : max |k_j| <= radius}` with a fixed enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeBox {
    pub dim: usize,
    pub radius: usize,
}

impl ModeBox {
    pub fn new(dim: usize, radius: usize) -> Self {
        Self { dim, radius }
    }

    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, mode: &[i32]) -> bool {
        mode.len() == self.dim && mode.iter().all(|&k| k.unsigned_abs() as usize <= self.radius)
    }

    pub fn index(&self, mode: &[i32]) -> Option<usize> {
        if !self.contains(mode) {
            return None;
        }
        let side = self.side();
        let r = self.radius as i32;
        Some(mode.iter().rev().fold(0, |acc, &k| acc * side + (k + r) as usize))
    }

    pub fn mode(&self, mut index: usize) -> Mode {
        let side = self.side();
        let r = self.radius as i32;
        (0..self.dim)
            .map(|_| {
                let k = (index % side) as i32 - r;
                index /= side;
                k
            })
            .collect()
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.len()).map(|i| self.mode(i))
    }

    pub fn grow(&self, by: usize) -> Self {
        Self::new(self.dim, self.radius + by)
    }
}

/// Finite Fourier series `sum_k c_k exp(2 pi i k.x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: BTreeMap<Mode, Complex64>,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], Complex64::new(value, 0.0));
        p
    }

    /// `amplitude * sin(2 pi k.x)`.
    pub fn sin(freq: &[i32], amplitude: f64) -> Self {
        let mut p = Self::zero(freq.len());
        let neg: Mode = freq.iter().map(|k| -k).collect();
        p.add_term(freq.to_vec(), Complex64::new(0.0, -amplitude / 2.0));
        p.add_term(neg, Complex64::new(0.0, amplitude / 2.0));
        p
    }

    /// `amplitude * cos(2 pi k.x)`.
    pub fn cos(freq: &[i32], amplitude: f64) -> Self {
        let mut p = Self::zero(freq.len());
        let neg: Mode = freq.iter().map(|k| -k).collect();
        p.add_term(freq.to_vec(), Complex64::new(amplitude / 2.0, 0.0));
        p.add_term(neg, Complex64::new(amplitude / 2.0, 0.0));
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, mode: Mode, value: Complex64) {
        assert_eq!(mode.len(), self.dim, "mode dimension");
        let entry = self.coeffs.entry(mode).or_insert(Complex64::new(0.0, 0.0));
        *entry += value;
    }

    pub fn coefficient(&self, mode: &[i32]) -> Complex64 {
        self.coeffs.get(mode).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.coeffs.iter().filter(|(_, c)| c.norm() != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.norm() == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms().all(|(k, _)| k.iter().all(|&x| x == 0))
    }

    /// Largest `|k_j|` among nonzero terms; the number of modes a product shifts by.
    pub fn bandwidth(&self) -> usize {
        self.terms()
            .flat_map(|(k, _)| k.iter().map(|x| x.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// Sum of coefficient magnitudes; bounds the sup norm.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// True when the function is real valued: `c_{-k} = conj(c_k)`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(k, c)| {
            let neg: Mode = k.iter().map(|x| -x).collect();
            (self.coefficient(&neg) - c.conj()).norm() <= tol
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c * factor)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.add_term(k.clone(), *c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                let k: Mode = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(k, ca * cb);
            }
        }
        out
    }

    /// Drops every term outside the box of the given radius.
    pub fn truncate(&self, radius: usize) -> Self {
        let b = ModeBox::new(self.dim, radius);
        Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| b.contains(k))
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    /// Sum of `|c_k|` over terms outside the box of the given radius.
    pub fn tail_mass(&self, radius: usize) -> f64 {
        let b = ModeBox::new(self.dim, radius);
        self.coeffs
            .iter()
            .filter(|(k, _)| !b.contains(k))
            .map(|(_, c)| c.norm())
            .sum()
    }

    /// Directional derivative `sum_j w_j d/dx^j`.
    pub fn derivative(&self, direction: &[f64]) -> Self {
        assert_eq!(direction.len(), self.dim, "direction dimension");
        let mut out = Self::zero(self.dim);
        for (k, c) in self.terms() {
            let s: f64 = k.iter().zip(direction).map(|(&x, w)| x as f64 * w).sum();
            if s != 0.0 {
                out.add_term(k.clone(), c * Complex64::new(0.0, 2.0 * PI * s));
            }
        }
        out
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        self.terms()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(x).map(|(&kj, xj)| kj as f64 * xj).sum();
                c * Complex64::from_polar(1.0, 2.0 * PI * phase)
            })
            .sum()
    }

    /// `exp(self)` by its power series, every partial product kept on the box of
    /// radius `keep`. Returns the series and the mass it carries outside `radius`.
    pub fn exp(&self, radius: usize, keep: usize) -> (Self, f64) {
        let keep = keep.max(radius);
        let mut sum = Self::constant(self.dim, 1.0);
        let mut term = sum.clone();
        for n in 1..400 {
            term = term.mul(self).truncate(keep).scale(Complex64::new(1.0 / n as f64, 0.0));
            sum = sum.add(&term);
            if term.l1_norm() < 1e-18 * sum.l1_norm() {
                break;
            }
        }
        let tail = sum.tail_mass(radius);
        (sum, tail)
    }
}
