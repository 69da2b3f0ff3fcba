//! Closed-form oracles written without the library's operator assembly.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Cohomology of `d - c dt ^` on the basic complex of a suspension with
/// transverse rates `mu_j`: the monomial `f e^J` goes to
/// `(f' - (mu_J + c) f) dt ^ e^J`, so each monomial contributes one class in
/// degrees `|J|` and `|J| + 1` per Fourier mode with `2 pi i n = mu_J + c`.
pub fn suspension_dims(rates: &[f64], c: f64, cutoff: i64, tol: f64) -> Vec<usize> {
    let m = rates.len();
    let mut dims = vec![0; m + 2];
    for mask in 0u32..(1 << m) {
        let weight: f64 = (0..m).filter(|j| mask >> j & 1 == 1).map(|j| rates[j]).sum();
        let size = mask.count_ones() as usize;
        let zeros = (-cutoff..=cutoff)
            .filter(|&n| (2.0 * PI * n as f64).hypot(weight + c) < tol)
            .count();
        dims[size] += zeros;
        dims[size + 1] += zeros;
    }
    dims
}

/// On the flat torus with constant twist, mode `k` carries the Koszul complex of
/// `v = 2 pi i k - theta`, exact unless `v = 0`; every singular value of
/// `(d, delta)` on the block is `|v|`.
pub fn torus_dims(theta: &[f64], cutoff: i64, tol: f64) -> (Vec<usize>, f64) {
    let q = theta.len();
    let mut zero_modes = 0;
    let mut min_abs = f64::INFINITY;
    let mut k = vec![-cutoff; q];
    loop {
        let norm = k
            .iter()
            .zip(theta)
            .map(|(&kj, t)| (2.0 * PI * kj as f64).powi(2) + t * t)
            .sum::<f64>()
            .sqrt();
        min_abs = min_abs.min(norm);
        if norm < tol {
            zero_modes += 1;
        }
        let mut j = 0;
        while j < q && k[j] == cutoff {
            k[j] = -cutoff;
            j += 1;
        }
        if j == q {
            break;
        }
        k[j] += 1;
    }
    ((0..=q).map(|p| binomial(q, p) * zero_modes).collect(), min_abs)
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `e^i ^ e^I` in the sorted basis, by counting inversions.
pub fn wedge_basis(i: usize, set: &[usize]) -> Option<(Vec<usize>, i32)> {
    if set.contains(&i) {
        return None;
    }
    let inversions = set.iter().filter(|&&s| s < i).count();
    let mut out = set.to_vec();
    out.push(i);
    out.sort_unstable();
    Some((out, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// Sorted strictly increasing subsets of `0..q` of size `k`.
pub fn subsets(q: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << q) {
        if mask.count_ones() as usize == k {
            out.push((0..q).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out.sort();
    out
}
