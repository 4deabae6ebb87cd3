//! Rectangular grids with Dirichlet boundaries and grid-function helpers.
//!
//! Unknowns live at the interior nodes of the box: along an axis with `n`
//! points, spacing is `(max - min)/(n + 1)` and node `i` sits at
//! `min + (i+1) dx`, so the Dirichlet data at `min` and `max` never enters
//! the state vector. A box symmetric about 0 has a point set invariant under
//! reflection for every `n`, and contains the 0-plane itself exactly when
//! `n` is odd.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type GridFn = Vec<Complex64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub min: [f64; 3],
    pub max: [f64; 3],
    /// Interior point counts; unused axes hold 1.
    pub n: [usize; 3],
}

impl GridSpec {
    pub fn new_1d(min: f64, max: f64, n: usize) -> Self {
        assert!(n >= 8, "need at least 8 points per axis");
        GridSpec {
            dim: 1,
            min: [min, 0.0, 0.0],
            max: [max, 0.0, 0.0],
            n: [n, 1, 1],
        }
    }

    pub fn new_2d(min: [f64; 2], max: [f64; 2], n: [usize; 2]) -> Self {
        assert!(n.iter().all(|&k| k >= 8), "need at least 8 points per axis");
        GridSpec {
            dim: 2,
            min: [min[0], min[1], 0.0],
            max: [max[0], max[1], 0.0],
            n: [n[0], n[1], 1],
        }
    }

    pub fn new_3d(min: [f64; 3], max: [f64; 3], n: [usize; 3]) -> Self {
        assert!(n.iter().all(|&k| k >= 8), "need at least 8 points per axis");
        GridSpec { dim: 3, min, max, n }
    }

    /// Total number of unknowns.
    pub fn len(&self) -> usize {
        self.n[..self.dim].iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.max[axis] - self.min[axis]) / (self.n[axis] + 1) as f64
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.min[axis] + (i + 1) as f64 * self.spacing(axis)
    }

    /// The reflection/sector axis: the last active one.
    pub fn sym_axis(&self) -> usize {
        self.dim - 1
    }

    /// Flattened index with axis 0 fastest.
    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.n[0] * (i[1] + self.n[1] * i[2])
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> [usize; 3] {
        let i0 = idx % self.n[0];
        let rest = idx / self.n[0];
        [i0, rest % self.n[1], rest / self.n[1]]
    }

    /// Node position (unused axes report 0).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let i = self.unindex(idx);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.coord(a, i[a]);
        }
        p
    }

    /// Whether the box is symmetric about 0 along `axis`.
    pub fn symmetric_about_zero(&self, axis: usize) -> bool {
        (self.min[axis] + self.max[axis]).abs() <= 1e-12 * self.spacing(axis)
    }

    /// Index of the point reflected through 0 along `axis` (requires a
    /// symmetric box, under which `i -> n - 1 - i`).
    #[inline]
    pub fn reflect(&self, idx: usize, axis: usize) -> usize {
        let mut i = self.unindex(idx);
        i[axis] = self.n[axis] - 1 - i[axis];
        self.index(i)
    }

    /// Layer index of the 0-plane along `axis` when the grid contains it.
    pub fn zero_layer(&self, axis: usize) -> Option<usize> {
        if !self.symmetric_about_zero(axis) || self.n[axis] % 2 == 0 {
            return None;
        }
        Some((self.n[axis] - 1) / 2)
    }

    /// Sample a scalar field at every node.
    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|idx| f(self.position(idx))).collect()
    }

    /// Volume element `prod dx_a`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }
}

/// Pairwise (cascade) summation: deterministic, order-fixed, and accurate.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

fn pairwise_map<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    match hi - lo {
        0 => 0.0,
        1 => f(lo),
        2 => f(lo) + f(lo + 1),
        _ => {
            let mid = lo + (hi - lo) / 2;
            pairwise_map(lo, mid, f) + pairwise_map(mid, hi, f)
        }
    }
}

/// `<u, v> = sum conj(u_i) v_i` with pairwise reduction of both parts.
pub fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    debug_assert_eq!(u.len(), v.len());
    let re = pairwise_map(0, u.len(), &|i| u[i].re * v[i].re + u[i].im * v[i].im);
    let im = pairwise_map(0, u.len(), &|i| u[i].re * v[i].im - u[i].im * v[i].re);
    Complex64::new(re, im)
}

pub fn norm(u: &[Complex64]) -> f64 {
    pairwise_map(0, u.len(), &|i| u[i].norm_sqr()).sqrt()
}

pub fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += alpha * *xi;
    }
}

pub fn scale(u: &mut [Complex64], s: f64) {
    for v in u.iter_mut() {
        *v *= s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_points_and_spacing() {
        let g = GridSpec::new_1d(-1.0, 1.0, 9);
        assert!((g.spacing(0) - 0.2).abs() < 1e-15);
        assert!((g.coord(0, 0) + 0.8).abs() < 1e-15);
        assert!((g.coord(0, 8) - 0.8).abs() < 1e-15);
        assert_eq!(g.zero_layer(0), Some(4));
        assert!((g.coord(0, 4) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn reflection_maps_point_set_to_itself() {
        for n in [8, 9, 48] {
            let g = GridSpec::new_1d(-2.0, 2.0, n);
            for i in 0..n {
                let r = g.reflect(i, 0);
                assert!((g.coord(0, i) + g.coord(0, r)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new_3d([-1.0, -2.0, -3.0], [1.0, 2.0, 3.0], [8, 9, 10]);
        assert_eq!(g.len(), 720);
        for idx in [0, 1, 13, 579, 719] {
            assert_eq!(g.index(g.unindex(idx)), idx);
        }
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000)
            .map(|i| ((i * 37) % 101) as f64 * 0.01 - 0.5)
            .collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }
}
