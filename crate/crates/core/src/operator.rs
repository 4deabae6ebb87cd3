//! Matrix-free Hermitian discretization of `(hD - w'A(y))^2 + W(y)` on
//! rectangular Dirichlet grids.
//!
//! The kinetic term uses gauge links: the hop from a node to its neighbour
//! along axis `a` carries the phase `exp(-i (w'/h) A_a(mid) dx_a)` with `A`
//! sampled at the link midpoint. For linear gauges the midpoint value equals
//! the exact line integral, so conjugation by a sampled gauge function
//! reproduces `A -> A + grad chi` exactly and the spectrum is gauge
//! invariant to rounding. The operator is Hermitian by construction
//! (conjugate phases on opposite hops), and factorizes as `D^* D + W` over
//! links, which the weighted energy identity of the spectral module relies
//! on.

use crate::grid::{dot, GridFn, GridSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("boundary {0:?} needs a box symmetric about 0 along axis {1}")]
    AsymmetricBox(Boundary, usize),
    #[error("gauge field must vanish on unused axes for dimension {0}")]
    GaugeDimension(usize),
}

/// Linear vector potentials. The quantization is only gauge invariant for
/// linear `A`, so nonlinear fields are unrepresentable here by design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gauge {
    /// `A = 0`: real Schrödinger operator.
    None,
    /// Symmetric gauge `A = (-y2, y1, 0)`, field `B = 2` along axis 3.
    Symmetric,
    /// Landau gauge `A = (-2 y2, 0, 0)`: same field `B = 2` as `Symmetric`.
    Landau,
    /// `A(y) = M y + c` with constant matrix `M` (row-major) and offset `c`.
    CustomLinear { m: [[f64; 3]; 3], c: [f64; 3] },
}

impl Gauge {
    pub fn eval(&self, y: [f64; 3]) -> [f64; 3] {
        match self {
            Gauge::None => [0.0; 3],
            Gauge::Symmetric => [-y[1], y[0], 0.0],
            Gauge::Landau => [-2.0 * y[1], 0.0, 0.0],
            Gauge::CustomLinear { m, c } => {
                let mut a = *c;
                for r in 0..3 {
                    for s in 0..3 {
                        a[r] += m[r][s] * y[s];
                    }
                }
                a
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Gauge::None)
    }
}

/// Dirichlet domain selection. Half-spaces are taken along the symmetry axis
/// (the last one) and include the 0-plane, so the two half-domain
/// quasi-modes share the interface layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    DirichletBox,
    HalfSpacePlus,
    HalfSpaceMinus,
}

/// Grid-sampled magnetic Schrödinger operator with matrix-free application.
pub struct DiscreteOperator {
    pub grid: GridSpec,
    pub h: f64,
    pub omega_prime: f64,
    pub gauge: Gauge,
    pub boundary: Boundary,
    /// Potential samples at the nodes.
    pub potential: Vec<f64>,
    /// `h^2 / dx_a^2` per axis.
    hop: [f64; 3],
    /// Link phases `exp(-i theta)` from node `k` to `k + e_a`; empty when the
    /// gauge vanishes along that axis.
    link: [Vec<Complex64>; 3],
    /// Node activity mask for half-space boundaries (`None` = all active).
    active: Option<Vec<bool>>,
}

impl DiscreteOperator {
    /// Build the operator. `w` is sampled at the grid nodes.
    pub fn assemble(
        grid: &GridSpec,
        h: f64,
        omega_prime: f64,
        w: impl Fn([f64; 3]) -> f64,
        gauge: Gauge,
        boundary: Boundary,
    ) -> Result<Self, OperatorError> {
        assert!(h > 0.0);
        let sym = grid.sym_axis();
        if boundary != Boundary::DirichletBox && !grid.symmetric_about_zero(sym) {
            return Err(OperatorError::AsymmetricBox(boundary, sym));
        }
        // A linear gauge that points along inactive axes cannot be realized.
        if grid.dim < 3 {
            let probe = gauge.eval([1.0, 1.0, 1.0]);
            for a in grid.dim..3 {
                if probe[a] != 0.0 {
                    return Err(OperatorError::GaugeDimension(grid.dim));
                }
            }
        }

        let nn = grid.len();
        let potential = grid.sample(w);
        let mut hop = [0.0; 3];
        for a in 0..grid.dim {
            let dx = grid.spacing(a);
            hop[a] = h * h / (dx * dx);
        }

        let mut link: [Vec<Complex64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        if !gauge.is_none() && omega_prime != 0.0 {
            for a in 0..grid.dim {
                let dx = grid.spacing(a);
                let mut phases = vec![Complex64::new(1.0, 0.0); nn];
                let mut nontrivial = false;
                for (idx, ph) in phases.iter_mut().enumerate() {
                    let mut mid = grid.position(idx);
                    mid[a] += 0.5 * dx;
                    let aa = gauge.eval(mid)[a];
                    let theta = omega_prime / h * aa * dx;
                    if theta != 0.0 {
                        nontrivial = true;
                    }
                    *ph = Complex64::new(0.0, -theta).exp();
                }
                if nontrivial {
                    link[a] = phases;
                }
            }
        }

        let active = match boundary {
            Boundary::DirichletBox => None,
            Boundary::HalfSpacePlus => Some(
                (0..nn)
                    .map(|idx| grid.position(idx)[sym] >= -1e-12 * grid.spacing(sym))
                    .collect(),
            ),
            Boundary::HalfSpaceMinus => Some(
                (0..nn)
                    .map(|idx| grid.position(idx)[sym] <= 1e-12 * grid.spacing(sym))
                    .collect(),
            ),
        };

        Ok(DiscreteOperator {
            grid: grid.clone(),
            h,
            omega_prime,
            gauge,
            boundary,
            potential,
            hop,
            link,
            active,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the matrix is real in the coordinate basis.
    pub fn is_real(&self) -> bool {
        self.link.iter().all(|l| l.is_empty())
    }

    #[inline]
    fn is_active(&self, idx: usize) -> bool {
        self.active.as_ref().map_or(true, |m| m[idx])
    }

    /// `out = A u`.
    pub fn apply(&self, u: &[Complex64], out: &mut [Complex64]) {
        let g = &self.grid;
        let nn = g.len();
        debug_assert_eq!(u.len(), nn);
        debug_assert_eq!(out.len(), nn);
        let diag_kin: f64 = 2.0 * self.hop[..g.dim].iter().sum::<f64>();

        for idx in 0..nn {
            if !self.is_active(idx) {
                out[idx] = Complex64::new(0.0, 0.0);
                continue;
            }
            out[idx] = u[idx] * (diag_kin + self.potential[idx]);
        }

        let strides = [1usize, g.n[0], g.n[0] * g.n[1]];
        for a in 0..g.dim {
            let hop = self.hop[a];
            let stride = strides[a];
            let na = g.n[a];
            let phases = &self.link[a];
            for idx in 0..nn {
                if !self.is_active(idx) {
                    continue;
                }
                let ia = g.unindex(idx)[a];
                // Hop to idx + stride.
                if ia + 1 < na {
                    let nb = idx + stride;
                    if self.is_active(nb) {
                        let contrib = if phases.is_empty() {
                            u[nb]
                        } else {
                            phases[idx] * u[nb]
                        };
                        out[idx] -= contrib * hop;
                    }
                }
                // Hop to idx - stride (conjugate phase of that link).
                if ia > 0 {
                    let nb = idx - stride;
                    if self.is_active(nb) {
                        let contrib = if phases.is_empty() {
                            u[nb]
                        } else {
                            phases[nb].conj() * u[nb]
                        };
                        out[idx] -= contrib * hop;
                    }
                }
            }
        }
    }

    /// Kinetic quadratic form `<K u, u>` evaluated through the link
    /// factorization; equals `<A u, u> - <W u, u>` in exact arithmetic,
    /// including the Dirichlet wall half-links.
    pub fn kinetic_form(&self, u: &[Complex64]) -> f64 {
        self.weighted_kinetic_form(u, None)
    }

    /// Kinetic form of `diag(rho) u` computed link-wise; `rho` is a real
    /// positive weight (`None` means 1). Used by the weighted energy
    /// identity.
    pub fn weighted_kinetic_form(&self, u: &[Complex64], rho: Option<&[f64]>) -> f64 {
        let g = &self.grid;
        let nn = g.len();
        let strides = [1usize, g.n[0], g.n[0] * g.n[1]];
        let wt = |idx: usize| rho.map_or(1.0, |r| r[idx]);
        let mut parts: Vec<f64> = Vec::new();
        for a in 0..g.dim {
            let hop = self.hop[a];
            let phases = &self.link[a];
            for idx in 0..nn {
                let ia = g.unindex(idx)[a];
                let here = if self.is_active(idx) {
                    u[idx] * wt(idx)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                if ia + 1 < g.n[a] {
                    let nb = idx + strides[a];
                    let v = if self.is_active(nb) {
                        u[nb] * wt(nb)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    let fwd = if phases.is_empty() { v } else { phases[idx] * v };
                    parts.push((fwd - here).norm_sqr() * hop);
                } else {
                    parts.push(here.norm_sqr() * hop);
                }
                if ia == 0 {
                    parts.push(here.norm_sqr() * hop);
                }
            }
        }
        crate::grid::pairwise_sum(&parts)
    }

    /// Link phase from `idx` to its forward neighbour along `axis` (1 when
    /// the gauge vanishes there).
    pub fn link_phase(&self, idx: usize, axis: usize) -> Complex64 {
        if self.link[axis].is_empty() {
            Complex64::new(1.0, 0.0)
        } else {
            self.link[axis][idx]
        }
    }

    /// Real part of the off-diagonal link product `conj(u_k) phase u_{k+e}`,
    /// used by the weighted identity's correction term.
    pub fn link_re_products(&self, u: &[Complex64], axis: usize) -> Vec<f64> {
        let g = &self.grid;
        let nn = g.len();
        let stride = [1usize, g.n[0], g.n[0] * g.n[1]][axis];
        let mut out = vec![0.0; nn];
        for idx in 0..nn {
            let ia = g.unindex(idx)[axis];
            if ia + 1 >= g.n[axis] {
                continue;
            }
            let nb = idx + stride;
            if !self.is_active(idx) || !self.is_active(nb) {
                continue;
            }
            out[idx] = (u[idx].conj() * self.link_phase(idx, axis) * u[nb]).re;
        }
        out
    }

    /// Project onto the even (`+1`) or odd (`-1`) sector of the reflection
    /// along the symmetry axis.
    pub fn project_sector(&self, u: &mut [Complex64], parity: i8) {
        let g = &self.grid;
        let axis = g.sym_axis();
        let s = parity as f64;
        for idx in 0..u.len() {
            let r = g.reflect(idx, axis);
            if r > idx {
                let a = u[idx];
                let b = u[r];
                u[idx] = (a + b * s) * 0.5;
                u[r] = (b + a * s) * 0.5;
            } else if r == idx && parity == -1 {
                u[idx] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Hermiticity defect `|<Au, v> - <u, Av>| / (norm scale)` on a pair.
    pub fn hermiticity_defect(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        let mut au = vec![Complex64::new(0.0, 0.0); u.len()];
        let mut av = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply(u, &mut au);
        self.apply(v, &mut av);
        let lhs = dot(&au, v);
        let rhs = dot(u, &av);
        let scale = crate::grid::norm(&au) * crate::grid::norm(v)
            + crate::grid::norm(u) * crate::grid::norm(&av);
        (lhs - rhs).norm() / scale.max(1e-300)
    }

    /// Commutator defect of the reflection symmetry on a state:
    /// `|A R u - R A u| / |A u|`.
    pub fn reflection_commutator_defect(&self, u: &[Complex64]) -> f64 {
        let g = &self.grid;
        let axis = g.sym_axis();
        let nn = g.len();
        let mut ru = vec![Complex64::new(0.0, 0.0); nn];
        for idx in 0..nn {
            ru[g.reflect(idx, axis)] = u[idx];
        }
        let mut aru = vec![Complex64::new(0.0, 0.0); nn];
        let mut au = vec![Complex64::new(0.0, 0.0); nn];
        self.apply(&ru, &mut aru);
        self.apply(u, &mut au);
        let mut rau = vec![Complex64::new(0.0, 0.0); nn];
        for idx in 0..nn {
            rau[g.reflect(idx, axis)] = au[idx];
        }
        let num: f64 = aru
            .iter()
            .zip(rau.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        num / crate::grid::norm(&au).max(1e-300)
    }
}

/// Deterministic pseudo-random unit vector (xorshift), for symmetry and
/// Hermiticity spot checks.
pub fn seeded_state(n: usize, seed: u64) -> GridFn {
    let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).max(1);
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut v: GridFn = (0..n).map(|_| Complex64::new(next(), next())).collect();
    let nrm = crate::grid::norm(&v);
    crate::grid::scale(&mut v, 1.0 / nrm);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::norm;

    fn apply_vec(op: &DiscreteOperator, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        op.apply(u, &mut out);
        out
    }

    #[test]
    fn hermitian_on_random_pairs() {
        let g = GridSpec::new_2d([-3.0, -3.0], [3.0, 3.0], [12, 13]);
        let op = DiscreteOperator::assemble(
            &g,
            0.1,
            0.3,
            |p| p[0] * p[0] + 0.5 * p[1] * p[1],
            Gauge::Symmetric,
            Boundary::DirichletBox,
        )
        .unwrap();
        for seed in 0..20 {
            let u = seeded_state(g.len(), 2 * seed + 1);
            let v = seeded_state(g.len(), 2 * seed + 2);
            assert!(op.hermiticity_defect(&u, &v) <= 1e-12);
        }
    }

    #[test]
    fn kinetic_form_matches_operator() {
        let g = GridSpec::new_2d([-2.0, -2.0], [2.0, 2.0], [10, 11]);
        let w = |p: [f64; 3]| 0.3 * p[0] * p[0] + p[1] * p[1];
        let op =
            DiscreteOperator::assemble(&g, 0.2, 0.4, w, Gauge::Symmetric, Boundary::DirichletBox)
                .unwrap();
        let u = seeded_state(g.len(), 7);
        let au = apply_vec(&op, &u);
        let quad = crate::grid::dot(&au, &u).re;
        let pot: f64 = u
            .iter()
            .enumerate()
            .map(|(i, x)| op.potential[i] * x.norm_sqr())
            .sum();
        let kin = op.kinetic_form(&u);
        assert!(
            (quad - pot - kin).abs() <= 1e-12 * quad.abs().max(1.0),
            "{quad} vs {kin} + {pot}"
        );
    }

    #[test]
    fn gauge_shift_conjugation_is_exact() {
        // A -> A + c with the exact sampled phase: operators are unitarily
        // conjugate node by node.
        let g = GridSpec::new_2d([-2.0, -2.0], [2.0, 2.0], [11, 10]);
        let w = |p: [f64; 3]| p[0] * p[0] + p[1] * p[1];
        let c = [0.37, -0.88, 0.0];
        let wp = 0.25;
        let h = 0.15;
        let op1 =
            DiscreteOperator::assemble(&g, h, wp, w, Gauge::Symmetric, Boundary::DirichletBox)
                .unwrap();
        let shifted = Gauge::CustomLinear {
            m: [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
            c,
        };
        let op2 =
            DiscreteOperator::assemble(&g, h, wp, w, shifted, Boundary::DirichletBox).unwrap();
        let u = seeded_state(g.len(), 5);
        // chi(y) = c . y gauges the shift: op2 = e^{i wp chi/h} op1 e^{-i..}.
        let phase: Vec<Complex64> = (0..g.len())
            .map(|idx| {
                let p = g.position(idx);
                Complex64::new(0.0, wp / h * (c[0] * p[0] + c[1] * p[1])).exp()
            })
            .collect();
        let conj_u: Vec<Complex64> = u
            .iter()
            .zip(phase.iter())
            .map(|(a, ph)| a * ph.conj())
            .collect();
        let a1 = apply_vec(&op1, &conj_u);
        let lhs: Vec<Complex64> = a1.iter().zip(phase.iter()).map(|(a, ph)| a * ph).collect();
        let rhs = apply_vec(&op2, &u);
        let diff: f64 = lhs
            .iter()
            .zip(rhs.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-12 * norm(&rhs), "conjugation defect {diff:.3e}");
    }

    #[test]
    fn half_space_masks_are_reflections() {
        let g = GridSpec::new_1d(-2.0, 2.0, 9);
        let w = |_: [f64; 3]| 0.0;
        let plus =
            DiscreteOperator::assemble(&g, 0.1, 0.0, w, Gauge::None, Boundary::HalfSpacePlus)
                .unwrap();
        let minus =
            DiscreteOperator::assemble(&g, 0.1, 0.0, w, Gauge::None, Boundary::HalfSpaceMinus)
                .unwrap();
        let ap = plus.active.as_ref().unwrap();
        let am = minus.active.as_ref().unwrap();
        assert_eq!(ap.iter().filter(|&&b| b).count(), 5); // includes 0-plane
        for i in 0..9 {
            assert_eq!(ap[i], am[g.reflect(i, 0)]);
        }
    }

    #[test]
    fn sector_projection_is_idempotent_orthogonal() {
        let g = GridSpec::new_3d([-1.0, -1.0, -2.0], [1.0, 1.0, 2.0], [8, 8, 9]);
        let op = DiscreteOperator::assemble(
            &g,
            0.1,
            0.0,
            |p| p[2] * p[2],
            Gauge::None,
            Boundary::DirichletBox,
        )
        .unwrap();
        let u = seeded_state(g.len(), 11);
        let mut even = u.clone();
        op.project_sector(&mut even, 1);
        let mut odd = u.clone();
        op.project_sector(&mut odd, -1);
        // u = even + odd, and the parts are orthogonal.
        let resid: f64 = (0..u.len())
            .map(|i| (u[i] - even[i] - odd[i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-14);
        assert!(crate::grid::dot(&even, &odd).norm() < 1e-13);
        let mut twice = even.clone();
        op.project_sector(&mut twice, 1);
        let ide: f64 = (0..u.len())
            .map(|i| (twice[i] - even[i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(ide < 1e-14);
    }

    #[test]
    fn reflection_commutes_for_symmetric_potentials() {
        // In 3D the symmetric gauge has no component along the reflection
        // axis and does not depend on it, so the operator commutes with the
        // reflection even at nonzero field.
        let g = GridSpec::new_3d([-1.5, -1.5, -2.0], [1.5, 1.5, 2.0], [8, 9, 10]);
        let op = DiscreteOperator::assemble(
            &g,
            0.1,
            0.2,
            |p| (p[2] * p[2] - 1.0) * (p[2] * p[2] - 1.0) + p[0] * p[0] + p[1] * p[1],
            Gauge::Symmetric,
            Boundary::DirichletBox,
        )
        .unwrap();
        let u = seeded_state(g.len(), 3);
        assert!(op.reflection_commutator_defect(&u) <= 1e-12);
    }
}
