//! Hamiltonian symbols, coordinate rescaling and the effective potential.
//!
//! The lab-frame symbol is
//!
//! ```text
//! p_A(x, xi) = (xi_1 - nu/omega)^2 + xi_2^2 + xi_3^2 + V(|x|)
//!              - omega (x_1 xi_2 - x_2 xi_1)
//! ```
//!
//! After the affine change `x = s y + (0, s, 0)` with `s = 2 nu / omega^2`
//! and the induced momentum map `eta = s xi`, it becomes a magnetic symbol
//! `p_A = (omega^4 / 4 nu^2) p'_A + nu^2/omega^2` with
//! `p'_A(y, eta) = (eta - w' A(y))^2 + W(y)`, `w' = 2 nu^2 / omega^3`,
//! `A(y) = (-y_2, y_1, 0)` and
//! `W(y) = (4 nu^2/omega^4) (V(|x(y)|) - (nu^2/omega^2)(y_1^2 + y_2^2))`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    /// `r0 * omega^2 / nu < 2`: the critical points leave the real domain.
    #[error("inadmissible parameters: r0*omega^2/nu = {0} < 2")]
    Admissibility(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Physical and semiclassical parameters of the model.
///
/// `omega_prime`, `period` and `scale` are derived and kept consistent by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Field frequency `omega > 0`.
    pub omega: f64,
    /// Coupling constant `nu > 0`.
    pub nu: f64,
    /// Semiclassical parameter `h > 0`.
    pub h: f64,
    /// Magnetic coupling of the rescaled symbol, `2 nu^2 / omega^3`.
    pub omega_prime: f64,
    /// Drive period `T = 2 pi / omega`.
    pub period: f64,
    /// Affine scale `s = 2 nu / omega^2`.
    pub scale: f64,
}

impl ModelParams {
    pub fn new(omega: f64, nu: f64, h: f64) -> Result<Self, ModelError> {
        if !(omega > 0.0) {
            return Err(ModelError::InvalidParameter(format!("omega = {omega}")));
        }
        if !(nu > 0.0) {
            return Err(ModelError::InvalidParameter(format!("nu = {nu}")));
        }
        if !(h > 0.0) {
            return Err(ModelError::InvalidParameter(format!("h = {h}")));
        }
        Ok(ModelParams {
            omega,
            nu,
            h,
            omega_prime: 2.0 * nu * nu / (omega * omega * omega),
            period: 2.0 * std::f64::consts::PI / omega,
            scale: 2.0 * nu / (omega * omega),
        })
    }

    /// Default parameter set: `omega = 1`, `nu = 0.1`, `h = 0.1`.
    pub fn p0() -> Self {
        ModelParams::new(1.0, 0.1, 0.1).expect("P0 is valid")
    }

    /// Constant vector potential of the stationary lab-frame operator,
    /// `A0 = (1/omega, 0, 0)`.
    pub fn a0(&self) -> Vector3<f64> {
        Vector3::new(1.0 / self.omega, 0.0, 0.0)
    }

    /// `r0 * omega^2 / nu >= 2` is required for the critical points to be real.
    pub fn admissibility_margin(&self, r0: f64) -> f64 {
        r0 * self.omega * self.omega / self.nu
    }

    pub fn check_admissible(&self, potential: &RadialPotential) -> Result<(), ModelError> {
        let m = self.admissibility_margin(potential.r0());
        if m < 2.0 {
            Err(ModelError::Admissibility(m))
        } else {
            Ok(())
        }
    }

    /// Reference energy `E = V(r0) + nu^2/omega^2`, the value of `p_A` at the
    /// critical points.
    pub fn reference_energy(&self, potential: &RadialPotential) -> f64 {
        potential.v(potential.r0()) + self.nu * self.nu / (self.omega * self.omega)
    }

    /// Rescaled reference energy `E' = (4 nu^2/omega^4) V(r0)` (zero under the
    /// `V(r0) = 0` normalization).
    pub fn rescaled_reference_energy(&self, potential: &RadialPotential) -> f64 {
        let w4 = self.omega.powi(4);
        4.0 * self.nu * self.nu / w4 * potential.v(potential.r0())
    }

    /// Ratio between lab-frame and rescaled energies: `p_A = kappa p'_A + E0`
    /// with `kappa = omega^4 / (4 nu^2)`.
    pub fn energy_ratio(&self) -> f64 {
        self.omega.powi(4) / (4.0 * self.nu * self.nu)
    }
}

/// Rotationally invariant confining potential with a nondegenerate global
/// minimum at `r0`, normalized to `V(r0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadialPotential {
    /// Quartic shell `V(r) = v4 (r^2 - r0^2)^2`.
    Quartic { v4: f64, r0: f64 },
}

impl RadialPotential {
    pub fn quartic(v4: f64, r0: f64) -> Result<Self, ModelError> {
        if !(v4 > 0.0) {
            return Err(ModelError::InvalidParameter(format!("v4 = {v4}")));
        }
        if !(r0 > 0.0) {
            return Err(ModelError::InvalidParameter(format!("r0 = {r0}")));
        }
        Ok(RadialPotential::Quartic { v4, r0 })
    }

    /// Default: unit quartic shell (`v4 = 1`, `r0 = 1`).
    pub fn default_quartic() -> Self {
        RadialPotential::Quartic { v4: 1.0, r0: 1.0 }
    }

    pub fn r0(&self) -> f64 {
        match *self {
            RadialPotential::Quartic { r0, .. } => r0,
        }
    }

    /// Minimum value `V(r0)`; zero for the quartic family.
    pub fn vmin(&self) -> f64 {
        0.0
    }

    pub fn v(&self, r: f64) -> f64 {
        match *self {
            RadialPotential::Quartic { v4, r0 } => {
                let d = r * r - r0 * r0;
                v4 * d * d
            }
        }
    }

    pub fn dv(&self, r: f64) -> f64 {
        match *self {
            RadialPotential::Quartic { v4, r0 } => 4.0 * v4 * r * (r * r - r0 * r0),
        }
    }

    pub fn d2v(&self, r: f64) -> f64 {
        match *self {
            RadialPotential::Quartic { v4, r0 } => 4.0 * v4 * (3.0 * r * r - r0 * r0),
        }
    }
}

/// A point of the classical phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: Vector3<f64>,
    pub xi: Vector3<f64>,
}

impl PhasePoint {
    pub fn new(x: Vector3<f64>, xi: Vector3<f64>) -> Self {
        PhasePoint { x, xi }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.xi.iter()).all(|v| v.is_finite())
    }
}

/// Classification of a configuration-space point against the energy `E'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    Allowed,
    Forbidden,
    Boundary,
}

/// Lab-frame symbol `p_A(x, xi)`.
pub fn eval_p_a(p: &PhasePoint, mp: &ModelParams, potential: &RadialPotential) -> f64 {
    let (x, xi) = (&p.x, &p.xi);
    let k1 = xi[0] - mp.nu / mp.omega;
    k1 * k1 + xi[1] * xi[1] + xi[2] * xi[2] + potential.v(x.norm())
        - mp.omega * (x[0] * xi[1] - x[1] * xi[0])
}

/// Gradient of `p_A` in the order `(x, xi)`.
pub fn grad_p_a(p: &PhasePoint, mp: &ModelParams, potential: &RadialPotential) -> [f64; 6] {
    let (x, xi) = (&p.x, &p.xi);
    let r = x.norm();
    // dV/dx = V'(r) x / r; the limit r -> 0 is fine for the smooth families.
    let vr = if r > 0.0 { potential.dv(r) / r } else { 0.0 };
    [
        vr * x[0] - mp.omega * xi[1],
        vr * x[1] + mp.omega * xi[0],
        vr * x[2],
        2.0 * (xi[0] - mp.nu / mp.omega) + mp.omega * x[1],
        2.0 * xi[1] - mp.omega * x[0],
        2.0 * xi[2],
    ]
}

/// Hessian of `p_A` at `p`, rows/columns ordered `(x1,x2,x3,xi1,xi2,xi3)`.
pub fn hess_p_a(
    p: &PhasePoint,
    mp: &ModelParams,
    potential: &RadialPotential,
) -> nalgebra::SMatrix<f64, 6, 6> {
    let x = &p.x;
    let r = x.norm();
    let mut h = nalgebra::SMatrix::<f64, 6, 6>::zeros();
    // Position block: V''(r) xhat xhat^T + (V'(r)/r)(I - xhat xhat^T).
    let xhat = x / r;
    let vpp = potential.d2v(r);
    let vr = potential.dv(r) / r;
    let hxx: Matrix3<f64> =
        Matrix3::identity() * vr + xhat * xhat.transpose() * (vpp - vr);
    for i in 0..3 {
        for j in 0..3 {
            h[(i, j)] = hxx[(i, j)];
        }
    }
    // Momentum block: 2 I.
    for i in 0..3 {
        h[(3 + i, 3 + i)] = 2.0;
    }
    // Rotation coupling: -omega (x1 xi2 - x2 xi1).
    h[(0, 4)] = -mp.omega;
    h[(4, 0)] = -mp.omega;
    h[(1, 3)] = mp.omega;
    h[(3, 1)] = mp.omega;
    h
}

/// Lab coordinates -> rescaled coordinates: `y = (x - (0, s, 0)) / s`.
pub fn to_rescaled(x: &Vector3<f64>, mp: &ModelParams) -> Vector3<f64> {
    let s = mp.scale;
    Vector3::new(x[0] / s, (x[1] - s) / s, x[2] / s)
}

/// Rescaled coordinates -> lab coordinates: `x = s y + (0, s, 0)`.
pub fn from_rescaled(y: &Vector3<f64>, mp: &ModelParams) -> Vector3<f64> {
    let s = mp.scale;
    Vector3::new(s * y[0], s * (y[1] + 1.0), s * y[2])
}

/// Induced affine-symplectic map on phase space: `(x, xi) -> (y, eta)` with
/// `eta = s xi`.
pub fn to_rescaled_phase(p: &PhasePoint, mp: &ModelParams) -> (Vector3<f64>, Vector3<f64>) {
    (to_rescaled(&p.x, mp), p.xi * mp.scale)
}

/// Effective potential of the rescaled magnetic symbol.
pub fn eval_w(y: &Vector3<f64>, mp: &ModelParams, potential: &RadialPotential) -> f64 {
    let x = from_rescaled(y, mp);
    let c = mp.nu * mp.nu / (mp.omega * mp.omega);
    4.0 * c / (mp.omega * mp.omega) * (potential.v(x.norm()) - c * (y[0] * y[0] + y[1] * y[1]))
}

/// Gradient of `W` in the rescaled coordinates.
pub fn grad_w(y: &Vector3<f64>, mp: &ModelParams, potential: &RadialPotential) -> Vector3<f64> {
    let x = from_rescaled(y, mp);
    let r = x.norm();
    let c = mp.nu * mp.nu / (mp.omega * mp.omega);
    let pref = 4.0 * c / (mp.omega * mp.omega);
    let vr = if r > 0.0 { potential.dv(r) / r } else { 0.0 };
    let mut g = x * (vr * mp.scale);
    g[0] -= 2.0 * c * y[0];
    g[1] -= 2.0 * c * y[1];
    g * pref
}

/// Hessian of `W` in the rescaled coordinates.
pub fn hess_w(y: &Vector3<f64>, mp: &ModelParams, potential: &RadialPotential) -> Matrix3<f64> {
    let x = from_rescaled(y, mp);
    let r = x.norm();
    let c = mp.nu * mp.nu / (mp.omega * mp.omega);
    let pref = 4.0 * c / (mp.omega * mp.omega);
    let s = mp.scale;
    let xhat = x / r;
    let vpp = potential.d2v(r);
    let vr = potential.dv(r) / r;
    let mut hv: Matrix3<f64> =
        (Matrix3::identity() * vr + xhat * xhat.transpose() * (vpp - vr)) * (s * s);
    hv[(0, 0)] -= 2.0 * c;
    hv[(1, 1)] -= 2.0 * c;
    hv * pref
}

/// Classify `y` against the magnetically undeformed allowed region
/// `{W <= E'}`, with a boundary band of half-width `tol`.
pub fn classify_region(
    y: &Vector3<f64>,
    e_prime: f64,
    mp: &ModelParams,
    potential: &RadialPotential,
    tol: f64,
) -> RegionLabel {
    assert!(tol > 0.0, "boundary tolerance must be positive");
    let d = eval_w(y, mp, potential) - e_prime;
    if d.abs() <= tol {
        RegionLabel::Boundary
    } else if d < 0.0 {
        RegionLabel::Allowed
    } else {
        RegionLabel::Forbidden
    }
}
