//! Location of the microlocal wells, the fundamental matrix at a well and
//! its Floquet exponents, ellipticity validation, harmonic level asymptotics
//! and parameter scans.

use crate::model::{
    grad_p_a, hess_p_a, to_rescaled, ModelParams, PhasePoint, RadialPotential,
};
use nalgebra::{SMatrix, SVector, Vector3};
use serde::Serialize;
use thiserror::Error;

type Mat6 = SMatrix<f64, 6, 6>;
type Vec6 = SVector<f64, 6>;

#[derive(Debug, Error)]
pub enum CriticalError {
    #[error("inadmissible parameters: r0*omega^2/nu = {0} < 2")]
    Admissibility(f64),
    #[error("Newton refinement did not converge in {0} iterations (residual {1:.3e})")]
    NonConvergence(usize, f64),
    #[error("fixed point is not elliptic: {0}")]
    NotElliptic(String),
}

/// Sign label of a well (`+` for `x3 > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WellSign {
    Plus,
    Minus,
}

/// A refined phase-space critical point of `p_A`.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub point: PhasePoint,
    pub sign: WellSign,
    /// Position in the rescaled coordinates (on the `y3` axis).
    pub y_position: Vector3<f64>,
    /// Euclidean norm of `grad p_A` after refinement.
    pub gradient_norm: f64,
}

/// Fundamental matrix `F = J Hess p_A(rho0)` and its Floquet data.
#[derive(Debug, Clone)]
pub struct FloquetSpectrum {
    pub fundamental_matrix: Mat6,
    /// Positive harmonic frequencies, ascending: eigenvalues of `F` are
    /// `{+-i mu_j}`.
    pub mu: [f64; 3],
    /// `Tr^+(F) = mu_1 + mu_2 + mu_3`.
    pub trace_plus: f64,
    /// Krein signature of each mode: sign of the Hessian form restricted to
    /// the invariant plane of `+-i mu_j`. Modes with negative signature are
    /// dynamically stable directions along which the energy surface bends
    /// down.
    pub krein: [i8; 3],
    /// `sum_j krein_j mu_j`, the signed frequency sum entering the vacuum
    /// level of the quadratic normal form.
    pub trace_signed: f64,
    /// Maximal real part among eigenvalues, relative to `||F||`.
    pub purity_defect: f64,
    pub elliptic: bool,
    /// Human-readable reason when `elliptic` is false.
    pub not_elliptic_reason: Option<String>,
}

impl FloquetSpectrum {
    pub fn require_elliptic(&self) -> Result<&Self, CriticalError> {
        if self.elliptic {
            Ok(self)
        } else {
            Err(CriticalError::NotElliptic(
                self.not_elliptic_reason
                    .clone()
                    .unwrap_or_else(|| "unknown".into()),
            ))
        }
    }
}

/// Newton refinement tolerance on `|grad p_A|`.
const GRAD_TOL: f64 = 1e-10;
/// Eigenvalue purity tolerance, relative to `||F||`.
const PURITY_TOL: f64 = 1e-9;
/// Strictness margin for the mu^2 separation (relative).
const SEPARATION_TOL: f64 = 1e-8;

/// Both critical points `rho_0^{+-} = ((0, 2 nu/omega^2, +-sqrt(r0^2 - 4 nu^2/omega^4)), 0)`,
/// refined by Newton iteration on `grad p_A = 0`.
pub fn find_critical_points(
    mp: &ModelParams,
    potential: &RadialPotential,
) -> Result<[CriticalPoint; 2], CriticalError> {
    let margin = mp.admissibility_margin(potential.r0());
    if margin < 2.0 {
        return Err(CriticalError::Admissibility(margin));
    }
    let r0 = potential.r0();
    let s = mp.scale;
    let x3 = (r0 * r0 - s * s).max(0.0).sqrt();
    let plus = refine(
        PhasePoint::new(Vector3::new(0.0, s, x3), Vector3::zeros()),
        WellSign::Plus,
        mp,
        potential,
    )?;
    let minus = refine(
        PhasePoint::new(Vector3::new(0.0, s, -x3), Vector3::zeros()),
        WellSign::Minus,
        mp,
        potential,
    )?;
    Ok([plus, minus])
}

fn refine(
    mut p: PhasePoint,
    sign: WellSign,
    mp: &ModelParams,
    potential: &RadialPotential,
) -> Result<CriticalPoint, CriticalError> {
    let max_iter = 50;
    let mut gnorm = f64::MAX;
    for _ in 0..max_iter {
        let g = grad_p_a(&p, mp, potential);
        gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm <= GRAD_TOL {
            return Ok(CriticalPoint {
                point: p,
                sign,
                y_position: to_rescaled(&p.x, mp),
                gradient_norm: gnorm,
            });
        }
        let h = hess_p_a(&p, mp, potential);
        let rhs = Vec6::from_column_slice(&g);
        let step = h
            .lu()
            .solve(&rhs)
            .ok_or(CriticalError::NonConvergence(max_iter, gnorm))?;
        for i in 0..3 {
            p.x[i] -= step[i];
            p.xi[i] -= step[3 + i];
        }
    }
    Err(CriticalError::NonConvergence(max_iter, gnorm))
}

/// Standard symplectic structure matrix, block form `[[0, I], [-I, 0]]` in
/// the `(x, xi)` ordering, so that `zdot = J grad p`.
pub fn symplectic_j() -> Mat6 {
    let mut j = Mat6::zeros();
    for i in 0..3 {
        j[(i, 3 + i)] = 1.0;
        j[(3 + i, i)] = -1.0;
    }
    j
}

/// Fundamental matrix and Floquet exponents at a refined critical point.
///
/// The Hessian is analytic; eigenvalues come from a bounded dense Schur
/// iteration with a closed-form fallback. The point is elliptic when all six
/// eigenvalues are purely imaginary (relative purity `1e-9`) and the three
/// squared frequencies are strictly separated.
pub fn fundamental_matrix(
    cp: &CriticalPoint,
    mp: &ModelParams,
    potential: &RadialPotential,
) -> FloquetSpectrum {
    assert!(
        cp.gradient_norm <= GRAD_TOL,
        "critical point must be refined first"
    );
    let hess = hess_p_a(&cp.point, mp, potential);
    let f = symplectic_j() * hess;
    floquet_of_fundamental(&f)
}

/// Floquet data of a given fundamental matrix (also used with synthetic
/// quadratic symbols in tests).
pub fn floquet_of_fundamental(f: &Mat6) -> FloquetSpectrum {
    let fnorm = f.norm();
    // Bounded QR iteration; the symmetric eigenvalue structure of Hamiltonian
    // matrices can stall the unbounded variant on degenerate inputs.
    let eig: Vec<nalgebra::Complex<f64>> =
        match nalgebra::linalg::Schur::try_new(*f, 1e-14, 100_000) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => eigenvalues_from_cubic(f),
        };
    let purity = eig.iter().map(|l| l.re.abs()).fold(0.0f64, f64::max) / fnorm.max(1e-300);

    // Collect positive imaginary parts; they come in conjugate pairs.
    let mut mus: Vec<f64> = eig.iter().filter(|l| l.im > 0.0).map(|l| l.im).collect();
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut elliptic = purity <= PURITY_TOL && mus.len() == 3;
    let mut reason = None;
    if purity > PURITY_TOL {
        reason = Some(format!(
            "eigenvalues not purely imaginary (purity defect {purity:.3e})"
        ));
    } else if mus.len() != 3 {
        reason = Some(format!("expected 3 conjugate pairs, found {}", mus.len()));
    }
    if elliptic {
        for w in mus.windows(2) {
            let sep = (w[1] * w[1] - w[0] * w[0]).abs() / (w[1] * w[1]).max(1e-300);
            if sep < SEPARATION_TOL {
                elliptic = false;
                reason = Some(format!("mu^2 separation {sep:.3e} below margin"));
                break;
            }
        }
    }

    let mu = if mus.len() == 3 {
        [mus[0], mus[1], mus[2]]
    } else {
        // Keep whatever is available for diagnostics; not elliptic anyway.
        let mut padded = [0.0; 3];
        for (i, m) in mus.iter().take(3).enumerate() {
            padded[i] = *m;
        }
        padded
    };

    let krein = if elliptic {
        krein_signs(f, &mu)
    } else {
        [0, 0, 0]
    };
    let trace_signed = mu
        .iter()
        .zip(krein.iter())
        .map(|(m, s)| *s as f64 * m)
        .sum();

    FloquetSpectrum {
        fundamental_matrix: *f,
        mu,
        trace_plus: mu.iter().sum(),
        krein,
        trace_signed,
        purity_defect: purity,
        elliptic,
        not_elliptic_reason: reason,
    }
}

/// Krein sign of each elliptic mode: the Hessian `H = -J F` restricted to the
/// invariant plane `ker(F^2 + mu^2 I)` is definite; the sign is its
/// signature.
fn krein_signs(f: &Mat6, mu: &[f64; 3]) -> [i8; 3] {
    let hess = -symplectic_j() * f; // J^2 = -I, so H = -J (J H) = -J F.
    let mut signs = [0i8; 3];
    for (j, &m) in mu.iter().enumerate() {
        let k = f * f + Mat6::identity() * (m * m);
        // Invariant plane = two smallest right singular vectors of k.
        let svd = k.svd(false, true);
        let v_t = svd.v_t.expect("svd requested");
        let p: Vec6 = v_t.row(4).transpose();
        let q: Vec6 = v_t.row(5).transpose();
        let tr = (p.dot(&(hess * p)) + q.dot(&(hess * q))) / 2.0;
        signs[j] = if tr >= 0.0 { 1 } else { -1 };
    }
    signs
}

/// All six eigenvalues reconstructed from the even characteristic polynomial:
/// `lambda = +-sqrt(z)` over the (possibly complex) roots of the cubic in
/// `z = lambda^2`. Closed form, no iteration.
fn eigenvalues_from_cubic(f: &Mat6) -> Vec<nalgebra::Complex<f64>> {
    use nalgebra::Complex;
    let (a, b, c) = squared_eigenvalue_cubic(f);
    let mut out = Vec::with_capacity(6);
    for z in cubic_complex_roots(a, b, c) {
        let l = z.sqrt();
        out.push(l);
        out.push(-l);
    }
    out.sort_by(|p, q| {
        p.im.partial_cmp(&q.im)
            .unwrap()
            .then(p.re.partial_cmp(&q.re).unwrap())
    });
    out.into_iter().map(|l| Complex::new(l.re, l.im)).collect()
}

/// Coefficients `(a, b, c)` of the cubic `z^3 + a z^2 + b z + c` satisfied by
/// `z = lambda^2` for the eigenvalues `lambda` of `F`.
///
/// The characteristic polynomial of a 6x6 Hamiltonian matrix is even, so its
/// coefficients in odd powers vanish; the even ones are obtained from the
/// Faddeev–LeVerrier recursion.
pub fn squared_eigenvalue_cubic(f: &Mat6) -> (f64, f64, f64) {
    // Faddeev–LeVerrier: c_k coefficients of lambda^6 + c1 lambda^5 + ... + c6.
    let mut m = Mat6::identity();
    let mut c = [0.0f64; 7];
    c[0] = 1.0;
    for k in 1..=6 {
        m = f * m;
        let tr = m.trace();
        c[k] = -tr / k as f64;
        for i in 0..6 {
            m[(i, i)] += c[k];
        }
    }
    // Even part: lambda^6 + c2 lambda^4 + c4 lambda^2 + c6, with z = lambda^2.
    (c[2], c[4], c[6])
}

/// Real roots of `z^3 + a z^2 + b z + c` (all real for Hamiltonian `F` with
/// elliptic spectrum), ascending.
pub fn cubic_real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let mut roots: Vec<f64> = cubic_complex_roots(a, b, c)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-10 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// All three complex roots of `z^3 + a z^2 + b z + c` by Cardano's formula.
pub fn cubic_complex_roots(a: f64, b: f64, c: f64) -> [nalgebra::Complex<f64>; 3] {
    use nalgebra::Complex;
    // Depressed cubic t^3 + p t + q with z = t - a/3.
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = Complex::new(-a / 3.0, 0.0);
    let disc = Complex::new(q * q / 4.0 + p * p * p / 27.0, 0.0);
    let d = disc.sqrt();
    let half_q = Complex::new(-q / 2.0, 0.0);
    // Pick the cube root branch of larger magnitude for stability.
    let u_cubed = if (half_q + d).norm() >= (half_q - d).norm() {
        half_q + d
    } else {
        half_q - d
    };
    let u = u_cubed.powf(1.0 / 3.0);
    let omega = Complex::new(-0.5, 0.75f64.sqrt());
    let mut roots = [Complex::new(0.0, 0.0); 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let uk = u * omega.powu(k as u32);
        // v = -p / (3 u): the conjugate Cardano branch.
        let vk = if uk.norm() > 1e-300 {
            -Complex::new(p / 3.0, 0.0) / uk
        } else {
            Complex::new(0.0, 0.0)
        };
        *r = uk + vk + shift;
    }
    roots
}

/// Leading-order prediction of the well's vacuum level:
/// `E + (h/2) sum_j sigma_j mu_j` with `sigma_j` the Krein signs.
///
/// The half-sum is the ground level of the quadratic normal form
/// `sum_j sigma_j mu_j (x_j^2 + xi_j^2)/2` quantized with parameter `h`; at a
/// genuine local minimum all signs are `+1` and this is the textbook
/// harmonic ground level.
pub fn harmonic_level(fs: &FloquetSpectrum, e: f64, h: f64) -> Result<f64, CriticalError> {
    fs.require_elliptic()?;
    Ok(e + 0.5 * h * fs.trace_signed)
}

/// One row of a parameter scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanEntry {
    pub omega: f64,
    pub nu: f64,
    pub v4: f64,
    pub r0: f64,
    pub omega_prime: f64,
    pub mu: [f64; 3],
    pub trace_plus: f64,
    /// Minimal relative separation of the squared frequencies.
    pub separation_margin: f64,
}

/// Scan a parameter grid for admissible, elliptic tuples; sorted by
/// descending separation margin (ties broken by input order).
pub fn parameter_scan(
    omegas: &[f64],
    nus: &[f64],
    v4s: &[f64],
    r0s: &[f64],
    h: f64,
) -> Vec<ScanEntry> {
    let mut found = Vec::new();
    for &omega in omegas {
        for &nu in nus {
            for &v4 in v4s {
                for &r0 in r0s {
                    let Ok(mp) = ModelParams::new(omega, nu, h) else {
                        continue;
                    };
                    let Ok(pot) = RadialPotential::quartic(v4, r0) else {
                        continue;
                    };
                    if mp.admissibility_margin(r0) < 2.0 {
                        continue;
                    }
                    let Ok(cps) = find_critical_points(&mp, &pot) else {
                        continue;
                    };
                    let fs = fundamental_matrix(&cps[0], &mp, &pot);
                    if !fs.elliptic {
                        continue;
                    }
                    let margin = (0..2)
                        .map(|i| {
                            let (a, b) = (fs.mu[i] * fs.mu[i], fs.mu[i + 1] * fs.mu[i + 1]);
                            (b - a).abs() / b.max(1e-300)
                        })
                        .fold(f64::MAX, f64::min);
                    found.push(ScanEntry {
                        omega,
                        nu,
                        v4,
                        r0,
                        omega_prime: mp.omega_prime,
                        mu: fs.mu,
                        trace_plus: fs.trace_plus,
                        separation_margin: margin,
                    });
                }
            }
        }
    }
    found.sort_by(|a, b| b.separation_margin.partial_cmp(&a.separation_margin).unwrap());
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p0() -> (ModelParams, RadialPotential) {
        (ModelParams::p0(), RadialPotential::default_quartic())
    }

    #[test]
    fn closed_form_critical_points() {
        let (mp, v) = p0();
        let cps = find_critical_points(&mp, &v).unwrap();
        let x3 = 0.9797958971132712;
        assert!((cps[0].point.x - Vector3::new(0.0, 0.2, x3)).norm() < 1e-10);
        assert!((cps[1].point.x - Vector3::new(0.0, 0.2, -x3)).norm() < 1e-10);
        for cp in &cps {
            assert!(cp.gradient_norm <= 1e-10);
            assert!((cp.point.x.norm() - 1.0).abs() < 1e-12, "|x| = r0");
            assert!(cp.point.xi.norm() < 1e-12);
        }
    }

    #[test]
    fn newton_from_perturbed_start_agrees() {
        let (mp, v) = p0();
        let x3 = 0.9797958971132712;
        let start = PhasePoint::new(
            Vector3::new(0.013, 0.22, x3 + 0.02),
            Vector3::new(0.01, -0.005, 0.002),
        );
        let refined = refine(start, WellSign::Plus, &mp, &v).unwrap();
        assert!((refined.point.x - Vector3::new(0.0, 0.2, x3)).norm() < 1e-9);
        assert!(refined.point.xi.norm() < 1e-10);
    }

    #[test]
    fn admissibility_boundary() {
        let mp = ModelParams::new(1.0, 0.5, 0.1).unwrap();
        let v = RadialPotential::default_quartic();
        // r0 w^2 / nu = 2 exactly: admissible, degenerate pair at (0, 1, 0).
        let cps = find_critical_points(&mp, &v).unwrap();
        assert!((cps[0].point.x - cps[1].point.x).norm() < 1e-9);
        let mp_bad = ModelParams::new(1.0, 0.6, 0.1).unwrap();
        assert!(matches!(
            find_critical_points(&mp_bad, &v),
            Err(CriticalError::Admissibility(_))
        ));
    }

    #[test]
    fn hessian_is_symmetric() {
        let (mp, v) = p0();
        let cps = find_critical_points(&mp, &v).unwrap();
        let h = hess_p_a(&cps[0].point, &mp, &v);
        assert!((h - h.transpose()).norm() <= 1e-12);
    }

    #[test]
    fn synthetic_decoupled_oscillators() {
        // Symbol sum mu_j (x_j^2 + xi_j^2) / 2 has F-eigenvalues +-i mu_j.
        let mus = [1.0, 2.0, 3.0];
        let mut hess = Mat6::zeros();
        for j in 0..3 {
            hess[(j, j)] = mus[j];
            hess[(3 + j, 3 + j)] = mus[j];
        }
        let f = symplectic_j() * hess;
        let fs = floquet_of_fundamental(&f);
        assert!(fs.elliptic);
        for j in 0..3 {
            assert!((fs.mu[j] - mus[j]).abs() < 1e-12);
        }
        assert!((fs.trace_plus - 6.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_level_is_half_sum() {
        let mus = [1.0, 2.0, 3.0];
        let mut hess = Mat6::zeros();
        for j in 0..3 {
            hess[(j, j)] = mus[j];
            hess[(3 + j, 3 + j)] = mus[j];
        }
        let fs = floquet_of_fundamental(&(symplectic_j() * hess));
        let lvl = harmonic_level(&fs, 0.0, 0.1).unwrap();
        assert!((lvl - 0.3).abs() < 1e-14);
        assert!((harmonic_level(&fs, 2.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        // E + (h/2) Tr+ minus E is exactly linear in h.
        let l1 = harmonic_level(&fs, 0.7, 0.2).unwrap() - 0.7;
        let l2 = harmonic_level(&fs, 0.7, 0.4).unwrap() - 0.7;
        assert!((l2 - 2.0 * l1).abs() < 1e-14);
    }

    #[test]
    fn krein_signs_on_indefinite_synthetic() {
        // Symbol x?: +1, -2, +3 oscillators: elliptic with mixed signature.
        let signed = [1.0, -2.0, 3.0];
        let mut hess = Mat6::zeros();
        for j in 0..3 {
            hess[(j, j)] = signed[j];
            hess[(3 + j, 3 + j)] = signed[j];
        }
        let fs = floquet_of_fundamental(&(symplectic_j() * hess));
        assert!(fs.elliptic);
        assert_eq!(fs.krein, [1, -1, 1]);
        assert!((fs.trace_plus - 6.0).abs() < 1e-10);
        assert!((fs.trace_signed - 2.0).abs() < 1e-10);
    }

    #[test]
    fn spectrum_symmetric_under_negation_and_conjugation() {
        let (mp, v) = p0();
        let cps = find_critical_points(&mp, &v).unwrap();
        let f = symplectic_j() * hess_p_a(&cps[0].point, &mp, &v);
        let eig = f.complex_eigenvalues();
        let fnorm = f.norm();
        for l in eig.iter() {
            // For every eigenvalue, -lambda and conj(lambda) are eigenvalues.
            let has_neg = eig.iter().any(|m| (m + l).norm() <= 1e-9 * fnorm);
            let has_conj = eig.iter().any(|m| (m - l.conj()).norm() <= 1e-9 * fnorm);
            assert!(has_neg && has_conj);
        }
    }

    #[test]
    fn wells_have_identical_floquet_spectra() {
        let (mp, v) = p0();
        let cps = find_critical_points(&mp, &v).unwrap();
        let fa = fundamental_matrix(&cps[0], &mp, &v);
        let fb = fundamental_matrix(&cps[1], &mp, &v);
        assert!((fa.trace_plus - fb.trace_plus).abs() <= 1e-12 * fa.trace_plus.abs().max(1.0));
        for j in 0..3 {
            assert!((fa.mu[j] - fb.mu[j]).abs() <= 1e-12);
        }
    }

    #[test]
    fn characteristic_cubic_oracle_synthetic() {
        // Elliptic by construction: the cubic roots must be -mu_j^2.
        let mus = [0.7, 1.9, 3.3];
        let mut hess = Mat6::zeros();
        for j in 0..3 {
            hess[(j, j)] = mus[j];
            hess[(3 + j, 3 + j)] = mus[j];
        }
        let f = symplectic_j() * hess;
        let fs = floquet_of_fundamental(&f);
        assert!(fs.elliptic);
        let (a, b, c) = squared_eigenvalue_cubic(&f);
        let roots = cubic_real_roots(a, b, c);
        assert_eq!(roots.len(), 3);
        let mut from_cubic: Vec<f64> = roots.iter().map(|z| (-z).max(0.0).sqrt()).collect();
        from_cubic.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for j in 0..3 {
            assert!(
                (from_cubic[j] - fs.mu[j]).abs() <= 1e-8 * fs.mu[j].max(1e-10),
                "cubic {} vs eigensolver {}",
                from_cubic[j],
                fs.mu[j]
            );
        }
    }

    #[test]
    fn characteristic_cubic_oracle_p0() {
        // P0 is not elliptic (one elliptic pair plus a complex quartet); the
        // cubic roots must still reproduce the dense eigenvalues lambda^2.
        let (mp, v) = p0();
        let cps = find_critical_points(&mp, &v).unwrap();
        let f = symplectic_j() * hess_p_a(&cps[0].point, &mp, &v);
        let fs = floquet_of_fundamental(&f);
        assert!(!fs.elliptic, "P0 is outside the admissible elliptic set");
        let (a, b, c) = squared_eigenvalue_cubic(&f);
        let dense = f.complex_eigenvalues();
        for z in cubic_complex_roots(a, b, c) {
            let l = z.sqrt();
            let best = dense
                .iter()
                .map(|d| ((d - nalgebra::Complex::new(l.re, l.im)).norm())
                    .min((d + nalgebra::Complex::new(l.re, l.im)).norm()))
                .fold(f64::MAX, f64::min);
            assert!(best <= 1e-7 * f.norm(), "root {l} unmatched (dist {best:.3e})");
        }
    }

    #[test]
    fn hessian_matches_finite_differences_at_well() {
        let (mp, v) = p0();
        let cps = find_critical_points(&mp, &v).unwrap();
        let h = hess_p_a(&cps[0].point, &mp, &v);
        let eps = 1e-5;
        for i in 0..6 {
            let mut pp = cps[0].point;
            let mut pm = cps[0].point;
            if i < 3 {
                pp.x[i] += eps;
                pm.x[i] -= eps;
            } else {
                pp.xi[i - 3] += eps;
                pm.xi[i - 3] -= eps;
            }
            let gp = grad_p_a(&pp, &mp, &v);
            let gm = grad_p_a(&pm, &mp, &v);
            for j in 0..6 {
                let fd = (gp[j] - gm[j]) / (2.0 * eps);
                let scale = h[(i, j)].abs().max(1.0);
                assert!((h[(i, j)] - fd).abs() <= 1e-6 * scale, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn scan_below_admissibility_is_empty() {
        let entries = parameter_scan(&[1.0], &[0.6, 0.8], &[1.0], &[1.0], 0.1);
        assert!(entries.is_empty());
    }

    #[test]
    fn scan_sorted_by_margin() {
        let entries = parameter_scan(
            &[1.0, 1.5, 2.0],
            &[0.05, 0.1, 0.2, 0.3],
            &[0.5, 1.0, 2.0],
            &[1.0, 1.5],
            0.1,
        );
        for w in entries.windows(2) {
            assert!(w[0].separation_margin >= w[1].separation_margin);
        }
    }
}
