//! Multiple-scales envelope machinery: dispersion coefficients of the
//! envelope equation, exact spectral propagation, reconstruction of the
//! field from the envelopes, and the growth (posedness) curve.
//!
//! The leading envelope A of a narrow-band packet on the branch ω(k) obeys
//! the linear first-order-in-time equation
//!
//! ```text
//! ∂t A + ω'(k₀) ∂z A - i (β - α ω'(k₀)²) ∂zz A = 0
//! ```
//!
//! with α, β built from the branch and the susceptibility derivatives. In
//! spectral envelope coordinates k̃ (centered on the carrier) each mode
//! evolves exactly by
//!
//! ```text
//! Â(k̃, t) = Â(k̃, 0) exp[(-i k̃ vg - i k̃² d₂) t]        d₂ = β - α vg²
//! ```
//!
//! The third-harmonic free amplitude B advects at the complex group velocity
//! of the branch tracked to 3 k₀. Because the equations are linear with
//! constant coefficients, propagation is exact exponentiation; the only
//! approximation left in the pipeline is the truncation of the expansion
//! itself.
//!
//! The field is reconstructed from the envelopes as
//!
//! ```text
//! E = A e^{i(k₀ z - ω₀ t)}
//!   + ε² [ B e^{i(3 k₀ z - ω(3k₀) t)} + c₁ A³ e^{3i(k₀ z - ω₀ t)}
//!          + c₂ |A|² A e^{i(k₀ z - ω₀ t)} e^{2 t Im ω₀} ]  + c.c.
//! ```
//!
//! B rides its own free-mode carrier ω(3k₀) while the driven c₁ A³ term
//! oscillates at 3ω₀; the two sit on the same 3k₀ spatial mode.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modes::DispersionBranch;
use crate::spectral::{Dft, Grid, SpectralField};
use crate::susceptibility::{SusceptibilityModel, SQRT_2PI};

/// Coefficients of the envelope equations for one dispersion branch.
#[derive(Debug, Clone, Copy)]
pub struct MmsCoefficients {
    /// Second-derivative-in-time coefficient of the raw envelope equation.
    pub alpha: Complex64,
    /// ω'(k₀) / (2 k₀), the second-derivative-in-space coefficient.
    pub beta: Complex64,
    /// Third-harmonic particular-solution coefficient 1/(n²(ω₀) - n²(3ω₀)).
    pub c1: Complex64,
    /// Self-interaction particular-solution coefficient at the shifted
    /// frequency ω₀ + 2i Im ω₀.
    pub c2: Complex64,
    /// β - α vg², the coefficient of -i ∂zz in the reduced equation; equals
    /// ω''(k₀)/2 on the branch.
    pub d2: Complex64,
    /// Growth-curve coefficients: Re λ(k̃) = a1 k̃² + a2 k̃.
    pub a1: f64,
    pub a2: f64,
    pub branch: DispersionBranch,
}

/// Well-posedness classification of the envelope equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Posedness {
    WellPosed,
    IllPosed,
    Marginal,
}

/// Compute all envelope coefficients for a resolved branch.
pub fn compute_coefficients(
    model: &SusceptibilityModel,
    branch: &DispersionBranch,
) -> Result<MmsCoefficients> {
    let (k0, w0, vg) = (branch.k0, branch.omega0, branch.vg);

    let n2_w0 = model.n_squared(w0)?;
    let (chi1, chi2) = model.chi_derivs(w0)?;
    let alpha = vg * (n2_w0 + 2.0 * w0 * SQRT_2PI * chi1 + 0.5 * w0 * w0 * SQRT_2PI * chi2)
        / (2.0 * k0);
    let beta = vg / (2.0 * k0);

    let n2_3w = model.n_squared(3.0 * w0)?;
    let c1_denom = n2_w0 - n2_3w;
    if c1_denom.norm() < 1e-12 {
        return Err(Error::DegenerateC1(c1_denom.norm()));
    }
    let c1 = 1.0 / c1_denom;

    // Shifted frequency of the |A|² A forcing: ω₀ + 2i Im ω₀.
    let ws = w0 + Complex64::new(0.0, 2.0 * branch.omega_i);
    let c2_denom = k0 * k0 - model.n_squared(ws)? * ws * ws;
    if c2_denom.norm() < 1e-12 {
        return Err(Error::DegenerateC2(c2_denom.norm()));
    }
    let c2 = 3.0 * ws * ws / c2_denom;

    let d2 = beta - alpha * vg * vg;
    // λ(k̃) = -i k̃ vg - i k̃² d₂  =>  Re λ = Im(vg) k̃ + Im(d₂) k̃²
    let a1 = d2.im;
    let a2 = vg.im;

    Ok(MmsCoefficients {
        alpha,
        beta,
        c1,
        c2,
        d2,
        a1,
        a2,
        branch: *branch,
    })
}

/// Envelope-equation growth rate λ(k̃) of the mode e^{λ t} e^{i k̃ z}.
pub fn lambda(coeffs: &MmsCoefficients, k_env: f64) -> Complex64 {
    let i = Complex64::I;
    -i * k_env * coeffs.branch.vg - i * k_env * k_env * coeffs.d2
}

/// Re λ on a grid of envelope wavenumbers: a1 k̃² + a2 k̃ per point.
pub fn growth_curve(coeffs: &MmsCoefficients, k_grid: &[f64]) -> Vec<f64> {
    k_grid
        .iter()
        .map(|&k| coeffs.a1 * k * k + coeffs.a2 * k)
        .collect()
}

/// IllPosed when the parabola opens upward (unbounded growth at large k̃).
pub fn classify(coeffs: &MmsCoefficients) -> Posedness {
    if coeffs.a1.abs() < 1e-14 {
        Posedness::Marginal
    } else if coeffs.a1 > 0.0 {
        Posedness::IllPosed
    } else {
        Posedness::WellPosed
    }
}

/// Envelope state of the multiple-scales solution at time t.
#[derive(Debug, Clone)]
pub struct MmsSolution {
    /// Leading envelope, spectrum centered on k̃ = 0.
    pub a: SpectralField,
    /// Free third-harmonic envelope, when present.
    pub b: Option<SpectralField>,
    pub coeffs: MmsCoefficients,
    pub epsilon: f64,
    pub t: f64,
}

impl MmsSolution {
    pub fn new(
        a: SpectralField,
        b: Option<SpectralField>,
        coeffs: MmsCoefficients,
        epsilon: f64,
    ) -> Self {
        MmsSolution {
            a,
            b,
            coeffs,
            epsilon,
            t: 0.0,
        }
    }
}

/// Advance the A envelope by t: exact per-mode exponentiation of the
/// envelope dispersion relation. No time-stepping error.
pub fn propagate_a(sol: &MmsSolution, t: f64, grid: &Grid, dft: &Dft) -> MmsSolution {
    let mut spectral = sol.a.spectral.clone();
    for (i, v) in spectral.iter_mut().enumerate() {
        let k = grid.wavenumber(i);
        *v *= (lambda(&sol.coeffs, k) * t).exp();
    }
    let a = SpectralField::from_spectral(dft, spectral);
    MmsSolution {
        a,
        b: sol.b.clone(),
        coeffs: sol.coeffs,
        epsilon: sol.epsilon,
        t: sol.t + t,
    }
}

/// Advance the B envelope by t: pure advection at the complex group
/// velocity of the 3 k₀ branch point.
pub fn propagate_b(sol: &MmsSolution, t: f64, grid: &Grid, dft: &Dft) -> Result<MmsSolution> {
    let b = sol.b.as_ref().ok_or(Error::MissingB)?;
    let i = Complex64::I;
    let vg3 = sol.coeffs.branch.vg_3k;
    let mut spectral = b.spectral.clone();
    for (m, v) in spectral.iter_mut().enumerate() {
        let k = grid.wavenumber(m);
        *v *= (-i * k * vg3 * t).exp();
    }
    let b = SpectralField::from_spectral(dft, spectral);
    Ok(MmsSolution {
        a: sol.a.clone(),
        b: Some(b),
        coeffs: sol.coeffs,
        epsilon: sol.epsilon,
        t: sol.t,
    })
}

/// Advance both envelopes by t (B skipped when absent).
pub fn propagate(sol: &MmsSolution, t: f64, grid: &Grid, dft: &Dft) -> Result<MmsSolution> {
    let advanced = propagate_a(sol, t, grid, dft);
    if advanced.b.is_some() {
        propagate_b(&advanced, t, grid, dft)
    } else {
        Ok(advanced)
    }
}

/// Reconstruct the real field from the envelopes at the solution's own time.
pub fn reconstruct_e(sol: &MmsSolution, grid: &Grid, dft: &Dft) -> SpectralField {
    let i = Complex64::I;
    let c = &sol.coeffs;
    let (k0, w0) = (c.branch.k0, c.branch.omega0);
    let (w3, wi) = (c.branch.omega_3k, c.branch.omega_i);
    let (t, eps2) = (sol.t, sol.epsilon * sol.epsilon);

    // z-independent phase/decay factors at time t
    let ph_carrier = (-i * w0 * t).exp();
    let ph_carrier3 = (-i * 3.0 * w0 * t).exp();
    let ph_b = (-i * w3 * t).exp();
    let ph_c2 = ph_carrier * (2.0 * t * wi).exp();

    let n = grid.n();
    let mut phys = vec![Complex64::ZERO; n];
    for j in 0..n {
        let z = grid.z(j);
        let e1 = (i * k0 * z).exp();
        let e3 = (i * 3.0 * k0 * z).exp();
        let a = sol.a.physical[j];
        let mut x = a * e1 * ph_carrier;
        let mut nl = c.c1 * a * a * a * e3 * ph_carrier3 + c.c2 * a.norm_sqr() * a * e1 * ph_c2;
        if let Some(b) = &sol.b {
            nl += b.physical[j] * e3 * ph_b;
        }
        x += eps2 * nl;
        // E = X + conj(X)
        phys[j] = Complex64::new(2.0 * x.re, 0.0);
    }
    SpectralField::from_physical(dft, phys)
}
