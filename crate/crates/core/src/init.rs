//! Initial data: the one-sided Gaussian mode spectrum, the exact linear
//! field built from it, time-derivative initial conditions for the
//! reference solver, and the Newton inversion that recovers the envelope
//! A(z, 0) from a given real field.
//!
//! A real field built from a single forward branch has the spectral form
//!
//! ```text
//! Ê(k, t) = A₁(k) e^{-i ω(k) t} + A₁*(-k) e^{+i ω*(-k) t}
//! ```
//!
//! with A₁ supported on k > 0 and ω(k) the branch root continued across
//! that support. The j-th time derivative at t = 0 follows by bringing down
//! (-i ω(k))^j, which is what the reference solver consumes as initial data.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mms::MmsCoefficients;
use crate::modes::{self, DispersionBranch};
use crate::spectral::{Dft, Grid, SpectralField};
use crate::susceptibility::SusceptibilityModel;

/// Envelope spectral coefficients below this fraction of the peak are
/// zeroed after the Newton inversion. Transform round-off sits near 1e-16
/// of the peak; real band content sits orders of magnitude above this. The
/// cut keeps the stored envelope spectrum exactly band-limited, so the
/// exact propagator cannot amplify transform noise when the envelope
/// equation is ill posed.
pub const ENVELOPE_SPECTRUM_FLOOR: f64 = 1e-14;

/// One-sided Gaussian mode amplitude on the grid: D e^{-δ(k-k₀)²} for
/// k > 0, identically zero for k <= 0.
pub fn gaussian_spectrum(d_amp: f64, delta: f64, k0: f64, grid: &Grid) -> Result<Vec<Complex64>> {
    if !(d_amp > 0.0) || !(delta > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "gaussian spectrum needs D > 0 and delta > 0, got D = {d_amp}, delta = {delta}"
        )));
    }
    grid.carrier_index(k0)?;
    let mut a1 = vec![Complex64::ZERO; grid.n()];
    for (i, v) in a1.iter_mut().enumerate() {
        let k = grid.wavenumber(i);
        if k > 0.0 {
            *v = Complex64::from(d_amp * (-delta * (k - k0) * (k - k0)).exp());
        }
    }
    Ok(a1)
}

/// Branch frequencies ω(k) at every positive-k grid mode where the
/// spectrum is nonzero, continued outward from the carrier.
#[derive(Debug, Clone)]
pub struct ModeTable {
    /// ω at grid index i; meaningful only where `present[i]`.
    pub omega: Vec<Complex64>,
    pub present: Vec<bool>,
}

/// Continue the branch across the support of `a1`. Sub-steps keep the
/// Newton continuation well inside its basin even where roots crowd
/// together near k = 0.
pub fn mode_table(
    model: &SusceptibilityModel,
    branch: &DispersionBranch,
    a1: &[Complex64],
    grid: &Grid,
) -> Result<ModeTable> {
    let n = grid.n();
    let mut omega = vec![Complex64::ZERO; n];
    let mut present = vec![false; n];

    let carrier = grid.carrier_index(branch.k0)?;
    omega[carrier] = branch.omega0;
    present[carrier] = true;

    // positive-k modes are indices 1..n/2 (exclusive of DC and Nyquist)
    let track = |from: usize, to: usize, w: Complex64| -> Result<Complex64> {
        modes::track_branch(
            model,
            grid.wavenumber(from),
            w,
            grid.wavenumber(to),
            8,
        )
    };

    let mut w = branch.omega0;
    for i in (carrier + 1)..n / 2 {
        if a1[i] == Complex64::ZERO && a1[i - 1] == Complex64::ZERO {
            break;
        }
        w = track(i - 1, i, w)?;
        omega[i] = w;
        present[i] = true;
    }
    let mut w = branch.omega0;
    for i in (1..carrier).rev() {
        if a1[i] == Complex64::ZERO && a1[i + 1] == Complex64::ZERO {
            break;
        }
        w = track(i + 1, i, w)?;
        omega[i] = w;
        present[i] = true;
    }

    for (i, v) in a1.iter().enumerate() {
        if *v != Complex64::ZERO && !present[i] {
            return Err(Error::InvalidConfig(format!(
                "spectrum has mass at mode {i} (k = {}) outside the tracked branch support",
                grid.wavenumber(i)
            )));
        }
    }
    Ok(ModeTable { omega, present })
}

/// The exact linear-field spectrum at time t for the one-sided amplitude.
fn linear_field_spectral(a1: &[Complex64], modes: &ModeTable, t: f64, grid: &Grid) -> Vec<Complex64> {
    derivative_spectral(a1, modes, 0, t, grid)
}

/// Spectrum of ∂ₜ^j E at time t: (-i ω)^j weights on the forward half,
/// conjugate-mirrored onto the negative half so the field is exactly real.
fn derivative_spectral(
    a1: &[Complex64],
    modes: &ModeTable,
    j: usize,
    t: f64,
    grid: &Grid,
) -> Vec<Complex64> {
    let n = grid.n();
    let i = Complex64::I;
    let mut spec = vec![Complex64::ZERO; n];
    for m in 1..n / 2 {
        if !modes.present[m] || a1[m] == Complex64::ZERO {
            continue;
        }
        let w = modes.omega[m];
        let fwd = (-i * w).powu(j as u32) * a1[m] * (-i * w * t).exp();
        spec[m] = fwd;
        spec[grid.mirror_index(m)] = fwd.conj();
    }
    spec
}

/// Real linear-mode field at time t built from the one-sided spectrum.
pub fn linear_field(
    a1: &[Complex64],
    modes: &ModeTable,
    t: f64,
    grid: &Grid,
    dft: &Dft,
) -> SpectralField {
    SpectralField::from_spectral(dft, linear_field_spectral(a1, modes, t, grid))
}

/// Initial spectra f̂₀ .. f̂_{order-1} of E, ∂ₜE, ... for the reference
/// solver, all conjugate-symmetric (real fields).
pub fn reference_ics(
    a1: &[Complex64],
    modes: &ModeTable,
    order: usize,
    grid: &Grid,
) -> Result<Vec<Vec<Complex64>>> {
    if !(order == 3 || order == 4) {
        return Err(Error::InvalidConfig(format!(
            "reference solver order must be 3 or 4, got {order}"
        )));
    }
    Ok((0..order)
        .map(|j| derivative_spectral(a1, modes, j, 0.0, grid))
        .collect())
}

/// Rescale the one-sided amplitude so the physical linear field at t = 0
/// has unit peak. Returns the scaled amplitude and the scale factor used.
pub fn normalize_peak(
    a1: Vec<Complex64>,
    modes: &ModeTable,
    grid: &Grid,
    dft: &Dft,
) -> Result<(Vec<Complex64>, f64)> {
    let f = linear_field(&a1, modes, 0.0, grid, dft);
    let peak = f.max_physical();
    if peak <= 0.0 {
        return Err(Error::InvalidConfig("initial field is identically zero".into()));
    }
    let s = 1.0 / peak;
    Ok((a1.into_iter().map(|v| v * s).collect(), s))
}

/// Zero spectral coefficients below `ENVELOPE_SPECTRUM_FLOOR` of the peak.
fn apply_spectrum_floor(spec: &mut [Complex64]) {
    let peak = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cut = ENVELOPE_SPECTRUM_FLOOR * peak;
    for v in spec.iter_mut() {
        if v.norm() < cut {
            *v = Complex64::ZERO;
        }
    }
}

/// Recover A(z, 0) from a real initial field by solving, pointwise in z,
///
/// ```text
/// E⁺(z) e^{-i k₀ z} = A + ε² c₂ |A|² A
/// ```
///
/// where E⁺ is the positive-wavenumber (analytic) part of the field. The
/// third-harmonic term is absent because B(z,0) = -c₁ A³ cancels it. Newton
/// iteration runs on (Re A, Im A); the map is an O(ε²) perturbation of the
/// identity, so full steps converge in a handful of iterations.
pub fn invert_for_a(
    e0: &SpectralField,
    coeffs: &MmsCoefficients,
    epsilon: f64,
    max_iter: usize,
    tol: f64,
    grid: &Grid,
    dft: &Dft,
) -> Result<SpectralField> {
    let n = grid.n();
    let k0 = coeffs.branch.k0;
    let i = Complex64::I;

    // analytic part: positive-wavenumber half of the spectrum
    let mut half = vec![Complex64::ZERO; n];
    half[1..n / 2].copy_from_slice(&e0.spectral[1..n / 2]);
    let eplus = dft.inverse(&half);

    // demodulate the carrier
    let target: Vec<Complex64> = eplus
        .iter()
        .enumerate()
        .map(|(j, v)| v * (-i * k0 * grid.z(j)).exp())
        .collect();

    let eps2c2 = epsilon * epsilon * coeffs.c2;
    let mut a = target.clone();
    for it in 0..=max_iter {
        let residual = a
            .iter()
            .zip(&target)
            .map(|(aj, w)| (aj + eps2c2 * aj.norm_sqr() * aj - w).norm())
            .fold(0.0f64, f64::max);
        if residual <= tol {
            break;
        }
        if it == max_iter {
            return Err(Error::NewtonDiverged {
                residual,
                iterations: it,
            });
        }
        for j in 0..n {
            let aj = a[j];
            let f = aj + eps2c2 * aj.norm_sqr() * aj - target[j];
            // Wirtinger derivatives of f(A, A*) = A + ε²c₂ A² A* - w
            let df_da = 1.0 + 2.0 * eps2c2 * aj.norm_sqr();
            let df_dac = eps2c2 * aj * aj;
            let det = df_da.norm_sqr() - df_dac.norm_sqr();
            if det.abs() < 1e-300 {
                return Err(Error::NewtonDiverged {
                    residual: f.norm(),
                    iterations: it,
                });
            }
            let delta = -(f * df_da.conj() - f.conj() * df_dac) / det;
            a[j] += delta;
        }
    }

    let mut spectral = dft.forward(&a);
    apply_spectrum_floor(&mut spectral);
    Ok(SpectralField::from_spectral(dft, spectral))
}

/// The free third-harmonic envelope that cancels the driven c₁A³ term at
/// t = 0: B(z, 0) = -c₁ A³(z, 0).
pub fn initial_b(a0: &SpectralField, c1: Complex64, dft: &Dft) -> SpectralField {
    let phys: Vec<Complex64> = a0.physical.iter().map(|&a| -c1 * a * a * a).collect();
    let mut spectral = dft.forward(&phys);
    apply_spectrum_floor(&mut spectral);
    SpectralField::from_spectral(dft, spectral)
}

/// Fraction of |Â|² mass lying outside the window |k̃| < width.
pub fn spectral_mass_outside(spec: &[Complex64], grid: &Grid, width: f64) -> f64 {
    let mut inside = 0.0;
    let mut total = 0.0;
    for (i, v) in spec.iter().enumerate() {
        let m = v.norm_sqr();
        total += m;
        if grid.wavenumber(i).abs() < width {
            inside += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (total - inside) / total
    }
}
