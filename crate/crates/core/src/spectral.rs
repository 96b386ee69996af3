//! Periodic grid, discrete Fourier transform plumbing, and fields stored in
//! both physical and spectral representation.
//!
//! Conventions: on the domain [0, L) with n points, mode m carries the plane
//! wave e^{i k_m z} with k_m = m · 2π/L for m < n/2 and (m-n) · 2π/L above
//! (the usual FFT ordering). Spectral coefficients are defined by
//!
//! ```text
//! E(z_j) = Σ_m Ê_m e^{i k_m z_j}      Ê = forward FFT / n
//! ```
//!
//! so a single coefficient is the amplitude of its plane wave and per-mode
//! propagators multiply coefficients directly.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on [0, length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < 8 {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        Ok(Grid { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Spectral resolution 2π / L.
    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    pub fn dz(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        i as f64 * self.dz()
    }

    /// Wavenumber of mode index i in FFT ordering.
    pub fn wavenumber(&self, i: usize) -> f64 {
        let m = if i < self.n / 2 {
            i as isize
        } else {
            i as isize - self.n as isize
        };
        m as f64 * self.dk()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    pub fn nyquist(&self) -> f64 {
        self.n as f64 / 2.0 * self.dk()
    }

    /// Mode index of the (positive) grid-representable carrier k0.
    /// Fails with OffGridCarrier when k0 is not an integer multiple of dk.
    pub fn carrier_index(&self, k0: f64) -> Result<usize> {
        let dk = self.dk();
        let m = (k0 / dk).round();
        if (k0 - m * dk).abs() > 1e-12 * k0.abs().max(1.0) {
            return Err(Error::OffGridCarrier { k0, dk });
        }
        let m = m as isize;
        if m <= 0 || m >= self.n as isize / 2 {
            return Err(Error::InvalidGrid(format!(
                "carrier k0 = {k0} maps to mode {m}, outside (0, n/2)"
            )));
        }
        Ok(m as usize)
    }

    /// Index of the mode at -k_m for the mode at +k_m (conjugate partner).
    pub fn mirror_index(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.n - i
        }
    }

    /// Require headroom for the third harmonic: the dealiased band must
    /// reach well past 3 k0 before the Nyquist mode.
    pub fn check_harmonic_headroom(&self, k0: f64) -> Result<()> {
        let needed = 8.0 * (3.0 * k0) / self.dk();
        if (self.n as f64) < needed {
            return Err(Error::InvalidGrid(format!(
                "n = {} gives too little spectral headroom past 3 k0 = {}; need n >= {:.0}",
                self.n,
                3.0 * k0,
                needed
            )));
        }
        Ok(())
    }
}

/// Planned forward/inverse transforms for one grid size.
pub struct Dft {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Dft {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scratch_len(&self) -> usize {
        self.fwd
            .get_inplace_scratch_len()
            .max(self.inv.get_inplace_scratch_len())
    }

    /// physical -> spectral (with the 1/n normalization), allocating.
    pub fn forward(&self, physical: &[Complex64]) -> Vec<Complex64> {
        let mut buf = physical.to_vec();
        let mut scratch = vec![Complex64::ZERO; self.scratch_len()];
        self.forward_inplace(&mut buf, &mut scratch);
        buf
    }

    /// spectral -> physical, allocating.
    pub fn inverse(&self, spectral: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spectral.to_vec();
        let mut scratch = vec![Complex64::ZERO; self.scratch_len()];
        self.inverse_inplace(&mut buf, &mut scratch);
        buf
    }

    pub fn forward_inplace(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.fwd.process_with_scratch(buf, scratch);
        let inv_n = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= inv_n;
        }
    }

    pub fn inverse_inplace(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inv.process_with_scratch(buf, scratch);
    }
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

/// A field on the grid, kept in both representations.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub physical: Vec<Complex64>,
    pub spectral: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Self {
        SpectralField {
            physical: vec![Complex64::ZERO; n],
            spectral: vec![Complex64::ZERO; n],
        }
    }

    pub fn from_physical(dft: &Dft, physical: Vec<Complex64>) -> Self {
        let spectral = dft.forward(&physical);
        SpectralField { physical, spectral }
    }

    pub fn from_spectral(dft: &Dft, spectral: Vec<Complex64>) -> Self {
        let physical = dft.inverse(&spectral);
        SpectralField { physical, spectral }
    }

    pub fn n(&self) -> usize {
        self.physical.len()
    }

    /// max |Im physical| / max |physical|; ~1e-16 for a genuinely real field.
    pub fn relative_imag(&self) -> f64 {
        let max_abs = self.physical.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max_abs == 0.0 {
            return 0.0;
        }
        let max_im = self
            .physical
            .iter()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max);
        max_im / max_abs
    }

    /// Worst violation of Ê(-k) = Ê(k)*, relative to the spectral peak.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let n = self.n();
        let peak = self.spectral.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst = self.spectral[0].im.abs();
        for i in 1..=n / 2 {
            let j = n - i;
            if j == i {
                // Nyquist mode pairs with itself; must be real
                worst = worst.max(self.spectral[i].im.abs());
                continue;
            }
            worst = worst.max((self.spectral[j] - self.spectral[i].conj()).norm());
        }
        worst / peak
    }

    pub fn l2_physical(&self) -> f64 {
        self.physical.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_physical(&self) -> f64 {
        self.physical.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
