//! Pseudospectral reference solver for the Sellmeier-transformed wave
//! equations, explicit in their highest time derivative.
//!
//! Toy kernel (third order in time):
//!
//! ```text
//! a Eₜₜₜ = -(γ+1) Eₜₜ + γ Ezz + a Ezzₜ
//!          - ε² γ (6 E Eₜ² + 3 E² Eₜₜ)
//!          - ε² a (6 Eₜ³ + 18 E Eₜ Eₜₜ) - ε² 3E² (γ Ezz + a Ezzₜ - (γ+1) Eₜₜ)
//! ```
//!
//! Lorentz oscillator (fourth order in time):
//!
//! ```text
//! a Eₜₜₜₜ = (1+c) Eₜₜ - b Eₜₜₜ + (b Ezzₜ - c Ezz + a Ezzₜₜ)
//!           - ε² [ -c (6 E Eₜ² + 3 E² Eₜₜ)
//!                  + b (6 Eₜ³ + 18 E Eₜ Eₜₜ + 3 E² Eₜₜₜ)
//!                  + a (3 F E² + 18 E Eₜₜ² + 24 Eₜₜₜ E Eₜ + 36 Eₜ² Eₜₜ) ]
//! ```
//!
//! where F is the linear expression for Eₜₜₜₜ (substituted inside the
//! ε²-weighted group, consistent with truncation at that order). Spatial
//! derivatives act as ik multiplications in spectral space; cubic products
//! are formed pointwise in physical space and dealiased by the 2/3 rule.
//! Time integration is classical RK4 on the first-order system
//! (E, Eₜ, ..., ∂ₜ^{order-1}E).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes;
use crate::spectral::{Dft, Grid, SpectralField};
use crate::susceptibility::SusceptibilityModel;

/// Fraction of the RK4 imaginary-axis stability limit used by the default
/// time step: dt = DT_SAFETY / max |ω| over kept modes and all branches.
/// The RK4 limit is |ω| dt < 2√2, so this keeps a margin above 10x.
pub const DT_SAFETY: f64 = 0.25;

/// A field-norm growth beyond this factor aborts the run.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// Snapshot of the spectral state (E and its time derivatives) at time t.
#[derive(Debug, Clone)]
pub struct SolverState {
    /// Ê, ∂ₜÊ, ..., ∂ₜ^{order-1}Ê.
    pub derivs: Vec<SpectralField>,
    pub t: f64,
    pub order: usize,
    pub epsilon: f64,
    pub model: SusceptibilityModel,
}

impl SolverState {
    /// Build the initial state from conjugate-symmetric spectra.
    pub fn from_spectra(
        model: SusceptibilityModel,
        epsilon: f64,
        spectra: Vec<Vec<Complex64>>,
        dft: &Dft,
    ) -> Result<Self> {
        let order = model.solver_order();
        if spectra.len() != order {
            return Err(Error::InvalidConfig(format!(
                "{} initial spectra supplied, model order is {order}",
                spectra.len()
            )));
        }
        Ok(SolverState {
            derivs: spectra
                .into_iter()
                .map(|s| SpectralField::from_spectral(dft, s))
                .collect(),
            t: 0.0,
            order,
            epsilon,
            model,
        })
    }

    pub fn field(&self) -> &SpectralField {
        &self.derivs[0]
    }
}

/// Zero every mode with |k| above 2/3 of the Nyquist wavenumber.
pub fn dealias(field: &SpectralField, grid: &Grid, dft: &Dft) -> SpectralField {
    let cut = 2.0 / 3.0 * grid.nyquist();
    let mut spectral = field.spectral.clone();
    for (i, v) in spectral.iter_mut().enumerate() {
        if grid.wavenumber(i).abs() > cut {
            *v = Complex64::ZERO;
        }
    }
    SpectralField::from_spectral(dft, spectral)
}

/// The pseudospectral integrator; owns the transform plans and all scratch
/// buffers, so stepping does not allocate.
pub struct RefSolver {
    model: SusceptibilityModel,
    grid: Grid,
    epsilon: f64,
    dft: Dft,
    keep: Vec<bool>,
    k2: Vec<f64>,
    order: usize,
    // scratch: physical copies of the state, the substituted linear
    // combination, the nonlinear product, and FFT scratch
    phys: Vec<Vec<Complex64>>,
    lin: Vec<Complex64>,
    nl: Vec<Complex64>,
    fft_scratch: Vec<Complex64>,
    stages: Vec<Vec<Vec<Complex64>>>,
    trial: Vec<Vec<Complex64>>,
}

impl RefSolver {
    pub fn new(model: SusceptibilityModel, grid: Grid, epsilon: f64) -> Result<Self> {
        if let SusceptibilityModel::Lorentz { a, .. } = model {
            if a.abs() < 1e-14 {
                return Err(Error::ZeroACoefficient(a));
            }
        }
        let n = grid.n();
        let dft = Dft::new(n);
        let cut = 2.0 / 3.0 * grid.nyquist();
        let keep: Vec<bool> = (0..n).map(|i| grid.wavenumber(i).abs() <= cut).collect();
        let k2: Vec<f64> = (0..n).map(|i| grid.wavenumber(i).powi(2)).collect();
        let order = model.solver_order();
        let scratch_len = dft.scratch_len();
        Ok(RefSolver {
            model,
            grid,
            epsilon,
            dft,
            keep,
            k2,
            order,
            phys: vec![vec![Complex64::ZERO; n]; order],
            lin: vec![Complex64::ZERO; n],
            nl: vec![Complex64::ZERO; n],
            fft_scratch: vec![Complex64::ZERO; scratch_len],
            stages: vec![vec![vec![Complex64::ZERO; n]; order]; 4],
            trial: vec![vec![Complex64::ZERO; n]; order],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dft(&self) -> &Dft {
        &self.dft
    }

    /// Default time step: DT_SAFETY over the largest root magnitude across
    /// the kept band.
    pub fn default_dt(&self) -> Result<f64> {
        let mut w_max: f64 = 0.0;
        let half = self.grid.n() / 2;
        for m in 0..=half {
            let k = (m as f64) * self.grid.dk();
            if k > 2.0 / 3.0 * self.grid.nyquist() {
                break;
            }
            for r in modes::roots(&modes::dispersion_poly(&self.model, k))? {
                w_max = w_max.max(r.norm());
            }
        }
        if w_max <= 0.0 {
            return Err(Error::InvalidConfig("no modes to bound the time step".into()));
        }
        Ok(DT_SAFETY / w_max)
    }

    fn zero_dead_zone(keep: &[bool], spec: &mut [Complex64]) {
        for (v, &keep) in spec.iter_mut().zip(keep) {
            if !keep {
                *v = Complex64::ZERO;
            }
        }
    }

    fn fill_physical(&mut self, j: usize, spec: &[Complex64]) {
        self.phys[j].copy_from_slice(spec);
        self.dft.inverse_inplace(&mut self.phys[j], &mut self.fft_scratch);
    }

    /// du/dt of the first-order system: shifted derivatives plus the model
    /// right-hand side for the highest one.
    fn eval_rhs(&mut self, u: &[Vec<Complex64>], out: &mut [Vec<Complex64>]) {
        for j in 0..self.order - 1 {
            out[j].copy_from_slice(&u[j + 1]);
        }
        match self.model {
            SusceptibilityModel::Toy { gamma, a } => self.toy_highest(u, gamma, a, out),
            SusceptibilityModel::Lorentz { a, b, c } => self.lorentz_highest(u, a, b, c, out),
        }
    }

    fn toy_highest(&mut self, u: &[Vec<Complex64>], gamma: f64, a: f64, out: &mut [Vec<Complex64>]) {
        let n = self.grid.n();
        for j in 0..3 {
            self.fill_physical(j, &u[j]);
        }
        // γ Ezz + a Ezzₜ - (γ+1) Eₜₜ, needed physically inside the ε² group
        for m in 0..n {
            self.lin[m] = -self.k2[m] * (gamma * u[0][m] + a * u[1][m]) - (gamma + 1.0) * u[2][m];
        }
        self.dft.inverse_inplace(&mut self.lin, &mut self.fft_scratch);

        if self.epsilon != 0.0 {
            for m in 0..n {
                let (e, et, ett) = (self.phys[0][m], self.phys[1][m], self.phys[2][m]);
                self.nl[m] = gamma * (6.0 * e * et * et + 3.0 * e * e * ett)
                    + a * (6.0 * et * et * et + 18.0 * e * et * ett)
                    + 3.0 * e * e * self.lin[m];
            }
            self.dft.forward_inplace(&mut self.nl, &mut self.fft_scratch);
            Self::zero_dead_zone(&self.keep, &mut self.nl);
        } else {
            self.nl.iter_mut().for_each(|v| *v = Complex64::ZERO);
        }

        let eps2 = self.epsilon * self.epsilon;
        let inv_a = 1.0 / a;
        for m in 0..n {
            out[2][m] = inv_a
                * (-(gamma + 1.0) * u[2][m]
                    - self.k2[m] * (gamma * u[0][m] + a * u[1][m])
                    - eps2 * self.nl[m]);
        }
    }

    fn lorentz_highest(
        &mut self,
        u: &[Vec<Complex64>],
        a: f64,
        b: f64,
        c: f64,
        out: &mut [Vec<Complex64>],
    ) {
        let n = self.grid.n();
        for j in 0..4 {
            self.fill_physical(j, &u[j]);
        }
        // (1+c) Eₜₜ - b Eₜₜₜ + (b Ezzₜ - c Ezz + a Ezzₜₜ), spectrally
        for m in 0..n {
            self.lin[m] = (1.0 + c) * u[2][m] - b * u[3][m]
                - self.k2[m] * (b * u[1][m] - c * u[0][m] + a * u[2][m]);
        }

        if self.epsilon != 0.0 {
            // F = (1/a) lin is the linear value of Eₜₜₜₜ used inside the
            // ε² group; transform it to physical space first.
            self.nl.copy_from_slice(&self.lin);
            self.dft.inverse_inplace(&mut self.nl, &mut self.fft_scratch);
            let inv_a = 1.0 / a;
            for m in 0..n {
                let f4 = inv_a * self.nl[m];
                let (e, et, ett, ettt) = (
                    self.phys[0][m],
                    self.phys[1][m],
                    self.phys[2][m],
                    self.phys[3][m],
                );
                self.nl[m] = -c * (6.0 * e * et * et + 3.0 * e * e * ett)
                    + b * (6.0 * et * et * et + 18.0 * e * et * ett + 3.0 * e * e * ettt)
                    + a * (3.0 * f4 * e * e
                        + 18.0 * e * ett * ett
                        + 24.0 * ettt * e * et
                        + 36.0 * et * et * ett);
            }
            self.dft.forward_inplace(&mut self.nl, &mut self.fft_scratch);
            Self::zero_dead_zone(&self.keep, &mut self.nl);
        } else {
            self.nl.iter_mut().for_each(|v| *v = Complex64::ZERO);
        }

        let eps2 = self.epsilon * self.epsilon;
        let inv_a = 1.0 / a;
        for m in 0..n {
            out[3][m] = inv_a * (self.lin[m] - eps2 * self.nl[m]);
        }
    }

    /// One evaluation of the model right-hand side (the new highest time
    /// derivative) on a snapshot state.
    pub fn highest_derivative(&mut self, state: &SolverState) -> Result<SpectralField> {
        if state.order != self.order {
            return Err(Error::InvalidConfig(format!(
                "state order {} does not match solver order {}",
                state.order, self.order
            )));
        }
        let u: Vec<Vec<Complex64>> = state.derivs.iter().map(|f| f.spectral.clone()).collect();
        let n = self.grid.n();
        let mut out = vec![vec![Complex64::ZERO; n]; self.order];
        self.eval_rhs(&u, &mut out);
        Ok(SpectralField::from_spectral(&self.dft, out[self.order - 1].clone()))
    }

    fn rk4_step(&mut self, u: &mut [Vec<Complex64>], dt: f64) {
        let n = self.grid.n();
        let order = self.order;

        let mut stages = std::mem::take(&mut self.stages);
        let mut trial = std::mem::take(&mut self.trial);

        let (s1, rest) = stages.split_at_mut(1);
        let k1 = &mut s1[0];
        self.eval_rhs(u, k1);

        for j in 0..order {
            for m in 0..n {
                trial[j][m] = u[j][m] + 0.5 * dt * k1[j][m];
            }
        }
        let (s2, rest2) = rest.split_at_mut(1);
        let k2 = &mut s2[0];
        self.eval_rhs(&trial, k2);

        for j in 0..order {
            for m in 0..n {
                trial[j][m] = u[j][m] + 0.5 * dt * k2[j][m];
            }
        }
        let (s3, s4s) = rest2.split_at_mut(1);
        let k3 = &mut s3[0];
        self.eval_rhs(&trial, k3);

        for j in 0..order {
            for m in 0..n {
                trial[j][m] = u[j][m] + dt * k3[j][m];
            }
        }
        let k4 = &mut s4s[0];
        self.eval_rhs(&trial, k4);

        let w = dt / 6.0;
        for j in 0..order {
            for m in 0..n {
                u[j][m] += w * (k1[j][m] + 2.0 * k2[j][m] + 2.0 * k3[j][m] + k4[j][m]);
            }
        }

        self.stages = stages;
        self.trial = trial;
    }

    /// Integrate to t_end with step ≈ dt (adjusted per segment to land
    /// exactly on each requested output time), returning a snapshot at
    /// every output. `outputs` must be sorted and within [state.t, t_end].
    pub fn integrate(
        &mut self,
        state: &SolverState,
        t_end: f64,
        dt: f64,
        outputs: &[f64],
    ) -> Result<Vec<SolverState>> {
        if dt <= 0.0 {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        for w in outputs.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidConfig("output times must be sorted".into()));
            }
        }
        if let (Some(&first), Some(&last)) = (outputs.first(), outputs.last()) {
            if first < state.t - 1e-12 || last > t_end + 1e-12 {
                return Err(Error::InvalidConfig(
                    "output times must lie within [state.t, t_end]".into(),
                ));
            }
        }

        let mut u: Vec<Vec<Complex64>> =
            state.derivs.iter().map(|f| f.spectral.clone()).collect();
        for spec in u.iter_mut() {
            Self::zero_dead_zone(&self.keep, spec);
        }

        let initial_norms: Vec<f64> = u.iter().map(|s| l2(s)).collect();
        let norm_floor = 1e-12 * initial_norms.iter().fold(0.0f64, |a, &b| a.max(b));

        let mut t = state.t;
        let mut snapshots = Vec::with_capacity(outputs.len());

        let emit = |u: &[Vec<Complex64>], t: f64, dft: &Dft| SolverState {
            derivs: u
                .iter()
                .map(|s| SpectralField::from_spectral(dft, s.clone()))
                .collect(),
            t,
            order: state.order,
            epsilon: state.epsilon,
            model: state.model,
        };

        for &t_out in outputs {
            if t_out <= t + 1e-14 {
                snapshots.push(emit(&u, t, &self.dft));
                continue;
            }
            let span = t_out - t;
            let steps = (span / dt).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                self.rk4_step(&mut u, h);
                t += h;
                for (j, spec) in u.iter().enumerate() {
                    let norm = l2(spec);
                    if !norm.is_finite()
                        || norm > BLOWUP_FACTOR * initial_norms[j].max(norm_floor)
                    {
                        return Err(Error::BlowUp {
                            t,
                            field: j,
                            ratio: norm / initial_norms[j].max(norm_floor),
                        });
                    }
                }
            }
            t = t_out;
            snapshots.push(emit(&u, t, &self.dft));
        }
        Ok(snapshots)
    }
}

fn l2(spec: &[Complex64]) -> f64 {
    spec.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}
