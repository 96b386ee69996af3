//! Scenario orchestration: load a configuration, run the envelope pipeline
//! and the reference solver on identical initial data, compare them, and
//! emit machine-readable reports.
//!
//! The pipeline is deterministic given the configuration:
//!
//! ```text
//! resolve branch -> envelope coefficients -> Gaussian mode spectrum
//!   -> reference initial conditions -> invert for A(.,0) -> B = -c1 A^3
//!   -> integrate reference / exponentiate envelopes to every output time
//!   -> reconstruct, compare, report
//! ```

use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::init;
use crate::mms::{self, MmsCoefficients, MmsSolution, Posedness};
use crate::modes;
use crate::refsolver::{RefSolver, SolverState};
use crate::spectral::{Dft, Grid, SpectralField};
use crate::susceptibility::SusceptibilityModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Time step; None picks the stability-bounded default.
    pub dt: Option<f64>,
    /// Newton tolerance for the envelope inversion.
    pub tol: f64,
    pub max_newton_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: None,
            tol: 1e-12,
            max_newton_iter: 20,
        }
    }
}

/// Thresholds the `simulate` exit code is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationConfig {
    /// Relative L2 ceiling at every positive output time.
    pub rel_l2_max: f64,
    /// Acceptable reference/envelope ratio of third-harmonic hump heights
    /// at the final time.
    pub hump_ratio_min: f64,
    pub hump_ratio_max: f64,
    /// Peak location tolerance around 3 k0, in units of dk.
    pub hump_center_tol_dk: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            rel_l2_max: 0.02,
            hump_ratio_min: 0.8,
            hump_ratio_max: 1.25,
            hump_center_tol_dk: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: SusceptibilityModel,
    pub epsilon: f64,
    pub k0: f64,
    /// Width parameter of the Gaussian mode spectrum e^{-delta (k-k0)^2}.
    pub delta: f64,
    /// Target peak |E(., 0)|; the spectral amplitude D is rescaled to hit it.
    pub peak_amplitude: f64,
    pub grid: GridConfig,
    /// Output times, sorted ascending.
    pub times: Vec<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Include the free third-harmonic envelope B (the faithful-Gaussian
    /// initial condition). Disabling reproduces the contaminated state.
    #[serde(default = "default_true")]
    pub include_b: bool,
    #[serde(default)]
    pub validation: ValidationConfig,
}

fn default_true() -> bool {
    true
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must lie in [0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.k0 > 0.0) {
            return Err(Error::InvalidConfig(format!("k0 must be positive, got {}", self.k0)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.peak_amplitude > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "peak_amplitude must be positive, got {}",
                self.peak_amplitude
            )));
        }
        let grid = Grid::new(self.grid.n, self.grid.length)?;
        grid.carrier_index(self.k0)?;
        grid.check_harmonic_headroom(self.k0)?;
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig("times must be sorted ascending".into()));
        }
        if self.times.iter().any(|&t| t < 0.0) {
            return Err(Error::InvalidConfig("times must be nonnegative".into()));
        }
        Ok(())
    }

    /// Load from a JSON or TOML file, by extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let config: ScenarioConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?,
            _ => serde_json::from_str(&text)?,
        };
        config.validate()?;
        Ok(config)
    }
}

/// (re, im) pair for JSON-friendly complex values.
pub type ComplexPair = (f64, f64);

fn pair(z: Complex64) -> ComplexPair {
    (z.re, z.im)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientsEcho {
    pub omega0: ComplexPair,
    pub vg: ComplexPair,
    pub omega_3k: ComplexPair,
    pub vg_3k: ComplexPair,
    pub alpha: ComplexPair,
    pub beta: ComplexPair,
    pub c1: ComplexPair,
    pub c2: ComplexPair,
    pub d2: ComplexPair,
    pub a1: f64,
    pub a2: f64,
    pub posedness: Posedness,
}

impl From<&MmsCoefficients> for CoefficientsEcho {
    fn from(c: &MmsCoefficients) -> Self {
        CoefficientsEcho {
            omega0: pair(c.branch.omega0),
            vg: pair(c.branch.vg),
            omega_3k: pair(c.branch.omega_3k),
            vg_3k: pair(c.branch.vg_3k),
            alpha: pair(c.alpha),
            beta: pair(c.beta),
            c1: pair(c.c1),
            c2: pair(c.c2),
            d2: pair(c.d2),
            a1: c.a1,
            a2: c.a2,
            posedness: mms::classify(c),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HumpMetrics {
    pub peak_k: f64,
    pub peak_height: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeComparison {
    pub t: f64,
    pub rel_l2: f64,
    pub rel_max: f64,
    pub reference_carrier_hump: HumpMetrics,
    pub reference_third_hump: HumpMetrics,
    pub envelope_carrier_hump: HumpMetrics,
    pub envelope_third_hump: HumpMetrics,
    /// Reference / envelope third-harmonic height ratio (envelope/reference).
    pub third_hump_height_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub config: ScenarioConfig,
    pub coefficients: CoefficientsEcho,
    pub spectral_amplitude_d: f64,
    pub dt_used: f64,
    pub comparisons: Vec<TimeComparison>,
    pub thresholds_pass: bool,
    pub failures: Vec<String>,
    pub wall_seconds: WallClock,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WallClock {
    pub reference: f64,
    pub envelope: f64,
    pub total: f64,
}

/// Relative L2 and max-norm distance of two fields; `b` is the reference.
pub fn compare_fields(a: &SpectralField, b: &SpectralField) -> Result<(f64, f64)> {
    let norm_b = b.l2_physical();
    let max_b = b.max_physical();
    if norm_b < 1e-300 || max_b < 1e-300 {
        return Err(Error::ZeroReference);
    }
    let mut diff2 = 0.0;
    let mut diff_max = 0.0f64;
    for (x, y) in a.physical.iter().zip(&b.physical) {
        let d = (x - y).norm();
        diff2 += d * d;
        diff_max = diff_max.max(d);
    }
    Ok((diff2.sqrt() / norm_b, diff_max / max_b))
}

/// Peak location, peak height, and |.|^2 mass of a spectrum restricted to
/// |k - center| < window.
pub fn hump_metrics(
    spectrum: &[Complex64],
    grid: &Grid,
    center: f64,
    window: f64,
) -> Result<HumpMetrics> {
    if !(window > 0.0) {
        return Err(Error::EmptyWindow);
    }
    let mut best: Option<(f64, f64)> = None;
    let mut mass = 0.0;
    for (i, v) in spectrum.iter().enumerate() {
        let k = grid.wavenumber(i);
        if (k - center).abs() < window {
            let h = v.norm();
            mass += h * h;
            if best.is_none_or(|(_, bh)| h > bh) {
                best = Some((k, h));
            }
        }
    }
    let (peak_k, peak_height) = best.ok_or(Error::EmptyWindow)?;
    Ok(HumpMetrics {
        peak_k,
        peak_height,
        mass,
    })
}

/// Everything run_scenario produces besides the report, for callers that
/// want the fields themselves (exports, further analysis).
pub struct ScenarioRun {
    pub report: ValidationReport,
    pub grid: Grid,
    pub reference_fields: Vec<SpectralField>,
    pub envelope_fields: Vec<SpectralField>,
    pub growth_curve: Vec<(f64, f64)>,
}

/// Run the full comparison pipeline for one scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun> {
    let t_total = Instant::now();
    config.validate().stage("config")?;

    let grid = Grid::new(config.grid.n, config.grid.length).stage("grid")?;
    let dft = Dft::new(grid.n());

    let branch = modes::branch_at(&config.model, config.k0).stage("branch")?;
    let coeffs = mms::compute_coefficients(&config.model, &branch).stage("coefficients")?;

    // Gaussian spectrum, branch table, peak normalization
    let a1 = init::gaussian_spectrum(1.0, config.delta, config.k0, &grid).stage("spectrum")?;
    let table = init::mode_table(&config.model, &branch, &a1, &grid).stage("mode table")?;
    let (a1, scale) = init::normalize_peak(a1, &table, &grid, &dft).stage("normalize")?;
    let d_amp = scale * config.peak_amplitude;
    let a1: Vec<Complex64> = a1.iter().map(|v| v * config.peak_amplitude).collect();

    // reference initial data
    let order = config.model.solver_order();
    let ics = init::reference_ics(&a1, &table, order, &grid).stage("reference ics")?;
    let e0 = SpectralField::from_spectral(&dft, ics[0].clone());

    // envelope initial data
    let a0 = init::invert_for_a(
        &e0,
        &coeffs,
        config.epsilon,
        config.solver.max_newton_iter,
        config.solver.tol,
        &grid,
        &dft,
    )
    .stage("newton inversion")?;
    let b0 = config
        .include_b
        .then(|| init::initial_b(&a0, coeffs.c1, &dft));
    let sol0 = MmsSolution::new(a0, b0, coeffs, config.epsilon);

    // reference integration
    let t_ref = Instant::now();
    let mut solver =
        RefSolver::new(config.model, grid, config.epsilon).stage("reference solver")?;
    let dt = match config.solver.dt {
        Some(dt) => dt,
        None => solver.default_dt().stage("time step")?,
    };
    let state = SolverState::from_spectra(config.model, config.epsilon, ics, &dft)
        .stage("reference state")?;
    let t_end = config.times.last().copied().unwrap_or(0.0);
    let snapshots = solver
        .integrate(&state, t_end, dt, &config.times)
        .stage("reference integration")?;
    let reference_seconds = t_ref.elapsed().as_secs_f64();

    // envelope propagation + comparison
    let t_env = Instant::now();
    let hump_window = 10.0 / config.delta.sqrt();
    let mut comparisons = Vec::new();
    let mut reference_fields = Vec::new();
    let mut envelope_fields = Vec::new();
    for (snap, &t) in snapshots.iter().zip(&config.times) {
        let advanced = mms::propagate(&sol0, t, &grid, &dft).stage("envelope propagation")?;
        let e_mms = mms::reconstruct_e(&advanced, &grid, &dft);
        let e_ref = snap.field().clone();

        let (rel_l2, rel_max) = compare_fields(&e_mms, &e_ref).stage("comparison")?;
        let ref_k0 = hump_metrics(&e_ref.spectral, &grid, config.k0, hump_window).stage("humps")?;
        let ref_3k = hump_metrics(&e_ref.spectral, &grid, 3.0 * config.k0, hump_window)
            .stage("humps")?;
        let mms_k0 =
            hump_metrics(&e_mms.spectral, &grid, config.k0, hump_window).stage("humps")?;
        let mms_3k = hump_metrics(&e_mms.spectral, &grid, 3.0 * config.k0, hump_window)
            .stage("humps")?;
        let ratio = if ref_3k.peak_height > 0.0 {
            mms_3k.peak_height / ref_3k.peak_height
        } else {
            f64::NAN
        };
        comparisons.push(TimeComparison {
            t,
            rel_l2,
            rel_max,
            reference_carrier_hump: ref_k0,
            reference_third_hump: ref_3k,
            envelope_carrier_hump: mms_k0,
            envelope_third_hump: mms_3k,
            third_hump_height_ratio: ratio,
        });
        reference_fields.push(e_ref);
        envelope_fields.push(e_mms);
    }
    let envelope_seconds = t_env.elapsed().as_secs_f64();

    // growth curve over the envelope band actually represented on the grid
    let k_max = grid.nyquist();
    let growth_curve: Vec<(f64, f64)> = (0..=400)
        .map(|j| {
            let k = -k_max + 2.0 * k_max * j as f64 / 400.0;
            (k, coeffs.a1 * k * k + coeffs.a2 * k)
        })
        .collect();

    // threshold judgment
    let v = &config.validation;
    let mut failures = Vec::new();
    for c in &comparisons {
        if c.t > 0.0 && c.rel_l2 > v.rel_l2_max {
            failures.push(format!(
                "rel_l2 at t = {} is {:.4e}, above {:.4e}",
                c.t, c.rel_l2, v.rel_l2_max
            ));
        }
    }
    // third-harmonic gates only make sense when the nonlinearity is on
    let last_nonzero = if config.epsilon > 0.0 {
        comparisons.iter().rev().find(|c| c.t > 0.0)
    } else {
        None
    };
    if let Some(last) = last_nonzero {
        let dk = grid.dk();
        if (last.reference_third_hump.peak_k - 3.0 * config.k0).abs()
            > v.hump_center_tol_dk * dk
        {
            failures.push(format!(
                "reference third-harmonic hump peaks at k = {:.4} (3 k0 = {:.4})",
                last.reference_third_hump.peak_k,
                3.0 * config.k0
            ));
        }
        if !(last.third_hump_height_ratio >= v.hump_ratio_min
            && last.third_hump_height_ratio <= v.hump_ratio_max)
        {
            failures.push(format!(
                "third-harmonic height ratio at t = {} is {:.3}, outside [{}, {}]",
                last.t, last.third_hump_height_ratio, v.hump_ratio_min, v.hump_ratio_max
            ));
        }
    }

    let report = ValidationReport {
        config: config.clone(),
        coefficients: CoefficientsEcho::from(&coeffs),
        spectral_amplitude_d: d_amp,
        dt_used: dt,
        comparisons,
        thresholds_pass: failures.is_empty(),
        failures,
        wall_seconds: WallClock {
            reference: reference_seconds,
            envelope: envelope_seconds,
            total: t_total.elapsed().as_secs_f64(),
        },
    };

    Ok(ScenarioRun {
        report,
        grid,
        reference_fields,
        envelope_fields,
        growth_curve,
    })
}

/// Format a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn time_tag(t: f64) -> String {
    if t == t.trunc() && t.abs() < 1e15 {
        format!("{}", t as i64)
    } else {
        format!("{t}")
    }
}

/// Write report.json, per-time field and spectrum CSVs (under ref/ and
/// mms/), and growth_curve.csv into `dir`.
pub fn export_report(run: &ScenarioRun, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let report_json = serde_json::to_string_pretty(&run.report)?;
    fs::write(dir.join("report.json"), report_json)?;

    let mut growth = String::from("k,re_lambda,classification\n");
    let class = match run.report.coefficients.posedness {
        Posedness::WellPosed => "well_posed",
        Posedness::IllPosed => "ill_posed",
        Posedness::Marginal => "marginal",
    };
    for &(k, g) in &run.growth_curve {
        growth.push_str(&format!("{},{},{}\n", fmt_float(k), fmt_float(g), class));
    }
    fs::write(dir.join("growth_curve.csv"), growth)?;

    let name = &run.report.config.name;
    for (sub, fields) in [
        ("ref", &run.reference_fields),
        ("mms", &run.envelope_fields),
    ] {
        let subdir = dir.join(sub);
        fs::create_dir_all(&subdir)?;
        for (field, c) in fields.iter().zip(&run.report.comparisons) {
            let tag = time_tag(c.t);
            let mut csv = String::from("z,E\n");
            for (j, v) in field.physical.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{}\n",
                    fmt_float(run.grid.z(j)),
                    fmt_float(v.re)
                ));
            }
            fs::write(subdir.join(format!("{name}_{tag}.csv")), csv)?;

            let mut csv = String::from("k,abs_E_hat\n");
            for (i, v) in field.spectral.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{}\n",
                    fmt_float(run.grid.wavenumber(i)),
                    fmt_float(v.norm())
                ));
            }
            fs::write(subdir.join(format!("{name}_{tag}_spectrum.csv")), csv)?;
        }
    }
    Ok(())
}
