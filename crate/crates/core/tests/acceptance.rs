//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS/FAIL line (run with --nocapture to see them all).
//!
//! 1. dispersion roots reproduce the quoted complex carrier frequencies;
//! 2. growth-curve coefficients match the stability figures within 5% and
//!    classify toy/infrared as ill posed, ultraviolet as well posed;
//! 3. the generic coefficient formulas equal the model-specific closed
//!    forms to 1e-10 over randomized admissible parameters;
//! 4. the full pipeline keeps the envelope solution within 2 eps^2 of the
//!    reference at every output time, with the third-harmonic hump in the
//!    right place at the right height;
//! 5. structural properties: pairing closure, reality, RK4 order, exact
//!    linear limit, Newton round trip, propagator group law, zero growth
//!    at k = 0.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mmswave::harness::{self, ScenarioRun};
use mmswave::init;
use mmswave::mms::{self, Posedness};
use mmswave::modes;
use mmswave::presets::preset;
use mmswave::refsolver::{RefSolver, SolverState};
use mmswave::spectral::{Dft, Grid, SpectralField};
use mmswave::susceptibility::SusceptibilityModel;

const PI: f64 = std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn toy() -> SusceptibilityModel {
    SusceptibilityModel::toy(5.0, 20.0).unwrap()
}

fn lorentz_uv() -> SusceptibilityModel {
    SusceptibilityModel::lorentz(-1.0, -1.0, 100.0).unwrap()
}

fn lorentz_ir() -> SusceptibilityModel {
    SusceptibilityModel::lorentz(-0.25, -10.0, 1.0).unwrap()
}

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "{} criterion {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

// ---------------------------------------------------------------- 1 ----

#[test]
#[allow(clippy::approx_constant)] // 6.28/6.29 are the quoted values, not TAU
fn criterion_1_quoted_carrier_frequencies() {
    let cases = [
        ("toy", toy(), 2.0 * PI, c(6.28, -2.5e-2)),
        ("lorentz_uv", lorentz_uv(), 8.0, c(7.9, -1.99e-2)),
        ("lorentz_ir", lorentz_ir(), 2.0 * PI, c(6.29, -4.91e-2)),
    ];
    for (name, model, k0, quoted) in cases {
        let b = modes::branch_at(&model, k0).unwrap();
        let ok = (b.omega0.re - quoted.re).abs() <= 0.01
            && (b.omega0.im - quoted.im).abs() <= 0.01;
        verdict(
            "1 (dispersion roots)",
            ok,
            &format!("{name}: omega0 = {} vs quoted {}", b.omega0, quoted),
        );
    }
}

// ---------------------------------------------------------------- 2 ----

#[test]
fn criterion_2_stability_coefficients() {
    let cases = [
        ("toy", toy(), 2.0 * PI, 3.0e-6, -1.26e-5, Posedness::IllPosed),
        (
            "lorentz_uv",
            lorentz_uv(),
            8.0,
            -1.15e-2,
            -1.9e-2,
            Posedness::WellPosed,
        ),
        (
            "lorentz_ir",
            lorentz_ir(),
            2.0 * PI,
            2.83e-5,
            3.77e-4,
            Posedness::IllPosed,
        ),
    ];
    for (name, model, k0, a1, a2, class) in cases {
        let b = modes::branch_at(&model, k0).unwrap();
        let cs = mms::compute_coefficients(&model, &b).unwrap();
        let ok = (cs.a1 - a1).abs() <= 0.05 * a1.abs()
            && (cs.a2 - a2).abs() <= 0.05 * a2.abs()
            && mms::classify(&cs) == class;
        verdict(
            "2 (stability coefficients)",
            ok,
            &format!(
                "{name}: a1 = {:.4e} (want {a1:.2e}), a2 = {:.4e} (want {a2:.2e}), {:?}",
                cs.a1,
                cs.a2,
                mms::classify(&cs)
            ),
        );
    }
}

// ---------------------------------------------------------------- 3 ----

/// Generic alpha/c1/c2 (built from chi and its derivatives) against the
/// closed forms obtained by reducing the secular conditions of each model
/// directly — a fully independent algebraic route.
#[test]
fn criterion_3_closed_form_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acce97);

    // --- toy ---
    let mut accepted = 0;
    let mut worst = 0.0f64;
    while accepted < 50 {
        let gamma = rng.gen_range(0.5..10.0);
        let a = rng.gen_range(1.0..40.0);
        let k = rng.gen_range(1.0..12.0);
        let model = SusceptibilityModel::toy(gamma, a).unwrap();
        let Ok(branch) = modes::branch_at(&model, k) else {
            continue;
        };
        let Ok(cs) = mms::compute_coefficients(&model, &branch) else {
            continue;
        };
        accepted += 1;
        let (w, vg) = (branch.omega0, branch.vg);
        let q = c(gamma, 0.0) - Complex64::I * a * w;

        // alpha = (vg / 2k)(1 + gamma^2 / q^3)
        let alpha = vg / (2.0 * k) * (1.0 + gamma * gamma / (q * q * q));
        worst = worst.max((alpha - cs.alpha).norm() / cs.alpha.norm());

        // c1 = 9 w^2 (gamma - 3iaw) / (9 (k^2 - w^2)(gamma - 3iaw) - 9 w^2)
        let q3 = c(gamma, 0.0) - Complex64::I * 3.0 * a * w;
        let c1 = 9.0 * w * w * q3 / (9.0 * (k * k - w * w) * q3 - 9.0 * w * w);
        worst = worst.max((c1 - cs.c1).norm() / cs.c1.norm());

        // c2 = 3 ws^2 (gamma - i a ws) / (k^2 (gamma - i a ws) - ws^2 (gamma + 1 - i a ws))
        let ws = w + Complex64::I * 2.0 * w.im;
        let qs = c(gamma, 0.0) - Complex64::I * a * ws;
        let c2 = 3.0 * ws * ws * qs / (k * k * qs - ws * ws * (qs + 1.0));
        worst = worst.max((c2 - cs.c2).norm() / cs.c2.norm());
    }
    verdict(
        "3 (toy closed forms)",
        worst < 1e-10,
        &format!("worst relative deviation {worst:.3e} over 50 parameter sets"),
    );

    // --- lorentz ---
    let mut accepted = 0;
    let mut worst = 0.0f64;
    while accepted < 50 {
        // parameterize through plasma/resonance/loss so the admissible
        // (no-real-pole, lossy) region is sampled directly
        let wp2 = rng.gen_range(0.5..20.0);
        let loss = rng.gen_range(0.1..5.0);
        let wr2 = rng.gen_range(0.25..100.0);
        let (a, b, cc) = (-1.0 / wp2, -loss / wp2, wr2 / wp2);
        let Ok(model) = SusceptibilityModel::lorentz(a, b, cc) else {
            continue;
        };
        let k = rng.gen_range(1.0..12.0);
        let Ok(branch) = modes::branch_at(&model, k) else {
            continue;
        };
        let Ok(cs) = mms::compute_coefficients(&model, &branch) else {
            continue;
        };
        accepted += 1;
        let i = Complex64::I;
        let (w, vg) = (branch.omega0, branch.vg);
        let q = |x: Complex64| a * x * x + i * b * x + cc;

        // alpha = (vg / 2k) (-p4 / q^3) with the degree-six numerator p4
        let p4 = -a.powi(3) * w.powu(6)
            + w.powu(4) * (3.0 * a * b * b - 3.0 * a * a * cc)
            - i * 3.0 * a * a * b * w.powu(5)
            + w.powu(3) * (i * a * b - i * 6.0 * a * b * cc + i * b.powi(3))
            + w * w * (3.0 * a * cc - 3.0 * a * cc * cc + 3.0 * b * b * cc)
            - i * 3.0 * b * cc * cc * w
            - cc.powi(3)
            - cc * cc;
        let qw = q(w);
        let alpha = vg / (2.0 * k) * (-p4 / (qw * qw * qw));
        worst = worst.max((alpha - cs.alpha).norm() / cs.alpha.norm());

        // c1 = 9 w^2 q(3w) / (-p(3k, 3w)) with p the dispersion polynomial
        let p3 = modes::dispersion_poly(&model, 3.0 * k).eval(3.0 * w);
        let c1 = 9.0 * w * w * q(3.0 * w) / (-p3);
        worst = worst.max((c1 - cs.c1).norm() / cs.c1.norm());

        // c2 = 3 ws^2 q(ws) / (k^2 q(ws) - ws^2 (q(ws) + 1))
        let ws = w + i * 2.0 * w.im;
        let qs = q(ws);
        let c2 = 3.0 * ws * ws * qs / (k * k * qs - ws * ws * (qs + 1.0));
        worst = worst.max((c2 - cs.c2).norm() / cs.c2.norm());
    }
    verdict(
        "3 (lorentz closed forms)",
        worst < 1e-10,
        &format!("worst relative deviation {worst:.3e} over 50 parameter sets"),
    );
}

// ---------------------------------------------------------------- 4 ----

fn shared_run(name: &'static str, cell: &'static OnceLock<ScenarioRun>) -> &'static ScenarioRun {
    cell.get_or_init(move || {
        let config = preset(name).unwrap();
        harness::run_scenario(&config).unwrap()
    })
}

static TOY_RUN: OnceLock<ScenarioRun> = OnceLock::new();
static UV_RUN: OnceLock<ScenarioRun> = OnceLock::new();
static IR_RUN: OnceLock<ScenarioRun> = OnceLock::new();

fn toy_run() -> &'static ScenarioRun {
    shared_run("toy", &TOY_RUN)
}

fn uv_run() -> &'static ScenarioRun {
    shared_run("lorentz_uv", &UV_RUN)
}

fn ir_run() -> &'static ScenarioRun {
    shared_run("lorentz_ir", &IR_RUN)
}

fn check_pipeline(name: &str, run: &ScenarioRun) {
    let eps2 = run.report.config.epsilon * run.report.config.epsilon;
    for cmp in &run.report.comparisons {
        if cmp.t == 0.0 {
            continue;
        }
        verdict(
            "4 (pipeline accuracy)",
            cmp.rel_l2 <= 2.0 * eps2,
            &format!("{name}: rel_l2(t = {}) = {:.4e} <= {:.1e}", cmp.t, cmp.rel_l2, 2.0 * eps2),
        );
        // generous validity envelope: 2 eps^2 (1 + t eps^2)
        let envelope = 2.0 * eps2 * (1.0 + cmp.t * eps2);
        verdict(
            "4 (validity envelope)",
            cmp.rel_l2 <= envelope,
            &format!("{name}: rel_l2(t = {}) inside envelope {envelope:.3e}", cmp.t),
        );
        // third-harmonic generation stays an O(eps^2) feature of the
        // reference spectrum (measured <= 6 eps^2 across the presets)
        let third_to_carrier =
            cmp.reference_third_hump.peak_height / cmp.reference_carrier_hump.peak_height;
        verdict(
            "4 (third harmonic stays order eps^2)",
            third_to_carrier <= 10.0 * eps2,
            &format!(
                "{name}: reference 3k0/k0 peak ratio {third_to_carrier:.3e} at t = {}",
                cmp.t
            ),
        );
    }
    let last = run.report.comparisons.last().unwrap();
    let dk = run.grid.dk();
    let k3 = 3.0 * run.report.config.k0;
    verdict(
        "4 (third-harmonic hump placement)",
        (last.reference_third_hump.peak_k - k3).abs() <= 2.0 * dk,
        &format!(
            "{name}: reference hump at k = {:.4}, 3 k0 = {:.4} (2 dk = {:.4})",
            last.reference_third_hump.peak_k,
            k3,
            2.0 * dk
        ),
    );
    verdict(
        "4 (third-harmonic hump height)",
        last.third_hump_height_ratio >= 0.8 && last.third_hump_height_ratio <= 1.25,
        &format!(
            "{name}: envelope/reference hump height ratio {:.3}",
            last.third_hump_height_ratio
        ),
    );
    verdict(
        "4 (threshold gate)",
        run.report.thresholds_pass,
        &format!("{name}: report failures {:?}", run.report.failures),
    );
}

#[test]
fn criterion_4_pipeline_toy() {
    check_pipeline("toy", toy_run());
}

#[test]
fn criterion_4_pipeline_lorentz_uv() {
    check_pipeline("lorentz_uv", uv_run());
}

#[test]
fn criterion_4_pipeline_lorentz_ir() {
    check_pipeline("lorentz_ir", ir_run());
}

// ---------------------------------------------------------------- 5 ----

#[test]
fn criterion_5_pairing_closure_sweep() {
    let mut worst = 0.0f64;
    for model in [toy(), lorentz_uv(), lorentz_ir()] {
        for j in 1..=60 {
            let k = 0.5 * j as f64;
            let roots = modes::roots(&modes::dispersion_poly(&model, k)).unwrap();
            let report = modes::verify_pairing(&roots).unwrap();
            worst = worst.max(report.max_mismatch);
        }
    }
    verdict(
        "5 (conjugate pairing closure)",
        worst < 1e-9,
        &format!("worst pairing mismatch {worst:.3e} over the k-sweep"),
    );
}

#[test]
fn criterion_5_reality_of_fields() {
    for (name, run) in [("toy", toy_run()), ("lorentz_uv", uv_run()), ("lorentz_ir", ir_run())] {
        let mut worst = 0.0f64;
        for f in run.reference_fields.iter().chain(&run.envelope_fields) {
            worst = worst.max(f.relative_imag());
            worst = worst.max(f.conjugate_symmetry_error());
        }
        verdict(
            "5 (reality of evolved and reconstructed fields)",
            worst < 1e-10,
            &format!("{name}: worst imaginary residue {worst:.3e}"),
        );
    }
}

#[test]
fn criterion_5_rk4_observed_order() {
    for name in ["toy", "lorentz_uv", "lorentz_ir"] {
        let config = preset(name).unwrap();
        let grid = Grid::new(config.grid.n, config.grid.length).unwrap();
        let dft = Dft::new(grid.n());
        let branch = modes::branch_at(&config.model, config.k0).unwrap();
        let a1 = init::gaussian_spectrum(1.0, config.delta, config.k0, &grid).unwrap();
        let table = init::mode_table(&config.model, &branch, &a1, &grid).unwrap();
        let (a1, _) = init::normalize_peak(a1, &table, &grid, &dft).unwrap();
        let a1: Vec<Complex64> = a1.iter().map(|v| v * config.peak_amplitude).collect();
        let order = config.model.solver_order();
        let ics = init::reference_ics(&a1, &table, order, &grid).unwrap();
        let state =
            SolverState::from_spectra(config.model, config.epsilon, ics, &dft).unwrap();
        let mut solver = RefSolver::new(config.model, grid, config.epsilon).unwrap();
        let dt = solver.default_dt().unwrap();
        let t_end = 10.0;
        let sol: Vec<Vec<Complex64>> = [dt, dt / 2.0, dt / 4.0]
            .iter()
            .map(|&h| {
                solver.integrate(&state, t_end, h, &[t_end]).unwrap()[0].derivs[0]
                    .spectral
                    .clone()
            })
            .collect();
        let d01: f64 = sol[0]
            .iter()
            .zip(&sol[1])
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let d12: f64 = sol[1]
            .iter()
            .zip(&sol[2])
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let observed = (d01 / d12).log2();
        verdict(
            "5 (RK4 temporal order)",
            (3.7..=4.3).contains(&observed),
            &format!("{name}: observed order {observed:.3}"),
        );
    }
}

#[test]
fn criterion_5_linear_limit_exactness() {
    // eps = 0 on the toy preset grid: the evolved field at t = 50 matches
    // the exact per-mode exponential solution to rel-L2 < 1e-8.
    let config = preset("toy").unwrap();
    let grid = Grid::new(config.grid.n, config.grid.length).unwrap();
    let dft = Dft::new(grid.n());
    let branch = modes::branch_at(&config.model, config.k0).unwrap();
    let a1 = init::gaussian_spectrum(1.0, config.delta, config.k0, &grid).unwrap();
    let table = init::mode_table(&config.model, &branch, &a1, &grid).unwrap();
    let (a1, _) = init::normalize_peak(a1, &table, &grid, &dft).unwrap();
    let ics = init::reference_ics(&a1, &table, 3, &grid).unwrap();
    let state = SolverState::from_spectra(config.model, 0.0, ics, &dft).unwrap();
    let mut solver = RefSolver::new(config.model, grid, 0.0).unwrap();
    let dt = 0.75 * solver.default_dt().unwrap();
    let t = 50.0;
    let snap = &solver.integrate(&state, t, dt, &[t]).unwrap()[0];

    let exact = init::linear_field(&a1, &table, t, &grid, &dft);
    let num = snap.field();
    let diff: f64 = num
        .physical
        .iter()
        .zip(&exact.physical)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let rel = diff / exact.l2_physical();
    verdict(
        "5 (exact linear limit)",
        rel < 1e-8,
        &format!("toy eps = 0: rel_l2(t = 50) = {rel:.3e}"),
    );
}

#[test]
fn criterion_5_newton_round_trip() {
    let config = preset("toy").unwrap();
    let grid = Grid::new(config.grid.n, config.grid.length).unwrap();
    let dft = Dft::new(grid.n());
    let branch = modes::branch_at(&config.model, config.k0).unwrap();
    let coeffs = mms::compute_coefficients(&config.model, &branch).unwrap();
    let a1 = init::gaussian_spectrum(1.0, config.delta, config.k0, &grid).unwrap();
    let table = init::mode_table(&config.model, &branch, &a1, &grid).unwrap();
    let (a1, _) = init::normalize_peak(a1, &table, &grid, &dft).unwrap();
    let a1: Vec<Complex64> = a1.iter().map(|v| v * config.peak_amplitude).collect();
    let e0 = init::linear_field(&a1, &table, 0.0, &grid, &dft);

    let a0 = init::invert_for_a(&e0, &coeffs, config.epsilon, 20, 1e-12, &grid, &dft).unwrap();
    let b0 = init::initial_b(&a0, coeffs.c1, &dft);
    let sol = mms::MmsSolution::new(a0, Some(b0), coeffs, config.epsilon);
    let rec = mms::reconstruct_e(&sol, &grid, &dft);

    let mut worst = 0.0f64;
    for (x, y) in rec.physical.iter().zip(&e0.physical) {
        worst = worst.max((x - y).norm());
    }
    let rel = worst / e0.max_physical();
    verdict(
        "5 (Newton inversion round trip)",
        rel < 1e-10,
        &format!("relative max reconstruction residual {rel:.3e}"),
    );
}

#[test]
fn criterion_5_propagator_group_property() {
    let config = preset("toy").unwrap();
    let grid = Grid::new(512, config.grid.length).unwrap();
    let dft = Dft::new(512);
    let branch = modes::branch_at(&config.model, config.k0).unwrap();
    let coeffs = mms::compute_coefficients(&config.model, &branch).unwrap();
    let spectral: Vec<Complex64> = (0..512)
        .map(|i| {
            let k = grid.wavenumber(i);
            Complex64::from((-config.delta * k * k).exp())
        })
        .collect();
    let a = SpectralField::from_spectral(&dft, spectral.clone());
    let b = SpectralField::from_spectral(&dft, spectral);
    let sol = mms::MmsSolution::new(a, Some(b), coeffs, config.epsilon);

    let stepped = mms::propagate(
        &mms::propagate(&sol, 13.5, &grid, &dft).unwrap(),
        86.5,
        &grid,
        &dft,
    )
    .unwrap();
    let direct = mms::propagate(&sol, 100.0, &grid, &dft).unwrap();
    let mut worst = 0.0f64;
    for (x, y) in stepped.a.spectral.iter().zip(&direct.a.spectral) {
        worst = worst.max((x - y).norm() / y.norm().max(1e-8));
    }
    for (x, y) in stepped
        .b
        .as_ref()
        .unwrap()
        .spectral
        .iter()
        .zip(&direct.b.as_ref().unwrap().spectral)
    {
        worst = worst.max((x - y).norm() / y.norm().max(1e-8));
    }
    verdict(
        "5 (propagator group property)",
        worst < 1e-12,
        &format!("worst relative deviation {worst:.3e}"),
    );
}

#[test]
fn criterion_5_zero_mode_growth_is_zero() {
    for (model, k0) in [
        (toy(), 2.0 * PI),
        (lorentz_uv(), 8.0),
        (lorentz_ir(), 2.0 * PI),
    ] {
        let branch = modes::branch_at(&model, k0).unwrap();
        let coeffs = mms::compute_coefficients(&model, &branch).unwrap();
        let g = mms::growth_curve(&coeffs, &[0.0])[0];
        verdict(
            "5 (zero growth at k = 0)",
            g == 0.0,
            &format!("{}: Re lambda(0) = {g:.3e}", model.label()),
        );
    }
}
