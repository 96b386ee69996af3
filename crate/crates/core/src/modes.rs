//! Dispersion branches of the Sellmeier-transformed wave equations.
//!
//! For a wavenumber k the mode frequencies are the complex roots ω of the
//! model's dispersion polynomial, equivalent to ω² n²(ω) = k² with the
//! rational n² cleared of denominators:
//!
//! ```text
//! toy:      p(k, ω) = a ω³ + i (γ+1) ω² - a k² ω - i γ k²            (cubic)
//! lorentz:  p(k, ω) = a ω⁴ + i b ω³ + (c+1) ω² - k² (a ω² + i b ω + c) (quartic)
//! ```
//!
//! Roots come from Durand-Kerner iteration polished by Newton steps; the
//! group velocity is the implicit-function value ω'(k) = -p_k/p_ω, and
//! branches are continued in k by Newton from the previous iterate with a
//! jump guard of half the minimum root separation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::susceptibility::SusceptibilityModel;

/// Relative residual required of every accepted root.
const ROOT_RESIDUAL: f64 = 1e-12;
/// Tolerance for the conjugate-pairing closure check.
const PAIRING_TOL: f64 = 1e-9;
/// Homotopy steps used by default when continuing a branch between carriers.
pub const DEFAULT_TRACK_STEPS: usize = 64;

/// Dense polynomial over ℂ, coefficients in ascending order of ω.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c * j as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    /// Largest coefficient magnitude; the natural scale for residual checks.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0)
    }

    /// Σ |cᵢ| |w|ⁱ — the round-off scale of evaluating the polynomial at w.
    /// A root with large magnitude cannot be polished below ~1e-16 of this.
    pub fn eval_scale(&self, w: Complex64) -> f64 {
        let mut pow = 1.0;
        let mut acc = 0.0;
        for c in &self.coeffs {
            acc += c.norm() * pow;
            pow *= w.norm();
        }
        acc.max(1.0)
    }
}

/// Dispersion polynomial p(k, ·) in ω for the given model.
pub fn dispersion_poly(model: &SusceptibilityModel, k: f64) -> Polynomial {
    let i = Complex64::I;
    let k2 = k * k;
    match *model {
        SusceptibilityModel::Toy { gamma, a } => Polynomial::new(vec![
            -i * gamma * k2,
            Complex64::from(-a * k2),
            i * (gamma + 1.0),
            Complex64::from(a),
        ]),
        SusceptibilityModel::Lorentz { a, b, c } => Polynomial::new(vec![
            Complex64::from(-c * k2),
            -i * b * k2,
            Complex64::from(c + 1.0 - a * k2),
            i * b,
            Complex64::from(a),
        ]),
    }
}

/// ∂p/∂k of the dispersion polynomial, as a polynomial in ω.
pub fn dispersion_poly_dk(model: &SusceptibilityModel, k: f64) -> Polynomial {
    let i = Complex64::I;
    match *model {
        SusceptibilityModel::Toy { gamma, a } => Polynomial::new(vec![
            -i * gamma * 2.0 * k,
            Complex64::from(-a * 2.0 * k),
        ]),
        SusceptibilityModel::Lorentz { a, b, c } => Polynomial::new(vec![
            Complex64::from(-c * 2.0 * k),
            -i * b * 2.0 * k,
            Complex64::from(-a * 2.0 * k),
        ]),
    }
}

/// All roots of `poly` by Durand-Kerner iteration, each polished with Newton
/// until |p(root)| < 1e-12 · scale. Clustered (near-multiple) roots are
/// returned as-is.
pub fn roots(poly: &Polynomial) -> Result<Vec<Complex64>> {
    let deg = poly.degree();
    let lead = poly.coeffs.last().copied().unwrap_or(Complex64::ZERO);
    if lead.norm() <= 1e-14 * poly.scale() {
        return Err(Error::DegenerateLeadingCoefficient(lead.norm()));
    }
    if deg == 0 {
        return Ok(Vec::new());
    }

    // Monic coefficients; Cauchy bound for the initial circle radius.
    let monic: Vec<Complex64> = poly.coeffs.iter().map(|&c| c / lead).collect();
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);

    // Standard (0.4 + 0.9i)^j seeds, scaled so they avoid symmetry traps.
    let seed = Complex64::new(0.4, 0.9);
    let mut ws: Vec<Complex64> = (0..deg)
        .map(|j| radius * seed.powu(j as u32 + 1))
        .collect();

    let eval_monic = |w: Complex64| {
        let mut acc = Complex64::from(1.0);
        for &c in monic[..deg].iter().rev() {
            acc = acc * w + c;
        }
        acc
    };

    // Durand-Kerner can stall on tight clusters without harm: the Newton
    // polish below decides acceptance by residual either way.
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::from(1.0);
            for j in 0..deg {
                if i != j {
                    denom *= ws[i] - ws[j];
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates: nudge apart and continue
                ws[i] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                continue;
            }
            let step = eval_monic(ws[i]) / denom;
            ws[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * radius.max(1.0) {
            break;
        }
    }

    let dp = poly.derivative();
    for w in ws.iter_mut() {
        for _ in 0..50 {
            let pv = poly.eval(*w);
            if pv.norm() < ROOT_RESIDUAL * poly.eval_scale(*w) {
                break;
            }
            let dv = dp.eval(*w);
            if dv.norm() == 0.0 {
                break;
            }
            *w -= pv / dv;
        }
    }

    for &w in &ws {
        let res = poly.eval(w).norm();
        let scale = poly.eval_scale(w);
        if res > ROOT_RESIDUAL * scale {
            return Err(Error::RootFinding(format!(
                "root {w} has residual {res:.3e} (scale {scale:.3e})"
            )));
        }
    }
    Ok(ws)
}

/// How the roots of a dispersion polynomial at real k pair up under the
/// reality map ω ↦ -ω*.
#[derive(Debug, Clone)]
pub struct PairingReport {
    /// Index pairs (i, j) with root_j ≈ -conj(root_i), i < j.
    pub pairs: Vec<(usize, usize)>,
    /// Indices of self-paired roots (purely imaginary frequencies).
    pub self_paired: Vec<usize>,
    /// Worst distance between a root and its matched partner image.
    pub max_mismatch: f64,
}

/// Check that the root multiset is closed under ω ↦ -ω* (within 1e-9,
/// relative to the root magnitude). Fails with PairingViolation when the
/// underlying kernel is not real or the root finder lost a root.
pub fn verify_pairing(roots: &[Complex64]) -> Result<PairingReport> {
    let mut used = vec![false; roots.len()];
    let mut pairs = Vec::new();
    let mut self_paired = Vec::new();
    let mut max_mismatch = 0.0f64;

    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let image = -roots[i].conj();
        let mut best: Option<(usize, f64)> = None;
        for (j, &r) in roots.iter().enumerate() {
            if used[j] && j != i {
                continue;
            }
            let d = (r - image).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.expect("nonempty root list");
        let tol = PAIRING_TOL * roots[i].norm().max(1.0);
        if d > tol {
            return Err(Error::PairingViolation { mismatch: d });
        }
        max_mismatch = max_mismatch.max(d);
        if j == i {
            self_paired.push(i);
            used[i] = true;
        } else {
            pairs.push((i.min(j), i.max(j)));
            used[i] = true;
            used[j] = true;
        }
    }
    Ok(PairingReport {
        pairs,
        self_paired,
        max_mismatch,
    })
}

/// Pick the forward-propagating physical branch: the root with Re ω > 0
/// closest to k / Re n(k), the phase estimate from the refractive index at
/// real frequency k. Ties break towards the weaker-damped root.
pub fn select_branch(model: &SusceptibilityModel, roots: &[Complex64], k: f64) -> Result<Complex64> {
    let n_re = model
        .n_squared(Complex64::from(k))?
        .sqrt()
        .re
        .max(1e-6);
    let target = k / n_re;
    let mut best: Option<Complex64> = None;
    for &w in roots {
        if w.re <= 0.0 {
            continue;
        }
        best = Some(match best {
            None => w,
            Some(b) => {
                let (dw, db) = ((w.re - target).abs(), (b.re - target).abs());
                if dw < db || (dw == db && w.im.abs() < b.im.abs()) {
                    w
                } else {
                    b
                }
            }
        });
    }
    best.ok_or(Error::NoForwardBranch { k })
}

/// Group velocity ω'(k) = -(∂p/∂k) / (∂p/∂ω) at a point on the dispersion
/// relation, by the implicit function theorem.
pub fn group_velocity(model: &SusceptibilityModel, k: f64, omega: Complex64) -> Result<Complex64> {
    let p = dispersion_poly(model, k);
    let res = p.eval(omega).norm();
    if res > 1e-9 * p.scale() {
        return Err(Error::RootFinding(format!(
            "({k}, {omega}) is not on the dispersion relation: residual {res:.3e}"
        )));
    }
    let dpdw = p.derivative().eval(omega);
    if dpdw.norm() < 1e-12 * p.scale() {
        return Err(Error::BranchPoint { k });
    }
    let dpdk = dispersion_poly_dk(model, k).eval(omega);
    Ok(-dpdk / dpdw)
}

/// Continue the root `omega_from` of p(k_from, ·) to k_to along the same
/// analytic branch, stepping k in `steps` increments with Newton refinement
/// from the previous iterate. Guards against branch jumps by requiring each
/// move to stay within half the minimum root separation.
pub fn track_branch(
    model: &SusceptibilityModel,
    k_from: f64,
    omega_from: Complex64,
    k_to: f64,
    steps: usize,
) -> Result<Complex64> {
    if steps == 0 {
        if (k_to - k_from).abs() > 1e-12 * k_from.abs().max(1.0) {
            return Err(Error::RootFinding(
                "track_branch with 0 steps requires k_to == k_from".into(),
            ));
        }
        return Ok(omega_from);
    }

    let mut w = omega_from;
    for s in 1..=steps {
        let k = k_from + (k_to - k_from) * s as f64 / steps as f64;
        let all = roots(&dispersion_poly(model, k))?;

        let mut min_sep = f64::INFINITY;
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                min_sep = min_sep.min((all[i] - all[j]).norm());
            }
        }

        let (mut nearest, mut dist) = (w, f64::INFINITY);
        for &r in &all {
            let d = (r - w).norm();
            if d < dist {
                nearest = r;
                dist = d;
            }
        }
        if dist > 0.5 * min_sep {
            return Err(Error::BranchJump {
                k,
                jump: dist,
                limit: 0.5 * min_sep,
            });
        }
        w = nearest;
    }
    Ok(w)
}

/// A selected dispersion branch with everything the envelope machinery
/// needs: the carrier root, its group velocity, and the free-mode root at
/// the third harmonic 3 k₀.
#[derive(Debug, Clone, Copy)]
pub struct DispersionBranch {
    pub k0: f64,
    pub omega0: Complex64,
    pub vg: Complex64,
    /// Free-mode frequency at 3 k₀: the dispersion root nearest the driven
    /// frequency 3 ω₀. This is the mode the third-harmonic envelope rides.
    pub omega_3k: Complex64,
    pub vg_3k: Complex64,
    /// Im ω₀, the temporal decay rate of the carrier mode.
    pub omega_i: f64,
}

/// The root of p(3 k₀, ·) closest to the third-harmonic driving frequency
/// 3 ω₀. Analytic continuation of the carrier branch is NOT the right
/// choice here: near a material resonance the continued branch saturates
/// at the (heavily damped) pole frequency, while the free wave that beats
/// against the driven c₁A³ response is the weakly damped root adjacent to
/// 3 ω₀ on the other side of the avoided crossing.
pub fn third_harmonic_root(
    model: &SusceptibilityModel,
    k0: f64,
    omega0: Complex64,
) -> Result<Complex64> {
    let all = roots(&dispersion_poly(model, 3.0 * k0))?;
    all.into_iter()
        .min_by(|x, y| {
            (x - 3.0 * omega0)
                .norm()
                .partial_cmp(&(y - 3.0 * omega0).norm())
                .unwrap()
        })
        .ok_or(Error::NoForwardBranch { k: 3.0 * k0 })
}

/// Resolve the physical branch at k₀: roots, pairing check, selection,
/// group velocity, and the third-harmonic free mode.
pub fn branch_at(model: &SusceptibilityModel, k0: f64) -> Result<DispersionBranch> {
    let all = roots(&dispersion_poly(model, k0))?;
    verify_pairing(&all)?;
    let omega0 = select_branch(model, &all, k0)?;
    let vg = group_velocity(model, k0, omega0)?;
    let omega_3k = third_harmonic_root(model, k0, omega0)?;
    let vg_3k = group_velocity(model, 3.0 * k0, omega_3k)?;
    Ok(DispersionBranch {
        k0,
        omega0,
        vg,
        omega_3k,
        vg_3k,
        omega_i: omega0.im,
    })
}
