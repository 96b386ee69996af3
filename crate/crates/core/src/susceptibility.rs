//! Rational electric susceptibility models and the complex refractive index.
//!
//! Two single-term rational models are supported, both written with the
//! Fourier-convention factor √(2π) kept inside the susceptibility:
//!
//! ```text
//! toy:      χ(ω) = 1 / (√(2π) (γ - i a ω))            γ > 0, a > 0
//! lorentz:  χ(ω) = 1 / (√(2π) (a ω² + i b ω + c))
//! ```
//!
//! so that the refractive index is n²(ω) = 1 + √(2π) χ(ω) in both cases.
//! Derivatives are hand-differentiated closed forms, not finite differences:
//! the envelope dispersion coefficient is sensitive to χ″ and the finite
//! difference route is reserved for cross-checks in the tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// √(2π), the Fourier-convention factor carried by both models.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Absolute guard on the denominator magnitude; evaluations closer than this
/// to a material resonance pole are refused. Far below anything reached by
/// the shipped parameter sets, so it only catches genuine pole hits.
pub const POLE_GUARD: f64 = 1e-14;

/// A single-term rational susceptibility model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SusceptibilityModel {
    /// Exponentially decaying causal kernel; denominator γ - i a ω.
    Toy { gamma: f64, a: f64 },
    /// Damped-oscillator response; denominator a ω² + i b ω + c.
    Lorentz { a: f64, b: f64, c: f64 },
}

impl SusceptibilityModel {
    /// Build a toy model, checking γ > 0 and a > 0 (decaying kernel).
    pub fn toy(gamma: f64, a: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidModel(format!(
                "toy model needs gamma > 0, got {gamma}"
            )));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidModel(format!("toy model needs a > 0, got {a}")));
        }
        Ok(SusceptibilityModel::Toy { gamma, a })
    }

    /// Build a Lorentz model, checking that a ω² + i b ω + c has no real
    /// roots, i.e. that the susceptibility has no pole on the real axis.
    pub fn lorentz(a: f64, b: f64, c: f64) -> Result<Self> {
        for v in [a, b, c] {
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "lorentz coefficients must be finite, got ({a}, {b}, {c})"
                )));
            }
        }
        let model = SusceptibilityModel::Lorentz { a, b, c };
        for root in model.denominator_roots() {
            if root.im.abs() <= 1e-12 * root.norm().max(1.0) {
                return Err(Error::InvalidModel(format!(
                    "lorentz denominator has a (near-)real root at omega = {root}; \
                     the susceptibility would have a pole on the real axis"
                )));
            }
        }
        Ok(model)
    }

    /// Roots of the denominator polynomial in ω (the resonance poles).
    pub fn denominator_roots(&self) -> Vec<Complex64> {
        let i = Complex64::I;
        match *self {
            SusceptibilityModel::Toy { gamma, a } => {
                // γ - i a ω = 0
                vec![Complex64::new(gamma, 0.0) / (i * a)]
            }
            SusceptibilityModel::Lorentz { a, b, c } => {
                let (a, b, c) = (Complex64::from(a), i * b, Complex64::from(c));
                if a.norm() < POLE_GUARD {
                    if b.norm() < POLE_GUARD {
                        return Vec::new();
                    }
                    return vec![-c / b];
                }
                let disc = (b * b - 4.0 * a * c).sqrt();
                vec![(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)]
            }
        }
    }

    /// Denominator of the susceptibility (without the √(2π) factor).
    #[inline]
    pub fn denominator(&self, omega: Complex64) -> Complex64 {
        let i = Complex64::I;
        match *self {
            SusceptibilityModel::Toy { gamma, a } => gamma - i * a * omega,
            SusceptibilityModel::Lorentz { a, b, c } => a * omega * omega + i * b * omega + c,
        }
    }

    fn guarded_denominator(&self, omega: Complex64) -> Result<Complex64> {
        let q = self.denominator(omega);
        if q.norm() <= POLE_GUARD {
            return Err(Error::NearPole {
                omega,
                denom_mag: q.norm(),
            });
        }
        Ok(q)
    }

    /// The susceptibility χ(ω).
    pub fn chi_hat(&self, omega: Complex64) -> Result<Complex64> {
        let q = self.guarded_denominator(omega)?;
        Ok(1.0 / (SQRT_2PI * q))
    }

    /// First and second ω-derivatives of χ, closed form.
    pub fn chi_derivs(&self, omega: Complex64) -> Result<(Complex64, Complex64)> {
        let i = Complex64::I;
        let q = self.guarded_denominator(omega)?;
        match *self {
            SusceptibilityModel::Toy { a, .. } => {
                // χ = q⁻¹/√(2π) with q' = -i a, q'' = 0
                let d1 = i * a / (SQRT_2PI * q * q);
                let d2 = -2.0 * a * a / (SQRT_2PI * q * q * q);
                Ok((d1, d2))
            }
            SusceptibilityModel::Lorentz { a, b, .. } => {
                let qp = 2.0 * a * omega + i * b;
                let d1 = -qp / (SQRT_2PI * q * q);
                let d2 = (2.0 * qp * qp - 2.0 * a * q) / (SQRT_2PI * q * q * q);
                Ok((d1, d2))
            }
        }
    }

    /// Complex refractive index squared, n²(ω) = 1 + √(2π) χ(ω).
    pub fn n_squared(&self, omega: Complex64) -> Result<Complex64> {
        Ok(1.0 + SQRT_2PI * self.chi_hat(omega)?)
    }

    /// Time-derivative order of the Sellmeier-transformed wave equation:
    /// 3 for the toy kernel, 4 for the Lorentz oscillator.
    pub fn solver_order(&self) -> usize {
        match self {
            SusceptibilityModel::Toy { .. } => 3,
            SusceptibilityModel::Lorentz { .. } => 4,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SusceptibilityModel::Toy { .. } => "toy",
            SusceptibilityModel::Lorentz { .. } => "lorentz",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn toy_chi_at_zero_is_real() {
        let m = SusceptibilityModel::toy(5.0, 20.0).unwrap();
        let chi = m.chi_hat(Complex64::ZERO).unwrap();
        assert!((chi.re - 1.0 / (5.0 * SQRT_2PI)).abs() < 1e-15);
        assert!(chi.im.abs() < 1e-15);
    }

    #[test]
    fn lorentz_chi_at_zero_is_real() {
        let m = SusceptibilityModel::lorentz(-1.0, -1.0, 100.0).unwrap();
        let chi = m.chi_hat(Complex64::ZERO).unwrap();
        assert!((chi.re - 1.0 / (100.0 * SQRT_2PI)).abs() < 1e-15);
        assert!(chi.im.abs() < 1e-15);
    }

    #[test]
    fn n_squared_at_zero() {
        let toy = SusceptibilityModel::toy(5.0, 20.0).unwrap();
        let n2 = toy.n_squared(Complex64::ZERO).unwrap();
        assert!((n2.re - 1.2).abs() < 1e-14, "toy n2(0) = 1 + 1/gamma, got {n2}");

        let lor = SusceptibilityModel::lorentz(-1.0, -1.0, 100.0).unwrap();
        let n2 = lor.n_squared(Complex64::ZERO).unwrap();
        assert!((n2.re - 1.01).abs() < 1e-14, "lorentz n2(0) = 1 + 1/c, got {n2}");
    }

    /// Quadrature oracle for the toy susceptibility: χ(ω) is the transform
    /// (1/√(2π)) ∫₀^∞ u e^{-v t} e^{+iωt} dt of the causal kernel with
    /// u = 1/a and v = γ/a, integrated here by Simpson's rule. The +iωt
    /// kernel is the transform convention paired with the e^{-iωt} carrier;
    /// it is what makes Im χ >= 0 on the positive real axis (a lossy,
    /// not amplifying, medium).
    #[test]
    fn toy_chi_matches_kernel_transform() {
        let (gamma, a) = (5.0, 20.0);
        let m = SusceptibilityModel::toy(gamma, a).unwrap();
        let (u, v) = (1.0 / a, gamma / a);
        let omega = 2.0 * std::f64::consts::PI;

        // Simpson over t in [0, T]; kernel has decayed to e^{-vT} ~ 4e-28.
        let t_max = 250.0;
        let n = 200_000usize;
        let h = t_max / n as f64;
        let f = |t: f64| u * (-v * t).exp() * (Complex64::I * omega * t).exp();
        let mut sum = f(0.0) + f(t_max);
        for j in 1..n {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(j as f64 * h);
        }
        let quad = sum * h / 3.0 / SQRT_2PI;

        let chi = m.chi_hat(Complex64::from(omega)).unwrap();
        assert!(
            (chi - quad).norm() < 1e-10,
            "closed form {chi} vs quadrature {quad}"
        );
    }

    /// 4th-order central finite differences of chi_hat as the oracle for the
    /// closed-form derivatives.
    fn fd_derivs(m: &SusceptibilityModel, omega: Complex64, h: f64) -> (Complex64, Complex64) {
        let f = |w: Complex64| m.chi_hat(w).unwrap();
        let (w, hh) = (omega, Complex64::from(h));
        let d1 = (-f(w + 2.0 * hh) + 8.0 * f(w + hh) - 8.0 * f(w - hh) + f(w - 2.0 * hh))
            / (12.0 * h);
        let d2 = (-f(w + 2.0 * hh) + 16.0 * f(w + hh) - 30.0 * f(w) + 16.0 * f(w - hh)
            - f(w - 2.0 * hh))
            / (12.0 * h * h);
        (d1, d2)
    }

    #[test]
    fn chi_derivs_match_finite_differences() {
        let cases = [
            (SusceptibilityModel::toy(5.0, 20.0).unwrap(), c(1.0, 0.0)),
            (
                SusceptibilityModel::lorentz(-0.25, -10.0, 1.0).unwrap(),
                c(2.0 * std::f64::consts::PI, 0.0),
            ),
        ];
        for (m, w) in cases {
            let (d1, d2) = m.chi_derivs(w).unwrap();
            let (f1, f2) = fd_derivs(&m, w, 1e-4);
            assert!(
                (d1 - f1).norm() / d1.norm() < 1e-6,
                "{m:?}: d1 {d1} vs fd {f1}"
            );
            assert!(
                (d2 - f2).norm() / d2.norm() < 1e-6,
                "{m:?}: d2 {d2} vs fd {f2}"
            );
        }
    }

    #[test]
    fn chi_derivs_match_finite_differences_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let models = [
            SusceptibilityModel::toy(5.0, 20.0).unwrap(),
            SusceptibilityModel::lorentz(-1.0, -1.0, 100.0).unwrap(),
            SusceptibilityModel::lorentz(-0.25, -10.0, 1.0).unwrap(),
        ];
        for m in models {
            let poles = m.denominator_roots();
            let mut accepted = 0;
            while accepted < 100 {
                let w = c(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
                if poles.iter().any(|p| (w - p).norm() < 0.5) {
                    continue;
                }
                accepted += 1;
                let (d1, d2) = m.chi_derivs(w).unwrap();
                // h = 1e-3 balances the h^4 truncation against the 1/h^2
                // round-off amplification in the second difference
                let (f1, f2) = fd_derivs(&m, w, 1e-3);
                assert!((d1 - f1).norm() / d1.norm().max(1e-300) < 1e-6);
                assert!((d2 - f2).norm() / d2.norm().max(1e-300) < 1e-6);
            }
        }
    }

    #[test]
    fn toy_first_derivative_decays_along_real_axis() {
        let m = SusceptibilityModel::toy(5.0, 20.0).unwrap();
        // |χ'| decreases monotonically for |ω| beyond the pole scale γ/a.
        let mut prev = f64::INFINITY;
        let mut w = 5.0 / 20.0 + 0.5;
        while w < 50.0 {
            let (d1, _) = m.chi_derivs(Complex64::from(w)).unwrap();
            assert!(d1.norm() < prev, "|chi'| not decaying at omega = {w}");
            prev = d1.norm();
            w += 0.5;
        }
    }

    #[test]
    fn hermitian_symmetry() {
        // χ(-conj ω) = conj χ(ω): consequence of a real kernel.
        let models = [
            SusceptibilityModel::toy(5.0, 20.0).unwrap(),
            SusceptibilityModel::lorentz(-1.0, -1.0, 100.0).unwrap(),
            SusceptibilityModel::lorentz(-0.25, -10.0, 1.0).unwrap(),
        ];
        for m in models {
            for &w in &[c(0.3, 0.1), c(-4.0, 2.0), c(7.0, -0.3), c(12.0, 5.0)] {
                let lhs = m.chi_hat(-w.conj()).unwrap();
                let rhs = m.chi_hat(w).unwrap().conj();
                assert!((lhs - rhs).norm() < 1e-14 * rhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn passivity_on_real_axis() {
        // Im n(ω) >= 0 for the lossy parameter sets, sampled over [0, 50].
        let models = [
            SusceptibilityModel::toy(5.0, 20.0).unwrap(),
            SusceptibilityModel::lorentz(-1.0, -1.0, 100.0).unwrap(),
            SusceptibilityModel::lorentz(-0.25, -10.0, 1.0).unwrap(),
        ];
        for m in models {
            for j in 0..=1000 {
                let w = Complex64::from(j as f64 * 0.05);
                let n = m.n_squared(w).unwrap().sqrt();
                assert!(n.im >= -1e-12, "{m:?}: Im n({w}) = {} < 0", n.im);
            }
        }
    }

    #[test]
    fn toy_resonance_feature_shape() {
        // Single resonance feature on [0, 3]: Re n decays monotonically from
        // √1.2 towards 1 (anomalous dispersion) and Im n has one interior
        // maximum at the pole scale ω = γ/a, staying nonnegative throughout.
        let m = SusceptibilityModel::toy(5.0, 20.0).unwrap();
        let n_at = |w: f64| m.n_squared(Complex64::from(w)).unwrap().sqrt();
        assert!((n_at(0.0).re - 1.2f64.sqrt()).abs() < 1e-12);
        let mut prev = n_at(0.0).re;
        for j in 1..=30 {
            let cur = n_at(j as f64 * 0.1).re;
            assert!(cur < prev, "Re n should decrease across the feature");
            prev = cur;
        }
        assert!(prev > 1.0);
        let im_mid = n_at(0.25).im;
        assert!(im_mid > n_at(0.0).im && im_mid > n_at(3.0).im);
    }

    #[test]
    fn near_pole_is_refused() {
        let m = SusceptibilityModel::toy(5.0, 20.0).unwrap();
        // pole at ω = -i γ/a = -0.25 i
        let err = m.chi_hat(c(0.0, -0.25)).unwrap_err();
        assert!(matches!(err, Error::NearPole { .. }));
    }

    #[test]
    fn lorentz_with_real_pole_is_rejected() {
        // b = 0 puts both roots of a ω² + c on the real axis when a c < 0.
        assert!(SusceptibilityModel::lorentz(-1.0, 0.0, 100.0).is_err());
        assert!(SusceptibilityModel::toy(-5.0, 20.0).is_err());
        assert!(SusceptibilityModel::toy(5.0, 0.0).is_err());
    }
}
