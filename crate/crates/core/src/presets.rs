//! The three shipped validation scenarios.
//!
//! Model parameters, carriers, and the nonlinearity strength follow the
//! three standard test cases (toy kernel at k0 = 2π, Lorentz oscillator
//! with an ultraviolet and an infrared resonance). Domains are chosen so
//! the carrier sits exactly on the grid; n = 4096 leaves ample dealiased
//! headroom past the third harmonic.

use std::f64::consts::PI;

use crate::harness::{GridConfig, ScenarioConfig, SolverConfig, ValidationConfig};
use crate::susceptibility::SusceptibilityModel;

fn base(name: &str, model: SusceptibilityModel, k0: f64, length: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        model,
        epsilon: 0.1,
        k0,
        delta: 10.0,
        peak_amplitude: 0.4,
        grid: GridConfig { n: 4096, length },
        times: vec![0.0, 25.0, 50.0, 75.0, 100.0],
        solver: SolverConfig::default(),
        include_b: true,
        validation: ValidationConfig::default(),
    }
}

/// Look up a preset by name: `toy`, `lorentz_uv`, or `lorentz_ir`.
///
/// Peak amplitudes sit well below one. The envelope correction carries the
/// factor ε² c2 |A|², and for weakly damped carriers |c2| grows like
/// (3/4) Re ω₀ / |Im ω₀| (≈ 190 toy, ≈ 100 infrared, ≈ 300 ultraviolet);
/// a unit-peak field at ε = 0.1 therefore breaks the ordering outright —
/// the ultraviolet case even drives a harmonic cascade that blows up the
/// reference integration near t ≈ 9. The shipped peaks keep
/// ε² |c2| |A|² at the few-percent level, inside the validated window.
/// The ultraviolet scenario also narrows its spectrum (delta = 20): its
/// branch has the strongest cubic dispersion, which the quadratic envelope
/// equation cannot represent, and the narrower band keeps that truncation
/// error under the acceptance ceiling.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    match name {
        "toy" => Some(base(
            "toy",
            SusceptibilityModel::Toy { gamma: 5.0, a: 20.0 },
            2.0 * PI,
            50.0,
        )),
        "lorentz_uv" => {
            let mut c = base(
                "lorentz_uv",
                SusceptibilityModel::Lorentz {
                    a: -1.0,
                    b: -1.0,
                    c: 100.0,
                },
                8.0,
                8.0 * PI,
            );
            c.peak_amplitude = 0.25;
            c.delta = 20.0;
            Some(c)
        }
        "lorentz_ir" => Some(base(
            "lorentz_ir",
            SusceptibilityModel::Lorentz {
                a: -0.25,
                b: -10.0,
                c: 1.0,
            },
            2.0 * PI,
            50.0,
        )),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 3] = ["toy", "lorentz_uv", "lorentz_ir"];
