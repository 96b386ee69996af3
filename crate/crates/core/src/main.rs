use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mmswave::harness::{self, fmt_float, ScenarioConfig};
use mmswave::mms;
use mmswave::modes;
use mmswave::presets;
use mmswave::susceptibility::SusceptibilityModel;
use mmswave::{Error, Result};

#[derive(Parser)]
#[command(
    name = "mmswave",
    about = "Envelope (multiple-scales) solutions for dispersive Kerr wave equations, \
             validated against a pseudospectral reference solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Dispersion model: toy | lorentz
    #[arg(long)]
    model: Option<String>,
    /// Model parameters, comma separated: toy = gamma,a  lorentz = a,b,c
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// Use a named preset (toy | lorentz_uv | lorentz_ir) instead
    #[arg(long)]
    preset: Option<String>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<(SusceptibilityModel, Option<ScenarioConfig>)> {
        if let Some(name) = &self.preset {
            let config = presets::preset(name).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown preset {name}; available: {}",
                    presets::PRESET_NAMES.join(", ")
                ))
            })?;
            return Ok((config.model, Some(config)));
        }
        let model = self
            .model
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("--model or --preset is required".into()))?;
        let params: Vec<f64> = self
            .params
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("--params is required with --model".into()))?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidConfig(format!("bad parameter {s:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let model = match (model, params.as_slice()) {
            ("toy", [gamma, a]) => SusceptibilityModel::toy(*gamma, *a)?,
            ("lorentz", [a, b, c]) => SusceptibilityModel::lorentz(*a, *b, *c)?,
            ("toy", p) => {
                return Err(Error::InvalidConfig(format!(
                    "toy model takes 2 parameters (gamma,a), got {}",
                    p.len()
                )))
            }
            ("lorentz", p) => {
                return Err(Error::InvalidConfig(format!(
                    "lorentz model takes 3 parameters (a,b,c), got {}",
                    p.len()
                )))
            }
            (other, _) => {
                return Err(Error::InvalidConfig(format!(
                    "unknown model {other}; expected toy or lorentz"
                )))
            }
        };
        Ok((model, None))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print all dispersion roots at a wavenumber, the conjugate-pairing
    /// report, and the selected forward branch, as JSON lines
    Roots {
        #[command(flatten)]
        model: ModelArgs,
        /// Wavenumber k
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
    },
    /// Print the envelope-equation coefficients for a carrier as JSON
    Coeffs {
        #[command(flatten)]
        model: ModelArgs,
        /// Carrier wavenumber k0 (defaults to the preset's)
        #[arg(long)]
        k0: Option<f64>,
    },
    /// Emit the growth curve Re lambda(k) as CSV: k, re_lambda, classification
    Stability {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        kmin: f64,
        #[arg(long, allow_hyphen_values = true)]
        kmax: f64,
        /// Number of sample points
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// Run a full reference-vs-envelope validation scenario
    Simulate {
        /// Preset name: toy | lorentz_uv | lorentz_ir
        #[arg(long)]
        preset: Option<String>,
        /// Scenario configuration file (JSON or TOML); overrides --preset
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for report.json and CSV exports
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the reference time step
        #[arg(long)]
        dt: Option<f64>,
        /// Override the nonlinearity parameter
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Compare exported field CSVs from two directories (reference first)
    Compare {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        mms: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Roots { model, k } => {
            let (model, _) = model.resolve()?;
            let poly = modes::dispersion_poly(&model, k);
            let roots = modes::roots(&poly)?;
            for r in &roots {
                println!(
                    "{}",
                    serde_json::json!({"type": "root", "re": r.re, "im": r.im})
                );
            }
            let pairing = modes::verify_pairing(&roots)?;
            println!(
                "{}",
                serde_json::json!({
                    "type": "pairing",
                    "pairs": pairing.pairs,
                    "self_paired": pairing.self_paired,
                    "max_mismatch": pairing.max_mismatch,
                })
            );
            let selected = modes::select_branch(&model, &roots, k)?;
            let vg = modes::group_velocity(&model, k, selected)?;
            println!(
                "{}",
                serde_json::json!({
                    "type": "branch",
                    "omega": {"re": selected.re, "im": selected.im},
                    "vg": {"re": vg.re, "im": vg.im},
                })
            );
            Ok(true)
        }
        Command::Coeffs { model, k0 } => {
            let (model, config) = model.resolve()?;
            let k0 = k0
                .or(config.as_ref().map(|c| c.k0))
                .ok_or_else(|| Error::InvalidConfig("--k0 is required without --preset".into()))?;
            let coeffs = coefficients_at(&model, k0)?;
            let echo = harness::CoefficientsEcho::from(&coeffs);
            println!("{}", serde_json::to_string_pretty(&echo)?);
            Ok(true)
        }
        Command::Stability {
            model,
            k0,
            kmin,
            kmax,
            n,
        } => {
            let (model, config) = model.resolve()?;
            let k0 = k0
                .or(config.as_ref().map(|c| c.k0))
                .ok_or_else(|| Error::InvalidConfig("--k0 is required without --preset".into()))?;
            if n < 2 || kmax <= kmin || kmax.is_nan() || kmin.is_nan() {
                return Err(Error::InvalidConfig(
                    "need kmax > kmin and at least 2 points".into(),
                ));
            }
            let coeffs = coefficients_at(&model, k0)?;
            let class = match mms::classify(&coeffs) {
                mms::Posedness::WellPosed => "well_posed",
                mms::Posedness::IllPosed => "ill_posed",
                mms::Posedness::Marginal => "marginal",
            };
            println!("k,re_lambda,classification");
            for j in 0..n {
                let k = kmin + (kmax - kmin) * j as f64 / (n - 1) as f64;
                let g = coeffs.a1 * k * k + coeffs.a2 * k;
                println!("{},{},{}", fmt_float(k), fmt_float(g), class);
            }
            Ok(true)
        }
        Command::Simulate {
            preset,
            config,
            out,
            dt,
            epsilon,
        } => {
            let mut scenario = match (&config, &preset) {
                (Some(path), _) => ScenarioConfig::load(path)?,
                (None, Some(name)) => presets::preset(name).ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "unknown preset {name}; available: {}",
                        presets::PRESET_NAMES.join(", ")
                    ))
                })?,
                (None, None) => {
                    return Err(Error::InvalidConfig(
                        "simulate needs --preset or --config".into(),
                    ))
                }
            };
            if let Some(dt) = dt {
                scenario.solver.dt = Some(dt);
            }
            if let Some(eps) = epsilon {
                scenario.epsilon = eps;
            }
            let run = harness::run_scenario(&scenario)?;
            if let Some(dir) = out {
                harness::export_report(&run, &dir)?;
                eprintln!("report written to {}", dir.display());
            } else {
                println!("{}", serde_json::to_string_pretty(&run.report)?);
            }
            for c in &run.report.comparisons {
                eprintln!(
                    "t = {:>6}: rel_l2 = {:.4e}  rel_max = {:.4e}  hump ratio = {:.3}",
                    c.t, c.rel_l2, c.rel_max, c.third_hump_height_ratio
                );
            }
            if !run.report.thresholds_pass {
                for f in &run.report.failures {
                    eprintln!("FAIL: {f}");
                }
            }
            Ok(run.report.thresholds_pass)
        }
        Command::Compare { reference, mms } => {
            let mut entries: Vec<_> = std::fs::read_dir(&reference)?
                .filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .filter(|n| n.ends_with(".csv") && !n.ends_with("_spectrum.csv"))
                .collect();
            entries.sort();
            if entries.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "no field CSVs found in {}",
                    reference.display()
                )));
            }
            for name in entries {
                let ref_field = read_field_csv(&reference.join(&name))?;
                let mms_path = mms.join(&name);
                if !mms_path.exists() {
                    eprintln!("skipping {name}: missing on the mms side");
                    continue;
                }
                let mms_field = read_field_csv(&mms_path)?;
                if ref_field.len() != mms_field.len() {
                    return Err(Error::InvalidConfig(format!(
                        "{name}: grid sizes differ ({} vs {})",
                        ref_field.len(),
                        mms_field.len()
                    )));
                }
                let (rel_l2, rel_max) = compare_vecs(&mms_field, &ref_field)?;
                println!(
                    "{}",
                    serde_json::json!({"file": name, "rel_l2": rel_l2, "rel_max": rel_max})
                );
            }
            Ok(true)
        }
    }
}

fn coefficients_at(model: &SusceptibilityModel, k0: f64) -> Result<mms::MmsCoefficients> {
    let branch = modes::branch_at(model, k0)?;
    mms::compute_coefficients(model, &branch)
}

fn read_field_csv(path: &std::path::Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        let mut cols = line.split(',');
        let (_z, e) = (cols.next(), cols.next());
        let e = e.ok_or_else(|| {
            Error::InvalidConfig(format!("{}: line {} has no E column", path.display(), i + 1))
        })?;
        values.push(e.trim().parse::<f64>().map_err(|err| {
            Error::InvalidConfig(format!("{}: line {}: {err}", path.display(), i + 1))
        })?);
    }
    Ok(values)
}

fn compare_vecs(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let max_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm_b < 1e-300 {
        return Err(Error::ZeroReference);
    }
    let diff2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let diff_max = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok((diff2.sqrt() / norm_b, diff_max / max_b))
}
