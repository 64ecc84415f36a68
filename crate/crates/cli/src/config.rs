//! Command-line surface: flag definitions, value parsing, and the resolved
//! configuration echoed into every report.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coulomb_s3::{EnergyContext, ENERGY_UNIT_EV};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "coulomb-s3",
    version,
    about = "Momentum-space Coulomb toolkit: spectra, kernels, and classical checks",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound-state energies for one or more curvature coefficients
    Spectrum(SpectrumArgs),
    /// Locate bound-state poles of the fixed-energy amplitude by scanning
    Poles(PolesArgs),
    /// Fixed-energy amplitude at chosen separation angles
    Amplitude(AmplitudeArgs),
    /// One-slice transfer-operator modes and their composition
    Kernel(KernelArgs),
    /// Compare curvature-term candidates against the physical spectrum
    Rterm(RtermArgs),
    /// Minimize the momentum-space phase between two momenta
    Eikonal(EikonalArgs),
    /// Simulate a bound orbit and its momentum-space circle
    Orbit(OrbitArgs),
    /// Orthonormality and addition-theorem diagnostics for the harmonics
    HarmonicsCheck(HarmonicsCheckArgs),
    /// Run the whole invariant suite at desk scale
    VerifyAll(VerifyAllArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Spectrum(a) => &a.common,
            Command::Poles(a) => &a.common,
            Command::Amplitude(a) => &a.common,
            Command::Kernel(a) => &a.common,
            Command::Rterm(a) => &a.common,
            Command::Eikonal(a) => &a.common,
            Command::Orbit(a) => &a.common,
            Command::HarmonicsCheck(a) => &a.common,
            Command::VerifyAll(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureSwitch {
    On,
    Off,
}

impl MeasureSwitch {
    pub fn is_on(self) -> bool {
        matches!(self, MeasureSwitch::On)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureSwitch::On => "on",
            MeasureSwitch::Off => "off",
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Coulomb coupling strength
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// eV per natural energy unit, used for serialized eV columns
    #[arg(long, default_value_t = ENERGY_UNIT_EV)]
    pub energy_unit_ev: f64,

    /// Write the report here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for randomized choices (sampled endpoints, restart jitter)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Fix the report timestamp (RFC 3339) for byte-reproducible output
    #[arg(long, value_name = "RFC3339")]
    pub timestamp: Option<String>,
}

/// Energy selection, by value or by principal quantum number.
#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Bound-state energy E < 0 in natural units
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,

    /// Principal quantum number n, fixing E = -alpha^2 / (2 n^2)
    #[arg(long, conflicts_with = "energy")]
    pub n_level: Option<u32>,
}

impl EnergyArgs {
    /// Resolves the energy in natural units; `fallback` supplies the value
    /// (as a multiple of alpha^2) when neither flag is given.
    pub fn resolve(&self, alpha: f64, fallback: f64) -> Result<f64, String> {
        if let Some(e) = self.energy {
            return Ok(e);
        }
        if let Some(n) = self.n_level {
            if n == 0 {
                return Err("--n-level must be at least 1".to_string());
            }
            return Ok(-alpha * alpha / (2.0 * f64::from(n) * f64::from(n)));
        }
        Ok(fallback * alpha * alpha)
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Highest principal quantum number
    #[arg(long, default_value_t = 6)]
    pub n_max: u32,

    /// Curvature coefficients, decimal or fraction (e.g. 0.125 or 1/8)
    #[arg(long, value_delimiter = ',', value_parser = parse_coefficient, default_value = "0")]
    pub c: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct PolesArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Lower end of the energy scan window
    #[arg(long, default_value_t = -0.6, allow_hyphen_values = true)]
    pub e_min: f64,

    /// Upper end of the energy scan window
    #[arg(long, default_value_t = -0.012, allow_hyphen_values = true)]
    pub e_max: f64,

    /// Number of scan points across the window
    #[arg(long, default_value_t = 240)]
    pub scan_points: usize,

    /// How many poles the window is expected to contain
    #[arg(long, default_value_t = 6)]
    pub n_expect: usize,

    /// Curvature coefficient, decimal or fraction
    #[arg(long, value_parser = parse_coefficient, default_value = "0")]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct AmplitudeArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub energy: EnergyArgs,

    /// Separation angles on the momentum sphere, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "0.5,1.0,1.5,2.0,2.5")]
    pub theta: Vec<f64>,

    /// Tail-bound target for the accelerated series
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    /// Also evaluate the averaged direct series with this many terms
    #[arg(long)]
    pub n_cesaro: Option<usize>,

    /// Curvature coefficient, decimal or fraction
    #[arg(long, value_parser = parse_coefficient, default_value = "0")]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub energy: EnergyArgs,

    /// Slice thickness in units of 1 / p_E^2
    #[arg(long, default_value_t = 0.02)]
    pub epsilon: f64,

    /// Number of slices composed in the report (default: 0.4 / epsilon)
    #[arg(long)]
    pub slices: Option<u64>,

    /// Retained angular modes
    #[arg(long, default_value_t = 8)]
    pub n_modes: u32,

    /// Quadrature points for the mode projection (default: auto)
    #[arg(long)]
    pub grid_points: Option<u32>,

    /// Include the per-slice measure factor
    #[arg(long, value_enum, default_value_t = MeasureSwitch::On)]
    pub measure: MeasureSwitch,

    /// Curvature coefficient, decimal or fraction
    #[arg(long, value_parser = parse_coefficient, default_value = "0")]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct RtermArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub energy: EnergyArgs,

    /// Curvature coefficients to compare, decimal or fraction each
    #[arg(long, value_delimiter = ',', value_parser = parse_coefficient,
          default_value = "0,1/24,1/12,1/8")]
    pub c: Vec<f64>,

    /// Number of levels extracted per coefficient
    #[arg(long, default_value_t = 2)]
    pub n_max: u32,

    /// Slice-thickness sweep in units of 1 / p_E^2, halving steps
    #[arg(long, value_delimiter = ',', default_value = "0.04,0.02,0.01")]
    pub epsilons: Vec<f64>,

    /// Total pseudotime in units of 1 / p_E^2
    #[arg(long, default_value_t = 0.4)]
    pub pseudotime: f64,
}

#[derive(Debug, Args)]
pub struct EikonalArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub energy: EnergyArgs,

    /// Start momentum "x,y,z" (sampled from the seed when omitted)
    #[arg(long, value_parser = parse_momentum, allow_hyphen_values = true, requires = "to")]
    pub from: Option<[f64; 3]>,

    /// End momentum "x,y,z" (sampled from the seed when omitted)
    #[arg(long, value_parser = parse_momentum, allow_hyphen_values = true, requires = "from")]
    pub to: Option<[f64; 3]>,

    /// Endpoint pairs to sample when --from/--to are omitted
    #[arg(long, default_value_t = 1)]
    pub pairs: u32,

    /// Path points on the finest minimization grid
    #[arg(long, default_value_t = 2049)]
    pub n_points: usize,

    /// Gradient max-norm target
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub energy: EnergyArgs,

    /// Angular momentum as a fraction of the circular-orbit maximum
    #[arg(long, default_value_t = 0.8)]
    pub l_frac: f64,

    /// Orbit length in periods
    #[arg(long, default_value_t = 1.0)]
    pub periods: f64,

    /// Integrator steps per period
    #[arg(long, default_value_t = 10_000)]
    pub steps_per_period: u64,
}

#[derive(Debug, Args)]
pub struct HarmonicsCheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Highest principal quantum number in the Gram matrix
    #[arg(long, default_value_t = 4)]
    pub n_max: u32,

    /// Highest principal quantum number in the addition-theorem probe
    #[arg(long, default_value_t = 6)]
    pub addition_n_max: u32,

    /// Product-quadrature resolution per sphere angle
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,

    /// Random point pairs for the addition theorem
    #[arg(long, default_value_t = 100)]
    pub pairs: u32,

    /// Budget for the Gram-matrix deviation from the identity
    #[arg(long, default_value_t = 1e-8)]
    pub gram_tol: f64,

    /// Budget for the addition-theorem residual
    #[arg(long, default_value_t = 1e-10)]
    pub addition_tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyAllArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Accepts a plain decimal or a fraction written as "a/b".
pub fn parse_coefficient(raw: &str) -> Result<f64, String> {
    let s = raw.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad fraction numerator in {s:?}"))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad fraction denominator in {s:?}"))?;
        if d == 0.0 || !d.is_finite() || !n.is_finite() {
            return Err(format!("fraction {s:?} does not name a finite number"));
        }
        Ok(n / d)
    } else {
        s.parse()
            .map_err(|_| format!("expected a decimal or fraction, got {s:?}"))
    }
}

/// Parses "x,y,z" into a momentum triple.
pub fn parse_momentum(raw: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated components, got {raw:?}"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("bad momentum component {part:?}"))?;
    }
    Ok(out)
}

/// The fully resolved configuration echoed into the report. Every field is
/// the value actually used, after defaults; fields irrelevant to the
/// subcommand are absent. Feeding these values back as flags reproduces the
/// run.
#[derive(Debug, Default, Serialize)]
pub struct ConfigEcho {
    pub subcommand: &'static str,
    pub alpha: f64,
    pub energy_unit_ev: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_expect: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cesaro: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pseudotime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slices: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_frac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angular_momentum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periods: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_per_period: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub addition_n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub addition_tol: Option<f64>,
    pub seed: u64,
    pub format: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl ConfigEcho {
    /// Starts an echo with the shared flags filled in.
    pub fn base(name: &'static str, common: &CommonArgs) -> Self {
        ConfigEcho {
            subcommand: name,
            alpha: common.alpha,
            energy_unit_ev: common.energy_unit_ev,
            seed: common.seed,
            format: common.format.as_str(),
            output: common
                .output
                .as_ref()
                .map(|p| p.display().to_string()),
            timestamp: common.timestamp.clone(),
            ..ConfigEcho::default()
        }
    }
}

/// Builds the energy context shared by the compute paths.
pub fn context(energy: f64, common: &CommonArgs) -> coulomb_s3::Result<EnergyContext> {
    Ok(EnergyContext::new(energy, common.alpha)?.with_energy_unit(common.energy_unit_ev))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_accept_fractions_and_decimals() {
        assert_eq!(parse_coefficient("0.125").unwrap(), 0.125);
        assert_eq!(parse_coefficient("1/8").unwrap(), 0.125);
        assert_eq!(parse_coefficient(" 1 / 12 ").unwrap(), 1.0 / 12.0);
        assert!(parse_coefficient("1/0").is_err());
        assert!(parse_coefficient("one half").is_err());
    }

    #[test]
    fn momentum_triples_parse() {
        assert_eq!(parse_momentum("1,2,3").unwrap(), [1.0, 2.0, 3.0]);
        assert_eq!(parse_momentum("-0.5, 0, 2e-1").unwrap(), [-0.5, 0.0, 0.2]);
        assert!(parse_momentum("1,2").is_err());
        assert!(parse_momentum("1,2,x").is_err());
    }

    #[test]
    fn energy_resolution_prefers_explicit_value() {
        let by_value = EnergyArgs {
            energy: Some(-0.3),
            n_level: None,
        };
        assert_eq!(by_value.resolve(1.0, -0.5).unwrap(), -0.3);

        let by_level = EnergyArgs {
            energy: None,
            n_level: Some(2),
        };
        assert_eq!(by_level.resolve(1.0, -0.5).unwrap(), -0.125);

        let fallback = EnergyArgs {
            energy: None,
            n_level: None,
        };
        assert_eq!(fallback.resolve(2.0, -0.3).unwrap(), -1.2);
    }
}
