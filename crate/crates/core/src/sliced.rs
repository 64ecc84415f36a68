//! Time-sliced transfer-operator pipeline on the 3-sphere.
//!
//! A short-pseudotime step is modeled by a flat Gaussian in the separation
//! angle, `exp(-theta^2 / (2 sigma^2))` with `sigma^2 = epsilon p_E^2`,
//! normalized to unit mass on S^3. Rotation-invariant kernels diagonalize in
//! the character basis
//!
//! ```text
//! K(theta) = sum_n k_n (n / 2 pi^2) chi_n(theta),
//! chi_n(theta) = sin(n theta) / sin(theta),
//! ```
//!
//! where convolution on the sphere multiplies the k_n mode by mode, so
//! composing N slices is exact once the one-slice modes are known. The decay
//! rate `lambda_n = -ln k_n / epsilon` extrapolated to epsilon -> 0 measures
//! the effective spectral eigenvalue g_n = 2 lambda_n / p_E^2:
//!
//! - bare Gaussian slices give g_n -> n^2 - 1 (the Laplacian eigenvalue);
//!   the n = 1 mode then does not decay at all and produces no bound state;
//! - multiplying each slice by the curvature measure factor
//!   `exp(-epsilon p_E^2 / 2)` shifts this to g_n -> n^2, which is the
//!   physical hydrogen case E_n = -alpha^2 / 2n^2;
//! - an extra curvature term c R/2 in the Hamiltonian (R = 6 on the unit
//!   3-sphere) adds a further 3c, distorting every level by a measurable
//!   amount.
//!
//! This makes the measure-factor question an experiment rather than a
//! convention: the pipeline extracts the spectrum for each variant and
//! reports which ones are compatible with the physical levels.

use serde::Serialize;

use crate::energy::{EnergyContext, ENERGY_UNIT_EV};
use crate::error::{CoulombError, Result};
use crate::harmonics::character;
use crate::quadrature::{GaussLegendre, S3Grid};
use crate::spectral::RTermVariant;
use crate::sphere::SpherePoint4;

/// Scalar curvature of the unit 3-sphere, (D-1)(D-2) with D = 4.
pub const UNIT_SPHERE_CURVATURE: f64 = 6.0;

/// Threshold on the extracted eigenvalue g_n below which a mode decays too
/// slowly to produce a bound state (the physical values are n^2 or n^2 - 1,
/// so anything near zero is the degenerate n = 1 no-measure case).
pub const BOUND_STATE_THRESHOLD: f64 = 0.5;

/// Configuration of one sliced propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceConfig {
    epsilon: f64,
    num_slices: u32,
    grid_points: usize,
    with_measure_factor: bool,
    c: f64,
    n_modes: u32,
}

impl SliceConfig {
    pub fn new(
        epsilon: f64,
        num_slices: u32,
        grid_points: usize,
        with_measure_factor: bool,
        c: f64,
        n_modes: u32,
    ) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(CoulombError::InvalidSliceConfig {
                reason: format!("pseudotime step must be positive, got {epsilon}"),
            });
        }
        if num_slices < 1 {
            return Err(CoulombError::InvalidSliceConfig {
                reason: "need at least one slice".to_string(),
            });
        }
        if n_modes < 1 {
            return Err(CoulombError::InvalidSliceConfig {
                reason: "need at least one retained mode".to_string(),
            });
        }
        RTermVariant::new(c).map_err(|_| CoulombError::InvalidSliceConfig {
            reason: format!("curvature coefficient c = {c} outside 1 + 3c > 0"),
        })?;
        if grid_points < 4 * n_modes as usize {
            return Err(CoulombError::InvalidSliceConfig {
                reason: format!(
                    "grid_points = {grid_points} under-samples {n_modes} modes; need at least {}",
                    4 * n_modes
                ),
            });
        }
        Ok(SliceConfig {
            epsilon,
            num_slices,
            grid_points,
            with_measure_factor,
            c,
            n_modes,
        })
    }

    #[must_use]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[must_use]
    pub fn num_slices(&self) -> u32 {
        self.num_slices
    }

    #[must_use]
    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    #[must_use]
    pub fn with_measure_factor(&self) -> bool {
        self.with_measure_factor
    }

    #[must_use]
    pub fn c(&self) -> f64 {
        self.c
    }

    #[must_use]
    pub fn n_modes(&self) -> u32 {
        self.n_modes
    }

    /// Total pseudotime covered by the composed slices.
    #[must_use]
    pub fn total_pseudotime(&self) -> f64 {
        self.epsilon * self.num_slices as f64
    }
}

/// Character-basis projection of a rotation-invariant function of the
/// separation angle, without any calibration applied:
/// `k_n = (2 pi^2 / n) (2/pi) int_0^pi f(theta) chi_n(theta) sin^2 theta dtheta`.
pub fn project_modes<F: Fn(f64) -> f64>(
    f: F,
    n_modes: u32,
    grid_points: usize,
) -> Result<Vec<f64>> {
    let rule = GaussLegendre::new(grid_points)?;
    let mut modes = vec![0.0; n_modes as usize];
    for (theta, w) in rule.mapped(0.0, std::f64::consts::PI) {
        let sin_theta = theta.sin();
        let weight = w * f(theta) * sin_theta * sin_theta;
        for (i, mode) in modes.iter_mut().enumerate() {
            *mode += weight * character(i as u32 + 1, theta.cos())?;
        }
    }
    let two_pi_sq = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
    for (i, mode) in modes.iter_mut().enumerate() {
        *mode *= (two_pi_sq / (i as f64 + 1.0)) * (2.0 / std::f64::consts::PI);
    }
    Ok(modes)
}

/// One short-pseudotime kernel with its normalization and the per-slice
/// curvature factors resolved.
#[derive(Debug, Clone)]
pub struct SliceKernel {
    cfg: SliceConfig,
    sigma_sq: f64,
    /// unit-mass normalization of the bare Gaussian over S^3
    normalization: f64,
    /// product of the measure factor and the c-term factor for one slice
    slice_factor: f64,
    /// ratio of projected to analytic modes for the exactly-known spectral
    /// kernel on this grid (calibration constant; ~1 for resolved grids)
    calibration: f64,
}

impl SliceKernel {
    pub fn build(cfg: &SliceConfig, ctx: &EnergyContext) -> Result<Self> {
        let p_e_sq = ctx.p_e() * ctx.p_e();
        let sigma_sq = cfg.epsilon * p_e_sq;
        let rule = GaussLegendre::new(cfg.grid_points)?;
        let mut mass = 0.0;
        for (theta, w) in rule.mapped(0.0, std::f64::consts::PI) {
            let sin_theta = theta.sin();
            mass += w * (-theta * theta / (2.0 * sigma_sq)).exp() * sin_theta * sin_theta;
        }
        let normalization = 4.0 * std::f64::consts::PI * mass;
        if !(normalization.is_finite() && normalization > 0.0) {
            return Err(CoulombError::InvalidSliceConfig {
                reason: format!("kernel mass degenerate at epsilon = {}", cfg.epsilon),
            });
        }

        let measure = if cfg.with_measure_factor {
            (-cfg.epsilon * p_e_sq / 2.0).exp()
        } else {
            1.0
        };
        let curvature =
            (-cfg.epsilon * UNIT_SPHERE_CURVATURE * cfg.c * p_e_sq / 4.0).exp();

        let calibration = spectral_kernel_calibration(cfg, ctx)?;

        Ok(SliceKernel {
            cfg: *cfg,
            sigma_sq,
            normalization,
            slice_factor: measure * curvature,
            calibration,
        })
    }

    #[must_use]
    pub fn config(&self) -> &SliceConfig {
        &self.cfg
    }

    /// Calibration constant determined from the analytic spectral kernel.
    #[must_use]
    pub fn calibration(&self) -> f64 {
        self.calibration
    }

    /// Kernel value at separation angle theta (radians).
    pub fn evaluate(&self, theta: f64) -> Result<f64> {
        if !theta.is_finite() {
            return Err(CoulombError::NonFinite { what: "theta" });
        }
        Ok(self.slice_factor * (-theta * theta / (2.0 * self.sigma_sq)).exp()
            / self.normalization)
    }
}

/// Kernel value at one angle; convenience wrapper over [`SliceKernel`].
pub fn short_time_kernel(theta: f64, cfg: &SliceConfig, ctx: &EnergyContext) -> Result<f64> {
    SliceKernel::build(cfg, ctx)?.evaluate(theta)
}

/// Analytic free kernel at pseudotime epsilon projected on the configured
/// grid, divided by its exact modes `exp(-p_E^2 n^2 epsilon / 2)`. Returns
/// the n = 1 ratio after verifying the ratios are mode-independent.
fn spectral_kernel_calibration(cfg: &SliceConfig, ctx: &EnergyContext) -> Result<f64> {
    let p_e_sq = ctx.p_e() * ctx.p_e();
    let a = p_e_sq * cfg.epsilon / 2.0;
    // modes above this cutoff are below 1e-18 and cannot influence the grid
    let m_max = ((18.0 * std::f64::consts::LN_10 / a).sqrt().ceil() as u32).max(cfg.n_modes);
    let two_pi_sq = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
    let kernel = |theta: f64| -> f64 {
        let mut total = 0.0;
        for m in 1..=m_max {
            let mf = m as f64;
            total += mf / two_pi_sq
                * character(m, theta.cos()).expect("m >= 1")
                * (-a * mf * mf).exp();
        }
        total
    };
    let projected = project_modes(kernel, cfg.n_modes, cfg.grid_points)?;
    let mut first = 0.0;
    for (i, &k) in projected.iter().enumerate() {
        let n = i as u32 + 1;
        let exact = (-a * (n as f64) * (n as f64)).exp();
        let ratio = k / exact;
        if i == 0 {
            first = ratio;
        } else if (ratio - first).abs() > 1e-8 {
            return Err(CoulombError::ModeResolution {
                mode: n,
                shift: (ratio - first).abs(),
            });
        }
    }
    Ok(first)
}

/// Mode coefficients of a composed kernel, held in log space so that
/// repeated composition is associative bit for bit: the per-slice magnitudes
/// are stored once and only the integer slice count changes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    ln_mag: Vec<f64>,
    signs: Vec<i8>,
    power: u64,
}

impl ModeCoefficients {
    fn from_single_slice(values: &[f64]) -> Self {
        ModeCoefficients {
            ln_mag: values.iter().map(|v| v.abs().ln()).collect(),
            signs: values
                .iter()
                .map(|v| {
                    if *v > 0.0 {
                        1
                    } else if *v < 0.0 {
                        -1
                    } else {
                        0
                    }
                })
                .collect(),
            power: 1,
        }
    }

    #[must_use]
    pub fn n_modes(&self) -> u32 {
        self.ln_mag.len() as u32
    }

    #[must_use]
    pub fn power(&self) -> u64 {
        self.power
    }

    /// log magnitude of mode n for a single slice (before raising to the
    /// composed power).
    #[must_use]
    pub fn slice_ln_magnitude(&self, n: u32) -> f64 {
        self.ln_mag[(n - 1) as usize]
    }

    /// Composed value of mode n: sign^power * exp(power * ln|k_n|).
    #[must_use]
    pub fn value(&self, n: u32) -> f64 {
        let i = (n - 1) as usize;
        let sign = match self.signs[i] {
            0 => return 0.0,
            s if s < 0 && self.power % 2 == 1 => -1.0,
            _ => 1.0,
        };
        sign * (self.power as f64 * self.ln_mag[i]).exp()
    }

    #[must_use]
    pub fn values(&self) -> Vec<f64> {
        (1..=self.n_modes()).map(|n| self.value(n)).collect()
    }
}

/// Raises every mode to the num_slices power (spherical convolution of a
/// kernel with itself is diagonal in the character basis). Exact in log
/// space: only the integer slice count is multiplied.
pub fn compose_slices(modes: &ModeCoefficients, num_slices: u64) -> Result<ModeCoefficients> {
    if num_slices < 1 {
        return Err(CoulombError::InvalidSliceConfig {
            reason: "composition needs at least one slice".to_string(),
        });
    }
    Ok(ModeCoefficients {
        ln_mag: modes.ln_mag.clone(),
        signs: modes.signs.clone(),
        power: modes.power * num_slices,
    })
}

/// Projects a slice kernel on the character basis, applying the stored
/// calibration and guarding against an under-resolved grid by re-projecting
/// on a doubled grid: if any mode moves by more than 1e-9 the grid cannot
/// be trusted.
pub fn kernel_to_modes(kernel: &SliceKernel) -> Result<ModeCoefficients> {
    let cfg = kernel.config();
    let eval = |theta: f64| {
        kernel
            .evaluate(theta)
            .expect("grid angles are finite")
    };
    let coarse = project_modes(eval, cfg.n_modes, cfg.grid_points)?;
    let fine = project_modes(eval, cfg.n_modes, 2 * cfg.grid_points)?;
    for (i, (a, b)) in coarse.iter().zip(fine.iter()).enumerate() {
        let shift = (a - b).abs();
        if shift > 1e-9 {
            return Err(CoulombError::ModeResolution {
                mode: i as u32 + 1,
                shift,
            });
        }
    }
    let calibrated: Vec<f64> = coarse.iter().map(|k| k / kernel.calibration()).collect();
    Ok(ModeCoefficients::from_single_slice(&calibrated))
}

/// Numeric convolution of two rotation-invariant kernels over S^3,
/// evaluated at a given separation angle between the outer endpoints. Used
/// as the quadrature oracle for the mode-space composition rule.
pub fn convolve_isotropic<F1, F2>(
    f1: F1,
    f2: F2,
    theta_ab: f64,
    resolution: usize,
) -> Result<f64>
where
    F1: Fn(f64) -> f64,
    F2: Fn(f64) -> f64,
{
    if !theta_ab.is_finite() {
        return Err(CoulombError::NonFinite { what: "theta_ab" });
    }
    let grid = S3Grid::new(resolution)?;
    let pi_b = SpherePoint4::new([theta_ab.sin(), 0.0, 0.0], theta_ab.cos())?;
    let mut total = 0.0;
    for (point, &w) in grid.points().iter().zip(grid.weights()) {
        // the grid's polar axis is the fourth coordinate, so the angle to
        // pi_a = north pole is acos(w-component)
        let theta_a = point.w().clamp(-1.0, 1.0).acos();
        let theta_b = pi_b.dot(point).clamp(-1.0, 1.0).acos();
        total += w * f1(theta_b) * f2(theta_a);
    }
    Ok(total)
}

/// Epsilon sweep for spectrum extraction: a halving chain of pseudotime
/// steps at fixed total pseudotime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    epsilons: Vec<f64>,
    total_pseudotime: f64,
    n_modes: u32,
    with_measure_factor: bool,
    c: f64,
}

impl SweepConfig {
    pub fn new(
        epsilons: Vec<f64>,
        total_pseudotime: f64,
        n_modes: u32,
        with_measure_factor: bool,
        c: f64,
    ) -> Result<Self> {
        if epsilons.len() < 3 {
            return Err(CoulombError::InvalidSliceConfig {
                reason: format!(
                    "extrapolation needs at least 3 step sizes, got {}",
                    epsilons.len()
                ),
            });
        }
        if !(total_pseudotime.is_finite() && total_pseudotime > 0.0) {
            return Err(CoulombError::InvalidSliceConfig {
                reason: format!("total pseudotime must be positive, got {total_pseudotime}"),
            });
        }
        for pair in epsilons.windows(2) {
            let ratio = pair[0] / pair[1];
            if !(ratio - 2.0).abs().is_finite() || (ratio - 2.0).abs() > 1e-9 {
                return Err(CoulombError::InvalidSliceConfig {
                    reason: format!(
                        "step sizes must halve between sweep levels, got {} then {}",
                        pair[0], pair[1]
                    ),
                });
            }
        }
        for &eps in &epsilons {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(CoulombError::InvalidSliceConfig {
                    reason: format!("invalid step size {eps}"),
                });
            }
            let slices = total_pseudotime / eps;
            if (slices - slices.round()).abs() > 1e-9 * slices.round().max(1.0) {
                return Err(CoulombError::InvalidSliceConfig {
                    reason: format!(
                        "step {eps} does not divide total pseudotime {total_pseudotime}"
                    ),
                });
            }
        }
        if n_modes < 1 {
            return Err(CoulombError::InvalidSliceConfig {
                reason: "need at least one retained mode".to_string(),
            });
        }
        RTermVariant::new(c).map_err(|_| CoulombError::InvalidSliceConfig {
            reason: format!("curvature coefficient c = {c} outside 1 + 3c > 0"),
        })?;
        Ok(SweepConfig {
            epsilons,
            total_pseudotime,
            n_modes,
            with_measure_factor,
            c,
        })
    }

    /// The standard sweep {0.04, 0.02, 0.01}/p_E^2 at total pseudotime
    /// 0.4/p_E^2.
    pub fn standard(
        ctx: &EnergyContext,
        n_modes: u32,
        with_measure_factor: bool,
        c: f64,
    ) -> Result<Self> {
        let p_e_sq = ctx.p_e() * ctx.p_e();
        Self::new(
            vec![0.04 / p_e_sq, 0.02 / p_e_sq, 0.01 / p_e_sq],
            0.4 / p_e_sq,
            n_modes,
            with_measure_factor,
            c,
        )
    }

    #[must_use]
    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    #[must_use]
    pub fn n_modes(&self) -> u32 {
        self.n_modes
    }
}

/// One extracted level of the sliced spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlicedLevel {
    pub n: u32,
    /// extrapolated eigenvalue 2 lambda_n / p_E^2 (n^2 + 3c when the
    /// measure factor is on, n^2 - 1 + 3c when off)
    pub eigenvalue: f64,
    pub bound: bool,
    pub energy: Option<f64>,
    pub energy_ev: Option<f64>,
}

/// Sliced-propagation spectrum with the sweep diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlicedSpectrum {
    pub with_measure_factor: bool,
    pub c: f64,
    pub total_pseudotime: f64,
    pub epsilons: Vec<f64>,
    /// decay rates lambda_n, one row per sweep step, one column per mode
    pub lambda_by_epsilon: Vec<Vec<f64>>,
    pub levels: Vec<SlicedLevel>,
}

/// Absolute floor below which successive lambda differences are treated as
/// converged noise rather than a convergence trend (the n = 1 mode with the
/// measure factor off is exact at every epsilon, for example).
const SWEEP_DELTA_FLOOR: f64 = 1e-10;

/// Runs the epsilon sweep, extrapolates the per-mode decay rates to
/// epsilon -> 0 with a two-level Richardson step (the kernel error is first
/// order in epsilon), and converts them to bound-state energies.
pub fn extract_spectrum(sweep: &SweepConfig, ctx: &EnergyContext) -> Result<SlicedSpectrum> {
    let p_e_sq = ctx.p_e() * ctx.p_e();
    let alpha = ctx.alpha();
    let n_modes = sweep.n_modes as usize;

    let mut lambda_by_epsilon: Vec<Vec<f64>> = Vec::with_capacity(sweep.epsilons.len());
    for &epsilon in &sweep.epsilons {
        let num_slices = (sweep.total_pseudotime / epsilon).round() as u32;
        let sigma = (epsilon * p_e_sq).sqrt();
        let grid = (4 * sweep.n_modes as usize).max((10.0 / sigma).ceil() as usize);
        let cfg = SliceConfig::new(
            epsilon,
            num_slices,
            grid,
            sweep.with_measure_factor,
            sweep.c,
            sweep.n_modes,
        )?;
        let kernel = SliceKernel::build(&cfg, ctx)?;
        let modes = kernel_to_modes(&kernel)?;
        let composed = compose_slices(&modes, num_slices as u64)?;
        let total = cfg.total_pseudotime();
        let lambdas: Vec<f64> = (1..=sweep.n_modes)
            .map(|n| -(composed.power() as f64 * composed.slice_ln_magnitude(n)) / total)
            .collect();
        lambda_by_epsilon.push(lambdas);
    }

    let levels = (0..n_modes)
        .map(|i| {
            let across: Vec<f64> = lambda_by_epsilon.iter().map(|row| row[i]).collect();
            // deltas along the halving chain must shrink unless already at
            // the noise floor
            for window in across.windows(3) {
                let d1 = window[1] - window[0];
                let d2 = window[2] - window[1];
                if d1.abs() > SWEEP_DELTA_FLOOR
                    && d2.abs() > SWEEP_DELTA_FLOOR
                    && d2.abs() >= d1.abs()
                {
                    return Err(CoulombError::NonMonotoneSweep { mode: i as u32 + 1 });
                }
            }
            let last = across[across.len() - 1];
            let prev = across[across.len() - 2];
            let extrapolated = 2.0 * last - prev;
            let eigenvalue = 2.0 * extrapolated / p_e_sq;
            let bound = eigenvalue > BOUND_STATE_THRESHOLD;
            let energy = bound.then(|| -alpha * alpha / (2.0 * eigenvalue));
            Ok(SlicedLevel {
                n: i as u32 + 1,
                eigenvalue,
                bound,
                energy,
                energy_ev: energy.map(|e| e * ENERGY_UNIT_EV),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SlicedSpectrum {
        with_measure_factor: sweep.with_measure_factor,
        c: sweep.c,
        total_pseudotime: sweep.total_pseudotime,
        epsilons: sweep.epsilons.clone(),
        lambda_by_epsilon,
        levels,
    })
}

/// One row of the discrimination table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationRow {
    pub with_measure_factor: bool,
    pub c: f64,
    pub levels: Vec<SlicedLevel>,
    /// analytic target for this variant's own formula
    pub analytic: Vec<Option<f64>>,
    /// the physical Schroedinger levels -alpha^2 / 2n^2
    pub physical: Vec<f64>,
    /// percent deviation of the extracted level from the physical one
    pub deviation_percent: Vec<Option<f64>>,
    /// true when the variant is experimentally excluded (a missing ground
    /// state or any level off the physical value by more than 1%)
    pub excluded: bool,
}

/// Side-by-side comparison of every curvature variant against the physical
/// spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationReport {
    pub alpha: f64,
    pub n_levels: u32,
    pub rows: Vec<DiscriminationRow>,
}

/// Percent deviation from the physical level beyond which a variant counts
/// as experimentally excluded.
pub const EXCLUSION_PERCENT: f64 = 1.0;

/// Runs the sliced pipeline for the measure factor on/off and the c
/// candidates, and reports which variants survive comparison with the
/// physical levels.
pub fn discrimination_report(n_levels: u32, ctx: &EnergyContext) -> Result<DiscriminationReport> {
    let alpha = ctx.alpha();
    let physical: Vec<f64> = (1..=n_levels)
        .map(|n| -alpha * alpha / (2.0 * (n as f64) * (n as f64)))
        .collect();

    let mut rows = Vec::new();
    let mut variants: Vec<(bool, f64)> = RTermVariant::candidates()
        .iter()
        .map(|v| (true, v.c()))
        .collect();
    variants.push((false, 0.0));

    for (with_measure, c) in variants {
        let sweep = SweepConfig::standard(ctx, n_levels, with_measure, c)?;
        let spectrum = extract_spectrum(&sweep, ctx)?;
        let analytic: Vec<Option<f64>> = (1..=n_levels)
            .map(|n| {
                let nf = n as f64;
                let g = if with_measure {
                    nf * nf + 3.0 * c
                } else {
                    nf * nf - 1.0 + 3.0 * c
                };
                (g > BOUND_STATE_THRESHOLD).then(|| -alpha * alpha / (2.0 * g))
            })
            .collect();
        let deviation_percent: Vec<Option<f64>> = spectrum
            .levels
            .iter()
            .zip(physical.iter())
            .map(|(level, phys)| {
                level
                    .energy
                    .map(|e| 100.0 * (e - phys).abs() / phys.abs())
            })
            .collect();
        let excluded = deviation_percent
            .iter()
            .any(|d| d.map_or(true, |p| p > EXCLUSION_PERCENT));
        rows.push(DiscriminationRow {
            with_measure_factor: with_measure,
            c,
            levels: spectrum.levels,
            analytic,
            physical: physical.clone(),
            deviation_percent,
            excluded,
        });
    }
    Ok(DiscriminationReport {
        alpha,
        n_levels,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ctx() -> EnergyContext {
        EnergyContext::new(-0.5, 1.0).unwrap()
    }

    #[test]
    fn config_rejects_degenerate_parameters() {
        assert!(SliceConfig::new(0.0, 1, 32, true, 0.0, 4).is_err());
        assert!(SliceConfig::new(0.01, 0, 32, true, 0.0, 4).is_err());
        assert!(SliceConfig::new(0.01, 1, 15, true, 0.0, 4).is_err(), "grid below 4x modes");
        assert!(SliceConfig::new(0.01, 1, 32, true, -0.5, 4).is_err());
        let cfg = SliceConfig::new(0.01, 40, 64, true, 0.0, 4).unwrap();
        assert!((cfg.total_pseudotime() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn unit_three_sphere_has_curvature_six() {
        let d = 4.0_f64;
        assert_eq!((d - 1.0) * (d - 2.0), UNIT_SPHERE_CURVATURE);
    }

    #[test]
    fn bare_kernel_has_unit_mass_on_the_sphere() {
        let ctx = unit_ctx();
        let cfg = SliceConfig::new(0.02, 20, 80, false, 0.0, 4).unwrap();
        let kernel = SliceKernel::build(&cfg, &ctx).unwrap();
        let rule = GaussLegendre::new(200).unwrap();
        let mass: f64 = rule
            .mapped(0.0, std::f64::consts::PI)
            .map(|(theta, w)| {
                let s = theta.sin();
                w * kernel.evaluate(theta).unwrap() * 4.0 * std::f64::consts::PI * s * s
            })
            .sum();
        assert!((mass - 1.0).abs() < 1e-10, "kernel mass {mass}");
    }

    #[test]
    fn characters_are_orthonormal_under_the_projection_weight() {
        let rule = GaussLegendre::new(96).unwrap();
        for n in 1..=16u32 {
            for m in 1..=16u32 {
                let mut overlap = 0.0;
                for (theta, w) in rule.mapped(0.0, std::f64::consts::PI) {
                    let s = theta.sin();
                    overlap += w
                        * character(n, theta.cos()).unwrap()
                        * character(m, theta.cos()).unwrap()
                        * s
                        * s;
                }
                overlap *= 2.0 / std::f64::consts::PI;
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!(
                    (overlap - expect).abs() < 1e-10,
                    "chi_{n} x chi_{m} = {overlap}"
                );
            }
        }
    }

    #[test]
    fn constant_kernel_keeps_only_the_trivial_mode() {
        let two_pi_sq = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        let modes = project_modes(|_| 1.0 / two_pi_sq, 6, 64).unwrap();
        assert!((modes[0] - 1.0).abs() < 1e-10, "k_1 = {}", modes[0]);
        for (i, &k) in modes.iter().enumerate().skip(1) {
            assert!(k.abs() < 1e-10, "k_{} = {k}", i + 1);
        }
    }

    #[test]
    fn calibration_reproduces_the_analytic_kernel_modes() {
        let ctx = unit_ctx();
        let cfg = SliceConfig::new(0.1, 4, 64, false, 0.0, 8).unwrap();
        let kernel = SliceKernel::build(&cfg, &ctx).unwrap();
        assert!(
            (kernel.calibration() - 1.0).abs() < 1e-8,
            "calibration {} should be unity on a resolved grid",
            kernel.calibration()
        );
    }

    #[test]
    fn near_identity_kernel_modes_follow_the_gaussian_formula() {
        let ctx = unit_ctx();
        let cfg = SliceConfig::new(1e-4, 1, 1024, false, 0.0, 4).unwrap();
        let kernel = SliceKernel::build(&cfg, &ctx).unwrap();
        let modes = kernel_to_modes(&kernel).unwrap();
        let sigma_sq = 1e-4;
        for n in 1..=4u32 {
            let nf = n as f64;
            let expect = (-sigma_sq * (nf * nf - 1.0) / 2.0).exp()
                * (nf * sigma_sq).sinh()
                / (nf * sigma_sq.sinh());
            let got = modes.value(n);
            assert!(
                (got - expect).abs() < 1e-8,
                "mode {n}: {got} vs Gaussian closed form {expect}"
            );
            assert!(got <= 1.0 + 1e-12 && got > 0.9, "near-identity mode {got}");
        }
    }

    #[test]
    fn composition_is_associative_bit_for_bit() {
        let ctx = unit_ctx();
        let cfg = SliceConfig::new(0.02, 20, 80, true, 1.0 / 12.0, 5).unwrap();
        let modes = kernel_to_modes(&SliceKernel::build(&cfg, &ctx).unwrap()).unwrap();
        let once = compose_slices(&modes, 15).unwrap();
        let stepwise =
            compose_slices(&compose_slices(&modes, 3).unwrap(), 5).unwrap();
        assert_eq!(once, stepwise);
        for n in 1..=5 {
            assert_eq!(once.value(n).to_bits(), stepwise.value(n).to_bits());
        }
        let identity = compose_slices(&modes, 1).unwrap();
        assert_eq!(identity, modes);
    }

    #[test]
    fn measure_factor_scales_every_mode_identically() {
        let ctx = unit_ctx();
        let epsilon = 0.02;
        let on_cfg = SliceConfig::new(epsilon, 1, 80, true, 0.0, 5).unwrap();
        let off_cfg = SliceConfig::new(epsilon, 1, 80, false, 0.0, 5).unwrap();
        let on = kernel_to_modes(&SliceKernel::build(&on_cfg, &ctx).unwrap()).unwrap();
        let off = kernel_to_modes(&SliceKernel::build(&off_cfg, &ctx).unwrap()).unwrap();
        let expect = (-epsilon * ctx.p_e() * ctx.p_e() / 2.0).exp();
        for n in 1..=5 {
            let ratio = on.value(n) / off.value(n);
            assert!(
                (ratio - expect).abs() < 1e-12,
                "mode {n} measure ratio {ratio} vs {expect}"
            );
        }
    }

    #[test]
    fn curvature_term_scales_every_mode_identically() {
        let ctx = unit_ctx();
        let epsilon = 0.02;
        let c = 1.0 / 8.0;
        let with_cfg = SliceConfig::new(epsilon, 1, 80, true, c, 5).unwrap();
        let base_cfg = SliceConfig::new(epsilon, 1, 80, true, 0.0, 5).unwrap();
        let with_c = kernel_to_modes(&SliceKernel::build(&with_cfg, &ctx).unwrap()).unwrap();
        let base = kernel_to_modes(&SliceKernel::build(&base_cfg, &ctx).unwrap()).unwrap();
        let expect = (-epsilon * 3.0 * c * ctx.p_e() * ctx.p_e() / 2.0).exp();
        for n in 1..=5 {
            let ratio = with_c.value(n) / base.value(n);
            assert!(
                (ratio - expect).abs() < 1e-12,
                "mode {n} curvature ratio {ratio} vs {expect}"
            );
        }
    }

    #[test]
    fn mode_composition_matches_direct_convolution() {
        let ctx = unit_ctx();
        let cfg = SliceConfig::new(0.04, 2, 128, false, 0.0, 24).unwrap();
        let kernel = SliceKernel::build(&cfg, &ctx).unwrap();
        let modes = kernel_to_modes(&kernel).unwrap();
        let composed = compose_slices(&modes, 2).unwrap();
        let two_pi_sq = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        for theta_ab in [0.4_f64, 1.2, 2.4] {
            let reconstructed: f64 = (1..=24u32)
                .map(|n| {
                    composed.value(n) * n as f64 / two_pi_sq
                        * character(n, theta_ab.cos()).unwrap()
                })
                .sum();
            let direct = convolve_isotropic(
                |t| kernel.evaluate(t).unwrap(),
                |t| kernel.evaluate(t).unwrap(),
                theta_ab,
                64,
            )
            .unwrap();
            assert!(
                (reconstructed - direct).abs() < 1e-8,
                "theta = {theta_ab}: modes {reconstructed} vs quadrature {direct}"
            );
        }
    }

    #[test]
    fn sweep_config_requires_a_halving_chain() {
        assert!(SweepConfig::new(vec![0.04, 0.02], 0.4, 4, true, 0.0).is_err());
        assert!(SweepConfig::new(vec![0.04, 0.03, 0.02], 0.4, 4, true, 0.0).is_err());
        assert!(SweepConfig::new(vec![0.04, 0.02, 0.01], 0.39, 4, true, 0.0).is_err());
        assert!(SweepConfig::new(vec![0.04, 0.02, 0.01], 0.4, 4, true, 0.0).is_ok());
    }

    #[test]
    fn physical_variant_recovers_hydrogen_ground_state() {
        let ctx = unit_ctx();
        let sweep = SweepConfig::standard(&ctx, 3, true, 0.0).unwrap();
        let spectrum = extract_spectrum(&sweep, &ctx).unwrap();
        let ground = &spectrum.levels[0];
        assert!(ground.bound);
        let e1 = ground.energy.unwrap();
        assert!(
            (e1 + 0.5).abs() < 5e-3,
            "extracted ground level {e1} vs -0.5"
        );
        let e2 = spectrum.levels[1].energy.unwrap();
        assert!((e2 + 0.125).abs() < 5e-3, "first excited {e2} vs -0.125");
    }

    #[test]
    fn dropping_the_measure_factor_unbinds_the_ground_mode() {
        let ctx = unit_ctx();
        let sweep = SweepConfig::standard(&ctx, 3, false, 0.0).unwrap();
        let spectrum = extract_spectrum(&sweep, &ctx).unwrap();
        assert!(!spectrum.levels[0].bound, "n = 1 must not bind");
        assert_eq!(spectrum.levels[0].energy, None);
        assert!(
            spectrum.levels[0].eigenvalue.abs() < 1e-6,
            "n = 1 eigenvalue {} should collapse to zero",
            spectrum.levels[0].eigenvalue
        );
        let e2 = spectrum.levels[1].energy.unwrap();
        assert!(
            (e2 + 1.0 / 6.0).abs() < 5e-3,
            "measure-off first excited {e2} vs -1/6"
        );
    }

    #[test]
    fn lambda_deltas_halve_along_the_sweep() {
        let ctx = unit_ctx();
        let sweep = SweepConfig::standard(&ctx, 4, true, 0.0).unwrap();
        let spectrum = extract_spectrum(&sweep, &ctx).unwrap();
        for mode in 0..4usize {
            let l: Vec<f64> = spectrum
                .lambda_by_epsilon
                .iter()
                .map(|row| row[mode])
                .collect();
            let d1 = (l[1] - l[0]).abs();
            let d2 = (l[2] - l[1]).abs();
            if d1 < SWEEP_DELTA_FLOOR && d2 < SWEEP_DELTA_FLOOR {
                continue; // mode already exact, nothing to extrapolate
            }
            let ratio = d1 / d2;
            assert!(
                ratio >= 1.8,
                "mode {}: convergence ratio {ratio} below first-order expectation",
                mode + 1
            );
        }
    }

    #[test]
    fn discrimination_report_excludes_all_but_the_physical_variant() {
        let ctx = unit_ctx();
        let report = discrimination_report(2, &ctx).unwrap();
        assert_eq!(report.rows.len(), 5);
        for row in &report.rows {
            let is_physical = row.with_measure_factor && row.c == 0.0;
            assert_eq!(
                row.excluded, !is_physical,
                "measure {} c {} exclusion flag",
                row.with_measure_factor, row.c
            );
        }
        // the no-measure row must be excluded specifically for the missing
        // ground state
        let off_row = report
            .rows
            .iter()
            .find(|r| !r.with_measure_factor)
            .unwrap();
        assert!(!off_row.levels[0].bound);
    }
}
