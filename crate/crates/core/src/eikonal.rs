//! Classical picture: eikonal phases of momentum-space paths and the Kepler
//! orbits they shadow.
//!
//! The conformal factor of the momentum-space metric turns the phase
//! integral `2 alpha |dp| / (p^2 + p_E^2)` into `(alpha / p_E)` times arc
//! length on the 3-sphere, so the minimizing path between two momenta is the
//! projected great circle and the minimized phase is `(alpha / p_E) theta`
//! with theta the invariant angle between the endpoints. [`minimize_eikonal`]
//! finds that minimum numerically — gradient descent on the Riemannian
//! energy functional (whose minimizers are constant-speed geodesics, unlike
//! the reparametrization-degenerate length) over a midpoint-refined hierarchy
//! of grids.
//!
//! On the dynamical side, a bound Kepler orbit traces a perfect circle in
//! momentum space with radius alpha / L, offset from the origin by
//! alpha e / L. [`simulate_kepler`] integrates the orbit symplectically,
//! [`fit_hodograph`] recovers the circle from the momentum samples, and
//! [`eikonal_along_orbit`] checks that the two discrete forms of the phase —
//! `-sum dp . x` over positions and the metric form over momenta — agree on
//! the energy shell.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::energy::{EnergyContext, Momentum3};
use crate::error::{CoulombError, Result};
use crate::sphere::invariant_angle;

/// A polyline in momentum space with consecutive duplicates removed. A path
/// whose input points all coincide collapses to a single point and carries
/// zero phase.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumPath {
    points: Vec<Momentum3>,
}

impl MomentumPath {
    /// Builds a path from at least two points, dropping consecutive
    /// duplicates.
    pub fn new(points: Vec<Momentum3>) -> Result<Self> {
        if points.len() < 2 {
            return Err(CoulombError::PathTooShort {
                actual: points.len(),
                minimum: 2,
            });
        }
        let mut cleaned: Vec<Momentum3> = Vec::with_capacity(points.len());
        for p in points {
            if cleaned.last() != Some(&p) {
                cleaned.push(p);
            }
        }
        Ok(MomentumPath { points: cleaned })
    }

    #[must_use]
    pub fn points(&self) -> &[Momentum3] {
        &self.points
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one point
    }

    /// Inserts the midpoint of every segment, doubling the resolution.
    #[must_use]
    pub fn refined(&self) -> MomentumPath {
        MomentumPath {
            points: resample(&self.points, 2 * self.points.len() - 1),
        }
    }
}

/// Piecewise-linear resampling of a polyline to a new point count (uniform
/// in the index parameter, so doubling is exactly midpoint insertion).
fn resample(points: &[Momentum3], target: usize) -> Vec<Momentum3> {
    let n = points.len();
    if target == n {
        return points.to_vec();
    }
    (0..target)
        .map(|j| {
            let t = j as f64 / (target - 1) as f64 * (n - 1) as f64;
            let i = (t.floor() as usize).min(n - 2);
            let frac = t - i as f64;
            points[i].scaled(1.0 - frac).add(&points[i + 1].scaled(frac))
        })
        .collect()
}

/// Midpoint-rule phase of a momentum path:
/// `sum_i 2 alpha |dp_i| / (|pbar_i|^2 + p_E^2)`.
pub fn eikonal_action(path: &MomentumPath, ctx: &EnergyContext) -> Result<f64> {
    let pe_sq = ctx.p_e() * ctx.p_e();
    let mut action = 0.0;
    for pair in path.points.windows(2) {
        let delta = pair[1].sub(&pair[0]);
        let mid = pair[0].add(&pair[1]).scaled(0.5);
        action += 2.0 * ctx.alpha() * delta.norm() / (mid.norm_squared() + pe_sq);
    }
    if !action.is_finite() {
        return Err(CoulombError::NonFinite {
            what: "eikonal action",
        });
    }
    Ok(action)
}

/// Riemannian energy of the discrete path (N/2 sum of metric-weighted
/// squared steps). Its minimizers are the constant-speed geodesics, which
/// makes it the right descent objective; the length form above is evaluated
/// on the result.
fn path_energy(points: &[Momentum3], ctx: &EnergyContext) -> f64 {
    let pe_sq = ctx.p_e() * ctx.p_e();
    let n_seg = (points.len() - 1) as f64;
    let mut energy = 0.0;
    for pair in points.windows(2) {
        let delta = pair[1].sub(&pair[0]);
        let mid = pair[0].add(&pair[1]).scaled(0.5);
        let d = mid.norm_squared() + pe_sq;
        let w = (2.0 * ctx.alpha() / d) * (2.0 * ctx.alpha() / d);
        energy += w * delta.norm_squared();
    }
    0.5 * n_seg * energy
}

/// Gradient of [`path_energy`] with respect to the interior points;
/// endpoint entries are left at zero so the ends stay pinned.
fn path_energy_gradient(points: &[Momentum3], ctx: &EnergyContext) -> Vec<Momentum3> {
    let pe_sq = ctx.p_e() * ctx.p_e();
    let n = points.len();
    let n_seg = (n - 1) as f64;
    let mut grad = vec![Momentum3::zero(); n];
    for i in 0..n - 1 {
        let delta = points[i + 1].sub(&points[i]);
        let mid = points[i].add(&points[i + 1]).scaled(0.5);
        let d = mid.norm_squared() + pe_sq;
        let w = (2.0 * ctx.alpha() / d) * (2.0 * ctx.alpha() / d);
        // d/dp of the metric weight pulls in -2w/D times the midpoint
        let metric_pull = mid.scaled(-(w / d) * delta.norm_squared());
        let step_pull = delta.scaled(w);
        if i > 0 {
            grad[i] = grad[i].add(&step_pull.scaled(-1.0)).add(&metric_pull);
        }
        if i + 1 < n - 1 {
            grad[i + 1] = grad[i + 1].add(&step_pull).add(&metric_pull);
        }
    }
    for g in &mut grad {
        *g = g.scaled(n_seg);
    }
    grad
}

/// Outcome of the geodesic search.
#[derive(Debug, Clone)]
pub struct EikonalMinimum {
    pub path: MomentumPath,
    /// length-form phase of the converged path
    pub action: f64,
    /// continuum geodesic value (alpha / p_E) theta for comparison
    pub geodesic_action: f64,
    pub iterations: u64,
    pub final_gradient_norm: f64,
}

const COARSEST_LEVEL: usize = 17;
const ARMIJO_SLOPE: f64 = 1e-4;
const STEP_GROW: f64 = 1.15;
const STEP_SHRINK: f64 = 0.5;
const MAX_LEVEL_ITERATIONS: u64 = 200_000;
const PLATEAU_NEEDED: u32 = 4;
/// relative energy decrease below which a descent step counts as stagnant
const PLATEAU_REL: f64 = 1e-13;
/// default seed for the stall-recovery jitter
const RESTART_SEED: u64 = 0x0eed_5eed;

/// Finds the minimizing momentum path between two momenta by gradient
/// descent over a hierarchy of grids, coarse to fine, ending at `n_points`
/// path points. A level is converged when the gradient max-norm drops below
/// `tol` or the energy stops improving at floating-point resolution,
/// whichever comes first; the straight line between the endpoints seeds the
/// coarsest level.
pub fn minimize_eikonal(
    p_a: &Momentum3,
    p_b: &Momentum3,
    ctx: &EnergyContext,
    n_points: usize,
    tol: f64,
) -> Result<EikonalMinimum> {
    minimize_eikonal_seeded(p_a, p_b, ctx, n_points, tol, RESTART_SEED)
}

/// [`minimize_eikonal`] with an explicit seed for the stall-recovery
/// perturbation, for callers that want reproducible restarts under their own
/// seed policy.
pub fn minimize_eikonal_seeded(
    p_a: &Momentum3,
    p_b: &Momentum3,
    ctx: &EnergyContext,
    n_points: usize,
    tol: f64,
    restart_seed: u64,
) -> Result<EikonalMinimum> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CoulombError::InvalidTolerance { tol });
    }
    if n_points < 5 {
        return Err(CoulombError::ResolutionTooLow {
            resolution: n_points,
            minimum: 5,
        });
    }
    let theta = invariant_angle(p_a, p_b, ctx);
    if theta < 1e-12 {
        return Err(CoulombError::CoincidentPoints);
    }
    // near the antipode the geodesic is no longer unique; the window is set
    // by the sqrt-amplified resolution of acos near cos = -1
    if std::f64::consts::PI - theta < 1e-6 {
        return Err(CoulombError::AntipodalEndpoints);
    }

    // halving chain of grid sizes down to the coarsest workable level
    let mut sizes = vec![n_points];
    while *sizes.last().expect("non-empty") > 2 * COARSEST_LEVEL - 1 {
        let previous = sizes.last().expect("non-empty");
        sizes.push((previous + 1) / 2);
    }
    sizes.reverse();

    // straight-line seed on the coarsest grid
    let coarsest = sizes[0];
    let mut points: Vec<Momentum3> = (0..coarsest)
        .map(|i| {
            let t = i as f64 / (coarsest - 1) as f64;
            p_a.scaled(1.0 - t).add(&p_b.scaled(t))
        })
        .collect();

    let mut total_iterations = 0u64;
    for &size in &sizes {
        points = resample(&points, size);
        let mut restarted = false;
        'descent: loop {
            let (iters, grad_norm, stalled) = descend_level(&mut points, ctx, tol)?;
            total_iterations += iters;
            if !stalled {
                break 'descent;
            }
            if restarted {
                return Err(CoulombError::MinimizerStalled {
                    gradient: grad_norm,
                    iterations: total_iterations as usize,
                });
            }
            // one seeded perturbation of the interior, then try again
            restarted = true;
            let scale = 0.01
                * points
                    .iter()
                    .map(|p| p.norm())
                    .fold(0.0_f64, f64::max)
                    .max(ctx.p_e());
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed);
            let interior = points.len() - 2;
            for p in points.iter_mut().skip(1).take(interior) {
                let jitter = Momentum3::new(
                    scale * rng.gen_range(-1.0..1.0),
                    scale * rng.gen_range(-1.0..1.0),
                    scale * rng.gen_range(-1.0..1.0),
                )
                .expect("bounded jitter is finite");
                *p = p.add(&jitter);
            }
        }
    }

    let final_gradient = path_energy_gradient(&points, ctx)
        .iter()
        .map(|g| g.norm())
        .fold(0.0, f64::max);
    let path = MomentumPath::new(points)?;
    let action = eikonal_action(&path, ctx)?;
    Ok(EikonalMinimum {
        path,
        action,
        geodesic_action: ctx.alpha() / ctx.p_e() * theta,
        iterations: total_iterations,
        final_gradient_norm: final_gradient,
    })
}

/// Armijo-backtracking descent on one grid level. Returns (iterations,
/// final gradient max-norm, stalled).
fn descend_level(
    points: &mut Vec<Momentum3>,
    ctx: &EnergyContext,
    grad_tol: f64,
) -> Result<(u64, f64, bool)> {
    let mut energy = path_energy(points, ctx);
    let mut step: Option<f64> = None;
    let mut plateau = 0u32;
    let mut iterations = 0u64;
    let mut grad_max = f64::INFINITY;

    while iterations < MAX_LEVEL_ITERATIONS {
        iterations += 1;
        let grad = path_energy_gradient(points, ctx);
        let grad_sq: f64 = grad.iter().map(|g| g.norm_squared()).sum();
        grad_max = grad
            .iter()
            .map(|g| g.norm())
            .fold(0.0, f64::max);
        if grad_max <= grad_tol {
            return Ok((iterations, grad_max, false));
        }
        let mut gamma = step.unwrap_or(0.25 * energy / grad_sq);

        let mut backtracks = 0u32;
        loop {
            let trial: Vec<Momentum3> = points
                .iter()
                .zip(grad.iter())
                .map(|(p, g)| p.add(&g.scaled(-gamma)))
                .collect();
            let trial_energy = path_energy(&trial, ctx);
            if trial_energy <= energy - ARMIJO_SLOPE * gamma * grad_sq {
                let drop = energy - trial_energy;
                *points = trial;
                if drop <= PLATEAU_REL * trial_energy.max(f64::MIN_POSITIVE) {
                    plateau += 1;
                } else {
                    plateau = 0;
                }
                energy = trial_energy;
                step = Some(gamma * STEP_GROW);
                break;
            }
            gamma *= STEP_SHRINK;
            backtracks += 1;
            if backtracks > 60 {
                return Ok((iterations, grad_max, true));
            }
        }
        if plateau >= PLATEAU_NEEDED {
            return Ok((iterations, grad_max, false));
        }
    }
    Ok((iterations, grad_max, false))
}

/// Phase-space sample of a Kepler trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeplerState {
    pub position: [f64; 3],
    pub momentum: [f64; 3],
    pub time: f64,
}

impl KeplerState {
    #[must_use]
    fn radius(&self) -> f64 {
        let [x, y, z] = self.position;
        (x * x + y * y + z * z).sqrt()
    }

    #[must_use]
    fn hamiltonian(&self, alpha: f64) -> f64 {
        let [px, py, pz] = self.momentum;
        (px * px + py * py + pz * pz) / 2.0 - alpha / self.radius()
    }
}

/// A simulated bound orbit with its analytic elements and conservation
/// diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeplerOrbit {
    pub states: Vec<KeplerState>,
    pub angular_momentum: f64,
    pub semi_major_axis: f64,
    pub eccentricity: f64,
    pub period: f64,
    pub perihelion_radius: f64,
    /// secular error |H(t_end) - E| at the final state; the symplectic
    /// integrator keeps this near machine precision
    pub energy_drift: f64,
    /// max |H(t) - E| along the trajectory (reversible leapfrog
    /// oscillation, largest near perihelion)
    pub energy_oscillation: f64,
}

/// Fraction of the predicted perihelion below which the integrator is
/// declared to have crashed into the center.
const COLLISION_GUARD_FRACTION: f64 = 0.01;

/// Integrates a bound Kepler orbit with the kick-drift-kick leapfrog,
/// starting at perihelion in the xy plane and covering `duration` in steps
/// of `dt` (the step count is rounded, so the final time is the nearest
/// multiple of `dt`). The angular momentum must lie in (0, alpha / p_E];
/// the upper limit is the circular orbit.
pub fn simulate_kepler(
    ctx: &EnergyContext,
    angular_momentum: f64,
    duration: f64,
    dt: f64,
) -> Result<KeplerOrbit> {
    let alpha = ctx.alpha();
    let energy = ctx.energy();
    let l_max = alpha / ctx.p_e();
    if !(angular_momentum.is_finite() && angular_momentum > 0.0)
        || angular_momentum > l_max * (1.0 + 1e-12)
    {
        return Err(CoulombError::InvalidAngularMomentum {
            l: angular_momentum,
            max: l_max,
            energy,
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(CoulombError::InvalidTimeStep { dt });
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(CoulombError::InvalidTimeStep { dt: duration });
    }
    let steps = ((duration / dt).round() as usize).max(1);

    let a = -alpha / (2.0 * energy);
    let ecc_sq = 1.0 + 2.0 * energy * angular_momentum * angular_momentum / (alpha * alpha);
    let eccentricity = ecc_sq.max(0.0).sqrt();
    let perihelion = a * (1.0 - eccentricity);
    let period = 2.0 * std::f64::consts::PI * (a * a * a / alpha).sqrt();
    let guard = COLLISION_GUARD_FRACTION * perihelion;

    let mut x = [perihelion, 0.0, 0.0];
    let mut p = [0.0, angular_momentum / perihelion, 0.0];
    let mut states = Vec::with_capacity(steps + 1);
    states.push(KeplerState {
        position: x,
        momentum: p,
        time: 0.0,
    });

    let force = |x: &[f64; 3]| -> Result<[f64; 3]> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r < guard {
            return Err(CoulombError::OrbitCollision { r, guard });
        }
        let s = -alpha / (r * r * r);
        Ok([s * x[0], s * x[1], s * x[2]])
    };

    let mut f = force(&x)?;
    for step in 1..=steps {
        let p_half = [
            p[0] + 0.5 * dt * f[0],
            p[1] + 0.5 * dt * f[1],
            p[2] + 0.5 * dt * f[2],
        ];
        x = [
            x[0] + dt * p_half[0],
            x[1] + dt * p_half[1],
            x[2] + dt * p_half[2],
        ];
        f = force(&x)?;
        p = [
            p_half[0] + 0.5 * dt * f[0],
            p_half[1] + 0.5 * dt * f[1],
            p_half[2] + 0.5 * dt * f[2],
        ];
        states.push(KeplerState {
            position: x,
            momentum: p,
            time: step as f64 * dt,
        });
    }

    let energy_oscillation = states
        .iter()
        .map(|s| (s.hamiltonian(alpha) - energy).abs())
        .fold(0.0, f64::max);
    let energy_drift = (states
        .last()
        .expect("at least the initial state is stored")
        .hamiltonian(alpha)
        - energy)
        .abs();

    Ok(KeplerOrbit {
        states,
        angular_momentum,
        semi_major_axis: a,
        eccentricity,
        period,
        perihelion_radius: perihelion,
        energy_drift,
        energy_oscillation,
    })
}

/// Circle fitted through the momentum samples of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HodographCircle {
    pub center: [f64; 2],
    pub radius: f64,
    pub rms_residual: f64,
}

/// Least-squares circle through the (p_x, p_y) samples (algebraic fit via
/// the normal equations). A bound orbit's momentum must land on a circle of
/// radius alpha / L centered alpha e / L from the origin.
pub fn fit_hodograph(states: &[KeplerState]) -> Result<HodographCircle> {
    if states.len() < 3 {
        return Err(CoulombError::PathTooShort {
            actual: states.len(),
            minimum: 3,
        });
    }
    // normal equations for |p|^2 + D px + E py + F = 0
    let mut m = [[0.0_f64; 3]; 3];
    let mut rhs = [0.0_f64; 3];
    for s in states {
        let [px, py, _] = s.momentum;
        let sq = px * px + py * py;
        let row = [px, py, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] -= sq * row[i];
        }
    }
    let sol = solve_3x3(&m, &rhs).ok_or(CoulombError::NonFinite {
        what: "hodograph circle fit",
    })?;
    let center = [-sol[0] / 2.0, -sol[1] / 2.0];
    let radius_sq = center[0] * center[0] + center[1] * center[1] - sol[2];
    if !(radius_sq.is_finite() && radius_sq > 0.0) {
        return Err(CoulombError::NonFinite {
            what: "hodograph circle fit",
        });
    }
    let radius = radius_sq.sqrt();
    let mut residual_sq = 0.0;
    for s in states {
        let [px, py, _] = s.momentum;
        let dist = ((px - center[0]).powi(2) + (py - center[1]).powi(2)).sqrt();
        residual_sq += (dist - radius) * (dist - radius);
    }
    Ok(HodographCircle {
        center,
        radius,
        rms_residual: (residual_sq / states.len() as f64).sqrt(),
    })
}

fn solve_3x3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < f64::MIN_POSITIVE * 1e10 || !det.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for col in 0..3 {
        let mut cramer = *m;
        for row in 0..3 {
            cramer[row][col] = rhs[row];
        }
        let det_col = cramer[0][0] * (cramer[1][1] * cramer[2][2] - cramer[1][2] * cramer[2][1])
            - cramer[0][1] * (cramer[1][0] * cramer[2][2] - cramer[1][2] * cramer[2][0])
            + cramer[0][2] * (cramer[1][0] * cramer[2][1] - cramer[1][1] * cramer[2][0]);
        out[col] = det_col / det;
    }
    if out.iter().all(|v| v.is_finite()) {
        Some(out)
    } else {
        None
    }
}

/// The two discrete forms of the classical phase along an orbit arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionComparison {
    /// -sum dp . xbar over the stored states
    pub position_form: f64,
    /// metric form over the momentum polyline
    pub momentum_form: f64,
    pub difference: f64,
}

/// Evaluates `-sum dp . xbar` along the orbit samples and compares it with
/// the metric form of the phase on the same momentum polyline. On the
/// energy shell p^2 + p_E^2 = 2 alpha / r the two integrands coincide, so
/// the discrete forms must agree up to integration error.
pub fn eikonal_along_orbit(states: &[KeplerState], ctx: &EnergyContext) -> Result<ActionComparison> {
    if states.len() < 2 {
        return Err(CoulombError::PathTooShort {
            actual: states.len(),
            minimum: 2,
        });
    }
    let mut position_form = 0.0;
    for pair in states.windows(2) {
        let dp = [
            pair[1].momentum[0] - pair[0].momentum[0],
            pair[1].momentum[1] - pair[0].momentum[1],
            pair[1].momentum[2] - pair[0].momentum[2],
        ];
        let xbar = [
            (pair[1].position[0] + pair[0].position[0]) / 2.0,
            (pair[1].position[1] + pair[0].position[1]) / 2.0,
            (pair[1].position[2] + pair[0].position[2]) / 2.0,
        ];
        position_form -= dp[0] * xbar[0] + dp[1] * xbar[1] + dp[2] * xbar[2];
    }
    let momenta: Vec<Momentum3> = states
        .iter()
        .map(|s| Momentum3::from_array(s.momentum))
        .collect::<Result<_>>()?;
    let momentum_form = eikonal_action(&MomentumPath::new(momenta)?, ctx)?;
    Ok(ActionComparison {
        position_form,
        momentum_form,
        difference: position_form - momentum_form,
    })
}
