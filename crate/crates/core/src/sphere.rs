//! Stereographic geometry between momentum space and the unit 3-sphere.
//!
//! At fixed E < 0 the map sends a 3-momentum p to
//!
//! ```text
//! pi_vec = 2 p_E p / (p^2 + p_E^2),    pi_4 = (p^2 - p_E^2) / (p^2 + p_E^2),
//! ```
//!
//! so p = 0 lands on the south pole (pi_4 = -1), |p| = p_E on the equator,
//! and |p| -> infinity approaches the north pole. The metric it induces is
//! conformally flat with factor 4/(p^2 + p_E^2)^2, and the volume element of
//! the sphere pulls back to 8 p_E^3/(p^2 + p_E^2)^3 d^3p, integrating to the
//! total surface 2 pi^2.

use crate::energy::{EnergyContext, Momentum3};
use crate::error::{CoulombError, Result};
use crate::quadrature::GaussLegendre;

/// How far off the unit sphere a constructed point may be, in |norm^2 - 1|.
pub const SPHERE_TOLERANCE: f64 = 1e-12;

/// Threshold on 1 - pi_4 below which a point counts as the north pole
/// (image of infinite momentum).
pub const NORTH_POLE_TOLERANCE: f64 = 1e-14;

/// A point on the unit sphere S^3, stored as the 3-vector part and the
/// fourth component. Constructors renormalize, so the unit-norm invariant
/// holds exactly up to floating-point rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint4 {
    vec: [f64; 3],
    w: f64,
}

impl SpherePoint4 {
    /// Accepts components within `SPHERE_TOLERANCE` of unit norm (squared)
    /// and renormalizes them onto the sphere.
    pub fn new(vec: [f64; 3], w: f64) -> Result<Self> {
        if !(vec[0].is_finite() && vec[1].is_finite() && vec[2].is_finite() && w.is_finite()) {
            return Err(CoulombError::NonFinite {
                what: "sphere point component",
            });
        }
        let norm_sq = vec[0] * vec[0] + vec[1] * vec[1] + vec[2] * vec[2] + w * w;
        let deviation = (norm_sq - 1.0).abs();
        if deviation > SPHERE_TOLERANCE {
            return Err(CoulombError::OffSphere {
                x: vec[0],
                y: vec[1],
                z: vec[2],
                w,
                deviation,
            });
        }
        let inv = 1.0 / norm_sq.sqrt();
        Ok(SpherePoint4 {
            vec: [vec[0] * inv, vec[1] * inv, vec[2] * inv],
            w: w * inv,
        })
    }

    /// Normalizes an arbitrary nonzero 4-vector onto the sphere.
    pub fn from_unnormalized(vec: [f64; 3], w: f64) -> Result<Self> {
        if !(vec[0].is_finite() && vec[1].is_finite() && vec[2].is_finite() && w.is_finite()) {
            return Err(CoulombError::NonFinite {
                what: "sphere point component",
            });
        }
        let norm = (vec[0] * vec[0] + vec[1] * vec[1] + vec[2] * vec[2] + w * w).sqrt();
        if norm == 0.0 {
            return Err(CoulombError::NonFinite {
                what: "zero 4-vector cannot be normalized",
            });
        }
        Ok(SpherePoint4 {
            vec: [vec[0] / norm, vec[1] / norm, vec[2] / norm],
            w: w / norm,
        })
    }

    /// South pole (0, 0, 0, -1): image of p = 0.
    #[must_use]
    pub fn south_pole() -> Self {
        SpherePoint4 {
            vec: [0.0; 3],
            w: -1.0,
        }
    }

    /// North pole (0, 0, 0, 1): limit of |p| -> infinity.
    #[must_use]
    pub fn north_pole() -> Self {
        SpherePoint4 {
            vec: [0.0; 3],
            w: 1.0,
        }
    }

    #[must_use]
    pub fn vec3(&self) -> [f64; 3] {
        self.vec
    }

    #[must_use]
    pub fn w(&self) -> f64 {
        self.w
    }

    #[must_use]
    pub fn as_array(&self) -> [f64; 4] {
        [self.vec[0], self.vec[1], self.vec[2], self.w]
    }

    /// Euclidean inner product of the embedding 4-vectors; equals the cosine
    /// of the geodesic separation.
    #[must_use]
    pub fn dot(&self, other: &SpherePoint4) -> f64 {
        self.vec[0] * other.vec[0]
            + self.vec[1] * other.vec[1]
            + self.vec[2] * other.vec[2]
            + self.w * other.w
    }

    /// Geodesic separation angle in [0, pi].
    #[must_use]
    pub fn angle_to(&self, other: &SpherePoint4) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

/// Stereographic image of a momentum on the unit sphere.
#[must_use]
pub fn project(p: &Momentum3, ctx: &EnergyContext) -> SpherePoint4 {
    let pe = ctx.p_e();
    let p_sq = p.norm_squared();
    let denom = p_sq + pe * pe;
    let scale = 2.0 * pe / denom;
    let c = p.components();
    SpherePoint4 {
        vec: [c[0] * scale, c[1] * scale, c[2] * scale],
        w: (p_sq - pe * pe) / denom,
    }
}

/// Inverse stereographic map. Fails on the north pole, whose preimage is
/// infinite momentum.
///
/// Algebraically p = p_E pi_vec/(1 - pi_4); to keep full relative precision
/// on both hemispheres the evaluation switches between that form (south,
/// where 1 - pi_4 is large) and the equivalent
/// p = p_E pi_vec (1 + pi_4)/|pi_vec|^2 (north, where 1 + pi_4 is large).
pub fn unproject(point: &SpherePoint4, ctx: &EnergyContext) -> Result<Momentum3> {
    let w = point.w();
    if 1.0 - w <= NORTH_POLE_TOLERANCE {
        return Err(CoulombError::PointAtInfinity { pi4: w });
    }
    let v = point.vec3();
    let pe = ctx.p_e();
    let scale = if w <= 0.0 {
        pe / (1.0 - w)
    } else {
        let v_sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if v_sq == 0.0 {
            return Err(CoulombError::PointAtInfinity { pi4: w });
        }
        pe * (1.0 + w) / v_sq
    };
    Momentum3::new(v[0] * scale, v[1] * scale, v[2] * scale)
}

/// Geodesic separation angle on the sphere between the images of two
/// momenta, computed directly from the momenta:
///
/// ```text
/// cos theta = [(p_b^2 - p_E^2)(p_a^2 - p_E^2) + 4 p_E^2 p_b . p_a]
///             / [(p_b^2 + p_E^2)(p_a^2 + p_E^2)]
/// ```
///
/// clamped into [-1, 1] before the arccosine.
#[must_use]
pub fn invariant_angle(p_b: &Momentum3, p_a: &Momentum3, ctx: &EnergyContext) -> f64 {
    let pe_sq = ctx.p_e() * ctx.p_e();
    let b_sq = p_b.norm_squared();
    let a_sq = p_a.norm_squared();
    let num = (b_sq - pe_sq) * (a_sq - pe_sq) + 4.0 * pe_sq * p_b.dot(p_a);
    let den = (b_sq + pe_sq) * (a_sq + pe_sq);
    (num / den).clamp(-1.0, 1.0).acos()
}

/// Jacobian density of the sphere's volume element against d^3p:
/// 8 p_E^3 / (p^2 + p_E^2)^3.
#[must_use]
pub fn measure_density(p: &Momentum3, ctx: &EnergyContext) -> f64 {
    let pe = ctx.p_e();
    let denom = p.norm_squared() + pe * pe;
    8.0 * pe * pe * pe / (denom * denom * denom)
}

/// Conformal metric factor 4/(p^2 + p_E^2)^2: squared sphere displacements
/// obey |d pi|^2 = p_E^2 * metric_factor * |dp|^2.
#[must_use]
pub fn metric_factor(p: &Momentum3, ctx: &EnergyContext) -> f64 {
    let pe = ctx.p_e();
    let denom = p.norm_squared() + pe * pe;
    4.0 / (denom * denom)
}

/// Integral of `measure_density` over all of momentum space, evaluated by
/// Gauss-Legendre quadrature after compactifying the radial direction with
/// |p| = p_E tan(chi/2), chi in [0, pi). The exact value is the total
/// surface 2 pi^2 of the unit 3-sphere.
pub fn measure_integral(ctx: &EnergyContext, radial_points: usize) -> Result<f64> {
    if radial_points < 4 {
        return Err(CoulombError::ResolutionTooLow {
            resolution: radial_points,
            minimum: 4,
        });
    }
    let rule = GaussLegendre::new(radial_points)?;
    let pe = ctx.p_e();
    let mut total = 0.0;
    for (chi, w) in rule.mapped(0.0, std::f64::consts::PI) {
        let half = 0.5 * chi;
        let radius = pe * (half.tan());
        // d^3p = 4 pi p^2 dp with dp = (p_E/2) sec^2(chi/2) dchi
        let p = Momentum3::new(radius, 0.0, 0.0).expect("finite radial momentum");
        let sec_sq = 1.0 / (half.cos() * half.cos());
        let jac = 4.0 * std::f64::consts::PI * radius * radius * 0.5 * pe * sec_sq;
        total += w * measure_density(&p, ctx) * jac;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> EnergyContext {
        EnergyContext::new(-0.5, 1.0).unwrap()
    }

    #[test]
    fn zero_momentum_maps_to_south_pole() {
        let pt = project(&Momentum3::zero(), &ctx());
        assert_eq!(pt.w(), -1.0);
        assert_eq!(pt.vec3(), [0.0; 3]);
    }

    #[test]
    fn equatorial_momentum_has_zero_fourth_component() {
        let c = ctx();
        let p = Momentum3::new(c.p_e(), 0.0, 0.0).unwrap();
        let pt = project(&p, &c);
        assert!(pt.w().abs() < 1e-15, "pi_4 = {}", pt.w());
        assert!((pt.vec3()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn huge_momentum_approaches_north_pole() {
        let c = ctx();
        let p = Momentum3::new(1e6 * c.p_e(), 0.0, 0.0).unwrap();
        let pt = project(&p, &c);
        assert!(
            (pt.w() - 1.0).abs() < 1e-11,
            "pi_4 = {} should be within 1e-11 of 1",
            pt.w()
        );
    }

    #[test]
    fn projection_lands_on_unit_sphere() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let p = Momentum3::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            )
            .unwrap();
            let pt = project(&p, &c);
            let a = pt.as_array();
            let norm_sq: f64 = a.iter().map(|x| x * x).sum();
            assert!(
                (norm_sq - 1.0).abs() < 1e-14,
                "norm^2 = {norm_sq} for p = {:?}",
                p.components()
            );
        }
    }

    #[test]
    fn round_trip_keeps_eleven_digits_over_six_decades() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            // |p| log-uniform in [1e-3, 1e3] * p_E
            let mag = c.p_e() * 10f64.powf(rng.gen_range(-3.0..3.0));
            let dir: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
            if n < 1e-3 {
                continue;
            }
            let p = Momentum3::new(dir[0] / n * mag, dir[1] / n * mag, dir[2] / n * mag).unwrap();
            let back = unproject(&project(&p, &c), &c).unwrap();
            let err = back.sub(&p).norm() / p.norm();
            worst = worst.max(err);
        }
        assert!(
            worst < 1e-11,
            "worst relative round-trip error {worst:.3e} exceeds 1e-11"
        );
    }

    #[test]
    fn unproject_rejects_north_pole() {
        let c = ctx();
        assert!(matches!(
            unproject(&SpherePoint4::north_pole(), &c),
            Err(CoulombError::PointAtInfinity { .. })
        ));
        let nearly = SpherePoint4::new([1e-8, 0.0, 0.0], (1.0f64 - 1e-16).min(1.0)).unwrap();
        // within 1e-14 of the pole counts as the pole
        assert!(matches!(
            unproject(&nearly, &c),
            Err(CoulombError::PointAtInfinity { .. })
        ));
    }

    #[test]
    fn south_pole_unprojects_to_zero() {
        let c = ctx();
        let p = unproject(&SpherePoint4::south_pole(), &c).unwrap();
        assert_eq!(p.components(), [0.0; 3]);
    }

    #[test]
    fn off_sphere_constructor_rejects() {
        assert!(matches!(
            SpherePoint4::new([0.5, 0.0, 0.0], 0.5),
            Err(CoulombError::OffSphere { .. })
        ));
    }

    #[test]
    fn angle_between_south_pole_and_equator_is_right() {
        let c = ctx();
        let th = invariant_angle(
            &Momentum3::zero(),
            &Momentum3::new(c.p_e(), 0.0, 0.0).unwrap(),
            &c,
        );
        assert!(
            (th - std::f64::consts::FRAC_PI_2).abs() < 1e-14,
            "theta = {th}"
        );
    }

    #[test]
    fn invariant_angle_matches_projected_angle() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let pa = Momentum3::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            )
            .unwrap();
            let pb = Momentum3::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            )
            .unwrap();
            let direct = invariant_angle(&pb, &pa, &c);
            let via_sphere = project(&pb, &c).angle_to(&project(&pa, &c));
            assert!(
                (direct - via_sphere).abs() < 1e-16_f64.max(1e-7 * direct.abs()).max(1e-12),
                "direct {direct} vs projected {via_sphere}"
            );
        }
    }

    #[test]
    fn measure_density_reference_values() {
        let c = ctx();
        let pe = c.p_e();
        let at_origin = measure_density(&Momentum3::zero(), &c);
        assert!(
            (at_origin - 8.0 / pe.powi(3)).abs() < 1e-14,
            "density(0) = {at_origin}"
        );
        let on_equator = measure_density(&Momentum3::new(pe, 0.0, 0.0).unwrap(), &c);
        assert!(
            (on_equator - 1.0 / pe.powi(3)).abs() < 1e-14,
            "density(p_E) = {on_equator}"
        );
    }

    #[test]
    fn metric_factor_reference_values_and_density_identity() {
        let c = ctx();
        let pe = c.p_e();
        let at_origin = metric_factor(&Momentum3::zero(), &c);
        assert!((at_origin - 4.0 / pe.powi(4)).abs() < 1e-14);
        let on_equator = metric_factor(&Momentum3::new(pe, 0.0, 0.0).unwrap(), &c);
        assert!((on_equator - 1.0 / pe.powi(4)).abs() < 1e-14);

        // measure_density = p_E^3 * metric_factor^(3/2)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = Momentum3::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            )
            .unwrap();
            let lhs = measure_density(&p, &c);
            let rhs = pe.powi(3) * metric_factor(&p, &c).powf(1.5);
            assert!(
                ((lhs - rhs) / lhs).abs() < 1e-14,
                "identity violated at {:?}: {lhs} vs {rhs}",
                p.components()
            );
        }
    }

    #[test]
    fn metric_factor_matches_finite_difference_displacement() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = Momentum3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            )
            .unwrap();
            let h = 1e-6;
            let dp = Momentum3::new(
                h * rng.gen_range(-1.0..1.0),
                h * rng.gen_range(-1.0..1.0),
                h * rng.gen_range(-1.0..1.0),
            )
            .unwrap();
            let a = project(&p, &c).as_array();
            let b = project(&p.add(&dp), &c).as_array();
            let dpi_sq: f64 = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (y - x) * (y - x))
                .sum();
            let predicted = c.p_e() * c.p_e() * metric_factor(&p, &c) * dp.norm_squared();
            if predicted == 0.0 {
                continue;
            }
            let rel = (dpi_sq / predicted - 1.0).abs();
            assert!(
                rel < 1e-4,
                "|dpi|^2 = {dpi_sq:.6e} vs p_E^2 g |dp|^2 = {predicted:.6e} (rel {rel:.2e})"
            );
        }
    }

    #[test]
    fn measure_integral_gives_total_surface() {
        let c = ctx();
        let exact = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        let got = measure_integral(&c, 64).unwrap();
        assert!(
            ((got - exact) / exact).abs() < 1e-12,
            "integral {got} vs 2 pi^2 = {exact}"
        );
        // p_E-independence
        let c2 = EnergyContext::new(-0.03, 2.0).unwrap();
        let got2 = measure_integral(&c2, 64).unwrap();
        assert!(((got2 - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn measure_integral_rejects_tiny_resolution() {
        assert!(matches!(
            measure_integral(&ctx(), 2),
            Err(CoulombError::ResolutionTooLow { .. })
        ));
    }
}
