//! Randomized invariants of the momentum-sphere map and its spectral
//! machinery.

use coulomb_s3::{
    clebsch_gordan, eikonal_action, invariant_angle, legendre4, measure_density, metric_factor,
    project, unproject, EnergyContext, Momentum3, MomentumPath,
};
use proptest::prelude::*;

fn energy_strategy() -> impl Strategy<Value = f64> {
    // log-uniform over a few decades of binding energy
    (-6.0..2.0f64).prop_map(|t| -(2.0f64.powf(t)) / 2.0)
}

fn momentum_strategy() -> impl Strategy<Value = (f64, f64, f64)> {
    let c = -40.0..40.0f64;
    (c.clone(), c.clone(), c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn projection_round_trips_through_the_sphere(
        energy in energy_strategy(),
        (x, y, z) in momentum_strategy(),
    ) {
        let ctx = EnergyContext::new(energy, 1.0).unwrap();
        let p = Momentum3::new(x, y, z).unwrap();
        let point = project(&p, &ctx);

        let norm_sq: f64 = point.vec3().iter().map(|v| v * v).sum::<f64>()
            + point.w() * point.w();
        prop_assert!((norm_sq - 1.0).abs() < 1e-12, "off sphere by {}", norm_sq - 1.0);

        let back = unproject(&point, &ctx).unwrap();
        let scale = p.norm().max(ctx.p_e());
        let err = back.sub(&p).norm() / scale;
        prop_assert!(err < 1e-12, "round trip error {err} at |p| = {}", p.norm());
    }

    #[test]
    fn invariant_angle_is_symmetric_and_vanishes_on_the_diagonal(
        energy in energy_strategy(),
        (ax, ay, az) in momentum_strategy(),
        (bx, by, bz) in momentum_strategy(),
    ) {
        let ctx = EnergyContext::new(energy, 1.0).unwrap();
        let a = Momentum3::new(ax, ay, az).unwrap();
        let b = Momentum3::new(bx, by, bz).unwrap();

        let forward = invariant_angle(&b, &a, &ctx);
        let backward = invariant_angle(&a, &b, &ctx);
        prop_assert!(
            (forward - backward).abs() < 1e-12,
            "angle asymmetry {forward} vs {backward}"
        );
        prop_assert!((0.0..=std::f64::consts::PI).contains(&forward));
        prop_assert!(invariant_angle(&a, &a, &ctx) < 1e-6, "self-angle not zero");

        // the sphere angle must agree with the dot product of the projections
        let dot = project(&b, &ctx).dot(&project(&a, &ctx)).clamp(-1.0, 1.0);
        prop_assert!(
            (forward - dot.acos()).abs() < 1e-6,
            "formula angle {forward} vs projected-dot angle {}",
            dot.acos()
        );
    }

    #[test]
    fn induced_distance_satisfies_the_triangle_inequality(
        energy in energy_strategy(),
        (ax, ay, az) in momentum_strategy(),
        (bx, by, bz) in momentum_strategy(),
        (cx, cy, cz) in momentum_strategy(),
    ) {
        let ctx = EnergyContext::new(energy, 1.0).unwrap();
        let a = Momentum3::new(ax, ay, az).unwrap();
        let b = Momentum3::new(bx, by, bz).unwrap();
        let c = Momentum3::new(cx, cy, cz).unwrap();

        let scale = ctx.alpha() / ctx.p_e();
        let d_ab = scale * invariant_angle(&a, &b, &ctx);
        let d_bc = scale * invariant_angle(&b, &c, &ctx);
        let d_ac = scale * invariant_angle(&a, &c, &ctx);
        let slack = d_ab + d_bc - d_ac;
        prop_assert!(
            slack >= -1e-6,
            "triangle violated by {slack} (legs {d_ab}, {d_bc}, span {d_ac})"
        );
    }

    #[test]
    fn measure_density_is_the_metric_volume(
        energy in energy_strategy(),
        (x, y, z) in momentum_strategy(),
    ) {
        let ctx = EnergyContext::new(energy, 1.0).unwrap();
        let p = Momentum3::new(x, y, z).unwrap();
        let density = measure_density(&p, &ctx);
        prop_assert!(density > 0.0);
        let from_metric = ctx.p_e().powi(3) * metric_factor(&p, &ctx).powf(1.5);
        let rel = (density - from_metric).abs() / density;
        prop_assert!(rel < 1e-12, "density {density} vs metric form {from_metric}");
    }

    #[test]
    fn four_dimensional_legendre_stays_bounded(
        n in 1u32..=64,
        x in -1.0..=1.0f64,
    ) {
        let value = legendre4(n, x).unwrap();
        prop_assert!(
            value.abs() <= 1.0 + 1e-12,
            "|P_{n}({x})| = {} exceeds 1",
            value.abs()
        );
        let at_one = legendre4(n, 1.0).unwrap();
        prop_assert!((at_one - 1.0).abs() < 1e-12, "P_{n}(1) = {at_one}");
    }

    #[test]
    fn coupling_coefficients_resolve_the_identity(
        two_j1 in 0i32..=5,
        two_j2 in 0i32..=5,
        m_index in 0usize..128,
    ) {
        // pick a valid total projection for the pair
        let m_values: Vec<(i32, i32)> = (-two_j1..=two_j1)
            .step_by(2)
            .flat_map(|m1| {
                (-two_j2..=two_j2)
                    .step_by(2)
                    .map(move |m2| (m1, m2))
            })
            .collect();
        let (two_m1, two_m2) = m_values[m_index % m_values.len()];
        let two_m = two_m1 + two_m2;

        let mut total = 0.0;
        let mut two_j = (two_j1 - two_j2).abs().max(two_m.abs());
        if (two_j + two_j1 + two_j2) % 2 != 0 {
            two_j += 1;
        }
        while two_j <= two_j1 + two_j2 {
            let cg = clebsch_gordan(two_j1, two_m1, two_j2, two_m2, two_j, two_m).unwrap();
            total += cg * cg;
            two_j += 2;
        }
        prop_assert!(
            (total - 1.0).abs() < 1e-10,
            "sum of squared couplings = {total} for j1 = {}/2, j2 = {}/2, m1 = {}/2, m2 = {}/2",
            two_j1, two_j2, two_m1, two_m2
        );
    }

    #[test]
    fn path_phase_is_reversal_invariant(
        energy in energy_strategy(),
        raw in prop::collection::vec(momentum_strategy(), 2..12),
    ) {
        let ctx = EnergyContext::new(energy, 1.0).unwrap();
        let points: Vec<Momentum3> = raw
            .iter()
            .map(|&(x, y, z)| Momentum3::new(x, y, z).unwrap())
            .collect();
        if let Ok(path) = MomentumPath::new(points.clone()) {
            let forward = eikonal_action(&path, &ctx).unwrap();
            prop_assert!(forward >= 0.0, "negative phase {forward}");
            let mut reversed_points = points;
            reversed_points.reverse();
            let reversed = MomentumPath::new(reversed_points).unwrap();
            let backward = eikonal_action(&reversed, &ctx).unwrap();
            let scale = forward.abs().max(1e-300);
            prop_assert!(
                ((forward - backward) / scale).abs() < 1e-12,
                "phase {forward} vs reversed {backward}"
            );
        }
    }
}
