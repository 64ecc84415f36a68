//! Quadrature rules used across the crate: Gauss-Legendre nodes and weights
//! on [-1, 1] (Newton iteration on the three-term recurrence), plus grids for
//! the unit 3-sphere in hyperspherical coordinates
//!
//! ```text
//! pi = (sin chi sin beta cos gamma, sin chi sin beta sin gamma,
//!       sin chi cos beta, cos chi),
//! dOmega_3 = sin^2(chi) dchi  sin(beta) dbeta  dgamma,
//! ```
//!
//! with Gauss-Legendre in chi and in cos(beta) and a uniform periodic rule
//! in gamma. Total surface: 2 pi^2.

use crate::error::{CoulombError, Result};
use crate::sphere::SpherePoint4;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration from the Chebyshev-angle
    /// initial guess; converges to machine precision in a handful of steps.
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(CoulombError::ResolutionTooLow {
                resolution: n,
                minimum: 1,
            });
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x =
                (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        // ascending order
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| nodes[a].partial_cmp(&nodes[b]).unwrap());
        let nodes = idx.iter().map(|&i| nodes[i]).collect();
        let weights = idx.iter().map(|&i| weights[i]).collect();
        Ok(GaussLegendre { nodes, weights })
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[must_use]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[must_use]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights affinely mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature grid over the unit 3-sphere.
#[derive(Debug, Clone)]
pub struct S3Grid {
    points: Vec<SpherePoint4>,
    weights: Vec<f64>,
}

impl S3Grid {
    /// Grid with `resolution` points in each of the three coordinates.
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 4 {
            return Err(CoulombError::ResolutionTooLow {
                resolution,
                minimum: 4,
            });
        }
        let chi_rule = GaussLegendre::new(resolution)?;
        let cosb_rule = GaussLegendre::new(resolution)?;
        let n_gamma = resolution;
        let gamma_weight = 2.0 * std::f64::consts::PI / n_gamma as f64;

        let mut points = Vec::with_capacity(resolution * resolution * n_gamma);
        let mut weights = Vec::with_capacity(points.capacity());
        for (chi, w_chi) in chi_rule.mapped(0.0, std::f64::consts::PI) {
            let (sin_chi, cos_chi) = chi.sin_cos();
            let w_chi_full = w_chi * sin_chi * sin_chi;
            for (&cos_beta, &w_beta) in cosb_rule.nodes().iter().zip(cosb_rule.weights()) {
                let sin_beta = (1.0 - cos_beta * cos_beta).max(0.0).sqrt();
                for k in 0..n_gamma {
                    let gamma = gamma_weight * k as f64;
                    let (sin_gamma, cos_gamma) = gamma.sin_cos();
                    let point = SpherePoint4::new(
                        [
                            sin_chi * sin_beta * cos_gamma,
                            sin_chi * sin_beta * sin_gamma,
                            sin_chi * cos_beta,
                        ],
                        cos_chi,
                    )
                    .expect("trigonometric construction stays on the sphere");
                    points.push(point);
                    weights.push(w_chi_full * w_beta * gamma_weight);
                }
            }
        }
        Ok(S3Grid { points, weights })
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[must_use]
    pub fn points(&self) -> &[SpherePoint4] {
        &self.points
    }

    #[must_use]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(&SpherePoint4) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(self.weights.iter())
            .map(|(p, &w)| w * f(p))
            .sum()
    }
}

/// Integral over S^3 with an error estimate from doubling the resolution.
/// Returns the doubled-resolution value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

pub fn s3_quadrature<F: FnMut(&SpherePoint4) -> f64>(
    mut f: F,
    resolution: usize,
) -> Result<QuadratureEstimate> {
    let coarse = S3Grid::new(resolution)?.integrate(&mut f);
    let fine = S3Grid::new(2 * resolution)?.integrate(&mut f);
    Ok(QuadratureEstimate {
        value: fine,
        error_estimate: (fine - coarse).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8).unwrap();
        // degree 15 is the exactness limit for 8 nodes
        let got = rule.integrate(-1.0, 1.0, |x| x.powi(14));
        let exact = 2.0 / 15.0;
        assert!(
            (got - exact).abs() < 1e-15,
            "int x^14 = {got} vs {exact}"
        );
        let got = rule.integrate(0.0, 3.0, |x| 5.0 * x.powi(3) - x + 2.0);
        let exact = 5.0 * 81.0 / 4.0 - 9.0 / 2.0 + 6.0;
        assert!((got - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn gauss_legendre_weights_sum_to_interval_length() {
        for n in [1, 2, 5, 33, 64, 128] {
            let rule = GaussLegendre::new(n).unwrap();
            let s: f64 = rule.weights().iter().sum();
            assert!(
                (s - 2.0).abs() < 1e-13,
                "weights for n = {n} sum to {s}"
            );
            for pair in rule.nodes().windows(2) {
                assert!(pair[0] < pair[1], "nodes not ascending for n = {n}");
            }
        }
    }

    #[test]
    fn gauss_legendre_handles_smooth_transcendental() {
        let rule = GaussLegendre::new(32).unwrap();
        let got = rule.integrate(0.0, std::f64::consts::PI, |x| x.sin());
        assert!((got - 2.0).abs() < 1e-14, "int sin = {got}");
    }

    #[test]
    fn sphere_grid_total_weight_is_surface_area() {
        let grid = S3Grid::new(16).unwrap();
        let total: f64 = grid.weights().iter().sum();
        let exact = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        assert!(
            ((total - exact) / exact).abs() < 1e-13,
            "surface = {total} vs {exact}"
        );
    }

    #[test]
    fn sphere_quadrature_integrates_coordinate_polynomials() {
        // int pi_4^2 dOmega = 2 pi^2 / 4 by symmetry (each of the four
        // coordinates carries the same share of int |pi|^2 = total surface)
        let est = s3_quadrature(|p| p.w() * p.w(), 12).unwrap();
        let exact = std::f64::consts::PI * std::f64::consts::PI / 2.0;
        assert!(
            (est.value - exact).abs() < 1e-12,
            "int pi4^2 = {} vs {exact}",
            est.value
        );
        assert!(
            est.error_estimate < 1e-10,
            "estimate {} should reflect two already-exact sums",
            est.error_estimate
        );

        // odd moments vanish
        let est = s3_quadrature(|p| p.vec3()[0] * p.w() * p.w(), 12).unwrap();
        assert!(est.value.abs() < 1e-13);
    }

    #[test]
    fn sphere_quadrature_rejects_low_resolution() {
        assert!(matches!(
            s3_quadrature(|_| 1.0, 3),
            Err(CoulombError::ResolutionTooLow { .. })
        ));
    }
}
