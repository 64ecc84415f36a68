//! Hyperspherical harmonics on the unit 3-sphere, organized by the hydrogen
//! quantum numbers (n, l, m).
//!
//! A sphere point is read as an SU(2) element through the unit-quaternion
//! embedding `u = pi_4 1 + i vec(pi) . sigma`; the harmonics for principal
//! number n = 2j + 1 are Clebsch-Gordan recombinations of the spin-j matrix
//! elements,
//!
//! ```text
//! Y_{nlm}(pi) = sqrt(n / 2 pi^2) sum_{m1+m2=m} (j,m1; j,m2 | l,m) D^j_{m1 m2}(u).
//! ```
//!
//! Because the Clebsch-Gordan matrix is orthogonal over the (m1, m2) index,
//! the Y inherit orthonormality from the matrix elements and satisfy the
//! addition theorem
//!
//! ```text
//! sum_{l,m} conj(Y_{nlm}(pi_b)) Y_{nlm}(pi_a) = (n^2 / 2 pi^2) P_n(cos theta),
//! ```
//!
//! with `P_n(cos theta) = sin(n theta) / (n sin theta)` the four-dimensional
//! Legendre analog and theta the great-circle angle between the points.

use num_complex::Complex64;

use crate::error::{CoulombError, Result};
use crate::quadrature::S3Grid;
use crate::sphere::SpherePoint4;
use crate::wigner::{clebsch_gordan, wigner_d, SU2Element, SpinLabel};

/// Principal, orbital and magnetic quantum numbers with the hydrogen ranges
/// n >= 1, 0 <= l <= n-1, -l <= m <= l.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumNumbers {
    n: u32,
    l: u32,
    m: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if n < 1 || l > n - 1 || m.unsigned_abs() > l {
            return Err(CoulombError::InvalidQuantumNumbers {
                n,
                l,
                m: m as i64,
            });
        }
        Ok(QuantumNumbers { n, l, m })
    }

    #[must_use]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[must_use]
    pub fn l(&self) -> u32 {
        self.l
    }

    #[must_use]
    pub fn m(&self) -> i32 {
        self.m
    }

    /// Doubled spin of the underlying representation, 2j = n - 1.
    #[must_use]
    pub fn two_j(&self) -> i32 {
        self.n as i32 - 1
    }
}

/// Unit-quaternion embedding of a sphere point,
/// `u = pi_4 1 + i (pi_1 s1 + pi_2 s2 + pi_3 s3)`.
#[must_use]
pub fn su2_from_sphere(pi: &SpherePoint4) -> SU2Element {
    let [x, y, z] = pi.vec3();
    let w = pi.w();
    SU2Element::new(
        Complex64::new(w, z),
        Complex64::new(y, x),
        Complex64::new(-y, x),
        Complex64::new(w, -z),
    )
    .expect("unit 4-vector always embeds in SU(2)")
}

/// Four-dimensional Legendre analog `P_n(cos theta) = sin(n theta) / (n sin theta)`.
///
/// Near the poles (|sin theta| < 1e-6) the quotient is evaluated through the
/// Chebyshev recurrence for `U_{n-1}(cos theta)`, which is exact in the limit
/// and avoids 0/0.
pub fn legendre4(n: u32, cos_theta: f64) -> Result<f64> {
    if n < 1 {
        return Err(CoulombError::InvalidQuantumNumbers { n, l: 0, m: 0 });
    }
    if !cos_theta.is_finite() {
        return Err(CoulombError::NonFinite { what: "cos_theta" });
    }
    let x = cos_theta.clamp(-1.0, 1.0);
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    if sin_theta < 1e-6 {
        // U_{n-1}(x) / n by the three-term recurrence
        let mut u_prev = 1.0; // U_0
        if n == 1 {
            return Ok(1.0);
        }
        let mut u = 2.0 * x; // U_1
        for _ in 2..n {
            let next = 2.0 * x * u - u_prev;
            u_prev = u;
            u = next;
        }
        return Ok(u / n as f64);
    }
    let theta = x.acos();
    Ok((n as f64 * theta).sin() / (n as f64 * sin_theta))
}

/// Character of the spin-j representation at separation angle theta:
/// `chi_n(theta) = sin(n theta) / sin(theta) = n P_n(cos theta)`, n = 2j + 1.
pub fn character(n: u32, cos_theta: f64) -> Result<f64> {
    Ok(n as f64 * legendre4(n, cos_theta)?)
}

/// Single harmonic `Y_{nlm}` at one sphere point.
pub fn hyperspherical_y(q: &QuantumNumbers, pi: &SpherePoint4) -> Result<Complex64> {
    let basis = HarmonicBasis::new(q.n)?;
    let values = basis.evaluate_all(pi)?;
    let idx = basis
        .labels
        .iter()
        .position(|label| label == q)
        .expect("basis enumerates every (l, m) of its shell");
    Ok(values[idx])
}

/// All harmonics of one principal shell, with the Clebsch-Gordan
/// recombination precomputed so repeated point evaluations only pay for the
/// representation matrix.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    n: u32,
    prefactor: f64,
    labels: Vec<QuantumNumbers>,
    // per label: (two_m1, two_m2, coefficient) with nonzero coefficient
    couplings: Vec<Vec<(i32, i32, f64)>>,
}

impl HarmonicBasis {
    pub fn new(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(CoulombError::InvalidQuantumNumbers { n, l: 0, m: 0 });
        }
        let two_j = n as i32 - 1;
        // constructing a probe label surfaces SpinTooLarge for oversized n
        SpinLabel::new(two_j, two_j, two_j)?;

        let mut labels = Vec::new();
        let mut couplings = Vec::new();
        for l in 0..n {
            for m in -(l as i32)..=(l as i32) {
                labels.push(QuantumNumbers::new(n, l, m)?);
                let mut terms = Vec::new();
                for two_m1 in (-two_j..=two_j).step_by(2) {
                    let two_m2 = 2 * m - two_m1;
                    if two_m2.abs() > two_j {
                        continue;
                    }
                    let cg = clebsch_gordan(
                        two_j,
                        two_m1,
                        two_j,
                        two_m2,
                        2 * l as i32,
                        2 * m,
                    )?;
                    if cg != 0.0 {
                        terms.push((two_m1, two_m2, cg));
                    }
                }
                couplings.push(terms);
            }
        }
        let prefactor = (n as f64 / (2.0 * std::f64::consts::PI * std::f64::consts::PI)).sqrt();
        Ok(HarmonicBasis {
            n,
            prefactor,
            labels,
            couplings,
        })
    }

    #[must_use]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[must_use]
    pub fn labels(&self) -> &[QuantumNumbers] {
        &self.labels
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Evaluates the whole shell at one point, aligned with [`labels`].
    ///
    /// [`labels`]: HarmonicBasis::labels
    pub fn evaluate_all(&self, pi: &SpherePoint4) -> Result<Vec<Complex64>> {
        let two_j = self.n as i32 - 1;
        let u = su2_from_sphere(pi);
        let dim = self.n as usize;
        // full representation matrix at this point, indexed by
        // ((two_j - two_m1)/2, (two_j - two_m2)/2)
        let mut d = vec![Complex64::new(0.0, 0.0); dim * dim];
        for two_m1 in (-two_j..=two_j).step_by(2) {
            for two_m2 in (-two_j..=two_j).step_by(2) {
                let label = SpinLabel::new(two_j, two_m1, two_m2)?;
                let row = ((two_j - two_m1) / 2) as usize;
                let col = ((two_j - two_m2) / 2) as usize;
                d[row * dim + col] = wigner_d(&label, &u)?;
            }
        }
        Ok(self
            .couplings
            .iter()
            .map(|terms| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(two_m1, two_m2, cg) in terms {
                    let row = ((two_j - two_m1) / 2) as usize;
                    let col = ((two_j - two_m2) / 2) as usize;
                    acc += cg * d[row * dim + col];
                }
                self.prefactor * acc
            })
            .collect())
    }
}

/// Residual of the shell-sum identity
/// `|sum_{l,m} conj(Y_{nlm}(pi_b)) Y_{nlm}(pi_a) - (n^2/2pi^2) P_n(cos theta)|`.
pub fn addition_theorem_residual(
    n: u32,
    pi_b: &SpherePoint4,
    pi_a: &SpherePoint4,
) -> Result<f64> {
    let basis = HarmonicBasis::new(n)?;
    let yb = basis.evaluate_all(pi_b)?;
    let ya = basis.evaluate_all(pi_a)?;
    let lhs: Complex64 = yb.iter().zip(ya.iter()).map(|(b, a)| b.conj() * a).sum();
    let cos_theta = pi_b.dot(pi_a);
    let rhs = (n as f64).powi(2) / (2.0 * std::f64::consts::PI * std::f64::consts::PI)
        * legendre4(n, cos_theta)?;
    Ok((lhs - rhs).norm())
}

/// Gram matrix of every harmonic with principal number up to `n_max`,
/// integrated on an [`S3Grid`] of the given resolution. Entry order follows
/// the concatenated shell labels (n ascending, then l, then m).
pub fn gram_matrix(n_max: u32, resolution: usize) -> Result<(Vec<QuantumNumbers>, Vec<Vec<Complex64>>)> {
    let shells: Vec<HarmonicBasis> = (1..=n_max)
        .map(HarmonicBasis::new)
        .collect::<Result<_>>()?;
    let labels: Vec<QuantumNumbers> = shells
        .iter()
        .flat_map(|b| b.labels().iter().copied())
        .collect();
    let dim = labels.len();
    let grid = S3Grid::new(resolution)?;
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (point, &weight) in grid.points().iter().zip(grid.weights()) {
        let mut values = Vec::with_capacity(dim);
        for shell in &shells {
            values.extend(shell.evaluate_all(point)?);
        }
        for (i, vi) in values.iter().enumerate() {
            for (j, vj) in values.iter().enumerate() {
                gram[i][j] += weight * vi.conj() * vj;
            }
        }
    }
    Ok((labels, gram))
}

/// Largest absolute deviation of the Gram matrix from the identity.
pub fn gram_identity_deviation(n_max: u32, resolution: usize) -> Result<f64> {
    let (_, gram) = gram_matrix(n_max, resolution)?;
    let mut worst: f64 = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((entry - expect).norm());
        }
    }
    Ok(worst)
}
