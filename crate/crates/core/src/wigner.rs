//! SU(2) representation machinery: group elements, irreducible matrix
//! elements for arbitrary group elements (not just Euler-angle rotations),
//! and Clebsch-Gordan coefficients in the Condon-Shortley convention.
//!
//! All spin labels are carried as doubled integers (`two_j = 2j`) so that
//! half-integer representations need no floating-point bookkeeping.

use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{CoulombError, Result};

/// Largest supported doubled spin. Representation dimensions grow as 2j + 1
/// and the factorial tables below are sized for this bound.
pub const MAX_TWO_J: i32 = 64;

const LN_FACTORIAL_LEN: usize = 201;

fn ln_factorial_table() -> &'static [f64; LN_FACTORIAL_LEN] {
    static TABLE: OnceLock<[f64; LN_FACTORIAL_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; LN_FACTORIAL_LEN];
        for k in 1..LN_FACTORIAL_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// ln(n!) for n within the table range; callers guarantee the bound via
/// [`MAX_TWO_J`] and the triangle checks.
fn ln_factorial(n: i32) -> f64 {
    debug_assert!((0..LN_FACTORIAL_LEN as i32).contains(&n), "ln_factorial({n})");
    ln_factorial_table()[n as usize]
}

fn check_pair(two_j: i32, two_m: i32) -> Result<()> {
    if two_j < 0 || two_m.abs() > two_j || (two_j - two_m) % 2 != 0 {
        return Err(CoulombError::InvalidSpinLabel { two_j, two_m });
    }
    Ok(())
}

/// Row and column labels of one irreducible matrix element
/// `D^j_{m1 m2}`, all doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinLabel {
    two_j: i32,
    two_m1: i32,
    two_m2: i32,
}

impl SpinLabel {
    pub fn new(two_j: i32, two_m1: i32, two_m2: i32) -> Result<Self> {
        check_pair(two_j, two_m1)?;
        check_pair(two_j, two_m2)?;
        if two_j > MAX_TWO_J {
            return Err(CoulombError::SpinTooLarge {
                two_j,
                max: MAX_TWO_J,
            });
        }
        Ok(SpinLabel {
            two_j,
            two_m1,
            two_m2,
        })
    }

    #[must_use]
    pub fn two_j(&self) -> i32 {
        self.two_j
    }

    #[must_use]
    pub fn two_m1(&self) -> i32 {
        self.two_m1
    }

    #[must_use]
    pub fn two_m2(&self) -> i32 {
        self.two_m2
    }
}

/// A 2x2 special unitary matrix `[[a, b], [-conj(b), conj(a)]]`.
///
/// Stored as the full four entries; the constructor enforces the SU(2)
/// constraints to 1e-12 so downstream representation formulas may assume
/// exact group structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Element {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

const SU2_TOLERANCE: f64 = 1e-12;

impl SU2Element {
    /// Builds from all four entries, verifying `c = -conj(b)`, `d = conj(a)`
    /// and unit determinant.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        for z in [a, b, c, d] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(CoulombError::NonFinite {
                    what: "SU(2) entry",
                });
            }
        }
        let structure = (c + b.conj()).norm().max((d - a.conj()).norm());
        let det = a * d - b * c;
        let deviation = structure.max((det - Complex64::new(1.0, 0.0)).norm());
        if deviation > SU2_TOLERANCE {
            return Err(CoulombError::NotSpecialUnitary { deviation });
        }
        Ok(SU2Element { a, b, c, d })
    }

    /// Builds from the Cayley-Klein pair (top row); the bottom row is implied.
    pub fn from_cayley_klein(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(a, b, -b.conj(), a.conj())
    }

    #[must_use]
    pub fn identity() -> Self {
        SU2Element {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// Hermitian conjugate, which is also the group inverse.
    #[must_use]
    pub fn adjoint(&self) -> Self {
        SU2Element {
            a: self.a.conj(),
            b: self.c.conj(),
            c: self.b.conj(),
            d: self.d.conj(),
        }
    }

    /// Matrix product `self * other`.
    #[must_use]
    pub fn compose(&self, other: &Self) -> Self {
        SU2Element {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    #[must_use]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match (row, col) {
            (0, 0) => self.a,
            (0, 1) => self.b,
            (1, 0) => self.c,
            (1, 1) => self.d,
            _ => panic!("SU(2) index out of range: ({row}, {col})"),
        }
    }

    #[must_use]
    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }
}

/// Irreducible matrix element `D^j_{m1 m2}(g)` for an arbitrary group
/// element, via the polynomial expansion in the matrix entries
///
/// ```text
/// D^j_{m1 m2}(g) = sqrt((j+m1)!(j-m1)!(j+m2)!(j-m2)!)
///     * sum_r a^r b^(j+m1-r) c^(j+m2-r) d^(r-m1-m2)
///            / [ r! (j+m1-r)! (j+m2-r)! (r-m1-m2)! ],
/// ```
///
/// which reduces to the Kronecker delta at the identity and to the matrix
/// itself for j = 1/2, and is multiplicative under group composition because
/// it is the coefficient expansion of the symmetric tensor power.
pub fn wigner_d(label: &SpinLabel, g: &SU2Element) -> Result<Complex64> {
    let jp1 = (label.two_j + label.two_m1) / 2;
    let jm1 = (label.two_j - label.two_m1) / 2;
    let jp2 = (label.two_j + label.two_m2) / 2;
    let jm2 = (label.two_j - label.two_m2) / 2;
    let m1p2 = (label.two_m1 + label.two_m2) / 2;

    let ln_prefactor =
        0.5 * (ln_factorial(jp1) + ln_factorial(jm1) + ln_factorial(jp2) + ln_factorial(jm2));

    let r_min = m1p2.max(0);
    let r_max = jp1.min(jp2);
    let mut sum = Complex64::new(0.0, 0.0);
    for r in r_min..=r_max {
        let ln_term = ln_prefactor
            - ln_factorial(r)
            - ln_factorial(jp1 - r)
            - ln_factorial(jp2 - r)
            - ln_factorial(r - m1p2);
        let monomial = g.a.powu(r as u32)
            * g.b.powu((jp1 - r) as u32)
            * g.c.powu((jp2 - r) as u32)
            * g.d.powu((r - m1p2) as u32);
        sum += ln_term.exp() * monomial;
    }
    Ok(sum)
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j m>` in the Condon-Shortley
/// convention, from the closed single-sum form evaluated with log
/// factorials. Selection-rule violations (m != m1 + m2, triangle, total-spin
/// parity) yield zero; malformed individual labels are errors.
pub fn clebsch_gordan(
    two_j1: i32,
    two_m1: i32,
    two_j2: i32,
    two_m2: i32,
    two_j: i32,
    two_m: i32,
) -> Result<f64> {
    check_pair(two_j1, two_m1)?;
    check_pair(two_j2, two_m2)?;
    check_pair(two_j, two_m)?;
    for spin in [two_j1, two_j2, two_j] {
        if spin > MAX_TWO_J {
            return Err(CoulombError::SpinTooLarge {
                two_j: spin,
                max: MAX_TWO_J,
            });
        }
    }

    if two_m != two_m1 + two_m2 {
        return Ok(0.0);
    }
    // j1 + j2 + j must be an integer for the coupling to exist at all
    if (two_j1 + two_j2 + two_j) % 2 != 0 {
        return Ok(0.0);
    }
    // triangle inequality
    if two_j < (two_j1 - two_j2).abs() || two_j > two_j1 + two_j2 {
        return Ok(0.0);
    }

    let j1p2mj = (two_j1 + two_j2 - two_j) / 2;
    let j1mj2pj = (two_j1 - two_j2 + two_j) / 2;
    let mj1pj2pj = (-two_j1 + two_j2 + two_j) / 2;
    let j1p2pj1 = (two_j1 + two_j2 + two_j) / 2 + 1;

    let ln_delta = ln_factorial(j1p2mj) + ln_factorial(j1mj2pj) + ln_factorial(mj1pj2pj)
        - ln_factorial(j1p2pj1);

    let j1pm1 = (two_j1 + two_m1) / 2;
    let j1mm1 = (two_j1 - two_m1) / 2;
    let j2pm2 = (two_j2 + two_m2) / 2;
    let j2mm2 = (two_j2 - two_m2) / 2;
    let jpm = (two_j + two_m) / 2;
    let jmm = (two_j - two_m) / 2;

    let ln_norm = 0.5
        * ((two_j as f64 + 1.0).ln()
            + ln_delta
            + ln_factorial(j1pm1)
            + ln_factorial(j1mm1)
            + ln_factorial(j2pm2)
            + ln_factorial(j2mm2)
            + ln_factorial(jpm)
            + ln_factorial(jmm));

    // summation index bounds keep every factorial argument non-negative
    let jmj2pm1 = (two_j - two_j2 + two_m1) / 2;
    let jmj1mm2 = (two_j - two_j1 - two_m2) / 2;
    let k_min = 0.max(-jmj2pm1).max(-jmj1mm2);
    let k_max = j1p2mj.min(j1mm1).min(j2pm2);

    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ln_term = ln_norm
            - ln_factorial(k)
            - ln_factorial(j1p2mj - k)
            - ln_factorial(j1mm1 - k)
            - ln_factorial(j2pm2 - k)
            - ln_factorial(jmj2pm1 + k)
            - ln_factorial(jmj1mm2 + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * ln_term.exp();
    }
    Ok(sum)
}
