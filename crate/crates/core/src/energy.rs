use crate::error::{CoulombError, Result};

/// Conversion from the natural energy unit (hbar = M = e'^2... = 1, so the
/// ground state sits at -1/2) to electron volts.
pub const ENERGY_UNIT_EV: f64 = 27.21;

/// Everything downstream of a fixed bound-state energy E < 0: the Euclidean
/// momentum scale p_E = sqrt(-2E) that sets the sphere radius in momentum
/// space, the pseudomass mu = 1/p_E^2, and the coupling alpha.
///
/// p_E and mu are always derived from E here, never set independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyContext {
    energy: f64,
    p_e: f64,
    mu: f64,
    alpha: f64,
    energy_unit_ev: f64,
}

impl EnergyContext {
    /// Context at energy E < 0 with coupling alpha > 0.
    pub fn new(energy: f64, alpha: f64) -> Result<Self> {
        if !energy.is_finite() {
            return Err(CoulombError::NonFinite { what: "energy" });
        }
        if energy >= 0.0 {
            return Err(CoulombError::NonNegativeEnergy { energy });
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(CoulombError::InvalidCoupling { alpha });
        }
        let p_e = (-2.0 * energy).sqrt();
        Ok(EnergyContext {
            energy,
            p_e,
            mu: 1.0 / (p_e * p_e),
            alpha,
            energy_unit_ev: ENERGY_UNIT_EV,
        })
    }

    /// Context with unit coupling.
    pub fn with_unit_coupling(energy: f64) -> Result<Self> {
        Self::new(energy, 1.0)
    }

    /// Same context with a different eV conversion constant.
    #[must_use]
    pub fn with_energy_unit(mut self, energy_unit_ev: f64) -> Self {
        self.energy_unit_ev = energy_unit_ev;
        self
    }

    #[must_use]
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// p_E = sqrt(-2E).
    #[must_use]
    pub fn p_e(&self) -> f64 {
        self.p_e
    }

    /// Pseudomass mu = 1/p_E^2.
    #[must_use]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[must_use]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[must_use]
    pub fn energy_unit_ev(&self) -> f64 {
        self.energy_unit_ev
    }

    #[must_use]
    pub fn energy_ev(&self) -> f64 {
        self.energy * self.energy_unit_ev
    }
}

/// A 3-momentum with finite components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum3 {
    components: [f64; 3],
}

impl Momentum3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(CoulombError::NonFinite {
                what: "momentum component",
            });
        }
        Ok(Momentum3 {
            components: [x, y, z],
        })
    }

    pub fn from_array(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }

    #[must_use]
    pub fn zero() -> Self {
        Momentum3 {
            components: [0.0; 3],
        }
    }

    #[must_use]
    pub fn components(&self) -> [f64; 3] {
        self.components
    }

    #[must_use]
    pub fn x(&self) -> f64 {
        self.components[0]
    }

    #[must_use]
    pub fn y(&self) -> f64 {
        self.components[1]
    }

    #[must_use]
    pub fn z(&self) -> f64 {
        self.components[2]
    }

    #[must_use]
    pub fn dot(&self, other: &Momentum3) -> f64 {
        self.components[0] * other.components[0]
            + self.components[1] * other.components[1]
            + self.components[2] * other.components[2]
    }

    #[must_use]
    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    #[must_use]
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    #[must_use]
    pub fn scaled(&self, s: f64) -> Momentum3 {
        Momentum3 {
            components: [
                self.components[0] * s,
                self.components[1] * s,
                self.components[2] * s,
            ],
        }
    }

    #[must_use]
    pub fn add(&self, other: &Momentum3) -> Momentum3 {
        Momentum3 {
            components: [
                self.components[0] + other.components[0],
                self.components[1] + other.components[1],
                self.components[2] + other.components[2],
            ],
        }
    }

    #[must_use]
    pub fn sub(&self, other: &Momentum3) -> Momentum3 {
        Momentum3 {
            components: [
                self.components[0] - other.components[0],
                self.components[1] - other.components[1],
                self.components[2] - other.components[2],
            ],
        }
    }
}
