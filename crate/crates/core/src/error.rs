/// Errors surfaced by the geometry, harmonics, spectral, slicing, and
/// eikonal layers. Validation failures (bad inputs, bad configuration) are
/// distinguished from numerical failures (non-convergence, resolution) so
/// callers can map them to different exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoulombError {
    #[error("bound-state context requires E < 0, got E = {energy}")]
    NonNegativeEnergy { energy: f64 },

    #[error("coupling must be positive and finite, got alpha = {alpha}")]
    InvalidCoupling { alpha: f64 },

    #[error("non-finite component in {what}")]
    NonFinite { what: &'static str },

    #[error("({x}, {y}, {z}, {w}) is off the unit sphere: |norm^2 - 1| = {deviation:.3e} exceeds 1e-12")]
    OffSphere {
        x: f64,
        y: f64,
        z: f64,
        w: f64,
        deviation: f64,
    },

    #[error("north pole (pi4 = {pi4}) maps to infinite momentum")]
    PointAtInfinity { pi4: f64 },

    #[error("invalid spin label 2j = {two_j}, 2m = {two_m}: need 2j >= 0, |2m| <= 2j, matching parity")]
    InvalidSpinLabel { two_j: i32, two_m: i32 },

    #[error("2j = {two_j} exceeds the supported maximum {max}")]
    SpinTooLarge { two_j: i32, max: i32 },

    #[error("matrix is not in SU(2): unitarity/determinant deviation {deviation:.3e} exceeds 1e-12")]
    NotSpecialUnitary { deviation: f64 },

    #[error("invalid quantum numbers n = {n}, l = {l}, m = {m}: need n >= 1, l <= n-1, |m| <= l")]
    InvalidQuantumNumbers { n: u32, l: u32, m: i64 },

    #[error("quadrature resolution {resolution} is below the minimum {minimum}")]
    ResolutionTooLow { resolution: usize, minimum: usize },

    #[error("pseudotime must be positive, got S = {s}")]
    NonPositivePseudotime { s: f64 },

    #[error("series tolerance must be positive, got {tol}")]
    InvalidTolerance { tol: f64 },

    #[error("E = {energy} lies within 1e-12 of the n = {n} bound-state pole")]
    PoleProximity { energy: f64, n: u32 },

    #[error("coincident endpoints: the fixed-energy series is singular at separation angle 0")]
    CoincidentPoints,

    #[error("curvature coefficient c = {c} is invalid: need finite c with 1 + 3c > 0")]
    InvalidCurvatureCoefficient { c: f64 },

    #[error(
        "pole scan too coarse: located {found} of {expected} expected poles; \
         tightest adjacent pair E = {first:.6e} and E = {second:.6e}"
    )]
    ScanTooCoarse {
        found: usize,
        expected: usize,
        first: f64,
        second: f64,
    },

    #[error("slice configuration invalid: {reason}")]
    InvalidSliceConfig { reason: String },

    #[error("theta grid under-resolves mode n = {mode}: doubling the grid moves k_n by {shift:.3e}")]
    ModeResolution { mode: u32, shift: f64 },

    #[error("epsilon sweep did not converge monotonically for mode n = {mode}")]
    NonMonotoneSweep { mode: u32 },

    #[error("minimizer did not converge: gradient max-norm {gradient:.3e} after {iterations} iterations")]
    MinimizerStalled { gradient: f64, iterations: usize },

    #[error("endpoints are antipodal on the sphere (separation angle within 1e-9 of pi): geodesic is not unique")]
    AntipodalEndpoints,

    #[error("path needs at least {minimum} points, got {actual}")]
    PathTooShort { actual: usize, minimum: usize },

    #[error("angular momentum L = {l} outside the bound range (0, {max}] for E = {energy}")]
    InvalidAngularMomentum { l: f64, max: f64, energy: f64 },

    #[error("orbit reached r = {r:.3e}, below the collision guard {guard:.3e}")]
    OrbitCollision { r: f64, guard: f64 },

    #[error("time step must satisfy 0 < dt, got {dt}")]
    InvalidTimeStep { dt: f64 },
}

impl CoulombError {
    /// True for failures of the numerics (convergence, resolution) as opposed
    /// to invalid inputs or configuration.
    #[must_use]
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            CoulombError::ScanTooCoarse { .. }
                | CoulombError::ModeResolution { .. }
                | CoulombError::NonMonotoneSweep { .. }
                | CoulombError::MinimizerStalled { .. }
                | CoulombError::OrbitCollision { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, CoulombError>;
