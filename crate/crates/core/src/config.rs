use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Root residual, relative to the polynomial's scale at the root.
    pub root: f64,
    /// Common-root detection for gcd reduction.
    pub gcd: f64,
    /// Pole detection in rational evaluation.
    pub pole: f64,
    /// Mate identity and unit-ball checks.
    pub mate: f64,
    /// Vanishing of boundary derivatives, and the radius under which a
    /// root cluster is collapsed into a single multiple root.
    pub boundary: f64,
    /// Forbidden-phase detection in the extension step.
    pub phase: f64,
    /// Defect-form residual accepted as zero.
    pub iso: f64,
    /// Defect-form residual required to call an order strict.
    pub strict: f64,
    /// Closed form vs Gram cross-checks.
    pub gram: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root: 1e-11,
            gcd: 1e-9,
            pole: 1e-13,
            mate: 1e-9,
            boundary: 1e-7,
            phase: 1e-8,
            iso: 1e-8,
            strict: 1e-3,
            gram: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            self.root,
            self.gcd,
            self.pole,
            self.mate,
            self.boundary,
            self.phase,
            self.iso,
            self.strict,
            self.gram,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(crate::HbError::InvalidArgument(
                "all tolerances must be positive".into(),
            ))
        }
    }
}

/// How rational members of H(b) are cut down to polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Fixed Taylor degree.
    Fixed(usize),
    /// Pick the degree from the pole radius so the tail falls below `tol`.
    Auto { tol: f64, max_degree: usize },
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Fixed(64)
    }
}

impl Truncation {
    pub fn auto() -> Self {
        Truncation::Auto {
            tol: 1e-15,
            max_degree: 4096,
        }
    }
}

pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

/// Everything a run needs besides its inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub trunc_degree: usize,
    pub gram_n: usize,
    pub oracle_k: usize,
    pub grid: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
            trunc_degree: 64,
            gram_n: 8,
            oracle_k: 12,
            grid: 1024,
        }
    }
}

/// Numerical context passed through the computational modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: Tolerances,
    pub roots: crate::roots::RootOptions,
    /// Number of equispaced circle points for sup and residual checks.
    pub grid: usize,
    pub truncation: Truncation,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol: Tolerances::default(),
            roots: crate::roots::RootOptions::default(),
            grid: 1024,
            truncation: Truncation::default(),
        }
    }
}

impl Settings {
    pub fn with_seed(seed: u64) -> Self {
        Settings {
            roots: crate::roots::RootOptions::with_seed(seed),
            ..Self::default()
        }
    }
}
