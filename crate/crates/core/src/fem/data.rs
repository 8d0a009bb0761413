//! Data of the exact, defeatured and extension Poisson problems.

use alloc::sync::Arc;

use crate::Point;

/// Shareable scalar function of the coordinates.
pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Wrap a closure as a [`ScalarFn`].
pub fn scalar(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

/// The zero function.
pub fn zero() -> ScalarFn {
    scalar(|_| 0.0)
}

/// Every data role of the defeaturing problem; unused roles may stay zero.
#[derive(Clone)]
pub struct ProblemData {
    /// Source in Ω (including F_p).
    pub f: ScalarFn,
    /// Source extension into F_n used by the defeatured problem.
    pub f_neg: ScalarFn,
    /// Source extension into F̃_p \ F_p used by the extension problem.
    pub f_ext: ScalarFn,
    /// Dirichlet data on Γ_D.
    pub h: ScalarFn,
    /// Neumann data on the rest of Γ_N.
    pub g: ScalarFn,
    /// Neumann data on the feature boundaries of Ω (γ_n, γ_s, γ_r).
    pub g_feature: ScalarFn,
    /// Neumann data of the defeatured problem on γ_{0,n} and γ_{0,p}.
    pub g0: ScalarFn,
    /// Neumann data of the extension problem on γ̃.
    pub g_tilde: ScalarFn,
}

impl ProblemData {
    /// Source `f` extended by itself everywhere, all boundary data zero.
    pub fn with_source(f: ScalarFn) -> Self {
        ProblemData {
            f_neg: f.clone(),
            f_ext: f.clone(),
            f,
            h: zero(),
            g: zero(),
            g_feature: zero(),
            g0: zero(),
            g_tilde: zero(),
        }
    }

    pub fn zero() -> Self {
        Self::with_source(zero())
    }
}

impl core::fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("ProblemData { .. }")
    }
}
