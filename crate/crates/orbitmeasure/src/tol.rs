//! Numerical tolerances used across the crate.
//!
//! Every hard-coded threshold in the geometry and validation code funnels
//! through this struct so that a single override point exists (tests, CLI
//! flags, config files). Defaults are the values the whole test suite is
//! pinned against; loosen or tighten them deliberately.

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Absolute symmetry defect allowed in a Gram matrix.
    pub gram_symmetry: f64,
    /// Relative cutoff for the smallest Gram eigenvalue (positive definiteness).
    pub gram_positivity: f64,
    /// Relative clamp for slightly negative Gram determinants; larger
    /// negatives are reported as internal errors.
    pub det_clamp: f64,
    /// Residual allowed when resolving a vector in a basis span.
    pub span_residual: f64,
    /// Rank-deficiency cutoff for orthonormalization.
    pub orthonormal: f64,
    /// Relative orthogonality threshold for the product-of-norms determinant path.
    pub orthogonal_fast_path: f64,
    /// Residual allowed when checking Lie bracket closure of an algebra basis.
    pub bracket_closure: f64,
    /// Relative singular-value cutoff used for every numeric rank decision.
    pub rank_rel: f64,
    /// Minimal pairwise chart-parameter gap defining the regular set.
    pub regular_gap: f64,
    /// Central-difference step for flow derivatives and chart Jacobians.
    pub fd_step: f64,
    /// Apply one Richardson extrapolation level to finite differences.
    pub richardson: bool,
    /// Relative orthogonality residual allowed between chart tangents and
    /// orbit directions.
    pub orthogonality_check: f64,
    /// Relative deviation allowed between base-point and translated-chart
    /// pullback determinants.
    pub gauge_residual: f64,
    /// Residual allowed in invariance spot checks of weights and test functions.
    pub invariance_check: f64,
    /// Frobenius residual allowed in group membership checks.
    pub group_membership: f64,
    /// Entrywise agreement required between analytic and finite-difference
    /// orbit maps.
    pub cross_mode_entry: f64,
    /// Relative agreement required between analytic and finite-difference
    /// Jacobian factors.
    pub cross_mode_jacobian: f64,
    /// Coefficient of variation allowed for density/oracle ratios.
    pub oracle_cv: f64,
    /// Kolmogorov-Smirnov acceptance threshold for sampled spectra.
    pub ks_threshold: f64,
    /// Mass allowed in the boundary shell of a quadrature box.
    pub quadrature_tail: f64,
    /// Quadrature grid points per chart axis.
    pub grid_points: usize,
    /// Half-width of the quadrature box for unbounded Gaussian-type charts.
    pub gaussian_halfwidth: f64,
    /// Upper edge of the quadrature box for positive-spectrum charts.
    pub positive_axis_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gram_symmetry: 1e-12,
            gram_positivity: 1e-12,
            det_clamp: 1e-12,
            span_residual: 1e-10,
            orthonormal: 1e-10,
            orthogonal_fast_path: 1e-10,
            bracket_closure: 1e-9,
            rank_rel: 1e-8,
            regular_gap: 1e-8,
            fd_step: 1e-5,
            richardson: true,
            orthogonality_check: 1e-8,
            gauge_residual: 1e-5,
            invariance_check: 1e-9,
            group_membership: 1e-9,
            cross_mode_entry: 1e-7,
            cross_mode_jacobian: 1e-6,
            oracle_cv: 1e-6,
            ks_threshold: 0.01,
            quadrature_tail: 1e-8,
            grid_points: 400,
            gaussian_halfwidth: 8.0,
            positive_axis_max: 60.0,
        }
    }
}
