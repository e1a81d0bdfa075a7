//! Numerical knobs shared by the kernel, determinant and experiment layers.

/// Quadrature and contour discretisation parameters.
///
/// The defaults are sized for the desk-scale parameter ranges exercised by
/// the verification suite (intervals within `[-45, 45]`, `τ ≤ 24`); every
/// consumer exposes convergence checks (order doubling, truncation
/// residuals) that catch an undersized configuration instead of silently
/// returning garbage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericsConfig {
    /// Gauss–Legendre order per panel for real-line rules.
    pub quad_order: usize,
    /// Panels per unit interval length (minimum 1).
    pub panels_per_unit: usize,
    /// Scale of the rational map covering `[a_N, ∞)` tails.
    pub tail_scale: f64,
    /// Gauss–Legendre order per contour panel.
    pub contour_order: usize,
    /// Geometrically graded panels per contour ray.
    pub contour_panels: usize,
    /// Convergence target for order-doubled determinants.
    pub det_tol: f64,
    /// Largest admissible integrand magnitude at a contour cut, relative to
    /// its maximum on the contour.
    pub truncation_tol: f64,
    /// Vertex offset of the contour wedges from the origin. The kernels are
    /// invariant under this shift; it keeps the discretised contours apart.
    pub contour_anchor: f64,
    /// Lower bound imposed on the automatic per-phase ray truncations.
    pub truncation_floor: f64,
    /// Rayon thread count (0 = library default).
    pub threads: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            quad_order: 40,
            panels_per_unit: 1,
            tail_scale: 2.0,
            contour_order: 24,
            contour_panels: 6,
            det_tol: 1e-9,
            truncation_tol: 1e-18,
            contour_anchor: 0.75,
            truncation_floor: 0.0,
            threads: 0,
        }
    }
}

impl NumericsConfig {
    /// Ray truncation for the cubic (Airy) phase at shift scale `x`.
    pub fn airy_truncation(&self, x: f64) -> f64 {
        (8.0f64)
            .max(3.0 * (1.0 + x.abs()).sqrt())
            .max(self.truncation_floor)
    }

    /// Ray truncation for the quartic (Pearcey) phase at deformation `tau`.
    pub fn pearcey_truncation(&self, tau: f64) -> f64 {
        (6.0f64)
            .max(2.0 * (1.0 + tau.abs()).sqrt())
            .max(self.truncation_floor)
    }

    /// Wedge vertex offset used for the quartic contours at deformation
    /// `tau`; tracks the outer saddle `√τ` so the exponent stays balanced.
    pub fn pearcey_anchor(&self, tau: f64) -> f64 {
        self.contour_anchor.max(tau.max(0.0).sqrt())
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.quad_order = order;
        self
    }

    pub fn with_contour_order(mut self, order: usize) -> Self {
        self.contour_order = order;
        self
    }
}
