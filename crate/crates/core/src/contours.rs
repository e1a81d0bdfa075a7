//! Oriented complex contours and their quadrature discretisations.
//!
//! The double-contour kernels integrate over two families of paths:
//!
//! * `γ_R`: a wedge of two rays in the right half-plane at angles `±θ`
//!   (θ = π/3 for the cubic phase, π/4 for the quartic one), traversed
//!   upwards (from the lower ray in, through the vertex, out the upper ray);
//! * `γ_L = -γ_R`: its pointwise negation, traversed downwards;
//! * the imaginary axis, traversed downwards, for the quartic kernel.
//!
//! The vertex may be pushed off the origin along the real axis. The kernels
//! are analytic between homotopic contours, so the shift does not change any
//! integral; it keeps the discretised paths at a positive distance from each
//! other, which the `1/(λ-μ)` denominators need.
//!
//! Discretisation uses Gauss–Legendre panels graded geometrically away from
//! the vertex (lengths ∝ 1, 2, 4, …), which concentrates nodes where the
//! phase varies fastest.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_rule;
use num_complex::Complex64;

/// Which named contour a path or node set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourLabel {
    GammaR,
    GammaL,
    ImagAxis,
    Custom,
}

/// One straight piece of a contour, traversed from `start` to `end`.
/// `graded_from_start` marks the endpoint nearest the wedge vertex so the
/// panel grading can refine towards it.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: Complex64,
    pub end: Complex64,
    pub graded_from_start: bool,
}

/// An oriented piecewise-linear contour (rays already truncated).
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub label: ContourLabel,
    pub segments: Vec<Segment>,
    /// Point set invariant under complex conjugation; guarantees real
    /// kernel values for conjugation-symmetric integrands.
    pub conj_symmetric: bool,
}

impl ContourPath {
    /// Pointwise negation, orientation following the mapped traversal.
    pub fn negated(&self, label: ContourLabel) -> ContourPath {
        ContourPath {
            label,
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    start: -s.start,
                    end: -s.end,
                    graded_from_start: s.graded_from_start,
                })
                .collect(),
            conj_symmetric: self.conj_symmetric,
        }
    }

    /// Reverses the traversal direction.
    pub fn reversed(&self) -> ContourPath {
        ContourPath {
            label: self.label,
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| Segment {
                    start: s.end,
                    end: s.start,
                    graded_from_start: s.graded_from_start,
                })
                .collect(),
            conj_symmetric: self.conj_symmetric,
        }
    }
}

/// Wedge `anchor + r·e^{±iθ}` truncated at ray length `truncation`,
/// traversed upwards. Conjugation-symmetric by construction.
pub fn wedge(anchor: f64, angle: f64, truncation: f64) -> Result<ContourPath> {
    if !(truncation > 0.0) {
        return Err(Error::Config(format!(
            "ray truncation must be positive, got {truncation}"
        )));
    }
    let a = Complex64::new(anchor, 0.0);
    let up = a + truncation * Complex64::new(angle.cos(), angle.sin());
    let down = up.conj();
    Ok(ContourPath {
        label: ContourLabel::GammaR,
        segments: vec![
            Segment {
                start: down,
                end: a,
                graded_from_start: false,
            },
            Segment {
                start: a,
                end: up,
                graded_from_start: true,
            },
        ],
        conj_symmetric: true,
    })
}

/// Airy contour pair: `γ_R` = rays at angles `±π/3` from the origin,
/// `γ_L = -γ_R`. `Re(μ³) < 0` on both rays, so the cubic phase decays.
pub fn airy_contours(truncation: f64) -> Result<(ContourPath, ContourPath)> {
    airy_contours_shifted(0.0, truncation)
}

/// Airy contour pair with the wedge vertices at `±anchor`.
pub fn airy_contours_shifted(
    anchor: f64,
    truncation: f64,
) -> Result<(ContourPath, ContourPath)> {
    let gamma_r = wedge(anchor, std::f64::consts::FRAC_PI_3, truncation)?;
    let gamma_l = gamma_r.negated(ContourLabel::GammaL);
    Ok((gamma_r, gamma_l))
}

/// Pearcey contour triple: `γ_R` = rays at `±π/4` from the origin,
/// `γ_L = -γ_R`, and the imaginary axis truncated at `|Im λ| ≤ truncation`,
/// traversed downwards.
pub fn pearcey_contours(
    truncation: f64,
) -> Result<(ContourPath, ContourPath, ContourPath)> {
    pearcey_contours_shifted(0.0, truncation)
}

/// Pearcey contour triple with the wedge vertices at `±anchor`.
pub fn pearcey_contours_shifted(
    anchor: f64,
    truncation: f64,
) -> Result<(ContourPath, ContourPath, ContourPath)> {
    let gamma_r = wedge(anchor, std::f64::consts::FRAC_PI_4, truncation)?;
    let gamma_l = gamma_r.negated(ContourLabel::GammaL);
    let top = Complex64::new(0.0, truncation);
    let axis = ContourPath {
        label: ContourLabel::ImagAxis,
        segments: vec![
            Segment {
                start: top,
                end: Complex64::new(0.0, 0.0),
                graded_from_start: false,
            },
            Segment {
                start: Complex64::new(0.0, 0.0),
                end: -top,
                graded_from_start: true,
            },
        ],
        conj_symmetric: true,
    };
    Ok((gamma_r, gamma_l, axis))
}

/// Complex nodes and weights discretising one contour.
///
/// Weights carry the `dζ/dt` Jacobian and the orientation sign, so
/// `∫_path f ≈ Σ w_i f(z_i)` for analytic decaying integrands.
#[derive(Debug, Clone)]
pub struct ComplexQuadrature {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub source: ContourLabel,
}

impl ComplexQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }

    /// Concatenates node sets (traversal order preserved per input).
    pub fn concat(parts: &[&ComplexQuadrature], label: ContourLabel) -> ComplexQuadrature {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in parts {
            nodes.extend_from_slice(&p.nodes);
            weights.extend_from_slice(&p.weights);
        }
        ComplexQuadrature {
            nodes,
            weights,
            source: label,
        }
    }
}

/// Geometric panel breakpoints: `panels` lengths with ratio 2, finest first,
/// scaled to total length 1.
fn geometric_breakpoints(panels: usize) -> Vec<f64> {
    let p = panels.max(1);
    let total = (2f64.powi(p as i32) - 1.0).max(1.0);
    let mut pts = Vec::with_capacity(p + 1);
    let mut acc = 0.0;
    pts.push(0.0);
    for j in 0..p {
        acc += 2f64.powi(j as i32) / total;
        pts.push(acc);
    }
    *pts.last_mut().unwrap() = 1.0;
    pts
}

/// Gauss–Legendre discretisation of a contour with `order` nodes per panel
/// and `panels` geometrically graded panels per segment (finest panel at the
/// graded end).
pub fn discretize_contour(
    path: &ContourPath,
    order: usize,
    panels: usize,
) -> Result<ComplexQuadrature> {
    let base = gauss_legendre_rule(order)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let breaks = geometric_breakpoints(panels);
    for seg in &path.segments {
        let dir = seg.end - seg.start;
        // map the grading parameter so the finest panel touches the vertex
        let panel_range = |j: usize| -> (f64, f64) {
            if seg.graded_from_start {
                (breaks[j], breaks[j + 1])
            } else {
                (1.0 - breaks[panels.max(1) - j], 1.0 - breaks[panels.max(1) - j - 1])
            }
        };
        for j in 0..panels.max(1) {
            let (t0, t1) = panel_range(j);
            let half = 0.5 * (t1 - t0);
            let mid = 0.5 * (t0 + t1);
            for (&u, &w) in base.nodes.iter().zip(&base.weights) {
                let t = mid + half * u;
                nodes.push(seg.start + dir * t);
                weights.push(dir * (w * half));
            }
        }
    }
    Ok(ComplexQuadrature {
        nodes,
        weights,
        source: path.label,
    })
}

/// Largest integrand magnitude at the truncated ends of a path relative to
/// its maximum over the discretised nodes. Callers compare this against
/// their truncation tolerance and enlarge the contour if needed.
pub fn truncation_residual(
    path: &ContourPath,
    quad: &ComplexQuadrature,
    mut log_magnitude: impl FnMut(Complex64) -> f64,
) -> f64 {
    let mut cut_max = f64::NEG_INFINITY;
    for seg in &path.segments {
        let endpoint = if seg.graded_from_start {
            seg.end
        } else {
            seg.start
        };
        cut_max = cut_max.max(log_magnitude(endpoint));
    }
    let node_max = quad
        .nodes
        .iter()
        .map(|&z| log_magnitude(z))
        .fold(f64::NEG_INFINITY, f64::max);
    (cut_max - node_max).exp()
}

/// Minimum pairwise distance between two node sets.
pub fn min_node_distance(a: &ComplexQuadrature, b: &ComplexQuadrature) -> f64 {
    let mut d = f64::INFINITY;
    for &x in &a.nodes {
        for &y in &b.nodes {
            d = d.min((x - y).norm());
        }
    }
    d
}
