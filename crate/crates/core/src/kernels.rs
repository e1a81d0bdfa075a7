//! Point evaluation of the Airy, Pearcey and general `(1,p)` kernels.
//!
//! Every kernel has at least two independent evaluation routes, which the
//! test and acceptance suites play against each other:
//!
//! * Airy: the closed form `(Ai(x)Ai'(y) - Ai(y)Ai'(x))/(x-y)` and the
//!   double-contour integral over `γ_R × γ_L`;
//! * Pearcey: the double-contour integral over `(γ_L ∪ γ_R) × iℝ` and a
//!   one-dimensional Laplace factorisation into products of the
//!   single-contour functions of [`crate::special`] (`t_integral` route).
//!
//! No symmetry of the Pearcey kernel in `(x, y)` is assumed anywhere.

use crate::config::NumericsConfig;
use crate::contours::{
    discretize_contour, pearcey_contours_shifted, ComplexQuadrature, ContourLabel,
};
use crate::error::{Error, Result};
use crate::phases::{eval_phase, PhaseSpec};
use crate::quadrature::{affine_map, gauss_legendre_rule};
use crate::special::{airy_ai_cfg, pearcey_phi_l, pearcey_phi_r, pearcey_psi, PearceyFunctionTable};
use num_complex::Complex64;

/// Kernel families supported at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Airy,
    Pearcey,
    GeneralP,
}

/// Evaluation routes. `ClosedForm` exists only for Airy, `TIntegral` only
/// for Pearcey.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalRoute {
    ClosedForm,
    DoubleContour,
    TIntegral,
}

impl std::str::FromStr for EvalRoute {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-form" | "closed_form" => Ok(EvalRoute::ClosedForm),
            "double-contour" | "double_contour" => Ok(EvalRoute::DoubleContour),
            "t-integral" | "t_integral" => Ok(EvalRoute::TIntegral),
            other => Err(Error::Config(format!("unknown route '{other}'"))),
        }
    }
}

/// A kernel family bound to a route and contour configuration.
#[derive(Debug, Clone)]
pub struct KernelHandle {
    pub family: KernelFamily,
    pub route: EvalRoute,
    pub tau: f64,
    pub cfg: NumericsConfig,
}

impl KernelHandle {
    pub fn airy(route: EvalRoute, cfg: NumericsConfig) -> Result<Self> {
        if route == EvalRoute::TIntegral {
            return Err(Error::Config(
                "the t_integral route exists only for the Pearcey kernel".into(),
            ));
        }
        Ok(Self {
            family: KernelFamily::Airy,
            route,
            tau: 0.0,
            cfg,
        })
    }

    pub fn pearcey(tau: f64, route: EvalRoute, cfg: NumericsConfig) -> Result<Self> {
        if route == EvalRoute::ClosedForm {
            return Err(Error::Config(
                "the closed-form route exists only for the Airy kernel".into(),
            ));
        }
        Ok(Self {
            family: KernelFamily::Pearcey,
            route,
            tau,
            cfg,
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        match (self.family, self.route) {
            (KernelFamily::Airy, EvalRoute::ClosedForm) => airy_kernel_cfg(x, y, &self.cfg),
            (KernelFamily::Airy, _) => airy_kernel_contour(x, y, &self.cfg),
            (KernelFamily::Pearcey, EvalRoute::DoubleContour) => {
                let quads = PearceyContours::build(self.tau, &self.cfg, 1)?;
                quads.kernel(x, y)
            }
            (KernelFamily::Pearcey, _) => pearcey_kernel_t_integral(x, y, self.tau, None),
            (KernelFamily::GeneralP, _) => Err(Error::Config(
                "general (1,p) kernels are evaluated through general_p_kernel".into(),
            )),
        }
    }
}

/// Closed-form Airy kernel `(Ai(x)Ai'(y) - Ai(y)Ai'(x))/(x - y)`, switching
/// to the even expansion about the midpoint when `|x-y| < 1e-4` to control
/// cancellation: `K = Ai'(m)² - m·Ai(m)² + δ²·(AB + 2mB² - 2m²A²)/3` with
/// `δ = (x-y)/2`.
pub fn airy_kernel_cfg(x: f64, y: f64, cfg: &NumericsConfig) -> Result<f64> {
    if (x - y).abs() < 1e-4 {
        let m = 0.5 * (x + y);
        let delta = 0.5 * (x - y);
        let v = airy_ai_cfg(m, cfg)?;
        let (a, b) = (v.ai, v.ai_prime);
        let curv = (a * b + 2.0 * m * b * b - 2.0 * m * m * a * a) / 3.0;
        Ok(b * b - m * a * a + delta * delta * curv)
    } else {
        let vx = airy_ai_cfg(x, cfg)?;
        let vy = airy_ai_cfg(y, cfg)?;
        Ok((vx.ai * vy.ai_prime - vy.ai * vx.ai_prime) / (x - y))
    }
}

/// [`airy_kernel_cfg`] with default numerics.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    airy_kernel_cfg(x, y, &NumericsConfig::default())
}

/// Airy kernel by tensor quadrature of
/// `(1/(2πi)²) ∫_{γ_R} dμ ∫_{γ_L} dλ e^{ϑ_x(μ) - ϑ_y(λ)}/(λ - μ)`.
pub fn airy_kernel_contour(x: f64, y: f64, cfg: &NumericsConfig) -> Result<f64> {
    let trunc = cfg.airy_truncation(x.abs().max(y.abs()));
    let (gr, gl) =
        crate::contours::airy_contours_shifted(cfg.contour_anchor, trunc)?;
    let qr = discretize_contour(&gr, cfg.contour_order, cfg.contour_panels)?;
    let ql = discretize_contour(&gl, cfg.contour_order, cfg.contour_panels)?;
    let phase_x = PhaseSpec::airy(x);
    let phase_y = PhaseSpec::airy(y);
    // residual check on both contours
    for (path, quad, spec, sign) in [
        (&gr, &qr, &phase_x, 1.0),
        (&gl, &ql, &phase_y, -1.0),
    ] {
        let residual = crate::contours::truncation_residual(path, quad, |z| {
            sign * eval_phase(spec, z).re
        });
        if residual > cfg.truncation_tol.max(1e-14) {
            return Err(Error::TruncationInsufficient {
                residual,
                context: format!("airy_kernel_contour(x={x}, y={y})"),
            });
        }
    }
    let e_mu: Vec<Complex64> = qr
        .nodes
        .iter()
        .zip(&qr.weights)
        .map(|(&m, &w)| w * eval_phase(&phase_x, m).exp())
        .collect();
    let e_la: Vec<Complex64> = ql
        .nodes
        .iter()
        .zip(&ql.weights)
        .map(|(&l, &w)| w * (-eval_phase(&phase_y, l)).exp())
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, &em) in qr.nodes.iter().zip(&e_mu) {
        let mut inner = Complex64::new(0.0, 0.0);
        for (q, &el) in ql.nodes.iter().zip(&e_la) {
            inner += el / (q - p);
        }
        acc += em * inner;
    }
    let val = acc / Complex64::new(0.0, 2.0 * std::f64::consts::PI).powu(2);
    if val.im.abs() > 1e-10 * val.norm().max(1e-30) {
        return Err(Error::ImaginaryResidue {
            residual: val.im.abs() / val.norm().max(1e-300),
            context: format!("airy_kernel_contour(x={x}, y={y})"),
        });
    }
    Ok(val.re)
}

/// Discretised quartic-kernel contours at fixed deformation `τ`: the wedge
/// pair (`γ_L` then `γ_R`, vertex at `±anchor`) and the downward imaginary
/// axis. Shared across kernel evaluations and matrix assembly.
#[derive(Debug, Clone)]
pub struct PearceyContours {
    pub tau: f64,
    /// `γ_L ∪ γ_R` nodes/weights (μ variable).
    pub mu: ComplexQuadrature,
    /// Imaginary-axis nodes/weights (λ variable), downward orientation.
    pub lambda: ComplexQuadrature,
}

impl PearceyContours {
    /// Builds the discretisation; `refine` doubles panel counts (used by
    /// convergence checks).
    pub fn build(tau: f64, cfg: &NumericsConfig, refine: usize) -> Result<Self> {
        let trunc = cfg.pearcey_truncation(tau);
        let anchor = cfg.pearcey_anchor(tau);
        let (gr, gl, axis) = pearcey_contours_shifted(anchor, trunc)?;
        let order = cfg.contour_order;
        let panels = cfg.contour_panels * refine.max(1);
        let qr = discretize_contour(&gr, order, panels)?;
        let ql = discretize_contour(&gl, order, panels)?;
        let qa = discretize_contour(&axis, order, panels)?;
        // phase decay sanity at the cuts (x = 0 representative)
        let phase0 = PhaseSpec::pearcey(tau, 0.0);
        for (path, quad, sign) in [(&gr, &qr, 1.0), (&axis, &qa, -1.0)] {
            let residual = crate::contours::truncation_residual(path, quad, |z| {
                sign * eval_phase(&phase0, z).re
            });
            if residual > cfg.truncation_tol.max(1e-14) {
                return Err(Error::TruncationInsufficient {
                    residual,
                    context: format!("pearcey contours at tau={tau}"),
                });
            }
        }
        Ok(Self {
            tau,
            mu: ComplexQuadrature::concat(&[&ql, &qr], ContourLabel::Custom),
            lambda: qa,
        })
    }

    /// Kernel value by tensor quadrature of
    /// `(1/(2πi)²) ∫_{γ_L∪γ_R} dμ ∫_{iℝ} dλ e^{Θ_x(μ) - Θ_y(λ)}/(λ - μ)`.
    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        let phase_x = PhaseSpec::pearcey(self.tau, x);
        let phase_y = PhaseSpec::pearcey(self.tau, y);
        let e_mu: Vec<Complex64> = self
            .mu
            .nodes
            .iter()
            .zip(&self.mu.weights)
            .map(|(&m, &w)| w * eval_phase(&phase_x, m).exp())
            .collect();
        let e_la: Vec<Complex64> = self
            .lambda
            .nodes
            .iter()
            .zip(&self.lambda.weights)
            .map(|(&l, &w)| w * (-eval_phase(&phase_y, l)).exp())
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, &em) in self.mu.nodes.iter().zip(&e_mu) {
            let mut inner = Complex64::new(0.0, 0.0);
            for (q, &el) in self.lambda.nodes.iter().zip(&e_la) {
                inner += el / (q - p);
            }
            acc += em * inner;
        }
        let val = acc / Complex64::new(0.0, 2.0 * std::f64::consts::PI).powu(2);
        if val.im.abs() > 1e-9 * val.norm().max(1e-30) {
            return Err(Error::ImaginaryResidue {
                residual: val.im.abs() / val.norm().max(1e-300),
                context: format!("pearcey kernel (x={x}, y={y}, tau={})", self.tau),
            });
        }
        Ok(val.re)
    }
}

/// Upper limit of the Laplace variable in the `t_integral` route.
pub fn t_integral_cutoff(tau: f64) -> f64 {
    12.0 + 6.0 * (1.0 + tau.abs()).sqrt()
}

/// Pearcey kernel through the one-dimensional Laplace factorisation
///
/// `K_P(x,y) = ∫_0^∞ [φ_R(x+t)ψ(y+t) - φ_L(x-t)ψ(y-t)] dt`.
///
/// The relative sign between the two products is fixed once by the
/// double-contour route (down-oriented imaginary axis) and frozen here.
pub fn pearcey_kernel_t_integral(
    x: f64,
    y: f64,
    tau: f64,
    table: Option<&PearceyFunctionTable>,
) -> Result<f64> {
    let t_max = t_integral_cutoff(tau);
    let order = 16;
    let panels = t_max.ceil() as usize;
    let base = gauss_legendre_rule(order)?;
    let mut acc = 0.0;
    for j in 0..panels {
        let t0 = t_max * j as f64 / panels as f64;
        let t1 = t_max * (j + 1) as f64 / panels as f64;
        let r = affine_map(&base, t0, t1)?;
        for (&t, &w) in r.nodes.iter().zip(&r.weights) {
            let (phi_r, psi_p, phi_l, psi_m) = match table {
                Some(tb) => (
                    tb.phi_r(x + t),
                    tb.psi(y + t),
                    tb.phi_l(x - t),
                    tb.psi(y - t),
                ),
                None => {
                    let (pr, _) = pearcey_phi_r(tau, x + t)?;
                    let (pl, _) = pearcey_phi_l(tau, x - t)?;
                    let (pp, _) = pearcey_psi(tau, y + t);
                    let (pm, _) = pearcey_psi(tau, y - t);
                    (pr, pp, pl, pm)
                }
            };
            acc += w * (phi_r * psi_p - phi_l * psi_m);
        }
    }
    Ok(acc)
}

/// Pearcey kernel with route selection.
pub fn pearcey_kernel(x: f64, y: f64, tau: f64, route: EvalRoute, cfg: &NumericsConfig) -> Result<f64> {
    match route {
        EvalRoute::ClosedForm => Err(Error::Config(
            "the closed-form route exists only for the Airy kernel".into(),
        )),
        EvalRoute::DoubleContour => PearceyContours::build(tau, cfg, 1)?.kernel(x, y),
        EvalRoute::TIntegral => pearcey_kernel_t_integral(x, y, tau, None),
    }
}

/// General `(1,p)` kernel. Degrees 2 and 3 route to the Airy and Pearcey
/// machinery; higher degrees need caller-supplied contours.
pub fn general_p_kernel(
    spec: &PhaseSpec,
    x: f64,
    y: f64,
    cfg: &NumericsConfig,
    custom: Option<(&ComplexQuadrature, &ComplexQuadrature)>,
) -> Result<f64> {
    match (spec.degree(), custom) {
        (2, None) => airy_kernel_contour(x, y, cfg),
        (3, None) => {
            let tau = spec.deformation()[0];
            PearceyContours::build(tau, cfg, 1)?.kernel(x, y)
        }
        (_, Some((mu_quad, lambda_quad))) => {
            let phase_x = spec.with_shift(x);
            let phase_y = spec.with_shift(y);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&m, &wm) in mu_quad.nodes.iter().zip(&mu_quad.weights) {
                let em = wm * eval_phase(&phase_x, m).exp();
                let mut inner = Complex64::new(0.0, 0.0);
                for (&l, &wl) in lambda_quad.nodes.iter().zip(&lambda_quad.weights) {
                    inner += wl * (-eval_phase(&phase_y, l)).exp() / (l - m);
                }
                acc += em * inner;
            }
            let val = acc / Complex64::new(0.0, 2.0 * std::f64::consts::PI).powu(2);
            Ok(val.re)
        }
        (p, None) => Err(Error::Config(format!(
            "degree {p} kernels need explicit contours"
        ))),
    }
}
