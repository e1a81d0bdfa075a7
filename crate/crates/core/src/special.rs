//! Airy function and the one-contour factor functions of the quartic kernel.
//!
//! `Ai` is evaluated from its contour representation
//! `Ai(x) = (1/2πi) ∫_{γ_R} e^{μ³/3 - xμ} dμ` with the wedge vertex placed
//! at the saddle point of the phase: at `√x` for `x ≥ 0`, and through the
//! conjugate saddles `±i√|x|` (rays plus the connecting chord on the
//! imaginary axis) for `x < 0`. Anchoring at the saddle keeps the largest
//! integrand magnitude at the scale of the result, so the quadrature loses
//! no relative accuracy to cancellation.
//!
//! The quartic (Pearcey) kernel factorises into one-dimensional contour
//! functions
//!
//! ```text
//! φ_R(x) = (1/2πi) ∫_{γ_R} e^{Θ_x(μ)} dμ        (wedge at ±π/4, upwards)
//! φ_L(x) = (1/2πi) ∫_{γ_L} e^{Θ_x(μ)} dμ = -φ_R(-x)
//! ψ(y)   = (1/π) ∫_0^∞ e^{-v⁴/4 - τv²/2} cos(yv) dv
//! ```
//!
//! which this module evaluates pointwise and tabulates with cubic Hermite
//! interpolation for the fast kernel-assembly route.

use crate::config::NumericsConfig;
use crate::contours::{discretize_contour, ComplexQuadrature, ContourLabel, ContourPath, Segment};
use crate::error::{Error, Result};
use crate::phases::PhaseSpec;
use crate::quadrature::{affine_map, gauss_legendre_rule};
use num_complex::Complex64;
use rayon::prelude::*;

/// Largest argument magnitude the Airy evaluation accepts.
pub const AIRY_MAX_ARG: f64 = 30.0;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `Ai`, `Ai'` and the argument they were evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
    pub argument: f64,
}

fn airy_wedge_quadrature(x: f64, cfg: &NumericsConfig) -> Result<ComplexQuadrature> {
    let trunc = cfg.airy_truncation(x);
    let order = cfg.contour_order.max(24);
    let panels = cfg.contour_panels.max(6);
    if x >= 0.0 {
        let path = crate::contours::wedge(x.sqrt(), std::f64::consts::FRAC_PI_3, trunc)?;
        return discretize_contour(&path, order, panels);
    }
    // x < 0: rays from the conjugate saddles ±i√|x| plus the chord between
    // them. The chord carries a unimodular oscillating integrand, so it gets
    // uniform panels sized by the total phase (2/3)|x|^{3/2} per half.
    let a = (-x).sqrt();
    let dir_up = Complex64::new(0.5, 0.5 * 3f64.sqrt()); // e^{iπ/3}
    let top = Complex64::new(0.0, a);
    let rays = ContourPath {
        label: ContourLabel::GammaR,
        segments: vec![
            Segment {
                start: -top + trunc * dir_up.conj(),
                end: -top,
                graded_from_start: false,
            },
            Segment {
                start: top,
                end: top + trunc * dir_up,
                graded_from_start: true,
            },
        ],
        conj_symmetric: true,
    };
    let ray_quad = discretize_contour(&rays, order, panels)?;
    let half_phase = 2.0 / 3.0 * (-x).powf(1.5);
    let chord_panels = ((half_phase / std::f64::consts::PI / 4.0).ceil() as usize).max(2);
    let chord_order = order.max(32);
    let base = gauss_legendre_rule(chord_order)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let dz = Complex64::new(0.0, 1.0);
    let n_half = chord_panels;
    for j in 0..2 * n_half {
        let v0 = -a + a * j as f64 / n_half as f64;
        let v1 = -a + a * (j + 1) as f64 / n_half as f64;
        let r = affine_map(&base, v0, v1)?;
        for (&v, &w) in r.nodes.iter().zip(&r.weights) {
            nodes.push(Complex64::new(0.0, v));
            weights.push(dz * w);
        }
    }
    let chord = ComplexQuadrature {
        nodes,
        weights,
        source: ContourLabel::GammaR,
    };
    Ok(ComplexQuadrature::concat(
        &[&ray_quad, &chord],
        ContourLabel::GammaR,
    ))
}

/// `Ai(x)` and `Ai'(x)` by saddle-anchored contour quadrature.
///
/// Accurate to about `1e-12` absolute for `x ≥ -10` and `1e-9` on
/// `[-30, -10]`; arguments beyond `±30` are rejected.
pub fn airy_ai_cfg(x: f64, cfg: &NumericsConfig) -> Result<AiryValue> {
    if !x.is_finite() || x.abs() > AIRY_MAX_ARG {
        return Err(Error::Domain(format!(
            "airy_ai is supported on [-{AIRY_MAX_ARG}, {AIRY_MAX_ARG}], got {x}"
        )));
    }
    let quad = airy_wedge_quadrature(x, cfg)?;
    let spec = PhaseSpec::airy(x);
    let mut ai = Complex64::new(0.0, 0.0);
    let mut aip = Complex64::new(0.0, 0.0);
    for (&z, &w) in quad.nodes.iter().zip(&quad.weights) {
        let e = crate::phases::eval_phase(&spec, z).exp();
        ai += w * e;
        aip -= w * z * e;
    }
    let norm = Complex64::new(0.0, TWO_PI);
    Ok(AiryValue {
        ai: (ai / norm).re,
        ai_prime: (aip / norm).re,
        argument: x,
    })
}

/// [`airy_ai_cfg`] with default numerics.
pub fn airy_ai(x: f64) -> Result<AiryValue> {
    airy_ai_cfg(x, &NumericsConfig::default())
}

/// Two-term asymptotic expansion of `Ai`, `Ai'` for large positive `x`:
/// `Ai ≈ e^{-ζ}/(2√π x^{1/4})·(1 - 5/(72ζ))`, `ζ = (2/3)x^{3/2}`.
pub fn airy_asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let pre = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let ai = pre / x.powf(0.25) * (1.0 - 5.0 / (72.0 * zeta));
    let aip = -pre * x.powf(0.25) * (1.0 + 7.0 / (72.0 * zeta));
    (ai, aip)
}

/// Integral of `Ai(t)²` and of `(t-s)Ai(t)²` over `[s, ∞)`, evaluated from
/// the two-term asymptotic form (valid for `s ≥ 8`, where the expansion
/// error is far below the integral's own size).
pub fn airy_squared_tails(s: f64) -> Result<(f64, f64)> {
    if s < 8.0 {
        return Err(Error::Domain(format!(
            "asymptotic tail integrals need s >= 8, got {s}"
        )));
    }
    let base = gauss_legendre_rule(60)?;
    let rule = crate::quadrature::semi_infinite_map(&base, s, 1.0)?;
    let mut zeroth = 0.0;
    let mut first = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (ai, _) = airy_asymptotic(t);
        zeroth += w * ai * ai;
        first += w * (t - s) * ai * ai;
    }
    Ok((zeroth, first))
}

// ---------------------------------------------------------------------------
// Quartic-phase factor functions
// ---------------------------------------------------------------------------

/// `ψ(y)` and `ψ'(y)` at deformation `tau`.
pub fn pearcey_psi(tau: f64, y: f64) -> (f64, f64) {
    // decay cut: v⁴/4 + τv²/2 = 46  (integrand ~ 1e-20 there)
    let v_max = ((tau * tau + 184.0).sqrt() - tau).max(1.0).sqrt();
    let cycles = v_max * y.abs() / TWO_PI;
    let panels = ((cycles / 3.0).ceil() as usize).max(3);
    let base = gauss_legendre_rule(24).expect("fixed valid order");
    let mut val = 0.0;
    let mut deriv = 0.0;
    for j in 0..panels {
        let v0 = v_max * j as f64 / panels as f64;
        let v1 = v_max * (j + 1) as f64 / panels as f64;
        let r = affine_map(&base, v0, v1).expect("v0 < v1");
        for (&v, &w) in r.nodes.iter().zip(&r.weights) {
            let damp = (-v.powi(4) / 4.0 - tau * v * v / 2.0).exp();
            val += w * damp * (y * v).cos();
            deriv -= w * damp * v * (y * v).sin();
        }
    }
    let inv_pi = 1.0 / std::f64::consts::PI;
    (val * inv_pi, deriv * inv_pi)
}

/// Wedge vertex for a pointwise `φ_R` evaluation: the real part of the
/// rightmost saddle of `Θ_x`, clamped to the right half-plane.
fn phi_anchor(tau: f64, x: f64) -> f64 {
    crate::phases::pearcey_rightmost_saddle_re(tau, x).max(0.0)
}

/// `φ_R(x)` and `φ_R'(x)` at deformation `tau`.
pub fn pearcey_phi_r(tau: f64, x: f64) -> Result<(f64, f64)> {
    let anchor = phi_anchor(tau, x);
    let trunc = (6.0f64)
        .max(2.0 * (1.0 + tau.abs()).sqrt())
        .max(1.9 * x.abs().powf(1.0 / 3.0) + 2.0);
    let path = crate::contours::wedge(anchor, std::f64::consts::FRAC_PI_4, trunc)?;
    let quad = discretize_contour(&path, 48, 8)?;
    let spec = PhaseSpec::pearcey(tau, x);
    let mut val = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut max_re = f64::NEG_INFINITY;
    for (&z, &w) in quad.nodes.iter().zip(&quad.weights) {
        let ph = crate::phases::eval_phase(&spec, z);
        max_re = max_re.max(ph.re);
        let e = ph.exp();
        val += w * e;
        deriv -= w * z * e;
    }
    // truncation check at the ray cuts
    let residual = crate::contours::truncation_residual(&path, &quad, |z| {
        crate::phases::eval_phase(&spec, z).re
    });
    if residual > 1e-12 {
        return Err(Error::TruncationInsufficient {
            residual,
            context: format!("phi_r(tau={tau}, x={x})"),
        });
    }
    let norm = Complex64::new(0.0, TWO_PI);
    Ok(((val / norm).re, (deriv / norm).re))
}

/// `φ_L(x) = -φ_R(-x)` with the mirrored derivative sign.
pub fn pearcey_phi_l(tau: f64, x: f64) -> Result<(f64, f64)> {
    let (v, d) = pearcey_phi_r(tau, -x)?;
    Ok((-v, d))
}

/// Uniformly tabulated `φ_R`, `φ_L`, `ψ` with cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct PearceyFunctionTable {
    pub tau: f64,
    phi_lo: f64,
    psi_lo: f64,
    step: f64,
    phi_r: Vec<(f64, f64)>,
    psi: Vec<(f64, f64)>,
}

fn hermite_eval(lo: f64, step: f64, data: &[(f64, f64)], x: f64) -> f64 {
    let n = data.len();
    debug_assert!(n >= 2);
    let pos = (x - lo) / step;
    let k = (pos.floor() as isize).clamp(0, n as isize - 2) as usize;
    let t = pos - k as f64;
    let (f0, d0) = data[k];
    let (f1, d1) = data[k + 1];
    let t2 = t * t;
    let t3 = t2 * t;
    (1.0 - 3.0 * t2 + 2.0 * t3) * f0
        + (3.0 * t2 - 2.0 * t3) * f1
        + step * ((t - 2.0 * t2 + t3) * d0 + (t3 - t2) * d1)
}

impl PearceyFunctionTable {
    /// Tabulates on uniform grids sized for kernel assembly over intervals
    /// within `[-a_max, a_max]` and Laplace variable up to `t_max`.
    pub fn for_assembly(tau: f64, a_max: f64, t_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Config(format!("table step must be positive: {step}")));
        }
        let pad = 1.0 + 2.0 * step;
        // φ_R arguments range over [-a_max, a_max + t_max] (φ_L queries map
        // to the same range through φ_L(x) = -φ_R(-x)).
        let phi_lo = -a_max - pad;
        let phi_hi = a_max + t_max + pad;
        let psi_hi = a_max + t_max + pad;
        let n_phi = ((phi_hi - phi_lo) / step).ceil() as usize + 1;
        let n_psi = (2.0 * psi_hi / step).ceil() as usize + 1;
        let phi_r: Vec<(f64, f64)> = (0..n_phi)
            .into_par_iter()
            .map(|k| pearcey_phi_r(tau, phi_lo + k as f64 * step))
            .collect::<Result<_>>()?;
        let psi_lo = -psi_hi;
        let psi: Vec<(f64, f64)> = (0..n_psi)
            .into_par_iter()
            .map(|k| pearcey_psi(tau, psi_lo + k as f64 * step))
            .collect();
        Ok(Self {
            tau,
            phi_lo,
            psi_lo,
            step,
            phi_r,
            psi,
        })
    }

    pub fn phi_r(&self, x: f64) -> f64 {
        hermite_eval(self.phi_lo, self.step, &self.phi_r, x)
    }

    pub fn phi_l(&self, x: f64) -> f64 {
        -hermite_eval(self.phi_lo, self.step, &self.phi_r, -x)
    }

    pub fn psi(&self, y: f64) -> f64 {
        hermite_eval(self.psi_lo, self.step, &self.psi, y)
    }

    pub fn phi_range(&self) -> (f64, f64) {
        (
            self.phi_lo,
            self.phi_lo + self.step * (self.phi_r.len() - 1) as f64,
        )
    }
}

/// Tabulates `ψ`, `φ_R`, `φ_L` at the given arguments (no interpolation).
/// Each value is its direct contour-quadrature evaluation.
pub fn pearcey_functions(tau: f64, x_grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    x_grid
        .iter()
        .map(|&x| {
            let (psi, _) = pearcey_psi(tau, x);
            let (phi_r, _) = pearcey_phi_r(tau, x)?;
            let (phi_l, _) = pearcey_phi_l(tau, x)?;
            Ok((psi, phi_r, phi_l))
        })
        .collect()
}
