//! The three headline verifications driven by the determinant machinery:
//! nonlinear-PDE residuals of the quartic log-determinant, the large-gap
//! factorisation into two Airy determinants, and the large-`τ` decay.

use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::fredholm::{
    fredholm_det, pearcey_gap_probability, symmetrize_kernel, NystromOperator, PearceyAssembly,
};
use crate::kernels::EvalRoute;
use crate::painleve::{tw_log_gap, HastingsMcLeodSolution};
use crate::quadrature::{composite_interval_rule, IntervalUnion};
use crate::stencils::ValueTensor;
use rayon::prelude::*;

/// Tensor of `g = log det(Id - K_P|[a,b])` on a centred grid in
/// `(E, W, τ) = ((a+b)/2, (a-b)/2, τ)`.
#[derive(Debug, Clone)]
pub struct PearceyGapGrid {
    /// centre in the original variables
    pub center: (f64, f64, f64),
    /// spacings `(h_E, h_W, h_τ)`
    pub spacing: (f64, f64, f64),
    pub counts: (usize, usize, usize),
    pub values: ValueTensor,
}

impl PearceyGapGrid {
    pub fn center_ew(&self) -> (f64, f64) {
        let (a, b, _) = self.center;
        (0.5 * (a + b), 0.5 * (a - b))
    }

    pub fn center_value(&self) -> f64 {
        let c = (self.counts.0 / 2, self.counts.1 / 2, self.counts.2 / 2);
        self.values.at(c.0, c.1, c.2)
    }
}

/// Fills the log-determinant tensor. Every grid point shares one contour
/// discretisation per `τ`-slice and one fixed panel/order structure, so the
/// quadrature error varies smoothly across the grid — a requirement for the
/// high-order stencils applied on top.
pub fn pearcey_gap_grid(
    center: (f64, f64, f64),
    spacing: (f64, f64, f64),
    counts: (usize, usize, usize),
    cfg: &NumericsConfig,
) -> Result<PearceyGapGrid> {
    let (a0, b0, tau0) = center;
    if !(a0 < b0) {
        return Err(Error::Domain(format!("need a < b at the centre, got ({a0}, {b0})")));
    }
    if counts.0 % 2 == 0 || counts.1 % 2 == 0 || counts.2 % 2 == 0 {
        return Err(Error::Config("grid counts must be odd".into()));
    }
    let (e0, w0) = (0.5 * (a0 + b0), 0.5 * (a0 - b0));
    let c = (counts.0 / 2, counts.1 / 2, counts.2 / 2);
    // every (a, b) in the grid must satisfy a < b and τ > 0
    let mut max_len = 0.0f64;
    for iw in 0..counts.1 {
        let w = w0 + (iw as f64 - c.1 as f64) * spacing.1;
        let len = -2.0 * w;
        if len <= 0.0 {
            return Err(Error::Domain(format!(
                "grid reaches a >= b at W = {w}"
            )));
        }
        max_len = max_len.max(len);
    }
    let tau_lo = tau0 - c.2 as f64 * spacing.2;
    if tau_lo <= 0.0 {
        return Err(Error::Domain(format!(
            "τ stencil reaches τ = {tau_lo} <= 0"
        )));
    }
    let panels = (max_len.ceil() as usize).max(1) * cfg.panels_per_unit.max(1);
    let order = cfg.quad_order;
    let mut values = vec![0.0; counts.0 * counts.1 * counts.2];
    for it in 0..counts.2 {
        let tau = tau0 + (it as f64 - c.2 as f64) * spacing.2;
        let assembly = PearceyAssembly::build(tau, cfg, 1)
            .map_err(|e| Error::Config(format!("τ-slice {tau}: {e}")))?;
        let slice: Vec<(usize, f64)> = (0..counts.0 * counts.1)
            .into_par_iter()
            .map(|flat| {
                let ie = flat / counts.1;
                let iw = flat % counts.1;
                let e = e0 + (ie as f64 - c.0 as f64) * spacing.0;
                let w = w0 + (iw as f64 - c.1 as f64) * spacing.1;
                let (a, b) = (e + w, e - w);
                let point = || -> Result<f64> {
                    let iu = IntervalUnion::bounded(vec![a, b])?;
                    let rule = composite_interval_rule(&iu, order, panels, cfg.tail_scale)?;
                    let kmat = assembly.kernel_matrix(&rule.nodes, &rule.nodes)?;
                    let op = NystromOperator {
                        matrix: symmetrize_kernel(kmat, &rule.weights),
                        nodes: rule.nodes.clone(),
                        weights: rule.weights.clone(),
                        symmetrized: true,
                    };
                    let det = fredholm_det(&op)?;
                    if det <= 0.0 {
                        return Err(Error::NearSingular {
                            cond_estimate: f64::INFINITY,
                        });
                    }
                    Ok(det.ln())
                };
                match point() {
                    Ok(g) => Ok((flat, g)),
                    Err(e) => Err(Error::Config(format!(
                        "grid point (a={a}, b={b}, tau={tau}): {e}"
                    ))),
                }
            })
            .collect::<Result<_>>()?;
        for (flat, g) in slice {
            let ie = flat / counts.1;
            let iw = flat % counts.1;
            values[(ie * counts.1 + iw) * counts.2 + it] = g;
        }
    }
    Ok(PearceyGapGrid {
        center,
        spacing,
        counts,
        values: ValueTensor::new(counts, values)?,
    })
}

/// Builds a grid from a closure (synthetic input for stencil verification).
pub fn pearcey_gap_grid_from_fn(
    center: (f64, f64, f64),
    spacing: (f64, f64, f64),
    counts: (usize, usize, usize),
    f: impl Fn(f64, f64, f64) -> f64,
) -> Result<PearceyGapGrid> {
    let (a0, b0, tau0) = center;
    let (e0, w0) = (0.5 * (a0 + b0), 0.5 * (a0 - b0));
    let c = (counts.0 / 2, counts.1 / 2, counts.2 / 2);
    let mut values = Vec::with_capacity(counts.0 * counts.1 * counts.2);
    for ie in 0..counts.0 {
        for iw in 0..counts.1 {
            for it in 0..counts.2 {
                let e = e0 + (ie as f64 - c.0 as f64) * spacing.0;
                let w = w0 + (iw as f64 - c.1 as f64) * spacing.1;
                let t = tau0 + (it as f64 - c.2 as f64) * spacing.2;
                values.push(f(e, w, t));
            }
        }
    }
    Ok(PearceyGapGrid {
        center,
        spacing,
        counts,
        values: ValueTensor::new(counts, values)?,
    })
}

/// Residuals of the three deformation equations (plus the shorter combined
/// one) at the grid centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeResiduals {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    /// the shorter combination equation, reported for diagnosis
    pub r4: f64,
}

/// All partial derivatives of `g` entering the residual formulas.
#[derive(Debug, Clone, Copy)]
#[allow(non_snake_case)]
struct GapDerivatives {
    gE: f64,
    gEE: f64,
    gEEE: f64,
    gE4: f64,
    gE6: f64,
    gT: f64,
    gTT: f64,
    gTTT: f64,
    gET: f64,
    gEET: f64,
    gE3T: f64,
    gEETT: f64,
    gWE: f64,
    gWEE: f64,
    gWT: f64,
}

fn gap_derivatives(grid: &PearceyGapGrid) -> Result<GapDerivatives> {
    let h = grid.spacing;
    let d = |o: (usize, usize, usize)| grid.values.mixed_derivative(o, h);
    Ok(GapDerivatives {
        gE: d((1, 0, 0))?,
        gEE: d((2, 0, 0))?,
        gEEE: d((3, 0, 0))?,
        gE4: d((4, 0, 0))?,
        gE6: d((6, 0, 0))?,
        gT: d((0, 0, 1))?,
        gTT: d((0, 0, 2))?,
        gTTT: d((0, 0, 3))?,
        gET: d((1, 0, 1))?,
        gEET: d((2, 0, 1))?,
        gE3T: d((3, 0, 1))?,
        gEETT: d((2, 0, 2))?,
        gWE: d((1, 1, 0))?,
        gWEE: d((2, 1, 0))?,
        gWT: d((0, 1, 1))?,
    })
}

fn residuals_from_derivatives(
    v: &GapDerivatives,
    e: f64,
    w: f64,
    tau: f64,
) -> PdeResiduals {
    let r1 = v.gE4 + 6.0 * v.gEE * v.gEE - 4.0 * tau * v.gEE + 12.0 * v.gTT;
    // (-3ε - 2τ∂_τ + 2∂_τ∂_E² + 1)∂_E g + 12 (∂_E²g)(∂_τ∂_E g)
    let eps_ge = e * v.gEE + w * v.gWE;
    let r2 = -3.0 * eps_ge - 2.0 * tau * v.gET + 2.0 * v.gE3T + v.gE
        + 12.0 * v.gEE * v.gET;
    // ε(12∂_τ g - 2∂_E²g) + τ(8∂_τ²g + 4∂_τ∂_E²g - 4∂_E⁴g - 8(∂_E²g)²)
    //  + 4∂_E²g + 16(∂_E²g)³ + 8(∂_E∂_τ g)∂_E³g + 10(∂_E³g)²
    //  + 16(∂_E⁴g)(∂_E²g) + ∂_E⁶g - 16∂_τ³g + 4∂_τ²∂_E²g
    //  - 24(∂_E∂_τ g)² - 8(∂_τ∂_E²g)(∂_E²g) - 8∂_τ g
    let eps_term = e * (12.0 * v.gET - 2.0 * v.gEEE) + w * (12.0 * v.gWT - 2.0 * v.gWEE);
    let r3 = eps_term
        + tau * (8.0 * v.gTT + 4.0 * v.gEET - 4.0 * v.gE4 - 8.0 * v.gEE * v.gEE)
        + 4.0 * v.gEE
        + 16.0 * v.gEE.powi(3)
        + 8.0 * v.gET * v.gEEE
        + 10.0 * v.gEEE * v.gEEE
        + 16.0 * v.gE4 * v.gEE
        + v.gE6
        - 16.0 * v.gTTT
        + 4.0 * v.gEETT
        - 24.0 * v.gET * v.gET
        - 8.0 * v.gEET * v.gEE
        - 8.0 * v.gT;
    // shorter combination: ∂_E⁶g - 8∂_τ g + 4τ(2∂_τ³g - ∂_E⁴g - 2(∂_E²g)²)
    //  + 12ε(∂_τ g) + 16(∂_E²g)³ + 4∂_τ²∂_E²g - 24(∂_τ∂_E g)²
    //  + 16(∂_E⁴g)(∂_E²g) + 10(∂_E³g)²
    let eps_gt = e * v.gET + w * v.gWT;
    let r4 = v.gE6 - 8.0 * v.gT
        + 4.0 * tau * (2.0 * v.gTTT - v.gE4 - 2.0 * v.gEE * v.gEE)
        + 12.0 * eps_gt
        + 16.0 * v.gEE.powi(3)
        + 4.0 * v.gEETT
        - 24.0 * v.gET * v.gET
        + 16.0 * v.gE4 * v.gEE
        + 10.0 * v.gEEE * v.gEEE;
    PdeResiduals { r1, r2, r3, r4 }
}

/// Residuals of the three deformation equations at the grid centre, by
/// second-order central differences throughout.
pub fn pde_residuals(grid: &PearceyGapGrid) -> Result<PdeResiduals> {
    if grid.counts.0 < 9 || grid.counts.1 < 5 || grid.counts.2 < 7 {
        return Err(Error::Config(format!(
            "PDE residuals need grid counts at least (9, 5, 7) \
             (∂_E⁶, ∂_W and ∂_τ³ stencils), got {:?}",
            grid.counts
        )));
    }
    let v = gap_derivatives(grid)?;
    let (e, w) = grid.center_ew();
    Ok(residuals_from_derivatives(&v, e, w, grid.center.2))
}

// ---------------------------------------------------------------------------
// Factorisation sweep
// ---------------------------------------------------------------------------

/// Endpoint scaling for the large-gap regime:
/// `a_∓ = ∓2Λ⁹ ± Λρ·3^{1/3}`, `τ = 3Λ⁶`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationScaling {
    pub lambda: f64,
    pub rho: f64,
    pub sigma: f64,
}

impl FactorizationScaling {
    pub fn new(lambda: f64, rho: f64, sigma: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("Λ must be positive, got {lambda}")));
        }
        let s = Self { lambda, rho, sigma };
        if s.a_minus() > s.a_plus() {
            return Err(Error::Domain(format!(
                "window violated: a_- = {} > a_+ = {} (ρ+σ exceeds 4·3^(-1/3)Λ⁸)",
                s.a_minus(),
                s.a_plus()
            )));
        }
        if s.window_k2() > 2.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "window constant K₂ = {} exceeds 2",
                s.window_k2()
            )));
        }
        Ok(s)
    }

    pub fn tau(&self) -> f64 {
        3.0 * self.lambda.powi(6)
    }

    pub fn a_minus(&self) -> f64 {
        -2.0 * self.lambda.powi(9) + self.lambda * self.rho * 3f64.cbrt()
    }

    pub fn a_plus(&self) -> f64 {
        2.0 * self.lambda.powi(9) - self.lambda * self.sigma * 3f64.cbrt()
    }

    /// Implied upper window constant `K₂ = max(ρ,σ)·3^{1/3}/Λ⁸`.
    pub fn window_k2(&self) -> f64 {
        self.rho.max(self.sigma).max(0.0) * 3f64.cbrt() / self.lambda.powi(8)
    }
}

/// One row of the factorisation sweep.
#[derive(Debug, Clone, Copy)]
pub struct FactorizationRow {
    pub lambda: f64,
    pub logdet_p: f64,
    pub logdet_airy_rho: f64,
    pub logdet_airy_sigma: f64,
    /// `|logdet_p - logdet_airy_rho - logdet_airy_sigma|`
    pub delta: f64,
    /// true when the determinant failed to converge at this `Λ`
    pub flagged: bool,
}

fn airy_factor(arg: f64, hm: &HastingsMcLeodSolution) -> Result<f64> {
    if arg > hm.s_max() {
        // deep-tail log-determinant is below 1e-14 there
        Ok(0.0)
    } else {
        tw_log_gap(arg, hm)
    }
}

/// Sweeps `Λ` and tabulates the gap between the quartic log-determinant on
/// `[a_-, a_+]` and the sum of the two Airy log-determinants at `ρ`, `σ`.
/// Non-convergent rows are flagged rather than fatal.
pub fn factorization_table(
    lambdas: &[f64],
    rho: f64,
    sigma: f64,
    hm: &HastingsMcLeodSolution,
    cfg: &NumericsConfig,
    route: EvalRoute,
) -> Result<Vec<FactorizationRow>> {
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let scaling = FactorizationScaling::new(lambda, rho, sigma)?;
        let la = airy_factor(rho, hm)?;
        let ls = airy_factor(sigma, hm)?;
        let (a_minus, a_plus) = (scaling.a_minus(), scaling.a_plus());
        if a_plus - a_minus < 1e-12 {
            rows.push(FactorizationRow {
                lambda,
                logdet_p: 0.0,
                logdet_airy_rho: la,
                logdet_airy_sigma: ls,
                delta: (la + ls).abs(),
                flagged: false,
            });
            continue;
        }
        let iu = IntervalUnion::bounded(vec![a_minus, a_plus])?;
        match pearcey_gap_probability(&iu, scaling.tau(), cfg, route) {
            Ok(det) if det > 0.0 => {
                let lp = det.ln();
                rows.push(FactorizationRow {
                    lambda,
                    logdet_p: lp,
                    logdet_airy_rho: la,
                    logdet_airy_sigma: ls,
                    delta: (lp - la - ls).abs(),
                    flagged: false,
                });
            }
            _ => rows.push(FactorizationRow {
                lambda,
                logdet_p: f64::NAN,
                logdet_airy_rho: la,
                logdet_airy_sigma: ls,
                delta: f64::NAN,
                flagged: true,
            }),
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Large-τ decay
// ---------------------------------------------------------------------------

/// One row of the decay table: `bound_ratio = |log det|·τ^{1/2}·e^{τ²/4}`.
#[derive(Debug, Clone, Copy)]
pub struct DecayRow {
    pub tau: f64,
    pub abs_log_det: f64,
    pub bound_ratio: f64,
    /// `|log det|` fell below 1e-300 and is reported as zero
    pub underflow: bool,
}

/// Tabulates the exponential approach of the determinant to one on a fixed
/// bounded interval as `τ` grows.
pub fn large_tau_decay(
    interval: (f64, f64),
    taus: &[f64],
    cfg: &NumericsConfig,
    route: EvalRoute,
) -> Result<Vec<DecayRow>> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got ({a}, {b})")));
    }
    if taus.windows(2).any(|w| w[0] >= w[1]) || taus.first().is_some_and(|&t| t < 2.0) {
        return Err(Error::Domain(
            "τ values must be increasing and at least 2".into(),
        ));
    }
    let iu = IntervalUnion::bounded(vec![a, b])?;
    taus.iter()
        .map(|&tau| {
            let det = pearcey_gap_probability(&iu, tau, cfg, route)?;
            let log_det = det.ln();
            let underflow = log_det.abs() < 1e-300;
            let abs_log = if underflow { 0.0 } else { log_det.abs() };
            Ok(DecayRow {
                tau,
                abs_log_det: abs_log,
                bound_ratio: abs_log * tau.sqrt() * (tau * tau / 4.0).exp(),
                underflow,
            })
        })
        .collect()
}
