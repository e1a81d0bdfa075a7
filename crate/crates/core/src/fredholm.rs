//! Discretised operators and Fredholm determinants.
//!
//! Three determinant routes are implemented and cross-validated:
//!
//! * **Real-line Nyström**: the kernel restricted to an interval union `I`
//!   is sampled at composite Gauss–Legendre nodes with the symmetrised
//!   scaling `M = W^{1/2} K W^{1/2}`, and `det(Id - K χ_I) ≈ det(Id - M)`.
//!   Symmetrisation only conditions the matrix; the determinant is
//!   invariant under the diagonal rescaling, so it is applied to the
//!   (possibly nonsymmetric) quartic kernel as well.
//! * **Contour operator**: an integrable kernel `f^T(λ)g(μ)/(λ-μ)` on the
//!   phase contours whose Fredholm determinant equals the real-line one.
//!   The `±phase/2` split between `f` and `g` keeps each factor bounded on
//!   its contour; any residual magnitude imbalance is absorbed by an exact
//!   power-of-two diagonal conjugation (balancing) before the LU.
//! * **Resolvent derivative**: `∂ log det(Id-K) = -Tr((Id-K)^{-1} ∂K)`,
//!   with endpoint motion reducing to the resolvent diagonal at the moving
//!   endpoint and the deformation parameter differentiating the phase under
//!   the integral.

use crate::config::NumericsConfig;
use crate::contours::{discretize_contour, ComplexQuadrature};
use crate::error::{Error, Result};
use crate::kernels::{t_integral_cutoff, EvalRoute, PearceyContours};
use crate::phases::{eval_phase, PhaseSpec};
use crate::quadrature::{composite_rule_per_unit, IntervalUnion, QuadratureRule};
use crate::special::{airy_ai_cfg, AiryValue, PearceyFunctionTable, AIRY_MAX_ARG};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Square real discretisation `M = W^{1/2} K W^{1/2}` of an integral
/// operator at quadrature nodes.
#[derive(Debug, Clone)]
pub struct NystromOperator {
    pub matrix: DMatrix<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// True when `matrix` carries the symmetrised `W^{1/2}KW^{1/2}` scaling
    /// (as opposed to the plain `K(x_i,x_j) w_j` form).
    pub symmetrized: bool,
}

/// Square complex discretisation of a contour operator, weights folded in
/// column-wise (`M_ij = K(z_i, z_j) w_j`).
#[derive(Debug, Clone)]
pub struct ContourOperator {
    pub matrix: DMatrix<Complex64>,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

/// Builds the symmetrised Nyström matrix of a kernel over a rule.
pub fn nystrom_matrix(
    kernel: &(dyn Fn(f64, f64) -> Result<f64> + Sync),
    rule: &QuadratureRule,
) -> Result<NystromOperator> {
    let n = rule.len();
    let sq: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = kernel(rule.nodes[i], rule.nodes[j])? * sq[i] * sq[j];
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(NystromOperator {
        matrix,
        nodes: rule.nodes.clone(),
        weights: rule.weights.clone(),
        symmetrized: true,
    })
}

/// [`nystrom_matrix`] with the kernel drawn from a [`KernelHandle`].
pub fn nystrom_matrix_for(
    handle: &crate::kernels::KernelHandle,
    rule: &QuadratureRule,
) -> Result<NystromOperator> {
    nystrom_matrix(&|x, y| handle.eval(x, y), rule)
}

/// `det(Id - M)` by pivoted LU, with a condition estimate guarding against
/// a determinant that is zero to working precision.
pub fn fredholm_det(op: &NystromOperator) -> Result<f64> {
    let n = op.matrix.nrows();
    if n == 0 {
        return Ok(1.0);
    }
    let a = DMatrix::identity(n, n) - &op.matrix;
    let lu = a.lu();
    let u = lu.u();
    let mut min_d = f64::INFINITY;
    let mut max_d: f64 = 0.0;
    for i in 0..n {
        let d = u[(i, i)].abs();
        min_d = min_d.min(d);
        max_d = max_d.max(d);
    }
    if min_d < 1e-14 * max_d.max(1.0) {
        return Err(Error::NearSingular {
            cond_estimate: max_d / min_d.max(f64::MIN_POSITIVE),
        });
    }
    Ok(lu.determinant())
}

/// Parlett–Reinsch balancing of `m` by exact powers of two (a diagonal
/// conjugation, so `det(Id - m)` is unchanged).
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    const RADIX: f64 = 2.0;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    r += m[(i, j)].norm();
                    c += m[(j, i)].norm();
                }
            }
            if r == 0.0 || c == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, mut r2) = (c, r);
            while c2 < r2 / RADIX {
                c2 *= RADIX;
                r2 /= RADIX;
                f *= RADIX;
            }
            while c2 >= r2 * RADIX {
                c2 /= RADIX;
                r2 *= RADIX;
                f /= RADIX;
            }
            if c2 + r2 < 0.95 * s && f != 1.0 {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// `det(Id - M)` for a complex contour operator, returning the determinant's
/// real part and its relative imaginary residue: balance, LU, demand the
/// result is real to within `imag_tol` relative.
pub fn fredholm_det_contour_full(
    op: &ContourOperator,
    imag_tol: f64,
    context: &str,
) -> Result<(f64, f64)> {
    let n = op.matrix.nrows();
    if n == 0 {
        return Ok((1.0, 0.0));
    }
    let mut m = op.matrix.clone();
    balance(&mut m);
    let mut a = -m;
    for i in 0..n {
        a[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let lu = a.lu();
    let det = lu.determinant();
    let residual = det.im.abs() / det.norm().max(1e-300);
    if residual > imag_tol {
        return Err(Error::ImaginaryResidue {
            residual,
            context: context.to_string(),
        });
    }
    Ok((det.re, residual))
}

/// [`fredholm_det_contour_full`] discarding the residue.
pub fn fredholm_det_contour(op: &ContourOperator, imag_tol: f64, context: &str) -> Result<f64> {
    fredholm_det_contour_full(op, imag_tol, context).map(|(d, _)| d)
}

// ---------------------------------------------------------------------------
// Real-line kernels as matrix factories
// ---------------------------------------------------------------------------

/// Airy kernel values on a node set, reusing one `Ai` evaluation per node.
/// Near-diagonal pairs switch to the even midpoint expansion.
fn airy_matrix(
    xs: &[f64],
    ys: &[f64],
    vx: &[AiryValue],
    vy: &[AiryValue],
    cfg: &NumericsConfig,
) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; ys.len()];
            for (j, slot) in row.iter_mut().enumerate() {
                let (x, y) = (xs[i], ys[j]);
                *slot = if (x - y).abs() < 1e-4 {
                    let m = 0.5 * (x + y);
                    let delta = 0.5 * (x - y);
                    let v = airy_ai_cfg(m, cfg)?;
                    let (a, b) = (v.ai, v.ai_prime);
                    let curv = (a * b + 2.0 * m * b * b - 2.0 * m * m * a * a) / 3.0;
                    b * b - m * a * a + delta * delta * curv
                } else {
                    (vx[i].ai * vy[j].ai_prime - vy[j].ai * vx[i].ai_prime) / (x - y)
                };
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(xs.len(), ys.len(), |i, j| rows[i][j]))
}

fn airy_values(nodes: &[f64], cfg: &NumericsConfig) -> Result<Vec<AiryValue>> {
    nodes
        .par_iter()
        .map(|&x| airy_ai_cfg(x, cfg))
        .collect::<Result<_>>()
}

/// Quartic-kernel matrix factory through the factorised double-contour
/// assembly `K = A·C·B^T` where only `A`, `B` depend on the real nodes.
#[derive(Debug, Clone)]
pub struct PearceyAssembly {
    pub tau: f64,
    contours: PearceyContours,
    c: DMatrix<Complex64>,
    /// like `c` but with the `(λ² - μ²)/2` factor of `∂_τ` folded in
    c_dtau: DMatrix<Complex64>,
}

impl PearceyAssembly {
    pub fn build(tau: f64, cfg: &NumericsConfig, refine: usize) -> Result<Self> {
        let contours = PearceyContours::build(tau, cfg, refine)?;
        let phase0 = PhaseSpec::pearcey(tau, 0.0);
        let p = contours.mu.len();
        let q = contours.lambda.len();
        let norm = Complex64::new(0.0, 2.0 * std::f64::consts::PI).powu(2);
        let e_mu: Vec<Complex64> = contours
            .mu
            .nodes
            .iter()
            .zip(&contours.mu.weights)
            .map(|(&m, &w)| w * eval_phase(&phase0, m).exp())
            .collect();
        let e_la: Vec<Complex64> = contours
            .lambda
            .nodes
            .iter()
            .zip(&contours.lambda.weights)
            .map(|(&l, &w)| w * (-eval_phase(&phase0, l)).exp())
            .collect();
        let mut c = DMatrix::zeros(p, q);
        let mut c_dtau = DMatrix::zeros(p, q);
        for ip in 0..p {
            let mu = contours.mu.nodes[ip];
            for iq in 0..q {
                let la = contours.lambda.nodes[iq];
                let base = e_mu[ip] * e_la[iq] / ((la - mu) * norm);
                c[(ip, iq)] = base;
                c_dtau[(ip, iq)] = base * (la * la - mu * mu) / 2.0;
            }
        }
        Ok(Self {
            tau,
            contours,
            c,
            c_dtau,
        })
    }

    fn node_factors(&self, xs: &[f64], ys: &[f64]) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let a = DMatrix::from_fn(xs.len(), self.contours.mu.len(), |i, p| {
            (-xs[i] * self.contours.mu.nodes[p]).exp()
        });
        let b = DMatrix::from_fn(ys.len(), self.contours.lambda.len(), |j, q| {
            (ys[j] * self.contours.lambda.nodes[q]).exp()
        });
        (a, b)
    }

    fn contract(
        &self,
        core: &DMatrix<Complex64>,
        xs: &[f64],
        ys: &[f64],
        context: &str,
    ) -> Result<DMatrix<f64>> {
        let (a, b) = self.node_factors(xs, ys);
        let k = a * core * b.transpose();
        let mut max_re: f64 = 0.0;
        let mut max_im: f64 = 0.0;
        for v in k.iter() {
            max_re = max_re.max(v.re.abs());
            max_im = max_im.max(v.im.abs());
        }
        if max_im > 1e-9 * max_re.max(1e-30) {
            return Err(Error::ImaginaryResidue {
                residual: max_im / max_re.max(1e-300),
                context: context.to_string(),
            });
        }
        Ok(k.map(|v| v.re))
    }

    /// `K_P(x_i, y_j)` for all node pairs.
    pub fn kernel_matrix(&self, xs: &[f64], ys: &[f64]) -> Result<DMatrix<f64>> {
        self.contract(&self.c, xs, ys, "pearcey kernel matrix")
    }

    /// `∂_τ K_P(x_i, y_j)` for all node pairs.
    pub fn kernel_matrix_dtau(&self, xs: &[f64], ys: &[f64]) -> Result<DMatrix<f64>> {
        self.contract(&self.c_dtau, xs, ys, "pearcey kernel tau-derivative")
    }
}

/// Quartic-kernel matrix factory through the Laplace factorisation with
/// tabulated one-contour functions: `K = P·S^T - L·T^T` over the `t` grid.
#[derive(Debug, Clone)]
pub struct PearceyTIntegral {
    pub tau: f64,
    table: PearceyFunctionTable,
    t_rule: QuadratureRule,
}

impl PearceyTIntegral {
    pub fn build(tau: f64, a_max: f64, cfg: &NumericsConfig) -> Result<Self> {
        let t_max = t_integral_cutoff(tau);
        let table = PearceyFunctionTable::for_assembly(tau, a_max, t_max, 0.01)?;
        let panels = t_max.ceil() as usize;
        let base = crate::quadrature::gauss_legendre_rule(16.min(cfg.quad_order.max(8)))?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for j in 0..panels {
            let t0 = t_max * j as f64 / panels as f64;
            let t1 = t_max * (j + 1) as f64 / panels as f64;
            let r = crate::quadrature::affine_map(&base, t0, t1)?;
            nodes.extend_from_slice(&r.nodes);
            weights.extend_from_slice(&r.weights);
        }
        Ok(Self {
            tau,
            table,
            t_rule: QuadratureRule { nodes, weights },
        })
    }

    pub fn kernel_matrix(&self, xs: &[f64], ys: &[f64]) -> Result<DMatrix<f64>> {
        let nt = self.t_rule.len();
        let p = DMatrix::from_fn(xs.len(), nt, |i, q| {
            self.t_rule.weights[q] * self.table.phi_r(xs[i] + self.t_rule.nodes[q])
        });
        let l = DMatrix::from_fn(xs.len(), nt, |i, q| {
            self.t_rule.weights[q] * self.table.phi_l(xs[i] - self.t_rule.nodes[q])
        });
        let s = DMatrix::from_fn(ys.len(), nt, |j, q| {
            self.table.psi(ys[j] + self.t_rule.nodes[q])
        });
        let t = DMatrix::from_fn(ys.len(), nt, |j, q| {
            self.table.psi(ys[j] - self.t_rule.nodes[q])
        });
        let k = &p * s.transpose() - &l * t.transpose();
        // cancellation guard: at large deformation the one-contour factors
        // reach e^{±big} while far-apart kernel entries are ~0; once the
        // rounding of the largest same-q product exceeds the kernel scale
        // the assembly is meaningless in f64 and must be reported, not LU'd
        let col_max = |m: &DMatrix<f64>, q: usize| {
            (0..m.nrows()).fold(0.0f64, |acc, i| acc.max(m[(i, q)].abs()))
        };
        let mut summand_max = 0.0f64;
        for q in 0..nt {
            summand_max = summand_max.max(col_max(&p, q) * col_max(&s, q));
            summand_max = summand_max.max(col_max(&l, q) * col_max(&t, q));
        }
        let k_max = k.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let noise = summand_max * nt as f64 * f64::EPSILON;
        if noise > 1e-3 * k_max.max(1e-3) {
            return Err(Error::TruncationInsufficient {
                residual: noise / k_max.max(1e-300),
                context: format!(
                    "t-integral cancellation beyond f64 at tau = {} (summand scale {summand_max:.3e})",
                    self.tau
                ),
            });
        }
        Ok(k)
    }
}

// ---------------------------------------------------------------------------
// Gap probabilities (real-line route)
// ---------------------------------------------------------------------------

pub(crate) fn symmetrize_kernel(k: DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut m = k;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= sq[i] * sq[j];
        }
    }
    m
}

/// Composite rule over `I` with Airy-range capping: nodes beyond the `Ai`
/// evaluation range contribute below `1e-100` and are dropped.
fn airy_rule(iu: &IntervalUnion, order: usize, cfg: &NumericsConfig) -> Result<QuadratureRule> {
    let rule = composite_rule_per_unit(iu, order, cfg.panels_per_unit, cfg.tail_scale)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        if x.abs() <= AIRY_MAX_ARG {
            nodes.push(x);
            weights.push(w);
        }
    }
    Ok(QuadratureRule { nodes, weights })
}

/// `det(Id - K_Ai χ_I)` by Nyström quadrature with order doubling.
pub fn airy_gap_probability(iu: &IntervalUnion, cfg: &NumericsConfig) -> Result<f64> {
    let mut prev: Option<f64> = None;
    for k in 0..=3 {
        let order = cfg.quad_order << k;
        let rule = airy_rule(iu, order, cfg)?;
        if rule.is_empty() {
            return Ok(1.0);
        }
        let vals = airy_values(&rule.nodes, cfg)?;
        let kmat = airy_matrix(&rule.nodes, &rule.nodes, &vals, &vals, cfg)?;
        let op = NystromOperator {
            matrix: symmetrize_kernel(kmat, &rule.weights),
            nodes: rule.nodes.clone(),
            weights: rule.weights.clone(),
            symmetrized: true,
        };
        let det = fredholm_det(&op)?;
        if let Some(p) = prev {
            if (det - p).abs() <= cfg.det_tol {
                return Ok(det);
            }
        }
        prev = Some(det);
    }
    Err(Error::NoConvergence {
        last: prev.unwrap_or(f64::NAN),
        previous: f64::NAN,
        context: "airy_gap_probability order doubling".into(),
    })
}

fn require_bounded_even(iu: &IntervalUnion) -> Result<()> {
    if iu.unbounded_tail() {
        return Err(Error::Domain(
            "the quartic kernel acts on bounded interval unions only".into(),
        ));
    }
    Ok(())
}

/// `det(Id - K_P χ_I)` by Nyström quadrature with order doubling;
/// `route` selects the kernel-matrix factory.
pub fn pearcey_gap_probability(
    iu: &IntervalUnion,
    tau: f64,
    cfg: &NumericsConfig,
    route: EvalRoute,
) -> Result<f64> {
    require_bounded_even(iu)?;
    let a_max = iu.endpoints().iter().fold(0.0f64, |m, a| m.max(a.abs()));
    enum Factory {
        Contour(Box<PearceyAssembly>),
        Tables(Box<PearceyTIntegral>),
    }
    let factory = match route {
        EvalRoute::DoubleContour => {
            Factory::Contour(Box::new(PearceyAssembly::build(tau, cfg, 1)?))
        }
        EvalRoute::TIntegral => {
            Factory::Tables(Box::new(PearceyTIntegral::build(tau, a_max, cfg)?))
        }
        EvalRoute::ClosedForm => {
            return Err(Error::Config(
                "the closed-form route exists only for the Airy kernel".into(),
            ))
        }
    };
    let mut prev: Option<f64> = None;
    for k in 0..=3 {
        let order = cfg.quad_order << k;
        let rule = composite_rule_per_unit(iu, order, cfg.panels_per_unit, cfg.tail_scale)?;
        if rule.is_empty() {
            return Ok(1.0);
        }
        let kmat = match &factory {
            Factory::Contour(a) => a.kernel_matrix(&rule.nodes, &rule.nodes)?,
            Factory::Tables(t) => t.kernel_matrix(&rule.nodes, &rule.nodes)?,
        };
        let op = NystromOperator {
            matrix: symmetrize_kernel(kmat, &rule.weights),
            nodes: rule.nodes.clone(),
            weights: rule.weights.clone(),
            symmetrized: true,
        };
        let det = fredholm_det(&op)?;
        if let Some(p) = prev {
            if (det - p).abs() <= cfg.det_tol {
                return Ok(det);
            }
        }
        prev = Some(det);
    }
    Err(Error::NoConvergence {
        last: prev.unwrap_or(f64::NAN),
        previous: f64::NAN,
        context: format!("pearcey_gap_probability at tau={tau}"),
    })
}

// ---------------------------------------------------------------------------
// Contour-operator determinants
// ---------------------------------------------------------------------------

/// Assembles the integrable-kernel matrix `K̃(z_i, z_j) w_j` given the two
/// node groups and the scalar kernel for cross-group pairs. Same-group
/// entries are the structural zeros of the `f^T g` contraction.
fn contour_operator(
    group_a: &ComplexQuadrature,
    group_b: &ComplexQuadrature,
    kernel_ab: &dyn Fn(Complex64, Complex64) -> Complex64,
    kernel_ba: &dyn Fn(Complex64, Complex64) -> Complex64,
) -> ContourOperator {
    let na = group_a.len();
    let nb = group_b.len();
    let n = na + nb;
    let mut nodes = Vec::with_capacity(n);
    nodes.extend_from_slice(&group_a.nodes);
    nodes.extend_from_slice(&group_b.nodes);
    let mut weights = Vec::with_capacity(n);
    weights.extend_from_slice(&group_a.weights);
    weights.extend_from_slice(&group_b.weights);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..na {
        for j in 0..nb {
            m[(i, na + j)] = kernel_ab(nodes[i], nodes[na + j]) * weights[na + j];
        }
    }
    for i in 0..nb {
        for j in 0..na {
            m[(na + i, j)] = kernel_ba(nodes[na + i], nodes[j]) * weights[j];
        }
    }
    ContourOperator {
        matrix: m,
        nodes,
        weights,
    }
}

fn alternating_exponential_sum(endpoints: &[f64], w: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for &a in endpoints {
        acc += sign * (a * w).exp();
        sign = -sign;
    }
    acc
}

/// Contour-operator determinant equal to `det(Id - K_Ai χ_I)`.
///
/// The kernel lives on `γ_R ∪ γ_L` with the cubic `±λ³/6` split:
/// rows on `γ_R` against columns on `γ_L` carry
/// `e^{(λ³-μ³)/6}/(2πi(λ-μ))`, the transposed block carries the
/// alternating endpoint sum `Σ_k (-1)^{k+1} e^{(μ³-λ³)/6 + a_k(λ-μ)}`.
pub fn contour_det_airy(iu: &IntervalUnion, cfg: &NumericsConfig) -> Result<f64> {
    contour_det_airy_with_residual(iu, cfg).map(|(d, _)| d)
}

/// [`contour_det_airy`] also reporting the imaginary residue of the
/// converged determinant.
pub fn contour_det_airy_with_residual(
    iu: &IntervalUnion,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    let scale = iu.endpoints().iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let trunc = cfg.airy_truncation(scale);
    let endpoints = iu.endpoints().to_vec();
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut prev: Option<f64> = None;
    for k in 0..=3 {
        let panels = cfg.contour_panels << k;
        let (gr, gl) = crate::contours::airy_contours_shifted(cfg.contour_anchor, trunc)?;
        let qr = discretize_contour(&gr, cfg.contour_order, panels)?;
        let ql = discretize_contour(&gl, cfg.contour_order, panels)?;
        let rl = |la: Complex64, mu: Complex64| {
            ((la * la * la - mu * mu * mu) / 6.0).exp() / ((la - mu) * two_pi_i)
        };
        let eps = endpoints.clone();
        let lr = move |la: Complex64, mu: Complex64| {
            let base = ((mu * mu * mu - la * la * la) / 6.0).exp();
            base * alternating_exponential_sum(&eps, la - mu) / ((la - mu) * two_pi_i)
        };
        let op = contour_operator(&qr, &ql, &rl, &lr);
        let (det, residual) = fredholm_det_contour_full(&op, 1e-6, "contour_det_airy")?;
        if let Some(p) = prev {
            if (det - p).abs() <= cfg.det_tol.max(1e-10) {
                return Ok((det, residual));
            }
        }
        prev = Some(det);
    }
    Err(Error::NoConvergence {
        last: prev.unwrap_or(f64::NAN),
        previous: f64::NAN,
        context: "contour_det_airy panel doubling".into(),
    })
}

/// Contour-operator determinant equal to `det(Id - K_P χ_I)`.
///
/// The kernel lives on `(γ_L ∪ γ_R) ∪ iℝ` with the quartic `±Θ_0/2` split:
/// wedge rows against axis columns carry
/// `e^{(Θ_0(λ)-Θ_0(μ))/2}/(2πi(λ-μ))`, the transposed block carries the
/// alternating endpoint sum.
pub fn contour_det_pearcey(iu: &IntervalUnion, tau: f64, cfg: &NumericsConfig) -> Result<f64> {
    contour_det_pearcey_with_residual(iu, tau, cfg).map(|(d, _)| d)
}

/// [`contour_det_pearcey`] also reporting the imaginary residue of the
/// converged determinant.
pub fn contour_det_pearcey_with_residual(
    iu: &IntervalUnion,
    tau: f64,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    require_bounded_even(iu)?;
    let endpoints = iu.endpoints().to_vec();
    let phase0 = PhaseSpec::pearcey(tau, 0.0);
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut prev: Option<f64> = None;
    for k in 0..=3 {
        let mut c = *cfg;
        c.contour_panels = cfg.contour_panels << k;
        let quads = PearceyContours::build(tau, &c, 1)?;
        let ph = phase0.clone();
        let ga = move |la: Complex64, mu: Complex64| {
            ((eval_phase(&ph, la) - eval_phase(&ph, mu)) / 2.0).exp() / ((la - mu) * two_pi_i)
        };
        let ph2 = phase0.clone();
        let eps = endpoints.clone();
        let ag = move |la: Complex64, mu: Complex64| {
            let base = ((eval_phase(&ph2, mu) - eval_phase(&ph2, la)) / 2.0).exp();
            base * alternating_exponential_sum(&eps, la - mu) / ((la - mu) * two_pi_i)
        };
        let op = contour_operator(&quads.mu, &quads.lambda, &ga, &ag);
        let (det, residual) = fredholm_det_contour_full(&op, 1e-6, "contour_det_pearcey")?;
        if let Some(p) = prev {
            if (det - p).abs() <= cfg.det_tol.max(1e-10) {
                return Ok((det, residual));
            }
        }
        prev = Some(det);
    }
    Err(Error::NoConvergence {
        last: prev.unwrap_or(f64::NAN),
        previous: f64::NAN,
        context: "contour_det_pearcey panel doubling".into(),
    })
}

// ---------------------------------------------------------------------------
// Resolvent-based parameter derivative
// ---------------------------------------------------------------------------

/// Which determinant family a derivative refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetFamily {
    Airy,
    Pearcey { tau: f64 },
}

/// Which parameter to differentiate in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetParam {
    /// Index into the endpoint list (0-based).
    Endpoint(usize),
    /// The quartic deformation parameter.
    Tau,
}

struct RealKernelMatrices<'a> {
    airy_cfg: Option<&'a NumericsConfig>,
    pearcey: Option<&'a PearceyAssembly>,
}

impl RealKernelMatrices<'_> {
    fn matrix(&self, xs: &[f64], ys: &[f64], cfg: &NumericsConfig) -> Result<DMatrix<f64>> {
        if let Some(a) = self.pearcey {
            a.kernel_matrix(xs, ys)
        } else {
            let c = self.airy_cfg.unwrap_or(cfg);
            let vx = airy_values(xs, c)?;
            let vy = airy_values(ys, c)?;
            airy_matrix(xs, ys, &vx, &vy, c)
        }
    }
}

/// `∂ log det(Id - K χ_I)` in an endpoint or in `τ`, through
/// `-Tr((Id-K)^{-1} ∂K)`.
///
/// Moving an endpoint differentiates the characteristic function, which
/// collapses the trace to the resolvent diagonal at that endpoint with the
/// sign `+` for a left endpoint and `-` for a right one. The `τ` derivative
/// differentiates the phase under the contour integral.
pub fn log_det_param_derivative(
    family: DetFamily,
    iu: &IntervalUnion,
    param: DetParam,
    cfg: &NumericsConfig,
) -> Result<f64> {
    let assembly = match family {
        DetFamily::Pearcey { tau } => {
            require_bounded_even(iu)?;
            Some(PearceyAssembly::build(tau, cfg, 1)?)
        }
        DetFamily::Airy => None,
    };
    let kernels = RealKernelMatrices {
        airy_cfg: match family {
            DetFamily::Airy => Some(cfg),
            _ => None,
        },
        pearcey: assembly.as_ref(),
    };
    let rule = match family {
        DetFamily::Airy => airy_rule(iu, cfg.quad_order * 2, cfg)?,
        DetFamily::Pearcey { .. } => {
            composite_rule_per_unit(iu, cfg.quad_order * 2, cfg.panels_per_unit, cfg.tail_scale)?
        }
    };
    let n = rule.len();
    let kmat = if n > 0 {
        kernels.matrix(&rule.nodes, &rule.nodes, cfg)?
    } else {
        DMatrix::zeros(0, 0)
    };
    // column-weighted form A = K·W for the resolvent solves
    let mut a = kmat.clone();
    for j in 0..n {
        for i in 0..n {
            a[(i, j)] *= rule.weights[j];
        }
    }
    let id_minus = DMatrix::identity(n, n) - &a;
    let lu = id_minus.lu();
    match param {
        DetParam::Endpoint(l) => {
            let endpoints = iu.endpoints();
            if l >= endpoints.len() {
                return Err(Error::Config(format!(
                    "endpoint index {l} out of range (N = {})",
                    endpoints.len()
                )));
            }
            let e = endpoints[l];
            let k_aa = kernels.matrix(&[e], &[e], cfg)?[(0, 0)];
            let r_aa = if n == 0 {
                k_aa
            } else {
                let k_col = kernels.matrix(&rule.nodes, &[e], cfg)?;
                let k_row = kernels.matrix(&[e], &rule.nodes, cfg)?;
                let rhs = nalgebra::DVector::from_fn(n, |i, _| k_col[(i, 0)]);
                let u = lu.solve(&rhs).ok_or(Error::NearSingular {
                    cond_estimate: f64::INFINITY,
                })?;
                let mut acc = k_aa;
                for i in 0..n {
                    acc += k_row[(0, i)] * rule.weights[i] * u[i];
                }
                acc
            };
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign * r_aa)
        }
        DetParam::Tau => {
            let assembly = assembly
                .as_ref()
                .ok_or_else(|| Error::Config("tau derivative requires the quartic kernel".into()))?;
            if n == 0 {
                return Ok(0.0);
            }
            let mut da = assembly.kernel_matrix_dtau(&rule.nodes, &rule.nodes)?;
            for j in 0..n {
                for i in 0..n {
                    da[(i, j)] *= rule.weights[j];
                }
            }
            let x = lu.solve(&da).ok_or(Error::NearSingular {
                cond_estimate: f64::INFINITY,
            })?;
            Ok(-x.trace())
        }
    }
}
