//! The polynomial exponent families entering the double-contour kernels.
//!
//! A phase of degree `p` with shift `x` and deformation parameters
//! `(τ_2, …, τ_{p-1})` is
//!
//! ```text
//! Θ_x(z) = z^{p+1}/(p+1) - τ_{p-1} z^{p-1}/(p-1) - … - τ_2 z^2/2 - x z
//! ```
//!
//! `p = 2` (no deformation) is the cubic Airy phase `z³/3 - xz`; `p = 3`
//! with a single parameter `τ` is the quartic Pearcey phase
//! `z⁴/4 - τz²/2 - xz`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Degree, deformation parameters and shift of one phase function.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpec {
    degree: u32,
    deformation: Vec<f64>,
    shift: f64,
}

impl PhaseSpec {
    /// General `(1, p)` phase. `deformation` holds `(τ_2, …, τ_{p-1})`.
    pub fn new(degree: u32, deformation: Vec<f64>, shift: f64) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Config(format!(
                "phase degree must be >= 2, got {degree}"
            )));
        }
        if deformation.len() != (degree as usize).saturating_sub(2) {
            return Err(Error::Config(format!(
                "degree {} phase takes {} deformation parameters, got {}",
                degree,
                degree - 2,
                deformation.len()
            )));
        }
        Ok(Self {
            degree,
            deformation,
            shift,
        })
    }

    /// Airy phase `ϑ_x(z) = z³/3 - xz`.
    pub fn airy(x: f64) -> Self {
        Self {
            degree: 2,
            deformation: vec![],
            shift: x,
        }
    }

    /// Pearcey phase `Θ_x(z) = z⁴/4 - τz²/2 - xz`.
    pub fn pearcey(tau: f64, x: f64) -> Self {
        Self {
            degree: 3,
            deformation: vec![tau],
            shift: x,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn deformation(&self) -> &[f64] {
        &self.deformation
    }

    /// Same phase with a different shift.
    pub fn with_shift(&self, x: f64) -> Self {
        Self {
            shift: x,
            ..self.clone()
        }
    }

    /// Monomial coefficients `c_0 + c_1 z + … + c_{p+1} z^{p+1}`.
    fn coefficients(&self) -> Vec<f64> {
        let p = self.degree as usize;
        let mut c = vec![0.0; p + 2];
        c[p + 1] = 1.0 / (p as f64 + 1.0);
        // deformation[k-2] multiplies z^k/k for k = 2..=p-1
        for (k, tau) in (2..=p.saturating_sub(1)).zip(&self.deformation) {
            c[k] = -tau / k as f64;
        }
        c[1] = -self.shift;
        c
    }
}

/// Horner evaluation of the phase at a complex point. Degrees 2 and 3 take
/// allocation-free fast paths (they sit in every kernel inner loop).
#[inline]
pub fn eval_phase(spec: &PhaseSpec, z: Complex64) -> Complex64 {
    match spec.degree {
        2 => {
            let z2 = z * z;
            z2 * z / 3.0 - spec.shift * z
        }
        3 => {
            let z2 = z * z;
            z2 * z2 / 4.0 - spec.deformation[0] * z2 / 2.0 - spec.shift * z
        }
        _ => {
            let c = spec.coefficients();
            let mut acc = Complex64::new(0.0, 0.0);
            for &ck in c.iter().rev() {
                acc = acc * z + ck;
            }
            acc
        }
    }
}

/// Real part of the rightmost root of `μ³ - τμ - x` (Cardano / trigonometric
/// form); the wedge vertex for pointwise quartic-factor evaluations.
pub fn pearcey_rightmost_saddle_re(tau: f64, x: f64) -> f64 {
    let p = -tau;
    let q = -x;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    if disc > 0.0 {
        // three real roots (requires p < 0)
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos();
        (0..3)
            .map(|k| m * ((theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos())
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        let half_q = -q / 2.0;
        let rad = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        let real_root = (half_q + rad).cbrt() + (half_q - rad).cbrt();
        real_root.max(-real_root / 2.0)
    }
}

/// Horner evaluation of the phase derivative `Θ'_x(z) = z^p - … - x`.
#[inline]
pub fn eval_phase_derivative(spec: &PhaseSpec, z: Complex64) -> Complex64 {
    match spec.degree {
        2 => z * z - spec.shift,
        3 => z * z * z - spec.deformation[0] * z - spec.shift,
        _ => {
            let c = spec.coefficients();
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &ck) in c.iter().enumerate().skip(1).rev() {
                acc = acc * z + ck * k as f64;
            }
            acc
        }
    }
}

/// All `p` roots of the phase derivative, as companion-matrix eigenvalues
/// polished by two Newton steps.
pub fn saddle_points(spec: &PhaseSpec) -> Vec<Complex64> {
    let c = spec.coefficients();
    let p = spec.degree as usize;
    // Θ' is monic of degree p with coefficients k·c_k.
    let deriv: Vec<f64> = (1..=p + 1).map(|k| c[k] * k as f64).collect();
    debug_assert!((deriv[p] - 1.0).abs() < 1e-14);
    let mut comp = DMatrix::<f64>::zeros(p, p);
    for i in 1..p {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..p {
        comp[(i, p - 1)] = -deriv[i];
    }
    let mut roots: Vec<Complex64> = comp
        .complex_eigenvalues()
        .iter()
        .map(|e| Complex64::new(e.re, e.im))
        .collect();
    for r in &mut roots {
        for _ in 0..2 {
            let f = eval_phase_derivative(spec, *r);
            // second derivative by Horner on k(k-1)c_k
            let mut fp = Complex64::new(0.0, 0.0);
            for (k, &ck) in c.iter().enumerate().skip(2).rev() {
                fp = fp * *r + ck * (k * (k - 1)) as f64;
            }
            if fp.norm() > 0.0 {
                *r -= f / fp;
            }
        }
    }
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    roots
}

/// Discriminant `-4τ³ + 27a²` of the Pearcey phase derivative `λ³ - τλ - a`.
pub fn pearcey_discriminant(tau: f64, a: f64) -> f64 {
    -4.0 * tau.powi(3) + 27.0 * a * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn airy_phase_values() {
        let s = PhaseSpec::airy(0.0);
        assert_abs_diff_eq!(eval_phase(&s, c(1.0, 0.0)).re, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eval_phase(&s, c(0.0, 0.0)).norm(), 0.0, epsilon = 0.0);
        let s1 = PhaseSpec::airy(2.0);
        assert_abs_diff_eq!(
            eval_phase(&s1, c(1.0, 0.0)).re,
            1.0 / 3.0 - 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pearcey_phase_values() {
        let s = PhaseSpec::pearcey(0.0, 0.0);
        assert_abs_diff_eq!(eval_phase(&s, c(1.0, 0.0)).re, 0.25, epsilon = 1e-15);
        let s1 = PhaseSpec::pearcey(1.5, -0.5);
        // z=2: 16/4 - 1.5*4/2 + 0.5*2 = 4 - 3 + 1 = 2
        assert_abs_diff_eq!(eval_phase(&s1, c(2.0, 0.0)).re, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn airy_saddles_at_plus_minus_sqrt_x() {
        let roots = saddle_points(&PhaseSpec::airy(1.0));
        assert_eq!(roots.len(), 2);
        assert_abs_diff_eq!(roots[0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(roots[1].re, 1.0, epsilon = 1e-12);
        assert!(roots.iter().all(|r| r.im.abs() < 1e-12));
    }

    #[test]
    fn pearcey_saddles_cube_root_structure() {
        let roots = saddle_points(&PhaseSpec::pearcey(1.0, 0.0));
        assert_eq!(roots.len(), 3);
        let mut re: Vec<f64> = roots.iter().map(|r| r.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(re[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn discriminant_zero_forces_double_saddle() {
        // τ = 3Λ⁶, a = 2Λ⁹ sits on the discriminant for every Λ
        for lambda in [0.7_f64, 1.0, 1.25] {
            let tau = 3.0 * lambda.powi(6);
            let a = 2.0 * lambda.powi(9);
            assert_abs_diff_eq!(
                pearcey_discriminant(tau, a) / (27.0 * a * a).max(1.0),
                0.0,
                epsilon = 1e-12
            );
            let roots = saddle_points(&PhaseSpec::pearcey(tau, a));
            // double root: two of the three roots coincide (at Λ³)
            let mut min_gap = f64::INFINITY;
            for i in 0..3 {
                for j in i + 1..3 {
                    min_gap = min_gap.min((roots[i] - roots[j]).norm());
                }
            }
            assert!(
                min_gap < 1e-4 * lambda.powi(3).max(1.0),
                "Λ = {lambda}: min root gap {min_gap}"
            );
        }
        assert_abs_diff_eq!(pearcey_discriminant(3.0, 2.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pearcey_discriminant(0.0, 0.0), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(pearcey_discriminant(1.0, 0.0), -4.0, epsilon = 1e-15);
    }

    #[test]
    fn saddle_residual_small() {
        for spec in [
            PhaseSpec::airy(3.0),
            PhaseSpec::airy(-2.0),
            PhaseSpec::pearcey(2.0, 1.0),
            PhaseSpec::pearcey(5.0, -3.0),
            PhaseSpec::new(4, vec![1.0, 0.5], 0.3).unwrap(),
        ] {
            for r in saddle_points(&spec) {
                let res = eval_phase_derivative(&spec, r).norm();
                let bound = 1e-10 * (1.0 + r.norm()).powi(spec.degree() as i32);
                assert!(res <= bound, "residual {res} at root {r}");
            }
        }
    }

    proptest! {
        /// Conjugation symmetry of the phase for real parameters.
        #[test]
        fn phase_conjugation(x in -10.0f64..10.0, tau in -5.0f64..5.0,
                             re in -4.0f64..4.0, im in -4.0f64..4.0) {
            for spec in [PhaseSpec::airy(x), PhaseSpec::pearcey(tau, x)] {
                let z = c(re, im);
                let a = eval_phase(&spec, z.conj());
                let b = eval_phase(&spec, z).conj();
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
            }
        }

        /// Saddle points sum to zero (monic derivative, no degree p-1 term).
        #[test]
        fn saddles_sum_to_zero(x in -5.0f64..5.0, tau in -3.0f64..3.0) {
            for spec in [PhaseSpec::airy(x), PhaseSpec::pearcey(tau, x)] {
                let s: Complex64 = saddle_points(&spec).into_iter().sum();
                prop_assert!(s.norm() < 1e-9, "sum {s}");
            }
        }

        /// Closed-form rightmost saddle agrees with the companion route.
        #[test]
        fn rightmost_saddle_matches_eigen(x in -40.0f64..40.0, tau in 0.0f64..20.0) {
            let closed = pearcey_rightmost_saddle_re(tau, x);
            let eig = saddle_points(&PhaseSpec::pearcey(tau, x))
                .iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((closed - eig).abs() <= 1e-7 * (1.0 + eig.abs()),
                "closed {closed} vs eigen {eig} at tau={tau}, x={x}");
        }
    }
}
