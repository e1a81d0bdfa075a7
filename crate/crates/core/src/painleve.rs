//! Hastings–McLeod solution of Painlevé II and the Tracy–Widom log-gap.
//!
//! The Hastings–McLeod solution is the unique solution of
//! `q'' = 2q³ + sq` with `q(s) ~ Ai(s)` as `s → +∞` (Hastings & McLeod
//! 1980). It is computed by shooting downward from `s_max` with the
//! adaptive Dormand–Prince integrator: the growing (`Bi`-type) mode of the
//! linearisation decays in that direction near `+∞`, which keeps downward
//! shooting stable to `s ≈ -8` in double precision.
//!
//! The integration carries four components:
//!
//! ```text
//! q' , q'' = 2q³ + sq , P' = -q² , V' = -P
//! ```
//!
//! so that `P(s) = ∫_s^∞ q²` and `V(s) = ∫_s^∞ (x-s) q(x)² dx` come out of
//! the same pass, seeded at `s_max` by the asymptotic tail integrals of
//! `Ai²`. The Tracy–Widom log-gap is then `log det(Id - K_Ai|[s,∞)) = -V(s)`
//! and its `s`-derivative is `P(s)`.
//!
//! An independent boundary-value relaxation solver (Newton on a Numerov
//! discretisation) doubles as the test oracle and as the fallback for
//! ranges below the shooting certification.

use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::ode::OdeOptions;
use crate::special::{airy_ai_cfg, airy_asymptotic, airy_squared_tails};

/// Grids of `q`, `q'`, `P = ∫q²` and `V = ∫(x-s)q²` with cubic Hermite
/// interpolation (each field's derivative is known exactly from the ODE).
#[derive(Debug, Clone)]
pub struct HastingsMcLeodSolution {
    /// increasing grid `s_min = s[0] < … < s[n-1] = s_max`
    pub s_grid: Vec<f64>,
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
    pub p: Vec<f64>,
    pub v: Vec<f64>,
    step: f64,
}

/// Options for [`hastings_mcleod_solve`].
#[derive(Debug, Clone, Copy)]
pub struct HmOptions {
    pub grid_step: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for HmOptions {
    fn default() -> Self {
        Self {
            grid_step: 0.01,
            rtol: 1e-12,
            atol: 1e-12,
        }
    }
}

fn hm_rhs(s: f64, y: &[f64; 4]) -> [f64; 4] {
    let q = y[0];
    [y[1], 2.0 * q * q * q + s * q, -q * q, -y[2]]
}

/// Shooting solve over `[s_min, s_max]`.
///
/// `s_max ≥ 8` seeds the `Ai` asymptotics accurately; `s_min ≥ -8` stays
/// inside the range where downward shooting is reliable in f64 (use
/// [`hastings_mcleod_relax`] below that).
pub fn hastings_mcleod_solve(
    s_min: f64,
    s_max: f64,
    opts: &HmOptions,
) -> Result<HastingsMcLeodSolution> {
    if s_max < 8.0 {
        return Err(Error::Config(format!(
            "hastings_mcleod_solve needs s_max >= 8 for accurate seeding, got {s_max}"
        )));
    }
    if s_min < -8.0 {
        return Err(Error::Config(format!(
            "downward shooting is certified for s_min >= -8, got {s_min}; use the relaxation solver"
        )));
    }
    if s_min >= s_max {
        return Err(Error::Config("need s_min < s_max".into()));
    }
    let cfg = NumericsConfig::default();
    // seed q at s_max: direct contour values up to the evaluation range,
    // two-term asymptotics beyond
    let (q0, qp0) = if s_max <= 10.0 {
        let v = airy_ai_cfg(s_max, &cfg)?;
        (v.ai, v.ai_prime)
    } else {
        airy_asymptotic(s_max)
    };
    let (p0, v0) = airy_squared_tails(s_max)?;
    let n = ((s_max - s_min) / opts.grid_step).ceil() as usize + 1;
    let stops: Vec<f64> = (0..n)
        .map(|k| s_max - (s_max - s_min) * k as f64 / (n - 1) as f64)
        .collect();
    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        max_steps: 10_000_000,
    };
    let mut states = Vec::with_capacity(n);
    let mut y = [q0, qp0, p0, v0];
    states.push(y);
    for w in stops.windows(2) {
        y = crate::ode::dopri5(&mut hm_rhs, w[0], y, w[1], &ode_opts)?;
        if y[0].abs() > 1e3 {
            return Err(Error::BlowUp { at: w[1] });
        }
        states.push(y);
    }
    // reverse into increasing s order
    let mut s_grid: Vec<f64> = stops.into_iter().rev().collect();
    states.reverse();
    // guard against rounding drift at the ends
    s_grid[0] = s_min;
    *s_grid.last_mut().unwrap() = s_max;
    let sol = HastingsMcLeodSolution {
        step: (s_max - s_min) / (n - 1) as f64,
        q: states.iter().map(|y| y[0]).collect(),
        q_prime: states.iter().map(|y| y[1]).collect(),
        p: states.iter().map(|y| y[2]).collect(),
        v: states.iter().map(|y| y[3]).collect(),
        s_grid,
    };
    if sol.q.iter().any(|&q| q <= 0.0) {
        return Err(Error::BlowUp {
            at: sol.s_grid[sol.q.iter().position(|&q| q <= 0.0).unwrap()],
        });
    }
    Ok(sol)
}

impl HastingsMcLeodSolution {
    pub fn s_min(&self) -> f64 {
        self.s_grid[0]
    }

    pub fn s_max(&self) -> f64 {
        *self.s_grid.last().unwrap()
    }

    fn locate(&self, s: f64) -> Result<(usize, f64)> {
        if s < self.s_min() - 1e-12 || s > self.s_max() + 1e-12 {
            return Err(Error::Domain(format!(
                "s = {s} outside the solution grid [{}, {}]",
                self.s_min(),
                self.s_max()
            )));
        }
        let pos = (s - self.s_min()) / self.step;
        let k = (pos.floor() as isize).clamp(0, self.s_grid.len() as isize - 2) as usize;
        Ok((k, s - self.s_grid[k]))
    }

    /// Cubic Hermite interpolation of a field whose derivative field is
    /// supplied explicitly.
    fn hermite(&self, f: &[f64], d: &[f64], s: f64) -> Result<f64> {
        let (k, dx) = self.locate(s)?;
        let h = self.s_grid[k + 1] - self.s_grid[k];
        let t = dx / h;
        let t2 = t * t;
        let t3 = t2 * t;
        Ok((1.0 - 3.0 * t2 + 2.0 * t3) * f[k]
            + (3.0 * t2 - 2.0 * t3) * f[k + 1]
            + h * ((t - 2.0 * t2 + t3) * d[k] + (t3 - t2) * d[k + 1]))
    }

    /// `q(s)` by interpolation.
    pub fn q_at(&self, s: f64) -> Result<f64> {
        self.hermite(&self.q, &self.q_prime, s)
    }

    /// `q'(s)` by interpolation (derivative from the defining equation).
    pub fn q_prime_at(&self, s: f64) -> Result<f64> {
        let qpp: Vec<f64> = self
            .s_grid
            .iter()
            .zip(&self.q)
            .map(|(&s, &q)| 2.0 * q * q * q + s * q)
            .collect();
        self.hermite(&self.q_prime, &qpp, s)
    }
}

/// `p(s) = ∫_s^∞ q² = ∂_s log det(Id - K_Ai|[s,∞))`; nonnegative and
/// nonincreasing (`p' = -q²`).
pub fn p_of_s(s: f64, hm: &HastingsMcLeodSolution) -> Result<f64> {
    let dp: Vec<f64> = hm.q.iter().map(|&q| -q * q).collect();
    hm.hermite(&hm.p, &dp, s)
}

/// `log det(Id - K_Ai|[s,∞)) = -∫_s^∞ (x-s) q(x)² dx ≤ 0`.
pub fn tw_log_gap(s: f64, hm: &HastingsMcLeodSolution) -> Result<f64> {
    let dv: Vec<f64> = hm.p.iter().map(|&p| -p).collect();
    let v = hm.hermite(&hm.v, &dv, s)?;
    Ok(-v)
}

/// Boundary-value relaxation solve: Newton iteration on the fourth-order
/// Numerov discretisation of `q'' = 2q³ + sq` with Dirichlet data
/// `q(s_min) = √(-s_min/2)` (leading left asymptotic; the boundary error
/// decays like `e^{-(2√2/3)|s|^{3/2}}` into the interior) and
/// `q(s_max) = Ai(s_max)`. Independent of the shooting path.
pub fn hastings_mcleod_relax(
    s_min: f64,
    s_max: f64,
    n_intervals: usize,
    initial: Option<&HastingsMcLeodSolution>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if s_min > -4.0 || s_max < 4.0 {
        return Err(Error::Config(
            "relaxation expects s_min <= -4 (left asymptotic boundary) and s_max >= 4".into(),
        ));
    }
    let n = n_intervals;
    let h = (s_max - s_min) / n as f64;
    let grid: Vec<f64> = (0..=n).map(|k| s_min + h * k as f64).collect();
    let cfg = NumericsConfig::default();
    let q_left = (-s_min / 2.0).sqrt();
    let q_right = airy_ai_cfg(s_max.min(30.0), &cfg)?.ai;
    // initial guess: interpolate the shooting solution, else a crude bridge
    let mut q: Vec<f64> = grid
        .iter()
        .map(|&s| {
            if let Some(hm) = initial {
                if s >= hm.s_min() && s <= hm.s_max() {
                    return hm.q_at(s).unwrap_or(0.0);
                }
            }
            if s <= 0.0 {
                (-s / 2.0).sqrt()
            } else {
                q_right * ((s_max - s) / s_max.max(1.0))
            }
        })
        .collect();
    q[0] = q_left;
    q[n] = q_right;
    let f = |s: f64, q: f64| 2.0 * q * q * q + s * q;
    let fq = |s: f64, q: f64| 6.0 * q * q + s;
    for _iter in 0..60 {
        // Numerov residual: q_{k+1} - 2q_k + q_{k-1}
        //   - h²/12 (f_{k+1} + 10 f_k + f_{k-1}) = 0
        let mut rhs = vec![0.0; n - 1];
        let mut sub = vec![0.0; n - 1];
        let mut diag = vec![0.0; n - 1];
        let mut sup = vec![0.0; n - 1];
        let c = h * h / 12.0;
        for k in 1..n {
            let r = q[k + 1] - 2.0 * q[k] + q[k - 1]
                - c * (f(grid[k + 1], q[k + 1]) + 10.0 * f(grid[k], q[k]) + f(grid[k - 1], q[k - 1]));
            rhs[k - 1] = -r;
            sub[k - 1] = 1.0 - c * fq(grid[k - 1], q[k - 1]);
            diag[k - 1] = -2.0 - 10.0 * c * fq(grid[k], q[k]);
            sup[k - 1] = 1.0 - c * fq(grid[k + 1], q[k + 1]);
        }
        // Thomas solve for the interior correction
        let m = n - 1;
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        cp[0] = sup[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for i in 1..m {
            let denom = diag[i] - sub[i] * cp[i - 1];
            cp[i] = sup[i] / denom;
            dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / denom;
        }
        let mut delta = vec![0.0; m];
        delta[m - 1] = dp[m - 1];
        for i in (0..m - 1).rev() {
            delta[i] = dp[i] - cp[i] * delta[i + 1];
        }
        let mut worst: f64 = 0.0;
        for k in 1..n {
            q[k] += delta[k - 1];
            worst = worst.max(delta[k - 1].abs());
        }
        if worst < 1e-13 {
            return Ok((grid, q));
        }
    }
    Err(Error::NoConvergence {
        last: f64::NAN,
        previous: f64::NAN,
        context: "hastings_mcleod_relax Newton iteration".into(),
    })
}

/// Convenience: default solve over `[-8, s_max]`.
pub fn hastings_mcleod_default(s_max: f64) -> Result<HastingsMcLeodSolution> {
    hastings_mcleod_solve(-8.0, s_max, &HmOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hm() -> HastingsMcLeodSolution {
        hastings_mcleod_solve(-8.0, 8.0, &HmOptions::default()).unwrap()
    }

    #[test]
    fn seeding_matches_airy_at_smax() {
        let sol = hm();
        let v = airy_ai_cfg(8.0, &NumericsConfig::default()).unwrap();
        let q8 = sol.q_at(8.0).unwrap();
        assert!(
            (q8 / v.ai - 1.0).abs() < 1e-10,
            "q(8)/Ai(8) = {}",
            q8 / v.ai
        );
    }

    #[test]
    fn ode_residual_small_on_grid() {
        // |q'' - 2q³ - sq| via second differences at interior grid points
        let sol = hm();
        let h = sol.s_grid[1] - sol.s_grid[0];
        let mut worst: f64 = 0.0;
        for k in 1..sol.s_grid.len() - 1 {
            let second = (sol.q[k + 1] - 2.0 * sol.q[k] + sol.q[k - 1]) / (h * h);
            let rhs = 2.0 * sol.q[k].powi(3) + sol.s_grid[k] * sol.q[k];
            // the second difference itself carries an O(h²·q⁗) error
            let q4_scale = (sol.s_grid[k] * sol.s_grid[k] * sol.q[k]).abs() + 1.0;
            worst = worst.max((second - rhs).abs() / (1.0 + rhs.abs() + h * h * q4_scale / 6.0));
        }
        assert!(worst <= 1e-3, "worst normalised residual {worst}");
        // pointwise against the exact derivative fields: much tighter
        for k in [10usize, 100, 500] {
            let s = sol.s_grid[k];
            let qpp = 2.0 * sol.q[k].powi(3) + s * sol.q[k];
            let fd = (sol.q_prime_at(s + 1e-5).unwrap() - sol.q_prime_at(s - 1e-5).unwrap())
                / 2e-5;
            assert!((fd - qpp).abs() <= 1e-8 * (1.0 + qpp.abs()), "s = {s}");
        }
    }

    #[test]
    fn positivity_and_p_monotonicity() {
        let sol = hm();
        assert!(sol.q.iter().all(|&q| q > 0.0));
        assert!(sol.p.iter().all(|&p| p >= 0.0));
        // p decreasing in s: stored increasing in s, so pairwise check
        assert!(sol
            .p
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-15));
        // p(s_max) is the Airy tail integral, tiny for s_max = 10
        let sol10 = hastings_mcleod_solve(-8.0, 10.0, &HmOptions::default()).unwrap();
        let p_end = p_of_s(10.0, &sol10).unwrap();
        assert!((0.0..1e-14).contains(&p_end), "p(10) = {p_end}");
    }

    #[test]
    fn seed_independence() {
        let a = hastings_mcleod_solve(-8.0, 8.0, &HmOptions::default()).unwrap();
        let b = hastings_mcleod_solve(-8.0, 10.0, &HmOptions::default()).unwrap();
        let qa = a.q_at(0.0).unwrap();
        let qb = b.q_at(0.0).unwrap();
        assert!((qa - qb).abs() < 1e-9, "q(0): {qa} vs {qb}");
    }

    #[test]
    fn relaxation_oracle_confirms_q0() {
        let sol = hm();
        let (grid, q) = hastings_mcleod_relax(-8.0, 8.0, 16_000, Some(&sol)).unwrap();
        // value at s = 0 by direct lookup (grid contains 0)
        let k = grid.iter().position(|&s| s.abs() < 1e-12).unwrap();
        let q0_shoot = sol.q_at(0.0).unwrap();
        assert!(
            (q[k] - q0_shoot).abs() < 1e-7,
            "relaxation {} vs shooting {q0_shoot}",
            q[k]
        );
    }

    #[test]
    fn blow_up_detection_below_certified_range() {
        let res = hastings_mcleod_solve(-8.0, 7.0, &HmOptions::default());
        assert!(res.is_err(), "s_max < 8 must be rejected");
        let res2 = hastings_mcleod_solve(-12.0, 8.0, &HmOptions::default());
        assert!(res2.is_err(), "s_min < -8 must be rejected");
    }

    #[test]
    fn tw_log_gap_boundary_and_slope() {
        let sol = hm();
        // at s_max the integral is just the (tiny) tail
        let end = tw_log_gap(8.0, &sol).unwrap();
        assert!(end.abs() < 1e-10, "log gap at s_max: {end}");
        // d/ds tw_log_gap = p(s)
        for &s in &[-4.0, -1.0, 0.0, 2.0] {
            let h = 1e-4;
            let fd =
                (tw_log_gap(s + h, &sol).unwrap() - tw_log_gap(s - h, &sol).unwrap()) / (2.0 * h);
            let p = p_of_s(s, &sol).unwrap();
            assert!((fd - p).abs() <= 1e-7 * (1.0 + p.abs()), "s = {s}: {fd} vs {p}");
            assert!(tw_log_gap(s, &sol).unwrap() <= 0.0);
        }
        assert!(tw_log_gap(-8.5, &sol).is_err());
    }

    #[test]
    fn tw_identity_against_nystrom_determinant() {
        // the keystone cross-route identity at s = 0
        let sol = hm();
        let lhs = tw_log_gap(0.0, &sol).unwrap().exp();
        let rhs = crate::fredholm::airy_gap_probability(
            &crate::quadrature::IntervalUnion::tail(0.0).unwrap(),
            &NumericsConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-6);
    }
}
