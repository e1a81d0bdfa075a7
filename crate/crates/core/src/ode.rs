//! Embedded Dormand–Prince 5(4) integrator with step-size control.
//!
//! Coefficients from Dormand & Prince (1980). The integrator is generic over
//! a fixed-size state array; tolerances are applied per component with the
//! usual mixed absolute/relative error norm. Integration may run in either
//! direction (`t_end` below `t0` integrates downward).

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 4th-order embedded weights
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

fn axpyn<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction).
/// Returns the state at `t_end`.
pub fn dopri5<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<[f64; N]> {
    if t0 == t_end {
        return Ok(y0);
    }
    let dir = (t_end - t0).signum();
    let span = (t_end - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = (span / 100.0).min(0.1).max(1e-8) * dir;
    let mut steps = 0usize;
    while (t_end - t) * dir > 0.0 {
        if steps > opts.max_steps {
            return Err(Error::NoConvergence {
                last: t,
                previous: t0,
                context: "ode step limit exceeded".into(),
            });
        }
        steps += 1;
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        let k2 = f(t + 0.2 * h, &axpyn(&y, &[(A21, &k1)], h));
        let k3 = f(t + 0.3 * h, &axpyn(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(
            t + 0.8 * h,
            &axpyn(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
        );
        let k5 = f(
            t + 8.0 / 9.0 * h,
            &axpyn(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = f(
            t + h,
            &axpyn(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        );
        let y5 = axpyn(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = f(t + h, &y5);
        let y4 = axpyn(
            &y,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            h,
        );
        // mixed error norm
        let mut err: f64 = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4[i]) / sc).abs());
        }
        if err <= 1.0 || h.abs() <= 1e-14 * span.max(1.0) {
            t += h;
            y = y5;
            k1 = k7; // FSAL
            if !y.iter().all(|v| v.is_finite()) {
                return Err(Error::BlowUp { at: t });
            }
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(y)
}

/// Integrates through an ordered sequence of output points, returning the
/// state at each (the first entry of `stops` is `t0` with state `y0`).
pub fn dopri5_at<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
    stops: &[f64],
    y0: [f64; N],
    opts: &OdeOptions,
) -> Result<Vec<[f64; N]>> {
    let mut out = Vec::with_capacity(stops.len());
    let mut y = y0;
    out.push(y);
    for w in stops.windows(2) {
        y = dopri5(f, w[0], y, w[1], opts)?;
        out.push(y);
    }
    Ok(out)
}
