//! Central finite-difference stencils at second-order accuracy.
//!
//! Coefficients are the classical central weights (Fornberg 1988 reproduces
//! them as special cases): each stencil for the `m`-th derivative is exact
//! on polynomials up to degree `m + 1` and carries an `O(h²)` truncation
//! error on smooth functions. Mixed partials are tensor products of the
//! one-dimensional stencils.

use crate::error::{Error, Result};

/// Central coefficients for the `m`-th derivative (`m ≤ 6`, `m ≠ 5`),
/// indexed `-hw..=hw`; divide by `h^m` after application.
pub fn central_coefficients(m: usize) -> Result<&'static [f64]> {
    const D0: [f64; 1] = [1.0];
    const D1: [f64; 3] = [-0.5, 0.0, 0.5];
    const D2: [f64; 3] = [1.0, -2.0, 1.0];
    const D3: [f64; 5] = [-0.5, 1.0, 0.0, -1.0, 0.5];
    const D4: [f64; 5] = [1.0, -4.0, 6.0, -4.0, 1.0];
    const D6: [f64; 7] = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];
    match m {
        0 => Ok(&D0),
        1 => Ok(&D1),
        2 => Ok(&D2),
        3 => Ok(&D3),
        4 => Ok(&D4),
        6 => Ok(&D6),
        other => Err(Error::Config(format!(
            "no central stencil table for derivative order {other}"
        ))),
    }
}

/// Half-width of the order-`m` stencil.
pub fn stencil_half_width(m: usize) -> Result<usize> {
    Ok(central_coefficients(m)?.len() / 2)
}

/// Values of a function on a centred 3-d tensor grid.
#[derive(Debug, Clone)]
pub struct ValueTensor {
    pub counts: (usize, usize, usize),
    pub data: Vec<f64>,
}

impl ValueTensor {
    pub fn new(counts: (usize, usize, usize), data: Vec<f64>) -> Result<Self> {
        if counts.0 % 2 == 0 || counts.1 % 2 == 0 || counts.2 % 2 == 0 {
            return Err(Error::Config(
                "tensor grid counts must be odd (centred stencils)".into(),
            ));
        }
        if data.len() != counts.0 * counts.1 * counts.2 {
            return Err(Error::Config(format!(
                "tensor data length {} does not match counts {:?}",
                data.len(),
                counts
            )));
        }
        Ok(Self { counts, data })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.counts.1 + j) * self.counts.2 + k]
    }

    /// Mixed central derivative `∂_x^mx ∂_y^my ∂_z^mz` at the tensor centre,
    /// spacing `h` per axis.
    pub fn mixed_derivative(
        &self,
        orders: (usize, usize, usize),
        h: (f64, f64, f64),
    ) -> Result<f64> {
        let cx = central_coefficients(orders.0)?;
        let cy = central_coefficients(orders.1)?;
        let cz = central_coefficients(orders.2)?;
        let (hx, hy, hz) = (cx.len() / 2, cy.len() / 2, cz.len() / 2);
        let c = (self.counts.0 / 2, self.counts.1 / 2, self.counts.2 / 2);
        if hx > c.0 || hy > c.1 || hz > c.2 {
            return Err(Error::Config(format!(
                "stencil for orders {orders:?} needs half-widths ({hx},{hy},{hz}); grid offers {c:?}"
            )));
        }
        let mut acc = 0.0;
        for (a, &ca) in cx.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in cy.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                for (d, &cd) in cz.iter().enumerate() {
                    if cd == 0.0 {
                        continue;
                    }
                    acc += ca
                        * cb
                        * cd
                        * self.at(c.0 - hx + a, c.1 - hy + b, c.2 - hz + d);
                }
            }
        }
        Ok(acc
            / h.0.powi(orders.0 as i32)
            / h.1.powi(orders.1 as i32)
            / h.2.powi(orders.2 as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fill(
        counts: (usize, usize, usize),
        h: (f64, f64, f64),
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> ValueTensor {
        let c = (counts.0 / 2, counts.1 / 2, counts.2 / 2);
        let mut data = Vec::with_capacity(counts.0 * counts.1 * counts.2);
        for i in 0..counts.0 {
            for j in 0..counts.1 {
                for k in 0..counts.2 {
                    let x = (i as f64 - c.0 as f64) * h.0;
                    let y = (j as f64 - c.1 as f64) * h.1;
                    let z = (k as f64 - c.2 as f64) * h.2;
                    data.push(f(x, y, z));
                }
            }
        }
        ValueTensor::new(counts, data).unwrap()
    }

    #[test]
    fn exact_on_polynomials() {
        // x⁶ y z³-type monomials are inside every stencil's exactness span
        let h = (0.1, 0.2, 0.15);
        let counts = (9, 5, 7);
        let t = fill(counts, h, |x, y, z| {
            x.powi(6) + 2.0 * x.powi(4) * z + y * z.powi(3) + x * x * y * z * z
        });
        // ∂x⁶ = 720
        assert_abs_diff_eq!(
            t.mixed_derivative((6, 0, 0), h).unwrap(),
            720.0,
            epsilon = 1e-6
        );
        // ∂x⁴∂z = 48
        assert_abs_diff_eq!(
            t.mixed_derivative((4, 0, 1), h).unwrap(),
            48.0,
            epsilon = 1e-8
        );
        // ∂y∂z³ = 6
        assert_abs_diff_eq!(
            t.mixed_derivative((0, 1, 3), h).unwrap(),
            6.0,
            epsilon = 1e-9
        );
        // ∂x²∂y∂z² = 4
        assert_abs_diff_eq!(
            t.mixed_derivative((2, 1, 2), h).unwrap(),
            4.0,
            epsilon = 1e-9
        );
        // zero function
        let z = fill(counts, h, |_, _, _| 0.0);
        assert_eq!(z.mixed_derivative((2, 0, 1), h).unwrap(), 0.0);
    }

    #[test]
    fn second_order_convergence_on_smooth_function() {
        // exponential test function (no odd symmetry, closed-form answer):
        // ∂x² e^{g} = (∂x g)² e^{g} with g linear-plus-cross terms
        let f = |x: f64, y: f64, z: f64| (0.7 * x + 0.3 * y - 0.2 * z + 0.1 * x * z).exp();
        let exact = 0.49; // (0.7 + 0.1·0)² e⁰
        let mut errs = Vec::new();
        for &h in &[0.08, 0.04] {
            let t = fill((9, 5, 7), (h, h, h), f);
            errs.push((t.mixed_derivative((2, 0, 0), (h, h, h)).unwrap() - exact).abs());
        }
        let ratio = errs[0] / errs[1];
        assert!(
            (3.0..5.5).contains(&ratio),
            "halving h gave error ratio {ratio} ({errs:?})"
        );
    }

    #[test]
    fn insufficient_grid_is_config_error() {
        let h = (0.1, 0.1, 0.1);
        let t = fill((5, 3, 3), h, |x, _, _| x);
        assert!(t.mixed_derivative((6, 0, 0), h).is_err());
        assert!(central_coefficients(5).is_err());
        assert!(ValueTensor::new((4, 3, 3), vec![0.0; 36]).is_err());
    }
}
