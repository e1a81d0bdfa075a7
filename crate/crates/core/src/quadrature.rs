//! Gauss–Legendre rules, domain maps and composite rules over interval unions.
//!
//! Everything downstream (kernel tables, Nyström matrices, contour weights)
//! integrates with the rules produced here. Nodes are computed by Newton
//! iteration on the Legendre recurrence with trigonometric initial guesses,
//! which is accurate to machine precision for the orders used at desk scale.

use crate::error::{Error, Result};

/// Maximum supported Gauss–Legendre order.
pub const MAX_GAUSS_ORDER: usize = 512;

/// Nodes and positive weights of a quadrature rule on a real domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i f(x_i).
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Evaluates (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // P_n' from the standard relation, valid away from x = ±1.
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// The `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Integrates polynomials of degree `2n-1` exactly; weights sum to 2.
pub fn gauss_legendre_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_GAUSS_ORDER {
        return Err(Error::Config(format!(
            "Gauss-Legendre order must be in 1..={MAX_GAUSS_ORDER}, got {n}"
        )));
    }
    if n == 1 {
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![2.0],
        });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n / 2;
    for k in 0..m + (n % 2) {
        // Tricomi-type initial guess for the k-th root counted from +1.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_with_derivative(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = w;
        nodes[k] = -x;
        weights[k] = w;
    }
    if n % 2 == 1 {
        nodes[m] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[m] = 2.0 / (d * d);
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Transplants a rule on `[-1, 1]` to `[a, b]`.
pub fn affine_map(rule: &QuadratureRule, a: f64, b: f64) -> Result<QuadratureRule> {
    if !(a < b) {
        return Err(Error::Domain(format!(
            "affine_map needs a < b, got a = {a}, b = {b}"
        )));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule {
        nodes: rule.nodes.iter().map(|&u| mid + half * u).collect(),
        weights: rule.weights.iter().map(|&w| half * w).collect(),
    })
}

/// Maps a rule on `[-1, 1]` to `[s, ∞)` through `x = s + scale·t/(1-t)`.
///
/// The Jacobian `scale/(1-t)^2` is folded into the weights. Adequate for
/// integrands with (super)exponential decay; both kernels used here qualify.
pub fn semi_infinite_map(rule: &QuadratureRule, s: f64, scale: f64) -> Result<QuadratureRule> {
    if !(scale > 0.0) {
        return Err(Error::Config(format!(
            "semi_infinite_map needs scale > 0, got {scale}"
        )));
    }
    let mut nodes = Vec::with_capacity(rule.len());
    let mut weights = Vec::with_capacity(rule.len());
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = 0.5 * (u + 1.0); // [-1,1] -> [0,1)
        let om = 1.0 - t;
        nodes.push(s + scale * t / om);
        weights.push(0.5 * w * scale / (om * om));
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Restriction set `I = [a_1,a_2] ∪ … `, optionally ending in `[a_N, ∞)`.
///
/// Endpoints are non-decreasing and pair up into intervals; a bounded pair
/// may be degenerate (`a = b`, contributing nothing). The unbounded tail is
/// only available for an odd endpoint count, the bounded form needs an even
/// count.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    endpoints: Vec<f64>,
    unbounded_tail: bool,
}

impl IntervalUnion {
    pub fn new(endpoints: Vec<f64>, unbounded_tail: bool) -> Result<Self> {
        if endpoints.is_empty() {
            return Err(Error::Domain("interval union needs N >= 1 endpoints".into()));
        }
        if unbounded_tail {
            if endpoints.len() % 2 == 0 {
                return Err(Error::Domain(
                    "unbounded tail requires an odd endpoint count".into(),
                ));
            }
        } else if endpoints.len() % 2 == 1 {
            return Err(Error::Domain(
                "bounded interval union requires an even endpoint count".into(),
            ));
        }
        if endpoints.iter().any(|e| !e.is_finite()) {
            return Err(Error::Domain("endpoints must be finite".into()));
        }
        for (i, pair) in endpoints.windows(2).enumerate() {
            // Equality is allowed inside a bounded pair (degenerate interval),
            // everywhere else the sequence must strictly increase.
            if i % 2 == 0 {
                if pair[0] > pair[1] {
                    return Err(Error::Domain(format!(
                        "endpoints must be non-decreasing, got {} > {}",
                        pair[0], pair[1]
                    )));
                }
            } else if pair[0] >= pair[1] {
                return Err(Error::Domain(format!(
                    "endpoints must strictly increase across intervals, got {} >= {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self {
            endpoints,
            unbounded_tail,
        })
    }

    /// Bounded union `[a_1,a_2] ∪ … ∪ [a_{N-1},a_N]`.
    pub fn bounded(endpoints: Vec<f64>) -> Result<Self> {
        Self::new(endpoints, false)
    }

    /// Semi-infinite interval `[s, ∞)`.
    pub fn tail(s: f64) -> Result<Self> {
        Self::new(vec![s], true)
    }

    pub fn endpoints(&self) -> &[f64] {
        &self.endpoints
    }

    pub fn unbounded_tail(&self) -> bool {
        self.unbounded_tail
    }

    /// Interval list as `(left, right)` with `right = None` for the tail.
    pub fn intervals(&self) -> Vec<(f64, Option<f64>)> {
        let mut out = Vec::new();
        let n = self.endpoints.len();
        let bounded_pairs = n / 2;
        for k in 0..bounded_pairs {
            out.push((self.endpoints[2 * k], Some(self.endpoints[2 * k + 1])));
        }
        if self.unbounded_tail {
            out.push((self.endpoints[n - 1], None));
        }
        out
    }

    /// Sum of the bounded interval lengths.
    pub fn bounded_measure(&self) -> f64 {
        self.intervals()
            .iter()
            .filter_map(|&(a, b)| b.map(|b| b - a))
            .sum()
    }
}

/// Concatenated per-interval Gauss–Legendre rules over an interval union.
///
/// Each bounded interval is split into `panels_per_interval` equal panels
/// (degenerate intervals contribute nothing). The unbounded tail is covered
/// by unit panels up to `a_N + 4·tail_scale` followed by the rational map of
/// [`semi_infinite_map`] with scale `tail_scale`. The node multiset covers
/// `I` only, and the node order follows the sorted interval order, so the
/// output is invariant under permutations of equal input.
pub fn composite_interval_rule(
    iu: &IntervalUnion,
    order: usize,
    panels_per_interval: usize,
    tail_scale: f64,
) -> Result<QuadratureRule> {
    if !(tail_scale > 0.0) {
        return Err(Error::Config(format!(
            "tail_scale must be positive, got {tail_scale}"
        )));
    }
    let panels = panels_per_interval.max(1);
    let base = gauss_legendre_rule(order)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    fn push_panels(
        base: &QuadratureRule,
        nodes: &mut Vec<f64>,
        weights: &mut Vec<f64>,
        a: f64,
        b: f64,
        m: usize,
    ) -> Result<()> {
        for j in 0..m {
            let pa = a + (b - a) * j as f64 / m as f64;
            let pb = a + (b - a) * (j + 1) as f64 / m as f64;
            let r = affine_map(base, pa, pb)?;
            nodes.extend_from_slice(&r.nodes);
            weights.extend_from_slice(&r.weights);
        }
        Ok(())
    }
    for (a, b) in iu.intervals() {
        match b {
            Some(b) => {
                if b > a {
                    push_panels(&base, &mut nodes, &mut weights, a, b, panels)?;
                }
            }
            None => {
                let split = 4.0 * tail_scale;
                let head_panels = (split.ceil() as usize).max(1) * panels;
                push_panels(&base, &mut nodes, &mut weights, a, a + split, head_panels)?;
                let tail = semi_infinite_map(&base, a + split, tail_scale)?;
                nodes.extend_from_slice(&tail.nodes);
                weights.extend_from_slice(&tail.weights);
            }
        }
    }
    Ok(QuadratureRule { nodes, weights })
}

/// [`composite_interval_rule`] with the panel count chosen per interval as
/// `max(1, ceil(length) · panels_per_unit)` (the default density policy).
pub fn composite_rule_per_unit(
    iu: &IntervalUnion,
    order: usize,
    panels_per_unit: usize,
    tail_scale: f64,
) -> Result<QuadratureRule> {
    let per_unit = panels_per_unit.max(1);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (a, b) in iu.intervals() {
        let sub = match b {
            Some(b) => IntervalUnion::new(vec![a, b], false)?,
            None => IntervalUnion::new(vec![a], true)?,
        };
        let panels = match b {
            Some(b) if b > a => ((b - a).ceil() as usize).max(1) * per_unit,
            Some(_) => continue,
            None => per_unit,
        };
        let r = composite_interval_rule(&sub, order, panels, tail_scale)?;
        nodes.extend_from_slice(&r.nodes);
        weights.extend_from_slice(&r.weights);
    }
    Ok(QuadratureRule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn gl_order_one_is_midpoint() {
        let r = gauss_legendre_rule(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_eq!(r.weights, vec![2.0]);
    }

    #[test]
    fn gl_order_two_closed_form() {
        let r = gauss_legendre_rule(2).unwrap();
        let c = 1.0 / 3.0_f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -c, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[1], c, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gl_five_integrates_x8_exactly() {
        let r = gauss_legendre_rule(5).unwrap();
        let val = r.integrate(|x| x.powi(8));
        assert_abs_diff_eq!(val, 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn gl_weights_sum_to_two() {
        for n in [1, 2, 3, 7, 16, 40, 64, 128, 256, 512] {
            let r = gauss_legendre_rule(n).unwrap();
            let sum: f64 = r.weights.iter().sum();
            assert!((sum - 2.0).abs() < 1e-14, "order {n}: weight sum {sum}");
            assert!(r.weights.iter().all(|&w| w > 0.0), "order {n}");
            assert!(
                r.nodes.windows(2).all(|p| p[0] < p[1]),
                "order {n}: nodes not increasing"
            );
        }
    }

    #[test]
    fn gl_order_out_of_range() {
        assert!(matches!(gauss_legendre_rule(0), Err(Error::Config(_))));
        assert!(matches!(gauss_legendre_rule(513), Err(Error::Config(_))));
    }

    #[test]
    fn affine_identity_map_is_noop() {
        let r = gauss_legendre_rule(7).unwrap();
        let m = affine_map(&r, -1.0, 1.0).unwrap();
        for (a, b) in r.nodes.iter().zip(&m.nodes) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn affine_two_point_on_0_2() {
        let r = gauss_legendre_rule(2).unwrap();
        let m = affine_map(&r, 0.0, 2.0).unwrap();
        let c = 1.0 / 3.0_f64.sqrt();
        assert_abs_diff_eq!(m.nodes[0], 1.0 - c, epsilon = 1e-15);
        assert_abs_diff_eq!(m.nodes[1], 1.0 + c, epsilon = 1e-15);
        assert_abs_diff_eq!(m.weights[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.weights[1], 1.0, epsilon = 1e-15);
        let five = affine_map(&gauss_legendre_rule(12).unwrap(), 0.0, 5.0).unwrap();
        assert_abs_diff_eq!(five.integrate(|_| 1.0), 5.0, epsilon = 5.0 * 1e-13);
    }

    #[test]
    fn affine_rejects_empty_interval() {
        let r = gauss_legendre_rule(2).unwrap();
        assert!(affine_map(&r, 1.0, 1.0).is_err());
        assert!(affine_map(&r, 2.0, 1.0).is_err());
    }

    #[test]
    fn semi_infinite_exponential() {
        let base = gauss_legendre_rule(40).unwrap();
        let r = semi_infinite_map(&base, 0.0, 1.0).unwrap();
        let val = r.integrate(|x| (-x).exp());
        assert_abs_diff_eq!(val, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn semi_infinite_shifted_moment() {
        // ∫_s^∞ (x-s) e^{-2(x-s)} dx = 1/4 for any s.
        let base = gauss_legendre_rule(40).unwrap();
        let s = 3.5;
        let r = semi_infinite_map(&base, s, 1.0).unwrap();
        let val = r.integrate(|x| (x - s) * (-2.0 * (x - s)).exp());
        assert_abs_diff_eq!(val, 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(r.integrate(|_| 0.0), 0.0, epsilon = 0.0);
    }

    #[test]
    fn interval_union_validation() {
        assert!(IntervalUnion::new(vec![], false).is_err());
        assert!(IntervalUnion::new(vec![0.0, 1.0], true).is_err());
        assert!(IntervalUnion::new(vec![0.0], false).is_err());
        assert!(IntervalUnion::new(vec![1.0, 0.0], false).is_err());
        // degenerate bounded pair is fine, touching intervals are not
        assert!(IntervalUnion::new(vec![1.0, 1.0], false).is_ok());
        assert!(IntervalUnion::new(vec![0.0, 1.0, 1.0, 2.0], false).is_err());
        let iu = IntervalUnion::new(vec![-1.0, 0.0, 1.0], true).unwrap();
        assert_eq!(
            iu.intervals(),
            vec![(-1.0, Some(0.0)), (1.0, None)]
        );
    }

    #[test]
    fn composite_nodes_stay_inside_union() {
        let iu = IntervalUnion::bounded(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let r = composite_interval_rule(&iu, 10, 1, 2.0).unwrap();
        assert!(r
            .nodes
            .iter()
            .all(|&x| (0.0 < x && x < 1.0) || (2.0 < x && x < 3.0)));
        let single = IntervalUnion::bounded(vec![0.0, 1.0]).unwrap();
        let r1 = composite_interval_rule(&single, 10, 1, 2.0).unwrap();
        assert_eq!(r1.len(), 10);
        assert!(r1.nodes.iter().all(|&x| 0.0 < x && x < 1.0));
    }

    #[test]
    fn composite_tail_weight_is_finite() {
        let iu = IntervalUnion::tail(1.0).unwrap();
        let r = composite_interval_rule(&iu, 20, 1, 2.0).unwrap();
        let total: f64 = r.weights.iter().sum();
        assert!(total.is_finite());
        assert!(r.nodes.iter().all(|&x| x > 1.0));
        // ∫_1^∞ e^{-(x-1)} = 1 through the composite head + mapped tail.
        assert_abs_diff_eq!(r.integrate(|x| (-(x - 1.0)).exp()), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn per_unit_panels_scale_with_length() {
        let iu = IntervalUnion::bounded(vec![0.0, 3.5, 5.0, 5.5]).unwrap();
        let r = composite_rule_per_unit(&iu, 10, 1, 2.0).unwrap();
        // 4 panels on [0,3.5], 1 panel on [5,5.5]
        assert_eq!(r.len(), (4 + 1) * 10);
        assert_abs_diff_eq!(r.integrate(|_| 1.0), 4.0, epsilon = 1e-12);
    }

    proptest! {
        /// Gauss-Legendre exactness on random polynomials of degree <= 2n-1.
        #[test]
        fn gl_exactness(n in 2usize..24, coeffs in proptest::collection::vec(-1.0f64..1.0, 1..16)) {
            let deg = (coeffs.len() - 1).min(2 * n - 1);
            let r = gauss_legendre_rule(n).unwrap();
            let num = r.integrate(|x| {
                coeffs.iter().take(deg + 1).enumerate().map(|(k, c)| c * x.powi(k as i32)).sum()
            });
            // odd powers vanish, even powers integrate to 2/(k+1)
            let exact: f64 = coeffs.iter().take(deg + 1).enumerate()
                .filter(|(k, _)| k % 2 == 0)
                .map(|(k, c)| 2.0 * c / (k as f64 + 1.0))
                .sum();
            let scale: f64 = coeffs.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
            prop_assert!((num - exact).abs() <= 1e-12 * scale);
        }

        /// ∫ 1 over any finite mapped domain reproduces its measure.
        #[test]
        fn measure_matches(n in 1usize..40, a in -50.0f64..50.0, len in 1e-3f64..100.0) {
            let r = affine_map(&gauss_legendre_rule(n).unwrap(), a, a + len).unwrap();
            let m = r.integrate(|_| 1.0);
            prop_assert!((m - len).abs() <= 1e-12 * len.max(1.0));
        }
    }
}
