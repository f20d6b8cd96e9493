//! One-dimensional composite Gauss–Legendre rules.

use std::f64::consts::PI;
use std::ops::Range;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1, "at least one node");
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(q, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    (nodes, weights)
}

/// `P_q(x)` and `P_q'(x)` by the three-term recurrence.
fn legendre(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if q == 0 {
        return (1.0, 0.0);
    }
    let d = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A composite rule: Gauss–Legendre with a fixed order on each panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Panel edges, `edges.len() == panels + 1`.
    pub edges: Vec<f64>,
    pub order: usize,
}

/// Geometric grading ratio toward singular endpoints.
const GRADING: f64 = 0.2;

impl PanelRule {
    pub fn from_edges(edges: Vec<f64>, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((edges.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for e in edges.windows(2) {
            let (a, b) = (e[0], e[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for k in 0..order {
                nodes.push(mid + half * x[k]);
                weights.push(half * w[k]);
            }
        }
        PanelRule {
            nodes,
            weights,
            edges,
            order,
        }
    }

    /// Uniform panels on `[lo, hi]`, split at `breaks` and geometrically
    /// graded toward every point of `singular` down to panel width `floor`.
    ///
    /// `target_nodes` is the node count of the ungraded rule; grading adds
    /// `order` nodes per level.
    pub fn graded(
        lo: f64,
        hi: f64,
        breaks: &[f64],
        singular: &[f64],
        target_nodes: usize,
        order: usize,
        floor: f64,
    ) -> Self {
        let span = hi - lo;
        let tiny = 1e-12 * span.abs().max(1.0);
        let mut pts: Vec<f64> = vec![lo, hi];
        pts.extend(breaks.iter().chain(singular).copied().filter(|&p| p > lo + tiny && p < hi - tiny));
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= tiny);
        let is_singular = |p: f64| singular.iter().any(|&s| (s - p).abs() <= tiny);
        let total_panels = (target_nodes / order).max(1) as f64;

        let mut edges = vec![lo];
        for seg in pts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let np = ((total_panels * (b - a) / span).ceil() as usize).max(2);
            let h = (b - a) / np as f64;
            let mut inner: Vec<f64> = (1..np).map(|k| a + h * k as f64).collect();
            if is_singular(a) {
                let levels = grading_levels(h, floor);
                let mut g: Vec<f64> = (1..=levels).rev().map(|k| a + h * GRADING.powi(k as i32)).collect();
                g.append(&mut inner);
                inner = g;
            }
            if is_singular(b) {
                let levels = grading_levels(h, floor);
                inner.extend((1..=levels).map(|k| b - h * GRADING.powi(k as i32)));
            }
            edges.extend(inner);
            edges.push(b);
        }
        Self::from_edges(edges, order)
    }

    /// Panels of equal width in `ln x` on `[lo, hi]` (`lo > 0`), split at
    /// `breaks`, with at least `per_decade` panels per decade.
    pub fn log_graded(lo: f64, hi: f64, breaks: &[f64], per_decade: usize, order: usize) -> Self {
        assert!(lo > 0.0 && hi > lo);
        let mut pts: Vec<f64> = vec![lo, hi];
        pts.extend(breaks.iter().copied().filter(|&p| p > lo * (1.0 + 1e-12) && p < hi * (1.0 - 1e-12)));
        pts.sort_by(f64::total_cmp);
        let mut edges = vec![lo];
        for seg in pts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let decades = (b / a).log10();
            let np = ((per_decade as f64 * decades).ceil() as usize).max(1);
            let ratio = (b / a).powf(1.0 / np as f64);
            for k in 1..np {
                edges.push(a * ratio.powi(k as i32));
            }
            edges.push(b);
        }
        Self::from_edges(edges, order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panels(&self) -> usize {
        self.edges.len() - 1
    }

    /// Node index range of panel `p`.
    pub fn panel_range(&self, p: usize) -> Range<usize> {
        p * self.order..(p + 1) * self.order
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Derivative at every node by differentiating the per-panel
    /// interpolating polynomial.
    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        let q = self.order;
        let mut out = vec![0.0; values.len()];
        for p in 0..self.panels() {
            let r = self.panel_range(p);
            let x = &self.nodes[r.clone()];
            let v = &values[r.clone()];
            let bw = barycentric_weights(x);
            for i in 0..q {
                let mut di = 0.0;
                for j in 0..q {
                    if i != j {
                        let dij = bw[j] / bw[i] / (x[i] - x[j]);
                        di += dij * (v[j] - v[i]);
                    }
                }
                out[r.start + i] = di;
            }
        }
        out
    }
}

fn grading_levels(h: f64, floor: f64) -> usize {
    if floor <= 0.0 || floor >= h {
        return 0;
    }
    ((floor / h).ln() / GRADING.ln()).ceil().clamp(0.0, 60.0) as usize
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            1.0 / (0..x.len())
                .filter(|&k| k != j)
                .map(|k| x[j] - x[k])
                .product::<f64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for q in 1..=12 {
            let (x, w) = gauss_legendre(q);
            for deg in 0..2 * q {
                let num: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((num - exact).abs() < 1e-13, "q={q} deg={deg}");
            }
        }
    }

    #[test]
    fn gauss_legendre_three_point_values() {
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn graded_rule_integrates_singular_integrand() {
        let rule = PanelRule::graded(0.0, 1.0, &[], &[0.0], 40, 8, 1e-12);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        let v = rule.integrate(|x| x.sqrt());
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
        let v = rule.integrate(|x| x.ln());
        assert!((v + 1.0).abs() < 1e-8);
    }

    #[test]
    fn log_graded_rule() {
        let rule = PanelRule::log_graded(1e-8, 1e-2, &[1e-4], 40, 6);
        assert!(rule.panels() >= 6 * 40);
        assert!(rule.edges.iter().any(|&e| (e - 1e-4).abs() < 1e-18));
        let v = rule.integrate(|x| 1.0 / x);
        assert!((v - (1e6f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn differentiation_exact_on_panel_polynomials() {
        let rule = PanelRule::graded(0.0, 2.0, &[1.0], &[], 40, 6, 0.0);
        let vals: Vec<f64> = rule.nodes.iter().map(|x| x.powi(5) - 3.0 * x).collect();
        let d = rule.differentiate(&vals);
        for (x, dx) in rule.nodes.iter().zip(&d) {
            assert!((dx - (5.0 * x.powi(4) - 3.0)).abs() < 1e-9);
        }
    }
}
