//! Gauss-Legendre rules and Lagrange bases on `[-1, 1]`.

use alloc::vec::Vec;

/// Nodes (ascending) and weights of the `n`-point Gauss-Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    /// # Panics
    /// If `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like initial guess, largest root first.
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `int_lo^hi g` with the rule mapped affinely.
    pub fn integrate(&self, lo: f64, hi: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Lagrange basis through a set of distinct nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeBasis {
    nodes: Vec<f64>,
    denom: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(nodes: &[f64]) -> Self {
        let denom = (0..nodes.len())
            .map(|j| {
                (0..nodes.len())
                    .filter(|&m| m != j)
                    .map(|m| nodes[j] - nodes[m])
                    .product::<f64>()
            })
            .collect();
        Self {
            nodes: nodes.to_vec(),
            denom,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `l_j(x)`.
    pub fn eval(&self, j: usize, x: f64) -> f64 {
        let num: f64 = (0..self.nodes.len())
            .filter(|&m| m != j)
            .map(|m| x - self.nodes[m])
            .product();
        num / self.denom[j]
    }

    /// All basis values at `x` written into `out`.
    pub fn eval_all(&self, x: f64, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate().take(self.nodes.len()) {
            *o = self.eval(j, x);
        }
    }

    /// `sum_j values[j] l_j(x)`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(j, &v)| v * self.eval(j, x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_rules() {
        let g1 = GaussLegendre::new(1);
        assert_eq!(g1.nodes, [0.0]);
        assert!((g1.weights[0] - 2.0).abs() < 1e-15);
        let g2 = GaussLegendre::new(2);
        let r = 1.0 / libm::sqrt(3.0);
        assert!((g2.nodes[0] + r).abs() < 1e-15 && (g2.nodes[1] - r).abs() < 1e-15);
        let g3 = GaussLegendre::new(3);
        assert!((g3.nodes[2] - libm::sqrt(0.6)).abs() < 1e-15);
        assert!((g3.weights[0] - 5.0 / 9.0).abs() < 1e-15);
        assert!((g3.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        for n in 1..=20 {
            let g = GaussLegendre::new(n);
            assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for d in 0..2 * n {
                let exact = if d % 2 == 1 {
                    0.0
                } else {
                    2.0 / (d as f64 + 1.0)
                };
                let got = g.integrate(-1.0, 1.0, |x| libm::pow(x, d as f64));
                assert!((got - exact).abs() < 1e-13, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn integrate_on_interval() {
        let g = GaussLegendre::new(4);
        let got = g.integrate(1.0, 3.0, |x| x * x * x);
        assert!((got - 20.0).abs() < 1e-13);
    }

    #[test]
    fn lagrange_is_cardinal() {
        let g = GaussLegendre::new(4);
        let l = LagrangeBasis::new(&g.nodes);
        for i in 0..4 {
            for j in 0..4 {
                let v = l.eval(j, g.nodes[i]);
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let vals: Vec<f64> = g.nodes.iter().map(|x| x * x * x - x).collect();
        assert!((l.interpolate(&vals, 0.3) - (0.027 - 0.3)).abs() < 1e-14);
    }
}
