//! Gauss-Legendre rules and wedge quadrature on `0 ≤ x1 ≤ x2 ≤ L`.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
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
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Tensor Gauss-Legendre quadrature of `f` over the wedge
/// `0 ≤ x1 ≤ x2 ≤ l`, collapsed onto the square.
pub fn integrate_wedge<T, F>(f: F, l: f64, order: usize) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(f64, f64) -> T,
{
    let (x, w) = gauss_legendre(order);
    let mut sum = T::default();
    for (xo, wo) in x.iter().zip(&w) {
        let x2 = 0.5 * l * (1.0 + xo);
        let outer = wo * 0.5 * l * 0.5 * x2;
        for (xi, wi) in x.iter().zip(&w) {
            let x1 = 0.5 * x2 * (1.0 + xi);
            sum = sum + f(x1, x2) * (outer * wi);
        }
    }
    sum
}

/// Quadrature over `[0, l)²`, split along the diagonal so that a kink in
/// the derivative there does not spoil convergence.
pub fn integrate_square<T, F>(f: F, l: f64, order: usize) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(f64, f64) -> T,
{
    let lower = integrate_wedge(&f, l, order);
    let upper = integrate_wedge(|a, b| f(b, a), l, order);
    lower + upper
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        let (x, _) = gauss_legendre(9);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        for i in 0..9 {
            assert_eq!(x[i], -x[8 - i]);
        }
        assert_eq!(x[4], 0.0);
    }

    #[test]
    fn constant_over_square() {
        let l = 5.0;
        let v: f64 = integrate_square(|_, _| 1.0, l, 8);
        assert!((v - l * l).abs() < 1e-12);
        let w: f64 = integrate_wedge(|_, _| 1.0, l, 8);
        assert!((w - l * l / 2.0).abs() < 1e-12);
    }

    #[test]
    fn wedge_moment() {
        // ∫∫_{x1≤x2≤1} x1 x2² = 1/10
        let v: f64 = integrate_wedge(|a, b| a * b * b, 1.0, 6);
        assert!((v - 0.1).abs() < 1e-15);
    }
}
