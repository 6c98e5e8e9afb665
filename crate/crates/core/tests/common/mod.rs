#![allow(dead_code)]

use sgconsol::{ExpSum, MaterialParams, SecondGradient};

/// 64-point Gauss-Legendre rule on [0, 1].
pub fn gauss_legendre_64() -> (Vec<f64>, Vec<f64>) {
    let n = 64;
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs.push(0.5 * (1.0 - x));
        ws.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (xs, ws)
}

/// Composite Gauss-Legendre quadrature of `f` over [0, 1] with `panels` panels.
pub fn quad<F: Fn(f64) -> f64>(f: F, panels: usize) -> f64 {
    let (xs, ws) = gauss_legendre_64();
    let h = 1.0 / panels as f64;
    (0..panels)
        .map(|p| {
            xs.iter()
                .zip(&ws)
                .map(|(x, w)| w * f(h * (p as f64 + x)))
                .sum::<f64>()
                * h
        })
        .sum()
}

pub fn quad_product(a: &ExpSum, b: &ExpSum, order: u32) -> f64 {
    quad(|x| a.eval(x, order) * b.eval(x, order), 8)
}

pub fn reference() -> MaterialParams {
    MaterialParams::reference()
}

pub fn direct(k1: f64, k2: f64, k3: f64, k4: f64) -> SecondGradient {
    SecondGradient::Direct { k1, k2, k3, k4 }
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
