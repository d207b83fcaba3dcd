use num_complex::Complex64;

use super::grid::ComplexSamples;

/// Fourth-order finite-difference derivative: centred stencil in the
/// interior, one-sided five-point stencils at the two nodes next to each end.
/// Grids with fewer than five nodes fall back to second order.
pub fn differentiate(f: &ComplexSamples) -> ComplexSamples {
    let h = f.grid().step();
    let values = derivative(f.values(), h);
    ComplexSamples::new(*f.grid(), values).expect("length preserved")
}

/// Real-valued convenience wrapper around the same stencils.
pub fn differentiate_real(f: &[f64], h: f64) -> Vec<f64> {
    let c: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    derivative(&c, h).into_iter().map(|v| v.re).collect()
}

/// Eighth-order centred differences where the nine-point stencil fits, the
/// fourth-order scheme of [`differentiate_real`] at the four nodes nearest
/// each end.
pub fn differentiate_real_high_order(f: &[f64], h: f64) -> Vec<f64> {
    const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let mut d = differentiate_real(f, h);
    let n = f.len();
    if n < 9 {
        return d;
    }
    for j in 4..n - 4 {
        d[j] = W.iter().enumerate().map(|(k, w)| w * (f[j + k + 1] - f[j - k - 1])).sum::<f64>() / h;
    }
    d
}

fn derivative(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return d;
    }
    if n < 5 {
        d[0] = (f[1] - f[0]) / h;
        d[n - 1] = (f[n - 1] - f[n - 2]) / h;
        for j in 1..n - 1 {
            d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
        }
        return d;
    }
    let s = 12.0 * h;
    d[0] = (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) / s;
    d[1] = (f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]) / s;
    for j in 2..n - 2 {
        d[j] = (f[j - 2] - f[j - 1] * 8.0 + f[j + 1] * 8.0 - f[j + 2]) / s;
    }
    let m = n - 1;
    d[m] = (f[m] * 25.0 - f[m - 1] * 48.0 + f[m - 2] * 36.0 - f[m - 3] * 16.0 + f[m - 4] * 3.0) / s;
    d[m - 1] = (f[m] * 3.0 + f[m - 1] * 10.0 - f[m - 2] * 18.0 + f[m - 3] * 6.0 - f[m - 4]) / s;
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::UniformGrid;

    #[test]
    fn constant_has_zero_derivative() {
        let g = UniformGrid::new(2.0, 41).unwrap();
        let d = differentiate(&g.sample_real(|_| 3.7));
        assert!(d.max_abs() < 1e-12);
    }

    #[test]
    fn quadratic_exact_everywhere() {
        let g = UniformGrid::new(1.0, 21).unwrap();
        let d = differentiate(&g.sample_real(|x| x * x));
        for j in 0..g.len() {
            assert!((d[j].re - 2.0 * g.x(j)).abs() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn quartic_exact_at_boundary_nodes() {
        let g = UniformGrid::new(1.0, 11).unwrap();
        let d = differentiate(&g.sample_real(|x| x.powi(4) - x.powi(3)));
        for j in [0, 1, 9, 10] {
            let x = g.x(j);
            assert!((d[j].re - (4.0 * x.powi(3) - 3.0 * x * x)).abs() < 1e-11, "j={j}");
        }
    }

    #[test]
    fn sine_to_cosine() {
        let g = UniformGrid::new(1.0, 2001).unwrap();
        let d = differentiate(&g.sample_real(f64::sin));
        for j in 0..g.len() {
            assert!((d[j].re - g.x(j).cos()).abs() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn high_order_exact_for_degree_eight() {
        let g = UniformGrid::new(1.0, 21).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|x| x.powi(8) - 2.0 * x.powi(5) + x).collect();
        let d = differentiate_real_high_order(&f, g.step());
        for j in 4..17 {
            let x = g.x(j);
            assert!((d[j] - (8.0 * x.powi(7) - 10.0 * x.powi(4) + 1.0)).abs() < 1e-11, "j={j}");
        }
    }

    #[test]
    fn high_order_convergence() {
        let err = |n: usize| {
            let g = UniformGrid::new(2.0, n).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|x| (1.3 * x).sin()).collect();
            let d = differentiate_real_high_order(&f, g.step());
            (4..n - 4).map(|j| (d[j] - 1.3 * (1.3 * g.x(j)).cos()).abs()).fold(0.0, f64::max)
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 200.0, "ratio {ratio}");
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let g = UniformGrid::new(2.0, n).unwrap();
            let d = differentiate(&g.sample_real(|x| (1.3 * x).exp()));
            (0..g.len()).map(|j| (d[j].re - 1.3 * (1.3 * g.x(j)).exp()).abs()).fold(0.0, f64::max)
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 12.0, "ratio {ratio}");
    }
}
