//! Classical fixed-step fourth-order Runge-Kutta over any vector-space state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Minimal linear-space operations needed by [`step`].
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
}

impl OdeState for Vec<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        for (y, xi) in self.iter_mut().zip(x) {
            *y += xi * a;
        }
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, xi) in self.iter_mut().zip(x) {
            *y += a * xi;
        }
    }
}

impl OdeState for DMatrix<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.zip_apply(x, |y, xi| *y += a * xi);
    }
}

impl OdeState for DMatrix<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.zip_apply(x, |y, xi| *y += xi * a);
    }
}

impl OdeState for DVector<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.zip_apply(x, |y, xi| *y += xi * a);
    }
}

impl<A: OdeState, B: OdeState> OdeState for (A, B) {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.0.axpy(a, &x.0);
        self.1.axpy(a, &x.1);
    }
}

impl OdeState for Vec<DMatrix<Complex64>> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, xi) in self.iter_mut().zip(x) {
            y.axpy(a, xi);
        }
    }
}

/// One RK4 step of `dy/dt = f(t, y)`; `f` may fail (e.g. on a shape error).
pub fn step<S, E, F>(t: f64, y: &S, dt: f64, mut f: F) -> Result<S, E>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S, E>,
{
    let k1 = f(t, y)?;
    let mut y2 = y.clone();
    y2.axpy(0.5 * dt, &k1);
    let k2 = f(t + 0.5 * dt, &y2)?;
    let mut y3 = y.clone();
    y3.axpy(0.5 * dt, &k2);
    let k3 = f(t + 0.5 * dt, &y3)?;
    let mut y4 = y.clone();
    y4.axpy(dt, &k3);
    let k4 = f(t + dt, &y4)?;

    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

/// Number of fixed steps of size `dt` that cover `span`, rounding to the
/// nearest whole step so that `n * dt` lands within `dt/2` of `span`.
pub fn step_count(span: f64, dt: f64) -> usize {
    (span / dt).round().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn exponential_decay_is_fourth_order() {
        let solve = |dt: f64| {
            let mut y = vec![1.0_f64];
            let n = step_count(1.0, dt);
            for i in 0..n {
                y = step(i as f64 * dt, &y, dt, |_, y: &Vec<f64>| {
                    Ok::<_, Infallible>(vec![-2.0 * y[0]])
                })
                .unwrap();
            }
            (y[0] - (-2.0_f64).exp()).abs()
        };
        let e1 = solve(0.1);
        let e2 = solve(0.05);
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.5, "error ratio {ratio}");
    }

    #[test]
    fn complex_rotation_stays_on_circle() {
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let dt = 1e-2;
        let n = step_count(2.0 * std::f64::consts::PI, dt);
        for i in 0..n {
            y = step(i as f64 * dt, &y, dt, |_, y: &Vec<Complex64>| {
                Ok::<_, Infallible>(vec![Complex64::i() * y[0]])
            })
            .unwrap();
        }
        let exact = Complex64::from_polar(1.0, n as f64 * dt);
        assert!((y[0] - exact).norm() < 1e-8);
    }
}
