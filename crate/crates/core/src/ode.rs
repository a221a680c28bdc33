//! Fixed-step classical fourth-order Runge-Kutta.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Anything the integrator can take linear combinations of.
pub trait OdeState: Clone {
    /// `self += k * other`.
    fn add_scaled(&mut self, k: f64, other: &Self);
    fn is_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn add_scaled(&mut self, k: f64, other: &Self) {
        *self += k * other;
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl OdeState for Complex64 {
    fn add_scaled(&mut self, k: f64, other: &Self) {
        *self += other * k;
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl OdeState for ComplexMatrix {
    fn add_scaled(&mut self, k: f64, other: &Self) {
        self.axpy(Complex64::new(k, 0.0), other);
    }

    fn is_finite(&self) -> bool {
        ComplexMatrix::is_finite(self)
    }
}

/// Steps per unit of the fastest rate.
pub const STEPS_PER_RATE: f64 = 50.0;

/// `min(1 / (50 max_rate), smallest grid spacing)`.
pub fn default_step(max_rate: f64, t_grid: &[f64]) -> f64 {
    let by_rate = if max_rate > 0.0 {
        1.0 / (STEPS_PER_RATE * max_rate)
    } else {
        f64::INFINITY
    };
    let spacing = t_grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let h = by_rate.min(spacing);
    if h.is_finite() {
        h
    } else {
        1.0
    }
}

pub fn check_grid(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        Some(0.0) => {}
        _ => return Err(Error::InvalidTimeGrid),
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidTimeGrid);
    }
    Ok(())
}

/// One RK4 step of size `h` from `(t, y)`.
pub fn rk4_step<S, F>(rhs: &mut F, t: f64, y: &S, h: f64) -> S
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    let k1 = rhs(t, y);
    let mut y2 = y.clone();
    y2.add_scaled(0.5 * h, &k1);
    let k2 = rhs(t + 0.5 * h, &y2);
    let mut y3 = y.clone();
    y3.add_scaled(0.5 * h, &k2);
    let k3 = rhs(t + 0.5 * h, &y3);
    let mut y4 = y.clone();
    y4.add_scaled(h, &k3);
    let k4 = rhs(t + h, &y4);

    let mut out = y.clone();
    out.add_scaled(h / 6.0, &k1);
    out.add_scaled(h / 3.0, &k2);
    out.add_scaled(h / 3.0, &k3);
    out.add_scaled(h / 6.0, &k4);
    out
}

/// Integrates `dy/dt = rhs(t, y)` and samples the solution at `t_grid`.
///
/// Each grid interval is split into the fewest equal steps no longer than
/// `max_step`, so grid times are hit exactly.
pub fn integrate<S, F>(mut rhs: F, y0: S, t_grid: &[f64], max_step: f64) -> Result<Vec<S>>
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    check_grid(t_grid)?;
    if !(max_step > 0.0) || !max_step.is_finite() {
        return Err(Error::InvalidParameter {
            name: "max_step",
            requirement: "finite and > 0",
        });
    }
    if !y0.is_finite() {
        return Err(Error::NonFinite { time: 0.0 });
    }
    let mut out = Vec::with_capacity(t_grid.len());
    let mut y = y0;
    out.push(y.clone());
    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        let steps = libm::ceil(span / max_step - 1e-9).max(1.0) as usize;
        let h = span / steps as f64;
        for i in 0..steps {
            let t = w[0] + i as f64 * h;
            y = rk4_step(&mut rhs, t, &y, h);
            if !y.is_finite() {
                return Err(Error::NonFinite { time: t + h });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_rhs_keeps_state() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let out = integrate(|_, y: &ComplexMatrix| ComplexMatrix::zeros(y.rows(), y.cols()), m.clone(), &[0.0, 0.5, 2.0], 0.1)
            .unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|y| *y == m));
    }

    #[test]
    fn exponential_decay() {
        let kappa = 0.1;
        let out = integrate(|_, y: &f64| -0.5 * kappa * y, 1.0, &[0.0, 1.0], 0.01).unwrap();
        // e^{-0.05}
        assert!((out[1] - 0.951_229_424_500_714).abs() < 1e-9);
    }

    #[test]
    fn grid_validation() {
        let f = |_: f64, y: &f64| *y;
        assert_eq!(integrate(f, 1.0, &[0.1, 1.0], 0.1), Err(Error::InvalidTimeGrid));
        assert_eq!(integrate(f, 1.0, &[0.0, 1.0, 1.0], 0.1), Err(Error::InvalidTimeGrid));
        assert_eq!(integrate(f, 1.0, &[], 0.1), Err(Error::InvalidTimeGrid));
        assert!(integrate(f, 1.0, &[0.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn reports_blow_up_time() {
        let err = integrate(|_, y: &f64| y * y, 1.0, &[0.0, 2.0], 0.01).unwrap_err();
        match err {
            Error::NonFinite { time } => assert!(time > 0.9 && time <= 2.0, "blow-up near t = 1, got {time}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn default_step_rule() {
        assert_eq!(default_step(1.0, &[0.0, 1.0]), 0.02);
        assert_eq!(default_step(1.0, &[0.0, 0.01, 0.02]), 0.01);
        assert_eq!(default_step(0.0, &[0.0]), 1.0);
        let g = vec![0.0, 0.5];
        assert_eq!(default_step(10.0, &g), 0.002);
    }
}
