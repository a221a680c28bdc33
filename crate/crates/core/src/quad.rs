//! Adaptive Simpson quadrature for real and complex integrands.

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

const MAX_DEPTH: u32 = 48;

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval is first cut into `panels` equal pieces so oscillatory
/// integrands cannot fool the first error estimate.
pub fn adaptive_simpson<T, F>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> T
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total: Option<T> = None;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let hi = if p + 1 == panels { b } else { lo + width };
        let fa = f(lo);
        let fb = f(hi);
        let m = 0.5 * (lo + hi);
        let fm = f(m);
        let whole = simpson(lo, hi, fa, fm, fb);
        let part = refine(&f, lo, hi, fa, fm, fb, whole, panel_tol, MAX_DEPTH);
        total = Some(match total {
            Some(t) => t + part,
            None => part,
        });
    }
    total.unwrap_or_else(|| f(a) * 0.0)
}

fn simpson<T: QuadValue>(a: f64, b: f64, fa: T, fm: T, fb: T) -> T {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn refine<T, F>(f: &F, a: f64, b: f64, fa: T, fm: T, fb: T, whole: T, tol: f64, depth: u32) -> T
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.magnitude() <= 15.0 * tol {
        return left + right + diff * (1.0 / 15.0);
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite Simpson rule with `intervals` (rounded up to even) sub-intervals.
pub fn composite_simpson<T, F>(f: F, a: f64, b: f64, intervals: usize) -> T
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc + f(a + i as f64 * h) * w;
    }
    acc * (h / 3.0)
}
