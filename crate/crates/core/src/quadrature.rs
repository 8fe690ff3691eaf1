//! Adaptive Simpson quadrature with an absolute error target.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Absolute error target for the whole integral.
    pub tol: f64,
    /// Maximum number of accepted plus pending subintervals.
    pub max_intervals: usize,
    /// Number of equal panels the range is cut into before refining.
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_intervals: 1_000_000,
            initial_panels: 64,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

/// `∫_a^b f` by adaptive Simpson.
///
/// A panel is accepted when halving it changes its estimate by at most
/// `15·tol·(width / (b − a))`, so accepted error budgets add up to `tol`.
/// Panels that shrink to a few ulps are accepted as they are.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, cfg: &QuadConfig) -> Result<T> {
    if !(cfg.tol > 0.0) {
        return Err(Error::DomainError(format!("quadrature tolerance must be positive, got {}", cfg.tol)));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("integration limits"));
    }
    if a == b {
        return Ok(T::zero());
    }
    let (a, b, sign) = if a < b { (a, b, T::one()) } else { (b, a, -T::one()) };
    let total = b - a;
    let density = T::lit(15.0 * cfg.tol) / total;
    let h = crate::scalar::half::<T>();
    let n0 = cfg.initial_panels.max(1);
    let mut stack: Vec<Panel<T>> = Vec::with_capacity(n0 + 64);
    let mut fl = f(a);
    for i in 0..n0 {
        let pa = a + total * T::from_usize_lossy(i) / T::from_usize_lossy(n0);
        let pb = if i + 1 == n0 {
            b
        } else {
            a + total * T::from_usize_lossy(i + 1) / T::from_usize_lossy(n0)
        };
        let fm = f(h * (pa + pb));
        let fr = f(pb);
        stack.push(Panel { a: pa, b: pb, fa: fl, fm, fb: fr, whole: simpson(pa, pb, fl, fm, fr) });
        fl = fr;
    }
    stack.reverse();
    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut used = n0;
    while let Some(p) = stack.pop() {
        let m = h * (p.a + p.b);
        let fl = f(h * (p.a + m));
        let fr = f(h * (m + p.b));
        let left = simpson(p.a, m, p.fa, fl, p.fm);
        let right = simpson(m, p.b, p.fm, fr, p.fb);
        let diff = left + right - p.whole;
        let width = p.b - p.a;
        let tiny = T::lit(64.0) * T::epsilon() * p.a.abs().max(p.b.abs()).max(T::one());
        if diff.abs() <= density * width || width <= tiny {
            // Kahan summation of the Richardson-corrected panel values
            let y = left + right + diff / T::lit(15.0) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            continue;
        }
        used += 1;
        if used > cfg.max_intervals {
            return Err(Error::QuadratureFailure { tol: cfg.tol, cap: cfg.max_intervals });
        }
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: fr, fb: p.fb, whole: right });
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: fl, fb: p.fm, whole: left });
    }
    Ok(sign * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomials_and_trig() {
        let cfg = QuadConfig::default();
        assert_abs_diff_eq!(integrate(|x: f64| x * x * x, 0.0, 2.0, &cfg).unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(integrate(f64::sin, 0.0, std::f64::consts::PI, &cfg).unwrap(), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(integrate(|x: f64| x, 1.0, 0.0, &cfg).unwrap(), -0.5, epsilon = 1e-14);
        assert_eq!(integrate(|x: f64| x, 1.0, 1.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn kinked_integrand() {
        let cfg = QuadConfig::default();
        let v = integrate(|x: f64| (x - 0.3).abs(), -1.0, 1.0, &cfg).unwrap();
        assert_abs_diff_eq!(v, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, epsilon = 1e-10);
    }

    #[test]
    fn gaussian_mass() {
        let cfg = QuadConfig::default();
        let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert_abs_diff_eq!(integrate(pdf, -12.0, 12.0, &cfg).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cap_is_enforced() {
        let cfg = QuadConfig { tol: 1e-14, max_intervals: 70, initial_panels: 64 };
        let r = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &cfg);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
        assert!(integrate(|x: f64| x, 0.0, 1.0, &QuadConfig::with_tol(0.0)).is_err());
    }
}
