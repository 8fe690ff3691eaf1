//! Normal distribution helpers, evaluated in `f64`.

use crate::scalar::Real;

pub fn erf<T: Real>(x: T) -> T {
    T::lit(libm::erf(x.to_f64_lossy()))
}

/// Standard normal CDF.
pub fn norm_cdf<T: Real>(x: T) -> T {
    T::lit(0.5 * libm::erfc(-x.to_f64_lossy() / std::f64::consts::SQRT_2))
}
