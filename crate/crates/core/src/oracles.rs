//! Ground truth computed independently of the bounds: exact single-Gaussian
//! TV, quadrature and Monte Carlo TV of mixtures, squared Hellinger distance,
//! the triangle-inequality upper bound and the moment-tensor statistic.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, SpdMatrix};
use crate::model::{check_pair_nd, BoundKind, BoundResult, BoundSource, Mixture1D, MixtureND};
use crate::quadrature::{integrate, QuadConfig};
use crate::rng::SeedStream;
use crate::scalar::{half, Real};
use crate::special;

/// Half-width of the quadrature range, in standard deviations beyond the extreme means.
pub const QUAD_TAIL_SIGMAS: f64 = 12.0;

/// Samples used by the Monte Carlo oracle when none is given.
pub const DEFAULT_MC_SAMPLES: usize = 200_000;

/// Fewest samples the Monte Carlo oracle accepts.
pub const MIN_MC_SAMPLES: usize = 10_000;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate<T> {
    pub value: T,
    pub stderr: T,
    pub n_samples: usize,
    pub seed: u64,
}

/// TV between `𝒩(mu_a, Σ)` and `𝒩(mu_b, Σ)`: `2Φ(Δ/2) − 1` with `Δ` the
/// Mahalanobis distance between the means.
pub fn tv_exact_gaussians<T: Real>(mu_a: &[T], mu_b: &[T], sigma: &SpdMatrix<T>) -> Result<T> {
    for mu in [mu_a, mu_b] {
        if mu.len() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                found: mu.len(),
            });
        }
    }
    let delta = sigma.mahalanobis_sq(&linalg::sub(mu_a, mu_b)).sqrt();
    // 2Φ(Δ/2) − 1 = erf(Δ/(2√2)), which keeps full precision for small Δ
    Ok(special::erf(delta / (T::lit(2.0) * T::SQRT_2())))
}

/// `½·min(TV₀₀′ + TV₁₁′, TV₁₀′ + TV₀₁′)`, clamped to `[0, 1]`.
pub fn tv_upper_bound<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>) -> Result<BoundResult<T>> {
    check_pair_nd(f, g)?;
    let s = f.sigma();
    let tv = |a: &[T], b: &[T]| tv_exact_gaussians(a, b, s);
    let straight = tv(f.mu0(), g.mu0())? + tv(f.mu1(), g.mu1())?;
    let crossed = tv(f.mu1(), g.mu0())? + tv(f.mu0(), g.mu1())?;
    let h = half::<T>();
    Ok(BoundResult::new(
        BoundKind::Upper,
        BoundSource::TriangleUpper,
        h * straight.min(crossed),
        h,
    ))
}

pub fn tv_upper_bound_1d<T: Real>(f: &Mixture1D<T>, g: &Mixture1D<T>) -> Result<BoundResult<T>> {
    if f.sigma() != g.sigma() {
        return Err(Error::SigmaMismatch);
    }
    tv_upper_bound(&MixtureND::from_1d(f), &MixtureND::from_1d(g))
}

fn quad_range<T: Real>(f: &Mixture1D<T>, g: &Mixture1D<T>) -> Result<(T, T)> {
    if f.sigma() != g.sigma() {
        return Err(Error::SigmaMismatch);
    }
    let pad = T::lit(QUAD_TAIL_SIGMAS) * f.sigma();
    Ok((f.min_mean().min(g.min_mean()) - pad, f.max_mean().max(g.max_mean()) + pad))
}

/// `½∫|f − g|` by adaptive quadrature with absolute tolerance `tol`.
///
/// Mass outside the range is below `4Φ(−12) < 10⁻³⁰` and is ignored.
pub fn tv_oracle_1d<T: Real>(f: &Mixture1D<T>, g: &Mixture1D<T>, tol: f64) -> Result<T> {
    tv_oracle_1d_with(f, g, &QuadConfig::with_tol(tol))
}

pub fn tv_oracle_1d_with<T: Real>(f: &Mixture1D<T>, g: &Mixture1D<T>, cfg: &QuadConfig) -> Result<T> {
    let (lo, hi) = quad_range(f, g)?;
    let h = half::<T>();
    integrate(|x| h * (f.pdf(x) - g.pdf(x)).abs(), lo, hi, cfg)
}

/// Squared Hellinger distance `½∫(√f − √g)²` by adaptive quadrature.
pub fn hellinger_sq_oracle_1d<T: Real>(f: &Mixture1D<T>, g: &Mixture1D<T>, tol: f64) -> Result<T> {
    let (lo, hi) = quad_range(f, g)?;
    let h = half::<T>();
    let integrand = |x: T| {
        let (p, q) = (f.pdf(x), g.pdf(x));
        let s = p.sqrt() + q.sqrt();
        if s == T::zero() {
            return T::zero();
        }
        // (√p − √q) rewritten to avoid cancellation when p ≈ q
        let d = (p - q) / s;
        h * d * d
    };
    integrate(integrand, lo, hi, &QuadConfig::with_tol(tol))
}

/// `E_{x∼f}[max(0, 1 − g(x)/f(x))]` estimated from `n` samples of `f`.
///
/// Everything is computed in whitened coordinates `L⁻¹x`, where `Σ = LLᵀ`:
/// a draw is `ν_k + z` with `z` standard normal, and the density ratio only
/// needs squared distances to the four whitened means, combined in log space.
pub fn tv_oracle_nd<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>, n: usize, seed: u64) -> Result<McEstimate<T>> {
    check_pair_nd(f, g)?;
    if n < MIN_MC_SAMPLES {
        return Err(Error::DomainError(format!(
            "Monte Carlo oracle needs at least {MIN_MC_SAMPLES} samples, got {n}"
        )));
    }
    let s = f.sigma();
    let nu = [s.solve_lower(f.mu0()), s.solve_lower(f.mu1())];
    let nu_g = [s.solve_lower(g.mu0()), s.solve_lower(g.mu1())];
    let d = s.dim();
    let mut rng = SeedStream::new(seed).child("mc-oracle").rng();
    let mut z = vec![T::zero(); d];
    // Welford accumulation
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    let h = half::<T>();
    let log_mix = |w: &[T], means: &[Vec<T>; 2]| -> T {
        let a = -h * sq_dist(w, &means[0]);
        let b = -h * sq_dist(w, &means[1]);
        let m = a.max(b);
        m + ((a - m).exp() + (b - m).exp()).ln()
    };
    for i in 0..n {
        let k = (rng.next_u32() & 1) as usize;
        for (zi, mi) in z.iter_mut().zip(&nu[k]) {
            let e: f64 = rng.sample(StandardNormal);
            *zi = *mi + T::lit(e);
        }
        let ratio = (log_mix(&z, &nu_g) - log_mix(&z, &nu)).exp();
        let v = (T::one() - ratio).max(T::zero()).to_f64_lossy();
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let nf = n as f64;
    // The variance is taken with two pseudo-observations, 0 and 1, merged in.
    // Each draw lies in [0, 1], and without them a TV within 1/n of 0 or 1
    // typically shows zero sample variance and a zero-width interval; with
    // them 3·stderr is about 3/n in that case.
    let delta = 0.5 - mean;
    let m2 = m2 + 0.5 + delta * delta * 2.0 * nf / (nf + 2.0);
    let var = m2 / (nf + 1.0);
    Ok(McEstimate {
        value: T::lit(mean),
        stderr: T::lit((var / nf).sqrt()),
        n_samples: n,
        seed,
    })
}

fn sq_dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// `max_{ℓ∈{1,2,3}} ‖M_ℓ(f) − M_ℓ(g)‖_F²` with `M_ℓ = ½μ₀^{⊗ℓ} + ½μ₁^{⊗ℓ}`.
///
/// A comparison statistic only; no bound is derived from it.
pub fn moment_distance<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>) -> Result<T> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    Ok(moment_gaps(f, g).into_iter().fold(T::zero(), T::max))
}

/// `‖M_ℓ(f) − M_ℓ(g)‖_F²` for `ℓ = 1, 2, 3`.
pub fn moment_gaps<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>) -> [T; 3] {
    let d = f.dim();
    let h = half::<T>();
    let (a, b) = (f.mu0(), f.mu1());
    let (c, e) = (g.mu0(), g.mu1());
    let mut gaps = [T::zero(); 3];
    for i in 0..d {
        let m1 = h * (a[i] + b[i]) - h * (c[i] + e[i]);
        gaps[0] = gaps[0] + m1 * m1;
        for j in 0..d {
            let m2 = h * (a[i] * a[j] + b[i] * b[j]) - h * (c[i] * c[j] + e[i] * e[j]);
            gaps[1] = gaps[1] + m2 * m2;
            for k in 0..d {
                let m3 = h * (a[i] * a[j] * a[k] + b[i] * b[j] * b[k]) - h * (c[i] * c[j] * c[k] + e[i] * e[j] * e[k]);
                gaps[2] = gaps[2] + m3 * m3;
            }
        }
    }
    gaps
}
