//! Mixture types, canonical ordering, δ-statistics and direction vectors.
//!
//! Every mixture here is `½𝒩(μ₀, Σ) + ½𝒩(μ₁, Σ)`: two equally weighted
//! Gaussian components sharing one covariance. The weights are implicit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, SpdMatrix, Tolerances};
use crate::scalar::Real;

/// One-dimensional two-component mixture with shared standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mixture1D<T> {
    mu0: T,
    mu1: T,
    sigma: T,
}

impl<T: Real> Mixture1D<T> {
    pub fn new(mu0: T, mu1: T, sigma: T) -> Result<Self> {
        if !mu0.is_finite() || !mu1.is_finite() {
            return Err(Error::NonFinite("mixture mean"));
        }
        if !(sigma.is_finite() && sigma > T::zero()) {
            return Err(Error::InvalidSigma(sigma.to_f64_lossy()));
        }
        Ok(Self { mu0, mu1, sigma })
    }

    pub fn mu0(&self) -> T {
        self.mu0
    }

    pub fn mu1(&self) -> T {
        self.mu1
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Same distribution with the component labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            mu0: self.mu1,
            mu1: self.mu0,
            sigma: self.sigma,
        }
    }

    pub fn min_mean(&self) -> T {
        self.mu0.min(self.mu1)
    }

    pub fn max_mean(&self) -> T {
        self.mu0.max(self.mu1)
    }

    /// Mixture density at `x`.
    pub fn pdf(&self, x: T) -> T {
        let inv = T::one() / self.sigma;
        let norm = inv / (T::PI() + T::PI()).sqrt();
        let z0 = (x - self.mu0) * inv;
        let z1 = (x - self.mu1) * inv;
        let h = crate::scalar::half::<T>();
        h * norm * ((-h * z0 * z0).exp() + (-h * z1 * z1).exp())
    }
}

/// Mixture pair reordered so that `a.mu0 ≤ min(a.mu1, b.mu0, b.mu1)` and
/// `b.mu0 ≤ b.mu1`, with the swaps that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalPair1D<T> {
    pub a: Mixture1D<T>,
    pub b: Mixture1D<T>,
    pub swapped_mixtures: bool,
    /// Component labels of the mixture that ended up as `a` were exchanged.
    pub swapped_within_a: bool,
    /// Component labels of the mixture that ended up as `b` were exchanged.
    pub swapped_within_b: bool,
}

impl<T: Real> CanonicalPair1D<T> {
    /// Undo the recorded swaps, recovering the inputs of [`canonicalize_1d`].
    pub fn original(&self) -> (Mixture1D<T>, Mixture1D<T>) {
        let a = if self.swapped_within_a {
            self.a.swapped()
        } else {
            self.a
        };
        let b = if self.swapped_within_b {
            self.b.swapped()
        } else {
            self.b
        };
        if self.swapped_mixtures {
            (b, a)
        } else {
            (a, b)
        }
    }

    pub fn sigma(&self) -> T {
        self.a.sigma
    }

    /// Means as `(μ₀, μ₁, μ₀′, μ₁′)` in canonical order.
    pub fn means(&self) -> (T, T, T, T) {
        (self.a.mu0, self.a.mu1, self.b.mu0, self.b.mu1)
    }

    /// `[μ₀′, μ₁′] ⊆ [μ₀, μ₁]`.
    pub fn is_contained(&self) -> bool {
        self.b.mu1 <= self.a.mu1
    }

    /// Both mixtures are the same distribution.
    pub fn is_identical(&self) -> bool {
        self.a.mu0 == self.b.mu0 && self.a.mu1 == self.b.mu1
    }

    /// Largest offset of any mean from `μ₀` (the smallest mean).
    pub fn spread(&self) -> T {
        let (m0, m1, n0, n1) = self.means();
        (m1 - m0).max(n0 - m0).max(n1 - m0)
    }
}

/// Puts a pair of mixtures into canonical order.
///
/// Each mixture is sorted by its means; the mixture with the smaller minimum
/// becomes `a`. When the minima tie, the mixture with the larger maximum
/// becomes `a`, so that `b` is the contained one.
pub fn canonicalize_1d<T: Real>(
    f: &Mixture1D<T>,
    g: &Mixture1D<T>,
) -> Result<CanonicalPair1D<T>> {
    if f.sigma != g.sigma {
        return Err(Error::SigmaMismatch);
    }
    let sort = |m: &Mixture1D<T>| {
        if m.mu0 > m.mu1 {
            (m.swapped(), true)
        } else {
            (*m, false)
        }
    };
    let (fs, f_flip) = sort(f);
    let (gs, g_flip) = sort(g);
    let swap = gs.mu0 < fs.mu0 || (gs.mu0 == fs.mu0 && gs.mu1 > fs.mu1);
    Ok(if swap {
        CanonicalPair1D {
            a: gs,
            b: fs,
            swapped_mixtures: true,
            swapped_within_a: g_flip,
            swapped_within_b: f_flip,
        }
    } else {
        CanonicalPair1D {
            a: fs,
            b: gs,
            swapped_mixtures: false,
            swapped_within_a: f_flip,
            swapped_within_b: g_flip,
        }
    })
}

/// The four gap statistics of a canonical pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaStats<T> {
    /// Largest within-mixture gap, `max(|μ₀−μ₁|, |μ₀′−μ₁′|)`.
    pub delta1: T,
    /// Largest matched cross gap, `max(|μ₀′−μ₀|, |μ₁−μ₁′|)`.
    pub delta2: T,
    /// Gap of the mean sums, `|μ₀+μ₁−μ₀′−μ₁′|`.
    pub delta3: T,
    /// Smallest matched cross gap, `min(|μ₀′−μ₀|, |μ₁′−μ₁|)`.
    pub delta4: T,
}

pub fn delta_stats<T: Real>(cp: &CanonicalPair1D<T>) -> DeltaStats<T> {
    let (m0, m1, n0, n1) = cp.means();
    // δ3 is built from the same two matched gaps as δ2 and δ4 so that
    // δ3 ≤ δ2 + δ4 survives rounding.
    let g0 = n0 - m0;
    let g1 = n1 - m1;
    DeltaStats {
        delta1: (m0 - m1).abs().max((n0 - n1).abs()),
        delta2: g0.abs().max(g1.abs()),
        delta3: (g0 + g1).abs(),
        delta4: g0.abs().min(g1.abs()),
    }
}

/// d-dimensional two-component mixture with shared covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureND<T> {
    mu0: Vec<T>,
    mu1: Vec<T>,
    sigma: SpdMatrix<T>,
}

impl<T: Real> MixtureND<T> {
    pub fn new(mu0: Vec<T>, mu1: Vec<T>, sigma: SpdMatrix<T>) -> Result<Self> {
        let d = sigma.dim();
        for mu in [&mu0, &mu1] {
            if mu.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: mu.len(),
                });
            }
            if mu.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("mixture mean"));
            }
        }
        Ok(Self { mu0, mu1, sigma })
    }

    /// Embeds a one-dimensional mixture as a d=1 mixture with covariance σ².
    pub fn from_1d(m: &Mixture1D<T>) -> Self {
        let var = m.sigma * m.sigma;
        Self {
            mu0: vec![m.mu0],
            mu1: vec![m.mu1],
            sigma: SpdMatrix::scalar(var).expect("positive variance"),
        }
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn mu0(&self) -> &[T] {
        &self.mu0
    }

    pub fn mu1(&self) -> &[T] {
        &self.mu1
    }

    pub fn sigma(&self) -> &SpdMatrix<T> {
        &self.sigma
    }

    pub fn means(&self) -> [&[T]; 2] {
        [&self.mu0, &self.mu1]
    }
}

/// Checks the shared-covariance precondition for a pair of d-dimensional mixtures.
pub fn check_pair_nd<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    if f.sigma != g.sigma {
        return Err(Error::SigmaMismatch);
    }
    Ok(())
}

/// Direction vectors `v₁, v₂, v₃`, an orthonormal basis of their span and
/// the largest Rayleigh quotient of `Σ` on that span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionData<T> {
    pub v1: Vec<T>,
    pub v2: Vec<T>,
    pub v3: Vec<T>,
    pub basis: Vec<Vec<T>>,
    pub lambda: T,
}

impl<T: Real> DirectionData<T> {
    pub fn vectors(&self) -> [&[T]; 3] {
        [&self.v1, &self.v2, &self.v3]
    }
}

fn longest<T: Real>(candidates: [Vec<T>; 2]) -> Vec<T> {
    let [first, second] = candidates;
    // ties go to the first-listed element
    if linalg::norm(&second) > linalg::norm(&first) {
        second
    } else {
        first
    }
}

/// Builds `v₁ ∈ S₁ = {μ₁−μ₀, μ₁′−μ₀′}`, `v₂ ∈ S₂ = {μ₀′−μ₀, μ₁′−μ₁}` and
/// `v₃ ∈ S₃ = {μ₀′−μ₁, μ₁′−μ₀}`, each the longest member of its set.
pub fn direction_vectors<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>) -> Result<DirectionData<T>> {
    direction_vectors_with(f, g, &Tolerances::default())
}

pub fn direction_vectors_with<T: Real>(
    f: &MixtureND<T>,
    g: &MixtureND<T>,
    tol: &Tolerances,
) -> Result<DirectionData<T>> {
    check_pair_nd(f, g)?;
    use linalg::sub;
    let v1 = longest([sub(&f.mu1, &f.mu0), sub(&g.mu1, &g.mu0)]);
    let v2 = longest([sub(&g.mu0, &f.mu0), sub(&g.mu1, &f.mu1)]);
    let v3 = longest([sub(&g.mu0, &f.mu1), sub(&g.mu1, &f.mu0)]);
    let basis = linalg::orthonormal_basis_with(&[v1.clone(), v2.clone(), v3.clone()], tol);
    let lambda = restricted_max_eigenvalue(&f.sigma, &basis)?;
    Ok(DirectionData {
        v1,
        v2,
        v3,
        basis,
        lambda,
    })
}

/// `max uᵀΣu` over unit `u` in the span of an orthonormal `basis` (0 if empty).
pub fn restricted_max_eigenvalue<T: Real>(sigma: &SpdMatrix<T>, basis: &[Vec<T>]) -> Result<T> {
    if basis.is_empty() {
        return Ok(T::zero());
    }
    let b = Matrix::from_columns(basis, sigma.dim());
    let compressed = b.transpose().matmul(sigma.matrix()).matmul(&b);
    Ok(linalg::sym_eig(&compressed)?.values[0].max(T::zero()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// Which argument produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Case1Contained,
    Case1Outside,
    Case2LargeGap,
    Case3SmallPrec,
    CharNumeric,
    ProjectionNd,
    TriangleUpper,
    TrivialZero,
}

impl BoundSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Case1Contained => "case1_contained",
            Self::Case1Outside => "case1_outside",
            Self::Case2LargeGap => "case2_large_gap",
            Self::Case3SmallPrec => "case3_small_prec",
            Self::CharNumeric => "char_numeric",
            Self::ProjectionNd => "projection_nd",
            Self::TriangleUpper => "triangle_upper",
            Self::TrivialZero => "trivial_zero",
        }
    }

    /// Closed-form branches of the one-dimensional case analysis.
    pub fn is_closed_form(self) -> bool {
        matches!(
            self,
            Self::Case1Contained | Self::Case1Outside | Self::Case2LargeGap | Self::Case3SmallPrec
        )
    }
}

/// A bound on the TV distance together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult<T> {
    /// Bound clamped to `[0, 1]`.
    pub value: T,
    /// Value before clamping.
    pub unclamped: T,
    pub kind: BoundKind,
    pub source: BoundSource,
    pub witness_t: Option<T>,
    pub witness_direction: Option<Vec<T>>,
    pub constant_used: T,
}

impl<T: Real> BoundResult<T> {
    pub fn new(kind: BoundKind, source: BoundSource, raw: T, constant_used: T) -> Self {
        Self {
            value: raw.max(T::zero()).min(T::one()),
            unclamped: raw,
            kind,
            source,
            witness_t: None,
            witness_direction: None,
            constant_used,
        }
    }

    pub fn lower(source: BoundSource, raw: T, constant_used: T) -> Self {
        Self::new(BoundKind::Lower, source, raw, constant_used)
    }

    pub fn zero() -> Self {
        Self::lower(BoundSource::TrivialZero, T::zero(), T::zero())
    }

    pub fn with_witness_t(mut self, t: T) -> Self {
        self.witness_t = Some(t);
        self
    }

    pub fn with_direction(mut self, dir: Vec<T>) -> Self {
        self.witness_direction = Some(dir);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(mu0: f64, mu1: f64, sigma: f64) -> Mixture1D<f64> {
        Mixture1D::new(mu0, mu1, sigma).unwrap()
    }

    #[test]
    fn mixture_validation() {
        assert!(matches!(Mixture1D::new(0.0, 1.0, 0.0), Err(Error::InvalidSigma(_))));
        assert!(matches!(Mixture1D::new(0.0, 1.0, -1.0), Err(Error::InvalidSigma(_))));
        assert!(matches!(Mixture1D::new(f64::NAN, 1.0, 1.0), Err(Error::NonFinite(_))));
        assert!(matches!(Mixture1D::new(0.0, f64::INFINITY, 1.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn canonicalize_examples() {
        let cp = canonicalize_1d(&m(1.0, 0.0, 1.0), &m(2.0, 3.0, 1.0)).unwrap();
        assert_eq!(cp.a, m(0.0, 1.0, 1.0));
        assert_eq!(cp.b, m(2.0, 3.0, 1.0));
        assert!(cp.swapped_within_a && !cp.swapped_within_b && !cp.swapped_mixtures);

        let cp = canonicalize_1d(&m(5.0, 6.0, 1.0), &m(0.0, 1.0, 1.0)).unwrap();
        assert_eq!(cp.a, m(0.0, 1.0, 1.0));
        assert_eq!(cp.b, m(5.0, 6.0, 1.0));
        assert!(cp.swapped_mixtures && !cp.swapped_within_a && !cp.swapped_within_b);

        let cp = canonicalize_1d(&m(0.0, 1.0, 1.0), &m(0.0, 1.0, 1.0)).unwrap();
        assert_eq!((cp.a, cp.b), (m(0.0, 1.0, 1.0), m(0.0, 1.0, 1.0)));
        assert!(!cp.swapped_mixtures && !cp.swapped_within_a && !cp.swapped_within_b);
    }

    #[test]
    fn canonicalize_tie_on_minimum_puts_wider_mixture_first() {
        let cp = canonicalize_1d(&m(0.0, 1.0, 1.0), &m(0.0, 3.0, 1.0)).unwrap();
        assert_eq!(cp.a.mu1(), 3.0);
        assert!(cp.is_contained());
    }

    #[test]
    fn canonicalize_sigma_mismatch() {
        assert_eq!(
            canonicalize_1d(&m(0.0, 1.0, 1.0), &m(0.0, 1.0, 1.0 + 1e-16 * 2.0)),
            Err(Error::SigmaMismatch)
        );
    }

    #[test]
    fn delta_examples() {
        let d = |f, g| delta_stats(&canonicalize_1d(&f, &g).unwrap());
        assert_eq!(
            d(m(0.0, 4.0, 1.0), m(1.0, 3.0, 1.0)),
            DeltaStats { delta1: 4.0, delta2: 1.0, delta3: 0.0, delta4: 1.0 }
        );
        assert_eq!(
            d(m(0.0, 2.0, 1.0), m(0.5, 2.5, 1.0)),
            DeltaStats { delta1: 2.0, delta2: 0.5, delta3: 1.0, delta4: 0.5 }
        );
        assert_eq!(
            d(m(0.0, 2.0, 1.0), m(0.0, 2.0, 1.0)),
            DeltaStats { delta1: 2.0, delta2: 0.0, delta3: 0.0, delta4: 0.0 }
        );
    }

    #[test]
    fn direction_vectors_symmetric_example() {
        // f: means ±e₁, f′: means ±2e₁, Σ = I₃
        let e = |x: f64| vec![x, 0.0, 0.0];
        let f = MixtureND::new(e(-1.0), e(1.0), SpdMatrix::identity(3)).unwrap();
        let g = MixtureND::new(e(-2.0), e(2.0), SpdMatrix::identity(3)).unwrap();
        let dd = direction_vectors(&f, &g).unwrap();
        // S₁ = {2e₁, 4e₁}; S₂ = {−e₁, e₁} tie → first; S₃ = {−3e₁, 3e₁} tie → first
        assert_eq!(dd.v1, e(4.0));
        assert_eq!(dd.v2, e(-1.0));
        assert_eq!(dd.v3, e(-3.0));
        assert_eq!(dd.basis, vec![e(1.0)]);
        assert_eq!(dd.lambda, 1.0);
    }

    #[test]
    fn direction_vectors_identical_mixtures() {
        let sigma = SpdMatrix::<f64>::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let f = MixtureND::new(vec![0.0, 0.0], vec![1.0, 2.0], sigma.clone()).unwrap();
        let dd = direction_vectors(&f, &f.clone()).unwrap();
        assert_eq!(dd.v2, vec![0.0, 0.0]);
        assert_eq!(dd.basis.len(), 1);
        let v = &dd.v1;
        let rayleigh = sigma.quad_form(v) / linalg::dot(v, v);
        assert!((dd.lambda - rayleigh).abs() < 1e-12);
    }

    #[test]
    fn restricted_eigenvalue_on_axis() {
        let sigma = SpdMatrix::new(Matrix::diag(&[4.0, 1.0])).unwrap();
        assert_eq!(restricted_max_eigenvalue(&sigma, &[vec![0.0, 1.0]]).unwrap(), 1.0);
        assert_eq!(restricted_max_eigenvalue(&sigma, &[]).unwrap(), 0.0);
    }

    #[test]
    fn direction_vectors_errors() {
        let f = MixtureND::new(vec![0.0], vec![1.0], SpdMatrix::identity(1)).unwrap();
        let g = MixtureND::new(vec![0.0, 0.0], vec![1.0, 0.0], SpdMatrix::identity(2)).unwrap();
        assert!(matches!(direction_vectors(&f, &g), Err(Error::DimensionMismatch { .. })));
        let h = MixtureND::new(vec![0.0], vec![1.0], SpdMatrix::scalar(2.0).unwrap()).unwrap();
        assert_eq!(direction_vectors(&f, &h), Err(Error::SigmaMismatch));
        assert!(MixtureND::new(vec![0.0], vec![1.0, 2.0], SpdMatrix::identity(1)).is_err());
    }

    fn mean() -> impl Strategy<Value = f64> {
        -50.0f64..50.0
    }

    proptest! {
        #[test]
        fn prop_canonical_invariants(a in mean(), b in mean(), c in mean(), d in mean(), s in 0.01f64..10.0) {
            let f = m(a, b, s);
            let g = m(c, d, s);
            let cp = canonicalize_1d(&f, &g).unwrap();
            let (m0, m1, n0, n1) = cp.means();
            prop_assert!(m0 <= m1 && m0 <= n0 && m0 <= n1 && n0 <= n1);
            prop_assert_eq!(cp.original(), (f, g));
            let again = canonicalize_1d(&cp.a, &cp.b).unwrap();
            prop_assert_eq!((again.a, again.b), (cp.a, cp.b));
            prop_assert!(!again.swapped_mixtures && !again.swapped_within_a && !again.swapped_within_b);
        }

        #[test]
        fn prop_delta_invariants(a in mean(), b in mean(), c in mean(), d in mean(), shift in -100.0f64..100.0, k in 0.1f64..10.0) {
            let cp = canonicalize_1d(&m(a, b, 1.0), &m(c, d, 1.0)).unwrap();
            let ds = delta_stats(&cp);
            prop_assert!(ds.delta4 <= ds.delta2);
            prop_assert!(ds.delta3 <= ds.delta2 + ds.delta4);

            let shifted = delta_stats(&canonicalize_1d(&m(a + shift, b + shift, 1.0), &m(c + shift, d + shift, 1.0)).unwrap());
            let tol = 1e-12 * (200.0 + shift.abs());
            prop_assert!((shifted.delta1 - ds.delta1).abs() <= tol);
            prop_assert!((shifted.delta2 - ds.delta2).abs() <= tol);
            prop_assert!((shifted.delta3 - ds.delta3).abs() <= 2.0 * tol);
            prop_assert!((shifted.delta4 - ds.delta4).abs() <= tol);

            let scaled = delta_stats(&canonicalize_1d(&m(k * a, k * b, k), &m(k * c, k * d, k)).unwrap());
            let tol = 1e-12 * k * 200.0;
            prop_assert!((scaled.delta1 - k * ds.delta1).abs() <= tol);
            prop_assert!((scaled.delta2 - k * ds.delta2).abs() <= tol);
            prop_assert!((scaled.delta3 - k * ds.delta3).abs() <= tol);
            prop_assert!((scaled.delta4 - k * ds.delta4).abs() <= tol);
        }

        #[test]
        fn prop_direction_data_invariants(
            means in prop::collection::vec(-5.0f64..5.0, 12),
            diag in prop::collection::vec(0.2f64..5.0, 3),
            off in -0.3f64..0.3,
        ) {
            let sigma = SpdMatrix::from_rows(&[
                vec![diag[0], off, 0.0],
                vec![off, diag[1], off],
                vec![0.0, off, diag[2]],
            ]).unwrap();
            let f = MixtureND::new(means[0..3].to_vec(), means[3..6].to_vec(), sigma.clone()).unwrap();
            let g = MixtureND::new(means[6..9].to_vec(), means[9..12].to_vec(), sigma.clone()).unwrap();
            let dd = direction_vectors(&f, &g).unwrap();
            let lmax = sigma.largest_eigenvalue().unwrap();
            prop_assert!(dd.lambda <= lmax * (1.0 + 1e-12));
            for (i, q) in dd.basis.iter().enumerate() {
                prop_assert!((linalg::norm(q) - 1.0).abs() < 1e-10);
                for p in &dd.basis[..i] {
                    prop_assert!(linalg::dot(p, q).abs() < 1e-10);
                }
            }
            for v in dd.vectors() {
                let nv = linalg::norm(v);
                let mut r = v.to_vec();
                for q in &dd.basis {
                    linalg::axpy(-linalg::dot(v, q), q, &mut r);
                }
                prop_assert!(linalg::norm(&r) <= 1e-8 * nv.max(1e-300));
                if nv > 0.0 {
                    prop_assert!(dd.lambda >= sigma.quad_form(v) / (nv * nv) * (1.0 - 1e-10));
                }
            }
            // argmax property
            let s1 = [linalg::sub(f.mu1(), f.mu0()), linalg::sub(g.mu1(), g.mu0())];
            prop_assert!(s1.iter().all(|s| linalg::norm(s) <= linalg::norm(&dd.v1)));
            prop_assert!(s1.contains(&dd.v1));
        }
    }
}
