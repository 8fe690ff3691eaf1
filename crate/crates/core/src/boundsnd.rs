//! d-dimensional lower bounds by projection.
//!
//! TV cannot grow under a measurable map, so the one-dimensional bound of any
//! projection `x ↦ ⟨t, x⟩` is a bound for the original pair. The work is in
//! choosing directions that keep the relevant mean gaps visible.

use serde::Serialize;

use crate::bounds1d::{tv_lower_1d_detailed, GridSpec, LowerBound1D};
use crate::error::{Error, Result};
use crate::linalg::{self, inv_sqrt, SpdMatrix};
use crate::model::{check_pair_nd, direction_vectors, BoundResult, BoundSource, DirectionData, Mixture1D, MixtureND};
use crate::rng::{normal_by_inversion, SeedStream};
use crate::scalar::Real;

/// Largest norm accepted for a sampled direction.
pub const Z_MAX_NORM: f64 = 10.0;
/// Accepted directions satisfy `|⟨z, v⟩| ≥ ‖v‖ / Z_CORRELATION_DIVISOR`.
pub const Z_CORRELATION_DIVISOR: f64 = 6.0;
/// Rejection rounds before giving up.
pub const Z_MAX_ROUNDS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    RandomZ,
    DeterministicV,
    CoordinateFallback,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Self::RandomZ => "random_z",
            Self::DeterministicV => "deterministic_v",
            Self::CoordinateFallback => "coordinate_fallback",
        }
    }
}

/// A pair projected onto one direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionWitness<T> {
    pub direction: Vec<T>,
    pub projected: (Mixture1D<T>, Mixture1D<T>),
    pub construction: Construction,
}

fn project_with<T: Real>(
    f: &MixtureND<T>,
    g: &MixtureND<T>,
    t: &[T],
    construction: Construction,
) -> Result<ProjectionWitness<T>> {
    check_pair_nd(f, g)?;
    if t.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: t.len(),
        });
    }
    if t.iter().all(|x| *x == T::zero()) {
        return Err(Error::ZeroDirection);
    }
    let var = f.sigma().quad_form(t);
    if !(var > T::zero()) {
        return Err(Error::ZeroDirection);
    }
    let s = var.sqrt();
    let p = |m: &MixtureND<T>| Mixture1D::new(linalg::dot(m.mu0(), t), linalg::dot(m.mu1(), t), s);
    Ok(ProjectionWitness {
        direction: t.to_vec(),
        projected: (p(f)?, p(g)?),
        construction,
    })
}

/// Image of both mixtures under `x ↦ ⟨t, x⟩`: means `⟨μ, t⟩`, deviation `√(tᵀΣt)`.
pub fn project<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>, t: &[T]) -> Result<ProjectionWitness<T>> {
    project_with(f, g, t, Construction::RandomZ)
}

/// Random direction in the span of the basis that is short and correlated
/// with every nonzero direction vector.
///
/// Draws `z = Σ pᵢuᵢ` with standard normal `pᵢ` (by inversion of 64-bit
/// uniforms) and rejects until `‖z‖ ≤ 10` and `|⟨z, v⟩| ≥ ‖v‖/6` for each
/// nonzero `v`.
pub fn sample_direction_z<T: Real>(dd: &DirectionData<T>, seed: u64) -> Result<Vec<T>> {
    if dd.basis.is_empty() {
        return Err(Error::ZeroDirection);
    }
    let d = dd.basis[0].len();
    let mut rng = SeedStream::new(seed).child("direction-z").rng();
    let max_norm = T::lit(Z_MAX_NORM);
    let div = T::lit(Z_CORRELATION_DIVISOR);
    for _ in 0..Z_MAX_ROUNDS {
        // always draw three coefficients so the stream does not depend on the rank
        let coeffs: [f64; 3] = std::array::from_fn(|_| normal_by_inversion(&mut rng));
        let mut z = vec![T::zero(); d];
        for (u, &c) in dd.basis.iter().zip(&coeffs) {
            linalg::axpy(T::lit(c), u, &mut z);
        }
        let ok = linalg::norm(&z) <= max_norm
            && dd.vectors().iter().all(|v| {
                let nv = linalg::norm(v);
                nv == T::zero() || linalg::dot(&z, v).abs() >= nv / div
            });
        if ok {
            return Ok(z);
        }
    }
    Err(Error::RetryLimitExceeded(Z_MAX_ROUNDS))
}

/// `v₂/‖v₂‖ + s·v₃/‖v₃‖` with `s ∈ {−1, +1}` maximizing `⟨v₂, s·v₃⟩` (`+1` on ties).
pub fn case2_direction<T: Real>(dd: &DirectionData<T>) -> Result<Vec<T>> {
    let n2 = linalg::norm(&dd.v2);
    let n3 = linalg::norm(&dd.v3);
    if n2 == T::zero() || n3 == T::zero() {
        return Err(Error::ZeroDirection);
    }
    let s = if linalg::dot(&dd.v2, &dd.v3) >= T::zero() { T::one() } else { -T::one() };
    let mut v = linalg::scale(T::one() / n2, &dd.v2);
    linalg::axpy(s / n3, &dd.v3, &mut v);
    Ok(v)
}

/// Applies `x ↦ Σ^{−1/2}x` to both mixtures, leaving identity covariance.
pub fn whiten<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>) -> Result<(MixtureND<T>, MixtureND<T>)> {
    check_pair_nd(f, g)?;
    let r = inv_sqrt(f.sigma())?;
    let id = SpdMatrix::identity(f.dim());
    let w = |m: &MixtureND<T>| {
        MixtureND::new(r.matrix().matvec(m.mu0()), r.matrix().matvec(m.mu1()), id.clone())
    };
    Ok((w(f)?, w(g)?))
}

/// Asymptotic quantities from the high-dimensional analysis. Their constants
/// are unknown, so they are reported for comparison and never certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticDiagnostics<T> {
    /// `‖v₁‖·min(‖v₂‖, ‖v₃‖)/λ`
    pub quadratic_form: T,
    /// `min(‖v₂‖, ‖v₃‖)/√λ`
    pub linear_form: T,
    /// `2‖v₁‖ ≥ min(‖v₂‖, ‖v₃‖)`, which selects the quadratic form.
    pub v1_dominates: bool,
}

pub fn asymptotic_diagnostics<T: Real>(dd: &DirectionData<T>) -> AsymptoticDiagnostics<T> {
    let n1 = linalg::norm(&dd.v1);
    let m = linalg::norm(&dd.v2).min(linalg::norm(&dd.v3));
    let (q, l) = if dd.lambda > T::zero() {
        (n1 * m / dd.lambda, m / dd.lambda.sqrt())
    } else {
        (T::zero(), T::zero())
    };
    AsymptoticDiagnostics {
        quadratic_form: q,
        linear_form: l,
        v1_dominates: T::lit(2.0) * n1 >= m,
    }
}

/// One projection tried by [`tv_lower_nd`] and its one-dimensional bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate<T> {
    pub witness: ProjectionWitness<T>,
    pub bound: LowerBound1D<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundNd<T> {
    pub best: BoundResult<T>,
    /// Index into `candidates` of the winning projection.
    pub winner: Option<usize>,
    /// In preference order: deterministic, random, fallback.
    pub candidates: Vec<Candidate<T>>,
    pub directions: DirectionData<T>,
    pub diagnostics: AsymptoticDiagnostics<T>,
}

impl<T: Real> LowerBoundNd<T> {
    pub fn winning(&self) -> Option<&Candidate<T>> {
        self.winner.map(|i| &self.candidates[i])
    }
}

pub fn tv_lower_nd<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>, seed: u64, grid: &GridSpec) -> Result<BoundResult<T>> {
    Ok(tv_lower_nd_detailed(f, g, seed, grid)?.best)
}

fn same_mixture<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>) -> bool {
    (f.mu0() == g.mu0() && f.mu1() == g.mu1()) || (f.mu0() == g.mu1() && f.mu1() == g.mu0())
}

/// Lower bound on `TV(f, g)` from the best of a few one-dimensional projections.
///
/// Candidates: the deterministic direction when `v₂, v₃ ≠ 0`; a sampled
/// direction when the basis is nonempty and `v₁ ≠ 0`; the coordinate axis
/// with the largest projected matched gap when neither exists. Each is
/// scaled to unit projected variance before the one-dimensional bound runs.
pub fn tv_lower_nd_detailed<T: Real>(
    f: &MixtureND<T>,
    g: &MixtureND<T>,
    seed: u64,
    grid: &GridSpec,
) -> Result<LowerBoundNd<T>> {
    let dd = direction_vectors(f, g)?;
    let diagnostics = asymptotic_diagnostics(&dd);
    if same_mixture(f, g) {
        return Ok(LowerBoundNd {
            best: BoundResult::zero(),
            winner: None,
            candidates: Vec::new(),
            directions: dd,
            diagnostics,
        });
    }
    let sigma = f.sigma();
    let mut dirs: Vec<(Vec<T>, Construction)> = Vec::with_capacity(3);
    if let Ok(v) = case2_direction(&dd) {
        dirs.push((v, Construction::DeterministicV));
    }
    if !dd.basis.is_empty() && linalg::norm(&dd.v1) > T::zero() {
        dirs.push((sample_direction_z(&dd, seed)?, Construction::RandomZ));
    }
    if dirs.is_empty() {
        dirs.push((fallback_axis(f, g), Construction::CoordinateFallback));
    }
    let mut candidates = Vec::with_capacity(dirs.len());
    for (dir, construction) in dirs {
        let unit = linalg::scale(T::one() / sigma.quad_form(&dir).sqrt(), &dir);
        let witness = project_with(f, g, &unit, construction)?;
        let bound = tv_lower_1d_detailed(&witness.projected.0, &witness.projected.1, grid)?;
        candidates.push(Candidate { witness, bound });
    }
    let mut winner = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if c.bound.best.value > candidates[winner].bound.best.value {
            winner = i;
        }
    }
    let w = &candidates[winner];
    let mut best = BoundResult::lower(BoundSource::ProjectionNd, w.bound.best.unclamped, w.bound.best.constant_used)
        .with_direction(w.witness.direction.clone());
    best.witness_t = w.bound.best.witness_t;
    Ok(LowerBoundNd {
        best,
        winner: Some(winner),
        candidates,
        directions: dd,
        diagnostics,
    })
}

fn fallback_axis<T: Real>(f: &MixtureND<T>, g: &MixtureND<T>) -> Vec<T> {
    let d = f.dim();
    let mut best = (0, T::zero());
    for i in 0..d {
        let s = f.sigma().matrix()[(i, i)].sqrt();
        let gap = (g.mu0()[i] - f.mu0()[i]).abs().max((g.mu1()[i] - f.mu1()[i]).abs()) / s;
        if gap > best.1 {
            best = (i, gap);
        }
    }
    let mut e = vec![T::zero(); d];
    e[best.0] = T::one();
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds1d::tv_lower_1d;
    use crate::linalg::Matrix;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn nd(mu0: Vec<f64>, mu1: Vec<f64>, sigma: &SpdMatrix<f64>) -> MixtureND<f64> {
        MixtureND::new(mu0, mu1, sigma.clone()).unwrap()
    }

    fn dd_of(v1: Vec<f64>, v2: Vec<f64>, v3: Vec<f64>) -> DirectionData<f64> {
        let basis = linalg::orthonormal_basis(&[v1.clone(), v2.clone(), v3.clone()]);
        DirectionData { v1, v2, v3, basis, lambda: 1.0 }
    }

    #[test]
    fn project_examples() {
        let id = SpdMatrix::identity(2);
        let w = project(&nd(vec![1.0, 2.0], vec![3.0, 4.0], &id), &nd(vec![5.0, 6.0], vec![7.0, 8.0], &id), &[1.0, 0.0]).unwrap();
        assert_eq!(w.projected.0, Mixture1D::new(1.0, 3.0, 1.0).unwrap());
        assert_eq!(w.projected.1, Mixture1D::new(5.0, 7.0, 1.0).unwrap());
        let s = SpdMatrix::new(Matrix::diag(&[4.0, 1.0])).unwrap();
        let f = nd(vec![0.0, 0.0], vec![1.0, 0.0], &s);
        assert_eq!(project(&f, &f.clone(), &[1.0, 0.0]).unwrap().projected.0.sigma(), 2.0);
        assert_eq!(project(&f, &f.clone(), &[0.0, 0.0]), Err(Error::ZeroDirection));
    }

    #[test]
    fn sample_z_collinear() {
        let e1 = vec![1.0, 0.0, 0.0];
        let dd = dd_of(e1.clone(), e1.clone(), e1.clone());
        let z = sample_direction_z(&dd, 4).unwrap();
        assert!(z[0].abs() >= 1.0 / 6.0 && linalg::norm(&z) <= 10.0);
        assert_eq!(z, sample_direction_z(&dd, 4).unwrap());
    }

    #[test]
    fn sample_z_orthogonal_floors() {
        let dd = dd_of(vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]);
        for seed in 0..50 {
            let z = sample_direction_z(&dd, seed).unwrap();
            for v in dd.vectors() {
                assert!(linalg::dot(&z, v).abs() >= linalg::norm(v) / 6.0);
            }
            assert!(linalg::norm(&z) <= 10.0);
        }
        let empty = DirectionData { v1: vec![0.0], v2: vec![0.0], v3: vec![0.0], basis: vec![], lambda: 0.0 };
        assert_eq!(sample_direction_z(&empty, 0), Err(Error::ZeroDirection));
    }

    #[test]
    fn case2_examples() {
        let v = case2_direction(&dd_of(vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0])).unwrap();
        assert_eq!(v, vec![1.0, 1.0]);
        let v = case2_direction(&dd_of(vec![1.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0])).unwrap();
        assert_eq!(v, vec![2.0, 0.0]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = case2_direction(&dd_of(vec![1.0, 0.0], vec![1.0, 0.0], vec![r, r])).unwrap();
        assert_relative_eq!(v[0], 1.0 + r, max_relative = 1e-15);
        assert_relative_eq!(v[1], r, max_relative = 1e-15);
        assert!(linalg::dot(&v, &[1.0, 0.0]).abs() >= 1.0);
        assert_eq!(case2_direction(&dd_of(vec![1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0])), Err(Error::ZeroDirection));
    }

    #[test]
    fn whiten_examples() {
        let id = SpdMatrix::identity(2);
        let f = nd(vec![1.0, 2.0], vec![3.0, -1.0], &id);
        let (wf, _) = whiten(&f, &f.clone()).unwrap();
        assert_eq!(wf, f);
        let s = SpdMatrix::new(Matrix::diag(&[4.0, 1.0])).unwrap();
        let f = nd(vec![2.0, 3.0], vec![0.0, 0.0], &s);
        let (wf, _) = whiten(&f, &f.clone()).unwrap();
        assert_eq!(wf.mu0(), &[1.0, 3.0]);
        assert_eq!(wf.sigma(), &SpdMatrix::identity(2));
    }

    #[test]
    fn tv_lower_nd_examples() {
        let id = SpdMatrix::identity(3);
        let e = |x: f64| vec![x, 0.0, 0.0];
        let grid = GridSpec::default();
        let cf = |u: f64| {
            let r = tv_lower_nd_detailed(&nd(e(u), e(-u), &id), &nd(e(2.0 * u), e(-2.0 * u), &id), 0, &grid).unwrap();
            assert_eq!(r.best.source, BoundSource::ProjectionNd);
            let w = r.winning().unwrap();
            w.bound.branch(BoundSource::Case1Contained).unwrap().value
        };
        assert_relative_eq!(cf(0.2) / cf(0.1), 4.0, max_relative = 1e-14);

        let f = nd(vec![1.0, 0.0, 2.0], vec![0.0, 1.0, -1.0], &id);
        let g = nd(f.mu1().to_vec(), f.mu0().to_vec(), &id);
        assert_eq!(tv_lower_nd(&f, &g, 3, &grid).unwrap().value, 0.0);
    }

    #[test]
    fn d1_embedding_matches_1d() {
        let grid = GridSpec::default();
        for (a, b) in [((0.1, -0.1), (0.2, -0.2)), ((0.0, 3.0), (0.5, 4.0)), ((0.0, 10.0), (3.0, 13.0))] {
            for sigma in [1.0, 0.7] {
                let f = Mixture1D::new(a.0, a.1, sigma).unwrap();
                let g = Mixture1D::new(b.0, b.1, sigma).unwrap();
                let one = tv_lower_1d(&f, &g, &grid).unwrap().value;
                let many = tv_lower_nd(&MixtureND::from_1d(&f), &MixtureND::from_1d(&g), 9, &grid).unwrap().value;
                assert_relative_eq!(one, many, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn degenerate_components_use_deterministic_direction() {
        let id = SpdMatrix::identity(2);
        let f = nd(vec![0.0, 0.0], vec![0.0, 0.0], &id);
        let g = nd(vec![1.0, 1.0], vec![1.0, 1.0], &id);
        let r = tv_lower_nd_detailed(&f, &g, 0, &GridSpec::default()).unwrap();
        assert_eq!(r.candidates.len(), 1);
        assert_eq!(r.candidates[0].witness.construction, Construction::DeterministicV);
        assert!(r.best.value > 0.0);
    }

    #[test]
    fn diagnostics_values() {
        let dd = DirectionData { v1: vec![4.0, 0.0], v2: vec![1.0, 0.0], v3: vec![3.0, 0.0], basis: vec![vec![1.0, 0.0]], lambda: 4.0 };
        let d = asymptotic_diagnostics(&dd);
        assert_eq!((d.quadratic_form, d.linear_form, d.v1_dominates), (1.0, 0.5, true));
    }

    fn spd3() -> impl Strategy<Value = SpdMatrix<f64>> {
        (prop::collection::vec(-1.0f64..1.0, 9), 0.2f64..2.0).prop_map(|(a, r)| {
            let m = Matrix::from_row_major(3, 3, a);
            let mut s = m.matmul(&m.transpose());
            for i in 0..3 {
                s[(i, i)] += r;
            }
            SpdMatrix::new(s).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_sampled_z_postconditions(vs in prop::collection::vec(-5.0f64..5.0, 9), seed in any::<u64>()) {
            let dd = dd_of(vs[0..3].to_vec(), vs[3..6].to_vec(), vs[6..9].to_vec());
            if let Ok(z) = sample_direction_z(&dd, seed) {
                prop_assert!(linalg::norm(&z) <= 10.0);
                for v in dd.vectors() {
                    prop_assert!(linalg::dot(&z, v).abs() >= linalg::norm(v) / 6.0);
                }
            }
        }

        #[test]
        fn prop_projection_moments(means in prop::collection::vec(-3.0f64..3.0, 12), t in prop::collection::vec(-1.0f64..1.0, 3), s in spd3()) {
            prop_assume!(linalg::norm(&t) > 1e-3);
            let f = nd(means[0..3].to_vec(), means[3..6].to_vec(), &s);
            let g = nd(means[6..9].to_vec(), means[9..12].to_vec(), &s);
            let w = project(&f, &g, &t).unwrap();
            prop_assert!((w.projected.0.sigma().powi(2) - s.quad_form(&t)).abs() < 1e-12 * (1.0 + s.quad_form(&t)));
            prop_assert_eq!(w.projected.1.mu1(), linalg::dot(g.mu1(), &t));
        }

        #[test]
        fn prop_whitened_covariance_is_identity(s in spd3()) {
            let r = inv_sqrt(&s).unwrap();
            let p = r.matrix().matmul(s.matrix()).matmul(r.matrix());
            let id = Matrix::<f64>::identity(3);
            prop_assert!(p.sub(&id).frobenius_norm() < 1e-8);
        }

        #[test]
        fn prop_rotation_equivariance(means in prop::collection::vec(-2.0f64..2.0, 12), angles in prop::collection::vec(0.0f64..6.3, 3), s in spd3(), seed in 0u64..1000) {
            let (a, b, c) = (angles[0], angles[1], angles[2]);
            let rz = Matrix::from_rows(&[vec![a.cos(), -a.sin(), 0.0], vec![a.sin(), a.cos(), 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
            let ry = Matrix::from_rows(&[vec![b.cos(), 0.0, b.sin()], vec![0.0, 1.0, 0.0], vec![-b.sin(), 0.0, b.cos()]]).unwrap();
            let rx = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, c.cos(), -c.sin()], vec![0.0, c.sin(), c.cos()]]).unwrap();
            let q = rz.matmul(&ry).matmul(&rx);
            let mut qs = q.matmul(s.matrix()).matmul(&q.transpose());
            // exact symmetry so the rotated covariance validates
            for i in 0..3 {
                for j in 0..i {
                    let v = 0.5 * (qs[(i, j)] + qs[(j, i)]);
                    qs[(i, j)] = v;
                    qs[(j, i)] = v;
                }
            }
            let qs = SpdMatrix::new(qs).unwrap();
            let grid = GridSpec::default();
            let f = nd(means[0..3].to_vec(), means[3..6].to_vec(), &s);
            let g = nd(means[6..9].to_vec(), means[9..12].to_vec(), &s);
            let rot = |v: &[f64]| q.matvec(v);
            let fr = nd(rot(f.mu0()), rot(f.mu1()), &qs);
            let gr = nd(rot(g.mu0()), rot(g.mu1()), &qs);
            let base = tv_lower_nd(&f, &g, seed, &grid).unwrap().value;
            let turned = tv_lower_nd(&fr, &gr, seed, &grid).unwrap().value;
            prop_assert!((base - turned).abs() <= 1e-8, "{} vs {}", base, turned);
        }
    }
}
