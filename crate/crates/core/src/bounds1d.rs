//! One-dimensional lower bounds.
//!
//! Everything rests on the characteristic-function inequality
//! `TV(f, f′) ≥ ¼·sup_t e^{−σ²t²/2}·|h(t)|` with
//! `h(t) = e^{itμ₀} + e^{itμ₁} − e^{itμ₀′} − e^{itμ₁′}`.
//! The closed-form branches pick a particular `t` and bound `|h(t)|` from
//! below analytically; the numeric branch evaluates the supremum over a grid.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{canonicalize_1d, delta_stats, BoundResult, BoundSource, CanonicalPair1D, Mixture1D};
use crate::scalar::{half, two, Real};

/// Constants of the one-dimensional case analysis, already scaled to bound TV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants1D<T> {
    /// Case 2: `½ − √(9/(8πe)) ≈ 0.13703`, rounded down.
    pub k_large_gap: T,
    /// Case 1, contained: coefficient of `δ₁δ₂/σ²`.
    pub k_case1_contained: T,
    /// Case 1, contained: coefficient of `δ₂/σ`, the other side of the min.
    pub k_case1_contained_alt: T,
    /// Case 1, not contained: coefficient of `δ₂/σ`.
    pub k_case1_outside: T,
    /// Case 3: coefficient of `δ₂/σ`.
    pub k_case3: T,
}

impl<T: Real> Constants1D<T> {
    pub fn new() -> Self {
        let pi = T::PI();
        let e = T::E();
        let sqrt2 = T::SQRT_2();
        Self {
            k_large_gap: T::lit(0.137),
            k_case1_contained: pi * pi / (T::lit(5_120_000.0) * e),
            k_case1_contained_alt: pi / (T::lit(12_800.0) * sqrt2 * e),
            k_case1_outside: pi / (T::lit(3_200.0) * sqrt2 * e),
            // sup_t e^{−σ²t²/2}|h(t)| ≥ π²δ₂/(240eσ), and TV is at least a quarter of that sup
            k_case3: pi * pi / (T::lit(960.0) * e),
        }
    }

    /// Evaluation point of Case 1.
    pub fn t_case1(sigma: T) -> T {
        T::PI() / (T::lit(400.0) * sigma)
    }
}

impl<T: Real> Default for Constants1D<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Multiple of σ separating "close" from "far" means in Cases 1 and 3.
const FAR: f64 = 100.0;
/// Matched gap (in units of σ) at which Case 2 applies.
const LARGE_GAP: f64 = 2.0;

/// `½·e^{−σ²t²/2}·(e^{itμ₀} + e^{itμ₁})`.
pub fn char_fn<T: Real>(m: &Mixture1D<T>, t: T) -> Complex<T> {
    let damp = (-half::<T>() * m.sigma() * m.sigma() * t * t).exp();
    let s = Complex::from_polar(T::one(), t * m.mu0()) + Complex::from_polar(T::one(), t * m.mu1());
    s * (half::<T>() * damp)
}

/// `|h(t)|` without the Gaussian damping factor.
pub fn h_modulus<T: Real>(cp: &CanonicalPair1D<T>, t: T) -> T {
    let (m0, m1, n0, n1) = cp.means();
    // Differences of unit phasors, computed as sums of sines so that nearly
    // equal means do not cancel catastrophically.
    let diff = |a: T, b: T| -> Complex<T> {
        let mid = half::<T>() * t * (a + b);
        let s = two::<T>() * (half::<T>() * t * (a - b)).sin();
        Complex::from_polar(T::one(), mid) * Complex::new(T::zero(), s)
    };
    (diff(m0, n0) + diff(m1, n1)).norm()
}

/// `e^{−σ²t²/2}·|h(t)| = 2·|C_f(t) − C_f′(t)|`.
pub fn char_gap<T: Real>(cp: &CanonicalPair1D<T>, t: T) -> T {
    let s = cp.sigma();
    (-half::<T>() * s * s * t * t).exp() * h_modulus(cp, t)
}

/// Frequencies searched by the numeric characteristic-function bound.
///
/// Points are log-spaced on `[t_min_scaled/σ, t_max_scaled/σ]`. With
/// `include_witnesses`, the evaluation points of the closed-form branches
/// are added so the numeric bound never misses them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub t_min_scaled: f64,
    pub t_max_scaled: f64,
    pub include_witnesses: bool,
    /// Extra points, in units of `1/σ`.
    pub extra_scaled: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_points: 2048,
            t_min_scaled: 1e-3,
            t_max_scaled: 10.0,
            include_witnesses: true,
            extra_scaled: Vec::new(),
        }
    }
}

impl GridSpec {
    /// Only the given points (in units of `1/σ`).
    pub fn points_only(scaled: &[f64]) -> Self {
        Self {
            n_points: 0,
            t_min_scaled: 0.0,
            t_max_scaled: 0.0,
            include_witnesses: false,
            extra_scaled: scaled.to_vec(),
        }
    }

    /// Sorted, deduplicated grid for a canonical pair.
    pub fn points<T: Real>(&self, cp: &CanonicalPair1D<T>) -> Vec<T> {
        let sigma = cp.sigma();
        let mut pts: Vec<T> = Vec::with_capacity(self.n_points + self.extra_scaled.len() + 3);
        match self.n_points {
            0 => {}
            1 => pts.push(T::lit(self.t_min_scaled) / sigma),
            n => {
                let lo = self.t_min_scaled.ln();
                let step = (self.t_max_scaled.ln() - lo) / (n - 1) as f64;
                pts.extend((0..n).map(|i| T::lit((lo + step * i as f64).exp()) / sigma));
            }
        }
        pts.extend(self.extra_scaled.iter().map(|&x| T::lit(x) / sigma));
        if self.include_witnesses {
            pts.push(Constants1D::t_case1(sigma));
            pts.extend(small_prec_witness(cp).map(|w| w.t));
        }
        pts.retain(|t| t.is_finite() && *t > T::zero());
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        pts.dedup();
        pts
    }
}

/// `¼·max` of [`char_gap`] over the grid. Sound for any grid.
pub fn char_tv_lower<T: Real>(cp: &CanonicalPair1D<T>, grid: &GridSpec) -> BoundResult<T> {
    let quarter = T::lit(0.25);
    let mut best: Option<(T, T)> = None;
    for t in grid.points(cp) {
        let g = char_gap(cp, t);
        // ascending grid and strict comparison: ties keep the smallest t
        if best.is_none_or(|(_, b)| g > b) {
            best = Some((t, g));
        }
    }
    match best {
        Some((t, g)) => BoundResult::lower(BoundSource::CharNumeric, quarter * g, quarter).with_witness_t(t),
        None => BoundResult::lower(BoundSource::CharNumeric, T::zero(), quarter),
    }
}

/// Lower bound on `|h(t)|` for close means.
///
/// Requires `t > 0` and `t·(μ₁−μ₀)`, `t·(μ₁′−μ₀)`, `t·(μ₀′−μ₀)` in `[0, π/4]`.
pub fn lemma_sepmeans_bound<T: Real>(cp: &CanonicalPair1D<T>, t: T) -> Result<T> {
    if !(t > T::zero() && t.is_finite()) {
        return Err(Error::DomainError(format!("t must be positive, got {t}")));
    }
    let (m0, m1, n0, n1) = cp.means();
    let quarter_pi = T::FRAC_PI_4();
    for (name, off) in [("μ1-μ0", m1 - m0), ("μ1'-μ0", n1 - m0), ("μ0'-μ0", n0 - m0)] {
        let x = t * off;
        if !(x >= T::zero() && x <= quarter_pi) {
            return Err(Error::DomainError(format!("t*({name}) = {x} is outside [0, pi/4]")));
        }
    }
    let ds = delta_stats(cp);
    let sqrt2 = T::SQRT_2();
    Ok(if cp.is_contained() {
        let quad = t * t * (ds.delta1 - ds.delta4) * ds.delta4 / two();
        let lin = t * ds.delta3 / (T::lit(4.0) * sqrt2);
        quad.max(lin)
    } else {
        t * ds.delta2 / (two::<T>() * sqrt2)
    })
}

/// Case 2: a matched pair of means at least 2σ apart.
pub fn lemma_large_gap<T: Real>(cp: &CanonicalPair1D<T>) -> Option<BoundResult<T>> {
    let ds = delta_stats(cp);
    let k = Constants1D::<T>::new().k_large_gap;
    (ds.delta2 >= T::lit(LARGE_GAP) * cp.sigma()).then(|| BoundResult::lower(BoundSource::Case2LargeGap, k, k))
}

/// Evaluation point used by the small-precision argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallPrecWitness<T> {
    /// Dimensionless constant; the point is `t = 1/(cσ)`.
    pub c: T,
    pub t: T,
    /// `true` for the construction used when `μ₁′ > μ₁`.
    pub outside_branch: bool,
}

/// Witness frequency of the small-precision argument, when its floor is nonzero.
pub fn small_prec_witness<T: Real>(cp: &CanonicalPair1D<T>) -> Option<SmallPrecWitness<T>> {
    let (m0, m1, n0, n1) = cp.means();
    let sigma = cp.sigma();
    let pi = T::PI();
    let eighty = T::lit(80.0);
    let two_pi_sigma = two::<T>() * pi * sigma;
    let (c, outside_branch) = if !cp.is_contained() {
        let phi = m1 - m0;
        let k = (phi * pi / (eighty * sigma)).floor();
        if k < T::one() {
            return None;
        }
        (phi / (two_pi_sigma * k), true)
    } else {
        let alpha = (n0 - m0) / sigma;
        let beta = (m1 - n1) / sigma;
        let phi = if beta <= alpha { n1 - m0 } else { m1 - n0 };
        let k = (phi * pi / (eighty * sigma)).floor();
        if k < T::one() {
            return None;
        }
        (phi / (T::lit(1.5) * pi * sigma + two_pi_sigma * k), false)
    };
    (c > T::zero() && c.is_finite()).then(|| SmallPrecWitness {
        c,
        t: T::one() / (c * sigma),
        outside_branch,
    })
}

/// Case 3: far-apart components, matched gaps at most 2σ.
pub fn lemma_small_prec<T: Real>(cp: &CanonicalPair1D<T>) -> Option<BoundResult<T>> {
    let ds = delta_stats(cp);
    let sigma = cp.sigma();
    if !(ds.delta1 >= T::lit(FAR) * sigma && ds.delta2 <= T::lit(LARGE_GAP) * sigma) {
        return None;
    }
    let k = Constants1D::<T>::new().k_case3;
    let r = BoundResult::lower(BoundSource::Case3SmallPrec, k * ds.delta2 / sigma, k);
    Some(match small_prec_witness(cp) {
        Some(w) => r.with_witness_t(w.t),
        None => r,
    })
}

/// Case 1: all means within 100σ of the smallest one.
pub fn case1_bound<T: Real>(cp: &CanonicalPair1D<T>) -> Option<BoundResult<T>> {
    let sigma = cp.sigma();
    if cp.spread() > T::lit(FAR) * sigma {
        return None;
    }
    let ds = delta_stats(cp);
    let k = Constants1D::<T>::new();
    let t = Constants1D::t_case1(sigma);
    let r = if cp.is_contained() {
        let quad = k.k_case1_contained * ds.delta1 * ds.delta2 / (sigma * sigma);
        let lin = k.k_case1_contained_alt * ds.delta2 / sigma;
        if quad <= lin {
            BoundResult::lower(BoundSource::Case1Contained, quad, k.k_case1_contained)
        } else {
            BoundResult::lower(BoundSource::Case1Contained, lin, k.k_case1_contained_alt)
        }
    } else {
        BoundResult::lower(BoundSource::Case1Outside, k.k_case1_outside * ds.delta2 / sigma, k.k_case1_outside)
    };
    Some(r.with_witness_t(t))
}

/// All branch values behind a one-dimensional lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound1D<T> {
    pub best: BoundResult<T>,
    /// Every applicable branch in evaluation order (Case 2, 1, 3, numeric).
    pub branches: Vec<BoundResult<T>>,
    pub canonical: CanonicalPair1D<T>,
}

impl<T: Real> LowerBound1D<T> {
    /// Largest closed-form branch, if any applied.
    pub fn best_closed_form(&self) -> Option<&BoundResult<T>> {
        pick_max(self.branches.iter().filter(|b| b.source.is_closed_form()))
    }

    pub fn branch(&self, source: BoundSource) -> Option<&BoundResult<T>> {
        self.branches.iter().find(|b| b.source == source)
    }
}

fn pick_max<'a, T: Real>(it: impl Iterator<Item = &'a BoundResult<T>>) -> Option<&'a BoundResult<T>> {
    let mut best: Option<&BoundResult<T>> = None;
    for b in it {
        // strict comparison: earlier branches win ties
        if best.is_none_or(|x| b.value > x.value) {
            best = Some(b);
        }
    }
    best
}

/// Lower bound on `TV(f, g)`: the largest of every applicable branch.
pub fn tv_lower_1d<T: Real>(f: &Mixture1D<T>, g: &Mixture1D<T>, grid: &GridSpec) -> Result<BoundResult<T>> {
    Ok(tv_lower_1d_detailed(f, g, grid)?.best)
}

pub fn tv_lower_1d_detailed<T: Real>(f: &Mixture1D<T>, g: &Mixture1D<T>, grid: &GridSpec) -> Result<LowerBound1D<T>> {
    let cp = canonicalize_1d(f, g)?;
    if cp.is_identical() {
        return Ok(LowerBound1D {
            best: BoundResult::zero(),
            branches: Vec::new(),
            canonical: cp,
        });
    }
    let mut branches = Vec::with_capacity(4);
    branches.extend(lemma_large_gap(&cp));
    branches.extend(case1_bound(&cp));
    branches.extend(lemma_small_prec(&cp));
    branches.push(char_tv_lower(&cp, grid));
    let best = pick_max(branches.iter()).expect("numeric branch always present").clone();
    Ok(LowerBound1D { best, branches, canonical: cp })
}

/// Which inequality [`trig_fact_residual`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrigFact {
    /// `cos(x−y) − cos x ≥ 0`
    I,
    /// `−sin(x+y) + 2 sin x ≥ sin((x−y)/2)·cos(y/2)`
    II,
    /// `−1 − cos x + cos y + cos(x−y) ≥ (x−y)·y/2`
    III,
}

/// Left side minus right side of a trig inequality on `0 ≤ y ≤ x ≤ π/4`.
pub fn trig_fact_residual<T: Real>(fact: TrigFact, x: T, y: T) -> Result<T> {
    if !(T::zero() <= y && y <= x && x <= T::FRAC_PI_4()) {
        return Err(Error::DomainError(format!("need 0 <= y <= x <= pi/4, got x={x}, y={y}")));
    }
    let h = half::<T>();
    Ok(match fact {
        TrigFact::I => (x - y).cos() - x.cos(),
        TrigFact::II => -(x + y).sin() + two::<T>() * x.sin() - (h * (x - y)).sin() * (h * y).cos(),
        // grouped so that y = 0 cancels exactly
        TrigFact::III => (y.cos() - T::one()) + ((x - y).cos() - x.cos()) - h * (x - y) * y,
    })
}
