//! Randomized soundness sweep.
//!
//! Every check yields a margin that is nonnegative when the check holds, so
//! the report can carry the worst margin of each check even on a pass.
//!
//! 1D instances cycle through three families by index: `spread` (all four
//! means uniform in [−20, 20]σ), `near` (second mixture within ±2σ of the
//! first, means in [−20, 20]σ) and `far` (within-mixture gap uniform in
//! [100, 300]σ, second mixture within ±2σ). σ is log-uniform in [0.5, 2].
//! dD instances take d ∈ {2, 3, 5} by index and the same three families in
//! whitened units; Σ = Q·diag(λ)·Qᵀ with random orthogonal Q and λ
//! log-uniform in [0.1, 10], so cond(Σ) ≤ 100.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;
use tvgap::bounds1d::{char_tv_lower, lemma_small_prec, small_prec_witness};
use tvgap::linalg::{self, orthonormal_basis};
use tvgap::rng::normal_by_inversion;
use tvgap::{
    canonicalize_1d, delta_stats, direction_vectors, hellinger_sq_oracle_1d, project, sample_direction_z,
    trig_fact_residual, tv_lower_1d, tv_lower_nd_detailed, tv_oracle_1d, tv_oracle_nd, tv_upper_bound,
    tv_upper_bound_1d, GridSpec, Matrix, Mixture1D, MixtureND, SeedStream, SpdMatrix, TrigFact,
};

use crate::error::CliError;
use crate::report::{Report, Verdict};

pub const DEFAULT_N_1D: usize = 500;
pub const DEFAULT_N_ND: usize = 200;
pub const QUAD_TOL: f64 = 1e-10;
pub const MC_SAMPLES: usize = 200_000;
pub const PROJECTIONS_PER_INSTANCE: usize = 3;
pub const DIMS: [usize; 3] = [2, 3, 5];
/// Relative tolerance of the translation and scaling invariance checks.
pub const INVARIANCE_RTOL: f64 = 1e-9;

pub const WITNESS_C_MIN: f64 = 25.0 / (PI * PI);
pub const WITNESS_C_MAX: f64 = 80.0 / (PI * PI);

pub mod checks {
    pub const LOWER_LE_ORACLE: &str = "lower_le_oracle";
    pub const ORACLE_LE_UPPER: &str = "oracle_le_upper";
    pub const CHAR_LE_ORACLE: &str = "char_lower_le_oracle";
    pub const HELLINGER_LE_TV: &str = "hellinger_sq_le_tv";
    pub const DELTA_INVARIANTS: &str = "delta_invariants";
    pub const SWAP_INVARIANCE: &str = "swap_invariance";
    pub const TRANSLATION_INVARIANCE: &str = "translation_invariance";
    pub const SCALE_INVARIANCE: &str = "scale_invariance";
    pub const WITNESS_C: &str = "small_prec_witness_c";
    pub const LOWER_LE_MC: &str = "nd_lower_le_mc";
    pub const MC_LE_UPPER: &str = "nd_mc_le_upper";
    pub const PROJECTION_DPI: &str = "projection_data_processing";
    pub const DIRECTION_Z: &str = "direction_z_postconditions";
    pub const DIRECTION_DATA: &str = "direction_data_invariants";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Spread,
    Near,
    Far,
}

impl Family {
    fn of(i: usize) -> Self {
        [Family::Spread, Family::Near, Family::Far][i % 3]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance1D {
    pub index: usize,
    pub family: Family,
    pub f: [f64; 2],
    pub g: [f64; 2],
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceNd {
    pub index: usize,
    pub family: Family,
    pub d: usize,
    pub mu0: Vec<f64>,
    pub mu1: Vec<f64>,
    pub mu0_prime: Vec<f64>,
    pub mu1_prime: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn signed(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let x = rng.random_range(lo..hi);
    if rng.random_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Means in units of σ, for one family.
fn family_means(rng: &mut impl Rng, family: Family) -> ([f64; 2], [f64; 2]) {
    let u = |rng: &mut dyn RngCore, lo: f64, hi: f64| rng.random_range(lo..hi);
    match family {
        Family::Spread => ([u(rng, -20.0, 20.0), u(rng, -20.0, 20.0)], [u(rng, -20.0, 20.0), u(rng, -20.0, 20.0)]),
        Family::Near => {
            let f = [u(rng, -20.0, 20.0), u(rng, -20.0, 20.0)];
            (f, [f[0] + u(rng, -2.0, 2.0), f[1] + u(rng, -2.0, 2.0)])
        }
        Family::Far => {
            let m0 = u(rng, -20.0, 20.0);
            let f = [m0, m0 + signed(rng, 100.0, 300.0)];
            (f, [f[0] + u(rng, -2.0, 2.0), f[1] + u(rng, -2.0, 2.0)])
        }
    }
}

pub fn instance_1d(seed: u64, index: usize) -> Instance1D {
    let mut rng = SeedStream::new(seed).child("verify-1d").index(index as u64).rng();
    let family = Family::of(index);
    let sigma = log_uniform(&mut rng, 0.5, 2.0);
    let (f, g) = family_means(&mut rng, family);
    Instance1D {
        index,
        family,
        f: f.map(|x| x * sigma),
        g: g.map(|x| x * sigma),
        sigma,
    }
}

fn random_spd(rng: &mut impl RngCore, d: usize) -> Matrix {
    let vs: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| normal_by_inversion(rng)).collect()).collect();
    let q = orthonormal_basis(&vs);
    assert_eq!(q.len(), d, "random matrix is rank deficient");
    let lambda: Vec<f64> = (0..d).map(|_| log_uniform(rng, 0.1, 10.0)).collect();
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v: f64 = (0..d).map(|k| q[k][i] * lambda[k] * q[k][j]).sum();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn instance_nd(seed: u64, index: usize) -> InstanceNd {
    let mut rng = SeedStream::new(seed).child("verify-nd").index(index as u64).rng();
    let d = DIMS[index % DIMS.len()];
    let family = Family::of(index / DIMS.len());
    let sigma = random_spd(&mut rng, d);
    let l = SpdMatrix::new(sigma.clone()).expect("random SPD").cholesky_factor().clone();
    // per coordinate, the 1D family in whitened units, mapped through L
    let mut w = [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]];
    for k in 0..d {
        let (f, g) = family_means(&mut rng, family);
        for (slot, x) in w.iter_mut().zip([f[0], f[1], g[0], g[1]]) {
            slot[k] = x;
        }
    }
    let [mu0, mu1, mu0_prime, mu1_prime] = w.map(|v| l.matvec(&v));
    InstanceNd {
        index,
        family,
        d,
        mu0,
        mu1,
        mu0_prime,
        mu1_prime,
        sigma: sigma.to_rows(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    check: &'static str,
    margin: f64,
}

fn outcome(check: &'static str, margin: f64) -> Outcome {
    Outcome { check, margin }
}

fn invariance_margin(a: f64, b: f64) -> f64 {
    INVARIANCE_RTOL * a.abs().max(1e-300) - (a - b).abs()
}

fn check_1d(inst: &Instance1D, grid: &GridSpec) -> Result<Vec<Outcome>, CliError> {
    use checks::*;
    let f = Mixture1D::new(inst.f[0], inst.f[1], inst.sigma)?;
    let g = Mixture1D::new(inst.g[0], inst.g[1], inst.sigma)?;
    let lower = tv_lower_1d(&f, &g, grid)?.value;
    let upper = tv_upper_bound_1d(&f, &g)?.value;
    let tv = tv_oracle_1d(&f, &g, QUAD_TOL)?;
    let h2 = hellinger_sq_oracle_1d(&f, &g, QUAD_TOL)?;
    let cp = canonicalize_1d(&f, &g)?;
    let char_lower = char_tv_lower(&cp, grid).value;
    let ds = delta_stats(&cp);
    let mut out = vec![
        outcome(LOWER_LE_ORACLE, tv + QUAD_TOL - lower),
        outcome(ORACLE_LE_UPPER, upper + QUAD_TOL - tv),
        outcome(CHAR_LE_ORACLE, tv + QUAD_TOL - char_lower),
        outcome(HELLINGER_LE_TV, tv + 2.0 * QUAD_TOL - h2),
        outcome(
            DELTA_INVARIANTS,
            [
                ds.delta4,
                ds.delta3,
                ds.delta2 - ds.delta4,
                ds.delta2 + ds.delta4 - ds.delta3,
                ds.delta1.min(ds.delta2),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min),
        ),
    ];
    let swapped = tv_lower_1d(&g.swapped(), &f, grid)?.value;
    out.push(outcome(SWAP_INVARIANCE, -(swapped - lower).abs()));
    let shift = 7.25 * inst.sigma;
    let tr = |m: &Mixture1D| Mixture1D::new(m.mu0() + shift, m.mu1() + shift, m.sigma());
    out.push(outcome(TRANSLATION_INVARIANCE, invariance_margin(lower, tv_lower_1d(&tr(&f)?, &tr(&g)?, grid)?.value)));
    let sc = |m: &Mixture1D| Mixture1D::new(m.mu0() * 3.0, m.mu1() * 3.0, m.sigma() * 3.0);
    out.push(outcome(SCALE_INVARIANCE, invariance_margin(lower, tv_lower_1d(&sc(&f)?, &sc(&g)?, grid)?.value)));
    out.extend(witness_outcome(&f, &g)?);
    Ok(out)
}

/// Range check of the small-precision witness, when that lemma applies.
fn witness_outcome(f: &Mixture1D, g: &Mixture1D) -> Result<Option<Outcome>, CliError> {
    let cp = canonicalize_1d(f, g)?;
    if lemma_small_prec(&cp).is_none() {
        return Ok(None);
    }
    let margin = match small_prec_witness(&cp) {
        Some(w) => (w.c - WITNESS_C_MIN).min(WITNESS_C_MAX - w.c),
        None => f64::NEG_INFINITY,
    };
    Ok(Some(outcome(checks::WITNESS_C, margin)))
}

fn unit_random_direction(rng: &mut impl RngCore, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| normal_by_inversion(rng)).collect();
        let n = linalg::norm(&v);
        if n > 0.0 {
            return linalg::scale(1.0 / n, &v);
        }
    }
}

fn check_nd(inst: &InstanceNd, seed: u64, grid: &GridSpec) -> Result<Vec<Outcome>, CliError> {
    use checks::*;
    let sigma = SpdMatrix::from_rows(&inst.sigma)?;
    let f = MixtureND::new(inst.mu0.clone(), inst.mu1.clone(), sigma.clone())?;
    let g = MixtureND::new(inst.mu0_prime.clone(), inst.mu1_prime.clone(), sigma.clone())?;
    let stream = SeedStream::new(seed).child("verify-nd").index(inst.index as u64);
    let direction_seed = stream.child("direction").seed();
    let detail = tv_lower_nd_detailed(&f, &g, direction_seed, grid)?;
    let lower = detail.best.value;
    let upper = tv_upper_bound(&f, &g)?.value;
    let mc = tv_oracle_nd(&f, &g, MC_SAMPLES, stream.child("mc").seed())?;
    let hi = mc.value + 3.0 * mc.stderr;
    let lo = mc.value - 3.0 * mc.stderr;
    let mut out = vec![outcome(LOWER_LE_MC, hi - lower), outcome(MC_LE_UPPER, upper - lo)];

    let mut rng = stream.child("projections").rng();
    for _ in 0..PROJECTIONS_PER_INSTANCE {
        let t = unit_random_direction(&mut rng, inst.d);
        let w = project(&f, &g, &t)?;
        let tv = tv_oracle_1d(&w.projected.0, &w.projected.1, QUAD_TOL)?;
        out.push(outcome(PROJECTION_DPI, hi + QUAD_TOL - tv));
    }

    for c in &detail.candidates {
        out.extend(witness_outcome(&c.witness.projected.0, &c.witness.projected.1)?);
    }

    let dd = direction_vectors(&f, &g)?;
    if !dd.basis.is_empty() && linalg::norm(&dd.v1) > 0.0 {
        let z = sample_direction_z(&dd, direction_seed)?;
        let mut m = 10.0 - linalg::norm(&z);
        for v in dd.vectors() {
            let nv = linalg::norm(v);
            if nv > 0.0 {
                m = m.min(linalg::dot(&z, v).abs() - nv / 6.0);
            }
        }
        out.push(outcome(DIRECTION_Z, m));
    }

    // orthonormal basis, v's in its span, Rayleigh quotients of the v's ≤ λ ≤ λ_max(Σ)
    let mut m = f64::INFINITY;
    for (i, u) in dd.basis.iter().enumerate() {
        for (j, w) in dd.basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            m = m.min(1e-10 - (linalg::dot(u, w) - target).abs());
        }
    }
    for v in dd.vectors() {
        let mut r = v.to_vec();
        for u in &dd.basis {
            linalg::axpy(-linalg::dot(u, v), u, &mut r);
        }
        m = m.min(1e-10 * linalg::norm(v).max(1.0) - linalg::norm(&r));
    }
    let lmax = sigma.largest_eigenvalue()?;
    m = m.min(lmax * (1.0 + 1e-10) - dd.lambda);
    for v in dd.vectors() {
        let n2 = linalg::dot(v, v);
        if n2 > 0.0 {
            m = m.min(dd.lambda - sigma.quad_form(v) / n2 * (1.0 - 1e-10));
        }
    }
    out.push(outcome(DIRECTION_DATA, m));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckStat {
    pub check: &'static str,
    pub evaluated: usize,
    pub violations: usize,
    /// Smallest margin seen; negative means violated.
    pub worst_margin: Option<f64>,
    pub worst_instance: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub instance: String,
    pub check: &'static str,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub n_1d: usize,
    pub n_nd: usize,
    pub quad_tol: f64,
    pub mc_samples: usize,
    pub checks: Vec<CheckStat>,
    pub violations: Vec<Violation>,
    /// Smallest of the lower-side sandwich margins, 1D and dD.
    pub worst_sandwich_slack: Option<f64>,
}

impl VerifySummary {
    pub fn check(&self, name: &str) -> Option<&CheckStat> {
        self.checks.iter().find(|c| c.check == name)
    }
}

fn label_1d(i: &Instance1D) -> String {
    format!("1d#{} {:?} f=({}, {}) g=({}, {}) sigma={}", i.index, i.family, i.f[0], i.f[1], i.g[0], i.g[1], i.sigma)
}

fn label_nd(i: &InstanceNd) -> String {
    format!("nd#{} {:?} d={}", i.index, i.family, i.d)
}

fn aggregate(results: Vec<(String, Vec<Outcome>)>, summary: &mut VerifySummary) {
    for (label, outcomes) in results {
        for o in outcomes {
            let idx = match summary.checks.iter().position(|c| c.check == o.check) {
                Some(i) => i,
                None => {
                    summary.checks.push(CheckStat {
                        check: o.check,
                        evaluated: 0,
                        violations: 0,
                        worst_margin: None,
                        worst_instance: None,
                    });
                    summary.checks.len() - 1
                }
            };
            let stat = &mut summary.checks[idx];
            stat.evaluated += 1;
            let worse = match stat.worst_margin {
                None => true,
                Some(w) => !(o.margin >= w),
            };
            if worse && !(stat.worst_margin.is_some_and(f64::is_nan)) {
                stat.worst_margin = Some(o.margin);
                stat.worst_instance = Some(label.clone());
            }
            // NaN margins count as violations
            if !(o.margin >= 0.0) {
                stat.violations += 1;
                summary.violations.push(Violation {
                    instance: label.clone(),
                    check: o.check,
                    margin: o.margin,
                });
            }
        }
    }
}

pub fn sweep(n_1d: usize, n_nd: usize, seed: u64) -> Result<VerifySummary, CliError> {
    let grid = GridSpec::default();
    let r1: Vec<(String, Vec<Outcome>)> = (0..n_1d)
        .into_par_iter()
        .map(|i| {
            let inst = instance_1d(seed, i);
            Ok((label_1d(&inst), check_1d(&inst, &grid)?))
        })
        .collect::<Result<_, CliError>>()?;
    let rn: Vec<(String, Vec<Outcome>)> = (0..n_nd)
        .into_par_iter()
        .map(|i| {
            let inst = instance_nd(seed, i);
            Ok((label_nd(&inst), check_nd(&inst, seed, &grid)?))
        })
        .collect::<Result<_, CliError>>()?;
    let mut summary = VerifySummary {
        n_1d,
        n_nd,
        quad_tol: QUAD_TOL,
        mc_samples: MC_SAMPLES,
        checks: Vec::new(),
        violations: Vec::new(),
        worst_sandwich_slack: None,
    };
    aggregate(r1, &mut summary);
    aggregate(rn, &mut summary);
    summary.worst_sandwich_slack = [checks::LOWER_LE_ORACLE, checks::LOWER_LE_MC]
        .iter()
        .filter_map(|c| summary.check(c).and_then(|s| s.worst_margin))
        .reduce(f64::min);
    Ok(summary)
}

pub fn run(n_1d: usize, n_nd: usize, seed: u64) -> Result<Report<VerifySummary>, CliError> {
    if n_1d == 0 || n_nd == 0 {
        return Err(CliError::Input("verify needs --n-1d and --n-nd of at least 1".into()));
    }
    let summary = sweep(n_1d, n_nd, seed)?;
    let violations = summary
        .violations
        .iter()
        .map(|v| format!("{}: {} (margin {:e})", v.instance, v.check, v.margin))
        .collect();
    Ok(Report::new("verify", seed, summary, Verdict::from_violations(violations)))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrigGridResult {
    pub fact: TrigFact,
    pub points: usize,
    pub min_residual: f64,
    pub argmin: (f64, f64),
}

/// Minimum residual of each trig fact over an `n × n` grid of `0 ≤ y ≤ x ≤ π/4`.
pub fn trig_facts_grid(n: usize) -> Vec<TrigGridResult> {
    // clamped, since of·k/(n−1) can round past `of` at k = n−1
    let step = |k: usize, of: f64| if n > 1 { (of * k as f64 / (n - 1) as f64).min(of) } else { 0.0 };
    [TrigFact::I, TrigFact::II, TrigFact::III]
        .into_iter()
        .map(|fact| {
            let mut res = TrigGridResult { fact, points: 0, min_residual: f64::INFINITY, argmin: (0.0, 0.0) };
            for i in 0..n {
                let x = step(i, FRAC_PI_4);
                for j in 0..n {
                    let y = step(j, x);
                    let r = trig_fact_residual(fact, x, y).expect("grid lies in the domain");
                    res.points += 1;
                    if r < res.min_residual {
                        res.min_residual = r;
                        res.argmin = (x, y);
                    }
                }
            }
            res
        })
        .collect()
}
