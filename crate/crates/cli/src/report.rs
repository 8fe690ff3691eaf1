//! Report documents and the per-pair evaluation behind `bound` and `scan`.

use serde::Serialize;
use serde_json::{json, Value};
use tvgap::boundsnd::AsymptoticDiagnostics;
use tvgap::oracles::moment_gaps;
use tvgap::{
    hellinger_sq_oracle_1d, moment_distance, tv_lower_1d_detailed, tv_lower_nd_detailed, tv_oracle_1d, tv_oracle_nd,
    tv_upper_bound, BoundResult, BoundSource, GridSpec, LowerBound1D, LowerBoundNd, SeedStream,
};

use crate::error::CliError;
use crate::spec_file::Pair;

pub const SCHEMA_VERSION: &str = "tvgap-report/1";

/// Top-level document written by every JSON-emitting command.
#[derive(Debug, Clone, Serialize)]
pub struct Report<B> {
    pub schema_version: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub body: B,
    pub verdict: Verdict,
}

impl<B: Serialize> Report<B> {
    pub fn new(command: &'static str, seed: u64, body: B, verdict: Verdict) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            body,
            verdict,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub violations: Vec<String>,
}

impl Verdict {
    pub fn from_violations(violations: Vec<String>) -> Self {
        Self {
            pass: violations.is_empty(),
            violations,
        }
    }
}

/// A value together with the operation and parameters that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct Tagged<V> {
    pub operation: &'static str,
    pub params: Value,
    #[serde(flatten)]
    pub result: V,
}

impl<V> Tagged<V> {
    pub fn new(operation: &'static str, params: Value, result: V) -> Self {
        Self { operation, params, result }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Scalar {
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub source: BoundSource,
    pub value: f64,
    pub constant_used: f64,
    pub witness_t: Option<f64>,
}

impl From<&BoundResult> for BranchRecord {
    fn from(b: &BoundResult) -> Self {
        Self {
            source: b.source,
            value: b.value,
            constant_used: b.constant_used,
            witness_t: b.witness_t,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionRecord {
    pub construction: &'static str,
    pub direction: Vec<f64>,
    /// `(μ₀, μ₁, μ₀′, μ₁′, σ)` of the projected pair.
    pub projected_pair: [f64; 5],
    pub inner_source: BoundSource,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerRecord {
    #[serde(flatten)]
    pub best: BoundResult,
    /// Largest closed-form branch (the numeric branch excluded).
    pub closed_form: Option<BranchRecord>,
    pub branches: Vec<BranchRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub projections: Vec<ProjectionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winning_projection: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic_diagnostics: Option<AsymptoticDiagnostics<f64>>,
}

impl LowerRecord {
    fn from_1d(d: &LowerBound1D) -> Self {
        Self {
            best: d.best.clone(),
            closed_form: d.best_closed_form().map(BranchRecord::from),
            branches: d.branches.iter().map(BranchRecord::from).collect(),
            projections: Vec::new(),
            winning_projection: None,
            asymptotic_diagnostics: None,
        }
    }

    fn from_nd(d: &LowerBoundNd) -> Self {
        let win = d.winning();
        Self {
            best: d.best.clone(),
            closed_form: win.and_then(|c| c.bound.best_closed_form()).map(BranchRecord::from),
            branches: win.map(|c| c.bound.branches.iter().map(BranchRecord::from).collect()).unwrap_or_default(),
            projections: d
                .candidates
                .iter()
                .map(|c| {
                    let (f, g) = &c.witness.projected;
                    ProjectionRecord {
                        construction: c.witness.construction.name(),
                        direction: c.witness.direction.clone(),
                        projected_pair: [f.mu0(), f.mu1(), g.mu0(), g.mu1(), f.sigma()],
                        inner_source: c.bound.best.source,
                        value: c.bound.best.value,
                    }
                })
                .collect(),
            winning_projection: d.winner,
            asymptotic_diagnostics: Some(d.diagnostics),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum OracleRecord {
    Quadrature { value: f64, tol: f64 },
    MonteCarlo { value: f64, stderr: f64, n_samples: usize, seed: u64 },
}

impl OracleRecord {
    pub fn value(&self) -> f64 {
        match *self {
            OracleRecord::Quadrature { value, .. } | OracleRecord::MonteCarlo { value, .. } => value,
        }
    }

    /// Allowed slack when comparing against this oracle.
    pub fn slack(&self) -> f64 {
        match *self {
            OracleRecord::Quadrature { tol, .. } => tol,
            OracleRecord::MonteCarlo { stderr, .. } => 3.0 * stderr,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentRecord {
    pub value: f64,
    /// `‖M_ℓ(f) − M_ℓ(f′)‖_F²` for ℓ = 1, 2, 3.
    pub per_order: [f64; 3],
}

/// The chain lower ≤ oracle ≤ upper, with slacks.
#[derive(Debug, Clone, Serialize)]
pub struct Sandwich {
    pub lower: f64,
    pub oracle: Option<f64>,
    pub upper: f64,
    pub tolerance: f64,
    pub lower_le_oracle: Option<bool>,
    pub oracle_le_upper: Option<bool>,
    pub lower_le_upper: bool,
    /// `oracle + tolerance − lower` (negative means violated).
    pub lower_slack: Option<f64>,
    /// `upper + tolerance − oracle` (negative means violated).
    pub upper_slack: Option<f64>,
    pub pass: bool,
}

impl Sandwich {
    pub fn new(lower: f64, oracle: Option<&OracleRecord>, upper: f64) -> Self {
        let tol = oracle.map_or(0.0, OracleRecord::slack);
        let lower_slack = oracle.map(|o| o.value() + tol - lower);
        let upper_slack = oracle.map(|o| upper + tol - o.value());
        let lower_le_upper = lower <= upper;
        let lower_le_oracle = lower_slack.map(|s| s >= 0.0);
        let oracle_le_upper = upper_slack.map(|s| s >= 0.0);
        Self {
            lower,
            oracle: oracle.map(OracleRecord::value),
            upper,
            tolerance: tol,
            lower_le_oracle,
            oracle_le_upper,
            lower_le_upper,
            lower_slack,
            upper_slack,
            pass: lower_le_upper && lower_le_oracle != Some(false) && oracle_le_upper != Some(false),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRecord {
    pub label: Option<String>,
    pub d: usize,
    pub lower: Tagged<LowerRecord>,
    pub upper: Tagged<BoundResult>,
    pub oracle: Option<Tagged<OracleRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hellinger_sq: Option<Tagged<Scalar>>,
    pub moment_distance: Tagged<MomentRecord>,
    pub sandwich: Sandwich,
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub seed: u64,
    pub mc_samples: usize,
    pub quad_tol: f64,
    pub oracle: bool,
    pub grid: GridSpec,
}

impl EvalOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            mc_samples: tvgap::oracles::DEFAULT_MC_SAMPLES,
            quad_tol: 1e-10,
            oracle: true,
            grid: GridSpec::default(),
        }
    }

    /// Seed of the sampled projection direction.
    pub fn direction_seed(&self) -> u64 {
        SeedStream::new(self.seed).child("direction").seed()
    }

    /// Seed of the Monte Carlo oracle.
    pub fn mc_seed(&self) -> u64 {
        SeedStream::new(self.seed).child("mc").seed()
    }
}

/// Runs every bound and oracle on one pair.
pub fn evaluate_pair(label: Option<String>, pair: &Pair, opts: &EvalOptions) -> Result<PairRecord, CliError> {
    let grid_json = serde_json::to_value(&opts.grid).expect("grid serializes");
    let (fnd, gnd) = pair.as_nd();
    let (lower, oracle, hellinger_sq) = match pair {
        Pair::One(f, g) => {
            let d = tv_lower_1d_detailed(f, g, &opts.grid)?;
            let lower = Tagged::new("tv_lower_1d", json!({ "grid": grid_json }), LowerRecord::from_1d(&d));
            let (oracle, h2) = if opts.oracle {
                let tol = json!({ "tol": opts.quad_tol });
                let tv = tv_oracle_1d(f, g, opts.quad_tol)?;
                let h2 = hellinger_sq_oracle_1d(f, g, opts.quad_tol)?;
                (
                    Some(Tagged::new("tv_oracle_1d", tol.clone(), OracleRecord::Quadrature { value: tv, tol: opts.quad_tol })),
                    Some(Tagged::new("hellinger_sq_oracle_1d", tol, Scalar { value: h2 })),
                )
            } else {
                (None, None)
            };
            (lower, oracle, h2)
        }
        Pair::Many(f, g) => {
            let seed = opts.direction_seed();
            let d = tv_lower_nd_detailed(f, g, seed, &opts.grid)?;
            let lower = Tagged::new("tv_lower_nd", json!({ "seed": seed, "grid": grid_json }), LowerRecord::from_nd(&d));
            let oracle = if opts.oracle {
                let seed = opts.mc_seed();
                let est = tv_oracle_nd(f, g, opts.mc_samples, seed)?;
                Some(Tagged::new(
                    "tv_oracle_nd",
                    json!({ "n": opts.mc_samples, "seed": seed, "workers": 1 }),
                    OracleRecord::MonteCarlo {
                        value: est.value,
                        stderr: est.stderr,
                        n_samples: est.n_samples,
                        seed: est.seed,
                    },
                ))
            } else {
                None
            };
            (lower, oracle, None)
        }
    };
    let upper = Tagged::new("tv_upper_bound", json!({}), tv_upper_bound(&fnd, &gnd)?);
    let moment = Tagged::new(
        "moment_distance",
        json!({ "orders": [1, 2, 3] }),
        MomentRecord {
            value: moment_distance(&fnd, &gnd)?,
            per_order: moment_gaps(&fnd, &gnd),
        },
    );
    let sandwich = Sandwich::new(lower.result.best.value, oracle.as_ref().map(|o| &o.result), upper.result.value);
    Ok(PairRecord {
        label,
        d: pair.dim(),
        lower,
        upper,
        oracle,
        hellinger_sq,
        moment_distance: moment,
        sandwich,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tvgap::Mixture1D;

    #[test]
    fn sandwich_verdicts() {
        let q = OracleRecord::Quadrature { value: 0.5, tol: 1e-10 };
        assert!(Sandwich::new(0.1, Some(&q), 0.6).pass);
        assert!(!Sandwich::new(0.6, Some(&q), 0.7).pass);
        assert!(!Sandwich::new(0.1, Some(&q), 0.4).pass);
        let s = Sandwich::new(0.1, None, 0.4);
        assert!(s.pass && s.lower_le_oracle.is_none());
        let mc = OracleRecord::MonteCarlo { value: 0.5, stderr: 0.01, n_samples: 10_000, seed: 0 };
        assert!(Sandwich::new(0.52, Some(&mc), 0.6).pass);
    }

    #[test]
    fn evaluates_eq2_pair() {
        let f = Mixture1D::new(0.1, -0.1, 1.0).unwrap();
        let g = Mixture1D::new(0.2, -0.2, 1.0).unwrap();
        let r = evaluate_pair(Some("eq2".into()), &Pair::One(f, g), &EvalOptions::new(0)).unwrap();
        assert!(r.sandwich.pass);
        assert_eq!(r.lower.result.closed_form.as_ref().unwrap().source, BoundSource::Case1Contained);
        assert!((r.moment_distance.result.value - 9e-4).abs() < 1e-15);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["lower"]["operation"], "tv_lower_1d");
        assert_eq!(json["oracle"]["method"], "quadrature");
    }
}
