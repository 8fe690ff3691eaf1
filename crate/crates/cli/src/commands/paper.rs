//! Reproduces the worked examples: the symmetric `±u` vs `±2u` family, the
//! `±u` vs `±(u+ε)` family, the three-dimensional `±u` vs `±2u` instance and
//! the large-gap instance.

use serde::Serialize;
use tvgap::{BoundSource, Mixture1D, MixtureND, SpdMatrix};

use crate::error::CliError;
use crate::report::{evaluate_pair, EvalOptions, PairRecord, Report, Verdict};
use crate::spec_file::Pair;

pub const EQ2_U: [f64; 3] = [0.05, 0.1, 0.2];
pub const EQ3_U: f64 = 0.5;
pub const EQ3_EPS: [f64; 3] = [0.04, 0.02, 0.01];
pub const HIGHDIM_NORMS: [f64; 2] = [0.1, 0.2];
pub const HIGHDIM_D: usize = 3;
pub const HIGHDIM_MC_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyRow {
    pub param: f64,
    pub record: PairRecord,
}

impl FamilyRow {
    pub fn lower(&self) -> f64 {
        self.record.lower.result.best.value
    }

    pub fn closed_form(&self) -> Option<(BoundSource, f64)> {
        self.record.lower.result.closed_form.as_ref().map(|b| (b.source, b.value))
    }

    pub fn oracle(&self) -> f64 {
        self.record.oracle.as_ref().map_or(f64::NAN, |o| o.result.value())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PaperExamples {
    pub eq2: Vec<FamilyRow>,
    /// `closed_form(2u)/closed_form(u)` for consecutive grid values.
    pub eq2_closed_form_ratios: Vec<f64>,
    pub eq2_oracle_ratios: Vec<f64>,
    pub eq3: Vec<FamilyRow>,
    /// `lower(2ε)/lower(ε)`, consecutive grid values.
    pub eq3_lower_ratios: Vec<f64>,
    pub eq3_closed_form_ratios: Vec<f64>,
    /// The ε²-scaling reference doubles to this ratio.
    pub eq3_reference_ratio: f64,
    pub highdim: Vec<FamilyRow>,
    pub highdim_closed_form_ratio: f64,
    pub large_gap: PairRecord,
    pub checks: Vec<Check>,
}

pub fn eq2_pair(u: f64) -> Pair {
    Pair::One(Mixture1D::new(u, -u, 1.0).unwrap(), Mixture1D::new(2.0 * u, -2.0 * u, 1.0).unwrap())
}

pub fn eq3_pair(u: f64, eps: f64) -> Pair {
    Pair::One(Mixture1D::new(u, -u, 1.0).unwrap(), Mixture1D::new(u + eps, -(u + eps), 1.0).unwrap())
}

/// `½𝒩(u, I) + ½𝒩(−u, I)` against `½𝒩(2u, I) + ½𝒩(−2u, I)` with `u = norm·e₁`.
pub fn highdim_pair(d: usize, norm: f64) -> Pair {
    let e = |x: f64| {
        let mut v = vec![0.0; d];
        v[0] = x;
        v
    };
    let id = SpdMatrix::identity(d);
    Pair::Many(
        MixtureND::new(e(norm), e(-norm), id.clone()).unwrap(),
        MixtureND::new(e(2.0 * norm), e(-2.0 * norm), id).unwrap(),
    )
}

pub fn large_gap_pair() -> Pair {
    Pair::One(Mixture1D::new(0.0, 10.0, 1.0).unwrap(), Mixture1D::new(3.0, 13.0, 1.0).unwrap())
}

fn ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.15}")).collect::<Vec<_>>().join(", ")
}

/// `|a − b| ≤ 8 ulp(b)`.
fn machine_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 8.0 * f64::EPSILON * b.abs()
}

pub fn eq2_rows(opts: &EvalOptions) -> Result<Vec<FamilyRow>, CliError> {
    EQ2_U
        .iter()
        .map(|&u| Ok(FamilyRow { param: u, record: evaluate_pair(Some(format!("eq2 u={u}")), &eq2_pair(u), opts)? }))
        .collect()
}

pub fn eq3_rows(opts: &EvalOptions) -> Result<Vec<FamilyRow>, CliError> {
    // ascending ε so that ratios read f(2ε)/f(ε)
    let mut eps = EQ3_EPS.to_vec();
    eps.sort_by(f64::total_cmp);
    eps.iter()
        .map(|&e| {
            let label = format!("eq3 u={EQ3_U} eps={e}");
            Ok(FamilyRow { param: e, record: evaluate_pair(Some(label), &eq3_pair(EQ3_U, e), opts)? })
        })
        .collect()
}

pub fn highdim_rows(opts: &EvalOptions) -> Result<Vec<FamilyRow>, CliError> {
    let opts = EvalOptions { mc_samples: HIGHDIM_MC_SAMPLES, ..opts.clone() };
    HIGHDIM_NORMS
        .iter()
        .map(|&n| {
            let label = format!("highdim d={HIGHDIM_D} |u|={n}");
            Ok(FamilyRow { param: n, record: evaluate_pair(Some(label), &highdim_pair(HIGHDIM_D, n), &opts)? })
        })
        .collect()
}

pub fn eq2_checks(rows: &[FamilyRow]) -> (Vec<f64>, Vec<f64>, Vec<Check>) {
    let cf: Vec<_> = rows.iter().map(|r| r.closed_form()).collect();
    let all_contained = cf.iter().all(|c| matches!(c, Some((BoundSource::Case1Contained, _))));
    let cf_vals: Vec<f64> = cf.iter().map(|c| c.map_or(f64::NAN, |x| x.1)).collect();
    let cf_ratios = ratios(&cf_vals);
    let or_ratios = ratios(&rows.iter().map(FamilyRow::oracle).collect::<Vec<_>>());
    let checks = vec![
        check(
            "eq2_closed_form_is_case1_contained",
            all_contained,
            format!("winning closed-form branches: {:?}", cf.iter().map(|c| c.map(|x| x.0.name())).collect::<Vec<_>>()),
        ),
        check(
            "eq2_closed_form_doubling_ratio_is_4",
            cf_ratios.iter().all(|&r| machine_equal(r, 4.0)),
            format!("ratios [{}]", fmt_list(&cf_ratios)),
        ),
        check(
            "eq2_oracle_doubling_ratio_in_3.5_4.5",
            or_ratios.iter().all(|r| (3.5..=4.5).contains(r)),
            format!("ratios [{}]", fmt_list(&or_ratios)),
        ),
        check(
            "eq2_sandwich",
            rows.iter().all(|r| r.record.sandwich.pass),
            format!("lower [{}], oracle [{}]", fmt_list(&rows.iter().map(FamilyRow::lower).collect::<Vec<_>>()), fmt_list(&rows.iter().map(FamilyRow::oracle).collect::<Vec<_>>())),
        ),
    ];
    (cf_ratios, or_ratios, checks)
}

pub fn eq3_checks(rows: &[FamilyRow]) -> (Vec<f64>, Vec<f64>, Vec<Check>) {
    let lower_ratios = ratios(&rows.iter().map(FamilyRow::lower).collect::<Vec<_>>());
    let cf_ratios = ratios(&rows.iter().map(|r| r.closed_form().map_or(f64::NAN, |c| c.1)).collect::<Vec<_>>());
    let checks = vec![
        check(
            "eq3_lower_doubling_ratio_in_1.95_2.05",
            lower_ratios.iter().all(|r| (1.95..=2.05).contains(r)),
            format!("lower-bound ratios [{}]; closed-form ratios [{}]; eps^2 reference 4", fmt_list(&lower_ratios), fmt_list(&cf_ratios)),
        ),
        check("eq3_sandwich", rows.iter().all(|r| r.record.sandwich.pass), String::new()),
    ];
    (lower_ratios, cf_ratios, checks)
}

pub fn highdim_checks(rows: &[FamilyRow]) -> (f64, Vec<Check>) {
    let cf: Vec<_> = rows.iter().map(|r| r.closed_form()).collect();
    let ratio = match (cf[0], cf[1]) {
        (Some((BoundSource::Case1Contained, a)), Some((BoundSource::Case1Contained, b))) => b / a,
        _ => f64::NAN,
    };
    let mut checks = vec![check(
        "highdim_closed_form_doubling_ratio_is_4",
        machine_equal(ratio, 4.0),
        format!("ratio {ratio:.15}"),
    )];
    for r in rows {
        let s = &r.record.sandwich;
        let (mc, se) = match r.record.oracle.as_ref().map(|o| o.result) {
            Some(crate::report::OracleRecord::MonteCarlo { value, stderr, .. }) => (value, stderr),
            _ => (f64::NAN, f64::NAN),
        };
        // lower ≤ MC + 3·stderr ≤ upper
        let pass = s.lower <= mc + 3.0 * se && mc + 3.0 * se <= s.upper;
        checks.push(check(
            "highdim_sandwich",
            pass,
            format!("|u|={}: lower {:.6e} <= mc {:.6e} + 3*{:.2e} <= upper {:.6e}", r.param, s.lower, mc, se, s.upper),
        ));
    }
    (ratio, checks)
}

pub fn large_gap_checks(record: &PairRecord) -> Vec<Check> {
    let case2 = record
        .lower
        .result
        .branches
        .iter()
        .find(|b| b.source == BoundSource::Case2LargeGap)
        .map(|b| b.value);
    let oracle = record.oracle.as_ref().map_or(f64::NAN, |o| o.result.value());
    let lower = record.lower.result.best.value;
    vec![check(
        "large_gap_0.137",
        case2 == Some(0.137) && lower >= 0.137 && oracle >= 0.137,
        format!("case2 branch {case2:?}, overall lower {lower:.6}, oracle {oracle:.6}"),
    )]
}

pub fn moment_check(eq2: &[FamilyRow]) -> Check {
    let row = eq2.iter().find(|r| r.param == 0.1).expect("u = 0.1 in the grid");
    let m = row.record.moment_distance.result.value;
    let expected = 9.0 * 0.1f64.powi(4);
    check("eq2_moment_is_9u4", machine_equal(m, expected), format!("moment {m:e}, 9u^4 = {expected:e}"))
}

pub fn run(seed: u64) -> Result<Report<PaperExamples>, CliError> {
    let opts = EvalOptions::new(seed);
    let eq2 = eq2_rows(&opts)?;
    let (eq2_closed_form_ratios, eq2_oracle_ratios, mut checks) = eq2_checks(&eq2);
    checks.push(moment_check(&eq2));
    let eq3 = eq3_rows(&opts)?;
    let (eq3_lower_ratios, eq3_closed_form_ratios, c) = eq3_checks(&eq3);
    checks.extend(c);
    let highdim = highdim_rows(&opts)?;
    let (highdim_closed_form_ratio, c) = highdim_checks(&highdim);
    checks.extend(c);
    let large_gap = evaluate_pair(Some("large gap".into()), &large_gap_pair(), &opts)?;
    checks.extend(large_gap_checks(&large_gap));
    let violations = checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    let body = PaperExamples {
        eq2,
        eq2_closed_form_ratios,
        eq2_oracle_ratios,
        eq3,
        eq3_lower_ratios,
        eq3_closed_form_ratios,
        eq3_reference_ratio: 4.0,
        highdim,
        highdim_closed_form_ratio,
        large_gap,
        checks,
    };
    Ok(Report::new("paper-examples", seed, body, Verdict::from_violations(violations)))
}
