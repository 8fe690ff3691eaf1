//! One CSV row per grid value of a worked-example family.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use tvgap::BoundSource;

use crate::commands::paper::{eq2_pair, eq3_pair, highdim_pair, EQ3_U, HIGHDIM_D, HIGHDIM_MC_SAMPLES};
use crate::error::CliError;
use crate::report::{evaluate_pair, EvalOptions, OracleRecord, PairRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanFamily {
    /// `±u` against `±2u`, σ = 1; the parameter is `u`.
    Eq2,
    /// `±0.5` against `±(0.5+ε)`, σ = 1; the parameter is `ε`.
    Eq3,
    /// `±u·e₁` against `±2u·e₁` in three dimensions, Σ = I; the parameter is `‖u‖`.
    Highdim,
}

impl ScanFamily {
    pub fn name(self) -> &'static str {
        match self {
            ScanFamily::Eq2 => "eq2",
            ScanFamily::Eq3 => "eq3",
            ScanFamily::Highdim => "highdim",
        }
    }
}

impl FromStr for ScanFamily {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "eq2" => Ok(ScanFamily::Eq2),
            "eq3" => Ok(ScanFamily::Eq3),
            "highdim" => Ok(ScanFamily::Highdim),
            other => Err(CliError::Input(format!("unknown family `{other}` (expected eq2, eq3 or highdim)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub family: &'static str,
    pub param: f64,
    pub closed_form_lower: Option<f64>,
    pub closed_form_source: Option<&'static str>,
    pub numeric_char_lower: Option<f64>,
    pub lower: f64,
    pub oracle: Option<f64>,
    pub oracle_stderr: Option<f64>,
    pub upper: f64,
    pub moment_distance: f64,
}

impl ScanRow {
    fn from_record(family: ScanFamily, param: f64, r: &PairRecord) -> Self {
        let lower = &r.lower.result;
        let (oracle, oracle_stderr) = match r.oracle.as_ref().map(|o| o.result) {
            Some(OracleRecord::Quadrature { value, .. }) => (Some(value), None),
            Some(OracleRecord::MonteCarlo { value, stderr, .. }) => (Some(value), Some(stderr)),
            None => (None, None),
        };
        Self {
            family: family.name(),
            param,
            closed_form_lower: lower.closed_form.as_ref().map(|b| b.value),
            closed_form_source: lower.closed_form.as_ref().map(|b| b.source.name()),
            numeric_char_lower: lower.branches.iter().find(|b| b.source == BoundSource::CharNumeric).map(|b| b.value),
            lower: lower.best.value,
            oracle,
            oracle_stderr,
            upper: r.upper.result.value,
            moment_distance: r.moment_distance.result.value,
        }
    }
}

/// Parses a comma-separated list of positive finite numbers; empty input is an empty grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let v: f64 = p.parse().map_err(|_| CliError::Input(format!("grid value `{p}` is not a number")))?;
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(CliError::Input(format!("grid value `{p}` must be positive and finite")))
            }
        })
        .collect()
}

pub fn rows(family: ScanFamily, grid: &[f64], seed: u64) -> Result<Vec<ScanRow>, CliError> {
    let mut opts = EvalOptions::new(seed);
    if family == ScanFamily::Highdim {
        opts.mc_samples = HIGHDIM_MC_SAMPLES;
    }
    grid.par_iter()
        .map(|&p| {
            let pair = match family {
                ScanFamily::Eq2 => eq2_pair(p),
                ScanFamily::Eq3 => eq3_pair(EQ3_U, p),
                ScanFamily::Highdim => highdim_pair(HIGHDIM_D, p),
            };
            let record = evaluate_pair(None, &pair, &opts)?;
            Ok(ScanRow::from_record(family, p, &record))
        })
        .collect()
}

pub const HEADER: [&str; 10] = [
    "family",
    "param",
    "closed_form_lower",
    "closed_form_source",
    "numeric_char_lower",
    "lower",
    "oracle",
    "oracle_stderr",
    "upper",
    "moment_distance",
];

/// Writes the header and rows. A closed output pipe ends the table quietly.
pub fn write_csv<W: Write>(out: W, rows: &[ScanRow]) -> Result<(), CliError> {
    fn write<W: Write>(out: W, rows: &[ScanRow]) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(HEADER)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
    match write(out, rows) {
        Err(e) if !matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) => {
            Err(CliError::Invariant(format!("writing CSV: {e}")))
        }
        _ => Ok(()),
    }
}

pub fn run<W: Write>(out: W, family: ScanFamily, grid: &[f64], seed: u64) -> Result<(), CliError> {
    write_csv(out, &rows(family, grid, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_of(family: ScanFamily, grid: &[f64]) -> String {
        let mut buf = Vec::new();
        run(&mut buf, family, grid, 0).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_grid_is_header_only() {
        assert_eq!(csv_of(ScanFamily::Eq2, &[]), format!("{}\n", HEADER.join(",")));
        assert!(parse_grid("").unwrap().is_empty());
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.1, 0.2,0.4").unwrap(), vec![0.1, 0.2, 0.4]);
        assert!(parse_grid("0.1,abc").is_err());
        assert!(parse_grid("-1").is_err());
        assert!("eq4".parse::<ScanFamily>().is_err());
    }

    #[test]
    fn eq2_rows_in_grid_order() {
        let rows = rows(ScanFamily::Eq2, &[0.2, 0.1], 0).unwrap();
        assert_eq!(rows.iter().map(|r| r.param).collect::<Vec<_>>(), vec![0.2, 0.1]);
        for r in &rows {
            assert_eq!(r.closed_form_source, Some("case1_contained"));
            assert!(r.lower <= r.oracle.unwrap() && r.oracle.unwrap() <= r.upper);
            // constant-factor gap between the bound and the truth
            assert!(r.lower / r.oracle.unwrap() > 1e-3);
        }
        let text = csv_of(ScanFamily::Eq2, &[0.1]);
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("eq2,0.1,"));
    }
}
