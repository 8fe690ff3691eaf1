use std::path::Path;

use crate::error::CliError;
use crate::report::{evaluate_pair, EvalOptions, PairRecord, Report, Verdict};
use crate::spec_file::PairSpecFile;

/// Bounds and oracles for the pair in `input`. A failed sandwich is reported
/// in the verdict rather than as an error, so the report is still written.
pub fn run(input: &Path, opts: &EvalOptions) -> Result<Report<PairRecord>, CliError> {
    let spec = PairSpecFile::read(input)?;
    let pair = spec.validate()?;
    let record = evaluate_pair(spec.label.clone(), &pair, opts)?;
    let s = &record.sandwich;
    let mut violations = Vec::new();
    if s.lower_le_oracle == Some(false) {
        violations.push(format!("lower bound {} exceeds oracle {:?} by more than {}", s.lower, s.oracle, s.tolerance));
    }
    if s.oracle_le_upper == Some(false) {
        violations.push(format!("oracle {:?} exceeds upper bound {} by more than {}", s.oracle, s.upper, s.tolerance));
    }
    if !s.lower_le_upper {
        violations.push(format!("lower bound {} exceeds upper bound {}", s.lower, s.upper));
    }
    Ok(Report::new("bound", opts.seed, record, Verdict::from_violations(violations)))
}
