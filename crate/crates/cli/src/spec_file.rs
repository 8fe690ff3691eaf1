//! Mixture-pair input files.
//!
//! A pair file is a JSON document:
//!
//! ```json
//! {
//!   "label": "eq2 u=0.1",
//!   "d": 1,
//!   "mixture_a": { "mu0": [0.1], "mu1": [-0.1] },
//!   "mixture_b": { "mu0": [0.2], "mu1": [-0.2] },
//!   "sigma": 1.0
//! }
//! ```
//!
//! `sigma` is a `d×d` covariance matrix. When `d = 1` it may instead be a
//! single number, read as the standard deviation.

use serde::{Deserialize, Serialize};
use tvgap::{Mixture1D, MixtureND, SpdMatrix};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeansSpec {
    pub mu0: Vec<f64>,
    pub mu1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaSpec {
    /// Standard deviation, only for `d = 1`.
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub d: usize,
    pub mixture_a: MeansSpec,
    pub mixture_b: MeansSpec,
    pub sigma: SigmaSpec,
}

/// A validated pair, in one or d dimensions.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Pair {
    One(Mixture1D, Mixture1D),
    Many(MixtureND, MixtureND),
}

impl Pair {
    pub fn dim(&self) -> usize {
        match self {
            Pair::One(..) => 1,
            Pair::Many(f, _) => f.dim(),
        }
    }

    /// Both mixtures as d-dimensional mixtures (d = 1 included).
    pub fn as_nd(&self) -> (MixtureND, MixtureND) {
        match self {
            Pair::One(f, g) => (MixtureND::from_1d(f), MixtureND::from_1d(g)),
            Pair::Many(f, g) => (f.clone(), g.clone()),
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{field}: {msg}"))
}

impl PairSpecFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Input(format!("parse error at line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn one_dimensional(label: Option<String>, a: (f64, f64), b: (f64, f64), sigma: f64) -> Self {
        Self {
            label,
            d: 1,
            mixture_a: MeansSpec { mu0: vec![a.0], mu1: vec![a.1] },
            mixture_b: MeansSpec { mu0: vec![b.0], mu1: vec![b.1] },
            sigma: SigmaSpec::Scalar(sigma),
        }
    }

    /// Checks lengths, finiteness and positive definiteness.
    pub fn validate(&self) -> Result<Pair, CliError> {
        let d = self.d;
        if d == 0 {
            return Err(invalid("d", "must be at least 1"));
        }
        for (name, v) in [
            ("mixture_a.mu0", &self.mixture_a.mu0),
            ("mixture_a.mu1", &self.mixture_a.mu1),
            ("mixture_b.mu0", &self.mixture_b.mu0),
            ("mixture_b.mu1", &self.mixture_b.mu1),
        ] {
            if v.len() != d {
                return Err(invalid(name, format!("expected {d} values, found {}", v.len())));
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(invalid(name, format!("entry {i} is not finite")));
            }
        }
        match &self.sigma {
            SigmaSpec::Scalar(s) => {
                if d != 1 {
                    return Err(invalid("sigma", format!("a scalar is only allowed when d = 1, but d = {d}")));
                }
                let mk = |m: &MeansSpec| Mixture1D::new(m.mu0[0], m.mu1[0], *s).map_err(|e| invalid("sigma", e));
                Ok(Pair::One(mk(&self.mixture_a)?, mk(&self.mixture_b)?))
            }
            SigmaSpec::Matrix(rows) => {
                if rows.len() != d {
                    return Err(invalid("sigma", format!("expected {d} rows, found {}", rows.len())));
                }
                if let Some(i) = rows.iter().position(|r| r.len() != d) {
                    return Err(invalid(&format!("sigma[{i}]"), format!("expected {d} values, found {}", rows[i].len())));
                }
                let s = SpdMatrix::from_rows(rows).map_err(|e| invalid("sigma", e))?;
                if d == 1 {
                    let sd = rows[0][0].sqrt();
                    let mk = |m: &MeansSpec| Mixture1D::new(m.mu0[0], m.mu1[0], sd).map_err(|e| invalid("sigma", e));
                    return Ok(Pair::One(mk(&self.mixture_a)?, mk(&self.mixture_b)?));
                }
                let mk = |name: &str, m: &MeansSpec| {
                    MixtureND::new(m.mu0.clone(), m.mu1.clone(), s.clone()).map_err(|e| invalid(name, e))
                };
                Ok(Pair::Many(mk("mixture_a", &self.mixture_a)?, mk("mixture_b", &self.mixture_b)?))
            }
        }
    }
}
