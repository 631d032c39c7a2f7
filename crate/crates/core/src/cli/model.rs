//! Configuration specs accepted on the command line and the models they build.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::configurations::{
    checkered_design, logistic_config, logistic_lattice_basis, no_three_factor_config,
    no_three_factor_lattice_basis, Configuration, Design, LiftStyle,
};
use crate::intkernel::{kernel_lattice_basis, LatticeBasis};
use crate::textfmt;
use crate::{Error, Result};

/// Where a logistic design comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DesignSource {
    /// `checkeredAxB` or `checkeredAxBxC`: checkered `A x B`, optionally
    /// crossed with `C` levels of a third covariate.
    Checkered { i2: usize, i3: usize, extra: Option<usize> },
    File(PathBuf),
}

impl DesignSource {
    pub fn load(&self) -> Result<Design> {
        match self {
            DesignSource::Checkered { i2, i3, extra } => checkered_design(*i2, *i3, *extra),
            DesignSource::File(p) => textfmt::parse_design(&std::fs::read_to_string(p)?),
        }
    }
}

impl fmt::Display for DesignSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignSource::Checkered { i2, i3, extra: None } => write!(f, "checkered{i2}x{i3}"),
            DesignSource::Checkered { i2, i3, extra: Some(e) } => write!(f, "checkered{i2}x{i3}x{e}"),
            DesignSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

fn parse_checkered(s: &str) -> Option<DesignSource> {
    let dims: Vec<usize> = s
        .strip_prefix("checkered")?
        .split('x')
        .map(|d| d.parse().ok())
        .collect::<Option<_>>()?;
    match dims[..] {
        [i2, i3] => Some(DesignSource::Checkered { i2, i3, extra: None }),
        [i2, i3, e] => Some(DesignSource::Checkered { i2, i3, extra: Some(e) }),
        _ => None,
    }
}

/// A model named on the command line.
///
/// - `no3f:I1,I2,I3`: no-three-factor interaction, tested against the
///   saturated model.
/// - `logistic:binomial|trinomial,DESIGN,Q`: logistic regression whose null
///   model uses the first `Q` covariate axes of the design, tested against
///   the model adding axis `Q + 1` (or the saturated model when the design
///   has no further axis). `DESIGN` is `checkeredAxB[xC]` or a design file.
/// - `matrix:PATH` or a bare path: a configuration matrix file, tested
///   against the saturated model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigSpec {
    NoThreeFactor([usize; 3]),
    Logistic {
        responses: usize,
        design: DesignSource,
        covariates: usize,
    },
    Matrix(PathBuf),
}

impl FromStr for ConfigSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::invalid(format!("configuration `{s}`: {why}"));
        if let Some(rest) = s.strip_prefix("no3f:") {
            let dims: Vec<usize> = rest
                .split(',')
                .map(|d| d.trim().parse().map_err(|_| bad("sizes must be integers")))
                .collect::<Result<_>>()?;
            let [a, b, c] = dims[..] else {
                return Err(bad("expected three sizes"));
            };
            return Ok(ConfigSpec::NoThreeFactor([a, b, c]));
        }
        if let Some(rest) = s.strip_prefix("logistic:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            let [kind, design, q] = parts[..] else {
                return Err(bad("expected `binomial|trinomial,DESIGN,Q`"));
            };
            let responses = match kind {
                "binomial" => 2,
                "trinomial" => 3,
                _ => return Err(bad("response kind must be binomial or trinomial")),
            };
            let design = parse_checkered(design).unwrap_or_else(|| DesignSource::File(design.into()));
            let covariates = q.parse().map_err(|_| bad("covariate count must be an integer"))?;
            return Ok(ConfigSpec::Logistic {
                responses,
                design,
                covariates,
            });
        }
        let path = s.strip_prefix("matrix:").unwrap_or(s);
        if path.is_empty() {
            return Err(bad("empty path"));
        }
        Ok(ConfigSpec::Matrix(path.into()))
    }
}

impl fmt::Display for ConfigSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigSpec::NoThreeFactor([a, b, c]) => write!(f, "no3f:{a},{b},{c}"),
            ConfigSpec::Logistic {
                responses,
                design,
                covariates,
            } => {
                let kind = if *responses == 2 { "binomial" } else { "trinomial" };
                write!(f, "logistic:{kind},{design},{covariates}")
            }
            ConfigSpec::Matrix(p) => write!(f, "matrix:{}", p.display()),
        }
    }
}

/// Null configuration, its lattice basis and the alternative (if nested).
#[derive(Clone, Debug)]
pub struct Model {
    pub null: Configuration,
    pub basis: LatticeBasis,
    pub alternative: Option<Configuration>,
}

impl ConfigSpec {
    pub fn build(&self, style: LiftStyle) -> Result<Model> {
        match self {
            ConfigSpec::NoThreeFactor([a, b, c]) => Ok(Model {
                null: no_three_factor_config(*a, *b, *c)?,
                basis: no_three_factor_lattice_basis(*a, *b, *c, style)?,
                alternative: None,
            }),
            ConfigSpec::Logistic {
                responses,
                design,
                covariates,
            } => {
                let design = design.load()?;
                let q = *covariates;
                if q > design.axes() {
                    return Err(Error::invalid(format!(
                        "null model uses {q} covariates but the design has {}",
                        design.axes()
                    )));
                }
                let null_axes: Vec<usize> = (0..q).collect();
                let alternative = if q < design.axes() {
                    let alt_axes: Vec<usize> = (0..=q).collect();
                    Some(logistic_config(&design, &alt_axes, *responses)?)
                } else {
                    None
                };
                Ok(Model {
                    null: logistic_config(&design, &null_axes, *responses)?,
                    basis: logistic_lattice_basis(&design, &null_axes, *responses, style)?,
                    alternative,
                })
            }
            ConfigSpec::Matrix(path) => {
                let m = textfmt::parse_matrix(&std::fs::read_to_string(path)?)?;
                let basis = kernel_lattice_basis(&m)?;
                Ok(Model {
                    null: Configuration::from_matrix(m, path.display().to_string()),
                    basis,
                    alternative: None,
                })
            }
        }
    }
}
