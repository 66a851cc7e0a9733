//! Run configuration: parsing and validation of everything the command line
//! carries, independent of clap.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sasaki_herm_core::oracle::SphereChart;
use sasaki_herm_core::sasakian::SasakianPointModel;
use serde::Serialize;

/// Grid points closer than this to `stop` still belong to the grid, and grid
/// values are snapped to this resolution.
pub const GRID_EPS: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid factor spec `{0}` (expected round, space-form:<c> or deformed:<alpha>)")]
    FactorSpec(String),
    #[error("invalid grid `{0}` (expected a number or start:stop:step with step > 0 and start <= stop)")]
    Grid(String),
    #[error("{0} must be a single value for this command")]
    NotSingle(&'static str),
    #[error("b grid has no point away from 0")]
    EmptyBGrid,
    #[error("b must be nonzero")]
    ZeroB,
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
    #[error("{0} must be at least 1")]
    ZeroDimension(&'static str),
    #[error("deformation parameter must be positive and finite")]
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyFactor,
    VerifyProduct,
    Einstein,
    Scan,
    OracleCompare,
    Example,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

/// Check evaluated on every scan cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanCheck {
    Einstein,
    Integrability,
    NotKahler,
}

/// A Sasakian factor, written `round`, `space-form:<c>` or `deformed:<alpha>`.
/// `deformed` always starts from the round sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorSpec {
    Round,
    SpaceForm(f64),
    Deformed(f64),
}

impl FactorSpec {
    /// Closed-form model of dimension `2n + 1`.
    pub fn build(self, n: usize) -> sasaki_herm_core::Result<SasakianPointModel> {
        match self {
            FactorSpec::Round => SasakianPointModel::round_sphere(n),
            FactorSpec::SpaceForm(c) => SasakianPointModel::space_form(n, c),
            FactorSpec::Deformed(alpha) => SasakianPointModel::round_sphere(n)?.d_homothetic_deform(alpha),
        }
    }

    /// Stereographic chart realising the factor, if there is one. A space
    /// form with `c > −3` is the sphere deformed by `α = 4/(c + 3)`.
    pub fn chart(self, n: usize) -> Option<SphereChart> {
        let alpha = match self {
            FactorSpec::Round => 1.0,
            FactorSpec::Deformed(alpha) => alpha,
            FactorSpec::SpaceForm(c) if c > -3.0 => 4.0 / (c + 3.0),
            FactorSpec::SpaceForm(_) => return None,
        };
        SphereChart::deformed(n, alpha).ok()
    }
}

impl FromStr for FactorSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ConfigError::FactorSpec(s.to_string());
        let number = |v: &str| v.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(err);
        match s.split_once(':') {
            None if s.trim() == "round" => Ok(FactorSpec::Round),
            Some(("space-form", c)) => Ok(FactorSpec::SpaceForm(number(c)?)),
            Some(("deformed", a)) => {
                let alpha = number(a)?;
                if alpha > 0.0 {
                    Ok(FactorSpec::Deformed(alpha))
                } else {
                    Err(ConfigError::Alpha)
                }
            }
            _ => Err(err()),
        }
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorSpec::Round => write!(f, "round"),
            FactorSpec::SpaceForm(c) => write!(f, "space-form:{c}"),
            FactorSpec::Deformed(a) => write!(f, "deformed:{a}"),
        }
    }
}

impl Serialize for FactorSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A single value or an inclusive `start:stop:step` range.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    text: String,
    values: Vec<f64>,
}

impl GridSpec {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn single(&self) -> Option<f64> {
        match self.values.as_slice() {
            [v] => Some(*v),
            _ => None,
        }
    }
}

fn snap(v: f64) -> f64 {
    let s = (v / GRID_EPS).round() * GRID_EPS;
    // Avoid printing -0.
    if s == 0.0 {
        0.0
    } else {
        s
    }
}

impl FromStr for GridSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ConfigError::Grid(s.to_string());
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(err))
            .collect::<Result<_, _>>()?;
        let values = match parts.as_slice() {
            [v] => vec![*v],
            [start, stop, step] => {
                if !(*step > 0.0) || start > stop {
                    return Err(err());
                }
                let count = ((stop - start) / step + GRID_EPS / step).floor() as usize + 1;
                (0..count).map(|i| snap(start + i as f64 * step)).collect()
            }
            _ => return Err(err()),
        };
        Ok(GridSpec {
            text: s.to_string(),
            values,
        })
    }
}

impl Serialize for GridSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub p: usize,
    pub q: usize,
    pub a: GridSpec,
    pub b: GridSpec,
    pub factor: FactorSpec,
    pub factor_prime: FactorSpec,
    #[serde(serialize_with = "crate::report::serialize_float")]
    pub tol_algebraic: f64,
    #[serde(serialize_with = "crate::report::serialize_float")]
    pub tol_fd: f64,
    pub seed: u64,
    pub samples: usize,
    pub check: ScanCheck,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub timing: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.p == 0 {
            return Err(ConfigError::ZeroDimension("p"));
        }
        if self.q == 0 {
            return Err(ConfigError::ZeroDimension("q"));
        }
        for (name, t) in [("tol-algebraic", self.tol_algebraic), ("tol-fd", self.tol_fd)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError::NonPositive(name));
            }
        }
        if self.command == Command::Scan {
            if self.b_values().is_empty() {
                return Err(ConfigError::EmptyBGrid);
            }
        } else {
            self.a.single().ok_or(ConfigError::NotSingle("a"))?;
            let b = self.b.single().ok_or(ConfigError::NotSingle("b"))?;
            if b.abs() <= GRID_EPS && !matches!(self.command, Command::VerifyFactor | Command::Example) {
                return Err(ConfigError::ZeroB);
            }
        }
        Ok(())
    }

    /// b values of the grid with the points at 0 removed.
    pub fn b_values(&self) -> Vec<f64> {
        self.b.values().iter().copied().filter(|b| b.abs() > GRID_EPS).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(s: &str) -> Vec<f64> {
        s.parse::<GridSpec>().unwrap().values().to_vec()
    }

    #[test]
    fn grid_is_inclusive_when_stop_is_reachable() {
        assert_eq!(grid("-1:1:0.5"), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(grid("0.5:2:0.5"), vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(grid("0:0.3:0.1").len(), 4);
        assert_eq!(grid("0:1:0.3"), vec![0.0, 0.3, 0.6, 0.9]);
        assert_eq!(grid("2"), vec![2.0]);
        assert_eq!(grid("1:1:0.5"), vec![1.0]);
    }

    #[test]
    fn bad_grids_are_rejected() {
        for s in ["", "1:2", "1:0:0.5", "0:1:0", "0:1:-1", "a:b:c", "0:1:inf"] {
            assert!(s.parse::<GridSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn factor_specs() {
        assert_eq!("round".parse::<FactorSpec>().unwrap(), FactorSpec::Round);
        assert_eq!("space-form:5".parse::<FactorSpec>().unwrap(), FactorSpec::SpaceForm(5.0));
        assert_eq!("deformed:0.5".parse::<FactorSpec>().unwrap(), FactorSpec::Deformed(0.5));
        assert_eq!("deformed:0".parse::<FactorSpec>(), Err(ConfigError::Alpha));
        assert!("sphere".parse::<FactorSpec>().is_err());
        assert!("space-form:".parse::<FactorSpec>().is_err());
        assert_eq!(FactorSpec::SpaceForm(-1.5).to_string(), "space-form:-1.5");
    }

    #[test]
    fn space_form_chart_uses_matching_deformation() {
        let chart = FactorSpec::SpaceForm(5.0).chart(1).unwrap();
        assert!((chart.phi_sectional_curvature() - 5.0).abs() < 1e-12);
        assert!(FactorSpec::SpaceForm(-3.0).chart(1).is_none());
    }
}
