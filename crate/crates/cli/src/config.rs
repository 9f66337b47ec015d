//! Run configuration: a TOML file, overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bpdirac::basis::{BasisKind, BasisSpec, NuclearModel};
use bpdirac::dirac::AngularKappa;
use bpdirac::twophoton::{MultipoleChannel, Restriction};
use bpdirac::{preset, PrecisionCtx};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Table,
}

/// `all`, `pos` or `neg`; absent means every restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RestrictionArg {
    All,
    Pos,
    Neg,
}

impl From<RestrictionArg> for Restriction {
    fn from(r: RestrictionArg) -> Self {
        match r {
            RestrictionArg::All => Restriction::All,
            RestrictionArg::Pos => Restriction::PositiveOnly,
            RestrictionArg::Neg => Restriction::NegativeOnly,
        }
    }
}

/// `point` or `uniform:R_N` with R_N in bohr.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Nuclear {
    Point,
    Uniform(f64),
}

impl Nuclear {
    pub fn model(self, z: f64) -> NuclearModel {
        match self {
            Nuclear::Point => NuclearModel::point(z),
            Nuclear::Uniform(r) => NuclearModel::uniform(z, r),
        }
    }
}

impl FromStr for Nuclear {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "point" {
            return Ok(Nuclear::Point);
        }
        let r = s
            .strip_prefix("uniform:")
            .and_then(|r| r.parse::<f64>().ok())
            .filter(|r| *r > 0.0 && r.is_finite())
            .ok_or_else(|| format!("nuclear model {s:?}: expected `point` or `uniform:R_N` with R_N > 0"))?;
        Ok(Nuclear::Uniform(r))
    }
}

impl TryFrom<String> for Nuclear {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl fmt::Display for Nuclear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nuclear::Point => f.write_str("point"),
            Nuclear::Uniform(r) => write!(f, "uniform:{r}"),
        }
    }
}

impl From<Nuclear> for String {
    fn from(n: Nuclear) -> String {
        n.to_string()
    }
}

/// A bound level `(κ, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Level {
    pub kappa: i32,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// Basis sizes (number of functions); empty means the configured size.
    pub sizes: Vec<usize>,
    pub radii: Vec<f64>,
    pub digits: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    /// Treat spectrum warnings as numerical failures.
    pub strict: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            out: None,
            cache_dir: None,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub z: Vec<f64>,
    pub basis: BasisKind,
    /// Polynomial degree (bpoly) or spline order (bspline).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub nuclear: Nuclear,
    pub digits: u32,
    pub channels: Vec<MultipoleChannel>,
    pub quad_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restriction: Option<RestrictionArg>,
    /// κ values reported by `spectrum`.
    pub kappas: Vec<i32>,
    pub max_n: u32,
    pub initial: Level,
    #[serde(rename = "final")]
    pub final_level: Level,
    pub scan: ScanConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            z: vec![1.0, 40.0, 92.0],
            basis: BasisKind::BPolynomial,
            order: None,
            count: None,
            radius: None,
            nuclear: Nuclear::Point,
            digits: 34,
            channels: preset::channels(),
            quad_points: 15,
            restriction: None,
            kappas: vec![-1],
            max_n: 4,
            initial: Level { kappa: -1, n: 2 },
            final_level: Level { kappa: -1, n: 1 },
            scan: ScanConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn ctx(&self) -> Result<PrecisionCtx, CliError> {
        PrecisionCtx::new(self.digits).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Rejects inconsistent combinations before any computation starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.z.is_empty() {
            return bad("at least one Z is required".into());
        }
        if let Some(z) = self.z.iter().find(|z| !(**z >= 0.0 && z.is_finite())) {
            return bad(format!("Z must be a nonnegative number, got {z}"));
        }
        self.ctx()?;
        for &d in &self.scan.digits {
            PrecisionCtx::new(d).map_err(|e| CliError::Config(format!("scan.digits: {e}")))?;
        }
        if self.channels.is_empty() {
            return bad("at least one channel is required".into());
        }
        if self.quad_points == 0 {
            return bad("quad_points must be positive".into());
        }
        for &k in self.kappas.iter().chain([&self.initial.kappa, &self.final_level.kappa]) {
            AngularKappa::new(k).map_err(|_| CliError::Config("kappa must be nonzero".into()))?;
        }
        if self.basis == BasisKind::BPolynomial {
            if let (Some(o), Some(c)) = (self.order, self.count) {
                if c != o + 1 {
                    return bad(format!("bpoly of degree {o} has {} functions, not {c}; give one of --order/--count", o + 1));
                }
            }
        }
        for &z in &self.z {
            self.basis_for(z)?;
            self.nuclear
                .model(z)
                .validate(self.radius_for(z))
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn radius_for(&self, z: f64) -> f64 {
        self.radius.unwrap_or(match self.basis {
            BasisKind::BPolynomial => preset::cavity_radius(z),
            BasisKind::BSpline => preset::bspline().radius,
        })
    }

    /// Number of basis functions before any scan override.
    pub fn size(&self) -> usize {
        match self.basis {
            BasisKind::BPolynomial => self.order.map(|o| o + 1).or(self.count).unwrap_or(preset::BPOLY_DEGREE + 1),
            BasisKind::BSpline => self.count.unwrap_or(preset::bspline().count),
        }
    }

    pub fn basis_for(&self, z: f64) -> Result<BasisSpec, CliError> {
        self.basis_with(self.size(), self.radius_for(z))
    }

    pub fn basis_with(&self, size: usize, radius: f64) -> Result<BasisSpec, CliError> {
        let spec = match self.basis {
            BasisKind::BPolynomial => {
                if size == 0 {
                    return Err(CliError::Config("basis size must be positive".into()));
                }
                BasisSpec::bpoly(size - 1, radius)
            }
            BasisKind::BSpline => BasisSpec::bspline(self.order.unwrap_or(preset::bspline().order), size, radius),
        };
        spec.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn restrictions(&self) -> Vec<Restriction> {
        match self.restriction {
            Some(r) => vec![r.into()],
            None => Restriction::ALL.to_vec(),
        }
    }
}
