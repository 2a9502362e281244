use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{DirectSumZ, FiniteGroup, FreeAbelian};
use crate::odometer::{ActionKind, GammaAction, ProductMeasure};
use crate::rational::{parse_q, Q};

/// Which group to use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GroupKind {
    Cyclic { order: usize },
    Symmetric { degree: usize },
    Dihedral { n: usize },
    /// Multiplication table in CSV, header `*,a,b,...`.
    FiniteTable { path: PathBuf },
    FreeAbelian { rank: usize },
    DirectSumZ,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    #[serde(flatten)]
    pub kind: GroupKind,
    /// The generating set `H`, as element labels.
    pub generators: Vec<String>,
    /// Neighborhood base of a finite group, outermost first.
    #[serde(default)]
    pub base: Option<Vec<Vec<String>>>,
}

/// A built group model; see [`with_group!`](crate::with_group) to dispatch
/// generic code on it.
#[derive(Clone, Debug)]
pub enum AnyGroup {
    Finite(FiniteGroup),
    FreeAbelian(FreeAbelian),
    DirectSum(DirectSumZ),
}

impl GroupSpec {
    pub fn build(&self) -> Result<AnyGroup> {
        let finite = match &self.kind {
            GroupKind::Cyclic { order } if *order >= 1 => FiniteGroup::cyclic(*order),
            GroupKind::Symmetric { degree } if (1..=6).contains(degree) => FiniteGroup::symmetric(*degree),
            GroupKind::Dihedral { n } if *n >= 2 => FiniteGroup::dihedral(*n),
            GroupKind::FiniteTable { path } => {
                let name = path.file_stem().map_or("table".into(), |s| s.to_string_lossy().into_owned());
                FiniteGroup::from_csv(&name, std::fs::File::open(path)?)?
            }
            GroupKind::FreeAbelian { rank } if *rank >= 1 => {
                return Ok(AnyGroup::FreeAbelian(FreeAbelian::new(*rank)))
            }
            GroupKind::DirectSumZ => return Ok(AnyGroup::DirectSum(DirectSumZ)),
            other => return Err(Error::Config(format!("unsupported group parameters: {other:?}"))),
        };
        let finite = match &self.base {
            Some(sets) => {
                let sets: Vec<Vec<&str>> = sets.iter().map(|s| s.iter().map(|x| x.as_str()).collect()).collect();
                finite.with_base(&sets)?
            }
            None => finite,
        };
        Ok(AnyGroup::Finite(finite))
    }
}

/// Runs a block with `$g` bound to the concrete group inside an
/// [`AnyGroup`](crate::driver::AnyGroup).
#[macro_export]
macro_rules! with_group {
    ($any:expr, $g:ident => $body:expr) => {
        match $any {
            $crate::driver::AnyGroup::Finite($g) => $body,
            $crate::driver::AnyGroup::FreeAbelian($g) => $body,
            $crate::driver::AnyGroup::DirectSum($g) => $body,
        }
    };
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MeasureSpec {
    Uniform,
    /// `P(x_i = 0)` for the coordinates of one period.
    Periodic { weights: Vec<String> },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<ProductMeasure> {
        match self {
            MeasureSpec::Uniform => Ok(ProductMeasure::uniform()),
            MeasureSpec::Periodic { weights } => {
                let w = weights.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>()?;
                ProductMeasure::periodic(&w)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    #[serde(flatten)]
    pub kind: ActionKind,
    #[serde(default = "default_truncation")]
    pub truncation: u32,
}

fn default_truncation() -> u32 {
    24
}

impl ActionSpec {
    pub fn build(&self) -> Result<GammaAction> {
        GammaAction::new(self.kind.clone(), self.truncation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Finite symmetric generating set.
    Finite,
    /// Generator stream, round `n` using the first `n` generators.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunSpec {
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// `ε_1`.
    #[serde(default = "default_eps")]
    pub eps: String,
    #[serde(default = "default_depth")]
    pub max_depth: u32,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Sets in the schedule are unions of cylinders of this depth.
    #[serde(default = "default_ring")]
    pub ring_depth: u32,
    #[serde(default = "default_one")]
    pub neighborhoods: usize,
    /// Vertices of the skew graphs are `{0,1}^resolution × G`.
    #[serde(default = "default_one_u32")]
    pub resolution: u32,
    /// Sets for the closing essential-value reports.
    #[serde(default = "default_ring")]
    pub report_ring_depth: u32,
}

fn default_rounds() -> usize {
    3
}
fn default_eps() -> String {
    "1/4".into()
}
fn default_depth() -> u32 {
    20
}
fn default_mode() -> Mode {
    Mode::Finite
}
fn default_ring() -> u32 {
    1
}
fn default_one() -> usize {
    1
}
fn default_one_u32() -> u32 {
    1
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            rounds: default_rounds(),
            eps: default_eps(),
            max_depth: default_depth(),
            mode: default_mode(),
            ring_depth: default_ring(),
            neighborhoods: 1,
            resolution: 1,
            report_ring_depth: default_ring(),
        }
    }
}

/// Everything a pipeline run needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    #[serde(default)]
    pub name: String,
    pub group: GroupSpec,
    pub measure: MeasureSpec,
    pub action: ActionSpec,
    #[serde(default)]
    pub run: RunSpec,
}

impl PipelineConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let c: PipelineConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut c = Self::from_toml(&text)?;
        // table paths are relative to the config file
        if let GroupKind::FiniteTable { path: p } = &mut c.group.kind {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn eps(&self) -> Result<Q> {
        parse_q(&self.run.eps)
    }

    fn check(&self) -> Result<()> {
        let eps = self.eps()?;
        if eps <= crate::rational::zero() || eps >= crate::rational::one() {
            return Err(Error::Config("run.eps must lie in (0, 1)".into()));
        }
        if self.group.generators.is_empty() {
            return Err(Error::Config("group.generators must not be empty".into()));
        }
        if self.run.ring_depth > 3 || self.run.report_ring_depth > 3 {
            return Err(Error::Config("ring depths above 3 are not enumerated".into()));
        }
        if self.run.max_depth > 24 {
            return Err(Error::Config("run.max_depth above 24 is not supported".into()));
        }
        if self.run.resolution == 0 || self.run.resolution > 6 {
            return Err(Error::Config("run.resolution must lie in 1..=6".into()));
        }
        if self.run.mode == Mode::Infinite && !matches!(self.action.kind, ActionKind::Involutions { .. }) {
            return Err(Error::Config("infinite mode needs the involutions action".into()));
        }
        Ok(())
    }
}
