//! Parsed run configuration shared by all subcommands.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use rumdlab_core::operators::summation_operator;
use rumdlab_core::rumd::{DEFAULT_BUDGET, DEFAULT_SAMPLES, EXACT_PAIR_CAP};
use rumdlab_core::{DenseOperator, NormedSpace};
use serde::{Deserialize, Serialize};

/// Inclusive range of depths, written `a..b`, `a..=b` or `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthRange {
    pub start: usize,
    pub end: usize,
}

impl DepthRange {
    pub fn single(n: usize) -> Self {
        Self { start: n, end: n }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }

    pub fn is_single(&self) -> bool {
        self.start == self.end
    }
}

impl FromStr for DepthRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
            None => (s, s),
        };
        let start: usize = a.parse().with_context(|| format!("bad depth '{a}'"))?;
        let end: usize = b.parse().with_context(|| format!("bad depth '{b}'"))?;
        if start == 0 || start > end {
            bail!("depth range must satisfy 1 <= start <= end, got {s}");
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for DepthRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}..{}", self.start, self.end)
        }
    }
}

/// The operator a run is about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    /// Identity on `l_p^m`, from `--space l<p>:<m>`.
    Identity { space: String },
    /// `σ_N`, from `--op sigma:<N>`.
    Summation { size: usize },
    /// Operator CSV file, from `--op file:<path>`.
    File { path: PathBuf },
}

impl OperatorSpec {
    pub fn from_space(s: &str) -> anyhow::Result<Self> {
        let space: NormedSpace = s.parse().map_err(|e| anyhow::anyhow!("--space {s}: {e}"))?;
        Ok(Self::Identity {
            space: space.to_string(),
        })
    }

    pub fn from_op(s: &str) -> anyhow::Result<Self> {
        if let Some(n) = s.strip_prefix("sigma:") {
            let size: usize = n.parse().with_context(|| format!("--op {s}: bad size"))?;
            if size == 0 {
                bail!("--op {s}: size must be positive");
            }
            return Ok(Self::Summation { size });
        }
        if let Some(p) = s.strip_prefix("file:") {
            return Ok(Self::File { path: p.into() });
        }
        bail!("--op must be sigma:<N> or file:<path>, got {s}")
    }

    pub fn build(&self) -> anyhow::Result<DenseOperator> {
        match self {
            Self::Identity { space } => {
                let space: NormedSpace = space.parse()?;
                Ok(DenseOperator::identity(space))
            }
            Self::Summation { size } => Ok(summation_operator(*size)?),
            Self::File { path } => crate::io::read_operator(path),
        }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity { space } => write!(f, "id:{space}"),
            Self::Summation { size } => write!(f, "sigma:{size}"),
            Self::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// Everything that determines the output of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub n_range: DepthRange,
    pub q: f64,
    pub operator: Option<OperatorSpec>,
    pub seed: u64,
    pub budget: u64,
    pub exact_cap: usize,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
}

impl RunConfig {
    pub fn new(command: &str, n_range: DepthRange) -> Self {
        Self {
            command: command.to_string(),
            n_range,
            q: 2.0,
            operator: None,
            seed: 0,
            budget: DEFAULT_BUDGET,
            exact_cap: EXACT_PAIR_CAP,
            samples: DEFAULT_SAMPLES,
            out: None,
            format: Format::Csv,
            timing: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(
            "4..12".parse::<DepthRange>().unwrap(),
            DepthRange { start: 4, end: 12 }
        );
        assert_eq!(
            "4..=12".parse::<DepthRange>().unwrap(),
            DepthRange { start: 4, end: 12 }
        );
        assert_eq!("7".parse::<DepthRange>().unwrap(), DepthRange::single(7));
        assert!("0..3".parse::<DepthRange>().is_err());
        assert!("5..3".parse::<DepthRange>().is_err());
        assert!("x".parse::<DepthRange>().is_err());
    }

    #[test]
    fn operator_specs() {
        let s = OperatorSpec::from_space("l1:16").unwrap();
        assert_eq!(s.build().unwrap().cols(), 16);
        let s = OperatorSpec::from_op("sigma:8").unwrap();
        assert!(s.build().unwrap().is_summation());
        assert!(OperatorSpec::from_op("tau:3").is_err());
        assert!(OperatorSpec::from_space("lp:3").is_err());
    }

    #[test]
    fn config_round_trips() {
        let mut c = RunConfig::new("sweep", "2..5".parse().unwrap());
        c.operator = Some(OperatorSpec::from_space("linf:4").unwrap());
        c.out = Some("x.csv".into());
        let json = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
