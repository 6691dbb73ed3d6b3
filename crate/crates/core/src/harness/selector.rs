use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{measure_lz, measure_online, measure_pd, HarnessError, RatioSeries};
use crate::alphabet::Sym;
use crate::pda::{parse_spec, Pushdown, TransducerSpec};
use crate::plogon::{EnumPrefix, IndexCompressor};
use crate::zoo::{build_theorem4_pair, build_theorem5_visibly, build_theorem6_pair, ZooError, ZooParams};

/// A compressor named on the command line or in a config.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selector {
    Lz78,
    ZooT4,
    ZooT5,
    ZooT6,
    PlogEnum,
    PlogT7,
    Spec(PathBuf),
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "lz78" => Selector::Lz78,
            "zoo:t4" => Selector::ZooT4,
            "zoo:t5" => Selector::ZooT5,
            "zoo:t6" => Selector::ZooT6,
            "plog:enum" => Selector::PlogEnum,
            "plog:t7" => Selector::PlogT7,
            _ => match s.strip_prefix("spec:") {
                Some(p) if !p.is_empty() => Selector::Spec(PathBuf::from(p)),
                _ => {
                    return Err(format!(
                        "unknown selector {s:?}; expected lz78, zoo:t4, zoo:t5, zoo:t6, plog:enum, plog:t7 or spec:<file>"
                    ))
                }
            },
        })
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Lz78 => f.write_str("lz78"),
            Selector::ZooT4 => f.write_str("zoo:t4"),
            Selector::ZooT5 => f.write_str("zoo:t5"),
            Selector::ZooT6 => f.write_str("zoo:t6"),
            Selector::PlogEnum => f.write_str("plog:enum"),
            Selector::PlogT7 => f.write_str("plog:t7"),
            Selector::Spec(p) => write!(f, "spec:{}", p.display()),
        }
    }
}

/// A ready-to-run compressor.
#[derive(Clone, Debug)]
pub enum Compressor {
    Pd(TransducerSpec),
    Lz { sigma: usize },
    Enum { sigma: usize },
    T7 { first_zone: u64 },
}

impl Selector {
    /// `spec:` paths are resolved against `base`; `first_zone` is the
    /// smallest zone the index compressor expects.
    pub fn build(&self, p: &ZooParams, first_zone: u64, base: &Path) -> Result<Compressor, BuildError> {
        Ok(match self {
            Selector::Lz78 => Compressor::Lz { sigma: p.sigma },
            Selector::ZooT4 => Compressor::Pd(build_theorem4_pair(p)?.0),
            Selector::ZooT5 => Compressor::Pd(build_theorem5_visibly(p)?),
            Selector::ZooT6 => Compressor::Pd(build_theorem6_pair(p)?.0),
            Selector::PlogEnum => Compressor::Enum { sigma: p.sigma },
            Selector::PlogT7 => Compressor::T7 { first_zone },
            Selector::Spec(path) => {
                let text = std::fs::read_to_string(base.join(path))?;
                Compressor::Pd(parse_spec(&text).map_err(|e| BuildError::Spec(e.to_string()))?)
            }
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error("bad machine file: {0}")]
    Spec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Compressor {
    pub fn input_size(&self) -> usize {
        match self {
            Compressor::Pd(m) => m.input_size(),
            Compressor::Lz { sigma } | Compressor::Enum { sigma } => *sigma,
            Compressor::T7 { .. } => 2,
        }
    }

    pub fn measure(&self, input: &[Sym], checkpoints: &[u64]) -> Result<RatioSeries, HarnessError> {
        match self {
            Compressor::Pd(m) => measure_pd(m, input, checkpoints),
            Compressor::Lz { sigma } => measure_lz(input, *sigma, checkpoints),
            Compressor::Enum { sigma } => measure_online(|| EnumPrefix::new(*sigma), input, *sigma, checkpoints),
            Compressor::T7 { first_zone } => measure_online(|| IndexCompressor::new(*first_zone), input, 2, checkpoints),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in ["lz78", "zoo:t4", "zoo:t5", "zoo:t6", "plog:enum", "plog:t7", "spec:m/copy.pds"] {
            assert_eq!(s.parse::<Selector>().unwrap().to_string(), s);
        }
        assert!("zoo:t3".parse::<Selector>().is_err());
        assert!("spec:".parse::<Selector>().is_err());
    }
}
