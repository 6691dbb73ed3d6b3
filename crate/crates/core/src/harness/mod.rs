//! Compression ratios over prefixes, tail-window estimates of their liminf and
//! limsup, and experiment runs that persist the series.

mod experiment;
mod selector;

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::Sym;
use crate::bits::BitVec;
use crate::lz78::{LzDictionary, LzStream};
use crate::pda::{PdaError, Pushdown, Runner};
use crate::plogon::OnlineCompressor;

pub use experiment::{
    run_experiment, run_experiment_file, Assertion, AssertionOutcome, CheckpointSpec, CompressorEntry,
    ExperimentConfig, ExperimentReport, Geometric,
};
pub use selector::{BuildError, Compressor, Selector};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("empty ratio series")]
    EmptySeries,
    #[error("at checkpoint {position}: {source}")]
    Engine { position: u64, source: PdaError },
    #[error("invalid config at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("cannot compare raw sizes in {0} with {1}")]
    MixedUnits(Unit, Unit),
    #[error("checkpoint {0} lies past the generated prefix")]
    CheckpointOutOfRange(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> HarnessError {
    HarnessError::ConfigInvalid { path: path.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Symbols,
    Bits,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Symbols => "symbols",
            Unit::Bits => "bits",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    pub prefix_len: u64,
    pub output_size: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSeries {
    pub unit: Unit,
    pub unit_note: String,
    pub points: Vec<Point>,
}

impl RatioSeries {
    fn symbols(points: Vec<Point>) -> Self {
        RatioSeries { unit: Unit::Symbols, unit_note: "output symbols / input symbols".into(), points }
    }

    fn bits(points: Vec<Point>) -> Self {
        RatioSeries { unit: Unit::Bits, unit_note: "output bits / (input symbols * log2|alphabet|)".into(), points }
    }

    pub fn last(&self) -> Option<&Point> {
        self.points.last()
    }

    /// `prefix_len,output_size,unit,ratio`, ratios printed with 12 decimals.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["prefix_len", "output_size", "unit", "ratio"]).map_err(csv_err)?;
        for p in &self.points {
            out.write_record([
                p.prefix_len.to_string(),
                p.output_size.to_string(),
                self.unit.to_string(),
                format!("{:.12}", p.ratio),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Io(std::io::Error::other(e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub rho_hat: f64,
    pub r_hat: f64,
    pub tail_fraction: f64,
    /// Prefix length where the tail maximum is first reached.
    pub argmax_prefix: u64,
    pub argmin_prefix: u64,
}

/// Min and max of the ratio over the last `⌈tail_fraction·N⌉` points.
pub fn estimate_limits(series: &RatioSeries, tail_fraction: f64) -> Result<Estimate, HarnessError> {
    let n = series.points.len();
    if n == 0 {
        return Err(HarnessError::EmptySeries);
    }
    let tail = ((tail_fraction.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n);
    let window = &series.points[n - tail..];
    let mut lo = &window[0];
    let mut hi = &window[0];
    for p in window {
        if p.ratio < lo.ratio {
            lo = p;
        }
        if p.ratio > hi.ratio {
            hi = p;
        }
    }
    Ok(Estimate {
        rho_hat: lo.ratio,
        r_hat: hi.ratio,
        tail_fraction,
        argmax_prefix: hi.prefix_len,
        argmin_prefix: lo.prefix_len,
    })
}

fn check_sorted(checkpoints: &[u64], len: usize) -> Result<(), HarnessError> {
    for w in checkpoints.windows(2) {
        assert!(w[0] < w[1], "checkpoints must be strictly increasing");
    }
    match checkpoints.last() {
        Some(&c) if c as usize > len => Err(HarnessError::CheckpointOutOfRange(c)),
        _ => Ok(()),
    }
}

fn ratio(size: u64, n: u64, per_symbol: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        size as f64 / (n as f64 * per_symbol)
    }
}

/// Output length of the machine on every `input[..c]`, endmarked when the
/// machine declares an endmarker.
///
/// A deterministic run on `input[..c]` is the run on `input` stopped after
/// `c` symbols, so one pass visits every checkpoint. Endmarked machines are
/// forked at each checkpoint and the fork alone reads `$`.
pub fn measure_pd<P: Pushdown + ?Sized>(m: &P, input: &[Sym], checkpoints: &[u64]) -> Result<RatioSeries, HarnessError> {
    check_sorted(checkpoints, input.len())?;
    let engine = |position: u64| move |source| HarnessError::Engine { position, source };
    let mut runner = Runner::new(m, false).map_err(engine(0))?;
    let mut out = Vec::new();
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut pos = 0usize;
    for &c in checkpoints {
        while pos < c as usize {
            runner.feed(input[pos], &mut out).map_err(engine(c))?;
            pos += 1;
        }
        let mut size = out.len() as u64;
        if let Some(end) = m.endmarker() {
            let mut fork = runner.clone();
            let mut tail = Vec::new();
            fork.feed(end, &mut tail).map_err(engine(c))?;
            size += tail.len() as u64;
        }
        points.push(Point { prefix_len: c, output_size: size, ratio: ratio(size, c, 1.0) });
    }
    Ok(RatioSeries::symbols(points))
}

/// LZ78 output bits with an empty initial dictionary, one pass.
pub fn measure_lz(input: &[Sym], sigma: usize, checkpoints: &[u64]) -> Result<RatioSeries, HarnessError> {
    check_sorted(checkpoints, input.len())?;
    let per = (sigma as f64).log2();
    let mut st = LzStream::new(LzDictionary::new(sigma), false);
    let mut pos = 0usize;
    let mut points = Vec::with_capacity(checkpoints.len());
    for &c in checkpoints {
        while pos < c as usize {
            st.push(input[pos]);
            pos += 1;
        }
        let size = st.bits_so_far();
        points.push(Point { prefix_len: c, output_size: size, ratio: ratio(size, c, per) });
    }
    Ok(RatioSeries::bits(points))
}

/// Online compressors are told the length in advance, so each checkpoint is
/// an independent run on its own prefix.
pub fn measure_online<C, F>(make: F, input: &[Sym], sigma: usize, checkpoints: &[u64]) -> Result<RatioSeries, HarnessError>
where
    C: OnlineCompressor,
    F: Fn() -> C + Sync,
{
    check_sorted(checkpoints, input.len())?;
    let per = (sigma as f64).log2();
    let points = checkpoints
        .par_iter()
        .map(|&c| {
            let size = online_output(make(), &input[..c as usize]).len() as u64;
            Point { prefix_len: c, output_size: size, ratio: ratio(size, c, per) }
        })
        .collect();
    Ok(RatioSeries::bits(points))
}

/// Output of one unmetered run.
pub fn online_output<C: OnlineCompressor>(mut comp: C, w: &[Sym]) -> BitVec {
    let mut out = BitVec::new();
    comp.init(w.len() as u64, &mut out);
    for &x in w {
        comp.feed(x, &mut out);
    }
    comp.finalize(&mut out);
    out
}
