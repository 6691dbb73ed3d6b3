//! One-pass online compressors that are told the input length up front and
//! whose retained state is metered after every symbol.

mod enum_prefix;
mod theorem7;

use std::collections::HashMap;

use thiserror::Error;

use crate::alphabet::{ceil_log2, for_each_word, Sym};
use crate::bits::{push_gamma, BitVec};

pub use enum_prefix::{dbin, EnumPrefix};
pub use theorem7::{index_width, IndexCompressor};

/// Output is appended to `out` and never retracted.
pub trait OnlineCompressor {
    fn init(&mut self, n: u64, out: &mut BitVec);
    fn feed(&mut self, sym: Sym, out: &mut BitVec);
    fn finalize(&mut self, out: &mut BitVec);
    /// Canonical serialization of everything retained between feeds.
    fn snapshot(&self) -> BitVec;

    fn state_bits(&self) -> u64 {
        self.snapshot().len() as u64
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlogError {
    #[error("protocol violation: {0}")]
    ProtocolViolation(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeteredRun {
    pub output: BitVec,
    pub peak_state_bits: u64,
    pub final_snapshot: BitVec,
}

/// Enforces init → exactly `n` feeds → finalize and tracks the state peak.
pub struct Session<C: OnlineCompressor> {
    comp: C,
    n: u64,
    fed: u64,
    done: bool,
    out: BitVec,
    peak: u64,
}

impl<C: OnlineCompressor> Session<C> {
    pub fn start(mut comp: C, n: u64) -> Self {
        let mut out = BitVec::new();
        comp.init(n, &mut out);
        let peak = comp.state_bits();
        Session { comp, n, fed: 0, done: false, out, peak }
    }

    pub fn feed(&mut self, sym: Sym) -> Result<(), PlogError> {
        if self.done {
            return Err(PlogError::ProtocolViolation("feed after finalize"));
        }
        if self.fed == self.n {
            return Err(PlogError::ProtocolViolation("more symbols than announced"));
        }
        self.comp.feed(sym, &mut self.out);
        self.fed += 1;
        self.peak = self.peak.max(self.comp.state_bits());
        Ok(())
    }

    pub fn finish(mut self) -> Result<MeteredRun, PlogError> {
        if self.fed != self.n {
            return Err(PlogError::ProtocolViolation("fewer symbols than announced"));
        }
        self.done = true;
        self.comp.finalize(&mut self.out);
        Ok(MeteredRun { output: self.out, peak_state_bits: self.peak, final_snapshot: self.comp.snapshot() })
    }
}

pub fn run_online<C: OnlineCompressor>(comp: C, w: &[Sym]) -> Result<MeteredRun, PlogError> {
    let mut s = Session::start(comp, w.len() as u64);
    for &x in w {
        s.feed(x)?;
    }
    s.finish()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryBound {
    pub a: f64,
    pub c_exp: f64,
}

impl MemoryBound {
    pub fn bits(&self, n: u64) -> f64 {
        self.a * ((n as f64) + 2.0).log2().powf(self.c_exp)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MemoryVerdict {
    Ok { worst_fraction: f64 },
    Exceeded { n: u64, peak_bits: u64, bound_bits: f64 },
}

/// Runs a fresh compressor on `stream(n)` for each length, in order.
pub fn check_memory_bound<C, F, S>(
    make: F,
    lengths: &[u64],
    bound: MemoryBound,
    mut stream: S,
) -> Result<MemoryVerdict, PlogError>
where
    C: OnlineCompressor,
    F: Fn() -> C,
    S: FnMut(u64) -> Vec<Sym>,
{
    let mut worst: f64 = 0.0;
    for &n in lengths {
        let w = stream(n);
        let r = run_online(make(), &w)?;
        let b = bound.bits(n);
        if r.peak_state_bits as f64 > b {
            return Ok(MemoryVerdict::Exceeded { n, peak_bits: r.peak_state_bits, bound_bits: b });
        }
        worst = worst.max(r.peak_state_bits as f64 / b);
    }
    Ok(MemoryVerdict::Ok { worst_fraction: worst })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OnlineIlVerdict {
    Ok { words: u64 },
    Collision { first: Vec<Sym>, second: Vec<Sym> },
}

/// Injectivity of `w ↦ C(w, |w|)` over every word of length at most `max_len`.
pub fn check_il_online<C, F>(make: F, sigma: usize, max_len: usize) -> Result<OnlineIlVerdict, PlogError>
where
    C: OnlineCompressor,
    F: Fn() -> C,
{
    let mut seen: HashMap<BitVec, Vec<Sym>> = HashMap::new();
    let mut result = None;
    let mut err = None;
    let mut words = 0u64;
    for_each_word(sigma, max_len, |w| {
        if result.is_some() || err.is_some() {
            return;
        }
        match run_online(make(), w) {
            Ok(r) => {
                words += 1;
                if let Some(prev) = seen.insert(r.output, w.to_vec()) {
                    result = Some(OnlineIlVerdict::Collision { first: prev, second: w.to_vec() });
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(result.unwrap_or(OnlineIlVerdict::Ok { words }))
}

/// Writes every symbol in fixed width; retains only a position counter.
#[derive(Clone, Debug)]
pub struct CopyCompressor {
    sym_bits: u32,
    n: u64,
    pos: u64,
}

impl CopyCompressor {
    pub fn new(sigma: usize) -> Self {
        CopyCompressor { sym_bits: ceil_log2(sigma as u64), n: 0, pos: 0 }
    }
}

impl OnlineCompressor for CopyCompressor {
    fn init(&mut self, n: u64, _out: &mut BitVec) {
        self.n = n;
        self.pos = 0;
    }

    fn feed(&mut self, sym: Sym, out: &mut BitVec) {
        out.push_bits(sym as u64, self.sym_bits);
        self.pos += 1;
    }

    fn finalize(&mut self, _out: &mut BitVec) {}

    fn snapshot(&self) -> BitVec {
        let mut b = BitVec::new();
        push_gamma(&mut b, self.n);
        push_gamma(&mut b, self.pos);
        b
    }
}
