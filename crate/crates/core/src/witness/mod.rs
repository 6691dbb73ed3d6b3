//! Seeded generators for the separating sequences, streamed zone by zone.
//!
//! Random blocks come from ChaCha20 seeded with a `u64`; the same family,
//! parameters and seed always give the same symbols.

pub mod check;
mod io;
mod t6;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{ceil_log2, increment, Alphabet, Sym};
use crate::plogon::index_width;

pub use io::{read_sequence, read_checkpoints, write_checkpoints, write_sequence, SequenceHeader};
pub use t6::{has_long_run, is_palindrome, t6_enumerate, T6Class};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
}

fn two() -> usize {
    2
}
fn seven() -> u32 {
    7
}
fn eight() -> usize {
    8
}
fn four() -> u64 {
    4
}
fn fourteen() -> u64 {
    14
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum WitnessSpec {
    /// Zone `n`: `l` blocks drawn with repetition from `n²` random blocks of length `n`.
    T1 {
        #[serde(default = "two")]
        sigma: usize,
    },
    /// Zone `n`: `n^c` copies of one random block of length `n`.
    T2 {
        #[serde(default = "two")]
        sigma: usize,
        #[serde(default = "seven")]
        c: u32,
    },
    /// Zone `n`: `y_n 1^k y_n^{-1}` with `|y_n| = k·t_n`.
    T4 {
        #[serde(default = "two")]
        sigma: usize,
        k: usize,
    },
    /// Zone `n`: `y_n Y_n^{-1}` over `2t` symbols, `|y_n| = base·n`.
    T5 {
        t: usize,
        #[serde(default = "eight")]
        base: usize,
    },
    /// Run-free zones with palindrome, X and Y parts separated by growing flags.
    T6 {
        #[serde(default = "two")]
        sigma: usize,
        k: usize,
        v: usize,
    },
    /// All non-empty words in length-lexicographic order.
    Enum {
        #[serde(default = "two")]
        sigma: usize,
    },
    /// Zone `n`: `n²` fresh blocks of `n` bits, then `2^n` (index, block) pairs.
    T7 {
        #[serde(default = "four")]
        first_zone: u64,
        #[serde(default = "fourteen")]
        last_zone: u64,
    },
}

impl WitnessSpec {
    pub fn id(&self) -> &'static str {
        match self {
            WitnessSpec::T1 { .. } => "t1",
            WitnessSpec::T2 { .. } => "t2",
            WitnessSpec::T4 { .. } => "t4",
            WitnessSpec::T5 { .. } => "t5",
            WitnessSpec::T6 { .. } => "t6",
            WitnessSpec::Enum { .. } => "enum",
            WitnessSpec::T7 { .. } => "t7",
        }
    }

    pub fn sigma(&self) -> usize {
        match *self {
            WitnessSpec::T1 { sigma }
            | WitnessSpec::T2 { sigma, .. }
            | WitnessSpec::T4 { sigma, .. }
            | WitnessSpec::T6 { sigma, .. }
            | WitnessSpec::Enum { sigma } => sigma,
            WitnessSpec::T5 { t, .. } => 2 * t,
            WitnessSpec::T7 { .. } => 2,
        }
    }

    pub fn alphabet(&self) -> Result<Alphabet, WitnessError> {
        Alphabet::with_size(self.sigma()).map_err(|e| WitnessError::ParamOutOfRange(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), WitnessError> {
        let bad = |m: &str| Err(WitnessError::ParamOutOfRange(m.to_string()));
        let sigma = self.sigma();
        if !(2..=62).contains(&sigma) {
            return bad("alphabet size must be in 2..=62");
        }
        match *self {
            WitnessSpec::T2 { c, .. } if c == 0 || c > 12 => bad("t2 needs 1 <= c <= 12"),
            WitnessSpec::T4 { k, .. } if k < 2 => bad("t4 needs k >= 2"),
            WitnessSpec::T5 { t, base } if t == 0 || base == 0 => bad("t5 needs t >= 1 and base >= 1"),
            WitnessSpec::T6 { k, v, .. } if k < 3 || v == 0 => bad("t6 needs k >= 3 and v >= 1"),
            WitnessSpec::T7 { first_zone, last_zone } if first_zone < 2 || last_zone > 24 || first_zone > last_zone => {
                bad("t7 needs 2 <= first_zone <= last_zone <= 24")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Prefix length at which the marker applies.
    pub position: u64,
    pub kind: String,
}

/// A generated prefix with its structural markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub spec: WitnessSpec,
    pub seed: u64,
    pub alphabet: Alphabet,
    pub symbols: Vec<Sym>,
    pub checkpoints: Vec<Checkpoint>,
}

impl Witness {
    pub fn positions_of(&self, kind: &str) -> Vec<u64> {
        self.checkpoints
            .iter()
            .filter(|c| c.kind.split(';').any(|k| k == kind))
            .map(|c| c.position)
            .collect()
    }
}

/// Lazily produces the sequence one zone at a time.
pub struct WitnessStream {
    spec: WitnessSpec,
    rng: ChaCha20Rng,
    zone: u64,
    emitted: u64,
    buf: Vec<Sym>,
    buf_pos: usize,
    marks: Vec<Checkpoint>,
    exhausted: bool,
}

impl WitnessStream {
    pub fn new(spec: WitnessSpec, seed: u64) -> Result<Self, WitnessError> {
        spec.validate()?;
        Ok(WitnessStream {
            spec,
            rng: ChaCha20Rng::seed_from_u64(seed),
            zone: 0,
            emitted: 0,
            buf: Vec::new(),
            buf_pos: 0,
            marks: Vec::new(),
            exhausted: false,
        })
    }

    /// Markers for every zone produced so far.
    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.marks
    }

    fn mark(&mut self, position: u64, kind: &str) {
        match self.marks.last_mut() {
            Some(last) if last.position == position => {
                last.kind.push(';');
                last.kind.push_str(kind);
            }
            _ => self.marks.push(Checkpoint { position, kind: kind.to_string() }),
        }
    }

    fn random_block(&mut self, len: usize, sigma: usize) -> Vec<Sym> {
        (0..len).map(|_| self.rng.gen_range(0..sigma as u32) as Sym).collect()
    }

    fn refill(&mut self) -> Result<bool, WitnessError> {
        if self.exhausted {
            return Ok(false);
        }
        self.zone += 1;
        let start = self.emitted + (self.buf.len() - self.buf_pos) as u64;
        let mut z: Vec<Sym> = Vec::new();
        let mut local: Vec<(usize, &'static str)> = Vec::new();
        let n = self.zone as usize;
        match self.spec.clone() {
            WitnessSpec::T1 { sigma } => {
                let pool = self.random_block(n * n * n, sigma);
                let l = t1_block_count(n as u64, sigma as u64);
                for _ in 0..l {
                    let i = self.rng.gen_range(0..(n * n) as u64) as usize;
                    z.extend_from_slice(&pool[i * n..(i + 1) * n]);
                }
            }
            WitnessSpec::T2 { sigma, c } => {
                let r = self.random_block(n, sigma);
                let copies = (n as u64).checked_pow(c).ok_or_else(|| WitnessError::ParamOutOfRange("t2 zone too large".into()))?;
                if copies > 1 << 28 {
                    return Err(WitnessError::ParamOutOfRange("t2 zone too large".into()));
                }
                for _ in 0..copies {
                    z.extend_from_slice(&r);
                }
            }
            WitnessSpec::T4 { sigma, k } => {
                let t = t4_block_factor(n as u64, k as u64) as usize;
                let y = block_no_flag(k * t, k, sigma, &mut self.rng)?;
                z.extend_from_slice(&y);
                local.push((z.len(), "flag_start"));
                z.extend(std::iter::repeat(1).take(k));
                local.push((z.len(), "flag_end"));
                z.extend(y.iter().rev());
            }
            WitnessSpec::T5 { t, base } => {
                let y = self.random_block(base * n, t);
                z.extend_from_slice(&y);
                local.push((z.len(), "return_start"));
                z.extend(y.iter().rev().map(|&a| a + t as Sym));
            }
            WitnessSpec::T6 { sigma, k, v } => self.t6_zone(n, sigma, k, v, &mut z, &mut local)?,
            WitnessSpec::Enum { sigma } => {
                if (sigma as f64).powi(n as i32) * n as f64 > 1e9 {
                    return Err(WitnessError::ParamOutOfRange("enum word class too large".into()));
                }
                let mut w = vec![0; n];
                loop {
                    z.extend_from_slice(&w);
                    if !increment(&mut w, sigma) {
                        break;
                    }
                }
            }
            WitnessSpec::T7 { first_zone, last_zone } => {
                let n = first_zone + self.zone - 1;
                if n > last_zone {
                    self.exhausted = true;
                    return Ok(false);
                }
                let nu = n as usize;
                let blocks = self.random_block(nu * nu * nu, 2);
                z.extend_from_slice(&blocks);
                local.push((z.len(), "fresh_end"));
                let w = index_width(n);
                for _ in 0..(1u64 << n) {
                    let i = self.rng.gen_range(0..n * n);
                    for b in (0..w).rev() {
                        z.push(((i >> b) & 1) as Sym);
                    }
                    let i = i as usize;
                    z.extend_from_slice(&blocks[i * nu..(i + 1) * nu]);
                }
            }
        }
        self.mark(start, "zone_start");
        for (p, kind) in local {
            self.mark(start + p as u64, kind);
        }
        self.mark(start + z.len() as u64, "zone_end");
        self.buf.drain(..self.buf_pos);
        self.buf_pos = 0;
        self.buf.extend(z);
        Ok(true)
    }

    fn t6_zone(
        &mut self,
        n: usize,
        sigma: usize,
        k: usize,
        v: usize,
        z: &mut Vec<Sym>,
        local: &mut Vec<(usize, &'static str)>,
    ) -> Result<(), WitnessError> {
        if n < k {
            let mut w = vec![0; n];
            loop {
                z.extend_from_slice(&w);
                if !increment(&mut w, sigma) {
                    break;
                }
            }
            if n == k - 1 {
                for len in k..2 * k {
                    z.extend(std::iter::repeat(1).take(len));
                }
                local.push((z.len(), "warmup_end"));
            }
            return Ok(());
        }
        let c = t6_enumerate(n, k, v, sigma)?;
        let f = t6_flag(n, k, v);
        for a in &c.a {
            z.extend_from_slice(a);
        }
        z.extend(std::iter::repeat(1).take(f));
        local.push((z.len(), "flag_end_after_a"));
        for i in 0..v {
            for x in &c.x[i] {
                z.extend_from_slice(x);
            }
            z.extend(std::iter::repeat(1).take(f + i + 1));
            local.push((z.len(), "flag_end_after_x"));
            for y in &c.y[i] {
                z.extend_from_slice(y);
            }
            local.push((z.len(), "y_end"));
        }
        Ok(())
    }

    /// Appends the next `len` symbols to `out`; fewer if the family is finite.
    pub fn take_into(&mut self, len: u64, out: &mut Vec<Sym>) -> Result<(), WitnessError> {
        let mut left = len;
        while left > 0 {
            if self.buf_pos == self.buf.len() && !self.refill()? {
                break;
            }
            let avail = (self.buf.len() - self.buf_pos) as u64;
            let take = avail.min(left) as usize;
            out.extend_from_slice(&self.buf[self.buf_pos..self.buf_pos + take]);
            self.buf_pos += take;
            self.emitted += take as u64;
            left -= take as u64;
        }
        Ok(())
    }
}

impl Iterator for WitnessStream {
    type Item = Sym;

    fn next(&mut self) -> Option<Sym> {
        if self.buf_pos == self.buf.len() && !self.refill().ok()? {
            return None;
        }
        let s = self.buf[self.buf_pos];
        self.buf_pos += 1;
        self.emitted += 1;
        Some(s)
    }
}

/// The first `prefix_len` symbols and every marker at or before that length.
pub fn generate(spec: &WitnessSpec, seed: u64, prefix_len: u64) -> Result<Witness, WitnessError> {
    let mut st = WitnessStream::new(spec.clone(), seed)?;
    let mut symbols = Vec::with_capacity(prefix_len.min(1 << 28) as usize);
    st.take_into(prefix_len, &mut symbols)?;
    let end = symbols.len() as u64;
    let checkpoints = st.marks.iter().filter(|c| c.position <= end).cloned().collect();
    Ok(Witness { spec: spec.clone(), seed, alphabet: spec.alphabet()?, symbols, checkpoints })
}

/// Length of the prefix made of whole zones whose end is the first at or past `min_len`.
pub fn zone_aligned_len(spec: &WitnessSpec, seed: u64, min_len: u64, kind: &str) -> Result<u64, WitnessError> {
    let mut st = WitnessStream::new(spec.clone(), seed)?;
    loop {
        if let Some(c) = st.marks.iter().find(|c| c.position >= min_len && c.kind.split(';').any(|x| x == kind)) {
            return Ok(c.position);
        }
        if !st.refill()? {
            return Err(WitnessError::ParamOutOfRange(format!("sequence ends before {min_len} symbols")));
        }
        st.emitted += (st.buf.len() - st.buf_pos) as u64;
        st.buf_pos = st.buf.len();
    }
}

/// `⌊Σ_{j=1..n} j·min(|Σ|^j, ⌊n^{2j/n+1}⌋) / n⌋`, the number of blocks in zone `n`.
pub fn t1_block_count(n: u64, sigma: u64) -> u64 {
    let mut total: u128 = 0;
    for j in 1..=n {
        let pow = (sigma as u128).checked_pow(j as u32).unwrap_or(u128::MAX);
        let cap = (n as f64).powf(2.0 * j as f64 / n as f64 + 1.0).floor() as u128;
        total += j as u128 * pow.min(cap);
    }
    (total / n as u128) as u64
}

/// `k^⌈log n / log k⌉`: the least power of `k` that is at least `n`.
pub fn t4_block_factor(n: u64, k: u64) -> u64 {
    let mut t = 1;
    while t < n {
        t *= k;
    }
    t
}

/// Flag length before the X groups of zone `n`: `f(k) = 2k`, `f(n+1) = f(n) + v + 1`.
pub fn t6_flag(n: usize, k: usize, v: usize) -> usize {
    2 * k + (n - k) * (v + 1)
}

/// Number of symbols before the first zone whose class and all later classes
/// are well formed; also that zone's index. Checked up to `n_max`.
pub fn t6_early_prefix(sigma: usize, k: usize, v: usize, n_max: usize) -> Result<(u64, usize), WitnessError> {
    let mut len: u64 = 0;
    for n in 1..k {
        len += (n as u64) * (sigma as u64).pow(n as u32);
    }
    len += (k..2 * k).map(|j| j as u64).sum::<u64>();
    let mut first = None;
    let mut zone_lens = Vec::new();
    for n in k..=n_max {
        let c = t6_enumerate(n, k, v, sigma)?;
        let f = t6_flag(n, k, v);
        zone_lens.push((n * c.t.len() + (0..=v).map(|i| f + i).sum::<usize>()) as u64);
        if c.well_formed() {
            first.get_or_insert(n);
        } else {
            first = None;
        }
    }
    let first = first.ok_or_else(|| WitnessError::ParamOutOfRange("no well-formed t6 zone up to n_max".into()))?;
    len += zone_lens[..first - k].iter().sum::<u64>();
    Ok((len, first))
}

/// A string of `len` symbols whose aligned `k`-blocks are never `1^k`.
pub fn block_no_flag<R: Rng>(len: usize, k: usize, sigma: usize, rng: &mut R) -> Result<Vec<Sym>, WitnessError> {
    if k == 0 || len % k != 0 {
        return Err(WitnessError::ParamOutOfRange(format!("block length {len} is not a multiple of {k}")));
    }
    let mut out = Vec::with_capacity(len);
    let mut block = vec![0; k];
    for _ in 0..len / k {
        loop {
            for s in block.iter_mut() {
                *s = rng.gen_range(0..sigma as u32) as Sym;
            }
            if block.iter().any(|&s| s != 1) {
                break;
            }
        }
        out.extend_from_slice(&block);
    }
    Ok(out)
}

/// Symbols in T7 zone `n`.
pub fn t7_zone_len(n: u64) -> u64 {
    n * n * n + (1u64 << n) * (n + 2 * ceil_log2(n) as u64)
}
