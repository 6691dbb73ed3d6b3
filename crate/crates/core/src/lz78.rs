//! LZ78 incremental parsing with a bit-exact code.
//!
//! Step `i` writes the back-pointer `l(i)` in `⌈log2(D + 1)⌉` bits, where `D`
//! is the number of non-empty phrases known before the step, followed by the
//! extension symbol in `⌈log2 |Σ|⌉` bits. A final phrase that ends exactly on
//! a dictionary word is written as a pointer alone.

use thiserror::Error;

use crate::alphabet::{ceil_log2, Sym};
use crate::bits::{BitReader, BitVec};

/// Phrase trie. Node 0 is the empty phrase; node `i` is phrase `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LzDictionary {
    sigma: usize,
    children: Vec<u32>,
    parent: Vec<(u32, Sym)>,
}

impl LzDictionary {
    pub fn new(sigma: usize) -> Self {
        assert!(sigma >= 2);
        LzDictionary { sigma, children: vec![0; sigma], parent: vec![(0, 0)] }
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Number of non-empty phrases.
    pub fn len(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn child(&self, node: u32, sym: Sym) -> Option<u32> {
        match self.children[node as usize * self.sigma + sym as usize] {
            0 => None,
            c => Some(c),
        }
    }

    fn insert(&mut self, node: u32, sym: Sym) -> u32 {
        let id = self.parent.len() as u32;
        self.children[node as usize * self.sigma + sym as usize] = id;
        self.children.extend(std::iter::repeat(0).take(self.sigma));
        self.parent.push((node, sym));
        id
    }

    /// The word spelled by phrase `id`.
    pub fn expand(&self, mut id: u32) -> Vec<Sym> {
        let mut w = Vec::new();
        while id != 0 {
            let (p, s) = self.parent[id as usize];
            w.push(s);
            id = p;
        }
        w.reverse();
        w
    }

    pub fn pointer_width(&self) -> u32 {
        ceil_log2(self.len() as u64 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phrase {
    pub back: u32,
    /// `None` only for a partial final phrase.
    pub ext: Option<Sym>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LzParse {
    pub phrases: Vec<Phrase>,
    pub partial_final: bool,
}

impl LzParse {
    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }
}

/// Greedy parse of `x` extending `dict` in place.
pub fn parse_into(x: &[Sym], dict: &mut LzDictionary) -> LzParse {
    let mut out = LzParse::default();
    let mut node = 0u32;
    for &s in x {
        match dict.child(node, s) {
            Some(c) => node = c,
            None => {
                dict.insert(node, s);
                out.phrases.push(Phrase { back: node, ext: Some(s) });
                node = 0;
            }
        }
    }
    if node != 0 {
        out.phrases.push(Phrase { back: node, ext: None });
        out.partial_final = true;
    }
    out
}

pub fn parse(x: &[Sym], dict: &LzDictionary) -> (LzParse, LzDictionary) {
    let mut d = dict.clone();
    let p = parse_into(x, &mut d);
    (p, d)
}

pub fn phrase_count(x: &[Sym], sigma: usize) -> usize {
    parse_into(x, &mut LzDictionary::new(sigma)).len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LzBitstream {
    pub bits: BitVec,
    pub partial_final: bool,
}

impl LzBitstream {
    pub fn bit_len(&self) -> usize {
        self.bits.len()
    }
}

/// Online encoder; `bits_so_far` is the code length of the prefix read so far,
/// counting a pending match as a partial phrase.
#[derive(Clone, Debug)]
pub struct LzStream {
    dict: LzDictionary,
    node: u32,
    sym_bits: u32,
    bits: Option<BitVec>,
    complete_bits: u64,
}

impl LzStream {
    pub fn new(dict: LzDictionary, keep_bits: bool) -> Self {
        let sym_bits = ceil_log2(dict.sigma() as u64);
        LzStream { dict, node: 0, sym_bits, bits: keep_bits.then(BitVec::new), complete_bits: 0 }
    }

    pub fn push(&mut self, s: Sym) {
        match self.dict.child(self.node, s) {
            Some(c) => self.node = c,
            None => {
                let w = self.dict.pointer_width();
                if let Some(b) = self.bits.as_mut() {
                    b.push_bits(self.node as u64, w);
                    b.push_bits(s as u64, self.sym_bits);
                }
                self.complete_bits += (w + self.sym_bits) as u64;
                self.dict.insert(self.node, s);
                self.node = 0;
            }
        }
    }

    pub fn bits_so_far(&self) -> u64 {
        self.complete_bits + if self.node != 0 { self.dict.pointer_width() as u64 } else { 0 }
    }

    pub fn at_phrase_boundary(&self) -> bool {
        self.node == 0
    }

    pub fn dictionary(&self) -> &LzDictionary {
        &self.dict
    }

    pub fn finish(mut self) -> (LzBitstream, LzDictionary) {
        let partial = self.node != 0;
        let mut bits = self.bits.take().unwrap_or_default();
        if partial {
            bits.push_bits(self.node as u64, self.dict.pointer_width());
        }
        (LzBitstream { bits, partial_final: partial }, self.dict)
    }
}

pub fn encode(x: &[Sym], dict: &LzDictionary) -> LzBitstream {
    let mut st = LzStream::new(dict.clone(), true);
    for &s in x {
        st.push(s);
    }
    st.finish().0
}

/// `LZ(y | x)` given the dictionary left behind by parsing `x`.
pub fn encode_continuation(y: &[Sym], after_context: &LzDictionary) -> LzBitstream {
    encode(y, after_context)
}

pub fn output_len_bits(x: &[Sym], sigma: usize) -> u64 {
    let mut st = LzStream::new(LzDictionary::new(sigma), false);
    for &s in x {
        st.push(s);
    }
    st.bits_so_far()
}

pub fn lz_ratio(x: &[Sym], sigma: usize) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    output_len_bits(x, sigma) as f64 / (x.len() as f64 * (sigma as f64).log2())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LzError {
    #[error("malformed stream at bit {offset}: {reason}")]
    MalformedStream { offset: usize, reason: &'static str },
}

fn malformed(offset: usize, reason: &'static str) -> LzError {
    LzError::MalformedStream { offset, reason }
}

pub fn decode(bits: &BitVec, sigma: usize, dict: &LzDictionary) -> Result<Vec<Sym>, LzError> {
    assert_eq!(sigma, dict.sigma());
    let sym_bits = ceil_log2(sigma as u64);
    let mut d = dict.clone();
    let mut r = BitReader::new(bits);
    let mut out = Vec::new();
    while r.remaining() > 0 {
        let at = r.position();
        let w = d.pointer_width();
        let back = r.read(w).ok_or_else(|| malformed(at, "truncated pointer"))?;
        if back > d.len() as u64 {
            return Err(malformed(at, "pointer beyond dictionary"));
        }
        if r.remaining() == 0 {
            if back == 0 {
                return Err(malformed(at, "partial phrase points at the root"));
            }
            out.extend(d.expand(back as u32));
            break;
        }
        let s = r.read(sym_bits).ok_or_else(|| malformed(r.position(), "truncated extension symbol"))?;
        if s >= sigma as u64 {
            return Err(malformed(r.position() - sym_bits as usize, "extension symbol outside alphabet"));
        }
        out.extend(d.expand(back as u32));
        out.push(s as Sym);
        d.insert(back as u32, s as Sym);
    }
    Ok(out)
}

pub const MAGIC: &[u8; 4] = b"LZ78";

#[derive(Debug, Error)]
pub enum LzFileError {
    #[error("not an LZ78 stream")]
    BadMagic,
    #[error("header too short")]
    ShortHeader,
    #[error(transparent)]
    Stream(#[from] LzError),
}

/// Header: magic, |Σ| as big-endian u16, flags (bit 0 partial final phrase,
/// bits 1..=3 padding bit count), one reserved byte; then the packed bits.
pub fn to_file_bytes(stream: &LzBitstream, sigma: usize) -> Vec<u8> {
    let pad = (8 - stream.bits.len() % 8) % 8;
    let mut out = Vec::with_capacity(8 + stream.bits.as_bytes().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(sigma as u16).to_be_bytes());
    out.push(stream.partial_final as u8 | (pad as u8) << 1);
    out.push(0);
    out.extend_from_slice(stream.bits.as_bytes());
    out
}

pub fn from_file_bytes(bytes: &[u8]) -> Result<(LzBitstream, usize), LzFileError> {
    if bytes.len() < 8 {
        return Err(LzFileError::ShortHeader);
    }
    if &bytes[..4] != MAGIC {
        return Err(LzFileError::BadMagic);
    }
    let sigma = u16::from_be_bytes([bytes[4], bytes[5]]) as usize;
    let partial = bytes[6] & 1 == 1;
    let pad = ((bytes[6] >> 1) & 7) as usize;
    let body = bytes[8..].to_vec();
    let len = (body.len() * 8).checked_sub(pad).ok_or(LzError::MalformedStream { offset: 0, reason: "padding exceeds body" })?;
    Ok((LzBitstream { bits: BitVec::from_bytes(body, len), partial_final: partial }, sigma))
}
