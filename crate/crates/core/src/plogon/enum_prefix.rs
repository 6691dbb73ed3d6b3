use super::OnlineCompressor;
use crate::alphabet::{ceil_log2, Sym};
use crate::bits::{gamma_len, push_gamma, BitVec};

/// `m` in binary with every bit doubled; `dbin(0)` is empty.
pub fn dbin(m: u64, out: &mut BitVec) {
    if m == 0 {
        return;
    }
    let width = 64 - m.leading_zeros();
    for i in (0..width).rev() {
        let b = (m >> i) & 1 == 1;
        out.push(b);
        out.push(b);
    }
}

/// Stays silent while the input follows the enumeration of all non-empty
/// words in length-lexicographic order. At the first disagreement (or at the
/// end) it writes `dbin(m) 01` for the agreeing length `m`, then the rest of
/// the input raw.
#[derive(Clone, Debug)]
pub struct EnumPrefix {
    sigma: usize,
    sym_bits: u32,
    n: u64,
    matched: u64,
    failed: bool,
    /// Current word of the enumeration and the offset inside it.
    word: Vec<Sym>,
    offset: usize,
}

impl EnumPrefix {
    pub fn new(sigma: usize) -> Self {
        EnumPrefix { sigma, sym_bits: ceil_log2(sigma as u64), n: 0, matched: 0, failed: false, word: vec![0], offset: 0 }
    }

    fn expected(&self) -> Sym {
        self.word[self.offset]
    }

    fn advance(&mut self) {
        self.offset += 1;
        if self.offset < self.word.len() {
            return;
        }
        self.offset = 0;
        if !crate::alphabet::increment(&mut self.word, self.sigma) {
            let l = self.word.len() + 1;
            self.word.clear();
            self.word.resize(l, 0);
        }
    }

    fn burst(&self, out: &mut BitVec) {
        dbin(self.matched, out);
        out.push(false);
        out.push(true);
    }
}

impl OnlineCompressor for EnumPrefix {
    fn init(&mut self, n: u64, _out: &mut BitVec) {
        *self = EnumPrefix::new(self.sigma);
        self.n = n;
    }

    fn feed(&mut self, sym: Sym, out: &mut BitVec) {
        if self.failed {
            out.push_bits(sym as u64, self.sym_bits);
        } else if sym == self.expected() {
            self.matched += 1;
            self.advance();
        } else {
            self.failed = true;
            self.burst(out);
            out.push_bits(sym as u64, self.sym_bits);
        }
    }

    fn finalize(&mut self, out: &mut BitVec) {
        if !self.failed {
            self.failed = true;
            self.burst(out);
        }
    }

    fn snapshot(&self) -> BitVec {
        let mut b = BitVec::new();
        push_gamma(&mut b, self.n);
        push_gamma(&mut b, self.matched);
        b.push(self.failed);
        push_gamma(&mut b, self.word.len() as u64);
        push_gamma(&mut b, self.offset as u64);
        for &s in &self.word {
            b.push_bits(s as u64, self.sym_bits);
        }
        b
    }

    fn state_bits(&self) -> u64 {
        gamma_len(self.n)
            + gamma_len(self.matched)
            + 1
            + gamma_len(self.word.len() as u64)
            + gamma_len(self.offset as u64)
            + self.word.len() as u64 * self.sym_bits as u64
    }
}
