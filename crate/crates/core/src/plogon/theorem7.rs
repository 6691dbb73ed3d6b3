use super::OnlineCompressor;
use crate::alphabet::{ceil_log2, Sym};
use crate::bits::{gamma_len, push_gamma, BitVec};

/// Bits per index in zone `n`.
pub fn index_width(n: u64) -> u32 {
    2 * ceil_log2(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Fresh { block: u64, pos: u64 },
    Index { j: u64, read: u32, value: u64 },
    Compare { j: u64, idx: u64, pos: u64 },
    Error,
}

/// Compressor for the indexed-repeat sequence over a binary alphabet. Every
/// output bit is doubled except the comma `10` after the length header and
/// the error flag `01`. Zone `n` starts with `n²` fresh blocks of `n` bits
/// (echoed and stored), followed by `2^n` pairs of an index and a repeated
/// block, of which only the index is echoed.
#[derive(Clone, Debug)]
pub struct IndexCompressor {
    first_zone: u64,
    n_total: u64,
    zone: u64,
    phase: Phase,
    stored: Vec<Sym>,
}

impl IndexCompressor {
    pub fn new(first_zone: u64) -> Self {
        assert!(first_zone >= 2);
        IndexCompressor {
            first_zone,
            n_total: 0,
            zone: first_zone,
            phase: Phase::Fresh { block: 0, pos: 0 },
            stored: Vec::new(),
        }
    }

    pub fn in_error_mode(&self) -> bool {
        self.phase == Phase::Error
    }

    fn doubled(out: &mut BitVec, s: Sym) {
        out.push(s == 1);
        out.push(s == 1);
    }

    fn flag(out: &mut BitVec) {
        out.push(false);
        out.push(true);
    }

    fn after_pair(&mut self, j: u64) {
        let j = j + 1;
        if j == 1u64 << self.zone {
            self.zone += 1;
            self.stored.clear();
            self.phase = Phase::Fresh { block: 0, pos: 0 };
        } else {
            self.phase = Phase::Index { j, read: 0, value: 0 };
        }
    }

    fn phase_regs(&self) -> (u64, [u64; 3]) {
        match self.phase {
            Phase::Fresh { block, pos } => (0, [block, pos, 0]),
            Phase::Index { j, read, value } => (1, [j, read as u64, value]),
            Phase::Compare { j, idx, pos } => (2, [j, idx, pos]),
            Phase::Error => (3, [0, 0, 0]),
        }
    }
}

impl OnlineCompressor for IndexCompressor {
    fn init(&mut self, n: u64, out: &mut BitVec) {
        *self = IndexCompressor::new(self.first_zone);
        self.n_total = n;
        let width = (64 - n.leading_zeros()).max(1);
        for i in (0..width).rev() {
            Self::doubled(out, ((n >> i) & 1) as Sym);
        }
        out.push(true);
        out.push(false);
    }

    fn feed(&mut self, sym: Sym, out: &mut BitVec) {
        let n = self.zone;
        match self.phase {
            Phase::Fresh { block, pos } => {
                Self::doubled(out, sym);
                self.stored.push(sym);
                let (block, pos) = if pos + 1 == n { (block + 1, 0) } else { (block, pos + 1) };
                self.phase = if block == n * n { Phase::Index { j: 0, read: 0, value: 0 } } else { Phase::Fresh { block, pos } };
            }
            Phase::Index { j, read, value } => {
                Self::doubled(out, sym);
                let value = value << 1 | sym as u64;
                let read = read + 1;
                self.phase = if read < index_width(n) {
                    Phase::Index { j, read, value }
                } else if value < n * n {
                    Phase::Compare { j, idx: value, pos: 0 }
                } else {
                    Self::flag(out);
                    Phase::Error
                };
            }
            Phase::Compare { j, idx, pos } => {
                let base = (idx * n) as usize;
                if self.stored[base + pos as usize] == sym {
                    if pos + 1 == n {
                        self.after_pair(j);
                    } else {
                        self.phase = Phase::Compare { j, idx, pos: pos + 1 };
                    }
                } else {
                    Self::flag(out);
                    for i in 0..pos as usize {
                        Self::doubled(out, self.stored[base + i]);
                    }
                    Self::doubled(out, sym);
                    self.stored.clear();
                    self.phase = Phase::Error;
                }
            }
            Phase::Error => Self::doubled(out, sym),
        }
    }

    fn finalize(&mut self, _out: &mut BitVec) {}

    fn snapshot(&self) -> BitVec {
        let mut b = BitVec::new();
        let (tag, regs) = self.phase_regs();
        push_gamma(&mut b, self.n_total);
        push_gamma(&mut b, self.zone);
        b.push_bits(tag, 2);
        for r in regs {
            push_gamma(&mut b, r);
        }
        for &s in &self.stored {
            b.push(s == 1);
        }
        b
    }

    fn state_bits(&self) -> u64 {
        let (_, regs) = self.phase_regs();
        gamma_len(self.n_total)
            + gamma_len(self.zone)
            + 2
            + regs.iter().map(|&r| gamma_len(r)).sum::<u64>()
            + self.stored.len() as u64
    }
}
