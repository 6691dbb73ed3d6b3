//! Packed bit vectors, most-significant bit first within each byte.

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVec {
    bytes: Vec<u8>,
    len: usize,
}

impl BitVec {
    pub fn new() -> Self {
        BitVec::default()
    }

    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        let mut v = BitVec { bytes, len };
        v.bytes.truncate(len.div_ceil(8));
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVec::new();
        for &b in bits {
            v.push(b != 0);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, high bit first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub fn extend(&mut self, other: &BitVec) {
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

/// Sequential reader over a [`BitVec`].
pub struct BitReader<'a> {
    bits: &'a BitVec,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitVec) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    /// Reads `width` bits as an unsigned integer, or `None` if the stream is too short.
    pub fn read(&mut self, width: u32) -> Option<u64> {
        if self.remaining() < width as usize {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.bits.get(self.pos) as u64;
            self.pos += 1;
        }
        Some(v)
    }
}

/// Elias gamma code of `v + 1`, used to size canonical state snapshots.
pub fn push_gamma(out: &mut BitVec, v: u64) {
    let x = v + 1;
    let width = 64 - x.leading_zeros();
    for _ in 1..width {
        out.push(false);
    }
    out.push_bits(x, width);
}

/// Length of [`push_gamma`]'s code for `v`.
pub fn gamma_len(v: u64) -> u64 {
    let width = 64 - (v + 1).leading_zeros() as u64;
    2 * width - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_packing() {
        let mut v = BitVec::new();
        v.push_bits(0b101, 3);
        v.push_bits(0b11111, 5);
        v.push(true);
        assert_eq!(v.as_bytes(), &[0b1011_1111, 0b1000_0000]);
        assert_eq!(v.len(), 9);
        let mut r = BitReader::new(&v);
        assert_eq!(r.read(3), Some(5));
        assert_eq!(r.read(6), Some(0b111111));
        assert_eq!(r.read(1), None);
    }

    #[test]
    fn gamma_lengths() {
        let mut v = BitVec::new();
        push_gamma(&mut v, 0);
        assert_eq!(v.to_bits(), vec![1]);
        let mut v = BitVec::new();
        push_gamma(&mut v, 4);
        assert_eq!(v.to_bits(), vec![0, 0, 1, 0, 1]);
        assert_eq!(gamma_len(4), 5);
        assert_eq!(gamma_len(0), 1);
    }
}
