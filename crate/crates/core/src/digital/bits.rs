use serde::{Deserialize, Serialize};

/// Packed bit sequence, MSB-first within each byte.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitBuffer {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bytes: vec![0; len.div_ceil(8)],
            len,
        }
    }

    /// Takes the first `len` bits of `bytes`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8, "bit length exceeds byte buffer");
        let mut b = bytes[..len.div_ceil(8)].to_vec();
        if len % 8 != 0 {
            if let Some(last) = b.last_mut() {
                *last &= 0xFFu8 << (8 - len % 8);
            }
        }
        Self { bytes: b, len }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = Self::new();
        for bit in bits {
            b.push(bit);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Backing bytes; unused tail bits are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.bytes[i / 8] >> (7 - i % 8) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u8 << (7 - i % 8);
        if bit {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.get(i);
        self.set(i, !b);
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        self.len += 1;
        if bit {
            let i = self.len - 1;
            self.bytes[i / 8] |= 1 << (7 - i % 8);
        }
    }

    /// Appends the low `n` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, n: u32) {
        for k in (0..n).rev() {
            self.push(value >> k & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &BitBuffer) {
        for b in other.iter() {
            self.push(b);
        }
    }

    /// Pads with zeros (or truncates) to exactly `len` bits.
    pub fn resize(&mut self, len: usize) {
        if len < self.len {
            *self = Self::from_bytes(&self.bytes, len);
        } else {
            self.bytes.resize(len.div_ceil(8), 0);
            self.len = len;
        }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitBuffer {
        assert!(start <= end && end <= self.len);
        if start % 8 == 0 {
            return Self::from_bytes(&self.bytes[start / 8..], end - start);
        }
        Self::from_bits((start..end).map(|i| self.get(i)))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn xor(&self, other: &BitBuffer) -> BitBuffer {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        let bytes = self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| a ^ b)
            .collect();
        Self {
            bytes,
            len: self.len,
        }
    }

    pub fn hamming_distance(&self, other: &BitBuffer) -> usize {
        self.xor(other).count_ones()
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { buf: self, pos: 0 }
    }
}

pub struct BitReader<'a> {
    buf: &'a BitBuffer,
    pos: usize,
}

impl BitReader<'_> {
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    /// Reads `n ≤ 64` bits MSB-first, or `None` if the buffer runs out.
    pub fn read(&mut self, n: u32) -> Option<u64> {
        if (n as usize) > self.remaining() {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..n {
            v = v << 1 | u64::from(self.buf.get(self.pos));
            self.pos += 1;
        }
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn push_and_read_fields() {
        let mut b = BitBuffer::new();
        b.push_bits(0b101, 3);
        b.push_bits(0xBEEF, 16);
        b.push(true);
        assert_eq!(b.len(), 20);
        let mut r = b.reader();
        assert_eq!(r.read(3), Some(0b101));
        assert_eq!(r.read(16), Some(0xBEEF));
        assert_eq!(r.read(1), Some(1));
        assert_eq!(r.read(1), None);
    }

    #[test]
    fn resize_and_slice() {
        let mut b = BitBuffer::from_bits([true; 13]);
        b.resize(20);
        assert_eq!(b.count_ones(), 13);
        b.resize(5);
        assert_eq!(b.count_ones(), 5);
        assert_eq!(b.as_bytes(), &[0b1111_1000]);
        let s = BitBuffer::from_bits((0..30).map(|i| i % 3 == 0)).slice(3, 17);
        assert_eq!(s, BitBuffer::from_bits((3..17).map(|i| i % 3 == 0)));
    }

    proptest! {
        #[test]
        fn xor_is_self_inverse(bits in proptest::collection::vec(any::<bool>(), 0..200), mask in proptest::collection::vec(any::<bool>(), 200)) {
            let a = BitBuffer::from_bits(bits.iter().copied());
            let m = BitBuffer::from_bits(mask[..bits.len()].iter().copied());
            prop_assert_eq!(a.xor(&m).xor(&m), a.clone());
            prop_assert_eq!(a.hamming_distance(&a), 0);
        }
    }
}
