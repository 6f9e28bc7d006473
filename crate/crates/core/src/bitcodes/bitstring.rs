use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A finite sequence of bits, stored most-significant-bit first in 64-bit words.
///
/// Bit `i` lives in word `i / 64` at position `63 - i % 64`, so the packed
/// byte form is simply the big-endian bytes of the words.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString { words: Vec::with_capacity(bits.div_ceil(WORD)), len: 0 }
    }

    /// `len` copies of `bit`.
    pub fn repeat(bit: bool, len: usize) -> Self {
        let mut s = Self::with_capacity(len);
        s.push_run(bit, len);
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::new();
        for b in bits {
            s.push(b);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.words[i / WORD] >> (WORD - 1 - i % WORD) & 1 == 1)
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let off = self.len % WORD;
        if off == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (WORD - 1 - off);
        }
        self.len += 1;
    }

    pub fn push_run(&mut self, bit: bool, mut count: usize) {
        while count > 0 {
            let off = self.len % WORD;
            if off == 0 {
                self.words.push(0);
            }
            let take = count.min(WORD - off);
            if bit {
                // `take` ones starting at offset `off` of the last word.
                let ones = if take == WORD { u64::MAX } else { ((1u64 << take) - 1) << (WORD - off - take) };
                *self.words.last_mut().unwrap() |= ones;
            }
            self.len += take;
            count -= take;
        }
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u128, width: u32) {
        debug_assert!(width <= 128);
        debug_assert!(width == 128 || value >> width == 0, "{value} does not fit in {width} bits");
        for k in (0..width).rev() {
            self.push(value >> k & 1 == 1);
        }
    }

    pub fn append(&mut self, other: &BitString) {
        if self.len.is_multiple_of(WORD) {
            self.words.truncate(self.len / WORD);
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a BitString>>(parts: I) -> BitString {
        let mut out = BitString::new();
        for p in parts {
            out.append(p);
        }
        out
    }

    /// n1(x): number of one bits.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// n0(x): number of zero bits.
    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.words[i / WORD] >> (WORD - 1 - i % WORD) & 1 == 1)
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        prefix.len <= self.len && (0..prefix.len).all(|i| self.get(i) == prefix.get(i))
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitString {
        assert!(range.end <= self.len, "slice end {} past length {}", range.end, self.len);
        let mut out = BitString::with_capacity(range.len());
        for i in range {
            out.push(self.get(i).unwrap());
        }
        out
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }

    pub fn to_packed(&self) -> PackedBits {
        let nbytes = self.len.div_ceil(8);
        let bytes = self.words.iter().flat_map(|w| w.to_be_bytes()).take(nbytes).collect();
        PackedBits { bit_len: self.len, bytes }
    }

    pub fn from_packed(packed: &PackedBits) -> Result<Self> {
        if packed.bytes.len() != packed.bit_len.div_ceil(8) {
            return Err(Error::Malformed(format!(
                "{} byte(s) cannot carry {} bit(s)",
                packed.bytes.len(),
                packed.bit_len
            )));
        }
        let mut words: Vec<u64> = packed
            .bytes
            .chunks(8)
            .map(|c| {
                let mut buf = [0u8; 8];
                buf[..c.len()].copy_from_slice(c);
                u64::from_be_bytes(buf)
            })
            .collect();
        let tail = packed.bit_len % WORD;
        if let (Some(last), true) = (words.last_mut(), tail != 0) {
            if *last << tail != 0 {
                return Err(Error::Malformed("nonzero padding bits".into()));
            }
            *last &= !(u64::MAX >> tail);
        }
        Ok(BitString { words, len: packed.bit_len })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BitString::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return Err(Error::Malformed(format!("character {c:?} at position {i} is not a bit"))),
            }
        }
        Ok(out)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString::from_bits(iter)
    }
}

/// Cursor for streaming decode.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl BitReader<'_> {
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len - self.pos
    }

    pub fn is_at_end(&self) -> bool {
        self.pos == self.bits.len
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let b = self.bits.get(self.pos).ok_or(Error::Truncated { position: self.pos, needed: 1 })?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_uint(&mut self, width: u32) -> Result<u128> {
        if width > 128 {
            return Err(Error::Overflow(format!("{width}-bit field")));
        }
        if self.remaining() < width as usize {
            return Err(Error::Truncated { position: self.pos, needed: width as usize - self.remaining() });
        }
        let mut v = 0u128;
        for _ in 0..width {
            v = v << 1 | self.read_bit()? as u128;
        }
        Ok(v)
    }

    pub fn read_bits(&mut self, count: usize) -> Result<BitString> {
        if self.remaining() < count {
            return Err(Error::Truncated { position: self.pos, needed: count - self.remaining() });
        }
        let out = self.bits.slice(self.pos..self.pos + count);
        self.pos += count;
        Ok(out)
    }

    /// Consumes a block of one bits and the zero that ends it, returning the
    /// number of ones.
    pub fn read_ones_then_zero(&mut self) -> Result<usize> {
        let start = self.pos;
        loop {
            if self.pos >= self.bits.len {
                self.pos = start;
                return Err(Error::Truncated { position: self.bits.len, needed: 1 });
            }
            let off = self.pos % WORD;
            let word = self.bits.words[self.pos / WORD] << off;
            let avail = (WORD - off).min(self.bits.len - self.pos);
            let ones = (word.leading_ones() as usize).min(avail);
            self.pos += ones;
            if ones < avail {
                self.pos += 1;
                return Ok(self.pos - start - 1);
            }
        }
    }
}

/// Packed-byte form of a [`BitString`]: big-endian bit order inside each
/// byte, final partial byte zero padded, true bit length carried alongside.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedBits {
    pub bit_len: usize,
    pub bytes: Vec<u8>,
}

impl PackedBits {
    /// File layout: 8-byte big-endian bit length, then the packed bytes.
    pub fn to_file_bytes(&self) -> Vec<u8> {
        let mut out = (self.bit_len as u64).to_be_bytes().to_vec();
        out.extend_from_slice(&self.bytes);
        out
    }

    pub fn from_file_bytes(data: &[u8]) -> Result<Self> {
        if data.len() < 8 {
            return Err(Error::Malformed("file shorter than its 8-byte length header".into()));
        }
        let bit_len = u64::from_be_bytes(data[..8].try_into().unwrap());
        let bit_len = usize::try_from(bit_len).map_err(|_| Error::Overflow("bit length".into()))?;
        Ok(PackedBits { bit_len, bytes: data[8..].to_vec() })
    }
}
