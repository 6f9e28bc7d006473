//! Prefix-free codes for the natural numbers: unary, Elias γ/δ/ω, and the
//! fixed-length code for a finite range.

use super::bitstring::{BitReader, BitString};
use crate::error::{Error, Result};

/// Number of binary digits of `i` (`bitlen(0) = 0`).
#[inline]
pub fn bitlen(i: u64) -> u32 {
    64 - i.leading_zeros()
}

/// A prefix-free code over an infinite range of integers `MIN..`.
pub trait UniversalCode {
    /// Smallest encodable value.
    const MIN: u64;
    const NAME: &'static str;

    fn encode_into(out: &mut BitString, value: u64) -> Result<()>;

    fn decode(reader: &mut BitReader<'_>) -> Result<u64>;

    fn codeword_len(value: u64) -> Result<usize>;

    fn encode(value: u64) -> Result<BitString> {
        let mut out = BitString::with_capacity(Self::codeword_len(value)?);
        Self::encode_into(&mut out, value)?;
        Ok(out)
    }

    /// Decodes a string that must hold exactly one codeword.
    fn decode_exact(bits: &BitString) -> Result<u64> {
        let mut r = bits.reader();
        let v = Self::decode(&mut r)?;
        if !r.is_at_end() {
            return Err(Error::Malformed(format!("{} trailing bit(s) after {} codeword", r.remaining(), Self::NAME)));
        }
        Ok(v)
    }
}

fn check_min<C: UniversalCode + ?Sized>(value: u64) -> Result<()> {
    if value < C::MIN {
        return Err(Error::range(value, format!(">= {} for {}", C::MIN, C::NAME)));
    }
    Ok(())
}

/// `i` one bits followed by a zero bit; `|U(i)| = i + 1`.
#[derive(Debug, Clone, Copy)]
pub struct Unary;

impl UniversalCode for Unary {
    const MIN: u64 = 0;
    const NAME: &'static str = "unary";

    fn encode_into(out: &mut BitString, value: u64) -> Result<()> {
        let n = usize::try_from(value).map_err(|_| Error::Overflow("unary codeword length".into()))?;
        out.push_run(true, n);
        out.push(false);
        Ok(())
    }

    fn decode(reader: &mut BitReader<'_>) -> Result<u64> {
        Ok(reader.read_ones_then_zero()? as u64)
    }

    fn codeword_len(value: u64) -> Result<usize> {
        usize::try_from(value)
            .ok()
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| Error::Overflow("unary codeword length".into()))
    }
}

/// Unary code of `bitlen(i)`, then the digits of `i` below its leading one.
#[derive(Debug, Clone, Copy)]
pub struct EliasGamma;

impl UniversalCode for EliasGamma {
    const MIN: u64 = 1;
    const NAME: &'static str = "Elias gamma";

    fn encode_into(out: &mut BitString, value: u64) -> Result<()> {
        check_min::<Self>(value)?;
        let b = bitlen(value);
        Unary::encode_into(out, b as u64)?;
        out.push_uint(strip_leading(value), b - 1);
        Ok(())
    }

    fn decode(reader: &mut BitReader<'_>) -> Result<u64> {
        let b = Unary::decode(reader)?;
        read_with_leading_one(reader, b, Self::NAME)
    }

    fn codeword_len(value: u64) -> Result<usize> {
        check_min::<Self>(value)?;
        Ok(2 * bitlen(value) as usize)
    }
}

/// Elias γ code of `bitlen(i)`, then the digits of `i` below its leading one.
#[derive(Debug, Clone, Copy)]
pub struct EliasDelta;

impl UniversalCode for EliasDelta {
    const MIN: u64 = 1;
    const NAME: &'static str = "Elias delta";

    fn encode_into(out: &mut BitString, value: u64) -> Result<()> {
        check_min::<Self>(value)?;
        let b = bitlen(value);
        EliasGamma::encode_into(out, b as u64)?;
        out.push_uint(strip_leading(value), b - 1);
        Ok(())
    }

    fn decode(reader: &mut BitReader<'_>) -> Result<u64> {
        let b = EliasGamma::decode(reader)?;
        read_with_leading_one(reader, b, Self::NAME)
    }

    fn codeword_len(value: u64) -> Result<usize> {
        check_min::<Self>(value)?;
        let b = bitlen(value);
        Ok(2 * bitlen(b as u64) as usize + b as usize - 1)
    }
}

/// Recursive length-of-length code.
///
/// The codeword for `i` is a chain of groups ending in a single `0`: start
/// from `"0"`, prepend `binary(i)`, set `i ← bitlen(i) − 1`, and repeat while
/// `i > 1`. Every group begins with a one bit, so the decoder reads a group
/// of `n + 1` bits (where `n` is the previous group's value, initially 1)
/// whenever it sees a one, and stops at the first zero. `1` encodes to `"0"`.
#[derive(Debug, Clone, Copy)]
pub struct EliasOmega;

impl UniversalCode for EliasOmega {
    const MIN: u64 = 1;
    const NAME: &'static str = "Elias omega";

    fn encode_into(out: &mut BitString, value: u64) -> Result<()> {
        check_min::<Self>(value)?;
        let mut groups = Vec::new();
        let mut n = value;
        while n > 1 {
            groups.push(n);
            n = bitlen(n) as u64 - 1;
        }
        for &g in groups.iter().rev() {
            out.push_uint(g as u128, bitlen(g));
        }
        out.push(false);
        Ok(())
    }

    fn decode(reader: &mut BitReader<'_>) -> Result<u64> {
        let mut n: u64 = 1;
        loop {
            if !reader.read_bit()? {
                return Ok(n);
            }
            if n >= 64 {
                return Err(Error::Overflow(format!("{}-bit Elias omega group", n + 1)));
            }
            let low = reader.read_uint(n as u32)? as u64;
            n = 1 << n | low;
        }
    }

    fn codeword_len(value: u64) -> Result<usize> {
        check_min::<Self>(value)?;
        let mut len = 1;
        let mut n = value;
        while n > 1 {
            len += bitlen(n) as usize;
            n = bitlen(n) as u64 - 1;
        }
        Ok(len)
    }
}

#[inline]
fn strip_leading(value: u64) -> u128 {
    (value & !(1u64 << (bitlen(value) - 1))) as u128
}

fn read_with_leading_one(reader: &mut BitReader<'_>, b: u64, name: &str) -> Result<u64> {
    match b {
        0 => Err(Error::Malformed(format!("{name} length prefix of zero"))),
        1..=64 => {
            let low = reader.read_uint(b as u32 - 1)? as u64;
            Ok(1u64 << (b - 1) | low)
        }
        _ => Err(Error::Overflow(format!("{b}-bit {name} payload"))),
    }
}

/// Field width of the fixed-length code for a domain of size `m`: ⌈log₂ m⌉.
pub fn fixed_width(m: u128) -> Result<u32> {
    match m {
        0 => Err(Error::arg("m", "domain size must be at least 1")),
        1 => Ok(0),
        _ => Ok(128 - (m - 1).leading_zeros()),
    }
}

/// Appends the ⌈log₂ m⌉-bit binary form of `value`, zero padded on the left.
pub fn fixed_encode_into(out: &mut BitString, value: u128, m: u128) -> Result<()> {
    let w = fixed_width(m)?;
    if value >= m {
        return Err(Error::range(value, format!("< {m}")));
    }
    out.push_uint(value, w);
    Ok(())
}

pub fn fixed_encode(value: u128, m: u128) -> Result<BitString> {
    let mut out = BitString::new();
    fixed_encode_into(&mut out, value, m)?;
    Ok(out)
}

pub fn fixed_decode(reader: &mut BitReader<'_>, m: u128) -> Result<u128> {
    let w = fixed_width(m)?;
    let v = reader.read_uint(w)?;
    if v >= m {
        return Err(Error::Malformed(format!("fixed-length field {v} not below domain size {m}")));
    }
    Ok(v)
}

/// The integer codes by name, for callers that pick a code at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegerCode {
    Unary,
    EliasGamma,
    EliasDelta,
    EliasOmega,
}

impl IntegerCode {
    pub const ALL: [IntegerCode; 4] =
        [IntegerCode::Unary, IntegerCode::EliasGamma, IntegerCode::EliasDelta, IntegerCode::EliasOmega];

    pub fn min_value(self) -> u64 {
        match self {
            IntegerCode::Unary => Unary::MIN,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IntegerCode::Unary => "unary",
            IntegerCode::EliasGamma => "elias-gamma",
            IntegerCode::EliasDelta => "elias-delta",
            IntegerCode::EliasOmega => "elias-omega",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn encode_into(self, out: &mut BitString, value: u64) -> Result<()> {
        match self {
            IntegerCode::Unary => Unary::encode_into(out, value),
            IntegerCode::EliasGamma => EliasGamma::encode_into(out, value),
            IntegerCode::EliasDelta => EliasDelta::encode_into(out, value),
            IntegerCode::EliasOmega => EliasOmega::encode_into(out, value),
        }
    }

    pub fn encode(self, value: u64) -> Result<BitString> {
        let mut out = BitString::new();
        self.encode_into(&mut out, value)?;
        Ok(out)
    }

    pub fn decode(self, reader: &mut BitReader<'_>) -> Result<u64> {
        match self {
            IntegerCode::Unary => Unary::decode(reader),
            IntegerCode::EliasGamma => EliasGamma::decode(reader),
            IntegerCode::EliasDelta => EliasDelta::decode(reader),
            IntegerCode::EliasOmega => EliasOmega::decode(reader),
        }
    }

    pub fn decode_exact(self, bits: &BitString) -> Result<u64> {
        match self {
            IntegerCode::Unary => Unary::decode_exact(bits),
            IntegerCode::EliasGamma => EliasGamma::decode_exact(bits),
            IntegerCode::EliasDelta => EliasDelta::decode_exact(bits),
            IntegerCode::EliasOmega => EliasOmega::decode_exact(bits),
        }
    }

    pub fn codeword_len(self, value: u64) -> Result<usize> {
        match self {
            IntegerCode::Unary => Unary::codeword_len(value),
            IntegerCode::EliasGamma => EliasGamma::codeword_len(value),
            IntegerCode::EliasDelta => EliasDelta::codeword_len(value),
            IntegerCode::EliasOmega => EliasOmega::codeword_len(value),
        }
    }

    /// Concatenates the codewords of `values`.
    pub fn encode_stream(self, values: &[u64]) -> Result<BitString> {
        let mut out = BitString::new();
        for &v in values {
            self.encode_into(&mut out, v)?;
        }
        Ok(out)
    }

    /// Reads codewords left to right until the input is exhausted.
    pub fn decode_stream(self, bits: &BitString) -> Result<Vec<u64>> {
        let mut r = bits.reader();
        let mut out = Vec::new();
        while !r.is_at_end() {
            out.push(self.decode(&mut r)?);
        }
        Ok(out)
    }
}
