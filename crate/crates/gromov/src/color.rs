//! Points of the Cantor color space and their exact dyadic ultrametric.
//!
//! A color is a one-sided infinite bit sequence that is eventually zero,
//! stored as the finite canonical prefix (no trailing zeros). The distance
//! between two distinct colors is `2^-i` where `i` is the first index at
//! which the zero-extended sequences differ.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational used for tolerances everywhere in the crate.
pub type Rational = BigRational;

/// Parse a rational written as `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator {p:?}: {e}"))?;
    let q = BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator {q:?}: {e}"))?;
    if q.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(p, q))
}

/// Render a rational as `p/q` (or `p` when the denominator is 1).
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `1/n` as an exact rational.
pub fn one_over(n: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(n))
}

/// A point of the Cantor space, in canonical form: the stored bit vector
/// never ends in 0, and the empty vector is the all-zeros point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Color {
    bits: Vec<u8>,
}

impl Color {
    /// The all-zeros point.
    pub fn zeros() -> Self {
        Color { bits: Vec::new() }
    }

    /// Build from raw bits, stripping trailing zeros.
    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        let mut bits: Vec<u8> = bits.into_iter().map(|b| if b == 0 { 0 } else { 1 }).collect();
        while bits.last() == Some(&0) {
            bits.pop();
        }
        Color { bits }
    }

    /// Bit at index `i` of the zero-extended sequence.
    pub fn bit(&self, i: usize) -> u8 {
        self.bits.get(i).copied().unwrap_or(0)
    }

    /// Length of the canonical (trailing-zero-free) representation.
    pub fn canonical_len(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_zeros(&self) -> bool {
        self.bits.is_empty()
    }

    /// The `i`-th canonical finite bit string in the fixed enumeration of
    /// the countable dense subset: the empty string first, then strings
    /// ending in 1 ordered by length, then lexicographically.
    pub fn nth_canonical(i: usize) -> Self {
        if i == 0 {
            return Color::zeros();
        }
        // Nonzero canonical strings of length L: 2^(L-1) of them.
        let mut j = i - 1;
        let mut len = 1usize;
        loop {
            let count = 1usize << (len - 1);
            if j < count {
                break;
            }
            j -= count;
            len += 1;
        }
        // The j-th length-`len` string in lex order: j as big-endian bits
        // over the first len-1 positions, then a final 1.
        let mut bits = Vec::with_capacity(len);
        for k in (0..len - 1).rev() {
            bits.push(((j >> k) & 1) as u8);
        }
        bits.push(1);
        Color { bits }
    }

    /// The enumeration index inverse to [`Color::nth_canonical`].
    pub fn canonical_index(&self) -> usize {
        if self.bits.is_empty() {
            return 0;
        }
        let len = self.bits.len();
        let mut j = 0usize;
        for &b in &self.bits[..len - 1] {
            j = (j << 1) | b as usize;
        }
        // strings shorter than len, plus the empty string
        (1usize << (len - 1)) + j
    }

    /// Truncate to the first `len` bits (zero-extended), then append `tail`.
    pub fn with_tail(&self, len: usize, tail: &Color) -> Color {
        let mut bits: Vec<u8> = (0..len).map(|i| self.bit(i)).collect();
        bits.extend_from_slice(tail.bits());
        Color::from_bits(bits)
    }
}

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Color({self})")
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Color {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c => return Err(format!("invalid bit character {c:?}")),
            }
        }
        Ok(Color::from_bits(bits))
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An exact value of the form `0` or `2^-i`, the only distances the color
/// ultrametric can take.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum DyadicDistance {
    Zero,
    /// The value `2^-exp`.
    PowNeg(u32),
}

impl DyadicDistance {
    pub fn is_zero(&self) -> bool {
        matches!(self, DyadicDistance::Zero)
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            DyadicDistance::Zero => Rational::zero(),
            DyadicDistance::PowNeg(e) => {
                Rational::new(BigInt::one(), BigInt::one() << (*e as usize))
            }
        }
    }
}

impl PartialOrd for DyadicDistance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicDistance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use DyadicDistance::*;
        match (self, other) {
            (Zero, Zero) => std::cmp::Ordering::Equal,
            (Zero, PowNeg(_)) => std::cmp::Ordering::Less,
            (PowNeg(_), Zero) => std::cmp::Ordering::Greater,
            // larger exponent = smaller value
            (PowNeg(a), PowNeg(b)) => b.cmp(a),
        }
    }
}

impl Serialize for DyadicDistance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            DyadicDistance::Zero => s.serialize_u8(0),
            DyadicDistance::PowNeg(e) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("pow2_exp", e)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for DyadicDistance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Zero(u8),
            Pow { pow2_exp: u32 },
        }
        match Repr::deserialize(d)? {
            Repr::Zero(0) => Ok(DyadicDistance::Zero),
            Repr::Zero(v) => Err(serde::de::Error::custom(format!(
                "expected 0 or {{\"pow2_exp\": i}}, got {v}"
            ))),
            Repr::Pow { pow2_exp } => Ok(DyadicDistance::PowNeg(pow2_exp)),
        }
    }
}

/// Exact distance between two colors: `2^-i` for the first differing index,
/// `0` for equal points.
pub fn color_distance(a: &Color, b: &Color) -> DyadicDistance {
    let n = a.canonical_len().max(b.canonical_len());
    for i in 0..n {
        if a.bit(i) != b.bit(i) {
            return DyadicDistance::PowNeg(i as u32);
        }
    }
    DyadicDistance::Zero
}
