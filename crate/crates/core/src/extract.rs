//! Classical post-processing of simulated outcome streams.
//!
//! Multi-outcome sources emit [`SymbolStream`]s; these are downgraded to
//! binary either by elimination (drop all but two symbols) or by
//! identification (map the two halves of an equipartition onto 0 and 1).
//! Two bit streams from the halves of an entangled pair are combined with
//! [`xor_combine`]; [`von_neumann_debias`] is the classical baseline.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sequence of symbols over the alphabet `0..alphabet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolStream {
    alphabet: u32,
    symbols: Vec<u32>,
}

impl SymbolStream {
    pub fn new(alphabet: u32, symbols: Vec<u32>) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::InvalidDimension(alphabet as usize));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::SymbolOutOfRange { symbol: s, alphabet });
        }
        Ok(Self { alphabet, symbols })
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Histogram of symbol occurrences.
    pub fn counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.alphabet as usize];
        for &s in &self.symbols {
            c[s as usize] += 1;
        }
        c
    }
}

impl From<&BitStream> for SymbolStream {
    fn from(bits: &BitStream) -> Self {
        Self {
            alphabet: 2,
            symbols: bits.bits.iter().map(|&b| b as u32).collect(),
        }
    }
}

/// Sequence of bits, one byte (0 or 1) per bit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bits: Vec<u8>,
}

impl BitStream {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::SymbolOutOfRange {
                symbol: b as u32,
                alphabet: 2,
            });
        }
        Ok(Self { bits })
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(it: I) -> Self {
        Self {
            bits: it.into_iter().map(u8::from).collect(),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }
}

impl TryFrom<&SymbolStream> for BitStream {
    type Error = Error;

    fn try_from(s: &SymbolStream) -> Result<Self> {
        if s.alphabet != 2 {
            return Err(Error::InvalidSelection(format!(
                "a bit stream needs alphabet 2, got {}",
                s.alphabet
            )));
        }
        Ok(Self {
            bits: s.symbols.iter().map(|&x| x as u8).collect(),
        })
    }
}

/// Split of an even alphabet into two equal halves mapped to 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equipartition {
    alphabet: u32,
    class_zero: BTreeSet<u32>,
    class_one: BTreeSet<u32>,
}

impl Equipartition {
    pub fn new(alphabet: u32, zero: &[u32], one: &[u32]) -> Result<Self> {
        if alphabet % 2 == 1 {
            return Err(Error::OddAlphabet(alphabet as usize));
        }
        let class_zero: BTreeSet<u32> = zero.iter().copied().collect();
        let class_one: BTreeSet<u32> = one.iter().copied().collect();
        if class_zero.len() != zero.len() || class_one.len() != one.len() {
            return Err(Error::InvalidPartition("repeated symbol in a class".into()));
        }
        if class_zero.len() != class_one.len() {
            return Err(Error::InvalidPartition(format!(
                "classes have sizes {} and {}",
                class_zero.len(),
                class_one.len()
            )));
        }
        if !class_zero.is_disjoint(&class_one) {
            return Err(Error::InvalidPartition("classes overlap".into()));
        }
        let all: BTreeSet<u32> = class_zero.union(&class_one).copied().collect();
        if all != (0..alphabet).collect() {
            return Err(Error::InvalidPartition(format!(
                "classes do not cover the alphabet 0..{alphabet}"
            )));
        }
        Ok(Self {
            alphabet,
            class_zero,
            class_one,
        })
    }

    /// Parses `"0,1|2,3"` (class zero, then class one).
    pub fn parse(alphabet: u32, spec: &str) -> Result<Self> {
        let (z, o) = spec
            .split_once('|')
            .ok_or_else(|| Error::InvalidPartition(format!("expected `a,b|c,d`, got `{spec}`")))?;
        let list = |s: &str| -> Result<Vec<u32>> {
            s.split(',')
                .map(|t| u32::from_str(t.trim()).map_err(|_| Error::InvalidPartition(format!("bad symbol `{t}`"))))
                .collect()
        };
        Self::new(alphabet, &list(z)?, &list(o)?)
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn class_zero(&self) -> &BTreeSet<u32> {
        &self.class_zero
    }

    pub fn class_one(&self) -> &BTreeSet<u32> {
        &self.class_one
    }

    fn lookup(&self) -> Vec<u8> {
        (0..self.alphabet)
            .map(|s| u8::from(self.class_one.contains(&s)))
            .collect()
    }
}

/// Keeps only the two symbols in `keep`, mapping `keep.0` to 0 and `keep.1` to 1.
pub fn eliminate(stream: &SymbolStream, keep: (u32, u32)) -> Result<BitStream> {
    let (zero, one) = keep;
    if zero == one {
        return Err(Error::InvalidSelection(format!(
            "kept symbols must differ, got {zero} twice"
        )));
    }
    if zero >= stream.alphabet || one >= stream.alphabet {
        return Err(Error::InvalidSelection(format!(
            "kept symbols ({zero}, {one}) outside alphabet of size {}",
            stream.alphabet
        )));
    }
    let bits = stream
        .symbols
        .iter()
        .filter_map(|&s| match s {
            s if s == zero => Some(0u8),
            s if s == one => Some(1u8),
            _ => None,
        })
        .collect();
    Ok(BitStream { bits })
}

/// Maps each symbol to the index of its class; length is preserved.
pub fn identify(stream: &SymbolStream, part: &Equipartition) -> Result<BitStream> {
    if stream.alphabet % 2 == 1 {
        return Err(Error::OddAlphabet(stream.alphabet as usize));
    }
    if part.alphabet != stream.alphabet {
        return Err(Error::InvalidPartition(format!(
            "partition is over {} symbols, stream over {}",
            part.alphabet, stream.alphabet
        )));
    }
    let table = part.lookup();
    Ok(BitStream {
        bits: stream.symbols.iter().map(|&s| table[s as usize]).collect(),
    })
}

/// `s_j = a_j XOR b_j`.
pub fn xor_combine(a: &BitStream, b: &BitStream) -> Result<BitStream> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(BitStream {
        bits: a.bits.iter().zip(&b.bits).map(|(x, y)| x ^ y).collect(),
    })
}

/// Non-overlapping pairs: `01 -> 0`, `10 -> 1`, `00`/`11` and a trailing
/// odd bit are dropped.
pub fn von_neumann_debias(a: &BitStream) -> BitStream {
    BitStream {
        bits: a.bits.chunks_exact(2).filter(|p| p[0] != p[1]).map(|p| p[0]).collect(),
    }
}

/// MSB-first packing; the final partial byte is zero-padded.
pub fn pack_bits(bits: &BitStream) -> Vec<u8> {
    bits.bits
        .chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |byte, (i, &b)| byte | (b << (7 - i)))
        })
        .collect()
}

/// Inverse of [`pack_bits`] given the recorded bit length.
pub fn unpack_bits(bytes: &[u8], bit_len: u64) -> Result<BitStream> {
    let need = bit_len.div_ceil(8);
    if need != bytes.len() as u64 {
        return Err(Error::BitLength {
            bits: bit_len,
            bytes: bytes.len(),
        });
    }
    let bits = (0..bit_len as usize)
        .map(|i| (bytes[i / 8] >> (7 - (i % 8))) & 1)
        .collect();
    Ok(BitStream { bits })
}
