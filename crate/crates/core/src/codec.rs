//! Encoding symbol sequences to bit streams and back.
//!
//! Serialized streams are an 8-byte little-endian bit count followed by the
//! bits packed most-significant-first, zero padded to a whole byte.

use std::fmt;
use std::str::FromStr;

use crate::codebook::Codebook;
use crate::costmodel::CostModel;
use crate::error::{Error, Result};
use crate::metrics::canonical_counts;

const HEADER_LEN: usize = 8;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    /// Number of one bits.
    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Packed payload without the header.
    pub fn payload(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.bytes.len());
        out.extend_from_slice(&(self.len as u64).to_le_bytes());
        out.extend_from_slice(&self.bytes);
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let header: [u8; HEADER_LEN] = data
            .get(..HEADER_LEN)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| Error::MalformedStream(format!("{} bytes is shorter than the header", data.len())))?;
        let len = usize::try_from(u64::from_le_bytes(header))
            .map_err(|_| Error::MalformedStream("bit count does not fit in memory".into()))?;
        let payload = &data[HEADER_LEN..];
        if payload.len() != len.div_ceil(8) {
            return Err(Error::MalformedStream(format!(
                "header announces {len} bits but {} payload bytes follow",
                payload.len()
            )));
        }
        if len % 8 != 0 && payload[len / 8] & (0xff >> (len % 8)) != 0 {
            return Err(Error::MalformedStream("padding bits are not zero".into()));
        }
        Ok(BitStream { bytes: payload.to_vec(), len })
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut bs = BitStream::new();
        for b in iter {
            bs.push(b);
        }
        bs
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses `0`/`1` characters; whitespace is ignored.
impl FromStr for BitStream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid("bits", format!("unexpected character {other:?}"))),
            })
            .collect()
    }
}

/// Concatenate the codewords of `symbols`, inverting bits when the codebook
/// is flagged as inverted.
pub fn encode(symbols: &[usize], cb: &Codebook) -> Result<BitStream> {
    let mut bs = BitStream::new();
    for (position, &symbol) in symbols.iter().enumerate() {
        let word = cb.entry(symbol).ok_or(Error::SymbolOutOfRange { symbol, position, m: cb.m() })?;
        for &b in word.bits() {
            bs.push(b ^ cb.inverted());
        }
    }
    Ok(bs)
}

const NONE: u32 = u32::MAX;

/// Code tree over the transmitted bits.
#[derive(Debug, Clone)]
struct Trie {
    children: Vec<[u32; 2]>,
    symbol: Vec<Option<usize>>,
}

impl Trie {
    fn new(cb: &Codebook) -> Self {
        let mut t = Trie { children: vec![[NONE; 2]], symbol: vec![None] };
        for (s, word) in cb.entries().iter().enumerate() {
            let mut at = 0usize;
            for &b in word.bits() {
                let b = usize::from(b ^ cb.inverted());
                if t.children[at][b] == NONE {
                    t.children[at][b] = t.children.len() as u32;
                    t.children.push([NONE; 2]);
                    t.symbol.push(None);
                }
                at = t.children[at][b] as usize;
            }
            t.symbol[at] = Some(s);
        }
        t
    }
}

/// Incremental decoder: feed bits one at a time, get a symbol back at each
/// codeword boundary. It never looks past the bit it is given.
#[derive(Debug, Clone)]
pub struct Decoder {
    trie: Trie,
    at: usize,
    offset: usize,
    word_start: usize,
}

impl Decoder {
    pub fn new(cb: &Codebook) -> Self {
        Decoder { trie: Trie::new(cb), at: 0, offset: 0, word_start: 0 }
    }

    pub fn push(&mut self, bit: bool) -> Result<Option<usize>> {
        let next = self.trie.children[self.at][usize::from(bit)];
        if next == NONE {
            return Err(Error::UnknownCodeword { offset: self.word_start });
        }
        self.offset += 1;
        self.at = next as usize;
        Ok(self.trie.symbol[self.at].inspect(|_| {
            self.at = 0;
            self.word_start = self.offset;
        }))
    }

    /// Check that the input ended on a codeword boundary.
    pub fn finish(&self) -> Result<()> {
        if self.at == 0 {
            Ok(())
        } else {
            Err(Error::Truncated { offset: self.word_start })
        }
    }
}

/// Inverse of [`encode`].
pub fn decode(bs: &BitStream, cb: &Codebook) -> Result<Vec<usize>> {
    if let Some(n) = cb.n() {
        if !bs.len().is_multiple_of(n) {
            return Err(Error::Misaligned { bits: bs.len(), n });
        }
    }
    let mut decoder = Decoder::new(cb);
    let mut out = Vec::new();
    for bit in bs.iter() {
        if let Some(s) = decoder.push(bit)? {
            out.push(s);
        }
    }
    decoder.finish()?;
    Ok(out)
}

/// Energy of a transmitted stream under `cm`.
pub fn bitstream_cost(bs: &BitStream, cm: &CostModel) -> f64 {
    let ones = bs.count_ones() as u64;
    let zeros = bs.len() as u64 - ones;
    if cm.inverted() {
        cm.cost_of_counts(ones, zeros)
    } else {
        cm.cost_of_counts(zeros, ones)
    }
}

/// Energy of sending `symbols` with `cb`.
pub fn stream_cost(symbols: &[usize], cb: &Codebook, cm: &CostModel) -> Result<f64> {
    let mut total = 0.0;
    for (position, &symbol) in symbols.iter().enumerate() {
        let word = cb.entry(symbol).ok_or(Error::SymbolOutOfRange { symbol, position, m: cb.m() })?;
        let (z, o) = canonical_counts(word, cb, cm);
        total += cm.cost_of_counts(z, o);
    }
    Ok(total)
}
