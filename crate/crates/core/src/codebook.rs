//! Codewords and codebooks shared by the optimizers and the codec.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::costmodel::SymbolSource;
use crate::error::{Error, Result};

/// A finite bit sequence. Ordering is lexicographic with `0 < 1` and a
/// proper prefix ordered before its extensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Codeword {
    bits: Vec<bool>,
}

impl Codeword {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Codeword { bits }
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_value(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        Codeword { bits: (0..len).rev().map(|i| value >> i & 1 == 1).collect() }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of zeros, `N₀`.
    pub fn n0(&self) -> usize {
        self.bits.len() - self.n1()
    }

    /// Number of ones, `N₁`.
    pub fn n1(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when `self` is a proper prefix of `other`.
    pub fn is_proper_prefix_of(&self, other: &Codeword) -> bool {
        self.len() < other.len() && other.bits.starts_with(&self.bits)
    }

    pub fn complement(&self) -> Codeword {
        Codeword { bits: self.bits.iter().map(|b| !b).collect() }
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Codeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid("codeword", format!("unexpected character {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Codeword::from_bits)
    }
}

impl Serialize for Codeword {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Codeword {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Fixed,
    Prefix,
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeKind::Fixed => "fixed",
            CodeKind::Prefix => "prefix",
        })
    }
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(CodeKind::Fixed),
            "prefix" => Ok(CodeKind::Prefix),
            other => Err(Error::invalid("kind", format!("expected fixed or prefix, got {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodebookRepr {
    kind: CodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    entries: Vec<Codeword>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    inverted: bool,
}

/// Symbol → codeword table, indexed by original symbol number.
///
/// Entries are the canonical codewords (cheap bit = `0`). When `inverted`
/// is set the channel carries their complements; the codec applies that.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodebookRepr", into = "CodebookRepr")]
pub struct Codebook {
    kind: CodeKind,
    entries: Vec<Codeword>,
    inverted: bool,
}

impl Codebook {
    pub fn new(kind: CodeKind, entries: Vec<Codeword>, inverted: bool) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyCodebook);
        }
        if entries.iter().any(Codeword::is_empty) {
            return Err(Error::EmptyCodeword);
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            if !seen.insert(e) {
                return Err(Error::DuplicateCodeword(e.to_string()));
            }
        }
        match kind {
            CodeKind::Fixed => {
                let n = entries[0].len();
                if let Some(e) = entries.iter().find(|e| e.len() != n) {
                    return Err(Error::LengthMismatch { expected: n, found: e.len() });
                }
            }
            CodeKind::Prefix => {
                if let Some((prefix, word)) = first_prefix_violation(&entries) {
                    return Err(Error::PrefixViolation { prefix: prefix.to_string(), word: word.to_string() });
                }
            }
        }
        Ok(Codebook { kind, entries, inverted })
    }

    pub fn fixed(entries: Vec<Codeword>) -> Result<Self> {
        Codebook::new(CodeKind::Fixed, entries, false)
    }

    pub fn prefix(entries: Vec<Codeword>) -> Result<Self> {
        Codebook::new(CodeKind::Prefix, entries, false)
    }

    /// Parse entries from `'0'/'1'` strings.
    pub fn from_strs(kind: CodeKind, words: &[&str]) -> Result<Self> {
        let entries = words.iter().map(|w| w.parse()).collect::<Result<Vec<Codeword>>>()?;
        Codebook::new(kind, entries, false)
    }

    /// Give the `i`-th word of `ranked` to the `i`-th most probable symbol.
    pub(crate) fn assign(kind: CodeKind, src: &SymbolSource, ranked: Vec<Codeword>, inverted: bool) -> Result<Self> {
        if ranked.len() != src.m() {
            return Err(Error::SymbolCountMismatch { expected: src.m(), found: ranked.len() });
        }
        let mut entries = vec![Codeword::default(); src.m()];
        for (symbol, word) in src.by_descending_probability().into_iter().zip(ranked) {
            entries[symbol] = word;
        }
        Codebook::new(kind, entries, inverted)
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn entries(&self) -> &[Codeword] {
        &self.entries
    }

    pub fn entry(&self, symbol: usize) -> Option<&Codeword> {
        self.entries.get(symbol)
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn inverted(&self) -> bool {
        self.inverted
    }

    /// Common codeword length of a fixed-length codebook.
    pub fn n(&self) -> Option<usize> {
        match self.kind {
            CodeKind::Fixed => Some(self.entries[0].len()),
            CodeKind::Prefix => None,
        }
    }

    pub fn max_len(&self) -> usize {
        self.entries.iter().map(Codeword::len).max().unwrap_or(0)
    }

    /// Kraft sum `Σ 2^(−lᵢ)`.
    pub fn kraft_sum(&self) -> f64 {
        self.entries.iter().map(|e| (-(e.len() as f64)).exp2()).sum()
    }

    /// Entries sorted lexicographically; used for tie-breaking and reporting.
    pub fn sorted_words(&self) -> Vec<Codeword> {
        let mut words = self.entries.clone();
        words.sort();
        words
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl TryFrom<CodebookRepr> for Codebook {
    type Error = Error;

    fn try_from(r: CodebookRepr) -> Result<Self> {
        let cb = Codebook::new(r.kind, r.entries, r.inverted)?;
        if let (Some(declared), Some(actual)) = (r.n, cb.n()) {
            if declared != actual {
                return Err(Error::LengthMismatch { expected: declared, found: actual });
            }
        }
        if r.n.is_some() && cb.kind == CodeKind::Prefix {
            return Err(Error::invalid("n", "only fixed-length codebooks carry n"));
        }
        Ok(cb)
    }
}

impl From<Codebook> for CodebookRepr {
    fn from(cb: Codebook) -> Self {
        CodebookRepr { kind: cb.kind, n: cb.n(), entries: cb.entries, inverted: cb.inverted }
    }
}

/// First `(prefix, word)` pair in which one word is a proper prefix of the other.
///
/// After sorting, any word that extends `a` sits right after `a` or after
/// another extension of `a`, so adjacent pairs are enough.
fn first_prefix_violation(words: &[Codeword]) -> Option<(&Codeword, &Codeword)> {
    let mut sorted: Vec<&Codeword> = words.iter().collect();
    sorted.sort();
    sorted.windows(2).find(|w| w[0].is_proper_prefix_of(w[1])).map(|w| (w[0], w[1]))
}

/// True iff no entry of `cb` is a prefix of another.
pub fn is_prefix_free(cb: &Codebook) -> bool {
    words_are_prefix_free(cb.entries())
}

pub fn words_are_prefix_free(words: &[Codeword]) -> bool {
    first_prefix_violation(words).is_none() && {
        let mut sorted: Vec<&Codeword> = words.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

pub fn codebook_to_json(cb: &Codebook) -> Result<String> {
    cb.to_json()
}

pub fn codebook_from_json(text: &str) -> Result<Codebook> {
    Codebook::from_json(text)
}
