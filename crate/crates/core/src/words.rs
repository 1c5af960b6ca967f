//! Alphabets, finite colour and step words, and the canonical word order.
//!
//! Colour words store symbol *indices* into a [`ColourAlphabet`]; the
//! alphabet's total order is the index order. Step words are sequences over
//! `{L, H, R}` with values `-1, 0, +1`.
//!
//! The canonical order lists every colour word of length `1..=n` with
//! non-decreasing length. Within one length the palindromes come first, in
//! lexicographic order, followed by the non-palindromes as adjacent pairs
//! `(w, reverse(w))`, the pairs ordered by their lexicographically smaller
//! member, which is placed first.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An ordered finite set of colour symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColourAlphabet {
    symbols: Vec<char>,
}

impl ColourAlphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::Contract("colour alphabet must be nonempty".into()));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::Contract("colour alphabet too large".into()));
        }
        for (i, a) in symbols.iter().enumerate() {
            if symbols[..i].contains(a) {
                return Err(Error::Contract(format!("duplicate colour symbol {a:?}")));
            }
            if matches!(a, 'L' | 'H' | 'R' | ',') {
                return Err(Error::Contract(format!("colour symbol {a:?} is reserved")));
            }
        }
        Ok(Self { symbols })
    }

    /// The two-colour alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Self { symbols: vec!['0', '1'] }
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn parse(&self, s: &str) -> Result<ColourWord> {
        s.chars()
            .map(|c| {
                self.symbols
                    .iter()
                    .position(|&a| a == c)
                    .map(|i| i as u8)
                    .ok_or_else(|| Error::Parse(format!("symbol {c:?} not in alphabet {self}")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(ColourWord)
    }

    pub fn render(&self, w: &ColourWord) -> String {
        w.0.iter().map(|&c| self.symbols[c as usize]).collect()
    }

    pub fn contains(&self, w: &ColourWord) -> bool {
        w.0.iter().all(|&c| (c as usize) < self.size())
    }

    /// All words of length `len`, in lexicographic order.
    pub fn words_of_length(&self, len: usize) -> impl Iterator<Item = ColourWord> + '_ {
        let count = self.size().pow(len as u32);
        (0..count).map(move |r| ColourWord::from_rank(r, len, self.size()))
    }
}

impl Default for ColourAlphabet {
    fn default() -> Self {
        Self::binary()
    }
}

impl fmt::Display for ColourAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbols.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

impl FromStr for ColourAlphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.chars())
    }
}

impl Serialize for ColourAlphabet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ColourAlphabet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite word of colour indices.
///
/// `Display` and `FromStr` use base-36 digits for the indices, which for the
/// binary alphabet coincides with the symbols `0` and `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColourWord(pub Vec<u8>);

impl ColourWord {
    pub fn new(symbols: Vec<u8>) -> Self {
        Self(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    /// `w_n ... w_1`.
    pub fn reverse(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn is_palindrome(&self) -> bool {
        let n = self.0.len();
        (0..n / 2).all(|i| self.0[i] == self.0[n - 1 - i])
    }

    /// Cyclic left rotation by `k`: the period word of `T^k x` when `self`
    /// is the period word of `x`.
    pub fn rotate(&self, k: usize) -> Self {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Self(v)
    }

    /// Position of the word among all words of its length in lexicographic
    /// order over an alphabet of `base` symbols.
    pub fn rank(&self, base: usize) -> usize {
        self.0.iter().fold(0, |acc, &c| acc * base + c as usize)
    }

    pub fn from_rank(mut rank: usize, len: usize, base: usize) -> Self {
        let mut v = vec![0u8; len];
        for slot in v.iter_mut().rev() {
            *slot = (rank % base) as u8;
            rank /= base;
        }
        Self(v)
    }

    /// Shortest word `p` with `self = p^k`.
    pub fn primitive_root(&self) -> Self {
        let n = self.0.len();
        for p in 1..n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]) {
                return Self(self.0[..p].to_vec());
            }
        }
        self.clone()
    }
}

impl fmt::Display for ColourWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.0 {
            let ch = char::from_digit(c as u32, 36).unwrap_or('?');
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl FromStr for ColourWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("invalid colour symbol {c:?}")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl Serialize for ColourWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ColourWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One step of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    L,
    H,
    R,
}

impl Step {
    /// Canonical enumeration order of step symbols.
    pub const ALL: [Step; 3] = [Step::L, Step::H, Step::R];

    pub fn value(self) -> i64 {
        match self {
            Step::L => -1,
            Step::H => 0,
            Step::R => 1,
        }
    }

    pub fn mirror(self) -> Self {
        match self {
            Step::L => Step::R,
            Step::H => Step::H,
            Step::R => Step::L,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'L' => Some(Step::L),
            'H' => Some(Step::H),
            'R' => Some(Step::R),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Step::L => 'L',
            Step::H => 'H',
            Step::R => 'R',
        }
    }
}

/// A finite walk word over `{L, H, R}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepWord(pub Vec<Step>);

impl StepWord {
    pub fn new(steps: Vec<Step>) -> Self {
        Self(steps)
    }

    /// `s^n`, e.g. `R^N`.
    pub fn repeat(step: Step, n: usize) -> Self {
        Self(vec![step; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    /// R and L interchanged positionwise.
    pub fn mirror(&self) -> Self {
        Self(self.0.iter().map(|s| s.mirror()).collect())
    }

    pub fn reverse(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// Partial sums `0, u_1, u_1 + u_2, ...` (length `len + 1`).
    pub fn positions(&self) -> Vec<i64> {
        let mut pos = Vec::with_capacity(self.0.len() + 1);
        let mut p = 0;
        pos.push(0);
        for s in &self.0 {
            p += s.value();
            pos.push(p);
        }
        pos
    }

    pub fn has_holding(&self) -> bool {
        self.0.contains(&Step::H)
    }

    /// The `index`-th word of length `len` in canonical (lexicographic,
    /// `L < H < R`) order.
    pub fn from_index(mut index: usize, len: usize) -> Self {
        let mut v = vec![Step::L; len];
        for slot in v.iter_mut().rev() {
            *slot = Step::ALL[index % 3];
            index /= 3;
        }
        Self(v)
    }

    /// All `3^len` step words of length `len` in canonical order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = StepWord> {
        (0..3usize.pow(len as u32)).map(move |i| Self::from_index(i, len))
    }
}

impl fmt::Display for StepWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for StepWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Step::from_char(c).ok_or_else(|| Error::Parse(format!("invalid step {c:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// `w_n ... w_1`.
pub fn reverse(w: &ColourWord) -> ColourWord {
    w.reverse()
}

/// R and L interchanged positionwise, H fixed.
pub fn mirror(u: &StepWord) -> StepWord {
    u.mirror()
}

pub fn is_palindrome(w: &ColourWord) -> bool {
    w.is_palindrome()
}

/// A diagonal block of the canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Block {
    /// A palindrome at `index`.
    Palindrome { index: usize },
    /// A reversal pair at `index` and `index + 1`.
    Pair { index: usize },
}

impl Block {
    pub fn start(&self) -> usize {
        match *self {
            Block::Palindrome { index } | Block::Pair { index } => index,
        }
    }

    /// Last index covered by the block.
    pub fn end(&self) -> usize {
        match *self {
            Block::Palindrome { index } => index,
            Block::Pair { index } => index + 1,
        }
    }

    pub fn size(&self) -> usize {
        self.end() - self.start() + 1
    }
}

/// All colour words of length `1..=depth` in canonical order.
#[derive(Debug, Clone)]
pub struct WordOrder {
    alphabet: ColourAlphabet,
    depth: usize,
    entries: Vec<ColourWord>,
    index: HashMap<ColourWord, usize>,
    // position of each word, per length, by lexicographic rank
    by_rank: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    blocks: Vec<Block>,
    block_of: Vec<usize>,
}

impl PartialEq for WordOrder {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.depth == other.depth
    }
}

impl WordOrder {
    pub fn new(alphabet: &ColourAlphabet, depth: usize) -> Result<Self> {
        if depth < 1 {
            return Err(Error::InvalidDepth(depth));
        }
        let base = alphabet.size();
        let mut entries = Vec::new();
        let mut offsets = vec![0];
        let mut blocks = Vec::new();
        for len in 1..=depth {
            offsets.push(entries.len());
            let words: Vec<ColourWord> = alphabet.words_of_length(len).collect();
            for w in words.iter().filter(|w| w.is_palindrome()) {
                blocks.push(Block::Palindrome { index: entries.len() });
                entries.push(w.clone());
            }
            for w in &words {
                let r = w.reverse();
                if *w < r {
                    blocks.push(Block::Pair { index: entries.len() });
                    entries.push(w.clone());
                    entries.push(r);
                }
            }
        }
        offsets.push(entries.len());

        let index: HashMap<ColourWord, usize> =
            entries.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut by_rank = vec![Vec::new()];
        for len in 1..=depth {
            let mut v = vec![0; base.pow(len as u32)];
            for i in offsets[len]..offsets[len + 1] {
                v[entries[i].rank(base)] = i;
            }
            by_rank.push(v);
        }
        let mut block_of = vec![0; entries.len()];
        for (b, block) in blocks.iter().enumerate() {
            block_of[block.start()..=block.end()].fill(b);
        }
        Ok(Self { alphabet: alphabet.clone(), depth, entries, index, by_rank, offsets, blocks, block_of })
    }

    pub fn alphabet(&self) -> &ColourAlphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ColourWord] {
        &self.entries
    }

    pub fn word(&self, i: usize) -> &ColourWord {
        &self.entries[i]
    }

    pub fn position(&self, w: &ColourWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Position of the word of length `len` with lexicographic rank `rank`.
    pub fn position_by_rank(&self, len: usize, rank: usize) -> usize {
        self.by_rank[len][rank]
    }

    /// Index range of the words of length `len`.
    pub fn length_range(&self, len: usize) -> std::ops::Range<usize> {
        self.offsets[len]..self.offsets[len + 1]
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_containing(&self, i: usize) -> Block {
        self.blocks[self.block_of[i]]
    }

    /// Position of `reverse(word(i))`.
    pub fn reverse_position(&self, i: usize) -> usize {
        match self.block_containing(i) {
            Block::Palindrome { index } => index,
            Block::Pair { index } => {
                if i == index {
                    index + 1
                } else {
                    index
                }
            }
        }
    }
}

/// The canonical order of all words of length `1..=n`.
pub fn canonical_order(alphabet: &ColourAlphabet, n: usize) -> Result<WordOrder> {
    WordOrder::new(alphabet, n)
}
