//! Words in the surface-group generators.
//!
//! Generator `2(k-1)` is `a_k` and `2(k-1)+1` is `b_k`. In text form a word is
//! a run of letters like `a1b1A1B1`, with uppercase for inverses; the empty
//! word is written `e`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    /// Total order used for canonical forms: `2 * generator + inverse`.
    pub fn code(self) -> usize {
        2 * self.generator + self.inverse as usize
    }

    pub fn from_code(code: usize) -> Self {
        Letter { generator: code / 2, inverse: code % 2 == 1 }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pair = self.generator / 2 + 1;
        let base = if self.generator.is_multiple_of(2) { 'a' } else { 'b' };
        let ch = if self.inverse { base.to_ascii_uppercase() } else { base };
        write!(f, "{ch}{pair}")
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl PartialOrd for GroupWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupWord {
    /// Shorter words first, then lexicographic in letter codes.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.iter().map(|l| l.code()).cmp(other.letters.iter().map(|l| l.code())))
    }
}

fn lex_less(a: &[Letter], b: &[Letter]) -> bool {
    a.iter().map(|l| l.code()).lt(b.iter().map(|l| l.code()))
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord { letters: Vec::new() }
    }

    /// Freely reduces the given letters.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|last| last.cancels(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out }
    }

    pub fn letter(generator: usize, inverse: bool) -> Self {
        GroupWord { letters: vec![Letter::new(generator, inverse)] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator).max()
    }

    pub fn inverse(&self) -> Self {
        GroupWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    /// `self` followed by `other`, freely reduced.
    pub fn concat(&self, other: &GroupWord) -> Self {
        GroupWord::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, k: usize) -> Self {
        GroupWord::new(std::iter::repeat_n(self.letters.iter().copied(), k).flatten())
    }

    /// Number of letters cancelled when forming `self * other`.
    pub fn cancellation(&self, other: &GroupWord) -> usize {
        self.letters
            .iter()
            .rev()
            .zip(other.letters.iter())
            .take_while(|(a, b)| a.cancels(**b))
            .count()
    }

    /// Strip matching first/last inverse pairs; returns the conjugating
    /// prefix `u` and the core `c` with `self = u c u^{-1}`.
    pub fn cyclic_reduction(&self) -> (GroupWord, GroupWord) {
        let mut lo = 0;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo].cancels(self.letters[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        (
            GroupWord { letters: self.letters[..lo].to_vec() },
            GroupWord { letters: self.letters[lo..hi].to_vec() },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.letters.len() < 2 || !self.letters[0].cancels(*self.letters.last().unwrap())
    }

    pub fn rotation(&self, k: usize) -> Self {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let k = k % n;
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        GroupWord { letters }
    }

    /// Representative of the conjugacy class of `self` up to inversion:
    /// the lexicographically least rotation of the cyclic reduction or of
    /// its inverse.
    pub fn canonical(&self) -> Self {
        let (_, core) = self.cyclic_reduction();
        let inv = core.inverse();
        let mut best = core.clone();
        for w in [&core, &inv] {
            for k in 0..w.len() {
                let r = w.rotation(k);
                if lex_less(&r.letters, &best.letters) {
                    best = r;
                }
            }
        }
        best
    }

    /// Smallest `p` with `self` equal to its `p`-th root repeated; `len` for primitive words.
    pub fn period(&self) -> usize {
        let n = self.letters.len();
        (1..=n)
            .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| self.letters[i] == self.letters[(i + p) % n]))
            .unwrap_or(n)
    }

    /// Not a proper power (as a cyclic word).
    pub fn is_primitive(&self) -> bool {
        let (_, core) = self.cyclic_reduction();
        core.is_empty() || core.period() == core.len()
    }

    /// `r` and `k` with `self = r^k` as cyclic words, for cyclically reduced input.
    pub fn root(&self) -> (GroupWord, usize) {
        let p = self.period();
        if p == 0 {
            return (self.clone(), 1);
        }
        (GroupWord { letters: self.letters[..p].to_vec() }, self.letters.len() / p)
    }

    /// `[a_1, b_1] ... [a_g, b_g]`.
    pub fn surface_relator(genus: usize) -> Self {
        GroupWord::new((0..genus).flat_map(|k| {
            let a = 2 * k;
            let b = 2 * k + 1;
            [Letter::new(a, false), Letter::new(b, false), Letter::new(a, true), Letter::new(b, true)]
        }))
    }

    /// All freely reduced words of length at most `max_len` over `generators`
    /// generators, shortest first.
    pub fn all_reduced(generators: usize, max_len: usize) -> Vec<GroupWord> {
        let mut out = vec![GroupWord::identity()];
        let mut frontier = vec![GroupWord::identity()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for code in 0..2 * generators {
                    let l = Letter::from_code(code);
                    if w.letters.last().is_some_and(|last| last.cancels(l)) {
                        continue;
                    }
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(GroupWord { letters });
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*' && *c != '.').collect();
        if s.is_empty() || s == "e" || s == "1" {
            return Ok(GroupWord::identity());
        }
        let chars: Vec<char> = s.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (is_b, inverse) = match c {
                'a' => (false, false),
                'A' => (false, true),
                'b' => (true, false),
                'B' => (true, true),
                _ => return Err(GeometryError::InvalidInput(format!("unexpected character '{c}' in word '{s}'"))),
            };
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let pair: usize = digits
                .parse()
                .map_err(|_| GeometryError::InvalidInput(format!("letter '{c}' needs an index in word '{s}'")))?;
            if pair == 0 {
                return Err(GeometryError::InvalidInput("generator indices start at 1".into()));
            }
            letters.push(Letter::new(2 * (pair - 1) + is_b as usize, inverse));
        }
        Ok(GroupWord::new(letters))
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(w("a1b1A1B1").to_string(), "a1b1A1B1");
        assert_eq!(w("a1A1").to_string(), "e");
        assert_eq!(w("b2").letters()[0], Letter::new(3, false));
        assert!("c1".parse::<GroupWord>().is_err());
        assert!("a".parse::<GroupWord>().is_err());
    }

    #[test]
    fn free_reduction_and_inverse() {
        let x = w("a1b1B1a2");
        assert_eq!(x, w("a1a2"));
        assert!(x.concat(&x.inverse()).is_empty());
    }

    #[test]
    fn canonical_merges_rotations_and_inverses() {
        let c = w("b1A1B1a1").canonical();
        assert_eq!(c, w("a1b1A1B1").canonical());
        assert_eq!(c, w("a1b1A1B1").inverse().canonical());
        assert_eq!(w("A1").canonical(), w("a1"));
        assert_eq!(w("b1a1B1").canonical(), w("a1"));
    }

    #[test]
    fn powers_and_roots() {
        let x = w("a1b1");
        assert!(x.is_primitive());
        assert!(!x.pow(3).is_primitive());
        assert_eq!(x.pow(3).root(), (x.clone(), 3));
    }

    #[test]
    fn reduced_word_counts() {
        assert_eq!(GroupWord::all_reduced(4, 1).len(), 9);
        assert_eq!(GroupWord::all_reduced(4, 2).len(), 1 + 8 + 56);
    }

    #[test]
    fn relator_text() {
        assert_eq!(GroupWord::surface_relator(2).to_string(), "a1b1A1B1a2b2A2B2");
    }
}
