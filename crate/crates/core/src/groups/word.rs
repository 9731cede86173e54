use std::fmt;

use crate::error::{Error, Result};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u16,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Letter {
        Letter { gen: gen as u16, inv }
    }

    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// Dense index in `0..2 * rank`: generators even, inverses odd.
    pub fn index(self) -> usize {
        2 * self.gen as usize + self.inv as usize
    }

    pub fn from_index(i: usize) -> Letter {
        Letter::new(i / 2, i % 2 == 1)
    }
}

/// A freely reduced word in the generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Freely reduces the given letters.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(f), Some(l)) => self.0.len() == 1 || *f != l.inverse(),
            _ => true,
        }
    }

    pub fn cyclically_reduced(&self) -> Word {
        let mut s = &self.0[..];
        while s.len() >= 2 && s[0] == s[s.len() - 1].inverse() {
            s = &s[1..s.len() - 1];
        }
        Word(s.to_vec())
    }

    /// Commutator `x y x^-1 y^-1`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    pub fn rotations(&self) -> impl Iterator<Item = Word> + '_ {
        let n = self.0.len();
        (0..n.max(1)).map(move |k| {
            let mut v = self.0[k.min(n)..].to_vec();
            v.extend_from_slice(&self.0[..k.min(n)]);
            Word(v)
        })
    }

    /// Lexicographically least word among the cyclic rotations of the word and its inverse.
    pub fn cyclic_canonical(&self) -> Word {
        let inv = self.inverse();
        self.rotations().chain(inv.rotations()).min().unwrap_or_default()
    }

    /// Smallest period `p` such that the word is a power of its length-`p` prefix.
    pub fn primitive_period(&self) -> usize {
        let n = self.0.len();
        (1..=n)
            .find(|p| n % p == 0 && (0..n).all(|i| self.0[i] == self.0[i % p]))
            .unwrap_or(n)
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_period() == self.0.len()
    }

    /// Parses whitespace-separated generator names; `name^-1` or a case-swapped
    /// first letter denotes an inverse.
    pub fn parse(s: &str, names: &[String]) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (base, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b.to_string(), true),
                None => (tok.to_string(), false),
            };
            if let Some(g) = names.iter().position(|n| *n == base) {
                letters.push(Letter::new(g, inv));
                continue;
            }
            let swapped = swap_case_first(&base);
            match names.iter().position(|n| *n == swapped) {
                Some(g) if !inv => letters.push(Letter::new(g, true)),
                _ => return Err(Error::UnknownGenerator(tok.to_string())),
            }
        }
        Ok(Word::new(letters))
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

fn swap_case_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_lowercase() => c.to_uppercase().chain(chars).collect(),
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.word.letters().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let name = self.names.get(l.gen as usize).map(String::as_str).unwrap_or("?");
            if l.inv {
                write!(f, "{}", swap_case_first(name))?;
            } else {
                write!(f, "{name}")?;
            }
        }
        Ok(())
    }
}
