//! Free-group words over a named generator alphabet.
//!
//! Words are stored in run-length form: a sequence of syllables `g^k` with
//! `k != 0` and no two adjacent syllables on the same generator. Exponents are
//! arbitrary precision, so `l^-d` for a large `d` costs one syllable.
//!
//! Conventions: `g^c = c^-1 g c` and `[u, v] = u v u^-1 v^-1`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("words are over different alphabets")]
    AlphabetMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordParseError {
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("column {column}: unknown generator `{name}`")]
    UnknownGenerator { column: usize, name: String },
}

impl WordParseError {
    pub fn column(&self) -> usize {
        match self {
            WordParseError::Syntax { column, .. } | WordParseError::UnknownGenerator { column, .. } => {
                *column
            }
        }
    }
}

/// ASCII letter followed by letters, digits or underscores.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(String);

impl Generator {
    pub fn new(name: impl Into<String>) -> Result<Self, WordError> {
        let name = name.into();
        if is_valid_name(&name) {
            Ok(Generator(name))
        } else {
            Err(WordError::InvalidName(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered list of distinct generators. Equality is structural.
#[derive(Clone)]
pub struct Alphabet(Arc<[Generator]>);

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut gens: Vec<Generator> = Vec::new();
        for name in names {
            let g = Generator::new(name)?;
            if gens.contains(&g) {
                return Err(WordError::DuplicateGenerator(g.0));
            }
            gens.push(g);
        }
        Ok(Alphabet(gens.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn name(&self, index: usize) -> &str {
        self.0[index].name()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|g| g.name() == name)
    }

    pub fn identity(&self) -> Word {
        Word::identity(self)
    }

    pub fn generator(&self, index: usize) -> Word {
        Word::generator(self, index)
    }

    /// The generator called `name`, as a word.
    pub fn word(&self, name: &str) -> Result<Word, WordError> {
        self.index_of(name)
            .map(|i| Word::generator(self, i))
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordParseError> {
        Word::parse(self, text)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Alphabet {}

impl Hash for Alphabet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter().map(|g| g.name())).finish()
    }
}

/// A single letter `g` or `g^-1`, used where words are handled letter by letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverted: bool) -> Self {
        Letter(((generator as u32) << 1) | inverted as u32)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Column index used by coset tables: `2 g` for `g`, `2 g + 1` for `g^-1`.
    pub fn column(self) -> usize {
        self.0 as usize
    }

    pub fn from_column(column: usize) -> Self {
        Letter(column as u32)
    }

    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }
}

/// Inverse of a letter sequence.
pub fn invert_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

/// Free reduction of a letter sequence.
pub fn reduce_letters(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub generator: usize,
    pub exponent: BigInt,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    syllables: Vec<Syllable>,
}

fn push_syllable(stack: &mut Vec<Syllable>, generator: usize, exponent: BigInt) {
    if exponent.is_zero() {
        return;
    }
    match stack.last_mut() {
        Some(top) if top.generator == generator => {
            top.exponent += exponent;
            if top.exponent.is_zero() {
                stack.pop();
            }
        }
        _ => stack.push(Syllable { generator, exponent }),
    }
}

impl Word {
    pub fn identity(alphabet: &Alphabet) -> Word {
        Word { alphabet: alphabet.clone(), syllables: Vec::new() }
    }

    pub fn generator(alphabet: &Alphabet, index: usize) -> Word {
        Word::power_of(alphabet, index, 1)
    }

    pub fn power_of(alphabet: &Alphabet, index: usize, exponent: impl Into<BigInt>) -> Word {
        Word::reduce(alphabet, [(index, exponent.into())])
    }

    /// Freely reduces a raw sequence of `(generator index, exponent)` pairs.
    ///
    /// Panics if a generator index is outside the alphabet.
    pub fn reduce<I, E>(alphabet: &Alphabet, raw: I) -> Word
    where
        I: IntoIterator<Item = (usize, E)>,
        E: Into<BigInt>,
    {
        let mut syllables = Vec::new();
        for (g, e) in raw {
            assert!(g < alphabet.len(), "generator index {g} outside alphabet of size {}", alphabet.len());
            push_syllable(&mut syllables, g, e.into());
        }
        Word { alphabet: alphabet.clone(), syllables }
    }

    pub fn from_letters(alphabet: &Alphabet, letters: &[Letter]) -> Word {
        let mut runs: Vec<(usize, i64)> = Vec::new();
        for l in reduce_letters(letters) {
            match runs.last_mut() {
                Some((g, e)) if *g == l.generator() => *e += l.sign(),
                _ => runs.push((l.generator(), l.sign())),
            }
        }
        Word::reduce(alphabet, runs)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters, i.e. the sum of absolute exponents.
    pub fn letter_len(&self) -> BigInt {
        self.syllables.iter().map(|s| s.exponent.abs()).sum()
    }

    /// Letter-by-letter expansion.
    ///
    /// Panics when an exponent does not fit in memory as a letter run.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for s in &self.syllables {
            let n = s.exponent.abs().to_usize().expect("exponent too large to expand into letters");
            out.extend(std::iter::repeat_n(Letter::new(s.generator, s.exponent.is_negative()), n));
        }
        out
    }

    fn check_alphabet(&self, other: &Word) -> Result<(), WordError> {
        if self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(WordError::AlphabetMismatch)
        }
    }

    /// In-place right multiplication by `other`.
    pub fn append(&mut self, other: &Word) -> Result<(), WordError> {
        self.check_alphabet(other)?;
        for s in &other.syllables {
            push_syllable(&mut self.syllables, s.generator, s.exponent.clone());
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        let mut out = self.clone();
        out.append(other)?;
        Ok(out)
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { generator: s.generator, exponent: -&s.exponent })
                .collect(),
        }
    }

    /// `self^n` for any integer `n`.
    ///
    /// Panics if `|n|` does not fit in `usize` and the word is not a
    /// conjugate of a single syllable.
    pub fn pow(&self, n: &BigInt) -> Word {
        if n.is_zero() || self.is_identity() {
            return Word::identity(&self.alphabet);
        }
        let base = if n.is_negative() { self.inverse() } else { self.clone() };
        let n = n.abs();
        // base = c core c^-1 with core cyclically reduced
        let s = &base.syllables;
        let mut lo = 0;
        let mut hi = s.len();
        while hi - lo >= 2
            && s[lo].generator == s[hi - 1].generator
            && s[lo].exponent == -&s[hi - 1].exponent
        {
            lo += 1;
            hi -= 1;
        }
        let prefix = &s[..lo];
        let core = &s[lo..hi];
        let mut out: Vec<Syllable> = prefix.to_vec();
        if core.len() == 1 {
            push_syllable(&mut out, core[0].generator, &core[0].exponent * &n);
        } else {
            let reps = n.to_usize().expect("power too large to expand");
            for _ in 0..reps {
                for syl in core {
                    push_syllable(&mut out, syl.generator, syl.exponent.clone());
                }
            }
        }
        for syl in prefix.iter().rev() {
            push_syllable(&mut out, syl.generator, -&syl.exponent);
        }
        Word { alphabet: self.alphabet.clone(), syllables: out }
    }

    pub fn pow_i64(&self, n: i64) -> Word {
        self.pow(&BigInt::from(n))
    }

    /// `by^-1 self by`.
    pub fn conjugate(&self, by: &Word) -> Result<Word, WordError> {
        self.check_alphabet(by)?;
        let mut out = by.inverse();
        out.append(self)?;
        out.append(by)?;
        Ok(out)
    }

    /// `self other self^-1 other^-1`.
    pub fn commutator(&self, other: &Word) -> Result<Word, WordError> {
        self.check_alphabet(other)?;
        let mut out = self.clone();
        out.append(other)?;
        out.append(&self.inverse())?;
        out.append(&other.inverse())?;
        Ok(out)
    }

    pub fn exponent_sum(&self, generator: usize) -> BigInt {
        self.syllables.iter().filter(|s| s.generator == generator).map(|s| &s.exponent).sum()
    }

    pub fn exponent_sum_of(&self, name: &str) -> Result<BigInt, WordError> {
        let g = self.alphabet.index_of(name).ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
        Ok(self.exponent_sum(g))
    }

    /// Exponent sums of every generator, in alphabet order.
    pub fn exponent_vector(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.alphabet.len()];
        for s in &self.syllables {
            v[s.generator] += &s.exponent;
        }
        v
    }

    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Word, WordParseError> {
        let mut p = WordParser { alphabet, chars: text.char_indices().collect(), pos: 0 };
        let w = p.sequence(0)?;
        p.skip_ws();
        if let Some(c) = p.peek() {
            return Err(p.error(format!("unexpected `{c}`")));
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.name(s.generator))?;
            if !s.exponent.is_one() {
                write!(f, "^{}", s.exponent)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Panics on alphabet mismatch; use [`Word::multiply`] for a checked product.
impl Mul<&Word> for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs).expect("multiplying words over different alphabets")
    }
}

impl Mul<Word> for Word {
    type Output = Word;

    fn mul(self, rhs: Word) -> Word {
        &self * &rhs
    }
}

struct WordParser<'a> {
    alphabet: &'a Alphabet,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl WordParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, message: impl Into<String>) -> WordParseError {
        WordParseError::Syntax { column: self.column(), message: message.into() }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn sequence(&mut self, depth: usize) -> Result<Word, WordParseError> {
        let mut acc = Word::identity(self.alphabet);
        loop {
            self.skip_ws();
            match self.peek() {
                None => {
                    if depth > 0 {
                        return Err(self.error("unclosed parenthesis"));
                    }
                    return Ok(acc);
                }
                Some(')') => {
                    if depth == 0 {
                        return Err(self.error("unmatched `)`"));
                    }
                    return Ok(acc);
                }
                Some(_) => {
                    let item = self.item(depth)?;
                    acc.append(&item).expect("same alphabet");
                }
            }
        }
    }

    fn item(&mut self, depth: usize) -> Result<Word, WordParseError> {
        let start = self.column();
        let atom = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sequence(depth + 1)?;
                // sequence() only returns inside parentheses when it sees `)`
                self.pos += 1;
                inner
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                match self.alphabet.index_of(&name) {
                    Some(g) => Word::generator(self.alphabet, g),
                    None => return Err(WordParseError::UnknownGenerator { column: start, name }),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() {
                        digits.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                if digits != "1" {
                    return Err(WordParseError::Syntax {
                        column: start,
                        message: format!("unexpected `{digits}`; only `1` may stand for the identity"),
                    });
                }
                Word::identity(self.alphabet)
            }
            Some(c) => return Err(self.error(format!("unexpected `{c}`"))),
            None => return Err(self.error("unexpected end of input")),
        };
        let save = self.pos;
        self.skip_ws();
        if self.peek() != Some('^') {
            self.pos = save;
            return Ok(atom);
        }
        self.pos += 1;
        self.skip_ws();
        let exp_col = self.column();
        let mut text = String::new();
        if let Some(c @ ('-' | '+')) = self.peek() {
            text.push(c);
            self.pos += 1;
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        let exponent: BigInt = text.parse().map_err(|_| WordParseError::Syntax {
            column: exp_col,
            message: "expected an integer exponent after `^`".into(),
        })?;
        if exponent.is_zero() {
            return Err(WordParseError::Syntax { column: exp_col, message: "exponent must be nonzero".into() });
        }
        Ok(atom.pow(&exponent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn w(al: &Alphabet, s: &str) -> Word {
        al.parse_word(s).unwrap()
    }

    #[test]
    fn reduce_cancels_and_merges() {
        let al = Alphabet::new(["x", "a", "b"]).unwrap();
        assert!(Word::reduce(&al, [(0, 1), (0, -1)]).is_identity());
        let merged = Word::reduce(&al, [(1, 2), (1, 3), (2, -1)]);
        assert_eq!(merged.to_string(), "a^5 b^-1");
        assert!(Word::reduce(&al, [(1, 1), (2, 1), (2, -1), (1, -1)]).is_identity());
    }

    #[test]
    fn multiply_examples() {
        let al = ab();
        assert!((&w(&al, "a b") * &w(&al, "b^-1 a^-1")).is_identity());
        assert_eq!(&w(&al, "a b") * &w(&al, "b a b"), w(&al, "a b^2 a b"));
        assert_eq!(&al.identity() * &w(&al, "a b^-3"), w(&al, "a b^-3"));
        let other = Alphabet::new(["a", "c"]).unwrap();
        assert_eq!(w(&al, "a").multiply(&w(&other, "a")), Err(WordError::AlphabetMismatch));
    }

    #[test]
    fn inverse_examples() {
        let al = ab();
        assert_eq!(w(&al, "a b").inverse(), w(&al, "b^-1 a^-1"));
        assert!(al.identity().inverse().is_identity());
        assert_eq!(w(&al, "b a^-1 b a^-2").inverse(), w(&al, "a^2 b^-1 a b^-1"));
    }

    #[test]
    fn conjugate_and_commutator() {
        let xy = Alphabet::new(["x", "y"]).unwrap();
        assert_eq!(w(&xy, "x").conjugate(&w(&xy, "y")).unwrap(), w(&xy, "y^-1 x y"));
        let al = ab();
        let g = w(&al, "a b^2");
        assert_eq!(g.conjugate(&al.identity()).unwrap(), g);
        assert_eq!(w(&al, "a").conjugate(&w(&al, "b^-2")).unwrap(), w(&al, "b^2 a b^-2"));
        assert!(w(&al, "a").commutator(&w(&al, "a")).unwrap().is_identity());
        let lm = Alphabet::new(["l", "m"]).unwrap();
        assert_eq!(w(&lm, "l").commutator(&w(&lm, "m")).unwrap().to_string(), "l m l^-1 m^-1");
        let c = w(&al, "a b^3").commutator(&w(&al, "b a^-2")).unwrap();
        assert!(c.exponent_vector().iter().all(|e| e.is_zero()));
    }

    #[test]
    fn exponent_sums() {
        let al = ab();
        assert_eq!(w(&al, "a b^2 a b").exponent_sum(1), BigInt::from(3));
        assert_eq!(al.identity().exponent_sum(1), BigInt::zero());
        assert_eq!(w(&al, "b a b a b^2 a b").exponent_sum_of("b").unwrap(), BigInt::from(5));
        assert!(matches!(w(&al, "a").exponent_sum_of("z"), Err(WordError::UnknownGenerator(_))));
    }

    #[test]
    fn pow_handles_conjugated_cores() {
        let al = ab();
        let x = w(&al, "b a b^-1");
        assert_eq!(x.pow_i64(3), w(&al, "b a^3 b^-1"));
        assert_eq!(w(&al, "a b").pow_i64(-2), w(&al, "b^-1 a^-1 b^-1 a^-1"));
        assert_eq!(w(&al, "a b a").pow_i64(2), w(&al, "a b a^2 b a"));
        let big = BigInt::parse_bytes(b"123456789012345678901234567890", 10).unwrap();
        assert_eq!(w(&al, "a").pow(&big).syllables()[0].exponent, big);
    }

    #[test]
    fn parse_and_render() {
        let al = ab();
        assert_eq!(w(&al, "(a b)^2 a^-1").to_string(), "a b a b a^-1");
        assert_eq!(w(&al, "1").to_string(), "1");
        assert_eq!(w(&al, "a (1) b^+2").to_string(), "a b^2");
        assert_eq!(w(&al, "a b (a b a^2)^-1").to_string(), "a b a^-2 b^-1 a^-1");
        assert_eq!(w(&al, "a b (a b)^-1").to_string(), "1");
        for bad in ["a^0", "(a b", "a)", "a^", "2", "a ^ x", "a $"] {
            assert!(al.parse_word(bad).is_err(), "{bad}");
        }
        assert_eq!(
            al.parse_word("a  c"),
            Err(WordParseError::UnknownGenerator { column: 4, name: "c".into() })
        );
    }

    #[test]
    fn letters_round_trip() {
        let al = ab();
        let x = w(&al, "a^3 b^-2 a");
        assert_eq!(x.letters().len(), 6);
        assert_eq!(Word::from_letters(&al, &x.letters()), x);
        assert_eq!(reduce_letters(&invert_letters(&x.letters())), x.inverse().letters());
    }

    #[test]
    fn alphabet_rules() {
        assert!(matches!(Alphabet::new(["a", "a"]), Err(WordError::DuplicateGenerator(_))));
        assert!(matches!(Alphabet::new(["1a"]), Err(WordError::InvalidName(_))));
        assert_eq!(Alphabet::new(["a", "b"]).unwrap(), ab());
        assert_ne!(Alphabet::new(["b", "a"]).unwrap(), ab());
    }
}
