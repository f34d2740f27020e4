//! Finite presentations: a text format and builders for the group families
//! that carry certificates.
//!
//! File grammar, one directive per line, `#` starts a comment:
//!
//! ```text
//! # Klein bottle group
//! gens: x y
//! rel: y^-1 x y x
//! ```
//!
//! A comment line before `gens:` becomes the presentation label.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

use crate::words::{Alphabet, Word, WordError, WordParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, column: usize, name: String },
    #[error("line {line}: duplicate generator `{name}`")]
    DuplicateGenerator { line: usize, name: String },
    #[error("missing `gens:` line")]
    MissingGenerators,
    #[error("relator is over a different alphabet")]
    AlphabetMismatch,
    #[error("{0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
    label: String,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>, label: impl Into<String>) -> Result<Self, PresentationError> {
        if relators.iter().any(|r| r.alphabet() != &alphabet) {
            return Err(PresentationError::AlphabetMismatch);
        }
        Ok(Presentation { alphabet, relators, label: label.into() })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn relator(&self, index: usize) -> Option<&Word> {
        self.relators.get(index)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordParseError> {
        self.alphabet.parse_word(text)
    }

    /// Looks up a generator by name and returns it as a word.
    pub fn generator(&self, name: &str) -> Result<Word, WordError> {
        self.alphabet.word(name)
    }

    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        let mut label: Option<String> = None;
        let mut alphabet: Option<Alphabet> = None;
        let mut relators = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if alphabet.is_none() && label.is_none() {
                    label = Some(comment.trim().to_string());
                }
                continue;
            }
            // drop trailing comments; the column arithmetic below is on the raw line
            let content = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let Some((key, rest)) = content.split_once(':') else {
                return Err(PresentationError::Syntax {
                    line: line_no,
                    column: leading_ws(raw) + 1,
                    message: "expected `gens:` or `rel:`".into(),
                });
            };
            let rest_col = key.chars().count() + 2;
            match key.trim() {
                "gens" => {
                    if alphabet.is_some() {
                        return Err(PresentationError::Syntax {
                            line: line_no,
                            column: leading_ws(raw) + 1,
                            message: "second `gens:` line".into(),
                        });
                    }
                    let mut names: Vec<&str> = Vec::new();
                    for name in rest.split_whitespace() {
                        if !crate::words::is_valid_name(name) {
                            let col = rest_col + rest.find(name).unwrap_or(0);
                            return Err(PresentationError::Syntax {
                                line: line_no,
                                column: col,
                                message: format!("invalid generator name `{name}`"),
                            });
                        }
                        if names.contains(&name) {
                            return Err(PresentationError::DuplicateGenerator { line: line_no, name: name.into() });
                        }
                        names.push(name);
                    }
                    alphabet = Some(Alphabet::new(names).expect("names validated"));
                }
                "rel" => {
                    let Some(al) = &alphabet else {
                        return Err(PresentationError::Syntax {
                            line: line_no,
                            column: leading_ws(raw) + 1,
                            message: "`rel:` before `gens:`".into(),
                        });
                    };
                    let offset = rest_col - 1;
                    let word = al.parse_word(rest).map_err(|e| match e {
                        WordParseError::Syntax { column, message } => {
                            PresentationError::Syntax { line: line_no, column: column + offset, message }
                        }
                        WordParseError::UnknownGenerator { column, name } => {
                            PresentationError::UnknownGenerator { line: line_no, column: column + offset, name }
                        }
                    })?;
                    relators.push(word);
                }
                other => {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        column: leading_ws(raw) + 1,
                        message: format!("unknown directive `{other}`"),
                    })
                }
            }
        }
        let alphabet = alphabet.ok_or(PresentationError::MissingGenerators)?;
        Ok(Presentation { alphabet, relators, label: label.unwrap_or_default() })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            out.push_str("# ");
            out.push_str(&self.label);
            out.push('\n');
        }
        out.push_str("gens:");
        for g in self.alphabet.generators() {
            out.push(' ');
            out.push_str(g.name());
        }
        out.push('\n');
        for r in &self.relators {
            out.push_str(&format!("rel: {r}\n"));
        }
        out
    }
}

fn leading_ws(s: &str) -> usize {
    s.chars().take_while(|c| c.is_whitespace()).count()
}

/// Monodromy matrix `[[a, b], [c, d]]` of a torus bundle, read as
/// `t^-1 l t = l^a m^b` and `t^-1 m t = l^c m^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monodromy {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Monodromy {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Monodromy { a, b, c, d }
    }

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn trace(&self) -> i128 {
        self.a as i128 + self.d as i128
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }
}

impl fmt::Display for Monodromy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={},b={},c={},d={}", self.a, self.b, self.c, self.d)
    }
}

pub fn free_group(rank: usize) -> Presentation {
    let names: Vec<String> = (1..=rank).map(|i| format!("x{i}")).collect();
    let alphabet = Alphabet::new(names).expect("distinct names");
    Presentation { alphabet, relators: Vec::new(), label: Family::Free { rank }.to_string() }
}

/// `<x, y | y^-1 x y x>`.
pub fn klein_bottle() -> Presentation {
    let al = Alphabet::new(["x", "y"]).expect("distinct names");
    let r = Word::reduce(&al, [(1, -1), (0, 1), (1, 1), (0, 1)]);
    Presentation { alphabet: al, relators: vec![r], label: Family::Klein.to_string() }
}

/// The Fibonacci group F(2, m) on `a1..am` with relators `a_i a_{i+1} a_{i+2}^-1`.
pub fn fibonacci(m: usize) -> Result<Presentation, PresentationError> {
    if m < 1 {
        return Err(PresentationError::InvalidParameters("fibonacci requires m >= 1".into()));
    }
    let names: Vec<String> = (1..=m).map(|i| format!("a{i}")).collect();
    let al = Alphabet::new(names).expect("distinct names");
    let relators = (0..m)
        .map(|i| Word::reduce(&al, [(i, 1), ((i + 1) % m, 1), ((i + 2) % m, -1)]))
        .collect();
    Ok(Presentation { alphabet: al, relators, label: Family::Fibonacci { m }.to_string() })
}

/// Fundamental group of the torus bundle with monodromy `A` on generators `l, m, t`.
pub fn torus_bundle(a: i64, b: i64, c: i64, d: i64) -> Result<Presentation, PresentationError> {
    let mono = Monodromy::new(a, b, c, d);
    if !mono.is_unimodular() {
        return Err(PresentationError::InvalidParameters(format!(
            "monodromy determinant is {}, expected 1 or -1",
            mono.det()
        )));
    }
    let al = Alphabet::new(["l", "m", "t"]).expect("distinct names");
    let (l, m, t) = (0, 1, 2);
    let comm = Word::reduce(&al, [(l, 1), (m, 1), (l, -1), (m, -1)]);
    let r1 = Word::reduce(&al, [(t, -1i64), (l, 1), (t, 1), (m, -b), (l, -a)]);
    let r2 = Word::reduce(&al, [(t, -1i64), (m, 1), (t, 1), (m, -d), (l, -c)]);
    Ok(Presentation { alphabet: al, relators: vec![comm, r1, r2], label: Family::TorusBundle(mono).to_string() })
}

/// `G(p, q, m) = <a, b, t | t^-1 a t = a b a^(m-1), t^-1 b t = a^-1, t^p [a, b]^q>`.
pub fn rss(p: i64, q: i64, m: i64) -> Result<Presentation, PresentationError> {
    if p.gcd(&q) != 1 {
        return Err(PresentationError::InvalidParameters(format!("rss requires gcd(p, q) = 1, got p={p}, q={q}")));
    }
    let al = Alphabet::new(["a", "b", "t"]).expect("distinct names");
    let (a, b, t) = (0, 1, 2);
    let r1 = Word::reduce(&al, [(t, -1), (a, 1), (t, 1), (a, 1 - m), (b, -1), (a, -1)]);
    let r2 = Word::reduce(&al, [(t, -1), (b, 1), (t, 1), (a, 1)]);
    let comm = Word::reduce(&al, [(a, 1), (b, 1), (a, -1), (b, -1)]);
    let mut r3 = Word::power_of(&al, t, p);
    r3.append(&comm.pow_i64(q)).expect("same alphabet");
    Ok(Presentation { alphabet: al, relators: vec![r1, r2, r3], label: Family::Rss { p, q, m }.to_string() })
}

/// `<x, y | x^2 y^2 central>`, as relators `[x^2 y^2, x]` and `[x^2 y^2, y]`.
pub fn kb_circle_bundle() -> Presentation {
    let al = Alphabet::new(["x", "y"]).expect("distinct names");
    let h = Word::reduce(&al, [(0, 2), (1, 2)]);
    let relators = vec![
        h.commutator(&al.generator(0)).expect("same alphabet"),
        h.commutator(&al.generator(1)).expect("same alphabet"),
    ];
    Presentation { alphabet: al, relators, label: Family::KbCircle.to_string() }
}

/// A named family member, written in shorthand such as `fibonacci:m=8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Klein,
    KbCircle,
    Free { rank: usize },
    Fibonacci { m: usize },
    TorusBundle(Monodromy),
    Rss { p: i64, q: i64, m: i64 },
}

impl Family {
    pub fn build(&self) -> Result<Presentation, PresentationError> {
        match *self {
            Family::Klein => Ok(klein_bottle()),
            Family::KbCircle => Ok(kb_circle_bundle()),
            Family::Free { rank } => Ok(free_group(rank)),
            Family::Fibonacci { m } => fibonacci(m),
            Family::TorusBundle(Monodromy { a, b, c, d }) => torus_bundle(a, b, c, d),
            Family::Rss { p, q, m } => rss(p, q, m),
        }
    }

    /// Builds a family from its name and `key=value` parameters.
    pub fn from_parts(name: &str, params: &[(String, String)]) -> Result<Self, PresentationError> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in params {
            if map.insert(k.as_str(), v.as_str()).is_some() {
                return Err(PresentationError::InvalidParameters(format!("parameter `{k}` given twice")));
            }
        }
        let expect = |keys: &[&str]| -> Result<(), PresentationError> {
            for k in map.keys() {
                if !keys.contains(k) {
                    return Err(PresentationError::InvalidParameters(format!("unexpected parameter `{k}` for {name}")));
                }
            }
            for k in keys {
                if !map.contains_key(k) {
                    return Err(PresentationError::InvalidParameters(format!("missing parameter `{k}` for {name}")));
                }
            }
            Ok(())
        };
        fn int<T: FromStr>(map: &BTreeMap<&str, &str>, key: &str) -> Result<T, PresentationError> {
            map[key]
                .trim()
                .parse()
                .map_err(|_| PresentationError::InvalidParameters(format!("parameter `{key}` is not a valid integer")))
        }
        match name {
            "klein" => {
                expect(&[])?;
                Ok(Family::Klein)
            }
            "kbcircle" => {
                expect(&[])?;
                Ok(Family::KbCircle)
            }
            "free" => {
                expect(&["rank"])?;
                Ok(Family::Free { rank: int(&map, "rank")? })
            }
            "fibonacci" => {
                expect(&["m"])?;
                Ok(Family::Fibonacci { m: int(&map, "m")? })
            }
            "torusbundle" => {
                expect(&["a", "b", "c", "d"])?;
                Ok(Family::TorusBundle(Monodromy::new(
                    int(&map, "a")?,
                    int(&map, "b")?,
                    int(&map, "c")?,
                    int(&map, "d")?,
                )))
            }
            "rss" => {
                expect(&["p", "q", "m"])?;
                Ok(Family::Rss { p: int(&map, "p")?, q: int(&map, "q")?, m: int(&map, "m")? })
            }
            other => Err(PresentationError::InvalidParameters(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Klein => f.write_str("klein"),
            Family::KbCircle => f.write_str("kbcircle"),
            Family::Free { rank } => write!(f, "free:rank={rank}"),
            Family::Fibonacci { m } => write!(f, "fibonacci:m={m}"),
            Family::TorusBundle(mono) => write!(f, "torusbundle:{mono}"),
            Family::Rss { p, q, m } => write!(f, "rss:p={p},q={q},m={m}"),
        }
    }
}

impl FromStr for Family {
    type Err = PresentationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut params = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| PresentationError::InvalidParameters(format!("expected key=value, got `{item}`")))?;
            params.push((k.trim().to_string(), v.trim().to_string()));
        }
        Family::from_parts(name, &params)
    }
}
