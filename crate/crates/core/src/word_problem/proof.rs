use std::fmt;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{Alphabet, Word, WordParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("step {step}: relator index {index} out of range ({count} relators)")]
    RelatorOutOfRange { step: usize, index: usize, count: usize },
    #[error("proof words are over a different alphabet than the presentation")]
    AlphabetMismatch,
    #[error("{0}")]
    Syntax(String),
    #[error("bad word: {0}")]
    Word(#[from] WordParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// One factor `u^-1 r^s u` of a derivation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivationStep {
    pub conjugator: Word,
    pub relator: usize,
    pub sign: Sign,
}

impl fmt::Display for DerivationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {} | {}", self.conjugator, self.relator, self.sign)
    }
}

/// Parses `<conjugator> | <relator index> | <+1|-1>`.
pub fn parse_step(alphabet: &Alphabet, text: &str) -> Result<DerivationStep, ProofError> {
    let parts: Vec<&str> = text.split('|').map(str::trim).collect();
    let [conj, index, sign] = parts[..] else {
        return Err(ProofError::Syntax(format!("expected `conjugator | index | sign`, got `{text}`")));
    };
    let conjugator = alphabet.parse_word(conj)?;
    let relator = index.parse().map_err(|_| ProofError::Syntax(format!("bad relator index `{index}`")))?;
    let sign = match sign {
        "+1" | "1" => Sign::Plus,
        "-1" => Sign::Minus,
        other => return Err(ProofError::Syntax(format!("bad sign `{other}`"))),
    };
    Ok(DerivationStep { conjugator, relator, sign })
}

/// A word together with its expression as a product of conjugated relators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialityProof {
    pub target: Word,
    pub steps: Vec<DerivationStep>,
}

impl TrivialityProof {
    /// Freely reduced product of the conjugated relators.
    pub fn product(&self, p: &Presentation) -> Result<Word, ProofError> {
        let mut acc = p.alphabet().identity();
        let count = p.relators().len();
        let inverses: Vec<Word> = p.relators().iter().map(Word::inverse).collect();
        for (i, step) in self.steps.iter().enumerate() {
            if step.conjugator.alphabet() != p.alphabet() {
                return Err(ProofError::AlphabetMismatch);
            }
            let r = match step.sign {
                Sign::Plus => p.relators().get(step.relator),
                Sign::Minus => inverses.get(step.relator),
            }
            .ok_or(ProofError::RelatorOutOfRange { step: i, index: step.relator, count })?;
            acc.append(&step.conjugator.inverse()).expect("alphabet checked");
            acc.append(r).expect("alphabet checked");
            acc.append(&step.conjugator).expect("alphabet checked");
        }
        Ok(acc)
    }

    /// Text form: a `target:` line followed by one `step:` line per step.
    pub fn render(&self) -> String {
        let mut out = format!("target: {}\n", self.target);
        for s in &self.steps {
            out.push_str(&format!("step: {s}\n"));
        }
        out
    }

    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self, ProofError> {
        let mut target = None;
        let mut steps = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if let Some(rest) = line.strip_prefix("target:") {
                if target.is_some() {
                    return Err(ProofError::Syntax("second `target:` line".into()));
                }
                target = Some(alphabet.parse_word(rest)?);
            } else if let Some(rest) = line.strip_prefix("step:") {
                steps.push(parse_step(alphabet, rest)?);
            } else {
                return Err(ProofError::Syntax(format!("unexpected line `{line}`")));
            }
        }
        let target = target.ok_or_else(|| ProofError::Syntax("missing `target:` line".into()))?;
        Ok(TrivialityProof { target, steps })
    }
}

/// True iff the conjugated-relator product freely equals the target.
///
/// A `true` answer proves the target trivial in the group; `false` only says
/// this proof does not establish it.
pub fn check_proof(p: &Presentation, proof: &TrivialityProof) -> Result<bool, ProofError> {
    if proof.target.alphabet() != p.alphabet() {
        return Err(ProofError::AlphabetMismatch);
    }
    Ok(proof.product(p)? == proof.target)
}
