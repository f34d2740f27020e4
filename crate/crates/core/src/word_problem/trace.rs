//! Rewrite traces: sequences of local edits that turn a word into the empty
//! word, and their compilation into conjugated-relator proofs.
//!
//! A trace acts on an unreduced letter sequence. Relator moves insert or
//! delete a relator (or its inverse) at a position; cancel moves insert or
//! delete a pair `x x^-1`. Keeping free moves explicit lets traces be
//! shifted, concatenated and reversed.

use thiserror::Error;

use super::proof::{DerivationStep, Sign, TrivialityProof};
use crate::presentation::Presentation;
use crate::words::{invert_letters, reduce_letters, Alphabet, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Insert,
    Delete,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Insert => Direction::Delete,
            Direction::Delete => Direction::Insert,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rewrite {
    Relator { position: usize, relator: usize, sign: Sign, direction: Direction },
    /// The pair `letter letter^-1` at `position`.
    Cancel { position: usize, letter: Letter, direction: Direction },
}

impl Rewrite {
    pub fn position(&self) -> usize {
        match *self {
            Rewrite::Relator { position, .. } | Rewrite::Cancel { position, .. } => position,
        }
    }

    pub fn shifted(&self, offset: usize) -> Rewrite {
        match *self {
            Rewrite::Relator { position, relator, sign, direction } => {
                Rewrite::Relator { position: position + offset, relator, sign, direction }
            }
            Rewrite::Cancel { position, letter, direction } => {
                Rewrite::Cancel { position: position + offset, letter, direction }
            }
        }
    }

    /// The move undoing this one.
    pub fn undo(&self) -> Rewrite {
        match *self {
            Rewrite::Relator { position, relator, sign, direction } => {
                Rewrite::Relator { position, relator, sign, direction: direction.flip() }
            }
            Rewrite::Cancel { position, letter, direction } => {
                Rewrite::Cancel { position, letter, direction: direction.flip() }
            }
        }
    }
}

/// The trace running `trace` backwards.
pub fn reverse_trace(trace: &[Rewrite]) -> Vec<Rewrite> {
    trace.iter().rev().map(Rewrite::undo).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("rewrite {step}: {message}")]
    Inconsistent { step: usize, message: String },
    #[error("rewrite {step}: relator index {index} out of range")]
    RelatorOutOfRange { step: usize, index: usize },
    #[error("trace ends at a word of length {0}, not the empty word")]
    NotEmpty(usize),
    #[error("no relator rotation equals the requested replacement")]
    NoMatchingRelator,
    #[error("word is over a different alphabet than the presentation")]
    AlphabetMismatch,
}

#[derive(Debug, Clone)]
struct RelatorLetters {
    forward: Vec<Vec<Letter>>,
    inverse: Vec<Vec<Letter>>,
}

impl RelatorLetters {
    fn new(p: &Presentation) -> Self {
        let forward: Vec<Vec<Letter>> = p.relators().iter().map(Word::letters).collect();
        let inverse = forward.iter().map(|r| invert_letters(r)).collect();
        RelatorLetters { forward, inverse }
    }

    fn get(&self, index: usize, sign: Sign) -> Option<&[Letter]> {
        match sign {
            Sign::Plus => self.forward.get(index),
            Sign::Minus => self.inverse.get(index),
        }
        .map(Vec::as_slice)
    }
}

fn apply(word: &mut Vec<Letter>, rw: &Rewrite, rels: &RelatorLetters, step: usize) -> Result<(), TraceError> {
    let fail = |message: String| TraceError::Inconsistent { step, message };
    let pos = rw.position();
    if pos > word.len() {
        return Err(fail(format!("position {pos} beyond word length {}", word.len())));
    }
    let owned;
    let letters: &[Letter] = match *rw {
        Rewrite::Relator { relator, sign, .. } => {
            rels.get(relator, sign).ok_or(TraceError::RelatorOutOfRange { step, index: relator })?
        }
        Rewrite::Cancel { letter, .. } => {
            owned = [letter, letter.inverse()];
            &owned
        }
    };
    let direction = match *rw {
        Rewrite::Relator { direction, .. } | Rewrite::Cancel { direction, .. } => direction,
    };
    match direction {
        Direction::Insert => {
            word.splice(pos..pos, letters.iter().copied());
        }
        Direction::Delete => {
            let end = pos + letters.len();
            if end > word.len() || word[pos..end] != *letters {
                return Err(fail(format!("letters at {pos} do not match the deleted subword")));
            }
            word.drain(pos..end);
        }
    }
    Ok(())
}

/// Reduced forms of the prefixes of a changing word, shared through a
/// persistent stack so that edits near the end stay cheap.
struct PrefixCache {
    nodes: Vec<(Letter, u32)>,
    /// `snap[i]` is the node for the reduced form of `word[..i]`.
    snap: Vec<u32>,
}

const EMPTY: u32 = u32::MAX;

impl PrefixCache {
    fn new() -> Self {
        PrefixCache { nodes: Vec::new(), snap: vec![EMPTY] }
    }

    fn push(&mut self, node: u32, x: Letter) -> u32 {
        if node != EMPTY {
            let (top, parent) = self.nodes[node as usize];
            if top == x.inverse() {
                return parent;
            }
        }
        self.nodes.push((x, node));
        (self.nodes.len() - 1) as u32
    }

    fn invalidate_from(&mut self, pos: usize) {
        self.snap.truncate(pos + 1);
    }

    fn reduced_prefix(&mut self, word: &[Letter], pos: usize) -> Vec<Letter> {
        while self.snap.len() <= pos {
            let i = self.snap.len() - 1;
            let node = self.push(self.snap[i], word[i]);
            self.snap.push(node);
        }
        let mut out = Vec::new();
        let mut n = self.snap[pos];
        while n != EMPTY {
            let (x, parent) = self.nodes[n as usize];
            out.push(x);
            n = parent;
        }
        out.reverse();
        out
    }
}

/// Compiles a trace from `start` to the empty word into a proof that `start`
/// is trivial. Inserting `r^s` after a prefix `u` contributes the step
/// `(u^-1, r, -s)`; deleting it contributes `(u^-1, r, s)`.
pub fn compile_rewrite_trace(p: &Presentation, start: &Word, trace: &[Rewrite]) -> Result<TrivialityProof, TraceError> {
    if start.alphabet() != p.alphabet() {
        return Err(TraceError::AlphabetMismatch);
    }
    let rels = RelatorLetters::new(p);
    let mut word = start.letters();
    let mut cache = PrefixCache::new();
    let mut steps = Vec::new();
    for (i, rw) in trace.iter().enumerate() {
        apply(&mut word, rw, &rels, i)?;
        if let Rewrite::Relator { position, relator, sign, direction } = *rw {
            // the prefix before `position` is untouched by the edit
            let prefix = cache.reduced_prefix(&word, position);
            let conjugator = Word::from_letters(p.alphabet(), &prefix).inverse();
            let sign = match direction {
                Direction::Insert => sign.negate(),
                Direction::Delete => sign,
            };
            steps.push(DerivationStep { conjugator, relator, sign });
        }
        cache.invalidate_from(rw.position());
    }
    if !word.is_empty() {
        return Err(TraceError::NotEmpty(word.len()));
    }
    Ok(TrivialityProof { target: start.clone(), steps })
}

/// Records a trace while applying it to a working letter sequence.
#[derive(Debug, Clone)]
pub struct TraceBuilder {
    alphabet: Alphabet,
    rels: RelatorLetters,
    word: Vec<Letter>,
    trace: Vec<Rewrite>,
}

impl TraceBuilder {
    pub fn new(p: &Presentation, start: &Word) -> Result<Self, TraceError> {
        if start.alphabet() != p.alphabet() {
            return Err(TraceError::AlphabetMismatch);
        }
        Ok(TraceBuilder { alphabet: p.alphabet().clone(), rels: RelatorLetters::new(p), word: start.letters(), trace: Vec::new() })
    }

    /// The current, possibly unreduced, letter sequence.
    pub fn letters(&self) -> &[Letter] {
        &self.word
    }

    pub fn current_word(&self) -> Word {
        Word::from_letters(&self.alphabet, &self.word)
    }

    pub fn trace(&self) -> &[Rewrite] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<Rewrite> {
        self.trace
    }

    pub fn push(&mut self, rw: Rewrite) -> Result<(), TraceError> {
        apply(&mut self.word, &rw, &self.rels, self.trace.len())?;
        self.trace.push(rw);
        Ok(())
    }

    /// Applies `sub`, shifted right by `offset`.
    pub fn apply_trace(&mut self, sub: &[Rewrite], offset: usize) -> Result<(), TraceError> {
        for rw in sub {
            self.push(rw.shifted(offset))?;
        }
        Ok(())
    }

    pub fn insert_relator(&mut self, position: usize, relator: usize, sign: Sign) -> Result<(), TraceError> {
        self.push(Rewrite::Relator { position, relator, sign, direction: Direction::Insert })
    }

    pub fn delete_relator(&mut self, position: usize, relator: usize, sign: Sign) -> Result<(), TraceError> {
        self.push(Rewrite::Relator { position, relator, sign, direction: Direction::Delete })
    }

    /// Inserts `letter letter^-1` at `position`.
    pub fn insert_pair(&mut self, position: usize, letter: Letter) -> Result<(), TraceError> {
        self.push(Rewrite::Cancel { position, letter, direction: Direction::Insert })
    }

    /// Deletes the cancelling pair starting at `position`.
    pub fn delete_pair(&mut self, position: usize) -> Result<(), TraceError> {
        let letter = *self.word.get(position).ok_or_else(|| TraceError::Inconsistent {
            step: self.trace.len(),
            message: format!("no letter at {position}"),
        })?;
        self.push(Rewrite::Cancel { position, letter, direction: Direction::Delete })
    }

    /// Replaces the `len` letters at `position` by `y`, using one relator
    /// insertion. Some rotation of a relator or its inverse must spell `y x^-1`
    /// where `x` is the replaced subword.
    pub fn replace(&mut self, position: usize, len: usize, y: &[Letter]) -> Result<(), TraceError> {
        if position + len > self.word.len() {
            return Err(TraceError::Inconsistent {
                step: self.trace.len(),
                message: format!("replaced range {position}..{} beyond word", position + len),
            });
        }
        let x = self.word[position..position + len].to_vec();
        let mut r = y.to_vec();
        r.extend(invert_letters(&x));
        let (relator, sign, k) = self.find_rotation(&r).ok_or(TraceError::NoMatchingRelator)?;
        let n = x.len();
        if k <= n {
            // the relator reads x[..k]^-1 y x[k..]^-1: insert it inside x
            self.insert_relator(position + k, relator, sign)?;
            for i in 0..k {
                self.delete_pair(position + k - 1 - i)?;
            }
            for i in 0..n - k {
                self.delete_pair(position + y.len() + n - k - 1 - i)?;
            }
            return Ok(());
        }
        let rel = self.rels.get(relator, sign).expect("found above").to_vec();
        // r = B A where the relator is A B with |A| = k: build B B^-1, put the
        // relator between the halves and cancel B against B^-1
        let b = &rel[k..];
        for (i, &letter) in b.iter().enumerate() {
            self.insert_pair(position + i, letter)?;
        }
        let m = b.len();
        self.insert_relator(position + m, relator, sign)?;
        for i in 0..m {
            self.delete_pair(position + m + k + m - 1 - i)?;
        }
        for i in 0..n {
            self.delete_pair(position + y.len() + n - 1 - i)?;
        }
        Ok(())
    }

    /// The relator rotation spelling `r` with the smallest offset.
    fn find_rotation(&self, r: &[Letter]) -> Option<(usize, Sign, usize)> {
        let n = r.len();
        if n == 0 {
            return None;
        }
        let mut best: Option<(usize, Sign, usize)> = None;
        for j in 0..self.rels.forward.len() {
            for sign in [Sign::Plus, Sign::Minus] {
                let l = self.rels.get(j, sign).expect("in range");
                if l.len() != n {
                    continue;
                }
                // l = A B with r = B A and |A| = k
                for k in 0..n {
                    if best.is_some_and(|(_, _, b)| b <= k) {
                        break;
                    }
                    if l[..k] == r[n - k..] && l[k..] == r[..n - k] {
                        best = Some((j, sign, k));
                    }
                }
            }
        }
        best
    }

    /// Grows the current (freely reduced) word into `target` by inserting
    /// cancelling pairs. `target` must freely reduce to the current word.
    pub fn expand_to(&mut self, target: &[Letter]) -> Result<(), TraceError> {
        if reduce_letters(target) != self.word || reduce_letters(&self.word) != self.word {
            return Err(TraceError::Inconsistent {
                step: self.trace.len(),
                message: "expansion target does not reduce to the current word".into(),
            });
        }
        let deletions = stack_deletions(target);
        for &(position, letter) in deletions.iter().rev() {
            self.insert_pair(position, letter)?;
        }
        Ok(())
    }

    /// Freely reduces the current word with cancel moves.
    pub fn free_reduce(&mut self) -> Result<(), TraceError> {
        for (position, _) in stack_deletions(&self.word.clone()) {
            self.delete_pair(position)?;
        }
        Ok(())
    }
}

/// Pair deletions performed by left-to-right stack reduction, each with its
/// position in the word as it stands at that moment.
fn stack_deletions(word: &[Letter]) -> Vec<(usize, Letter)> {
    let mut stack: Vec<Letter> = Vec::new();
    let mut out = Vec::new();
    for &x in word {
        match stack.last() {
            Some(&top) if top == x.inverse() => {
                out.push((stack.len() - 1, top));
                stack.pop();
            }
            _ => stack.push(x),
        }
    }
    out
}
