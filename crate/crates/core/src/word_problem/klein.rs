use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::EngineError;
use crate::words::{Alphabet, Word};

/// Normal form `x^p y^q` in `<x, y | y^-1 x y = x^-1>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KleinElement {
    pub p: BigInt,
    pub q: BigInt,
}

impl KleinElement {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        KleinElement { p: p.into(), q: q.into() }
    }

    pub fn identity() -> Self {
        KleinElement::new(0, 0)
    }

    pub fn is_identity(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// `(p, q)(p', q') = (p + (-1)^q p', q + q')`
    pub fn mul(&self, other: &KleinElement) -> KleinElement {
        let p = if self.q.is_odd() { &self.p - &other.p } else { &self.p + &other.p };
        KleinElement { p, q: &self.q + &other.q }
    }

    pub fn inverse(&self) -> KleinElement {
        let p = if self.q.is_odd() { self.p.clone() } else { -&self.p };
        KleinElement { p, q: -&self.q }
    }
}

impl fmt::Display for KleinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} q={}", self.p, self.q)
    }
}

pub fn klein_alphabet() -> Alphabet {
    Alphabet::new(["x", "y"]).expect("distinct names")
}

pub fn klein_eval(w: &Word) -> Result<KleinElement, EngineError> {
    if *w.alphabet() != klein_alphabet() {
        return Err(EngineError::WrongAlphabet { expected: "{x, y}" });
    }
    let mut acc = KleinElement::identity();
    for s in w.syllables() {
        let factor = if s.generator == 0 {
            KleinElement { p: s.exponent.clone(), q: BigInt::zero() }
        } else {
            KleinElement { p: BigInt::zero(), q: s.exponent.clone() }
        };
        acc = acc.mul(&factor);
    }
    Ok(acc)
}
