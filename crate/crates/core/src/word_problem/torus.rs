use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::EngineError;
use crate::presentation::Monodromy;
use crate::words::{Alphabet, Word};

/// Exact 2x2 integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2(pub [[BigInt; 2]; 2]);

impl Mat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Mat2([[a.into(), b.into()], [c.into(), d.into()]])
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        let [[a, b], [c, d]] = &self.0;
        a * d - b * c
    }

    pub fn transpose(&self) -> Mat2 {
        let [[a, b], [c, d]] = &self.0;
        Mat2([[a.clone(), c.clone()], [b.clone(), d.clone()]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let m = &self.0;
        let n = &o.0;
        let e = |i: usize, j: usize| &m[i][0] * &n[0][j] + &m[i][1] * &n[1][j];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn apply(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        let m = &self.0;
        [&m[0][0] * &v[0] + &m[0][1] * &v[1], &m[1][0] * &v[0] + &m[1][1] * &v[1]]
    }

    /// Inverse of a unimodular matrix, through the adjugate.
    pub fn unimodular_inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if !det.abs().is_one() {
            return None;
        }
        let [[a, b], [c, d]] = &self.0;
        Some(Mat2([[d * &det, -b * &det], [-c * &det, a * &det]]))
    }

    pub fn pow(&self, mut n: u64) -> Mat2 {
        let mut base = self.clone();
        let mut acc = Mat2::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = &self.0;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// Normal form `l^v0 m^v1 t^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TbElement {
    pub v: [BigInt; 2],
    pub k: BigInt,
}

impl TbElement {
    pub fn new(v0: impl Into<BigInt>, v1: impl Into<BigInt>, k: impl Into<BigInt>) -> Self {
        TbElement { v: [v0.into(), v1.into()], k: k.into() }
    }

    pub fn identity() -> Self {
        TbElement::new(0, 0, 0)
    }

    pub fn is_identity(&self) -> bool {
        self.v[0].is_zero() && self.v[1].is_zero() && self.k.is_zero()
    }
}

impl fmt::Display for TbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={},{} k={}", self.v[0], self.v[1], self.k)
    }
}

pub fn torus_alphabet() -> Alphabet {
    Alphabet::new(["l", "m", "t"]).expect("distinct names")
}

/// Normal-form arithmetic in the torus-bundle group with a fixed monodromy.
///
/// Writing `x(v) = l^v0 m^v1`, the relators say `t^-1 x(v) t = x(C v)` with
/// `C` the transpose of the monodromy, so `t^k x(w) = x(C^-k w) t^k`.
#[derive(Debug, Clone)]
pub struct TorusEngine {
    monodromy: Monodromy,
    c: Mat2,
    c_inv: Mat2,
}

impl TorusEngine {
    pub fn new(monodromy: Monodromy) -> Result<Self, EngineError> {
        let Monodromy { a, b, c, d } = monodromy;
        let cm = Mat2::new(a, c, b, d);
        let c_inv = cm.unimodular_inverse().ok_or_else(|| EngineError::NotUnimodular(monodromy.det().to_string()))?;
        Ok(TorusEngine { monodromy, c: cm, c_inv })
    }

    pub fn monodromy(&self) -> Monodromy {
        self.monodromy
    }

    /// `C^-k`.
    fn twist(&self, k: &BigInt) -> Result<Mat2, EngineError> {
        let n = k.abs().to_u64().ok_or_else(|| EngineError::ExponentTooLarge(k.to_string()))?;
        Ok(if k.is_negative() { self.c.pow(n) } else { self.c_inv.pow(n) })
    }

    pub fn mul(&self, x: &TbElement, y: &TbElement) -> Result<TbElement, EngineError> {
        let w = self.twist(&x.k)?.apply(&y.v);
        Ok(TbElement { v: [&x.v[0] + &w[0], &x.v[1] + &w[1]], k: &x.k + &y.k })
    }

    pub fn inverse(&self, x: &TbElement) -> Result<TbElement, EngineError> {
        let w = self.twist(&-&x.k)?.apply(&x.v);
        Ok(TbElement { v: [-&w[0], -&w[1]], k: -&x.k })
    }

    pub fn eval(&self, w: &Word) -> Result<TbElement, EngineError> {
        if *w.alphabet() != torus_alphabet() {
            return Err(EngineError::WrongAlphabet { expected: "{l, m, t}" });
        }
        let mut v = [BigInt::zero(), BigInt::zero()];
        let mut k = BigInt::zero();
        for s in w.syllables() {
            match s.generator {
                2 => k += &s.exponent,
                g => {
                    let mut e = [BigInt::zero(), BigInt::zero()];
                    e[g] = s.exponent.clone();
                    let e = self.twist(&k)?.apply(&e);
                    v[0] += &e[0];
                    v[1] += &e[1];
                }
            }
        }
        Ok(TbElement { v, k })
    }
}

pub fn tb_eval(monodromy: Monodromy, w: &Word) -> Result<TbElement, EngineError> {
    TorusEngine::new(monodromy)?.eval(w)
}
