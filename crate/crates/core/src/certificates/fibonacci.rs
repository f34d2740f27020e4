use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{factor_product, CertificateError, Evidence, Factor, GtCertificate};
use crate::abelian::{abelianize, image};
use crate::coset::{default_max_cosets, enumerate};
use crate::presentation::{fibonacci, Presentation};
use crate::word_problem::{compile_rewrite_trace, reverse_trace, Direction, Rewrite, TraceBuilder, TraceError};
use crate::words::{invert_letters, reduce_letters, Letter, Word};

/// Fibonacci groups known to be finite, where the regular coset table
/// certifies `a1 != 1`.
const FINITE: [usize; 4] = [3, 4, 5, 7];

fn check_m(m: usize) -> Result<(), CertificateError> {
    if m <= 2 {
        return Err(CertificateError::Precondition(format!("Fibonacci certificates need m > 2, got {m}")));
    }
    Ok(())
}

/// Generator `a_j` with indices read mod `m`, as a letter.
fn gen(m: usize, j: usize) -> Letter {
    Letter::new((j - 1) % m, false)
}

/// `a_j` as a positive word in `a = a1`, `b = a2`, for `j` in `1..=m+1`:
/// `a_j = a_(j-2) a_(j-1)`.
fn canonical_letters(m: usize, upto: usize) -> Vec<Vec<Letter>> {
    let mut out: Vec<Vec<Letter>> = vec![Vec::new(), vec![gen(m, 1)], vec![gen(m, 2)]];
    for j in 3..=upto {
        let mut w = out[j - 2].clone();
        w.extend_from_slice(&out[j - 1]);
        out.push(w);
    }
    out
}

/// `a_j` in `a`, `b` via `a_j = a_(j+2) a_(j+1)^-1`, descending from
/// `a_(m+1) = a` and `a_(m+2) = b`; index `j` in `1..=m+2`.
fn noncanonical_letters(m: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new(); m + 3];
    out[m + 1] = vec![gen(m, 1)];
    out[m + 2] = vec![gen(m, 2)];
    for j in (1..=m).rev() {
        let mut w = out[j + 2].clone();
        w.extend(invert_letters(&out[j + 1]));
        out[j] = reduce_letters(&w);
    }
    out
}

/// Positive word in `a = a1`, `b = a2` equal to `a_i` in `F(2, m)`.
pub fn canonical_expression(m: usize, i: usize) -> Result<Word, CertificateError> {
    check_m(m)?;
    if !(1..=m).contains(&i) {
        return Err(CertificateError::Precondition(format!("index {i} outside 1..={m}")));
    }
    let p = fibonacci(m)?;
    Ok(Word::from_letters(p.alphabet(), &canonical_letters(m, i)[i]))
}

/// Expression for `a_i` obtained by running the relations downwards from
/// `a_m = b a^-1`.
pub fn noncanonical_expression(m: usize, i: usize) -> Result<Word, CertificateError> {
    check_m(m)?;
    if !(1..=m).contains(&i) {
        return Err(CertificateError::Precondition(format!("index {i} outside 1..={m}")));
    }
    let p = fibonacci(m)?;
    Ok(Word::from_letters(p.alphabet(), &noncanonical_letters(m)[i]))
}

/// Writes `w = a^m1 b^n1 ... a^mk b^nk` (generators 0 and 1 of its alphabet,
/// all `a`-exponents positive, `n1 + ... + nk = 0`) as a product of
/// conjugates of `a`: the `j`-th factor is `(b^-(n1+...+n(j-1)), mj)`.
pub fn claim_decomposition(w: &Word) -> Result<Vec<Factor>, CertificateError> {
    let al = w.alphabet();
    if al.len() < 2 {
        return Err(CertificateError::Shape("alphabet has fewer than two generators".into()));
    }
    let mut shift = BigInt::zero();
    let mut factors = Vec::new();
    for s in w.syllables() {
        match s.generator {
            0 => {
                if !s.exponent.is_positive() {
                    return Err(CertificateError::Shape(format!("negative power of {} in {w}", al.name(0))));
                }
                let mult = s.exponent.to_u64().ok_or_else(|| CertificateError::Shape("multiplicity too large".into()))?;
                factors.push(Factor::new(Word::power_of(al, 1, -&shift), mult));
            }
            1 => shift += &s.exponent,
            g => return Err(CertificateError::Shape(format!("unexpected generator {} in {w}", al.name(g)))),
        }
    }
    if !shift.is_zero() {
        return Err(CertificateError::Shape(format!("total exponent of {} is {shift}, not 0", al.name(1))));
    }
    if factors.is_empty() {
        return Err(CertificateError::Shape("no power of the base".into()));
    }
    Ok(factors)
}

/// The same moves on the inverted word: turns `x^-1` into `w^-1` when the
/// input turns `x` into `w`.
fn mirror_trace(p: &Presentation, trace: &[Rewrite], start_len: usize) -> Vec<Rewrite> {
    let mut n = start_len;
    let mut out = Vec::with_capacity(trace.len());
    for rw in trace {
        let m = match *rw {
            Rewrite::Relator { position, relator, sign, direction } => {
                let k = p.relators()[relator].letter_len().to_usize().expect("relator length fits");
                let position = match direction {
                    Direction::Insert => {
                        let at = n - position;
                        n += k;
                        at
                    }
                    Direction::Delete => {
                        n -= k;
                        n - position
                    }
                };
                Rewrite::Relator { position, relator, sign: sign.negate(), direction }
            }
            Rewrite::Cancel { position, letter, direction } => {
                let position = match direction {
                    Direction::Insert => {
                        let at = n - position;
                        n += 2;
                        at
                    }
                    Direction::Delete => {
                        n -= 2;
                        n - position
                    }
                };
                Rewrite::Cancel { position, letter, direction }
            }
        };
        out.push(m);
    }
    out
}

/// Traces rewriting a single generator letter into its canonical or
/// noncanonical expression.
struct Expander<'a> {
    p: &'a Presentation,
    m: usize,
    canon: Vec<Vec<Letter>>,
    noncanon: Vec<Vec<Letter>>,
    canon_traces: HashMap<usize, Vec<Rewrite>>,
    noncanon_traces: HashMap<usize, Vec<Rewrite>>,
}

impl<'a> Expander<'a> {
    fn new(p: &'a Presentation, m: usize) -> Self {
        Expander {
            p,
            m,
            canon: canonical_letters(m, m + 1),
            noncanon: noncanonical_letters(m),
            canon_traces: HashMap::new(),
            noncanon_traces: HashMap::new(),
        }
    }

    fn single(&self, j: usize) -> Result<TraceBuilder, TraceError> {
        TraceBuilder::new(self.p, &Word::from_letters(self.p.alphabet(), &[gen(self.m, j)]))
    }

    /// `a_j -> canonical(j)` for `j` in `1..=m+1`.
    fn canonical(&mut self, j: usize) -> Result<Vec<Rewrite>, TraceError> {
        if j <= 2 {
            return Ok(Vec::new());
        }
        if let Some(t) = self.canon_traces.get(&j) {
            return Ok(t.clone());
        }
        let left = self.canonical(j - 2)?;
        let right = self.canonical(j - 1)?;
        let mut b = self.single(j)?;
        b.replace(0, 1, &[gen(self.m, j - 2), gen(self.m, j - 1)])?;
        b.apply_trace(&left, 0)?;
        b.apply_trace(&right, self.canon[j - 2].len())?;
        let t = b.into_trace();
        self.canon_traces.insert(j, t.clone());
        Ok(t)
    }

    /// `a_j -> noncanonical(j)` for `j` in `1..=m+2`.
    fn noncanonical(&mut self, j: usize) -> Result<Vec<Rewrite>, TraceError> {
        if j > self.m {
            return Ok(Vec::new());
        }
        if let Some(t) = self.noncanon_traces.get(&j) {
            return Ok(t.clone());
        }
        let left = self.noncanonical(j + 2)?;
        let right = mirror_trace(self.p, &self.noncanonical(j + 1)?, 1);
        let mut b = self.single(j)?;
        b.replace(0, 1, &[gen(self.m, j + 2), gen(self.m, j + 1).inverse()])?;
        b.apply_trace(&left, 0)?;
        b.apply_trace(&right, self.noncanon[j + 2].len())?;
        b.free_reduce()?;
        let t = b.into_trace();
        self.noncanon_traces.insert(j, t.clone());
        Ok(t)
    }
}

/// Certificate for `a1` in `F(2, m)`, `m > 2`.
pub fn build_fibonacci_certificate(m: usize) -> Result<GtCertificate, CertificateError> {
    check_m(m)?;
    let pres = fibonacci(m)?;
    let al = pres.alphabet().clone();
    let a = gen(m, 1);
    let base = al.generator(0);
    let mut ex = Expander::new(&pres, m);
    let u = ex.canon[m + 1].clone();
    let w = ex.noncanon[1].clone();
    let to_u = reverse_trace(&ex.canonical(m + 1)?);
    let to_w = ex.noncanonical(1)?;

    let (factors, target, trace) = if m.is_multiple_of(2) {
        // a = w with w over {a, b^-1}; drop the leading a and put u in place of the next one
        if w.first() != Some(&a) {
            return Err(CertificateError::Shape("even noncanonical expression does not start with a".into()));
        }
        let rest = &w[1..];
        let f = rest.iter().position(|&x| x == a).ok_or_else(|| CertificateError::Shape("no a to substitute".into()))?;
        let mut expanded = rest[..f].to_vec();
        expanded.extend_from_slice(&u);
        expanded.extend_from_slice(&rest[f + 1..]);
        let target = Word::from_letters(&al, &expanded);
        let factors = claim_decomposition(&target)?;
        let mut b = TraceBuilder::new(&pres, &target)?;
        b.expand_to(&expanded)?;
        b.apply_trace(&to_u, f)?;
        b.insert_pair(0, a.inverse())?;
        b.apply_trace(&reverse_trace(&to_w), 1)?;
        b.delete_pair(0)?;
        (factors, target, b.into_trace())
    } else {
        // 1 = u^-1 w with w over {a^-1, b}: a product of conjugates of a^-1, inverted
        let mut neg = invert_letters(&u);
        neg.extend_from_slice(&w);
        let flipped: Vec<Letter> = reduce_letters(&neg)
            .into_iter()
            .map(|x| if x.generator() == 0 { x.inverse() } else { x })
            .collect();
        let mut factors = claim_decomposition(&Word::from_letters(&al, &flipped))?;
        factors.reverse();
        let mut expanded = invert_letters(&w);
        let wl = expanded.len();
        expanded.extend_from_slice(&u);
        let target = Word::from_letters(&al, &expanded);
        let mut b = TraceBuilder::new(&pres, &target)?;
        b.expand_to(&expanded)?;
        b.apply_trace(&to_u, wl)?;
        b.apply_trace(&reverse_trace(&mirror_trace(&pres, &to_w, 1)), 0)?;
        b.delete_pair(0)?;
        (factors, target, b.into_trace())
    };
    if factor_product(&base, &factors) != target {
        return Err(CertificateError::Shape("decomposition does not reproduce the derived word".into()));
    }
    let proof = compile_rewrite_trace(&pres, &target, &trace)?;
    Ok(GtCertificate { evidence: fibonacci_evidence(&pres, &base, m), presentation: pres, base, factors, proof })
}

fn fibonacci_evidence(p: &Presentation, base: &Word, m: usize) -> Evidence {
    if FINITE.contains(&m) {
        if let Ok(t) = enumerate(p, &[], default_max_cosets()) {
            if t.is_complete() && t.evaluate(base).is_ok_and(|x| !x.is_identity()) {
                return Evidence::FiniteQuotient { order: t.n_cosets() as u64 };
            }
        }
    }
    let inv = abelianize(p);
    if image(p, &inv, base).is_ok_and(|img| !img.is_zero()) {
        return Evidence::AbelianizationNonzero;
    }
    Evidence::Cited(format!("a1 is nontrivial in F(2,{m}) for every m > 2"))
}
