//! Generalized torsion certificates: construction and verification.
//!
//! A certificate names a base element `g`, a list of conjugators `c_i` with
//! multiplicities `m_i`, a proof that `prod (c_i^-1 g^m_i c_i)` is trivial,
//! and evidence that `g` itself is not.

mod builders;
mod fibonacci;
mod file;
mod torus;

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::abelian::{abelianize, image, Order};
use crate::coset::{default_max_cosets, enumerate, CosetStatus};
use crate::presentation::{klein_bottle, torus_bundle, Monodromy, Presentation, PresentationError};
use crate::word_problem::{
    check_proof, klein_alphabet, klein_eval, torus_alphabet, KleinElement, TbElement, TorusEngine, TraceError,
    TrivialityProof,
};
use crate::words::Word;

pub use builders::{
    build_commutator_power_certificate, build_kb_circle_certificate, build_klein_certificate, build_rss_certificate,
};
pub use fibonacci::{build_fibonacci_certificate, canonical_expression, claim_decomposition, noncanonical_expression};
pub use file::{parse_certificate, render_certificate, render_certificate_with_reference};
pub use torus::{build_torus_bundle_certificate, torus_case, TorusCase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("word does not have the required shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("derivation failed: {0}")]
    Trace(#[from] TraceError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

/// `multiplicity` consecutive copies of `conjugator^-1 g conjugator`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factor {
    pub conjugator: Word,
    pub multiplicity: u64,
}

impl Factor {
    pub fn new(conjugator: Word, multiplicity: u64) -> Self {
        Factor { conjugator, multiplicity }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", self.conjugator, self.multiplicity)
    }
}

/// Freely reduced `prod conjugate(base^m_i, c_i)`.
pub fn factor_product(base: &Word, factors: &[Factor]) -> Word {
    let mut acc = base.alphabet().identity();
    for f in factors {
        let power = base.pow(&BigInt::from(f.multiplicity));
        acc.append(&power.conjugate(&f.conjugator).expect("factor over base alphabet")).expect("same alphabet");
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalFormEvidence {
    Klein(KleinElement),
    TorusBundle { monodromy: Monodromy, element: TbElement },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// The base survives in the abelianization.
    AbelianizationNonzero,
    /// The group is finite of this order and the base acts nontrivially on
    /// the regular coset table.
    FiniteQuotient { order: u64 },
    NormalForm(NormalFormEvidence),
    /// Nontriviality taken from the literature; not machine checked.
    Cited(String),
}

impl Evidence {
    pub fn kind(&self) -> &'static str {
        match self {
            Evidence::AbelianizationNonzero => "abelianization",
            Evidence::FiniteQuotient { .. } => "finite-quotient",
            Evidence::NormalForm(_) => "normal-form",
            Evidence::Cited(_) => "cited",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtCertificate {
    pub presentation: Presentation,
    pub base: Word,
    pub factors: Vec<Factor>,
    pub proof: TrivialityProof,
    pub evidence: Evidence,
}

impl GtCertificate {
    pub fn product(&self) -> Word {
        factor_product(&self.base, &self.factors)
    }

    pub fn total_multiplicity(&self) -> BigInt {
        self.factors.iter().map(|f| BigInt::from(f.multiplicity)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Proof,
    CosetTable { max_cosets: usize },
    NormalForm,
    Abelian,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Unavailable,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Unavailable => "unavailable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Verified,
    ConditionallyVerified,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::ConditionallyVerified => "conditionally-verified",
            Status::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportLine {
    pub key: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub status: Status,
    pub lines: Vec<ReportLine>,
}

impl VerificationReport {
    pub fn outcome(&self, key: &str) -> Option<&Outcome> {
        self.lines.iter().find(|l| l.key == key).map(|l| &l.outcome)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "status={}", self.status)?;
        for l in &self.lines {
            if l.detail.is_empty() {
                writeln!(f, "{}={}", l.key, l.outcome)?;
            } else {
                writeln!(f, "{}={} {}", l.key, l.outcome, l.detail)?;
            }
        }
        Ok(())
    }
}

/// A normal-form engine that is a homomorphism out of the given presentation.
#[derive(Debug, Clone)]
enum Engine {
    Klein,
    Torus(Box<TorusEngine>),
}

impl Engine {
    fn detect(p: &Presentation) -> Option<Engine> {
        if *p.alphabet() == klein_alphabet() && p.relators() == klein_bottle().relators() {
            return Some(Engine::Klein);
        }
        if *p.alphabet() == torus_alphabet() && p.relators().len() == 3 {
            let r1 = p.relators()[1].exponent_vector();
            let r2 = p.relators()[2].exponent_vector();
            let int = |x: &BigInt| i64::try_from(x).ok();
            let one = BigInt::from(1);
            let (a, b) = (int(&(&one - &r1[0]))?, int(&-&r1[1])?);
            let (c, d) = (int(&-&r2[0])?, int(&(&one - &r2[1]))?);
            let candidate = torus_bundle(a, b, c, d).ok()?;
            if candidate.relators() == p.relators() {
                return TorusEngine::new(Monodromy::new(a, b, c, d)).ok().map(|e| Engine::Torus(Box::new(e)));
            }
        }
        None
    }

    fn name(&self) -> &'static str {
        match self {
            Engine::Klein => "klein",
            Engine::Torus(_) => "torusbundle",
        }
    }

    fn is_identity(&self, w: &Word) -> Option<bool> {
        match self {
            Engine::Klein => klein_eval(w).ok().map(|e| e.is_identity()),
            Engine::Torus(e) => e.eval(w).ok().map(|e| e.is_identity()),
        }
    }
}

fn check_evidence(cert: &GtCertificate, max_cosets: usize) -> ReportLine {
    let p = &cert.presentation;
    let (outcome, detail) = match &cert.evidence {
        Evidence::AbelianizationNonzero => {
            let inv = abelianize(p);
            match image(p, &inv, &cert.base) {
                Ok(img) if !img.is_zero() => {
                    (Outcome::Pass, format!("kind=abelianization order={}", inv.order_of_image(&img)))
                }
                _ => (Outcome::Fail, "kind=abelianization base maps to zero".into()),
            }
        }
        Evidence::FiniteQuotient { order } => match enumerate(p, &[], max_cosets) {
            Ok(t) if t.is_complete() => {
                let moved = t.evaluate(&cert.base).map(|perm| !perm.is_identity()).unwrap_or(false);
                if t.n_cosets() as u64 == *order && moved {
                    (Outcome::Pass, format!("kind=finite-quotient order={order}"))
                } else {
                    (Outcome::Fail, format!("kind=finite-quotient order={} base_moved={moved}", t.n_cosets()))
                }
            }
            Ok(_) => (Outcome::Fail, format!("kind=finite-quotient enumeration aborted at {max_cosets} cosets")),
            Err(e) => (Outcome::Fail, format!("kind=finite-quotient {e}")),
        },
        Evidence::NormalForm(nf) => {
            let (ok, detail) = match nf {
                NormalFormEvidence::Klein(expected) => {
                    let valid = p.alphabet() == &klein_alphabet()
                        && p.relators().iter().all(|r| klein_eval(r).is_ok_and(|e| e.is_identity()));
                    let got = klein_eval(&cert.base).ok();
                    (valid && got.as_ref() == Some(expected) && !expected.is_identity(), format!("kind=normal-form klein {expected}"))
                }
                NormalFormEvidence::TorusBundle { monodromy, element } => {
                    let ok = TorusEngine::new(*monodromy).is_ok_and(|e| {
                        p.alphabet() == &torus_alphabet()
                            && p.relators().iter().all(|r| e.eval(r).is_ok_and(|x| x.is_identity()))
                            && e.eval(&cert.base).ok().as_ref() == Some(element)
                            && !element.is_identity()
                    });
                    (ok, format!("kind=normal-form torusbundle {element}"))
                }
            };
            (if ok { Outcome::Pass } else { Outcome::Fail }, detail)
        }
        Evidence::Cited(text) => (Outcome::Unavailable, format!("kind=cited {text}")),
    };
    ReportLine { key: "evidence", outcome, detail }
}

/// Checks a certificate. The proof, the evidence and the abelian necessary
/// condition are always checked; `methods` adds corroborating checks.
pub fn verify(cert: &GtCertificate, methods: &[Method]) -> VerificationReport {
    let p = &cert.presentation;
    let mut lines = Vec::new();
    let mut failed = false;

    let structure_ok = !cert.factors.is_empty()
        && cert.factors.iter().all(|f| f.multiplicity >= 1 && f.conjugator.alphabet() == p.alphabet())
        && cert.base.alphabet() == p.alphabet();
    if !structure_ok {
        lines.push(ReportLine { key: "structure", outcome: Outcome::Fail, detail: "empty factor list, zero multiplicity or foreign alphabet".into() });
        return VerificationReport { status: Status::Failed, lines };
    }

    let product = cert.product();
    let (outcome, detail) = if cert.proof.target != product {
        (Outcome::Fail, "target differs from the factor product".to_string())
    } else {
        match check_proof(p, &cert.proof) {
            Ok(true) => (Outcome::Pass, format!("steps={}", cert.proof.steps.len())),
            Ok(false) => (Outcome::Fail, format!("steps={} product mismatch", cert.proof.steps.len())),
            Err(e) => (Outcome::Fail, e.to_string()),
        }
    };
    failed |= outcome == Outcome::Fail;
    lines.push(ReportLine { key: "proof", outcome, detail });

    let coset_limit = methods
        .iter()
        .find_map(|m| match m {
            Method::CosetTable { max_cosets } => Some(*max_cosets),
            _ => None,
        })
        .unwrap_or_else(default_max_cosets);
    let ev = check_evidence(cert, coset_limit);
    failed |= ev.outcome == Outcome::Fail;
    let cited = ev.outcome == Outcome::Unavailable;
    lines.push(ev);

    let inv = abelianize(p);
    let img = image(p, &inv, &cert.base).expect("alphabet checked");
    let order = inv.order_of_image(&img);
    let total = cert.total_multiplicity();
    let necessary = match &order {
        Order::Finite(n) => (&total % n).is_zero(),
        Order::Infinite => false,
    };
    failed |= !necessary;
    lines.push(ReportLine {
        key: "necessary",
        outcome: if necessary { Outcome::Pass } else { Outcome::Fail },
        detail: format!("multiplicity={total} base_order={order}"),
    });

    for method in methods {
        match method {
            Method::Proof => {}
            Method::Abelian => {
                lines.push(ReportLine {
                    key: "abelian",
                    outcome: if necessary { Outcome::Pass } else { Outcome::Fail },
                    detail: format!("{inv} image={img}"),
                });
            }
            Method::CosetTable { max_cosets } => {
                let line = match enumerate(p, &[], *max_cosets) {
                    Ok(t) if t.status() == CosetStatus::Complete => {
                        let prod_id = t.evaluate(&product).map(|x| x.is_identity()).unwrap_or(false);
                        let base_id = t.evaluate(&cert.base).map(|x| x.is_identity()).unwrap_or(true);
                        failed |= !prod_id;
                        ReportLine {
                            key: "coset",
                            outcome: if prod_id { Outcome::Pass } else { Outcome::Fail },
                            detail: format!(
                                "n_cosets={} base={}",
                                t.n_cosets(),
                                if base_id { "identity" } else { "nonidentity" }
                            ),
                        }
                    }
                    _ => ReportLine {
                        key: "coset",
                        outcome: Outcome::Unavailable,
                        detail: format!("enumeration aborted at {max_cosets} cosets"),
                    },
                };
                lines.push(line);
            }
            Method::NormalForm => {
                let line = match Engine::detect(p) {
                    Some(engine) => {
                        let prod_id = engine.is_identity(&product) == Some(true);
                        let base_id = engine.is_identity(&cert.base) != Some(false);
                        let ok = prod_id && !base_id;
                        failed |= !ok;
                        ReportLine {
                            key: "normal-form",
                            outcome: if ok { Outcome::Pass } else { Outcome::Fail },
                            detail: format!("engine={}", engine.name()),
                        }
                    }
                    None => ReportLine {
                        key: "normal-form",
                        outcome: Outcome::Unavailable,
                        detail: "no engine for this presentation".into(),
                    },
                };
                lines.push(line);
            }
        }
    }

    let status = if failed {
        Status::Failed
    } else if cited {
        Status::ConditionallyVerified
    } else {
        Status::Verified
    };
    VerificationReport { status, lines }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_product_uses_right_conjugation() {
        let p = klein_bottle();
        let x = p.generator("x").unwrap();
        let factors = vec![Factor::new(p.alphabet().identity(), 1), Factor::new(p.generator("y").unwrap(), 1)];
        assert_eq!(factor_product(&x, &factors).to_string(), "x y^-1 x y");
    }

    #[test]
    fn engine_detection() {
        assert!(matches!(Engine::detect(&klein_bottle()), Some(Engine::Klein)));
        let tb = torus_bundle(2, 1, 1, 1).unwrap();
        match Engine::detect(&tb) {
            Some(Engine::Torus(e)) => assert_eq!(e.monodromy(), Monodromy::new(2, 1, 1, 1)),
            other => panic!("{other:?}"),
        }
        assert!(Engine::detect(&crate::presentation::fibonacci(4).unwrap()).is_none());
    }
}
